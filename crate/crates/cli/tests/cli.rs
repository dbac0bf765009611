use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scf_core::{BitstreamHeader, CodecConfig};

fn scf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scf")).args(args).output().expect("spawn scf")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn small_corpus(dir: &Path, seed: &str) {
    let out = scf(&["gen-corpus", p(dir), "--seed", seed, "--count", "5", "--min-size", "16", "--max-size", "40"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn ppm_pixels(bytes: &[u8]) -> &[u8] {
    // header is "P6\n<w> <h>\n255\n" as written by the codec
    let mut newlines = 0;
    let at = bytes.iter().position(|&b| {
        newlines += (b == b'\n') as u32;
        newlines == 3
    });
    &bytes[at.unwrap() + 1..]
}

#[test]
fn encode_decode_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("c");
    small_corpus(&corpus, "3");
    for flags in [&[][..], &["--no-stage3-pruning", "--no-escape-ctx"][..], &["--tolerance", "2"][..]] {
        let src = corpus.join("img001.ppm");
        let enc = tmp.path().join("a.scf");
        let dec = tmp.path().join("a.ppm");
        let mut args = vec!["encode", p(&src), p(&enc)];
        args.extend_from_slice(flags);
        assert!(scf(&args).status.success());
        assert!(scf(&["decode", p(&enc), p(&dec)]).status.success());
        let (a, b) = (fs::read(&src).unwrap(), fs::read(&dec).unwrap());
        assert_eq!(ppm_pixels(&a), ppm_pixels(&b));
    }
}

#[test]
fn baseline_flags_change_header() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("c");
    small_corpus(&corpus, "4");
    let src = corpus.join("img000.ppm");
    let (a, b) = (tmp.path().join("a.scf"), tmp.path().join("b.scf"));
    assert!(scf(&["encode", p(&src), p(&a)]).status.success());
    assert!(scf(&["encode", p(&src), p(&b), "--no-stage3-pruning", "--no-escape-ctx"]).status.success());
    let a = BitstreamHeader::parse(&fs::read(&a).unwrap()).unwrap().config;
    let b = BitstreamHeader::parse(&fs::read(&b).unwrap()).unwrap().config;
    assert_eq!(a, CodecConfig::default());
    assert_eq!(b, CodecConfig::baseline());
}

#[test]
fn decode_rejects_non_scf() {
    let tmp = tempfile::tempdir().unwrap();
    let junk = tmp.path().join("junk.scf");
    fs::write(&junk, b"definitely not a bitstream").unwrap();
    let out = scf(&["decode", p(&junk), p(&tmp.path().join("o.ppm"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn truncated_stream_is_corrupt() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("c");
    small_corpus(&corpus, "5");
    let enc = tmp.path().join("a.scf");
    assert!(scf(&["encode", p(&corpus.join("img002.ppm")), p(&enc)]).status.success());
    let bytes = fs::read(&enc).unwrap();
    fs::write(&enc, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(scf(&["decode", p(&enc), p(&tmp.path().join("o.ppm"))]).status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(scf(&[]).status.code(), Some(1));
    assert_eq!(scf(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(scf(&["encode", "--tolerance", "x", "a", "b"]).status.code(), Some(1));
    assert_eq!(scf(&["--help"]).status.code(), Some(0));
    let missing = tmp.path().join("missing.ppm");
    assert_eq!(scf(&["encode", p(&missing), p(&tmp.path().join("o"))]).status.code(), Some(2));
    assert_eq!(scf(&["gen-corpus", p(tmp.path()), "--targets", "abc"]).status.code(), Some(1));
}

#[test]
fn gen_corpus_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    small_corpus(&a, "9");
    small_corpus(&b, "9");
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
    let manifest = fs::read_to_string(a.join("manifest.txt")).unwrap();
    assert_eq!(manifest.lines().count(), 5);
    let frac: f64 = manifest.lines().next().unwrap().split(' ').nth(4).unwrap().parse().unwrap();
    assert!(frac > 0.0 && frac <= 1.0);
}

#[test]
fn flat_and_noise_corpora() {
    let tmp = tempfile::tempdir().unwrap();
    let only = |dir: &Path, kind: &str| {
        let mut args = vec!["gen-corpus", p(dir), "--count", "4", "--min-size", "24", "--max-size", "48", "--targets", "none"];
        for flag in ["--flat", "--text", "--pictorial", "--noise"] {
            args.extend([flag, if flag[2..] == *kind { "1.0" } else { "0" }]);
        }
        assert!(scf(&args).status.success());
        fs::read_to_string(dir.join("manifest.txt")).unwrap()
    };
    for line in only(&tmp.path().join("flat"), "flat").lines() {
        let colors: usize = line.split(' ').nth(3).unwrap().parse().unwrap();
        assert!(colors <= 8, "{line}");
    }
    for line in only(&tmp.path().join("noise"), "noise").lines() {
        let frac: f64 = line.split(' ').nth(4).unwrap().parse().unwrap();
        assert!(frac > 0.17, "{line}");
    }
}

#[test]
fn bench_and_stats_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("c");
    small_corpus(&corpus, "6");
    let (r, s) = (tmp.path().join("r.csv"), tmp.path().join("s.csv"));
    let out = scf(&["bench", p(&corpus), "--stats", p(&r), "--summary", p(&s)]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("sum check failures: 0"), "{stdout}");
    let rows = fs::read_to_string(&r).unwrap();
    assert_eq!(rows.lines().count(), 6);
    assert!(rows.lines().skip(1).all(|l| l.ends_with(",true")));
    let summary = fs::read_to_string(&s).unwrap();
    let total = summary.lines().last().unwrap();
    assert!(total.starts_with("total,5,") && total.ends_with(",100.0"), "{total}");

    let enc = tmp.path().join("x.scf");
    let st = tmp.path().join("st.csv");
    assert!(scf(&["encode", p(&corpus.join("img000.ppm")), p(&enc), "--stats", p(&st)]).status.success());
    let text = fs::read_to_string(&st).unwrap();
    let stages: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(stages, ["pattern", "palette", "residual", "overhead", "total"]);

    let out = scf(&["inspect", p(&enc)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("palette size") && text.contains("pattern keys"), "{text}");
}

#[test]
fn bench_empty_dir_fails() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(scf(&["bench", p(tmp.path())]).status.code(), Some(2));
}
