//! `scf` command-line front end.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scf_core::bench::{run_bench, write_csv, write_stage_stats_csv, write_summary_csv, VARIANTS};
use scf_core::codec::MAGIC;
use scf_core::corpus::{generate, load_corpus, write_corpus, ContentMix, CorpusSpec};
use scf_core::palette::NUM_CONTEXTS;
use scf_core::pattern::MIN_LEVEL;
use scf_core::ppm::{read_ppm, write_ppm};
use scf_core::{decode, decode_with_stats, encode_with_stats, BitstreamHeader, CodecConfig, ScfError, StageStats};

#[derive(Parser)]
#[command(name = "scf", version, about = "Lossless screen-content image codec")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a binary PPM (P6, maxval 255).
    Encode {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        codec: CodecFlags,
        /// Write per-stage pixel and bit counts as CSV.
        #[arg(long, value_name = "FILE")]
        stats: Option<PathBuf>,
    },
    /// Decompress to a binary PPM.
    Decode {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_name = "FILE")]
        stats: Option<PathBuf>,
    },
    /// Print stage accounting and model statistics for a PPM or SCF file.
    Inspect {
        input: PathBuf,
        /// Applies when the input is a PPM.
        #[command(flatten)]
        codec: CodecFlags,
    },
    /// Write a synthetic screen-content corpus plus manifest.
    GenCorpus {
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        count: usize,
        #[arg(long, default_value_t = 48)]
        min_size: usize,
        #[arg(long, default_value_t = 128)]
        max_size: usize,
        #[arg(long, default_value_t = 0.35)]
        flat: f64,
        #[arg(long, default_value_t = 0.35)]
        text: f64,
        #[arg(long, default_value_t = 0.22)]
        pictorial: f64,
        #[arg(long, default_value_t = 0.08)]
        noise: f64,
        /// Unique-color fraction targets cycled over images, comma-separated.
        /// Pass `none` to disable steering.
        #[arg(long, default_value = "0.01,0.05,0.12,0.35")]
        targets: String,
    },
    /// Code every PPM in a directory with all four flag combinations.
    Bench {
        dir: PathBuf,
        /// Per-image CSV report.
        #[arg(long, value_name = "FILE")]
        stats: Option<PathBuf>,
        /// Per-bucket aggregate CSV.
        #[arg(long, value_name = "FILE")]
        summary: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CodecFlags {
    /// Disable range-pruned residual coding.
    #[arg(long)]
    no_stage3_pruning: bool,
    /// Condition new-color escapes on the similarity level instead of
    /// neighboring new colors.
    #[arg(long)]
    no_escape_ctx: bool,
    /// Pattern similarity tolerance per color component.
    #[arg(long, default_value_t = 0)]
    tolerance: u16,
}

impl CodecFlags {
    fn config(&self) -> CodecConfig {
        CodecConfig {
            similarity_tolerance: self.tolerance,
            ..CodecConfig::with_flags(!self.no_stage3_pruning, !self.no_escape_ctx)
        }
    }
}

enum Failure {
    Usage(String),
    Io(String),
    Corrupt(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Corrupt(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Corrupt(m) => m,
        }
    }
}

impl From<ScfError> for Failure {
    fn from(e: ScfError) -> Self {
        match e {
            e if e.is_corrupt_stream() => Failure::Corrupt(e.to_string()),
            ScfError::Io(_) | ScfError::Ppm(_) => Failure::Io(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

fn io_at(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    fs::File::create(path).map(BufWriter::new).map_err(io_at(path))
}

fn read_image(path: &Path) -> Result<scf_core::Image, Failure> {
    let f = fs::File::open(path).map_err(io_at(path))?;
    read_ppm(io::BufReader::new(f)).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_stats(path: &Path, stats: &StageStats) -> Result<(), Failure> {
    write_stage_stats_csv(stats, create(path)?)?;
    Ok(())
}

fn print_stats(out: &mut impl Write, stats: &StageStats) -> io::Result<()> {
    let n = stats.pixels as f64;
    writeln!(out, "size        {}x{} ({} pixels, {} unique colors, {:.2}%)",
        stats.width, stats.height, stats.pixels, stats.unique_colors, 100.0 * stats.unique_fraction())?;
    writeln!(out, "file        {} bytes ({} payload), {:.4} bpp", stats.total_bytes, stats.payload_bytes, stats.bits_per_pixel())?;
    writeln!(out, "{:<10} {:>9} {:>8} {:>12} {:>9}", "stage", "pixels", "share", "bits", "bits/px")?;
    for (k, name) in ["pattern", "palette", "residual"].iter().enumerate() {
        let p = stats.stage_pixels[k];
        let b = stats.stage_bits[k];
        let per = if p > 0 { b / p as f64 } else { 0.0 };
        writeln!(out, "{name:<10} {p:>9} {:>7.2}% {b:>12.1} {per:>9.4}", 100.0 * p as f64 / n)?;
    }
    writeln!(out, "{:<10} {:>9} {:>8} {:>12.1}", "overhead", "", "", stats.overhead_bits)?;
    let [a, b, c] = stats.residual_cases;
    writeln!(out, "residual components: {a} in range, {b} out of range, {c} unpruned")?;

    let m = &stats.models;
    let keys: Vec<String> = m.pattern_keys.iter().enumerate().map(|(l, k)| format!("L{}={k}", l + MIN_LEVEL)).collect();
    writeln!(out, "pattern keys: {}", keys.join(" "))?;
    writeln!(out, "palette size: {}", m.palette_size)?;
    writeln!(out, "new-color escape contexts (new/total, ctx = A + 2B + 4C + 8D + 16E + 32F):")?;
    for row in 0..NUM_CONTEXTS / 8 {
        let cells: Vec<String> = (0..8)
            .map(|col| {
                let e = m.escape_contexts[row * 8 + col];
                format!("{:>11}", format!("{}/{}", e.hits, e.total))
            })
            .collect();
        writeln!(out, "  {:>2}: {}", row * 8, cells.join(""))?;
    }
    let by_level: Vec<String> = m.palette_escape_by_level.iter().map(|e| format!("{}/{}", e.hits, e.total)).collect();
    writeln!(out, "new-color escapes by similarity level 0..6: {}", by_level.join(" "))?;
    Ok(())
}

fn run(cmd: Command) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    match cmd {
        Command::Encode { input, output, codec, stats } => {
            let img = read_image(&input)?;
            let (bytes, st) = encode_with_stats(&img, &codec.config())?;
            fs::write(&output, &bytes).map_err(io_at(&output))?;
            if let Some(p) = stats {
                write_stats(&p, &st)?;
            }
        }
        Command::Decode { input, output, stats } => {
            let bytes = fs::read(&input).map_err(io_at(&input))?;
            let img = match &stats {
                Some(p) => {
                    let (img, st) = decode_with_stats(&bytes)?;
                    write_stats(p, &st)?;
                    img
                }
                None => decode(&bytes)?,
            };
            let mut w = create(&output)?;
            write_ppm(&mut w, &img)?;
            w.flush().map_err(io_at(&output))?;
        }
        Command::Inspect { input, codec } => {
            let bytes = fs::read(&input).map_err(io_at(&input))?;
            let st = if bytes.starts_with(&MAGIC) {
                let h = BitstreamHeader::parse(&bytes)?;
                let c = h.config;
                writeln!(stdout, "SCF v{} depth {} pruning={} escape_ctx={} exclude={} tolerance={}",
                    h.version, h.depth, c.stage3_pruning, c.escape_context, c.exclude_stage1_colors, c.similarity_tolerance)
                    .map_err(io_at(&input))?;
                decode_with_stats(&bytes)?.1
            } else {
                let img = scf_core::ppm::parse_ppm(&bytes).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
                encode_with_stats(&img, &codec.config())?.1
            };
            print_stats(&mut stdout, &st).map_err(io_at(&input))?;
        }
        Command::GenCorpus { dir, seed, count, min_size, max_size, flat, text, pictorial, noise, targets } => {
            let unique_targets = parse_targets(&targets)?;
            let spec = CorpusSpec {
                count,
                min_size,
                max_size,
                mix: ContentMix { flat, text, pictorial, noise },
                unique_targets,
                seed,
            };
            let images = generate(&spec)?;
            write_corpus(&dir, &images)?;
            writeln!(stdout, "wrote {} images to {}", images.len(), dir.display()).map_err(io_at(&dir))?;
        }
        Command::Bench { dir, stats, summary } => {
            let images = load_corpus(&dir)?;
            if images.is_empty() {
                return Err(Failure::Io(format!("{}: no .ppm files", dir.display())));
            }
            let report = run_bench(&images)?;
            if let Some(p) = stats {
                write_csv(&report, create(&p)?)?;
            }
            if let Some(p) = summary {
                write_summary_csv(&report, create(&p)?)?;
            }
            let out = &mut stdout;
            let mut table = || -> io::Result<()> {
                write!(out, "{:<8} {:>6}", "bucket", "images")?;
                for v in VARIANTS {
                    write!(out, " {v:>11}")?;
                }
                writeln!(out, " {:>8}", "saving")?;
                let rows = report.buckets.iter().map(|b| (b.bucket.label(), b)).chain([("total", &report.total)]);
                for (label, b) in rows {
                    write!(out, "{label:<8} {:>6}", b.images)?;
                    for p in b.percentages() {
                        write!(out, " {:>10.1}%", p)?;
                    }
                    writeln!(out, " {:>7.2}%", b.saving_percent())?;
                }
                let bad = report.rows.iter().filter(|r| !r.sum_check()).count();
                writeln!(out, "sum check failures: {bad}")
            };
            table().map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn parse_targets(s: &str) -> Result<Vec<f64>, Failure> {
    if s.eq_ignore_ascii_case("none") || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| match t.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
            _ => Err(Failure::Usage(format!("bad unique-color target {t:?}"))),
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("scf: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
