//! A/B benchmark over a corpus: every image is coded with all four
//! combinations of the two feature flags, verified, and grouped into
//! unique-color-fraction buckets.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{decode, encode_with_stats, CodecConfig, StageStats};
use crate::corpus::CorpusImage;
use crate::error::{Result, ScfError};

/// Variant labels, in [`CodecConfig::ab_variants`] order.
pub const VARIANTS: [&str; 4] = ["baseline", "escape_ctx", "pruning", "both"];
const BOTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bucket {
    UpTo3,
    UpTo7,
    UpTo17,
    Above17,
}

impl Bucket {
    pub const ALL: [Bucket; 4] = [Bucket::UpTo3, Bucket::UpTo7, Bucket::UpTo17, Bucket::Above17];

    pub fn of(unique_fraction: f64) -> Self {
        if unique_fraction <= 0.03 {
            Bucket::UpTo3
        } else if unique_fraction <= 0.07 {
            Bucket::UpTo7
        } else if unique_fraction <= 0.17 {
            Bucket::UpTo17
        } else {
            Bucket::Above17
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bucket::UpTo3 => "<=3%",
            Bucket::UpTo7 => "<=7%",
            Bucket::UpTo17 => "<=17%",
            Bucket::Above17 => ">17%",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ImageResult {
    pub name: String,
    pub width: usize,
    pub height: usize,
    pub unique_colors: usize,
    pub bucket: Bucket,
    /// Total file size per variant.
    pub bytes: [usize; 4],
    /// Stage accounting of the `both` variant.
    pub stats: StageStats,
}

impl ImageResult {
    pub fn unique_fraction(&self) -> f64 {
        self.unique_colors as f64 / (self.width * self.height) as f64
    }

    /// Stage bits plus termination overhead equals payload bits to within 1 bit.
    pub fn sum_check(&self) -> bool {
        let s = &self.stats;
        (s.event_bits() + s.overhead_bits - s.payload_bits() as f64).abs() <= 1.0
            && (0.0..=16.0).contains(&s.overhead_bits)
    }
}

#[derive(Debug, Clone)]
pub struct BucketSummary {
    pub bucket: Bucket,
    pub images: usize,
    pub bytes: [u64; 4],
}

impl BucketSummary {
    /// Size of each variant relative to `both`, in percent.
    pub fn percentages(&self) -> [f64; 4] {
        let base = self.bytes[BOTH] as f64;
        self.bytes.map(|b| if base > 0.0 { 100.0 * b as f64 / base } else { 0.0 })
    }

    /// Saving of `both` relative to `baseline`, in percent of baseline.
    pub fn saving_percent(&self) -> f64 {
        if self.bytes[0] == 0 {
            return 0.0;
        }
        100.0 * (self.bytes[0] as f64 - self.bytes[BOTH] as f64) / self.bytes[0] as f64
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<ImageResult>,
    pub buckets: Vec<BucketSummary>,
    pub total: BucketSummary,
}

fn bench_image(ci: &CorpusImage) -> Result<ImageResult> {
    let mut bytes = [0usize; 4];
    let mut both_stats = None;
    for (v, cfg) in CodecConfig::ab_variants().iter().enumerate() {
        let (data, stats) = encode_with_stats(&ci.image, cfg)?;
        if decode(&data)? != ci.image {
            return Err(ScfError::corrupt(format!("{}: round trip failed for {}", ci.name, VARIANTS[v])));
        }
        bytes[v] = data.len();
        if v == BOTH {
            both_stats = Some(stats);
        }
    }
    let stats = both_stats.unwrap();
    Ok(ImageResult {
        name: ci.name.clone(),
        width: ci.image.width(),
        height: ci.image.height(),
        unique_colors: stats.unique_colors,
        bucket: Bucket::of(stats.unique_fraction()),
        bytes,
        stats,
    })
}

pub fn run_bench(images: &[CorpusImage]) -> Result<BenchReport> {
    let rows: Vec<ImageResult> = images.par_iter().map(bench_image).collect::<Result<_>>()?;
    let sum = |bucket: Option<Bucket>| {
        let mut s = BucketSummary { bucket: bucket.unwrap_or(Bucket::Above17), images: 0, bytes: [0; 4] };
        for r in rows.iter().filter(|r| bucket.is_none_or(|b| r.bucket == b)) {
            s.images += 1;
            for v in 0..4 {
                s.bytes[v] += r.bytes[v] as u64;
            }
        }
        s
    };
    let buckets = Bucket::ALL.iter().map(|&b| sum(Some(b))).collect();
    let total = sum(None);
    Ok(BenchReport { rows, buckets, total })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    width: usize,
    height: usize,
    unique_colors: usize,
    unique_fraction: String,
    bucket: &'static str,
    bytes_baseline: usize,
    bytes_escape_ctx: usize,
    bytes_pruning: usize,
    bytes_both: usize,
    stage1_pixels: u64,
    stage2_pixels: u64,
    stage3_pixels: u64,
    stage1_bits: String,
    stage2_bits: String,
    stage3_bits: String,
    overhead_bits: String,
    payload_bits: u64,
    sum_check: bool,
}

/// One CSV row per image.
pub fn write_csv<W: Write>(report: &BenchReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &report.rows {
        let s = &r.stats;
        w.serialize(CsvRow {
            name: &r.name,
            width: r.width,
            height: r.height,
            unique_colors: r.unique_colors,
            unique_fraction: format!("{:.6}", r.unique_fraction()),
            bucket: r.bucket.label(),
            bytes_baseline: r.bytes[0],
            bytes_escape_ctx: r.bytes[1],
            bytes_pruning: r.bytes[2],
            bytes_both: r.bytes[3],
            stage1_pixels: s.stage_pixels[0],
            stage2_pixels: s.stage_pixels[1],
            stage3_pixels: s.stage_pixels[2],
            stage1_bits: format!("{:.3}", s.stage_bits[0]),
            stage2_bits: format!("{:.3}", s.stage_bits[1]),
            stage3_bits: format!("{:.3}", s.stage_bits[2]),
            overhead_bits: format!("{:.3}", s.overhead_bits),
            payload_bits: s.payload_bits(),
            sum_check: r.sum_check(),
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryRow {
    bucket: &'static str,
    images: usize,
    bytes_baseline: u64,
    bytes_escape_ctx: u64,
    bytes_pruning: u64,
    bytes_both: u64,
    pct_baseline: String,
    pct_escape_ctx: String,
    pct_pruning: String,
    pct_both: String,
}

/// Aggregate rows per bucket plus a total row; percentages are relative to
/// the `both` variant.
pub fn write_summary_csv<W: Write>(report: &BenchReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let rows = report.buckets.iter().map(|b| (b.bucket.label(), b)).chain([("total", &report.total)]);
    for (label, b) in rows {
        let p = b.percentages();
        w.serialize(SummaryRow {
            bucket: label,
            images: b.images,
            bytes_baseline: b.bytes[0],
            bytes_escape_ctx: b.bytes[1],
            bytes_pruning: b.bytes[2],
            bytes_both: b.bytes[3],
            pct_baseline: format!("{:.1}", p[0]),
            pct_escape_ctx: format!("{:.1}", p[1]),
            pct_pruning: format!("{:.1}", p[2]),
            pct_both: format!("{:.1}", p[3]),
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StageRow {
    stage: &'static str,
    pixels: u64,
    bits: String,
    bits_per_pixel: String,
}

/// Per-stage pixel and bit counts of a single image, plus overhead and total rows.
pub fn write_stage_stats_csv<W: Write>(stats: &StageStats, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = stats.pixels as f64;
    let names = ["pattern", "palette", "residual"];
    let rows = (0..3)
        .map(|k| (names[k], stats.stage_pixels[k], stats.stage_bits[k]))
        .chain([
            ("overhead", 0, stats.overhead_bits),
            ("total", stats.pixels as u64, stats.payload_bits() as f64),
        ]);
    for (stage, pixels, bits) in rows {
        w.serialize(StageRow {
            stage,
            pixels,
            bits: format!("{bits:.3}"),
            bits_per_pixel: format!("{:.5}", bits / n),
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> ScfError {
    ScfError::Io(std::io::Error::other(e))
}
