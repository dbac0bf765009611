//! Three-stage pixel coding loop, bitstream container, and stage accounting.
//!
//! Every pixel is first offered to the pattern model (Stage 1). If the best
//! matching sub-pattern has never been seen with this color, an escape is
//! coded and the palette is tried (Stage 2). A color absent from the palette
//! escapes again and is coded component-wise as prediction residuals
//! (Stage 3). A stage whose model is empty is skipped without signaling,
//! since the decoder sees the same emptiness.
//!
//! Encoder and decoder run the same routine ([`run`]) over a [`SymbolIo`],
//! which keeps every model update in lockstep by construction.

use crate::coder::{Decoder, Encoder, EventCounter, SymbolIo, WithEscape, TOTAL_MAX};
use crate::error::{Result, ScfError};
use crate::image::{Color, Image, SidePlanes, MAX_DEPTH};
use crate::mix;
use crate::palette::{escape_context_index, stage2_table, PaletteModel, NUM_CONTEXTS, PALETTE_CAP};
use crate::pattern::{extract_pattern, stage1_distribution, PatternStore, MAX_LEVEL, MIN_LEVEL};
use crate::residual::{map_errors, ResidualCase, ResidualModel};

pub const MAGIC: [u8; 4] = *b"SCF1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 23;
/// Largest pixel count a header may declare.
pub const MAX_PIXELS: u64 = 1 << 28;

const FLAG_PRUNING: u8 = 1;
const FLAG_ESCAPE_CTX: u8 = 2;
const FLAG_EXCLUDE: u8 = 4;

/// Coding options. All fields are stored in the bitstream header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    /// Range-pruned residual coding in Stage 3.
    pub stage3_pruning: bool,
    /// New-color escape conditioned on neighborhood contexts rather than
    /// on the Stage-1 similarity level.
    pub escape_context: bool,
    /// Drop colors already rejected in Stage 1 from the Stage-2 table.
    pub exclude_stage1_colors: bool,
    /// Pattern similarity tolerance; 0 means exact equality.
    pub similarity_tolerance: u16,
    /// log2 of the escape-counter cap; 0 disables downscaling.
    pub escape_cap_log2: u8,
    /// log2 of the color-histogram cap for pattern tables.
    pub table_cap_log2: u8,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            stage3_pruning: true,
            escape_context: true,
            exclude_stage1_colors: false,
            similarity_tolerance: 0,
            escape_cap_log2: 10,
            table_cap_log2: TOTAL_MAX.trailing_zeros() as u8,
        }
    }
}

impl CodecConfig {
    /// Both modifications disabled.
    pub fn baseline() -> Self {
        Self::with_flags(false, false)
    }

    pub fn with_flags(stage3_pruning: bool, escape_context: bool) -> Self {
        CodecConfig { stage3_pruning, escape_context, ..Self::default() }
    }

    /// The four combinations of the two feature flags, baseline first.
    pub fn ab_variants() -> [CodecConfig; 4] {
        [
            Self::with_flags(false, false),
            Self::with_flags(false, true),
            Self::with_flags(true, false),
            Self::with_flags(true, true),
        ]
    }

    fn escape_cap(&self) -> Option<u32> {
        (self.escape_cap_log2 > 0).then(|| 1u32 << self.escape_cap_log2)
    }

    fn validate(&self) -> Result<()> {
        if self.escape_cap_log2 > 30 || !(8..=32).contains(&self.table_cap_log2) {
            return Err(ScfError::InvalidImage(format!("invalid rescale caps in {self:?}")));
        }
        Ok(())
    }
}

/// Fixed-width little-endian container header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitstreamHeader {
    pub version: u8,
    pub width: u32,
    pub height: u32,
    pub depth: u8,
    pub config: CodecConfig,
    pub payload_len: u32,
}

impl BitstreamHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4] = self.version;
        b[5..9].copy_from_slice(&self.width.to_le_bytes());
        b[9..13].copy_from_slice(&self.height.to_le_bytes());
        b[13] = self.depth;
        let c = &self.config;
        b[14] = (c.stage3_pruning as u8 * FLAG_PRUNING)
            | (c.escape_context as u8 * FLAG_ESCAPE_CTX)
            | (c.exclude_stage1_colors as u8 * FLAG_EXCLUDE);
        b[15..17].copy_from_slice(&c.similarity_tolerance.to_le_bytes());
        b[17] = c.escape_cap_log2;
        b[18] = c.table_cap_log2;
        b[19..23].copy_from_slice(&self.payload_len.to_le_bytes());
        b
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || bytes[..4] != MAGIC {
            return Err(ScfError::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(ScfError::corrupt("truncated header"));
        }
        if bytes[4] != VERSION {
            return Err(ScfError::UnsupportedVersion(bytes[4]));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let width = u32_at(5);
        let height = u32_at(9);
        let depth = bytes[13];
        let flags = bytes[14];
        if flags & !(FLAG_PRUNING | FLAG_ESCAPE_CTX | FLAG_EXCLUDE) != 0 {
            return Err(ScfError::corrupt(format!("unknown flags {flags:#04x}")));
        }
        let config = CodecConfig {
            stage3_pruning: flags & FLAG_PRUNING != 0,
            escape_context: flags & FLAG_ESCAPE_CTX != 0,
            exclude_stage1_colors: flags & FLAG_EXCLUDE != 0,
            similarity_tolerance: u16::from_le_bytes([bytes[15], bytes[16]]),
            escape_cap_log2: bytes[17],
            table_cap_log2: bytes[18],
        };
        config.validate().map_err(|_| ScfError::corrupt("invalid rescale caps"))?;
        if width == 0 || height == 0 {
            return Err(ScfError::corrupt(format!("empty image {width}x{height}")));
        }
        if width as u64 * height as u64 > MAX_PIXELS {
            return Err(ScfError::corrupt(format!("image {width}x{height} too large")));
        }
        if depth == 0 || depth > MAX_DEPTH {
            return Err(ScfError::corrupt(format!("invalid depth {depth}")));
        }
        Ok(BitstreamHeader { version: VERSION, width, height, depth, config, payload_len: u32_at(19) })
    }
}

/// The stage that finally coded a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Pattern = 0,
    Palette = 1,
    Residual = 2,
}

/// Snapshot of model statistics at the end of coding.
#[derive(Debug, Clone)]
pub struct ModelSummary {
    /// Stored sub-patterns for levels 2..=6.
    pub pattern_keys: [usize; MAX_LEVEL - MIN_LEVEL + 1],
    pub palette_size: usize,
    pub escape_contexts: [EventCounter; NUM_CONTEXTS],
    pub palette_escape_by_level: [EventCounter; 7],
    pub pattern_escape_by_level: [EventCounter; 7],
    pub residual_decisions: [EventCounter; 3],
}

/// Per-stage accounting for one coded image.
#[derive(Debug, Clone)]
pub struct StageStats {
    pub width: usize,
    pub height: usize,
    pub pixels: usize,
    /// Pixels finally coded by each stage.
    pub stage_pixels: [u64; 3],
    /// Ideal code length attributed to each stage, escapes included.
    pub stage_bits: [f64; 3],
    /// Coder termination and byte padding: payload bits minus all event bits.
    pub overhead_bits: f64,
    pub payload_bytes: usize,
    pub total_bytes: usize,
    /// Stage-3 components by path: in-range, out-of-range, unpruned.
    pub residual_cases: [u64; 3],
    pub row_stage_pixels: Vec<[u32; 3]>,
    pub row_stage_bits: Vec<[f64; 3]>,
    pub pixel_stages: Vec<Stage>,
    pub unique_colors: usize,
    pub models: ModelSummary,
}

impl StageStats {
    pub fn payload_bits(&self) -> u64 {
        self.payload_bytes as u64 * 8
    }

    pub fn event_bits(&self) -> f64 {
        self.stage_bits.iter().sum()
    }

    /// Distinct colors divided by pixel count.
    pub fn unique_fraction(&self) -> f64 {
        self.unique_colors as f64 / self.pixels as f64
    }

    pub fn bits_per_pixel(&self) -> f64 {
        self.payload_bits() as f64 / self.pixels as f64
    }
}

struct Models {
    pattern: PatternStore,
    pattern_escape: [EventCounter; 7],
    palette: PaletteModel,
    residual: ResidualModel,
}

impl Models {
    fn new(cfg: &CodecConfig, depth: u8) -> Self {
        Models {
            pattern: PatternStore::new(cfg.similarity_tolerance, 1u64 << cfg.table_cap_log2),
            pattern_escape: [EventCounter::default(); 7],
            palette: PaletteModel::new(PALETTE_CAP, cfg.escape_cap()),
            residual: ResidualModel::new(depth),
        }
    }

    fn digest(&self) -> u64 {
        let mut h = mix(self.pattern.digest());
        h = mix(h ^ self.palette.digest());
        h = mix(h ^ self.residual.digest());
        for e in &self.pattern_escape {
            h = mix(h ^ ((e.hits as u64) << 32 | e.total as u64));
        }
        h
    }

    fn summary(&self) -> ModelSummary {
        let mut pattern_keys = [0; MAX_LEVEL - MIN_LEVEL + 1];
        for (l, slot) in pattern_keys.iter_mut().enumerate() {
            *slot = self.pattern.keys_at(l + MIN_LEVEL);
        }
        ModelSummary {
            pattern_keys,
            palette_size: self.palette.palette.len(),
            escape_contexts: *self.palette.escape_ctx.counters(),
            palette_escape_by_level: self.palette.escape_by_level,
            pattern_escape_by_level: self.pattern_escape,
            residual_decisions: [0, 1, 2].map(|k| self.residual.decisions(k)),
        }
    }
}

struct RunOutput {
    image: Image,
    stats: StageStats,
    checksums: Vec<u64>,
}

/// Drives all three stages over the image in raster order.
///
/// `source` is the image being encoded, or `None` when decoding.
fn run<IO: SymbolIo>(
    io: &mut IO,
    cfg: &CodecConfig,
    width: usize,
    height: usize,
    depth: u8,
    source: Option<&Image>,
    trace: bool,
) -> Result<RunOutput> {
    let mut recon = Image::new(width, height, depth, Color::ZERO)?;
    let mut sp = SidePlanes::new(width, height);
    let mut models = Models::new(cfg, depth);
    let esc_cap = cfg.escape_cap();

    let mut stage_pixels = [0u64; 3];
    let mut stage_bits = [0f64; 3];
    let mut residual_cases = [0u64; 3];
    let mut row_stage_pixels = vec![[0u32; 3]; height];
    let mut row_stage_bits = vec![[0f64; 3]; height];
    let mut pixel_stages = Vec::with_capacity(width * height);
    let mut checksums = Vec::new();

    for j in 0..height {
        for i in 0..width {
            let target = source.map(|s| s.get(i, j));
            let pat = extract_pattern(&recon, i, j);
            let found = models.pattern.find_best(&pat);
            let level = found.level;
            let mut bits = [0f64; 3];
            let mut coded: Option<(Color, Stage)> = None;
            let mut excluded: Vec<Color> = Vec::new();

            if let Some(dist) = found.table {
                let model = stage1_distribution(dist, &models.pattern_escape[level]);
                let esc = dist.len();
                let sym = target.map_or(0, |t| dist.position(t).unwrap_or(esc));
                let (sym, cost) = io.code(&model, sym)?;
                bits[0] += cost;
                let escaped = sym == esc;
                models.pattern_escape[level].record(escaped, esc_cap);
                if escaped {
                    if cfg.exclude_stage1_colors {
                        excluded = dist.entries().iter().map(|e| e.0).collect();
                    }
                } else {
                    coded = Some((dist.color(sym), Stage::Pattern));
                }
            }

            let ctx = escape_context_index(&sp, i, j);
            if coded.is_none() && !models.palette.palette.is_empty() {
                let palette = &models.palette.palette;
                let table = stage2_table(palette, &excluded);
                let (num, den) = models.palette.escape_probability(cfg.escape_context, ctx, level);
                let esc = palette.len();
                let model = WithEscape::new(&*table, esc, num, den);
                let sym = target.map_or(0, |t| palette.index_of(t).unwrap_or(esc));
                let (sym, cost) = io.code(&model, sym)?;
                bits[1] += cost;
                if sym != esc {
                    coded = Some((palette.color(sym), Stage::Palette));
                }
            }

            let (color, stage) = match coded {
                Some(c) => c,
                None => {
                    let (c, outcome) = models.residual.code_pixel(
                        io,
                        &recon,
                        &sp,
                        i,
                        j,
                        target,
                        cfg.stage3_pruning,
                    )?;
                    bits[2] += outcome.bits;
                    for case in outcome.cases {
                        residual_cases[match case {
                            ResidualCase::InRange => 0,
                            ResidualCase::OutOfRange => 1,
                            ResidualCase::Unpruned => 2,
                        }] += 1;
                    }
                    (c, Stage::Residual)
                }
            };
            debug_assert!(target.is_none_or(|t| t == color));

            recon.set(i, j, color);
            models.pattern.update(&pat, color);
            let was_new = models.palette.update(ctx, level, color, stage == Stage::Pattern);
            if was_new != (stage == Stage::Residual) {
                return Err(ScfError::corrupt(format!(
                    "stage {stage:?} produced {} color at ({i},{j})",
                    if was_new { "an unseen" } else { "a known" }
                )));
            }
            sp.record(i, j, map_errors(&recon, i, j, color), was_new);

            let s = stage as usize;
            stage_pixels[s] += 1;
            row_stage_pixels[j][s] += 1;
            for (k, b) in bits.iter().enumerate() {
                stage_bits[k] += b;
                row_stage_bits[j][k] += b;
            }
            pixel_stages.push(stage);
        }
        if trace {
            let (errs, flags) = sp.row(j);
            let mut h = models.digest();
            for (e, &f) in errs.iter().zip(flags) {
                h = mix(h ^ (e[0] as u32 as u64) ^ ((e[1] as u32 as u64) << 20) ^ ((e[2] as u32 as u64) << 40) ^ f as u64);
            }
            for i in 0..width {
                h = mix(h ^ crate::pattern::color_bits(recon.get(i, j)));
            }
            checksums.push(h);
        }
    }

    let unique_colors = models.palette.palette.len();
    let stats = StageStats {
        width,
        height,
        pixels: width * height,
        stage_pixels,
        stage_bits,
        overhead_bits: 0.0,
        payload_bytes: 0,
        total_bytes: 0,
        residual_cases,
        row_stage_pixels,
        row_stage_bits,
        pixel_stages,
        unique_colors,
        models: models.summary(),
    };
    Ok(RunOutput { image: recon, stats, checksums })
}

fn encode_inner(img: &Image, cfg: &CodecConfig, trace: bool) -> Result<(Vec<u8>, StageStats, Vec<u64>)> {
    cfg.validate()?;
    if img.depth() == 0 || img.depth() > MAX_DEPTH {
        return Err(ScfError::UnsupportedDepth(img.depth()));
    }
    if img.len() as u64 > MAX_PIXELS || img.width() > u32::MAX as usize || img.height() > u32::MAX as usize {
        return Err(ScfError::InvalidImage(format!("image {}x{} too large", img.width(), img.height())));
    }
    let mut enc = Encoder::new();
    let out = run(&mut enc, cfg, img.width(), img.height(), img.depth(), Some(img), trace)?;
    let payload = enc.finish();
    let header = BitstreamHeader {
        version: VERSION,
        width: img.width() as u32,
        height: img.height() as u32,
        depth: img.depth(),
        config: *cfg,
        payload_len: u32::try_from(payload.len())
            .map_err(|_| ScfError::InvalidImage("payload exceeds 4 GiB".into()))?,
    };
    let mut bytes = Vec::with_capacity(HEADER_LEN + payload.len());
    bytes.extend_from_slice(&header.to_bytes());
    bytes.extend_from_slice(&payload);
    let mut stats = out.stats;
    finish_stats(&mut stats, payload.len(), bytes.len());
    Ok((bytes, stats, out.checksums))
}

fn finish_stats(stats: &mut StageStats, payload_len: usize, total_len: usize) {
    stats.payload_bytes = payload_len;
    stats.total_bytes = total_len;
    stats.overhead_bits = stats.payload_bits() as f64 - stats.event_bits();
}

fn decode_inner(bytes: &[u8], trace: bool) -> Result<(Image, StageStats, Vec<u64>)> {
    let header = BitstreamHeader::parse(bytes)?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != header.payload_len as usize {
        return Err(ScfError::corrupt(format!(
            "payload is {} bytes, header declares {}",
            payload.len(),
            header.payload_len
        )));
    }
    let mut dec = Decoder::new(payload);
    let out = run(
        &mut dec,
        &header.config,
        header.width as usize,
        header.height as usize,
        header.depth,
        None,
        trace,
    )?;
    let mut stats = out.stats;
    finish_stats(&mut stats, payload.len(), bytes.len());
    Ok((out.image, stats, out.checksums))
}

pub fn encode(img: &Image, cfg: &CodecConfig) -> Result<Vec<u8>> {
    encode_inner(img, cfg, false).map(|r| r.0)
}

pub fn encode_with_stats(img: &Image, cfg: &CodecConfig) -> Result<(Vec<u8>, StageStats)> {
    encode_inner(img, cfg, false).map(|r| (r.0, r.1))
}

/// Encodes and returns a model-state checksum for every row.
pub fn encode_traced(img: &Image, cfg: &CodecConfig) -> Result<(Vec<u8>, Vec<u64>)> {
    encode_inner(img, cfg, true).map(|r| (r.0, r.2))
}

/// Decodes using the configuration stored in the header.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    decode_inner(bytes, false).map(|r| r.0)
}

pub fn decode_with_stats(bytes: &[u8]) -> Result<(Image, StageStats)> {
    decode_inner(bytes, false).map(|r| (r.0, r.1))
}

/// Decodes and returns a model-state checksum for every row.
pub fn decode_traced(bytes: &[u8]) -> Result<(Image, Vec<u64>)> {
    decode_inner(bytes, true).map(|r| (r.0, r.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let px = (0..w * h).map(|_| Color::new(rng.gen_range(0..256), rng.gen_range(0..256), rng.gen_range(0..256))).collect();
        Image::from_pixels(w, h, 8, px).unwrap()
    }

    #[test]
    fn single_pixel_takes_in_range_path() {
        let img = Image::new(1, 1, 8, Color::new(0, 1, 0)).unwrap();
        let (bytes, stats) = encode_with_stats(&img, &CodecConfig::default()).unwrap();
        assert_eq!(stats.stage_pixels, [0, 0, 1]);
        assert_eq!(stats.residual_cases, [3, 0, 0]);
        // three 1-bit decisions plus three uniform 3-way windows
        let expected = 3.0 * (1.0 + 3f64.log2());
        assert!((stats.event_bits() - expected).abs() < 1e-6);
        assert_eq!(decode(&bytes).unwrap(), img);
    }

    #[test]
    fn header_round_trip() {
        let h = BitstreamHeader {
            version: VERSION,
            width: 640,
            height: 3,
            depth: 8,
            config: CodecConfig { similarity_tolerance: 3, exclude_stage1_colors: true, ..CodecConfig::baseline() },
            payload_len: 77,
        };
        assert_eq!(BitstreamHeader::parse(&h.to_bytes()).unwrap(), h);
    }

    #[test]
    fn rejects_bad_headers() {
        let img = Image::new(2, 2, 8, Color::ZERO).unwrap();
        let bytes = encode(&img, &CodecConfig::default()).unwrap();
        let mut b = bytes.clone();
        b[0] = b'X';
        assert!(matches!(decode(&b), Err(ScfError::BadMagic)));
        let mut b = bytes.clone();
        b[4] = 9;
        assert!(matches!(decode(&b), Err(ScfError::UnsupportedVersion(9))));
        let mut b = bytes.clone();
        b[5..9].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(decode(&b), Err(ScfError::Corrupt(_))));
        assert!(decode(&bytes[..10]).is_err());
        assert!(decode(b"hello").is_err());
    }

    #[test]
    fn truncated_payload_is_corrupt() {
        let img = noise(16, 16, 1);
        let bytes = encode(&img, &CodecConfig::default()).unwrap();
        for cut in [1, 5, bytes.len() - HEADER_LEN - 1] {
            let err = decode(&bytes[..bytes.len() - cut]).unwrap_err();
            assert!(err.is_corrupt_stream(), "{err}");
        }
    }

    #[test]
    fn garbage_payload_does_not_panic() {
        let img = noise(12, 9, 2);
        let bytes = encode(&img, &CodecConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut b = bytes.clone();
            for x in b[HEADER_LEN..].iter_mut() {
                *x = rng.gen();
            }
            if let Ok(d) = decode(&b) {
                assert_eq!((d.width(), d.height()), (12, 9));
            }
        }
    }

    #[test]
    fn all_flag_combinations_round_trip() {
        let img = noise(20, 13, 9);
        for cfg in CodecConfig::ab_variants() {
            let bytes = encode(&img, &cfg).unwrap();
            assert_eq!(decode(&bytes).unwrap(), img, "{cfg:?}");
        }
        let cfg = CodecConfig { exclude_stage1_colors: true, similarity_tolerance: 2, ..CodecConfig::default() };
        let bytes = encode(&img, &cfg).unwrap();
        assert_eq!(decode(&bytes).unwrap(), img);
    }

    #[test]
    fn other_depths_round_trip() {
        for depth in [1u8, 4, 12, 16] {
            let max = crate::image::max_value(depth) as u32;
            let mut rng = ChaCha8Rng::seed_from_u64(depth as u64);
            let px = (0..70)
                .map(|_| {
                    let v = |r: &mut ChaCha8Rng| r.gen_range(0..=max) as u16;
                    Color::new(v(&mut rng), v(&mut rng), v(&mut rng))
                })
                .collect();
            let img = Image::from_pixels(10, 7, depth, px).unwrap();
            let bytes = encode(&img, &CodecConfig::default()).unwrap();
            assert_eq!(decode(&bytes).unwrap(), img, "depth {depth}");
        }
    }

    #[test]
    fn uniform_image_is_tiny() {
        let img = Image::new(64, 64, 8, Color::new(30, 60, 90)).unwrap();
        let bytes = encode(&img, &CodecConfig::default()).unwrap();
        assert!(bytes.len() < 200, "{} bytes", bytes.len());
        assert_eq!(decode(&bytes).unwrap(), img);
    }

    #[test]
    fn decoder_stats_match_encoder() {
        let img = noise(17, 11, 4);
        let (bytes, es) = encode_with_stats(&img, &CodecConfig::default()).unwrap();
        let (_, ds) = decode_with_stats(&bytes).unwrap();
        assert_eq!(es.stage_pixels, ds.stage_pixels);
        assert_eq!(es.pixel_stages, ds.pixel_stages);
        for k in 0..3 {
            assert!((es.stage_bits[k] - ds.stage_bits[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn overhead_is_small_and_nonnegative() {
        for seed in 0..5 {
            let img = noise(9 + seed as usize, 7, seed);
            let (_, s) = encode_with_stats(&img, &CodecConfig::default()).unwrap();
            assert!(s.overhead_bits > 0.0 && s.overhead_bits <= 10.0, "{}", s.overhead_bits);
        }
    }

    #[test]
    fn traces_agree() {
        let img = noise(10, 6, 8);
        let (bytes, enc) = encode_traced(&img, &CodecConfig::default()).unwrap();
        let (_, dec) = decode_traced(&bytes).unwrap();
        assert_eq!(enc.len(), 6);
        assert_eq!(enc, dec);
    }
}
