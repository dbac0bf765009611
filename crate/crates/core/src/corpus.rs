//! Synthetic screen-content corpus.
//!
//! Each image is a screen-like layout: the canvas is split recursively into
//! rectangular cells and every cell gets one content kind. Flat fills and
//! glyph text draw from a small per-image UI palette; pictorial cells are
//! smooth gradients with mild sensor-like noise; noise cells are uniform
//! random. When unique-color targets are given, cells are switched between
//! palette-bound and rich kinds until the image's unique-color fraction
//! approaches the target.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ScfError};
use crate::image::{Color, Image};
use crate::mix;
use crate::ppm::{read_ppm, write_ppm};

pub const MANIFEST: &str = "manifest.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentKind {
    Flat,
    Text,
    Pictorial,
    Noise,
}

impl ContentKind {
    fn is_rich(self) -> bool {
        matches!(self, ContentKind::Pictorial | ContentKind::Noise)
    }
}

/// Relative weights of the content kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentMix {
    pub flat: f64,
    pub text: f64,
    pub pictorial: f64,
    pub noise: f64,
}

impl ContentMix {
    fn weight(&self, k: ContentKind) -> f64 {
        match k {
            ContentKind::Flat => self.flat,
            ContentKind::Text => self.text,
            ContentKind::Pictorial => self.pictorial,
            ContentKind::Noise => self.noise,
        }
    }

    fn pick(&self, rng: &mut ChaCha8Rng, filter: impl Fn(ContentKind) -> bool) -> Option<ContentKind> {
        let kinds = [ContentKind::Flat, ContentKind::Text, ContentKind::Pictorial, ContentKind::Noise];
        let total: f64 = kinds.iter().filter(|&&k| filter(k)).map(|&k| self.weight(k).max(0.0)).sum();
        if total <= 0.0 {
            return None;
        }
        let mut x = rng.gen::<f64>() * total;
        for k in kinds.into_iter().filter(|&k| filter(k)) {
            let w = self.weight(k).max(0.0);
            if x < w {
                return Some(k);
            }
            x -= w;
        }
        kinds.into_iter().rev().find(|&k| filter(k) && self.weight(k) > 0.0)
    }
}

impl Default for ContentMix {
    fn default() -> Self {
        ContentMix { flat: 0.35, text: 0.35, pictorial: 0.22, noise: 0.08 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub count: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub mix: ContentMix,
    /// Per-image unique-color fraction targets, cycled over the images.
    /// Empty disables steering.
    pub unique_targets: Vec<f64>,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 24,
            min_size: 48,
            max_size: 128,
            mix: ContentMix::default(),
            unique_targets: vec![0.01, 0.05, 0.12, 0.35],
            seed: 1,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        if self.min_size == 0 || self.min_size > self.max_size {
            return Err(ScfError::InvalidImage(format!(
                "invalid size range {}..={}",
                self.min_size, self.max_size
            )));
        }
        let m = &self.mix;
        if [m.flat, m.text, m.pictorial, m.noise].iter().any(|w| !w.is_finite() || *w < 0.0)
            || m.flat + m.text + m.pictorial + m.noise <= 0.0
        {
            return Err(ScfError::InvalidImage("content weights must be nonnegative with a positive sum".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CorpusImage {
    pub name: String,
    pub image: Image,
}

impl CorpusImage {
    pub fn unique_fraction(&self) -> f64 {
        self.image.unique_colors() as f64 / self.image.len() as f64
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x: usize,
    y: usize,
    w: usize,
    h: usize,
    kind: ContentKind,
    seed: u64,
}

fn split(rng: &mut ChaCha8Rng, x: usize, y: usize, w: usize, h: usize, depth: u32, out: &mut Vec<(usize, usize, usize, usize)>) {
    const MIN: usize = 8;
    let can_v = w >= 2 * MIN;
    let can_h = h >= 2 * MIN;
    if depth == 0 || !(can_v || can_h) || (depth < 2 && rng.gen_bool(0.25)) {
        out.push((x, y, w, h));
        return;
    }
    let vertical = if can_v && can_h { w >= h } else { can_v };
    if vertical {
        let at = rng.gen_range(MIN..=w - MIN);
        split(rng, x, y, at, h, depth - 1, out);
        split(rng, x + at, y, w - at, h, depth - 1, out);
    } else {
        let at = rng.gen_range(MIN..=h - MIN);
        split(rng, x, y, w, at, depth - 1, out);
        split(rng, x, y + at, w, h - at, depth - 1, out);
    }
}

fn random_color(rng: &mut ChaCha8Rng) -> Color {
    Color::new(rng.gen_range(0..256), rng.gen_range(0..256), rng.gen_range(0..256))
}

/// Small random glyph bitmaps, 5 wide by 7 tall.
fn glyphs(rng: &mut ChaCha8Rng, n: usize) -> Vec<[u8; 7]> {
    (0..n)
        .map(|_| {
            let mut g = [0u8; 7];
            for row in g.iter_mut() {
                *row = rng.gen_range(0..32u8) & rng.gen_range(0..32u8) | rng.gen_range(0..32u8) & 0b10001;
            }
            g
        })
        .collect()
}

fn render_cell(img: &mut Image, cell: &Cell, ui: &[Color], font: &[[u8; 7]]) {
    let mut rng = ChaCha8Rng::seed_from_u64(cell.seed);
    let pick = |rng: &mut ChaCha8Rng| ui[rng.gen_range(0..ui.len())];
    match cell.kind {
        ContentKind::Flat => {
            let fill = pick(&mut rng);
            let border = pick(&mut rng);
            let bordered = rng.gen_bool(0.5);
            for y in 0..cell.h {
                for x in 0..cell.w {
                    let edge = x == 0 || y == 0 || x + 1 == cell.w || y + 1 == cell.h;
                    img.set(cell.x + x, cell.y + y, if bordered && edge { border } else { fill });
                }
            }
        }
        ContentKind::Text => {
            let bg = pick(&mut rng);
            let mut fg = pick(&mut rng);
            if fg == bg {
                fg = ui[(ui.iter().position(|&c| c == bg).unwrap() + 1) % ui.len()];
            }
            let line_h = 9 + rng.gen_range(0..3);
            let margin = 1 + rng.gen_range(0..3);
            for y in 0..cell.h {
                for x in 0..cell.w {
                    img.set(cell.x + x, cell.y + y, bg);
                }
            }
            let mut ty = margin;
            while ty + 7 <= cell.h {
                let mut tx = margin;
                while tx + 5 <= cell.w {
                    if rng.gen_bool(0.15) {
                        tx += 6; // word gap
                        continue;
                    }
                    let g = &font[rng.gen_range(0..font.len())];
                    for (gy, row) in g.iter().enumerate() {
                        for gx in 0..5 {
                            if row >> (4 - gx) & 1 == 1 {
                                img.set(cell.x + tx + gx, cell.y + ty + gy, fg);
                            }
                        }
                    }
                    tx += 6;
                }
                ty += line_h;
            }
        }
        ContentKind::Pictorial => {
            // bilinear field over a coarse random grid, plus mild noise
            let grid: Vec<[f64; 3]> = (0..16)
                .map(|_| [rng.gen_range(0.0..255.0), rng.gen_range(0.0..255.0), rng.gen_range(0.0..255.0)])
                .collect();
            let amp: i32 = rng.gen_range(1..=4);
            for y in 0..cell.h {
                for x in 0..cell.w {
                    let fx = x as f64 / cell.w.max(2) as f64 * 3.0;
                    let fy = y as f64 / cell.h.max(2) as f64 * 3.0;
                    let (gx, gy) = (fx.floor().min(2.0) as usize, fy.floor().min(2.0) as usize);
                    let (tx, ty) = (fx - gx as f64, fy - gy as f64);
                    let at = |cx: usize, cy: usize, k: usize| grid[cy * 4 + cx][k];
                    let mut c = [0u16; 3];
                    for (k, slot) in c.iter_mut().enumerate() {
                        let v = at(gx, gy, k) * (1.0 - tx) * (1.0 - ty)
                            + at(gx + 1, gy, k) * tx * (1.0 - ty)
                            + at(gx, gy + 1, k) * (1.0 - tx) * ty
                            + at(gx + 1, gy + 1, k) * tx * ty;
                        let n = rng.gen_range(-amp..=amp);
                        *slot = (v.round() as i32 + n).clamp(0, 255) as u16;
                    }
                    img.set(cell.x + x, cell.y + y, Color::new(c[0], c[1], c[2]));
                }
            }
        }
        ContentKind::Noise => {
            for y in 0..cell.h {
                for x in 0..cell.w {
                    img.set(cell.x + x, cell.y + y, random_color(&mut rng));
                }
            }
        }
    }
}

fn render(w: usize, h: usize, cells: &[Cell], ui: &[Color], font: &[[u8; 7]]) -> Image {
    let mut img = Image::new(w, h, 8, ui[0]).expect("nonzero corpus dimensions");
    for c in cells {
        render_cell(&mut img, c, ui, font);
    }
    img
}

fn unique_fraction(img: &Image) -> f64 {
    img.unique_colors() as f64 / img.len() as f64
}

fn generate_one(spec: &CorpusSpec, index: usize) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(spec.seed ^ mix(index as u64)));
    let w = rng.gen_range(spec.min_size..=spec.max_size);
    let h = rng.gen_range(spec.min_size..=spec.max_size);
    let ui: Vec<Color> = (0..rng.gen_range(3..=8)).map(|_| random_color(&mut rng)).collect();
    let font = glyphs(&mut rng, 12);
    let mut rects = Vec::new();
    split(&mut rng, 0, 0, w, h, 4, &mut rects);
    let mut cells: Vec<Cell> = rects
        .into_iter()
        .map(|(x, y, cw, ch)| Cell {
            x,
            y,
            w: cw,
            h: ch,
            kind: spec.mix.pick(&mut rng, |_| true).unwrap_or(ContentKind::Flat),
            seed: rng.gen(),
        })
        .collect();

    let mut img = render(w, h, &cells, &ui, &font);
    if spec.unique_targets.is_empty() {
        return img;
    }
    let target = spec.unique_targets[index % spec.unique_targets.len()];
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.shuffle(&mut rng);
    for _ in 0..2 * cells.len() {
        let f = unique_fraction(&img);
        if (f - target).abs() <= 0.25 * target {
            break;
        }
        let raise = f < target;
        // smallest convertible cell first, so steps stay fine-grained
        let candidate = order
            .iter()
            .copied()
            .filter(|&c| cells[c].kind.is_rich() != raise)
            .min_by_key(|&c| cells[c].w * cells[c].h);
        let Some(c) = candidate else { break };
        let Some(kind) = spec.mix.pick(&mut rng, |k| k.is_rich() == raise) else { break };
        cells[c].kind = kind;
        img = render(w, h, &cells, &ui, &font);
    }
    img
}

pub fn generate(spec: &CorpusSpec) -> Result<Vec<CorpusImage>> {
    spec.validate()?;
    Ok((0..spec.count)
        .map(|i| CorpusImage { name: format!("img{i:03}.ppm"), image: generate_one(spec, i) })
        .collect())
}

/// Writes every image as PPM plus a manifest with one line per image:
/// `name width height unique_colors unique_fraction`.
pub fn write_corpus(dir: &Path, images: &[CorpusImage]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = BufWriter::new(fs::File::create(dir.join(MANIFEST))?);
    for ci in images {
        write_ppm(BufWriter::new(fs::File::create(dir.join(&ci.name))?), &ci.image)?;
        writeln!(
            manifest,
            "{} {} {} {} {:.6}",
            ci.name,
            ci.image.width(),
            ci.image.height(),
            ci.image.unique_colors(),
            ci.unique_fraction()
        )?;
    }
    manifest.flush()?;
    Ok(())
}

/// Loads every `.ppm` file in `dir`, sorted by name.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusImage>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm")))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let image = read_ppm(fs::File::open(&p)?)?;
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            Ok(CorpusImage { name, image })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only(kind: ContentKind) -> CorpusSpec {
        let z = ContentMix { flat: 0.0, text: 0.0, pictorial: 0.0, noise: 0.0 };
        let mix = match kind {
            ContentKind::Flat => ContentMix { flat: 1.0, ..z },
            ContentKind::Text => ContentMix { text: 1.0, ..z },
            ContentKind::Pictorial => ContentMix { pictorial: 1.0, ..z },
            ContentKind::Noise => ContentMix { noise: 1.0, ..z },
        };
        CorpusSpec { count: 6, min_size: 16, max_size: 64, mix, ..CorpusSpec::default() }
    }

    #[test]
    fn flat_only_has_few_colors() {
        for ci in generate(&only(ContentKind::Flat)).unwrap() {
            assert!(ci.image.unique_colors() <= 8, "{}", ci.image.unique_colors());
        }
        for ci in generate(&only(ContentKind::Text)).unwrap() {
            assert!(ci.image.unique_colors() <= 8);
        }
    }

    #[test]
    fn noise_only_is_rich() {
        for ci in generate(&only(ContentKind::Noise)).unwrap() {
            assert!(ci.unique_fraction() > 0.17, "{}", ci.unique_fraction());
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let spec = CorpusSpec { count: 5, ..CorpusSpec::default() };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.image, y.image);
        }
        let c = generate(&CorpusSpec { seed: 2, ..spec }).unwrap();
        assert!(a.iter().zip(&c).any(|(x, y)| x.image != y.image));
    }

    #[test]
    fn sizes_within_range() {
        let spec = CorpusSpec { count: 10, min_size: 20, max_size: 30, ..CorpusSpec::default() };
        for ci in generate(&spec).unwrap() {
            assert!((20..=30).contains(&ci.image.width()));
            assert!((20..=30).contains(&ci.image.height()));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate(&CorpusSpec { min_size: 0, ..CorpusSpec::default() }).is_err());
        assert!(generate(&CorpusSpec { min_size: 50, max_size: 40, ..CorpusSpec::default() }).is_err());
        let z = ContentMix { flat: 0.0, text: 0.0, pictorial: 0.0, noise: 0.0 };
        assert!(generate(&CorpusSpec { mix: z, ..CorpusSpec::default() }).is_err());
    }
}
