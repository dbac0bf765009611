//! Stage-1 context model: six-pixel causal patterns, sub-pattern histograms,
//! and best-similarity lookup.
//!
//! A pattern is the colors at template positions A..F. Its sub-pattern of
//! level `s` is the first `s` positions. For every coded pixel, the color is
//! counted under each sub-pattern of level 2..=6. A lookup returns the
//! deepest level whose sub-pattern has been seen, together with its color
//! histogram.

use std::collections::HashMap;

use crate::coder::{CodingModel, EventCounter, WithEscape};
use crate::image::{Color, Image, TEMPLATE};
use crate::mix;

/// Shallowest indexed similarity level.
pub const MIN_LEVEL: usize = 2;
/// Deepest similarity level (full pattern).
pub const MAX_LEVEL: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pattern(pub [Color; 6]);

/// Reads the template colors around `(i, j)` with zero substitution off-image.
pub fn extract_pattern(img: &Image, i: usize, j: usize) -> Pattern {
    let mut p = [Color::ZERO; 6];
    for (slot, &(dx, dy)) in p.iter_mut().zip(TEMPLATE.iter()) {
        *slot = img.neighbor(i, j, dx, dy);
    }
    Pattern(p)
}

type PatternKey = [Color; 6];

/// Colors seen with one sub-pattern, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColorTable {
    entries: Vec<(Color, u32)>,
    total: u64,
}

impl ColorTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Color, u32)] {
        &self.entries
    }

    pub fn position(&self, c: Color) -> Option<usize> {
        self.entries.iter().position(|&(e, _)| e == c)
    }

    pub fn color(&self, idx: usize) -> Color {
        self.entries[idx].0
    }

    pub fn count(&self, c: Color) -> u32 {
        self.position(c).map_or(0, |i| self.entries[i].1)
    }

    fn increment(&mut self, c: Color, cap: u64) {
        if self.total + 1 > cap {
            for e in &mut self.entries {
                e.1 = e.1.div_ceil(2);
            }
            self.total = self.entries.iter().map(|e| e.1 as u64).sum();
        }
        match self.position(c) {
            Some(i) => self.entries[i].1 += 1,
            None => self.entries.push((c, 1)),
        }
        self.total += 1;
    }

    fn digest(&self) -> u64 {
        self.entries.iter().fold(0x5cf, |h, &(c, n)| mix(h ^ color_bits(c) ^ ((n as u64) << 48)))
    }
}

impl CodingModel for ColorTable {
    fn total(&self) -> u64 {
        self.total
    }

    fn interval(&self, sym: usize) -> (u64, u64) {
        let cum = self.entries[..sym].iter().map(|e| e.1 as u64).sum();
        (cum, self.entries[sym].1 as u64)
    }

    fn lookup(&self, target: u64) -> (usize, u64, u64) {
        let mut cum = 0u64;
        for (i, &(_, n)) in self.entries.iter().enumerate() {
            if target < cum + n as u64 {
                return (i, cum, n as u64);
            }
            cum += n as u64;
        }
        panic!("lookup target {target} beyond total {}", self.total)
    }
}

pub(crate) fn color_bits(c: Color) -> u64 {
    (c.r as u64) | ((c.g as u64) << 16) | ((c.b as u64) << 32)
}

/// Result of a similarity search.
#[derive(Debug, Clone, Copy)]
pub struct Match<'a> {
    /// Similarity level 0..=6; 0 when no indexed sub-pattern matched.
    pub level: usize,
    pub table: Option<&'a ColorTable>,
}

/// Sub-pattern histograms for levels 2..=6.
#[derive(Debug, Clone)]
pub struct PatternStore {
    levels: Vec<HashMap<PatternKey, ColorTable>>,
    tolerance: u16,
    cap: u64,
}

impl PatternStore {
    /// `tolerance` 0 means exact component equality; larger values compare
    /// components quantized into bins of `tolerance + 1`.
    pub fn new(tolerance: u16, cap: u64) -> Self {
        PatternStore {
            levels: vec![HashMap::new(); MAX_LEVEL - MIN_LEVEL + 1],
            tolerance,
            cap,
        }
    }

    fn key(&self, pat: &Pattern, level: usize) -> PatternKey {
        let q = self.tolerance + 1;
        let mut k = [Color::ZERO; 6];
        for (dst, src) in k.iter_mut().zip(&pat.0[..level]) {
            *dst = if q == 1 {
                *src
            } else {
                Color::new(src.r / q, src.g / q, src.b / q)
            };
        }
        k
    }

    pub fn find_best(&self, pat: &Pattern) -> Match<'_> {
        for level in (MIN_LEVEL..=MAX_LEVEL).rev() {
            if let Some(t) = self.levels[level - MIN_LEVEL].get(&self.key(pat, level)) {
                return Match { level, table: Some(t) };
            }
        }
        Match { level: 0, table: None }
    }

    /// Counts `c` under every indexed sub-pattern of `pat`.
    pub fn update(&mut self, pat: &Pattern, c: Color) {
        for level in MIN_LEVEL..=MAX_LEVEL {
            let key = self.key(pat, level);
            let cap = self.cap;
            self.levels[level - MIN_LEVEL].entry(key).or_default().increment(c, cap);
        }
    }

    /// Number of distinct sub-patterns stored at `level`.
    pub fn keys_at(&self, level: usize) -> usize {
        if level < MIN_LEVEL {
            0
        } else {
            self.levels[level - MIN_LEVEL].len()
        }
    }

    pub fn table(&self, pat: &Pattern, level: usize) -> Option<&ColorTable> {
        self.levels[level - MIN_LEVEL].get(&self.key(pat, level))
    }

    /// Order-independent digest of the whole store.
    pub fn digest(&self) -> u64 {
        let mut h = 0u64;
        for (l, map) in self.levels.iter().enumerate() {
            let mut acc = 0u64;
            for (k, t) in map {
                let kh = k.iter().fold(l as u64, |h, &c| mix(h ^ color_bits(c)));
                acc = acc.wrapping_add(mix(kh ^ t.digest()));
            }
            h = mix(h ^ acc);
        }
        h
    }
}

/// Stage-1 coding model: the matched histogram plus an escape symbol whose
/// probability is the smoothed escape rate at the match level.
pub fn stage1_distribution<'a>(dist: &'a ColorTable, esc: &EventCounter) -> WithEscape<'a, ColorTable> {
    let (num, den) = esc.probability();
    WithEscape::new(dist, dist.len(), num, den)
}
