//! Stage-2 model: global color palette and the probability that a pixel
//! which missed Stage 1 carries a never-seen color.
//!
//! That probability is conditioned on which of the six template neighbors
//! introduced new colors themselves (64 contexts). The older conditioning
//! on the Stage-1 similarity level is kept for A/B comparison.

use std::borrow::Cow;
use std::collections::HashMap;

use crate::coder::{EventCounter, FrequencyTable};
use crate::image::{Color, SidePlanes, TEMPLATE};
use crate::mix;
use crate::pattern::color_bits;

/// Number of neighborhood new-color contexts.
pub const NUM_CONTEXTS: usize = 64;
/// Default cap for escape counters.
pub const CTX_CAP: u32 = 1 << 10;
/// Default cap for palette occurrence counts.
pub const PALETTE_CAP: u64 = 1 << 24;

/// Packs the new-color flags at template positions A..F into bits 0..5.
pub fn escape_context_index(sp: &SidePlanes, i: usize, j: usize) -> usize {
    TEMPLATE
        .iter()
        .enumerate()
        .filter(|(_, &(dx, dy))| sp.new_color(i, j, dx, dy))
        .fold(0, |ctx, (bit, _)| ctx | (1 << bit))
}

/// Color occurrence counts; symbol numbering follows first appearance.
#[derive(Debug, Clone)]
pub struct Palette {
    index: HashMap<Color, usize>,
    colors: Vec<Color>,
    counts: FrequencyTable,
}

impl Palette {
    pub fn new(cap: u64) -> Self {
        Palette {
            index: HashMap::new(),
            colors: Vec::new(),
            counts: FrequencyTable::new(0, 0, cap),
        }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn index_of(&self, c: Color) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn color(&self, idx: usize) -> Color {
        self.colors[idx]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn count(&self, c: Color) -> u32 {
        self.index_of(c).map_or(0, |i| self.counts.count(i))
    }

    pub fn table(&self) -> &FrequencyTable {
        &self.counts
    }

    /// Counts one occurrence of `c`; returns true if it was not yet present.
    pub fn increment(&mut self, c: Color) -> bool {
        match self.index_of(c) {
            Some(i) => {
                self.counts.increment(i);
                false
            }
            None => {
                self.index.insert(c, self.colors.len());
                self.colors.push(c);
                self.counts.push(1);
                true
            }
        }
    }

    fn digest(&self) -> u64 {
        self.colors
            .iter()
            .zip(self.counts.counts())
            .fold(0xa11e, |h, (&c, &n)| mix(h ^ color_bits(c) ^ ((n as u64) << 48)))
    }
}

/// Stage-2 symbol weights: the palette counts, with `exclude` zeroed out.
pub fn stage2_table<'a>(palette: &'a Palette, exclude: &[Color]) -> Cow<'a, FrequencyTable> {
    if exclude.is_empty() {
        return Cow::Borrowed(palette.table());
    }
    let mut counts = palette.table().counts().to_vec();
    for &c in exclude {
        if let Some(i) = palette.index_of(c) {
            counts[i] = 0;
        }
    }
    Cow::Owned(FrequencyTable::from_counts(counts, u64::MAX))
}

/// Escape counters for the 64 neighborhood contexts.
#[derive(Debug, Clone)]
pub struct EscapeContextModel {
    counters: [EventCounter; NUM_CONTEXTS],
    cap: Option<u32>,
}

impl EscapeContextModel {
    pub fn new(cap: Option<u32>) -> Self {
        EscapeContextModel { counters: [EventCounter::default(); NUM_CONTEXTS], cap }
    }

    /// Smoothed `(n_new + 1) / (n_total + 2)` at `ctx`.
    pub fn probability(&self, ctx: usize) -> (u64, u64) {
        self.counters[ctx].probability()
    }

    pub fn record(&mut self, ctx: usize, was_new: bool) {
        self.counters[ctx].record(was_new, self.cap);
    }

    pub fn counters(&self) -> &[EventCounter; NUM_CONTEXTS] {
        &self.counters
    }
}

/// Palette plus both flavors of new-color escape statistics.
#[derive(Debug, Clone)]
pub struct PaletteModel {
    pub palette: Palette,
    pub escape_ctx: EscapeContextModel,
    /// Escape counters conditioned on the Stage-1 similarity level (baseline).
    pub escape_by_level: [EventCounter; 7],
    escape_cap: Option<u32>,
}

impl PaletteModel {
    pub fn new(palette_cap: u64, escape_cap: Option<u32>) -> Self {
        PaletteModel {
            palette: Palette::new(palette_cap),
            escape_ctx: EscapeContextModel::new(escape_cap),
            escape_by_level: [EventCounter::default(); 7],
            escape_cap,
        }
    }

    /// Escape probability for the current pixel under the selected conditioning.
    pub fn escape_probability(&self, use_ctx: bool, ctx: usize, level: usize) -> (u64, u64) {
        if use_ctx {
            self.escape_ctx.probability(ctx)
        } else {
            self.escape_by_level[level].probability()
        }
    }

    /// Post-coding update. Palette counts change for every pixel; escape
    /// statistics only for pixels that were not coded in Stage 1. Returns
    /// whether `c` was a new color.
    pub fn update(&mut self, ctx: usize, level: usize, c: Color, coded_in_stage1: bool) -> bool {
        let was_new = self.palette.increment(c);
        if !coded_in_stage1 {
            self.escape_ctx.record(ctx, was_new);
            self.escape_by_level[level].record(was_new, self.escape_cap);
        }
        was_new
    }

    pub fn digest(&self) -> u64 {
        let mut h = self.palette.digest();
        for e in self.escape_ctx.counters.iter().chain(&self.escape_by_level) {
            h = mix(h ^ ((e.hits as u64) << 32 | e.total as u64));
        }
        h
    }
}
