//! Stage 3: residual coding of never-seen colors.
//!
//! Each component is predicted with the median adaptive predictor (MAP).
//! When the largest MAP error among the four causal neighbors is small
//! (`range <= threshold`), a binary decision says whether the current error
//! lies within `[-range, range]`; the error is then coded with either the
//! in-range histogram restricted to that window or, after folding away the
//! impossible values, with the trimmed out-of-range histogram. Otherwise
//! the component-adaptive predictor (MAPc) is used with a full histogram.

use crate::coder::{EventCounter, FrequencyTable, SymbolIo, Window, TOTAL_MAX};
use crate::error::{Result, ScfError};
use crate::image::{Color, Image, SidePlanes};
use crate::mix;

/// Candidate predictors for component-wise adaptation, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predictor {
    Med,
    Left,
    Top,
    TopLeft,
    Planar,
}

pub const PREDICTORS: [Predictor; 5] = [
    Predictor::Med,
    Predictor::Left,
    Predictor::Top,
    Predictor::TopLeft,
    Predictor::Planar,
];

/// Causal neighbors of one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbors {
    pub left: i32,
    pub top: i32,
    pub top_left: i32,
}

impl Neighbors {
    pub fn of(img: &Image, i: usize, j: usize, k: usize) -> Self {
        Neighbors {
            left: img.neighbor(i, j, -1, 0).component(k) as i32,
            top: img.neighbor(i, j, 0, -1).component(k) as i32,
            top_left: img.neighbor(i, j, -1, -1).component(k) as i32,
        }
    }
}

/// Median adaptive prediction (min/max/gradient rule).
pub fn map_predict(left: i32, top: i32, top_left: i32) -> i32 {
    let (lo, hi) = if left < top { (left, top) } else { (top, left) };
    if top_left >= hi {
        lo
    } else if top_left <= lo {
        hi
    } else {
        left + top - top_left
    }
}

impl Predictor {
    pub fn predict(self, n: Neighbors, max: i32) -> i32 {
        match self {
            Predictor::Med => map_predict(n.left, n.top, n.top_left),
            Predictor::Left => n.left,
            Predictor::Top => n.top,
            Predictor::TopLeft => n.top_left,
            Predictor::Planar => (n.left + n.top - n.top_left).clamp(0, max),
        }
    }
}

/// Index of the predictor with the smallest absolute error on `actual`;
/// ties go to the lowest index.
pub fn best_predictor(actual: i32, n: Neighbors, max: i32) -> usize {
    PREDICTORS
        .iter()
        .enumerate()
        .min_by_key(|&(idx, p)| ((actual - p.predict(n, max)).abs(), idx))
        .map(|(idx, _)| idx)
        .unwrap()
}

/// MAPc prediction of component `k`. For `k == 0` this is plain MAP; later
/// components use the predictor that best fit component `k - 1` at this
/// pixel (`prev_best`).
pub fn mapc_predict(img: &Image, i: usize, j: usize, k: usize, prev_best: usize) -> i32 {
    let n = Neighbors::of(img, i, j, k);
    if k == 0 {
        map_predict(n.left, n.top, n.top_left)
    } else {
        PREDICTORS[prev_best].predict(n, img.max_value() as i32)
    }
}

/// `1 + max |e|` over the left, top-left, top and top-right MAP errors.
pub fn compute_range(sp: &SidePlanes, k: usize, i: usize, j: usize) -> i32 {
    [(-1, 0), (-1, -1), (0, -1), (1, -1)]
        .iter()
        .map(|&(dx, dy)| sp.map_error(i, j, dx, dy, k).abs())
        .max()
        .unwrap()
        + 1
}

/// Removes the impossible `[-r, r]` gap from an out-of-range error.
pub fn fold(e: i32, r: i32) -> i32 {
    assert!(e.abs() > r, "fold requires |e| > r (e={e}, r={r})");
    if e <= 0 {
        e + r
    } else {
        e - r - 1
    }
}

pub fn unfold(f: i32, r: i32) -> i32 {
    if f < 0 {
        f - r
    } else {
        f + r + 1
    }
}

/// Which path coded a Stage-3 component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualCase {
    InRange,
    OutOfRange,
    Unpruned,
}

#[derive(Debug, Clone)]
struct ComponentModel {
    in_range: FrequencyTable,
    out_of_range: FrequencyTable,
    case3: FrequencyTable,
    decisions: EventCounter,
}

/// Error histograms and decision counters for all three components.
#[derive(Debug, Clone)]
pub struct ResidualModel {
    e_max: i32,
    threshold: i32,
    comps: [ComponentModel; 3],
    decision_cap: u32,
}

/// Cost and path taken while coding one Stage-3 pixel.
#[derive(Debug, Clone, Copy)]
pub struct ResidualOutcome {
    pub bits: f64,
    pub cases: [ResidualCase; 3],
}

impl ResidualModel {
    pub fn new(depth: u8) -> Self {
        let e_max = (1i32 << depth) - 1;
        let symbols = 2 * e_max as usize + 1;
        let cap = TOTAL_MAX.max((4 * symbols as u64).next_power_of_two());
        let comp = ComponentModel {
            in_range: FrequencyTable::new(symbols, 1, cap),
            out_of_range: FrequencyTable::new(symbols - 1, 1, cap),
            case3: FrequencyTable::new(symbols, 1, cap),
            decisions: EventCounter::default(),
        };
        ResidualModel {
            e_max,
            threshold: e_max / 36,
            comps: [comp.clone(), comp.clone(), comp],
            decision_cap: TOTAL_MAX as u32,
        }
    }

    pub fn threshold(&self) -> i32 {
        self.threshold
    }

    pub fn e_max(&self) -> i32 {
        self.e_max
    }

    pub fn decisions(&self, k: usize) -> EventCounter {
        self.comps[k].decisions
    }

    /// Total increments per histogram for component `k`:
    /// `(in-range, out-of-range, unpruned)`, relative to the initial counts.
    pub fn histogram_totals(&self, k: usize) -> (u64, u64, u64) {
        use crate::coder::CodingModel;
        let c = &self.comps[k];
        (c.in_range.total(), c.out_of_range.total(), c.case3.total())
    }

    /// Codes (or decodes) the color of Stage-3 pixel `(i, j)`.
    ///
    /// `img` supplies reconstructed causal neighbors; `target` is the true
    /// color on the encoder side and `None` on the decoder side.
    pub fn code_pixel<IO: SymbolIo>(
        &mut self,
        io: &mut IO,
        img: &Image,
        sp: &SidePlanes,
        i: usize,
        j: usize,
        target: Option<Color>,
        pruning: bool,
    ) -> Result<(Color, ResidualOutcome)> {
        let max = self.e_max;
        let mut out = Color::ZERO;
        let mut bits = 0.0;
        let mut cases = [ResidualCase::Unpruned; 3];
        let mut prev_best = 0usize;
        for k in 0..3 {
            let n = Neighbors::of(img, i, j, k);
            let actual = target.map(|c| c.component(k) as i32);
            let map = map_predict(n.left, n.top, n.top_left);
            let range = compute_range(sp, k, i, j);
            let comp = &mut self.comps[k];
            let value = if pruning && range <= self.threshold {
                let e = actual.map(|x| x - map);
                let inside = e.is_none_or(|e| e.abs() <= range);
                let (inside, c) = io.code_bit(comp.decisions.hits, comp.decisions.total, inside)?;
                bits += c;
                comp.decisions.record(inside, Some(self.decision_cap));
                let e = if inside {
                    cases[k] = ResidualCase::InRange;
                    let lo = (max - range) as usize;
                    let window = Window::new(&comp.in_range, lo, (max + range) as usize);
                    let sym = e.map_or(0, |e| (e + range) as usize);
                    let (sym, c) = io.code(&window, sym)?;
                    bits += c;
                    let e = sym as i32 - range;
                    debug_assert!(e.abs() <= range);
                    comp.in_range.increment((e + max) as usize);
                    e
                } else {
                    cases[k] = ResidualCase::OutOfRange;
                    let lo = range as usize;
                    let hi = (2 * max - range - 1) as usize;
                    let window = Window::new(&comp.out_of_range, lo, hi);
                    let sym = e.map_or(0, |e| (fold(e, range) + max - range) as usize);
                    let (sym, c) = io.code(&window, sym)?;
                    bits += c;
                    let f = sym as i32 + range - max;
                    debug_assert!(f >= -max + range && f <= max - range - 1);
                    comp.out_of_range.increment((f + max) as usize);
                    unfold(f, range)
                };
                map + e
            } else {
                let pred = if k == 0 {
                    map
                } else {
                    PREDICTORS[prev_best].predict(n, max)
                };
                let sym = actual.map_or(0, |x| (x - pred + max) as usize);
                let (sym, c) = io.code(&comp.case3, sym)?;
                bits += c;
                comp.case3.increment(sym);
                pred + sym as i32 - max
            };
            if value < 0 || value > max {
                return Err(ScfError::corrupt(format!(
                    "decoded component {value} outside 0..={max}"
                )));
            }
            out.set_component(k, value as u16);
            prev_best = best_predictor(value, n, max);
        }
        Ok((out, ResidualOutcome { bits, cases }))
    }

    pub fn digest(&self) -> u64 {
        let mut h = 0x5e5;
        for c in &self.comps {
            for t in [&c.in_range, &c.out_of_range, &c.case3] {
                for &n in t.counts() {
                    h = mix(h ^ n as u64);
                }
            }
            h = mix(h ^ ((c.decisions.hits as u64) << 32 | c.decisions.total as u64));
        }
        h
    }
}

/// MAP errors of all components of `c` at `(i, j)`, from reconstructed neighbors.
pub fn map_errors(img: &Image, i: usize, j: usize, c: Color) -> [i32; 3] {
    let mut e = [0; 3];
    for (k, slot) in e.iter_mut().enumerate() {
        let n = Neighbors::of(img, i, j, k);
        *slot = c.component(k) as i32 - map_predict(n.left, n.top, n.top_left);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coder::{Decoder, Encoder};

    #[test]
    fn map_rules() {
        assert_eq!(map_predict(10, 10, 10), 10);
        assert_eq!(map_predict(100, 50, 25), 100);
        assert_eq!(map_predict(5, 8, 9), 5);
        assert_eq!(map_predict(5, 8, 6), 7);
    }

    #[test]
    fn threshold_for_8_bit() {
        assert_eq!(ResidualModel::new(8).threshold(), 7);
        assert_eq!(ResidualModel::new(16).threshold(), 65535 / 36);
    }

    #[test]
    fn range_from_neighbor_errors() {
        let mut sp = SidePlanes::new(4, 3);
        assert_eq!(compute_range(&sp, 0, 0, 0), 1);
        assert_eq!(compute_range(&sp, 1, 2, 2), 1);
        // left, top-left, top, top-right of (1,1)
        sp.record(0, 1, [3, 0, 0], false);
        sp.record(0, 0, [-5, 0, 0], false);
        sp.record(1, 0, [2, 0, 0], false);
        sp.record(2, 0, [0, 9, 0], false);
        assert_eq!(compute_range(&sp, 0, 1, 1), 6);
        assert_eq!(compute_range(&sp, 1, 1, 1), 10);
        // (3,0) is not a neighbor of (1,1)
        sp.record(3, 0, [100, 0, 0], false);
        assert_eq!(compute_range(&sp, 0, 1, 1), 6);
    }

    #[test]
    fn fold_examples() {
        assert_eq!(fold(-4, 3), -1);
        assert_eq!(fold(5, 3), 1);
        assert_eq!(unfold(-1, 3), -4);
        assert_eq!(unfold(1, 3), 5);
    }

    #[test]
    fn fold_exhaustive_8bit() {
        let e_max = 255;
        for r in 1..=254 {
            for e in (-e_max..=e_max).filter(|e: &i32| e.abs() > r) {
                let f = fold(e, r);
                assert!(f >= -e_max + r && f <= e_max - r - 1, "e={e} r={r} f={f}");
                assert_eq!(unfold(f, r), e);
            }
        }
    }

    #[test]
    #[should_panic]
    fn fold_rejects_in_range() {
        fold(2, 3);
    }

    #[test]
    fn mapc_follows_previous_component() {
        // current pixel (1,1); component 0 has left=40, top=10, top-left=20,
        // so MED = planar = 30 and only `left` hits the actual value 40
        let px = vec![
            Color::new(20, 200, 0),
            Color::new(10, 100, 0),
            Color::new(40, 50, 0),
            Color::ZERO,
        ];
        let img = Image::from_pixels(2, 2, 8, px).unwrap();
        let n0 = Neighbors::of(&img, 1, 1, 0);
        assert_eq!(n0, Neighbors { left: 40, top: 10, top_left: 20 });
        let best = best_predictor(40, n0, 255);
        assert_eq!(PREDICTORS[best], Predictor::Left);
        assert_eq!(mapc_predict(&img, 1, 1, 1, best), 50);
        assert_eq!(mapc_predict(&img, 1, 1, 0, best), 30);
    }

    #[test]
    fn ties_pick_med() {
        let n = Neighbors { left: 9, top: 9, top_left: 9 };
        assert_eq!(best_predictor(9, n, 255), 0);
        assert_eq!(best_predictor(200, n, 255), 0);
    }

    #[test]
    fn planar_is_clamped() {
        let n = Neighbors { left: 250, top: 250, top_left: 0 };
        assert_eq!(Predictor::Planar.predict(n, 255), 255);
        let n = Neighbors { left: 0, top: 0, top_left: 200 };
        assert_eq!(Predictor::Planar.predict(n, 255), 0);
    }

    fn code_one(model: &mut ResidualModel, img: &Image, sp: &SidePlanes, c: Color, pruning: bool) -> ResidualOutcome {
        let mut enc = Encoder::new();
        let (_, out) = model.code_pixel(&mut enc, img, sp, 1, 1, Some(c), pruning).unwrap();
        let bytes = enc.finish();
        let mut fresh = ResidualModel::new(8);
        let mut dec = Decoder::new(&bytes);
        let (d, _) = fresh.code_pixel(&mut dec, img, sp, 1, 1, None, pruning).unwrap();
        assert_eq!(d, c);
        out
    }

    #[test]
    fn flat_region_uses_in_range_window() {
        let img = Image::new(3, 3, 8, Color::new(7, 7, 7)).unwrap();
        let sp = SidePlanes::new(3, 3);
        let mut m = ResidualModel::new(8);
        let out = code_one(&mut m, &img, &sp, Color::new(7, 8, 6), true);
        assert_eq!(out.cases, [ResidualCase::InRange; 3]);
        // first decision 1 bit, then a uniform 3-symbol window
        let expected = 1.0 + 3f64.log2();
        let mut enc = Encoder::new();
        let mut m = ResidualModel::new(8);
        let (_, o) = m.code_pixel(&mut enc, &img, &sp, 1, 1, Some(Color::new(7, 7, 7)), true).unwrap();
        assert!((o.bits / 3.0 - expected).abs() < 1e-6, "{}", o.bits);
        assert_eq!(m.decisions(0), EventCounter { hits: 1, total: 1 });
        assert_eq!(m.histogram_totals(0).0, 512);
    }

    #[test]
    fn large_neighbor_errors_select_case3() {
        let img = Image::new(3, 3, 8, Color::new(7, 7, 7)).unwrap();
        let mut sp = SidePlanes::new(3, 3);
        sp.record(0, 1, [200, 200, 200], false);
        let mut m = ResidualModel::new(8);
        let out = code_one(&mut m, &img, &sp, Color::new(90, 91, 92), true);
        assert_eq!(out.cases, [ResidualCase::Unpruned; 3]);
    }

    #[test]
    fn out_of_range_folds() {
        // range 3 at component 0, error +5 → folded symbol 1
        let img = Image::new(3, 3, 8, Color::new(7, 7, 7)).unwrap();
        let mut sp = SidePlanes::new(3, 3);
        sp.record(0, 1, [2, 0, 0], false);
        let mut m = ResidualModel::new(8);
        let out = code_one(&mut m, &img, &sp, Color::new(12, 7, 7), true);
        assert_eq!(out.cases[0], ResidualCase::OutOfRange);
        assert_eq!(m.comps[0].out_of_range.count((1 + 255) as usize), 2);
        assert_eq!(out.cases[1], ResidualCase::InRange);
    }

    #[test]
    fn baseline_always_unpruned() {
        let img = Image::new(3, 3, 8, Color::new(7, 7, 7)).unwrap();
        let sp = SidePlanes::new(3, 3);
        let mut m = ResidualModel::new(8);
        let out = code_one(&mut m, &img, &sp, Color::new(7, 7, 7), false);
        assert_eq!(out.cases, [ResidualCase::Unpruned; 3]);
    }

    #[test]
    fn extreme_values_round_trip() {
        let img = Image::new(3, 3, 8, Color::new(0, 255, 0)).unwrap();
        let sp = SidePlanes::new(3, 3);
        for c in [Color::new(255, 0, 255), Color::new(0, 255, 0), Color::new(255, 255, 255)] {
            for pruning in [false, true] {
                let mut m = ResidualModel::new(8);
                code_one(&mut m, &img, &sp, c, pruning);
            }
        }
    }
}
