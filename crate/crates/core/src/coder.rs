//! Adaptive multi-symbol arithmetic coding.
//!
//! The coder is a bit-oriented low/high coder with 62-bit registers and
//! pending-bit (underflow) handling. Interval subdivision uses 128-bit
//! intermediates so models may carry totals up to [`MAX_MODEL_TOTAL`] while
//! keeping the per-symbol rounding loss far below a millibit.
//!
//! Models implement [`CodingModel`], which exposes cumulative frequencies.
//! The adaptive count table ([`FrequencyTable`]) is Fenwick-backed so both
//! windowed queries and symbol search run in `O(log n)`.

use crate::error::{Result, ScfError};

const STATE_BITS: u32 = 62;
const FULL: u64 = 1 << STATE_BITS;
const HALF: u64 = FULL >> 1;
const QUARTER: u64 = FULL >> 2;
const THREE_QUARTERS: u64 = HALF + QUARTER;

/// Largest model total the coder accepts. After renormalization the coder
/// range exceeds 2^60, so every symbol keeps at least 2^20 integer steps.
pub const MAX_MODEL_TOTAL: u64 = 1 << 40;

/// Default cap for adaptive count tables.
pub const TOTAL_MAX: u64 = 1 << 16;

/// Cumulative-frequency view of a probability model.
pub trait CodingModel {
    /// Sum of all symbol weights.
    fn total(&self) -> u64;
    /// `(cumulative weight below sym, weight of sym)`.
    fn interval(&self, sym: usize) -> (u64, u64);
    /// Symbol whose interval contains `target` (< total), with its interval.
    fn lookup(&self, target: u64) -> (usize, u64, u64);
}

// ---------------------------------------------------------------------------
// Adaptive frequency table

/// Adaptive symbol counts with a Fenwick tree over them.
///
/// Symbols with count 0 are unencodable. When an increment would push the
/// total over the cap, every nonzero count is halved (rounding up), which
/// keeps live symbols live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: Vec<u32>,
    tree: Vec<u64>,
    total: u64,
    cap: u64,
}

impl FrequencyTable {
    pub fn new(len: usize, init: u32, cap: u64) -> Self {
        let mut t = FrequencyTable {
            counts: vec![init; len],
            tree: vec![0; len + 1],
            total: 0,
            cap,
        };
        t.rebuild();
        t
    }

    pub fn from_counts(counts: Vec<u32>, cap: u64) -> Self {
        let mut t = FrequencyTable {
            tree: vec![0; counts.len() + 1],
            counts,
            total: 0,
            cap,
        };
        t.rebuild();
        t
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, sym: usize) -> u32 {
        self.counts[sym]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Sum of counts of symbols `0..n`.
    pub fn prefix(&self, mut n: usize) -> u64 {
        let mut s = 0;
        while n > 0 {
            s += self.tree[n];
            n &= n - 1;
        }
        s
    }

    /// Sum of counts over `lo..=hi`.
    pub fn range_total(&self, lo: usize, hi: usize) -> u64 {
        self.prefix(hi + 1) - self.prefix(lo)
    }

    /// Smallest symbol `s` with `prefix(s + 1) > target`.
    fn search(&self, target: u64) -> usize {
        let mut pos = 0usize;
        let mut rem = target;
        let mut step = self.tree.len().next_power_of_two() >> 1;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }

    fn add(&mut self, sym: usize, delta: u64) {
        let mut i = sym + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
        self.total += delta;
    }

    fn rebuild(&mut self) {
        let n = self.counts.len();
        self.tree.clear();
        self.tree.resize(n + 1, 0);
        for i in 1..=n {
            self.tree[i] += self.counts[i - 1] as u64;
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                self.tree[parent] += self.tree[i];
            }
        }
        self.total = self.counts.iter().map(|&c| c as u64).sum();
    }

    /// Adds one occurrence of `sym`, rescaling first if the cap would be exceeded.
    pub fn increment(&mut self, sym: usize) {
        if self.total + 1 > self.cap {
            self.rescale();
        }
        self.counts[sym] += 1;
        self.add(sym, 1);
    }

    /// Appends a new symbol with the given count.
    pub fn push(&mut self, count: u32) {
        if self.total + count as u64 > self.cap {
            self.rescale();
        }
        let i = self.counts.len() + 1;
        self.counts.push(count);
        // a new Fenwick node covers (i - lowbit(i), i]
        let low = i - (i & i.wrapping_neg());
        let node = count as u64 + self.prefix(i - 1) - self.prefix(low);
        self.tree.push(node);
        self.total += count as u64;
    }

    /// Halves every nonzero count, rounding up.
    pub fn rescale(&mut self) {
        for c in &mut self.counts {
            *c = c.div_ceil(2);
        }
        self.rebuild();
    }
}

impl CodingModel for FrequencyTable {
    fn total(&self) -> u64 {
        self.total
    }

    fn interval(&self, sym: usize) -> (u64, u64) {
        (self.prefix(sym), self.counts[sym] as u64)
    }

    fn lookup(&self, target: u64) -> (usize, u64, u64) {
        let s = self.search(target);
        (s, self.prefix(s), self.counts[s] as u64)
    }
}

/// A contiguous symbol range `lo..=hi` of a [`FrequencyTable`], renormalized
/// over its own counts. Symbol indices are relative to `lo`.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    table: &'a FrequencyTable,
    lo: usize,
    base: u64,
    total: u64,
}

impl<'a> Window<'a> {
    pub fn new(table: &'a FrequencyTable, lo: usize, hi: usize) -> Self {
        assert!(lo <= hi && hi < table.len(), "window {lo}..={hi} outside table");
        let base = table.prefix(lo);
        let total = table.prefix(hi + 1) - base;
        Window { table, lo, base, total }
    }
}

impl CodingModel for Window<'_> {
    fn total(&self) -> u64 {
        self.total
    }

    fn interval(&self, sym: usize) -> (u64, u64) {
        let (c, f) = self.table.interval(self.lo + sym);
        (c - self.base, f)
    }

    fn lookup(&self, target: u64) -> (usize, u64, u64) {
        let (s, c, f) = self.table.lookup(self.base + target);
        (s - self.lo, c - self.base, f)
    }
}

// ---------------------------------------------------------------------------
// Binary decisions and escape composition

/// Binary event with Laplace-smoothed probability `(n_true + 1) / (n_total + 2)`.
/// Symbol 0 is `true`, symbol 1 is `false`.
#[derive(Debug, Clone, Copy)]
pub struct BinaryModel {
    n_true: u64,
    n_total: u64,
}

impl BinaryModel {
    pub fn new(n_true: u32, n_total: u32) -> Self {
        debug_assert!(n_true <= n_total);
        BinaryModel { n_true: n_true as u64, n_total: n_total as u64 }
    }
}

impl CodingModel for BinaryModel {
    fn total(&self) -> u64 {
        self.n_total + 2
    }

    fn interval(&self, sym: usize) -> (u64, u64) {
        if sym == 0 {
            (0, self.n_true + 1)
        } else {
            (self.n_true + 1, self.n_total - self.n_true + 1)
        }
    }

    fn lookup(&self, target: u64) -> (usize, u64, u64) {
        let sym = usize::from(target > self.n_true);
        let (c, f) = self.interval(sym);
        (sym, c, f)
    }
}

/// Occurrence counter for a binary event, e.g. "escape happened".
///
/// With a cap set, both counts are halved (rounding up) before an update
/// would push the total past it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EventCounter {
    pub hits: u32,
    pub total: u32,
}

impl EventCounter {
    pub fn record(&mut self, hit: bool, cap: Option<u32>) {
        if let Some(cap) = cap {
            if self.total >= cap {
                self.hits = self.hits.div_ceil(2);
                self.total = self.total.div_ceil(2);
            }
        }
        self.total += 1;
        self.hits += hit as u32;
    }

    /// Laplace-smoothed probability of a hit as `(numerator, denominator)`.
    pub fn probability(&self) -> (u64, u64) {
        (self.hits as u64 + 1, self.total as u64 + 2)
    }
}

/// Minimum scaled total used when attaching an escape symbol, so small
/// distributions can still express the target escape probability.
pub const ESCAPE_TARGET_TOTAL: u64 = 1 << 12;

/// A model extended by one escape symbol (index `len`) whose probability
/// approximates `esc_num / esc_den`.
///
/// Inner weights are scaled by a common integer factor so the inner total is
/// at least [`ESCAPE_TARGET_TOTAL`]; the escape weight is then chosen so that
/// `w / (scaled_total + w)` rounds to the target probability.
#[derive(Debug, Clone, Copy)]
pub struct WithEscape<'a, M: CodingModel> {
    inner: &'a M,
    len: usize,
    scale: u64,
    inner_total: u64,
    esc_weight: u64,
}

impl<'a, M: CodingModel> WithEscape<'a, M> {
    pub fn new(inner: &'a M, len: usize, esc_num: u64, esc_den: u64) -> Self {
        assert!(esc_num > 0 && esc_num < esc_den, "escape probability must be in (0,1)");
        let t = inner.total();
        let scale = if t == 0 { 1 } else { ESCAPE_TARGET_TOTAL.div_ceil(t).max(1) };
        let inner_total = t * scale;
        let rest = (esc_den - esc_num) as u128;
        let w = (2 * esc_num as u128 * inner_total as u128 + rest) / (2 * rest);
        let esc_weight = (w as u64).max(1);
        WithEscape { inner, len, scale, inner_total, esc_weight }
    }

    pub fn escape_symbol(&self) -> usize {
        self.len
    }

    pub fn escape_weight(&self) -> u64 {
        self.esc_weight
    }
}

impl<M: CodingModel> CodingModel for WithEscape<'_, M> {
    fn total(&self) -> u64 {
        self.inner_total + self.esc_weight
    }

    fn interval(&self, sym: usize) -> (u64, u64) {
        if sym == self.len {
            (self.inner_total, self.esc_weight)
        } else {
            let (c, f) = self.inner.interval(sym);
            (c * self.scale, f * self.scale)
        }
    }

    fn lookup(&self, target: u64) -> (usize, u64, u64) {
        if target >= self.inner_total {
            (self.len, self.inner_total, self.esc_weight)
        } else {
            let (s, c, f) = self.inner.lookup(target / self.scale);
            (s, c * self.scale, f * self.scale)
        }
    }
}

/// Ideal code length of `sym` under `model`, in bits.
pub fn ideal_cost<M: CodingModel>(model: &M, sym: usize) -> f64 {
    let (_, f) = model.interval(sym);
    (model.total() as f64 / f as f64).log2()
}

// ---------------------------------------------------------------------------
// Encoder / decoder

#[derive(Debug, Default)]
struct BitWriter {
    bytes: Vec<u8>,
    cur: u8,
    nbits: u8,
    written: u64,
}

impl BitWriter {
    #[inline]
    fn put(&mut self, bit: bool) {
        self.cur = (self.cur << 1) | bit as u8;
        self.nbits += 1;
        self.written += 1;
        if self.nbits == 8 {
            self.bytes.push(self.cur);
            self.cur = 0;
            self.nbits = 0;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.bytes.push(self.cur << (8 - self.nbits));
        }
        self.bytes
    }
}

#[inline]
fn narrow(low: u64, high: u64, cum: u64, freq: u64, total: u64) -> (u64, u64) {
    let range = (high - low + 1) as u128;
    let t = total as u128;
    let new_high = low + ((range * (cum + freq) as u128) / t) as u64 - 1;
    let new_low = low + ((range * cum as u128) / t) as u64;
    (new_low, new_high)
}

#[inline]
fn width_bits(low: u64, high: u64) -> f64 {
    ((high - low + 1) as f64).log2()
}

pub struct Encoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitWriter,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Encoder { low: 0, high: FULL - 1, pending: 0, out: BitWriter::default() }
    }

    /// Codes `sym` and returns the interval-width reduction in bits.
    pub fn encode<M: CodingModel>(&mut self, model: &M, sym: usize) -> f64 {
        let total = model.total();
        let (cum, freq) = model.interval(sym);
        assert!(freq > 0, "symbol {sym} has zero frequency");
        assert!(total <= MAX_MODEL_TOTAL, "model total {total} exceeds coder limit");
        debug_assert!(cum + freq <= total);
        let before = width_bits(self.low, self.high);
        let (low, high) = narrow(self.low, self.high, cum, freq, total);
        self.low = low;
        self.high = high;
        let cost = before - width_bits(low, high);
        self.renormalize();
        cost
    }

    /// Codes a binary decision with Laplace-smoothed counts.
    pub fn encode_bit(&mut self, n_true: u32, n_total: u32, bit: bool) -> f64 {
        self.encode(&BinaryModel::new(n_true, n_total), usize::from(!bit))
    }

    fn emit(&mut self, bit: bool) {
        self.out.put(bit);
        for _ in 0..self.pending {
            self.out.put(!bit);
        }
        self.pending = 0;
    }

    fn renormalize(&mut self) {
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    /// Bits emitted so far, counting deferred underflow bits.
    pub fn bits_written(&self) -> u64 {
        self.out.written + self.pending
    }

    pub fn finish(mut self) -> Vec<u8> {
        self.pending += 1;
        if self.low < QUARTER {
            self.emit(false);
        } else {
            self.emit(true);
        }
        self.out.finish()
    }
}

pub struct Decoder<'a> {
    data: &'a [u8],
    bitpos: usize,
    overread: u32,
    low: u64,
    high: u64,
    value: u64,
}

impl<'a> Decoder<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        let mut d = Decoder { data, bitpos: 0, overread: 0, low: 0, high: FULL - 1, value: 0 };
        for _ in 0..STATE_BITS {
            d.value = (d.value << 1) | d.next_bit() as u64;
        }
        d
    }

    #[inline]
    fn next_bit(&mut self) -> bool {
        let byte = self.bitpos >> 3;
        let bit = if byte < self.data.len() {
            (self.data[byte] >> (7 - (self.bitpos & 7))) & 1 == 1
        } else {
            self.overread += 1;
            false
        };
        self.bitpos += 1;
        bit
    }

    /// Decodes one symbol; returns it with the interval-width reduction in bits.
    pub fn decode<M: CodingModel>(&mut self, model: &M) -> Result<(usize, f64)> {
        let total = model.total();
        assert!(total <= MAX_MODEL_TOTAL, "model total {total} exceeds coder limit");
        if self.value < self.low || self.value > self.high {
            return Err(ScfError::corrupt("coder state desynchronized"));
        }
        let range = (self.high - self.low + 1) as u128;
        let offset = (self.value - self.low) as u128;
        let target = (((offset + 1) * total as u128 - 1) / range) as u64;
        if target >= total {
            return Err(ScfError::corrupt("coder target out of range"));
        }
        let (sym, cum, freq) = model.lookup(target);
        if freq == 0 {
            return Err(ScfError::corrupt("decoded a zero-frequency symbol"));
        }
        let before = width_bits(self.low, self.high);
        let (low, high) = narrow(self.low, self.high, cum, freq, total);
        self.low = low;
        self.high = high;
        let cost = before - width_bits(low, high);
        self.renormalize()?;
        Ok((sym, cost))
    }

    pub fn decode_bit(&mut self, n_true: u32, n_total: u32) -> Result<(bool, f64)> {
        let (sym, cost) = self.decode(&BinaryModel::new(n_true, n_total))?;
        Ok((sym == 0, cost))
    }

    fn renormalize(&mut self) -> Result<()> {
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.next_bit() as u64;
        }
        // a complete stream is never read more than STATE_BITS past its end
        if self.overread > STATE_BITS {
            return Err(ScfError::corrupt("payload exhausted"));
        }
        Ok(())
    }
}

/// Shared encode/decode step, so one model-driving routine serves both
/// directions. The encoder codes `sym` and hands it back; the decoder
/// ignores `sym` and returns what it decoded.
pub trait SymbolIo {
    fn code<M: CodingModel>(&mut self, model: &M, sym: usize) -> Result<(usize, f64)>;

    /// Binary decision with Laplace-smoothed counts.
    fn code_bit(&mut self, n_true: u32, n_total: u32, bit: bool) -> Result<(bool, f64)> {
        let (s, cost) = self.code(&BinaryModel::new(n_true, n_total), usize::from(!bit))?;
        Ok((s == 0, cost))
    }
}

impl SymbolIo for Encoder {
    fn code<M: CodingModel>(&mut self, model: &M, sym: usize) -> Result<(usize, f64)> {
        Ok((sym, self.encode(model, sym)))
    }
}

impl SymbolIo for Decoder<'_> {
    fn code<M: CodingModel>(&mut self, model: &M, _sym: usize) -> Result<(usize, f64)> {
        self.decode(model)
    }
}
