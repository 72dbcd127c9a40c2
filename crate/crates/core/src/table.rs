//! Layered count table over sequence pairs.
//!
//! A diagram is a pair `(y, x)` of an allocation sequence and an intersection
//! sequence with `x_j <= j - 1 - S_{j-1}`, where `S_j = y_1 + ... + y_j`.
//! Layer `j` of the table holds `f_j(s, c)`: the number of prefixes
//! `(y_1..y_j, x_1..x_j)` with `S_j = s` and `x_1 + ... + x_j = c`.
//!
//! One layer step is two cumulative passes: a window sum over `c` (the choice
//! of `x_j`, whose range depends on `S_{j-1}`) and a prefix sum over `s` (the
//! choice of `y_j`). Because the prefix over `s` is kept as is, column
//! `f_j(., c)` doubles as the cumulative distribution of `S_{j-1}` during
//! backward sampling.
//!
//! Only every `checkpoint_interval`-th layer is retained; the layers in
//! between are rebuilt one block at a time while sampling.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::SequencePair;
use crate::error::{Error, Result};
use crate::exact::max_crossings;
use crate::weight::{Scaled, Weight};

/// Largest `n` for exact big-integer tables.
pub const EXACT_CAP: usize = 150;
pub const DEFAULT_CHECKPOINT_INTERVAL: usize = 32;
/// Default memory budget for a table and its rebuild block.
pub const DEFAULT_MEMORY_BUDGET: u64 = 3 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DpMode {
    Exact,
    ScaledFloat,
}

impl DpMode {
    /// Exact up to [`EXACT_CAP`], scaled float beyond.
    pub fn auto(n: usize) -> Self {
        if n <= EXACT_CAP {
            DpMode::Exact
        } else {
            DpMode::ScaledFloat
        }
    }
}

#[derive(Debug, Clone)]
struct Layer<W> {
    j: usize,
    width: usize,
    data: Vec<W>,
}

impl<W: Weight> Layer<W> {
    fn origin() -> Self {
        Layer { j: 0, width: 1, data: vec![W::one()] }
    }

    fn get(&self, s: usize, c: usize) -> Option<&W> {
        if s > self.j || c >= self.width {
            None
        } else {
            Some(&self.data[s * self.width + c])
        }
    }

    fn row(&self, s: usize) -> &[W] {
        &self.data[s * self.width..(s + 1) * self.width]
    }

    fn next(&self, m: usize) -> Layer<W> {
        let j = self.j + 1;
        let width = layer_width(j, m);
        let mut data = Vec::with_capacity((j + 1) * width);
        let mut acc = vec![W::zero(); width];
        let mut window = vec![W::zero(); width];
        for prev_s in 0..j {
            // x_j ranges over 0..=j-1-prev_s.
            W::window_sums(self.row(prev_s), j - prev_s, &mut window);
            for (a, w) in acc.iter_mut().zip(&window) {
                a.add_to(w);
            }
            data.extend_from_slice(&acc);
        }
        data.extend_from_slice(&acc);
        Layer { j, width, data }
    }
}

fn layer_width(j: usize, m: usize) -> usize {
    m.min(max_crossings(j)) + 1
}

#[derive(Debug, Clone)]
struct Checkpoints<W> {
    n: usize,
    m: usize,
    interval: usize,
    // Layers 0, K, 2K, ... and n.
    layers: Vec<Layer<W>>,
}

impl<W: Weight> Checkpoints<W> {
    fn build(n: usize, m: usize, interval: usize) -> Self {
        let mut layers = vec![Layer::origin()];
        let mut cur = Layer::origin();
        for j in 1..=n {
            cur = cur.next(m);
            if j % interval == 0 || j == n {
                layers.push(cur.clone());
            }
        }
        Checkpoints { n, m, interval, layers }
    }

    fn total(&self) -> W {
        let last = self.layers.last().expect("origin layer");
        last.get(self.n, self.m).cloned().unwrap_or_else(W::zero)
    }

    fn checkpoint_index(&self, j: usize) -> Option<usize> {
        if j % self.interval == 0 {
            Some(j / self.interval)
        } else if j == self.n {
            Some(self.layers.len() - 1)
        } else {
            None
        }
    }

    /// Layers `lo..=hi` where `lo` is a checkpoint.
    fn rebuild(&self, lo: usize, hi: usize) -> Vec<Layer<W>> {
        let start = self.checkpoint_index(lo).expect("block starts at a checkpoint");
        let mut out = vec![self.layers[start].clone()];
        for j in lo + 1..=hi {
            let layer = match self.checkpoint_index(j) {
                Some(idx) => self.layers[idx].clone(),
                None => out.last().expect("nonempty").next(self.m),
            };
            out.push(layer);
        }
        out
    }

    fn layer(&self, j: usize) -> Layer<W> {
        let lo = (j / self.interval) * self.interval;
        self.rebuild(lo, j).pop().expect("nonempty")
    }

    /// Backward sampling of `rngs.len()` independent sequence pairs, all
    /// walked through one rebuilt block at a time.
    fn sample<R: Rng>(&self, rngs: &mut [R]) -> Vec<SequencePair> {
        let n = self.n;
        let count = rngs.len();
        let mut ys = vec![vec![0usize; n]; count];
        let mut xs = vec![vec![0usize; n]; count];
        let mut state = vec![(n, self.m); count];
        let mut hi = n;
        while hi > 0 {
            let lo = if hi % self.interval == 0 { hi - self.interval } else { (hi / self.interval) * self.interval };
            let block = self.rebuild(lo, hi);
            for j in (lo + 1..=hi).rev() {
                let cur = &block[j - lo];
                let prev = &block[j - 1 - lo];
                for (k, rng) in rngs.iter_mut().enumerate() {
                    let (s, c) = state[k];
                    let (prev_s, x) = step_back(cur, prev, s, c, rng);
                    ys[k][j - 1] = s - prev_s;
                    xs[k][j - 1] = x;
                    state[k] = (prev_s, c - x);
                }
            }
            hi = lo;
        }
        debug_assert!(state.iter().all(|&st| st == (0, 0)));
        ys.into_iter().zip(xs).map(|(y, x)| SequencePair::new(y, x)).collect()
    }
}

/// One backward step from state `(s, c)` at layer `j = cur.j`.
fn step_back<W: Weight, R: Rng>(
    cur: &Layer<W>,
    prev: &Layer<W>,
    s: usize,
    c: usize,
    rng: &mut R,
) -> (usize, usize) {
    let j = cur.j;
    let top = s.min(j - 1);
    let column = |t: usize| cur.get(t, c).expect("state inside layer");
    let total = column(top);
    let r = W::below(total, rng);
    // First prev_s with cumulative weight above r.
    let (mut lo, mut hi) = (0usize, top);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if *column(mid) > r {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut prev_s = lo;
    if !(*column(prev_s) > r) {
        // Rounding pushed r to the top; take the last state with positive mass.
        prev_s = (0..=top)
            .rev()
            .find(|&t| t == 0 || column(t) > column(t - 1))
            .expect("nonempty column");
    }
    let span = (j - 1 - prev_s).min(c);
    let weight = |x: usize| prev.get(prev_s, c - x).cloned().unwrap_or_else(W::zero);
    let mut window_total = W::zero();
    for x in 0..=span {
        window_total.add_to(&weight(x));
    }
    let r = W::below(&window_total, rng);
    let mut acc = W::zero();
    let mut last_positive = 0;
    for x in 0..=span {
        let w = weight(x);
        if w.is_zero() {
            continue;
        }
        last_positive = x;
        acc.add_to(&w);
        if acc > r {
            return (prev_s, x);
        }
    }
    (prev_s, last_positive)
}

#[derive(Debug, Clone)]
enum Store {
    Exact(Checkpoints<BigUint>),
    Scaled(Checkpoints<Scaled>),
}

/// Checkpointed DP table for diagrams with `n` chords and `m` crossings.
#[derive(Debug, Clone)]
pub struct CountTable {
    n: usize,
    m: usize,
    mode: DpMode,
    checkpoint_interval: usize,
    store: Store,
}

impl CountTable {
    pub fn build(n: usize, m: usize, mode: DpMode, checkpoint_interval: usize) -> Result<Self> {
        Self::build_with_budget(n, m, mode, checkpoint_interval, DEFAULT_MEMORY_BUDGET)
    }

    pub fn build_with_budget(
        n: usize,
        m: usize,
        mode: DpMode,
        checkpoint_interval: usize,
        budget: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("count table needs n >= 1".into()));
        }
        if checkpoint_interval == 0 {
            return Err(Error::Config("checkpoint interval must be positive".into()));
        }
        if mode == DpMode::Exact && n > EXACT_CAP {
            return Err(Error::CapExceeded { what: "exact count table", cap: EXACT_CAP, got: n });
        }
        let needed = estimate_bytes(n, m, mode, checkpoint_interval);
        if needed > budget {
            return Err(Error::Capacity { needed, budget });
        }
        let store = match mode {
            DpMode::Exact => Store::Exact(Checkpoints::build(n, m, checkpoint_interval)),
            DpMode::ScaledFloat => Store::Scaled(Checkpoints::build(n, m, checkpoint_interval)),
        };
        Ok(CountTable { n, m, mode, checkpoint_interval, store })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> DpMode {
        self.mode
    }

    pub fn checkpoint_interval(&self) -> usize {
        self.checkpoint_interval
    }

    /// `f_n(n, m)` when the table is exact.
    pub fn total_exact(&self) -> Option<BigUint> {
        match &self.store {
            Store::Exact(cp) => Some(cp.total()),
            Store::Scaled(_) => None,
        }
    }

    /// Natural log of `f_n(n, m)`.
    pub fn total_ln(&self) -> f64 {
        match &self.store {
            Store::Exact(cp) => cp.total().ln(),
            Store::Scaled(cp) => cp.total().ln(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.store {
            Store::Exact(cp) => Weight::is_zero(&cp.total()),
            Store::Scaled(cp) => Weight::is_zero(&cp.total()),
        }
    }

    /// Exact entry `f_j(s, c)`; `None` outside the layer or in float mode.
    pub fn entry_exact(&self, j: usize, s: usize, c: usize) -> Option<BigUint> {
        match &self.store {
            Store::Exact(cp) if j <= self.n => cp.layer(j).get(s, c).cloned(),
            _ => None,
        }
    }

    /// Natural log of `f_j(s, c)`, `-inf` for zero entries.
    pub fn entry_ln(&self, j: usize, s: usize, c: usize) -> Option<f64> {
        if j > self.n {
            return None;
        }
        match &self.store {
            Store::Exact(cp) => cp.layer(j).get(s, c).map(|v| v.ln()),
            Store::Scaled(cp) => cp.layer(j).get(s, c).map(|v| Weight::ln(v)),
        }
    }

    /// One sequence pair per generator, drawn uniformly (exactly in exact
    /// mode, up to float rounding otherwise).
    pub fn sample_pairs<R: Rng>(&self, rngs: &mut [R]) -> Result<Vec<SequencePair>> {
        if self.is_empty() {
            return Err(Error::EmptySupport { n: self.n, m: self.m });
        }
        Ok(match &self.store {
            Store::Exact(cp) => cp.sample(rngs),
            Store::Scaled(cp) => cp.sample(rngs),
        })
    }
}

/// Bytes for checkpoints plus one rebuild block.
pub fn estimate_bytes(n: usize, m: usize, mode: DpMode, interval: usize) -> u64 {
    let entry = match mode {
        DpMode::Exact => {
            // log2 of (2n-1)!! bounds every entry.
            let bits = (1..=n).map(|k| ((2 * k - 1) as f64).log2()).sum::<f64>() as u64 + 1;
            BigUint::footprint(bits)
        }
        DpMode::ScaledFloat => Scaled::footprint(0),
    };
    let entries = |j: usize| ((j + 1) * layer_width(j, m)) as u64;
    let stored: u64 = (0..=n).filter(|j| j % interval == 0 || *j == n).map(entries).sum();
    let block: u64 = (n.saturating_sub(interval)..=n).map(entries).sum();
    (stored + block) * entry
}

/// `T(n, m)` by the sequence-pair dynamic program, with its exact table.
pub fn dp_count(n: usize, m: usize) -> Result<(BigUint, CountTable)> {
    if m > max_crossings(n) {
        return Err(Error::Domain(format!("m = {m} exceeds n(n-1)/2 for n = {n}")));
    }
    let table = CountTable::build(n, m, DpMode::Exact, DEFAULT_CHECKPOINT_INTERVAL)?;
    let total = table.total_exact().expect("exact mode");
    Ok((total, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{decode, is_compatible};
    use crate::exact::touchard_riordan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_crossing_pair() {
        let (count, table) = dp_count(2, 1).unwrap();
        assert_eq!(count, BigUint::from(1u32));
        let mut rngs = vec![ChaCha8Rng::seed_from_u64(1)];
        let pairs = table.sample_pairs(&mut rngs).unwrap();
        assert_eq!(pairs[0], SequencePair::new(vec![0, 2], vec![0, 1]));
    }

    #[test]
    fn table_anchors() {
        let (_, table) = dp_count(5, 4).unwrap();
        assert_eq!(table.entry_exact(0, 0, 0), Some(BigUint::from(1u32)));
        assert_eq!(table.entry_exact(5, 5, 4), Some(touchard_riordan(5, 4)));
        for j in 0..=5 {
            for s in 0..=j {
                for c in 0..=4 {
                    if let Some(v) = table.entry_exact(j, s, c) {
                        assert!(v >= BigUint::from(0u32));
                    }
                }
            }
        }
    }

    #[test]
    fn checkpoint_interval_does_not_change_counts() {
        for interval in [1, 2, 3, 32] {
            let t = CountTable::build(9, 11, DpMode::Exact, interval).unwrap();
            assert_eq!(t.total_exact().unwrap(), touchard_riordan(9, 11));
        }
    }

    #[test]
    fn scaled_mode_tracks_exact_logs() {
        let exact = touchard_riordan(120, 300);
        let t = CountTable::build(120, 300, DpMode::ScaledFloat, 16).unwrap();
        let rel = (t.total_ln() - crate::exact::ln_big(&exact)).abs();
        assert!(rel < 1e-9, "log difference {rel}");
    }

    #[test]
    fn samples_are_valid_encodings() {
        let t = CountTable::build(12, 20, DpMode::Exact, 5).unwrap();
        let mut rngs: Vec<ChaCha8Rng> = (0..50).map(ChaCha8Rng::seed_from_u64).collect();
        for p in t.sample_pairs(&mut rngs).unwrap() {
            assert!(is_compatible(&p).unwrap());
            assert_eq!(p.crossings(), 20);
            assert_eq!(decode(&p).unwrap().crossing_count(), 20);
        }
        let t = CountTable::build(12, 20, DpMode::ScaledFloat, 5).unwrap();
        for p in t.sample_pairs(&mut rngs).unwrap() {
            assert_eq!(decode(&p).unwrap().crossing_count(), 20);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            CountTable::build(151, 10, DpMode::Exact, 32),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            CountTable::build_with_budget(500, 500, DpMode::ScaledFloat, 32, 1 << 20),
            Err(Error::Capacity { .. })
        ));
        assert!(dp_count(3, 4).is_err());
    }
}
