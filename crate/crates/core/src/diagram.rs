//! Chord diagrams, crossings, intersection graphs, cuts, and the
//! (allocation, intersection) sequence encoding.
//!
//! Points are 1-based in every external form (pair lists, JSON, CSV) and
//! 0-based inside [`ChordDiagram`]. Chords are labelled by increasing left
//! endpoint; label `k` (0-based) is the chord with the `k`-th smallest left
//! endpoint.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;

/// Above this many chords, [`ChordDiagram::crossing_count`] switches from the
/// pair scan to the Fenwick sweep.
pub const SWEEP_THRESHOLD: usize = 256;

/// A perfect matching of the points `0..2n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChordDiagram {
    partner: Vec<usize>,
}

impl ChordDiagram {
    /// Builds a diagram from 1-based point pairs in any order.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let size = 2 * pairs.len();
        let mut partner = vec![usize::MAX; size];
        for &(a, b) in pairs {
            for p in [a, b] {
                if p == 0 || p > size {
                    return Err(Error::InvalidDiagram(format!(
                        "point {p} outside 1..={size}"
                    )));
                }
            }
            if a == b {
                return Err(Error::InvalidDiagram(format!("chord ({a},{b}) is a loop")));
            }
            for p in [a, b] {
                if partner[p - 1] != usize::MAX {
                    return Err(Error::InvalidDiagram(format!("point {p} repeated")));
                }
            }
            partner[a - 1] = b - 1;
            partner[b - 1] = a - 1;
        }
        if let Some(p) = partner.iter().position(|&q| q == usize::MAX) {
            return Err(Error::InvalidDiagram(format!("point {} missing", p + 1)));
        }
        Ok(ChordDiagram { partner })
    }

    /// Builds a diagram from a 0-based partner array.
    pub fn from_partner(partner: Vec<usize>) -> Result<Self> {
        if partner.len() % 2 != 0 {
            return Err(Error::InvalidDiagram(format!(
                "odd number of points: {}",
                partner.len()
            )));
        }
        for (i, &p) in partner.iter().enumerate() {
            if p >= partner.len() || p == i || partner[p] != i {
                return Err(Error::InvalidDiagram(format!(
                    "partner array is not a fixed-point-free involution at point {}",
                    i + 1
                )));
            }
        }
        Ok(ChordDiagram { partner })
    }

    pub(crate) fn from_partner_unchecked(partner: Vec<usize>) -> Self {
        debug_assert!(Self::from_partner(partner.clone()).is_ok());
        ChordDiagram { partner }
    }

    /// The non-crossing diagram `{(1,2),(3,4),...}`.
    pub fn chain(n: usize) -> Self {
        let partner = (0..2 * n).map(|i| i ^ 1).collect();
        ChordDiagram { partner }
    }

    pub fn n(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, point: usize) -> usize {
        self.partner[point]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    /// Chords as 0-based `(left, right)` pairs, sorted by left endpoint.
    pub fn chords(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(p, &q)| q > p)
            .map(|(p, &q)| (p, q))
            .collect()
    }

    /// Chords as 1-based pairs, the canonical external form.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.chords().into_iter().map(|(a, b)| (a + 1, b + 1)).collect()
    }

    /// Chord label of every point.
    pub fn point_labels(&self) -> Vec<usize> {
        let mut label = vec![0; self.partner.len()];
        let mut next = 0;
        for p in 0..self.partner.len() {
            let q = self.partner[p];
            if q > p {
                label[p] = next;
                label[q] = next;
                next += 1;
            }
        }
        label
    }

    /// Number of crossing pairs, choosing the algorithm by size.
    pub fn crossing_count(&self) -> u64 {
        if self.n() > SWEEP_THRESHOLD {
            self.crossing_count_sweep()
        } else {
            self.crossing_count_naive()
        }
    }

    /// Reference O(n^2) scan over all chord pairs.
    pub fn crossing_count_naive(&self) -> u64 {
        let chords = self.chords();
        let mut count = 0;
        for (i, &(_, b)) in chords.iter().enumerate() {
            for &(c, d) in &chords[i + 1..] {
                // c > a since chords are sorted by left endpoint.
                if c < b && b < d {
                    count += 1;
                }
            }
        }
        count
    }

    /// O(n log n) sweep: when a chord closes, every chord opened after it
    /// and still open crosses it.
    pub fn crossing_count_sweep(&self) -> u64 {
        let size = self.partner.len();
        let mut open = Fenwick::new(size);
        let mut open_count = 0i64;
        let mut count = 0u64;
        for p in 0..size {
            let q = self.partner[p];
            if q > p {
                open.add(p, 1);
                open_count += 1;
            } else {
                open.add(q, -1);
                open_count -= 1;
                count += (open_count - open.prefix(q)) as u64;
            }
        }
        count
    }

    /// Crossing pairs as 0-based chord labels `(i, j)` with `i < j`, sorted.
    pub fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        let chords = self.chords();
        let mut pairs = Vec::new();
        for (i, &(_, b)) in chords.iter().enumerate() {
            for (j, &(c, d)) in chords.iter().enumerate().skip(i + 1) {
                if c > b {
                    break;
                }
                if b < d {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    pub fn intersection_graph(&self) -> IntersectionGraph {
        IntersectionGraph::new(self.n(), self.crossing_pairs())
    }

    /// Allocation and intersection sequences of the diagram.
    pub fn encode(&self) -> SequencePair {
        let n = self.n();
        let size = 2 * n;
        let mut y = vec![0usize; n];
        let mut blue_seen = 0usize;
        for p in 0..size {
            if self.partner[p] > p {
                blue_seen += 1;
            } else {
                y[blue_seen - 1] += 1;
            }
        }
        // x_j = #closed chords with right end > a_j  -  #closed chords with left end > a_j,
        // evaluated when chord j closes.
        let labels = self.point_labels();
        let mut x = vec![0usize; n];
        let mut closed_right = Fenwick::new(size);
        let mut closed_left = Fenwick::new(size);
        let mut closed = 0i64;
        for p in 0..size {
            let q = self.partner[p];
            if q < p {
                let a = q;
                let right_after = closed - closed_right.prefix(a + 1);
                let left_after = closed - closed_left.prefix(a + 1);
                x[labels[p]] = (right_after - left_after) as usize;
                closed_right.add(p, 1);
                closed_left.add(a, 1);
                closed += 1;
            }
        }
        SequencePair { y, x }
    }

    /// Cut statistics of the linearized diagram.
    pub fn cut_stats(&self) -> CutStats {
        let n = self.n();
        let mut cut_positions = Vec::new();
        let mut reach = 0usize;
        for p in 0..2 * n {
            reach = reach.max(self.partner[p]);
            // Points 0..=p form the first block when p is odd.
            if p % 2 == 1 && reach == p && p + 1 < 2 * n {
                cut_positions.push((p + 1) / 2);
            }
        }
        let max_cut = cut_positions
            .iter()
            .map(|&n1| n1.min(n - n1))
            .max()
            .unwrap_or(0);
        CutStats {
            cut_count: cut_positions.len(),
            max_cut,
            cut_positions,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.pairs_array()).expect("serializing integers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let pairs: Vec<[usize; 2]> = serde_json::from_str(text)?;
        let pairs: Vec<(usize, usize)> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
        Self::from_pairs(&pairs)
    }

    pub(crate) fn pairs_array(&self) -> Vec<[usize; 2]> {
        self.pairs().into_iter().map(|(a, b)| [a, b]).collect()
    }
}

impl Serialize for ChordDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChordDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[usize; 2]> = Vec::deserialize(d)?;
        let pairs: Vec<(usize, usize)> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
        ChordDiagram::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// Convenience form of [`ChordDiagram::crossing_count`] and
/// [`ChordDiagram::crossing_pairs`].
pub fn crossings(d: &ChordDiagram) -> (u64, Vec<(usize, usize)>) {
    let pairs = d.crossing_pairs();
    (pairs.len() as u64, pairs)
}

/// One vertex per chord; an edge between every crossing pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl IntersectionGraph {
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        IntersectionGraph { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as 0-based `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Edge list as CSV with header `u,v` and 1-based chord labels.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "v"])?;
        for &(u, v) in &self.edges {
            w.write_record([(u + 1).to_string(), (v + 1).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Allocation sequence `y` and intersection sequence `x` of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequencePair {
    pub y: Vec<usize>,
    pub x: Vec<usize>,
}

impl SequencePair {
    pub fn new(y: Vec<usize>, x: Vec<usize>) -> Self {
        SequencePair { y, x }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn crossings(&self) -> u64 {
        self.x.iter().map(|&v| v as u64).sum()
    }

    /// Checks that `y` is an allocation sequence and `x` an inversion sequence.
    fn check_shape(&self) -> Result<()> {
        if self.y.len() != self.x.len() {
            return Err(Error::LengthMismatch { y: self.y.len(), x: self.x.len() });
        }
        let n = self.y.len();
        let mut prefix = 0;
        for (k, &yk) in self.y.iter().enumerate() {
            prefix += yk;
            if k + 1 < n && prefix > k + 1 {
                return Err(Error::ConstraintViolation {
                    index: k + 1,
                    reason: format!("allocation prefix sum {prefix} exceeds {}", k + 1),
                });
            }
        }
        if prefix != n {
            return Err(Error::ConstraintViolation {
                index: n,
                reason: format!("allocation sums to {prefix}, expected {n}"),
            });
        }
        for (j, &xj) in self.x.iter().enumerate() {
            if xj > j {
                return Err(Error::ConstraintViolation {
                    index: j + 1,
                    reason: format!("x = {xj} exceeds {j}"),
                });
            }
        }
        Ok(())
    }

    /// First 1-based index `j` with `x_j > j - 1 - S_{j-1}`, if any.
    fn first_violation(&self) -> Option<usize> {
        let mut before = 0;
        for (j, (&xj, &yj)) in self.x.iter().zip(&self.y).enumerate() {
            if xj + before > j {
                return Some(j + 1);
            }
            before += yj;
        }
        None
    }
}

/// True iff the pair is the encoding of some diagram.
pub fn is_compatible(p: &SequencePair) -> Result<bool> {
    if p.y.len() != p.x.len() {
        return Err(Error::LengthMismatch { y: p.y.len(), x: p.x.len() });
    }
    Ok(p.check_shape().is_ok() && p.first_violation().is_none())
}

/// Rebuilds the unique diagram with the given encoding: blue points are laid
/// out according to `y`, then red points `n, n-1, ..., 1` are dropped into the
/// `(1 + x_j)`-th free red slot to the right of blue `j`.
pub fn decode(p: &SequencePair) -> Result<ChordDiagram> {
    p.check_shape()?;
    if let Some(j) = p.first_violation() {
        let before: usize = p.y[..j - 1].iter().sum();
        return Err(Error::ConstraintViolation {
            index: j,
            reason: format!(
                "x_{j} = {} exceeds j - 1 - S_(j-1) = {}",
                p.x[j - 1],
                (j - 1) as i64 - before as i64
            ),
        });
    }
    let n = p.n();
    let mut blue_pos = vec![0usize; n];
    let mut slot_pos = Vec::with_capacity(n);
    let mut pos = 0;
    for (i, &yi) in p.y.iter().enumerate() {
        blue_pos[i] = pos;
        pos += 1;
        for _ in 0..yi {
            slot_pos.push(pos);
            pos += 1;
        }
    }
    let mut free = Fenwick::new(n);
    for s in 0..n {
        free.add(s, 1);
    }
    let mut partner = vec![0usize; 2 * n];
    let mut slots_before = n;
    for j in (0..n).rev() {
        slots_before -= p.y[j];
        let k = free.prefix(slots_before) + p.x[j] as i64 + 1;
        let slot = free
            .find_kth(k)
            .expect("compatibility guarantees a free slot");
        free.add(slot, -1);
        partner[blue_pos[j]] = slot_pos[slot];
        partner[slot_pos[slot]] = blue_pos[j];
    }
    Ok(ChordDiagram::from_partner_unchecked(partner))
}

/// Cuts of a linearized diagram. A cut at `n1` splits the points into the
/// first `2 n1` and the remaining `2 (n - n1)` with no chord between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutStats {
    pub cut_count: usize,
    pub max_cut: usize,
    pub cut_positions: Vec<usize>,
}
