//! Components of intersection graphs and batch statistics over samples.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{ChordDiagram, IntersectionGraph};
use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::fenwick::Fenwick;

/// One connected component: `nu` chords, `mu` crossings among them, and the
/// sorted 0-based chord labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub nu: usize,
    pub mu: u64,
    pub members: Vec<usize>,
}

impl Component {
    pub fn density(&self) -> f64 {
        self.mu as f64 / self.nu as f64
    }
}

/// Components ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub components: Vec<Component>,
    /// Index of the component with the most chords (earliest on ties).
    pub largest_by_chords: Option<usize>,
    /// Index of the component with the largest `mu / nu`; ties go to the
    /// larger `nu`, then to the earlier component.
    pub densest: Option<usize>,
    pub isolated: usize,
}

impl ComponentSummary {
    fn from_groups(mut components: Vec<Component>) -> Self {
        components.sort_by_key(|c| c.members[0]);
        let mut largest = None::<usize>;
        let mut densest = None::<usize>;
        for (i, c) in components.iter().enumerate() {
            if largest.map_or(true, |l| c.nu > components[l].nu) {
                largest = Some(i);
            }
            let better = match densest {
                None => true,
                Some(d) => {
                    let best = &components[d];
                    // Compare mu/nu exactly by cross-multiplication.
                    let lhs = c.mu as u128 * best.nu as u128;
                    let rhs = best.mu as u128 * c.nu as u128;
                    lhs > rhs || (lhs == rhs && c.nu > best.nu)
                }
            };
            if better {
                densest = Some(i);
            }
        }
        let isolated = components.iter().filter(|c| c.nu == 1).count();
        ComponentSummary { components, largest_by_chords: largest, densest, isolated }
    }

    pub fn n(&self) -> usize {
        self.components.iter().map(|c| c.nu).sum()
    }

    pub fn m(&self) -> u64 {
        self.components.iter().map(|c| c.mu).sum()
    }

    pub fn largest(&self) -> Option<&Component> {
        self.largest_by_chords.map(|i| &self.components[i])
    }

    pub fn densest_component(&self) -> Option<&Component> {
        self.densest.map(|i| &self.components[i])
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    /// `(nu, mu)` of every component, in order.
    pub fn shapes(&self) -> Vec<(usize, u64)> {
        self.components.iter().map(|c| (c.nu, c.mu)).collect()
    }
}

/// Components of an explicit graph.
pub fn components(g: &IntersectionGraph) -> ComponentSummary {
    let n = g.vertex_count();
    let mut dsu = Dsu::new(n);
    for &(u, v) in g.edges() {
        dsu.union(u, v);
    }
    let mut edge_count = vec![0u64; n];
    for &(u, _) in g.edges() {
        let r = dsu.find(u);
        edge_count[r] += 1;
    }
    collect(&mut dsu, n, |root| edge_count[root], None)
}

fn collect(
    dsu: &mut Dsu,
    n: usize,
    mu_of_root: impl Fn(usize) -> u64,
    per_chord_mu: Option<&[u64]>,
) -> ComponentSummary {
    let mut index = vec![usize::MAX; n];
    let mut groups: Vec<Component> = Vec::new();
    for v in 0..n {
        let r = dsu.find(v);
        if index[r] == usize::MAX {
            index[r] = groups.len();
            let mu = if per_chord_mu.is_some() { 0 } else { mu_of_root(r) };
            groups.push(Component { nu: 0, mu, members: Vec::new() });
        }
        let g = &mut groups[index[r]];
        g.nu += 1;
        g.members.push(v);
        if let Some(per) = per_chord_mu {
            g.mu += per[v];
        }
    }
    ComponentSummary::from_groups(groups)
}

struct Block {
    start: usize,
    chord: usize,
    open: usize,
}

/// Components of a diagram's intersection graph in one left-to-right sweep,
/// without listing the crossing pairs.
///
/// Open chords are kept as a stack of blocks: maximal runs, in left-endpoint
/// order, of open chords already known to share a component. A closing chord
/// with left endpoint `q` crosses exactly the open chords opened after `q`,
/// all of which lie in its own block or in the blocks above it.
pub fn component_summary(d: &ChordDiagram) -> ComponentSummary {
    let n = d.n();
    let size = 2 * n;
    let labels = d.point_labels();
    let mut dsu = Dsu::new(n);
    let mut open_tree = Fenwick::new(size);
    let mut open_total = 0i64;
    let mut mu = vec![0u64; n];
    let mut stack: Vec<Block> = Vec::new();
    for p in 0..size {
        let q = d.partner(p);
        let chord = labels[p];
        if q > p {
            open_tree.add(p, 1);
            open_total += 1;
            stack.push(Block { start: p, chord, open: 1 });
            continue;
        }
        open_tree.add(q, -1);
        open_total -= 1;
        mu[chord] = (open_total - open_tree.prefix(q)) as u64;
        let at = stack.partition_point(|b| b.start <= q) - 1;
        while stack.len() > at + 1 {
            let top = stack.pop().expect("nonempty");
            dsu.union(stack[at].chord, top.chord);
            stack[at].open += top.open;
        }
        stack[at].open -= 1;
        if stack[at].open == 0 {
            stack.pop();
        }
    }
    collect(&mut dsu, n, |_| 0, Some(&mu))
}

/// True iff exactly one component has two or more chords. A diagram made
/// only of isolated chords is not monolithic.
pub fn is_monolithic(s: &ComponentSummary) -> bool {
    s.components.iter().filter(|c| c.nu >= 2).count() == 1
}

/// Chord fraction `nu_max / n` and crossing fraction `mu / m` of the
/// largest component.
pub fn giant_stats(s: &ComponentSummary, m: u64) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::Domain("crossing fraction undefined for m = 0".into()));
    }
    let n = s.n();
    let big = s
        .largest()
        .ok_or_else(|| Error::Domain("empty diagram".into()))?;
    Ok((big.nu as f64 / n as f64, big.mu as f64 / m as f64))
}

/// Frequencies of a nonnegative integer statistic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<usize, u64>,
    samples: u64,
}

impl EmpiricalDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: usize) {
        *self.counts.entry(value).or_insert(0) += 1;
        self.samples += 1;
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, value: usize) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    pub fn frequency(&self, value: usize) -> f64 {
        self.count(value) as f64 / self.samples as f64
    }

    pub fn max_value(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    pub fn mean(&self) -> f64 {
        let total: f64 = self.counts.iter().map(|(&v, &c)| v as f64 * c as f64).sum();
        total / self.samples as f64
    }

    /// Total variation distance to `pmf`. Values above the largest observed
    /// one are folded into a single tail bucket holding the remaining mass.
    pub fn tv_distance(&self, pmf: impl Fn(usize) -> f64) -> Result<f64> {
        if self.samples == 0 {
            return Err(Error::Domain("tv distance of an empty sample".into()));
        }
        let top = self.max_value().unwrap_or(0);
        let mut head = 0.0;
        let mut diff = 0.0;
        for j in 0..=top {
            let p = pmf(j);
            head += p;
            diff += (self.frequency(j) - p).abs();
        }
        diff += (1.0 - head).max(0.0);
        Ok((0.5 * diff).clamp(0.0, 1.0))
    }
}

impl FromIterator<usize> for EmpiricalDistribution {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut e = Self::new();
        for v in iter {
            e.add(v);
        }
        e
    }
}

/// Aggregates over a batch of diagrams with the same `(n, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub n: usize,
    pub m: u64,
    pub samples: usize,
    pub mean_chord_fraction: f64,
    pub mean_crossing_fraction: Option<f64>,
    pub largest_component_histogram: BTreeMap<usize, u64>,
    pub cut_histogram: BTreeMap<usize, u64>,
}

/// Per-diagram statistics used by [`summarize_batch`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramStats {
    pub largest_nu: usize,
    pub largest_mu: u64,
    pub crossings: u64,
    pub cuts: usize,
    pub isolated: usize,
    pub connected: bool,
}

pub fn diagram_stats(d: &ChordDiagram) -> DiagramStats {
    let s = component_summary(d);
    let (largest_nu, largest_mu) = s.largest().map_or((0, 0), |c| (c.nu, c.mu));
    DiagramStats {
        largest_nu,
        largest_mu,
        crossings: s.m(),
        cuts: d.cut_stats().cut_count,
        isolated: s.isolated,
        connected: s.is_connected(),
    }
}

/// Summarizes a batch. Per-diagram work runs in parallel; the reduction is
/// sequential in batch order, so results do not depend on the thread count.
pub fn summarize_batch(n: usize, m: u64, diagrams: &[ChordDiagram]) -> BatchSummary {
    let stats: Vec<DiagramStats> = diagrams.par_iter().map(diagram_stats).collect();
    summarize_stats(n, m, &stats)
}

pub fn summarize_stats(n: usize, m: u64, stats: &[DiagramStats]) -> BatchSummary {
    let k = stats.len();
    let mut chord_sum = 0.0;
    let mut cross_sum = 0.0;
    let mut largest_component_histogram = BTreeMap::new();
    let mut cut_histogram = BTreeMap::new();
    for s in stats {
        chord_sum += s.largest_nu as f64 / n.max(1) as f64;
        if m > 0 {
            cross_sum += s.largest_mu as f64 / m as f64;
        }
        *largest_component_histogram.entry(s.largest_nu).or_insert(0) += 1;
        *cut_histogram.entry(s.cuts).or_insert(0) += 1;
    }
    let denom = k.max(1) as f64;
    BatchSummary {
        n,
        m,
        samples: k,
        mean_chord_fraction: chord_sum / denom,
        mean_crossing_fraction: (m > 0).then(|| cross_sum / denom),
        largest_component_histogram,
        cut_histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> ChordDiagram {
        ChordDiagram::from_pairs(&[(1, 4), (2, 5), (3, 6), (7, 9), (8, 10)]).unwrap()
    }

    #[test]
    fn figure_one_components() {
        let d = fig1();
        for s in [components(&d.intersection_graph()), component_summary(&d)] {
            assert_eq!(s.shapes(), vec![(3, 3), (2, 1)]);
            assert_eq!(s.components[1].members, vec![3, 4]);
            assert_eq!(s.densest, Some(0));
            assert_eq!(s.largest_by_chords, Some(0));
            assert_eq!(s.isolated, 0);
            assert!(!is_monolithic(&s));
            let (cf, xf) = giant_stats(&s, 4).unwrap();
            assert!((cf - 0.6).abs() < 1e-12 && (xf - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn edgeless_and_triangle() {
        let g = IntersectionGraph::new(4, vec![]);
        let s = components(&g);
        assert_eq!(s.components.len(), 4);
        assert_eq!(s.isolated, 4);
        assert!(!is_monolithic(&s));
        assert!(giant_stats(&s, 0).is_err());

        let d = ChordDiagram::from_pairs(&[(1, 4), (2, 5), (3, 6)]).unwrap();
        let s = component_summary(&d);
        assert_eq!(s.shapes(), vec![(3, 3)]);
        assert_eq!(giant_stats(&s, 3).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn monolithic_by_shape() {
        let mk = |shapes: &[(usize, u64)]| {
            let mut next = 0;
            let comps = shapes
                .iter()
                .map(|&(nu, mu)| {
                    let members = (next..next + nu).collect();
                    next += nu;
                    Component { nu, mu, members }
                })
                .collect();
            ComponentSummary::from_groups(comps)
        };
        assert!(is_monolithic(&mk(&[(5, 7), (1, 0), (1, 0)])));
        assert!(!is_monolithic(&mk(&[(1, 0)])));
        assert!(!is_monolithic(&mk(&[(3, 3), (2, 1)])));
    }

    #[test]
    fn densest_tie_breaks() {
        let comps = vec![
            Component { nu: 2, mu: 1, members: vec![0, 1] },
            Component { nu: 4, mu: 2, members: vec![2, 3, 4, 5] },
            Component { nu: 4, mu: 2, members: vec![6, 7, 8, 9] },
        ];
        let s = ComponentSummary::from_groups(comps);
        assert_eq!(s.densest, Some(1));
        assert_eq!(s.largest_by_chords, Some(1));
    }

    #[test]
    fn tv_examples() {
        let pmf = |j: usize| [0.25, 0.5, 0.25].get(j).copied().unwrap_or(0.0);
        let exact: EmpiricalDistribution = [0, 1, 1, 2].into_iter().collect();
        assert!(exact.tv_distance(pmf).unwrap().abs() < 1e-12);
        let point: EmpiricalDistribution = [0].into_iter().collect();
        assert!((point.tv_distance(pmf).unwrap() - 0.75).abs() < 1e-12);
        assert!(EmpiricalDistribution::new().tv_distance(pmf).is_err());
    }

    #[test]
    fn batch_summary_json() {
        let d = fig1();
        let s = summarize_batch(5, 4, &[d.clone(), d]);
        assert_eq!(s.samples, 2);
        assert!((s.mean_chord_fraction - 0.6).abs() < 1e-12);
        assert_eq!(s.largest_component_histogram.get(&3), Some(&2));
        assert_eq!(s.cut_histogram.get(&1), Some(&2));
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"mean_crossing_fraction\":0.75"));
    }
}
