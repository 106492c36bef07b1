//! Lazy-walk sampling and path/index-set utilities.
//!
//! Paths are flat vertex-id sequences; index sets are sorted integer vectors
//! or [`Interval`]s, so oracle outputs are byte-comparable.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::graph::RegularGraph;
use crate::stream::StreamId;

#[derive(Error, Debug, PartialEq)]
pub enum WalkError {
    #[error("index {0} out of bounds for path of length {1}")]
    IndexOutOfBounds(usize, usize),
    #[error("vertex {vertex} not visited by time {time}")]
    Unvisited { vertex: u32, time: usize },
}

/// Integer interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Self {
        Interval { lo, hi }
    }

    /// Canonical empty interval.
    pub fn empty() -> Self {
        Interval { lo: 1, hi: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() { 0 } else { self.hi - self.lo + 1 }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        // an inclusive range with lo > hi is already empty
        self.lo..=self.hi
    }

    /// Intersection with another interval.
    pub fn intersect(&self, other: Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }
}

/// A lazy-walk trajectory: vertex sequence `gamma(0..=n)`.
#[derive(Clone, Debug)]
pub struct Path {
    graph: Arc<RegularGraph>,
    verts: Vec<u32>,
}

impl Path {
    pub fn new(graph: Arc<RegularGraph>, verts: Vec<u32>) -> Self {
        assert!(!verts.is_empty(), "a path has at least gamma(0)");
        Path { graph, verts }
    }

    pub fn graph(&self) -> &Arc<RegularGraph> {
        &self.graph
    }

    /// Number of steps `n`; the path visits indices `0..=n`.
    pub fn len_steps(&self) -> usize {
        self.verts.len() - 1
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> u32 {
        self.verts[i]
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts
    }

    pub fn push(&mut self, v: u32) {
        self.verts.push(v);
    }

    /// Every consecutive pair is equal or adjacent.
    pub fn is_legal(&self) -> bool {
        self.verts.windows(2).all(|w| w[0] == w[1] || self.graph.are_adjacent(w[0], w[1]))
    }
}

/// Sample a lazy walk: stay with probability 1/2, else uniform neighbor.
pub fn sample_path(g: &Arc<RegularGraph>, start: u32, steps: usize, stream: StreamId) -> Path {
    let mut rng = stream.rng();
    let mut verts = Vec::with_capacity(steps + 1);
    verts.push(start);
    let deg = g.degree();
    let mut v = start;
    for _ in 0..steps {
        if rng.gen::<bool>() {
            let k = rng.gen_range(0..deg);
            v = g.neighbor(v, k);
        }
        verts.push(v);
    }
    Path::new(g.clone(), verts)
}

/// One lazy step from `v`.
pub fn lazy_step<R: Rng>(g: &RegularGraph, v: u32, rng: &mut R) -> u32 {
    if rng.gen::<bool>() {
        g.neighbor(v, rng.gen_range(0..g.degree()))
    } else {
        v
    }
}

/// Range of the path over an arbitrary index set: sorted distinct vertices.
pub fn range<I: IntoIterator<Item = usize>>(p: &Path, indices: I) -> Result<Vec<u32>, WalkError> {
    let mut out = Vec::new();
    for i in indices {
        if i >= p.verts.len() {
            return Err(WalkError::IndexOutOfBounds(i, p.len_steps()));
        }
        out.push(p.verts[i]);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Range over an interval; `R(empty) = empty`.
pub fn range_interval(p: &Path, iv: Interval) -> Result<Vec<u32>, WalkError> {
    if iv.is_empty() {
        return Ok(Vec::new());
    }
    range(p, iv.lo..=iv.hi)
}

/// `max { k <= n : gamma(k) = x }`.
pub fn last_visit(p: &Path, x: u32, n: usize) -> Result<usize, WalkError> {
    if n >= p.verts.len() {
        return Err(WalkError::IndexOutOfBounds(n, p.len_steps()));
    }
    for k in (0..=n).rev() {
        if p.verts[k] == x {
            return Ok(k);
        }
    }
    Err(WalkError::Unvisited { vertex: x, time: n })
}

/// All loops closing by time `n_max`: pairs `(m1, m2 - m1)` with
/// `gamma(m1) = gamma(m2)`, `m1 < m2 <= n_max`.
pub fn loop_lengths_in_window(p: &Path, n_max: usize) -> Vec<(usize, usize)> {
    let mut visits: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut out = Vec::new();
    for n in 0..=n_max.min(p.len_steps()) {
        let v = p.verts[n];
        let e = visits.entry(v).or_default();
        for &m in e.iter() {
            out.push((m, n - m));
        }
        e.push(n);
    }
    out
}

/// Does the path close any loop of length in `[lo_len, hi_len]` by `n_max`?
/// Windowed scan: for each arrival only visits within `hi_len` steps back are
/// inspected.
pub fn has_loop_with_length_in(p: &Path, lo_len: usize, hi_len: usize, n_max: usize) -> bool {
    first_loop_violation(p, lo_len, hi_len, n_max).is_some()
}

/// First time `n` at which a loop with length in `[lo_len, hi_len]` closes.
pub fn first_loop_violation(
    p: &Path,
    lo_len: usize,
    hi_len: usize,
    n_max: usize,
) -> Option<usize> {
    let mut visits: HashMap<u32, Vec<usize>> = HashMap::new();
    for n in 0..=n_max.min(p.len_steps()) {
        let v = p.verts[n];
        let e = visits.entry(v).or_default();
        for &m in e.iter().rev() {
            let len = n - m;
            if len > hi_len {
                break;
            }
            if len >= lo_len {
                return Some(n);
            }
        }
        e.push(n);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;

    fn torus(side: u32, dim: u32) -> Arc<RegularGraph> {
        Arc::new(RegularGraph::build(GraphKind::Torus { side, dim }).unwrap())
    }

    fn complete(m: u32) -> Arc<RegularGraph> {
        Arc::new(RegularGraph::build(GraphKind::Complete { m }).unwrap())
    }

    #[test]
    fn zero_steps_single_vertex() {
        let g = torus(4, 2);
        let p = sample_path(&g, 3, 0, StreamId::new(1, 0));
        assert_eq!(p.vertices(), &[3]);
        assert!(p.is_legal());
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let g = torus(4, 2);
        let a = sample_path(&g, 0, 100, StreamId::new(9, 4));
        let b = sample_path(&g, 0, 100, StreamId::new(9, 4));
        assert_eq!(a.vertices(), b.vertices());
        let c = sample_path(&g, 0, 100, StreamId::new(9, 5));
        assert_ne!(a.vertices(), c.vertices());
    }

    #[test]
    fn stay_fraction_near_half() {
        // complete(2): each step stays with probability exactly 1/2 (moving to
        // the unique neighbor otherwise); binomial 3-sigma band around 0.5.
        let g = complete(2);
        let steps = 1_000_000;
        let p = sample_path(&g, 0, steps, StreamId::new(2024, 0));
        let stays = p.vertices().windows(2).filter(|w| w[0] == w[1]).count();
        let frac = stays as f64 / steps as f64;
        let sigma = 0.5 / (steps as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * sigma + 1e-12, "stay fraction {frac}");
    }

    #[test]
    fn occupation_near_uniform() {
        let g = torus(4, 2);
        let steps = 100_000;
        let p = sample_path(&g, 5, steps, StreamId::new(7, 1));
        let mut counts = vec![0usize; 16];
        // skip a burn-in of 100 steps before counting occupation
        for i in 100..=steps {
            counts[p.vertex(i) as usize] += 1;
        }
        let total = (steps - 99) as f64;
        let pi = 1.0 / 16.0;
        // CLT band with a generous constant for autocorrelation of the lazy walk
        let sigma = (pi * (1.0 - pi) / total).sqrt() * 6.0;
        for &c in &counts {
            let f = c as f64 / total;
            assert!((f - pi).abs() < 3.0 * sigma + 0.01, "occupation {f} vs {pi}");
        }
    }

    #[test]
    fn sampled_paths_are_legal() {
        for (g, start) in [(torus(3, 3), 13u32), (complete(5), 2u32)] {
            let p = sample_path(&g, start, 2000, StreamId::new(3, 3));
            assert_eq!(p.vertex(0), start);
            assert!(p.is_legal());
        }
    }

    #[test]
    fn range_of_empty_is_empty() {
        let g = complete(3);
        let p = sample_path(&g, 0, 10, StreamId::new(0, 0));
        assert_eq!(range_interval(&p, Interval::empty()).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn range_of_constant_path() {
        let g = complete(3);
        let p = Path::new(g, vec![1, 1, 1, 1]);
        assert_eq!(range_interval(&p, Interval::new(0, 3)).unwrap(), vec![1]);
    }

    #[test]
    fn range_matches_scan_oracle() {
        let g = torus(3, 2);
        for s in 0..20u64 {
            let p = sample_path(&g, 0, 200, StreamId::new(11, s));
            let got = range_interval(&p, Interval::new(0, 200)).unwrap();
            let mut oracle: Vec<u32> = p.vertices().to_vec();
            oracle.sort_unstable();
            oracle.dedup();
            assert_eq!(got, oracle);
        }
    }

    #[test]
    fn range_out_of_bounds() {
        let g = complete(3);
        let p = Path::new(g, vec![0, 1]);
        assert!(range(&p, [0usize, 5]).is_err());
    }

    #[test]
    fn last_visit_basics() {
        let g = complete(3);
        // gamma = (a, b, a) with a = 0, b = 1
        let p = Path::new(g, vec![0, 1, 0]);
        assert_eq!(last_visit(&p, 0, 2).unwrap(), 2);
        assert_eq!(last_visit(&p, 1, 2).unwrap(), 1);
        assert_eq!(
            last_visit(&p, 2, 2).unwrap_err(),
            WalkError::Unvisited { vertex: 2, time: 2 }
        );
    }

    #[test]
    fn last_visit_matches_reverse_scan() {
        let g = torus(3, 2);
        let p = sample_path(&g, 4, 300, StreamId::new(5, 0));
        for n in [50usize, 150, 300] {
            for x in 0..9u32 {
                let oracle = (0..=n).rev().find(|&k| p.vertex(k) == x);
                match (last_visit(&p, x, n), oracle) {
                    (Ok(k), Some(o)) => assert_eq!(k, o),
                    (Err(_), None) => {}
                    other => panic!("mismatch {other:?}"),
                }
            }
        }
    }

    #[test]
    fn loops_of_injective_path_empty() {
        let g = complete(5);
        let p = Path::new(g, vec![0, 1, 2, 3, 4]);
        assert!(loop_lengths_in_window(&p, 4).is_empty());
    }

    #[test]
    fn loop_aba() {
        let g = complete(3);
        let p = Path::new(g, vec![0, 1, 0]);
        assert_eq!(loop_lengths_in_window(&p, 2), vec![(0, 2)]);
    }

    #[test]
    fn loops_match_quadratic_oracle() {
        let g = torus(3, 2);
        for s in 0..10u64 {
            let p = sample_path(&g, 0, 120, StreamId::new(21, s));
            let n_max = 120;
            let mut oracle = Vec::new();
            for m2 in 0..=n_max {
                for m1 in 0..m2 {
                    if p.vertex(m1) == p.vertex(m2) {
                        oracle.push((m1, m2 - m1));
                    }
                }
            }
            let mut got = loop_lengths_in_window(&p, n_max);
            oracle.sort_unstable();
            got.sort_unstable();
            assert_eq!(got, oracle);
            // windowed detector agrees with the oracle on a band
            for (lo, hi) in [(2, 10), (5, 40), (1, 120)] {
                let expected = oracle.iter().any(|&(_, l)| lo <= l && l <= hi);
                assert_eq!(has_loop_with_length_in(&p, lo, hi, n_max), expected);
            }
        }
    }

    #[test]
    fn meeting_identity_exact() {
        // P_{(rho,rho)}(W1(n) = W2(m)) = P_rho(W(n+m) = rho) via kernel powers.
        use crate::graph::lazy_kernel;
        let g = torus(3, 2);
        let k = lazy_kernel(&g).unwrap();
        let rho = 4usize;
        for n in 0..=5usize {
            for m in 0..=5usize {
                let pn = k.power(n);
                let pm = k.power(m);
                let lhs: f64 = (0..g.vertex_count())
                    .map(|x| pn.at(rho, x) * pm.at(rho, x))
                    .sum();
                let rhs = k.power(n + m).at(rho, rho);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }
}
