//! Regular-graph models and exact kernel/matrix utilities for small instances.
//!
//! Vertices are `0..vertex_count`. Tori use the row-major mixed-radix
//! encoding: the vertex with coordinates `(x_0, ..., x_{d-1})` on `Z_N^d` has
//! id `x_0 * N^{d-1} + x_1 * N^{d-2} + ... + x_{d-1}`. Neighbor order is
//! stable and documented: for dimension `i` in increasing order, first the
//! `-1` then the `+1` displacement, so `neighbor(v, 2*i)` decrements and
//! `neighbor(v, 2*i + 1)` increments coordinate `i`. Explicit graphs keep
//! their adjacency lists sorted. Path fixtures and hashes depend on this
//! order; do not change it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, PartialEq)]
pub enum GraphError {
    #[error("torus side must be at least 3 to stay simple, got {0}")]
    TorusSideTooSmall(u32),
    #[error("torus dimension must be positive")]
    TorusDimZero,
    #[error("complete graph needs at least 2 vertices, got {0}")]
    CompleteTooSmall(u32),
    #[error("cycle needs at least 3 vertices, got {0}")]
    CycleTooSmall(u32),
    #[error("explicit adjacency is not simple: {0}")]
    NotSimple(String),
    #[error("explicit adjacency is not regular: vertex {vertex} has degree {got}, expected {expected}")]
    NotRegular { vertex: usize, got: usize, expected: usize },
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph has {0} vertices; at least 2 required")]
    TooFewVertices(usize),
    #[error("vertex count {got} exceeds dense-kernel guard {guard}")]
    DenseGuardExceeded { got: usize, guard: usize },
    #[error("mixing time did not converge within {0} steps")]
    MixingCapExceeded(usize),
}

/// Flavor of regular graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GraphKind {
    /// `Z_N^d` with side `N >= 3`; degree `2d`.
    Torus { side: u32, dim: u32 },
    /// Complete graph on `m >= 2` vertices; degree `m - 1`.
    Complete { m: u32 },
    /// Cycle on `n >= 3` vertices; degree 2.
    Cycle { n: u32 },
    /// Explicit adjacency lists (validated simple, connected, regular).
    Explicit { adjacency: Vec<Vec<u32>> },
}

/// A finite simple connected regular graph with O(degree) neighbor access.
#[derive(Clone, Debug)]
pub struct RegularGraph {
    kind: GraphKind,
    vertex_count: usize,
    degree: usize,
    /// `side^k` for `k = 0..=dim`, most-significant first radix helpers (torus only).
    pows: Vec<u64>,
}

impl RegularGraph {
    pub fn build(kind: GraphKind) -> Result<Self, GraphError> {
        match &kind {
            GraphKind::Torus { side, dim } => {
                let (side, dim) = (*side, *dim);
                if dim == 0 {
                    return Err(GraphError::TorusDimZero);
                }
                if side < 3 {
                    return Err(GraphError::TorusSideTooSmall(side));
                }
                let d = dim as usize;
                let mut pows = vec![1u64; d + 1];
                for k in 1..=d {
                    pows[k] = pows[k - 1] * u64::from(side);
                }
                let n = pows[d] as usize;
                Ok(RegularGraph { kind, vertex_count: n, degree: 2 * d, pows })
            }
            GraphKind::Complete { m } => {
                let m = *m;
                if m < 2 {
                    return Err(GraphError::CompleteTooSmall(m));
                }
                Ok(RegularGraph {
                    kind,
                    vertex_count: m as usize,
                    degree: m as usize - 1,
                    pows: Vec::new(),
                })
            }
            GraphKind::Cycle { n } => {
                let n = *n;
                if n < 3 {
                    return Err(GraphError::CycleTooSmall(n));
                }
                Ok(RegularGraph { kind, vertex_count: n as usize, degree: 2, pows: Vec::new() })
            }
            GraphKind::Explicit { adjacency } => {
                let n = adjacency.len();
                if n < 2 {
                    return Err(GraphError::TooFewVertices(n));
                }
                let degree = adjacency[0].len();
                let mut adj = adjacency.clone();
                for (v, list) in adj.iter_mut().enumerate() {
                    list.sort_unstable();
                    if list.len() != degree {
                        return Err(GraphError::NotRegular {
                            vertex: v,
                            got: list.len(),
                            expected: degree,
                        });
                    }
                    for w in list.windows(2) {
                        if w[0] == w[1] {
                            return Err(GraphError::NotSimple(format!(
                                "duplicate edge {{{v}, {}}}",
                                w[0]
                            )));
                        }
                    }
                    if list.iter().any(|&u| u as usize == v) {
                        return Err(GraphError::NotSimple(format!("self-edge at {v}")));
                    }
                    if list.iter().any(|&u| u as usize >= n) {
                        return Err(GraphError::NotSimple(format!("out-of-range neighbor at {v}")));
                    }
                }
                for (v, list) in adj.iter().enumerate() {
                    for &u in list {
                        if !adj[u as usize].binary_search(&(v as u32)).is_ok() {
                            return Err(GraphError::NotSimple(format!(
                                "edge {{{v}, {u}}} not symmetric"
                            )));
                        }
                    }
                }
                // connectivity
                let mut seen = vec![false; n];
                let mut stack = vec![0usize];
                seen[0] = true;
                let mut count = 1;
                while let Some(v) = stack.pop() {
                    for &u in &adj[v] {
                        if !seen[u as usize] {
                            seen[u as usize] = true;
                            count += 1;
                            stack.push(u as usize);
                        }
                    }
                }
                if count != n {
                    return Err(GraphError::NotConnected);
                }
                Ok(RegularGraph {
                    kind: GraphKind::Explicit { adjacency: adj },
                    vertex_count: n,
                    degree,
                    pows: Vec::new(),
                })
            }
        }
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `k`-th neighbor of `v` in the stable encoding order, `k < degree`.
    #[inline]
    pub fn neighbor(&self, v: u32, k: usize) -> u32 {
        debug_assert!(k < self.degree);
        match &self.kind {
            GraphKind::Torus { side, .. } => {
                let side = u64::from(*side);
                let dim_idx = k / 2;
                let up = k % 2 == 1;
                // coordinate i has radix weight pows[d - 1 - i]
                let w = self.pows[self.pows.len() - 2 - dim_idx];
                let coord = (u64::from(v) / w) % side;
                let new_coord = if up {
                    if coord + 1 == side { 0 } else { coord + 1 }
                } else if coord == 0 {
                    side - 1
                } else {
                    coord - 1
                };
                (u64::from(v) - coord * w + new_coord * w) as u32
            }
            GraphKind::Complete { .. } => {
                if (k as u32) < v { k as u32 } else { k as u32 + 1 }
            }
            GraphKind::Cycle { n } => {
                let n = *n;
                if k == 0 {
                    if v == 0 { n - 1 } else { v - 1 }
                } else if v + 1 == n {
                    0
                } else {
                    v + 1
                }
            }
            GraphKind::Explicit { adjacency } => adjacency[v as usize][k],
        }
    }

    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        (0..self.degree).map(|k| self.neighbor(v, k)).collect()
    }

    pub fn are_adjacent(&self, v: u32, u: u32) -> bool {
        if v == u {
            return false;
        }
        match &self.kind {
            GraphKind::Complete { .. } => true,
            GraphKind::Explicit { adjacency } => adjacency[v as usize].binary_search(&u).is_ok(),
            _ => (0..self.degree).any(|k| self.neighbor(v, k) == u),
        }
    }

    /// Torus coordinates of `v` (most-significant coordinate first).
    pub fn torus_coords(&self, v: u32) -> Option<Vec<u32>> {
        match &self.kind {
            GraphKind::Torus { side, dim } => {
                let mut out = Vec::with_capacity(*dim as usize);
                let mut x = u64::from(v);
                for k in (0..*dim as usize).rev() {
                    out.push((x / self.pows[k]) as u32);
                    x %= self.pows[k];
                }
                let _ = side;
                Some(out)
            }
            _ => None,
        }
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count as u32 {
            for k in 0..self.degree {
                let u = self.neighbor(v, k);
                if v < u {
                    out.push((v, u));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Default guard on dense-kernel vertex counts.
pub const DENSE_KERNEL_GUARD: usize = 20_000;

/// Dense one-step transition table of the lazy walk, row-major.
#[derive(Clone, Debug)]
pub struct DenseKernel {
    n: usize,
    p: Vec<f64>,
}

impl DenseKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.n + y]
    }

    pub fn multiply(&self, other: &DenseKernel) -> DenseKernel {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let row = &self.p[i * n..(i + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let brow = &other.p[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow.iter()) {
                    *o += a * b;
                }
            }
        }
        DenseKernel { n, p: out }
    }

    pub fn identity(n: usize) -> DenseKernel {
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            p[i * n + i] = 1.0;
        }
        DenseKernel { n, p }
    }

    pub fn power(&self, mut e: usize) -> DenseKernel {
        let mut result = DenseKernel::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.multiply(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base);
            }
        }
        result
    }

    /// One step of a distribution: `mu * P`.
    pub fn step_distribution(&self, mu: &[f64]) -> Vec<f64> {
        assert_eq!(mu.len(), self.n);
        let n = self.n;
        let mut out = vec![0.0; n];
        for (x, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let row = &self.p[x * n..(x + 1) * n];
            for (o, &p) in out.iter_mut().zip(row.iter()) {
                *o += m * p;
            }
        }
        out
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.p[x * self.n..(x + 1) * self.n]
    }
}

/// Lazy-walk kernel: `P(x,x) = 1/2`, `P(x,y) = 1/(2 deg)` for neighbors.
pub fn lazy_kernel(g: &RegularGraph) -> Result<DenseKernel, GraphError> {
    lazy_kernel_guarded(g, DENSE_KERNEL_GUARD)
}

pub fn lazy_kernel_guarded(g: &RegularGraph, guard: usize) -> Result<DenseKernel, GraphError> {
    let n = g.vertex_count();
    if n > guard {
        return Err(GraphError::DenseGuardExceeded { got: n, guard });
    }
    let mut p = vec![0.0; n * n];
    let off = 0.5 / g.degree() as f64;
    for v in 0..n {
        p[v * n + v] = 0.5;
        for k in 0..g.degree() {
            let u = g.neighbor(v as u32, k) as usize;
            p[v * n + u] += off;
        }
    }
    Ok(DenseKernel { n, p })
}

/// Uniform stationary distribution of the lazy walk on a regular graph.
pub fn stationary_distribution(g: &RegularGraph) -> Vec<f64> {
    vec![1.0 / g.vertex_count() as f64; g.vertex_count()]
}

/// Mixing-time criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MixingVariant {
    /// `max_{x,y} |P^n(x,y)/pi(y) - 1| <= eps` (uniform / l-infinity).
    UniformLinf { eps: f64 },
    /// `max_x (1/2) sum_y |P^n(x,y) - pi(y)| <= eps` (total variation / l1).
    L1 { eps: f64 },
}

/// Smallest `n` such that the criterion holds. The lazy kernel is positive
/// semidefinite, so both criteria are monotone in `n` and a forward scan with
/// a cap is exact.
pub fn mixing_time(
    g: &RegularGraph,
    variant: MixingVariant,
    max_steps: usize,
) -> Result<usize, GraphError> {
    let kernel = lazy_kernel(g)?;
    mixing_time_of_kernel(&kernel, variant, max_steps)
}

pub fn mixing_time_of_kernel(
    kernel: &DenseKernel,
    variant: MixingVariant,
    max_steps: usize,
) -> Result<usize, GraphError> {
    let n = kernel.n();
    let pi = 1.0 / n as f64;
    let mut pn = DenseKernel::identity(n);
    for step in 0..=max_steps {
        let ok = match variant {
            MixingVariant::UniformLinf { eps } => (0..n).all(|x| {
                pn.row(x).iter().all(|&p| (p / pi - 1.0).abs() <= eps)
            }),
            MixingVariant::L1 { eps } => (0..n).all(|x| {
                0.5 * pn.row(x).iter().map(|&p| (p - pi).abs()).sum::<f64>() <= eps
            }),
        };
        if ok {
            return Ok(step);
        }
        if step < max_steps {
            pn = pn.multiply(kernel);
        }
    }
    Err(GraphError::MixingCapExceeded(max_steps))
}

/// `t_mix`: the uniform mixing time at `eps = 1/4`.
pub fn t_mix(g: &RegularGraph, max_steps: usize) -> Result<usize, GraphError> {
    mixing_time(g, MixingVariant::UniformLinf { eps: 0.25 }, max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(side: u32, dim: u32) -> RegularGraph {
        RegularGraph::build(GraphKind::Torus { side, dim }).unwrap()
    }

    fn complete(m: u32) -> RegularGraph {
        RegularGraph::build(GraphKind::Complete { m }).unwrap()
    }

    #[test]
    fn triangle_counts() {
        let g = complete(3);
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.degree(), 2);
    }

    #[test]
    fn torus_4_2_counts() {
        let g = torus(4, 2);
        assert_eq!(g.vertex_count(), 16);
        assert_eq!(g.degree(), 4);
    }

    #[test]
    fn torus_side_2_rejected() {
        assert_eq!(
            RegularGraph::build(GraphKind::Torus { side: 2, dim: 5 }).unwrap_err(),
            GraphError::TorusSideTooSmall(2)
        );
    }

    #[test]
    fn complete_1_rejected() {
        assert!(RegularGraph::build(GraphKind::Complete { m: 1 }).is_err());
    }

    #[test]
    fn degenerate_adjacency_rejected() {
        // self-edge
        let bad = GraphKind::Explicit { adjacency: vec![vec![0, 1], vec![0, 0]] };
        assert!(RegularGraph::build(bad).is_err());
        // disconnected 2-regular graph: two triangles
        let two_triangles = GraphKind::Explicit {
            adjacency: vec![
                vec![1, 2],
                vec![0, 2],
                vec![0, 1],
                vec![4, 5],
                vec![3, 5],
                vec![3, 4],
            ],
        };
        assert_eq!(
            RegularGraph::build(two_triangles).unwrap_err(),
            GraphError::NotConnected
        );
    }

    #[test]
    fn torus_neighbor_order_is_documented_encoding() {
        let g = torus(4, 2);
        // vertex (1, 2) has id 1*4 + 2 = 6
        let v = 6u32;
        assert_eq!(g.torus_coords(v).unwrap(), vec![1, 2]);
        // dim 0: -1 -> (0,2)=2, +1 -> (2,2)=10; dim 1: -1 -> (1,1)=5, +1 -> (1,3)=7
        assert_eq!(g.neighbors(v), vec![2, 10, 5, 7]);
    }

    #[test]
    fn kernel_entries() {
        let g = complete(2);
        let k = lazy_kernel(&g).unwrap();
        assert_eq!(k.at(0, 0), 0.5);
        assert_eq!(k.at(0, 1), 0.5);
        let cyc = torus(4, 1);
        let k = lazy_kernel(&cyc).unwrap();
        assert_eq!(k.at(0, 1), 0.25);
        assert_eq!(k.at(0, 0), 0.5);
    }

    #[test]
    fn kernel_rows_sum_to_one_and_symmetric() {
        for g in [torus(3, 3), complete(5), torus(4, 2)] {
            let k = lazy_kernel(&g).unwrap();
            let n = k.n();
            for x in 0..n {
                let s: f64 = k.row(x).iter().sum();
                assert!((s - 1.0).abs() < 1e-14);
                for y in 0..n {
                    assert_eq!(k.at(x, y), k.at(y, x));
                }
            }
        }
    }

    #[test]
    fn stationarity_exact() {
        let g = torus(3, 3);
        let k = lazy_kernel(&g).unwrap();
        let pi = stationary_distribution(&g);
        let pi2 = k.step_distribution(&pi);
        let err = pi
            .iter()
            .zip(pi2.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-14, "stationarity violated by {err}");
    }

    #[test]
    fn uniform_stationary_entries() {
        let g = complete(2);
        assert_eq!(stationary_distribution(&g), vec![0.5, 0.5]);
        let g = torus(4, 2);
        assert!(stationary_distribution(&g).iter().all(|&p| p == 1.0 / 16.0));
    }

    #[test]
    fn mixing_time_complete_2() {
        // P^1 is exactly uniform, P^0 is not: smallest n with |2 P^n(x,y) - 1| <= 1/4 is 1.
        let g = complete(2);
        let t = mixing_time(&g, MixingVariant::UniformLinf { eps: 0.25 }, 100).unwrap();
        assert_eq!(t, 1);
    }

    #[test]
    fn mixing_time_vacuous_at_eps_one() {
        // eps >= 1 makes the l1 criterion vacuous at n = 0.
        for g in [complete(4), torus(3, 2)] {
            let t = mixing_time(&g, MixingVariant::L1 { eps: 1.0 }, 10).unwrap();
            assert_eq!(t, 0);
        }
    }

    #[test]
    fn mixing_sandwich() {
        // t_l1(eps/2) <= t_linf(eps) <= t_l1(eps / #V)
        for g in [complete(4), torus(4, 2), torus(3, 3)] {
            let eps = 0.25;
            let nv = g.vertex_count() as f64;
            let a = mixing_time(&g, MixingVariant::L1 { eps: eps / 2.0 }, 10_000).unwrap();
            let b = mixing_time(&g, MixingVariant::UniformLinf { eps }, 10_000).unwrap();
            let c = mixing_time(&g, MixingVariant::L1 { eps: eps / nv }, 10_000).unwrap();
            assert!(a <= b && b <= c, "sandwich failed: {a} {b} {c}");
        }
    }

    #[test]
    fn mixing_band_holds_past_t_mix() {
        // 3/4 pi <= P^n(x,y) <= 5/4 pi for all n in [t_mix, 4 t_mix]
        let g = torus(4, 2);
        let t = t_mix(&g, 10_000).unwrap();
        let k = lazy_kernel(&g).unwrap();
        let pi = 1.0 / 16.0;
        let mut pn = k.power(t);
        for _ in t..=4 * t {
            for x in 0..16 {
                for y in 0..16 {
                    assert!(pn.at(x, y) >= 0.75 * pi - 1e-15);
                    assert!(pn.at(x, y) <= 1.25 * pi + 1e-15);
                }
            }
            pn = pn.multiply(&k);
        }
    }

    #[test]
    fn reversibility_of_powers() {
        let g = torus(3, 2);
        let k = lazy_kernel(&g).unwrap();
        for n in [1, 2, 5, 9] {
            let pn = k.power(n);
            for x in 0..g.vertex_count() {
                for y in 0..g.vertex_count() {
                    assert!((pn.at(x, y) - pn.at(y, x)).abs() < 1e-14);
                }
            }
        }
    }
}
