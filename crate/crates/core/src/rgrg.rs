//! Nice point clouds, the root growth with re-grafting map, c-decomposability,
//! Poisson sampling, and the c-RGRG.
//!
//! A state is represented structurally: nodes are the birth times of the
//! distinguished points (0, the current time, jump times, cut points), edges
//! carry real lengths and the birth interval they parameterize. Pairwise
//! distances are tree-path sums, exact up to floating addition; zero-length
//! edges realize the identification of a cut point with the root at its
//! re-graft time.
//!
//! Square occupancy uses the half-open convention `[lo, hi)` in both
//! coordinates. Diagonal triangles are indexed from time zero: the `j`-th
//! triangle spans times `[jc, (j+1)c)`, so "no occupied triangle up to `T`"
//! covers `[0, c * floor(T/c))`; the branch lemma needs the triangle at the
//! origin included.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::FiniteRootedMetricSpace;
use crate::stream::StreamId;

#[derive(Error, Debug, PartialEq)]
pub enum RgrgError {
    #[error("point cloud is not nice: {0}")]
    NotNice(String),
    #[error("point ({0}, {1}) outside the triangle 0 < x <= t")]
    OutsideDomain(f64, f64),
    #[error("query {0} outside [0, {1}]")]
    QueryOutsideRange(f64, f64),
    #[error("c must be positive")]
    NonPositiveC,
    #[error("hypotheses unmet: {0}")]
    HypothesesUnmet(String),
}

/// Finite planar point set in the triangle `0 < x <= t`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PointCloud {
    /// Points `(t, x)`, sorted by `t`.
    pts: Vec<(f64, f64)>,
}

impl PointCloud {
    pub fn new(mut pts: Vec<(f64, f64)>) -> Result<Self, RgrgError> {
        for &(t, x) in &pts {
            if !(x > 0.0 && x <= t) || !t.is_finite() {
                return Err(RgrgError::OutsideDomain(t, x));
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(PointCloud { pts })
    }

    pub fn empty() -> Self {
        PointCloud { pts: Vec::new() }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// Niceness: at most one point per vertical and per horizontal line.
    /// Finiteness below any level holds for any finite cloud.
    pub fn is_nice(&self) -> bool {
        for (i, &(t1, x1)) in self.pts.iter().enumerate() {
            for &(t2, x2) in &self.pts[i + 1..] {
                if t1 == t2 || x1 == x2 {
                    return false;
                }
            }
        }
        true
    }
}

/// Jump times with their cut points, truncated at `horizon`: the points of a
/// nice cloud ordered by time.
pub fn jump_times(pi: &PointCloud, horizon: f64) -> Result<Vec<(f64, f64)>, RgrgError> {
    if !pi.is_nice() {
        return Err(RgrgError::NotNice("duplicate vertical or horizontal line".into()));
    }
    Ok(pi
        .pts
        .iter()
        .copied()
        .filter(|&(t, _)| t <= horizon)
        .collect())
}

/// Location of a point of `[0, t]` in the structural tree.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Loc {
    Node(usize),
    /// On interval edge `edge`, at `offset` from the `lo` end.
    Edge { edge: usize, offset: f64 },
}

#[derive(Clone, Debug)]
struct Edge {
    a: usize,
    b: usize,
    /// Birth interval `(lo, hi)` carried by the edge; `lo == hi` for grafts.
    lo: f64,
    hi: f64,
    alive: bool,
}

/// The RGRG state at a fixed time: a rooted real tree over `[0, t]`.
#[derive(Clone, Debug)]
pub struct RgrgState {
    t: f64,
    node_label: Vec<f64>,
    edges: Vec<Edge>,
    root: usize,
    jumps: Vec<(f64, f64)>,
    /// Interval edges sorted by `lo` for point location.
    intervals: Vec<(f64, f64, usize)>,
    /// Node labels sorted, with node index.
    labels: Vec<(f64, usize)>,
    /// All-pairs node distances.
    node_dist: Vec<f64>,
}

impl RgrgState {
    /// Evaluate the RGRG map of a nice cloud at time `t`.
    pub fn build(pi: &PointCloud, t: f64) -> Result<Self, RgrgError> {
        assert!(t >= 0.0);
        let jumps = jump_times(pi, t)?;
        let mut state = Builder::new();
        for &(tau, p) in &jumps {
            state.grow_to(tau);
            state.regraft(p);
        }
        state.grow_to(t);
        Ok(state.finish(t, jumps))
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    /// Sum of all edge lengths; equals `t` up to rounding.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().filter(|e| e.alive).map(|e| e.hi - e.lo).sum()
    }

    fn locate(&self, y: f64) -> Result<Loc, RgrgError> {
        if !(0.0..=self.t).contains(&y) {
            return Err(RgrgError::QueryOutsideRange(y, self.t));
        }
        // exact node hit
        if let Ok(k) = self
            .labels
            .binary_search_by(|probe| probe.0.partial_cmp(&y).unwrap())
        {
            return Ok(Loc::Node(self.labels[k].1));
        }
        let k = self
            .intervals
            .partition_point(|&(lo, _, _)| lo < y)
            .saturating_sub(1);
        let (lo, hi, edge) = self.intervals[k];
        debug_assert!(lo <= y && y <= hi, "locate({y}) found ({lo}, {hi})");
        Ok(Loc::Edge { edge, offset: y - lo })
    }

    #[inline]
    fn ndist(&self, a: usize, b: usize) -> f64 {
        self.node_dist[a * self.node_label.len() + b]
    }

    fn dist_loc(&self, x: Loc, y: Loc) -> f64 {
        match (x, y) {
            (Loc::Node(a), Loc::Node(b)) => self.ndist(a, b),
            (Loc::Node(a), Loc::Edge { edge, offset }) | (Loc::Edge { edge, offset }, Loc::Node(a)) => {
                let e = &self.edges[edge];
                let len = e.hi - e.lo;
                (offset + self.ndist(e.a, a)).min(len - offset + self.ndist(e.b, a))
            }
            (Loc::Edge { edge: e1, offset: o1 }, Loc::Edge { edge: e2, offset: o2 }) => {
                if e1 == e2 {
                    return (o1 - o2).abs();
                }
                let ea = &self.edges[e1];
                let eb = &self.edges[e2];
                let (la, lb) = (ea.hi - ea.lo, eb.hi - eb.lo);
                let mut best = f64::INFINITY;
                for (u, du) in [(ea.a, o1), (ea.b, la - o1)] {
                    for (v, dv) in [(eb.a, o2), (eb.b, lb - o2)] {
                        best = best.min(du + self.ndist(u, v) + dv);
                    }
                }
                best
            }
        }
    }

    /// Distance between two points of `[0, t]` in the state's metric.
    pub fn distance(&self, x: f64, y: f64) -> Result<f64, RgrgError> {
        Ok(self.dist_loc(self.locate(x)?, self.locate(y)?))
    }

    /// Distance from the root (the point labeled `t`).
    pub fn distance_to_root(&self, y: f64) -> Result<f64, RgrgError> {
        Ok(self.dist_loc(Loc::Node(self.root), self.locate(y)?))
    }

    /// Pairwise distances of the queries plus their root distances.
    pub fn evaluate(&self, queries: &[f64]) -> Result<RgrgDistances, RgrgError> {
        let locs: Vec<Loc> = queries
            .iter()
            .map(|&q| self.locate(q))
            .collect::<Result<_, _>>()?;
        let q = queries.len();
        let mut table = vec![0.0; q * q];
        for i in 0..q {
            for j in i + 1..q {
                let d = self.dist_loc(locs[i], locs[j]);
                table[i * q + j] = d;
                table[j * q + i] = d;
            }
        }
        let to_root: Vec<f64> = locs
            .iter()
            .map(|&l| self.dist_loc(Loc::Node(self.root), l))
            .collect();
        Ok(RgrgDistances { queries: queries.to_vec(), table, to_root })
    }

    /// Finite net of the state: all nodes plus grid points at spacing at most
    /// `resolution` inside every interval edge, as a rooted metric space
    /// (root = the point labeled `t`). The net is `resolution/2`-dense.
    pub fn to_net(&self, resolution: f64) -> FiniteRootedMetricSpace {
        assert!(resolution > 0.0);
        let mut points: Vec<f64> = self.labels.iter().map(|&(l, _)| l).collect();
        for &(lo, hi, _) in &self.intervals {
            let span = hi - lo;
            let steps = (span / resolution).ceil() as usize;
            for k in 1..steps {
                points.push(lo + span * k as f64 / steps as f64);
            }
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        let root_pos = points
            .iter()
            .position(|&p| p == self.t)
            .expect("root label present");
        let locs: Vec<Loc> = points.iter().map(|&p| self.locate(p).unwrap()).collect();
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.dist_loc(locs[i], locs[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        FiniteRootedMetricSpace::new(n, d, root_pos).expect("state metric is a metric")
    }

    /// Exact distance from a point to the geodesic arc between two points.
    pub fn distance_to_arc(&self, y: f64, a: f64, b: f64) -> Result<f64, RgrgError> {
        let dya = self.distance(y, a)?;
        let dyb = self.distance(y, b)?;
        let dab = self.distance(a, b)?;
        Ok(((dya + dyb - dab) / 2.0).max(0.0))
    }
}

/// Result of evaluating an RGRG state on query points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RgrgDistances {
    pub queries: Vec<f64>,
    /// Row-major `q x q` pairwise table.
    pub table: Vec<f64>,
    pub to_root: Vec<f64>,
}

struct Builder {
    node_label: Vec<f64>,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    root: usize,
    tip_label: f64,
}

impl Builder {
    fn new() -> Self {
        Builder {
            node_label: vec![0.0],
            adj: vec![Vec::new()],
            edges: Vec::new(),
            root: 0,
            tip_label: 0.0,
        }
    }

    fn add_node(&mut self, label: f64) -> usize {
        self.node_label.push(label);
        self.adj.push(Vec::new());
        self.node_label.len() - 1
    }

    fn add_edge(&mut self, a: usize, b: usize, lo: f64, hi: f64) {
        let id = self.edges.len();
        self.edges.push(Edge { a, b, lo, hi, alive: true });
        self.adj[a].push(id);
        self.adj[b].push(id);
    }

    fn remove_edge(&mut self, id: usize) {
        self.edges[id].alive = false;
        let (a, b) = (self.edges[id].a, self.edges[id].b);
        self.adj[a].retain(|&e| e != id);
        self.adj[b].retain(|&e| e != id);
    }

    /// Extend the root edge to `new_time` (root growth).
    fn grow_to(&mut self, new_time: f64) {
        if new_time > self.tip_label {
            let tip = self.add_node(new_time);
            self.add_edge(self.root, tip, self.tip_label, new_time);
            self.root = tip;
            self.tip_label = new_time;
        }
    }

    /// Node at birth position `p`, splitting an interval edge if needed.
    fn node_at(&mut self, p: f64) -> usize {
        if let Some(i) = self.node_label.iter().position(|&l| l == p) {
            return i;
        }
        let edge_id = self
            .edges
            .iter()
            .position(|e| e.alive && e.lo < p && p < e.hi)
            .expect("point lies on some interval edge");
        let Edge { a, b, lo, hi, .. } = self.edges[edge_id];
        self.remove_edge(edge_id);
        let mid = self.add_node(p);
        self.add_edge(a, mid, lo, p);
        self.add_edge(mid, b, p, hi);
        mid
    }

    /// Prune the subtree above `p` and identify `p` with the current root.
    ///
    /// The root-side edge at `p` is not deleted: the birth points it carries
    /// stay in the root component. Its `p`-endpoint is detached onto a fresh
    /// unlabeled stub leaf (the boundary point the cut leaves behind), and a
    /// zero-length graft edge identifies `p` with the root.
    fn regraft(&mut self, p: f64) {
        if p == self.tip_label {
            // cutting at the root re-attaches the whole tree: a no-op
            return;
        }
        let pn = self.node_at(p);
        let parent_edge = self.path_edge_toward(pn, self.root);
        let stub = self.add_node(f64::NAN);
        let e = &mut self.edges[parent_edge];
        if e.a == pn {
            e.a = stub;
        } else {
            e.b = stub;
        }
        self.adj[pn].retain(|&id| id != parent_edge);
        self.adj[stub].push(parent_edge);
        self.add_edge(pn, self.root, self.tip_label, self.tip_label);
    }

    /// The incident edge of `from` on the unique path to `to`.
    fn path_edge_toward(&self, from: usize, to: usize) -> usize {
        // DFS from `to`, recording the edge used to reach each node
        let n = self.node_label.len();
        let mut via = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut stack = vec![to];
        seen[to] = true;
        while let Some(u) = stack.pop() {
            if u == from {
                break;
            }
            for &e in &self.adj[u] {
                let edge = &self.edges[e];
                let w = if edge.a == u { edge.b } else { edge.a };
                if !seen[w] {
                    seen[w] = true;
                    via[w] = e;
                    stack.push(w);
                }
            }
        }
        assert!(via[from] != usize::MAX, "tree is connected");
        via[from]
    }

    fn finish(self, t: f64, jumps: Vec<(f64, f64)>) -> RgrgState {
        let n = self.node_label.len();
        // compacted live-edge views
        let mut intervals: Vec<(f64, f64, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.alive && e.hi > e.lo)
            .map(|(i, e)| (e.lo, e.hi, i))
            .collect();
        intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // stub leaves carry no birth label and are not locatable
        let mut labels: Vec<(f64, usize)> = self
            .node_label
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_finite())
            .map(|(i, &l)| (l, i))
            .collect();
        labels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // all-pairs node distances by per-source DFS over the tree
        let mut node_dist = vec![f64::INFINITY; n * n];
        for s in 0..n {
            let row = &mut node_dist[s * n..(s + 1) * n];
            row[s] = 0.0;
            let mut stack = vec![s];
            let mut seen = vec![false; n];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    let w = if edge.a == u { edge.b } else { edge.a };
                    if !seen[w] {
                        seen[w] = true;
                        row[w] = row[u] + (edge.hi - edge.lo);
                        stack.push(w);
                    }
                }
            }
        }
        RgrgState {
            t,
            node_label: self.node_label,
            edges: self.edges,
            root: self.root,
            jumps,
            intervals,
            labels,
            node_dist,
        }
    }
}

/// Evaluate the RGRG map on query points directly.
pub fn rgrg_evaluate(
    pi: &PointCloud,
    t: f64,
    queries: &[f64],
) -> Result<RgrgDistances, RgrgError> {
    RgrgState::build(pi, t)?.evaluate(queries)
}

/// Square `B^c_{(i,j)}`: `x in [(j-1)c, jc)`, `y in [(i-1)c, ic)` with
/// 1-based `i < j`; `x` is the time coordinate, `y` the cut coordinate.
pub fn square_contains(c: f64, i: usize, j: usize, pt: (f64, f64)) -> bool {
    let (t, x) = pt;
    let (jl, jh) = ((j - 1) as f64 * c, j as f64 * c);
    let (il, ih) = ((i - 1) as f64 * c, i as f64 * c);
    jl <= t && t < jh && il <= x && x < ih
}

/// Occupancy indicator `Z^{pi,c}_{(i,j)}`.
pub fn cloud_indicator(pi: &PointCloud, c: f64, i: usize, j: usize) -> bool {
    pi.pts.iter().any(|&p| square_contains(c, i, j, p))
}

/// Verdict for the decomposability horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SigmaBound {
    /// Horizon shorter than `3c`: the definition does not apply.
    NotApplicable,
    /// First grid violation at this time; the cloud is decomposable strictly
    /// below it.
    Value(f64),
    /// No violation up to the inspected horizon.
    BeyondHorizon,
}

impl SigmaBound {
    /// Numeric freeze point used by the c-RGRG: `min(t, sigma)`.
    pub fn freeze(self, t: f64) -> f64 {
        match self {
            SigmaBound::Value(s) => t.min(s),
            _ => t,
        }
    }
}

/// Counts of the four decomposability violations up to time `T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CDecompReport {
    /// Squares holding two or more points.
    pub crowded_squares: u32,
    /// Occupied diagonal triangles.
    pub occupied_triangles: u32,
    /// Occupied square pairs sharing a time column.
    pub repeated_rows: u32,
    /// Occupied square pairs sharing a cut row.
    pub repeated_columns: u32,
    pub sigma: SigmaBound,
}

impl CDecompReport {
    pub fn is_decomposable(&self) -> bool {
        self.crowded_squares == 0
            && self.occupied_triangles == 0
            && self.repeated_rows == 0
            && self.repeated_columns == 0
    }
}

fn counts_at(pi: &PointCloud, c: f64, k: usize) -> (u32, u32, u32, u32) {
    let mut per_square = std::collections::HashMap::<(usize, usize), u32>::new();
    let mut per_triangle = vec![0u32; k];
    for &(t, x) in &pi.pts {
        let j = (t / c).floor() as usize + 1; // 1-based time column
        let i = (x / c).floor() as usize + 1;
        if i < j && j <= k {
            *per_square.entry((i, j)).or_default() += 1;
        }
        // triangle index from zero: times [jc, (j+1)c), cuts >= jc
        let tri = (t / c).floor() as usize;
        if tri < k && x >= tri as f64 * c {
            per_triangle[tri] += 1;
        }
    }
    let crowded = per_square.values().filter(|&&n| n >= 2).count() as u32;
    let triangles = per_triangle.iter().filter(|&&n| n >= 1).count() as u32;
    let mut rows = 0u32;
    let mut cols = 0u32;
    let occupied: Vec<(usize, usize)> = per_square.keys().copied().collect();
    for (a, &(i1, j1)) in occupied.iter().enumerate() {
        for &(i2, j2) in &occupied[a + 1..] {
            if j1 == j2 && i1 != i2 {
                rows += 1;
            }
            if i1 == i2 && j1 != j2 {
                cols += 1;
            }
        }
    }
    (crowded, triangles, rows, cols)
}

/// Decomposability counts at horizon `T` and the grid value of
/// `sigma^{pi,c}` scanned up to that horizon.
pub fn check_c_decomposable(pi: &PointCloud, c: f64, horizon: f64) -> Result<CDecompReport, RgrgError> {
    if c <= 0.0 {
        return Err(RgrgError::NonPositiveC);
    }
    let k = (horizon / c).floor() as usize;
    let (n1, n2, m1, m2) = counts_at(pi, c, k);
    let sigma = if k < 3 {
        SigmaBound::NotApplicable
    } else {
        // counts are monotone in the horizon: scan for the first failure
        let mut first_bad = None;
        for j in 1..=k {
            let (a, b, r, s) = counts_at(pi, c, j);
            if a + b + r + s > 0 {
                first_bad = Some(j);
                break;
            }
        }
        match first_bad {
            Some(j) => SigmaBound::Value(j as f64 * c),
            None => SigmaBound::BeyondHorizon,
        }
    };
    Ok(CDecompReport {
        crowded_squares: n1,
        occupied_triangles: n2,
        repeated_rows: m1,
        repeated_columns: m2,
        sigma,
    })
}

/// Poisson cloud with Lebesgue intensity on the triangle `{0 < x <= t <= T}`.
pub fn sample_poisson_cloud(horizon: f64, stream: StreamId) -> PointCloud {
    assert!(horizon > 0.0);
    let mut rng = stream.rng();
    let area = horizon * horizon / 2.0;
    let count = Poisson::new(area).expect("positive area").sample(&mut rng) as usize;
    let mut pts = Vec::with_capacity(count);
    for _ in 0..count {
        let t = horizon * rng.gen::<f64>().sqrt();
        let mut x = t * rng.gen::<f64>();
        while x == 0.0 {
            x = t * rng.gen::<f64>();
        }
        pts.push((t, x));
    }
    PointCloud::new(pts).expect("sampled points lie in the domain")
}

/// Poisson cloud on `{0 < x <= t <= horizon}` conditioned on the square
/// occupancy pattern for `1 <= i < j <= k`: squares in `pattern` hold at
/// least one point, all other squares in that index range hold none.
pub fn sample_poisson_cloud_conditioned(
    c: f64,
    k: usize,
    pattern: &[(usize, usize)],
    horizon: f64,
    stream: StreamId,
) -> Result<PointCloud, RgrgError> {
    if c <= 0.0 {
        return Err(RgrgError::NonPositiveC);
    }
    for &(i, j) in pattern {
        if !(1 <= i && i < j && j <= k) {
            return Err(RgrgError::HypothesesUnmet(format!("bad pattern index ({i}, {j})")));
        }
    }
    assert!(horizon >= k as f64 * c);
    let mut rng = stream.rng();
    // free region: thin out every constrained square from an unconditioned cloud
    let free = sample_poisson_cloud(horizon, stream.substream(0x9e3779));
    let mut pts: Vec<(f64, f64)> = free
        .points()
        .iter()
        .copied()
        .filter(|&(t, x)| {
            let j = (t / c).floor() as usize + 1;
            let i = (x / c).floor() as usize + 1;
            !(i < j && j <= k)
        })
        .collect();
    // conditioned squares: Poisson(c^2) given >= 1, points uniform
    for &(i, j) in pattern {
        let lambda = c * c;
        let n = loop {
            let draw = Poisson::new(lambda).unwrap().sample(&mut rng) as usize;
            if draw >= 1 {
                break draw;
            }
        };
        for _ in 0..n {
            let t = (j - 1) as f64 * c + c * rng.gen::<f64>();
            let x = (i - 1) as f64 * c + c * rng.gen::<f64>();
            pts.push((t, x));
        }
    }
    PointCloud::new(pts)
}

/// The c-RGRG: the RGRG map evaluated at `t` clipped by the decomposability
/// horizon `sigma^{pi,c}`.
pub fn c_rgrg(pi: &PointCloud, c: f64, t: f64) -> Result<(RgrgState, SigmaBound), RgrgError> {
    let report = check_c_decomposable(pi, c, t)?;
    let freeze = report.sigma.freeze(t);
    Ok((RgrgState::build(pi, freeze)?, report.sigma))
}

/// A path phase of the c-RGRG between matched long jumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// Closed interval of birth times, `None` when degenerate.
    pub interval: Option<(f64, f64)>,
    pub length: f64,
}

/// Branch decomposition of `RGRG(kc)` under a pairwise-distinct indicator
/// pattern: branch `m` spans `[i'_m c, (i'_{m+1} - 1) c]` (empty when the
/// indices are consecutive), with `i'_0 = 0` and `i'_{2n+1} = k + 1`.
pub fn branch_decomposition(
    pi: &PointCloud,
    c: f64,
    k: usize,
    pattern: &[(usize, usize)],
) -> Result<Vec<Branch>, RgrgError> {
    if c <= 0.0 {
        return Err(RgrgError::NonPositiveC);
    }
    // hypotheses: pattern indices are distinct and within range, the actual
    // indicators match the pattern, the cloud is decomposable up to kc
    let mut used = std::collections::HashSet::new();
    for &(i, j) in pattern {
        if !(1 <= i && i < j && j <= k) {
            return Err(RgrgError::HypothesesUnmet(format!("bad pair ({i}, {j})")));
        }
        if !used.insert(i) || !used.insert(j) {
            return Err(RgrgError::HypothesesUnmet("pattern indices repeat".into()));
        }
    }
    for i in 1..=k {
        for j in i + 1..=k {
            let expected = pattern.contains(&(i, j));
            if cloud_indicator(pi, c, i, j) != expected {
                return Err(RgrgError::HypothesesUnmet(format!(
                    "indicator at ({i}, {j}) does not match the pattern"
                )));
            }
        }
    }
    let (n1, n2, m1, m2) = counts_at(pi, c, k);
    if n1 + n2 + m1 + m2 > 0 {
        return Err(RgrgError::HypothesesUnmet(
            "cloud is not c-decomposable up to kc".into(),
        ));
    }
    let mut cuts: Vec<usize> = pattern.iter().flat_map(|&(i, j)| [i, j]).collect();
    cuts.sort_unstable();
    let mut bounds = vec![0usize];
    bounds.extend(cuts);
    bounds.push(k + 1);
    let mut out = Vec::new();
    for w in bounds.windows(2) {
        let (im, im1) = (w[0], w[1]);
        if im1 <= im + 1 {
            out.push(Branch { interval: None, length: 0.0 });
        } else {
            let lo = im as f64 * c;
            let hi = (im1 - 1) as f64 * c;
            out.push(Branch { interval: Some((lo, hi)), length: hi - lo });
        }
    }
    Ok(out)
}

/// Lower bound on the Hausdorff distance between the full state and the
/// union of branches, by an exhaustive grid sweep (the sweep never
/// overestimates; grid spacing bounds the blind spot).
pub fn hausdorff_to_branches(
    state: &RgrgState,
    branches: &[Branch],
    grid: usize,
) -> Result<f64, RgrgError> {
    let arcs: Vec<(f64, f64)> = branches.iter().filter_map(|b| b.interval).collect();
    if arcs.is_empty() {
        return Err(RgrgError::HypothesesUnmet("no nonempty branch".into()));
    }
    let t = state.time();
    let mut sup = 0.0f64;
    for g in 0..=grid {
        let y = t * g as f64 / grid as f64;
        let mut dist = f64::INFINITY;
        for &(a, b) in &arcs {
            dist = dist.min(state.distance_to_arc(y, a, b)?);
            if dist == 0.0 {
                break;
            }
        }
        sup = sup.max(dist);
    }
    Ok(sup)
}
