//! Finite rooted metric spaces, tree validators, correspondences and their
//! distortion, Gromov-Hausdorff and Hausdorff distances.
//!
//! Exact GH is restricted to five points per side: the minimum over
//! correspondences is attained on relations of the form
//! `graph(f) union graph(g)^T` with root-preserving `f: X -> Y`, `g: Y -> X`,
//! which we enumerate exhaustively. Larger instances use the
//! lower/upper sandwich.

use thiserror::Error;

use crate::abchain::RootedTreeGraph;

#[derive(Error, Debug, PartialEq)]
pub enum MetricError {
    #[error("distance table is not a metric: {0}")]
    NotAMetric(String),
    #[error("root index {0} out of range {1}")]
    BadRoot(usize, usize),
    #[error("relation does not project onto {0}")]
    NotACorrespondence(&'static str),
    #[error("correspondence must pair the roots")]
    RootsUnpaired,
    #[error("exact GH guard: sizes {0} and {1} exceed the limit of {2}")]
    ExactGuard(usize, usize, usize),
    #[error("subset is empty")]
    EmptySubset,
    #[error("point index {0} out of range {1}")]
    BadIndex(usize, usize),
}

/// Points, symmetric distance table, and a distinguished root.
#[derive(Clone, Debug)]
pub struct FiniteRootedMetricSpace {
    n: usize,
    d: Vec<f64>,
    root: usize,
}

/// Slack for metric validation.
pub const METRIC_TOL: f64 = 1e-12;
/// Tolerance for the four-point and branch-point scans.
pub const TREE_TOL: f64 = 1e-9;

impl FiniteRootedMetricSpace {
    pub fn new(n: usize, d: Vec<f64>, root: usize) -> Result<Self, MetricError> {
        assert_eq!(d.len(), n * n);
        if root >= n {
            return Err(MetricError::BadRoot(root, n));
        }
        let space = FiniteRootedMetricSpace { n, d, root };
        space.validate()?;
        Ok(space)
    }

    /// Build from a closure over index pairs.
    pub fn from_fn<F: Fn(usize, usize) -> f64>(
        n: usize,
        root: usize,
        f: F,
    ) -> Result<Self, MetricError> {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = f(i, j);
            }
        }
        Self::new(n, d, root)
    }

    fn validate(&self) -> Result<(), MetricError> {
        let n = self.n;
        for i in 0..n {
            if self.at(i, i).abs() > METRIC_TOL {
                return Err(MetricError::NotAMetric(format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                if (self.at(i, j) - self.at(j, i)).abs() > METRIC_TOL {
                    return Err(MetricError::NotAMetric(format!("asymmetry at ({i},{j})")));
                }
                if self.at(i, j) < -METRIC_TOL {
                    return Err(MetricError::NotAMetric(format!("negative d({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.at(i, j) > self.at(i, k) + self.at(k, j) + METRIC_TOL {
                        return Err(MetricError::NotAMetric(format!(
                            "triangle inequality fails at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Maximum distance from the root.
    pub fn root_eccentricity(&self) -> f64 {
        (0..self.n).map(|i| self.at(self.root, i)).fold(0.0, f64::max)
    }
}

/// Four-point condition scan over all quadruples.
pub fn four_point_check(x: &FiniteRootedMetricSpace) -> bool {
    let n = x.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    let lhs = x.at(a, b) + x.at(c, e);
                    let rhs = (x.at(a, c) + x.at(b, e)).max(x.at(a, e) + x.at(b, c));
                    if lhs > rhs + TREE_TOL {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Branch-point condition: every triple has a median among the points.
pub fn branch_point_check(x: &FiniteRootedMetricSpace) -> bool {
    let n = x.len();
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                let found = (0..n).any(|m| {
                    (x.at(a, m) + x.at(m, b) - x.at(a, b)).abs() <= TREE_TOL
                        && (x.at(a, m) + x.at(m, c) - x.at(a, c)).abs() <= TREE_TOL
                        && (x.at(b, m) + x.at(m, c) - x.at(b, c)).abs() <= TREE_TOL
                });
                if !found {
                    return false;
                }
            }
        }
    }
    true
}

/// A relation between two spaces; must pair the roots and project onto both.
#[derive(Clone, Debug)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn validate(
        &self,
        x: &FiniteRootedMetricSpace,
        y: &FiniteRootedMetricSpace,
    ) -> Result<(), MetricError> {
        if !self.pairs.contains(&(x.root(), y.root())) {
            return Err(MetricError::RootsUnpaired);
        }
        for &(i, j) in &self.pairs {
            if i >= x.len() {
                return Err(MetricError::BadIndex(i, x.len()));
            }
            if j >= y.len() {
                return Err(MetricError::BadIndex(j, y.len()));
            }
        }
        let mut seen_x = vec![false; x.len()];
        let mut seen_y = vec![false; y.len()];
        for &(i, j) in &self.pairs {
            seen_x[i] = true;
            seen_y[j] = true;
        }
        if !seen_x.iter().all(|&s| s) {
            return Err(MetricError::NotACorrespondence("the first space"));
        }
        if !seen_y.iter().all(|&s| s) {
            return Err(MetricError::NotACorrespondence("the second space"));
        }
        Ok(())
    }
}

/// `sup |d_X(x,x') - d_Y(y,y')|` over pairs of related points.
pub fn distortion(
    r: &Correspondence,
    x: &FiniteRootedMetricSpace,
    y: &FiniteRootedMetricSpace,
) -> Result<f64, MetricError> {
    r.validate(x, y)?;
    let mut dis = 0.0f64;
    for &(i1, j1) in &r.pairs {
        for &(i2, j2) in &r.pairs {
            dis = dis.max((x.at(i1, i2) - y.at(j1, j2)).abs());
        }
    }
    Ok(dis)
}

/// Guard for exact GH computation.
pub const EXACT_GH_GUARD: usize = 5;

/// Exact pointed GH distance between small spaces: half the minimum
/// distortion over root-preserving function-pair correspondences.
pub fn gh_exact_small(
    x: &FiniteRootedMetricSpace,
    y: &FiniteRootedMetricSpace,
) -> Result<f64, MetricError> {
    let (nx, ny) = (x.len(), y.len());
    if nx > EXACT_GH_GUARD || ny > EXACT_GH_GUARD {
        return Err(MetricError::ExactGuard(nx, ny, EXACT_GH_GUARD));
    }
    // enumerate f: X -> Y with f(root) = root and g: Y -> X with g(root) = root
    let fx: Vec<usize> = (0..nx).filter(|&i| i != x.root()).collect();
    let gy: Vec<usize> = (0..ny).filter(|&j| j != y.root()).collect();
    let mut best = f64::INFINITY;
    let mut f = vec![0usize; nx];
    f[x.root()] = y.root();
    let mut g = vec![0usize; ny];
    g[y.root()] = x.root();
    enumerate_maps(&fx, ny, &mut f, 0, &mut |f| {
        enumerate_maps(&gy, nx, &mut g.clone(), 0, &mut |g| {
            let mut pairs: Vec<(usize, usize)> =
                (0..nx).map(|i| (i, f[i])).collect();
            pairs.extend((0..ny).map(|j| (g[j], j)));
            let mut dis = 0.0f64;
            for &(i1, j1) in &pairs {
                for &(i2, j2) in &pairs {
                    dis = dis.max((x.at(i1, i2) - y.at(j1, j2)).abs());
                }
            }
            best = best.min(dis);
        });
    });
    Ok(best / 2.0)
}

fn enumerate_maps(
    domain: &[usize],
    codomain_size: usize,
    map: &mut Vec<usize>,
    pos: usize,
    visit: &mut impl FnMut(&Vec<usize>),
) {
    if pos == domain.len() {
        visit(map);
        return;
    }
    for target in 0..codomain_size {
        map[domain[pos]] = target;
        enumerate_maps(domain, codomain_size, map, pos + 1, visit);
    }
}

/// Upper bound from an explicit correspondence: `dis(R) / 2`.
pub fn gh_upper_from_correspondence(
    r: &Correspondence,
    x: &FiniteRootedMetricSpace,
    y: &FiniteRootedMetricSpace,
) -> Result<f64, MetricError> {
    Ok(distortion(r, x, y)? / 2.0)
}

/// Lower bound from diameter and root-eccentricity gaps.
pub fn gh_lower_bound(x: &FiniteRootedMetricSpace, y: &FiniteRootedMetricSpace) -> f64 {
    let diam = (x.diameter() - y.diameter()).abs();
    let ecc = (x.root_eccentricity() - y.root_eccentricity()).abs();
    diam.max(ecc) / 2.0
}

/// Hausdorff distance between nonempty subsets of a common ambient space.
pub fn hausdorff_subsets(
    z: &FiniteRootedMetricSpace,
    a: &[usize],
    b: &[usize],
) -> Result<f64, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptySubset);
    }
    for &i in a.iter().chain(b) {
        if i >= z.len() {
            return Err(MetricError::BadIndex(i, z.len()));
        }
    }
    let one_sided = |from: &[usize], to: &[usize]| -> f64 {
        from.iter()
            .map(|&i| to.iter().map(|&j| z.at(i, j)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}

/// Rooted tree graph as a metric space: `a` times the graph distance.
pub fn tree_to_metric(t: &RootedTreeGraph, scale: f64) -> FiniteRootedMetricSpace {
    assert!(scale > 0.0, "scale must be positive");
    let verts = t.vertices();
    let n = verts.len();
    let index: std::collections::HashMap<u32, usize> =
        verts.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();
    // adjacency from parent table
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &verts {
        if let Some(p) = t.parent_of(v) {
            let (a, b) = (index[&v], index[&p]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut d = vec![0.0f64; n * n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        for v in 0..n {
            d[s * n + v] = scale * dist[v] as f64;
        }
    }
    FiniteRootedMetricSpace { n, d, root: index[&t.root()] }
}

/// Covering radius of a vertex subset inside a tree: the maximum graph
/// distance from any tree vertex to the subset. Subset indices refer to the
/// tree's sorted vertex list.
pub fn covering_radius(t: &RootedTreeGraph, subset: &[u32]) -> Option<usize> {
    let verts = t.vertices();
    let n = verts.len();
    let index: std::collections::HashMap<u32, usize> =
        verts.iter().copied().enumerate().map(|(i, v)| (v, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &verts {
        if let Some(p) = t.parent_of(v) {
            let (a, b) = (index[&v], index[&p]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    // multi-source BFS
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &s in subset {
        let &i = index.get(&s)?;
        dist[i] = 0;
        queue.push_back(i);
    }
    if queue.is_empty() {
        return None;
    }
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist.iter().copied().max().filter(|&m| m != usize::MAX)
}
