//! The Aldous-Broder map and chain, UST samplers, and the stationary-law
//! verifier.
//!
//! Trees are parent tables rooted at the walker: `parent[x] = gamma(L_x(n-1) + 1)`,
//! pointing toward the root, so an AB-move is a single parent rewrite.

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::graph::{GraphKind, RegularGraph};
use crate::stream::StreamId;
use crate::walk::{last_visit, Path};

#[derive(Error, Debug, PartialEq)]
pub enum TreeError {
    #[error("time {0} beyond path length {1}")]
    BeyondPath(usize, usize),
    #[error("tree and path are inconsistent: {0}")]
    Inconsistent(String),
    #[error("parent chain from {0} does not reach the root")]
    Disconnected(u32),
    #[error("edge {{{0}, {1}}} is not an edge of the host graph")]
    NotAGraphEdge(u32, u32),
    #[error("path on [-M, 0] does not cover the vertex set")]
    DoesNotCover,
    #[error("cover-time cap of {0} steps exceeded")]
    CoverCapExceeded(usize),
    #[error("enumeration guard: {0} vertices exceed the limit of {1}")]
    EnumerationGuard(usize, usize),
    #[error("tree does not span the graph")]
    DoesNotSpan,
}

/// Combinatorial rooted tree over graph vertex ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTreeGraph {
    root: u32,
    parent: HashMap<u32, u32>,
}

impl RootedTreeGraph {
    pub fn singleton(root: u32) -> Self {
        RootedTreeGraph { root, parent: HashMap::new() }
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn contains(&self, v: u32) -> bool {
        v == self.root || self.parent.contains_key(&v)
    }

    pub fn parent_of(&self, v: u32) -> Option<u32> {
        self.parent.get(&v).copied()
    }

    /// Sorted vertex list.
    pub fn vertices(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self.parent.keys().copied().collect();
        vs.push(self.root);
        vs.sort_unstable();
        vs
    }

    /// Sorted edge list with endpoints ordered.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut es: Vec<(u32, u32)> = self
            .parent
            .iter()
            .map(|(&c, &p)| (c.min(p), c.max(p)))
            .collect();
        es.sort_unstable();
        es
    }

    /// Number of parent hops from `v` to the root. Errors on cycles.
    pub fn depth_of(&self, v: u32) -> Result<usize, TreeError> {
        let mut d = 0;
        let mut cur = v;
        let cap = self.len();
        while cur != self.root {
            cur = *self.parent.get(&cur).ok_or(TreeError::Disconnected(v))?;
            d += 1;
            if d > cap {
                return Err(TreeError::Disconnected(v));
            }
        }
        Ok(d)
    }

    /// Maximum depth over vertices.
    pub fn height(&self) -> Result<usize, TreeError> {
        let mut h = 0;
        for &v in self.parent.keys() {
            h = h.max(self.depth_of(v)?);
        }
        Ok(h)
    }

    /// Structural validation: every parent chain reaches the root, every edge
    /// is a host-graph edge, no self-edges.
    pub fn validate(&self, g: &RegularGraph) -> Result<(), TreeError> {
        for (&c, &p) in &self.parent {
            if c == p {
                return Err(TreeError::NotAGraphEdge(c, p));
            }
            if !g.are_adjacent(c, p) {
                return Err(TreeError::NotAGraphEdge(c, p));
            }
        }
        for &v in self.parent.keys() {
            self.depth_of(v)?;
        }
        Ok(())
    }

    /// Does the tree span the whole graph?
    pub fn spans(&self, g: &RegularGraph) -> bool {
        self.len() == g.vertex_count() && self.vertices().iter().all(|&v| (v as usize) < g.vertex_count())
    }

    /// Canonical unrooted edge-set key.
    pub fn canonical_edges(&self) -> Vec<(u32, u32)> {
        self.edges()
    }

    pub(crate) fn set_parent(&mut self, child: u32, parent: u32) {
        self.parent.insert(child, parent);
    }

    pub(crate) fn make_root(&mut self, new_root: u32) {
        self.parent.remove(&new_root);
        self.root = new_root;
    }
}

/// Kind of transition the AB chain performs at one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbMoveKind {
    /// `gamma(n) = gamma(n-1)`: lazy step, tree unchanged.
    Stay,
    /// `gamma(n)` is fresh: new vertex and edge to the old root.
    RootGrowth,
    /// `gamma(n)` revisited: one edge swapped, root moves.
    AbMove,
}

/// The Aldous-Broder tree of the path at time `n`:
/// vertices `R(gamma[0..=n])`, edges `{x, gamma(L_x(n-1)+1)}` for
/// `x != gamma(n)`, root `gamma(n)`.
pub fn ab_tree(p: &Path, n: usize) -> Result<RootedTreeGraph, TreeError> {
    if n > p.len_steps() {
        return Err(TreeError::BeyondPath(n, p.len_steps()));
    }
    let root = p.vertex(n);
    let mut tree = RootedTreeGraph::singleton(root);
    if n == 0 {
        return Ok(tree);
    }
    let mut last: HashMap<u32, usize> = HashMap::new();
    for k in 0..=n - 1 {
        last.insert(p.vertex(k), k);
    }
    for (&x, &lx) in &last {
        if x != root {
            tree.set_parent(x, p.vertex(lx + 1));
        }
    }
    Ok(tree)
}

/// One incremental AB step: from `ab_tree(p, n-1)` to `ab_tree(p, n)`, with
/// the move classification.
pub fn ab_step(
    tree: &mut RootedTreeGraph,
    p: &Path,
    n: usize,
) -> Result<AbMoveKind, TreeError> {
    if n == 0 || n > p.len_steps() {
        return Err(TreeError::BeyondPath(n, p.len_steps()));
    }
    let old_root = p.vertex(n - 1);
    if tree.root() != old_root {
        return Err(TreeError::Inconsistent(format!(
            "tree root {} does not match gamma(n-1) = {old_root}",
            tree.root()
        )));
    }
    let v = p.vertex(n);
    if v == old_root {
        return Ok(AbMoveKind::Stay);
    }
    if tree.contains(v) {
        tree.make_root(v);
        tree.set_parent(old_root, v);
        Ok(AbMoveKind::AbMove)
    } else {
        tree.make_root(v);
        tree.set_parent(old_root, v);
        Ok(AbMoveKind::RootGrowth)
    }
}

/// Coupling-from-the-past tree of a path on `[-M, 0]` (stored with index `i`
/// standing for time `i - M`): edges `{v, gamma(L_v(0) + 1)}` for
/// `v != gamma(0)`, rooted at `gamma(0)`. Requires the path to cover `V`.
pub fn ab_tree_from_history(p: &Path) -> Result<RootedTreeGraph, TreeError> {
    let g = p.graph();
    let m = p.len_steps();
    let mut last: HashMap<u32, usize> = HashMap::new();
    for k in 0..=m {
        last.insert(p.vertex(k), k);
    }
    if last.len() != g.vertex_count() {
        return Err(TreeError::DoesNotCover);
    }
    let root = p.vertex(m);
    let mut tree = RootedTreeGraph::singleton(root);
    for (&v, &lv) in &last {
        if v != root {
            tree.set_parent(v, p.vertex(lv + 1));
        }
    }
    Ok(tree)
}

/// Cover-time step cap from the design rule `64 * #V * t_mix * ln(#V)`.
pub fn cover_step_cap(vertex_count: usize, t_mix: usize) -> usize {
    let n = vertex_count as f64;
    (64.0 * n * t_mix.max(1) as f64 * n.ln().max(1.0)).ceil() as usize
}

/// Uniform rooted spanning tree via the Aldous-Broder cover-time walk. The
/// start vertex is drawn from the uniform stationary law; the walk runs until
/// every vertex is seen, adding first-entrance edges `{W(sigma_v - 1), v}`.
pub fn ust_aldous_broder(
    g: &RegularGraph,
    stream: StreamId,
    step_cap: usize,
) -> Result<RootedTreeGraph, TreeError> {
    let mut rng = stream.rng();
    let n = g.vertex_count();
    let start = rng.gen_range(0..n) as u32;
    let mut tree = RootedTreeGraph::singleton(start);
    let mut seen = vec![false; n];
    seen[start as usize] = true;
    let mut remaining = n - 1;
    let mut v = start;
    let mut steps = 0usize;
    while remaining > 0 {
        if steps >= step_cap {
            return Err(TreeError::CoverCapExceeded(step_cap));
        }
        steps += 1;
        let w = crate::walk::lazy_step(g, v, &mut rng);
        if !seen[w as usize] {
            seen[w as usize] = true;
            remaining -= 1;
            tree.set_parent(w, v);
        }
        v = w;
    }
    Ok(tree)
}

/// Uniform rooted spanning tree via Wilson's algorithm: root drawn uniformly,
/// branches are loop-erased walks. Uses the jump chain (simple random walk);
/// the loop-erased trajectory has the same law as for the lazy walk.
pub fn ust_wilson(g: &RegularGraph, stream: StreamId) -> RootedTreeGraph {
    let mut rng = stream.rng();
    let n = g.vertex_count();
    let root = rng.gen_range(0..n) as u32;
    let mut tree = RootedTreeGraph::singleton(root);
    let mut in_tree = vec![false; n];
    in_tree[root as usize] = true;
    let mut next = vec![u32::MAX; n];
    for v0 in 0..n as u32 {
        if in_tree[v0 as usize] {
            continue;
        }
        // random walk from v0 until the tree is hit, recording successors
        let mut v = v0;
        while !in_tree[v as usize] {
            let w = g.neighbor(v, rng.gen_range(0..g.degree()));
            next[v as usize] = w;
            v = w;
        }
        // retrace: the successor pointers trace the loop-erased path
        let mut v = v0;
        while !in_tree[v as usize] {
            in_tree[v as usize] = true;
            tree.set_parent(v, next[v as usize]);
            v = next[v as usize];
        }
    }
    tree
}

/// Guard for exhaustive spanning-tree enumeration.
pub const ENUMERATION_GUARD: usize = 8;

/// All spanning trees of a small graph, as canonical sorted edge lists.
pub fn enumerate_spanning_trees(g: &RegularGraph) -> Result<Vec<Vec<(u32, u32)>>, TreeError> {
    let n = g.vertex_count();
    if n > ENUMERATION_GUARD {
        return Err(TreeError::EnumerationGuard(n, ENUMERATION_GUARD));
    }
    let edges = g.edges();
    let k = n - 1;
    let mut out = Vec::new();
    let mut choice: Vec<usize> = (0..k).collect();
    if edges.len() < k {
        return Ok(out);
    }
    loop {
        // union-find acyclic/connected check
        let mut uf: Vec<u32> = (0..n as u32).collect();
        fn find(uf: &mut Vec<u32>, x: u32) -> u32 {
            let mut r = x;
            while uf[r as usize] != r {
                r = uf[r as usize];
            }
            let mut c = x;
            while uf[c as usize] != r {
                let nxt = uf[c as usize];
                uf[c as usize] = r;
                c = nxt;
            }
            r
        }
        let mut ok = true;
        for &i in &choice {
            let (a, b) = edges[i];
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            if ra == rb {
                ok = false;
                break;
            }
            uf[ra as usize] = rb;
        }
        if ok {
            out.push(choice.iter().map(|&i| edges[i]).collect());
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if choice[i] != i + edges.len() - k {
                choice[i] += 1;
                for j in i + 1..k {
                    choice[j] = choice[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Kirchhoff spanning-tree count: determinant of the reduced Laplacian by
/// fraction-free elimination.
pub fn kirchhoff_count(g: &RegularGraph) -> u128 {
    let n = g.vertex_count();
    let m = n - 1;
    let mut a = vec![vec![0i128; m]; m];
    for v in 0..m {
        a[v][v] = g.degree() as i128;
    }
    for (x, y) in g.edges() {
        let (x, y) = (x as usize, y as usize);
        if x < m && y < m {
            a[x][y] -= 1;
            a[y][x] -= 1;
        }
    }
    // Bareiss algorithm; reduced Laplacians of connected graphs are positive
    // definite, so pivots never vanish.
    let mut prev = 1i128;
    for k in 0..m {
        if a[k][k] == 0 {
            return 0;
        }
        for i in k + 1..m {
            for j in k + 1..m {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    a[m - 1][m - 1].unsigned_abs()
}

/// Stationary probability of a rooted spanning tree of a small regular graph:
/// `C^{-1} prod_{x != root} deg(x)^{-1}`, with `C` fixed by enumeration.
/// On a regular graph this is uniform over rooted spanning trees.
pub fn rooted_tree_probability(g: &RegularGraph, t: &RootedTreeGraph) -> Result<f64, TreeError> {
    if !t.spans(g) {
        return Err(TreeError::DoesNotSpan);
    }
    t.validate(g)?;
    let trees = enumerate_spanning_trees(g)?;
    let rooted_total = trees.len() * g.vertex_count();
    Ok(1.0 / rooted_total as f64)
}

/// Convenience: sample a path long enough to cover the graph and at least
/// `min_steps`, for history-tree experiments. The returned path covers `V`.
pub fn sample_covering_path(
    g: &std::sync::Arc<RegularGraph>,
    start: u32,
    min_steps: usize,
    stream: StreamId,
    step_cap: usize,
) -> Result<Path, TreeError> {
    let mut rng = stream.rng();
    let n = g.vertex_count();
    let mut verts = vec![start];
    let mut seen = vec![false; n];
    seen[start as usize] = true;
    let mut remaining = n - 1;
    let mut v = start;
    while remaining > 0 || verts.len() <= min_steps {
        if verts.len() > step_cap {
            return Err(TreeError::CoverCapExceeded(step_cap));
        }
        let w = crate::walk::lazy_step(g.as_ref(), v, &mut rng);
        if !seen[w as usize] {
            seen[w as usize] = true;
            remaining -= 1;
        }
        verts.push(w);
        v = w;
    }
    Ok(Path::new(g.clone(), verts))
}

/// Rebuild the AB tree at `n` from scratch and assert the incremental update
/// matches; used by tests and validators.
pub fn ab_tree_consistent(p: &Path, n: usize) -> Result<bool, TreeError> {
    let direct = ab_tree(p, n)?;
    let mut inc = ab_tree(p, 0)?;
    for k in 1..=n {
        ab_step(&mut inc, p, k)?;
    }
    Ok(direct == inc)
}

/// Classify the step from `n-1` to `n` without mutating a tree.
pub fn classify_step(p: &Path, n: usize, tree_before: &RootedTreeGraph) -> AbMoveKind {
    let v = p.vertex(n);
    if v == p.vertex(n - 1) {
        AbMoveKind::Stay
    } else if tree_before.contains(v) {
        AbMoveKind::AbMove
    } else {
        AbMoveKind::RootGrowth
    }
}

/// The erased edge of an AB-move at step `n` (None for stay / root growth):
/// `{gamma(n), gamma(L_{gamma(n)}(n-2) + 1)}`.
pub fn erased_edge(p: &Path, n: usize) -> Option<(u32, u32)> {
    let v = p.vertex(n);
    if n == 0 || v == p.vertex(n - 1) {
        return None;
    }
    if n >= 2 {
        if let Ok(lv) = last_visit(p, v, n - 2) {
            return Some((v, p.vertex(lv + 1)));
        }
    }
    None
}

/// Build a graph handle for tests and the CLI from a kind value.
pub fn build_graph(kind: GraphKind) -> Result<RegularGraph, crate::graph::GraphError> {
    RegularGraph::build(kind)
}
