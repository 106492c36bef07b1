//! Exact and Monte Carlo estimators for the scalar quantities, couplings, and
//! limit-law checks.
//!
//! Exact modes enumerate joint trajectories or use kernel powers under hard
//! guards; Monte Carlo modes fan out over recorded streams and reduce in a
//! fixed order, so results are reproducible for any worker count.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{lazy_kernel, RegularGraph};
use crate::skeleton::SegmentScheme;
use crate::stream::StreamId;
use crate::walk::{range_interval, sample_path, Interval};

#[derive(Error, Debug, PartialEq)]
pub enum EstimatorError {
    #[error("exact-mode guard exceeded: {0}")]
    ExactGuard(String),
    #[error("supports differ: {0} vs {1}")]
    SupportMismatch(usize, usize),
    #[error("distribution does not sum to one (sum = {0})")]
    NotADistribution(f64),
    #[error("dimension {0} outside the supported range {1}..={2}")]
    DimensionOutOfRange(usize, usize, usize),
    #[error("polynomial degree {0} exceeds {1}")]
    DegreeTooHigh(usize, usize),
}

/// A Monte Carlo estimate with its provenance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: StreamId,
    /// Set when a zero-count clamp or similar guard fired.
    pub clamped: bool,
}

impl McEstimate {
    fn from_proportion(successes: u64, samples: u64, seed: StreamId) -> Self {
        let (p, se) = crate::stats::proportion_se(successes, samples);
        McEstimate { value: p, std_error: se, samples, seed, clamped: false }
    }
}

// ---------------------------------------------------------------------------
// Non-intersection probability q-bar
// ---------------------------------------------------------------------------

/// All lazy-walk trajectories of a given length from a fixed start, with
/// probabilities. Exact-mode helper; the count is `(degree + 1)^steps`.
fn enumerate_trajectories(
    g: &RegularGraph,
    start: u32,
    steps: usize,
    guard: usize,
) -> Result<Vec<(Vec<u32>, f64)>, EstimatorError> {
    let branch = g.degree() + 1;
    let total = branch.checked_pow(steps as u32).filter(|&t| t <= guard);
    if total.is_none() {
        return Err(EstimatorError::ExactGuard(format!(
            "{branch}^{steps} trajectories exceed {guard}"
        )));
    }
    let mut out: Vec<(Vec<u32>, f64)> = vec![(vec![start], 1.0)];
    for _ in 0..steps {
        let mut next = Vec::with_capacity(out.len() * branch);
        for (traj, prob) in out {
            let v = *traj.last().unwrap();
            let mut stay = traj.clone();
            stay.push(v);
            next.push((stay, prob * 0.5));
            let move_p = 0.5 / g.degree() as f64;
            for k in 0..g.degree() {
                let mut t = traj.clone();
                t.push(g.neighbor(v, k));
                next.push((t, prob * move_p));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Exact `qbar(s')`: the mean over the common start of the probability that
/// two conditionally independent lazy walks of length `s'` intersect, the
/// second walk counted from step one. Enumerates the first walk, then runs
/// an avoidance DP for the second.
pub fn qbar_exact(g: &RegularGraph, s_prime: usize) -> Result<f64, EstimatorError> {
    let n = g.vertex_count();
    let mut total = 0.0;
    for rho in 0..n as u32 {
        let trajs = enumerate_trajectories(g, rho, s_prime, 2_000_000)?;
        let mut p_avoid_sum = 0.0;
        for (traj, prob) in &trajs {
            let mut forbidden = vec![false; n];
            for &v in traj {
                forbidden[v as usize] = true;
            }
            p_avoid_sum += prob * avoidance_probability(g, rho, s_prime, &forbidden);
        }
        total += 1.0 - p_avoid_sum;
    }
    Ok(total / n as f64)
}

/// `P(W(k) avoids the forbidden set for all k in [1, steps])` for a lazy walk
/// started at `rho` (the start itself may be forbidden).
fn avoidance_probability(g: &RegularGraph, rho: u32, steps: usize, forbidden: &[bool]) -> f64 {
    let n = g.vertex_count();
    let mut dist = vec![0.0f64; n];
    dist[rho as usize] = 1.0;
    let move_p = 0.5 / g.degree() as f64;
    for _ in 0..steps {
        let mut next = vec![0.0f64; n];
        for (v, &m) in dist.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            next[v] += 0.5 * m;
            for k in 0..g.degree() {
                next[g.neighbor(v as u32, k) as usize] += move_p * m;
            }
        }
        for (v, x) in next.iter_mut().enumerate() {
            if forbidden[v] {
                *x = 0.0;
            }
        }
        dist = next;
    }
    dist.iter().sum()
}

/// Exact stationary window form `P_pi(R[l-s', l] cap R[l+1, l+s'] != 0)` for
/// `l >= s'`, by trajectory enumeration over the window.
pub fn window_intersection_exact(g: &RegularGraph, s_prime: usize) -> Result<f64, EstimatorError> {
    let n = g.vertex_count();
    let mut total = 0.0;
    for rho in 0..n as u32 {
        // stationary start, 2s' steps; split at position s'
        let trajs = enumerate_trajectories(g, rho, 2 * s_prime, 4_000_000)?;
        for (traj, prob) in &trajs {
            let past: std::collections::HashSet<u32> =
                traj[0..=s_prime].iter().copied().collect();
            if traj[s_prime + 1..].iter().any(|v| past.contains(v)) {
                total += prob;
            }
        }
    }
    Ok(total / n as f64)
}

/// Monte Carlo `qbar(s')`.
pub fn qbar_mc(
    g: &std::sync::Arc<RegularGraph>,
    s_prime: usize,
    samples: u64,
    stream: StreamId,
) -> McEstimate {
    let mut hits = 0u64;
    for i in 0..samples {
        let sub = stream.substream(i);
        let mut rng = sub.rng();
        let rho = rng.gen_range(0..g.vertex_count()) as u32;
        let w1 = sample_path(g, rho, s_prime, sub.substream(1));
        let w2 = sample_path(g, rho, s_prime, sub.substream(2));
        let r1 = range_interval(&w1, Interval::new(0, s_prime)).unwrap();
        let hit = (1..=s_prime).any(|k| r1.binary_search(&w2.vertex(k)).is_ok());
        hits += hit as u64;
    }
    McEstimate::from_proportion(hits, samples, stream)
}

// ---------------------------------------------------------------------------
// Return-probability sums H
// ---------------------------------------------------------------------------

/// `H_rho(m, n) = sum_{i<=m} sum_{j<=n} P^{i+j}(rho, rho)` via kernel powers.
pub fn h_function(
    g: &RegularGraph,
    rho: u32,
    m: usize,
    n: usize,
) -> Result<f64, crate::graph::GraphError> {
    let kernel = lazy_kernel(g)?;
    let returns = return_probabilities(&kernel, rho, m + n);
    Ok(h_from_returns(&returns, m, n))
}

/// `H^G(m, n)`: the stationary average of `H_rho(m, n)`.
pub fn h_graph(g: &RegularGraph, m: usize, n: usize) -> Result<f64, crate::graph::GraphError> {
    let kernel = lazy_kernel(g)?;
    let nv = g.vertex_count();
    let mut acc = 0.0;
    for rho in 0..nv as u32 {
        let returns = return_probabilities(&kernel, rho, m + n);
        acc += h_from_returns(&returns, m, n);
    }
    Ok(acc / nv as f64)
}

/// `sup_rho H_rho(m)`.
pub fn h_sup(g: &RegularGraph, m: usize) -> Result<f64, crate::graph::GraphError> {
    let kernel = lazy_kernel(g)?;
    let mut best = 0.0f64;
    for rho in 0..g.vertex_count() as u32 {
        let returns = return_probabilities(&kernel, rho, 2 * m);
        best = best.max(h_from_returns(&returns, m, m));
    }
    Ok(best)
}

fn return_probabilities(kernel: &crate::graph::DenseKernel, rho: u32, max_k: usize) -> Vec<f64> {
    let n = kernel.n();
    let mut dist = vec![0.0f64; n];
    dist[rho as usize] = 1.0;
    let mut out = Vec::with_capacity(max_k + 1);
    out.push(1.0);
    for _ in 1..=max_k {
        dist = kernel.step_distribution(&dist);
        out.push(dist[rho as usize]);
    }
    out
}

fn h_from_returns(returns: &[f64], m: usize, n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..=m {
        for j in 0..=n {
            acc += returns[i + j];
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Scale sequences gamma_N and c_N
// ---------------------------------------------------------------------------

/// Monte Carlo `gamma_N`: the expected number of distinct vertices in the
/// locally non-erased range of the first segment, stationary start.
pub fn gamma_n_mc(
    g: &std::sync::Arc<RegularGraph>,
    r: usize,
    s: usize,
    samples: u64,
    stream: StreamId,
) -> McEstimate {
    let scheme = SegmentScheme::new(r, s).expect("r >= 3s + 1");
    let a1 = scheme.a(1);
    let mut values = Vec::with_capacity(samples as usize);
    for i in 0..samples {
        let sub = stream.substream(i);
        let mut rng = sub.rng();
        let rho = rng.gen_range(0..g.vertex_count()) as u32;
        let w = sample_path(g, rho, a1.hi, sub.substream(1));
        let ne = crate::erasure::locally_non_erased(&w, s, a1).expect("segment long enough");
        let mut verts: Vec<u32> = ne.iter().map(|&m| w.vertex(m)).collect();
        verts.sort_unstable();
        verts.dedup();
        values.push(verts.len() as f64);
    }
    let (value, std_error) = crate::stats::mean_se(&values);
    McEstimate { value, std_error, samples, seed: stream, clamped: false }
}

/// Monte Carlo `c_N^2 = -ln P(no intersection)` between the inner range of an
/// independent segment and a locally non-erased segment range, both started
/// stationary. The intersection probability is clamped away from one when
/// every sample intersects.
pub fn c_n_mc(
    g: &std::sync::Arc<RegularGraph>,
    r: usize,
    s: usize,
    samples: u64,
    stream: StreamId,
) -> McEstimate {
    let scheme = SegmentScheme::new(r, s).expect("r >= 3s + 1");
    let a1 = scheme.a(1);
    let b1 = scheme.b(1);
    let mut hits = 0u64;
    for i in 0..samples {
        let sub = stream.substream(i);
        let mut rng = sub.rng();
        let rho1 = rng.gen_range(0..g.vertex_count()) as u32;
        let rho2 = rng.gen_range(0..g.vertex_count()) as u32;
        let w1 = sample_path(g, rho1, b1.hi, sub.substream(1));
        let w2 = sample_path(g, rho2, a1.hi, sub.substream(2));
        let ne = crate::erasure::locally_non_erased(&w2, s, a1).expect("segment long enough");
        let mut ne_range: Vec<u32> = ne.iter().map(|&m| w2.vertex(m)).collect();
        ne_range.sort_unstable();
        ne_range.dedup();
        let hit = b1.iter().any(|m| ne_range.binary_search(&w1.vertex(m)).is_ok());
        hits += hit as u64;
    }
    let mut clamped = false;
    let p_int = if hits == samples {
        clamped = true;
        (samples as f64 - 0.5) / samples as f64
    } else {
        hits as f64 / samples as f64
    };
    let c2 = -(1.0 - p_int).ln();
    // delta method: se(c^2) = se(p) / (1 - p)
    let se_p = (p_int * (1.0 - p_int) / samples as f64).sqrt();
    McEstimate {
        value: c2,
        std_error: se_p / (1.0 - p_int),
        samples,
        seed: stream,
        clamped,
    }
}

// ---------------------------------------------------------------------------
// Lattice constants gamma(d) and alpha(d)
// ---------------------------------------------------------------------------

pub const MIN_LATTICE_DIM: usize = 5;
pub const MAX_LATTICE_DIM: usize = 8;

type LatticePoint = [i16; MAX_LATTICE_DIM];

fn lattice_walk(d: usize, steps: usize, rng: &mut impl Rng) -> Vec<LatticePoint> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = [0i16; MAX_LATTICE_DIM];
    out.push(cur);
    for _ in 0..steps {
        if rng.gen::<bool>() {
            let axis = rng.gen_range(0..d);
            let delta: i16 = if rng.gen::<bool>() { 1 } else { -1 };
            cur[axis] += delta;
        }
        out.push(cur);
    }
    out
}

fn loop_erased_set(walk: &[LatticePoint]) -> std::collections::HashSet<LatticePoint> {
    let mut stack: Vec<LatticePoint> = Vec::new();
    let mut pos: HashMap<LatticePoint, usize> = HashMap::new();
    for &v in walk {
        if let Some(&k) = pos.get(&v) {
            for dropped in stack.drain(k..) {
                pos.remove(&dropped);
            }
        }
        pos.insert(v, stack.len());
        stack.push(v);
    }
    stack.into_iter().collect()
}

/// Horizon-truncated estimate with a paired half-horizon value for the
/// truncation-sensitivity report.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HorizonEstimate {
    pub estimate: McEstimate,
    pub horizon: usize,
    /// Same event evaluated on the first half of each sampled walk.
    pub half_horizon_value: f64,
}

/// `gamma(d)`: probability that the loop erasure of one lazy walk avoids an
/// independent lazy walk (from step one), both from the origin of `Z^d`,
/// truncated at `horizon` steps.
pub fn estimate_gamma_d(
    d: usize,
    horizon: usize,
    samples: u64,
    stream: StreamId,
) -> Result<HorizonEstimate, EstimatorError> {
    if !(MIN_LATTICE_DIM..=MAX_LATTICE_DIM).contains(&d) {
        return Err(EstimatorError::DimensionOutOfRange(d, MIN_LATTICE_DIM, MAX_LATTICE_DIM));
    }
    let mut hits_full = 0u64;
    let mut hits_half = 0u64;
    for i in 0..samples {
        let mut rng = stream.substream(i).rng();
        let w1 = lattice_walk(d, horizon, &mut rng);
        let w2 = lattice_walk(d, horizon, &mut rng);
        let le_full = loop_erased_set(&w1);
        let le_half = loop_erased_set(&w1[..=horizon / 2]);
        let mut avoid_full = true;
        let mut avoid_half = true;
        for (k, v) in w2.iter().enumerate().skip(1) {
            if avoid_full && le_full.contains(v) {
                avoid_full = false;
            }
            if avoid_half && k <= horizon / 2 && le_half.contains(v) {
                avoid_half = false;
            }
            if !avoid_full && !avoid_half {
                break;
            }
        }
        hits_full += avoid_full as u64;
        hits_half += avoid_half as u64;
    }
    Ok(HorizonEstimate {
        estimate: McEstimate::from_proportion(hits_full, samples, stream),
        horizon,
        half_horizon_value: hits_half as f64 / samples as f64,
    })
}

/// `alpha(d)`: probability of the triple pairwise avoidance event among three
/// independent lazy walks from the origin, truncated at `horizon`.
pub fn estimate_alpha_d(
    d: usize,
    horizon: usize,
    samples: u64,
    stream: StreamId,
) -> Result<HorizonEstimate, EstimatorError> {
    if !(MIN_LATTICE_DIM..=MAX_LATTICE_DIM).contains(&d) {
        return Err(EstimatorError::DimensionOutOfRange(d, MIN_LATTICE_DIM, MAX_LATTICE_DIM));
    }
    let mut hits_full = 0u64;
    let mut hits_half = 0u64;
    let event = |walks: &[Vec<LatticePoint>; 3], upto: usize| -> bool {
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let le = loop_erased_set(&walks[i][..=upto]);
            if walks[j][1..=upto].iter().any(|v| le.contains(v)) {
                return false;
            }
        }
        true
    };
    for i in 0..samples {
        let mut rng = stream.substream(i).rng();
        let walks = [
            lattice_walk(d, horizon, &mut rng),
            lattice_walk(d, horizon, &mut rng),
            lattice_walk(d, horizon, &mut rng),
        ];
        hits_full += event(&walks, horizon) as u64;
        hits_half += event(&walks, horizon / 2) as u64;
    }
    Ok(HorizonEstimate {
        estimate: McEstimate::from_proportion(hits_full, samples, stream),
        horizon,
        half_horizon_value: hits_half as f64 / samples as f64,
    })
}

// ---------------------------------------------------------------------------
// Couplings
// ---------------------------------------------------------------------------

/// Explicit law of a `{0,1}^j` vector, indexed by bitmask (bit `i` = coord `i`).
#[derive(Clone, Debug)]
pub struct BinaryLawTable {
    pub j: usize,
    pub probs: Vec<f64>,
}

impl BinaryLawTable {
    pub fn new(j: usize, probs: Vec<f64>) -> Result<Self, EstimatorError> {
        assert_eq!(probs.len(), 1 << j);
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || probs.iter().any(|&p| p < 0.0) {
            return Err(EstimatorError::NotADistribution(sum));
        }
        Ok(BinaryLawTable { j, probs })
    }

    /// Product law with the given marginals.
    pub fn product(marginals: &[f64]) -> Self {
        let j = marginals.len();
        let mut probs = vec![0.0; 1 << j];
        for (mask, p) in probs.iter_mut().enumerate() {
            *p = (0..j)
                .map(|i| if mask >> i & 1 == 1 { marginals[i] } else { 1.0 - marginals[i] })
                .product();
        }
        BinaryLawTable { j, probs }
    }

    /// Mass of all vectors extending the first `len` coordinates of `prefix`.
    fn prefix_mass(&self, prefix: usize, len: usize) -> f64 {
        let mut acc = 0.0;
        for mask in 0..self.probs.len() {
            if mask & ((1 << len) - 1) == prefix {
                acc += self.probs[mask];
            }
        }
        acc
    }

    /// `P(Z_i = 1 | prefix)`.
    fn conditional_one(&self, prefix: usize, i: usize) -> f64 {
        let base = self.prefix_mass(prefix, i);
        if base <= 0.0 {
            // conditioning on a null set: fall back to the marginal
            let ones: f64 = (0..self.probs.len())
                .filter(|m| m >> i & 1 == 1)
                .map(|m| self.probs[m])
                .sum();
            return ones;
        }
        self.prefix_mass(prefix | (1 << i), i + 1) / base
    }

    pub fn marginal(&self, i: usize) -> f64 {
        (0..self.probs.len())
            .filter(|m| m >> i & 1 == 1)
            .map(|m| self.probs[m])
            .sum()
    }

    pub fn expect_pair(&self, i: usize, k: usize) -> f64 {
        (0..self.probs.len())
            .filter(|m| m >> i & 1 == 1 && m >> k & 1 == 1)
            .map(|m| self.probs[m])
            .sum()
    }
}

/// Exact agreement probability of the sequential coordinatewise maximal
/// coupling of two explicit laws: coordinate `i` is coupled maximally given
/// the joint history. Guarded to small `j` (state space `4^j`).
pub fn couple_binary_exact(
    a: &BinaryLawTable,
    b: &BinaryLawTable,
) -> Result<f64, EstimatorError> {
    assert_eq!(a.j, b.j);
    if a.j > 8 {
        return Err(EstimatorError::ExactGuard(format!("4^{} coupling states", a.j)));
    }
    // joint distribution over (prefix_a, prefix_b)
    let mut states: HashMap<(usize, usize), f64> = HashMap::new();
    states.insert((0, 0), 1.0);
    for i in 0..a.j {
        let mut next: HashMap<(usize, usize), f64> = HashMap::new();
        for (&(pa, pb), &w) in &states {
            let p = a.conditional_one(pa, i);
            let q = b.conditional_one(pb, i);
            let both1 = p.min(q);
            let both0 = (1.0 - p).min(1.0 - q);
            let a1b0 = (p - q).max(0.0);
            let a0b1 = (q - p).max(0.0);
            let bit = 1usize << i;
            for (da, db, m) in [
                (bit, bit, both1),
                (0, 0, both0),
                (bit, 0, a1b0),
                (0, bit, a0b1),
            ] {
                if m > 0.0 {
                    *next.entry((pa | da, pb | db)).or_default() += w * m;
                }
            }
        }
        states = next;
    }
    Ok(states
        .iter()
        .filter(|(&(x, y), _)| x == y)
        .map(|(_, &w)| w)
        .sum())
}

/// Sample the sequential coordinatewise maximal coupling once.
pub fn couple_binary_sample(
    a: &BinaryLawTable,
    b: &BinaryLawTable,
    rng: &mut impl Rng,
) -> (usize, usize) {
    assert_eq!(a.j, b.j);
    let (mut za, mut zb) = (0usize, 0usize);
    for i in 0..a.j {
        let p = a.conditional_one(za, i);
        let q = b.conditional_one(zb, i);
        let u: f64 = rng.gen();
        // maximal coupling of Bernoulli(p) and Bernoulli(q)
        let (ba, bb) = if u < p.min(q) {
            (true, true)
        } else if u < p.max(q) {
            (p > q, q > p)
        } else {
            (false, false)
        };
        if ba {
            za |= 1 << i;
        }
        if bb {
            zb |= 1 << i;
        }
    }
    (za, zb)
}

/// Lower bound on the agreement probability guaranteed by the hypercube
/// coupling lemma: `1 - sum_i sum_{k != i} (E[Z_k Z_i] + E[Z'_k Z'_i])
/// - sum_i |E[Z_i] - E[Z'_i]|`.
pub fn hypercube_bound_rhs(a: &BinaryLawTable, b: &BinaryLawTable) -> f64 {
    assert_eq!(a.j, b.j);
    let mut rhs = 1.0;
    for i in 0..a.j {
        for k in 0..a.j {
            if k != i {
                rhs -= a.expect_pair(i, k) + b.expect_pair(i, k);
            }
        }
        rhs -= (a.marginal(i) - b.marginal(i)).abs();
    }
    rhs
}

/// Optimal total-variation coupling of two finite distributions on a common
/// support: the overlap mass sits on the diagonal, the excess is matched
/// greedily in index order.
#[derive(Clone, Debug)]
pub struct OptimalCoupling {
    pub joint: Vec<(usize, usize, f64)>,
    pub tv: f64,
}

pub fn optimal_tv_coupling(mu: &[f64], nu: &[f64]) -> Result<OptimalCoupling, EstimatorError> {
    if mu.len() != nu.len() {
        return Err(EstimatorError::SupportMismatch(mu.len(), nu.len()));
    }
    for dist in [mu, nu] {
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || dist.iter().any(|&p| p < 0.0) {
            return Err(EstimatorError::NotADistribution(sum));
        }
    }
    let n = mu.len();
    let mut joint = Vec::new();
    let mut excess_mu: Vec<f64> = Vec::with_capacity(n);
    let mut excess_nu: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let overlap = mu[i].min(nu[i]);
        if overlap > 0.0 {
            joint.push((i, i, overlap));
        }
        excess_mu.push(mu[i] - overlap);
        excess_nu.push(nu[i] - overlap);
    }
    let tv: f64 = excess_mu.iter().sum();
    let (mut i, mut j) = (0usize, 0usize);
    let (mut left, mut right) = (excess_mu[0], excess_nu[0]);
    loop {
        while i < n && left <= 1e-18 {
            i += 1;
            if i < n {
                left = excess_mu[i];
            }
        }
        while j < n && right <= 1e-18 {
            j += 1;
            if j < n {
                right = excess_nu[j];
            }
        }
        if i >= n || j >= n {
            break;
        }
        let m = left.min(right);
        joint.push((i, j, m));
        left -= m;
        right -= m;
    }
    Ok(OptimalCoupling { joint, tv })
}

impl OptimalCoupling {
    pub fn mismatch_probability(&self) -> f64 {
        self.joint.iter().filter(|(i, j, _)| i != j).map(|&(_, _, m)| m).sum()
    }

    pub fn marginals(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut mu = vec![0.0; n];
        let mut nu = vec![0.0; n];
        for &(i, j, m) in &self.joint {
            mu[i] += m;
            nu[j] += m;
        }
        (mu, nu)
    }
}

// ---------------------------------------------------------------------------
// Rayleigh generator residual
// ---------------------------------------------------------------------------

/// Outer quadrature configuration (composite Gauss-Legendre).
#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    pub upper: f64,
    pub panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { upper: 40.0, panels: 400 }
    }
}

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn integrate<F: Fn(f64) -> f64>(f: F, cfg: QuadratureConfig) -> f64 {
    let h = cfg.upper / cfg.panels as f64;
    let mut acc = 0.0;
    for p in 0..cfg.panels {
        let a = p as f64 * h;
        let mid = a + h / 2.0;
        let half = h / 2.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            acc += w * half * f(mid + half * x);
        }
    }
    acc
}

pub const MAX_RAYLEIGH_DEGREE: usize = 8;

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// The Rayleigh-process generator applied to a polynomial:
/// `Omega f(x) = f'(x) + integral_0^x (f(y) - f(x)) dy`, the jump measure
/// being the length measure of the interval `[0, x]`.
pub fn rayleigh_generator_apply(coeffs: &[f64], x: f64) -> f64 {
    // f'(x)
    let deriv: f64 = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c * x.powi(k as i32 - 1))
        .sum();
    // integral_0^x f(y) dy, exact for polynomials
    let integral: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| c * x.powi(k as i32 + 1) / (k as f64 + 1.0))
        .sum();
    deriv + integral - x * poly_eval(coeffs, x)
}

/// The Rayleigh density `x exp(-x^2/2)`.
pub fn rayleigh_density(x: f64) -> f64 {
    x * (-x * x / 2.0).exp()
}

/// Normalized wrong-density control `exp(-x/2) / 2`.
pub fn exponential_control_density(x: f64) -> f64 {
    0.5 * (-x / 2.0).exp()
}

/// `integral Omega f dmu` for a polynomial `f` and a density `mu`; a residual
/// near zero certifies invariance.
pub fn rayleigh_generator_residual<D: Fn(f64) -> f64>(
    coeffs: &[f64],
    density: D,
    cfg: QuadratureConfig,
) -> Result<f64, EstimatorError> {
    if coeffs.len() > MAX_RAYLEIGH_DEGREE + 1 {
        return Err(EstimatorError::DegreeTooHigh(coeffs.len() - 1, MAX_RAYLEIGH_DEGREE));
    }
    Ok(integrate(|x| rayleigh_generator_apply(coeffs, x) * density(x), cfg))
}

// ---------------------------------------------------------------------------
// Cut-indicator coupling experiment
// ---------------------------------------------------------------------------

/// Empirical law of walk-side indicator rows, sparse over observed rows.
#[derive(Clone, Debug, Default)]
pub struct RowLaw {
    pub counts: HashMap<u64, u64>,
    pub total: u64,
}

impl RowLaw {
    pub fn record(&mut self, row: u64) {
        *self.counts.entry(row).or_default() += 1;
        self.total += 1;
    }

    pub fn prob(&self, row: u64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        *self.counts.get(&row).unwrap_or(&0) as f64 / self.total as f64
    }
}

/// Product-Bernoulli probability of a row of `len` indicators each set with
/// probability `p_one`.
pub fn poisson_row_prob(row: u64, len: usize, p_one: f64) -> f64 {
    let ones = row.count_ones() as usize;
    p_one.powi(ones as i32) * (1.0 - p_one).powi((len - ones) as i32)
}

/// Sample the Poisson-side row conditionally on the walk-side row under the
/// optimal (overlap) coupling of the empirical row law and the product law.
pub fn couple_row_given(
    walk_row: u64,
    len: usize,
    law: &RowLaw,
    p_one: f64,
    rng: &mut impl Rng,
) -> u64 {
    let mu = law.prob(walk_row).max(1e-300);
    let nu = poisson_row_prob(walk_row, len, p_one);
    if rng.gen::<f64>() < (nu / mu).min(1.0) {
        return walk_row; // overlap mass: rows agree
    }
    // excess of the product law: rejection from nu restricted to rows where
    // nu exceeds the empirical mass
    loop {
        let mut row = 0u64;
        for i in 0..len {
            if rng.gen::<f64>() < p_one {
                row |= 1 << i;
            }
        }
        let nu_r = poisson_row_prob(row, len, p_one);
        let mu_r = law.prob(row);
        if nu_r <= mu_r {
            continue;
        }
        if rng.gen::<f64>() < (nu_r - mu_r) / nu_r {
            return row;
        }
    }
}
