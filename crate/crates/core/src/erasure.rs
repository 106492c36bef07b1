//! Chronological loop erasure, locally non-erased index sets, and local cut
//! points.
//!
//! The non-erased recursion keeps, at every time `n`, exactly the indices
//! whose vertices survive erasing all loops of `gamma(A cap [min A, n])` in
//! chronological order; the surviving indices are increasing and their
//! vertices are pairwise distinct, so the state is a stack: a new arrival
//! that matches the vertex at stack position `k` truncates the stack to
//! `0..k` before being pushed.

use std::collections::HashMap;

use thiserror::Error;

use crate::walk::{range_interval, Interval, Path};

#[derive(Error, Debug, PartialEq)]
pub enum ErasureError {
    #[error("interval is empty")]
    EmptyInterval,
    #[error("time {time} outside interval [{lo}, {hi}]")]
    TimeOutsideInterval { time: usize, lo: usize, hi: usize },
    #[error("interval of length {len} is too short; need at least {need}")]
    IntervalTooShort { len: usize, need: usize },
    #[error("interval end {hi} exceeds path length {len}")]
    BeyondPath { hi: usize, len: usize },
}

/// Incremental state of the non-erased recursion on a fixed interval.
#[derive(Clone, Debug)]
pub struct NonErasedState {
    interval: Interval,
    time: usize,
    stack: Vec<usize>,
    pos_of_vertex: HashMap<u32, usize>,
}

impl NonErasedState {
    /// State at `n = min A`.
    pub fn start(p: &Path, interval: Interval) -> Result<Self, ErasureError> {
        if interval.is_empty() {
            return Err(ErasureError::EmptyInterval);
        }
        if interval.hi > p.len_steps() {
            return Err(ErasureError::BeyondPath { hi: interval.hi, len: p.len_steps() });
        }
        let mut pos_of_vertex = HashMap::new();
        pos_of_vertex.insert(p.vertex(interval.lo), 0);
        Ok(NonErasedState { interval, time: interval.lo, stack: vec![interval.lo], pos_of_vertex })
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Advance to time `n + 1` (must stay inside the interval).
    pub fn advance(&mut self, p: &Path) {
        let n = self.time + 1;
        assert!(n <= self.interval.hi, "advance past interval end");
        let v = p.vertex(n);
        if let Some(&k) = self.pos_of_vertex.get(&v) {
            // gamma(n) re-hits the surviving vertex at stack position k: every
            // index from k on is erased.
            for &idx in &self.stack[k..] {
                self.pos_of_vertex.remove(&p.vertex(idx));
            }
            self.stack.truncate(k);
        }
        self.pos_of_vertex.insert(v, self.stack.len());
        self.stack.push(n);
        self.time = n;
    }

    /// Sorted non-erased indices `NE^{gamma,A}(n)`.
    pub fn indices(&self) -> &[usize] {
        &self.stack
    }

    /// Erased indices `E^{gamma,A}(n) = (A cap [min A, n]) \ NE`.
    pub fn erased(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut it = self.stack.iter().peekable();
        for m in self.interval.lo..=self.time {
            if it.peek() == Some(&&m) {
                it.next();
            } else {
                out.push(m);
            }
        }
        out
    }
}

/// `NE^{gamma,A}(n)` as a sorted index vector.
pub fn non_erased_indices(p: &Path, a: Interval, n: usize) -> Result<Vec<usize>, ErasureError> {
    if a.is_empty() {
        return Err(ErasureError::EmptyInterval);
    }
    if !a.contains(n) {
        return Err(ErasureError::TimeOutsideInterval { time: n, lo: a.lo, hi: a.hi });
    }
    let mut st = NonErasedState::start(p, a)?;
    while st.time() < n {
        st.advance(p);
    }
    Ok(st.indices().to_vec())
}

/// Loop-erased path over `A`: vertices at the final non-erased indices, in
/// index order. Self-avoiding by construction.
pub fn loop_erase(p: &Path, a: Interval) -> Result<Vec<u32>, ErasureError> {
    let idx = non_erased_indices(p, a, a.hi)?;
    Ok(idx.into_iter().map(|i| p.vertex(i)).collect())
}

/// `(A, s)`-locally non-erased indices: `m` in `[min A + s, max A - s]` such
/// that the loop-erased head of `gamma([m-s, m])` avoids `gamma([m+1, m+s])`.
pub fn locally_non_erased(p: &Path, s: usize, a: Interval) -> Result<Vec<usize>, ErasureError> {
    if a.len() < 2 * s + 1 {
        return Err(ErasureError::IntervalTooShort { len: a.len(), need: 2 * s + 1 });
    }
    if a.hi > p.len_steps() {
        return Err(ErasureError::BeyondPath { hi: a.hi, len: p.len_steps() });
    }
    let mut out = Vec::new();
    for m in (a.lo + s)..=(a.hi - s) {
        let head = non_erased_indices(p, Interval::new(m - s, m), m)?;
        let future = range_interval(p, Interval::new(m + 1, m + s)).expect("in range");
        let hit = head.iter().any(|&i| future.binary_search(&p.vertex(i)).is_ok());
        if !hit {
            out.push(m);
        }
    }
    Ok(out)
}

/// Is `ell` an `s'`-local cut point of the path?
pub fn is_local_cut_point(p: &Path, ell: usize, s_prime: usize) -> bool {
    if ell < s_prime || ell + s_prime > p.len_steps() {
        return false;
    }
    let past = range_interval(p, Interval::new(ell - s_prime, ell)).expect("in range");
    (ell + 1..=ell + s_prime).all(|i| past.binary_search(&p.vertex(i)).is_err())
}

/// `CP^{gamma,s'}(A)`: local cut points inside `[min A + s', max A - s']`.
pub fn local_cut_points(p: &Path, s_prime: usize, a: Interval) -> Result<Vec<usize>, ErasureError> {
    if a.len() < 2 * s_prime + 1 {
        return Err(ErasureError::IntervalTooShort { len: a.len(), need: 2 * s_prime + 1 });
    }
    if a.hi > p.len_steps() {
        return Err(ErasureError::BeyondPath { hi: a.hi, len: p.len_steps() });
    }
    Ok(((a.lo + s_prime)..=(a.hi - s_prime))
        .filter(|&ell| is_local_cut_point(p, ell, s_prime))
        .collect())
}
