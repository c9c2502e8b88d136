//! Weights of the periplectic supergroup: the order `μ ≤ λ ⟺ λ − μ ∈ Z≥0Δ⁺` with
//! `Δ⁺ = {ε_i − ε_j} ∪ {−(ε_i + ε_j)}` (i < j), the odd-root count `l(μ, λ)`, and intervals.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("rank {0} is too small; need n >= 2")]
    RankTooSmall(usize),
    #[error("{0} is not below {1}")]
    NotComparable(Weight, Weight),
}

/// `Σ a_i ε_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `|λ| = Σ a_i`.
    pub fn norm(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    fn prefix_sums(&self) -> Vec<i64> {
        self.0
            .iter()
            .scan(0, |acc, &a| {
                *acc += a;
                Some(*acc)
            })
            .collect()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<i64>> for Weight {
    fn from(v: Vec<i64>) -> Self {
        Weight(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PRootData {
    pub n: usize,
    pub positive_even: Vec<Weight>,
    pub positive_odd: Vec<Weight>,
    /// `ε_i − ε_{i+1}` followed by `−(ε_1 + ε_2)`.
    pub generators: Vec<Weight>,
}

impl PRootData {
    pub fn new(n: usize) -> Result<Self, WeightError> {
        if n < 2 {
            return Err(WeightError::RankTooSmall(n));
        }
        let root = |i: usize, si: i64, j: usize, sj: i64| {
            let mut v = vec![0; n];
            v[i] += si;
            v[j] += sj;
            Weight(v)
        };
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let positive_even = pairs.iter().map(|&(i, j)| root(i, 1, j, -1)).collect();
        let positive_odd = pairs.iter().map(|&(i, j)| root(i, -1, j, -1)).collect();
        let mut generators: Vec<Weight> = (0..n - 1).map(|i| root(i, 1, i + 1, -1)).collect();
        generators.push(root(0, -1, 1, -1));
        Ok(PRootData { n, positive_even, positive_odd, generators })
    }
}

fn check_pair(mu: &Weight, lambda: &Weight) -> Result<(), WeightError> {
    if mu.n() != lambda.n() {
        return Err(WeightError::DimensionMismatch(mu.n(), lambda.n()));
    }
    if mu.n() < 2 {
        return Err(WeightError::RankTooSmall(mu.n()));
    }
    Ok(())
}

/// Decides `λ − μ ∈ Z≥0Δ⁺`: the odd count `c = (|μ| − |λ|)/2` must be a nonnegative integer and
/// `λ − μ + c(ε_1 + ε_2)` must lie in the cone of the simple even roots.
pub fn leq(mu: &Weight, lambda: &Weight) -> Result<bool, WeightError> {
    check_pair(mu, lambda)?;
    let diff = mu.norm() - lambda.norm();
    if diff < 0 || diff % 2 != 0 {
        return Ok(false);
    }
    let c = diff / 2;
    let mut t: Vec<i64> = lambda.0.iter().zip(&mu.0).map(|(a, b)| a - b).collect();
    t[0] += c;
    t[1] += c;
    let prefix = Weight(t).prefix_sums();
    Ok(prefix.iter().all(|&s| s >= 0) && prefix.last() == Some(&0))
}

/// `l(μ, λ) = (|μ| − |λ|)/2`, the number of odd roots in any decomposition of `λ − μ`.
pub fn ell(mu: &Weight, lambda: &Weight) -> Result<i64, WeightError> {
    if !leq(mu, lambda)? {
        return Err(WeightError::NotComparable(mu.clone(), lambda.clone()));
    }
    Ok((mu.norm() - lambda.norm()) / 2)
}

/// Per-coordinate prefix-sum bounds containing `[μ, λ]`.
pub fn prefix_box(mu: &Weight, lambda: &Weight) -> Result<Vec<(i64, i64)>, WeightError> {
    let l = ell(mu, lambda)?;
    let (pm, pl) = (mu.prefix_sums(), lambda.prefix_sums());
    Ok((0..mu.n())
        .map(|k| {
            let slack = l * (k as i64 + 1).min(2);
            (pm[k] - slack, pl[k] + slack)
        })
        .collect())
}

/// All `π` with `μ ≤ π ≤ λ`, sorted. With `dominant_only`, scans the non-increasing sequences
/// `a_1 + l(μ, λ) ≥ b_1 ≥ … ≥ b_n ≥ a_n` instead of the prefix-sum box.
pub fn interval(mu: &Weight, lambda: &Weight, dominant_only: bool) -> Result<Vec<Weight>, WeightError> {
    let l = ell(mu, lambda)?;
    let n = mu.n();
    let mut candidates = Vec::new();
    if dominant_only {
        let (hi, lo) = (lambda.0[0] + l, lambda.0[n - 1]);
        let mut cur = Vec::with_capacity(n);
        non_increasing(n, hi, lo, &mut cur, &mut candidates);
    } else {
        let bounds = prefix_box(mu, lambda)?;
        let mut cur = Vec::with_capacity(n);
        prefix_scan(&bounds, lambda.norm(), mu.norm(), &mut cur, &mut candidates);
    }
    let mut out = Vec::new();
    for pi in candidates {
        if leq(mu, &pi)? && leq(&pi, lambda)? {
            out.push(pi);
        }
    }
    out.sort();
    Ok(out)
}

fn non_increasing(n: usize, hi: i64, lo: i64, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
    if cur.len() == n {
        out.push(Weight(cur.clone()));
        return;
    }
    let top = cur.last().copied().unwrap_or(hi);
    for b in (lo..=top).rev() {
        cur.push(b);
        non_increasing(n, hi, lo, cur, out);
        cur.pop();
    }
}

fn prefix_scan(bounds: &[(i64, i64)], min_total: i64, max_total: i64, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
    let k = cur.len();
    if k == bounds.len() {
        let mut prev = 0;
        let coords = cur
            .iter()
            .map(|&s| {
                let b = s - prev;
                prev = s;
                b
            })
            .collect();
        out.push(Weight(coords));
        return;
    }
    let (mut lo, mut hi) = bounds[k];
    if k + 1 == bounds.len() {
        lo = lo.max(min_total);
        hi = hi.min(max_total);
    }
    for s in lo..=hi {
        cur.push(s);
        prefix_scan(bounds, min_total, max_total, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    #[test]
    fn small_cases() {
        assert!(leq(&w(&[1, 1]), &w(&[0, 0])).unwrap());
        assert!(!leq(&w(&[0, 0]), &w(&[1, 1])).unwrap());
        assert_eq!(ell(&w(&[1, 1]), &w(&[0, 0])).unwrap(), 1);
        assert!(leq(&w(&[0, 1, 1]), &w(&[0, 0, 0])).unwrap());
        assert_eq!(interval(&w(&[1, 1]), &w(&[0, 0]), true).unwrap(), vec![w(&[0, 0]), w(&[1, 1])]);
        assert_eq!(leq(&w(&[1]), &w(&[1, 2])), Err(WeightError::DimensionMismatch(1, 2)));
        assert!(matches!(ell(&w(&[0, 0]), &w(&[1, 1])), Err(WeightError::NotComparable(..))));
    }
}
