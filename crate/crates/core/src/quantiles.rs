//! One-round distributed quantiles.
//!
//! Every site ships the exact `ε/2`-quantiles of its local values together
//! with its local count. Each shipped entry stands for `n_i / |Q_i|` ranks, so
//! the coordinator can bound the number of union values below any candidate
//! and answer rank queries to within `(ε/2) Σ n_i`.

use crate::coordsim::Payload;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct QuantileSummary {
    pub site: usize,
    /// Local value count `n_i`.
    pub count: usize,
    /// Sorted local quantiles; all local values when `count` is small.
    pub values: Vec<f64>,
}

impl QuantileSummary {
    /// Ranks represented by one entry as the fraction `(count, len)`.
    fn weight(&self) -> (u128, u128) {
        if self.values.is_empty() {
            (0, 1)
        } else {
            let g = gcd(self.count as u128, self.values.len() as u128);
            (self.count as u128 / g, self.values.len() as u128 / g)
        }
    }

    /// Rank estimate `n_i(v) · n_i / |Q_i|` where `n_i(v)` counts entries
    /// strictly below `v`.
    pub fn rank_below(&self, v: f64) -> f64 {
        let below = self.values.partition_point(|&q| q < v);
        if below == 0 {
            return 0.0;
        }
        below as f64 * self.count as f64 / self.values.len() as f64
    }
}

/// The count and the summary values travel together.
impl Payload for QuantileSummary {
    fn words(&self) -> u64 {
        1 + self.values.len() as u64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// `⌈2/ε⌉`, without letting `2/(1/d)` round up to `2d + 1`.
pub fn summary_len(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let m = 2.0 / epsilon;
    let nearest = m.round();
    let len = if (m - nearest).abs() <= 1e-9 * m.max(1.0) { nearest } else { m.ceil() };
    if len > usize::MAX as f64 / 4.0 {
        return Err(Error::parameter(format!("epsilon {epsilon} is too small")));
    }
    Ok(len.max(1.0) as usize)
}

/// Exact local quantiles: with `m = ⌈2/ε⌉`, the entries at 1-based ranks
/// `⌈j n / m⌉` for `j = 1..=m`. When `n <= m` every value is shipped.
pub fn local_summary(site: usize, sorted_values: &[f64], epsilon: f64) -> Result<QuantileSummary> {
    debug_assert!(sorted_values.windows(2).all(|w| w[0] <= w[1]));
    let m = summary_len(epsilon)?;
    let n = sorted_values.len();
    let values =
        if n <= m { sorted_values.to_vec() } else { (1..=m).map(|j| sorted_values[(j * n).div_ceil(m) - 1]).collect() };
    Ok(QuantileSummary { site, count: n, values })
}

/// Largest candidate `v` (a summary value, or `-∞`) whose estimated rank
/// `Σ_i rank_i(v)` does not exceed `beta`.
///
/// Estimates are compared exactly: every entry weight is a ratio of counts,
/// so the sums are evaluated over a common denominator.
pub fn answer_rank(summaries: &[QuantileSummary], beta: u64) -> f64 {
    let weights: Vec<(u128, u128)> = summaries.iter().map(QuantileSummary::weight).collect();
    let lcm = weights.iter().try_fold(1u128, |acc, &(_, den)| acc.checked_mul(den / gcd(acc, den)));
    match lcm {
        Some(lcm) if (beta as u128).checked_mul(lcm).is_some() => answer_exact(summaries, &weights, beta, lcm),
        _ => answer_float(summaries, beta),
    }
}

fn answer_exact(summaries: &[QuantileSummary], weights: &[(u128, u128)], beta: u64, lcm: u128) -> f64 {
    let mut entries: Vec<(f64, u128)> = summaries
        .iter()
        .zip(weights)
        .flat_map(|(s, &(num, den))| s.values.iter().map(move |&v| (v, num * (lcm / den))))
        .collect();
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let limit = beta as u128 * lcm;

    let mut best = f64::NEG_INFINITY;
    let mut below: u128 = 0;
    let mut i = 0;
    while i < entries.len() {
        let v = entries[i].0;
        if below > limit {
            break;
        }
        best = v;
        while i < entries.len() && entries[i].0 == v {
            below = below.saturating_add(entries[i].1);
            i += 1;
        }
    }
    best
}

fn answer_float(summaries: &[QuantileSummary], beta: u64) -> f64 {
    let mut candidates: Vec<f64> = summaries.iter().flat_map(|s| s.values.iter().copied()).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let est = |v: f64| summaries.iter().map(|s| s.rank_below(v)).sum::<f64>();
    let upto = candidates.partition_point(|&v| est(v) <= beta as f64);
    if upto == 0 {
        f64::NEG_INFINITY
    } else {
        candidates[upto - 1]
    }
}

/// Integer rank targets `⌊j N / d⌋` for `j = 1..d`.
pub fn strip_targets(total: usize, strips: usize) -> Vec<u64> {
    (1..strips).map(|j| ((j as u128 * total as u128) / strips as u128) as u64).collect()
}

/// The `d - 1` split values that cut the x-axis into `d` strips, computed
/// from summaries built with `ε = 1/d`. Strip `j` covers
/// `(b_{j-1}, b_j]`; the last strip is unbounded on the right.
pub fn strip_boundaries(summaries: &[QuantileSummary], strips: usize) -> Result<Vec<f64>> {
    if strips == 0 {
        return Err(Error::parameter("strip count must be at least 1"));
    }
    let total = summaries.iter().map(|s| s.count).sum();
    Ok(strip_targets(total, strips).into_iter().map(|beta| answer_rank(summaries, beta)).collect())
}

/// Zero-based strip holding `x`.
pub fn strip_of(boundaries: &[f64], x: f64) -> usize {
    boundaries.partition_point(|&b| b < x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_to(n: usize) -> Vec<f64> {
        (1..=n).map(|v| v as f64).collect()
    }

    #[test]
    fn summary_examples() {
        assert_eq!(local_summary(0, &one_to(8), 0.5).unwrap().values, vec![2.0, 4.0, 6.0, 8.0]);
        assert_eq!(local_summary(0, &[5.0], 0.1).unwrap().values, vec![5.0]);
        assert_eq!(local_summary(0, &one_to(100), 2.0).unwrap().values, vec![100.0]);
        assert!(local_summary(0, &[], 0.5).unwrap().values.is_empty());
        assert!(local_summary(0, &[1.0], 0.0).is_err());
        assert_eq!(summary_len(1.0 / 3.0).unwrap(), 6);
        assert_eq!(summary_len(1.0 / 49.0).unwrap(), 98);
    }

    #[test]
    fn answer_examples() {
        let q = [local_summary(0, &one_to(8), 0.5).unwrap()];
        // Estimates: 2 -> 0, 4 -> 2, 6 -> 4, 8 -> 6.
        assert_eq!(answer_rank(&q, 4), 6.0);
        assert_eq!(answer_rank(&q, 3), 4.0);
        assert_eq!(answer_rank(&q, 0), 2.0);
        assert_eq!(answer_rank(&[], 0), f64::NEG_INFINITY);
        assert_eq!(answer_float(&q, 4), 6.0);
    }

    #[test]
    fn full_rank_query_returns_the_maximum() {
        // Two sites with disjoint ranges, exhaustively over the split point.
        for split in 0..=20 {
            let all = one_to(20);
            let (a, b) = all.split_at(split);
            let qs = [local_summary(0, a, 0.25).unwrap(), local_summary(1, b, 0.25).unwrap()];
            assert_eq!(answer_rank(&qs, 20), 20.0);
        }
    }

    #[test]
    fn boundary_examples() {
        let q = [local_summary(0, &one_to(8), 0.5).unwrap()];
        assert!(strip_boundaries(&q, 1).unwrap().is_empty());
        let median = strip_boundaries(&q, 2).unwrap();
        let rank = one_to(8).iter().filter(|&&v| v < median[0]).count() as i64;
        assert!((rank - 4).abs() <= 2, "median {median:?} has rank {rank}");

        // Lossless summaries give exact quantiles.
        let data = one_to(12);
        let q = [local_summary(0, &data, 1.0 / 12.0).unwrap()];
        let b = strip_boundaries(&q, 12).unwrap();
        assert_eq!(b, (2..=12).map(|v| v as f64).collect::<Vec<_>>());
        assert_eq!(strip_of(&b, 1.0), 0);
        assert_eq!(strip_of(&b, 2.0), 0);
        assert_eq!(strip_of(&b, 2.5), 1);
        assert_eq!(strip_of(&b, 100.0), 11);
    }

    fn sites_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, usize)> {
        (proptest::collection::vec(proptest::collection::btree_set(0u32..100_000, 0..300), 1..6), 1usize..20).prop_map(
            |(sets, d)| {
                // Make values distinct across sites by tagging with the site index.
                let sites = sets
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| s.into_iter().map(|v| v as f64 * 8.0 + i as f64).collect())
                    .collect();
                (sites, d)
            },
        )
    }

    proptest! {
        #[test]
        fn rank_guarantee((sites, d) in sites_strategy()) {
            let eps = 1.0 / d as f64;
            let qs: Vec<_> = sites.iter().enumerate().map(|(i, v)| local_summary(i, v, eps).unwrap()).collect();
            let all: Vec<f64> = sites.concat();
            let n = all.len();
            let bounds = strip_boundaries(&qs, d).unwrap();
            prop_assert!(bounds.windows(2).all(|w| w[0] <= w[1]));
            for (b, target) in bounds.iter().zip(strip_targets(n, d)) {
                let rank = all.iter().filter(|&&v| v < *b).count() as f64;
                prop_assert!((rank - target as f64).abs() <= n as f64 / (2.0 * d as f64));
            }
            let mut per_strip = vec![0usize; d];
            for &v in &all {
                per_strip[strip_of(&bounds, v)] += 1;
            }
            if d <= n {
                prop_assert!(per_strip.iter().all(|&c| c as f64 <= 2.0 * n as f64 / d as f64));
            }
        }
    }
}
