//! Closed-form error in Spearman's coefficient caused by tied ranks that
//! were not recognised as ties.
//!
//! Both formulas are stated in terms of the rank-difference coefficient
//! `1 - 6 Σd² / (n(n² - 1))` (see [`rank_difference_coefficient`]).
//!
//! [`rank_difference_coefficient`]: crate::stats::rank_difference_coefficient

use crate::error::{Error, Result};

fn normaliser(n: usize) -> f64 {
    let n = n as f64;
    6.0 / (n * (n * n - 1.0))
}

/// Change in the coefficient between vectors `A` and `B` when the items at
/// ranks `k` and `k + 1` of `B` are re-ranked as a tie at `k + 0.5`.
///
/// `rank_a_i` and `rank_a_j` are the ranks in `A` of the items that sit at
/// rank `k` and `k + 1` of `B` respectively.
pub fn delta_rho_missed_tie(n: usize, rank_a_i: f64, rank_a_j: f64, k: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, "n >= 2"));
    }
    if !(1..n).contains(&k) {
        return Err(Error::out_of_range("k", k, format!("1 <= k <= {}", n - 1)));
    }
    let bounds = 1.0..=n as f64;
    for (name, r) in [("rank_a_i", rank_a_i), ("rank_a_j", rank_a_j)] {
        if !bounds.contains(&r) {
            return Err(Error::out_of_range(name, r, format!("1 <= rank <= {n}")));
        }
    }
    let k = k as f64;
    let d_i = rank_a_i - k;
    let d_j = rank_a_j - (k + 1.0);
    let dt_i = rank_a_i - (k + 0.5);
    let dt_j = rank_a_j - (k + 0.5);
    Ok((normaliser(n) * (d_i * d_i + d_j * d_j - dt_i * dt_i - dt_j * dt_j)).abs())
}

/// Largest change in the coefficient from `m` unrecognised two-item ties
/// among `n` conditions: `6m(n - m - 0.5) / (n(n² - 1))`.
///
/// The bound is attained, and holds, when `A` orders every missed pair the
/// same way `B` does. A pair that `A` orders the other way can move the
/// coefficient further (by up to `6(n - 0.5) / (n(n² - 1))` for `m = 1`).
pub fn max_delta_rho(n: usize, m: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, "n >= 2"));
    }
    if m > n - 1 {
        return Err(Error::out_of_range("m", m, format!("0 <= m <= {}", n - 1)));
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok(normaliser(n) * mf * (nf - mf - 0.5))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::stats::{rank_difference_coefficient, srcc};

    /// A, B and B' with the pair at positions 0 and 1; remaining positions
    /// take the unused ranks in ascending order.
    fn explicit_vectors(
        n: usize,
        a_i: usize,
        a_j: usize,
        k: usize,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let fill = |first: usize, second: usize| -> Vec<f64> {
            let mut v = vec![first as f64, second as f64];
            v.extend(
                (1..=n)
                    .filter(|&r| r != first && r != second)
                    .map(|r| r as f64),
            );
            v
        };
        let a = fill(a_i, a_j);
        let b = fill(k, k + 1);
        let mut b_tied = b.clone();
        b_tied[0] = k as f64 + 0.5;
        b_tied[1] = k as f64 + 0.5;
        (a, b, b_tied)
    }

    #[test]
    fn adjacent_ranks() {
        let d = delta_rho_missed_tie(10, 3.0, 4.0, 3).unwrap();
        assert_abs_diff_eq!(d, 6.0 * 0.5 / 990.0, epsilon = 1e-15);
    }

    #[test]
    fn cancelling_ranks() {
        // d_i² - d'_i² + d_j² - d'_j² = rank_a_i - rank_a_j + 0.5
        assert_eq!(delta_rho_missed_tie(10, 5.0, 5.5, 5).unwrap(), 0.0);
        assert_abs_diff_eq!(
            delta_rho_missed_tie(10, 5.5, 5.5, 5).unwrap(),
            3.0 / 990.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn extreme_ranks_match_explicit_vectors() {
        let d = delta_rho_missed_tie(10, 1.0, 10.0, 1).unwrap();
        let (a, b, bt) = explicit_vectors(10, 1, 10, 1);
        let brute = (rank_difference_coefficient(&a, &b).unwrap()
            - rank_difference_coefficient(&a, &bt).unwrap())
        .abs();
        assert_abs_diff_eq!(d, brute, epsilon = 1e-12);
        assert_abs_diff_eq!(d, 51.0 / 990.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(delta_rho_missed_tie(1, 1.0, 1.0, 1).is_err());
        assert!(delta_rho_missed_tie(10, 1.0, 2.0, 0).is_err());
        assert!(delta_rho_missed_tie(10, 1.0, 2.0, 10).is_err());
        assert!(delta_rho_missed_tie(10, 0.5, 2.0, 3).is_err());
        assert!(delta_rho_missed_tie(10, 1.0, 11.0, 3).is_err());
        assert!(max_delta_rho(10, 10).is_err());
        assert!(max_delta_rho(1, 0).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(max_delta_rho(10, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(max_delta_rho(10, 1).unwrap(), 51.0 / 990.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            max_delta_rho(10, 4).unwrap(),
            132.0 / 990.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn bound_decreases_in_n() {
        for m in 1..=4usize {
            let start = 2 * m + 1;
            for n in start..200 {
                assert!(max_delta_rho(n + 1, m).unwrap() < max_delta_rho(n, m).unwrap());
            }
        }
    }

    #[test]
    fn closed_form_matches_rank_difference_exhaustively() {
        for n in 2..=6usize {
            for a_i in 1..=n {
                for a_j in (1..=n).filter(|&r| r != a_i) {
                    for k in 1..n {
                        let (a, b, bt) = explicit_vectors(n, a_i, a_j, k);
                        let brute = (rank_difference_coefficient(&a, &b).unwrap()
                            - rank_difference_coefficient(&a, &bt).unwrap())
                        .abs();
                        let closed = delta_rho_missed_tie(n, a_i as f64, a_j as f64, k).unwrap();
                        assert!(
                            (closed - brute).abs() < 1e-12,
                            "n={n} a_i={a_i} a_j={a_j} k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_differs_from_tie_corrected_srcc() {
        // The tie in B' shrinks its rank variance, which the rank-difference
        // form ignores.
        let (a, b, bt) = explicit_vectors(10, 3, 4, 3);
        let pearson = (srcc(&a, &b).unwrap() - srcc(&a, &bt).unwrap()).abs();
        let closed = delta_rho_missed_tie(10, 3.0, 4.0, 3).unwrap();
        assert!((pearson - closed).abs() > 1e-6);
    }

    /// Random A, B; merge `m` disjoint consecutive rank pairs of B.
    /// Returns (delta, every pair concordant in A).
    fn random_merge(rng: &mut impl Rng, n: usize, m: usize) -> Option<(f64, bool)> {
        let mut a: Vec<f64> = (1..=n).map(|r| r as f64).collect();
        let mut b = a.clone();
        a.shuffle(rng);
        b.shuffle(rng);
        let mut ks: Vec<usize> = (1..n).collect();
        ks.shuffle(rng);
        let mut used = vec![false; n + 2];
        let mut chosen = Vec::new();
        for k in ks {
            if chosen.len() == m {
                break;
            }
            if !used[k] && !used[k + 1] {
                used[k] = true;
                used[k + 1] = true;
                chosen.push(k);
            }
        }
        if chosen.len() < m {
            return None;
        }
        let pos = |rank: usize| b.iter().position(|&x| x == rank as f64).unwrap();
        let concordant = chosen.iter().all(|&k| a[pos(k)] < a[pos(k + 1)]);
        let mut merged = b.clone();
        for &k in &chosen {
            merged[pos(k)] = k as f64 + 0.5;
            merged[pos(k + 1)] = k as f64 + 0.5;
        }
        let delta = (rank_difference_coefficient(&a, &b).unwrap()
            - rank_difference_coefficient(&a, &merged).unwrap())
        .abs();
        Some((delta, concordant))
    }

    #[test]
    fn bound_holds_for_concordant_missed_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..50_000 {
            let n = rng.random_range(3..=10);
            let m = rng.random_range(1..=n / 2);
            if let Some((delta, true)) = random_merge(&mut rng, n, m) {
                assert!(
                    delta <= max_delta_rho(n, m).unwrap() + 1e-12,
                    "n={n} m={m} delta={delta}"
                );
                checked += 1;
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn bound_is_attained() {
        // Pairs (1, n), (2, n-1), ... in A mapped to consecutive ranks of B.
        for n in 4..=12usize {
            for m in 1..=n / 2 {
                let mut a = vec![0.0; n];
                let mut b = vec![0.0; n];
                let mut next_free = 2 * m + 1;
                for t in 0..m {
                    a[2 * t] = (t + 1) as f64;
                    a[2 * t + 1] = (n - t) as f64;
                    b[2 * t] = (2 * t + 1) as f64;
                    b[2 * t + 1] = (2 * t + 2) as f64;
                }
                for (p, value) in a.iter_mut().enumerate().skip(2 * m) {
                    *value = (m + 1 + (p - 2 * m)) as f64;
                    b[p] = next_free as f64;
                    next_free += 1;
                }
                let mut merged = b.clone();
                for t in 0..m {
                    merged[2 * t] = (2 * t + 1) as f64 + 0.5;
                    merged[2 * t + 1] = (2 * t + 1) as f64 + 0.5;
                }
                let delta = (rank_difference_coefficient(&a, &b).unwrap()
                    - rank_difference_coefficient(&a, &merged).unwrap())
                .abs();
                assert_abs_diff_eq!(delta, max_delta_rho(n, m).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn discordant_pair_exceeds_bound() {
        let d = delta_rho_missed_tie(10, 10.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(d, 57.0 / 990.0, epsilon = 1e-12);
        assert!(d > max_delta_rho(10, 1).unwrap());
    }
}
