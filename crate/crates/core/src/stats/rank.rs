//! Fractional ranking and Spearman's rank correlation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ascending fractional ranks (1-based, ties averaged) aligned to the
/// input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankVector(Vec<f64>);

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Zero variance: every element shares one rank.
    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

impl std::ops::Index<usize> for RankVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Ranks `values` ascending; exactly equal values share the mean of the
/// ranks they span.
pub fn fractional_ranks(values: &[f64]) -> RankVector {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    RankVector(ranks)
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFewConditions {
            needed: 2,
            got: a.len(),
        });
    }
    Ok(())
}

/// Pearson product-moment correlation of two equally long samples.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of the fractional
/// ranks, which stays exact when either input contains ties.
pub fn srcc(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let ra = fractional_ranks(a);
    let rb = fractional_ranks(b);
    pearson(ra.as_slice(), rb.as_slice())
}

/// The rank-difference form `1 - 6 Σd² / (n(n² - 1))` on fractional ranks.
///
/// Identical to [`srcc`] for tie-free inputs. With ties it omits the
/// variance correction; the missed-tie formulas in
/// [`crate::stats::missed_tie`] are expressed in terms of this form.
pub fn rank_difference_coefficient(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let ra = fractional_ranks(a);
    let rb = fractional_ranks(b);
    let n = a.len() as f64;
    let sum_d2: f64 = ra
        .as_slice()
        .iter()
        .zip(rb.as_slice())
        .map(|(x, y)| (x - y).powi(2))
        .sum();
    Ok(1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0)))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn ranks_without_ties() {
        assert_eq!(
            fractional_ranks(&[10.0, 20.0, 30.0]).as_slice(),
            [1.0, 2.0, 3.0]
        );
        assert_eq!(
            fractional_ranks(&[30.0, 10.0, 20.0]).as_slice(),
            [3.0, 1.0, 2.0]
        );
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(
            fractional_ranks(&[10.0, 20.0, 20.0, 30.0]).as_slice(),
            [1.0, 2.5, 2.5, 4.0]
        );
        assert_eq!(
            fractional_ranks(&[5.0, 5.0, 5.0]).as_slice(),
            [2.0, 2.0, 2.0]
        );
        assert!(fractional_ranks(&[5.0, 5.0, 5.0]).is_constant());
    }

    #[test]
    fn srcc_known_values() {
        assert_eq!(srcc(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(srcc(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap(), -1.0);
        assert_abs_diff_eq!(
            srcc(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(),
            0.8,
            epsilon = 1e-12
        );
    }

    #[test]
    fn srcc_errors() {
        assert!(matches!(
            srcc(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        ));
        assert!(matches!(
            srcc(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]),
            Err(Error::UndefinedCorrelation)
        ));
        assert!(matches!(
            srcc(&[1.0], &[1.0]),
            Err(Error::TooFewConditions { .. })
        ));
    }

    #[test]
    fn srcc_with_ties_matches_pearson_on_averaged_ranks() {
        // ranks a = [1, 2.5, 2.5, 4], b = [1, 2, 3, 4]
        // cov = 4.5, var_a = 4.5, var_b = 5 -> 4.5 / sqrt(22.5)
        let r = srcc(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(r, 4.5 / 22.5f64.sqrt(), epsilon = 1e-12);
    }

    fn distinct(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::btree_set(-1000i32..1000, n)
            .prop_map(|s| s.into_iter().map(f64::from).collect::<Vec<_>>())
            .prop_shuffle()
    }

    proptest! {
        #[test]
        fn rank_sum_is_triangular(values in prop::collection::vec(0u8..6, 1..40)) {
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let ranks = fractional_ranks(&values);
            let n = values.len() as f64;
            prop_assert_eq!(ranks.as_slice().iter().sum::<f64>(), n * (n + 1.0) / 2.0);
            prop_assert!(ranks.as_slice().iter().all(|&r| (1.0..=n).contains(&r)));
        }

        #[test]
        fn srcc_symmetric(pair in (2usize..25).prop_flat_map(|n| {
            let v = prop::collection::vec(0u8..8, n);
            (v.clone(), v)
        })) {
            let a: Vec<f64> = pair.0.into_iter().map(f64::from).collect();
            let b: Vec<f64> = pair.1.into_iter().map(f64::from).collect();
            match (srcc(&a, &b), srcc(&b, &a)) {
                (Ok(x), Ok(y)) => prop_assert!((x - y).abs() <= 1e-12),
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "asymmetric outcome {:?}", other),
            }
        }

        #[test]
        fn srcc_monotone_invariant(a in distinct(2..25), shift in -5.0f64..5.0) {
            let b: Vec<f64> = a.iter().rev().cloned().collect();
            let a_t: Vec<f64> = a.iter().map(|x| (x / 100.0).exp() + shift).collect();
            let b_t: Vec<f64> = b.iter().map(|x| x.powi(3)).collect();
            let r = srcc(&a, &b).unwrap();
            prop_assert!((r - srcc(&a_t, &b).unwrap()).abs() <= 1e-12);
            prop_assert!((r - srcc(&a, &b_t).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn pearson_on_ranks_matches_rank_difference_without_ties(
            (a, b) in (2usize..25).prop_flat_map(|n| (distinct(n..n + 1), distinct(n..n + 1)))
        ) {
            let r = srcc(&a, &b).unwrap();
            let s = rank_difference_coefficient(&a, &b).unwrap();
            prop_assert!((r - s).abs() <= 1e-12, "{} vs {}", r, s);
        }
    }
}
