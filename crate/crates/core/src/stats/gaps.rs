use serde::Serialize;

use super::dataset::Dataset;
use crate::error::Result;

/// Two conditions adjacent in descending MOS order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapPair {
    pub upper: String,
    pub lower: String,
    pub gap: f64,
    pub ci95_upper: f64,
    pub ci95_lower: f64,
    /// `gap < max(ci95_upper, ci95_lower)`.
    pub within_ci: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub pairs: Vec<GapPair>,
    /// CI half-widths in descending MOS order.
    pub ci95: Vec<f64>,
    /// Share of consecutive pairs whose gap is smaller than at least one
    /// of the two CIs.
    pub fraction_within_ci: f64,
}

impl GapReport {
    pub fn gaps(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.gap).collect()
    }
}

/// Gaps between consecutive conditions in descending MOS order.
pub fn gap_analysis(dataset: &Dataset) -> Result<GapReport> {
    dataset.require_len(2)?;
    let cis = dataset.ci_values()?;
    let order = dataset.descending_order();
    let entries = dataset.entries();

    let pairs: Vec<GapPair> = order
        .windows(2)
        .map(|w| {
            let (hi, lo) = (&entries[w[0]], &entries[w[1]]);
            let (ci_hi, ci_lo) = (cis[w[0]], cis[w[1]]);
            let gap = (hi.mos - lo.mos).abs();
            GapPair {
                upper: hi.condition_id.clone(),
                lower: lo.condition_id.clone(),
                gap,
                ci95_upper: ci_hi,
                ci95_lower: ci_lo,
                within_ci: gap < ci_hi.max(ci_lo) - super::MOS_EPSILON,
            }
        })
        .collect();
    let within = pairs.iter().filter(|p| p.within_ci).count();
    let fraction_within_ci = within as f64 / pairs.len() as f64;

    Ok(GapReport {
        ci95: order.iter().map(|&i| cis[i]).collect(),
        pairs,
        fraction_within_ci,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::error::Error;
    use crate::stats::{MosEstimate, Scale};

    #[test]
    fn single_tied_pair() {
        let d = Dataset::from_triples([("A", 4.0, 0.2), ("B", 3.9, 0.05)]).unwrap();
        let r = gap_analysis(&d).unwrap();
        assert_abs_diff_eq!(r.gaps()[0], 0.1, epsilon = 1e-12);
        assert_eq!(r.fraction_within_ci, 1.0);
    }

    #[test]
    fn separated_pair() {
        let d = Dataset::from_triples([("A", 4.0, 0.05), ("B", 3.0, 0.05)]).unwrap();
        let r = gap_analysis(&d).unwrap();
        assert_eq!(r.gaps(), vec![1.0]);
        assert_eq!(r.fraction_within_ci, 0.0);
    }

    #[test]
    fn mixed_pairs_sorted_descending() {
        let d =
            Dataset::from_triples([("C", 3.0, 0.1), ("A", 4.0, 0.1), ("B", 3.95, 0.02)]).unwrap();
        let r = gap_analysis(&d).unwrap();
        let gaps = r.gaps();
        assert_abs_diff_eq!(gaps[0], 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(gaps[1], 0.95, epsilon = 1e-12);
        assert_eq!(r.fraction_within_ci, 0.5);
        assert_eq!(
            (r.pairs[0].upper.as_str(), r.pairs[0].lower.as_str()),
            ("A", "B")
        );
        assert_eq!(r.ci95, vec![0.1, 0.02, 0.1]);
    }

    #[test]
    fn needs_cis() {
        let d = Dataset::new(
            vec![
                MosEstimate::with_ci("a", 3.0, 0.1).unwrap(),
                MosEstimate::new("b", 2.0, None).unwrap(),
            ],
            Scale::ACR,
        )
        .unwrap();
        assert!(matches!(gap_analysis(&d), Err(Error::MissingCi { .. })));
    }
}
