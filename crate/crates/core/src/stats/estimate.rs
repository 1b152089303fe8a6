//! Per-condition MOS estimates and how they are derived from raw votes.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// Inclusive integer rating scale. Defaults to the 5-point ACR scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub lo: i64,
    pub hi: i64,
}

impl Scale {
    pub const ACR: Scale = Scale { lo: 1, hi: 5 };

    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidScale { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, vote: i64) -> bool {
        (self.lo..=self.hi).contains(&vote)
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.lo as f64, self.hi as f64)
    }
}

impl Default for Scale {
    fn default() -> Self {
        Self::ACR
    }
}

/// Quantile used to turn a standard error into a 95% CI half-width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    /// Student's t with n - 1 degrees of freedom.
    #[default]
    StudentT,
    /// Standard normal.
    Normal,
}

impl CiMethod {
    /// Two-sided 95% quantile (the 97.5th percentile) for `n` votes.
    /// `None` when `n < 2` under Student's t.
    pub fn quantile(self, n: usize) -> Option<f64> {
        match self {
            CiMethod::Normal => Some(
                Normal::new(0.0, 1.0)
                    .expect("standard normal")
                    .inverse_cdf(0.975),
            ),
            CiMethod::StudentT if n < 2 => None,
            CiMethod::StudentT => Some(
                StudentsT::new(0.0, 1.0, (n - 1) as f64)
                    .expect("positive degrees of freedom")
                    .inverse_cdf(0.975),
            ),
        }
    }
}

/// Raw opinion scores collected for one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVotes {
    condition_id: String,
    votes: Vec<i64>,
    scale: Scale,
}

impl OpinionVotes {
    pub fn new(condition_id: impl Into<String>, votes: Vec<i64>, scale: Scale) -> Result<Self> {
        let condition_id = condition_id.into();
        if votes.is_empty() {
            return Err(Error::EmptyVotes {
                condition: condition_id,
            });
        }
        if let Some(&vote) = votes.iter().find(|v| !scale.contains(**v)) {
            return Err(Error::VoteOutOfScale {
                condition: condition_id,
                vote,
                lo: scale.lo,
                hi: scale.hi,
            });
        }
        Ok(Self {
            condition_id,
            votes,
            scale,
        })
    }

    pub fn condition_id(&self) -> &str {
        &self.condition_id
    }

    pub fn votes(&self) -> &[i64] {
        &self.votes
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }
}

/// One condition's MOS together with its 95% CI half-width.
///
/// `ci95` is optional so that datasets used only for correlation can be
/// loaded without intervals; operations that need it report
/// [`Error::MissingCi`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosEstimate {
    pub condition_id: String,
    pub mos: f64,
    pub ci95: Option<f64>,
    pub n: Option<u32>,
    pub sd: Option<f64>,
}

impl MosEstimate {
    pub fn new(condition_id: impl Into<String>, mos: f64, ci95: Option<f64>) -> Result<Self> {
        let est = Self {
            condition_id: condition_id.into(),
            mos,
            ci95,
            n: None,
            sd: None,
        };
        est.validate()?;
        Ok(est)
    }

    /// Shorthand for an estimate with a known CI.
    pub fn with_ci(condition_id: impl Into<String>, mos: f64, ci95: f64) -> Result<Self> {
        Self::new(condition_id, mos, Some(ci95))
    }

    pub fn with_votes(mut self, n: Option<u32>, sd: Option<f64>) -> Result<Self> {
        self.n = n;
        self.sd = sd;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidEstimate {
            condition: self.condition_id.clone(),
            reason: reason.to_owned(),
        };
        if !self.mos.is_finite() {
            return Err(invalid("mos must be finite"));
        }
        if let Some(ci) = self.ci95 {
            if !(ci.is_finite() && ci >= 0.0) {
                return Err(invalid("ci95 must be finite and non-negative"));
            }
        }
        if let Some(sd) = self.sd {
            if !(sd.is_finite() && sd >= 0.0) {
                return Err(invalid("sd must be finite and non-negative"));
            }
        }
        if self.n == Some(0) {
            return Err(invalid("n must be at least 1"));
        }
        Ok(())
    }

    pub fn ci(&self) -> Result<f64> {
        self.ci95.ok_or_else(|| Error::MissingCi {
            condition: self.condition_id.clone(),
        })
    }

    /// True when the estimate came from a single vote, in which case the
    /// CI and SD were set to zero rather than computed.
    pub fn is_degenerate_ci(&self) -> bool {
        self.n == Some(1)
    }
}

/// Mean, sample SD (n - 1 denominator) and 95% CI half-width of a vote list.
pub fn compute_mos_estimate(votes: &OpinionVotes, method: CiMethod) -> MosEstimate {
    let n = votes.votes.len();
    let mean = votes.votes.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
    let (sd, ci95) = if n < 2 {
        (0.0, 0.0)
    } else {
        let ss: f64 = votes.votes.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        let q = method.quantile(n).expect("n >= 2");
        (sd, q * sd / (n as f64).sqrt())
    };
    MosEstimate {
        condition_id: votes.condition_id.clone(),
        mos: mean,
        ci95: Some(ci95),
        n: Some(n as u32),
        sd: Some(sd),
    }
}
