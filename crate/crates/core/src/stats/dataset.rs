use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::estimate::{MosEstimate, Scale};
use crate::error::{Error, Result};

/// Ordered collection of per-condition estimates sharing one rating scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    entries: Vec<MosEstimate>,
    scale: Scale,
}

impl Dataset {
    pub fn new(entries: Vec<MosEstimate>, scale: Scale) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            e.validate()?;
            if !seen.insert(e.condition_id.as_str()) {
                return Err(Error::DuplicateCondition(e.condition_id.clone()));
            }
        }
        Ok(Self { entries, scale })
    }

    /// Builds a dataset on the ACR scale from `(id, mos, ci95)` triples.
    pub fn from_triples<'a, I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64, f64)>,
    {
        let entries = triples
            .into_iter()
            .map(|(id, mos, ci)| MosEstimate::with_ci(id, mos, ci))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries, Scale::ACR)
    }

    pub fn entries(&self) -> &[MosEstimate] {
        &self.entries
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mos_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.mos).collect()
    }

    /// CI half-widths in entry order; fails on the first missing one.
    pub fn ci_values(&self) -> Result<Vec<f64>> {
        self.entries.iter().map(MosEstimate::ci).collect()
    }

    pub fn require_len(&self, needed: usize) -> Result<()> {
        if self.len() < needed {
            return Err(Error::TooFewConditions {
                needed,
                got: self.len(),
            });
        }
        Ok(())
    }

    pub fn position(&self, condition_id: &str) -> Option<usize> {
        self.entries
            .iter()
            .position(|e| e.condition_id == condition_id)
    }

    /// Entry indices sorted by MOS descending; equal MOS keeps entry order.
    pub fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.entries[b].mos.total_cmp(&self.entries[a].mos));
        order
    }

    /// Same dataset with every MOS replaced, keeping ids, CIs and scale.
    pub fn with_mos(&self, mos: &[f64]) -> Result<Self> {
        if mos.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: mos.len(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(mos)
            .map(|(e, &m)| MosEstimate {
                mos: m,
                ..e.clone()
            })
            .collect();
        Self::new(entries, self.scale)
    }

    /// The `k` highest-MOS conditions, in descending MOS order.
    pub fn top_k(&self, k: usize) -> Result<Self> {
        let entries = self
            .descending_order()
            .into_iter()
            .take(k)
            .map(|i| self.entries[i].clone())
            .collect();
        Self::new(entries, self.scale)
    }
}
