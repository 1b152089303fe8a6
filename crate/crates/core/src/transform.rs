//! Confidence-interval based tie grouping of MOS values.
//!
//! Two conditions tie when at least one MOS lies inside the other's 95% CI,
//! i.e. `|mos_a - mos_b| <= max(ci_a, ci_b)`. Conditions are visited in
//! descending MOS order and grouped greedily:
//!
//! * a condition joins the most recent group only if it ties with every
//!   member of that group;
//! * if it could join that group but also ties with the next lower
//!   condition, and that condition cannot join them all, it goes with
//!   whichever neighbour is closer in MOS (the upper one on equal distance);
//! * otherwise it opens a new group.
//!
//! Conditions with exactly equal MOS always tie and are placed as a unit.
//! Each group takes the mean MOS of its members, rounded half away from
//! zero to two fraction digits.

use serde::Serialize;

use crate::error::Result;
pub use crate::stats::MOS_EPSILON;
use crate::stats::{Dataset, MosEstimate};

/// Tie predicate on two (MOS, CI half-width) pairs. Boundary inclusive.
pub fn ties(mos_a: f64, ci_a: f64, mos_b: f64, ci_b: f64) -> bool {
    (mos_a - mos_b).abs() <= ci_a.max(ci_b) + MOS_EPSILON
}

pub fn is_tied_pair(a: &MosEstimate, b: &MosEstimate) -> Result<bool> {
    Ok(ties(a.mos, a.ci()?, b.mos, b.ci()?))
}

/// Rounds half away from zero to two fraction digits, using the shortest
/// decimal representation of `x` so that e.g. `4.445` becomes `4.45`.
pub fn round_mos(x: f64) -> f64 {
    if !x.is_finite() || x.abs() >= 1e15 {
        return x;
    }
    let text = format!("{}", x.abs());
    let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
    if frac_part.len() <= 2 {
        return x;
    }
    let int: i64 = int_part.parse().expect("decimal digits");
    let frac = frac_part.as_bytes();
    let mut hundredths = int * 100 + i64::from(frac[0] - b'0') * 10 + i64::from(frac[1] - b'0');
    if frac[2] >= b'5' {
        hundredths += 1;
    }
    (hundredths as f64 / 100.0).copysign(x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TieGroup {
    pub member_ids: Vec<String>,
    /// Entry indices into the source dataset, in processing order.
    #[serde(skip)]
    pub members: Vec<usize>,
    /// Unrounded mean of the members' MOS.
    pub mean_mos: f64,
    pub transformed_value: f64,
}

/// Partition of a dataset into tie groups, ordered by descending MOS.
#[derive(Debug, Clone, Serialize)]
pub struct TieGrouping<'a> {
    #[serde(skip)]
    source: &'a Dataset,
    groups: Vec<TieGroup>,
    /// Group index of each entry, in dataset order.
    #[serde(skip)]
    assignment: Vec<usize>,
    /// Pairs of adjacent groups whose rounded values coincide; they will
    /// share a rank downstream even though they are distinct groups.
    rounding_collisions: Vec<(usize, usize)>,
}

impl<'a> TieGrouping<'a> {
    pub fn source(&self) -> &'a Dataset {
        self.source
    }

    pub fn groups(&self) -> &[TieGroup] {
        &self.groups
    }

    pub fn group_of(&self, entry: usize) -> usize {
        self.assignment[entry]
    }

    pub fn rounding_collisions(&self) -> &[(usize, usize)] {
        &self.rounding_collisions
    }

    /// Transformed MOS per entry, in dataset order.
    pub fn transformed(&self) -> Vec<f64> {
        self.assignment
            .iter()
            .map(|&g| self.groups[g].transformed_value)
            .collect()
    }

    /// Re-checks the partition and pairwise tie coherence of every group.
    /// Returns human-readable descriptions of any violation.
    pub fn verify(&self) -> Vec<String> {
        let entries = self.source.entries();
        let mut problems = Vec::new();
        let mut seen = vec![0usize; entries.len()];
        for (gi, group) in self.groups.iter().enumerate() {
            if group.members.is_empty() {
                problems.push(format!("group {gi} is empty"));
            }
            for (pos, &a) in group.members.iter().enumerate() {
                seen[a] += 1;
                for &b in &group.members[pos + 1..] {
                    let (ea, eb) = (&entries[a], &entries[b]);
                    if !matches!(is_tied_pair(ea, eb), Ok(true)) {
                        problems.push(format!(
                            "group {gi}: `{}` and `{}` do not tie",
                            ea.condition_id, eb.condition_id
                        ));
                    }
                }
            }
        }
        for (i, count) in seen.into_iter().enumerate() {
            if count != 1 {
                problems.push(format!(
                    "`{}` appears in {count} groups",
                    entries[i].condition_id
                ));
            }
        }
        problems
    }
}

/// Groups the dataset's conditions into CI-based tie groups.
pub fn build_tie_groups(dataset: &Dataset) -> Result<TieGrouping<'_>> {
    dataset.require_len(1)?;
    let cis = dataset.ci_values()?;
    let entries = dataset.entries();
    let mos = |i: usize| entries[i].mos;
    let tie = |a: usize, b: usize| ties(mos(a), cis[a], mos(b), cis[b]);
    let ties_all = |xs: &[usize], ys: &[usize]| xs.iter().all(|&x| ys.iter().all(|&y| tie(x, y)));

    // Runs of exactly equal MOS in descending order.
    let order = dataset.descending_order();
    let blocks: Vec<&[usize]> = order.chunk_by(|&a, &b| mos(a) == mos(b)).collect();

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (bi, &block) in blocks.iter().enumerate() {
        let value = mos(block[0]);
        let join = match groups.last() {
            Some(current) if ties_all(block, current) => match blocks.get(bi + 1) {
                Some(&next) if ties_all(block, next) => {
                    let together: Vec<usize> = current.iter().chain(block).copied().collect();
                    if ties_all(next, &together) {
                        true
                    } else {
                        let up = mos(*current.last().expect("non-empty group")) - value;
                        let down = value - mos(next[0]);
                        up <= down + MOS_EPSILON
                    }
                }
                _ => true,
            },
            _ => false,
        };
        match groups.last_mut() {
            Some(current) if join => current.extend_from_slice(block),
            _ => groups.push(block.to_vec()),
        }
    }

    let mut assignment = vec![0; entries.len()];
    let groups: Vec<TieGroup> = groups
        .into_iter()
        .enumerate()
        .map(|(gi, members)| {
            for &m in &members {
                assignment[m] = gi;
            }
            let mean_mos = members.iter().map(|&m| mos(m)).sum::<f64>() / members.len() as f64;
            TieGroup {
                member_ids: members
                    .iter()
                    .map(|&m| entries[m].condition_id.clone())
                    .collect(),
                members,
                mean_mos,
                transformed_value: round_mos(mean_mos),
            }
        })
        .collect();
    let rounding_collisions = (1..groups.len())
        .filter(|&g| groups[g - 1].transformed_value == groups[g].transformed_value)
        .map(|g| (g - 1, g))
        .collect();

    Ok(TieGrouping {
        source: dataset,
        groups,
        assignment,
        rounding_collisions,
    })
}

/// Transformed MOS per condition, aligned with the dataset's entry order.
pub fn transform_mos(dataset: &Dataset) -> Result<Vec<f64>> {
    build_tie_groups(dataset).map(|g| g.transformed())
}
