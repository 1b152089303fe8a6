//! Monte Carlo study of how stable Spearman's coefficient is when the MOS
//! values are perturbed by white Gaussian noise, with and without the tie
//! transformation.
//!
//! Every (sigma, run) cell draws from its own ChaCha8 stream derived from
//! the master seed, so results do not depend on how cells are scheduled.
//! With the `parallel` feature the cells are evaluated on the rayon pool;
//! the reduction (max and counts) is order independent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{srcc, Dataset};
use crate::transform::transform_mos;

/// Which CI accompanies a noisy MOS when the noisy vector is transformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisyCi {
    /// Reuse the condition's original CI.
    #[default]
    Original,
    /// Zero-width CIs: noisy values tie only on exact equality.
    Zero,
}

/// Which vectors are transformed in the transformed pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformSide {
    /// Transform the true and the noisy vector independently.
    #[default]
    Both,
    /// Transform only the true vector; compare against the raw noisy one.
    TrueOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseStudyConfig {
    pub sigma_grid: Vec<f64>,
    pub runs_per_sigma: u32,
    pub seed: u64,
    pub clamp_to_scale: bool,
    pub top_k: Option<usize>,
    pub noisy_ci: NoisyCi,
    pub transform_side: TransformSide,
}

impl Default for NoiseStudyConfig {
    fn default() -> Self {
        Self {
            sigma_grid: sigma_range(0.01, 0.5, 0.01).expect("valid default grid"),
            runs_per_sigma: 1000,
            seed: 42,
            clamp_to_scale: false,
            top_k: None,
            noisy_ci: NoisyCi::Original,
            transform_side: TransformSide::Both,
        }
    }
}

impl NoiseStudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_grid.is_empty() {
            return Err(Error::InvalidConfig("sigma grid is empty".into()));
        }
        if self
            .sigma_grid
            .iter()
            .any(|s| !(s.is_finite() && *s >= 0.0))
        {
            return Err(Error::InvalidConfig(
                "sigma values must be finite and non-negative".into(),
            ));
        }
        if self.sigma_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "sigma grid must be strictly ascending".into(),
            ));
        }
        if self.sigma_grid.len() > u32::MAX as usize {
            return Err(Error::InvalidConfig("sigma grid too long".into()));
        }
        if self.runs_per_sigma == 0 {
            return Err(Error::InvalidConfig(
                "runs per sigma must be at least 1".into(),
            ));
        }
        if self.top_k == Some(0) {
            return Err(Error::InvalidConfig("top-k must be at least 1".into()));
        }
        Ok(())
    }
}

/// `start, start + step, ...` up to and including `stop` (within half a
/// step), each value rounded to 10 decimals to avoid accumulation noise.
pub fn sigma_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(Error::InvalidConfig(format!(
            "invalid sigma range start={start} stop={stop} step={step}"
        )));
    }
    let count = ((stop - start) / step + 0.5).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
        .collect())
}

/// Generator seed for one simulation cell.
///
/// The master seed keys a ChaCha8 generator and the cell selects one of
/// its 2^64 streams: `stream = sigma_index << 32 | run_index`. Distinct
/// cells therefore never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RunSeed {
    pub master: u64,
    pub stream: u64,
}

impl RunSeed {
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

pub fn derive_seed(master_seed: u64, sigma_index: u32, run_index: u32) -> RunSeed {
    RunSeed {
        master: master_seed,
        stream: (u64::from(sigma_index) << 32) | u64::from(run_index),
    }
}

/// Adds i.i.d. N(0, sigma²) noise to `mos`.
pub fn noisy_mos(mos: &[f64], sigma: f64, seed: RunSeed) -> Vec<f64> {
    let mut rng = seed.rng();
    let normal = Normal::new(0.0, sigma).expect("sigma validated non-negative");
    mos.iter().map(|m| m + normal.sample(&mut rng)).collect()
}

/// Outcome of one simulation cell. `None` marks a degenerate correlation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub noisy: Vec<f64>,
    pub srcc_raw: Option<f64>,
    pub srcc_transformed: Option<f64>,
}

impl RunOutcome {
    pub fn delta_raw(&self) -> Option<f64> {
        self.srcc_raw.map(|r| 1.0 - r)
    }

    pub fn delta_transformed(&self) -> Option<f64> {
        self.srcc_transformed.map(|r| 1.0 - r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaRecord {
    pub sigma: f64,
    pub runs: u32,
    /// Largest `1 - srcc(true, noisy)` over non-degenerate runs; 0 if none.
    pub max_delta_raw: f64,
    /// Same, on transformed vectors.
    pub max_delta_transformed: f64,
    /// Largest `|srcc_raw - srcc_transformed|` over runs where both exist.
    pub max_raw_vs_transformed: f64,
    pub degenerate_run_count_raw: u32,
    pub degenerate_run_count_transformed: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseStudyResult {
    pub conditions: Vec<String>,
    pub records: Vec<SigmaRecord>,
}

/// How simulation cells are scheduled. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

fn degenerate_as_none(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_degenerate() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Precomputed state shared by every cell of a study.
pub struct NoiseStudy<'a> {
    dataset: Dataset,
    config: &'a NoiseStudyConfig,
    true_mos: Vec<f64>,
    true_transformed: Vec<f64>,
}

impl<'a> NoiseStudy<'a> {
    pub fn new(dataset: &Dataset, config: &'a NoiseStudyConfig) -> Result<Self> {
        config.validate()?;
        let dataset = match config.top_k {
            Some(k) => dataset.top_k(k)?,
            None => dataset.clone(),
        };
        dataset.require_len(3)?;
        let true_transformed = transform_mos(&dataset)?;
        Ok(Self {
            true_mos: dataset.mos_values(),
            true_transformed,
            dataset,
            config,
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn run(&self, sigma_index: u32, run_index: u32) -> Result<RunOutcome> {
        let sigma = self.config.sigma_grid[sigma_index as usize];
        let seed = derive_seed(self.config.seed, sigma_index, run_index);
        let mut noisy = noisy_mos(&self.true_mos, sigma, seed);
        if self.config.clamp_to_scale {
            let scale = self.dataset.scale();
            noisy.iter_mut().for_each(|m| *m = scale.clamp(*m));
        }

        let srcc_raw = degenerate_as_none(srcc(&self.true_mos, &noisy))?;
        let noisy_side = match self.config.transform_side {
            TransformSide::Both => {
                let mut noisy_ds = self.dataset.with_mos(&noisy)?;
                if self.config.noisy_ci == NoisyCi::Zero {
                    noisy_ds = zero_cis(&noisy_ds)?;
                }
                transform_mos(&noisy_ds)?
            }
            TransformSide::TrueOnly => noisy.clone(),
        };
        let srcc_transformed = degenerate_as_none(srcc(&self.true_transformed, &noisy_side))?;
        Ok(RunOutcome {
            noisy,
            srcc_raw,
            srcc_transformed,
        })
    }

    pub fn execute(&self, execution: Execution) -> Result<NoiseStudyResult> {
        let runs = self.config.runs_per_sigma;
        let cells = self.config.sigma_grid.len() * runs as usize;
        let cell = |c: usize| {
            let (s, r) = ((c / runs as usize) as u32, (c % runs as usize) as u32);
            self.run(s, r).map(|o| (o.srcc_raw, o.srcc_transformed))
        };
        let outcomes: Vec<(Option<f64>, Option<f64>)> = match execution {
            Execution::Sequential => (0..cells).map(cell).collect::<Result<_>>()?,
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..cells)
                .into_par_iter()
                .map(cell)
                .collect::<Result<_>>()?,
        };

        let records = self
            .config
            .sigma_grid
            .iter()
            .zip(outcomes.chunks(runs as usize))
            .map(|(&sigma, chunk)| summarise(sigma, chunk))
            .collect();
        Ok(NoiseStudyResult {
            conditions: self
                .dataset
                .entries()
                .iter()
                .map(|e| e.condition_id.clone())
                .collect(),
            records,
        })
    }
}

fn zero_cis(dataset: &Dataset) -> Result<Dataset> {
    let entries = dataset
        .entries()
        .iter()
        .map(|e| crate::stats::MosEstimate {
            ci95: Some(0.0),
            ..e.clone()
        })
        .collect();
    Dataset::new(entries, dataset.scale())
}

fn summarise(sigma: f64, chunk: &[(Option<f64>, Option<f64>)]) -> SigmaRecord {
    let mut rec = SigmaRecord {
        sigma,
        runs: chunk.len() as u32,
        max_delta_raw: 0.0,
        max_delta_transformed: 0.0,
        max_raw_vs_transformed: 0.0,
        degenerate_run_count_raw: 0,
        degenerate_run_count_transformed: 0,
    };
    for &(raw, transformed) in chunk {
        match raw {
            Some(r) => rec.max_delta_raw = rec.max_delta_raw.max(1.0 - r),
            None => rec.degenerate_run_count_raw += 1,
        }
        match transformed {
            Some(t) => rec.max_delta_transformed = rec.max_delta_transformed.max(1.0 - t),
            None => rec.degenerate_run_count_transformed += 1,
        }
        if let (Some(r), Some(t)) = (raw, transformed) {
            rec.max_raw_vs_transformed = rec.max_raw_vs_transformed.max((r - t).abs());
        }
    }
    rec
}

/// Runs the study with the default execution strategy.
pub fn run_noise_study(dataset: &Dataset, config: &NoiseStudyConfig) -> Result<NoiseStudyResult> {
    run_noise_study_with(dataset, config, Execution::default())
}

pub fn run_noise_study_with(
    dataset: &Dataset,
    config: &NoiseStudyConfig,
    execution: Execution,
) -> Result<NoiseStudyResult> {
    NoiseStudy::new(dataset, config)?.execute(execution)
}

/// Ten conditions at MOS 4.50, 4.49, ..., 4.41, each with CI 0.2.
pub fn near_tied_dataset() -> Dataset {
    let entries = (0..10)
        .map(|i| {
            crate::stats::MosEstimate::with_ci(
                format!("c{:02}", i + 1),
                (450 - i) as f64 / 100.0,
                0.2,
            )
        })
        .collect::<Result<Vec<_>>>()
        .expect("valid estimates");
    Dataset::new(entries, Default::default()).expect("unique ids")
}
