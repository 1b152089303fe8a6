//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::load_dataset;
use crate::report::{num, opt_num, Document, Format, Table};
use crate::simulation::{
    sigma_range, Execution, NoiseStudy, NoiseStudyConfig, NoisyCi, TransformSide,
};
use crate::stats::{gap_analysis, max_delta_rho, srcc, CiMethod, Dataset, Scale};
use crate::transform::build_tie_groups;

/// Environment variable that overrides the default output format.
pub const FORMAT_ENV: &str = "MOS_TIES_FORMAT";

#[derive(Debug, Parser)]
#[command(
    name = "mos-ties",
    version,
    about = "Tied-rank aware analysis of MOS data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, env = FORMAT_ENV, default_value = "table")]
    format: Format,

    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Lowest valid vote.
    #[arg(
        long,
        global = true,
        default_value_t = 1,
        allow_negative_numbers = true
    )]
    scale_lo: i64,

    /// Highest valid vote.
    #[arg(
        long,
        global = true,
        default_value_t = 5,
        allow_negative_numbers = true
    )]
    scale_hi: i64,

    /// Quantile used for CIs computed from raw votes.
    #[arg(long, global = true, value_enum, default_value = "student-t")]
    ci_method: CiMethodArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CiMethodArg {
    StudentT,
    Normal,
}

impl From<CiMethodArg> for CiMethod {
    fn from(a: CiMethodArg) -> Self {
        match a {
            CiMethodArg::StudentT => CiMethod::StudentT,
            CiMethodArg::Normal => CiMethod::Normal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NoisyCiArg {
    Original,
    Zero,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Both,
    TrueOnly,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replace MOS values by their tie-group value.
    Transform {
        #[arg(long)]
        input: PathBuf,
        /// Include group membership in the output.
        #[arg(long)]
        report_groups: bool,
    },
    /// Spearman's rank correlation between two datasets, matched by condition id.
    Srcc {
        #[arg(long)]
        input_a: PathBuf,
        #[arg(long)]
        input_b: PathBuf,
        /// Also report the coefficient on transformed values.
        #[arg(long)]
        transform: bool,
    },
    /// Upper bound on the coefficient change from m unrecognised ties.
    MaxEffect {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m_max: usize,
    },
    /// Gaps between consecutive conditions in MOS order, compared with their CIs.
    Gaps {
        #[arg(long)]
        input: PathBuf,
    },
    /// Noise-robustness simulation.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    sigma_start: f64,
    #[arg(long, default_value_t = 0.5)]
    sigma_stop: f64,
    #[arg(long, default_value_t = 0.01)]
    sigma_step: f64,
    #[arg(long, default_value_t = 1000)]
    runs: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Keep only the k highest-MOS conditions.
    #[arg(long)]
    top_k: Option<usize>,
    /// Clamp noisy MOS to the rating scale.
    #[arg(long)]
    clamp: bool,
    #[arg(long, value_enum, default_value = "original")]
    noisy_ci: NoisyCiArg,
    #[arg(long, value_enum, default_value = "both")]
    transform_side: SideArg,
    /// Worker threads (0 = rayon default). Does not affect results.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Evaluate runs on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status: 0 on success, 1 on input errors,
/// 2 when a statistic is undefined.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_degenerate() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let scale = Scale::new(cli.common.scale_lo, cli.common.scale_hi)?;
    let ci_method = CiMethod::from(cli.common.ci_method);
    let load = |p: &Path| -> Result<Dataset> {
        let d = load_dataset(p, scale, ci_method)?;
        for e in d.entries().iter().filter(|e| e.is_degenerate_ci()) {
            eprintln!(
                "warning: `{}` has a single vote; its CI is set to 0",
                e.condition_id
            );
        }
        Ok(d)
    };

    let mut doc = match &cli.command {
        Command::Transform {
            input,
            report_groups,
        } => transform_doc(&load(input)?, input, *report_groups)?,
        Command::Srcc {
            input_a,
            input_b,
            transform,
        } => srcc_doc(
            &load(input_a)?,
            &load(input_b)?,
            input_a,
            input_b,
            *transform,
        )?,
        Command::MaxEffect { n, m_max } => max_effect_doc(*n, *m_max)?,
        Command::Gaps { input } => gaps_doc(&load(input)?, input)?,
        Command::Simulate(args) => simulate_doc(&load(&args.input)?, args)?,
    };
    if !matches!(cli.command, Command::MaxEffect { .. }) {
        doc.config
            .insert("scale".into(), json!([scale.lo, scale.hi]));
        doc.config.insert(
            "ci_method".into(),
            serde_json::to_value(ci_method).expect("enum serialises"),
        );
    }

    let text = doc.render(cli.common.format)?;
    match &cli.common.output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(())
}

fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

fn transform_doc(dataset: &Dataset, input: &Path, report_groups: bool) -> Result<Document> {
    let grouping = build_tie_groups(dataset)?;
    let transformed = grouping.transformed();
    for &(a, b) in grouping.rounding_collisions() {
        eprintln!(
            "warning: tie groups {} and {} round to the same value {}",
            a + 1,
            b + 1,
            grouping.groups()[a].transformed_value
        );
    }

    let mut doc = Document::new("transform");
    doc.config.insert("input".into(), path_value(input));
    doc.config
        .insert("report_groups".into(), report_groups.into());
    doc.summary
        .insert("conditions".into(), dataset.len().into());
    doc.summary
        .insert("groups".into(), grouping.groups().len().into());
    doc.summary.insert(
        "rounding_collisions".into(),
        grouping.rounding_collisions().len().into(),
    );

    let mut columns = vec!["condition", "mos", "ci95", "transformed"];
    if report_groups {
        columns.push("group");
    }
    doc.table = Table::new(columns);
    let mut rows = Vec::new();
    for (i, e) in dataset.entries().iter().enumerate() {
        let mut row = vec![
            e.condition_id.clone(),
            num(e.mos),
            opt_num(e.ci95),
            num(transformed[i]),
        ];
        let mut obj = json!({
            "condition": e.condition_id,
            "mos": e.mos,
            "ci95": e.ci95,
            "transformed": transformed[i],
        });
        if report_groups {
            let g = grouping.group_of(i) + 1;
            row.push(g.to_string());
            obj["group"] = g.into();
        }
        doc.table.push(row);
        rows.push(obj);
    }
    doc.result = json!({ "conditions": rows });
    if report_groups {
        doc.result["groups"] = serde_json::to_value(grouping.groups())?;
        doc.result["rounding_collisions"] = grouping
            .rounding_collisions()
            .iter()
            .map(|&(a, b)| json!([a + 1, b + 1]))
            .collect();
    }
    Ok(doc)
}

/// Reorders `b` to match `a`'s condition ids.
fn align(a: &Dataset, b: &Dataset) -> Result<Dataset> {
    let only_a: Vec<String> = a
        .entries()
        .iter()
        .filter(|e| b.position(&e.condition_id).is_none())
        .map(|e| e.condition_id.clone())
        .collect();
    let only_b: Vec<String> = b
        .entries()
        .iter()
        .filter(|e| a.position(&e.condition_id).is_none())
        .map(|e| e.condition_id.clone())
        .collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(Error::UnmatchedIds { only_a, only_b });
    }
    let entries = a
        .entries()
        .iter()
        .map(|e| b.entries()[b.position(&e.condition_id).expect("matched")].clone())
        .collect();
    Dataset::new(entries, b.scale())
}

fn srcc_doc(
    a: &Dataset,
    b: &Dataset,
    path_a: &Path,
    path_b: &Path,
    with_transform: bool,
) -> Result<Document> {
    let b = align(a, b)?;
    let raw = srcc(&a.mos_values(), &b.mos_values())?;
    let transformed = if with_transform {
        let ta = crate::transform::transform_mos(a)?;
        let tb = crate::transform::transform_mos(&b)?;
        Some(srcc(&ta, &tb)?)
    } else {
        None
    };

    let mut doc = Document::new("srcc");
    doc.config.insert("input_a".into(), path_value(path_a));
    doc.config.insert("input_b".into(), path_value(path_b));
    doc.config.insert("transform".into(), with_transform.into());
    doc.summary.insert("conditions".into(), a.len().into());
    doc.table = Table::new(["variant", "srcc"]);
    doc.table.push(vec!["raw".into(), num(raw)]);
    let mut result = json!({ "conditions": a.len(), "srcc_raw": raw });
    if let Some(t) = transformed {
        doc.table.push(vec!["transformed".into(), num(t)]);
        result["srcc_transformed"] = t.into();
    }
    doc.result = result;
    Ok(doc)
}

fn max_effect_doc(n: usize, m_max: usize) -> Result<Document> {
    let mut doc = Document::new("max-effect");
    doc.config.insert("n".into(), n.into());
    doc.config.insert("m_max".into(), m_max.into());
    doc.table = Table::new(["m", "max_delta_rho"]);
    let mut rows = Vec::new();
    for m in 0..=m_max {
        let v = max_delta_rho(n, m)?;
        doc.table.push(vec![m.to_string(), num(v)]);
        rows.push(json!({ "m": m, "max_delta_rho": v }));
    }
    doc.result = json!({ "rows": rows });
    Ok(doc)
}

fn gaps_doc(dataset: &Dataset, input: &Path) -> Result<Document> {
    let report = gap_analysis(dataset)?;
    let mut doc = Document::new("gaps");
    doc.config.insert("input".into(), path_value(input));
    doc.summary
        .insert("pairs".into(), report.pairs.len().into());
    doc.summary.insert(
        "fraction_within_ci".into(),
        report.fraction_within_ci.into(),
    );
    doc.table = Table::new([
        "upper",
        "lower",
        "gap",
        "ci95_upper",
        "ci95_lower",
        "within_ci",
    ]);
    for p in &report.pairs {
        doc.table.push(vec![
            p.upper.clone(),
            p.lower.clone(),
            num(p.gap),
            num(p.ci95_upper),
            num(p.ci95_lower),
            p.within_ci.to_string(),
        ]);
    }
    doc.result = serde_json::to_value(&report)?;
    Ok(doc)
}

fn simulate_doc(dataset: &Dataset, args: &SimulateArgs) -> Result<Document> {
    let config = NoiseStudyConfig {
        sigma_grid: sigma_range(args.sigma_start, args.sigma_stop, args.sigma_step)?,
        runs_per_sigma: args.runs,
        seed: args.seed,
        clamp_to_scale: args.clamp,
        top_k: args.top_k,
        noisy_ci: match args.noisy_ci {
            NoisyCiArg::Original => NoisyCi::Original,
            NoisyCiArg::Zero => NoisyCi::Zero,
        },
        transform_side: match args.transform_side {
            SideArg::Both => TransformSide::Both,
            SideArg::TrueOnly => TransformSide::TrueOnly,
        },
    };
    let study = NoiseStudy::new(dataset, &config)?;
    let result = execute_study(&study, args)?;
    for r in &result.records {
        if r.degenerate_run_count_raw == r.runs || r.degenerate_run_count_transformed == r.runs {
            eprintln!(
                "warning: sigma {}: every run degenerate (raw {}, transformed {})",
                r.sigma, r.degenerate_run_count_raw, r.degenerate_run_count_transformed
            );
        }
    }

    let mut doc = Document::new("simulate");
    doc.config.insert("input".into(), path_value(&args.input));
    doc.config
        .insert("sigma_start".into(), args.sigma_start.into());
    doc.config
        .insert("sigma_stop".into(), args.sigma_stop.into());
    doc.config
        .insert("sigma_step".into(), args.sigma_step.into());
    doc.config.insert("runs".into(), args.runs.into());
    doc.config.insert("seed".into(), args.seed.into());
    doc.config.insert("top_k".into(), json!(args.top_k));
    doc.config.insert("clamp".into(), args.clamp.into());
    doc.config
        .insert("noisy_ci".into(), serde_json::to_value(config.noisy_ci)?);
    doc.config.insert(
        "transform_side".into(),
        serde_json::to_value(config.transform_side)?,
    );
    doc.summary
        .insert("conditions".into(), result.conditions.len().into());
    doc.table = Table::new([
        "sigma",
        "runs",
        "max_delta_raw",
        "max_delta_transformed",
        "max_raw_vs_transformed",
        "degenerate_raw",
        "degenerate_transformed",
    ]);
    for r in &result.records {
        doc.table.push(vec![
            num(r.sigma),
            r.runs.to_string(),
            num(r.max_delta_raw),
            num(r.max_delta_transformed),
            num(r.max_raw_vs_transformed),
            r.degenerate_run_count_raw.to_string(),
            r.degenerate_run_count_transformed.to_string(),
        ]);
    }
    doc.result = serde_json::to_value(&result)?;
    Ok(doc)
}

#[cfg(feature = "parallel")]
fn execute_study(
    study: &NoiseStudy<'_>,
    args: &SimulateArgs,
) -> Result<crate::simulation::NoiseStudyResult> {
    if args.sequential {
        return study.execute(Execution::Sequential);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| study.execute(Execution::Parallel))
}

#[cfg(not(feature = "parallel"))]
fn execute_study(
    study: &NoiseStudy<'_>,
    _args: &SimulateArgs,
) -> Result<crate::simulation::NoiseStudyResult> {
    study.execute(Execution::Sequential)
}
