//! Dataset files.
//!
//! Two comma-separated schemas are accepted, detected from the header row:
//!
//! * estimates: `condition,mos,ci95[,n[,sd]]`, one row per condition; an
//!   empty `ci95` cell means the CI is unknown;
//! * votes: `condition,vote`, one row per individual vote.
//!
//! Lines starting with `#` are ignored. Row numbers in errors are 1-based
//! physical line numbers in the file.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::{compute_mos_estimate, CiMethod, Dataset, MosEstimate, OpinionVotes, Scale};

const ESTIMATE_COLUMNS: [&str; 5] = ["condition", "mos", "ci95", "n", "sd"];
const VOTE_COLUMNS: [&str; 2] = ["condition", "vote"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// Precomputed estimates with this many columns (3 to 5).
    Estimates(usize),
    Votes,
}

fn detect_schema(header: &csv::StringRecord) -> Option<Schema> {
    let cols: Vec<String> = header
        .iter()
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    if cols == VOTE_COLUMNS {
        return Some(Schema::Votes);
    }
    if (3..=5).contains(&cols.len()) && cols.iter().zip(ESTIMATE_COLUMNS).all(|(c, e)| c == e) {
        return Some(Schema::Estimates(cols.len()));
    }
    None
}

pub fn load_dataset(path: impl AsRef<Path>, scale: Scale, ci_method: CiMethod) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_dataset(file, path, scale, ci_method)
}

/// Parses a dataset from any reader; `path` is only used in error messages.
pub fn read_dataset<R: Read>(
    reader: R,
    path: &Path,
    scale: Scale,
    ci_method: CiMethod,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(path, e))?,
        None => {
            return Err(Error::UnknownSchema {
                path: path.to_owned(),
                header: String::new(),
            })
        }
    };
    let schema = detect_schema(&header).ok_or_else(|| Error::UnknownSchema {
        path: path.to_owned(),
        header: header.iter().collect::<Vec<_>>().join(","),
    })?;
    let width = match schema {
        Schema::Estimates(w) => w,
        Schema::Votes => 2,
    };

    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    };

    let mut estimates: Vec<MosEstimate> = Vec::new();
    let mut votes: Vec<(String, Vec<i64>)> = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(parse_err(
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let condition = rec[0].to_owned();
        if condition.is_empty() {
            return Err(parse_err(line, "empty condition id".into()));
        }
        match schema {
            Schema::Estimates(_) => {
                if estimates.iter().any(|e| e.condition_id == condition) {
                    return Err(parse_err(
                        line,
                        format!("duplicate condition `{condition}`"),
                    ));
                }
                let real = |field: &str, name: &str| -> Result<Option<f64>> {
                    if field.is_empty() {
                        return Ok(None);
                    }
                    field
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .map(Some)
                        .ok_or_else(|| {
                            parse_err(line, format!("{name}: `{field}` is not a number"))
                        })
                };
                let mos = real(&rec[1], "mos")?
                    .ok_or_else(|| parse_err(line, "mos is missing".into()))?;
                let ci95 = real(&rec[2], "ci95")?;
                let n = match rec.get(3).filter(|f| !f.is_empty()) {
                    Some(f) => Some(f.parse::<u32>().map_err(|_| {
                        parse_err(line, format!("n: `{f}` is not a positive integer"))
                    })?),
                    None => None,
                };
                let sd = match rec.get(4) {
                    Some(f) => real(f, "sd")?,
                    None => None,
                };
                let est = MosEstimate {
                    condition_id: condition,
                    mos,
                    ci95,
                    n,
                    sd,
                };
                est.validate().map_err(|e| parse_err(line, e.to_string()))?;
                estimates.push(est);
            }
            Schema::Votes => {
                let vote: i64 = rec[1].parse().map_err(|_| {
                    parse_err(line, format!("vote: `{}` is not an integer", &rec[1]))
                })?;
                if !scale.contains(vote) {
                    return Err(parse_err(
                        line,
                        format!("vote {vote} outside scale [{}, {}]", scale.lo, scale.hi),
                    ));
                }
                match votes.iter_mut().find(|(c, _)| *c == condition) {
                    Some((_, v)) => v.push(vote),
                    None => votes.push((condition, vec![vote])),
                }
            }
        }
    }

    if schema == Schema::Votes {
        estimates = votes
            .into_iter()
            .map(|(c, v)| {
                OpinionVotes::new(c, v, scale).map(|ov| compute_mos_estimate(&ov, ci_method))
            })
            .collect::<Result<_>>()?;
    }
    Dataset::new(estimates, scale)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_owned(),
        line,
        message: e.to_string(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the dataset in the estimates schema. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_dataset<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ESTIMATE_COLUMNS)?;
    for e in dataset.entries() {
        w.write_record([
            e.condition_id.clone(),
            e.mos.to_string(),
            opt(e.ci95),
            opt(e.n),
            opt(e.sd),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
