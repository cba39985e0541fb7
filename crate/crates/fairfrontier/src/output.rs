//! CSV artifacts.
//!
//! Reals are written in scientific notation with 17 significant digits, so
//! every value parses back to the identical `f64`. Infinite region endpoints
//! are written `inf` / `-inf`.
//!
//! Parameter columns shared by `sweep.csv` and `frontier.csv`:
//!
//! | column | meaning |
//! |---|---|
//! | `kind` | `shared_threshold`, `per_group_threshold`, `per_group_intervals`, `fairness_optimal` or `accuracy_optimal` |
//! | `threshold0`, `threshold1` | decision thresholds of groups 0 and 1 (threshold families only) |
//! | `orientation0`, `orientation1` | `positive_above` or `positive_below` (threshold families only) |
//! | `region0`, `region1` | positive regions as `[lo, hi) u ...` (other kinds only) |

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fairfrontier_core::frontier::ClassifierParams;
use fairfrontier_core::metrics::Decomposition;
use fairfrontier_core::{Frontier, FrontierPoint, IntervalSet, Orientation};

use crate::error::{CliError, Result};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const FRONTIER_CSV: &str = "frontier.csv";
pub const DECOMPOSITION_CSV: &str = "decomposition.csv";

const PARAM_COLUMNS: [&str; 7] = [
    "kind",
    "threshold0",
    "orientation0",
    "threshold1",
    "orientation1",
    "region0",
    "region1",
];

/// 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

pub fn parse_real(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

pub fn fmt_region(r: &IntervalSet) -> String {
    if r.is_empty() {
        return "{}".into();
    }
    r.intervals()
        .iter()
        .map(|&(lo, hi)| format!("[{}, {})", fmt_real(lo), fmt_real(hi)))
        .collect::<Vec<_>>()
        .join(" u ")
}

fn param_fields(p: &ClassifierParams) -> [String; 7] {
    let o = |o: &Orientation| o.name().to_owned();
    let kind = p.kind_name().to_owned();
    match p {
        ClassifierParams::SharedThreshold {
            threshold,
            orientation,
        } => [
            kind,
            fmt_real(*threshold),
            o(orientation),
            fmt_real(*threshold),
            o(orientation),
            String::new(),
            String::new(),
        ],
        ClassifierParams::PerGroupThreshold {
            thresholds,
            orientations,
        } => [
            kind,
            fmt_real(thresholds[0]),
            o(&orientations[0]),
            fmt_real(thresholds[1]),
            o(&orientations[1]),
            String::new(),
            String::new(),
        ],
        _ => {
            let c = p.classifier();
            let [r0, r1] = c.regions();
            [
                kind,
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt_region(r0),
                fmt_region(r1),
            ]
        }
    }
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file)))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

fn finish(path: &Path, mut w: csv::Writer<BufWriter<File>>) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))?;
    let inner = w
        .into_inner()
        .map_err(|e| CliError::io(path, std::io::Error::other(e.to_string())))?;
    inner
        .into_inner()
        .map_err(|e| CliError::io(path, e.into_error()))?
        .sync_all()
        .map_err(|e| CliError::io(path, e))
}

/// Per-candidate decomposition columns of `sweep.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepExtras {
    pub f_du: f64,
    pub f_mu: f64,
    pub well_defined: bool,
}

pub fn write_sweep(
    path: &Path,
    candidates: &[FrontierPoint],
    extras: &[SweepExtras],
) -> Result<()> {
    assert_eq!(
        candidates.len(),
        extras.len(),
        "one extras row per candidate"
    );
    let mut w = create(path)?;
    let header = PARAM_COLUMNS.iter().copied().chain([
        "fairness",
        "accuracy",
        "f_u",
        "f_du",
        "f_mu",
        "well_defined",
    ]);
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for (c, x) in candidates.iter().zip(extras) {
        let mut row: Vec<String> = param_fields(&c.params).into();
        row.extend([
            fmt_real(c.fairness),
            fmt_real(c.accuracy),
            fmt_real(c.f_u),
            fmt_real(x.f_du),
            fmt_real(x.f_mu),
            x.well_defined.to_string(),
        ]);
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

pub fn write_frontier(path: &Path, frontier: &Frontier) -> Result<()> {
    let mut w = create(path)?;
    let header = ["fairness", "accuracy", "f_u"]
        .into_iter()
        .chain(PARAM_COLUMNS)
        .chain(["on_jump"]);
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for (i, p) in frontier.points.iter().enumerate() {
        let mut row = vec![fmt_real(p.fairness), fmt_real(p.accuracy), fmt_real(p.f_u)];
        row.extend(param_fields(&p.params));
        row.push(frontier.on_jump(i).to_string());
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

/// One threshold of the decomposition sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionRow {
    pub threshold: f64,
    pub orientation: Orientation,
    pub d: Decomposition,
}

pub fn write_decomposition(path: &Path, rows: &[DecompositionRow]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record([
        "threshold",
        "orientation",
        "f_u",
        "f_du",
        "f_mu",
        "residual",
        "well_defined",
        "condition",
        "equality_holds",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in rows {
        let d = &r.d;
        w.write_record([
            fmt_real(r.threshold),
            r.orientation.name().to_owned(),
            fmt_real(d.f_u),
            fmt_real(d.f_du),
            fmt_real(d.f_mu),
            fmt_real(d.residual),
            d.well_defined.to_string(),
            d.condition_met.map_or("none", |c| c.name()).to_owned(),
            d.equality_holds.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

/// Writes `text` to `path` in one piece.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| CliError::io(path, e))
}
