//! Run configuration from a TOML file and command-line flags.
//!
//! Every setting can appear as a flag (`--resolution 801`) or as a key of the
//! same name in the configuration file (`resolution = 801`). Flags win.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use fairfrontier_core::frontier::DEFAULT_RESOLUTION;
use fairfrontier_core::{FamilySpec, MetricWeights, OrientationChoice};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Analyses a run can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Analysis {
    /// `sweep.csv`, `frontier.csv` and `report.txt`.
    Frontier,
    /// `decomposition.csv`.
    Decomposition,
    /// `theorems.txt` and `theorems.json`.
    Theorems,
    /// SVG figures for the other requested analyses.
    Plots,
}

impl Analysis {
    pub const ALL: [Analysis; 4] = [
        Analysis::Frontier,
        Analysis::Decomposition,
        Analysis::Theorems,
        Analysis::Plots,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Frontier => "frontier",
            Analysis::Decomposition => "decomposition",
            Analysis::Theorems => "theorems",
            Analysis::Plots => "plots",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown analysis `{s}` (expected frontier, decomposition, theorems or plots)"
                ))
            })
    }
}

/// Raw settings shared by the flag parser and the configuration file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Preset name (see `scenarios`) or path to a scenario file.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Classifier family: shared-threshold, per-group-threshold or per-group-intervals.
    #[arg(long)]
    pub family: Option<String>,
    /// Orientation per group: positive-above, positive-below or both; one value applies to both groups.
    #[arg(long)]
    pub orientations: Option<String>,
    /// Grid points per parameter axis.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Maximum intervals per group for the per-group-intervals family.
    #[arg(long)]
    pub intervals: Option<usize>,
    /// Lower end of the sweep range (default: central 99.99% of the pooled law).
    #[arg(long, allow_hyphen_values = true)]
    pub range_lo: Option<f64>,
    /// Upper end of the sweep range.
    #[arg(long, allow_hyphen_values = true)]
    pub range_hi: Option<f64>,
    /// Weight of the TPR gap in the unfairness.
    #[arg(long)]
    pub omega1: Option<f64>,
    /// Weight of the TNR gap in the unfairness.
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Accuracy weight of positives.
    #[arg(long)]
    pub p1: Option<f64>,
    /// Accuracy weight of negatives.
    #[arg(long)]
    pub p2: Option<f64>,
    /// Use accuracy weights p1 = p2 = 1/2.
    #[arg(long)]
    #[serde(default)]
    pub half_accuracy_weights: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated analyses: frontier, decomposition, theorems, plots.
    #[arg(long)]
    pub analyses: Option<String>,
    /// Add the decomposition analysis.
    #[arg(long)]
    #[serde(default)]
    pub decompose: bool,
    /// Thresholds in the decomposition sweep.
    #[arg(long)]
    pub decomposition_points: Option<usize>,
    /// Seed for randomized steps.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum accuracy or fairness change that counts as a frontier jump.
    #[arg(long)]
    pub jump_threshold: Option<f64>,
    /// Skip writing sweep.csv.
    #[arg(long)]
    #[serde(default)]
    pub no_sweep_csv: bool,
    /// Largest sweep written to sweep.csv; 0 writes any size.
    #[arg(long)]
    pub sweep_csv_limit: Option<usize>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Parse {
            origin: path.display().to_string(),
            message: e.to_string().trim_end().to_owned(),
        })
    }

    /// Field-wise merge; values set in `self` win.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            scenario: self.scenario.or(base.scenario),
            family: self.family.or(base.family),
            orientations: self.orientations.or(base.orientations),
            resolution: self.resolution.or(base.resolution),
            intervals: self.intervals.or(base.intervals),
            range_lo: self.range_lo.or(base.range_lo),
            range_hi: self.range_hi.or(base.range_hi),
            omega1: self.omega1.or(base.omega1),
            omega2: self.omega2.or(base.omega2),
            p1: self.p1.or(base.p1),
            p2: self.p2.or(base.p2),
            half_accuracy_weights: self.half_accuracy_weights || base.half_accuracy_weights,
            out: self.out.or(base.out),
            analyses: self.analyses.or(base.analyses),
            decompose: self.decompose || base.decompose,
            decomposition_points: self.decomposition_points.or(base.decomposition_points),
            seed: self.seed.or(base.seed),
            jump_threshold: self.jump_threshold.or(base.jump_threshold),
            no_sweep_csv: self.no_sweep_csv || base.no_sweep_csv,
            sweep_csv_limit: self.sweep_csv_limit.or(base.sweep_csv_limit),
        }
    }

    /// Reads `config` (if any) and lays the flags over it.
    pub fn resolve(flags: Settings, config: Option<&Path>) -> Result<Settings> {
        match config {
            Some(path) => Ok(flags.over(Settings::from_file(path)?)),
            None => Ok(flags),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Preset name or scenario file path.
    pub scenario: String,
    pub family: FamilySpec,
    pub weights: MetricWeights,
    pub out: PathBuf,
    pub analyses: BTreeSet<Analysis>,
    pub seed: u64,
    pub jump_threshold: f64,
    pub decomposition_points: usize,
    pub sweep_csv: bool,
    /// Candidate count above which sweep.csv is skipped; 0 disables the cap.
    pub sweep_csv_limit: usize,
}

pub const DEFAULT_SCENARIO: &str = "example1";
pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_DECOMPOSITION_POINTS: usize = 1000;
pub const DEFAULT_SWEEP_CSV_LIMIT: usize = 250_000;
pub const DEFAULT_JUMP_THRESHOLD: f64 = 0.05;
pub const DEFAULT_INTERVALS: usize = 2;

fn parse_orientation(s: &str) -> Result<OrientationChoice> {
    match s.trim().replace('_', "-").as_str() {
        "positive-above" | "above" => Ok(OrientationChoice::PositiveAbove),
        "positive-below" | "below" => Ok(OrientationChoice::PositiveBelow),
        "both" => Ok(OrientationChoice::Both),
        other => Err(CliError::Config(format!(
            "unknown orientation `{other}` (expected positive-above, positive-below or both)"
        ))),
    }
}

/// `"both"` or `"both,positive-above"`.
pub fn parse_orientations(s: &str) -> Result<[OrientationChoice; 2]> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [one] => {
            let o = parse_orientation(one)?;
            Ok([o, o])
        }
        [a, b] => Ok([parse_orientation(a)?, parse_orientation(b)?]),
        _ => Err(CliError::Config(format!(
            "expected one or two orientations, got `{s}`"
        ))),
    }
}

/// Builds the family from its CLI name.
pub fn parse_family(
    name: &str,
    orientations: [OrientationChoice; 2],
    resolution: Option<usize>,
    intervals: Option<usize>,
) -> Result<FamilySpec> {
    let family = match name.replace('_', "-").as_str() {
        "shared-threshold" => FamilySpec::shared_threshold(orientations[0]),
        "per-group-threshold" => FamilySpec::per_group_threshold(orientations),
        "per-group-intervals" => FamilySpec::per_group_intervals(intervals.unwrap_or(DEFAULT_INTERVALS)),
        other => {
            return Err(CliError::Config(format!(
                "unknown family `{other}` (expected shared-threshold, per-group-threshold or per-group-intervals)"
            )))
        }
    };
    Ok(match resolution {
        Some(r) => family.with_resolution(r),
        None => family,
    })
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let orientations = parse_orientations(s.orientations.as_deref().unwrap_or("both"))?;
        let mut family = parse_family(
            s.family.as_deref().unwrap_or("shared-threshold"),
            orientations,
            s.resolution,
            s.intervals,
        )?;
        match (s.range_lo, s.range_hi) {
            (Some(lo), Some(hi)) => family = family.with_range(lo, hi),
            (None, None) => {}
            _ => {
                return Err(CliError::Config(
                    "range-lo and range-hi must be given together".into(),
                ))
            }
        }
        family.validate()?;

        let base = if s.half_accuracy_weights {
            MetricWeights::half_accuracy_weights()
        } else {
            MetricWeights::default()
        };
        let weights = MetricWeights::new(
            s.omega1.unwrap_or(base.omega1),
            s.omega2.unwrap_or(base.omega2),
            s.p1.unwrap_or(base.p1),
            s.p2.unwrap_or(base.p2),
        )?;

        let mut analyses: BTreeSet<Analysis> = match &s.analyses {
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(Analysis::parse)
                .collect::<Result<_>>()?,
            None => [Analysis::Frontier, Analysis::Theorems, Analysis::Plots].into(),
        };
        if s.decompose {
            analyses.insert(Analysis::Decomposition);
        }
        if analyses.is_empty() {
            return Err(CliError::Config("no analyses requested".into()));
        }

        let decomposition_points = s
            .decomposition_points
            .unwrap_or(DEFAULT_DECOMPOSITION_POINTS);
        if decomposition_points < 3 {
            return Err(CliError::Config(
                "decomposition-points must be at least 3".into(),
            ));
        }
        let jump_threshold = s.jump_threshold.unwrap_or(DEFAULT_JUMP_THRESHOLD);
        if !(jump_threshold.is_finite() && jump_threshold > 0.0) {
            return Err(CliError::Config("jump-threshold must be positive".into()));
        }

        Ok(RunConfig {
            scenario: s
                .scenario
                .clone()
                .unwrap_or_else(|| DEFAULT_SCENARIO.to_owned()),
            family,
            weights,
            out: s.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            analyses,
            seed: s.seed.unwrap_or(0),
            jump_threshold,
            decomposition_points,
            sweep_csv: !s.no_sweep_csv,
            sweep_csv_limit: s.sweep_csv_limit.unwrap_or(DEFAULT_SWEEP_CSV_LIMIT),
        })
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }
}

/// Default resolution of threshold families.
pub const THRESHOLD_RESOLUTION: usize = DEFAULT_RESOLUTION;

#[cfg(test)]
mod tests {
    use super::*;
    use fairfrontier_core::FamilyKind;

    #[test]
    fn defaults() {
        let c = RunConfig::from_settings(&Settings::default()).unwrap();
        assert_eq!(c.scenario, "example1");
        assert_eq!(c.family.kind, FamilyKind::SharedThreshold);
        assert_eq!(c.family.resolution, THRESHOLD_RESOLUTION);
        assert_eq!(c.weights, MetricWeights::default());
        assert!(c.wants(Analysis::Frontier) && !c.wants(Analysis::Decomposition));
    }

    #[test]
    fn flags_win_over_file() {
        let file: Settings = toml::from_str(
            "scenario = \"example3\"\nresolution = 101\nfamily = \"per-group-threshold\"\norientations = \"both,positive-above\"\nrange-lo = -5.0\nrange-hi = 15.0\n",
        )
        .unwrap();
        let flags = Settings {
            resolution: Some(201),
            decompose: true,
            ..Settings::default()
        };
        let c = RunConfig::from_settings(&flags.over(file)).unwrap();
        assert_eq!(c.scenario, "example3");
        assert_eq!(c.family.resolution, 201);
        assert_eq!(c.family.range, Some((-5.0, 15.0)));
        assert_eq!(
            c.family.orientations,
            [OrientationChoice::Both, OrientationChoice::PositiveAbove]
        );
        assert!(c.wants(Analysis::Decomposition));
    }

    #[test]
    fn rejects_bad_settings() {
        let bad = |s: Settings| RunConfig::from_settings(&s).unwrap_err().exit_code();
        assert_eq!(
            bad(Settings {
                family: Some("forest".into()),
                ..Default::default()
            }),
            2
        );
        assert_eq!(
            bad(Settings {
                resolution: Some(2),
                ..Default::default()
            }),
            2
        );
        assert_eq!(
            bad(Settings {
                omega1: Some(0.9),
                ..Default::default()
            }),
            2
        );
        assert_eq!(
            bad(Settings {
                analyses: Some(" ".into()),
                ..Default::default()
            }),
            2
        );
        assert_eq!(
            bad(Settings {
                range_lo: Some(1.0),
                ..Default::default()
            }),
            2
        );
        assert!(toml::from_str::<Settings>("colour = 3").is_err());
    }

    #[test]
    fn half_weights() {
        let s = Settings {
            half_accuracy_weights: true,
            ..Default::default()
        };
        let c = RunConfig::from_settings(&s).unwrap();
        assert_eq!((c.weights.p1, c.weights.p2), (0.5, 0.5));
    }
}
