//! The `run`, `check`, `oracle` and `scenarios` commands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fairfrontier_core::classifiers::{self, BayesScope, ClassifierConfig};
use fairfrontier_core::frontier::{self, ShapeThresholds};
use fairfrontier_core::metrics;
use fairfrontier_core::oracle::{self, McEstimate};
use fairfrontier_core::theorems::TheoremReport;
use fairfrontier_core::{
    Executor, FamilySpec, GroupConditionalModel, GroupwiseClassifier, MetricWeights, Orientation,
    OrientationChoice, ScenarioId,
};
use log::info;

use crate::analysis::{boundary_of, optimum_markers, Analyzed};
use crate::config::{Analysis, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{self, DecompositionRow};
use crate::plot::{
    self, Figure, Series, Style, Vertical, ACCURACY_OPTIMUM_COLOR, FAIRNESS_OPTIMUM_COLOR,
};
use crate::scenario_file;

pub const REPORT_TXT: &str = "report.txt";
pub const THEOREMS_TXT: &str = "theorems.txt";
pub const THEOREMS_JSON: &str = "theorems.json";

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#ff7f0e", "#9467bd"];
/// Most points drawn in a scatter of a large sweep.
const SCATTER_POINTS: usize = 5000;

/// Everything a `run` produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub analyzed: Analyzed,
    pub decomposition: Vec<DecompositionRow>,
    pub reports: Vec<TheoremReport>,
    /// Written files, in creation order.
    pub files: Vec<PathBuf>,
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Config(format!(
            "output directory {} is not writable: {e}",
            dir.display()
        ))
    })?;
    let probe = dir.join(".fairfrontier-write-test");
    std::fs::write(&probe, b"").map_err(|e| {
        CliError::Config(format!(
            "output directory {} is not writable: {e}",
            dir.display()
        ))
    })?;
    let _ = std::fs::remove_file(probe);
    Ok(())
}

pub fn reports_text(reports: &[TheoremReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(s, "{r}");
    }
    s
}

pub fn reports_json(reports: &[TheoremReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

pub fn frontier_figure(a: &Analyzed, scenario: &str) -> Figure {
    let points = a
        .frontier
        .points
        .iter()
        .map(|p| (p.fairness, p.accuracy))
        .collect();
    Figure {
        title: format!("{scenario}: frontier ({})", a.frontier.shape.name()),
        x_label: "fairness (1 - F_U)".into(),
        y_label: "accuracy".into(),
        series: vec![Series {
            name: "frontier".into(),
            color: PALETTE[0],
            style: Style::Line,
            points,
        }],
        verticals: markers_by_fairness(a),
    }
}

fn markers_by_fairness(a: &Analyzed) -> Vec<Vertical> {
    let [(acc, acc_label), (fair, fair_label)] = optimum_markers(a);
    vec![
        Vertical {
            x: acc,
            color: ACCURACY_OPTIMUM_COLOR,
            label: acc_label.into(),
        },
        Vertical {
            x: fair,
            color: FAIRNESS_OPTIMUM_COLOR,
            label: fair_label.into(),
        },
    ]
}

fn markers_by_boundary(a: &Analyzed) -> Vec<Vertical> {
    vec![
        Vertical {
            x: boundary_of(a.accuracy_optimum()),
            color: ACCURACY_OPTIMUM_COLOR,
            label: "accuracy optimum".into(),
        },
        Vertical {
            x: boundary_of(a.fairness_optimum()),
            color: FAIRNESS_OPTIMUM_COLOR,
            label: "fairness optimum".into(),
        },
    ]
}

/// Accuracy and fairness against the threshold for shared families, and
/// the candidate cloud in the fairness/accuracy plane otherwise.
pub fn sweep_figure(a: &Analyzed, scenario: &str) -> Figure {
    let family = &a.sweep.family;
    let grid = &a.sweep.grid;
    if family.is_shared() {
        let n = grid.len();
        let mut series = Vec::new();
        for (k, o) in family.orientations[0].orientations().iter().enumerate() {
            let block = &a.sweep.candidates[k * n..(k + 1) * n];
            series.push(Series {
                name: format!("accuracy, {}", o.name()),
                color: PALETTE[(2 * k) % PALETTE.len()],
                style: Style::Line,
                points: block
                    .iter()
                    .zip(grid)
                    .map(|(c, &t)| (t, c.accuracy))
                    .collect(),
            });
            series.push(Series {
                name: format!("fairness, {}", o.name()),
                color: PALETTE[(2 * k + 1) % PALETTE.len()],
                style: Style::Line,
                points: block
                    .iter()
                    .zip(grid)
                    .map(|(c, &t)| (t, c.fairness))
                    .collect(),
            });
        }
        Figure {
            title: format!("{scenario}: {}", family.name()),
            x_label: "decision boundary".into(),
            y_label: "accuracy / fairness".into(),
            series,
            verticals: markers_by_boundary(a),
        }
    } else {
        let points = a
            .sweep
            .candidates
            .iter()
            .map(|c| (c.fairness, c.accuracy))
            .collect();
        Figure {
            title: format!("{scenario}: {}", family.name()),
            x_label: "fairness (1 - F_U)".into(),
            y_label: "accuracy".into(),
            series: vec![Series {
                name: "candidates".into(),
                color: PALETTE[0],
                style: Style::Points,
                points: plot::thin(points, SCATTER_POINTS),
            }],
            verticals: markers_by_fairness(a),
        }
    }
}

pub fn decomposition_figure(a: &Analyzed, rows: &[DecompositionRow], scenario: &str) -> Figure {
    let curve = |name: &str, color, f: fn(&DecompositionRow) -> f64| Series {
        name: name.into(),
        color,
        style: Style::Line,
        points: rows.iter().map(|r| (r.threshold, f(r))).collect(),
    };
    Figure {
        title: format!("{scenario}: unfairness decomposition"),
        x_label: "decision boundary (positive above)".into(),
        y_label: "unfairness".into(),
        series: vec![
            curve("F_U", PALETTE[0], |r| r.d.f_u),
            curve("F_MU", PALETTE[1], |r| r.d.f_mu),
            curve("F_DU", "#7f7f7f", |r| r.d.f_du),
        ],
        verticals: markers_by_boundary(a),
    }
}

/// Executes a full run and writes the requested artifacts into `cfg.out`.
pub fn run<E: Executor>(cfg: &RunConfig, exec: &E) -> Result<RunOutcome> {
    info!("loading scenario {}", cfg.scenario);
    let model = scenario_file::load(&cfg.scenario)?;
    let name = model.label().to_owned();
    cfg.family.validate()?;
    ensure_dir(&cfg.out)?;

    info!(
        "sweeping {} ({} candidates)",
        cfg.family.name(),
        cfg.family.grid_candidates() + 2
    );
    let analyzed = Analyzed::new(model, &cfg.family, &cfg.weights, cfg.jump_threshold, exec)?;
    info!(
        "frontier: {} points, shape {}",
        analyzed.frontier.points.len(),
        analyzed.frontier.shape.name()
    );

    let mut files = Vec::new();
    let mut record = |p: PathBuf| files.push(p);
    let path = |f: &str| cfg.out.join(f);

    if cfg.wants(Analysis::Frontier) {
        let n = analyzed.sweep.candidates.len();
        let mut summary = analyzed.summary(&name);
        if cfg.sweep_csv && cfg.sweep_csv_limit != 0 && n > cfg.sweep_csv_limit {
            info!(
                "skipping {}: {n} candidates exceed sweep-csv-limit {}",
                output::SWEEP_CSV,
                cfg.sweep_csv_limit
            );
            summary.push_str(&format!(
                "note: {} not written, {n} candidates exceed sweep-csv-limit {}\n",
                output::SWEEP_CSV,
                cfg.sweep_csv_limit
            ));
        } else if cfg.sweep_csv {
            info!("writing {}", output::SWEEP_CSV);
            let extras = analyzed.sweep_extras(exec);
            output::write_sweep(
                &path(output::SWEEP_CSV),
                &analyzed.sweep.candidates,
                &extras,
            )?;
            record(path(output::SWEEP_CSV));
        }
        info!("writing {}", output::FRONTIER_CSV);
        output::write_frontier(&path(output::FRONTIER_CSV), &analyzed.frontier)?;
        record(path(output::FRONTIER_CSV));
        output::write_text(&path(REPORT_TXT), &summary)?;
        record(path(REPORT_TXT));
    }

    let decomposition = if cfg.wants(Analysis::Decomposition) {
        info!(
            "decomposition sweep over {} thresholds",
            cfg.decomposition_points
        );
        let rows = analyzed.decomposition_sweep(cfg.decomposition_points, exec);
        output::write_decomposition(&path(output::DECOMPOSITION_CSV), &rows)?;
        record(path(output::DECOMPOSITION_CSV));
        rows
    } else {
        Vec::new()
    };

    let reports = if cfg.wants(Analysis::Theorems) {
        info!("running structural checks");
        let reports = analyzed.theorem_suite(exec)?;
        output::write_text(&path(THEOREMS_TXT), &reports_text(&reports))?;
        record(path(THEOREMS_TXT));
        output::write_text(&path(THEOREMS_JSON), &reports_json(&reports))?;
        record(path(THEOREMS_JSON));
        reports
    } else {
        Vec::new()
    };

    if cfg.wants(Analysis::Plots) {
        info!("rendering figures");
        plot::emit_plot(
            &frontier_figure(&analyzed, &name),
            &path(plot::FRONTIER_SVG),
        )?;
        record(path(plot::FRONTIER_SVG));
        plot::emit_plot(&sweep_figure(&analyzed, &name), &path(plot::SWEEP_SVG))?;
        record(path(plot::SWEEP_SVG));
        if !decomposition.is_empty() {
            plot::emit_plot(
                &decomposition_figure(&analyzed, &decomposition, &name),
                &path(plot::DECOMPOSITION_SVG),
            )?;
            record(path(plot::DECOMPOSITION_SVG));
        }
    }

    Ok(RunOutcome {
        analyzed,
        decomposition,
        reports,
        files,
    })
}

/// Structural checks for one scenario.
pub fn check<E: Executor>(
    scenario: &str,
    family: &FamilySpec,
    weights: &MetricWeights,
    jump_threshold: f64,
    exec: &E,
) -> Result<Vec<TheoremReport>> {
    let model = scenario_file::load(scenario)?;
    info!("checking {} over {}", model.label(), family.name());
    Analyzed::new(model, family, weights, jump_threshold, exec)?.theorem_suite(exec)
}

/// One Monte-Carlo comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub classifier: String,
    pub quantity: String,
    pub analytic: f64,
    pub estimate: McEstimate,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub rows: Vec<OracleRow>,
    /// Sweep name and whether the sort-based filter matched the pairwise oracle.
    pub pareto: Vec<(String, bool)>,
}

impl OracleOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.agrees) && self.pareto.iter().all(|p| p.1)
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{} {:<24} {:<10} analytic={:.9} mc={:.9} stderr={:.3e} n={} seed={}",
                if r.agrees { "ok  " } else { "FAIL" },
                r.classifier,
                r.quantity,
                r.analytic,
                r.estimate.value,
                r.estimate.stderr,
                r.estimate.n,
                r.estimate.seed
            );
        }
        for (name, ok) in &self.pareto {
            let _ = writeln!(
                s,
                "{} pareto filter = dominance oracle on {name}",
                if *ok { "ok  " } else { "FAIL" }
            );
        }
        s
    }
}

/// Agreement band in standard errors.
pub const ORACLE_K: f64 = 3.0;

/// Monte-Carlo agreement of rates, unfairness and accuracy for `clf`.
pub fn oracle_rows<E: Executor>(
    model: &GroupConditionalModel,
    name: &str,
    clf: &GroupwiseClassifier,
    w: &MetricWeights,
    draws: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<OracleRow>> {
    let mc = oracle::mc_estimate(model, clf, w, draws, seed, exec)?;
    let rates = metrics::confusion_rates(model, clf);
    let mut rows = Vec::new();
    let mut push = |q: String, analytic: f64, e: McEstimate| {
        rows.push(OracleRow {
            classifier: name.to_owned(),
            quantity: q,
            analytic,
            agrees: e.agrees(analytic, ORACLE_K),
            estimate: e,
        })
    };
    for a in 0..2 {
        push(format!("tpr{a}"), rates.tpr[a], mc.tpr[a]);
        push(format!("tnr{a}"), rates.tnr[a], mc.tnr[a]);
    }
    push("f_u".into(), metrics::unfairness(&rates, w), mc.f_u);
    push(
        "accuracy".into(),
        metrics::accuracy_from_rates(model, &rates, w),
        mc.accuracy,
    );
    Ok(rows)
}

/// Whether [`frontier::pareto_filter`] equals [`oracle::dominance_oracle`] on `family`.
pub fn pareto_matches_oracle<E: Executor>(
    model: &GroupConditionalModel,
    family: &FamilySpec,
    w: &MetricWeights,
    exec: &E,
) -> Result<bool> {
    let s = frontier::sweep(model, family, w, &ClassifierConfig::default(), exec)?;
    let t = ShapeThresholds::for_resolution(family.resolution);
    Ok(frontier::pareto_filter(&s.candidates, t)?
        == oracle::dominance_oracle(&s.candidates, t, exec)?)
}

/// Monte-Carlo and dominance-oracle agreement for one scenario.
pub fn oracle_suite<E: Executor>(
    model: &GroupConditionalModel,
    w: &MetricWeights,
    draws: usize,
    seed: u64,
    exec: &E,
) -> Result<OracleOutcome> {
    let cfg = ClassifierConfig::default();
    let (lo, hi) = model.central_range(
        &fairfrontier_core::Group::BOTH,
        frontier::DEFAULT_RANGE_MASS,
    );
    let classifiers = [
        (
            "accuracy_optimal_overall",
            classifiers::bayes_accuracy_optimal(model, BayesScope::Overall, &cfg)?,
        ),
        (
            "accuracy_optimal_per_group",
            classifiers::bayes_accuracy_optimal(model, BayesScope::PerGroup, &cfg)?,
        ),
        (
            "fairness_optimal",
            classifiers::fairness_optimal(model, w, &cfg)?,
        ),
        (
            "midrange_threshold",
            GroupwiseClassifier::threshold(0.5 * (lo + hi), Orientation::PositiveAbove),
        ),
    ];
    let mut rows = Vec::new();
    for (i, (name, clf)) in classifiers.iter().enumerate() {
        info!("monte-carlo check of {name} on {}", model.label());
        rows.extend(oracle_rows(
            model,
            name,
            clf,
            w,
            draws,
            seed.wrapping_add(i as u64),
            exec,
        )?);
    }
    let families = [
        FamilySpec::shared_threshold(OrientationChoice::Both),
        FamilySpec::per_group_threshold([OrientationChoice::Both; 2]).with_resolution(101),
    ];
    let mut pareto = Vec::new();
    for f in &families {
        info!("dominance oracle on {}", f.name());
        pareto.push((f.name(), pareto_matches_oracle(model, f, w, exec)?));
    }
    Ok(OracleOutcome { rows, pareto })
}

/// Listing of the built-in scenarios.
pub fn scenarios_text() -> String {
    let mut s = String::new();
    for id in ScenarioId::ALL {
        let _ = writeln!(s, "{:<22} {}", id.name(), id.description());
    }
    s
}

/// Writes every preset as a scenario file into `dir`.
pub fn write_presets(dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    ScenarioId::ALL
        .into_iter()
        .map(|id| {
            let p = dir.join(format!("{}.toml", id.name()));
            output::write_text(&p, &scenario_file::write_scenario(&id.spec()))?;
            Ok(p)
        })
        .collect()
}
