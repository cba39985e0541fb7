//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use fairfrontier::analysis::Analyzed;
use fairfrontier::commands;
use fairfrontier::config::{RunConfig, Settings};
use fairfrontier::exec::Rayon;
use fairfrontier_core::classifiers::ClassifierConfig;
use fairfrontier_core::frontier::{self, JumpKind, Shape, ShapeThresholds};
use fairfrontier_core::oracle::dominance_oracle;
use fairfrontier_core::theorems::{self, OverPursuitBound};
use fairfrontier_core::{
    Distribution, FamilySpec, Group, GroupConditionalModel, GroupwiseClassifier, IntervalSet,
    MetricWeights, Orientation, OrientationChoice, ScenarioId, ScenarioSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn exec() -> Rayon {
    Rayon::from_env().expect("thread pool")
}

fn analyzed(id: ScenarioId, family: FamilySpec) -> Analyzed {
    Analyzed::new(
        id.model(),
        &family,
        &MetricWeights::default(),
        0.05,
        &exec(),
    )
    .expect("sweep")
}

fn sf(mean: f64, sd: f64, x: f64) -> f64 {
    Normal::new(mean, sd).unwrap().sf(x)
}

fn cdf(mean: f64, sd: f64, x: f64) -> f64 {
    Normal::new(mean, sd).unwrap().cdf(x)
}

fn example1_per_group_continuity() -> Outcome {
    let family = FamilySpec::per_group_threshold([OrientationChoice::Both; 2]).with_resolution(801);
    let start = Instant::now();
    let a = analyzed(ScenarioId::Example1, family);
    let secs = start.elapsed().as_secs_f64();
    let step = a.frontier.max_accuracy_step();
    let mut detail = format!(
        "{}: max adjacent accuracy step {step:.6} (limit 0.02), shape {}, {secs:.1} s (limit 60)",
        a.sweep.family.name(),
        a.frontier.shape.name()
    );
    if let Some(j) = a.frontier.jumps.first() {
        detail.push_str(&format!(", first jump at fairness {:.6}", j.fairness_at));
    }
    outcome(step <= 0.02 && secs <= 60.0, detail)
}

fn example1_shared_sharp_decline() -> Outcome {
    let a = analyzed(
        ScenarioId::Example1,
        FamilySpec::shared_threshold(OrientationChoice::Both),
    );
    let jump = a
        .frontier
        .jumps
        .iter()
        .filter(|j| j.kind == JumpKind::Accuracy)
        .map(|j| j.accuracy_drop)
        .fold(0.0, f64::max);
    let family = a.sweep.family.name();
    let names_family = a.summary("example1").contains(&format!("family: {family}"));
    outcome(
        jump > 0.2 && names_family,
        format!("{family}: largest accuracy jump {jump:.6} (needs > 0.2), family named in report: {names_family}"),
    )
}

fn example3_decomposition() -> Outcome {
    let x = exec();
    let family = FamilySpec::shared_threshold(OrientationChoice::Both);
    let a = analyzed(ScenarioId::Example3, family.clone());
    let rows = a.decomposition_sweep(1000, &x);
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| {
            (l.min(r.d.f_du), h.max(r.d.f_du))
        });
    let spread = hi - lo;
    let worst = rows
        .iter()
        .map(|r| r.d.residual)
        .fold(f64::NEG_INFINITY, f64::max);
    let detected: Vec<_> = rows.iter().filter(|r| r.d.condition_detected()).collect();
    let equal = detected.iter().all(|r| r.d.residual.abs() <= 1e-9);

    // Closed form: group 0 has equal joints, so its boundary is the midpoint 3;
    // group 1 solves 0.5 N(10, 3) = 0.25 N(2, 3).
    let t1 = 6.0 - 1.125 * 2.0f64.ln();
    let tpr = [sf(7.0, 3.0, 3.0), sf(10.0, 3.0, t1)];
    let tnr = [cdf(-1.0, 3.0, 3.0), cdf(2.0, 3.0, t1)];
    let closed = 0.5 * (tpr[1] - tpr[0]).abs() + 0.5 * (tnr[1] - tnr[0]).abs();
    let again = analyzed(ScenarioId::Example3, family).reference.f_du;
    let stable =
        (again - a.reference.f_du).abs() <= 1e-6 && (a.reference.f_du - closed).abs() <= 1e-6;
    let stated = a
        .summary("example3")
        .contains("0.017 for this scenario is not reproduced");
    outcome(
        spread <= 1e-12 && worst <= 1e-9 && equal && stable && stated,
        format!(
            "f_du {:.6} (closed form {closed:.6}), spread {spread:.1e}, max residual {worst:.1e}, \
             equality at {}/{} detected points, discrepancy stated: {stated}",
            a.reference.f_du,
            detected
                .iter()
                .filter(|r| r.d.residual.abs() <= 1e-9)
                .count(),
            detected.len()
        ),
    )
}

fn example4_tradeoff_elimination() -> Outcome {
    let ident = analyzed(
        ScenarioId::Example4Identical,
        FamilySpec::per_group_threshold([OrientationChoice::Both; 2]),
    );
    let max = ident.sweep.max_accuracy();
    let fair_best = ident
        .sweep
        .candidates
        .iter()
        .filter(|p| p.f_u <= 1e-9)
        .map(|p| p.accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    let identical_ok = (fair_best - 0.875).abs() <= 1e-9 && (fair_best - max).abs() <= 1e-9;

    let non = analyzed(
        ScenarioId::Example4Nonidentical,
        FamilySpec::shared_threshold(OrientationChoice::Both),
    );
    let nmax = non.sweep.max_accuracy();
    let fair: Vec<f64> = non
        .sweep
        .candidates
        .iter()
        .filter(|p| p.f_u <= 0.01)
        .map(|p| p.accuracy)
        .collect();
    let gap = fair.iter().map(|a| nmax - a).fold(f64::INFINITY, f64::min);
    let nonidentical_ok = !fair.is_empty() && gap >= 0.05;
    outcome(
        identical_ok && nonidentical_ok,
        format!(
            "identical per-group: best accuracy at F_U <= 1e-9 {fair_best:.12}, family max {max:.12}; \
             non-identical shared: {} points with F_U <= 0.01, smallest gap to max {gap:.6} (needs >= 0.05)",
            fair.len()
        ),
    )
}

fn over_pursuit_bound() -> Outcome {
    let w = MetricWeights::default();
    let cfg = ClassifierConfig::default();
    // Each group's accuracy-optimal threshold applied to both groups.
    let shared_acc = |t: f64| {
        0.125 * sf(6.0, 2.0, t)
            + 0.125 * cdf(-1.0, 2.0, t)
            + 0.5 * sf(10.0, 2.0, t)
            + 0.25 * cdf(3.0, 2.0, t)
    };
    let oracle_acc = [shared_acc(2.5), shared_acc(6.5 - 4.0 * 2.0f64.ln() / 7.0)];
    let model = ScenarioId::Example1.model();
    let bound = OverPursuitBound::new(&model, &w, &cfg).expect("bound");
    let refs_ok = (0..2).all(|i| (bound.acc_group_optimum[i] - oracle_acc[i]).abs() <= 1e-9);
    let mut lines = vec![format!(
        "group optima on both groups {:.6}/{:.6} (oracle {:.6}/{:.6})",
        bound.acc_group_optimum[0], bound.acc_group_optimum[1], oracle_acc[0], oracle_acc[1]
    )];
    let mut ok = refs_ok;
    let cap = bound
        .acc_fair
        .min(bound.acc_group_optimum[0].max(bound.acc_group_optimum[1]));
    let families = [
        FamilySpec::shared_threshold(OrientationChoice::Both),
        FamilySpec::shared_threshold(OrientationChoice::PositiveAbove).with_resolution(1601),
        FamilySpec::shared_threshold(OrientationChoice::PositiveBelow).with_resolution(1601),
    ];
    for family in families {
        let s = frontier::sweep(&model, &family, &w, &cfg, &exec()).expect("sweep");
        let over: Vec<_> = s
            .candidates
            .iter()
            .filter(|p| p.f_u < bound.f_u_fair - 1e-9)
            .collect();
        let worst = over
            .iter()
            .map(|p| p.accuracy - cap)
            .fold(f64::NEG_INFINITY, f64::max);
        ok &= worst <= 1e-6;
        lines.push(format!(
            "example1 {}: {} over-pursuers, max excess {worst:.3e}",
            family.name(),
            over.len()
        ));
    }
    // Other presets are reported without gating; the bound values above belong to example1.
    for id in [
        ScenarioId::Example3,
        ScenarioId::Example4Identical,
        ScenarioId::Example4Nonidentical,
    ] {
        let m = id.model();
        let b = OverPursuitBound::new(&m, &w, &cfg).expect("bound");
        let family = FamilySpec::shared_threshold(OrientationChoice::Both);
        let s = frontier::sweep(&m, &family, &w, &cfg, &exec()).expect("sweep");
        let report = theorems::over_pursuit_sweep(&b, &s.candidates, 1e-6);
        lines.push(format!(
            "{} (informational): bound {}",
            id.name(),
            if report.conclusion_holds {
                "holds"
            } else {
                "exceeded"
            }
        ));
    }
    outcome(ok, lines.join("; "))
}

fn random_normal_mixture(rng: &mut ChaCha8Rng) -> Distribution {
    let comps = (0..2)
        .map(|_| {
            let d = Distribution::normal(rng.random_range(-5.0..10.0), rng.random_range(0.5..3.0))
                .unwrap();
            (rng.random_range(0.2..1.0), d)
        })
        .collect::<Vec<_>>();
    let total: f64 = comps.iter().map(|c| c.0).sum();
    Distribution::mixture(comps.into_iter().map(|(w, d)| (w / total, d)).collect()).unwrap()
}

fn random_model(rng: &mut ChaCha8Rng, label: &str) -> GroupConditionalModel {
    let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let joint = [
        [raw[0] / total, raw[1] / total],
        [raw[2] / total, 1.0 - (raw[0] + raw[1] + raw[2]) / total],
    ];
    let conditional = [
        [random_normal_mixture(rng), random_normal_mixture(rng)],
        [random_normal_mixture(rng), random_normal_mixture(rng)],
    ]
    .map(|row| row.map(|d| (&d).into()));
    GroupConditionalModel::from_spec(ScenarioSpec {
        label: label.to_owned(),
        joint,
        conditional,
    })
    .expect("random model is valid")
}

fn shape_at(model: &GroupConditionalModel, resolution: usize) -> Shape {
    let family = FamilySpec::shared_threshold(OrientationChoice::Both).with_resolution(resolution);
    let (_, f) = frontier::frontier_of(
        model,
        &family,
        &MetricWeights::default(),
        &ClassifierConfig::default(),
        &exec(),
    )
    .expect("frontier");
    f.shape
}

fn no_fairness_decline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let fairness_like =
        |s: Shape| matches!(s, Shape::SharpDeclineFairness | Shape::SharpDeclineBoth);
    let (mut flagged_initially, mut bad) = (0, Vec::new());
    for i in 0..50 {
        let model = random_model(&mut rng, &format!("random{i}"));
        let mut r = 201;
        let mut shape = shape_at(&model, r);
        if fairness_like(shape) {
            flagged_initially += 1;
        }
        // Doubling must remove any fairness-type report.
        while fairness_like(shape) && r < 6401 {
            r = 2 * r - 1;
            shape = shape_at(&model, r);
        }
        if fairness_like(shape) {
            bad.push(format!("random{i}@{r}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "50 random mixture models: {flagged_initially} fairness-type reports at resolution 201, \
             {} persisting to resolution 6401 {bad:?}",
            bad.len()
        ),
    )
}

fn random_classifier(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> GroupwiseClassifier {
    let mut region = || {
        let mut pts = [rng.random_range(lo..hi), rng.random_range(lo..hi)];
        pts.sort_by(f64::total_cmp);
        match rng.random_range(0..3) {
            0 => Orientation::BOTH[rng.random_range(0..2)].region(pts[0]),
            1 => IntervalSet::new(vec![(pts[0], pts[1])]).unwrap(),
            _ => IntervalSet::new(vec![(pts[0], pts[1])])
                .unwrap()
                .complement(),
        }
    };
    GroupwiseClassifier::per_group(region(), region())
}

fn oracle_agreement() -> Outcome {
    let x = exec();
    let w = MetricWeights::default();
    let (mut rows, mut disagree, mut sweeps, mut mismatched) = (0, Vec::new(), 0, Vec::new());
    for (k, id) in ScenarioId::ALL.iter().enumerate() {
        let o = commands::oracle_suite(&id.model(), &w, 1_000_000, 100 + k as u64, &x)
            .expect("oracle suite");
        rows += o.rows.len();
        for r in o.rows.iter().filter(|r| !r.agrees) {
            disagree.push(format!("{}/{}/{}", id.name(), r.classifier, r.quantity));
        }
        sweeps += o.pareto.len();
        mismatched.extend(
            o.pareto
                .iter()
                .filter(|p| !p.1)
                .map(|p| format!("{}/{}", id.name(), p.0)),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..20 {
        let model = random_model(&mut rng, &format!("pair{i}"));
        let (lo, hi) = model.central_range(&Group::BOTH, 0.999);
        let clf = random_classifier(&mut rng, lo, hi);
        let rs = commands::oracle_rows(&model, "random", &clf, &w, 1_000_000, 1000 + i, &x)
            .expect("oracle rows");
        rows += rs.len();
        disagree.extend(
            rs.iter()
                .filter(|r| !r.agrees)
                .map(|r| format!("pair{i}/{}", r.quantity)),
        );
        let family = FamilySpec::shared_threshold(OrientationChoice::Both).with_resolution(401);
        let s =
            frontier::sweep(&model, &family, &w, &ClassifierConfig::default(), &x).expect("sweep");
        let t = ShapeThresholds::for_resolution(401);
        sweeps += 1;
        if frontier::pareto_filter(&s.candidates, t).unwrap()
            != dominance_oracle(&s.candidates, t, &x).unwrap()
        {
            mismatched.push(format!("pair{i}"));
        }
    }
    outcome(
        disagree.is_empty() && mismatched.is_empty(),
        format!(
            "{rows} analytic quantities, {} outside 3 standard errors {disagree:?}; \
             {sweeps} sweeps, {} Pareto mismatches {mismatched:?}",
            disagree.len(),
            mismatched.len()
        ),
    )
}

fn run_config(out: &Path) -> RunConfig {
    RunConfig::from_settings(&Settings {
        scenario: Some("example1".into()),
        family: Some("per-group-threshold".into()),
        resolution: Some(101),
        decompose: true,
        out: Some(out.to_path_buf()),
        ..Default::default()
    })
    .expect("config")
}

fn artifact_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let pools = [
        Rayon::new(Some(1)).unwrap(),
        Rayon::new(Some(4)).unwrap(),
        Rayon::new(None).unwrap(),
    ];
    for (d, pool) in dirs.iter().zip(&pools) {
        commands::run(&run_config(d.path()), pool).expect("run");
    }
    let base = artifact_bytes(dirs[0].path());
    let same = dirs[1..].iter().all(|d| artifact_bytes(d.path()) == base);
    let csv_svg = base
        .iter()
        .filter(|(n, _)| n.ends_with(".csv") || n.ends_with(".svg"))
        .count();
    outcome(
        same && csv_svg >= 5,
        format!("{} artifacts ({csv_svg} CSV/SVG) identical across 3 runs with 1, 4 and default threads: {same}", base.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        (
            "example1 per-group frontier continuity",
            example1_per_group_continuity,
        ),
        (
            "example1 shared frontier sharp accuracy decline",
            example1_shared_sharp_decline,
        ),
        ("example3 unfairness decomposition", example3_decomposition),
        (
            "example4 trade-off elimination",
            example4_tradeoff_elimination,
        ),
        ("over-pursuit accuracy bound", over_pursuit_bound),
        (
            "no sharp fairness decline at converged resolution",
            no_fairness_decline,
        ),
        ("analytic and pairwise oracle agreement", oracle_agreement),
        ("byte-identical artifacts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {} [{:.1} s]",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
