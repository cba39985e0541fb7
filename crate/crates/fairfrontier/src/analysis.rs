//! Analyses shared by the `run` and `check` commands.

use fairfrontier_core::classifiers::{self, BayesScope, ClassifierConfig};
use fairfrontier_core::frontier::{self, ClassifierParams, JumpKind, ShapeThresholds, Sweep};
use fairfrontier_core::metrics::{self, Reference};
use fairfrontier_core::theorems::{self, AlignmentMode, OverPursuitBound, TheoremReport};
use fairfrontier_core::{
    Executor, FamilySpec, Frontier, FrontierPoint, GroupConditionalModel, MetricWeights,
    Orientation, OrientationChoice, ScenarioId,
};

use crate::error::Result;
use crate::output::{DecompositionRow, SweepExtras};

/// Tolerance for the simultaneous-optimality, over-pursuit and sharp-decline checks.
pub const CONDITION_TOL: f64 = 1e-6;
/// Tolerance for the decomposition and trade-off-elimination checks.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Grid resolution of the per-group search behind trade-off elimination.
pub const SEARCH_RESOLUTION: usize = 101;

/// A family sweep with its frontier and the reference classifiers.
#[derive(Debug, Clone)]
pub struct Analyzed {
    pub model: GroupConditionalModel,
    pub weights: MetricWeights,
    pub sweep: Sweep,
    pub frontier: Frontier,
    pub reference: Reference,
}

impl Analyzed {
    pub fn new<E: Executor>(
        model: GroupConditionalModel,
        family: &FamilySpec,
        weights: &MetricWeights,
        jump_threshold: f64,
        exec: &E,
    ) -> Result<Self> {
        let cfg = ClassifierConfig::default();
        let sweep = frontier::sweep(&model, family, weights, &cfg, exec)?;
        let thresholds = ShapeThresholds {
            jump_threshold,
            ..ShapeThresholds::for_resolution(family.resolution)
        };
        let frontier = frontier::pareto_filter(&sweep.candidates, thresholds)?;
        let reference = Reference::new(&model, weights, &cfg)?;
        Ok(Analyzed {
            model,
            weights: *weights,
            sweep,
            frontier,
            reference,
        })
    }

    /// The appended fairness-optimal candidate.
    pub fn fairness_optimum(&self) -> &FrontierPoint {
        let n = self.sweep.candidates.len();
        &self.sweep.candidates[n - 2]
    }

    /// The appended accuracy-optimal candidate.
    pub fn accuracy_optimum(&self) -> &FrontierPoint {
        self.sweep
            .candidates
            .last()
            .expect("sweeps always carry the appended optima")
    }

    /// `f_du`, `f_mu` and well-definedness for every candidate.
    pub fn sweep_extras<E: Executor>(&self, exec: &E) -> Vec<SweepExtras> {
        let c = &self.sweep.candidates;
        exec.map(c.len(), |i| {
            let p = &c[i];
            let wd = classifiers::well_defined_against(&p.classifier(), &self.reference.optimum);
            SweepExtras {
                f_du: self.reference.f_du,
                f_mu: self.reference.f_mu(&p.rates),
                well_defined: wd.well_defined,
            }
        })
    }

    /// Shared positive-above thresholds spaced evenly over the family range.
    pub fn decomposition_sweep<E: Executor>(
        &self,
        points: usize,
        exec: &E,
    ) -> Vec<DecompositionRow> {
        let grid = self
            .sweep
            .family
            .clone()
            .with_resolution(points)
            .grid(&self.model);
        exec.map(grid.len(), |i| {
            let clf = fairfrontier_core::GroupwiseClassifier::threshold(
                grid[i],
                Orientation::PositiveAbove,
            );
            let wd = classifiers::well_defined_against(&clf, &self.reference.optimum);
            DecompositionRow {
                threshold: grid[i],
                orientation: Orientation::PositiveAbove,
                d: self.reference.decompose(
                    &metrics::confusion_rates(&self.model, &clf),
                    wd.well_defined,
                ),
            }
        })
    }

    /// Every structural check that applies to this model and sweep.
    pub fn theorem_suite<E: Executor>(&self, exec: &E) -> Result<Vec<TheoremReport>> {
        let cfg = ClassifierConfig::default();
        let (m, w) = (&self.model, &self.weights);
        let fair = self.fairness_optimum().classifier();
        let overall = classifiers::bayes_accuracy_optimal(m, BayesScope::Overall, &cfg)?;
        let mut out = vec![
            theorems::check_simultaneous_optimality(m, &overall, w, CONDITION_TOL, &cfg)?,
            theorems::check_simultaneous_optimality(m, &fair, w, CONDITION_TOL, &cfg)?,
        ];

        let bound = OverPursuitBound::new(m, w, &cfg)?;
        out.push(theorems::check_over_pursuit(
            m,
            &fair,
            w,
            CONDITION_TOL,
            &cfg,
        )?);
        let mut scan = theorems::over_pursuit_sweep(&bound, &self.sweep.candidates, CONDITION_TOL);
        scan.family_scope = Some(format!("shared candidates of {}", self.sweep.family.name()));
        out.push(scan);

        out.push(theorems::decomposition_report(
            m,
            &self.reference,
            &fair,
            IDENTITY_TOL,
        ));
        out.push(theorems::decomposition_report(
            m,
            &self.reference,
            &overall,
            IDENTITY_TOL,
        ));

        let search = FamilySpec::per_group_threshold([OrientationChoice::Both; 2])
            .with_resolution(SEARCH_RESOLUTION);
        for mode in [
            AlignmentMode::BoundaryLocation,
            AlignmentMode::StrictIndicator,
        ] {
            out.push(theorems::check_tradeoff_elimination(
                m,
                mode,
                &search,
                w,
                IDENTITY_TOL,
                &cfg,
                exec,
            )?);
        }

        let jumps: Vec<_> = self
            .frontier
            .jumps
            .iter()
            .filter(|j| j.kind == JumpKind::Accuracy)
            .collect();
        if jumps.is_empty() {
            out.push(theorems::check_sharp_decline(
                m,
                &self.sweep,
                &self.frontier,
                None,
                CONDITION_TOL,
                &cfg,
            )?);
        }
        for j in jumps {
            out.push(theorems::check_sharp_decline(
                m,
                &self.sweep,
                &self.frontier,
                Some(j),
                CONDITION_TOL,
                &cfg,
            )?);
        }
        Ok(out)
    }

    /// Human-readable summary written to `report.txt`.
    pub fn summary(&self, scenario: &str) -> String {
        let f = &self.frontier;
        let mut s = String::new();
        s.push_str(&format!("scenario: {scenario}\n"));
        s.push_str(&format!("family: {}\n", self.sweep.family.name()));
        s.push_str(&format!("shape: {}\n", f.shape.name()));
        s.push_str(&format!(
            "weights: omega1={} omega2={} p1={} p2={}\n",
            self.weights.omega1, self.weights.omega2, self.weights.p1, self.weights.p2
        ));
        s.push_str(&format!("candidates: {}\n", self.sweep.candidates.len()));
        s.push_str(&format!("frontier points: {}\n", f.points.len()));
        s.push_str(&format!(
            "max accuracy: {:.12}\n",
            self.sweep.max_accuracy()
        ));
        s.push_str(&format!(
            "max adjacent accuracy step: {:.12}\n",
            f.max_accuracy_step()
        ));
        s.push_str(&format!(
            "jump detection: threshold={} gap={:.12}\n",
            f.thresholds.jump_threshold, f.thresholds.fairness_gap
        ));
        for j in &f.jumps {
            let kind = match j.kind {
                JumpKind::Accuracy => "accuracy",
                JumpKind::Fairness => "fairness",
            };
            s.push_str(&format!(
                "jump: {kind} at frontier index {} fairness {:.12}: accuracy drop {:.12}, fairness rise {:.12}\n",
                j.index, j.fairness_at, j.accuracy_drop, j.fairness_rise
            ));
        }
        if let Some(flag) = &f.flag {
            s.push_str(&format!("flag: {flag}\n"));
        }
        for (label, p) in [
            ("accuracy optimum", self.accuracy_optimum()),
            ("fairness optimum", self.fairness_optimum()),
        ] {
            s.push_str(&format!(
                "{label}: fairness {:.12} accuracy {:.12} classifier {}\n",
                p.fairness,
                p.accuracy,
                p.classifier()
            ));
        }
        let r = &self.reference;
        s.push_str(&format!(
            "data unfairness f_du: {:.12} (per-group accuracy-optimal reference, condition {})\n",
            r.f_du,
            r.condition.map_or("none", |c| c.name())
        ));
        if scenario == ScenarioId::Example3.name() {
            s.push_str(
                "note: the published data unfairness 0.017 for this scenario is not reproduced; with the second \
                 normal parameter read as a standard deviation the closed-form value is the f_du above \
                 (about 0.0430), and reading it as a variance gives about 0.004\n",
            );
        }
        s
    }
}

/// Fairness coordinates of the appended optima, for plot markers.
pub fn optimum_markers(a: &Analyzed) -> [(f64, &'static str); 2] {
    [
        (a.accuracy_optimum().fairness, "accuracy optimum"),
        (a.fairness_optimum().fairness, "fairness optimum"),
    ]
}

/// First finite boundary of a candidate's group-0 region, for plots over
/// the threshold axis.
pub fn boundary_of(p: &FrontierPoint) -> f64 {
    match &p.params {
        ClassifierParams::SharedThreshold { threshold, .. } => *threshold,
        _ => p
            .classifier()
            .region(fairfrontier_core::Group::Zero)
            .boundaries()
            .into_iter()
            .next()
            .unwrap_or(f64::NAN),
    }
}
