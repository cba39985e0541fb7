//! Executable checks of the structural results about accuracy/fairness
//! frontiers, evaluated on concrete models and classifiers.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::classifiers::{self, BayesScope, ClassifierConfig, GroupwiseClassifier, SLIVER};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::frontier::{self, FamilySpec, Frontier, FrontierPoint, Jump, Sweep};
use crate::intervals::IntervalSet;
use crate::metrics::{self, MetricWeights, Reference};
use crate::numeric::sign_region;
use crate::population::{Group, GroupConditionalModel, Label};

/// Margin by which a classifier must undercut the fairness optimum's
/// unfairness to count as over-pursuing fairness.
pub const OVER_PURSUIT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Necessary conditions for a shared classifier that is both accuracy- and
    /// fairness-optimal.
    SimultaneousOptimality,
    /// Accuracy bound for classifiers that over-pursue fairness.
    OverPursuitBound,
    /// `F_U <= F_DU + F_MU`, with equality under sign conditions.
    UnfairnessDecomposition,
    /// Zero data unfairness plus aligned boundaries removes the trade-off.
    TradeoffElimination,
    /// Characterisation of a sharp accuracy decline on the frontier.
    SharpDeclineConditions,
}

impl TheoremId {
    pub fn name(self) -> &'static str {
        match self {
            TheoremId::SimultaneousOptimality => "simultaneous_optimality",
            TheoremId::OverPursuitBound => "over_pursuit_bound",
            TheoremId::UnfairnessDecomposition => "unfairness_decomposition",
            TheoremId::TradeoffElimination => "tradeoff_elimination",
            TheoremId::SharpDeclineConditions => "sharp_decline_conditions",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub satisfied: bool,
    pub measured: Vec<(String, f64)>,
}

impl ConditionCheck {
    fn new(name: &str, satisfied: bool, measured: &[(&str, f64)]) -> Self {
        ConditionCheck {
            name: name.to_string(),
            satisfied,
            measured: measured.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.measured
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub id: TheoremId,
    /// Classifier family the check ranged over, when it depends on one.
    pub family_scope: Option<String>,
    pub conditions: Vec<ConditionCheck>,
    /// Whether the hypotheses held, so the conclusion was tested.
    pub conclusion_checked: bool,
    pub conclusion_holds: bool,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

impl TheoremReport {
    fn new(id: TheoremId, tolerance: f64) -> Self {
        TheoremReport {
            id,
            family_scope: None,
            conditions: Vec::new(),
            conclusion_checked: false,
            conclusion_holds: true,
            tolerance,
            notes: Vec::new(),
        }
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Passing means the conclusion was not contradicted.
    pub fn passed(&self) -> bool {
        !self.conclusion_checked || self.conclusion_holds
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] tolerance={:e}", self.id.name(), self.tolerance)?;
        if let Some(scope) = &self.family_scope {
            writeln!(f, "  family: {scope}")?;
        }
        for c in &self.conditions {
            write!(
                f,
                "  {} {}",
                if c.satisfied { "[x]" } else { "[ ]" },
                c.name
            )?;
            for (k, v) in &c.measured {
                write!(f, " {k}={v:.12}")?;
            }
            writeln!(f)?;
        }
        let verdict = match (self.conclusion_checked, self.conclusion_holds) {
            (false, _) => "not tested (hypotheses not met)",
            (true, true) => "holds",
            (true, false) => "FAILS",
        };
        writeln!(f, "  conclusion: {verdict}")?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

fn max_over(points: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    points.iter().map(|&x| g(x)).fold(0.0, f64::max)
}

/// Necessary conditions for a shared classifier that maximises accuracy and
/// fairness at once, evaluated at each of its boundary points.
pub fn check_simultaneous_optimality(
    model: &GroupConditionalModel,
    clf: &GroupwiseClassifier,
    w: &MetricWeights,
    tol: f64,
    cfg: &ClassifierConfig,
) -> Result<TheoremReport> {
    if !clf.is_shared() {
        return Err(Error::Contract(
            "simultaneous-optimality conditions are defined for shared classifiers only".into(),
        ));
    }
    let b = clf.region(Group::Zero).boundaries();
    let c = |a, y, x| model.conditional(a, y).pdf(x);
    let (pos, neg) = (Label::Positive, Label::Negative);
    let (g0, g1) = (Group::Zero, Group::One);
    let mut r = TheoremReport::new(TheoremId::SimultaneousOptimality, tol);

    let gap = max_over(&b, |x| {
        (model.label_density(pos, x) - model.label_density(neg, x)).abs()
    });
    let boundary_ok = gap <= tol;
    r.conditions.push(ConditionCheck::new(
        "boundary: f(x|Y=1) = f(x|Y=0)",
        boundary_ok,
        &[
            ("max_density_gap", gap),
            ("boundary_points", b.len() as f64),
        ],
    ));

    let rates = metrics::confusion_rates(model, clf);
    let (dt, dn) = (rates.tpr_gap(), rates.tnr_gap());
    let cond1 = dt.abs() <= tol && dn.abs() <= tol;
    r.conditions.push(ConditionCheck::new(
        "condition 1: equal TPR and equal TNR across groups",
        cond1,
        &[
            ("tpr0", rates.tpr[0]),
            ("tpr1", rates.tpr[1]),
            ("tpr_gap", dt),
            ("tnr0", rates.tnr[0]),
            ("tnr1", rates.tnr[1]),
            ("tnr_gap", dn),
        ],
    ));

    let identity = max_over(&b, |x| {
        ((c(g0, pos, x) - c(g1, pos, x)).abs() - (c(g0, neg, x) - c(g1, neg, x)).abs()).abs()
    });
    let cond2 = identity <= tol;
    r.conditions.push(ConditionCheck::new(
        "condition 2: |f(x|1,A=0) - f(x|1,A=1)| = |f(x|0,A=0) - f(x|0,A=1)|",
        cond2,
        &[("max_identity_residual", identity)],
    ));

    let balanced = Group::BOTH.iter().all(|&a| {
        Label::BOTH
            .iter()
            .all(|&y| (model.joint(a, y) - 0.25).abs() <= 1e-12)
    });
    if balanced {
        let spread = max_over(&b, |x| {
            let v = [
                model.joint_density(g1, pos, x) + model.joint_density(g1, neg, x),
                model.joint_density(g0, pos, x) + model.joint_density(g0, neg, x),
                model.joint_density(g0, pos, x) + model.joint_density(g1, pos, x),
                model.joint_density(g0, neg, x) + model.joint_density(g1, neg, x),
            ];
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        });
        r.conditions.push(ConditionCheck::new(
            "balanced condition 1: f(x,A=1) = f(x,A=0) = f(x,Y=1) = f(x,Y=0)",
            spread <= tol,
            &[("max_spread", spread)],
        ));
        let within = max_over(&b, |x| {
            (c(g0, neg, x) - c(g0, pos, x))
                .abs()
                .max((c(g1, neg, x) - c(g1, pos, x)).abs())
        });
        r.conditions.push(ConditionCheck::new(
            "balanced condition 2: f(x|A=a,Y=0) = f(x|A=a,Y=1) for both groups",
            within <= tol,
            &[("max_gap", within)],
        ));
    }

    let acc = metrics::accuracy_from_rates(model, &rates, w);
    let f_u = metrics::unfairness(&rates, w);
    let acc_opt = metrics::accuracy(
        model,
        &classifiers::bayes_accuracy_optimal(model, BayesScope::Overall, cfg)?,
        w,
    );
    let f_u_opt = metrics::unfairness(
        &metrics::confusion_rates(model, &classifiers::fairness_optimal(model, w, cfg)?),
        w,
    );
    let optimal = acc >= acc_opt - tol && f_u <= f_u_opt + tol;
    r.conditions.push(ConditionCheck::new(
        "classifier maximises accuracy and fairness simultaneously",
        optimal,
        &[
            ("accuracy", acc),
            ("accuracy_optimum", acc_opt),
            ("f_u", f_u),
            ("f_u_fairness_optimum", f_u_opt),
        ],
    ));
    r.conclusion_checked = optimal;
    r.conclusion_holds = boundary_ok && (cond1 || cond2);
    if b.is_empty() {
        r.notes
            .push("classifier has no boundary points; boundary conditions hold vacuously".into());
    }
    Ok(r)
}

/// The reference accuracies behind the over-pursuit bound.
#[derive(Debug, Clone, PartialEq)]
pub struct OverPursuitBound {
    pub fairness_optimum: GroupwiseClassifier,
    /// `F_U` of the fairness optimum.
    pub f_u_fair: f64,
    /// Accuracy of the fairness optimum.
    pub acc_fair: f64,
    /// Accuracy of group `a`'s optimal region applied to both groups.
    pub acc_group_optimum: [f64; 2],
    pub fairness_optimum_well_defined: bool,
}

impl OverPursuitBound {
    pub fn new(
        model: &GroupConditionalModel,
        w: &MetricWeights,
        cfg: &ClassifierConfig,
    ) -> Result<Self> {
        let fair = classifiers::fairness_optimal(model, w, cfg)?;
        let rates = metrics::confusion_rates(model, &fair);
        let opt = classifiers::bayes_accuracy_optimal(model, BayesScope::PerGroup, cfg)?;
        let acc_group_optimum = Group::BOTH.map(|a| {
            metrics::accuracy(
                model,
                &GroupwiseClassifier::shared(opt.region(a).clone()),
                w,
            )
        });
        Ok(OverPursuitBound {
            f_u_fair: metrics::unfairness(&rates, w),
            acc_fair: metrics::accuracy_from_rates(model, &rates, w),
            acc_group_optimum,
            fairness_optimum_well_defined: classifiers::well_defined_against(&fair, &opt)
                .well_defined,
            fairness_optimum: fair,
        })
    }

    /// `max{Acc(T*_0 -> both), Acc(T*_1 -> both)}`.
    pub fn group_bound(&self) -> f64 {
        self.acc_group_optimum[0].max(self.acc_group_optimum[1])
    }

    /// `min{Acc(T^f), max{...}}`.
    pub fn bound(&self) -> f64 {
        self.acc_fair.min(self.group_bound())
    }

    /// `F_U <= F_U(T^f) + margin`.
    pub fn over_pursues(&self, f_u: f64) -> bool {
        f_u <= self.f_u_fair + OVER_PURSUIT_MARGIN
    }

    /// `F_U < F_U(T^f) - margin`.
    pub fn strictly_over_pursues(&self, f_u: f64) -> bool {
        f_u < self.f_u_fair - OVER_PURSUIT_MARGIN
    }
}

/// Accuracy bound for a shared classifier at or below the fairness optimum's
/// unfairness.
pub fn check_over_pursuit(
    model: &GroupConditionalModel,
    clf: &GroupwiseClassifier,
    w: &MetricWeights,
    tol: f64,
    cfg: &ClassifierConfig,
) -> Result<TheoremReport> {
    let bound = OverPursuitBound::new(model, w, cfg)?;
    let rates = metrics::confusion_rates(model, clf);
    let f_u = metrics::unfairness(&rates, w);
    let acc = metrics::accuracy_from_rates(model, &rates, w);
    if !bound.over_pursues(f_u) {
        return Err(Error::Contract(format!(
            "classifier unfairness {f_u:.12} exceeds the fairness optimum's {:.12}; it does not over-pursue fairness",
            bound.f_u_fair
        )));
    }
    Ok(over_pursuit_report(&bound, f_u, acc, tol))
}

/// [`check_over_pursuit`] against a precomputed [`OverPursuitBound`].
pub fn over_pursuit_report(
    bound: &OverPursuitBound,
    f_u: f64,
    acc: f64,
    tol: f64,
) -> TheoremReport {
    let mut r = TheoremReport::new(TheoremId::OverPursuitBound, tol);
    r.family_scope = Some("shared classifiers".into());
    let strict = bound.strictly_over_pursues(f_u);
    r.conditions.push(ConditionCheck::new(
        "over-pursues fairness: F_U <= F_U(T^f)",
        true,
        &[("f_u", f_u), ("f_u_fairness_optimum", bound.f_u_fair)],
    ));
    r.conditions.push(ConditionCheck::new(
        "strictly below the fairness optimum's unfairness",
        strict,
        &[("margin", OVER_PURSUIT_MARGIN)],
    ));
    r.conditions.push(ConditionCheck::new(
        "fairness optimum is well-defined",
        bound.fairness_optimum_well_defined,
        &[],
    ));
    let sharpened = bound.group_bound() < bound.acc_fair;
    r.conditions.push(ConditionCheck::new(
        "sharpened regime: max{Acc(T*_0), Acc(T*_1)} < Acc(T^f)",
        sharpened,
        &[
            ("acc_fairness_optimum", bound.acc_fair),
            ("acc_group0_optimum_both", bound.acc_group_optimum[0]),
            ("acc_group1_optimum_both", bound.acc_group_optimum[1]),
        ],
    ));
    let first = acc <= bound.acc_fair + tol;
    let combined = acc <= bound.bound() + tol;
    r.conditions.push(ConditionCheck::new(
        "bound values",
        true,
        &[
            ("accuracy", acc),
            ("first_argument_bound", bound.acc_fair),
            ("group_bound", bound.group_bound()),
            ("combined_bound", bound.bound()),
        ],
    ));
    r.conclusion_checked = strict;
    r.conclusion_holds = combined;
    if !strict {
        r.notes.push(format!(
            "classifier ties the fairness optimum's unfairness; first argument of the bound {}, combined bound {}",
            if first { "holds" } else { "fails" },
            if combined { "holds" } else { "fails" }
        ));
    }
    if sharpened && bound.acc_fair > bound.group_bound() + tol {
        r.notes.push(format!(
            "the fairness optimum itself (accuracy {:.6}) exceeds the combined bound {:.6}",
            bound.acc_fair,
            bound.bound()
        ));
    }
    r
}

/// The over-pursuit bound over every shared candidate of a sweep. The
/// conclusion is tested on candidates strictly below the fairness optimum's
/// unfairness.
pub fn over_pursuit_sweep(
    bound: &OverPursuitBound,
    candidates: &[FrontierPoint],
    tol: f64,
) -> TheoremReport {
    let mut r = TheoremReport::new(TheoremId::OverPursuitBound, tol);
    r.family_scope = Some("shared candidates of the sweep".into());
    let shared: Vec<&FrontierPoint> = candidates
        .iter()
        .filter(|c| c.classifier().is_shared())
        .collect();
    let strict: Vec<&&FrontierPoint> = shared
        .iter()
        .filter(|c| bound.strictly_over_pursues(c.f_u))
        .collect();
    let excess = strict
        .iter()
        .map(|c| c.accuracy - bound.bound())
        .fold(f64::NEG_INFINITY, f64::max);
    let violations = strict
        .iter()
        .filter(|c| c.accuracy > bound.bound() + tol)
        .count();
    r.conditions.push(ConditionCheck::new(
        "strict over-pursuers present: F_U < F_U(T^f)",
        !strict.is_empty(),
        &[
            ("shared_candidates", shared.len() as f64),
            ("strict_over_pursuers", strict.len() as f64),
            ("f_u_fairness_optimum", bound.f_u_fair),
        ],
    ));
    r.conditions.push(ConditionCheck::new(
        "bound values",
        true,
        &[
            ("first_argument_bound", bound.acc_fair),
            ("acc_group0_optimum_both", bound.acc_group_optimum[0]),
            ("acc_group1_optimum_both", bound.acc_group_optimum[1]),
            ("combined_bound", bound.bound()),
        ],
    ));
    r.conditions.push(ConditionCheck::new(
        "every strict over-pursuer within the bound",
        violations == 0,
        &[
            ("violations", violations as f64),
            ("max_excess", if excess.is_finite() { excess } else { 0.0 }),
        ],
    ));
    r.conclusion_checked = !strict.is_empty();
    r.conclusion_holds = violations == 0;
    if bound.acc_fair > bound.group_bound() + tol {
        r.notes.push(format!(
            "the fairness optimum itself (accuracy {:.6}) exceeds the combined bound {:.6}",
            bound.acc_fair,
            bound.bound()
        ));
    }
    r
}

/// Decomposition inequality and the equality conditions for one classifier.
pub fn check_decomposition(
    model: &GroupConditionalModel,
    clf: &GroupwiseClassifier,
    w: &MetricWeights,
    tol: f64,
    cfg: &ClassifierConfig,
) -> Result<TheoremReport> {
    let reference = Reference::new(model, w, cfg)?;
    Ok(decomposition_report(model, &reference, clf, tol))
}

/// [`check_decomposition`] against a precomputed [`Reference`].
pub fn decomposition_report(
    model: &GroupConditionalModel,
    reference: &Reference,
    clf: &GroupwiseClassifier,
    tol: f64,
) -> TheoremReport {
    let wd = classifiers::well_defined_against(clf, &reference.optimum);
    let d = reference.decompose(&metrics::confusion_rates(model, clf), wd.well_defined);
    let s = &reference.rates;
    let r0 = reference.optimum.region(Group::Zero);
    let r1 = reference.optimum.region(Group::One);
    let mut r = TheoremReport::new(TheoremId::UnfairnessDecomposition, tol);
    r.conditions.push(ConditionCheck::new(
        "subadditivity: F_U <= F_DU + F_MU",
        d.residual <= tol,
        &[
            ("f_u", d.f_u),
            ("f_du", d.f_du),
            ("f_mu", d.f_mu),
            ("residual", d.residual),
        ],
    ));
    r.conditions.push(ConditionCheck::new(
        "classifier is well-defined",
        wd.well_defined,
        &[("enclosed_intervals", wd.enclosed.len() as f64)],
    ));
    let pos_on_s = r1.difference(r0).without_slivers(SLIVER).is_empty();
    let neg_on_s = r0.difference(r1).without_slivers(SLIVER).is_empty();
    let rate_measures = [
        ("tpr0_star", s.tpr[0]),
        ("tpr1_star", s.tpr[1]),
        ("tnr0_star", s.tnr[0]),
        ("tnr1_star", s.tnr[1]),
    ];
    let c1 = pos_on_s && s.tpr[0] < s.tpr[1] && s.tnr[0] > s.tnr[1];
    let c2 = neg_on_s && s.tpr[0] > s.tpr[1] && s.tnr[0] < s.tnr[1];
    r.conditions.push(ConditionCheck::new(
        "condition 1: T*_0 >= 0 on S, TPR*_0 < TPR*_1, TNR*_0 > TNR*_1",
        c1,
        &rate_measures,
    ));
    r.conditions.push(ConditionCheck::new(
        "condition 2: T*_0 <= 0 on S, TPR*_0 > TPR*_1, TNR*_0 < TNR*_1",
        c2,
        &rate_measures,
    ));
    r.conclusion_checked = wd.well_defined && (c1 || c2);
    r.conclusion_holds = d.residual.abs() <= tol;
    if r.conclusion_checked && d.f_mu <= tol {
        r.notes.push(
            "model unfairness is zero here, so the equality holds without the strict F_MU > 0 claim".into(),
        );
    }
    r
}

/// How boundary alignment between the per-group optima is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentMode {
    /// The optima share the same boundary points, orientation ignored.
    BoundaryLocation,
    /// The optima predict the same label everywhere, i.e. the disagreement
    /// region is empty.
    StrictIndicator,
}

impl AlignmentMode {
    pub fn name(self) -> &'static str {
        match self {
            AlignmentMode::BoundaryLocation => "boundary_location",
            AlignmentMode::StrictIndicator => "strict_indicator",
        }
    }
}

/// Zero data unfairness plus aligned per-group optima should make a perfectly
/// fair, maximally accurate per-group classifier available. The conclusion is
/// searched for in the sweep of `search`.
#[allow(clippy::too_many_arguments)]
pub fn check_tradeoff_elimination<E: Executor>(
    model: &GroupConditionalModel,
    mode: AlignmentMode,
    search: &FamilySpec,
    w: &MetricWeights,
    tol: f64,
    cfg: &ClassifierConfig,
    exec: &E,
) -> Result<TheoremReport> {
    let reference = Reference::new(model, w, cfg)?;
    let mut r = TheoremReport::new(TheoremId::TradeoffElimination, tol);
    r.family_scope = Some(search.name());
    let no_data_unfairness = reference.f_du <= tol;
    r.conditions.push(ConditionCheck::new(
        "no data unfairness: F_DU = 0",
        no_data_unfairness,
        &[("f_du", reference.f_du)],
    ));
    let r0 = reference.optimum.region(Group::Zero);
    let r1 = reference.optimum.region(Group::One);
    let aligned = match mode {
        AlignmentMode::BoundaryLocation => {
            let (b0, b1) = (r0.boundaries(), r1.boundaries());
            let same =
                b0.len() == b1.len() && b0.iter().zip(&b1).all(|(x, y)| (x - y).abs() <= tol);
            let max_diff = b0
                .iter()
                .zip(&b1)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            r.conditions.push(ConditionCheck::new(
                "aligned boundaries: optimal boundary points coincide across groups",
                same,
                &[
                    ("boundary_points_group0", b0.len() as f64),
                    ("boundary_points_group1", b1.len() as f64),
                    ("max_boundary_difference", max_diff),
                ],
            ));
            same
        }
        AlignmentMode::StrictIndicator => {
            let s = r0.symmetric_difference(r1).without_slivers(SLIVER);
            let empty = s.is_empty();
            r.conditions.push(ConditionCheck::new(
                "aligned indicators: I(T*_0(x)) = I(T*_1(x)) on S",
                empty,
                &[("disagreement_intervals", s.len() as f64)],
            ));
            empty
        }
    };
    let target = metrics::accuracy_from_rates(model, &reference.rates, w);
    let sweep = frontier::sweep(model, search, w, cfg, exec)?;
    let fair: Vec<&frontier::FrontierPoint> =
        sweep.candidates.iter().filter(|c| c.f_u <= tol).collect();
    let best = fair
        .iter()
        .map(|c| c.accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    let found = best >= target - tol;
    r.conditions.push(ConditionCheck::new(
        "search: perfectly fair classifier at per-group optimal accuracy",
        found,
        &[
            ("per_group_optimal_accuracy", target),
            ("family_max_accuracy", sweep.max_accuracy()),
            ("fair_candidates", fair.len() as f64),
            (
                "best_fair_accuracy",
                if best.is_finite() { best } else { 0.0 },
            ),
        ],
    ));
    let predicted = no_data_unfairness && aligned;
    r.conclusion_checked = predicted;
    r.conclusion_holds = found;
    if predicted != found {
        r.notes.push(format!(
            "{} alignment predicts {}, the search {}",
            mode.name(),
            if predicted {
                "that the trade-off can be eliminated"
            } else {
                "a remaining trade-off"
            },
            if found {
                "found a fair and maximally accurate classifier"
            } else {
                "found none"
            }
        ));
    }
    Ok(r)
}

/// `{x : f(x|A=a,Y=1) >= f(x|A=a,Y=0)}` (or the reverse when `flipped`) over
/// the conditional, unweighted densities.
fn conditional_form(
    model: &GroupConditionalModel,
    a: Group,
    flipped: bool,
    cfg: &ClassifierConfig,
) -> IntervalSet {
    let s = if flipped { -1.0 } else { 1.0 };
    let g = |x: f64| {
        s * (model.conditional(a, Label::Positive).pdf(x)
            - model.conditional(a, Label::Negative).pdf(x))
    };
    let (lo, hi) = model.central_range(&[a], cfg.central_mass);
    sign_region(&g, lo, hi, &cfg.sign)
}

/// Conditions characterising an accuracy jump on a frontier, evaluated at the
/// point just before the jump. `None` yields a vacuous report.
pub fn check_sharp_decline(
    model: &GroupConditionalModel,
    sweep: &Sweep,
    frontier: &Frontier,
    jump: Option<&Jump>,
    tol: f64,
    cfg: &ClassifierConfig,
) -> Result<TheoremReport> {
    let mut r = TheoremReport::new(TheoremId::SharpDeclineConditions, tol);
    r.family_scope = Some(sweep.family.name());
    let Some(jump) = jump else {
        r.notes
            .push("no accuracy jump on the frontier; nothing to check".into());
        return Ok(r);
    };
    if !frontier.jumps.contains(jump) || jump.index + 1 >= frontier.points.len() {
        return Err(Error::input("jump is not on the given frontier"));
    }
    let at = &frontier.points[jump.index];
    let (dt, dn) = (at.rates.tpr_gap(), at.rates.tnr_gap());
    let product = dt * dn;
    r.conditions.push(ConditionCheck::new(
        "condition 1: (TPR_1 - TPR_0)(TNR_1 - TNR_0) >= 0",
        product >= -tol,
        &[("product", product), ("tpr_gap", dt), ("tnr_gap", dn)],
    ));

    let better = sweep
        .candidates
        .iter()
        .filter(|c| (c.f_u - at.f_u).abs() <= tol && c.accuracy > at.accuracy + tol)
        .count();
    r.conditions.push(ConditionCheck::new(
        "condition 2: maximal accuracy at its unfairness level",
        better == 0,
        &[
            ("accuracy", at.accuracy),
            ("f_u", at.f_u),
            ("better_candidates", better as f64),
        ],
    ));

    let clf = at.classifier();
    let (lo, hi) = (sweep.grid[0], sweep.grid[sweep.grid.len() - 1]);
    let step = (hi - lo) / (sweep.grid.len().max(2) - 1) as f64;
    let distance = |forms: [IntervalSet; 2]| {
        Group::BOTH
            .iter()
            .map(|&a| {
                clf.region(a)
                    .symmetric_difference(&forms[a.index()])
                    .measure_within(lo, hi)
            })
            .sum::<f64>()
    };
    let group1_flipped = distance([
        conditional_form(model, Group::Zero, false, cfg),
        conditional_form(model, Group::One, true, cfg),
    ]);
    let group0_flipped = distance([
        conditional_form(model, Group::Zero, true, cfg),
        conditional_form(model, Group::One, false, cfg),
    ]);
    let branch = if dt >= 0.0 && dn >= 0.0 {
        Some(group1_flipped)
    } else if dt <= 0.0 && dn <= 0.0 {
        Some(group0_flipped)
    } else {
        None
    };
    let cond3 = branch.is_some_and(|d| d <= step);
    r.conditions.push(ConditionCheck::new(
        "condition 3: one group's Bayes form flipped, matching the rate ordering",
        cond3,
        &[
            ("distance_group1_flipped", group1_flipped),
            ("distance_group0_flipped", group0_flipped),
            ("grid_step", step),
            (
                "rate_ordering_branch",
                match branch {
                    Some(_) if dt >= 0.0 && dn >= 0.0 => 1.0,
                    Some(_) => 0.0,
                    None => -1.0,
                },
            ),
        ],
    ));
    if branch.is_none() {
        r.notes
            .push("TPR and TNR gaps have opposite signs, so no flipped form applies".into());
    }
    r.conclusion_checked = true;
    r.conclusion_holds = r.conditions.iter().all(|c| c.satisfied);
    r.notes.push(format!(
        "jump of {:.6} in accuracy at fairness {:.6}",
        jump.accuracy_drop, jump.fairness_at
    ));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Orientation;
    use crate::exec::Serial;
    use crate::frontier::{ClassifierParams, OrientationChoice, ShapeThresholds};
    use crate::population::{scenario, ScenarioId};
    use crate::Distribution;
    use alloc::boxed::Box;
    use alloc::vec;

    fn cfg() -> ClassifierConfig {
        ClassifierConfig::default()
    }

    fn w() -> MetricWeights {
        MetricWeights::default()
    }

    fn twins() -> GroupConditionalModel {
        let n = |mu| Distribution::normal(mu, 1.5).unwrap();
        GroupConditionalModel::new(
            "twins",
            [[0.25, 0.25], [0.25, 0.25]],
            [[n(0.0), n(3.0)], [n(0.0), n(3.0)]],
        )
        .unwrap()
    }

    #[test]
    fn simultaneous_optimality_identical_groups() {
        let m = twins();
        let c = classifiers::bayes_accuracy_optimal(&m, BayesScope::Overall, &cfg()).unwrap();
        let r = check_simultaneous_optimality(&m, &c, &w(), 1e-6, &cfg()).unwrap();
        assert!(r.conditions[..3].iter().all(|c| c.satisfied), "{r}");
        assert!(r.conclusion_holds);
    }

    #[test]
    fn simultaneous_optimality_example1_rate_gap() {
        let m = scenario(ScenarioId::Example1);
        let c = classifiers::bayes_accuracy_optimal(&m, BayesScope::Overall, &cfg()).unwrap();
        let r = check_simultaneous_optimality(&m, &c, &w(), 1e-6, &cfg()).unwrap();
        let c1 = &r.conditions[1];
        assert!(!c1.satisfied);
        assert!(c1.value("tpr_gap").unwrap().abs() > 0.1);
    }

    #[test]
    fn simultaneous_optimality_example4_threshold() {
        let m = scenario(ScenarioId::Example4Identical);
        let c = GroupwiseClassifier::threshold(6.0, Orientation::PositiveAbove);
        let r = check_simultaneous_optimality(&m, &c, &w(), 1e-6, &cfg()).unwrap();
        let c1 = &r.conditions[1];
        assert!(!c1.satisfied);
        assert!((c1.value("tpr0").unwrap() - 0.125).abs() < 1e-12);
        assert!((c1.value("tpr1").unwrap() - 0.875).abs() < 1e-12);
        let per_group =
            classifiers::bayes_accuracy_optimal(&m, BayesScope::PerGroup, &cfg()).unwrap();
        assert!(matches!(
            check_simultaneous_optimality(&m, &per_group, &w(), 1e-6, &cfg()),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn over_pursuit_reference_values() {
        let m = scenario(ScenarioId::Example1);
        let b = OverPursuitBound::new(&m, &w(), &cfg()).unwrap();
        assert!((b.acc_group_optimum[0] - 0.8403).abs() < 1e-4);
        assert!((b.acc_group_optimum[1] - 0.9070).abs() < 1e-4);
        let r = check_over_pursuit(&m, &b.fairness_optimum, &w(), 1e-6, &cfg()).unwrap();
        assert!(!r.conclusion_checked);
        let vals = r.condition("bound values").unwrap();
        assert_eq!(vals.value("accuracy"), vals.value("first_argument_bound"));
        let unfair = GroupwiseClassifier::threshold(6.0, Orientation::PositiveAbove);
        assert!(matches!(
            check_over_pursuit(&m, &unfair, &w(), 1e-6, &cfg()),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn decomposition_examples() {
        let m = scenario(ScenarioId::Example3);
        let reference = Reference::new(&m, &w(), &cfg()).unwrap();
        let r = decomposition_report(&m, &reference, &reference.optimum, 1e-9);
        assert!(r.conclusion_checked && r.conclusion_holds);
        let c = GroupwiseClassifier::threshold(4.0, Orientation::PositiveAbove);
        let r = check_decomposition(&m, &c, &w(), 1e-9, &cfg()).unwrap();
        assert!(r.conclusion_checked && r.conclusion_holds, "{r}");
        let f_du = r.conditions[0].value("f_du").unwrap();
        assert!((f_du - 0.0430).abs() < 5e-4);
    }

    #[test]
    fn tradeoff_elimination_example4_identical() {
        let m = scenario(ScenarioId::Example4Identical);
        let fam = FamilySpec::per_group_threshold([OrientationChoice::Both; 2]).with_resolution(41);
        let r = check_tradeoff_elimination(
            &m,
            AlignmentMode::BoundaryLocation,
            &fam,
            &w(),
            1e-9,
            &cfg(),
            &Serial,
        )
        .unwrap();
        assert!(r.conditions.iter().all(|c| c.satisfied), "{r}");
        assert!(r.notes.is_empty());
        assert!(r.conclusion_checked && r.conclusion_holds);
        let s = check_tradeoff_elimination(
            &m,
            AlignmentMode::StrictIndicator,
            &fam,
            &w(),
            1e-9,
            &cfg(),
            &Serial,
        )
        .unwrap();
        assert!(!s.conditions[1].satisfied);
        assert!(!s.conclusion_checked);
        assert_eq!(s.notes.len(), 1);
    }

    #[test]
    fn sharp_decline_vacuous_and_foreign_jump() {
        let m = scenario(ScenarioId::Example1);
        let (s, f) = frontier::frontier_of(
            &m,
            &FamilySpec::shared_threshold(OrientationChoice::PositiveAbove).with_resolution(101),
            &w(),
            &cfg(),
            &Serial,
        )
        .unwrap();
        let r = check_sharp_decline(&m, &s, &f, None, 1e-6, &cfg()).unwrap();
        assert!(r.conditions.is_empty() && r.passed());
        let bogus = Jump {
            index: 0,
            kind: frontier::JumpKind::Accuracy,
            fairness_at: 0.0,
            accuracy_drop: 0.3,
            fairness_rise: 0.0,
        };
        assert!(check_sharp_decline(&m, &s, &f, Some(&bogus), 1e-6, &cfg()).is_err());
    }

    #[test]
    fn sharp_decline_flipped_form_match() {
        // Group 1 is separable and gets the flipped Bayes form.
        let n = |mu, sd| Distribution::normal(mu, sd).unwrap();
        let m = GroupConditionalModel::new(
            "flip",
            [[0.25, 0.25], [0.25, 0.25]],
            [[n(0.0, 1.0), n(1.0, 1.0)], [n(0.0, 1.0), n(4.0, 1.0)]],
        )
        .unwrap();
        let regions = [IntervalSet::at_least(0.5), IntervalSet::below(2.0)];
        let params = ClassifierParams::PerGroupIntervals {
            regions: Box::new(regions),
        };
        let pre = FrontierPoint::evaluate(&m, params, &w());
        let post = frontier::synthetic_point(pre.fairness + 0.001, pre.accuracy - 0.3, 0.0);
        let grid: Vec<f64> = (0..201).map(|i| -5.0 + 0.05 * f64::from(i)).collect();
        let sweep = Sweep {
            family: FamilySpec::per_group_intervals(1),
            grid,
            candidates: vec![pre.clone(), post.clone()],
        };
        let fr = frontier::pareto_filter(&sweep.candidates, ShapeThresholds::for_resolution(201))
            .unwrap();
        assert_eq!(fr.jumps.len(), 1);
        let r = check_sharp_decline(&m, &sweep, &fr, Some(&fr.jumps[0]), 1e-6, &cfg()).unwrap();
        let c3 = &r.conditions[2];
        assert!(
            c3.value("distance_group1_flipped").unwrap() <= c3.value("grid_step").unwrap(),
            "{r}"
        );
    }

    #[test]
    fn report_round_trips_through_json() {
        let m = scenario(ScenarioId::Example3);
        let r = check_decomposition(
            &m,
            &GroupwiseClassifier::threshold(4.0, Orientation::PositiveAbove),
            &w(),
            1e-9,
            &cfg(),
        )
        .unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: TheoremReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
