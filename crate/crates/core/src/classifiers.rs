//! Per-group interval classifiers and the Bayes accuracy- and fairness-optimal
//! constructors.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::metrics::{self, MetricWeights};
use crate::numeric::{sign_region, SignRegionConfig};
use crate::population::GroupConditionalModel;
pub use crate::population::{Group, Label};

/// Intervals narrower than this are treated as numerical noise when regions
/// are compared.
pub const SLIVER: f64 = 1e-9;

/// Direction of a single-threshold classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Positive on `[t, inf)`.
    PositiveAbove,
    /// Positive on `[-inf, t)`.
    PositiveBelow,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::PositiveAbove, Orientation::PositiveBelow];

    pub fn region(self, t: f64) -> IntervalSet {
        match self {
            Orientation::PositiveAbove => IntervalSet::at_least(t),
            Orientation::PositiveBelow => IntervalSet::below(t),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::PositiveAbove => Orientation::PositiveBelow,
            Orientation::PositiveBelow => Orientation::PositiveAbove,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Orientation::PositiveAbove => "positive_above",
            Orientation::PositiveBelow => "positive_below",
        }
    }
}

/// Whether the Bayes classifier pools both groups or is fitted per group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BayesScope {
    Overall,
    PerGroup,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Maximum number of intervals per group.
    pub max_intervals: usize,
    pub sign: SignRegionConfig,
    /// Mass of the central window in which sign changes are searched.
    pub central_mass: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            max_intervals: 4,
            sign: SignRegionConfig::default(),
            central_mass: 0.99999,
        }
    }
}

/// Predicts `1` for group `a` iff `x` lies in `regions[a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupwiseClassifier {
    regions: [IntervalSet; 2],
}

impl GroupwiseClassifier {
    pub fn shared(region: IntervalSet) -> Self {
        GroupwiseClassifier {
            regions: [region.clone(), region],
        }
    }

    pub fn per_group(region0: IntervalSet, region1: IntervalSet) -> Self {
        GroupwiseClassifier {
            regions: [region0, region1],
        }
    }

    pub fn threshold(t: f64, orientation: Orientation) -> Self {
        Self::shared(orientation.region(t))
    }

    pub fn group_thresholds(t: [f64; 2], orientations: [Orientation; 2]) -> Self {
        Self::per_group(orientations[0].region(t[0]), orientations[1].region(t[1]))
    }

    pub fn all_positive() -> Self {
        Self::shared(IntervalSet::full())
    }

    pub fn all_negative() -> Self {
        Self::shared(IntervalSet::empty())
    }

    pub fn region(&self, a: Group) -> &IntervalSet {
        &self.regions[a.index()]
    }

    pub fn regions(&self) -> &[IntervalSet; 2] {
        &self.regions
    }

    pub fn is_shared(&self) -> bool {
        self.regions[0] == self.regions[1]
    }

    pub fn predict(&self, a: Group, x: f64) -> u8 {
        u8::from(self.regions[a.index()].contains(x))
    }

    pub fn complement(&self) -> Self {
        GroupwiseClassifier {
            regions: [self.regions[0].complement(), self.regions[1].complement()],
        }
    }

    pub fn interval_count(&self) -> usize {
        self.regions[0].len().max(self.regions[1].len())
    }

    pub fn check_complexity(&self, bound: usize) -> Result<()> {
        let found = self.interval_count();
        if found > bound {
            Err(Error::Complexity { found, bound })
        } else {
            Ok(())
        }
    }

    /// Total order used for deterministic tie-breaking.
    pub fn lex_cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.regions[0]
            .lex_cmp(&other.regions[0])
            .then_with(|| self.regions[1].lex_cmp(&other.regions[1]))
    }
}

impl fmt::Display for GroupwiseClassifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_shared() {
            write!(f, "shared {}", self.regions[0])
        } else {
            write!(f, "a0 {} ; a1 {}", self.regions[0], self.regions[1])
        }
    }
}

fn bounded(region: IntervalSet, cfg: &ClassifierConfig) -> Result<IntervalSet> {
    if region.len() > cfg.max_intervals {
        Err(Error::Complexity {
            found: region.len(),
            bound: cfg.max_intervals,
        })
    } else {
        Ok(region)
    }
}

/// Positive region of the accuracy-optimal classifier restricted to group `a`:
/// `p(a,1) f(x|a,1) >= p(a,0) f(x|a,0)`.
pub fn group_bayes_region(
    model: &GroupConditionalModel,
    a: Group,
    cfg: &ClassifierConfig,
) -> Result<IntervalSet> {
    let g = |x: f64| {
        model.joint_density(a, Label::Positive, x) - model.joint_density(a, Label::Negative, x)
    };
    let (lo, hi) = model.central_range(&[a], cfg.central_mass);
    bounded(sign_region(&g, lo, hi, &cfg.sign), cfg)
}

/// Accuracy-optimal classifier, pooled (`Overall`) or fitted per group.
pub fn bayes_accuracy_optimal(
    model: &GroupConditionalModel,
    scope: BayesScope,
    cfg: &ClassifierConfig,
) -> Result<GroupwiseClassifier> {
    match scope {
        BayesScope::Overall => {
            let g = |x: f64| {
                Group::BOTH
                    .iter()
                    .map(|&a| {
                        model.joint_density(a, Label::Positive, x)
                            - model.joint_density(a, Label::Negative, x)
                    })
                    .sum::<f64>()
            };
            let (lo, hi) = model.central_range(&Group::BOTH, cfg.central_mass);
            Ok(GroupwiseClassifier::shared(bounded(
                sign_region(&g, lo, hi, &cfg.sign),
                cfg,
            )?))
        }
        BayesScope::PerGroup => Ok(GroupwiseClassifier::per_group(
            group_bayes_region(model, Group::Zero, cfg)?,
            group_bayes_region(model, Group::One, cfg)?,
        )),
    }
}

/// Sign pattern `(s1, s2)` of a fairness hypothesis region
/// `{s1 * lambda1 + s2 * lambda2 >= 0}`.
pub const HYPOTHESIS_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// The weighted density gaps between groups: `lambda1` for the positive class
/// and `lambda2` for the negative class.
pub fn lambdas(model: &GroupConditionalModel, w: &MetricWeights, x: f64) -> (f64, f64) {
    let c = |a, y| model.conditional(a, y).pdf(x);
    (
        w.omega1 * (c(Group::One, Label::Positive) - c(Group::Zero, Label::Positive)),
        w.omega2 * (c(Group::One, Label::Negative) - c(Group::Zero, Label::Negative)),
    )
}

/// The four candidate regions `{s1 * lambda1 + s2 * lambda2 >= 0}`, in the
/// order of [`HYPOTHESIS_SIGNS`].
pub fn fairness_hypotheses(
    model: &GroupConditionalModel,
    w: &MetricWeights,
    cfg: &ClassifierConfig,
) -> Result<[IntervalSet; 4]> {
    let (lo, hi) = model.central_range(&Group::BOTH, cfg.central_mass);
    let region = |(s1, s2): (f64, f64)| {
        let g = |x: f64| {
            let (l1, l2) = lambdas(model, w, x);
            s1 * l1 + s2 * l2
        };
        bounded(sign_region(&g, lo, hi, &cfg.sign), cfg)
    };
    Ok([
        region(HYPOTHESIS_SIGNS[0])?,
        region(HYPOTHESIS_SIGNS[1])?,
        region(HYPOTHESIS_SIGNS[2])?,
        region(HYPOTHESIS_SIGNS[3])?,
    ])
}

/// Every shared region considered by [`fairness_optimal`]: the four hypothesis
/// regions, then single thresholds (both orientations) at each of their
/// boundary points.
pub fn fairness_candidates(
    model: &GroupConditionalModel,
    w: &MetricWeights,
    cfg: &ClassifierConfig,
) -> Result<Vec<IntervalSet>> {
    let hyps = fairness_hypotheses(model, w, cfg)?;
    let mut points: Vec<f64> = hyps.iter().flat_map(|h| h.boundaries()).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut out: Vec<IntervalSet> = hyps.into_iter().collect();
    for t in points {
        for o in Orientation::BOTH {
            out.push(o.region(t));
        }
    }
    Ok(out)
}

/// Shared classifier minimising Equalized-Odds unfairness among
/// [`fairness_candidates`]. Ties on unfairness go to higher accuracy, then
/// fewer intervals, then the lexicographically smaller boundary. The pooled
/// accuracy-optimal classifier replaces the winner when it is strictly fairer.
pub fn fairness_optimal(
    model: &GroupConditionalModel,
    w: &MetricWeights,
    cfg: &ClassifierConfig,
) -> Result<GroupwiseClassifier> {
    let score = |clf: GroupwiseClassifier| {
        let rates = metrics::confusion_rates(model, &clf);
        (
            metrics::unfairness(&rates, w),
            metrics::accuracy_from_rates(model, &rates, w),
            clf,
        )
    };
    let best = fairness_candidates(model, w, cfg)?
        .into_iter()
        .map(|r| score(GroupwiseClassifier::shared(r)))
        .min_by(|a, b| {
            metrics::quantize(a.0)
                .cmp(&metrics::quantize(b.0))
                .then(metrics::quantize(b.1).cmp(&metrics::quantize(a.1)))
                .then_with(|| a.2.lex_cmp(&b.2))
        })
        .expect("hypothesis regions are always present");
    let bayes = score(bayes_accuracy_optimal(model, BayesScope::Overall, cfg)?);
    if metrics::quantize(bayes.0) < metrics::quantize(best.0) {
        return Ok(bayes.2);
    }
    Ok(best.2)
}

/// Outcome of [`well_defined_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellDefined {
    pub well_defined: bool,
    /// Region where the per-group optimal classifiers disagree.
    pub enclosed: IntervalSet,
    /// Per group, where `clf` departs from the optimum outside `enclosed`.
    pub violations: [IntervalSet; 2],
}

/// Checks that outside the disagreement region of the per-group optimal
/// classifiers, `clf` predicts the common optimal label.
pub fn well_defined_check(
    clf: &GroupwiseClassifier,
    model: &GroupConditionalModel,
    cfg: &ClassifierConfig,
) -> Result<WellDefined> {
    let opt = bayes_accuracy_optimal(model, BayesScope::PerGroup, cfg)?;
    Ok(well_defined_against(clf, &opt))
}

/// [`well_defined_check`] against precomputed per-group optimal regions.
pub fn well_defined_against(
    clf: &GroupwiseClassifier,
    optimum: &GroupwiseClassifier,
) -> WellDefined {
    let enclosed = optimum
        .region(Group::Zero)
        .symmetric_difference(optimum.region(Group::One));
    let violations = Group::BOTH.map(|a| {
        clf.region(a)
            .symmetric_difference(optimum.region(a))
            .difference(&enclosed)
            .without_slivers(SLIVER)
    });
    WellDefined {
        well_defined: violations.iter().all(IntervalSet::is_empty),
        enclosed,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::{scenario, ScenarioId};
    use alloc::vec;

    fn cfg() -> ClassifierConfig {
        ClassifierConfig::default()
    }

    #[test]
    fn predict_tie_and_constants() {
        assert_eq!(
            GroupwiseClassifier::all_positive().predict(Group::Zero, -1e300),
            1
        );
        assert_eq!(
            GroupwiseClassifier::all_negative().predict(Group::One, 0.0),
            0
        );
        let c = GroupwiseClassifier::threshold(4.5, Orientation::PositiveAbove);
        assert_eq!(c.predict(Group::One, 4.5), 1);
        assert_eq!(c.predict(Group::One, 4.499_999_999), 0);
    }

    #[test]
    fn example3_group_thresholds() {
        let m = scenario(ScenarioId::Example3);
        let r0 = group_bayes_region(&m, Group::Zero, &cfg()).unwrap();
        let r1 = group_bayes_region(&m, Group::One, &cfg()).unwrap();
        assert_eq!(r0.len(), 1);
        assert!((r0.intervals()[0].0 - 3.0).abs() < 1e-9);
        assert_eq!(r0.intervals()[0].1, f64::INFINITY);
        let t1 = 6.0 - 9.0 * core::f64::consts::LN_2 / 8.0;
        assert!((r1.intervals()[0].0 - t1).abs() < 1e-9);
    }

    #[test]
    fn example4_identical_orientation_flip() {
        let m = scenario(ScenarioId::Example4Identical);
        let c = bayes_accuracy_optimal(&m, BayesScope::PerGroup, &cfg()).unwrap();
        let r0 = c.region(Group::Zero).intervals();
        assert_eq!(r0.len(), 1);
        assert_eq!(r0[0].0, f64::NEG_INFINITY);
        assert!((r0[0].1 - 6.0).abs() < 1e-9);
        let r1 = c.region(Group::One).intervals();
        assert!((r1[0].0 - 6.0).abs() < 1e-9 && r1[0].1 == f64::INFINITY);
    }

    #[test]
    fn example1_lambda_difference_root() {
        let m = scenario(ScenarioId::Example1);
        let w = MetricWeights::default();
        let h = fairness_hypotheses(&m, &w, &cfg()).unwrap();
        let roots = h[1].boundaries();
        let r: Vec<f64> = roots
            .into_iter()
            .filter(|&x| (8.0..9.0).contains(&x))
            .collect();
        assert_eq!(r.len(), 1);
        let g = |x: f64| {
            let (l1, l2) = lambdas(&m, &w, x);
            l1 - l2
        };
        assert!(g(r[0] - 1e-6).signum() != g(r[0] + 1e-6).signum());
    }

    #[test]
    fn fairness_optimal_identical_groups_is_all_positive() {
        let d = |mu| crate::Distribution::normal(mu, 1.0).unwrap();
        let m = GroupConditionalModel::new(
            "twins",
            [[0.2, 0.3], [0.2, 0.3]],
            [[d(0.0), d(2.0)], [d(0.0), d(2.0)]],
        )
        .unwrap();
        let c = fairness_optimal(&m, &MetricWeights::default(), &cfg()).unwrap();
        assert!(c.region(Group::Zero).is_full() && c.is_shared());
    }

    #[test]
    fn complexity_bound_is_enforced() {
        let r = IntervalSet::new(vec![(0.0, 1.0), (2.0, 3.0), (4.0, 5.0)]).unwrap();
        let c = GroupwiseClassifier::shared(r);
        assert!(c.check_complexity(3).is_ok());
        assert_eq!(
            c.check_complexity(2),
            Err(Error::Complexity { found: 3, bound: 2 })
        );
    }

    #[test]
    fn well_defined_examples() {
        let m = scenario(ScenarioId::Example3);
        let opt = bayes_accuracy_optimal(&m, BayesScope::PerGroup, &cfg()).unwrap();
        assert!(well_defined_check(&opt, &m, &cfg()).unwrap().well_defined);

        let inside = GroupwiseClassifier::threshold(4.0, Orientation::PositiveAbove);
        let wd = well_defined_check(&inside, &m, &cfg()).unwrap();
        assert!(wd.well_defined);
        let e = wd.enclosed.intervals();
        assert_eq!(e.len(), 1);
        assert!((e[0].0 - 3.0).abs() < 1e-9 && (e[0].1 - 5.2203).abs() < 1e-4);

        let outside = GroupwiseClassifier::threshold(8.0, Orientation::PositiveAbove);
        assert!(
            !well_defined_check(&outside, &m, &cfg())
                .unwrap()
                .well_defined
        );
    }
}
