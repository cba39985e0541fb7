//! Confusion rates, Equalized-Odds unfairness, weighted accuracy and the
//! data/model unfairness decomposition, all in closed form.

use serde::{Deserialize, Serialize};

use crate::classifiers::{self, BayesScope, ClassifierConfig, GroupwiseClassifier, SLIVER};
use crate::error::{Error, Result};
use crate::population::{Group, GroupConditionalModel, Label};

/// Resolution at which objective values are compared for equality.
pub const QUANTUM: f64 = 1e-12;

/// Integer cell of `v` on the [`QUANTUM`] lattice.
pub fn quantize(v: f64) -> i64 {
    libm::round(v / QUANTUM) as i64
}

/// True-positive and true-negative rates per group, indexed by group.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConfusionRates {
    pub tpr: [f64; 2],
    pub tnr: [f64; 2],
}

impl ConfusionRates {
    pub fn tpr(&self, a: Group) -> f64 {
        self.tpr[a.index()]
    }

    pub fn tnr(&self, a: Group) -> f64 {
        self.tnr[a.index()]
    }

    /// Rates of the complemented classifier.
    pub fn complement(&self) -> Self {
        ConfusionRates {
            tpr: self.tpr.map(|v| 1.0 - v),
            tnr: self.tnr.map(|v| 1.0 - v),
        }
    }

    /// Rates with the two groups swapped.
    pub fn swapped(&self) -> Self {
        ConfusionRates {
            tpr: [self.tpr[1], self.tpr[0]],
            tnr: [self.tnr[1], self.tnr[0]],
        }
    }

    /// `TPR(1) - TPR(0)`.
    pub fn tpr_gap(&self) -> f64 {
        self.tpr[1] - self.tpr[0]
    }

    /// `TNR(1) - TNR(0)`.
    pub fn tnr_gap(&self) -> f64 {
        self.tnr[1] - self.tnr[0]
    }
}

/// Unfairness weights `omega` and accuracy weights `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricWeights {
    pub omega1: f64,
    pub omega2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl Default for MetricWeights {
    fn default() -> Self {
        MetricWeights {
            omega1: 0.5,
            omega2: 0.5,
            p1: 1.0,
            p2: 1.0,
        }
    }
}

impl MetricWeights {
    pub fn new(omega1: f64, omega2: f64, p1: f64, p2: f64) -> Result<Self> {
        for (name, v) in [
            ("omega1", omega1),
            ("omega2", omega2),
            ("p1", p1),
            ("p2", p2),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(name, "weight must be finite and >= 0"));
            }
        }
        if (omega1 + omega2 - 1.0).abs() > 1e-12 {
            return Err(Error::param("omega2", "omega1 + omega2 must equal 1"));
        }
        Ok(MetricWeights {
            omega1,
            omega2,
            p1,
            p2,
        })
    }

    /// Accuracy weights of one half each, which halves the accuracy scale.
    pub fn half_accuracy_weights() -> Self {
        MetricWeights {
            p1: 0.5,
            p2: 0.5,
            ..Self::default()
        }
    }
}

pub fn group_rates(
    model: &GroupConditionalModel,
    a: Group,
    region: &crate::IntervalSet,
) -> (f64, f64) {
    let tpr = model.conditional(a, Label::Positive).positive_mass(region);
    let tnr = 1.0 - model.conditional(a, Label::Negative).positive_mass(region);
    (tpr, tnr)
}

pub fn confusion_rates(model: &GroupConditionalModel, clf: &GroupwiseClassifier) -> ConfusionRates {
    let (tpr0, tnr0) = group_rates(model, Group::Zero, clf.region(Group::Zero));
    let (tpr1, tnr1) = group_rates(model, Group::One, clf.region(Group::One));
    ConfusionRates {
        tpr: [tpr0, tpr1],
        tnr: [tnr0, tnr1],
    }
}

/// `F_U = omega1 |TPR(1) - TPR(0)| + omega2 |TNR(1) - TNR(0)|`.
pub fn unfairness(rates: &ConfusionRates, w: &MetricWeights) -> f64 {
    w.omega1 * rates.tpr_gap().abs() + w.omega2 * rates.tnr_gap().abs()
}

/// `1 - F_U`.
pub fn fairness(rates: &ConfusionRates, w: &MetricWeights) -> f64 {
    1.0 - unfairness(rates, w)
}

pub fn accuracy_from_rates(
    model: &GroupConditionalModel,
    rates: &ConfusionRates,
    w: &MetricWeights,
) -> f64 {
    Group::BOTH
        .iter()
        .map(|&a| {
            w.p1 * rates.tpr(a) * model.joint(a, Label::Positive)
                + w.p2 * rates.tnr(a) * model.joint(a, Label::Negative)
        })
        .sum()
}

pub fn accuracy(
    model: &GroupConditionalModel,
    clf: &GroupwiseClassifier,
    w: &MetricWeights,
) -> f64 {
    accuracy_from_rates(model, &confusion_rates(model, clf), w)
}

/// Which sign pattern of the decomposition theorem the reference classifiers
/// exhibit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionCondition {
    /// Group 0's optimum is positive on the whole disagreement region,
    /// `TPR*(0) < TPR*(1)` and `TNR*(0) > TNR*(1)`.
    Condition1,
    /// Group 0's optimum is negative on the whole disagreement region,
    /// `TPR*(0) > TPR*(1)` and `TNR*(0) < TNR*(1)`.
    Condition2,
}

impl DecompositionCondition {
    pub fn name(self) -> &'static str {
        match self {
            DecompositionCondition::Condition1 => "condition1",
            DecompositionCondition::Condition2 => "condition2",
        }
    }
}

/// Per-group accuracy-optimal classifiers and their ("starred") rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub optimum: GroupwiseClassifier,
    pub rates: ConfusionRates,
    pub f_du: f64,
    pub condition: Option<DecompositionCondition>,
    weights: MetricWeights,
}

impl Reference {
    pub fn new(
        model: &GroupConditionalModel,
        w: &MetricWeights,
        cfg: &ClassifierConfig,
    ) -> Result<Self> {
        let optimum = classifiers::bayes_accuracy_optimal(model, BayesScope::PerGroup, cfg)?;
        let rates = confusion_rates(model, &optimum);
        let f_du = unfairness(&rates, w);
        let r0 = optimum.region(Group::Zero);
        let r1 = optimum.region(Group::One);
        let group0_positive_on_s = r1.difference(r0).without_slivers(SLIVER).is_empty();
        let group0_negative_on_s = r0.difference(r1).without_slivers(SLIVER).is_empty();
        let condition = if group0_positive_on_s
            && rates.tpr[0] < rates.tpr[1]
            && rates.tnr[0] > rates.tnr[1]
        {
            Some(DecompositionCondition::Condition1)
        } else if group0_negative_on_s && rates.tpr[0] > rates.tpr[1] && rates.tnr[0] < rates.tnr[1]
        {
            Some(DecompositionCondition::Condition2)
        } else {
            None
        };
        Ok(Reference {
            optimum,
            rates,
            f_du,
            condition,
            weights: *w,
        })
    }

    /// Model unfairness of a classifier with the given rates.
    pub fn f_mu(&self, rates: &ConfusionRates) -> f64 {
        let w = &self.weights;
        let s = &self.rates;
        let dtpr = (rates.tpr[0] - s.tpr[0]) - (rates.tpr[1] - s.tpr[1]);
        let dtnr = (rates.tnr[0] - s.tnr[0]) - (rates.tnr[1] - s.tnr[1]);
        w.omega1 * dtpr.abs() + w.omega2 * dtnr.abs()
    }

    pub fn decompose(&self, rates: &ConfusionRates, well_defined: bool) -> Decomposition {
        let f_u = unfairness(rates, &self.weights);
        let f_mu = self.f_mu(rates);
        let residual = f_u - (self.f_du + f_mu);
        Decomposition {
            f_u,
            f_du: self.f_du,
            f_mu,
            residual,
            equality_holds: residual.abs() <= 1e-9,
            well_defined,
            condition_met: self.condition,
        }
    }
}

/// `F_U` split into data unfairness `f_du` and model unfairness `f_mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub f_u: f64,
    pub f_du: f64,
    pub f_mu: f64,
    /// `f_u - (f_du + f_mu)`; never positive beyond rounding.
    pub residual: f64,
    pub equality_holds: bool,
    pub well_defined: bool,
    /// Sign pattern of the reference classifiers, if one holds.
    pub condition_met: Option<DecompositionCondition>,
}

impl Decomposition {
    /// A well-defined classifier under one of the sign patterns, where the
    /// decomposition is predicted to be exact.
    pub fn condition_detected(&self) -> bool {
        self.well_defined && self.condition_met.is_some()
    }
}

pub fn decompose_unfairness(
    model: &GroupConditionalModel,
    clf: &GroupwiseClassifier,
    w: &MetricWeights,
    cfg: &ClassifierConfig,
) -> Result<Decomposition> {
    let reference = Reference::new(model, w, cfg)?;
    let wd = classifiers::well_defined_against(clf, &reference.optimum);
    Ok(reference.decompose(&confusion_rates(model, clf), wd.well_defined))
}
