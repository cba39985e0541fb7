//! The group-conditional population `(A, Y) -> X` and the built-in scenarios.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::distributions::{quantile_of, Distribution};
use crate::error::{Error, Result};
use crate::numeric;

const JOINT_TOL: f64 = 1e-12;
const INTEGRAL_TOL: f64 = 1e-8;

/// Sensitive group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Zero,
    One,
}

impl Group {
    pub const BOTH: [Group; 2] = [Group::Zero, Group::One];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn other(self) -> Group {
        match self {
            Group::Zero => Group::One,
            Group::One => Group::Zero,
        }
    }
}

/// Class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Negative, Label::Positive];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Unvalidated distribution parameters, as read from a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Normal { mean: f64, stddev: f64 },
    Triangular { lower: f64, upper: f64, mode: f64 },
    Mixture(Vec<(f64, DistSpec)>),
}

impl DistSpec {
    /// Builds the distribution; on failure the error names the offending key
    /// under `path` (e.g. `dist.a1y1.mode`).
    pub fn build(&self, path: &str) -> Result<Distribution> {
        let prefix = |e: Error| match e {
            Error::InvalidParameter { field, reason } => Error::InvalidParameter {
                field: format!("{path}.{field}"),
                reason,
            },
            other => other,
        };
        match *self {
            DistSpec::Normal { mean, stddev } => Distribution::normal(mean, stddev).map_err(prefix),
            DistSpec::Triangular { lower, upper, mode } => {
                Distribution::triangular(lower, upper, mode).map_err(prefix)
            }
            DistSpec::Mixture(ref comps) => {
                let built = comps
                    .iter()
                    .enumerate()
                    .map(|(i, (w, d))| Ok((*w, d.build(&format!("{path}.components[{i}]"))?)))
                    .collect::<Result<Vec<_>>>()?;
                Distribution::mixture(built).map_err(prefix)
            }
        }
    }
}

impl From<&Distribution> for DistSpec {
    fn from(d: &Distribution) -> Self {
        match d {
            Distribution::Normal(n) => DistSpec::Normal {
                mean: n.mean(),
                stddev: n.stddev(),
            },
            Distribution::Triangular(t) => DistSpec::Triangular {
                lower: t.lower(),
                upper: t.upper(),
                mode: t.mode(),
            },
            Distribution::Mixture(m) => DistSpec::Mixture(
                m.components()
                    .iter()
                    .map(|(w, d)| (*w, DistSpec::from(d)))
                    .collect(),
            ),
        }
    }
}

/// Raw scenario description: `joint[a][y] = P(A=a, Y=y)` and
/// `conditional[a][y]` the law of `X | A=a, Y=y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub label: String,
    pub joint: [[f64; 2]; 2],
    pub conditional: [[DistSpec; 2]; 2],
}

/// Key prefix used for the `(a, y)` cell in reports and scenario files.
pub fn cell_key(a: Group, y: Label) -> String {
    format!("a{}y{}", a.index(), y.index())
}

/// One entry of a [`ValidationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub label: String,
    /// `sum(joint) - 1`.
    pub joint_residual: f64,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn short(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

/// Checks every invariant of a scenario and reports all failures at once.
pub fn validate(spec: &ScenarioSpec) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| {
        checks.push(ValidationCheck {
            name,
            passed,
            detail,
        })
    };

    let sum: f64 = spec.joint.iter().flatten().sum();
    for a in Group::BOTH {
        for y in Label::BOTH {
            let p = spec.joint[a.index()][y.index()];
            let ok = p.is_finite() && p >= 0.0;
            push(
                format!("joint.{}", cell_key(a, y)),
                ok,
                if ok {
                    short(p)
                } else {
                    format!("joint probability {p} must be finite and >= 0")
                },
            );
        }
    }
    let sum_ok = (sum - 1.0).abs() <= JOINT_TOL;
    push(
        "joint mass".to_owned(),
        sum_ok,
        if sum_ok {
            "1".to_owned()
        } else {
            format!("joint mass {} \u{2260} 1", short(sum))
        },
    );
    for a in Group::BOTH {
        let m = spec.joint[a.index()][0] + spec.joint[a.index()][1];
        let ok = m > 0.0;
        push(
            format!("group a{} mass", a.index()),
            ok,
            if ok {
                short(m)
            } else {
                format!("group a{} has zero mass", a.index())
            },
        );
    }

    for a in Group::BOTH {
        for y in Label::BOTH {
            let path = format!("dist.{}", cell_key(a, y));
            match spec.conditional[a.index()][y.index()].build(&path) {
                Ok(d) => {
                    push(path.clone(), true, "parameters valid".to_owned());
                    let (lo, hi) = d.effective_support();
                    let integral =
                        numeric::integrate(&|x| d.pdf(x), lo, hi, &d.breakpoints(), 1e-12);
                    let ok = (integral - 1.0).abs() <= INTEGRAL_TOL;
                    push(
                        format!("{path} integral"),
                        ok,
                        format!("density integrates to {integral:.15}"),
                    );
                }
                Err(Error::InvalidParameter { field, reason }) => {
                    push(field.clone(), false, format!("{field}: {reason}"));
                }
                Err(e) => push(path, false, e.to_string()),
            }
        }
    }

    ValidationReport {
        label: spec.label.clone(),
        joint_residual: sum - 1.0,
        checks,
    }
}

/// A validated population. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupConditionalModel {
    spec: ScenarioSpec,
    joint: [[f64; 2]; 2],
    conditional: [[Distribution; 2]; 2],
}

impl GroupConditionalModel {
    pub fn from_spec(spec: ScenarioSpec) -> Result<Self> {
        let report = validate(&spec);
        if let Some(f) = report.failures().next() {
            return Err(Error::InvalidParameter {
                field: f.name.clone(),
                reason: f.detail.clone(),
            });
        }
        let cond = |a: usize, y: usize| spec.conditional[a][y].build(&format!("dist.a{a}y{y}"));
        let conditional = [[cond(0, 0)?, cond(0, 1)?], [cond(1, 0)?, cond(1, 1)?]];
        Ok(GroupConditionalModel {
            joint: spec.joint,
            conditional,
            spec,
        })
    }

    /// Convenience constructor from built distributions.
    pub fn new(
        label: impl Into<String>,
        joint: [[f64; 2]; 2],
        conditional: [[Distribution; 2]; 2],
    ) -> Result<Self> {
        let spec_of = |d: &Distribution| DistSpec::from(d);
        let spec = ScenarioSpec {
            label: label.into(),
            joint,
            conditional: [
                [spec_of(&conditional[0][0]), spec_of(&conditional[0][1])],
                [spec_of(&conditional[1][0]), spec_of(&conditional[1][1])],
            ],
        };
        Self::from_spec(spec)
    }

    pub fn label(&self) -> &str {
        &self.spec.label
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.spec)
    }

    /// `P(A=a, Y=y)`.
    pub fn joint(&self, a: Group, y: Label) -> f64 {
        self.joint[a.index()][y.index()]
    }

    /// Law of `X | A=a, Y=y`.
    pub fn conditional(&self, a: Group, y: Label) -> &Distribution {
        &self.conditional[a.index()][y.index()]
    }

    /// `P(A=a)`.
    pub fn group_mass(&self, a: Group) -> f64 {
        self.joint[a.index()].iter().sum()
    }

    /// `P(Y=y | A=a)`.
    pub fn label_given_group(&self, a: Group, y: Label) -> f64 {
        self.joint(a, y) / self.group_mass(a)
    }

    /// `P(Y=y)`.
    pub fn label_mass(&self, y: Label) -> f64 {
        Group::BOTH.iter().map(|&a| self.joint(a, y)).sum()
    }

    /// Class-conditional density `f(x | Y=y)` pooled over groups.
    pub fn label_density(&self, y: Label, x: f64) -> f64 {
        let num: f64 = Group::BOTH
            .iter()
            .map(|&a| self.joint(a, y) * self.conditional(a, y).pdf(x))
            .sum();
        let den = self.label_mass(y);
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Joint density `f(x, A=a, Y=y)`.
    pub fn joint_density(&self, a: Group, y: Label, x: f64) -> f64 {
        self.joint(a, y) * self.conditional(a, y).pdf(x)
    }

    /// Central interval holding `mass` of the feature law restricted to the
    /// given groups (weighted by the joint probabilities).
    pub fn central_range(&self, groups: &[Group], mass: f64) -> (f64, f64) {
        let cells: Vec<(f64, &Distribution)> = groups
            .iter()
            .flat_map(|&a| Label::BOTH.map(|y| (self.joint(a, y), self.conditional(a, y))))
            .filter(|(w, _)| *w > 0.0)
            .collect();
        let total: f64 = cells.iter().map(|(w, _)| w).sum();
        let cdf = |x: f64| cells.iter().map(|(w, d)| w * d.cdf(x)).sum::<f64>() / total;
        let hint = cells
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, d)| {
                (lo.min(d.mean()), hi.max(d.mean()))
            });
        let tail = 0.5 * (1.0 - mass);
        (
            quantile_of(cdf, tail, hint),
            quantile_of(cdf, 1.0 - tail, hint),
        )
    }

    /// Sorted union of breakpoints of all four conditional laws.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .conditional
            .iter()
            .flatten()
            .flat_map(|d| d.breakpoints())
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Union of the four effective supports.
    pub fn effective_support(&self) -> (f64, f64) {
        self.conditional
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
                let (a, b) = d.effective_support();
                (lo.min(a), hi.max(b))
            })
    }
}

/// Built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    /// Normal laws with stddev 2; groups fully separable by the feature.
    Example1,
    /// Normal laws with stddev 3 and imbalanced groups.
    Example3,
    /// Triangular laws whose per-group optimal boundaries coincide.
    Example4Identical,
    /// Triangular laws whose per-group optimal boundaries differ.
    Example4Nonidentical,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 4] = [
        ScenarioId::Example1,
        ScenarioId::Example3,
        ScenarioId::Example4Identical,
        ScenarioId::Example4Nonidentical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::Example1 => "example1",
            ScenarioId::Example3 => "example3",
            ScenarioId::Example4Identical => "example4_identical",
            ScenarioId::Example4Nonidentical => "example4_nonidentical",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.name() == name || id.name().replace('_', "-") == name)
            .ok_or_else(|| Error::UnknownScenario(name.to_owned()))
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioId::Example1 => "normal laws, stddev 2, joints (1/8, 1/8, 1/4, 1/2)",
            ScenarioId::Example3 => "normal laws, stddev 3, joints (1/8, 1/8, 1/4, 1/2)",
            ScenarioId::Example4Identical => {
                "triangular laws, identical optimal boundaries, balanced"
            }
            ScenarioId::Example4Nonidentical => {
                "triangular laws, disparate optimal boundaries, balanced"
            }
        }
    }

    pub fn spec(self) -> ScenarioSpec {
        let n = |mean, stddev| DistSpec::Normal { mean, stddev };
        let t = |lower, upper, mode| DistSpec::Triangular { lower, upper, mode };
        let imbalanced = [[0.125, 0.125], [0.25, 0.5]];
        let balanced = [[0.25, 0.25], [0.25, 0.25]];
        // conditional[a][y]: y = 0 first.
        let (joint, conditional) = match self {
            ScenarioId::Example1 => (
                imbalanced,
                [[n(-1.0, 2.0), n(6.0, 2.0)], [n(3.0, 2.0), n(10.0, 2.0)]],
            ),
            ScenarioId::Example3 => (
                imbalanced,
                [[n(-1.0, 3.0), n(7.0, 3.0)], [n(2.0, 3.0), n(10.0, 3.0)]],
            ),
            ScenarioId::Example4Identical => (
                balanced,
                [
                    [t(5.0, 9.0, 7.0), t(3.0, 7.0, 5.0)],
                    [t(0.0, 8.0, 4.0), t(4.0, 12.0, 8.0)],
                ],
            ),
            ScenarioId::Example4Nonidentical => (
                balanced,
                [
                    [t(5.0, 9.0, 7.0), t(3.0, 7.0, 5.0)],
                    [t(2.0, 10.0, 6.0), t(6.0, 14.0, 10.0)],
                ],
            ),
        };
        ScenarioSpec {
            label: self.name().to_owned(),
            joint,
            conditional,
        }
    }

    pub fn model(self) -> GroupConditionalModel {
        GroupConditionalModel::from_spec(self.spec()).expect("built-in scenarios are valid")
    }
}

/// Model for a built-in scenario.
pub fn scenario(id: ScenarioId) -> GroupConditionalModel {
    id.model()
}
