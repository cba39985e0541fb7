//! Classifier-family sweeps, Pareto filtering and frontier shape diagnosis.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::classifiers::{self, BayesScope, ClassifierConfig, GroupwiseClassifier, Orientation};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::intervals::IntervalSet;
use crate::metrics::{self, quantize, ConfusionRates, MetricWeights};
use crate::population::{Group, GroupConditionalModel};

pub const DEFAULT_RESOLUTION: usize = 801;
/// Largest sweep accepted before a resource error is raised.
pub const MAX_CANDIDATES: u128 = 10_000_000;
/// Mass of the pooled feature law covered by the default sweep range.
pub const DEFAULT_RANGE_MASS: f64 = 0.9999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// One threshold used for both groups.
    SharedThreshold,
    /// An independent threshold per group.
    PerGroupThreshold,
    /// Per group, any union of at most `k` intervals with endpoints on the grid.
    PerGroupIntervals { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationChoice {
    PositiveAbove,
    PositiveBelow,
    Both,
}

impl OrientationChoice {
    pub fn orientations(self) -> &'static [Orientation] {
        match self {
            OrientationChoice::PositiveAbove => &[Orientation::PositiveAbove],
            OrientationChoice::PositiveBelow => &[Orientation::PositiveBelow],
            OrientationChoice::Both => &Orientation::BOTH,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OrientationChoice::PositiveAbove => "positive_above",
            OrientationChoice::PositiveBelow => "positive_below",
            OrientationChoice::Both => "both",
        }
    }
}

/// A swept classifier family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Orientation choice per group; shared families use a single choice.
    pub orientations: [OrientationChoice; 2],
    /// Grid points per parameter axis.
    pub resolution: usize,
    /// Sweep interval; `None` means the central [`DEFAULT_RANGE_MASS`] of the
    /// pooled feature law.
    pub range: Option<(f64, f64)>,
}

impl FamilySpec {
    pub fn shared_threshold(orientation: OrientationChoice) -> Self {
        FamilySpec {
            kind: FamilyKind::SharedThreshold,
            orientations: [orientation; 2],
            resolution: DEFAULT_RESOLUTION,
            range: None,
        }
    }

    pub fn per_group_threshold(orientations: [OrientationChoice; 2]) -> Self {
        FamilySpec {
            kind: FamilyKind::PerGroupThreshold,
            orientations,
            resolution: DEFAULT_RESOLUTION,
            range: None,
        }
    }

    pub fn per_group_intervals(k: usize) -> Self {
        FamilySpec {
            kind: FamilyKind::PerGroupIntervals { k },
            orientations: [OrientationChoice::Both; 2],
            resolution: 41,
            range: None,
        }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.range = Some((lo, hi));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 3 {
            return Err(Error::param("resolution", "must be at least 3"));
        }
        if let Some((lo, hi)) = self.range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::param("range", "must be finite and nonempty"));
            }
        }
        match self.kind {
            FamilyKind::SharedThreshold if self.orientations[0] != self.orientations[1] => Err(
                Error::param("orientations", "a shared family has one orientation choice"),
            ),
            FamilyKind::PerGroupIntervals { k } if k == 0 || k > 4 => {
                Err(Error::param("k", "interval count must be between 1 and 4"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_shared(&self) -> bool {
        self.kind == FamilyKind::SharedThreshold
    }

    /// Human-readable family label used in reports.
    pub fn name(&self) -> String {
        let kind = match self.kind {
            FamilyKind::SharedThreshold => String::from("shared_threshold"),
            FamilyKind::PerGroupThreshold => String::from("per_group_threshold"),
            FamilyKind::PerGroupIntervals { k } => format!("per_group_intervals(k={k})"),
        };
        let orient = match self.kind {
            FamilyKind::SharedThreshold => self.orientations[0].name().into(),
            FamilyKind::PerGroupThreshold => {
                format!(
                    "{}/{}",
                    self.orientations[0].name(),
                    self.orientations[1].name()
                )
            }
            FamilyKind::PerGroupIntervals { .. } => String::from("any"),
        };
        format!(
            "{kind}, orientations={orient}, resolution={}",
            self.resolution
        )
    }

    pub fn resolve_range(&self, model: &GroupConditionalModel) -> (f64, f64) {
        self.range
            .unwrap_or_else(|| model.central_range(&Group::BOTH, DEFAULT_RANGE_MASS))
    }

    /// Equally spaced sweep grid including both range ends.
    pub fn grid(&self, model: &GroupConditionalModel) -> Vec<f64> {
        let (lo, hi) = self.resolve_range(model);
        let n = self.resolution;
        let step = (hi - lo) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
            .collect()
    }

    /// Number of grid candidates, before the two appended optima.
    pub fn grid_candidates(&self) -> u128 {
        let n = self.resolution as u128;
        let o = |a: usize| self.orientations[a].orientations().len() as u128;
        match self.kind {
            FamilyKind::SharedThreshold => o(0) * n,
            FamilyKind::PerGroupThreshold => o(0) * o(1) * n * n,
            FamilyKind::PerGroupIntervals { k } => {
                let r = region_count(self.resolution, k);
                r.saturating_mul(r)
            }
        }
    }
}

/// How a candidate classifier was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierParams {
    SharedThreshold {
        threshold: f64,
        orientation: Orientation,
    },
    PerGroupThreshold {
        thresholds: [f64; 2],
        orientations: [Orientation; 2],
    },
    PerGroupIntervals {
        regions: Box<[IntervalSet; 2]>,
    },
    FairnessOptimal {
        classifier: Box<GroupwiseClassifier>,
    },
    AccuracyOptimal {
        scope: BayesScope,
        classifier: Box<GroupwiseClassifier>,
    },
}

impl ClassifierParams {
    pub fn classifier(&self) -> GroupwiseClassifier {
        match self {
            ClassifierParams::SharedThreshold {
                threshold,
                orientation,
            } => GroupwiseClassifier::threshold(*threshold, *orientation),
            ClassifierParams::PerGroupThreshold {
                thresholds,
                orientations,
            } => GroupwiseClassifier::group_thresholds(*thresholds, *orientations),
            ClassifierParams::PerGroupIntervals { regions } => {
                GroupwiseClassifier::per_group(regions[0].clone(), regions[1].clone())
            }
            ClassifierParams::FairnessOptimal { classifier } => (**classifier).clone(),
            ClassifierParams::AccuracyOptimal { classifier, .. } => (**classifier).clone(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ClassifierParams::SharedThreshold { .. } => "shared_threshold",
            ClassifierParams::PerGroupThreshold { .. } => "per_group_threshold",
            ClassifierParams::PerGroupIntervals { .. } => "per_group_intervals",
            ClassifierParams::FairnessOptimal { .. } => "fairness_optimal",
            ClassifierParams::AccuracyOptimal { .. } => "accuracy_optimal",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            ClassifierParams::SharedThreshold { .. } => 0,
            ClassifierParams::PerGroupThreshold { .. } => 1,
            ClassifierParams::PerGroupIntervals { .. } => 2,
            ClassifierParams::FairnessOptimal { .. } => 3,
            ClassifierParams::AccuracyOptimal { .. } => 4,
        }
    }

    /// Total order used to pick one representative among equal objectives.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        use ClassifierParams::*;
        self.rank()
            .cmp(&other.rank())
            .then_with(|| match (self, other) {
                (
                    SharedThreshold {
                        threshold: a,
                        orientation: oa,
                    },
                    SharedThreshold {
                        threshold: b,
                        orientation: ob,
                    },
                ) => a.total_cmp(b).then(oa.cmp(ob)),
                (
                    PerGroupThreshold {
                        thresholds: a,
                        orientations: oa,
                    },
                    PerGroupThreshold {
                        thresholds: b,
                        orientations: ob,
                    },
                ) => a[0]
                    .total_cmp(&b[0])
                    .then(a[1].total_cmp(&b[1]))
                    .then(oa.cmp(ob)),
                _ => self.classifier().lex_cmp(&other.classifier()),
            })
    }
}

/// One evaluated classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    /// `1 - f_u`.
    pub fairness: f64,
    pub accuracy: f64,
    pub f_u: f64,
    pub rates: ConfusionRates,
    pub params: ClassifierParams,
}

impl FrontierPoint {
    pub fn evaluate(
        model: &GroupConditionalModel,
        params: ClassifierParams,
        w: &MetricWeights,
    ) -> Self {
        let rates = metrics::confusion_rates(model, &params.classifier());
        Self::from_rates(model, rates, params, w)
    }

    pub fn from_rates(
        model: &GroupConditionalModel,
        rates: ConfusionRates,
        params: ClassifierParams,
        w: &MetricWeights,
    ) -> Self {
        let f_u = metrics::unfairness(&rates, w);
        FrontierPoint {
            fairness: 1.0 - f_u,
            accuracy: metrics::accuracy_from_rates(model, &rates, w),
            f_u,
            rates,
            params,
        }
    }

    pub fn classifier(&self) -> GroupwiseClassifier {
        self.params.classifier()
    }

    /// Quantised `(fairness, accuracy)` used for every objective comparison.
    pub fn key(&self) -> (i64, i64) {
        (quantize(self.fairness), quantize(self.accuracy))
    }
}

/// All candidates of a family sweep, in deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub family: FamilySpec,
    pub grid: Vec<f64>,
    pub candidates: Vec<FrontierPoint>,
}

impl Sweep {
    pub fn max_accuracy(&self) -> f64 {
        self.candidates
            .iter()
            .map(|c| c.accuracy)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn binom(n: usize, m: usize) -> u128 {
    if m > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..m {
        r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    r
}

/// Number of boundary-toggle patterns `(starts_inside, m)` giving at most `k`
/// intervals.
fn patterns(k: usize) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    for m in 0..=2 * k {
        for s in [false, true] {
            if (m + usize::from(s)).div_ceil(2) <= k {
                out.push((m, s));
            }
        }
    }
    out
}

fn region_count(n: usize, k: usize) -> u128 {
    patterns(k)
        .iter()
        .map(|&(m, _)| binom(n, m))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Every region with at most `k` intervals whose finite endpoints lie on `grid`.
fn enumerate_regions(grid: &[f64], k: usize) -> Vec<IntervalSet> {
    let n = grid.len();
    let mut out = Vec::new();
    for (m, s) in patterns(k) {
        if m > n {
            continue;
        }
        let mut idx: Vec<usize> = (0..m).collect();
        loop {
            let toggles: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
            out.push(IntervalSet::from_toggles(s, &toggles).expect("grid is increasing"));
            let mut p = m;
            while p > 0 && idx[p - 1] == n - m + p - 1 {
                p -= 1;
            }
            if p == 0 {
                break;
            }
            idx[p - 1] += 1;
            for q in p..m {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

/// Evaluates every classifier of `family` on `model`, then appends the
/// fairness-optimal and the accuracy-optimal classifier.
///
/// Grid candidates come orientation-major, then row-major over the grid.
pub fn sweep<E: Executor>(
    model: &GroupConditionalModel,
    family: &FamilySpec,
    w: &MetricWeights,
    cfg: &ClassifierConfig,
    exec: &E,
) -> Result<Sweep> {
    family.validate()?;
    let total = family.grid_candidates().saturating_add(2);
    if total > MAX_CANDIDATES {
        return Err(Error::Resource(format!(
            "sweep would evaluate {total} candidates (limit {MAX_CANDIDATES}); lower the resolution"
        )));
    }
    let grid = family.grid(model);
    let n = grid.len();
    let rates_for = |regions: &[IntervalSet], a: Group| {
        exec.map(regions.len(), |i| {
            metrics::group_rates(model, a, &regions[i])
        })
    };
    let combine = |r0: (f64, f64), r1: (f64, f64)| ConfusionRates {
        tpr: [r0.0, r1.0],
        tnr: [r0.1, r1.1],
    };

    let mut candidates = match family.kind {
        FamilyKind::SharedThreshold => {
            let os = family.orientations[0].orientations();
            let regions: Vec<IntervalSet> = os
                .iter()
                .flat_map(|o| grid.iter().map(|&t| o.region(t)))
                .collect();
            let g0 = rates_for(&regions, Group::Zero);
            let g1 = rates_for(&regions, Group::One);
            exec.map(regions.len(), |idx| {
                let params = ClassifierParams::SharedThreshold {
                    threshold: grid[idx % n],
                    orientation: os[idx / n],
                };
                FrontierPoint::from_rates(model, combine(g0[idx], g1[idx]), params, w)
            })
        }
        FamilyKind::PerGroupThreshold => {
            let os = [
                family.orientations[0].orientations(),
                family.orientations[1].orientations(),
            ];
            let axis = |a: Group| {
                let regions: Vec<IntervalSet> = os[a.index()]
                    .iter()
                    .flat_map(|o| grid.iter().map(|&t| o.region(t)))
                    .collect();
                rates_for(&regions, a)
            };
            let (g0, g1) = (axis(Group::Zero), axis(Group::One));
            let per_combo = n * n;
            let n1 = os[1].len();
            exec.map(os[0].len() * n1 * per_combo, |idx| {
                let combo = idx / per_combo;
                let (o0, o1) = (combo / n1, combo % n1);
                let (i, j) = ((idx % per_combo) / n, idx % n);
                let params = ClassifierParams::PerGroupThreshold {
                    thresholds: [grid[i], grid[j]],
                    orientations: [os[0][o0], os[1][o1]],
                };
                FrontierPoint::from_rates(model, combine(g0[o0 * n + i], g1[o1 * n + j]), params, w)
            })
        }
        FamilyKind::PerGroupIntervals { k } => {
            let regions = enumerate_regions(&grid, k);
            let g0 = rates_for(&regions, Group::Zero);
            let g1 = rates_for(&regions, Group::One);
            let r = regions.len();
            exec.map(r * r, |idx| {
                let (i, j) = (idx / r, idx % r);
                let params = ClassifierParams::PerGroupIntervals {
                    regions: Box::new([regions[i].clone(), regions[j].clone()]),
                };
                FrontierPoint::from_rates(model, combine(g0[i], g1[j]), params, w)
            })
        }
    };

    let fair = classifiers::fairness_optimal(model, w, cfg)?;
    candidates.push(FrontierPoint::evaluate(
        model,
        ClassifierParams::FairnessOptimal {
            classifier: Box::new(fair),
        },
        w,
    ));
    let scope = if family.is_shared() {
        BayesScope::Overall
    } else {
        BayesScope::PerGroup
    };
    let acc = classifiers::bayes_accuracy_optimal(model, scope, cfg)?;
    candidates.push(FrontierPoint::evaluate(
        model,
        ClassifierParams::AccuracyOptimal {
            scope,
            classifier: Box::new(acc),
        },
        w,
    ));

    Ok(Sweep {
        family: family.clone(),
        grid,
        candidates,
    })
}

/// The non-dominated subset of `candidates`, sorted by ascending fairness.
///
/// Objectives are compared on the [`metrics::QUANTUM`] lattice. Candidates
/// with identical objectives collapse to the one with the smallest params.
pub fn pareto_set(candidates: &[FrontierPoint]) -> Result<Vec<FrontierPoint>> {
    if candidates.is_empty() {
        return Err(Error::input("pareto filter needs at least one candidate"));
    }
    let keys: Vec<(i64, i64)> = candidates.iter().map(FrontierPoint::key).collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| {
        keys[j]
            .0
            .cmp(&keys[i].0)
            .then(keys[j].1.cmp(&keys[i].1))
            .then_with(|| candidates[i].params.lex_cmp(&candidates[j].params))
    });
    let mut kept = Vec::new();
    let mut best = i64::MIN;
    let mut last_fairness = None;
    for i in order {
        let (fk, ak) = keys[i];
        if last_fairness == Some(fk) {
            continue;
        }
        last_fairness = Some(fk);
        if ak > best {
            kept.push(candidates[i].clone());
            best = ak;
        }
    }
    kept.reverse();
    Ok(kept)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Continuous,
    SharpDeclineAccuracy,
    SharpDeclineFairness,
    SharpDeclineBoth,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Continuous => "continuous",
            Shape::SharpDeclineAccuracy => "sharp_decline_accuracy",
            Shape::SharpDeclineFairness => "sharp_decline_fairness",
            Shape::SharpDeclineBoth => "sharp_decline_both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpKind {
    Accuracy,
    Fairness,
}

/// A discontinuity between frontier points `index` and `index + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub index: usize,
    pub kind: JumpKind,
    /// Fairness of the point before the jump.
    pub fairness_at: f64,
    pub accuracy_drop: f64,
    pub fairness_rise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeThresholds {
    /// Minimum change that counts as a jump.
    pub jump_threshold: f64,
    /// Maximum change in the other objective for the step to count as a jump.
    pub fairness_gap: f64,
}

impl ShapeThresholds {
    pub fn for_resolution(resolution: usize) -> Self {
        ShapeThresholds {
            jump_threshold: 0.05,
            fairness_gap: 2.0 / resolution as f64,
        }
    }
}

impl Default for ShapeThresholds {
    fn default() -> Self {
        Self::for_resolution(DEFAULT_RESOLUTION)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub shape: Shape,
    pub jumps: Vec<Jump>,
    /// Set when a fairness discontinuity was found.
    pub flag: Option<String>,
}

/// Text attached to frontiers showing a fairness discontinuity.
pub const FAIRNESS_JUMP_FLAG: &str =
    "fairness discontinuity found; a frontier can only decline sharply in accuracy, \
     so this indicates a sweep artifact; refine the resolution";

/// Finds accuracy and fairness jumps between adjacent frontier points.
pub fn classify_shape(points: &[FrontierPoint], t: &ShapeThresholds) -> ShapeReport {
    let mut jumps = Vec::new();
    for (i, pair) in points.windows(2).enumerate() {
        let drop = pair[0].accuracy - pair[1].accuracy;
        let rise = pair[1].fairness - pair[0].fairness;
        let kind = if drop > t.jump_threshold && rise < t.fairness_gap {
            Some(JumpKind::Accuracy)
        } else if rise > t.jump_threshold && drop < t.fairness_gap {
            Some(JumpKind::Fairness)
        } else {
            None
        };
        if let Some(kind) = kind {
            jumps.push(Jump {
                index: i,
                kind,
                fairness_at: pair[0].fairness,
                accuracy_drop: drop,
                fairness_rise: rise,
            });
        }
    }
    let acc = jumps.iter().any(|j| j.kind == JumpKind::Accuracy);
    let fair = jumps.iter().any(|j| j.kind == JumpKind::Fairness);
    let shape = match (acc, fair) {
        (false, false) => Shape::Continuous,
        (true, false) => Shape::SharpDeclineAccuracy,
        (false, true) => Shape::SharpDeclineFairness,
        (true, true) => Shape::SharpDeclineBoth,
    };
    ShapeReport {
        shape,
        jumps,
        flag: fair.then(|| String::from(FAIRNESS_JUMP_FLAG)),
    }
}

/// A Pareto frontier with its shape diagnosis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    /// Sorted by strictly ascending fairness, accuracy non-increasing.
    pub points: Vec<FrontierPoint>,
    pub shape: Shape,
    pub jumps: Vec<Jump>,
    pub flag: Option<String>,
    pub thresholds: ShapeThresholds,
}

impl Frontier {
    /// Wraps an already non-dominated, sorted point list.
    pub fn from_points(points: Vec<FrontierPoint>, thresholds: ShapeThresholds) -> Self {
        let report = classify_shape(&points, &thresholds);
        Frontier {
            points,
            shape: report.shape,
            jumps: report.jumps,
            flag: report.flag,
            thresholds,
        }
    }

    pub fn reclassify(&mut self, thresholds: ShapeThresholds) -> ShapeReport {
        let report = classify_shape(&self.points, &thresholds);
        self.shape = report.shape;
        self.jumps = report.jumps.clone();
        self.flag = report.flag.clone();
        self.thresholds = thresholds;
        report
    }

    /// Largest accuracy decrease between adjacent points.
    pub fn max_accuracy_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|p| p[0].accuracy - p[1].accuracy)
            .fold(0.0, f64::max)
    }

    /// Whether point `i` is an endpoint of a recorded jump.
    pub fn on_jump(&self, i: usize) -> bool {
        self.jumps.iter().any(|j| j.index == i || j.index + 1 == i)
    }
}

/// [`pareto_set`] followed by [`classify_shape`].
pub fn pareto_filter(
    candidates: &[FrontierPoint],
    thresholds: ShapeThresholds,
) -> Result<Frontier> {
    Ok(Frontier::from_points(pareto_set(candidates)?, thresholds))
}

/// Sweeps `family` and returns the sweep and its frontier, with jump
/// detection scaled to the family's resolution.
pub fn frontier_of<E: Executor>(
    model: &GroupConditionalModel,
    family: &FamilySpec,
    w: &MetricWeights,
    cfg: &ClassifierConfig,
    exec: &E,
) -> Result<(Sweep, Frontier)> {
    let s = sweep(model, family, w, cfg, exec)?;
    let f = pareto_filter(
        &s.candidates,
        ShapeThresholds::for_resolution(family.resolution),
    )?;
    Ok((s, f))
}

/// Synthetic point for tests and hand-built frontiers.
pub fn synthetic_point(fairness: f64, accuracy: f64, tag: f64) -> FrontierPoint {
    FrontierPoint {
        fairness,
        accuracy,
        f_u: 1.0 - fairness,
        rates: ConfusionRates::default(),
        params: ClassifierParams::SharedThreshold {
            threshold: tag,
            orientation: Orientation::PositiveAbove,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Serial;
    use crate::population::{scenario, ScenarioId};
    use alloc::vec;

    fn pts(v: &[(f64, f64)]) -> Vec<FrontierPoint> {
        v.iter()
            .enumerate()
            .map(|(i, &(f, a))| synthetic_point(f, a, i as f64))
            .collect()
    }

    fn objectives(f: &[FrontierPoint]) -> Vec<(f64, f64)> {
        f.iter().map(|p| (p.fairness, p.accuracy)).collect()
    }

    #[test]
    fn five_point_example() {
        let c = pts(&[
            (0.9, 0.8),
            (0.8, 0.85),
            (0.85, 0.84),
            (0.9, 0.79),
            (0.7, 0.85),
        ]);
        let f = pareto_set(&c).unwrap();
        assert_eq!(objectives(&f), vec![(0.8, 0.85), (0.85, 0.84), (0.9, 0.8)]);
    }

    #[test]
    fn single_and_duplicates() {
        let c = pts(&[(0.5, 0.5)]);
        assert_eq!(pareto_set(&c).unwrap(), c);
        let d = pts(&[(0.5, 0.5), (0.5, 0.5), (0.5, 0.5)]);
        let f = pareto_set(&d).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0], d[0]);
        assert!(pareto_set(&[]).is_err());
    }

    #[test]
    fn shapes() {
        let t = ShapeThresholds::default();
        let r = classify_shape(&pts(&[(0.0, 0.9), (0.5, 0.89), (1.0, 0.88)]), &t);
        assert_eq!(r.shape, Shape::Continuous);
        let r = classify_shape(&pts(&[(0.6, 0.9), (0.6001, 0.55)]), &t);
        assert_eq!(r.shape, Shape::SharpDeclineAccuracy);
        assert!((r.jumps[0].accuracy_drop - 0.35).abs() < 1e-12);
        let r = classify_shape(&pts(&[(0.2, 0.9), (0.6, 0.8999)]), &t);
        assert_eq!(r.shape, Shape::SharpDeclineFairness);
        assert!(r.flag.is_some());
        assert_eq!(
            classify_shape(&pts(&[(0.1, 0.1)]), &t).shape,
            Shape::Continuous
        );
    }

    #[test]
    fn sweep_counts() {
        let m = scenario(ScenarioId::Example1);
        let w = MetricWeights::default();
        let cfg = ClassifierConfig::default();
        let s = sweep(
            &m,
            &FamilySpec::shared_threshold(OrientationChoice::PositiveAbove),
            &w,
            &cfg,
            &Serial,
        )
        .unwrap();
        assert_eq!(s.candidates.len(), 801 + 2);
        let fam =
            FamilySpec::per_group_threshold([OrientationChoice::Both; 2]).with_resolution(101);
        let s = sweep(&m, &fam, &w, &cfg, &Serial).unwrap();
        assert_eq!(s.candidates.len(), 101 * 101 * 4 + 2);
        assert_eq!(
            s.candidates[0].params,
            ClassifierParams::PerGroupThreshold {
                thresholds: [s.grid[0], s.grid[0]],
                orientations: [Orientation::PositiveAbove; 2],
            }
        );
        assert_eq!(
            s.candidates[1].params,
            ClassifierParams::PerGroupThreshold {
                thresholds: [s.grid[0], s.grid[1]],
                orientations: [Orientation::PositiveAbove; 2],
            }
        );
    }

    #[test]
    fn resource_limit() {
        let m = scenario(ScenarioId::Example1);
        let fam =
            FamilySpec::per_group_threshold([OrientationChoice::Both; 2]).with_resolution(2000);
        let r = sweep(
            &m,
            &fam,
            &MetricWeights::default(),
            &ClassifierConfig::default(),
            &Serial,
        );
        assert!(matches!(r, Err(Error::Resource(_))));
    }

    #[test]
    fn example1_shared_sweep_contains_fairness_optimum() {
        let m = scenario(ScenarioId::Example1);
        let s = sweep(
            &m,
            &FamilySpec::shared_threshold(OrientationChoice::PositiveAbove),
            &MetricWeights::default(),
            &ClassifierConfig::default(),
            &Serial,
        )
        .unwrap();
        let hit = s.candidates.iter().find(|c| {
            (c.fairness - 0.776_352_4).abs() < 1e-6 && (c.accuracy - 0.913_152_4).abs() < 1e-6
        });
        let hit = hit.expect("threshold 4.5 candidate present");
        let t = hit.classifier().region(Group::Zero).boundaries()[0];
        assert!((t - 4.5).abs() < 1e-8);
    }

    #[test]
    fn interval_enumeration_counts() {
        let grid: Vec<f64> = (0..6).map(f64::from).collect();
        let regions = enumerate_regions(&grid, 1);
        assert_eq!(regions.len() as u128, region_count(6, 1));
        assert_eq!(regions.len(), 2 + 6 + 6 + 15);
        assert!(regions.iter().all(|r| r.len() <= 1));
        let regions = enumerate_regions(&grid, 2);
        assert_eq!(regions.len() as u128, region_count(6, 2));
        assert!(regions.iter().all(|r| r.len() <= 2));
    }
}
