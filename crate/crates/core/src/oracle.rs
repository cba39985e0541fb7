//! Independent Monte-Carlo and brute-force oracles for the analytic modules.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::classifiers::GroupwiseClassifier;
use crate::distributions::{Sampler, SAMPLE_BLOCK};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::frontier::{Frontier, FrontierPoint, ShapeThresholds};
use crate::metrics::{ConfusionRates, MetricWeights};
use crate::population::{Group, GroupConditionalModel, Label};

/// Smallest sample size accepted by [`mc_estimate`].
pub const MIN_DRAWS: usize = 1_000;
/// Largest candidate list accepted by [`dominance_oracle`].
pub const MAX_ORACLE_CANDIDATES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Draws the estimate is based on.
    pub n: u64,
    pub seed: u64,
}

impl McEstimate {
    fn proportion(hits: u64, n: u64, seed: u64) -> Self {
        if n == 0 {
            return McEstimate {
                value: 0.0,
                stderr: 0.0,
                n,
                seed,
            };
        }
        let v = hits as f64 / n as f64;
        McEstimate {
            value: v,
            stderr: libm::sqrt(v * (1.0 - v) / n as f64),
            n,
            seed,
        }
    }

    /// Whether `analytic` lies within `k` standard errors. For proportions
    /// the standard error implied by `analytic` itself is also accepted,
    /// which matters when every draw landed on the same side.
    pub fn agrees(&self, analytic: f64, k: f64) -> bool {
        let implied = if (0.0..=1.0).contains(&analytic) && self.n > 0 {
            libm::sqrt(analytic * (1.0 - analytic) / self.n as f64)
        } else {
            0.0
        };
        (self.value - analytic).abs() <= k * self.stderr.max(implied) + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub tpr: [McEstimate; 2],
    pub tnr: [McEstimate; 2],
    pub f_u: McEstimate,
    pub accuracy: McEstimate,
    /// Some `(a, y)` cell received no draws, so its rate is meaningless.
    pub unreliable: bool,
}

impl McReport {
    pub fn rates(&self) -> ConfusionRates {
        ConfusionRates {
            tpr: self.tpr.map(|e| e.value),
            tnr: self.tnr.map(|e| e.value),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    count: [[u64; 2]; 2],
    positive: [[u64; 2]; 2],
}

/// Estimates rates, unfairness and accuracy from `n` seeded draws of
/// `(A, Y, X)`. Draw `i` belongs to stream `i / SAMPLE_BLOCK`, so the result
/// does not depend on how blocks are scheduled.
pub fn mc_estimate<E: Executor>(
    model: &GroupConditionalModel,
    clf: &GroupwiseClassifier,
    w: &MetricWeights,
    n: usize,
    seed: u64,
    exec: &E,
) -> Result<McReport> {
    if n < MIN_DRAWS {
        return Err(Error::input(format!(
            "Monte-Carlo needs at least {MIN_DRAWS} draws, got {n}"
        )));
    }
    let cells: Vec<(Group, Label, f64)> = Group::BOTH
        .iter()
        .flat_map(|&a| Label::BOTH.map(|y| (a, y, model.joint(a, y))))
        .collect();
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let tallies = exec.map(blocks, |b| {
        let len = SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK);
        let mut s = Sampler::new(seed, b as u64);
        let mut t = Tally::default();
        for _ in 0..len {
            let u = s.uniform();
            let mut acc = 0.0;
            let mut cell = cells[cells.len() - 1];
            for &c in &cells {
                acc += c.2;
                if u < acc && c.2 > 0.0 {
                    cell = c;
                    break;
                }
            }
            let (a, y, _) = cell;
            let x = s.draw(model.conditional(a, y));
            t.count[a.index()][y.index()] += 1;
            t.positive[a.index()][y.index()] += u64::from(clf.predict(a, x));
        }
        t
    });
    let mut total = Tally::default();
    for t in tallies {
        for a in 0..2 {
            for y in 0..2 {
                total.count[a][y] += t.count[a][y];
                total.positive[a][y] += t.positive[a][y];
            }
        }
    }

    let tpr = [0, 1].map(|a| McEstimate::proportion(total.positive[a][1], total.count[a][1], seed));
    let tnr = [0, 1].map(|a| {
        McEstimate::proportion(
            total.count[a][0] - total.positive[a][0],
            total.count[a][0],
            seed,
        )
    });
    let unreliable = total.count.iter().flatten().any(|&c| c == 0);

    let nf = n as f64;
    let f_u_value = w.omega1 * (tpr[1].value - tpr[0].value).abs()
        + w.omega2 * (tnr[1].value - tnr[0].value).abs();
    let sq = |e: &McEstimate| e.stderr * e.stderr;
    let f_u_var = w.omega1 * w.omega1 * (sq(&tpr[0]) + sq(&tpr[1]))
        + w.omega2 * w.omega2 * (sq(&tnr[0]) + sq(&tnr[1]));

    let tp: u64 = (0..2).map(|a| total.positive[a][1]).sum();
    let tn: u64 = (0..2)
        .map(|a| total.count[a][0] - total.positive[a][0])
        .sum();
    let mean = (w.p1 * tp as f64 + w.p2 * tn as f64) / nf;
    let second = (w.p1 * w.p1 * tp as f64 + w.p2 * w.p2 * tn as f64) / nf;
    let var = (second - mean * mean).max(0.0);

    Ok(McReport {
        tpr,
        tnr,
        f_u: McEstimate {
            value: f_u_value,
            stderr: libm::sqrt(f_u_var),
            n: n as u64,
            seed,
        },
        accuracy: McEstimate {
            value: mean,
            stderr: libm::sqrt(var / nf),
            n: n as u64,
            seed,
        },
        unreliable,
    })
}

/// Literal pairwise dominance: `T` dominates `T'` when it is no less fair and
/// strictly more accurate, or strictly fairer and no less accurate. Survivors
/// with identical objectives collapse to the smallest params.
pub fn dominance_oracle<E: Executor>(
    candidates: &[FrontierPoint],
    thresholds: ShapeThresholds,
    exec: &E,
) -> Result<Frontier> {
    if candidates.is_empty() {
        return Err(Error::input(
            "dominance oracle needs at least one candidate",
        ));
    }
    if candidates.len() > MAX_ORACLE_CANDIDATES {
        return Err(Error::Resource(format!(
            "dominance oracle accepts at most {MAX_ORACLE_CANDIDATES} candidates, got {}",
            candidates.len()
        )));
    }
    let keys: Vec<(i64, i64)> = candidates.iter().map(FrontierPoint::key).collect();
    let dominated = exec.map(keys.len(), |i| {
        let (fi, ai) = keys[i];
        keys.iter()
            .any(|&(fj, aj)| (fj >= fi && aj > ai) || (fj > fi && aj >= ai))
    });
    let mut survivors: Vec<usize> = (0..keys.len()).filter(|&i| !dominated[i]).collect();
    survivors.sort_by(|&i, &j| {
        keys[i]
            .cmp(&keys[j])
            .then_with(|| candidates[i].params.lex_cmp(&candidates[j].params))
    });
    survivors.dedup_by(|later, earlier| keys[*later] == keys[*earlier]);
    let points = survivors
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect();
    Ok(Frontier::from_points(points, thresholds))
}
