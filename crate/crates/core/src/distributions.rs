//! One-dimensional distribution families with exact pdf/cdf, interval mass
//! over [`IntervalSet`] regions, and seeded block sampling.
//!
//! The normal cdf goes through `erfc`, so both tails keep full relative
//! precision. Interval masses use the survival function on the upper side of
//! each distribution so that tail regions do not cancel catastrophically.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;

/// Number of draws produced from one RNG stream. Sampling is keyed by
/// `(seed, block index)`, so any schedule over blocks yields the same output.
pub const SAMPLE_BLOCK: usize = 1 << 14;

/// Maximum mixture nesting depth.
pub const MAX_MIXTURE_DEPTH: usize = 2;

const MIXTURE_WEIGHT_TOL: f64 = 1e-12;

/// Half-width of the effective support of a normal, in standard deviations.
const NORMAL_SUPPORT_SIGMAS: f64 = 12.0;

/// Normal law parameterised by its standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    mean: f64,
    stddev: f64,
}

impl Normal {
    pub fn new(mean: f64, stddev: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::param("mean", "must be finite"));
        }
        if !(stddev.is_finite() && stddev > 0.0) {
            return Err(Error::param("stddev", "must be finite and > 0"));
        }
        Ok(Normal { mean, stddev })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stddev(&self) -> f64 {
        self.stddev
    }

    fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.stddev;
        libm::exp(-0.5 * z * z) / (self.stddev * libm::sqrt(2.0 * PI))
    }

    fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        0.5 * libm::erfc(-(x - self.mean) / self.stddev * FRAC_1_SQRT_2)
    }

    fn sf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 1.0;
        }
        if x == f64::INFINITY {
            return 0.0;
        }
        0.5 * libm::erfc((x - self.mean) / self.stddev * FRAC_1_SQRT_2)
    }

    fn mass(&self, lo: f64, hi: f64) -> f64 {
        if lo >= self.mean {
            self.sf(lo) - self.sf(hi)
        } else {
            self.cdf(hi) - self.cdf(lo)
        }
    }
}

/// Triangular law on `[lower, upper]` with the given mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangular {
    lower: f64,
    upper: f64,
    mode: f64,
}

impl Triangular {
    pub fn new(lower: f64, upper: f64, mode: f64) -> Result<Self> {
        for (name, v) in [("lower", lower), ("upper", upper), ("mode", mode)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if !(lower < upper) {
            return Err(Error::param("upper", "must be greater than lower"));
        }
        if mode < lower {
            return Err(Error::param("mode", "must be >= lower"));
        }
        if mode > upper {
            return Err(Error::param("mode", "must be <= upper"));
        }
        Ok(Triangular { lower, upper, mode })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn mode(&self) -> f64 {
        self.mode
    }

    fn pdf(&self, x: f64) -> f64 {
        let (a, b, c) = (self.lower, self.upper, self.mode);
        if x < a || x > b {
            0.0
        } else if x < c {
            2.0 * (x - a) / ((b - a) * (c - a))
        } else if x == c {
            2.0 / (b - a)
        } else {
            2.0 * (b - x) / ((b - a) * (b - c))
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let (a, b, c) = (self.lower, self.upper, self.mode);
        if x <= a {
            0.0
        } else if x >= b {
            1.0
        } else if x <= c {
            (x - a) * (x - a) / ((b - a) * (c - a))
        } else {
            1.0 - self.sf(x)
        }
    }

    fn sf(&self, x: f64) -> f64 {
        let (a, b, c) = (self.lower, self.upper, self.mode);
        if x <= a {
            1.0
        } else if x >= b {
            0.0
        } else if x > c {
            (b - x) * (b - x) / ((b - a) * (b - c))
        } else {
            1.0 - self.cdf(x)
        }
    }

    fn mass(&self, lo: f64, hi: f64) -> f64 {
        if lo >= self.mode {
            self.sf(lo) - self.sf(hi)
        } else {
            self.cdf(hi) - self.cdf(lo)
        }
    }

    fn inverse_cdf(&self, u: f64) -> f64 {
        let (a, b, c) = (self.lower, self.upper, self.mode);
        let split = (c - a) / (b - a);
        if u < split {
            a + libm::sqrt(u * (b - a) * (c - a))
        } else {
            b - libm::sqrt((1.0 - u) * (b - a) * (b - c))
        }
    }
}

/// Finite weighted mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    components: Vec<(f64, Distribution)>,
}

impl Mixture {
    pub fn new(components: Vec<(f64, Distribution)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param(
                "components",
                "mixture needs at least one component",
            ));
        }
        let mut total = 0.0;
        for (w, d) in &components {
            if !(w.is_finite() && *w > 0.0 && *w <= 1.0) {
                return Err(Error::param("weight", "mixture weights must lie in (0, 1]"));
            }
            if d.depth() + 1 > MAX_MIXTURE_DEPTH {
                return Err(Error::param(
                    "components",
                    "mixture nesting depth exceeds 2",
                ));
            }
            total += w;
        }
        if (total - 1.0).abs() > MIXTURE_WEIGHT_TOL {
            return Err(Error::param(
                "weight",
                alloc::format!("mixture weights sum to {total}, not 1"),
            ));
        }
        Ok(Mixture { components })
    }

    pub fn components(&self) -> &[(f64, Distribution)] {
        &self.components
    }
}

/// A validated one-dimensional distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Normal(Normal),
    Triangular(Triangular),
    Mixture(Mixture),
}

/// Density and cumulative probability at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub density: f64,
    pub cumulative: f64,
}

impl From<Normal> for Distribution {
    fn from(d: Normal) -> Self {
        Distribution::Normal(d)
    }
}

impl From<Triangular> for Distribution {
    fn from(d: Triangular) -> Self {
        Distribution::Triangular(d)
    }
}

impl From<Mixture> for Distribution {
    fn from(d: Mixture) -> Self {
        Distribution::Mixture(d)
    }
}

impl Distribution {
    pub fn normal(mean: f64, stddev: f64) -> Result<Self> {
        Normal::new(mean, stddev).map(Into::into)
    }

    pub fn triangular(lower: f64, upper: f64, mode: f64) -> Result<Self> {
        Triangular::new(lower, upper, mode).map(Into::into)
    }

    pub fn mixture(components: Vec<(f64, Distribution)>) -> Result<Self> {
        Mixture::new(components).map(Into::into)
    }

    /// Nesting depth: 0 for a base family, 1 + deepest component for a mixture.
    pub fn depth(&self) -> usize {
        match self {
            Distribution::Mixture(m) => {
                1 + m
                    .components
                    .iter()
                    .map(|(_, d)| d.depth())
                    .max()
                    .unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// Exact density and cdf at a finite point.
    pub fn eval(&self, x: f64) -> Result<Evaluation> {
        if !x.is_finite() {
            return Err(Error::input("evaluation point must be finite"));
        }
        Ok(Evaluation {
            density: self.pdf(x),
            cumulative: self.cdf(x),
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Normal(d) => d.pdf(x),
            Distribution::Triangular(d) => d.pdf(x),
            Distribution::Mixture(m) => m.components.iter().map(|(w, d)| w * d.pdf(x)).sum(),
        }
    }

    /// Cumulative distribution; accepts `±inf`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Normal(d) => d.cdf(x),
            Distribution::Triangular(d) => d.cdf(x),
            Distribution::Mixture(m) => m.components.iter().map(|(w, d)| w * d.cdf(x)).sum(),
        }
    }

    /// Survival function `P(X > x)`; accepts `±inf`.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            Distribution::Normal(d) => d.sf(x),
            Distribution::Triangular(d) => d.sf(x),
            Distribution::Mixture(m) => m.components.iter().map(|(w, d)| w * d.sf(x)).sum(),
        }
    }

    /// `P(lo <= X < hi)` for `lo <= hi`, endpoints possibly infinite.
    pub fn interval_mass(&self, lo: f64, hi: f64) -> f64 {
        let m = match self {
            Distribution::Normal(d) => d.mass(lo, hi),
            Distribution::Triangular(d) => d.mass(lo, hi),
            Distribution::Mixture(m) => m
                .components
                .iter()
                .map(|(w, d)| w * d.interval_mass(lo, hi))
                .sum(),
        };
        m.clamp(0.0, 1.0)
    }

    /// Probability that a draw lands in `region`.
    pub fn positive_mass(&self, region: &IntervalSet) -> f64 {
        let total: f64 = region
            .intervals()
            .iter()
            .map(|&(lo, hi)| self.interval_mass(lo, hi))
            .sum();
        total.clamp(0.0, 1.0)
    }

    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Normal(d) => d.mean,
            Distribution::Triangular(d) => (d.lower + d.upper + d.mode) / 3.0,
            Distribution::Mixture(m) => m.components.iter().map(|(w, d)| w * d.mean()).sum(),
        }
    }

    /// Interval outside of which the density is zero or negligible (< 1e-30 mass).
    pub fn effective_support(&self) -> (f64, f64) {
        match self {
            Distribution::Normal(d) => (
                d.mean - NORMAL_SUPPORT_SIGMAS * d.stddev,
                d.mean + NORMAL_SUPPORT_SIGMAS * d.stddev,
            ),
            Distribution::Triangular(d) => (d.lower, d.upper),
            Distribution::Mixture(m) => {
                m.components
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, d)| {
                        let (a, b) = d.effective_support();
                        (lo.min(a), hi.max(b))
                    })
            }
        }
    }

    /// Points where the density is not smooth, plus landmarks that help an
    /// adaptive integrator find the mass. Sorted, deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        self.push_breakpoints(&mut pts);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn push_breakpoints(&self, pts: &mut Vec<f64>) {
        match self {
            Distribution::Normal(d) => {
                let k = NORMAL_SUPPORT_SIGMAS as i32;
                pts.extend((-k..=k).map(|i| d.mean + f64::from(i) * d.stddev));
            }
            Distribution::Triangular(d) => pts.extend([d.lower, d.mode, d.upper]),
            Distribution::Mixture(m) => {
                for (_, d) in &m.components {
                    d.push_breakpoints(pts);
                }
            }
        }
    }

    /// Quantile by bisection on the cdf.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::input("quantile level must lie in (0, 1)"));
        }
        Ok(quantile_of(|x| self.cdf(x), p, self.effective_support()))
    }

    /// `n` draws, deterministic in `(seed, n)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::input("sample size must be at least 1"));
        }
        let mut out = Vec::with_capacity(n);
        let blocks = n.div_ceil(SAMPLE_BLOCK);
        for b in 0..blocks {
            let len = SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK);
            let mut s = Sampler::new(seed, b as u64);
            out.extend((0..len).map(|_| s.draw(self)));
        }
        Ok(out)
    }
}

/// Quantile of a continuous nondecreasing cdf by bracketing and bisection.
pub(crate) fn quantile_of(cdf: impl Fn(f64) -> f64, p: f64, hint: (f64, f64)) -> f64 {
    let (mut lo, mut hi) = hint;
    let mut width = (hi - lo).abs().max(1.0);
    while cdf(lo) > p {
        lo -= width;
        width *= 2.0;
    }
    let mut width = (hi - lo).abs().max(1.0);
    while cdf(hi) < p {
        hi += width;
        width *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sequential sampler over one `(seed, stream)` ChaCha stream.
pub struct Sampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng, spare: None }
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // Marsaglia polar method.
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = libm::sqrt(-2.0 * libm::log(s) / s);
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    pub fn draw(&mut self, dist: &Distribution) -> f64 {
        match dist {
            Distribution::Normal(d) => d.mean + d.stddev * self.standard_normal(),
            Distribution::Triangular(d) => d.inverse_cdf(self.uniform()),
            Distribution::Mixture(m) => {
                let u = self.uniform();
                let mut acc = 0.0;
                let last = m.components.len() - 1;
                for (i, (w, d)) in m.components.iter().enumerate() {
                    acc += w;
                    if u < acc || i == last {
                        return self.draw(d);
                    }
                }
                unreachable!("mixture has at least one component")
            }
        }
    }
}
