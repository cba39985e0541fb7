//! Small numerical kernels: adaptive Simpson quadrature and sign-region
//! extraction by grid bracketing plus bisection.

use alloc::vec::Vec;

use crate::intervals::IntervalSet;

/// Adaptive Simpson integral of `f` over `[a, b]`, split at `breaks`.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.insert(0, a);
    cuts.push(b);
    let per_piece = tol / cuts.len() as f64;
    cuts.windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            simpson(f, lo, hi, flo, fmid, fhi, whole, per_piece, 50)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Sign-region extraction settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignRegionConfig {
    /// Number of grid points used to bracket sign changes.
    pub grid_points: usize,
    /// Bracket width at which bisection stops.
    pub tol: f64,
}

impl Default for SignRegionConfig {
    fn default() -> Self {
        SignRegionConfig {
            grid_points: 4096,
            tol: 1e-10,
        }
    }
}

/// Shrinks a bracket `[lo, hi]` whose endpoints disagree on `g >= 0` until it
/// is no wider than `tol`. Returns the first point on the `hi` side.
pub fn bisect_transition(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let left = g(lo) >= 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) >= 0.0) == left {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// The set `{x : g(x) >= 0}` resolved on `[lo, hi]`; outside that window the
/// sign found at the nearest end is continued.
pub fn sign_region(
    g: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    cfg: &SignRegionConfig,
) -> IntervalSet {
    let n = cfg.grid_points.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let xs = (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 });
    let mut toggles = Vec::new();
    let mut prev: Option<(f64, bool)> = None;
    let mut start = true;
    for x in xs {
        let pos = g(x) >= 0.0;
        match prev {
            None => start = pos,
            Some((px, ppos)) if ppos != pos => toggles.push(bisect_transition(g, px, x, cfg.tol)),
            _ => {}
        }
        prev = Some((x, pos));
    }
    IntervalSet::from_toggles(start, &toggles).expect("grid transitions are increasing")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_gaussian() {
        let f = |x: f64| libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * core::f64::consts::PI);
        let v = integrate(&f, -12.0, 12.0, &[0.0], 1e-13);
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn sign_region_finds_roots() {
        let g = |x: f64| (x - 1.0) * (x - 3.0);
        let r = sign_region(&g, -5.0, 5.0, &SignRegionConfig::default());
        assert_eq!(r.len(), 2);
        let b = r.boundaries();
        assert!((b[0] - 1.0).abs() < 1e-9 && (b[1] - 3.0).abs() < 1e-9);
        assert!(r.starts_inside());
    }

    #[test]
    fn zero_function_is_all_positive() {
        let r = sign_region(&|_| 0.0, -1.0, 1.0, &SignRegionConfig::default());
        assert!(r.is_full());
    }
}
