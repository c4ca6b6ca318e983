//! Power-splitting factor computation.
//!
//! The operating split `alpha*` is the unique root of the dominant-term gap
//! `f(alpha) = P11 * p3avg - P10 * (p2c_avg_lb + 0.5)`: below the root the
//! rotated-ring confusion terms dominate, above it the helper-error floor
//! does. The root is found by Newton-Raphson safeguarded with a sign-change
//! bracket; a plain bisection solver is kept as the independent second route,
//! and [`search_alpha_e`] provides the brute-force Monte-Carlo reference.

use rayon::prelude::*;

use crate::bobdec::DecoderKind;
use crate::charlie::crossover_probs;
use crate::errbounds::{p2c_avg_lower_bound, p3_avg};
use crate::simkit::{run_scfffd, MCEstimate};
use crate::sigcore::SystemParams;
use crate::Error;

const BRACKET_LO: f64 = 1e-4;
const BRACKET_HI: f64 = 1.0 - 1e-4;
const RESIDUAL_TOL: f64 = 1e-9;
const MAX_ITERATIONS: u32 = 100;

/// Which update produced the converged iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Newton,
    BisectionFallback,
}

impl SolveMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SolveMethod::Newton => "newton",
            SolveMethod::BisectionFallback => "bisection_fallback",
        }
    }
}

/// Converged root of the dominant-term gap.
#[derive(Debug, Clone, Copy)]
pub struct AlphaSolution {
    pub alpha_star: f64,
    pub iterations: u32,
    pub residual: f64,
    pub method: SolveMethod,
}

/// Dominant-term gap `P11 * p3avg - P10 * (p2c_avg_lb + 0.5)`, assembled from
/// the detector confusion matrix and the closed-form averaged bounds (the
/// closed-form lower bound stands in for the quadrature `E[P2c]` by
/// construction).
pub fn f_gap(alpha: f64, m: u32, noise_power: f64, sigma_ac2: f64) -> f64 {
    let params = SystemParams::new(alpha, m, noise_power, sigma_ac2)
        .expect("f_gap: invalid operating point");
    let cp = crossover_probs(&params);
    cp.p11 * p3_avg(&params) - cp.p10 * (p2c_avg_lower_bound(&params) + 0.5)
}

/// Newton-Raphson root of [`f_gap`] with a numerically differenced slope
/// (central difference, `h = 1e-6`), initial point 0.5, and a bracketing
/// safeguard: iterates that leave the current sign-change bracket are
/// replaced by its midpoint. Converges to `|f| <= 1e-9` within 100
/// iterations.
///
/// Returns a regime error when `f_gap` has no sign change on
/// `(1e-4, 1 - 1e-4)`, which signals an SNR too low for the single-crossing
/// premise.
pub fn solve_alpha_star(m: u32, noise_power: f64, sigma_ac2: f64) -> Result<AlphaSolution, Error> {
    let f = |a: f64| f_gap(a, m, noise_power, sigma_ac2);
    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let mut x = 0.5;
    let mut newton_step = true;
    for iteration in 1..=MAX_ITERATIONS {
        let fx = f(x);
        if fx.abs() <= RESIDUAL_TOL {
            return Ok(AlphaSolution {
                alpha_star: x,
                iterations: iteration,
                residual: fx,
                method: if newton_step { SolveMethod::Newton } else { SolveMethod::BisectionFallback },
            });
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let h = 1e-6;
        let slope = (f(x + h) - f(x - h)) / (2.0 * h);
        let candidate = x - fx / slope;
        if candidate.is_finite() && candidate > lo && candidate < hi {
            x = candidate;
            newton_step = true;
        } else {
            x = 0.5 * (lo + hi);
            newton_step = false;
        }
    }
    Err(Error::RootSolveFailed { iterations: MAX_ITERATIONS, residual: f(x) })
}

/// Plain 60-step bisection on [`f_gap`]; the independent cross-check for the
/// safeguarded Newton solver.
pub fn bisect_alpha_star(m: u32, noise_power: f64, sigma_ac2: f64) -> Result<f64, Error> {
    let f = |a: f64| f_gap(a, m, noise_power, sigma_ac2);
    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One grid point of the exhaustive search.
#[derive(Debug, Clone)]
pub struct AlphaSearchPoint {
    pub alpha: f64,
    pub joint_ser: MCEstimate,
}

/// Result of the exhaustive Monte-Carlo search.
#[derive(Debug, Clone)]
pub struct AlphaSearch {
    /// Grid point minimizing the simulated joint symbol error rate.
    pub alpha_e: f64,
    pub points: Vec<AlphaSearchPoint>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Exhaustive search over an alpha grid: simulates `trials` symbols per grid
/// point with the given decoder and returns the grid minimizer of the joint
/// symbol error rate. Each point draws from its own stream derived from
/// `(seed, point index)`, so the result is deterministic for a given seed.
///
/// Panics if `trials < 1e5` (the grid comparison is meaningless below that)
/// or if the grid is empty or leaves (0, 1).
pub fn search_alpha_e(
    m: u32,
    noise_power: f64,
    sigma_ac2: f64,
    alphas: &[f64],
    decoder: DecoderKind,
    trials: u64,
    seed: u64,
) -> AlphaSearch {
    assert!(!alphas.is_empty(), "search_alpha_e: empty grid");
    assert!(trials >= 100_000, "search_alpha_e: needs at least 1e5 trials per point");
    let points: Vec<AlphaSearchPoint> = alphas
        .par_iter()
        .enumerate()
        .map(|(idx, &alpha)| {
            let params = SystemParams::new(alpha, m, noise_power, sigma_ac2)
                .expect("search_alpha_e: invalid grid point");
            let point_seed = splitmix64(seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let report = run_scfffd(&params, decoder, trials, point_seed);
            AlphaSearchPoint { alpha, joint_ser: report.joint_ser }
        })
        .collect();
    let mut best = 0usize;
    for (i, p) in points.iter().enumerate() {
        if p.joint_ser.mean < points[best].joint_ser.mean {
            best = i;
        }
    }
    AlphaSearch { alpha_e: points[best].alpha, points }
}

/// Evenly spaced grid over `(start, stop)` inclusive with the given step.
pub fn alpha_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && stop >= start);
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + i as f64 * step).filter(|&a| a > 0.0 && a < 1.0).collect()
}
