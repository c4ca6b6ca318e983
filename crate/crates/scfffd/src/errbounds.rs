//! Special functions and the analytical error-bound ladder for the joint
//! dominant decoder.
//!
//! The conditional (fixed `|h_CB|`) pairwise error terms are exact Marcum-Q /
//! Gaussian-Q expressions; averaging over the Rayleigh channel gives closed
//! forms for two of them and quadrature expectations for the rest. The
//! closed-form pieces [`p1_avg`], [`p3_avg`] and [`p2c_avg_lower_bound`] are
//! also what the power-split solver consumes.

use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::bobdec::NoiseVariances;
use crate::charlie::CrossoverProbs;
use crate::sigcore::SystemParams;
use crate::Error;

/// Tail probability of the standard normal, `Q(x) = 0.5 erfc(x / sqrt 2)`.
#[inline]
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// First-order Marcum Q function `Q_1(a, b)`: the probability that a Rician
/// envelope with noncentrality `a` exceeds `b`.
///
/// Evaluated through the noncentral-chi-square series (Poisson-weighted
/// Erlang tails) summed over a mode-centered window, with the complementary
/// case `a > b` routed through the symmetry relation
/// `Q_1(a,b) + Q_1(b,a) = 1 + exp(-(a^2+b^2)/2) I_0(ab)` so that both
/// branches accumulate a small tail. Absolute error is below 1e-10 for
/// arguments up to around 1e3.
///
/// Panics if either argument is negative or NaN.
pub fn marcum_q1(a: f64, b: f64) -> f64 {
    assert!(a >= 0.0 && b >= 0.0, "marcum_q1: arguments must be nonnegative, got ({a}, {b})");
    if b == 0.0 {
        return 1.0;
    }
    if a == 0.0 {
        return (-0.5 * b * b).exp();
    }
    if a > b {
        // symmetry relation; the correction term is exp(-(a-b)^2/2) e^{-ab} I_0(ab)
        let corr = (-0.5 * (a - b) * (a - b)).exp() * bessel_i0_scaled(a * b);
        return 1.0 - marcum_small_tail(b, a) + corr;
    }
    marcum_small_tail(a, b)
}

/// `Q_1(a, b)` for `a <= b` (upper-tail configuration, value <= ~0.5 plus a
/// vanishing correction).
fn marcum_small_tail(a: f64, b: f64) -> f64 {
    // Chernoff-type bound Q_1(a,b) <= exp(-(b-a)^2/2) for b > a: below
    // 1.3e-14 once the gap exceeds 8.
    if b - a > 8.0 {
        return 0.0;
    }
    let lambda = 0.5 * a * a; // Poisson intensity indexing the mixture
    let x = 0.5 * b * b; // Erlang tail evaluation point

    if lambda < 30.0 {
        // plain series from k = 0; both pmf recurrences stay in range
        let mut pois = (-lambda).exp();
        let mut erl_pmf = (-x).exp();
        let mut erl_cdf = erl_pmf;
        let mut total = pois * erl_cdf;
        let mut mass = pois;
        let mut k = 0u32;
        while 1.0 - mass > 1e-16 && k < 20_000 {
            k += 1;
            pois *= lambda / k as f64;
            erl_pmf *= x / k as f64;
            erl_cdf += erl_pmf;
            total += pois * erl_cdf;
            mass += pois;
        }
        return total;
    }

    // Mode-centered window: Poisson mass outside +-18 sigma is < 5e-15.
    let w = 18.0 * lambda.sqrt();
    let k_lo = (lambda - w).floor().max(0.0) as u64;
    let k_hi = (lambda + w).ceil() as u64;
    let ln_pois = |k: u64, m: f64| k as f64 * m.ln() - m - ln_gamma(k as f64 + 1.0);
    let mut pois = ln_pois(k_lo, lambda).exp();
    let mut erl_pmf = ln_pois(k_lo, x).exp();
    // Pr[Poisson(x) <= k_lo], regularized upper incomplete gamma
    let mut erl_cdf = gamma_ur(k_lo as f64 + 1.0, x);
    let mut total = pois * erl_cdf;
    for k in (k_lo + 1)..=k_hi {
        pois *= lambda / k as f64;
        erl_pmf *= x / k as f64;
        erl_cdf += erl_pmf;
        total += pois * erl_cdf;
    }
    total
}

/// Exponentially scaled modified Bessel function `e^{-x} I_0(x)`, `x >= 0`.
fn bessel_i0_scaled(x: f64) -> f64 {
    if x <= 50.0 {
        // power series for I_0, scaled afterwards
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0f64;
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        // asymptotic expansion; truncation error is below 1e-13 for x >= 50
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=20u32 {
            let k = k as f64;
            term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * x);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// Conditional pairwise error terms at a fixed channel magnitude
/// `gamma = |h_CB|`, together with the geometry intermediates they are built
/// from.
///
/// `p3c` is pinned at 0.5: it caps the probability of the rotated-ring
/// confusion event conditioned on a helper decoding error, keeping the sum an
/// upper bound.
#[derive(Debug, Clone, Copy)]
pub struct PairwiseTerms {
    pub p1: f64,
    pub p1c: f64,
    pub p2: f64,
    pub p2c: f64,
    pub p3: f64,
    pub p3c: f64,
    /// Distance between a unit-ring point and its rotated-scaled partner.
    pub d: f64,
    /// Minimum distance of the rotated-scaled ring, `2 sqrt(alpha) sin(pi/M)`.
    pub ell: f64,
    pub a_mag: f64,
    pub b_mag: f64,
    pub xi: f64,
    pub sigma_b0: f64,
    pub sigma_b1: f64,
    /// Set when the discriminant `xi` came out negative and `sqrt(xi)` was
    /// clamped to zero. Analytically `xi > 0`; the flag marks operating
    /// points outside the regime the closed forms assume.
    pub xi_clamped: bool,
}

#[inline]
fn noise_variances(params: &SystemParams) -> (f64, f64) {
    let nv = NoiseVariances::for_params(params);
    (nv.n_b0, nv.n_b1)
}

/// Evaluates the six pairwise terms at `gamma = |h_CB| >= 0`.
pub fn pairwise_terms(gamma: f64, params: &SystemParams, crossover: &CrossoverProbs) -> PairwiseTerms {
    assert!(gamma >= 0.0, "pairwise_terms: gamma must be nonnegative");
    let (nb0, nb1) = noise_variances(params);
    let m = params.psk_order as f64;
    let alpha = params.alpha;
    let d = (1.0 + alpha - 2.0 * alpha.sqrt() * (std::f64::consts::PI / m).cos()).sqrt();
    let ell = 2.0 * alpha.sqrt() * (std::f64::consts::PI / m).sin();
    let sigma_b0 = (nb0 / 2.0).sqrt();
    let sigma_b1 = (nb1 / 2.0).sqrt();
    let diff = nb0 - nb1; // negative: nb1 > nb0
    let a_mag = (gamma * d * nb0 / diff).abs();
    let b_mag = (gamma * d * nb1 / diff).abs();
    let xi = nb0 * nb1 / diff
        * ((nb0 * crossover.p11 / (nb1 * crossover.p00)).ln() + gamma * gamma * d * d / diff);
    let (sqrt_xi, xi_clamped) = if xi >= 0.0 { (xi.sqrt(), false) } else { (0.0, true) };

    PairwiseTerms {
        p1: marcum_q1(a_mag / sigma_b0, sqrt_xi / sigma_b0),
        p1c: marcum_q1(b_mag / sigma_b0, sqrt_xi / sigma_b0),
        p2: 1.0 - marcum_q1(b_mag / sigma_b1, sqrt_xi / sigma_b1),
        p2c: 1.0 - marcum_q1(a_mag / sigma_b1, sqrt_xi / sigma_b1),
        p3: gaussian_q(gamma * ell / (2.0 * nb1).sqrt()),
        p3c: 0.5,
        d,
        ell,
        a_mag,
        b_mag,
        xi,
        sigma_b0,
        sigma_b1,
        xi_clamped,
    }
}

/// High-SNR conditional error bound at fixed `gamma`:
/// `P1 + P11 P2 + P10 P2c + P11 P3 + P10 * 0.5`.
///
/// The leading `P00 P1 + P01 P1c` pair is collapsed to `P1` (the `P01` weight
/// is negligible at every operating point); [`conditional_bound_unsimplified`]
/// keeps the full pair so the replacement error can be measured.
pub fn conditional_bound(gamma: f64, params: &SystemParams, crossover: &CrossoverProbs) -> f64 {
    let t = pairwise_terms(gamma, params, crossover);
    t.p1 + crossover.p11 * t.p2 + crossover.p10 * t.p2c + crossover.p11 * t.p3 + crossover.p10 * 0.5
}

/// Same bound without the `P00 P1 + P01 P1c -> P1` replacement.
pub fn conditional_bound_unsimplified(
    gamma: f64,
    params: &SystemParams,
    crossover: &CrossoverProbs,
) -> f64 {
    let t = pairwise_terms(gamma, params, crossover);
    crossover.p00 * t.p1
        + crossover.p01 * t.p1c
        + crossover.p11 * t.p2
        + crossover.p10 * t.p2c
        + crossover.p11 * t.p3
        + crossover.p10 * 0.5
}

/// Upper integration limit for the Rayleigh expectation: the discarded
/// `e^{-u}` tail is below 1e-13 for unit-bounded integrands.
const RAYLEIGH_UPPER: f64 = 30.0;

/// Expectation of `f(|h_CB|^2)` under `|h_CB|^2 ~ Exp(1)`, i.e.
/// `int_0^inf f(u) e^{-u} du`, by adaptive Simpson quadrature on
/// `[0, 30]` to the requested absolute tolerance (1e-8 is the default used
/// by [`avg_bounds`]). The truncated tail is bounded analytically by
/// `sup|f| * e^{-30} ~ 9.4e-14` for `|f| <= 1`.
pub fn expect_rayleigh<F: Fn(f64) -> f64>(f: F, tolerance: f64) -> Result<f64, Error> {
    assert!(tolerance >= 1e-12, "expect_rayleigh: tolerance must be >= 1e-12");
    let g = |u: f64| f(u) * (-u).exp();
    let a = 0.0;
    let b = RAYLEIGH_UPPER;
    let fa = g(a);
    let fm = g(0.5 * (a + b));
    let fb = g(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(&g, a, b, fa, fm, fb, whole, tolerance, 48)
}

/// One level of adaptive Simpson with Richardson extrapolation.
#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> f64>(
    g: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, Error> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm);
    let frm = g(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergence {
            interval: (a, b),
            error_estimate: err.abs() / 15.0,
            tolerance: tol,
        });
    }
    let l = adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Averaged bound ingredients and the assembled union bound.
#[derive(Debug, Clone, Copy)]
pub struct AvgBounds {
    /// Closed-form bound on the Rayleigh average of `P1`.
    pub p1avg: f64,
    /// Closed-form bound on the Rayleigh average of `P3`.
    pub p3avg: f64,
    /// Closed-form lower bound on the Rayleigh average of `P2c`.
    pub p2c_avg_lb: f64,
    /// Quadrature value of `E[P2]`.
    pub e2: f64,
    /// Quadrature value of `E[P2c]`.
    pub e2c: f64,
    /// Averaged union bound:
    /// `p1avg + P11 E[P2] + P10 E[P2c] + P11 p3avg + P10 * 0.5`.
    pub union_bound: f64,
    /// Dominant error component
    /// `P11 (p3avg + E[P2]) + P10 (E[P2c] + 0.5)`.
    pub p_dom: f64,
}

/// Closed-form averaged bound on `P1`.
pub fn p1_avg(params: &SystemParams, crossover: &CrossoverProbs) -> f64 {
    let (nb0, nb1) = noise_variances(params);
    let m = params.psk_order as f64;
    let d2 = 1.0 + params.alpha - 2.0 * params.alpha.sqrt() * (std::f64::consts::PI / m).cos();
    let base = nb0 * crossover.p11 / (nb1 * crossover.p00);
    let expo = nb1 / (nb1 - nb0);
    base.powf(expo) * (nb0 - nb1).powi(2) / ((nb0 - nb1).powi(2) + d2 * nb1)
}

/// Closed-form averaged bound on `P3`: `2 N_B1 / (4 N_B1 + ell^2)`.
pub fn p3_avg(params: &SystemParams) -> f64 {
    let (_, nb1) = noise_variances(params);
    let m = params.psk_order as f64;
    let ell2 = 4.0 * params.alpha * (std::f64::consts::PI / m).sin().powi(2);
    2.0 * nb1 / (4.0 * nb1 + ell2)
}

/// Closed-form lower bound on `E[P2c]`:
/// `4 d^2 N_o^2 / (4 d^2 N_o^2 + (N_o + 1 - alpha)(1 - alpha)^2)`.
pub fn p2c_avg_lower_bound(params: &SystemParams) -> f64 {
    let no = params.noise_power;
    let (_, nb1) = noise_variances(params);
    let m = params.psk_order as f64;
    let d2 = 1.0 + params.alpha - 2.0 * params.alpha.sqrt() * (std::f64::consts::PI / m).cos();
    let num = 4.0 * d2 * no * no;
    num / (num + nb1 * (1.0 - params.alpha).powi(2))
}

/// Assembles the averaged union bound and the dominant-term decomposition.
/// `E[P2]` and `E[P2c]` are computed by quadrature to 1e-8.
pub fn avg_bounds(params: &SystemParams, crossover: &CrossoverProbs) -> Result<AvgBounds, Error> {
    let p1avg = p1_avg(params, crossover);
    let p3avg = p3_avg(params);
    let p2c_avg_lb = p2c_avg_lower_bound(params);
    let e2 = expect_rayleigh(|u| pairwise_terms(u.sqrt(), params, crossover).p2, 1e-8)?;
    let e2c = expect_rayleigh(|u| pairwise_terms(u.sqrt(), params, crossover).p2c, 1e-8)?;
    let union_bound =
        p1avg + crossover.p11 * e2 + crossover.p10 * e2c + crossover.p11 * p3avg + crossover.p10 * 0.5;
    let p_dom = crossover.p11 * (p3avg + e2) + crossover.p10 * (e2c + 0.5);
    Ok(AvgBounds { p1avg, p3avg, p2c_avg_lb, e2, e2c, union_bound, p_dom })
}
