//! The helper's non-coherent energy detector and its closed-form crossover
//! probabilities.
//!
//! The helper has no knowledge of the instantaneous victim-to-helper channel,
//! so it decides between "bit 0" (noise only, variance `N_C0 = N_o`) and
//! "bit 1" (signal plus noise, variance `N_C1 = sigma_ac2 (1 - alpha) + N_o`)
//! by thresholding the received energy. This module is the single source of
//! truth for the threshold and the confusion matrix; decoders and bounds
//! consume [`crossover_probs`] instead of re-deriving it.

use num_complex::Complex64;

use crate::sigcore::SystemParams;

/// Confusion matrix of the energy detector. `p_xy` is the probability of
/// deciding `y` when bit `x` was sent; rows sum to one.
#[derive(Debug, Clone, Copy)]
pub struct CrossoverProbs {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

/// Likelihood-ratio threshold for a two-variance energy test,
/// `beta = n0 n1 / (n0 - n1) * ln(n0 / n1)` with `n1 >= n0 > 0`.
///
/// The expression has a removable singularity at `n1 = n0`; within a relative
/// gap of 1e-9 the analytic limit `beta = n0` is returned instead.
pub fn threshold_for(n0: f64, n1: f64) -> f64 {
    debug_assert!(n0 > 0.0 && n1 >= n0);
    if n1 - n0 < 1e-9 * n0 {
        return n0;
    }
    n0 * n1 / (n0 - n1) * (n0 / n1).ln()
}

/// Detection threshold `beta` for the SC-FFFD uplink at the given operating
/// point.
pub fn detector_threshold(params: &SystemParams) -> f64 {
    let n0 = params.noise_power;
    let n1 = params.sigma_ac2 * (1.0 - params.alpha) + params.noise_power;
    threshold_for(n0, n1)
}

/// Energy decision against a precomputed threshold: 1 iff `|r|^2 > beta`.
///
/// Ties (`|r|^2 == beta`, a measure-zero event at which both likelihoods are
/// equal) decide 0, keeping the detector deterministic.
#[inline]
pub fn decide_energy(energy: f64, beta: f64) -> u8 {
    u8::from(energy > beta)
}

/// Non-coherent energy detection of the victim's OOK bit. The likelihood
/// ratio test reduces to an energy threshold because `N_C1 > N_C0`.
#[inline]
pub fn energy_detect(r_c: Complex64, params: &SystemParams) -> u8 {
    decide_energy(r_c.norm_sqr(), detector_threshold(params))
}

/// Closed-form confusion matrix: `p01 = exp(-beta/N_C0)`,
/// `p10 = 1 - exp(-beta/N_C1)`, complements for the diagonal.
pub fn crossover_probs(params: &SystemParams) -> CrossoverProbs {
    let n0 = params.noise_power;
    let n1 = params.sigma_ac2 * (1.0 - params.alpha) + params.noise_power;
    let beta = threshold_for(n0, n1);
    let p01 = (-beta / n0).exp();
    let p10 = 1.0 - (-beta / n1).exp();
    CrossoverProbs { p00: 1.0 - p01, p01, p10, p11: 1.0 - p10 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigcore::{draw_noise, RngStream};

    #[test]
    fn threshold_reference_points() {
        // N_o = 0.1, sigma2 = 4, alpha = 0.5 -> N_C0 = 0.1, N_C1 = 2.1.
        let p = SystemParams::new(0.5, 4, 0.1, 4.0).unwrap();
        assert!((detector_threshold(&p) - 0.3196748560).abs() < 1e-9);
        let p = SystemParams::new(0.5, 4, 0.01, 4.0).unwrap();
        assert!((detector_threshold(&p) - 0.0532982143).abs() < 1e-9);
    }

    #[test]
    fn threshold_limit_near_equal_variances() {
        // As alpha -> 1 the two variances coincide and beta -> N_C0.
        assert_eq!(threshold_for(0.1, 0.1), 0.1);
        assert_eq!(threshold_for(0.1, 0.1 + 1e-12), 0.1);
        // just outside the limit branch the formula is continuous
        let b = threshold_for(0.1, 0.1 * (1.0 + 1e-6));
        assert!((b - 0.1).abs() < 1e-6);
    }

    #[test]
    fn crossover_reference_points() {
        let p = SystemParams::new(0.5, 4, 0.1, 4.0).unwrap();
        let cp = crossover_probs(&p);
        assert!((cp.p01 - 0.04089496).abs() < 1e-7);
        assert!((cp.p10 - 0.14120593).abs() < 1e-7);
        assert!((cp.p00 + cp.p01 - 1.0).abs() < 1e-15);
        assert!((cp.p10 + cp.p11 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crossover_alpha_to_one_limit() {
        // beta -> N_C0 = N_C1, so p01 -> 1/e and p10 -> 1 - 1/e.
        let p = SystemParams::new(1.0 - 1e-12, 4, 0.1, 4.0).unwrap();
        let cp = crossover_probs(&p);
        assert!((cp.p01 - (-1f64).exp()).abs() < 1e-9);
        assert!((cp.p10 - (1.0 - (-1f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn detector_edge_decisions() {
        let p = SystemParams::new(0.5, 4, 0.1, 4.0).unwrap();
        // zero energy is always below the (positive) threshold
        assert_eq!(energy_detect(Complex64::new(0.0, 0.0), &p), 0);
        // exact tie decides 0
        let beta = detector_threshold(&p);
        assert_eq!(decide_energy(beta, beta), 0);
        assert_eq!(decide_energy(beta * (1.0 + 1e-12), beta), 1);
    }

    #[test]
    fn threshold_equalizes_the_likelihoods() {
        // beta is exactly the energy at which the two conditional densities
        // (1/(pi n)) exp(-e/n) cross, which is what makes the tie arbitrary
        for (n0, n1) in [(0.1, 2.1), (0.01, 2.01), (1.0, 5.0), (3.16e-4, 0.4)] {
            let beta = threshold_for(n0, n1);
            let f0 = (-beta / n0).exp() / (std::f64::consts::PI * n0);
            let f1 = (-beta / n1).exp() / (std::f64::consts::PI * n1);
            assert!((f0 - f1).abs() <= 1e-12 * f0, "n0 {n0} n1 {n1}: {f0} vs {f1}");
        }
    }

    #[test]
    fn empirical_false_alarm_rate_matches_p01() {
        // Pr(detect 1 | bit 0) over 1e6 trials at N_o=0.1, sigma2=4, alpha=0.5.
        let p = SystemParams::new(0.5, 4, 0.1, 4.0).unwrap();
        let beta = detector_threshold(&p);
        let cp = crossover_probs(&p);
        let n = 1_000_000u32;
        let mut rng = RngStream::master(2024);
        let mut k = 0u32;
        for _ in 0..n {
            let r = draw_noise(p.noise_power, &mut rng);
            k += decide_energy(r.norm_sqr(), beta) as u32;
        }
        let emp = k as f64 / n as f64;
        let se = (cp.p01 * (1.0 - cp.p01) / n as f64).sqrt();
        assert!(
            (emp - cp.p01).abs() < 3.0 * se,
            "empirical {emp} vs analytic {} (3se = {})",
            cp.p01,
            3.0 * se
        );
    }
}
