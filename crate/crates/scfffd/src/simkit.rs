//! Monte-Carlo engine: end-to-end relay trials, the half-duplex baseline,
//! per-node error decomposition, and the eavesdropper power audit.
//!
//! Trials are partitioned into fixed-size blocks; block `b` draws from the
//! stream derived from `(seed, b)` and the block results reduce by
//! summation, so every report is bit-reproducible for a given seed no matter
//! how many worker threads run the blocks.

use rayon::prelude::*;

use crate::alphasolve::solve_alpha_star;
use crate::bobdec::{DecoderKind, FfhdDecoder, JointDecoder};
use crate::charlie::{crossover_probs, decide_energy, detector_threshold, threshold_for};
use crate::sigcore::{draw_channel, draw_noise, RngStream, SymbolPair, SystemParams};
use crate::Error;

/// Trials per RNG stream block. Fixed so that results are independent of the
/// worker count.
const TRIAL_BLOCK: u64 = 1 << 14;

/// Monte-Carlo point estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl MCEstimate {
    /// Estimate of a Bernoulli rate: `stderr = sqrt(mean (1 - mean) / n)`.
    pub fn bernoulli(successes: u64, trials: u64) -> Self {
        assert!(trials > 0);
        let mean = successes as f64 / trials as f64;
        Self { mean, stderr: (mean * (1.0 - mean) / trials as f64).sqrt(), trials }
    }

    /// Estimate of a bounded real observable from accumulated moments.
    pub fn from_moments(sum: f64, sum_sq: f64, trials: u64) -> Self {
        assert!(trials > 0);
        let n = trials as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        Self { mean, stderr: (var / n).sqrt(), trials }
    }
}

/// Per-band transmit powers seen by the eavesdropper in one symbol period.
#[derive(Debug, Clone, Copy)]
pub struct BandPowers {
    /// Power on the jammed band: the victim's residual plus the helper's
    /// residual when the forwarded bit is 1.
    pub f_ab: f64,
    /// Power on the relay band: the helper's symbol power plus the victim's
    /// share when her bit is 1.
    pub f_cb: f64,
}

/// Everything observable from a single relay trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialOutcome {
    pub sent: SymbolPair,
    pub decoded: SymbolPair,
    pub charlie_detected: u8,
    pub powers: BandPowers,
}

/// Joint and per-node symbol error rates, plus the helper's empirical
/// detection confusion counts (`[sent bit][detected bit]`).
#[derive(Debug, Clone)]
pub struct SerReport {
    pub joint_ser: MCEstimate,
    pub alice_ser: MCEstimate,
    pub charlie_ser: MCEstimate,
    pub charlie_confusion: [[u64; 2]; 2],
}

/// Band-power estimates conditioned on the victim's bit.
#[derive(Debug, Clone)]
pub struct PowerAudit {
    pub f_cb_given_x0: MCEstimate,
    pub f_cb_given_x1: MCEstimate,
    pub f_ab_given_x0: MCEstimate,
    pub f_ab_given_x1: MCEstimate,
}

/// Error rates before and after the relay protocol is switched on.
#[derive(Debug, Clone)]
pub struct TradeoffReport {
    pub alpha_star: f64,
    /// Helper alone: coherent M-PSK on its own band.
    pub charlie_pre: MCEstimate,
    /// Victim alone on a clean band: full-power OOK, energy detection.
    pub alice_pre_unjammed: MCEstimate,
    /// Victim alone under the jammer: same link with the jamming power added.
    pub alice_pre_jammed: MCEstimate,
    pub alice_post: MCEstimate,
    pub charlie_post: MCEstimate,
    pub joint_post: MCEstimate,
}

/// One end-to-end relay trial: uniform symbol pair, fresh channel and noise
/// draws, helper detection with its actual (not genie) decision driving the
/// forwarded constellation point, joint decoding at the destination.
///
/// `genie` only affects the reported band powers: the audit's genie mode
/// replaces the helper's detected bit by the true bit when accounting for
/// the residual power on the jammed band.
pub fn simulate_trial(
    params: &SystemParams,
    beta: f64,
    decoder: &JointDecoder,
    genie: bool,
    rng: &mut RngStream,
) -> TrialOutcome {
    let alpha = params.alpha;
    let bit = rng.uniform_index(2) as u8;
    let j = rng.uniform_index(params.psk_order);
    let ch = draw_channel(params, rng);
    let n_c = draw_noise(params.noise_power, rng);
    let n_b = draw_noise(params.noise_power, rng);

    // uplink to the helper at the victim's reduced power
    let r_c = ch.h_ac * ((1.0 - alpha).sqrt() * bit as f64) + n_c;
    let detected = decide_energy(r_c.norm_sqr(), beta);

    // the helper forwards based on what it actually detected
    let t = crate::sigcore::charlie_tx_point(params.psk_order, j, detected, alpha);
    let r_b = ch.h_cb * t + ch.h_ab * ((1.0 - alpha).sqrt() * bit as f64) + n_b;
    let decoded = decoder.decode(r_b, ch.h_cb);

    let fwd_bit = if genie { bit } else { detected };
    let helper_symbol_power = if fwd_bit == 1 { alpha } else { 1.0 };
    let powers = BandPowers {
        f_cb: helper_symbol_power + (1.0 - alpha) * bit as f64,
        f_ab: alpha * bit as f64 + (1.0 - alpha) * fwd_bit as f64,
    };

    TrialOutcome { sent: SymbolPair { alice_bit: bit, charlie_index: j }, decoded, charlie_detected: detected, powers }
}

#[derive(Default, Clone, Copy)]
struct SerAccum {
    trials: u64,
    joint: u64,
    alice: u64,
    charlie: u64,
    confusion: [[u64; 2]; 2],
}

impl SerAccum {
    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.joint += other.joint;
        self.alice += other.alice;
        self.charlie += other.charlie;
        for s in 0..2 {
            for d in 0..2 {
                self.confusion[s][d] += other.confusion[s][d];
            }
        }
        self
    }

    fn record(&mut self, sent: SymbolPair, detected: u8, decoded: SymbolPair) {
        self.trials += 1;
        let alice_err = decoded.alice_bit != sent.alice_bit;
        let charlie_err = decoded.charlie_index != sent.charlie_index;
        self.joint += (alice_err || charlie_err) as u64;
        self.alice += alice_err as u64;
        self.charlie += charlie_err as u64;
        self.confusion[sent.alice_bit as usize][detected as usize] += 1;
    }

    fn report(&self) -> SerReport {
        SerReport {
            joint_ser: MCEstimate::bernoulli(self.joint, self.trials),
            alice_ser: MCEstimate::bernoulli(self.alice, self.trials),
            charlie_ser: MCEstimate::bernoulli(self.charlie, self.trials),
            charlie_confusion: self.confusion,
        }
    }
}

fn block_sizes(trials: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let blocks = trials.div_ceil(TRIAL_BLOCK) as usize;
    (0..blocks).into_par_iter().map(move |b| {
        let b = b as u64;
        (b, TRIAL_BLOCK.min(trials - b * TRIAL_BLOCK))
    })
}

/// Simulates `trials` relay symbols with the given joint decoder and scores
/// joint, victim and helper error rates. Bit-reproducible for a given seed,
/// independent of the worker count.
///
/// Panics when handed [`DecoderKind::Ffhd`]; the baseline has a different
/// signal model, see [`run_ffhd`].
pub fn run_scfffd(params: &SystemParams, decoder: DecoderKind, trials: u64, seed: u64) -> SerReport {
    assert!(trials >= 1);
    assert!(decoder != DecoderKind::Ffhd, "run_scfffd simulates the relay protocol; use run_ffhd");
    let crossover = crossover_probs(params);
    let beta = detector_threshold(params);
    let dec = JointDecoder::new(decoder, params, &crossover);
    block_sizes(trials)
        .map(|(b, n)| {
            let mut rng = RngStream::substream(seed, b);
            let mut acc = SerAccum::default();
            for _ in 0..n {
                let out = simulate_trial(params, beta, &dec, false, &mut rng);
                acc.record(out.sent, out.charlie_detected, out.decoded);
            }
            acc
        })
        .reduce(SerAccum::default, SerAccum::merge)
        .report()
}

/// Half-duplex baseline: the victim keeps transmitting full-power OOK on the
/// jammed band; the helper listens there (suffering `interference_power` of
/// jamming leakage as extra noise), detects, and signals the victim's bit as
/// a pure `pi/M` rotation of its PSK symbol at unit power.
pub fn run_ffhd(
    m: u32,
    noise_power: f64,
    sigma_ac2: f64,
    interference_power: f64,
    trials: u64,
    seed: u64,
) -> SerReport {
    assert!(trials >= 1);
    assert!(interference_power >= 0.0);
    let n0 = noise_power + interference_power;
    let beta = threshold_for(n0, sigma_ac2 + n0);
    let dec = FfhdDecoder::new(m, noise_power);
    let rot = num_complex::Complex64::from_polar(1.0, std::f64::consts::PI / m as f64);
    block_sizes(trials)
        .map(|(b, n)| {
            let mut rng = RngStream::substream(seed, b);
            let mut acc = SerAccum::default();
            for _ in 0..n {
                let bit = rng.uniform_index(2) as u8;
                let j = rng.uniform_index(m);
                let h_ac = rng.complex_gaussian(sigma_ac2);
                let h_cb = rng.complex_gaussian(1.0);
                let r_c = h_ac * bit as f64 + rng.complex_gaussian(n0);
                let detected = decide_energy(r_c.norm_sqr(), beta);
                let mut t = crate::sigcore::psk_point(m, j);
                if detected == 1 {
                    t *= rot;
                }
                let r_b = h_cb * t + rng.complex_gaussian(noise_power);
                let decoded = dec.decode(r_b, h_cb);
                acc.record(SymbolPair { alice_bit: bit, charlie_index: j }, detected, decoded);
            }
            acc
        })
        .reduce(SerAccum::default, SerAccum::merge)
        .report()
}

#[derive(Default, Clone, Copy)]
struct PowerAccum {
    n: [u64; 2],
    sum_cb: [f64; 2],
    sum_sq_cb: [f64; 2],
    sum_ab: [f64; 2],
    sum_sq_ab: [f64; 2],
}

impl PowerAccum {
    fn merge(mut self, o: Self) -> Self {
        for x in 0..2 {
            self.n[x] += o.n[x];
            self.sum_cb[x] += o.sum_cb[x];
            self.sum_sq_cb[x] += o.sum_sq_cb[x];
            self.sum_ab[x] += o.sum_ab[x];
            self.sum_sq_ab[x] += o.sum_sq_ab[x];
        }
        self
    }
}

/// Measures the per-band transmit powers the eavesdropper observes,
/// conditioned on the victim's bit. In genie mode the helper is assumed to
/// decode the victim without error, which pins the relay band at exactly
/// unit power and the jammed band at exactly the OOK levels; in detected
/// mode the deviations are bounded by the detector confusion matrix.
pub fn power_audit(params: &SystemParams, trials: u64, genie: bool, seed: u64) -> PowerAudit {
    assert!(trials >= 1);
    let crossover = crossover_probs(params);
    let beta = detector_threshold(params);
    // the decoder result is not used by the audit, but the trial path is the
    // same end-to-end simulation the error reports run
    let dec = JointDecoder::new(DecoderKind::Jd, params, &crossover);
    let acc = block_sizes(trials)
        .map(|(b, n)| {
            let mut rng = RngStream::substream(seed, b);
            let mut acc = PowerAccum::default();
            for _ in 0..n {
                let out = simulate_trial(params, beta, &dec, genie, &mut rng);
                let x = out.sent.alice_bit as usize;
                acc.n[x] += 1;
                acc.sum_cb[x] += out.powers.f_cb;
                acc.sum_sq_cb[x] += out.powers.f_cb * out.powers.f_cb;
                acc.sum_ab[x] += out.powers.f_ab;
                acc.sum_sq_ab[x] += out.powers.f_ab * out.powers.f_ab;
            }
            acc
        })
        .reduce(PowerAccum::default, PowerAccum::merge);
    PowerAudit {
        f_cb_given_x0: MCEstimate::from_moments(acc.sum_cb[0], acc.sum_sq_cb[0], acc.n[0]),
        f_cb_given_x1: MCEstimate::from_moments(acc.sum_cb[1], acc.sum_sq_cb[1], acc.n[1]),
        f_ab_given_x0: MCEstimate::from_moments(acc.sum_ab[0], acc.sum_sq_ab[0], acc.n[0]),
        f_ab_given_x1: MCEstimate::from_moments(acc.sum_ab[1], acc.sum_sq_ab[1], acc.n[1]),
    }
}

/// Helper-alone reference link: coherent M-PSK over its fading channel.
fn coherent_psk_ser(m: u32, noise_power: f64, trials: u64, seed: u64) -> MCEstimate {
    let points: Vec<num_complex::Complex64> =
        (0..m).map(|j| crate::sigcore::psk_point(m, j)).collect();
    let errors: u64 = block_sizes(trials)
        .map(|(b, n)| {
            let mut rng = RngStream::substream(seed, b);
            let mut errs = 0u64;
            for _ in 0..n {
                let j = rng.uniform_index(m);
                let h = rng.complex_gaussian(1.0);
                let r = h * points[j as usize] + rng.complex_gaussian(noise_power);
                let mut best = f64::INFINITY;
                let mut jhat = 0u32;
                for (k, p) in points.iter().enumerate() {
                    let d = (r - h * p).norm_sqr();
                    if d < best {
                        best = d;
                        jhat = k as u32;
                    }
                }
                errs += (jhat != j) as u64;
            }
            errs
        })
        .sum();
    MCEstimate::bernoulli(errors, trials)
}

/// Victim-alone reference link: full-power OOK over a unit-variance fading
/// channel with non-coherent energy detection; `extra_noise` adds jamming
/// power at the receiver.
fn ook_ser(noise_power: f64, extra_noise: f64, trials: u64, seed: u64) -> MCEstimate {
    let n0 = noise_power + extra_noise;
    let beta = threshold_for(n0, 1.0 + n0);
    let errors: u64 = block_sizes(trials)
        .map(|(b, n)| {
            let mut rng = RngStream::substream(seed, b);
            let mut errs = 0u64;
            for _ in 0..n {
                let bit = rng.uniform_index(2) as u8;
                let h = rng.complex_gaussian(1.0);
                let r = h * bit as f64 + rng.complex_gaussian(n0);
                errs += (decide_energy(r.norm_sqr(), beta) != bit) as u64;
            }
            errs
        })
        .sum();
    MCEstimate::bernoulli(errors, trials)
}

fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Before/after comparison at the solved power split: the helper's coherent
/// PSK link and the victim's clean and jammed OOK links versus the joint-MAP
/// per-node error rates of the relay protocol at `alpha*`.
pub fn run_tradeoff(
    m: u32,
    noise_power: f64,
    sigma_ac2: f64,
    jam_power: f64,
    trials: u64,
    seed: u64,
) -> Result<TradeoffReport, Error> {
    let alpha_star = solve_alpha_star(m, noise_power, sigma_ac2)?.alpha_star;
    let params = SystemParams::new(alpha_star, m, noise_power, sigma_ac2)?;
    let post = run_scfffd(&params, DecoderKind::Jmap, trials, mix_seed(seed, 1));
    Ok(TradeoffReport {
        alpha_star,
        charlie_pre: coherent_psk_ser(m, noise_power, trials, mix_seed(seed, 2)),
        alice_pre_unjammed: ook_ser(noise_power, 0.0, trials, mix_seed(seed, 3)),
        alice_pre_jammed: ook_ser(noise_power, jam_power, trials, mix_seed(seed, 4)),
        alice_post: post.alice_ser,
        charlie_post: post.charlie_ser,
        joint_post: post.joint_ser,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_35db(alpha: f64, m: u32) -> SystemParams {
        SystemParams::from_snr_db(alpha, m, 35.0, 4.0).unwrap()
    }

    #[test]
    fn report_counts_are_consistent() {
        let params = params_35db(0.9, 4);
        let r = run_scfffd(&params, DecoderKind::Jd, 50_000, 11);
        assert_eq!(r.joint_ser.trials, 50_000);
        // a joint error is a victim error or a helper error
        assert!(r.joint_ser.mean >= r.alice_ser.mean);
        assert!(r.joint_ser.mean >= r.charlie_ser.mean);
        assert!(r.joint_ser.mean <= r.alice_ser.mean + r.charlie_ser.mean + 1e-15);
        let total: u64 = r.charlie_confusion.iter().flatten().sum();
        assert_eq!(total, 50_000);
    }

    #[test]
    fn reports_are_reproducible_across_worker_counts() {
        let params = params_35db(0.9, 4);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_scfffd(&params, DecoderKind::Jmap, 100_000, 3));
        let b = four.install(|| run_scfffd(&params, DecoderKind::Jmap, 100_000, 3));
        assert_eq!(a.joint_ser.mean.to_bits(), b.joint_ser.mean.to_bits());
        assert_eq!(a.charlie_confusion, b.charlie_confusion);
        let c = four.install(|| run_scfffd(&params, DecoderKind::Jmap, 100_000, 4));
        assert_ne!(a.joint_ser.mean.to_bits(), c.joint_ser.mean.to_bits());
    }

    #[test]
    fn all_four_detection_branches_occur() {
        let params = SystemParams::new(0.5, 4, 0.1, 4.0).unwrap();
        let r = run_scfffd(&params, DecoderKind::Jd, 100_000, 7);
        for s in 0..2 {
            for d in 0..2 {
                assert!(r.charlie_confusion[s][d] > 0, "branch ({s},{d}) never hit");
            }
        }
    }

    #[test]
    fn empirical_confusion_matches_closed_form() {
        let params = params_35db(0.9, 4);
        let cp = crossover_probs(&params);
        let r = run_scfffd(&params, DecoderKind::Jd, 1_000_000, 99);
        let n0 = (r.charlie_confusion[0][0] + r.charlie_confusion[0][1]) as f64;
        let n1 = (r.charlie_confusion[1][0] + r.charlie_confusion[1][1]) as f64;
        let p01 = r.charlie_confusion[0][1] as f64 / n0;
        let p10 = r.charlie_confusion[1][0] as f64 / n1;
        let se01 = (cp.p01 * (1.0 - cp.p01) / n0).sqrt();
        let se10 = (cp.p10 * (1.0 - cp.p10) / n1).sqrt();
        assert!((p01 - cp.p01).abs() < 4.0 * se01, "{p01} vs {}", cp.p01);
        assert!((p10 - cp.p10).abs() < 4.0 * se10, "{p10} vs {}", cp.p10);
    }

    #[test]
    fn vanishing_noise_drives_error_down() {
        let no = 1e-8;
        let alpha = solve_alpha_star(4, no, 4.0).unwrap().alpha_star;
        let params = SystemParams::new(alpha, 4, no, 4.0).unwrap();
        let r = run_scfffd(&params, DecoderKind::Jd, 100_000, 13);
        assert!(r.joint_ser.mean < 1e-3, "ser = {}", r.joint_ser.mean);
    }

    #[test]
    fn genie_power_audit_is_exact() {
        for &alpha in &[0.25, 0.5, 0.9] {
            let params = params_35db(alpha, 4);
            let audit = power_audit(&params, 20_000, true, 21);
            assert_eq!(audit.f_cb_given_x0.mean, 1.0);
            assert_eq!(audit.f_cb_given_x1.mean, 1.0);
            assert_eq!(audit.f_ab_given_x0.mean, 0.0);
            assert_eq!(audit.f_ab_given_x1.mean, 1.0);
            assert_eq!(audit.f_cb_given_x0.stderr, 0.0);
        }
    }

    #[test]
    fn detected_power_audit_deviations_follow_confusion() {
        let params = SystemParams::new(0.5, 4, 0.1, 4.0).unwrap();
        let cp = crossover_probs(&params);
        let audit = power_audit(&params, 1_000_000, false, 22);
        // jammed band, bit 1: mean is 1 - (1-alpha) p10
        let dev1 = (audit.f_ab_given_x1.mean - 1.0).abs();
        assert!(dev1 <= (1.0 - params.alpha) * cp.p10 + 3.0 * audit.f_ab_given_x1.stderr);
        assert!(dev1 >= (1.0 - params.alpha) * cp.p10 - 3.0 * audit.f_ab_given_x1.stderr);
        // jammed band, bit 0: mean is (1-alpha) p01
        assert!(audit.f_ab_given_x0.mean <= (1.0 - params.alpha) * cp.p01 + 3.0 * audit.f_ab_given_x0.stderr);
    }

    #[test]
    fn ffhd_noiseless_uplink_detects_perfectly() {
        let r = run_ffhd(4, 1e-9, 4.0, 0.0, 50_000, 31);
        assert_eq!(r.charlie_confusion[0][1], 0);
        assert_eq!(r.charlie_confusion[1][0], 0);
    }

    #[test]
    fn tradeoff_report_is_populated() {
        let rep = run_tradeoff(4, 1e-2, 4.0, 10.0, 200_000, 41).unwrap();
        assert!(rep.alpha_star > 0.5 && rep.alpha_star < 1.0);
        // helper pays for the relaying with a worse symbol error rate
        assert!(rep.charlie_post.mean > rep.charlie_pre.mean);
        // the jammed reference link is near coin-flipping
        assert!(rep.alice_pre_jammed.mean > 0.3);
        assert!(rep.alice_pre_unjammed.mean < rep.alice_pre_jammed.mean);
    }
}
