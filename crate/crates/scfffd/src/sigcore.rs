//! Constellations, channel/noise sampling, and the shared parameter record.
//!
//! Everything downstream (detector, decoders, bounds, Monte-Carlo engine)
//! consumes [`SystemParams`] and the draw functions defined here. All complex
//! arithmetic is double precision: the exponent ratios showing up at 35 dB
//! SNR underflow in single precision.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::Error;

/// Full experiment configuration point.
///
/// * `alpha` — power-splitting factor in (0, 1): the helper keeps `alpha` of
///   its power on its own band, the victim uses `1 - alpha` there, and the
///   residuals go to the jammed band.
/// * `psk_order` — PSK constellation size `M = 2^m`, `m >= 1`.
/// * `noise_power` — receiver noise power `N_o` (SNR = 1/N_o).
/// * `sigma_ac2` — victim-to-helper channel variance, `>= 1` (the two nodes
///   are assumed close to each other).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub alpha: f64,
    pub psk_order: u32,
    pub noise_power: f64,
    pub sigma_ac2: f64,
}

impl SystemParams {
    /// Validates and builds a parameter record.
    pub fn new(alpha: f64, psk_order: u32, noise_power: f64, sigma_ac2: f64) -> Result<Self, Error> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "must lie strictly inside (0, 1)",
            });
        }
        if psk_order < 2 || !psk_order.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "psk_order",
                value: psk_order as f64,
                constraint: "must be a power of two with M >= 2",
            });
        }
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "noise_power",
                value: noise_power,
                constraint: "must be positive and finite",
            });
        }
        if !(sigma_ac2 >= 1.0 && sigma_ac2.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma_ac2",
                value: sigma_ac2,
                constraint: "must be >= 1",
            });
        }
        Ok(Self { alpha, psk_order, noise_power, sigma_ac2 })
    }

    /// Same as [`SystemParams::new`] but with the noise power given as an SNR
    /// in dB (`N_o = 10^(-snr_db/10)`).
    pub fn from_snr_db(alpha: f64, psk_order: u32, snr_db: f64, sigma_ac2: f64) -> Result<Self, Error> {
        Self::new(alpha, psk_order, 10f64.powf(-snr_db / 10.0), sigma_ac2)
    }

    pub fn snr_db(&self) -> f64 {
        -10.0 * self.noise_power.log10()
    }
}

/// One draw of the three fading coefficients.
///
/// `h_ac ~ CN(0, sigma_ac2)`, `h_cb ~ CN(0, 1)`, `h_ab ~ CN(0, 1)`, all
/// statistically independent, redrawn i.i.d. for every symbol.
#[derive(Debug, Clone, Copy)]
pub struct ChannelRealization {
    pub h_ac: Complex64,
    pub h_cb: Complex64,
    pub h_ab: Complex64,
}

/// Jointly decoded hypothesis: the victim's bit and the helper's PSK index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolPair {
    /// Victim (OOK) bit, 0 or 1.
    pub alice_bit: u8,
    /// Helper PSK symbol index, `0..M`.
    pub charlie_index: u32,
}

/// Seedable, splittable random stream.
///
/// Identical seeds give bit-identical sample sequences. Distinct worker
/// streams come from [`RngStream::substream`], which maps the worker index to
/// a ChaCha stream id: streams are non-overlapping by construction, so
/// Monte-Carlo results do not depend on thread scheduling.
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn master(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Stream `index` derived from `seed`. Used one-per-block by the
    /// Monte-Carlo engine.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self(rng)
    }

    /// N(0, 1) draw.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    /// Uniform draw from `0..n`.
    #[inline]
    pub fn uniform_index(&mut self, n: u32) -> u32 {
        self.0.random_range(0..n)
    }

    /// Circularly-symmetric complex Gaussian CN(0, `variance`).
    #[inline]
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let s = (variance / 2.0).sqrt();
        Complex64::new(s * self.standard_normal(), s * self.standard_normal())
    }
}

/// `j`-th point of the M-PSK constellation, `e^{i 2 pi (j + 0.5) / M}`.
///
/// Panics if `j >= m`.
#[inline]
pub fn psk_point(m: u32, j: u32) -> Complex64 {
    assert!(j < m, "psk_point: index {j} out of range for M = {m}");
    Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / m as f64)
}

/// The symbol the helper actually transmits: the plain PSK point when it
/// decoded bit 0, and the `sqrt(alpha)`-scaled, `pi/M`-rotated point when it
/// decoded bit 1.
///
/// Panics if `j >= m` or `decoded_bit > 1`.
#[inline]
pub fn charlie_tx_point(m: u32, j: u32, decoded_bit: u8, alpha: f64) -> Complex64 {
    assert!(decoded_bit <= 1, "charlie_tx_point: bit must be 0 or 1");
    let y = psk_point(m, j);
    if decoded_bit == 0 {
        y
    } else {
        Complex64::from_polar(alpha.sqrt(), PI / m as f64) * y
    }
}

/// Independent CN draws of the three channels with their nominal variances.
pub fn draw_channel(params: &SystemParams, rng: &mut RngStream) -> ChannelRealization {
    ChannelRealization {
        h_ac: rng.complex_gaussian(params.sigma_ac2),
        h_cb: rng.complex_gaussian(1.0),
        h_ab: rng.complex_gaussian(1.0),
    }
}

/// CN(0, `variance`) noise draw; real and imaginary parts are each
/// N(0, variance/2).
///
/// Panics if `variance <= 0`.
pub fn draw_noise(variance: f64, rng: &mut RngStream) -> Complex64 {
    assert!(variance > 0.0, "draw_noise: variance must be positive, got {variance}");
    rng.complex_gaussian(variance)
}
