//! The destination's joint decoders over the 2M-hypothesis constellation.
//!
//! The destination sees one of `2M` Gaussian-mixture hypotheses: the helper's
//! PSK point on the unit ring (victim bit 0) or its rotated, scaled partner
//! (victim bit 1), each blurred by a bit-dependent noise variance and weighed
//! by the helper's decoding confusion matrix. Three decoders share this
//! geometry:
//!
//! * `Jmap` — exact maximum a posteriori over the two-component mixtures;
//! * `Jmax` — each mixture replaced by its larger weighted component;
//! * `Jd`   — joint dominant: only the diagonal-weight components are kept.
//!
//! All metrics are evaluated as log densities (log-sum-exp for the mixtures):
//! at 35 dB SNR the raw exponentials underflow in linear domain. Argmax ties
//! break toward the smallest bit, then the smallest PSK index, so decisions
//! are deterministic.
//!
//! [`ffhd_decode`] covers the half-duplex baseline in which both rings sit at
//! unit modulus and the noise variance is symmetric.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::charlie::CrossoverProbs;
use crate::sigcore::{psk_point, SymbolPair, SystemParams};

/// Joint decoder selection, including the half-duplex baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Jmap,
    Jmax,
    Jd,
    Ffhd,
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Jmap => "jmap",
            DecoderKind::Jmax => "jmax",
            DecoderKind::Jd => "jd",
            DecoderKind::Ffhd => "ffhd",
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jmap" => Ok(DecoderKind::Jmap),
            "jmax" => Ok(DecoderKind::Jmax),
            "jd" => Ok(DecoderKind::Jd),
            "ffhd" => Ok(DecoderKind::Ffhd),
            other => Err(format!("unknown decoder '{other}' (expected jmap, jmax, jd or ffhd)")),
        }
    }
}

/// Effective noise variances at the destination: `n_b0 = N_o` for victim bit
/// 0 and `n_b1 = N_o + (1 - alpha)` for bit 1, where the victim's
/// unknown-channel contribution folds into the noise.
#[derive(Debug, Clone, Copy)]
pub struct NoiseVariances {
    pub n_b0: f64,
    pub n_b1: f64,
}

impl NoiseVariances {
    pub fn for_params(params: &SystemParams) -> Self {
        Self { n_b0: params.noise_power, n_b1: params.noise_power + (1.0 - params.alpha) }
    }
}

#[inline]
fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Precomputed decoding tables for one operating point. Building the tables
/// once and calling [`JointDecoder::decode`] per received symbol is the hot
/// path of the Monte-Carlo engine; the free functions below wrap this for
/// one-shot use.
pub struct JointDecoder {
    kind: DecoderKind,
    m: u32,
    /// Unit-ring points `y_j`.
    base: Vec<Complex64>,
    /// Rotated, scaled partners `sqrt(alpha) e^{i pi / M} y_j`.
    rotated: Vec<Complex64>,
    inv_nb0: f64,
    inv_nb1: f64,
    lw00: f64,
    lw01: f64,
    lw10: f64,
    lw11: f64,
}

impl JointDecoder {
    /// Panics when asked for `Ffhd`: the baseline has its own geometry, see
    /// [`FfhdDecoder`].
    pub fn new(kind: DecoderKind, params: &SystemParams, crossover: &CrossoverProbs) -> Self {
        assert!(kind != DecoderKind::Ffhd, "JointDecoder handles the joint decoders; use FfhdDecoder");
        let m = params.psk_order;
        let rot = Complex64::from_polar(params.alpha.sqrt(), PI / m as f64);
        let base: Vec<Complex64> = (0..m).map(|j| psk_point(m, j)).collect();
        let rotated: Vec<Complex64> = base.iter().map(|y| rot * y).collect();
        let nv = NoiseVariances::for_params(params);
        Self {
            kind,
            m,
            base,
            rotated,
            inv_nb0: 1.0 / nv.n_b0,
            inv_nb1: 1.0 / nv.n_b1,
            lw00: crossover.p00.ln() - (PI * nv.n_b0).ln(),
            lw01: crossover.p01.ln() - (PI * nv.n_b0).ln(),
            lw10: crossover.p10.ln() - (PI * nv.n_b1).ln(),
            lw11: crossover.p11.ln() - (PI * nv.n_b1).ln(),
        }
    }

    /// Argmax over the `2M` hypotheses; ties break toward bit 0, then the
    /// smaller PSK index.
    pub fn decode(&self, r_b: Complex64, h_cb: Complex64) -> SymbolPair {
        let mut best0 = f64::NEG_INFINITY;
        let mut best0_j = 0u32;
        let mut best1 = f64::NEG_INFINITY;
        let mut best1_j = 0u32;
        for j in 0..self.m as usize {
            let d0 = (r_b - h_cb * self.base[j]).norm_sqr();
            let d1 = (r_b - h_cb * self.rotated[j]).norm_sqr();
            let l00 = self.lw00 - d0 * self.inv_nb0;
            let l01 = self.lw01 - d1 * self.inv_nb0;
            let l10 = self.lw10 - d0 * self.inv_nb1;
            let l11 = self.lw11 - d1 * self.inv_nb1;
            let (m0, m1) = match self.kind {
                DecoderKind::Jd => (l00, l11),
                DecoderKind::Jmax => (l00.max(l01), l10.max(l11)),
                DecoderKind::Jmap => (log_sum_exp(l00, l01), log_sum_exp(l10, l11)),
                DecoderKind::Ffhd => unreachable!(),
            };
            if m0 > best0 {
                best0 = m0;
                best0_j = j as u32;
            }
            if m1 > best1 {
                best1 = m1;
                best1_j = j as u32;
            }
        }
        if best0 >= best1 {
            SymbolPair { alice_bit: 0, charlie_index: best0_j }
        } else {
            SymbolPair { alice_bit: 1, charlie_index: best1_j }
        }
    }
}

/// Conditional density of the received symbol under one hypothesis: the
/// two-component Gaussian mixture weighed by the helper's confusion matrix.
/// Linear-domain value; underflows to zero far off-center at high SNR, which
/// is exactly why the decoders work in log domain instead.
pub fn mixture_density(
    r_b: Complex64,
    h_cb: Complex64,
    hypothesis: SymbolPair,
    params: &SystemParams,
    crossover: &CrossoverProbs,
) -> f64 {
    assert!(hypothesis.alice_bit <= 1 && hypothesis.charlie_index < params.psk_order);
    let m = params.psk_order;
    let y = psk_point(m, hypothesis.charlie_index);
    let rot = Complex64::from_polar(params.alpha.sqrt(), PI / m as f64);
    let nv = NoiseVariances::for_params(params);
    let gauss = |center: Complex64, var: f64| {
        (-(r_b - h_cb * center).norm_sqr() / var).exp() / (PI * var)
    };
    if hypothesis.alice_bit == 0 {
        crossover.p00 * gauss(y, nv.n_b0) + crossover.p01 * gauss(rot * y, nv.n_b0)
    } else {
        crossover.p10 * gauss(y, nv.n_b1) + crossover.p11 * gauss(rot * y, nv.n_b1)
    }
}

/// One-shot joint MAP decision.
pub fn jmap_decode(
    r_b: Complex64,
    h_cb: Complex64,
    params: &SystemParams,
    crossover: &CrossoverProbs,
) -> SymbolPair {
    JointDecoder::new(DecoderKind::Jmap, params, crossover).decode(r_b, h_cb)
}

/// One-shot joint MAX decision (each mixture replaced by its larger weighted
/// component).
pub fn jmax_decode(
    r_b: Complex64,
    h_cb: Complex64,
    params: &SystemParams,
    crossover: &CrossoverProbs,
) -> SymbolPair {
    JointDecoder::new(DecoderKind::Jmax, params, crossover).decode(r_b, h_cb)
}

/// One-shot joint dominant decision (only the `P00`/`P11` components kept).
pub fn jd_decode(
    r_b: Complex64,
    h_cb: Complex64,
    params: &SystemParams,
    crossover: &CrossoverProbs,
) -> SymbolPair {
    JointDecoder::new(DecoderKind::Jd, params, crossover).decode(r_b, h_cb)
}

/// Precomputed tables for the half-duplex baseline: the helper signals the
/// victim's bit purely as a `pi/M` rotation, so both rings sit at unit
/// modulus and share the noise variance.
pub struct FfhdDecoder {
    base: Vec<Complex64>,
    rotated: Vec<Complex64>,
    inv_no: f64,
}

impl FfhdDecoder {
    pub fn new(m: u32, noise_power: f64) -> Self {
        let rot = Complex64::from_polar(1.0, PI / m as f64);
        let base: Vec<Complex64> = (0..m).map(|j| psk_point(m, j)).collect();
        let rotated: Vec<Complex64> = base.iter().map(|y| rot * y).collect();
        Self { base, rotated, inv_no: 1.0 / noise_power }
    }

    pub fn decode(&self, r_b: Complex64, h_cb: Complex64) -> SymbolPair {
        let mut best = f64::NEG_INFINITY;
        let mut pair = SymbolPair { alice_bit: 0, charlie_index: 0 };
        for (bit, ring) in [(0u8, &self.base), (1u8, &self.rotated)] {
            for (j, point) in ring.iter().enumerate() {
                let metric = -(r_b - h_cb * point).norm_sqr() * self.inv_no;
                if metric > best {
                    best = metric;
                    pair = SymbolPair { alice_bit: bit, charlie_index: j as u32 };
                }
            }
        }
        pair
    }
}

/// Joint MAP decision for the half-duplex baseline: equal priors and equal
/// variances reduce it to the nearest of the `2M` unit-modulus points.
pub fn ffhd_decode(r_b: Complex64, h_cb: Complex64, m: u32, noise_power: f64) -> SymbolPair {
    FfhdDecoder::new(m, noise_power).decode(r_b, h_cb)
}
