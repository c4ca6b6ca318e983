//! Semi-Coherent Fast-Forward Full-Duplex (SC-FFFD) relaying.
//!
//! A jammed low-latency OOK link (Alice, the victim) hides behind a
//! full-duplex PSK neighbor (Charlie, the helper): Alice moves her
//! transmission onto Charlie's band at `1 - alpha` of her power, Charlie
//! decodes her bit with a non-coherent energy detector and instantly fuses it
//! into his own constellation as a rotation plus power scaling, and both pour
//! their residual power onto the jammed band so that the power-measuring
//! jammer (Dave) keeps attacking the old band. The destination (Bob) jointly
//! decodes both data streams from the composite constellation.
//!
//! The crate provides the building blocks end to end:
//!
//! * [`sigcore`] — constellations, channel and noise sampling, reproducible
//!   RNG streams, the shared [`SystemParams`] record;
//! * [`charlie`] — the energy detector and its closed-form confusion matrix;
//! * [`bobdec`] — the joint MAP / MAX / dominant decoders and the
//!   half-duplex baseline decoder;
//! * [`errbounds`] — Marcum-Q and Gaussian-Q machinery, conditional pairwise
//!   error terms, and the averaged union bound;
//! * [`alphasolve`] — the power-split factor `alpha*` (safeguarded
//!   Newton-Raphson on the dominant-term gap) and the exhaustive-search
//!   reference `alpha_E`;
//! * [`simkit`] — the deterministic parallel Monte-Carlo engine, the
//!   half-duplex baseline, the before/after tradeoff, and the band-power
//!   audit that keeps the jammer deceived.

pub mod alphasolve;
pub mod bobdec;
pub mod charlie;
pub mod errbounds;
pub mod sigcore;
pub mod simkit;

pub use alphasolve::{
    alpha_grid, bisect_alpha_star, f_gap, search_alpha_e, solve_alpha_star, AlphaSearch,
    AlphaSolution, SolveMethod,
};
pub use bobdec::{
    ffhd_decode, jd_decode, jmap_decode, jmax_decode, mixture_density, DecoderKind, FfhdDecoder,
    JointDecoder, NoiseVariances,
};
pub use charlie::{crossover_probs, detector_threshold, energy_detect, CrossoverProbs};
pub use errbounds::{
    avg_bounds, conditional_bound, expect_rayleigh, gaussian_q, marcum_q1, pairwise_terms,
    AvgBounds, PairwiseTerms,
};
pub use sigcore::{
    charlie_tx_point, draw_channel, draw_noise, psk_point, ChannelRealization, RngStream,
    SymbolPair, SystemParams,
};
pub use simkit::{
    power_audit, run_ffhd, run_scfffd, run_tradeoff, MCEstimate, PowerAudit, SerReport,
    TradeoffReport, TrialOutcome,
};

/// Errors surfaced by parameter validation, quadrature, and the root solver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter { name: &'static str, value: f64, constraint: &'static str },

    #[error(
        "quadrature stalled on [{}, {}]: error estimate {error_estimate:.3e} above tolerance {tolerance:.3e}",
        interval.0, interval.1
    )]
    QuadratureNonConvergence { interval: (f64, f64), error_estimate: f64, tolerance: f64 },

    #[error(
        "dominant-term gap has no sign change on ({lo}, {hi}): f(lo) = {f_lo:.3e}, f(hi) = {f_hi:.3e}; \
         the SNR is too low for the single-crossing regime"
    )]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root solve did not converge within {iterations} iterations (residual {residual:.3e})")]
    RootSolveFailed { iterations: u32, residual: f64 },
}
