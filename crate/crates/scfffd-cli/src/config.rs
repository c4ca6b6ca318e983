//! Experiment configuration: optional TOML file, flag overrides, defaults,
//! and validation. Flags always win over file values; anything still unset
//! falls back to per-experiment defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::CliError;
use scfffd::DecoderKind;

/// Flat key-value config file contents. Keys mirror the long flag names.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<String>,
    pub alpha: Option<f64>,
    pub alpha_start: Option<f64>,
    pub alpha_stop: Option<f64>,
    pub alpha_step: Option<f64>,
    pub snr_db: Option<Vec<f64>>,
    pub psk_order: Option<u32>,
    pub sigma_ac2: Option<f64>,
    pub interference: Option<f64>,
    pub jam_power: Option<f64>,
    pub decoder: Option<Vec<String>>,
    pub genie: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("cannot parse config {}: {e}", path.display())))
    }
}

/// Fully resolved experiment plan, echoed verbatim into the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub experiment: String,
    pub seed: u64,
    pub trials: u64,
    /// 0 means "let the runtime pick".
    pub workers: usize,
    pub out: PathBuf,
    pub alphas: Vec<f64>,
    /// Fixed split for experiments that otherwise solve alpha* per SNR.
    pub fixed_alpha: Option<f64>,
    pub snr_db: Vec<f64>,
    pub psk_order: u32,
    pub sigma_ac2: f64,
    pub interference: f64,
    pub jam_power: f64,
    pub decoder_names: Vec<String>,
    pub genie: bool,
    #[serde(skip)]
    pub decoders: Vec<DecoderKind>,
}

pub struct Defaults {
    pub alpha_start: f64,
    pub alpha_stop: f64,
    pub alpha_step: f64,
    pub snr_db: &'static [f64],
    pub decoders: &'static [&'static str],
}

fn merged<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[allow(clippy::too_many_arguments)]
pub fn resolve(
    experiment: &str,
    args: &crate::RunArgs,
    file: FileConfig,
    defaults: Defaults,
) -> Result<Resolved, CliError> {
    if let Some(ref named) = file.experiment {
        if named != experiment {
            return Err(CliError::Config(format!(
                "config file is for experiment '{named}' but '{experiment}' was requested"
            )));
        }
    }

    let seed = merged(args.seed, file.seed, 1);
    let trials = merged(args.trials, file.trials, 1_000_000);
    let workers = merged(args.workers, file.workers, 0);
    let out = args
        .out
        .clone()
        .or_else(|| file.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{experiment}.csv")));

    let start = merged(args.alpha_start, file.alpha_start, defaults.alpha_start);
    let stop = merged(args.alpha_stop, file.alpha_stop, defaults.alpha_stop);
    let step = merged(args.alpha_step, file.alpha_step, defaults.alpha_step);
    if !(step > 0.0 && stop >= start) {
        return Err(CliError::Config(format!(
            "bad alpha grid: start {start}, stop {stop}, step {step}"
        )));
    }
    let alphas = scfffd::alpha_grid(start, stop, step);
    if alphas.is_empty() {
        return Err(CliError::Config("alpha grid has no points inside (0, 1)".into()));
    }

    let snr_db = merged(args.snr_db.clone(), file.snr_db, defaults.snr_db.to_vec());
    if snr_db.is_empty() {
        return Err(CliError::Config("snr_db list is empty".into()));
    }

    let decoder_names: Vec<String> = merged(
        args.decoder.clone(),
        file.decoder,
        defaults.decoders.iter().map(|s| s.to_string()).collect(),
    );
    let decoders: Vec<DecoderKind> = decoder_names
        .iter()
        .map(|name| name.parse().map_err(CliError::Config))
        .collect::<Result<_, _>>()?;

    let resolved = Resolved {
        experiment: experiment.to_string(),
        seed,
        trials,
        workers,
        out,
        alphas,
        fixed_alpha: args.alpha.or(file.alpha),
        snr_db,
        psk_order: merged(args.psk_order, file.psk_order, 4),
        sigma_ac2: merged(args.sigma_ac2, file.sigma_ac2, 4.0),
        interference: merged(args.interference, file.interference, 1.0),
        jam_power: merged(args.jam_power, file.jam_power, 10.0),
        decoder_names,
        genie: args.genie || file.genie.unwrap_or(false),
        decoders,
    };
    validate(&resolved)?;
    Ok(resolved)
}

fn validate(r: &Resolved) -> Result<(), CliError> {
    if r.trials < 1_000 {
        return Err(CliError::Config(format!("trials = {} is below the minimum of 1000", r.trials)));
    }
    if r.psk_order < 2 || !r.psk_order.is_power_of_two() {
        return Err(CliError::Config(format!("psk_order = {} must be a power of two >= 2", r.psk_order)));
    }
    if !(r.sigma_ac2 >= 1.0) {
        return Err(CliError::Config(format!("sigma_ac2 = {} must be >= 1", r.sigma_ac2)));
    }
    if r.interference < 0.0 || r.jam_power < 0.0 {
        return Err(CliError::Config("interference and jam_power must be nonnegative".into()));
    }
    if let Some(a) = r.fixed_alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(CliError::Config(format!("alpha = {a} must lie inside (0, 1)")));
        }
    }
    for &a in &r.alphas {
        if !(a > 0.0 && a < 1.0) {
            return Err(CliError::Config(format!("alpha grid point {a} outside (0, 1)")));
        }
    }
    if r.decoders.is_empty() {
        return Err(CliError::Config("decoder list is empty".into()));
    }
    if r.decoders.contains(&DecoderKind::Ffhd) {
        return Err(CliError::Config(
            "the half-duplex baseline is driven by ffhd-compare, not by --decoder".into(),
        ));
    }
    Ok(())
}
