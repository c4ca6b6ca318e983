//! Experiment runner for the SC-FFFD relaying simulator.
//!
//! One subcommand per experiment; every experiment emits a self-describing
//! CSV plus a `.meta.json` sidecar with the resolved configuration, solver
//! diagnostics and wall time. All runs are deterministic for a given seed,
//! independent of `--workers`.

mod config;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{Defaults, FileConfig, Resolved};
use output::{Csv, CsvField, SolveRecord};
use scfffd::{
    avg_bounds, crossover_probs, power_audit, run_ffhd, run_scfffd, run_tradeoff, solve_alpha_star,
    AlphaSolution, DecoderKind, Error as SimError, MCEstimate, SerReport, SystemParams,
};

#[derive(Debug)]
pub enum CliError {
    /// Unusable configuration: exit 2.
    Config(String),
    /// Numeric regime failure from the power-split solver: exit 3.
    Regime(String),
    /// I/O trouble: exit 1.
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Regime(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Regime(m) | CliError::Io(m) => m,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NoSignChange { .. } | SimError::RootSolveFailed { .. } => {
                CliError::Regime(e.to_string())
            }
            SimError::InvalidParameter { .. } => CliError::Config(e.to_string()),
            SimError::QuadratureNonConvergence { .. } => CliError::Io(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "scfffd",
    version,
    about = "Monte-Carlo experiments and analytical bounds for SC-FFFD anti-jamming relaying"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Joint SER of the selected decoders against the power split, with the
    /// averaged union bound alongside.
    SerVsAlpha(RunArgs),
    /// Solve alpha* per SNR and cross-check Newton against bisection.
    AlphaStar(RunArgs),
    /// Joint SER against SNR at alpha* (or a fixed --alpha).
    SerVsSnr(RunArgs),
    /// Per-node error rates before and after the relay protocol.
    Tradeoff(RunArgs),
    /// Band powers seen by the jammer, genie or detected mode.
    PowerAudit(RunArgs),
    /// Relay scheme at alpha* against the half-duplex baseline with and
    /// without jamming leakage at the helper.
    FfhdCompare(RunArgs),
}

#[derive(Args, Clone)]
pub struct RunArgs {
    /// Flat TOML config; flags given here override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path; the metadata sidecar lands at <out>.meta.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fixed power split for ser-vs-snr (defaults to solving alpha* per SNR).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_start: Option<f64>,
    #[arg(long)]
    alpha_stop: Option<f64>,
    #[arg(long)]
    alpha_step: Option<f64>,
    /// Comma-separated SNR list in dB.
    #[arg(long, value_delimiter = ',')]
    snr_db: Option<Vec<f64>>,
    #[arg(long)]
    psk_order: Option<u32>,
    #[arg(long)]
    sigma_ac2: Option<f64>,
    /// Jamming leakage power at the helper for the half-duplex baseline.
    #[arg(long)]
    interference: Option<f64>,
    /// Jammer power for the jammed pre-protocol reference link.
    #[arg(long)]
    jam_power: Option<f64>,
    /// Comma-separated decoder list: jmap, jmax, jd.
    #[arg(long, value_delimiter = ',')]
    decoder: Option<Vec<String>>,
    /// Power audit only: assume the helper decodes the victim perfectly.
    #[arg(long)]
    genie: bool,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, args, defaults) = match &cli.command {
        Command::SerVsAlpha(a) => (
            "ser-vs-alpha",
            a,
            Defaults {
                alpha_start: 0.1,
                alpha_stop: 0.95,
                alpha_step: 0.05,
                snr_db: &[35.0],
                decoders: &["jmap", "jmax", "jd"],
            },
        ),
        Command::AlphaStar(a) => (
            "alpha-star",
            a,
            Defaults {
                alpha_start: 0.5,
                alpha_stop: 0.5,
                alpha_step: 1.0,
                snr_db: &[15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
                decoders: &["jd"],
            },
        ),
        Command::SerVsSnr(a) => (
            "ser-vs-snr",
            a,
            Defaults {
                alpha_start: 0.5,
                alpha_stop: 0.5,
                alpha_step: 1.0,
                snr_db: &[15.0, 20.0, 25.0, 30.0, 35.0],
                decoders: &["jmap", "jmax", "jd"],
            },
        ),
        Command::Tradeoff(a) => (
            "tradeoff",
            a,
            Defaults {
                alpha_start: 0.5,
                alpha_stop: 0.5,
                alpha_step: 1.0,
                snr_db: &[10.0, 15.0, 20.0, 25.0, 30.0, 35.0],
                decoders: &["jmap"],
            },
        ),
        Command::PowerAudit(a) => (
            "power-audit",
            a,
            Defaults {
                alpha_start: 0.1,
                alpha_stop: 0.9,
                alpha_step: 0.1,
                snr_db: &[35.0],
                decoders: &["jd"],
            },
        ),
        Command::FfhdCompare(a) => (
            "ffhd-compare",
            a,
            Defaults {
                alpha_start: 0.5,
                alpha_stop: 0.5,
                alpha_step: 1.0,
                snr_db: &[15.0, 20.0, 25.0, 30.0, 35.0],
                decoders: &["jd"],
            },
        ),
    };

    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let resolved = config::resolve(name, args, file, defaults)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolved.workers)
        .build()
        .map_err(|e| CliError::Io(format!("cannot build worker pool: {e}")))?;

    let started = Instant::now();
    let (csv, solver) = pool.install(|| match cli.command {
        Command::SerVsAlpha(_) => ser_vs_alpha(&resolved),
        Command::AlphaStar(_) => alpha_star(&resolved),
        Command::SerVsSnr(_) => ser_vs_snr(&resolved),
        Command::Tradeoff(_) => tradeoff(&resolved),
        Command::PowerAudit(_) => power_audit_experiment(&resolved),
        Command::FfhdCompare(_) => ffhd_compare(&resolved),
    })?;

    csv.write(&resolved.out)?;
    output::write_sidecar(&resolved, &solver, csv.rows(), started.elapsed().as_secs_f64())?;
    println!("wrote {} rows to {}", csv.rows(), resolved.out.display());
    Ok(())
}

fn params_for(r: &Resolved, alpha: f64, snr_db: f64) -> Result<SystemParams, CliError> {
    Ok(SystemParams::from_snr_db(alpha, r.psk_order, snr_db, r.sigma_ac2)?)
}

fn solve_for(r: &Resolved, snr_db: f64) -> Result<(AlphaSolution, SolveRecord), CliError> {
    let sol = solve_alpha_star(r.psk_order, 10f64.powf(-snr_db / 10.0), r.sigma_ac2)?;
    let record = SolveRecord {
        snr_db,
        alpha_star: sol.alpha_star,
        iterations: sol.iterations,
        residual: sol.residual,
        method: sol.method.name(),
    };
    Ok((sol, record))
}

fn ser_fields(rep: &SerReport) -> [CsvField; 6] {
    [
        rep.joint_ser.mean.into(),
        rep.joint_ser.stderr.into(),
        rep.alice_ser.mean.into(),
        rep.alice_ser.stderr.into(),
        rep.charlie_ser.mean.into(),
        rep.charlie_ser.stderr.into(),
    ]
}

fn ser_vs_alpha(r: &Resolved) -> Result<(Csv, Vec<SolveRecord>), CliError> {
    let mut csv = Csv::new(&[
        "experiment", "seed", "trials", "snr_db", "psk_order", "sigma_ac2", "alpha", "decoder",
        "joint_ser", "joint_stderr", "alice_ser", "alice_stderr", "charlie_ser", "charlie_stderr",
        "union_bound",
    ]);
    for &snr_db in &r.snr_db {
        for &alpha in &r.alphas {
            let params = params_for(r, alpha, snr_db)?;
            let crossover = crossover_probs(&params);
            let bound = avg_bounds(&params, &crossover)?.union_bound;
            for &decoder in &r.decoders {
                let rep = run_scfffd(&params, decoder, r.trials, r.seed);
                let mut fields: Vec<CsvField> = vec![
                    "ser-vs-alpha".into(),
                    r.seed.into(),
                    r.trials.into(),
                    snr_db.into(),
                    (r.psk_order as u64).into(),
                    r.sigma_ac2.into(),
                    alpha.into(),
                    decoder.name().into(),
                ];
                fields.extend(ser_fields(&rep));
                fields.push(bound.into());
                csv.row(&fields);
            }
        }
    }
    Ok((csv, Vec::new()))
}

fn alpha_star(r: &Resolved) -> Result<(Csv, Vec<SolveRecord>), CliError> {
    let mut csv = Csv::new(&[
        "experiment", "snr_db", "psk_order", "sigma_ac2", "alpha_star", "iterations", "residual",
        "method", "bisection_root", "newton_bisection_gap",
    ]);
    let mut records = Vec::new();
    for &snr_db in &r.snr_db {
        let (sol, record) = solve_for(r, snr_db)?;
        let bis = scfffd::bisect_alpha_star(r.psk_order, 10f64.powf(-snr_db / 10.0), r.sigma_ac2)?;
        csv.row(&[
            "alpha-star".into(),
            snr_db.into(),
            (r.psk_order as u64).into(),
            r.sigma_ac2.into(),
            sol.alpha_star.into(),
            (sol.iterations as u64).into(),
            sol.residual.into(),
            sol.method.name().into(),
            bis.into(),
            (sol.alpha_star - bis).abs().into(),
        ]);
        records.push(record);
    }
    Ok((csv, records))
}

fn ser_vs_snr(r: &Resolved) -> Result<(Csv, Vec<SolveRecord>), CliError> {
    let mut csv = Csv::new(&[
        "experiment", "seed", "trials", "snr_db", "psk_order", "sigma_ac2", "alpha",
        "alpha_source", "decoder", "joint_ser", "joint_stderr", "alice_ser", "alice_stderr",
        "charlie_ser", "charlie_stderr",
    ]);
    let mut records = Vec::new();
    for &snr_db in &r.snr_db {
        let (alpha, source) = match r.fixed_alpha {
            Some(a) => (a, "fixed"),
            None => {
                let (sol, record) = solve_for(r, snr_db)?;
                records.push(record);
                (sol.alpha_star, "alpha_star")
            }
        };
        let params = params_for(r, alpha, snr_db)?;
        for &decoder in &r.decoders {
            let rep = run_scfffd(&params, decoder, r.trials, r.seed);
            let mut fields: Vec<CsvField> = vec![
                "ser-vs-snr".into(),
                r.seed.into(),
                r.trials.into(),
                snr_db.into(),
                (r.psk_order as u64).into(),
                r.sigma_ac2.into(),
                alpha.into(),
                source.into(),
                decoder.name().into(),
            ];
            fields.extend(ser_fields(&rep));
            csv.row(&fields);
        }
    }
    Ok((csv, records))
}

fn tradeoff(r: &Resolved) -> Result<(Csv, Vec<SolveRecord>), CliError> {
    let mut csv = Csv::new(&[
        "experiment", "seed", "trials", "snr_db", "psk_order", "sigma_ac2", "jam_power",
        "alpha_star", "link", "ser", "stderr",
    ]);
    let mut records = Vec::new();
    for &snr_db in &r.snr_db {
        let no = 10f64.powf(-snr_db / 10.0);
        let rep = run_tradeoff(r.psk_order, no, r.sigma_ac2, r.jam_power, r.trials, r.seed)?;
        records.push(SolveRecord {
            snr_db,
            alpha_star: rep.alpha_star,
            iterations: 0,
            residual: f64::NAN,
            method: "see alpha-star experiment",
        });
        let links: [(&'static str, &MCEstimate); 6] = [
            ("charlie_pre", &rep.charlie_pre),
            ("charlie_post", &rep.charlie_post),
            ("alice_pre_unjammed", &rep.alice_pre_unjammed),
            ("alice_pre_jammed", &rep.alice_pre_jammed),
            ("alice_post", &rep.alice_post),
            ("joint_post", &rep.joint_post),
        ];
        for (link, est) in links {
            csv.row(&[
                "tradeoff".into(),
                r.seed.into(),
                r.trials.into(),
                snr_db.into(),
                (r.psk_order as u64).into(),
                r.sigma_ac2.into(),
                r.jam_power.into(),
                rep.alpha_star.into(),
                link.into(),
                est.mean.into(),
                est.stderr.into(),
            ]);
        }
    }
    Ok((csv, records))
}

fn power_audit_experiment(r: &Resolved) -> Result<(Csv, Vec<SolveRecord>), CliError> {
    let mut csv = Csv::new(&[
        "experiment", "seed", "trials", "snr_db", "psk_order", "sigma_ac2", "alpha", "mode",
        "p_fcb_x0", "p_fcb_x0_stderr", "p_fcb_x1", "p_fcb_x1_stderr", "p_fab_x0",
        "p_fab_x0_stderr", "p_fab_x1", "p_fab_x1_stderr",
    ]);
    for &snr_db in &r.snr_db {
        for &alpha in &r.alphas {
            let params = params_for(r, alpha, snr_db)?;
            let audit = power_audit(&params, r.trials, r.genie, r.seed);
            csv.row(&[
                "power-audit".into(),
                r.seed.into(),
                r.trials.into(),
                snr_db.into(),
                (r.psk_order as u64).into(),
                r.sigma_ac2.into(),
                alpha.into(),
                if r.genie { "genie" } else { "detected" }.into(),
                audit.f_cb_given_x0.mean.into(),
                audit.f_cb_given_x0.stderr.into(),
                audit.f_cb_given_x1.mean.into(),
                audit.f_cb_given_x1.stderr.into(),
                audit.f_ab_given_x0.mean.into(),
                audit.f_ab_given_x0.stderr.into(),
                audit.f_ab_given_x1.mean.into(),
                audit.f_ab_given_x1.stderr.into(),
            ]);
        }
    }
    Ok((csv, Vec::new()))
}

fn ffhd_compare(r: &Resolved) -> Result<(Csv, Vec<SolveRecord>), CliError> {
    let mut csv = Csv::new(&[
        "experiment", "seed", "trials", "snr_db", "psk_order", "sigma_ac2", "scheme",
        "interference", "alpha", "joint_ser", "joint_stderr", "alice_ser", "alice_stderr",
        "charlie_ser", "charlie_stderr",
    ]);
    let mut records = Vec::new();
    for &snr_db in &r.snr_db {
        let no = 10f64.powf(-snr_db / 10.0);
        let (sol, record) = solve_for(r, snr_db)?;
        records.push(record);
        let params = params_for(r, sol.alpha_star, snr_db)?;

        let relay = run_scfffd(&params, DecoderKind::Jd, r.trials, r.seed);
        let mut fields: Vec<CsvField> = vec![
            "ffhd-compare".into(),
            r.seed.into(),
            r.trials.into(),
            snr_db.into(),
            (r.psk_order as u64).into(),
            r.sigma_ac2.into(),
            "scfffd_jd".into(),
            0.0.into(),
            sol.alpha_star.into(),
        ];
        fields.extend(ser_fields(&relay));
        csv.row(&fields);

        for interference in [0.0, r.interference] {
            let rep = run_ffhd(r.psk_order, no, r.sigma_ac2, interference, r.trials, r.seed);
            let mut fields: Vec<CsvField> = vec![
                "ffhd-compare".into(),
                r.seed.into(),
                r.trials.into(),
                snr_db.into(),
                (r.psk_order as u64).into(),
                r.sigma_ac2.into(),
                "ffhd".into(),
                interference.into(),
                "".into(),
            ];
            fields.extend(ser_fields(&rep));
            csv.row(&fields);
        }
    }
    Ok((csv, records))
}
