use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use irsqr::experiment::{
    emit_results, run_experiment, write_bitmaps, write_results, NoiseMode, OutputFormat, Scenario, Sweep,
    SweepConfig,
};
use irsqr::modem::ModuleMatrix;
use irsqr::qrcodec::{qr_decode, qr_encode, EcLevel, QrSpec};

const THREADS_ENV: &str = "IRSQR_THREADS";

#[derive(Parser)]
#[command(name = "irsqr", version, about = "Simulate QR codes displayed on an intelligent reflecting surface")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bit error rate sweeps over SNR, transmit antennas or Rician factor.
    Abep(RunArgs),
    /// QR recovery and recognition sweeps over SNR or obstruction size.
    Qr {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        qr: QrArgs,
    },
    /// Encode a payload into a PBM module grid.
    Encode(EncodeArgs),
    /// Decode a PBM module grid back to its payload.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Transmit antennas (a sweep for abep_ntx).
    #[arg(long)]
    ntx: Option<Sweep>,
    #[arg(long)]
    nrx: Option<usize>,
    /// IRS elements.
    #[arg(long)]
    elements: Option<usize>,
    /// PSK orders, comma separated.
    #[arg(long = "mod", value_delimiter = ',')]
    modulations: Option<Vec<u32>>,
    #[arg(long)]
    kappa: Option<Sweep>,
    /// Average SNR in dB: `a:b:step`, a comma list, or one value.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<Sweep>,
    #[arg(long)]
    trials: Option<usize>,
    /// Minimum simulated bits per ABEP point.
    #[arg(long = "min-bits")]
    min_bits: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `target_snr` or `physical`.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<NoiseMode>,
    #[arg(long = "tx-power-dbm", allow_hyphen_values = true)]
    tx_power_dbm: Option<f64>,
    /// Block count for block reduction (defaults to N_r when N_r < L).
    #[arg(long)]
    blocks: Option<usize>,
    /// Frequency groups, each simulated on L/g elements.
    #[arg(long)]
    groups: Option<usize>,
    /// Results file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `jsonl`.
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct QrArgs {
    #[arg(long)]
    version: Option<u8>,
    #[arg(long)]
    ec: Option<EcLevel>,
    #[arg(long)]
    mask: Option<u8>,
    #[arg(long)]
    payload: Option<String>,
    /// Obstruction side in elements: `a:b:step`, a comma list, or one value.
    #[arg(long)]
    obstruction: Option<Sweep>,
    #[arg(long)]
    border: Option<usize>,
    #[arg(long)]
    pad: Option<usize>,
    /// Directory for original/recovered PBM pairs.
    #[arg(long)]
    bitmaps: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Payload text.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    payload: Option<String>,
    /// Read the payload bytes from a file.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    version: u8,
    #[arg(long, default_value_t = EcLevel::M)]
    ec: EcLevel,
    #[arg(long)]
    mask: Option<u8>,
    #[arg(long, default_value_t = 0)]
    border: usize,
    /// PBM output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// PBM file (P1).
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    border: usize,
    /// Payload output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_noise(s: &str) -> Result<NoiseMode, String> {
    match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "target_snr" => Ok(NoiseMode::TargetSnr),
        "physical" => Ok(NoiseMode::Physical),
        _ => Err(format!("unknown noise mode `{s}` (expected target_snr or physical)")),
    }
}

/// Worker cap from `IRSQR_THREADS`; unset or empty means no cap.
fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => bail!("{THREADS_ENV} must be a positive integer, got `{v}`"),
        },
        Err(_) => Ok(None),
    }
}

fn build_config(run: &RunArgs, qr: Option<&QrArgs>, default_scenario: Scenario) -> Result<SweepConfig> {
    let value: serde_json::Value = match &run.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => serde_json::Value::Object(Default::default()),
    };
    let scenario = run
        .scenario
        .or(value.get("scenario").is_none().then_some(default_scenario));
    let modulation = run.modulations.as_ref().and_then(|m| m.first().copied());
    let mut cfg = SweepConfig::from_json_value(value, scenario, modulation).context("invalid configuration")?;

    if let Some(v) = &run.ntx {
        cfg.tx = v.clone();
    }
    if let Some(v) = run.nrx {
        cfg.rx = v;
    }
    if let Some(v) = run.elements {
        cfg.elements = v;
    }
    if let Some(v) = &run.modulations {
        cfg.modulations = v.clone();
    }
    if let Some(v) = &run.kappa {
        cfg.kappa = v.clone();
    }
    if let Some(v) = &run.snr_db {
        cfg.snr_db = v.clone();
    }
    if let Some(v) = run.trials {
        cfg.trials = v;
    }
    if let Some(v) = run.min_bits {
        cfg.min_bits = v;
    }
    if let Some(v) = run.seed {
        cfg.seed = v;
    }
    if let Some(v) = run.noise {
        cfg.noise = v;
    }
    if let Some(v) = run.tx_power_dbm {
        cfg.tx_power_dbm = v;
    }
    if run.blocks.is_some() {
        cfg.blocks = run.blocks;
    }
    if run.groups.is_some() {
        cfg.groups = run.groups;
    }
    if let Some(v) = &run.out {
        cfg.output = Some(v.display().to_string());
    }
    if let Some(v) = run.format {
        cfg.format = v;
    }
    if let Some(q) = qr {
        if let Some(v) = q.version {
            cfg.qr.version = v;
        }
        if let Some(v) = q.ec {
            cfg.qr.ec = v;
        }
        if q.mask.is_some() {
            cfg.qr.mask = q.mask;
        }
        if let Some(v) = &q.payload {
            cfg.qr.payload = v.clone();
        }
        if let Some(v) = &q.obstruction {
            cfg.obstruction = v.clone();
        }
        if let Some(v) = q.border {
            cfg.qr.border = v;
        }
        if let Some(v) = q.pad {
            cfg.qr.pad = v;
        }
        if let Some(v) = &q.bitmaps {
            cfg.bitmaps = Some(v.display().to_string());
        }
    }
    cfg.validate().context("invalid configuration")?;
    Ok(cfg)
}

fn run_sweep(run: &RunArgs, qr: Option<&QrArgs>) -> Result<()> {
    let default = if qr.is_some() { Scenario::QrSnr } else { Scenario::AbepSnr };
    let cfg = build_config(run, qr, default)?;
    if cfg.scenario.is_qr() != qr.is_some() {
        let cmd = if cfg.scenario.is_qr() { "qr" } else { "abep" };
        bail!("scenario {} belongs to the `{cmd}` subcommand", cfg.scenario);
    }
    if run.print_config {
        println!("{}", cfg.to_json()?);
        return Ok(());
    }
    let outcome = run_experiment(&cfg, thread_cap()?)?;
    match &cfg.output {
        Some(path) => emit_results(&outcome.rows, cfg.format, Path::new(path))
            .with_context(|| format!("writing {path}"))?,
        None => {
            let stdout = std::io::stdout();
            write_results(&outcome.rows, cfg.format, stdout.lock())?;
        }
    }
    if let Some(dir) = &cfg.bitmaps {
        let written = write_bitmaps(Path::new(dir), &outcome.bitmaps).with_context(|| format!("writing {dir}"))?;
        eprintln!("wrote {} bitmaps to {dir}", written.len());
    }
    Ok(())
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn encode(args: &EncodeArgs) -> Result<()> {
    let payload = match (&args.payload, &args.input) {
        (Some(p), _) => p.as_bytes().to_vec(),
        (None, Some(f)) => std::fs::read(f).with_context(|| format!("reading {}", f.display()))?,
        (None, None) => bail!("give --payload or --input"),
    };
    let mut spec = QrSpec::new(args.version, args.ec)?.with_border(args.border);
    if let Some(m) = args.mask {
        spec = spec.with_mask(m)?;
    }
    let grid = qr_encode(&payload, &spec)?;
    write_output(args.out.as_deref(), grid.to_pbm().as_bytes())
}

fn decode(args: &DecodeArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let grid = ModuleMatrix::from_pbm(&text).with_context(|| format!("parsing {}", args.input.display()))?;
    let payload = qr_decode(&grid, args.border)?;
    write_output(args.out.as_deref(), &payload)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Abep(run) => run_sweep(run, None),
        Command::Qr { run, qr } => run_sweep(run, Some(qr)),
        Command::Encode(args) => encode(args),
        Command::Decode(args) => decode(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
