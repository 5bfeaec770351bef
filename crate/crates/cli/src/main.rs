//! Command-line front end: construction files, single-point simulation,
//! capacity tables and BLER sweeps.
//!
//! SNR values are Es/N0 in dB per receive antenna with unit-energy symbols;
//! the noise variance is `sigma^2 = 10^(-snr_db/10)`. Exit code 0 on
//! success, 2 on configuration errors.

use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use stpcm_core::construction::{
    awgn_capacity_qam, build_construction, ergodic_stream_capacity, mimo_ergodic_capacity,
};
use stpcm_core::sim::{
    emit_csv, run_point_with_construction, run_sweep, sigma_for_snr_db, write_csv, DecoderKind,
    SimConfig,
};
use stpcm_core::CodeConstruction;

#[derive(Parser)]
#[command(name = "stpcm", version, about = "Space-time polar coded modulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code construction and write it as a plain-text file.
    Construct(ConstructArgs),
    /// Simulate a single SNR point and report a one-row CSV.
    Simulate(SimulateArgs),
    /// Tabulate constrained capacities over an SNR grid.
    Capacity(CapacityArgs),
    /// Run a Monte-Carlo BLER sweep over an SNR grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ShapeArgs {
    /// Transmit antennas.
    #[arg(long = "T", value_name = "T", default_value_t = 1)]
    num_tx: usize,
    /// Receive antennas.
    #[arg(long = "M", value_name = "M", default_value_t = 1)]
    num_rx: usize,
    /// Modulation order m (2^m-ary QAM, m even).
    #[arg(long = "mod-order", default_value_t = 2)]
    mod_order: usize,
    /// Time slots N per frame (a power of two).
    #[arg(long = "slots", default_value_t = 128)]
    n_slots: usize,
    /// Code rate K/(T m N), as a fraction like 1/2 or a decimal.
    #[arg(long = "rate", default_value = "1/2", value_parser = parse_rate)]
    rate: f64,
}

impl ShapeArgs {
    fn info_bits(&self) -> usize {
        let total = (self.num_tx * self.mod_order * self.n_slots) as f64;
        (self.rate * total).round() as usize
    }
}

#[derive(Args)]
struct RunArgs {
    /// Decoder: sc or cascl.
    #[arg(long, default_value = "sc", value_parser = parse_decoder)]
    decoder: DecoderKind,
    /// List width for cascl.
    #[arg(long = "list-size", default_value_t = 32)]
    list_size: usize,
    /// CRC width per guarded component (0 disables CRC).
    #[arg(long = "crc", default_value_t = 16)]
    crc_width: u32,
    /// Global seed; all randomness derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = default pool); never changes the results.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Frame budget per SNR point.
    #[arg(long = "max-frames", default_value_t = 1_000_000)]
    max_frames: u64,
    /// Early-stop block-error target per SNR point (0 = GA analysis only).
    #[arg(long = "target-errors", default_value_t = 100)]
    target_errors: u64,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Design Es/N0 in dB (single value).
    #[arg(long, value_parser = parse_snr_grid)]
    snr: SnrGrid,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Es/N0 in dB (single value).
    #[arg(long, value_parser = parse_snr_grid)]
    snr: SnrGrid,
    /// Use a previously written construction file instead of rebuilding.
    #[arg(long)]
    construction: Option<PathBuf>,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CapacityArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Es/N0 grid in dB: a single value, or start:step:stop.
    #[arg(long, value_parser = parse_snr_grid)]
    snr: SnrGrid,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Es/N0 grid in dB: a single value, or start:step:stop.
    #[arg(long, value_parser = parse_snr_grid)]
    snr: SnrGrid,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct SnrGrid(Vec<f64>);

fn parse_rate(s: &str) -> Result<f64, String> {
    let rate = if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| format!("bad rate {s:?}"))?;
        let d: f64 = den.trim().parse().map_err(|_| format!("bad rate {s:?}"))?;
        if d == 0.0 {
            return Err("rate denominator is zero".into());
        }
        n / d
    } else {
        s.parse().map_err(|_| format!("bad rate {s:?}"))?
    };
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(format!("rate {rate} outside (0, 1]"));
    }
    Ok(rate)
}

fn parse_decoder(s: &str) -> Result<DecoderKind, String> {
    match s {
        "sc" => Ok(DecoderKind::Sc),
        "cascl" => Ok(DecoderKind::Cascl),
        other => Err(format!("unknown decoder {other:?} (expected sc or cascl)")),
    }
}

fn parse_snr_grid(s: &str) -> Result<SnrGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let parse = |tok: &str| -> Result<f64, String> {
        tok.trim()
            .parse()
            .map_err(|_| format!("bad SNR value {tok:?}"))
    };
    match parts.as_slice() {
        [single] => Ok(SnrGrid(vec![parse(single)?])),
        [start, step, stop] => {
            let (start, step, stop) = (parse(start)?, parse(step)?, parse(stop)?);
            if step <= 0.0 {
                return Err("SNR step must be positive".into());
            }
            let mut grid = Vec::new();
            let mut v = start;
            while v <= stop + 1e-9 {
                grid.push(v);
                v += step;
            }
            if grid.is_empty() {
                return Err("empty SNR grid".into());
            }
            Ok(SnrGrid(grid))
        }
        _ => Err(format!("bad SNR grid {s:?} (use a value or start:step:stop)")),
    }
}

fn single_snr(grid: &SnrGrid, what: &str) -> Result<f64, stpcm_core::Error> {
    if grid.0.len() != 1 {
        return Err(stpcm_core::Error::InvalidInput(format!(
            "{what} expects a single --snr value"
        )));
    }
    Ok(grid.0[0])
}

fn sim_config(shape: &ShapeArgs, run: &RunArgs, snrs_db: Vec<f64>) -> SimConfig {
    SimConfig {
        num_tx: shape.num_tx,
        num_rx: shape.num_rx,
        mod_order: shape.mod_order,
        n_slots: shape.n_slots,
        k: shape.info_bits(),
        snrs_db,
        decoder: run.decoder,
        list_size: run.list_size,
        crc_width: run.crc_width,
        max_frames: run.max_frames,
        target_block_errors: run.target_errors,
        seed: run.seed,
        workers: run.workers,
    }
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), stpcm_core::Error> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(stpcm_core::Error::from),
        None => {
            print!("{content}");
            std::io::stdout().flush().map_err(stpcm_core::Error::from)
        }
    }
}

fn cmd_construct(args: &ConstructArgs) -> Result<(), stpcm_core::Error> {
    let snr_db = single_snr(&args.snr, "construct")?;
    let sigma = sigma_for_snr_db(snr_db);
    let c = build_construction(
        args.shape.num_tx,
        args.shape.num_rx,
        args.shape.mod_order,
        args.shape.n_slots,
        args.shape.info_bits(),
        sigma,
    )?;
    write_output(&args.out, &c.to_text())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), stpcm_core::Error> {
    let snr_db = single_snr(&args.snr, "simulate")?;
    let config = sim_config(&args.shape, &args.run, vec![snr_db]);
    let record = match &args.construction {
        Some(path) => {
            let file = std::fs::File::open(path)?;
            let construction = CodeConstruction::from_reader(std::io::BufReader::new(file))?;
            let mut config = config;
            // The file fixes the shape; flags must agree where they matter.
            config.num_tx = construction.num_tx();
            config.num_rx = construction.num_rx();
            config.mod_order = construction.mod_order();
            config.n_slots = construction.n_slots();
            config.k = construction.k();
            run_point_with_construction(&config, snr_db, construction)?
        }
        None => run_sweep(&config)?.remove(0),
    };
    let mut buf = Vec::new();
    write_csv(&[record], &mut buf)?;
    write_output(&args.out, &String::from_utf8(buf).expect("CSV is ASCII"))
}

fn cmd_capacity(args: &CapacityArgs) -> Result<(), stpcm_core::Error> {
    let shape = &args.shape;
    let mut out = String::new();
    out.push_str("snr_db,sigma,awgn_qam");
    for k in 1..=shape.num_tx {
        out.push_str(&format!(",stream_{k}"));
    }
    out.push_str(",mimo_total\n");
    for &snr_db in &args.snr.0 {
        let sigma = sigma_for_snr_db(snr_db);
        let ig = awgn_capacity_qam(sigma, shape.mod_order)?;
        out.push_str(&format!("{snr_db:.3},{sigma:.6e},{ig:.6}"));
        for k in 1..=shape.num_tx {
            let ik = ergodic_stream_capacity(sigma, shape.mod_order, shape.num_rx, k)?;
            out.push_str(&format!(",{ik:.6}"));
        }
        let total = mimo_ergodic_capacity(sigma, shape.mod_order, shape.num_tx, shape.num_rx)?;
        out.push_str(&format!(",{total:.6}\n"));
    }
    write_output(&args.out, &out)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), stpcm_core::Error> {
    let config = sim_config(&args.shape, &args.run, args.snr.0.clone());
    let records = run_sweep(&config)?;
    match &args.out {
        Some(path) => emit_csv(&records, path),
        None => {
            let mut buf = Vec::new();
            write_csv(&records, &mut buf)?;
            print!("{}", String::from_utf8(buf).expect("CSV is ASCII"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Capacity(args) => cmd_capacity(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ stpcm_core::Error::InvalidInput(_)) | Err(err @ stpcm_core::Error::Parse(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
