use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pcfec::analysis::dataflow_report;
use pcfec::channel::{hard_decision, ChannelParams};
use pcfec::decoders::{decode, AlphaSource, DecoderKind, DecoderOptions};
use pcfec::sim::{
    manifest_path, optimize_weights_with, run_sweep_with, write_csv, write_manifest, CodeSpec, FrameSimulator,
    RunManifest, StopRule, SweepConfig, WeightOptimizationConfig,
};

#[derive(Parser)]
#[command(name = "pcfec", version, about = "Product code decoding simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate BER/FER over a grid of Eb/N0 values.
    Sweep(SweepArgs),
    /// Search scaling factors minimizing the BER at one Eb/N0.
    OptimizeWeights(OptimizeArgs),
    /// Print the data flow between decoder banks.
    Dataflow(DataflowArgs),
    /// Decode one frame and print a per-iteration trace.
    Demo(DemoArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Component code as m,t,extended.
    #[arg(long, default_value = "8,2,true", value_parser = parse_code)]
    code: CodeSpec,
    /// Total decoding iterations.
    #[arg(long, default_value_t = 10)]
    iters: usize,
    /// Trailing plain iBDD iterations of the scaled decoders.
    #[arg(long, default_value_t = 2)]
    appended_ibdd: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run every iteration even after the decisions form a codeword.
    #[arg(long)]
    no_early_exit: bool,
    /// Magnitudes normalizing the generalized distance of igmdd-sr.
    #[arg(long, default_value = "combined", value_parser = parse_alpha)]
    alpha_source: AlphaSource,
    /// Worker threads (0: all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl CommonArgs {
    fn options(&self) -> DecoderOptions {
        DecoderOptions { early_exit: !self.no_early_exit, alpha_source: self.alpha_source }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// ibdd, ibdd-ideal, ibdd-sr, bmp-gmdd, igmdd-sr or uncoded.
    #[arg(long)]
    decoder: String,
    /// Comma-separated Eb/N0 values in dB, or start:step:stop.
    #[arg(long, value_parser = parse_grid)]
    ebn0_list: Grid,
    /// Comma-separated scaling factors, one per scaled iteration.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    #[arg(long, default_value_t = 0)]
    min_frame_errors: u64,
    #[arg(long, default_value_t = 10_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 16)]
    batch_frames: u64,
    /// Transmit the all-zero codeword.
    #[arg(long)]
    all_zero: bool,
    /// CSV output; the manifest goes next to it. Prints to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value = "bmp-gmdd")]
    decoder: String,
    /// Objective Eb/N0 in dB.
    #[arg(long)]
    ebn0: f64,
    /// Candidate weights: comma-separated values or geom:low:high:count.
    #[arg(long, default_value = "geom:0.5:16:11", value_parser = parse_weight_grid)]
    grid: Grid,
    #[arg(long, default_value_t = 200)]
    frames: u64,
    #[arg(long, default_value_t = 3)]
    sweeps: usize,
    /// Allow decreasing weight vectors.
    #[arg(long)]
    no_monotone: bool,
    /// Comma-separated starting vector for the coordinate sweeps.
    #[arg(long, value_delimiter = ',')]
    initial: Option<Vec<f64>>,
    #[arg(long, default_value_t = 16)]
    batch_frames: u64,
    /// JSON output path. Prints to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DataflowArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dmin: usize,
    #[arg(long, default_value_t = 4)]
    soft_bits: usize,
}

#[derive(Args)]
struct DemoArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value = "bmp-gmdd")]
    decoder: String,
    #[arg(long, default_value_t = 4.6)]
    ebn0: f64,
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Frame index within the seed's stream.
    #[arg(long, default_value_t = 0)]
    frame: u64,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_code(s: &str) -> Result<CodeSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [m, t, ext] = parts.as_slice() else {
        return Err("expected m,t,extended".into());
    };
    let m = m.parse().map_err(|e| format!("m: {e}"))?;
    let t = t.parse().map_err(|e| format!("t: {e}"))?;
    let extended = match *ext {
        "true" | "1" | "yes" | "e" => true,
        "false" | "0" | "no" => false,
        other => return Err(format!("extended: '{other}' is not a boolean")),
    };
    Ok(CodeSpec { m, t, extended })
}

fn parse_alpha(s: &str) -> Result<AlphaSource, String> {
    match s {
        "combined" => Ok(AlphaSource::Combined),
        "channel" => Ok(AlphaSource::Channel),
        _ => Err(format!("unknown alpha source '{s}'")),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"))).collect()
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => parse_list(single).map(Grid),
        [start, step, stop] => {
            let (start, step, stop): (f64, f64, f64) = (
                start.parse().map_err(|e| format!("{e}"))?,
                step.parse().map_err(|e| format!("{e}"))?,
                stop.parse().map_err(|e| format!("{e}"))?,
            );
            if step.is_nan() || step <= 0.0 {
                return Err("step must be positive".into());
            }
            let count = ((stop - start) / step + 1e-9).floor() as i64 + 1;
            // rounding keeps 4.1 from printing as 4.1000000000000005
            Ok(Grid((0..count.max(0)).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect()))
        }
        _ => Err("expected a comma list or start:step:stop".into()),
    }
}

fn parse_weight_grid(s: &str) -> Result<Grid, String> {
    if let Some(rest) = s.strip_prefix("geom:") {
        let p = parse_list(&rest.replace(':', ","))?;
        let [low, high, count] = p.as_slice() else {
            return Err("expected geom:low:high:count".into());
        };
        if *count < 1.0 || count.fract() != 0.0 {
            return Err("count must be a positive integer".into());
        }
        return Ok(Grid(pcfec::sim::geometric_grid(*low, *high, *count as usize)));
    }
    parse_list(s).map(Grid)
}

fn parse_decoder(s: &str) -> Result<Option<DecoderKind>, String> {
    if s == "uncoded" || s == "none" {
        return Ok(None);
    }
    s.parse().map(Some)
}

enum Failure {
    Config(String),
    Io(io::Error),
}

impl<E: std::error::Error> From<E> for Failure
where
    E: Into<pcfec::sim::ConfigError>,
{
    fn from(e: E) -> Self {
        Failure::Config(e.into().to_string())
    }
}

fn io_err(e: io::Error) -> Failure {
    Failure::Io(e)
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let decoder = parse_decoder(&a.decoder).map_err(Failure::Config)?;
    let config = SweepConfig {
        code: a.common.code,
        decoder,
        ell_max: a.common.iters,
        appended_ibdd: if decoder.is_some_and(|d| d.uses_weights()) { a.common.appended_ibdd } else { 0 },
        weights: a.weights,
        options: a.common.options(),
        ebn0_db: a.ebn0_list.0,
        stop: StopRule { min_bit_errors: a.min_errors, min_frame_errors: a.min_frame_errors, max_frames: a.max_frames },
        seed: a.common.seed,
        all_zero: a.all_zero,
        batch_frames: a.batch_frames,
        workers: a.common.workers,
    };
    config.validate()?;
    let label = decoder.map_or("uncoded", |d| d.name());
    let records = run_sweep_with(&config, |r| {
        eprintln!(
            "{label} {:.3} dB: frames={} bit_errors={} ber={:.3e} fer={:.3e} ({:.1}s)",
            r.eb_n0_db, r.frames, r.bit_errors, r.ber, r.fer, r.wall_time
        );
    })?;
    match &a.out {
        Some(path) => {
            write_csv(BufWriter::new(File::create(path).map_err(io_err)?), &records).map_err(io_err)?;
            let manifest = RunManifest::new("sweep", config.seed, &config);
            write_manifest(&manifest_path(path), &manifest).map_err(io_err)?;
        }
        None => write_csv(io::stdout().lock(), &records).map_err(io_err)?,
    }
    Ok(())
}

fn optimize(a: OptimizeArgs) -> Result<(), Failure> {
    let decoder = parse_decoder(&a.decoder)
        .map_err(Failure::Config)?
        .ok_or_else(|| Failure::Config("optimize-weights needs a decoder".into()))?;
    let config = WeightOptimizationConfig {
        code: a.common.code,
        decoder,
        ell_max: a.common.iters,
        appended_ibdd: a.common.appended_ibdd,
        options: a.common.options(),
        eb_n0_db: a.ebn0,
        candidates: a.grid.0,
        monotone: !a.no_monotone,
        frames_per_evaluation: a.frames,
        max_sweeps: a.sweeps,
        initial: a.initial,
        seed: a.common.seed,
        batch_frames: a.batch_frames,
        workers: a.common.workers,
    };
    let mut evaluations = 0;
    let result = optimize_weights_with(&config, |w, ber| {
        evaluations += 1;
        eprintln!("evaluation {evaluations}: ber {ber:.3e} weights {w:.3?}");
    })?;
    let manifest = RunManifest::new("optimize-weights", config.seed, &config).with_result(&result);
    match &a.out {
        Some(path) => write_manifest(path, &manifest).map_err(io_err)?,
        None => {
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &manifest).map_err(|e| io_err(e.into()))?;
            writeln!(out).map_err(io_err)?;
        }
    }
    Ok(())
}

fn dataflow(a: DataflowArgs) -> Result<(), Failure> {
    if a.n < 2 || a.dmin < 2 || a.soft_bits == 0 {
        return Err(Failure::Config("need n >= 2, dmin >= 2 and soft-bits >= 1".into()));
    }
    let r = dataflow_report(a.n, a.dmin, a.soft_bits);
    println!("{}", serde_json::to_string_pretty(&r).map_err(|e| io_err(e.into()))?);
    Ok(())
}

fn demo(a: DemoArgs) -> Result<(), Failure> {
    let kind = parse_decoder(&a.decoder)
        .map_err(Failure::Config)?
        .ok_or_else(|| Failure::Config("demo needs a decoder".into()))?;
    let config = SweepConfig {
        code: a.common.code,
        decoder: Some(kind),
        ell_max: a.common.iters,
        appended_ibdd: if kind.uses_weights() { a.common.appended_ibdd } else { 0 },
        weights: a.weights,
        options: a.common.options(),
        ebn0_db: vec![a.ebn0],
        stop: StopRule { min_bit_errors: 1, min_frame_errors: 0, max_frames: 1 },
        seed: a.common.seed,
        all_zero: false,
        batch_frames: 1,
        workers: a.common.workers,
    };
    let (pc, schedule) = config.validate()?;
    let sim = FrameSimulator {
        pc: &pc,
        decoder: Some(kind),
        schedule: &schedule,
        options: &config.options,
        params: ChannelParams::new(a.ebn0, pc.rate())?,
        seed: config.seed,
        all_zero: false,
    };
    let msg = sim.message(a.frame);
    let c = pc.encode(&msg);
    let llrs = pcfec::channel::transmit(&c, &sim.params, sim.noise_seed(a.frame));
    let channel_errors = hard_decision(&llrs).xor(&c).weight();
    println!(
        "code ({},{},{})^2  decoder {}  Eb/N0 {} dB  sigma^2 {:.4}",
        pc.n(),
        pc.k(),
        pc.component().d_min(),
        kind.name(),
        a.ebn0,
        sim.params.sigma2()
    );
    println!("weights {:?}, appended iBDD {}", schedule.weights(), schedule.appended_ibdd());
    println!("channel errors: {channel_errors} of {} code bits", pc.n() * pc.n());
    let rep = pcfec::with_workers(config.workers, || decode(kind, &pc, &llrs, &c, &schedule, &config.options));
    for (i, it) in rep.iterations.iter().enumerate() {
        println!(
            "iteration {:2}: row failures {:3}  column failures {:3}  attempts {}",
            i + 1,
            it.row_failures,
            it.column_failures,
            it.component_attempts
        );
    }
    let residual = rep.final_array.xor(&c).weight();
    let info = pc.message(&rep.final_array).xor(&msg).weight();
    println!(
        "converged: {}  residual code-bit errors: {residual}  information-bit errors: {info}",
        rep.converged
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::OptimizeWeights(a) => optimize(a),
        Command::Dataflow(a) => dataflow(a),
        Command::Demo(a) => demo(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match panic::catch_unwind(panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Config(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Io(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(_) => ExitCode::from(2),
    }
}
