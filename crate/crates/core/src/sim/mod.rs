//! Monte Carlo BER/FER simulation over the AWGN channel.
//!
//! Frame `f` draws its message from ChaCha stream `2f` and its noise from
//! stream `2f + 1` of the configured seed, at every Eb/N0 point. Frames are
//! simulated in fixed-size batches and the stop rule is checked between
//! batches, so the counts depend only on the configuration and never on the
//! number of worker threads.

mod optimize;
mod output;

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bch::{BchError, ComponentCode};
use crate::channel::{hard_decision, transmit, ChannelError, ChannelParams, RngSeed};
use crate::decoders::{decode, DecoderKind, DecoderOptions, DecoderSchedule, ScheduleError};
use crate::par;
use crate::product::{BitMatrix, ProductCode};

pub use optimize::{geometric_grid, optimize_weights, optimize_weights_with, OptimizedWeights, WeightOptimizationConfig};
pub use output::{git_describe, manifest_path, write_csv, write_manifest, RunManifest};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Code(#[from] BchError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("Eb/N0 grid is empty")]
    EmptyGrid,
    #[error("Eb/N0 grid must be strictly increasing")]
    GridNotIncreasing,
    #[error("stop rule needs max_frames >= 1 and min_bit_errors >= 1")]
    StopRule,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub m: u32,
    pub t: usize,
    pub extended: bool,
}

impl CodeSpec {
    /// The (256, 239, 6) extended BCH component.
    pub const EBCH_256_239: CodeSpec = CodeSpec { m: 8, t: 2, extended: true };

    pub fn build(&self) -> Result<ProductCode, BchError> {
        Ok(ProductCode::new(ComponentCode::new(self.m, self.t, self.extended)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    /// Keep simulating until this many bit errors...
    pub min_bit_errors: u64,
    /// ...and this many frame errors have been seen...
    pub min_frame_errors: u64,
    /// ...or this many frames have been simulated.
    pub max_frames: u64,
}

impl StopRule {
    fn satisfied(&self, acc: &Accumulator) -> bool {
        acc.frames >= self.max_frames
            || (acc.bit_errors >= self.min_bit_errors && acc.frame_errors >= self.min_frame_errors)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub code: CodeSpec,
    /// `None` transmits the information bits uncoded at rate 1.
    pub decoder: Option<DecoderKind>,
    pub ell_max: usize,
    pub appended_ibdd: usize,
    /// Defaults to [`default_weights`] when absent.
    pub weights: Option<Vec<f64>>,
    pub options: DecoderOptions,
    pub ebn0_db: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    /// Transmit the all-zero codeword instead of random messages.
    pub all_zero: bool,
    pub batch_frames: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl SweepConfig {
    /// The 8 + 2 iteration setup on the (256,239,6)^2 product code.
    pub fn reference_setup(decoder: DecoderKind, ebn0_db: Vec<f64>) -> Self {
        SweepConfig {
            code: CodeSpec::EBCH_256_239,
            decoder: Some(decoder),
            ell_max: 10,
            appended_ibdd: 2,
            weights: None,
            options: DecoderOptions::default(),
            ebn0_db,
            stop: StopRule { min_bit_errors: 100, min_frame_errors: 0, max_frames: 10_000 },
            seed: 1,
            all_zero: false,
            batch_frames: 16,
            workers: 0,
        }
    }

    pub fn schedule(&self) -> Result<DecoderSchedule, ConfigError> {
        match self.decoder {
            Some(kind) if kind.uses_weights() => {
                let scaled = self.ell_max.checked_sub(self.appended_ibdd).ok_or(
                    ScheduleError::TooManyAppended { ell_max: self.ell_max, appended: self.appended_ibdd },
                )?;
                let weights = self.weights.clone().unwrap_or_else(|| default_weights(kind, scaled));
                Ok(DecoderSchedule::new(self.ell_max, self.appended_ibdd, weights)?)
            }
            _ => Ok(DecoderSchedule::ibdd_only(self.ell_max)),
        }
    }

    pub fn validate(&self) -> Result<(ProductCode, DecoderSchedule), ConfigError> {
        let pc = self.code.build()?;
        let schedule = self.schedule()?;
        if self.ebn0_db.is_empty() {
            return Err(ConfigError::EmptyGrid);
        }
        if self.ebn0_db.windows(2).any(|p| p[1] <= p[0]) {
            return Err(ConfigError::GridNotIncreasing);
        }
        if self.stop.max_frames == 0 || self.stop.min_bit_errors == 0 {
            return Err(ConfigError::StopRule);
        }
        if self.batch_frames == 0 {
            return Err(ConfigError::Invalid("batch_frames must be positive".into()));
        }
        for &e in &self.ebn0_db {
            ChannelParams::new(e, pc.rate())?;
        }
        Ok((pc, schedule))
    }
}

/// Scaling factors tuned for the (256,239,6)^2 product code with the
/// 2/sigma^2 LLR convention and 8 scaled iterations, found with
/// `optimize-weights` near each decoder's waterfall (see `results/`).
/// Other iteration counts resample the tuned vector.
pub fn default_weights(kind: DecoderKind, scaled_iterations: usize) -> Vec<f64> {
    let tuned: [f64; 8] = match kind {
        DecoderKind::IbddSr => [4.0, 5.657, 6.727, 6.727, 8.0, 8.0, 8.0, 8.0],
        DecoderKind::BmpGmdd => [4.0, 4.0, 4.757, 5.657, 5.657, 8.0, 8.0, 8.0],
        DecoderKind::IgmddSr => [2.828, 4.757, 5.657, 5.657, 5.657, 6.727, 6.727, 6.727],
        DecoderKind::Ibdd | DecoderKind::IbddIdeal => return Vec::new(),
    };
    (0..scaled_iterations).map(|i| tuned[i * tuned.len() / scaled_iterations]).collect()
}

/// Geometric ramp from `start` to `end` over `len` entries.
pub fn ramp(start: f64, end: f64, len: usize) -> Vec<f64> {
    match len {
        0 => Vec::new(),
        1 => vec![start],
        // rounded so that e.g. 8 does not come out as 7.999999999999999
        _ => (0..len)
            .map(|i| start * (end / start).powf(i as f64 / (len - 1) as f64))
            .map(|x| (x * 1e9).round() / 1e9)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub eb_n0_db: f64,
    pub bits_simulated: u64,
    pub bit_errors: u64,
    pub frames: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    /// Standard error of the BER estimate from the per-frame spread.
    pub ber_std_error: f64,
    /// Mean decoding iterations per frame.
    pub mean_iterations: f64,
    pub wall_time: f64,
}

impl BerRecord {
    /// Counts only, without the timing field.
    pub fn counts(&self) -> (u64, u64, u64, u64) {
        (self.bits_simulated, self.bit_errors, self.frames, self.frame_errors)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Accumulator {
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
    // sum of squared per-frame bit error counts
    bit_errors_sq: f64,
    iterations: u64,
}

impl Accumulator {
    fn add(&mut self, f: &FrameResult) {
        self.frames += 1;
        self.frame_errors += (f.bit_errors > 0) as u64;
        self.bit_errors += f.bit_errors;
        self.bit_errors_sq += (f.bit_errors as f64).powi(2);
        self.iterations += f.iterations as u64;
    }

    fn record(&self, eb_n0_db: f64, bits_per_frame: u64, seconds: f64) -> BerRecord {
        let bits = self.frames * bits_per_frame;
        let ber = if bits > 0 { self.bit_errors as f64 / bits as f64 } else { 0.0 };
        let fer = if self.frames > 0 { self.frame_errors as f64 / self.frames as f64 } else { 0.0 };
        let ber_std_error = if self.frames > 1 {
            let f = self.frames as f64;
            let mean = self.bit_errors as f64 / f;
            let var = ((self.bit_errors_sq - f * mean * mean) / (f - 1.0)).max(0.0);
            (var / f).sqrt() / bits_per_frame as f64
        } else {
            0.0
        };
        BerRecord {
            eb_n0_db,
            bits_simulated: bits,
            bit_errors: self.bit_errors,
            frames: self.frames,
            frame_errors: self.frame_errors,
            ber,
            fer,
            ber_std_error,
            mean_iterations: if self.frames > 0 { self.iterations as f64 / self.frames as f64 } else { 0.0 },
            wall_time: seconds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameResult {
    pub bit_errors: u64,
    pub iterations: usize,
}

/// One fully specified simulation point: everything needed to reproduce any
/// frame from its index.
pub struct FrameSimulator<'a> {
    pub pc: &'a ProductCode,
    pub decoder: Option<DecoderKind>,
    pub schedule: &'a DecoderSchedule,
    pub options: &'a DecoderOptions,
    pub params: ChannelParams,
    pub seed: u64,
    pub all_zero: bool,
}

impl FrameSimulator<'_> {
    pub fn info_bits(&self) -> u64 {
        (self.pc.k() * self.pc.k()) as u64
    }

    pub fn message(&self, frame: u64) -> BitMatrix {
        let k = self.pc.k();
        if self.all_zero {
            return BitMatrix::zeros(k);
        }
        let mut rng = RngSeed::new(self.seed, 2 * frame).rng();
        BitMatrix::from_fn(k, |_, _| rng.random_range(0..2u8))
    }

    pub fn noise_seed(&self, frame: u64) -> RngSeed {
        RngSeed::new(self.seed, 2 * frame + 1)
    }

    pub fn run(&self, frame: u64) -> FrameResult {
        let msg = self.message(frame);
        match self.decoder {
            None => {
                let llrs = transmit(&msg, &self.params, self.noise_seed(frame));
                let errors = hard_decision(&llrs).xor(&msg).weight() as u64;
                FrameResult { bit_errors: errors, iterations: 0 }
            }
            Some(kind) => {
                let c = self.pc.encode(&msg);
                let llrs = transmit(&c, &self.params, self.noise_seed(frame));
                let rep = decode(kind, self.pc, &llrs, &c, self.schedule, self.options);
                let errors = self.pc.message(&rep.final_array).xor(&msg).weight() as u64;
                FrameResult { bit_errors: errors, iterations: rep.iterations_run }
            }
        }
    }
}

fn simulate_point(sim: &FrameSimulator<'_>, stop: &StopRule, batch: u64) -> Accumulator {
    let mut acc = Accumulator::default();
    while !stop.satisfied(&acc) {
        let count = batch.min(stop.max_frames - acc.frames);
        let results = par::map_range(acc.frames..acc.frames + count, |f| sim.run(f));
        for r in &results {
            acc.add(r);
        }
    }
    acc
}

/// Simulates every grid point until its stop rule holds.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<BerRecord>, ConfigError> {
    run_sweep_with(config, |_| {})
}

/// [`run_sweep`] with a callback invoked after each finished point.
pub fn run_sweep_with(
    config: &SweepConfig,
    mut on_record: impl FnMut(&BerRecord) + Send,
) -> Result<Vec<BerRecord>, ConfigError> {
    let (pc, schedule) = config.validate()?;
    let rate = if config.decoder.is_some() { pc.rate() } else { 1.0 };
    par::with_workers(config.workers, || {
        let mut out = Vec::with_capacity(config.ebn0_db.len());
        for &eb_n0_db in &config.ebn0_db {
            let start = Instant::now();
            let sim = FrameSimulator {
                pc: &pc,
                decoder: config.decoder,
                schedule: &schedule,
                options: &config.options,
                params: ChannelParams::new(eb_n0_db, rate)?,
                seed: config.seed,
                all_zero: config.all_zero,
            };
            let acc = simulate_point(&sim, &config.stop, config.batch_frames);
            let rec = acc.record(eb_n0_db, sim.info_bits(), start.elapsed().as_secs_f64());
            on_record(&rec);
            out.push(rec);
        }
        Ok(out)
    })
}

/// Eb/N0 at which a BER curve crosses `target`, interpolating linearly in
/// log10(BER). `None` if the curve never brackets the target.
pub fn ebn0_at_ber(records: &[BerRecord], target: f64) -> Option<f64> {
    records.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.ber >= target && b.ber <= target && a.ber > 0.0 {
            if b.ber <= 0.0 {
                return None;
            }
            let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target.log10());
            if la == lb {
                return Some(a.eb_n0_db);
            }
            Some(a.eb_n0_db + (lt - la) / (lb - la) * (b.eb_n0_db - a.eb_n0_db))
        } else {
            None
        }
    })
}
