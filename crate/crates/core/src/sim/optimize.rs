//! Monte Carlo search for the per-iteration scaling factors.
//!
//! Every evaluation decodes the same frames (same seed, same frame indices),
//! so two weight vectors are compared on identical noise. The search first
//! tries every constant vector from the candidate grid, then runs coordinate
//! sweeps, each time moving one entry to the grid value with the lowest
//! estimated BER among those that keep the vector non-decreasing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{simulate_point, CodeSpec, ConfigError, FrameSimulator, StopRule};
use crate::channel::ChannelParams;
use crate::decoders::{DecoderKind, DecoderOptions, DecoderSchedule};
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightOptimizationConfig {
    pub code: CodeSpec,
    pub decoder: DecoderKind,
    pub ell_max: usize,
    pub appended_ibdd: usize,
    pub options: DecoderOptions,
    /// Operating point of the BER objective.
    pub eb_n0_db: f64,
    /// Candidate values for every entry; sorted and deduplicated internally.
    pub candidates: Vec<f64>,
    /// Restrict the search to non-decreasing vectors.
    pub monotone: bool,
    pub frames_per_evaluation: u64,
    /// Upper bound on coordinate sweeps after the constant phase.
    pub max_sweeps: usize,
    /// Starting vector for the sweeps, each entry snapped to the nearest
    /// candidate. It competes with the constant vectors.
    #[serde(default)]
    pub initial: Option<Vec<f64>>,
    pub seed: u64,
    pub batch_frames: u64,
    pub workers: usize,
}

impl WeightOptimizationConfig {
    pub fn new(code: CodeSpec, decoder: DecoderKind, eb_n0_db: f64, candidates: Vec<f64>) -> Self {
        WeightOptimizationConfig {
            code,
            decoder,
            ell_max: 10,
            appended_ibdd: 2,
            options: DecoderOptions::default(),
            eb_n0_db,
            candidates,
            monotone: true,
            frames_per_evaluation: 200,
            max_sweeps: 3,
            initial: None,
            seed: 1,
            batch_frames: 16,
            workers: 0,
        }
    }
}

/// Geometric grid of `count` values from `low` to `high`.
pub fn geometric_grid(low: f64, high: f64, count: usize) -> Vec<f64> {
    super::ramp(low, high, count)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedWeights {
    pub weights: Vec<f64>,
    pub ber: f64,
    pub ber_std_error: f64,
    /// Distinct weight vectors simulated.
    pub evaluations: usize,
}

struct Evaluator<'a, F> {
    config: &'a WeightOptimizationConfig,
    pc: crate::product::ProductCode,
    params: ChannelParams,
    cache: HashMap<Vec<u64>, (f64, f64)>,
    on_evaluation: F,
}

impl<F: FnMut(&[f64], f64)> Evaluator<'_, F> {
    fn ber(&mut self, weights: &[f64]) -> f64 {
        self.estimate(weights).0
    }

    fn estimate(&mut self, weights: &[f64]) -> (f64, f64) {
        let key: Vec<u64> = weights.iter().map(|w| w.to_bits()).collect();
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let c = self.config;
        let schedule =
            DecoderSchedule::any_order(c.ell_max, c.appended_ibdd, weights.to_vec()).expect("validated candidate vector");
        let sim = FrameSimulator {
            pc: &self.pc,
            decoder: Some(c.decoder),
            schedule: &schedule,
            options: &c.options,
            params: self.params,
            seed: c.seed,
            all_zero: false,
        };
        let stop = StopRule { min_bit_errors: u64::MAX, min_frame_errors: 0, max_frames: c.frames_per_evaluation };
        let rec = simulate_point(&sim, &stop, c.batch_frames).record(c.eb_n0_db, sim.info_bits(), 0.0);
        let v = (rec.ber, rec.ber_std_error);
        (self.on_evaluation)(weights, rec.ber);
        self.cache.insert(key, v);
        v
    }
}

/// Searches the candidate grid for the weight vector with the lowest
/// estimated BER. Ties keep the earlier vector.
pub fn optimize_weights(config: &WeightOptimizationConfig) -> Result<OptimizedWeights, ConfigError> {
    optimize_weights_with(config, |_, _| {})
}

/// [`optimize_weights`] with a callback after every new evaluation.
pub fn optimize_weights_with(
    config: &WeightOptimizationConfig,
    on_evaluation: impl FnMut(&[f64], f64) + Send,
) -> Result<OptimizedWeights, ConfigError> {
    let scaled = config
        .ell_max
        .checked_sub(config.appended_ibdd)
        .ok_or_else(|| ConfigError::Invalid("appended_ibdd exceeds ell_max".into()))?;
    if !config.decoder.uses_weights() {
        return Err(ConfigError::Invalid(format!("{} has no scaling factors", config.decoder.name())));
    }
    if scaled == 0 {
        return Err(ConfigError::Invalid("no scaled iterations to optimize".into()));
    }
    if config.initial.as_ref().is_some_and(|w| w.len() != scaled) {
        return Err(ConfigError::Invalid(format!("initial vector needs {scaled} entries")));
    }
    let mut grid = config.candidates.clone();
    if grid.is_empty() || grid.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(ConfigError::Invalid("candidate grid must be non-empty and positive".into()));
    }
    if config.frames_per_evaluation == 0 || config.batch_frames == 0 {
        return Err(ConfigError::StopRule);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let pc = config.code.build()?;
    let params = ChannelParams::new(config.eb_n0_db, pc.rate())?;

    par::with_workers(config.workers, || {
        let mut ev = Evaluator { config, pc, params, cache: HashMap::new(), on_evaluation };

        let mut best = vec![grid[0]; scaled];
        let mut best_ber = ev.ber(&best);
        for &g in &grid[1..] {
            let w = vec![g; scaled];
            let b = ev.ber(&w);
            if b < best_ber {
                best = w;
                best_ber = b;
            }
        }

        if let Some(init) = &config.initial {
            let mut w: Vec<f64> = init.iter().map(|&x| nearest(&grid, x)).collect();
            if config.monotone {
                for i in 1..w.len() {
                    w[i] = w[i].max(w[i - 1]);
                }
            }
            let b = ev.ber(&w);
            if b < best_ber {
                best = w;
                best_ber = b;
            }
        }

        if grid.len() > 1 {
            for _ in 0..config.max_sweeps {
                let mut moved = false;
                for i in 0..scaled {
                    let lo = if config.monotone && i > 0 { best[i - 1] } else { f64::NEG_INFINITY };
                    let hi = if config.monotone && i + 1 < scaled { best[i + 1] } else { f64::INFINITY };
                    let current = best[i];
                    for &g in grid.iter().filter(|&&g| g >= lo && g <= hi && g != current) {
                        let mut w = best.clone();
                        w[i] = g;
                        let b = ev.ber(&w);
                        if b < best_ber {
                            best = w;
                            best_ber = b;
                            moved = true;
                        }
                    }
                }
                if !moved {
                    break;
                }
            }
        }

        let (ber, ber_std_error) = ev.estimate(&best);
        Ok(OptimizedWeights { weights: best, ber, ber_std_error, evaluations: ev.cache.len() })
    })
}

fn nearest(grid: &[f64], x: f64) -> f64 {
    grid.iter().copied().min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs())).expect("non-empty grid")
}
