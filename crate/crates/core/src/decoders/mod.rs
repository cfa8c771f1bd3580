//! Iterative decoders for product codes.
//!
//! Every decoder alternates a row phase and a column phase. A phase decodes
//! the n components of one bank independently and hands the other bank a
//! message whose rows are the receiving bank's components, so each phase ends
//! with a transpose. Row phases come first.
//!
//! * [`ibdd`] and [`ibdd_ideal`]: bounded distance decoding, hard messages.
//! * [`ibdd_sr`]: BDD outputs combined with the channel LLRs by a scaling
//!   factor and re-sliced; still hard messages.
//! * [`bmp_gmdd`]: GMDD components with a Hamming-distance final stage;
//!   messages are hard decisions plus a short list of least reliable
//!   positions per component.
//! * [`igmdd_sr`]: GMDD components with a generalized-distance final stage;
//!   messages are soft.
//!
//! The scaled decoders finish with a few plain iBDD iterations that continue
//! from the evolved hard decisions.

mod bmp;
mod ibdd;
mod igmdd;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bch::ComponentCode;
use crate::par;
use crate::product::{BitMatrix, LlrMatrix, ProductCode};

pub use bmp::{bmp_gmdd, bmp_phase, BinaryMessage};
pub use ibdd::{ibdd, ibdd_ideal, ibdd_sr, sr_phase};
pub use igmdd::{igmdd_sr, soft_phase};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("appended iBDD iterations ({appended}) exceed ell_max ({ell_max})")]
    TooManyAppended { ell_max: usize, appended: usize },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weights must be positive and finite")]
    NonPositiveWeight,
    #[error("weights must be non-decreasing")]
    NotMonotone,
}

/// Iteration budget and per-iteration scaling factors. The last
/// `appended_ibdd` of the `ell_max` iterations are plain iBDD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderSchedule {
    ell_max: usize,
    appended_ibdd: usize,
    weights: Vec<f64>,
}

impl DecoderSchedule {
    pub fn new(ell_max: usize, appended_ibdd: usize, weights: Vec<f64>) -> Result<Self, ScheduleError> {
        let s = Self::any_order(ell_max, appended_ibdd, weights)?;
        if s.weights.windows(2).any(|p| p[1] < p[0]) {
            return Err(ScheduleError::NotMonotone);
        }
        Ok(s)
    }

    /// Like [`DecoderSchedule::new`] but accepts decreasing weights.
    pub fn any_order(ell_max: usize, appended_ibdd: usize, weights: Vec<f64>) -> Result<Self, ScheduleError> {
        if appended_ibdd > ell_max {
            return Err(ScheduleError::TooManyAppended { ell_max, appended: appended_ibdd });
        }
        if weights.len() != ell_max - appended_ibdd {
            return Err(ScheduleError::WeightCount {
                expected: ell_max - appended_ibdd,
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(ScheduleError::NonPositiveWeight);
        }
        Ok(DecoderSchedule { ell_max, appended_ibdd, weights })
    }

    /// A schedule of `ell_max` plain iBDD iterations.
    pub fn ibdd_only(ell_max: usize) -> Self {
        DecoderSchedule { ell_max, appended_ibdd: ell_max, weights: Vec::new() }
    }

    /// `scaled` iterations that all use weight `w`, then `appended` iBDD.
    pub fn constant(scaled: usize, appended: usize, w: f64) -> Result<Self, ScheduleError> {
        Self::new(scaled + appended, appended, vec![w; scaled])
    }

    pub fn ell_max(&self) -> usize {
        self.ell_max
    }

    pub fn appended_ibdd(&self) -> usize {
        self.appended_ibdd
    }

    pub fn scaled_iterations(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Multiplies every weight by `c > 0`.
    pub fn scaled_by(&self, c: f64) -> Result<Self, ScheduleError> {
        Self::new(self.ell_max, self.appended_ibdd, self.weights.iter().map(|w| w * c).collect())
    }
}

/// Which magnitudes normalize the generalized-distance reliabilities in
/// iGMDD-SR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSource {
    /// The incoming soft message of the component.
    #[default]
    Combined,
    /// The channel LLRs of the component.
    Channel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderOptions {
    /// Stop as soon as the hard decisions form a product codeword.
    pub early_exit: bool,
    pub alpha_source: AlphaSource,
}

impl Default for DecoderOptions {
    fn default() -> Self {
        DecoderOptions { early_exit: true, alpha_source: AlphaSource::Combined }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStats {
    pub row_failures: usize,
    pub column_failures: usize,
    /// Component decoder invocations (BDD or GMDD calls).
    pub component_decodes: usize,
    /// Algebraic decoding attempts, t + 1 per GMDD call.
    pub component_attempts: usize,
}

/// Counts from one half-iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub failures: usize,
    /// Algebraic decoding attempts summed over the bank.
    pub attempts: usize,
}

impl PhaseStats {
    fn collect(per_row: Vec<(bool, usize)>) -> Self {
        per_row.into_iter().fold(PhaseStats::default(), |acc, (failed, attempts)| PhaseStats {
            failures: acc.failures + failed as usize,
            attempts: acc.attempts + attempts,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub final_array: BitMatrix,
    pub iterations_run: usize,
    pub converged: bool,
    pub iterations: Vec<IterationStats>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Ibdd,
    IbddIdeal,
    IbddSr,
    BmpGmdd,
    IgmddSr,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] = [
        DecoderKind::Ibdd,
        DecoderKind::IbddIdeal,
        DecoderKind::IbddSr,
        DecoderKind::BmpGmdd,
        DecoderKind::IgmddSr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Ibdd => "ibdd",
            DecoderKind::IbddIdeal => "ibdd-ideal",
            DecoderKind::IbddSr => "ibdd-sr",
            DecoderKind::BmpGmdd => "bmp-gmdd",
            DecoderKind::IgmddSr => "igmdd-sr",
        }
    }

    pub fn uses_weights(&self) -> bool {
        matches!(self, DecoderKind::IbddSr | DecoderKind::BmpGmdd | DecoderKind::IgmddSr)
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown decoder '{s}'"))
    }
}

/// Decodes one received frame. `transmitted` is consulted only by the genie
/// of ideal iBDD. Plain and ideal iBDD run all `ell_max` iterations as iBDD
/// and ignore the weights.
pub fn decode(
    kind: DecoderKind,
    pc: &ProductCode,
    llrs: &LlrMatrix,
    transmitted: &BitMatrix,
    schedule: &DecoderSchedule,
    opts: &DecoderOptions,
) -> DecodeReport {
    match kind {
        DecoderKind::Ibdd => ibdd(pc, &crate::channel::hard_decision(llrs), schedule.ell_max(), opts),
        DecoderKind::IbddIdeal => ibdd_ideal(
            pc,
            &crate::channel::hard_decision(llrs),
            transmitted,
            schedule.ell_max(),
            opts,
        ),
        DecoderKind::IbddSr => ibdd_sr(pc, llrs, schedule, opts),
        DecoderKind::BmpGmdd => bmp_gmdd(pc, llrs, schedule, opts),
        DecoderKind::IgmddSr => igmdd_sr(pc, llrs, schedule, opts),
    }
}

/// Component decoder output mapped to `{+1, -1, 0}`: `Some(bit)` for a
/// decoded bit, `None` when the component failed.
#[inline]
pub fn map_outcome(decoded_bit: Option<u8>) -> f64 {
    match decoded_bit {
        Some(0) => 1.0,
        Some(_) => -1.0,
        None => 0.0,
    }
}

/// `w * mu_bar + L`.
#[inline]
pub fn scaled_combine(mu_bar: f64, channel_llr: f64, w: f64) -> f64 {
    w * mu_bar + channel_llr
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Rows,
    Columns,
}

impl Side {
    pub(crate) const BOTH: [Side; 2] = [Side::Rows, Side::Columns];

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// Iteration bookkeeping shared by all decoders.
pub(crate) struct Tracker<'a> {
    code: &'a ComponentCode,
    early_exit: bool,
    iterations: Vec<IterationStats>,
    converged: bool,
    last_side: Side,
}

impl<'a> Tracker<'a> {
    pub(crate) fn new(code: &'a ComponentCode, opts: &DecoderOptions) -> Self {
        Tracker {
            code,
            early_exit: opts.early_exit,
            iterations: Vec::new(),
            converged: false,
            last_side: Side::Columns,
        }
    }

    pub(crate) fn begin_iteration(&mut self) {
        self.iterations.push(IterationStats::default());
    }

    pub(crate) fn record(&mut self, side: Side, failures: usize, decodes: usize, attempts: usize) {
        let it = self.iterations.last_mut().expect("phase outside an iteration");
        match side {
            Side::Rows => it.row_failures += failures,
            Side::Columns => it.column_failures += failures,
        }
        it.component_decodes += decodes;
        it.component_attempts += attempts;
        self.last_side = side;
    }

    /// Early-exit test on the hard decisions just produced.
    pub(crate) fn check(&mut self, psi: &BitMatrix) -> bool {
        if self.early_exit && is_product_codeword(self.code, psi) {
            self.converged = true;
        }
        self.converged
    }

    /// `psi` is oriented for the bank after `last_side`.
    pub(crate) fn finish(self, psi: BitMatrix) -> DecodeReport {
        let final_array = match self.last_side {
            Side::Rows => psi.transpose(),
            Side::Columns => psi,
        };
        DecodeReport {
            final_array,
            iterations_run: self.iterations.len(),
            converged: self.converged,
            iterations: self.iterations,
        }
    }
}

pub(crate) fn is_product_codeword(code: &ComponentCode, m: &BitMatrix) -> bool {
    m.rows().all(|r| code.is_codeword(r)) && m.transpose().rows().all(|r| code.is_codeword(r))
}

/// One plain BDD phase over the rows of `input`; failed components pass
/// their input through. With a genie, decoded rows that differ from the
/// genie's rows count as failures. Returns the transposed output and the
/// failure count.
pub(crate) fn bdd_phase(
    code: &ComponentCode,
    input: &BitMatrix,
    genie: Option<&BitMatrix>,
) -> (BitMatrix, usize) {
    let n = input.n();
    let mut out = input.clone();
    let failed = par::map_rows_mut(out.as_mut_slice(), n, |i, row| {
        let syn = code.compute_syndromes(row);
        let Some(flips) = code.correct(&syn, true) else {
            return true;
        };
        if let Some(truth) = genie {
            let t = truth.row(i);
            let wrong = (0..n).any(|j| (row[j] ^ flips.contains(&j) as u8) != t[j]);
            if wrong {
                return true;
            }
        }
        for p in flips {
            row[p] ^= 1;
        }
        false
    });
    (out.transpose(), failed.into_iter().filter(|&f| f).count())
}

/// Plain iBDD iterations starting from row-oriented `psi`. Returns true on
/// convergence; `psi` is left oriented for the next bank.
pub(crate) fn ibdd_iterations(
    code: &ComponentCode,
    psi: &mut BitMatrix,
    count: usize,
    genie: Option<[&BitMatrix; 2]>,
    tracker: &mut Tracker<'_>,
) -> bool {
    let n = code.n();
    for _ in 0..count {
        tracker.begin_iteration();
        for side in Side::BOTH {
            let (out, failures) = bdd_phase(code, psi, genie.map(|g| g[side.index()]));
            *psi = out;
            tracker.record(side, failures, n, n);
            if tracker.check(psi) {
                return true;
            }
        }
    }
    false
}
