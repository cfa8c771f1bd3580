use super::{
    ibdd_iterations, map_outcome, scaled_combine, DecodeReport, DecoderOptions, DecoderSchedule, PhaseStats, Side,
    Tracker,
};
use crate::bch::ComponentCode;
use crate::channel::{hard_bit, hard_decision};
use crate::par;
use crate::product::{BitMatrix, LlrMatrix, ProductCode};

/// Iterative bounded distance decoding from channel hard decisions.
pub fn ibdd(pc: &ProductCode, channel_bits: &BitMatrix, ell_max: usize, opts: &DecoderOptions) -> DecodeReport {
    let code = pc.component();
    let mut tracker = Tracker::new(code, opts);
    let mut psi = channel_bits.clone();
    ibdd_iterations(code, &mut psi, ell_max, None, &mut tracker);
    tracker.finish(psi)
}

/// iBDD with a genie that turns every miscorrection into a failure.
pub fn ibdd_ideal(
    pc: &ProductCode,
    channel_bits: &BitMatrix,
    transmitted: &BitMatrix,
    ell_max: usize,
    opts: &DecoderOptions,
) -> DecodeReport {
    let code = pc.component();
    let mut tracker = Tracker::new(code, opts);
    let mut psi = channel_bits.clone();
    let transposed = transmitted.transpose();
    ibdd_iterations(code, &mut psi, ell_max, Some([transmitted, &transposed]), &mut tracker);
    tracker.finish(psi)
}

/// iBDD with scaled reliability: each BDD output is combined with the
/// channel LLR and re-sliced before it is passed on.
pub fn ibdd_sr(pc: &ProductCode, llrs: &LlrMatrix, schedule: &DecoderSchedule, opts: &DecoderOptions) -> DecodeReport {
    let code = pc.component();
    let n = code.n();
    let llr = [llrs.clone(), llrs.transpose()];
    let mut tracker = Tracker::new(code, opts);
    let mut psi = hard_decision(llrs);
    for &w in schedule.weights() {
        tracker.begin_iteration();
        for side in Side::BOTH {
            let (out, stats) = sr_phase(code, &psi, &llr[side.index()], w);
            psi = out;
            tracker.record(side, stats.failures, n, stats.attempts);
            if tracker.check(&psi) {
                return tracker.finish(psi);
            }
        }
    }
    ibdd_iterations(code, &mut psi, schedule.appended_ibdd(), None, &mut tracker);
    tracker.finish(psi)
}

/// One iBDD-SR half-iteration on the rows of `psi`; `llr` is oriented like
/// `psi`. Returns the transposed hard decisions for the other bank.
pub fn sr_phase(code: &ComponentCode, psi: &BitMatrix, llr: &LlrMatrix, w: f64) -> (BitMatrix, PhaseStats) {
    let n = psi.n();
    let mut out = BitMatrix::zeros(n);
    let failed = par::map_rows_mut(out.as_mut_slice(), n, |i, row| {
        let input = psi.row(i);
        let l = llr.row(i);
        let syn = code.compute_syndromes(input);
        match code.correct(&syn, true) {
            Some(flips) => {
                for j in 0..n {
                    let bit = input[j] ^ flips.contains(&j) as u8;
                    row[j] = hard_bit(scaled_combine(map_outcome(Some(bit)), l[j], w));
                }
                false
            }
            None => {
                for j in 0..n {
                    row[j] = hard_bit(l[j]);
                }
                true
            }
        }
    });
    let failures = failed.into_iter().filter(|&f| f).count();
    (out.transpose(), PhaseStats { failures, attempts: n })
}
