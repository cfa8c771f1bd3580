use super::{
    ibdd_iterations, map_outcome, scaled_combine, AlphaSource, DecodeReport, DecoderOptions, DecoderSchedule,
    PhaseStats, Side, Tracker,
};
use crate::bch::ComponentCode;
use crate::channel::hard_bit;
use crate::gmdd::{gmdd_candidates, GmddMetric, NormalizedReliabilities, ReliabilityOrder};
use crate::par;
use crate::product::{LlrMatrix, Matrix, ProductCode};

/// Iterative GMDD with scaled reliability. The combined reliabilities
/// `w * mu_bar + L` themselves are passed between banks, and the GMDD final
/// stage minimizes the generalized distance.
pub fn igmdd_sr(pc: &ProductCode, llrs: &LlrMatrix, schedule: &DecoderSchedule, opts: &DecoderOptions) -> DecodeReport {
    let code = pc.component();
    let n = code.n();
    let llr = [llrs.clone(), llrs.transpose()];
    let mut tracker = Tracker::new(code, opts);
    let mut soft = llrs.clone();
    for &w in schedule.weights() {
        tracker.begin_iteration();
        for side in Side::BOTH {
            let (out, stats) = soft_phase(code, &soft, &llr[side.index()], w, opts.alpha_source);
            soft = out;
            tracker.record(side, stats.failures, n, stats.attempts);
            let psi = soft.map(hard_bit);
            if tracker.check(&psi) {
                return tracker.finish(psi);
            }
        }
    }
    let mut psi = soft.map(hard_bit);
    ibdd_iterations(code, &mut psi, schedule.appended_ibdd(), None, &mut tracker);
    tracker.finish(psi)
}

/// One iGMDD-SR half-iteration on the rows of `soft`; `llr` is oriented
/// like `soft`. Returns the transposed soft message for the other bank.
pub fn soft_phase(
    code: &ComponentCode,
    soft: &LlrMatrix,
    llr: &LlrMatrix,
    w: f64,
    alpha_source: AlphaSource,
) -> (LlrMatrix, PhaseStats) {
    let n = soft.n();
    let mut mu = Matrix::<f64>::zeros(n);
    let per_row = par::map_rows_mut(mu.as_mut_slice(), n, |i, row| {
        let v = soft.row(i);
        let l = llr.row(i);
        let hard: Vec<u8> = v.iter().map(|&x| hard_bit(x)).collect();
        let order = ReliabilityOrder::from_reliabilities(v, code.d_min() - 1);
        let alphas = NormalizedReliabilities::from_reliabilities(match alpha_source {
            AlphaSource::Combined => v,
            AlphaSource::Channel => l,
        });
        let set = gmdd_candidates(code, &hard, &order);
        let failed = match set.select(&hard, GmddMetric::GeneralizedDistance(&alphas)) {
            Some(c) => {
                let flips = c.flips();
                for j in 0..n {
                    let bit = hard[j] ^ flips.contains(&j) as u8;
                    row[j] = scaled_combine(map_outcome(Some(bit)), l[j], w);
                }
                false
            }
            None => {
                row.copy_from_slice(l);
                true
            }
        };
        (failed, set.attempts())
    });
    (mu.transpose(), PhaseStats::collect(per_row))
}
