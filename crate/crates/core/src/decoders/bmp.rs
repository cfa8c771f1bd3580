use super::{
    ibdd_iterations, map_outcome, scaled_combine, DecodeReport, DecoderOptions, DecoderSchedule, PhaseStats, Side,
    Tracker,
};
use crate::bch::ComponentCode;
use crate::channel::hard_bit;
use crate::gmdd::{gmdd_candidates, GmddMetric, ReliabilityOrder};
use crate::par;
use crate::product::{LlrMatrix, Matrix, ProductCode};
use crate::product::BitMatrix;

/// Everything one decoder bank sends to the other: a hard decision per code
/// bit and, per receiving component, its `d_min - 1` least reliable
/// positions. Row `i` of `psi` and `lists[i]` belong to component `i` of the
/// receiving bank.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMessage {
    pub psi: BitMatrix,
    pub lists: Vec<ReliabilityOrder>,
}

impl BinaryMessage {
    /// The message the row bank starts from: channel hard decisions and
    /// lists ranked by channel reliability.
    pub fn from_channel(llrs: &LlrMatrix, d_min: usize) -> Self {
        BinaryMessage {
            psi: llrs.map(hard_bit),
            lists: llrs.rows().map(|r| ReliabilityOrder::from_reliabilities(r, d_min - 1)).collect(),
        }
    }

    /// Bits needed to carry this message with positions and ranks packed
    /// into fixed-width fields.
    pub fn size_bits(&self) -> usize {
        let n = self.psi.n();
        let per_list = self
            .lists
            .first()
            .map(|l| crate::analysis::list_message_bits(n, l.len() + 1))
            .unwrap_or(0);
        n * n + self.lists.len() * per_list
    }
}

/// One BMP-GMDD half-iteration: GMDD with a Hamming final stage on every
/// component of the decoding bank, scaled combination with the channel, and
/// new lists ranked by the combined reliabilities. `llr` is oriented like
/// `msg`. Returns the message for the other bank.
pub fn bmp_phase(code: &ComponentCode, msg: &BinaryMessage, llr: &LlrMatrix, w: f64) -> (BinaryMessage, PhaseStats) {
    let n = msg.psi.n();
    let mut mu = Matrix::<f64>::zeros(n);
    let per_row = par::map_rows_mut(mu.as_mut_slice(), n, |i, row| {
        let input = msg.psi.row(i);
        let l = llr.row(i);
        let set = gmdd_candidates(code, input, &msg.lists[i]);
        let failed = match set.select(input, GmddMetric::Hamming) {
            Some(c) => {
                let flips = c.flips();
                for j in 0..n {
                    let bit = input[j] ^ flips.contains(&j) as u8;
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
    let mu_t = mu.transpose();
    let lists = mu_t.rows().map(|r| ReliabilityOrder::from_reliabilities(r, code.d_min() - 1)).collect();
    let out = BinaryMessage { psi: mu_t.map(hard_bit), lists };
    (out, PhaseStats::collect(per_row))
}

/// Binary message passing decoding with GMDD components.
pub fn bmp_gmdd(pc: &ProductCode, llrs: &LlrMatrix, schedule: &DecoderSchedule, opts: &DecoderOptions) -> DecodeReport {
    let code = pc.component();
    let n = code.n();
    let llr = [llrs.clone(), llrs.transpose()];
    let mut tracker = Tracker::new(code, opts);
    let mut msg = BinaryMessage::from_channel(llrs, code.d_min());
    for &w in schedule.weights() {
        tracker.begin_iteration();
        for side in Side::BOTH {
            let (out, stats) = bmp_phase(code, &msg, &llr[side.index()], w);
            msg = out;
            tracker.record(side, stats.failures, n, stats.attempts);
            if tracker.check(&msg.psi) {
                return tracker.finish(msg.psi);
            }
        }
    }
    let mut psi = msg.psi;
    ibdd_iterations(code, &mut psi, schedule.appended_ibdd(), None, &mut tracker);
    tracker.finish(psi)
}
