//! Data flow between the row and column decoder banks.
//!
//! iBDD sends one hard decision per code bit, i.e. n bits per component.
//! BMP-GMDD adds an ordered list of the `d_min - 1` least reliable positions,
//! each entry carrying a position index and its rank.

use serde::{Deserialize, Serialize};

fn ceil_log2(x: usize) -> usize {
    assert!(x >= 1);
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// `(ceil(log2 n) + ceil(log2(d_min - 1))) * (d_min - 1)`.
pub fn list_message_bits(n: usize, d_min: usize) -> usize {
    assert!(n >= 2 && d_min >= 2, "need n >= 2 and d_min >= 2");
    (ceil_log2(n) + ceil_log2(d_min - 1)) * (d_min - 1)
}

/// Extra data flow of BMP-GMDD over iBDD, in percent.
pub fn overhead_percent(n: usize, d_min: usize) -> f64 {
    list_message_bits(n, d_min) as f64 / n as f64 * 100.0
}

/// Truncates (not rounds) to `decimals` places, the way printed tables
/// often quote these figures.
pub fn truncate_to(x: f64, decimals: u32) -> f64 {
    let s = 10f64.powi(decimals as i32);
    // nudge guards against 8.593 * 1000 = 8592.999...
    ((x * s) + 1e-9).floor() / s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataFlowReport {
    pub n: usize,
    pub d_min: usize,
    /// Bits per component for iBDD.
    pub hard_bits: usize,
    /// Extra bits per component for the reliability list.
    pub list_bits: usize,
    pub overhead_percent: f64,
    /// Bits per soft message; soft exchange costs this many times iBDD.
    pub soft_flow_factor: f64,
}

pub fn dataflow_report(n: usize, d_min: usize, soft_bits: usize) -> DataFlowReport {
    DataFlowReport {
        n,
        d_min,
        hard_bits: n,
        list_bits: list_message_bits(n, d_min),
        overhead_percent: overhead_percent(n, d_min),
        soft_flow_factor: soft_bits as f64,
    }
}
