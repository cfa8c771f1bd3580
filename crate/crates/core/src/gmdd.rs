//! Generalized minimum distance decoding of a single component word.
//!
//! One errors-only attempt on the received word plus one error-erasure
//! attempt per erasure size, each erasing a prefix of the reliability order.
//! Successful attempts form the candidate set; the final stage picks the
//! candidate closest to the received word under either the generalized
//! distance or the Hamming distance.

use std::cmp::Ordering;

use smallvec::SmallVec;
use thiserror::Error;

use crate::bch::{ComponentCode, DecodeOutcome, Flips};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("reliability order has {got} positions, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("position {0} repeated or out of range")]
    InvalidPosition(usize),
}

/// Erasure sizes `{d-1, d-3, ...}` down to 2 (odd `d_min`) or 3 (even).
pub fn erasure_sizes(d_min: usize) -> Vec<usize> {
    let low = if d_min % 2 == 1 { 2 } else { 3 };
    let mut out = Vec::new();
    let mut m = d_min.saturating_sub(1);
    while m >= low {
        out.push(m);
        m -= 2;
    }
    out
}

/// The least reliable positions of a word, least reliable first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReliabilityOrder {
    positions: SmallVec<[usize; 8]>,
}

impl ReliabilityOrder {
    pub fn new(positions: &[usize], n: usize, len: usize) -> Result<Self, OrderError> {
        if positions.len() != len {
            return Err(OrderError::WrongLength { got: positions.len(), expected: len });
        }
        for (i, &p) in positions.iter().enumerate() {
            if p >= n || positions[..i].contains(&p) {
                return Err(OrderError::InvalidPosition(p));
            }
        }
        Ok(ReliabilityOrder { positions: positions.into() })
    }

    /// Picks the `len` entries of smallest magnitude. Equal magnitudes rank
    /// the lower index as less reliable.
    pub fn from_reliabilities(values: &[f64], len: usize) -> Self {
        let len = len.min(values.len());
        let mut best: SmallVec<[(f64, usize); 8]> = SmallVec::with_capacity(len);
        for (i, v) in values.iter().enumerate() {
            let a = v.abs();
            if best.len() == len {
                if len == 0 || a >= best[len - 1].0 {
                    continue;
                }
                best.pop();
            }
            let at = best.iter().position(|&(b, _)| a < b).unwrap_or(best.len());
            best.insert(at, (a, i));
        }
        ReliabilityOrder { positions: best.into_iter().map(|(_, i)| i).collect() }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// `alpha_i = |L_i| / max_j |L_j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedReliabilities {
    alphas: Vec<f64>,
}

impl NormalizedReliabilities {
    pub fn from_reliabilities(values: &[f64]) -> Self {
        let mut out = NormalizedReliabilities { alphas: Vec::with_capacity(values.len()) };
        out.refill(values);
        out
    }

    pub(crate) fn refill(&mut self, values: &[f64]) {
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.alphas.clear();
        if max > 0.0 {
            self.alphas.extend(values.iter().map(|v| v.abs() / max));
        } else {
            self.alphas.resize(values.len(), 0.0);
        }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

#[derive(Debug, Clone, Copy)]
pub enum GmddMetric<'a> {
    GeneralizedDistance(&'a NormalizedReliabilities),
    Hamming,
}

pub fn generalized_distance(word: &[u8], codeword: &[u8], alphas: &NormalizedReliabilities) -> f64 {
    assert_eq!(word.len(), codeword.len());
    word.iter()
        .zip(codeword)
        .zip(&alphas.alphas)
        .map(|((r, c), a)| if r == c { 1.0 - a } else { 1.0 + a })
        .sum()
}

pub fn hamming_distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// A candidate codeword, stored as the positions where it differs from the
/// received word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    flips: Flips,
    /// Fewest erasures among the trials that produced this codeword.
    erasures: usize,
}

impl Candidate {
    pub fn flips(&self) -> &[usize] {
        &self.flips
    }

    pub fn erasures(&self) -> usize {
        self.erasures
    }

    pub fn codeword(&self, word: &[u8]) -> Vec<u8> {
        let mut c = word.to_vec();
        for &p in &self.flips {
            c[p] ^= 1;
        }
        c
    }
}

#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    candidates: SmallVec<[Candidate; 4]>,
    attempts: usize,
}

impl CandidateSet {
    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// Component decoding attempts made (always t + 1).
    pub fn attempts(&self) -> usize {
        self.attempts
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    fn insert(&mut self, mut flips: Flips, erasures: usize) {
        flips.sort_unstable();
        match self.candidates.iter_mut().find(|c| c.flips == flips) {
            Some(c) => c.erasures = c.erasures.min(erasures),
            None => self.candidates.push(Candidate { flips, erasures }),
        }
    }

    /// The metric minimizer. Ties go to fewer erasures, then to the
    /// lexicographically smaller codeword.
    pub fn select(&self, word: &[u8], metric: GmddMetric<'_>) -> Option<&Candidate> {
        let cost = |c: &Candidate| -> f64 {
            match metric {
                GmddMetric::Hamming => c.flips.len() as f64,
                // d_GD minus the candidate-independent sum of (1 - alpha_i)
                GmddMetric::GeneralizedDistance(a) => {
                    c.flips.iter().map(|&p| 2.0 * a.alphas[p]).sum()
                }
            }
        };
        self.candidates.iter().min_by(|a, b| {
            cost(a)
                .partial_cmp(&cost(b))
                .unwrap_or(Ordering::Equal)
                .then(a.erasures.cmp(&b.erasures))
                .then_with(|| lex_cmp(word, &a.flips, &b.flips))
        })
    }
}

// Compares word^a with word^b lexicographically (index 0 first).
fn lex_cmp(word: &[u8], a: &[usize], b: &[usize]) -> Ordering {
    let first = a
        .iter()
        .filter(|p| !b.contains(p))
        .chain(b.iter().filter(|p| !a.contains(p)))
        .min();
    match first {
        None => Ordering::Equal,
        Some(&p) => {
            let bit_a = word[p] ^ a.contains(&p) as u8;
            if bit_a == 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
    }
}

/// Runs the t + 1 trials and collects the distinct successful outputs.
pub fn gmdd_candidates(code: &ComponentCode, word: &[u8], order: &ReliabilityOrder) -> CandidateSet {
    assert_eq!(
        order.len(),
        code.d_min() - 1,
        "reliability order must list d_min - 1 positions"
    );
    let syn = code.compute_syndromes(word);
    let mut set = CandidateSet::default();
    set.attempts += 1;
    if let Some(f) = code.correct(&syn, true) {
        set.insert(f, 0);
    }
    for m in erasure_sizes(code.d_min()) {
        set.attempts += 1;
        if let Some(f) = code.erasure_correct(word, &syn, &order.positions[..m]) {
            set.insert(f, m);
        }
    }
    set
}

pub fn gmdd_decode(
    code: &ComponentCode,
    word: &[u8],
    order: &ReliabilityOrder,
    metric: GmddMetric<'_>,
) -> DecodeOutcome {
    let set = gmdd_candidates(code, word, order);
    match set.select(word, metric) {
        Some(c) => DecodeOutcome::Decoded(c.codeword(word)),
        None => DecodeOutcome::Failure,
    }
}
