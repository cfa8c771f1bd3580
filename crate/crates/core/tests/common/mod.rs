//! Oracles and randomized property suites shared by the integration tests.
#![allow(dead_code)]

pub mod invariants;

use std::sync::OnceLock;

use pcfec::bch::ComponentCode;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Generator of the (15,7,5) BCH code, bit i = coefficient of x^i.
pub const G15: u32 = 0b1_1101_0001;

/// Components used by the randomized suites: (m, t, extended).
pub const CODE_PARAMS: [(u32, usize, bool); 8] = [
    (4, 2, false),
    (4, 1, true),
    (5, 2, true),
    (5, 3, false),
    (6, 2, false),
    (6, 3, true),
    (7, 4, false),
    (8, 2, true),
];

pub fn codes() -> &'static [ComponentCode] {
    static CODES: OnceLock<Vec<ComponentCode>> = OnceLock::new();
    CODES.get_or_init(|| CODE_PARAMS.iter().map(|&(m, t, e)| ComponentCode::new(m, t, e).unwrap()).collect())
}

pub fn bch15() -> &'static ComponentCode {
    &codes()[0]
}

fn clmul(a: u32, b: u32) -> u32 {
    (0..32).filter(|i| b >> i & 1 == 1).fold(0, |acc, i| acc ^ (a << i))
}

/// All 128 codewords of BCH(15,7,5) as integers, built as m(x) * g(x)
/// independently of the library encoder. Word position j holds the
/// coefficient of x^(14 - j), so position j maps to integer bit 14 - j.
pub fn bch15_codewords() -> Vec<u32> {
    (0..128u32).map(|m| clmul(m, G15)).collect()
}

pub fn bits_to_int15(word: &[u8]) -> u32 {
    word.iter().enumerate().fold(0, |acc, (j, &b)| acc | (b as u32) << (14 - j))
}

pub fn int15_to_bits(x: u32) -> Vec<u8> {
    (0..15).map(|j| (x >> (14 - j) & 1) as u8).collect()
}

/// Nearest codeword within radius `t`, by exhaustive search.
pub fn nearest_within(codewords: &[u32], word: u32, t: u32) -> Option<u32> {
    codewords.iter().copied().find(|&c| (c ^ word).count_ones() <= t)
}

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn random_codeword(code: &ComponentCode, rng: &mut impl Rng) -> Vec<u8> {
    let msg: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
    code.encode(&msg)
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    Normal::standard().sf(x)
}
