//! Table-driven arithmetic in GF(2^m).
//!
//! Elements are stored in polynomial basis as the low `m` bits of a `u16`.
//! Multiplication and inversion go through log/antilog tables built once at
//! construction; the antilog table is stored twice over so that the sum of two
//! logarithms can index it without a modular reduction.

use std::ops::{Add, AddAssign};

use thiserror::Error;

/// x^4 + x + 1
pub const POLY_M4: u32 = 0b1_0011;
/// x^6 + x + 1
pub const POLY_M6: u32 = 0b100_0011;
/// x^8 + x^4 + x^3 + x^2 + 1
pub const POLY_M8: u32 = 0x11D;

const DEFAULT_POLYS: [u32; 17] = [
    0, 0, 0b111, 0b1011, POLY_M4, 0b10_0101, POLY_M6, 0b1000_1001, POLY_M8, 0x211, 0x409, 0x805,
    0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("extension degree {0} outside 2..=16")]
    InvalidDegree(u32),
    #[error("polynomial {poly:#x} does not have degree {m}")]
    DegreeMismatch { m: u32, poly: u32 },
    #[error("polynomial {poly:#x} is not primitive: x has order {order}, expected {expected}")]
    NonPrimitivePolynomial { poly: u32, order: usize, expected: usize },
    #[error("division by zero")]
    DivisionByZero,
}

/// A field element in polynomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Element(pub u16);

impl Element {
    pub const ZERO: Element = Element(0);
    pub const ONE: Element = Element(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

// characteristic 2: addition is XOR
#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for Element {
    type Output = Element;
    #[inline]
    fn add(self, rhs: Element) -> Element {
        Element(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for Element {
    #[inline]
    fn add_assign(&mut self, rhs: Element) {
        self.0 ^= rhs.0;
    }
}

/// GF(2^m) defined by a primitive polynomial.
#[derive(Debug, Clone)]
pub struct Field {
    m: u32,
    poly: u32,
    order: usize,
    log: Vec<u32>,
    // exp[i] = alpha^i for i in 0..2*order
    exp: Vec<u16>,
}

impl Field {
    /// Builds the field with the default primitive polynomial for `m`.
    pub fn with_default_polynomial(m: u32) -> Result<Self, GfError> {
        if !(2..=16).contains(&m) {
            return Err(GfError::InvalidDegree(m));
        }
        Self::new(m, DEFAULT_POLYS[m as usize])
    }

    pub fn new(m: u32, poly: u32) -> Result<Self, GfError> {
        if !(2..=16).contains(&m) {
            return Err(GfError::InvalidDegree(m));
        }
        if poly >> m != 1 {
            return Err(GfError::DegreeMismatch { m, poly });
        }
        let size = 1usize << m;
        let order = size - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u32; size];
        let mut x: u32 = 1;
        for (i, slot) in exp[..order].iter_mut().enumerate() {
            if i > 0 && x == 1 {
                return Err(GfError::NonPrimitivePolynomial { poly, order: i, expected: order });
            }
            *slot = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            // x^order != 1 cannot happen for an irreducible modulus, but a
            // reducible one can walk into a cycle that excludes 1.
            return Err(GfError::NonPrimitivePolynomial { poly, order: 0, expected: order });
        }
        for i in 0..order {
            exp[order + i] = exp[i];
        }
        Ok(Field { m, poly, order, log, exp })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_polynomial(&self) -> u32 {
        self.poly
    }

    /// Size of the multiplicative group, 2^m - 1.
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn alpha_pow(&self, e: usize) -> Element {
        Element(self.exp[e % self.order])
    }

    /// Discrete logarithm base alpha. `None` for zero.
    #[inline]
    pub fn log(&self, a: Element) -> Option<usize> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[a.0 as usize] as usize)
        }
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        if a.is_zero() || b.is_zero() {
            return Element::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Element(self.exp[s as usize])
    }

    pub fn inv(&self, a: Element) -> Result<Element, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let l = self.log[a.0 as usize] as usize;
        Ok(Element(self.exp[(self.order - l) % self.order]))
    }

    pub fn div(&self, a: Element, b: Element) -> Result<Element, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    #[inline]
    pub fn square(&self, a: Element) -> Element {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Element, e: usize) -> Element {
        if e == 0 {
            return Element::ONE;
        }
        match self.log(a) {
            None => Element::ZERO,
            Some(l) => Element(self.exp[(l * (e % self.order)) % self.order]),
        }
    }

    /// alpha^e for `e < 2 * order`, without the modular reduction.
    #[inline]
    pub(crate) fn exp_raw(&self, e: usize) -> Element {
        Element(self.exp[e])
    }

    #[inline]
    pub(crate) fn log_raw(&self, a: Element) -> usize {
        self.log[a.0 as usize] as usize
    }
}
