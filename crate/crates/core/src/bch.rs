//! Binary narrow-sense BCH and extended BCH component codes.
//!
//! Bit `j` of a word of the cyclic part is the coefficient of `x^(n'-1-j)`,
//! with `n' = 2^m - 1`. Systematic encoding therefore places the message in
//! the first `k` positions and the parity-check bits after it. For extended
//! codes the overall parity bit sits at index `n'`.
//!
//! Errors-only decoding is Berlekamp-Massey followed by a Chien search.
//! Error-erasure decoding uses the two-fill method: erased positions are set
//! to all-zeros and then all-ones, each fill is decoded errors-only, and a
//! result is accepted only if `2e + f <= d_min - 1`.

use smallvec::SmallVec;
use thiserror::Error;

use crate::gf2m::{Element, Field, GfError};

/// Largest supported designed error-correcting capability.
pub const MAX_T: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BchError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
}

/// Positions (word indices) where a word must be flipped to reach a codeword.
pub(crate) type Flips = SmallVec<[usize; 8]>;

/// Outcome of a single component decoding attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(Vec<u8>),
    Failure,
}

impl DecodeOutcome {
    pub fn is_decoded(&self) -> bool {
        matches!(self, DecodeOutcome::Decoded(_))
    }

    pub fn codeword(&self) -> Option<&[u8]> {
        match self {
            DecodeOutcome::Decoded(c) => Some(c),
            DecodeOutcome::Failure => None,
        }
    }
}

/// Odd-indexed syndromes `S_1, S_3, ..., S_{2t-1}` of a word plus its overall
/// parity. Even-indexed syndromes follow from `S_{2j} = S_j^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Syndromes {
    odd: [Element; MAX_T],
    parity: u8,
}

#[derive(Debug, Clone)]
pub struct ComponentCode {
    field: Field,
    n: usize,
    inner_len: usize,
    k: usize,
    d_min: usize,
    t: usize,
    generator: Vec<u8>,
    extended: bool,
}

impl ComponentCode {
    /// Narrow-sense BCH code of length `2^m - 1` with designed distance
    /// `2 t_design + 1`, or its extension by an overall parity bit.
    pub fn new(m: u32, t_design: usize, extended: bool) -> Result<Self, BchError> {
        Self::with_field(Field::with_default_polynomial(m)?, t_design, extended)
    }

    pub fn with_field(field: Field, t_design: usize, extended: bool) -> Result<Self, BchError> {
        if t_design == 0 || t_design > MAX_T {
            return Err(BchError::InvalidParameters(format!(
                "t_design = {t_design} outside 1..={MAX_T}"
            )));
        }
        let order = field.order();
        let inner_len = order;
        let mut covered = vec![false; order];
        // g(x), coefficients lowest degree first
        let mut g = vec![Element::ONE];
        for j in (1..2 * t_design).step_by(2) {
            let j = j % order;
            if covered[j] {
                continue;
            }
            let mut e = j;
            loop {
                covered[e] = true;
                let root = field.alpha_pow(e);
                let mut next = vec![Element::ZERO; g.len() + 1];
                for (i, &c) in g.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] += field.mul(c, root);
                }
                g = next;
                e = (2 * e) % order;
                if e == j {
                    break;
                }
            }
        }
        let generator: Vec<u8> = g
            .iter()
            .map(|c| match c.0 {
                0 | 1 => Ok(c.0 as u8),
                _ => Err(BchError::InvalidParameters("non-binary generator".into())),
            })
            .collect::<Result<_, _>>()?;
        let deg = generator.len() - 1;
        if deg >= inner_len {
            return Err(BchError::InvalidParameters(format!(
                "generator degree {deg} >= length {inner_len}"
            )));
        }
        let d_inner = 2 * t_design + 1;
        Ok(ComponentCode {
            field,
            n: inner_len + extended as usize,
            inner_len,
            k: inner_len - deg,
            d_min: d_inner + extended as usize,
            t: t_design,
            generator,
            extended,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Generator polynomial over GF(2), lowest degree first.
    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    /// Systematic encoding of `message` (length k).
    pub fn encode(&self, message: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.n];
        self.encode_into(message, &mut out);
        out
    }

    pub fn encode_into(&self, message: &[u8], out: &mut [u8]) {
        assert_eq!(message.len(), self.k, "message length must equal k");
        assert_eq!(out.len(), self.n, "output length must equal n");
        let r = self.inner_len - self.k;
        let mut rem = vec![0u8; r];
        for &b in message {
            let fb = (b & 1) ^ rem[0];
            rem.copy_within(1.., 0);
            rem[r - 1] = 0;
            if fb != 0 {
                for (i, x) in rem.iter_mut().enumerate() {
                    *x ^= self.generator[r - 1 - i];
                }
            }
        }
        out[..self.k].copy_from_slice(message);
        out[self.k..self.inner_len].copy_from_slice(&rem);
        if self.extended {
            out[self.inner_len] = out[..self.inner_len].iter().fold(0, |a, &b| a ^ b);
        }
    }

    /// All 2t syndromes `S_1..S_{2t}` of the cyclic part of `word`.
    pub fn syndromes(&self, word: &[u8]) -> Vec<Element> {
        self.expand(&self.compute_syndromes(word)).to_vec()
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        self.syndromes_clear(&self.compute_syndromes(word))
    }

    /// Errors-only bounded distance decoding up to radius t.
    pub fn bdd_decode(&self, word: &[u8]) -> DecodeOutcome {
        let syn = self.compute_syndromes(word);
        self.outcome(word, self.correct(&syn, true))
    }

    /// Error-erasure decoding; bits at erased positions are ignored.
    pub fn erasure_decode(&self, word: &[u8], erasures: &[usize]) -> DecodeOutcome {
        let syn = self.compute_syndromes(word);
        self.outcome(word, self.erasure_correct(word, &syn, erasures))
    }

    pub(crate) fn outcome(&self, word: &[u8], flips: Option<Flips>) -> DecodeOutcome {
        match flips {
            Some(f) => {
                let mut c = word.to_vec();
                for p in f {
                    c[p] ^= 1;
                }
                DecodeOutcome::Decoded(c)
            }
            None => DecodeOutcome::Failure,
        }
    }

    pub(crate) fn compute_syndromes(&self, word: &[u8]) -> Syndromes {
        assert_eq!(word.len(), self.n, "word length must equal n");
        let mut syn = Syndromes { odd: [Element::ZERO; MAX_T], parity: 0 };
        let order = self.inner_len;
        for (i, &b) in word[..self.inner_len].iter().enumerate() {
            if b != 0 {
                let e = order - 1 - i;
                let mut idx = e;
                let step = (2 * e) % order;
                for s in syn.odd[..self.t].iter_mut() {
                    *s += self.field.exp_raw(idx);
                    idx += step;
                    if idx >= order {
                        idx -= order;
                    }
                }
                syn.parity ^= 1;
            }
        }
        if self.extended {
            syn.parity ^= word[self.inner_len] & 1;
        }
        syn
    }

    #[inline]
    pub(crate) fn toggle(&self, syn: &mut Syndromes, pos: usize) {
        syn.parity ^= 1;
        if pos < self.inner_len {
            let order = self.inner_len;
            let e = order - 1 - pos;
            let mut idx = e;
            let step = (2 * e) % order;
            for s in syn.odd[..self.t].iter_mut() {
                *s += self.field.exp_raw(idx);
                idx += step;
                if idx >= order {
                    idx -= order;
                }
            }
        }
    }

    pub(crate) fn syndromes_clear(&self, syn: &Syndromes) -> bool {
        syn.odd[..self.t].iter().all(|s| s.is_zero()) && (!self.extended || syn.parity == 0)
    }

    fn expand(&self, syn: &Syndromes) -> [Element; 2 * MAX_T] {
        let mut s = [Element::ZERO; 2 * MAX_T];
        for i in 1..=2 * self.t {
            s[i - 1] = if i % 2 == 1 {
                syn.odd[i / 2]
            } else {
                self.field.square(s[i / 2 - 1])
            };
        }
        s
    }

    /// Errors-only correction from precomputed syndromes. With `use_parity`
    /// false the overall parity bit of an extended code is left alone.
    pub(crate) fn correct(&self, syn: &Syndromes, use_parity: bool) -> Option<Flips> {
        let mut flips = Flips::new();
        if syn.odd[..self.t].iter().any(|s| !s.is_zero()) {
            let s = self.expand(syn);
            let (lambda, l) = self.berlekamp_massey(&s[..2 * self.t]);
            if l > self.t || lambda[l].is_zero() {
                return None;
            }
            self.chien(&lambda[..=l], &mut flips);
            if flips.len() != l {
                return None;
            }
            // The corrected word must satisfy every odd syndrome.
            let mut check = *syn;
            for &p in &flips {
                self.toggle(&mut check, p);
            }
            if check.odd[..self.t].iter().any(|s| !s.is_zero()) {
                return None;
            }
        }
        if self.extended && use_parity {
            let parity = syn.parity ^ (flips.len() as u8 & 1);
            if parity != 0 {
                flips.push(self.inner_len);
            }
            if flips.len() > self.t {
                return None;
            }
        }
        Some(flips)
    }

    fn berlekamp_massey(&self, s: &[Element]) -> ([Element; MAX_T + 2], usize) {
        let f = &self.field;
        let mut c = [Element::ZERO; MAX_T + 2];
        let mut b = [Element::ZERO; MAX_T + 2];
        c[0] = Element::ONE;
        b[0] = Element::ONE;
        let mut l = 0usize;
        let mut shift = 1usize;
        let mut bd = Element::ONE;
        for n in 0..s.len() {
            let mut d = s[n];
            for i in 1..=l.min(n) {
                d += f.mul(c[i], s[n - i]);
            }
            if d.is_zero() {
                shift += 1;
                continue;
            }
            let coef = f.div(d, bd).expect("nonzero discrepancy base");
            let prev = c;
            for i in 0..(MAX_T + 2 - shift) {
                if !b[i].is_zero() {
                    c[i + shift] += f.mul(coef, b[i]);
                }
            }
            if 2 * l <= n {
                l = n + 1 - l;
                b = prev;
                bd = d;
                shift = 1;
            } else {
                shift += 1;
            }
            if l > self.t {
                return (c, l);
            }
        }
        (c, l)
    }

    // Word indices whose locator inverse is a root of lambda.
    fn chien(&self, lambda: &[Element], out: &mut Flips) {
        let order = self.inner_len;
        let deg = lambda.len() - 1;
        let mut terms: SmallVec<[(usize, usize); MAX_T]> = SmallVec::new();
        for (l, &c) in lambda.iter().enumerate().skip(1) {
            if !c.is_zero() {
                // exponent of lambda_l * alpha^(l * (i + 1)) at i = 0
                terms.push(((self.field.log_raw(c) + l) % order, l % order));
            }
        }
        for i in 0..order {
            let mut sum = Element::ONE;
            for (cur, step) in terms.iter_mut() {
                sum += self.field.exp_raw(*cur);
                *cur += *step;
                if *cur >= order {
                    *cur -= order;
                }
            }
            if sum.is_zero() {
                out.push(i);
                if out.len() == deg {
                    break;
                }
            }
        }
    }

    /// Two-fill error-erasure correction from the syndromes of `word`.
    /// Returned flips are relative to `word`.
    pub(crate) fn erasure_correct(
        &self,
        word: &[u8],
        base: &Syndromes,
        erasures: &[usize],
    ) -> Option<Flips> {
        let f = erasures.len();
        if f == 0 {
            return self.correct(base, true);
        }
        if f > self.d_min - 1 {
            return None;
        }
        let parity_pos = self.inner_len;
        let parity_erased = self.extended && erasures.contains(&parity_pos);
        let mut best: Option<(usize, Flips)> = None;
        for fill in [0u8, 1u8] {
            let mut syn = *base;
            let mut fill_flips = Flips::new();
            for &p in erasures {
                if parity_erased && p == parity_pos {
                    continue;
                }
                if word[p] != fill {
                    self.toggle(&mut syn, p);
                    fill_flips.push(p);
                }
            }
            let Some(corr) = self.correct(&syn, !parity_erased) else {
                continue;
            };
            let mut flips = symmetric_difference(&fill_flips, &corr);
            if parity_erased {
                flips.retain(|p| *p != parity_pos);
                let inner_parity = base.parity ^ word[parity_pos] ^ (flips.len() as u8 & 1);
                if word[parity_pos] != inner_parity {
                    flips.push(parity_pos);
                }
            }
            let e = flips.iter().filter(|p| !erasures.contains(p)).count();
            if 2 * e + f > self.d_min - 1 {
                continue;
            }
            if best.as_ref().is_none_or(|(be, _)| e < *be) {
                best = Some((e, flips));
            }
        }
        best.map(|(_, flips)| flips)
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Flips {
    let mut out: Flips = a.iter().copied().filter(|x| !b.contains(x)).collect();
    out.extend(b.iter().copied().filter(|x| !a.contains(x)));
    out
}
