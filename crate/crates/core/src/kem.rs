//! Encapsulation and decapsulation.
//!
//! Bob sends `m = P (c + e1 + r1) + e2 + r2`. `c` concatenates one labeled
//! codeword plus a random pad bit per block, `e1`/`e2` are his injected
//! errors, and `r1`/`r2` are his copy of the common-randomness bits at the
//! public positions. `e2` and `r2` only ever touch the first `m` message
//! coordinates; anything in the last `p` would be spread over every block by
//! `A2` during decapsulation.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::code::{Codebook, DecodeFailure};
use crate::gf2::{BitVector, Gf2Error};
use crate::keygen::{PrivateKey, PublicKey};
use crate::params::ParamSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KemError {
    #[error("key value does not fit in {sec} bits")]
    KeyOutOfRange { sec: u32 },
    #[error("key must have {expected} symbols below {f}")]
    BadSymbols { expected: usize, f: usize },
    #[error("error budget w={w} exceeds correction capability t={t}")]
    BudgetExceedsT { w: usize, t: usize },
    #[error("common randomness has ({got1}, {got2}) bits, key expects ({want1}, {want2})")]
    CrLength {
        want1: usize,
        want2: usize,
        got1: usize,
        got2: usize,
    },
    #[error("ciphertext has {got} bits, expected {expected}")]
    CiphertextLength { expected: usize, got: usize },
    #[error("decoding failed in blocks {blocks:?}")]
    DecapFailure { blocks: Vec<usize> },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Little-endian radix-`f` digits of `value`. Requires `value < 2^SEC`.
pub fn key_to_symbols(value: &BigUint, params: &ParamSet) -> Result<Vec<u16>, KemError> {
    if value.bits() > params.sec as u64 {
        return Err(KemError::KeyOutOfRange { sec: params.sec });
    }
    let mut rest = value.clone();
    let mut digits = Vec::with_capacity(params.r);
    for _ in 0..params.r {
        let d = (&rest % params.f).to_u16().unwrap();
        digits.push(d);
        rest /= params.f;
    }
    debug_assert!(rest.is_zero());
    Ok(digits)
}

/// Inverse of [`key_to_symbols`].
pub fn symbols_to_key(symbols: &[u16], params: &ParamSet) -> BigUint {
    symbols.iter().rev().fold(BigUint::zero(), |acc, &d| acc * params.f + d)
}

/// A key as `r` symbols in `[0, f)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SharedKey {
    symbols: Vec<u16>,
}

impl SharedKey {
    pub fn from_value(value: &BigUint, params: &ParamSet) -> Result<Self, KemError> {
        Ok(Self {
            symbols: key_to_symbols(value, params)?,
        })
    }

    /// Any symbol tuple is accepted, including values at or above `2^SEC`.
    pub fn from_symbols(symbols: Vec<u16>, params: &ParamSet) -> Result<Self, KemError> {
        if symbols.len() != params.r || symbols.iter().any(|&s| s as usize >= params.f) {
            return Err(KemError::BadSymbols {
                expected: params.r,
                f: params.f,
            });
        }
        Ok(Self { symbols })
    }

    /// Uniform key in `[0, 2^SEC)`.
    pub fn random<R: Rng + ?Sized>(params: &ParamSet, rng: &mut R) -> Self {
        let nbytes = (params.sec as usize).div_ceil(8);
        let mut bytes: Vec<u8> = (0..nbytes).map(|_| rng.random()).collect();
        let extra = nbytes * 8 - params.sec as usize;
        if let Some(top) = bytes.last_mut() {
            *top &= 0xff >> extra;
        }
        Self::from_value(&BigUint::from_bytes_le(&bytes), params).expect("value below 2^SEC")
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    pub fn value(&self, params: &ParamSet) -> BigUint {
        symbols_to_key(&self.symbols, params)
    }

    /// Lowercase hex, most significant nibble first, zero-padded to
    /// `ceil(SEC / 4)` digits.
    pub fn to_hex(&self, params: &ParamSet) -> String {
        let width = (params.sec as usize).div_ceil(4);
        format!("{:0>width$}", self.value(params).to_str_radix(16))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub bits: BitVector,
}

/// One party's copy of the common-randomness bits at the key's public
/// positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonRandomnessView {
    pub r1: BitVector,
    pub r2: BitVector,
}

impl CommonRandomnessView {
    /// Empty view for keys without common-randomness positions.
    pub fn none() -> Self {
        Self {
            r1: BitVector::zeros(0),
            r2: BitVector::zeros(0),
        }
    }

    pub fn random<R: Rng + ?Sized>(pk: &PublicKey, rng: &mut R) -> Self {
        Self {
            r1: BitVector::random(pk.r1.len(), rng),
            r2: BitVector::random(pk.r2.len(), rng),
        }
    }

    /// Splits a flat bit string: the first `|R1|` bits go to `r1`, the next
    /// `|R2|` to `r2`.
    pub fn from_flat(bits: &BitVector, n1: usize, n2: usize) -> Result<Self, KemError> {
        if bits.len() != n1 + n2 {
            return Err(KemError::CrLength {
                want1: n1,
                want2: n2,
                got1: bits.len().min(n1),
                got2: bits.len().saturating_sub(n1),
            });
        }
        Ok(Self {
            r1: bits.slice(0, n1),
            r2: bits.slice(n1, n1 + n2),
        })
    }

    /// Copy with each bit flipped independently with probability `rate`.
    pub fn with_disagreements<R: Rng + ?Sized>(&self, rate: f64, rng: &mut R) -> Self {
        let mut out = self.clone();
        for v in [&mut out.r1, &mut out.r2] {
            for i in 0..v.len() {
                if rng.random_bool(rate) {
                    v.flip(i);
                }
            }
        }
        out
    }

    fn check(&self, r1: usize, r2: usize) -> Result<(), KemError> {
        if self.r1.len() != r1 || self.r2.len() != r2 {
            return Err(KemError::CrLength {
                want1: r1,
                want2: r2,
                got1: self.r1.len(),
                got2: self.r2.len(),
            });
        }
        Ok(())
    }
}

/// How the per-block total `w_total` is split between `e1` and `e2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BudgetSplit {
    /// `w1` uniform in `0..=w_total` independently per block.
    #[default]
    Random,
    /// All errors in `e1`.
    InputOnly,
    /// All errors in `e2`.
    MessageOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorBudget {
    pub w_total: usize,
    pub split: BudgetSplit,
}

impl ErrorBudget {
    pub fn new(w_total: usize) -> Self {
        Self {
            w_total,
            split: BudgetSplit::Random,
        }
    }

    pub fn zero() -> Self {
        Self::new(0)
    }

    fn w1<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self.split {
            BudgetSplit::Random => rng.random_range(0..=self.w_total),
            BudgetSplit::InputOnly => self.w_total,
            BudgetSplit::MessageOnly => 0,
        }
    }
}

/// Every component of one encapsulation.
#[cfg(any(test, feature = "trace"))]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncapsulationTrace {
    pub c: BitVector,
    pub e1: BitVector,
    pub e2: BitVector,
    pub r1: BitVector,
    pub r2: BitVector,
    /// `(w1_j, w2_j)` per block.
    pub weights: Vec<(usize, usize)>,
}

#[cfg_attr(not(any(test, feature = "trace")), allow(dead_code))]
struct Parts {
    c: BitVector,
    e1: BitVector,
    e2: BitVector,
    r1: BitVector,
    r2: BitVector,
    weights: Vec<(usize, usize)>,
}

/// The codeword-plus-pad vector `c` for `key` with the given pad bits.
pub fn encode_key(pk: &PublicKey, codebook: &Codebook, key: &SharedKey, pads: &BitVector) -> BitVector {
    let ps = &pk.params;
    let mut c = BitVector::zeros(ps.s);
    for (j, &sym) in key.symbols().iter().enumerate() {
        let word = codebook.word(pk.labelings[j].codeword_of(sym));
        let base = j * ps.ell;
        for x in 0..ps.n {
            if word >> x & 1 == 1 {
                c.set(base + x, true);
            }
        }
        if pads.get(j) {
            c.set(ps.pad_coord(j), true);
        }
    }
    c
}

fn encapsulate_inner<R: Rng + ?Sized>(
    pk: &PublicKey,
    key: &SharedKey,
    rng: &mut R,
    cr: &CommonRandomnessView,
    budget: ErrorBudget,
) -> Result<(Ciphertext, Parts), KemError> {
    let ps = &pk.params;
    if budget.w_total > ps.t {
        return Err(KemError::BudgetExceedsT {
            w: budget.w_total,
            t: ps.t,
        });
    }
    cr.check(pk.r1.len(), pk.r2.len())?;
    if key.symbols().len() != ps.r || key.symbols().iter().any(|&s| s as usize >= ps.f) {
        return Err(KemError::BadSymbols {
            expected: ps.r,
            f: ps.f,
        });
    }

    let codebook = pk.codebook();
    let pads = BitVector::random(ps.r, rng);
    let c = encode_key(pk, &codebook, key, &pads);

    let mut e1 = BitVector::zeros(ps.s);
    let mut e2 = BitVector::zeros(ps.public_rows());
    let mut weights = Vec::with_capacity(ps.r);
    for j in 0..ps.r {
        let w1 = budget.w1(rng);
        let w2 = budget.w_total - w1;
        for k in sample(rng, ps.ell, w1) {
            e1.set(j * ps.ell + k, true);
        }
        for k in sample(rng, ps.n, w2) {
            e2.set(j * ps.n + k, true);
        }
        weights.push((w1, w2));
    }

    let mut r1 = BitVector::zeros(ps.s);
    for (k, &pos) in pk.r1.iter().enumerate() {
        r1.set(pos as usize, cr.r1.get(k));
    }
    let mut r2 = BitVector::zeros(ps.public_rows());
    for (k, &pos) in pk.r2.iter().enumerate() {
        r2.set(pos as usize, cr.r2.get(k));
    }

    let mut x = c.xor(&e1)?;
    x.xor_assign(&r1)?;
    let mut bits = pk.p.mat_vec(&x)?;
    bits.xor_assign(&e2)?;
    bits.xor_assign(&r2)?;

    Ok((
        Ciphertext { bits },
        Parts {
            c,
            e1,
            e2,
            r1,
            r2,
            weights,
        },
    ))
}

/// Encapsulates `key` under `pk`.
pub fn encapsulate<R: Rng + ?Sized>(
    pk: &PublicKey,
    key: &SharedKey,
    rng: &mut R,
    cr: &CommonRandomnessView,
    budget: ErrorBudget,
) -> Result<Ciphertext, KemError> {
    encapsulate_inner(pk, key, rng, cr, budget).map(|(ct, _)| ct)
}

/// [`encapsulate`], also returning every masking component.
#[cfg(any(test, feature = "trace"))]
pub fn encapsulate_traced<R: Rng + ?Sized>(
    pk: &PublicKey,
    key: &SharedKey,
    rng: &mut R,
    cr: &CommonRandomnessView,
    budget: ErrorBudget,
) -> Result<(Ciphertext, EncapsulationTrace), KemError> {
    encapsulate_inner(pk, key, rng, cr, budget).map(|(ct, p)| {
        (
            ct,
            EncapsulationTrace {
                c: p.c,
                e1: p.e1,
                e2: p.e2,
                r1: p.r1,
                r2: p.r2,
                weights: p.weights,
            },
        )
    })
}

/// The first `m` coordinates of `A m_k` with Alice's mask estimate removed:
/// `u'[i] = m[i] + (A2 m_bottom)[i] + r1_hat[sigma[i]] + r2_hat[i]`.
pub fn unmask(sk: &PrivateKey, ct: &Ciphertext, cr: &CommonRandomnessView) -> Result<BitVector, KemError> {
    let ps = &sk.params;
    if ct.bits.len() != ps.public_rows() {
        return Err(KemError::CiphertextLength {
            expected: ps.public_rows(),
            got: ct.bits.len(),
        });
    }
    cr.check(sk.r1.len(), sk.r2.len())?;

    let bottom = ct.bits.slice(ps.m, ps.public_rows());
    let mut u = ct.bits.resized(ps.m);
    u.xor_assign(&sk.a2.mat_vec(&bottom)?)?;

    let mut r1_hat = BitVector::zeros(ps.s);
    for (k, &pos) in sk.r1.iter().enumerate() {
        r1_hat.set(pos as usize, cr.r1.get(k));
    }
    for (i, &src) in sk.sigma.iter().enumerate() {
        if r1_hat.get(src as usize) {
            u.flip(i);
        }
    }
    for (k, &pos) in sk.r2.iter().enumerate() {
        if cr.r2.get(k) {
            u.flip(pos as usize);
        }
    }
    Ok(u)
}

/// Outcome of decoding one block: `(symbol, distance)` or the failure.
pub type BlockOutcome = Result<(u16, u32), DecodeFailure>;

/// Decodes every block independently.
pub fn decode_blocks(
    sk: &PrivateKey,
    ct: &Ciphertext,
    cr: &CommonRandomnessView,
) -> Result<Vec<BlockOutcome>, KemError> {
    let ps = &sk.params;
    let u = unmask(sk, ct, cr)?;
    let codebook = sk.codebook();
    let mut out = Vec::with_capacity(ps.r);
    for j in 0..ps.r {
        let base = j * ps.ell;
        let mut word = 0u64;
        let mut surviving = 0u64;
        for i in ps.output_block(j) {
            let local = sk.sigma[i] as usize - base;
            if local == ps.n {
                continue; // pad
            }
            surviving |= 1 << local;
            if u.get(i) {
                word |= 1 << local;
            }
        }
        out.push(
            codebook
                .decode(word, surviving)
                .map(|d| (sk.labelings[j].symbol_of(d.index), d.distance)),
        );
    }
    Ok(out)
}

/// Recovers the key, or reports which blocks could not be decoded.
pub fn decapsulate(sk: &PrivateKey, ct: &Ciphertext, cr: &CommonRandomnessView) -> Result<SharedKey, KemError> {
    let outcomes = decode_blocks(sk, ct, cr)?;
    let failed: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter_map(|(j, o)| o.is_err().then_some(j))
        .collect();
    if !failed.is_empty() {
        return Err(KemError::DecapFailure { blocks: failed });
    }
    let symbols = outcomes.into_iter().map(|o| o.unwrap().0).collect();
    Ok(SharedKey { symbols })
}
