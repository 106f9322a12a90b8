//! First-order Reed-Muller component codes.
//!
//! The codebook is RM(1, v) with the two constant words removed, so every
//! remaining word is balanced. Words are stored as `u64` with coordinate `x`
//! at bit `x`; `v <= 6` keeps `n = 2^v` within one word. Decoding is a brute
//! force scan over the `f <= 126` words restricted to the coordinates that
//! survived puncturing.

use rand::Rng;
use thiserror::Error;

use crate::gf2::random_perm;
use crate::params::{codeword_count, ParamError};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum DecodeFailure {
    #[error("nearest codewords tied at distance {0}")]
    Tie(u32),
    #[error("nearest codeword at distance {distance} exceeds t={t}")]
    TooFar { distance: u32, t: u32 },
    #[error("surviving coordinate mask {0:#x} is not a full or once-punctured block")]
    BadMask(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelingError {
    #[error("labeling has {got} entries, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("labeling is not a permutation of 0..{0}")]
    NotPermutation(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    v: u32,
    n: usize,
    words: Vec<u64>,
}

impl Codebook {
    /// Enumerates all affine functions `x -> <a, x> + b` and drops `a = 0`.
    pub fn new(v: u32) -> Result<Self, ParamError> {
        if !(3..=6).contains(&v) {
            return Err(ParamError::UnsupportedV(v));
        }
        let n = 1usize << v;
        let mut words = Vec::with_capacity(codeword_count(v));
        for a in 1..n as u64 {
            for b in 0..2u64 {
                let w = (0..n as u64).fold(0u64, |acc, x| {
                    let bit = ((a & x).count_ones() as u64 & 1) ^ b;
                    acc | (bit << x)
                });
                words.push(w);
            }
        }
        Ok(Self { v, n, words })
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of codewords.
    pub fn f(&self) -> usize {
        self.words.len()
    }

    /// Correctable errors after one coordinate is punctured: `2^(v-2) - 1`.
    pub fn t(&self) -> u32 {
        (1u32 << (self.v - 2)) - 1
    }

    /// Minimum distance of the unpunctured code.
    pub fn min_distance(&self) -> u32 {
        1 << (self.v - 1)
    }

    pub fn word(&self, index: usize) -> u64 {
        self.words[index]
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Mask with all `n` coordinates set.
    pub fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Minimum-distance decoding over the coordinates in `surviving`.
    ///
    /// `surviving` must contain all `n` coordinates or all but one. Bits of
    /// `word` outside `surviving` are ignored.
    pub fn decode(&self, word: u64, surviving: u64) -> Result<Decoded, DecodeFailure> {
        let full = self.full_mask();
        if surviving & !full != 0 || (surviving.count_ones() as usize) + 1 < self.n {
            return Err(DecodeFailure::BadMask(surviving));
        }
        let mut best = (u32::MAX, usize::MAX);
        let mut tied = false;
        for (i, &c) in self.words.iter().enumerate() {
            let d = ((c ^ word) & surviving).count_ones();
            if d < best.0 {
                best = (d, i);
                tied = false;
            } else if d == best.0 {
                tied = true;
            }
        }
        let (distance, index) = best;
        if tied {
            return Err(DecodeFailure::Tie(distance));
        }
        if distance > self.t() {
            return Err(DecodeFailure::TooFar { distance, t: self.t() });
        }
        Ok(Decoded { index, distance })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoded {
    pub index: usize,
    pub distance: u32,
}

/// Public bijection between key symbols and codeword indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling {
    forward: Vec<u16>,
    inverse: Vec<u16>,
}

impl Labeling {
    pub fn random<R: Rng + ?Sized>(f: usize, rng: &mut R) -> Self {
        assert!((2..=u16::MAX as usize).contains(&f));
        let forward = random_perm(f, rng).into_iter().map(|x| x as u16).collect();
        Self::from_forward(forward).expect("random_perm yields a permutation")
    }

    pub fn identity(f: usize) -> Self {
        Self::from_forward((0..f as u16).collect()).unwrap()
    }

    /// Validates that `forward` is a permutation of `0..len`.
    pub fn from_forward(forward: Vec<u16>) -> Result<Self, LabelingError> {
        let f = forward.len();
        let mut inverse = vec![u16::MAX; f];
        for (sym, &idx) in forward.iter().enumerate() {
            let slot = inverse.get_mut(idx as usize).ok_or(LabelingError::NotPermutation(f))?;
            if *slot != u16::MAX {
                return Err(LabelingError::NotPermutation(f));
            }
            *slot = sym as u16;
        }
        Ok(Self { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Codeword index carrying `symbol`.
    pub fn codeword_of(&self, symbol: u16) -> usize {
        self.forward[symbol as usize] as usize
    }

    /// Symbol carried by codeword `index`.
    pub fn symbol_of(&self, index: usize) -> u16 {
        self.inverse[index]
    }

    pub fn forward(&self) -> &[u16] {
        &self.forward
    }
}
