//! Scheme parameters and the rules that derive them from `(SEC, v)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accounting;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("Reed-Muller parameter v={0} outside supported range 3..=6")]
    UnsupportedV(u32),
    #[error("security level must be positive")]
    ZeroSecurity,
    #[error("component count must be positive")]
    ZeroComponents,
    #[error("inconsistent parameter set: {0}")]
    Inconsistent(String),
    #[error("unknown preset {0:?} (expected rm16, rm32 or toy8)")]
    UnknownPreset(String),
}

/// All scalar parameters of a key pair.
///
/// Each block of the transmitted vector is `ell = n + 1` coordinates wide: an
/// `n`-bit first-order Reed-Muller codeword followed by one random pad bit.
/// One coordinate per block is punctured by the private map, so the message
/// space has `m = r * n` coordinates and the input space `s = m + p + q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSet {
    pub sec: u32,
    pub v: u32,
    pub n: usize,
    pub f: usize,
    pub t: usize,
    pub r: usize,
    pub ell: usize,
    pub s: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub key_bits: u32,
}

impl ParamSet {
    /// Derives the parameter set for security level `sec` over RM(1, `v`).
    pub fn new(sec: u32, v: u32) -> Result<Self, ParamError> {
        if sec == 0 {
            return Err(ParamError::ZeroSecurity);
        }
        check_v(v)?;
        let f = codeword_count(v);
        let r = accounting::component_count(sec, f);
        Ok(Self::derive(sec, v, r))
    }

    /// Parameter set with an explicit component count; `sec` is set to the
    /// number of key bits `r` symbols can carry.
    pub fn with_components(v: u32, r: usize) -> Result<Self, ParamError> {
        check_v(v)?;
        if r == 0 {
            return Err(ParamError::ZeroComponents);
        }
        let kb = accounting::key_bits(r, codeword_count(v));
        Ok(Self::derive(kb, v, r))
    }

    fn derive(sec: u32, v: u32, r: usize) -> Self {
        let n = 1usize << v;
        let f = codeword_count(v);
        let p = r.div_ceil(2);
        let q = r / 2;
        let m = r * n;
        Self {
            sec,
            v,
            n,
            f,
            t: (1usize << (v - 2)) - 1,
            r,
            ell: n + 1,
            s: m + p + q,
            m,
            p,
            q,
            key_bits: accounting::key_bits(r, f),
        }
    }

    /// RM(16,5,8) components at SEC = 256.
    pub fn rm16() -> Self {
        Self::new(256, 4).expect("rm16 preset")
    }

    /// RM(32,6,16) components at SEC = 256.
    pub fn rm32() -> Self {
        Self::new(256, 5).expect("rm32 preset")
    }

    /// Three RM(8,4,4) components at SEC = 8; small enough for exhaustive tests.
    pub fn toy8() -> Self {
        Self::new(8, 3).expect("toy8 preset")
    }

    /// Rejects parameter sets whose derived fields disagree with their inputs
    /// (e.g. a hand-edited key file header).
    pub fn validate(&self) -> Result<(), ParamError> {
        check_v(self.v)?;
        if self.r == 0 {
            return Err(ParamError::ZeroComponents);
        }
        let expected = Self::derive(self.sec, self.v, self.r);
        if *self != expected {
            return Err(ParamError::Inconsistent(format!(
                "expected {expected:?}, found {self:?}"
            )));
        }
        if self.key_bits < self.sec {
            return Err(ParamError::Inconsistent(format!(
                "{} key bits cannot carry SEC={}",
                self.key_bits, self.sec
            )));
        }
        Ok(())
    }

    /// Whether `p^2 >= SEC`, so that the random `p x p` factor alone carries at
    /// least SEC bits. Toy sets do not meet this.
    pub fn meets_security_target(&self) -> bool {
        (self.p * self.p) as u64 >= self.sec as u64
    }

    /// Input coordinates `[j * ell, (j + 1) * ell)` of block `j`.
    pub fn input_block(&self, j: usize) -> std::ops::Range<usize> {
        j * self.ell..(j + 1) * self.ell
    }

    /// Message coordinates `[j * n, (j + 1) * n)` of block `j`.
    pub fn output_block(&self, j: usize) -> std::ops::Range<usize> {
        j * self.n..(j + 1) * self.n
    }

    /// Input coordinate of block `j`'s pad bit.
    pub fn pad_coord(&self, j: usize) -> usize {
        j * self.ell + self.n
    }

    /// Rows of the public matrix.
    pub fn public_rows(&self) -> usize {
        self.m + self.p
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SEC={} RM(1,{}) n={} f={} t={} r={} m={} p={} q={} s={}",
            self.sec, self.v, self.n, self.f, self.t, self.r, self.m, self.p, self.q, self.s
        )
    }
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Rm16,
    Rm32,
    Toy8,
}

impl Preset {
    pub fn params(self) -> ParamSet {
        match self {
            Preset::Rm16 => ParamSet::rm16(),
            Preset::Rm32 => ParamSet::rm32(),
            Preset::Toy8 => ParamSet::toy8(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Rm16 => "rm16",
            Preset::Rm32 => "rm32",
            Preset::Toy8 => "toy8",
        }
    }
}

impl FromStr for Preset {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rm16" => Ok(Preset::Rm16),
            "rm32" => Ok(Preset::Rm32),
            "toy8" => Ok(Preset::Toy8),
            other => Err(ParamError::UnknownPreset(other.to_string())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_v(v: u32) -> Result<(), ParamError> {
    if (3..=6).contains(&v) {
        Ok(())
    } else {
        Err(ParamError::UnsupportedV(v))
    }
}

/// Codewords of RM(1, v) left after dropping the all-zeros and all-ones words.
pub fn codeword_count(v: u32) -> usize {
    (1usize << (v + 1)) - 2
}
