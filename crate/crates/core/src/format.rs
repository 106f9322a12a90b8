//! Binary encodings for keys and ciphertexts.
//!
//! All integers are little-endian.
//!
//! Key file:
//!
//! ```text
//! "RKE1" | u16 version | u32 header_len | header JSON | section*
//! section = u32 byte_len | payload
//! ```
//!
//! The header JSON is the parameter set plus a `"kind"` field (`"public"` or
//! `"private"`). Public sections: `P` (RKB1 matrix), labelings, `R1`, `R2`.
//! Private sections: `A2` (RKB1 matrix), `sigma`, punctures, labelings, `R1`,
//! `R2`. Labelings are `r * f` `u16` codeword indices; index lists are `u32`.
//!
//! Ciphertext file: `"RKC1" | u32 bit_len | packed bits (LSB-first)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::Labeling;
use crate::gf2::{BitMatrix, BitVector, Gf2Error};
use crate::kem::Ciphertext;
use crate::keygen::{PrivateKey, PublicKey};
use crate::params::ParamSet;

pub const KEY_MAGIC: &[u8; 4] = b"RKE1";
pub const CIPHERTEXT_MAGIC: &[u8; 4] = b"RKC1";
pub const KEY_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}")]
    Magic { expected: &'static str },
    #[error("unsupported key file version {0}")]
    Version(u16),
    #[error("truncated input while reading {0}")]
    Truncated(&'static str),
    #[error("expected a {expected} key, found {found}")]
    Kind { expected: KeyKind, found: KeyKind },
    #[error("header: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("invalid key: {0}")]
    Invalid(String),
    #[error("trailing bytes after last section")]
    Trailing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyKind {
    Public,
    Private,
}

impl std::fmt::Display for KeyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KeyKind::Public => "public",
            KeyKind::Private => "private",
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    kind: KeyKind,
    #[serde(flatten)]
    params: ParamSet,
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], FormatError> {
        if self.buf.len() < n {
            return Err(FormatError::Truncated(what));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn section(&mut self, what: &'static str) -> Result<&'a [u8], FormatError> {
        let len = self.u32(what)? as usize;
        self.take(len, what)
    }

    fn finish(self) -> Result<(), FormatError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(FormatError::Trailing)
        }
    }
}

fn put_section(out: &mut Vec<u8>, payload: &[u8]) {
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.extend_from_slice(payload);
}

fn u32_list(values: &[u32]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

fn parse_u32_list(bytes: &[u8], what: &'static str) -> Result<Vec<u32>, FormatError> {
    if !bytes.len().is_multiple_of(4) {
        return Err(FormatError::Truncated(what));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn labelings_bytes(labelings: &[Labeling]) -> Vec<u8> {
    labelings
        .iter()
        .flat_map(|l| l.forward().iter().flat_map(|x| x.to_le_bytes()))
        .collect()
}

fn parse_labelings(bytes: &[u8], ps: &ParamSet) -> Result<Vec<Labeling>, FormatError> {
    if bytes.len() != ps.r * ps.f * 2 {
        return Err(FormatError::Invalid(format!(
            "labeling section has {} bytes, expected {}",
            bytes.len(),
            ps.r * ps.f * 2
        )));
    }
    bytes
        .chunks_exact(ps.f * 2)
        .map(|chunk| {
            let fwd = chunk
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]))
                .collect();
            Labeling::from_forward(fwd).map_err(|e| FormatError::Invalid(e.to_string()))
        })
        .collect()
}

fn write_header(out: &mut Vec<u8>, kind: KeyKind, params: &ParamSet) {
    let json = serde_json::to_vec(&Header { kind, params: *params }).expect("header serializes");
    out.extend_from_slice(KEY_MAGIC);
    out.extend_from_slice(&KEY_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
}

fn read_header<'a>(bytes: &'a [u8], expected: KeyKind) -> Result<(ParamSet, Reader<'a>), FormatError> {
    let mut rd = Reader { buf: bytes };
    if rd.take(4, "magic")? != KEY_MAGIC {
        return Err(FormatError::Magic { expected: "RKE1" });
    }
    let version = rd.u16("version")?;
    if version != KEY_VERSION {
        return Err(FormatError::Version(version));
    }
    let len = rd.u32("header length")? as usize;
    let header: Header = serde_json::from_slice(rd.take(len, "header")?)?;
    if header.kind != expected {
        return Err(FormatError::Kind {
            expected,
            found: header.kind,
        });
    }
    header
        .params
        .validate()
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok((header.params, rd))
}

/// Reads just the kind field of a key file.
pub fn key_kind(bytes: &[u8]) -> Result<KeyKind, FormatError> {
    let mut rd = Reader { buf: bytes };
    if rd.take(4, "magic")? != KEY_MAGIC {
        return Err(FormatError::Magic { expected: "RKE1" });
    }
    rd.u16("version")?;
    let len = rd.u32("header length")? as usize;
    let header: Header = serde_json::from_slice(rd.take(len, "header")?)?;
    Ok(header.kind)
}

pub fn encode_public_key(pk: &PublicKey) -> Vec<u8> {
    let mut out = Vec::new();
    write_header(&mut out, KeyKind::Public, &pk.params);
    put_section(&mut out, &pk.p.to_bytes());
    put_section(&mut out, &labelings_bytes(&pk.labelings));
    put_section(&mut out, &u32_list(&pk.r1));
    put_section(&mut out, &u32_list(&pk.r2));
    out
}

pub fn decode_public_key(bytes: &[u8]) -> Result<PublicKey, FormatError> {
    let (params, mut rd) = read_header(bytes, KeyKind::Public)?;
    let p = BitMatrix::from_bytes(rd.section("P")?)?;
    let labelings = parse_labelings(rd.section("labelings")?, &params)?;
    let r1 = parse_u32_list(rd.section("R1")?, "R1")?;
    let r2 = parse_u32_list(rd.section("R2")?, "R2")?;
    rd.finish()?;
    let pk = PublicKey {
        params,
        p,
        labelings,
        r1,
        r2,
    };
    pk.validate().map_err(FormatError::Invalid)?;
    Ok(pk)
}

pub fn encode_private_key(sk: &PrivateKey) -> Vec<u8> {
    let mut out = Vec::new();
    write_header(&mut out, KeyKind::Private, &sk.params);
    put_section(&mut out, &sk.a2.to_bytes());
    put_section(&mut out, &u32_list(&sk.sigma));
    put_section(&mut out, &u32_list(&sk.punctured));
    put_section(&mut out, &labelings_bytes(&sk.labelings));
    put_section(&mut out, &u32_list(&sk.r1));
    put_section(&mut out, &u32_list(&sk.r2));
    out
}

pub fn decode_private_key(bytes: &[u8]) -> Result<PrivateKey, FormatError> {
    let (params, mut rd) = read_header(bytes, KeyKind::Private)?;
    let a2 = BitMatrix::from_bytes(rd.section("A2")?)?;
    let sigma = parse_u32_list(rd.section("sigma")?, "sigma")?;
    let punctured = parse_u32_list(rd.section("punctured")?, "punctured")?;
    let labelings = parse_labelings(rd.section("labelings")?, &params)?;
    let r1 = parse_u32_list(rd.section("R1")?, "R1")?;
    let r2 = parse_u32_list(rd.section("R2")?, "R2")?;
    rd.finish()?;
    let sk = PrivateKey {
        params,
        a2,
        sigma,
        punctured,
        labelings,
        r1,
        r2,
    };
    sk.validate().map_err(FormatError::Invalid)?;
    Ok(sk)
}

pub fn encode_ciphertext(ct: &Ciphertext) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + ct.bits.len().div_ceil(8));
    out.extend_from_slice(CIPHERTEXT_MAGIC);
    out.extend_from_slice(&(ct.bits.len() as u32).to_le_bytes());
    out.extend_from_slice(&ct.bits.to_bytes());
    out
}

pub fn decode_ciphertext(bytes: &[u8]) -> Result<Ciphertext, FormatError> {
    let mut rd = Reader { buf: bytes };
    if rd.take(4, "magic")? != CIPHERTEXT_MAGIC {
        return Err(FormatError::Magic { expected: "RKC1" });
    }
    let len = rd.u32("bit length")? as usize;
    let bits = BitVector::from_bytes(len, rd.take(len.div_ceil(8), "ciphertext bits")?)?;
    rd.finish()?;
    Ok(Ciphertext { bits })
}

/// Parses a text bit string: `0`/`1` characters, whitespace ignored.
pub fn parse_bit_text(text: &str) -> Result<BitVector, FormatError> {
    let mut v = BitVector::zeros(0);
    for ch in text.chars() {
        match ch {
            '0' => v.push(false),
            '1' => v.push(true),
            c if c.is_whitespace() => {}
            c => return Err(FormatError::Invalid(format!("unexpected character {c:?} in bit file"))),
        }
    }
    Ok(v)
}
