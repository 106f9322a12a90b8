//! Closed-form size and work-factor accounting.
//!
//! Everything is computed in exact integer arithmetic; the logarithm is only
//! taken at the end.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::params::ParamSet;

/// McEliece `(n, k)` Goppa code used as the comparison row at SEC = 256.
pub const MCELIECE_N: u64 = 6624;
pub const MCELIECE_K: u64 = 5129;

/// `log2(x)` for an arbitrary-size positive integer.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    assert!(bits > 0, "log2 of zero");
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    // keep the top 64 bits as mantissa
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Smallest `r` with `f^r >= 2^sec`, i.e. `ceil(sec / log2 f)`.
pub fn component_count(sec: u32, f: usize) -> usize {
    assert!(f >= 2, "need at least two codewords");
    let target = BigUint::one() << sec;
    let mut power = BigUint::one();
    let mut r = 0;
    while power < target {
        power *= f;
        r += 1;
    }
    r
}

/// `floor(r * log2 f)`: the number of key bits `r` symbols over `f` values carry.
pub fn key_bits(r: usize, f: usize) -> u32 {
    let total = BigUint::from(f).pow(r as u32);
    (total.bits() - 1) as u32
}

/// Public matrix size `(m + p) * s` in bits.
pub fn public_key_bits(params: &ParamSet) -> u64 {
    (params.public_rows() * params.s) as u64
}

/// `r * log2 C(n_punct, t)`: error-position search over `r` blocks.
pub fn error_search_log2(r: usize, n_punct: u64, t: u64) -> f64 {
    assert!(t <= n_punct, "t={t} exceeds {n_punct} positions");
    r as f64 * log2_big(&binomial(n_punct, t))
}

/// `r * log2 f`: size of the set of concatenated component codewords.
pub fn codeword_search_log2(r: usize, f: usize) -> f64 {
    r as f64 * (f as f64).log2()
}

/// `log2(n! / ((n/2)! (n/2 - 1)!))`: puncture positions times distinct
/// within-block permutations of a balanced codeword.
pub fn labeling_log2(n: u64) -> f64 {
    assert!(n >= 2 && n.is_multiple_of(2), "n must be even and positive");
    let h = n / 2;
    let count = factorial(n) / (factorial(h) * factorial(h - 1));
    log2_big(&count)
}

/// Systematic generator size `k (n - k)` of an `(n, k)` code.
pub fn mceliece_pk_bits(n: u64, k: u64) -> u64 {
    assert!(k < n);
    k * (n - k)
}

/// Bits rendered in megabits, rounded to one decimal.
pub fn mbits_rounded(bits: u64) -> f64 {
    (bits as f64 / 1e5).round() / 10.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityReport {
    pub label: String,
    pub sec: u32,
    pub n: usize,
    pub k: u32,
    pub r: usize,
    pub key_bits: u32,
    pub pk_rows: usize,
    pub pk_cols: usize,
    pub pk_bits: u64,
    pub pk_mbits: f64,
    pub error_search_log2: f64,
    pub codeword_search_log2: f64,
    pub labeling_log2_per_block: f64,
    pub labeling_log2_total: f64,
    pub mceliece_pk_bits: u64,
    pub mceliece_mbits: f64,
}

impl SecurityReport {
    pub fn new(label: &str, params: &ParamSet) -> Self {
        let pk_bits = public_key_bits(params);
        let per_block = labeling_log2(params.n as u64);
        let mce = mceliece_pk_bits(MCELIECE_N, MCELIECE_K);
        Self {
            label: label.to_string(),
            sec: params.sec,
            n: params.n,
            k: params.v + 1,
            r: params.r,
            key_bits: params.key_bits,
            pk_rows: params.public_rows(),
            pk_cols: params.s,
            pk_bits,
            pk_mbits: mbits_rounded(pk_bits),
            error_search_log2: error_search_log2(params.r, params.n as u64 - 1, params.t as u64),
            codeword_search_log2: codeword_search_log2(params.r, params.f),
            labeling_log2_per_block: per_block,
            labeling_log2_total: per_block * params.r as f64,
            mceliece_pk_bits: mce,
            mceliece_mbits: mbits_rounded(mce),
        }
    }

    /// Size ratio against the McEliece row.
    pub fn size_ratio(&self) -> f64 {
        self.pk_bits as f64 / self.mceliece_pk_bits as f64
    }

    pub const CSV_HEADER: &'static str = "scheme,n,k,sec,r,key_bits,pk_rows,pk_cols,pk_bits,pk_mbits,error_search_log2,codeword_search_log2,labeling_log2_per_block,labeling_log2_total";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.1},{:.2},{:.2},{:.2},{:.2}",
            self.label,
            self.n,
            self.k,
            self.sec,
            self.r,
            self.key_bits,
            self.pk_rows,
            self.pk_cols,
            self.pk_bits,
            self.pk_mbits,
            self.error_search_log2,
            self.codeword_search_log2,
            self.labeling_log2_per_block,
            self.labeling_log2_total
        )
    }

    pub fn mceliece_csv_row(&self) -> String {
        format!(
            "mceliece,{},{},{},,,{},{},{},{:.1},,,,",
            MCELIECE_N,
            MCELIECE_K,
            self.sec,
            MCELIECE_K,
            MCELIECE_N - MCELIECE_K,
            self.mceliece_pk_bits,
            self.mceliece_mbits
        )
    }
}

/// Renders a key-size table with one McEliece comparison row followed by one
/// row per report.
pub fn render_table(reports: &[SecurityReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>5} {:>5} {:>4} {:>11} {:>12} {:>8} {:>10} {:>10} {:>10}",
        "scheme", "n", "k", "r", "shape", "pk bits", "Mbits", "err log2", "lab/blk", "lab total"
    );
    if let Some(first) = reports.first() {
        let _ = writeln!(
            out,
            "{:<10} {:>5} {:>5} {:>4} {:>11} {:>12} {:>8.1} {:>10} {:>10} {:>10}",
            "mceliece",
            MCELIECE_N,
            MCELIECE_K,
            "-",
            format!("{}x{}", MCELIECE_K, MCELIECE_N - MCELIECE_K),
            first.mceliece_pk_bits,
            first.mceliece_mbits,
            "-",
            "-",
            "-"
        );
    }
    for r in reports {
        let _ = writeln!(
            out,
            "{:<10} {:>5} {:>5} {:>4} {:>11} {:>12} {:>8.1} {:>10.2} {:>10.2} {:>10.2}",
            r.label,
            r.n,
            r.k,
            r.r,
            format!("{}x{}", r.pk_rows, r.pk_cols),
            r.pk_bits,
            r.pk_mbits,
            r.error_search_log2,
            r.labeling_log2_per_block,
            r.labeling_log2_total
        );
    }
    out
}
