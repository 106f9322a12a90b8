//! Exhaustive codeword-search attack at toy sizes.
//!
//! The attacker enumerates every tuple of component codewords, multiplies by
//! the public matrix and checks whether the residual against the ciphertext
//! can be explained by an error pattern within budget. Pad bits, the
//! common-randomness values at the public positions `R1`/`R2`, and which
//! coordinate was punctured are all unknown, so the attacker treats them as
//! free: a candidate is accepted if some choice of
//!
//! * pad bit and `w1_j <= w_total` input errors per block, and
//! * values at `R1`,
//!
//! leaves a residual that is zero on the last `p` message coordinates and, on
//! each message block `j` outside `R2`, has weight at most `w_total - w1_j`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf2::BitVector;
use crate::kem::{encode_key, Ciphertext, SharedKey};
use crate::keygen::PublicKey;

/// Largest codeword search space (`f^r`) the attack will enumerate.
pub const MAX_CANDIDATES: u64 = 1 << 20;
/// Largest total number of residual checks.
pub const MAX_WORK: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttackError {
    #[error("search space {0} exceeds the toy guard of 2^20 candidates")]
    TooManyCandidates(u128),
    #[error("{0} residual checks exceed the work guard")]
    TooMuchWork(u128),
    #[error("ciphertext length {got} does not match key ({expected})")]
    CiphertextLength { expected: usize, got: usize },
    #[error("budget {w} exceeds t={t}")]
    Budget { w: usize, t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackResult {
    /// Accepted symbol tuples, in enumeration order.
    pub acceptors: Vec<Vec<u16>>,
    pub candidates_tested: u64,
    pub unique: bool,
    /// The single acceptor, when there is exactly one.
    pub recovered_symbols: Option<Vec<u16>>,
}

struct Explanation {
    /// `P x` for one per-block input perturbation.
    image: BitVector,
    w1: usize,
}

fn symbols_of(mut index: u64, r: usize, f: usize) -> Vec<u16> {
    (0..r)
        .map(|_| {
            let d = (index % f as u64) as u16;
            index /= f as u64;
            d
        })
        .collect()
}

/// Runs the attack against `ct` assuming Bob used at most `w_total` errors
/// per block.
pub fn exhaustive_attack(pk: &PublicKey, ct: &Ciphertext, w_total: usize) -> Result<AttackResult, AttackError> {
    let ps = &pk.params;
    if ct.bits.len() != ps.public_rows() {
        return Err(AttackError::CiphertextLength {
            expected: ps.public_rows(),
            got: ct.bits.len(),
        });
    }
    if w_total > ps.t {
        return Err(AttackError::Budget { w: w_total, t: ps.t });
    }
    let candidates = (ps.f as u128).pow(ps.r as u32);
    if candidates > MAX_CANDIDATES as u128 {
        return Err(AttackError::TooManyCandidates(candidates));
    }

    // Per-block input perturbations: pad bit times error patterns on the n
    // codeword coordinates with weight <= w_total.
    let mut per_block: Vec<Vec<Explanation>> = Vec::with_capacity(ps.r);
    for j in 0..ps.r {
        let base = j * ps.ell;
        let mut list = Vec::new();
        for pattern in 0u64..(1u64 << ps.n) {
            let w1 = pattern.count_ones() as usize;
            if w1 > w_total {
                continue;
            }
            for pad in [false, true] {
                let mut x = BitVector::zeros(ps.s);
                for k in 0..ps.n {
                    if pattern >> k & 1 == 1 {
                        x.set(base + k, true);
                    }
                }
                x.set(ps.pad_coord(j), pad);
                list.push(Explanation {
                    image: pk.p.mat_vec(&x).expect("shape"),
                    w1,
                });
            }
        }
        per_block.push(list);
    }

    // Span of the R1 columns.
    let mut r1_span = vec![BitVector::zeros(ps.public_rows())];
    for &pos in &pk.r1 {
        let col = pk.p.column(pos as usize);
        let more: Vec<BitVector> = r1_span.iter().map(|v| v.xor(&col).unwrap()).collect();
        r1_span.extend(more);
        if r1_span.len() as u64 > MAX_WORK {
            return Err(AttackError::TooMuchWork(u128::MAX));
        }
    }

    let combos: u128 = per_block.iter().map(|l| l.len() as u128).product::<u128>() * r1_span.len() as u128;
    if combos * candidates > MAX_WORK as u128 {
        return Err(AttackError::TooMuchWork(combos * candidates));
    }

    let mut free = BitVector::zeros(ps.public_rows());
    for &pos in &pk.r2 {
        free.set(pos as usize, true);
    }

    let codebook = pk.codebook();
    let zero_pads = BitVector::zeros(ps.r);
    let accepts = |residual: &BitVector| -> bool {
        let mut choice = vec![0usize; ps.r];
        loop {
            let mut rho = residual.clone();
            let mut w1 = Vec::with_capacity(ps.r);
            for (j, &c) in choice.iter().enumerate() {
                let e = &per_block[j][c];
                rho.xor_assign(&e.image).unwrap();
                w1.push(e.w1);
            }
            for span in &r1_span {
                let y = rho.xor(span).unwrap();
                if consistent(&y, &free, &w1, ps.n, ps.m, w_total) {
                    return true;
                }
            }
            // odometer over per-block choices
            let mut j = 0;
            loop {
                if j == ps.r {
                    return false;
                }
                choice[j] += 1;
                if choice[j] < per_block[j].len() {
                    break;
                }
                choice[j] = 0;
                j += 1;
            }
        }
    };

    let acceptors: Vec<Vec<u16>> = (0..candidates as u64)
        .into_par_iter()
        .filter_map(|idx| {
            let symbols = symbols_of(idx, ps.r, ps.f);
            let key = SharedKey::from_symbols(symbols.clone(), ps).expect("in range");
            let c = encode_key(pk, &codebook, &key, &zero_pads);
            let residual = ct.bits.xor(&pk.p.mat_vec(&c).expect("shape")).unwrap();
            accepts(&residual).then_some(symbols)
        })
        .collect();

    let unique = acceptors.len() == 1;
    Ok(AttackResult {
        recovered_symbols: unique.then(|| acceptors[0].clone()),
        unique,
        candidates_tested: candidates as u64,
        acceptors,
    })
}

/// `y` must vanish on the last `p` coordinates and, per message block outside
/// the free positions, weigh at most `w_total - w1_j`.
fn consistent(y: &BitVector, free: &BitVector, w1: &[usize], n: usize, m: usize, w_total: usize) -> bool {
    let mut per_block = vec![0usize; w1.len()];
    for i in y.iter_ones() {
        if free.get(i) {
            continue;
        }
        if i >= m {
            return false;
        }
        per_block[i / n] += 1;
    }
    per_block.iter().zip(w1).all(|(&w2, &w1)| w1 + w2 <= w_total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kem::{encapsulate, CommonRandomnessView, ErrorBudget};
    use crate::keygen::{keygen, CrConfig};
    use crate::params::ParamSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn finds_true_key_small() {
        let ps = ParamSet::with_components(3, 2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (pk, _) = keygen(&ps, &mut rng, CrConfig::NONE).unwrap();
        let key = SharedKey::from_symbols(vec![3, 11], &ps).unwrap();
        let ct = encapsulate(&pk, &key, &mut rng, &CommonRandomnessView::none(), ErrorBudget::new(1)).unwrap();
        let res = exhaustive_attack(&pk, &ct, 1).unwrap();
        assert_eq!(res.candidates_tested, 196);
        assert!(res.acceptors.contains(&vec![3, 11]));
    }

    #[test]
    fn guards() {
        let ps = ParamSet::toy8();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (pk, _) = keygen(&ps, &mut rng, CrConfig::NONE).unwrap();
        let ct = Ciphertext {
            bits: BitVector::zeros(3),
        };
        assert!(matches!(
            exhaustive_attack(&pk, &ct, 1),
            Err(AttackError::CiphertextLength { .. })
        ));
        let ct = Ciphertext {
            bits: BitVector::zeros(ps.public_rows()),
        };
        assert!(matches!(
            exhaustive_attack(&pk, &ct, 2),
            Err(AttackError::Budget { .. })
        ));

        let big = ParamSet::with_components(4, 5).unwrap(); // 30^5 > 2^20
        let (pk, _) = keygen(&big, &mut rng, CrConfig::NONE).unwrap();
        let ct = Ciphertext {
            bits: BitVector::zeros(big.public_rows()),
        };
        assert!(matches!(
            exhaustive_attack(&pk, &ct, 0),
            Err(AttackError::TooManyCandidates(_))
        ));
    }

    #[test]
    fn symbol_enumeration_order() {
        assert_eq!(symbols_of(0, 2, 14), vec![0, 0]);
        assert_eq!(symbols_of(15, 2, 14), vec![1, 1]);
        assert_eq!(symbols_of(195, 2, 14), vec![13, 13]);
    }
}
