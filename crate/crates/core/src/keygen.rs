//! Key generation.
//!
//! The public matrix is `P = B C` with `C = [C1; C2]`:
//!
//! * `C1` (`m x s`) keeps, for each block, all but one randomly chosen input
//!   coordinate and routes the survivors to the block's `n` message rows in a
//!   random order. The dropped coordinate is the block's puncture.
//! * `C2` (`p x s`) is uniform.
//! * `B` (`(m+p) x (m+p)`) is paired with a private `A = [[I, A2], [A3, A4]]`
//!   so that `A B = blockdiag(Z, D)` where `Z` permutes coordinates inside each
//!   block. Alice therefore sees `Z C1` applied to Bob's vector on the first
//!   `m` rows, and throws the remaining `p` rows away.
//!
//! Randomness is drawn in a fixed order: `C1`, then `(Z, A2, B3)` until `B1`
//! is invertible, `B4`, `A4` until invertible, `C2`, the labelings, and last
//! the common-randomness positions.

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::code::{Codebook, Labeling};
use crate::gf2::{random_perm, BitMatrix, Gf2Error};
use crate::params::ParamSet;

/// Default bound on resampling loops for invertible factors.
pub const DEFAULT_MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KeygenError {
    #[error("no invertible {what} after {attempts} attempts")]
    ResampleExhausted { what: &'static str, attempts: usize },
    #[error("common-randomness configuration: {0}")]
    CommonRandomness(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// How many public positions carry common-randomness bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CrConfig {
    /// Positions in the input vector, drawn from `[0, s)`.
    pub r1: usize,
    /// Positions in the message, drawn from `[0, m)`.
    pub r2: usize,
}

impl CrConfig {
    pub const NONE: CrConfig = CrConfig { r1: 0, r2: 0 };

    pub fn new(r1: usize, r2: usize) -> Self {
        Self { r1, r2 }
    }

    /// Every input coordinate masked by common randomness, none on the message.
    pub fn full_mask(params: &ParamSet) -> Self {
        Self { r1: params.s, r2: 0 }
    }

    fn check(&self, params: &ParamSet) -> Result<(), KeygenError> {
        if self.r1 > params.s {
            return Err(KeygenError::CommonRandomness(format!(
                "|R1|={} exceeds s={}",
                self.r1, params.s
            )));
        }
        if self.r2 > params.m {
            return Err(KeygenError::CommonRandomness(format!(
                "|R2|={} exceeds m={}",
                self.r2, params.m
            )));
        }
        Ok(())
    }
}

/// Index form of `C1`: message row `i` reads input coordinate `sigma[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct C1Map {
    pub sigma: Vec<u32>,
    /// Punctured input coordinate of each block.
    pub punctured: Vec<u32>,
}

impl C1Map {
    pub fn to_matrix(&self, params: &ParamSet) -> BitMatrix {
        let mut c1 = BitMatrix::zeros(params.m, params.s);
        for (i, &j) in self.sigma.iter().enumerate() {
            c1.set(i, j as usize, true);
        }
        c1
    }
}

/// Samples the block-structured puncture/permutation `C1`.
pub fn build_c1<R: Rng + ?Sized>(params: &ParamSet, rng: &mut R) -> (BitMatrix, C1Map) {
    let mut sigma = Vec::with_capacity(params.m);
    let mut punctured = Vec::with_capacity(params.r);
    for j in 0..params.r {
        let base = j * params.ell;
        let drop = rng.random_range(0..params.ell);
        let keep: Vec<usize> = (0..params.ell).filter(|&k| k != drop).collect();
        for k in random_perm(params.n, rng) {
            sigma.push((base + keep[k]) as u32);
        }
        punctured.push((base + drop) as u32);
    }
    let map = C1Map { sigma, punctured };
    (map.to_matrix(params), map)
}

/// The private/public factor pair before assembly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbFactors {
    /// `Z` as an index map: row `i` has its one in column `z_perm[i]`.
    pub z_perm: Vec<u32>,
    pub z: BitMatrix,
    pub a2: BitMatrix,
    pub a3: BitMatrix,
    pub a4: BitMatrix,
    pub b1: BitMatrix,
    pub b2: BitMatrix,
    pub b3: BitMatrix,
    pub b4: BitMatrix,
    pub d: BitMatrix,
}

impl AbFactors {
    pub fn a(&self) -> BitMatrix {
        let m = self.a2.rows();
        BitMatrix::from_blocks(&BitMatrix::identity(m), &self.a2, &self.a3, &self.a4).expect("A block shapes")
    }

    pub fn b(&self) -> BitMatrix {
        BitMatrix::from_blocks(&self.b1, &self.b2, &self.b3, &self.b4).expect("B block shapes")
    }
}

fn block_permutation<R: Rng + ?Sized>(params: &ParamSet, rng: &mut R) -> Vec<u32> {
    let mut z = Vec::with_capacity(params.m);
    for j in 0..params.r {
        z.extend(
            random_perm(params.n, rng)
                .into_iter()
                .map(|k| (j * params.n + k) as u32),
        );
    }
    z
}

/// Samples `A2, B3, Z` (until `B1 = Z + A2 B3` is invertible), `B4`, `A4`
/// (until invertible), then solves `A3 = A4 B3 B1^-1` and `D = A3 B2 + A4 B4`.
pub fn build_ab<R: Rng + ?Sized>(
    params: &ParamSet,
    rng: &mut R,
    max_attempts: usize,
) -> Result<AbFactors, KeygenError> {
    let (m, p) = (params.m, params.p);

    let mut attempt = 0;
    let (z_perm, z, a2, b3, b1, b1_inv) = loop {
        if attempt == max_attempts {
            return Err(KeygenError::ResampleExhausted {
                what: "B1",
                attempts: max_attempts,
            });
        }
        attempt += 1;
        let z_perm = block_permutation(params, rng);
        let z = BitMatrix::from_permutation(&z_perm.iter().map(|&x| x as usize).collect::<Vec<_>>());
        let a2 = BitMatrix::random(m, p, rng);
        let b3 = BitMatrix::random(p, m, rng);
        let b1 = z.add(&a2.mul(&b3)?)?;
        match b1.invert() {
            Ok(inv) => break (z_perm, z, a2, b3, b1, inv),
            Err(Gf2Error::Singular) => continue,
            Err(e) => return Err(e.into()),
        }
    };

    let b4 = BitMatrix::random(p, p, rng);
    let b2 = a2.mul(&b4)?;

    let mut attempt = 0;
    let a4 = loop {
        if attempt == max_attempts {
            return Err(KeygenError::ResampleExhausted {
                what: "A4",
                attempts: max_attempts,
            });
        }
        attempt += 1;
        let a4 = BitMatrix::random(p, p, rng);
        if a4.rank() == p {
            break a4;
        }
    };

    let a3 = a4.mul(&b3)?.mul(&b1_inv)?;
    let d = a3.mul(&b2)?.add(&a4.mul(&b4)?)?;

    Ok(AbFactors {
        z_perm,
        z,
        a2,
        a3,
        a4,
        b1,
        b2,
        b3,
        b4,
        d,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub params: ParamSet,
    /// `(m + p) x s` public matrix.
    pub p: BitMatrix,
    pub labelings: Vec<Labeling>,
    /// Common-randomness positions in the input vector (sorted).
    pub r1: Vec<u32>,
    /// Common-randomness positions in the message, all below `m` (sorted).
    pub r2: Vec<u32>,
}

impl PublicKey {
    pub fn codebook(&self) -> Codebook {
        Codebook::new(self.params.v).expect("validated params")
    }

    pub fn validate(&self) -> Result<(), String> {
        let ps = &self.params;
        ps.validate().map_err(|e| e.to_string())?;
        if self.p.shape() != (ps.public_rows(), ps.s) {
            return Err(format!(
                "public matrix is {:?}, expected {:?}",
                self.p.shape(),
                (ps.public_rows(), ps.s)
            ));
        }
        check_labelings(&self.labelings, ps)?;
        check_positions(&self.r1, ps.s, "R1")?;
        check_positions(&self.r2, ps.m, "R2")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    pub params: ParamSet,
    /// `m x p` upper-right block of `A`.
    pub a2: BitMatrix,
    /// Composite map `Z C1`: message row `i` reads input coordinate `sigma[i]`.
    pub sigma: Vec<u32>,
    pub punctured: Vec<u32>,
    pub labelings: Vec<Labeling>,
    pub r1: Vec<u32>,
    pub r2: Vec<u32>,
}

impl PrivateKey {
    pub fn codebook(&self) -> Codebook {
        Codebook::new(self.params.v).expect("validated params")
    }

    /// Checks that `sigma` keeps each block inside its own boundary and that,
    /// per block, the image of `sigma` plus the puncture is exactly the block.
    pub fn validate(&self) -> Result<(), String> {
        let ps = &self.params;
        ps.validate().map_err(|e| e.to_string())?;
        if self.a2.shape() != (ps.m, ps.p) {
            return Err(format!("A2 is {:?}, expected {:?}", self.a2.shape(), (ps.m, ps.p)));
        }
        if self.sigma.len() != ps.m || self.punctured.len() != ps.r {
            return Err("sigma/puncture lengths do not match parameters".into());
        }
        for j in 0..ps.r {
            let block = ps.input_block(j);
            let mut seen = vec![false; ps.ell];
            let punct = self.punctured[j] as usize;
            if !block.contains(&punct) {
                return Err(format!("block {j}: puncture {punct} outside block"));
            }
            seen[punct - block.start] = true;
            for i in ps.output_block(j) {
                let src = self.sigma[i] as usize;
                if !block.contains(&src) || seen[src - block.start] {
                    return Err(format!("block {j}: sigma[{i}]={src} not a block bijection"));
                }
                seen[src - block.start] = true;
            }
        }
        check_labelings(&self.labelings, ps)?;
        check_positions(&self.r1, ps.s, "R1")?;
        check_positions(&self.r2, ps.m, "R2")
    }
}

fn check_labelings(labelings: &[Labeling], ps: &ParamSet) -> Result<(), String> {
    if labelings.len() != ps.r || labelings.iter().any(|l| l.len() != ps.f) {
        return Err(format!("expected {} labelings over {} codewords", ps.r, ps.f));
    }
    Ok(())
}

fn check_positions(pos: &[u32], bound: usize, name: &str) -> Result<(), String> {
    if pos.windows(2).any(|w| w[0] >= w[1]) || pos.last().is_some_and(|&x| x as usize >= bound) {
        return Err(format!("{name} must be strictly increasing and below {bound}"));
    }
    Ok(())
}

/// Every intermediate matrix of one key generation.
#[cfg(any(test, feature = "trace"))]
#[derive(Debug, Clone)]
pub struct KeygenTrace {
    pub factors: AbFactors,
    pub c1: BitMatrix,
    pub c1_map: C1Map,
    pub c2: BitMatrix,
}

#[cfg(any(test, feature = "trace"))]
impl KeygenTrace {
    pub fn c(&self) -> BitMatrix {
        BitMatrix::vstack(&self.c1, &self.c2).expect("C block shapes")
    }
}

/// Generates a key pair.
pub fn keygen<R: Rng + ?Sized>(
    params: &ParamSet,
    rng: &mut R,
    cr: CrConfig,
) -> Result<(PublicKey, PrivateKey), KeygenError> {
    keygen_inner(params, rng, cr).map(|(pk, sk, _)| (pk, sk))
}

/// [`keygen`], also returning the intermediate matrices.
#[cfg(any(test, feature = "trace"))]
pub fn keygen_traced<R: Rng + ?Sized>(
    params: &ParamSet,
    rng: &mut R,
    cr: CrConfig,
) -> Result<(PublicKey, PrivateKey, KeygenTrace), KeygenError> {
    keygen_inner(params, rng, cr).map(|(pk, sk, parts)| {
        let (factors, c1, c1_map, c2) = parts;
        (
            pk,
            sk,
            KeygenTrace {
                factors,
                c1,
                c1_map,
                c2,
            },
        )
    })
}

type Parts = (AbFactors, BitMatrix, C1Map, BitMatrix);

fn keygen_inner<R: Rng + ?Sized>(
    params: &ParamSet,
    rng: &mut R,
    cr: CrConfig,
) -> Result<(PublicKey, PrivateKey, Parts), KeygenError> {
    cr.check(params)?;
    let (c1, c1_map) = build_c1(params, rng);
    let factors = build_ab(params, rng, DEFAULT_MAX_ATTEMPTS)?;
    let c2 = BitMatrix::random(params.p, params.s, rng);
    let c = BitMatrix::vstack(&c1, &c2)?;
    let p = factors.b().mul(&c)?;

    let labelings: Vec<Labeling> = (0..params.r).map(|_| Labeling::random(params.f, rng)).collect();
    let r1 = sorted_sample(rng, params.s, cr.r1);
    let r2 = sorted_sample(rng, params.m, cr.r2);

    let sigma = factors.z_perm.iter().map(|&k| c1_map.sigma[k as usize]).collect();

    let pk = PublicKey {
        params: *params,
        p,
        labelings: labelings.clone(),
        r1: r1.clone(),
        r2: r2.clone(),
    };
    let sk = PrivateKey {
        params: *params,
        a2: factors.a2.clone(),
        sigma,
        punctured: c1_map.punctured.clone(),
        labelings,
        r1,
        r2,
    };
    Ok((pk, sk, (factors, c1, c1_map, c2)))
}

fn sorted_sample<R: Rng + ?Sized>(rng: &mut R, bound: usize, count: usize) -> Vec<u32> {
    let mut v: Vec<u32> = sample(rng, bound, count).into_iter().map(|x| x as u32).collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn c1_single_block_toy() {
        let ps = ParamSet::with_components(3, 1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (c1, map) = build_c1(&ps, &mut rng);
        assert_eq!(c1.shape(), (8, 9));
        let zero_cols = (0..9).filter(|&j| c1.column(j).weight() == 0).count();
        assert_eq!(zero_cols, 1);
        assert_eq!(c1.column(map.punctured[0] as usize).weight(), 0);
    }

    #[test]
    fn c1_rm16_shape() {
        let ps = ParamSet::rm16();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (c1, map) = build_c1(&ps, &mut rng);
        assert_eq!(c1.shape(), (848, 901));
        assert!((0..848).all(|i| c1.row_weight(i) == 1));
        let zero_cols = (0..901).filter(|&j| c1.column(j).weight() == 0).count();
        assert_eq!(zero_cols, 53);
        // one puncture per block, inside that block
        for (j, &pc) in map.punctured.iter().enumerate() {
            assert!(ps.input_block(j).contains(&(pc as usize)));
        }
    }

    #[test]
    fn c1_matches_index_map() {
        let ps = ParamSet::toy8();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (c1, map) = build_c1(&ps, &mut rng);
        for _ in 0..100 {
            let x = BitVector::random(ps.s, &mut rng);
            let y = c1.mat_vec(&x).unwrap();
            for i in 0..ps.m {
                assert_eq!(y.get(i), x.get(map.sigma[i] as usize));
            }
        }
    }

    #[test]
    fn ab_identity_toy() {
        // m = 8, p = 3 is not reachable with p = ceil(r/2) and n = 8, so the
        // factor routine is checked on a hand-built set with those shapes.
        let mut ps = ParamSet::with_components(3, 1).unwrap();
        ps.p = 3;
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let ab = build_ab(&ps, &mut rng, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert_eq!(ab.a2.shape(), (8, 3));
        let prod = ab.a().mul(&ab.b()).unwrap();
        assert_eq!(prod, BitMatrix::block_diag(&[&ab.z, &ab.d]));
        assert!(prod.submatrix(0, 8, 8, 3).is_zero());
        assert!(ab.b2.add(&ab.a2.mul(&ab.b4).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn resample_exhaustion_reported() {
        let ps = ParamSet::toy8();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        assert_eq!(
            build_ab(&ps, &mut rng, 0),
            Err(KeygenError::ResampleExhausted {
                what: "B1",
                attempts: 0
            })
        );
    }

    #[test]
    fn keygen_shapes_and_sigma() {
        let ps = ParamSet::toy8();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (pk, sk, tr) = keygen_traced(&ps, &mut rng, CrConfig::new(4, 3)).unwrap();
        pk.validate().unwrap();
        sk.validate().unwrap();
        assert_eq!(pk.p, tr.factors.b().mul(&tr.c()).unwrap());
        assert_eq!((pk.r1.len(), pk.r2.len()), (4, 3));
        // sigma is the index form of Z C1
        let zc1 = tr.factors.z.mul(&tr.c1).unwrap();
        for (i, &j) in sk.sigma.iter().enumerate() {
            assert_eq!(zc1.row(i).iter_ones().collect::<Vec<_>>(), vec![j as usize]);
        }
        // A P = [Z C1; D C2]
        let ap = tr.factors.a().mul(&pk.p).unwrap();
        assert_eq!(ap.submatrix(0, 0, ps.m, ps.s), zc1);
        assert_eq!(ap.submatrix(ps.m, 0, ps.p, ps.s), tr.factors.d.mul(&tr.c2).unwrap());
    }

    #[test]
    fn cr_config_bounds() {
        let ps = ParamSet::toy8();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        assert!(keygen(&ps, &mut rng, CrConfig::new(ps.s + 1, 0)).is_err());
        assert!(keygen(&ps, &mut rng, CrConfig::new(0, ps.m + 1)).is_err());
        let (pk, _) = keygen(&ps, &mut rng, CrConfig::full_mask(&ps)).unwrap();
        assert_eq!(pk.r1, (0..ps.s as u32).collect::<Vec<_>>());
        assert!(pk.r2.is_empty());
    }

    #[test]
    fn validate_catches_broken_sigma() {
        let ps = ParamSet::toy8();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let (_, mut sk) = keygen(&ps, &mut rng, CrConfig::NONE).unwrap();
        sk.sigma[0] = sk.sigma[ps.n]; // point into block 1
        assert!(sk.validate().is_err());
    }
}
