use num_bigint::BigUint;
use proptest::prelude::*;
use rkem::gf2::random_perm;
use rkem::kem::{key_to_symbols, symbols_to_key};
use rkem::{BitMatrix, BitVector, ParamSet};

fn mat(rows: usize, cols: usize, seed: u64) -> BitMatrix {
    BitMatrix::random(rows, cols, &mut rkem::rng::seeded(seed))
}

fn invertible(n: usize, seed: u64) -> BitMatrix {
    let mut rng = rkem::rng::seeded(seed);
    loop {
        let m = BitMatrix::random(n, n, &mut rng);
        if m.rank() == n {
            return m;
        }
    }
}

proptest! {
    #[test]
    fn mul_is_associative(a in 1usize..=16, b in 1usize..=16, c in 1usize..=16, d in 1usize..=16, seed: u64) {
        let x = mat(a, b, seed);
        let y = mat(b, c, seed ^ 1);
        let z = mat(c, d, seed ^ 2);
        let left = x.mul(&y).unwrap().mul(&z).unwrap();
        let right = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn mat_vec_is_linear(rows in 1usize..=40, cols in 1usize..=140, seed: u64) {
        let mut rng = rkem::rng::seeded(seed);
        let a = BitMatrix::random(rows, cols, &mut rng);
        let x = BitVector::random(cols, &mut rng);
        let y = BitVector::random(cols, &mut rng);
        let lhs = a.mat_vec(&x.xor(&y).unwrap()).unwrap();
        let rhs = a.mat_vec(&x).unwrap().xor(&a.mat_vec(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn double_inverse_is_identity(n in 1usize..=70, seed: u64) {
        let m = invertible(n, seed);
        let inv = m.invert().unwrap();
        prop_assert_eq!(inv.invert().unwrap(), m.clone());
        prop_assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(n));
    }

    #[test]
    fn transpose_reverses_products(a in 1usize..=20, b in 1usize..=20, c in 1usize..=20, seed: u64) {
        let x = mat(a, b, seed);
        let y = mat(b, c, seed.wrapping_add(7));
        prop_assert_eq!(
            x.mul(&y).unwrap().transpose(),
            y.transpose().mul(&x.transpose()).unwrap()
        );
    }

    #[test]
    fn serialization_roundtrips(rows in 1usize..=30, cols in 1usize..=200, seed: u64) {
        let m = mat(rows, cols, seed);
        prop_assert_eq!(BitMatrix::from_bytes(&m.to_bytes()).unwrap(), m);
    }

    #[test]
    fn permutation_matrices_compose(n in 1usize..=40, seed: u64) {
        let mut rng = rkem::rng::seeded(seed);
        let p = random_perm(n, &mut rng);
        let q = random_perm(n, &mut rng);
        let composed: Vec<usize> = (0..n).map(|i| q[p[i]]).collect();
        let pm = BitMatrix::from_permutation(&p);
        let qm = BitMatrix::from_permutation(&q);
        prop_assert_eq!(pm.mul(&qm).unwrap(), BitMatrix::from_permutation(&composed));
    }

    #[test]
    fn symbols_roundtrip_rm16(bytes in proptest::collection::vec(any::<u8>(), 32)) {
        let ps = ParamSet::rm16();
        let value = BigUint::from_bytes_le(&bytes);
        let symbols = key_to_symbols(&value, &ps).unwrap();
        prop_assert_eq!(symbols.len(), ps.r);
        prop_assert!(symbols.iter().all(|&s| (s as usize) < ps.f));
        prop_assert_eq!(symbols_to_key(&symbols, &ps), value);
    }
}

#[test]
fn symbols_roundtrip_million_values() {
    use rand::RngCore;
    let ps = ParamSet::rm16();
    let mut rng = rkem::rng::seeded(42);
    let mut bytes = [0u8; 32];
    for _ in 0..1_000_000 {
        rng.fill_bytes(&mut bytes);
        let value = BigUint::from_bytes_le(&bytes);
        assert_eq!(symbols_to_key(&key_to_symbols(&value, &ps).unwrap(), &ps), value);
    }
}

#[test]
fn symbol_digit_edges() {
    let ps = ParamSet::rm32();
    assert!(key_to_symbols(&BigUint::from(0u8), &ps)
        .unwrap()
        .iter()
        .all(|&s| s == 0));
    let top = key_to_symbols(&BigUint::from(ps.f - 1), &ps).unwrap();
    assert_eq!(top[0] as usize, ps.f - 1);
    assert!(top[1..].iter().all(|&s| s == 0));
}
