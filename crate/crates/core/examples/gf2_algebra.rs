//! Dense GF(2) matrices: products, inversion, rank and permutations.

use rkem::gf2::random_perm;
use rkem::BitMatrix;

fn main() {
    let mut rng = rkem::rng::seeded(1);

    let a = loop {
        let m = BitMatrix::random(64, 64, &mut rng);
        if m.rank() == 64 {
            break m;
        }
    };
    let inv = a.invert().expect("full rank");
    assert_eq!(a.mul(&inv).unwrap(), BitMatrix::identity(64));
    println!("inverted a random 64x64 matrix (weight {})", a.weight());

    let wide = BitMatrix::random(6, 9, &mut rng);
    println!("rank of a random 6x9 matrix: {}", wide.rank());

    let p = BitMatrix::from_permutation(&random_perm(8, &mut rng));
    let q = p.transpose();
    assert_eq!(p.mul(&q).unwrap(), BitMatrix::identity(8));
    println!("a permutation matrix times its transpose is the identity");

    let bytes = wide.to_bytes();
    assert_eq!(BitMatrix::from_bytes(&bytes).unwrap(), wide);
    println!("serialized 6x9 matrix in {} bytes", bytes.len());
}
