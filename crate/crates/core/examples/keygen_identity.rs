//! Key generation and the block structure of `A B`.
//!
//! Needs the `trace` feature for the intermediate factors:
//! `cargo run --example keygen_identity --features trace`.

#[cfg(feature = "trace")]
fn main() {
    use rkem::keygen::{keygen_traced, CrConfig};
    use rkem::{BitMatrix, ParamSet};

    let ps = ParamSet::rm16();
    let (pk, sk, trace) = keygen_traced(&ps, &mut rkem::rng::seeded(7), CrConfig::NONE).unwrap();
    let f = &trace.factors;
    let ab = f.a().mul(&f.b()).unwrap();
    assert_eq!(ab, BitMatrix::block_diag(&[&f.z, &f.d]));
    assert!(ab.submatrix(0, ps.m, ps.m, ps.p).is_zero());
    println!("A B = blockdiag(Z, D) with a zero top-right block");
    println!("public key P: {}x{}", pk.p.rows(), pk.p.cols());
    println!(
        "C1: {}x{}, C2: {}x{}, rank(C2) = {}",
        trace.c1.rows(),
        trace.c1.cols(),
        trace.c2.rows(),
        trace.c2.cols(),
        trace.c2.rank()
    );
    println!(
        "punctured input coordinates of the first blocks: {:?}",
        &sk.punctured[..5]
    );
    sk.validate().unwrap();
}

#[cfg(not(feature = "trace"))]
fn main() {
    eprintln!("run with --features trace");
}
