//! Encapsulation and decapsulation with and without common randomness.

use rkem::kem::{decapsulate, encapsulate, CommonRandomnessView, ErrorBudget, KemError, SharedKey};
use rkem::keygen::{keygen, CrConfig};
use rkem::ParamSet;

fn main() {
    let ps = ParamSet::rm16();
    let mut rng = rkem::rng::seeded(3);

    let (pk, sk) = keygen(&ps, &mut rng, CrConfig::NONE).unwrap();
    let key = SharedKey::random(&ps, &mut rng);
    let none = CommonRandomnessView::none();
    let ct = encapsulate(&pk, &key, &mut rng, &none, ErrorBudget::new(ps.t)).unwrap();
    let got = decapsulate(&sk, &ct, &none).unwrap();
    assert_eq!(got, key);
    println!("plain: {} ({}-bit ciphertext)", got.to_hex(&ps), ct.bits.len());

    let (pk, sk) = keygen(&ps, &mut rng, CrConfig::new(200, 100)).unwrap();
    let bob = CommonRandomnessView::random(&pk, &mut rng);
    let ct = encapsulate(&pk, &key, &mut rng, &bob, ErrorBudget::new(1)).unwrap();
    println!(
        "masked, same randomness: {}",
        decapsulate(&sk, &ct, &bob).unwrap().to_hex(&ps)
    );

    let alice = bob.with_disagreements(0.02, &mut rng);
    match decapsulate(&sk, &ct, &alice) {
        Ok(k) => println!("masked, 2% disagreement: recovered = {}", k == key),
        Err(KemError::DecapFailure { blocks }) => println!("masked, 2% disagreement: blocks {blocks:?} failed"),
        Err(e) => println!("error: {e}"),
    }
}
