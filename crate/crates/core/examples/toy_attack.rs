//! Exhaustive codeword search against a two-block toy instance.

use rkem::attack::exhaustive_attack;
use rkem::kem::{encapsulate, CommonRandomnessView, ErrorBudget, SharedKey};
use rkem::keygen::{keygen, CrConfig};
use rkem::ParamSet;

fn main() {
    let ps = ParamSet::with_components(3, 2).unwrap();
    for (label, cr) in [("no masking", CrConfig::NONE), ("|R1|=|R2|=2", CrConfig::new(2, 2))] {
        let mut rng = rkem::rng::seeded(4);
        let (pk, _) = keygen(&ps, &mut rng, cr).unwrap();
        let key = SharedKey::from_symbols(vec![6, 11], &ps).unwrap();
        let view = CommonRandomnessView::random(&pk, &mut rng);
        let ct = encapsulate(&pk, &key, &mut rng, &view, ErrorBudget::new(1)).unwrap();
        let res = exhaustive_attack(&pk, &ct, 1).unwrap();
        println!(
            "{label}: {} of {} candidates accepted, unique = {}",
            res.acceptors.len(),
            res.candidates_tested,
            res.unique
        );
    }
}
