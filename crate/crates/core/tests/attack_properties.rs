use rkem::accounting::codeword_search_log2;
use rkem::attack::{exhaustive_attack, AttackResult};
use rkem::kem::{encapsulate, CommonRandomnessView, ErrorBudget, SharedKey};
use rkem::keygen::{keygen, CrConfig};
use rkem::ParamSet;

fn toy() -> ParamSet {
    ParamSet::with_components(3, 2).unwrap()
}

/// Same seed, same key: only the common-randomness configuration differs, and
/// positions are drawn after every other key component.
fn instance(seed: u64, cr: CrConfig) -> (SharedKey, AttackResult) {
    let ps = toy();
    let mut rng = rkem::rng::seeded(seed);
    let (pk, _) = keygen(&ps, &mut rng, cr).unwrap();
    let key = SharedKey::from_symbols(vec![(seed % 14) as u16, (seed / 14 % 14) as u16], &ps).unwrap();
    let view = CommonRandomnessView::random(&pk, &mut rng);
    let ct = encapsulate(&pk, &key, &mut rng, &view, ErrorBudget::new(1)).unwrap();
    (key, exhaustive_attack(&pk, &ct, 1).unwrap())
}

#[test]
fn true_key_always_accepted_without_masking() {
    let ps = toy();
    for seed in 0..100 {
        let (key, res) = instance(seed, CrConfig::NONE);
        assert_eq!(res.candidates_tested, 196);
        assert!(
            res.acceptors.iter().any(|a| a.as_slice() == key.symbols()),
            "seed {seed}"
        );
        assert_eq!(res.unique, res.acceptors.len() == 1);
        if res.unique {
            assert_eq!(res.recovered_symbols.as_deref(), Some(key.symbols()));
        }
    }
    assert_eq!(
        (196f64).log2(),
        codeword_search_log2(ps.r, ps.f),
        "search exponent must match accounting"
    );
}

#[test]
fn masking_grows_the_acceptance_set() {
    let mut grew = 0;
    for seed in 0..100 {
        let (key, plain) = instance(seed, CrConfig::NONE);
        let (_, masked) = instance(seed, CrConfig::new(2, 2));
        assert!(masked.acceptors.iter().any(|a| a.as_slice() == key.symbols()));
        if masked.acceptors.len() > plain.acceptors.len() {
            grew += 1;
        }
    }
    assert!(grew >= 95, "grew in {grew}/100");
}

#[test]
fn zero_budget_recovers_the_key() {
    let ps = toy();
    let mut rng = rkem::rng::seeded(77);
    let (pk, _) = keygen(&ps, &mut rng, CrConfig::NONE).unwrap();
    let key = SharedKey::from_symbols(vec![5, 9], &ps).unwrap();
    let ct = encapsulate(&pk, &key, &mut rng, &CommonRandomnessView::none(), ErrorBudget::zero()).unwrap();
    let res = exhaustive_attack(&pk, &ct, 0).unwrap();
    assert!(res.unique);
    assert_eq!(res.recovered_symbols, Some(vec![5, 9]));
}
