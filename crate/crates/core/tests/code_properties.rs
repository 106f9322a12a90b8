use rkem::code::{Codebook, DecodeFailure};

fn patterns(n: usize, max_weight: usize) -> Vec<u64> {
    (0u64..1 << n)
        .filter(|p| p.count_ones() as usize <= max_weight)
        .collect()
}

/// Spreads the low `n - 1` bits of `pattern` over every coordinate except `hole`.
fn spread(pattern: u64, hole: usize) -> u64 {
    let low = pattern & ((1 << hole) - 1);
    let high = (pattern >> hole) << (hole + 1);
    low | high
}

#[test]
fn v4_every_puncture_and_correctable_pattern_decodes() {
    let cb = Codebook::new(4).unwrap();
    let t = cb.t() as usize;
    assert_eq!(t, 3);
    let pats = patterns(15, t);
    assert_eq!(pats.len(), 1 + 15 + 105 + 455);
    let mut checked = 0usize;
    for idx in 0..cb.f() {
        for hole in 0..16 {
            let surviving = cb.full_mask() & !(1 << hole);
            for &p in &pats {
                let err = spread(p, hole);
                // the punctured coordinate carries garbage that must be ignored
                let received = cb.word(idx) ^ err ^ (1 << hole);
                let d = cb.decode(received, surviving).unwrap();
                assert_eq!(d.index, idx);
                assert_eq!(d.distance, p.count_ones());
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 30 * 16 * 576);
}

#[test]
fn v4_four_errors_never_decode_wrongly_below_t() {
    let cb = Codebook::new(4).unwrap();
    let t = cb.t();
    let pats: Vec<u64> = (0u64..1 << 15).filter(|p| p.count_ones() == 4).collect();
    let (mut ties, mut far, mut wrong) = (0usize, 0usize, 0usize);
    for idx in 0..cb.f() {
        for hole in 0..16 {
            let surviving = cb.full_mask() & !(1 << hole);
            for &p in &pats {
                match cb.decode(cb.word(idx) ^ spread(p, hole), surviving) {
                    Ok(d) => {
                        assert!(d.index < cb.f());
                        assert_ne!(d.index, idx, "true word is at distance 4 > t");
                        assert!(d.distance >= t, "wrong word accepted at distance {}", d.distance);
                        wrong += 1;
                    }
                    Err(DecodeFailure::Tie(_)) => ties += 1,
                    Err(DecodeFailure::TooFar { .. }) => far += 1,
                    Err(e) => panic!("unexpected {e:?}"),
                }
            }
        }
    }
    assert_eq!(ties + far + wrong, 30 * 16 * 1365);
    assert!(ties > 0);
}

fn min_restricted_distance(cb: &Codebook, mask: u64) -> u32 {
    let mut best = u32::MAX;
    for a in 0..cb.f() {
        for b in a + 1..cb.f() {
            best = best.min(((cb.word(a) ^ cb.word(b)) & mask).count_ones());
        }
    }
    best
}

#[test]
fn punctured_minimum_distance() {
    let cb4 = Codebook::new(4).unwrap();
    for hole in 0..16 {
        assert!(min_restricted_distance(&cb4, cb4.full_mask() & !(1 << hole)) >= 7);
    }
    // Only 32 distinct 31-coordinate subsets exist, so cover them all.
    let cb5 = Codebook::new(5).unwrap();
    for hole in 0..32 {
        assert!(min_restricted_distance(&cb5, cb5.full_mask() & !(1 << hole)) >= 15);
    }
}

#[test]
fn decode_is_total_on_random_inputs() {
    use rand::Rng;
    let mut rng = rkem::rng::seeded(11);
    for v in [3u32, 4, 5] {
        let cb = Codebook::new(v).unwrap();
        for _ in 0..20_000 {
            let word = rng.random::<u64>() & cb.full_mask();
            let hole = rng.random_range(0..cb.n());
            let mask = cb.full_mask() & !(1u64 << hole);
            match cb.decode(word, mask) {
                Ok(d) => assert!(d.index < cb.f() && d.distance <= cb.t()),
                Err(DecodeFailure::Tie(_) | DecodeFailure::TooFar { .. }) => {}
                Err(e) => panic!("unexpected {e:?}"),
            }
        }
    }
}
