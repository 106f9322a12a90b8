//! Correlated bits from looped round-trip times.

use rkem::sim::{simulate_exchange, DelayModel, JitterFamily};

fn main() {
    for noise in [1.0, 0.5, 0.25, 0.1, 0.0] {
        let model = DelayModel {
            packets: 20_000,
            private_noise: noise,
            ..DelayModel::default()
        };
        let ex = simulate_exchange(&model, &mut rkem::rng::seeded(1)).unwrap();
        println!(
            "private noise {noise:>4}: disagreement {:.4}",
            ex.extract.disagreement_rate()
        );
    }
    for loops in [2, 3, 5] {
        let model = DelayModel {
            loops,
            packets: 20_000,
            jitter: JitterFamily::TruncatedNormal,
            base_delay: 100.0,
            ..DelayModel::default()
        };
        let ex = simulate_exchange(&model, &mut rkem::rng::seeded(2)).unwrap();
        println!(
            "{loops} loops, normal jitter: disagreement {:.4}",
            ex.extract.disagreement_rate()
        );
    }
}
