//! Looped round-trip-time exchange between two nodes.
//!
//! Node A sends `N` packets to node B, which loops each one back, and so on
//! for `L` loops. The round trip measured at A and the one measured at B for
//! the same packet share `2L - 2` segment delays; each node additionally sees
//! one private segment. Each node thresholds its own round-trip times at
//! their mean to get one bit per packet.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};

use super::SimError;
use crate::gf2::BitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JitterFamily {
    /// `base + Exp(mean = scale)`.
    #[default]
    Exponential,
    /// `base + N(0, scale^2)`, conditioned on a positive total.
    TruncatedNormal,
}

impl std::str::FromStr for JitterFamily {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp" | "exponential" => Ok(Self::Exponential),
            "normal" | "truncated-normal" => Ok(Self::TruncatedNormal),
            other => Err(SimError::Model(format!("unknown jitter family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayModel {
    /// Number of loops `L`; the two round trips share `2L - 2` segments.
    pub loops: usize,
    /// Number of packets `N`.
    pub packets: usize,
    /// Deterministic part of every segment delay.
    pub base_delay: f64,
    pub jitter: JitterFamily,
    /// Scale of the random part of each shared segment.
    pub jitter_scale: f64,
    /// Scale of the random part of each node's private segment.
    pub private_noise: f64,
}

impl Default for DelayModel {
    fn default() -> Self {
        Self {
            loops: 2,
            packets: 1000,
            base_delay: 10.0,
            jitter: JitterFamily::Exponential,
            jitter_scale: 1.0,
            private_noise: 0.25,
        }
    }
}

impl DelayModel {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.loops < 2 {
            return Err(SimError::Model(format!("need at least 2 loops, got {}", self.loops)));
        }
        if self.packets < 2 {
            return Err(SimError::Model(format!(
                "need at least 2 packets, got {}",
                self.packets
            )));
        }
        for (name, x) in [
            ("base_delay", self.base_delay),
            ("jitter_scale", self.jitter_scale),
            ("private_noise", self.private_noise),
        ] {
            if !x.is_finite() || x < 0.0 {
                return Err(SimError::Model(format!("{name} must be finite and >= 0, got {x}")));
            }
        }
        if self.jitter_scale == 0.0 && self.private_noise == 0.0 {
            return Err(SimError::Degenerate);
        }
        Ok(())
    }

    /// Number of segments common to both round trips.
    pub fn shared_segments(&self) -> usize {
        2 * self.loops - 2
    }
}

struct Segment {
    base: f64,
    family: JitterFamily,
    exp: Option<Exp<f64>>,
    normal: Option<Normal<f64>>,
}

impl Segment {
    fn new(base: f64, family: JitterFamily, scale: f64) -> Self {
        let (exp, normal) = if scale == 0.0 {
            (None, None)
        } else {
            match family {
                JitterFamily::Exponential => (Some(Exp::new(1.0 / scale).unwrap()), None),
                JitterFamily::TruncatedNormal => (None, Some(Normal::new(0.0, scale).unwrap())),
            }
        };
        Self {
            base,
            family,
            exp,
            normal,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            JitterFamily::Exponential => self.base + self.exp.map_or(0.0, |d| d.sample(rng)),
            JitterFamily::TruncatedNormal => match self.normal {
                None => self.base,
                Some(d) => loop {
                    let x = self.base + d.sample(rng);
                    if x > 0.0 {
                        break x;
                    }
                },
            },
        }
    }
}

/// Per-packet delays. `shared` appears identically in both round trips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RttSample {
    pub shared: f64,
    pub private_a: f64,
    pub private_b: f64,
}

impl RttSample {
    pub fn rtt_a(&self) -> f64 {
        self.shared + self.private_a
    }

    pub fn rtt_b(&self) -> f64 {
        self.shared + self.private_b
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitExtract {
    pub bits_a: BitVector,
    pub bits_b: BitVector,
}

impl BitExtract {
    pub fn disagreements(&self) -> usize {
        self.bits_a.xor(&self.bits_b).expect("equal lengths").weight()
    }

    pub fn disagreement_rate(&self) -> f64 {
        self.disagreements() as f64 / self.bits_a.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exchange {
    pub samples: Vec<RttSample>,
    pub extract: BitExtract,
}

fn threshold_at_mean(values: &[f64]) -> BitVector {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    BitVector::from_bits(values.iter().map(|&x| x > mean))
}

/// Simulates one exchange of `model.packets` packets.
pub fn simulate_exchange<R: Rng + ?Sized>(model: &DelayModel, rng: &mut R) -> Result<Exchange, SimError> {
    model.validate()?;
    let shared_seg = Segment::new(model.base_delay, model.jitter, model.jitter_scale);
    let private_seg = Segment::new(model.base_delay, model.jitter, model.private_noise);
    let samples: Vec<RttSample> = (0..model.packets)
        .map(|_| {
            let shared = (0..model.shared_segments()).map(|_| shared_seg.sample(rng)).sum();
            let private_a = private_seg.sample(rng);
            let private_b = private_seg.sample(rng);
            RttSample {
                shared,
                private_a,
                private_b,
            }
        })
        .collect();
    let rtt_a: Vec<f64> = samples.iter().map(RttSample::rtt_a).collect();
    let rtt_b: Vec<f64> = samples.iter().map(RttSample::rtt_b).collect();
    let extract = BitExtract {
        bits_a: threshold_at_mean(&rtt_a),
        bits_b: threshold_at_mean(&rtt_b),
    };
    Ok(Exchange { samples, extract })
}

/// Writes `packet_index,rtt_a,rtt_b,bit_a,bit_b` rows.
pub fn write_exchange_csv<W: Write>(ex: &Exchange, mut out: W) -> io::Result<()> {
    writeln!(out, "packet_index,rtt_a,rtt_b,bit_a,bit_b")?;
    for (i, s) in ex.samples.iter().enumerate() {
        writeln!(
            out,
            "{},{:.6},{:.6},{},{}",
            i,
            s.rtt_a(),
            s.rtt_b(),
            ex.extract.bits_a.get(i) as u8,
            ex.extract.bits_b.get(i) as u8
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn noiseless_private_segments_agree() {
        let model = DelayModel {
            private_noise: 0.0,
            packets: 5000,
            ..DelayModel::default()
        };
        let ex = simulate_exchange(&model, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        assert_eq!(ex.extract.bits_a, ex.extract.bits_b);
        assert_eq!(ex.extract.disagreement_rate(), 0.0);
        for s in &ex.samples {
            assert!(s.rtt_a() > 0.0 && s.rtt_b() > 0.0);
        }
    }

    #[test]
    fn rejects_bad_models() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let zero = DelayModel {
            jitter_scale: 0.0,
            private_noise: 0.0,
            ..DelayModel::default()
        };
        assert!(matches!(simulate_exchange(&zero, &mut rng), Err(SimError::Degenerate)));
        let one_loop = DelayModel {
            loops: 1,
            ..DelayModel::default()
        };
        assert!(simulate_exchange(&one_loop, &mut rng).is_err());
        let one_packet = DelayModel {
            packets: 1,
            ..DelayModel::default()
        };
        assert!(simulate_exchange(&one_packet, &mut rng).is_err());
        let negative = DelayModel {
            private_noise: -1.0,
            ..DelayModel::default()
        };
        assert!(simulate_exchange(&negative, &mut rng).is_err());
    }

    #[test]
    fn csv_shape() {
        let model = DelayModel {
            packets: 3,
            ..DelayModel::default()
        };
        let ex = simulate_exchange(&model, &mut ChaCha20Rng::seed_from_u64(3)).unwrap();
        let mut buf = Vec::new();
        write_exchange_csv(&ex, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "packet_index,rtt_a,rtt_b,bit_a,bit_b");
        assert!(lines[1].starts_with("0,"));
    }

    #[test]
    fn family_parsing() {
        assert_eq!("exp".parse::<JitterFamily>().unwrap(), JitterFamily::Exponential);
        assert_eq!("normal".parse::<JitterFamily>().unwrap(), JitterFamily::TruncatedNormal);
        assert!("pareto".parse::<JitterFamily>().is_err());
    }
}
