//! End-to-end consolidation runs: every input coordinate is masked with
//! common randomness, and the two parties' copies disagree either
//! i.i.d. with a fixed rate or as produced by the round-trip-time simulator.
//!
//! Trials are grouped into chunks; chunk `c` uses sub-stream `c` of the master
//! seed and draws one fresh key pair. Per-chunk counts are integers and are
//! summed, so sequential and parallel execution give identical rows.

use std::io::{self, Write};

use rayon::prelude::*;

use super::rtt::{simulate_exchange, DelayModel};
use super::SimError;
use crate::kem::{self, CommonRandomnessView, ErrorBudget, SharedKey};
use crate::keygen::{keygen, CrConfig};
use crate::params::ParamSet;
use crate::rng;

pub const CURVE_CSV_HEADER: &str = "epsilon,block_error_rate,key_failure_rate,trials";

/// Source of disagreements between Alice's and Bob's common randomness.
#[derive(Debug, Clone, PartialEq)]
pub enum Disagreement {
    /// Each bit of Alice's copy flipped independently with this probability.
    Iid(f64),
    /// Bits extracted from a simulated exchange; the packet count is set to
    /// the number of masked positions.
    Rtt(DelayModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ParamSet,
    pub trials: usize,
    /// Injected errors per block on top of the disagreements.
    pub w_inj: usize,
    /// Trials sharing one key pair.
    pub trials_per_key: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(params: ParamSet, trials: usize, seed: u64) -> Self {
        Self {
            params,
            trials,
            w_inj: 0,
            trials_per_key: 32,
            seed,
            execution: Execution::Parallel,
        }
    }
}

/// One point of an error-rate curve.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CurveRow {
    /// Configured rate, or the measured rate for the RTT source.
    pub epsilon: f64,
    pub block_error_rate: f64,
    pub key_failure_rate: f64,
    pub trials: usize,
    pub blocks: u64,
    pub block_errors: u64,
    pub key_failures: u64,
}

impl CurveRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.8},{:.8},{}",
            self.epsilon, self.block_error_rate, self.key_failure_rate, self.trials
        )
    }
}

#[derive(Default, Clone, Copy)]
struct Counts {
    blocks: u64,
    block_errors: u64,
    key_failures: u64,
    cr_bits: u64,
    cr_disagreements: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            blocks: self.blocks + o.blocks,
            block_errors: self.block_errors + o.block_errors,
            key_failures: self.key_failures + o.key_failures,
            cr_bits: self.cr_bits + o.cr_bits,
            cr_disagreements: self.cr_disagreements + o.cr_disagreements,
        }
    }
}

fn run_chunk(cfg: &ExperimentConfig, source: &Disagreement, chunk: usize, trials: usize) -> Result<Counts, SimError> {
    let ps = &cfg.params;
    let mut rng = rng::stream(cfg.seed, chunk as u64);
    let (pk, sk) = keygen(ps, &mut rng, CrConfig::full_mask(ps))?;
    let mut counts = Counts::default();
    for _ in 0..trials {
        let key = SharedKey::random(ps, &mut rng);
        let (bob, alice) = match source {
            Disagreement::Iid(eps) => {
                let bob = CommonRandomnessView::random(&pk, &mut rng);
                let alice = bob.with_disagreements(*eps, &mut rng);
                (bob, alice)
            }
            Disagreement::Rtt(model) => {
                let model = DelayModel {
                    packets: pk.r1.len() + pk.r2.len(),
                    ..*model
                };
                let ex = simulate_exchange(&model, &mut rng)?;
                let n1 = pk.r1.len();
                let n2 = pk.r2.len();
                (
                    CommonRandomnessView::from_flat(&ex.extract.bits_b, n1, n2)?,
                    CommonRandomnessView::from_flat(&ex.extract.bits_a, n1, n2)?,
                )
            }
        };
        counts.cr_bits += (bob.r1.len() + bob.r2.len()) as u64;
        counts.cr_disagreements += (bob.r1.xor(&alice.r1)?.weight() + bob.r2.xor(&alice.r2)?.weight()) as u64;

        let ct = kem::encapsulate(&pk, &key, &mut rng, &bob, ErrorBudget::new(cfg.w_inj))?;
        let outcomes = kem::decode_blocks(&sk, &ct, &alice)?;
        let wrong = outcomes
            .iter()
            .zip(key.symbols())
            .filter(|(o, &sym)| !matches!(o, Ok((s, _)) if *s == sym))
            .count() as u64;
        counts.blocks += ps.r as u64;
        counts.block_errors += wrong;
        counts.key_failures += (wrong > 0) as u64;
    }
    Ok(counts)
}

/// Runs `cfg.trials` full keygen/encapsulate/decapsulate rounds with full
/// common-randomness masking and reports block and key error rates.
pub fn consolidation_experiment(cfg: &ExperimentConfig, source: &Disagreement) -> Result<CurveRow, SimError> {
    if cfg.w_inj > cfg.params.t {
        return Err(SimError::Experiment(format!(
            "w_inj={} exceeds t={}",
            cfg.w_inj, cfg.params.t
        )));
    }
    if cfg.trials == 0 || cfg.trials_per_key == 0 {
        return Err(SimError::Experiment(
            "trials and trials_per_key must be positive".into(),
        ));
    }
    if let Disagreement::Iid(eps) = source {
        if !(0.0..=1.0).contains(eps) {
            return Err(SimError::Experiment(format!("epsilon {eps} outside [0, 1]")));
        }
    }
    let chunks: Vec<(usize, usize)> = (0..cfg.trials.div_ceil(cfg.trials_per_key))
        .map(|c| (c, cfg.trials_per_key.min(cfg.trials - c * cfg.trials_per_key)))
        .collect();
    let total = match cfg.execution {
        Execution::Sequential => chunks
            .iter()
            .map(|&(c, n)| run_chunk(cfg, source, c, n))
            .try_fold(Counts::default(), |acc, r| r.map(|x| acc + x))?,
        Execution::Parallel => chunks
            .par_iter()
            .map(|&(c, n)| run_chunk(cfg, source, c, n))
            .try_reduce(Counts::default, |a, b| Ok(a + b))?,
    };
    let epsilon = match source {
        Disagreement::Iid(eps) => *eps,
        Disagreement::Rtt(_) => total.cr_disagreements as f64 / total.cr_bits.max(1) as f64,
    };
    Ok(CurveRow {
        epsilon,
        block_error_rate: total.block_errors as f64 / total.blocks as f64,
        key_failure_rate: total.key_failures as f64 / cfg.trials as f64,
        trials: cfg.trials,
        blocks: total.blocks,
        block_errors: total.block_errors,
        key_failures: total.key_failures,
    })
}

/// Parses `lo:hi:steps` into `steps` evenly spaced rates.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>, SimError> {
    let bad = || SimError::Sweep(spec.to_string());
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    if steps == 0 || !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || hi < lo {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
        .collect())
}

/// One curve row per rate; every point reuses the same master seed.
pub fn eps_sweep(cfg: &ExperimentConfig, rates: &[f64]) -> Result<Vec<CurveRow>, SimError> {
    rates
        .iter()
        .map(|&eps| consolidation_experiment(cfg, &Disagreement::Iid(eps)))
        .collect()
}

pub fn write_curve_csv<W: Write>(rows: &[CurveRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CURVE_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_never_fails() {
        let cfg = ExperimentConfig::new(ParamSet::rm16(), 40, 1);
        let row = consolidation_experiment(&cfg, &Disagreement::Iid(0.0)).unwrap();
        assert_eq!(row.block_errors, 0);
        assert_eq!(row.key_failures, 0);
        assert_eq!(row.blocks, 40 * 53);
    }

    #[test]
    fn sequential_equals_parallel() {
        let mut cfg = ExperimentConfig::new(ParamSet::toy8(), 300, 9);
        cfg.trials_per_key = 7;
        let par = consolidation_experiment(&cfg, &Disagreement::Iid(0.08)).unwrap();
        cfg.execution = Execution::Sequential;
        let seq = consolidation_experiment(&cfg, &Disagreement::Iid(0.08)).unwrap();
        assert_eq!(par, seq);
        assert!(par.block_errors > 0);
    }

    #[test]
    fn rtt_source_reports_measured_rate() {
        let mut cfg = ExperimentConfig::new(ParamSet::toy8(), 20, 3);
        cfg.trials_per_key = 5;
        let model = DelayModel {
            private_noise: 0.0,
            ..DelayModel::default()
        };
        let row = consolidation_experiment(&cfg, &Disagreement::Rtt(model)).unwrap();
        assert_eq!(row.epsilon, 0.0);
        assert_eq!(row.block_errors, 0);
    }

    #[test]
    fn sweep_parsing() {
        assert_eq!(parse_sweep("0:0.1:3").unwrap(), vec![0.0, 0.05, 0.1]);
        assert_eq!(parse_sweep("0.2:0.2:1").unwrap(), vec![0.2]);
        for bad in ["0:1", "a:1:2", "0.5:0.1:3", "0:2:3", "0:1:0"] {
            assert!(parse_sweep(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = ExperimentConfig::new(ParamSet::toy8(), 10, 0);
        cfg.w_inj = 2;
        assert!(consolidation_experiment(&cfg, &Disagreement::Iid(0.1)).is_err());
        cfg.w_inj = 0;
        assert!(consolidation_experiment(&cfg, &Disagreement::Iid(1.5)).is_err());
    }
}
