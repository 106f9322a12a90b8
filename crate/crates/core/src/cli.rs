//! Command-line front end.
//!
//! Randomness: each subcommand seeds one ChaCha20 generator from `--seed`
//! (or from the OS, printing the chosen seed to stderr). `simulate
//! consolidation` gives chunk `c` of every sweep point sub-stream `c` of that
//! seed, so its output does not depend on thread count.
//!
//! Exit codes: 0 success, 2 usage error, 3 decapsulation failure, 4 I/O or
//! file-format error, 1 anything else.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;
use thiserror::Error;

use crate::accounting::{render_table, SecurityReport};
use crate::attack::exhaustive_attack;
use crate::format;
use crate::kem::{self, CommonRandomnessView, ErrorBudget, KemError, SharedKey};
use crate::keygen::{keygen, CrConfig};
use crate::params::{ParamSet, Preset};
use crate::rng;
use crate::sim::{self, DelayModel, Execution, ExperimentConfig, JitterFamily};

#[derive(Debug, Parser)]
#[command(
    name = "rkem",
    version,
    about = "Randomized code-based key encapsulation and consolidation"
)]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen(KeygenArgs),
    /// Encapsulate a fresh (or given) key under a public key.
    Encap(EncapArgs),
    /// Recover the key from a ciphertext.
    Decap(DecapArgs),
    /// Print key sizes and search exponents.
    Analyze(AnalyzeArgs),
    /// Run simulations.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Run the exhaustive attack on a toy instance.
    #[command(subcommand)]
    Attack(AttackCommand),
}

#[derive(Debug, Args)]
struct KeygenArgs {
    #[arg(long, default_value = "rm16")]
    preset: Preset,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_pub: PathBuf,
    #[arg(long)]
    out_priv: PathBuf,
    /// Number of common-randomness positions in the input vector.
    #[arg(long, default_value_t = 0)]
    cr_r1: usize,
    /// Number of common-randomness positions in the message.
    #[arg(long, default_value_t = 0)]
    cr_r2: usize,
    /// Mask every input coordinate with common randomness.
    #[arg(long, conflicts_with_all = ["cr_r1", "cr_r2"])]
    cr_full_mask: bool,
}

#[derive(Debug, Args)]
struct EncapArgs {
    #[arg(long = "pub")]
    public: PathBuf,
    #[arg(long)]
    ct: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Errors per block; defaults to the code's correction capability.
    #[arg(long)]
    budget: Option<usize>,
    /// Text file of 0/1 common-randomness bits (R1 bits, then R2 bits).
    #[arg(long)]
    cr_bits: Option<PathBuf>,
    /// Encapsulate this key (hex) instead of a random one.
    #[arg(long)]
    key_hex: Option<String>,
}

#[derive(Debug, Args)]
struct DecapArgs {
    #[arg(long = "priv")]
    private: PathBuf,
    #[arg(long)]
    ct: PathBuf,
    #[arg(long)]
    cr_bits: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Parameter sets to report (default: rm16 and rm32).
    #[arg(long)]
    preset: Vec<Preset>,
    /// CSV instead of a text table.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// Simulate a looped round-trip-time exchange and extract bits.
    Rtt(RttArgs),
    /// Block and key error rates with fully masked consolidation.
    Consolidation(ConsolidationArgs),
}

#[derive(Debug, Args)]
struct RttArgs {
    #[arg(long, default_value_t = 2)]
    loops: usize,
    #[arg(long, default_value_t = 1000)]
    packets: usize,
    #[arg(long, default_value_t = 10.0)]
    base_delay: f64,
    /// `exp` or `normal`.
    #[arg(long, default_value = "exp")]
    jitter: String,
    #[arg(long, default_value_t = 1.0)]
    jitter_scale: f64,
    #[arg(long, default_value_t = 0.25)]
    private_noise: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConsolidationArgs {
    #[arg(long, default_value = "rm16")]
    preset: Preset,
    /// `lo:hi:steps`.
    #[arg(long, default_value = "0:0.1:11")]
    eps_sweep: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Injected errors per block.
    #[arg(long, default_value_t = 0)]
    budget: usize,
    #[arg(long, default_value_t = 32)]
    trials_per_key: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Run chunks on one thread.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum AttackCommand {
    /// Exhaustive codeword search on a freshly generated toy instance.
    Toy(ToyAttackArgs),
}

#[derive(Debug, Args)]
struct ToyAttackArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    budget: usize,
    /// Number of RM(8,4,4) components.
    #[arg(long, default_value_t = 2)]
    components: usize,
    #[arg(long, default_value_t = 0)]
    cr_r1: usize,
    #[arg(long, default_value_t = 0)]
    cr_r2: usize,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Format(#[from] format::FormatError),
    #[error("decapsulation failed in blocks {0:?}")]
    Decap(Vec<usize>),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Decap(_) => 3,
            CliError::Io { .. } | CliError::Format(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<KemError> for CliError {
    fn from(e: KemError) -> Self {
        match e {
            KemError::DecapFailure { blocks } => CliError::Decap(blocks),
            KemError::CrLength { .. } | KemError::BudgetExceedsT { .. } | KemError::KeyOutOfRange { .. } => {
                CliError::Usage(e.to_string())
            }
            KemError::CiphertextLength { .. } => CliError::Format(format::FormatError::Invalid(e.to_string())),
            other => CliError::Other(other.to_string()),
        }
    }
}

fn other<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Other(e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(e: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rng::entropy_seed();
        let _ = writeln!(err, "seed: {s}");
        s
    })
}

fn load_cr(path: Option<&Path>, r1: usize, r2: usize) -> Result<CommonRandomnessView, CliError> {
    match path {
        None if r1 + r2 == 0 => Ok(CommonRandomnessView::none()),
        None => Err(CliError::Usage(format!(
            "key has {r1}+{r2} common-randomness positions; pass --cr-bits"
        ))),
        Some(p) => {
            let text = String::from_utf8(read(p)?)
                .map_err(|e| CliError::Format(format::FormatError::Invalid(e.to_string())))?;
            let bits = format::parse_bit_text(&text)?;
            Ok(CommonRandomnessView::from_flat(&bits, r1, r2)?)
        }
    }
}

/// Parses argv (including the program name), runs the subcommand and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Keygen(a) => cmd_keygen(a, cli.json, out, err),
        Command::Encap(a) => cmd_encap(a, cli.json, out, err),
        Command::Decap(a) => cmd_decap(a, cli.json, out),
        Command::Analyze(a) => cmd_analyze(a, cli.json, out),
        Command::Simulate(SimulateCommand::Rtt(a)) => cmd_rtt(a, cli.json, out, err),
        Command::Simulate(SimulateCommand::Consolidation(a)) => cmd_consolidation(a, cli.json, out, err),
        Command::Attack(AttackCommand::Toy(a)) => cmd_attack(a, out, err),
    }
}

fn cmd_keygen(a: &KeygenArgs, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let params = a.preset.params();
    let cr = if a.cr_full_mask {
        CrConfig::full_mask(&params)
    } else {
        CrConfig::new(a.cr_r1, a.cr_r2)
    };
    let seed = resolve_seed(a.seed, err);
    let mut rng = rng::seeded(seed);
    let (pk, sk) = keygen(&params, &mut rng, cr).map_err(|e| match e {
        crate::keygen::KeygenError::CommonRandomness(m) => CliError::Usage(m),
        e => other(e),
    })?;
    let pub_bytes = format::encode_public_key(&pk);
    write(&a.out_pub, &pub_bytes)?;
    write(&a.out_priv, &format::encode_private_key(&sk))?;
    if json {
        let v = json!({
            "preset": a.preset.name(),
            "seed": seed,
            "public_key_rows": pk.p.rows(),
            "public_key_cols": pk.p.cols(),
            "public_key_bits": pk.p.rows() * pk.p.cols(),
            "r1": pk.r1.len(),
            "r2": pk.r2.len(),
        });
        writeln!(out, "{v}").map_err(io_err)?;
    } else {
        writeln!(
            out,
            "{}: public key {}x{} ({} bits), |R1|={} |R2|={}",
            a.preset,
            pk.p.rows(),
            pk.p.cols(),
            pk.p.rows() * pk.p.cols(),
            pk.r1.len(),
            pk.r2.len()
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn parse_key_hex(hex: &str, params: &ParamSet) -> Result<SharedKey, CliError> {
    let value =
        BigUint::parse_bytes(hex.as_bytes(), 16).ok_or_else(|| CliError::Usage(format!("invalid hex key {hex:?}")))?;
    Ok(SharedKey::from_value(&value, params)?)
}

fn cmd_encap(a: &EncapArgs, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let pk = format::decode_public_key(&read(&a.public)?)?;
    let params = pk.params;
    let cr = load_cr(a.cr_bits.as_deref(), pk.r1.len(), pk.r2.len())?;
    let seed = resolve_seed(a.seed, err);
    let mut rng = rng::seeded(seed);
    let key = match &a.key_hex {
        Some(h) => parse_key_hex(h, &params)?,
        None => SharedKey::random(&params, &mut rng),
    };
    let budget = ErrorBudget::new(a.budget.unwrap_or(params.t));
    let ct = kem::encapsulate(&pk, &key, &mut rng, &cr, budget)?;
    write(&a.ct, &format::encode_ciphertext(&ct))?;
    let hex = key.to_hex(&params);
    if json {
        writeln!(out, "{}", json!({ "key": hex, "seed": seed, "budget": budget.w_total })).map_err(io_err)?;
    } else {
        writeln!(out, "{hex}").map_err(io_err)?;
    }
    Ok(())
}

fn cmd_decap(a: &DecapArgs, json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let sk = format::decode_private_key(&read(&a.private)?)?;
    let ct = format::decode_ciphertext(&read(&a.ct)?)?;
    let cr = load_cr(a.cr_bits.as_deref(), sk.r1.len(), sk.r2.len())?;
    let result = kem::decapsulate(&sk, &ct, &cr);
    if json {
        let v = match &result {
            Ok(key) => json!({ "ok": true, "key": key.to_hex(&sk.params) }),
            Err(KemError::DecapFailure { blocks }) => json!({ "ok": false, "failed_blocks": blocks }),
            Err(_) => serde_json::Value::Null,
        };
        if !v.is_null() {
            writeln!(out, "{v}").map_err(io_err)?;
        }
    }
    let key = result?;
    if !json {
        writeln!(out, "{}", key.to_hex(&sk.params)).map_err(io_err)?;
    }
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs, json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let presets = if a.preset.is_empty() {
        vec![Preset::Rm16, Preset::Rm32]
    } else {
        a.preset.clone()
    };
    let reports: Vec<SecurityReport> = presets
        .iter()
        .map(|p| SecurityReport::new(p.name(), &p.params()))
        .collect();
    if json {
        let v = serde_json::to_string(&reports).map_err(other)?;
        writeln!(out, "{v}").map_err(io_err)?;
    } else if a.csv {
        writeln!(out, "{}", SecurityReport::CSV_HEADER).map_err(io_err)?;
        if let Some(first) = reports.first() {
            writeln!(out, "{}", first.mceliece_csv_row()).map_err(io_err)?;
        }
        for r in &reports {
            writeln!(out, "{}", r.csv_row()).map_err(io_err)?;
        }
    } else {
        write!(out, "{}", render_table(&reports)).map_err(io_err)?;
    }
    Ok(())
}

fn cmd_rtt(a: &RttArgs, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let jitter: JitterFamily = a
        .jitter
        .parse()
        .map_err(|e: sim::SimError| CliError::Usage(e.to_string()))?;
    let model = DelayModel {
        loops: a.loops,
        packets: a.packets,
        base_delay: a.base_delay,
        jitter,
        jitter_scale: a.jitter_scale,
        private_noise: a.private_noise,
    };
    let seed = resolve_seed(a.seed, err);
    let ex = sim::simulate_exchange(&model, &mut rng::seeded(seed)).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csv = Vec::new();
    sim::write_exchange_csv(&ex, &mut csv).map_err(io_err)?;
    match &a.out {
        Some(p) => write(p, &csv)?,
        None if !json => out.write_all(&csv).map_err(io_err)?,
        None => {}
    }
    if json {
        let v = json!({
            "seed": seed,
            "packets": model.packets,
            "disagreements": ex.extract.disagreements(),
            "disagreement_rate": ex.extract.disagreement_rate(),
        });
        writeln!(out, "{v}").map_err(io_err)?;
    } else if a.out.is_some() {
        writeln!(out, "disagreement rate {:.6}", ex.extract.disagreement_rate()).map_err(io_err)?;
    }
    Ok(())
}

fn cmd_consolidation(
    a: &ConsolidationArgs,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let rates = sim::parse_sweep(&a.eps_sweep).map_err(|e| CliError::Usage(e.to_string()))?;
    let seed = resolve_seed(a.seed, err);
    let cfg = ExperimentConfig {
        params: a.preset.params(),
        trials: a.trials,
        w_inj: a.budget,
        trials_per_key: a.trials_per_key,
        seed,
        execution: if a.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let rows = sim::eps_sweep(&cfg, &rates).map_err(|e| match e {
        sim::SimError::Experiment(m) => CliError::Usage(m),
        e => other(e),
    })?;
    let mut csv = Vec::new();
    sim::write_curve_csv(&rows, &mut csv).map_err(io_err)?;
    match &a.out {
        Some(p) => write(p, &csv)?,
        None if !json => out.write_all(&csv).map_err(io_err)?,
        None => {}
    }
    if json {
        let v = serde_json::to_string(&rows).map_err(other)?;
        writeln!(out, "{v}").map_err(io_err)?;
    }
    Ok(())
}

fn cmd_attack(a: &ToyAttackArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let params = ParamSet::with_components(3, a.components).map_err(|e| CliError::Usage(e.to_string()))?;
    let seed = resolve_seed(a.seed, err);
    let mut rng = rng::seeded(seed);
    let (pk, _) =
        keygen(&params, &mut rng, CrConfig::new(a.cr_r1, a.cr_r2)).map_err(|e| CliError::Usage(e.to_string()))?;
    let key = SharedKey::from_symbols(
        (0..params.r)
            .map(|_| rand::Rng::random_range(&mut rng, 0..params.f as u16))
            .collect(),
        &params,
    )?;
    let cr = CommonRandomnessView::random(&pk, &mut rng);
    let ct = kem::encapsulate(&pk, &key, &mut rng, &cr, ErrorBudget::new(a.budget))?;
    let result = exhaustive_attack(&pk, &ct, a.budget).map_err(|e| CliError::Usage(e.to_string()))?;
    let v = json!({
        "seed": seed,
        "components": params.r,
        "budget": a.budget,
        "true_symbols": key.symbols(),
        "true_key_accepted": result.acceptors.iter().any(|s| s.as_slice() == key.symbols()),
        "acceptor_count": result.acceptors.len(),
        "result": result,
    });
    writeln!(out, "{v}").map_err(io_err)?;
    Ok(())
}
