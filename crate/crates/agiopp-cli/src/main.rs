use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use agiopp::algebra::Fe;
use agiopp::config::{read_word, write_word, CoinsConfig, ConfigError, PlanConfig};
use agiopp::foldplan::{tower_table, validate_plan, FoldingPlan, Schedule};
use agiopp::iopp::{prove, verify, IoppError, MerkleTree, ProofTranscript, VerifyError};
use agiopp::soundness::{best_epsilon, report, worked_example, SoundnessError};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Parser)]
#[command(name = "agiopp", version, about = "Proximity proofs for AG codes on Kummer curves and the Hermitian tower")]
struct Cli {
    /// Worker threads for folding and hashing (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    FiatShamir,
    Interactive,
}

#[derive(clap::Args)]
struct Protocol {
    /// Coin mode; overrides the config.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Seed for interactive coins; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Query repetitions; overrides the config.
    #[arg(long)]
    t: Option<usize>,
    /// Target soundness 2^-kappa, used when t is not given.
    #[arg(long)]
    kappa: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Build and validate a folding plan.
    Plan {
        #[arg(long)]
        config: PathBuf,
        /// Write the level summaries and validation report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a message (or a random one) into a codeword of C_0.
    Encode {
        #[arg(long)]
        config: PathBuf,
        /// Message file with dim C_0 elements; random when absent.
        #[arg(long)]
        message: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the prover on a word and write the proof.
    Prove {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        word: PathBuf,
        #[command(flatten)]
        protocol: Protocol,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a proof; exit 0 on accept, 1 on reject.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        /// The committed word; its root must match the proof.
        #[arg(long)]
        word: Option<PathBuf>,
        #[command(flatten)]
        protocol: Protocol,
    },
    /// Soundness bounds for the config's schedule.
    Soundness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        kappa: Option<u32>,
        #[arg(long)]
        t: Option<u64>,
        /// Distance of the word as a fraction "a/b".
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The published worked soundness example.
    #[command(name = "paper-example")]
    WorkedExample {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The tower parameter table with its rate certificates.
    Table1 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time encoding, proving and verifying.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        protocol: Protocol,
        #[arg(long, default_value_t = 0)]
        seed_word: u64,
    },
}

enum Failure {
    Reject(String),
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Reject(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SoundnessError> for Failure {
    fn from(e: SoundnessError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<IoppError> for Failure {
    fn from(e: IoppError) -> Self {
        match e {
            IoppError::LengthMismatch { .. }
            | IoppError::NotConstant { .. }
            | IoppError::NoFinalCode
            | IoppError::NoRepetitions
            | IoppError::TooManyQueries { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn io(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| io(path, e))
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Internal(e.to_string()))?;
    write(path, s.as_bytes())
}

struct Loaded {
    config: PlanConfig,
    plan: FoldingPlan,
    schedule: Schedule,
}

fn load(path: &Path, protocol: Option<&Protocol>) -> Result<Loaded, Failure> {
    let mut config = PlanConfig::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let Some(p) = protocol {
        if let Some(m) = p.mode {
            config.mode = match m {
                Mode::FiatShamir => CoinsConfig::FiatShamir,
                Mode::Interactive => CoinsConfig::Interactive,
            };
        }
        if let Some(s) = p.seed {
            config.seed = s;
        }
        if p.t.is_some() {
            config.t = p.t;
        }
        if p.kappa.is_some() {
            config.kappa = p.kappa;
            if p.t.is_none() {
                config.t = None;
            }
        }
    }
    let plan = config.build_plan()?;
    let schedule = config.build_schedule(&plan)?;
    Ok(Loaded { config, plan, schedule })
}

fn load_word(l: &Loaded, path: &Path) -> Result<Vec<Fe>, Failure> {
    let w = read_word(&l.plan.field, &read(path)?)?;
    Ok(l.config.lift_word(&l.plan, &w)?)
}

fn random_message(l: &Loaded, seed: u64) -> Vec<Fe> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..l.plan.levels[0].dim()).map(|_| l.plan.field.random(&mut rng)).collect()
}

fn encode(l: &Loaded, msg: &[Fe]) -> Result<Vec<Fe>, Failure> {
    let k = l.plan.levels[0].dim();
    if msg.len() != k {
        return Err(Failure::Usage(format!("message has {} elements, dim C_0 = {k}", msg.len())));
    }
    l.plan.levels[0].encode(msg).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>, Failure> {
    let bad = || Failure::Usage(format!("expected a fraction a/b, got {s:?}"));
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if b == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(a, b))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Internal(e.to_string()))?;
    }
    match cli.command {
        Command::Plan { config, out } => {
            let l = load(&config, None)?;
            print!("{}", l.plan.summary());
            let rep = validate_plan(&l.plan);
            for c in rep.failures() {
                println!("violation: {} at {:?}: {}", c.clause, c.at, c.detail);
            }
            if !rep.skipped.is_empty() {
                println!("evaluation checks skipped on levels {:?} (too large)", rep.skipped);
            }
            println!("validation: {} checks, {} failed", rep.checks.len(), rep.failures().len());
            if let Some(out) = out {
                write_json(&out, &serde_json::json!({ "levels": l.plan.summaries(), "validation": rep }))?;
            }
            if !rep.is_ok() {
                return Err(Failure::Usage("plan fails validation".into()));
            }
        }
        Command::Encode { config, message, seed, out } => {
            let l = load(&config, None)?;
            let msg = match message {
                Some(p) => read_word(&l.plan.field, &read(&p)?)?,
                None => random_message(&l, seed),
            };
            let word = encode(&l, &msg)?;
            write(&out, &write_word(&l.plan.field, &word))?;
            println!("wrote {} elements to {}", word.len(), out.display());
        }
        Command::Prove { config, word, protocol, out } => {
            let l = load(&config, Some(&protocol))?;
            let w = load_word(&l, &word)?;
            let cfg = l.config.protocol(&l.schedule)?;
            let proof = prove(&l.schedule, &w, &cfg)?;
            let bytes = proof.to_bytes(&l.schedule.field);
            write(&out, &bytes)?;
            println!(
                "proof: {} rounds, t = {}, {} bytes -> {}",
                l.schedule.rounds(),
                cfg.t,
                bytes.len(),
                out.display()
            );
        }
        Command::Verify { config, proof, word, protocol } => {
            let l = load(&config, Some(&protocol))?;
            let bytes = read(&proof)?;
            let p = ProofTranscript::from_bytes(&bytes, &l.schedule)
                .map_err(|e: VerifyError| Failure::Reject(e.to_string()))?;
            if let Some(wp) = word {
                let w = load_word(&l, &wp)?;
                if w.len() != l.schedule.n() {
                    return Err(Failure::Usage(format!("word has {} elements, n = {}", w.len(), l.schedule.n())));
                }
                let root = MerkleTree::commit(&l.schedule.field, 0, &w).root();
                if p.roots.first() != Some(&root) {
                    return Err(Failure::Reject("proof does not commit to the given word".into()));
                }
            }
            let d = verify(&l.schedule, &p, l.config.coins()).map_err(|e| Failure::Reject(e.to_string()))?;
            println!("{d}");
            if !d.accept {
                return Err(Failure::Reject(d.to_string()));
            }
        }
        Command::Soundness { config, kappa, t, delta, out } => {
            let l = load(&config, None)?;
            let mut params = l.config.soundness_params(&l.schedule);
            params.delta = delta.as_deref().map(parse_ratio).transpose()?;
            let kappa = kappa.or(l.config.kappa);
            if kappa == Some(0) {
                return Err(Failure::Usage("kappa must be positive".into()));
            }
            // without a fixed epsilon, search for the one minimizing t
            if let (None, Some(k)) = (l.config.epsilon, kappa) {
                if let Ok((eps, _)) = best_epsilon(&params, k) {
                    params.epsilon = eps;
                }
            }
            let r = report(&params, kappa, t)?;
            print!("{r}");
            if let Some(out) = out {
                write_json(&out, &r)?;
            }
        }
        Command::WorkedExample { out } => {
            let ex = worked_example();
            println!("genus = {}, dim C_0 = {}", ex.genus, ex.dim_c0);
            print!("{}", ex.report);
            if let Some(out) = out {
                write_json(&out, &ex)?;
            }
        }
        Command::Table1 { out } => {
            let rows = tower_table();
            println!(
                "{:>4} {:>4} {:>6} {:>8} {:>8} {:>8} {:>10} {:>12} {:>9}",
                "q", "top", "R", "1-rho", "g", "d_top", "bound", "rho n_0", "certified"
            );
            for r in &rows {
                println!(
                    "{:>4} {:>4} {:>6} {:>8} {:>8} {:>8} {:>10} {:>12} {:>9}",
                    r.q,
                    r.row.top,
                    format!("{}/{}", r.row.rate.0, r.row.rate.1),
                    format!("{}/{}", r.row.one_minus_rho.0, r.row.one_minus_rho.1),
                    r.genus,
                    r.d_top,
                    r.bound,
                    r.rho_n0,
                    r.certified
                );
            }
            if let Some(out) = out {
                write_json(&out, &rows)?;
            }
            if !rows.iter().all(|r| r.certified) {
                return Err(Failure::Internal("a table row is not certified".into()));
            }
        }
        Command::Bench { config, protocol, seed_word } => {
            let l = load(&config, Some(&protocol))?;
            let start = Instant::now();
            let word = encode(&l, &random_message(&l, seed_word))?;
            let word = l.config.lift_word(&l.plan, &word)?;
            let t_encode = start.elapsed();
            let cfg = l.config.protocol(&l.schedule)?;
            let start = Instant::now();
            let proof = prove(&l.schedule, &word, &cfg)?;
            let t_prove = start.elapsed();
            let bytes = proof.to_bytes(&l.schedule.field);
            let start = Instant::now();
            let d = verify(&l.schedule, &proof, cfg.coins).map_err(|e| Failure::Internal(e.to_string()))?;
            let t_verify = start.elapsed();
            println!("n = {}, rounds = {}, t = {}", l.schedule.n(), l.schedule.rounds(), cfg.t);
            println!("encode {t_encode:.2?}, prove {t_prove:.2?}, verify {t_verify:.2?}");
            println!(
                "proof {} bytes, {} field elements; proof length {} < n",
                bytes.len(),
                proof.field_elements(),
                l.plan.proof_length()
            );
            if !d.accept {
                return Err(Failure::Internal(format!("honest proof rejected: {d}")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Reject(m) | Failure::Usage(m) | Failure::Internal(m)) = &f;
            let label = match f {
                Failure::Reject(_) => "reject",
                Failure::Usage(_) => "error",
                Failure::Internal(_) => "internal error",
            };
            eprintln!("{label}: {m}");
            ExitCode::from(f.code())
        }
    }
}
