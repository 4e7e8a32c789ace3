use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use stit_core::calculus::{check_derivation, CalculusConfig, Certificate, Mode};
use stit_core::corpus::{atom_names, random_formula};
use stit_core::formula::{parse, print, AgentCount, Formula};
use stit_core::prover::{prove, ProofSearchResult, ProveError, ProverConfig, SearchStats, ROOT};
use stit_core::semantics::{check_frame, decide_by_enumeration, evaluate, extract_countermodel, Verdict};

#[derive(Parser)]
#[command(name = "stit", version, about = "Prover, proof checker and model-enumeration oracle for STIT logics with limited choice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a single-agent formula and optionally emit a certificate or counter-model
    Prove {
        formula: String,
        /// Choice bound n; 0 means unlimited
        #[arg(long, default_value_t = 0)]
        choices: u32,
        /// Write the proof certificate here when the formula is provable
        #[arg(long, value_name = "PATH")]
        emit_proof: Option<PathBuf>,
        /// Write the counter-model here when the formula is unprovable
        #[arg(long, value_name = "PATH")]
        emit_model: Option<PathBuf>,
        /// Also print the proof tree or the stable sequent, and search statistics
        #[arg(short, long)]
        verbose: bool,
    },
    /// Check a proof certificate
    Check {
        file: PathBuf,
        /// Number of agents (defaults to the certificate's)
        #[arg(long)]
        agents: Option<u32>,
        /// Choice bound (defaults to the certificate's)
        #[arg(long)]
        choices: Option<u32>,
        /// Calculus: g3 or refined (defaults to the certificate's)
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Decide validity by enumerating small models
    Oracle {
        formula: String,
        #[arg(long, default_value_t = 1)]
        agents: u32,
        #[arg(long, default_value_t = 0)]
        choices: u32,
        /// Largest model size to try (defaults to a size sufficient for validity)
        #[arg(long)]
        max_worlds: Option<usize>,
    },
    /// Compare the prover and the oracle on random formulas
    Fuzz {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        atoms: usize,
        #[arg(long, default_value_t = 0)]
        choices: u32,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

fn internal(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, error: error.into() }
}

fn prove_failure(e: ProveError) -> Failure {
    match e {
        ProveError::MultiAgent(_) => usage(e),
        other => internal(other),
    }
}

fn agent_count(m: u32) -> Result<AgentCount, Failure> {
    AgentCount::new(m).ok_or_else(|| usage(anyhow!("--agents must be at least 1")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display())).map_err(usage)
}

fn print_stats(s: &SearchStats) {
    println!(
        "steps: {}, labels: {} (bound {}), APC applications: {}",
        s.steps, s.max_labels, s.label_bound, s.apc_applications
    );
}

fn run_prove(
    text: &str,
    n: u32,
    emit_proof: Option<&Path>,
    emit_model: Option<&Path>,
    verbose: bool,
) -> Result<u8, Failure> {
    let goal = parse(text, AgentCount::ONE).map_err(usage)?;
    let cfg = ProverConfig::new(n);
    let outcome = prove(&cfg, &goal).map_err(prove_failure)?;
    match &outcome.result {
        ProofSearchResult::Provable(d) => {
            println!("provable");
            if verbose {
                print!("{}", d.pretty());
                print_stats(&outcome.stats);
            }
            if let Some(path) = emit_proof {
                let calculus = cfg.calculus();
                check_derivation(&calculus, d).map_err(|e| internal(anyhow!("emitted proof fails to check: {e}")))?;
                write_file(path, &Certificate::new(&calculus, d).to_json())?;
            }
            Ok(0)
        }
        ProofSearchResult::Unprovable(stable) => {
            println!("unprovable");
            if verbose {
                println!("stable sequent: {stable}");
                print_stats(&outcome.stats);
            }
            if let Some(path) = emit_model {
                let (model, _) = extract_countermodel(stable, ROOT, n).map_err(internal)?;
                let report = check_frame(&model, AgentCount::ONE, n);
                if !report.is_ok() || evaluate(&model, ROOT.0, &goal) != Ok(false) {
                    return Err(internal(anyhow!("extracted counter-model fails to verify")));
                }
                write_file(path, &model.to_json())?;
            }
            Ok(1)
        }
    }
}

fn run_check(file: &Path, agents: Option<u32>, choices: Option<u32>, mode: Option<Mode>) -> Result<u8, Failure> {
    let text = fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display())).map_err(usage)?;
    let cert = match Certificate::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            println!("invalid certificate: {e}");
            return Ok(1);
        }
    };
    let header = match cert.config() {
        Ok(c) => c,
        Err(e) => {
            println!("invalid certificate: {e}");
            return Ok(1);
        }
    };
    let cfg = CalculusConfig {
        m: match agents {
            Some(m) => agent_count(m)?,
            None => header.m,
        },
        n: choices.unwrap_or(header.n),
        mode: mode.unwrap_or(header.mode),
    };
    // formulas are parsed against the session's agent count
    let cert = Certificate { m: cfg.m.get(), ..cert };
    let derivation = match cert.derivation() {
        Ok(d) => d,
        Err(e) => {
            println!("invalid certificate: {e}");
            return Ok(1);
        }
    };
    match check_derivation(&cfg, &derivation) {
        Ok(()) => {
            println!("valid certificate");
            Ok(0)
        }
        Err(e) => {
            println!("invalid certificate: {e}");
            Ok(1)
        }
    }
}

fn run_oracle(text: &str, m: u32, n: u32, max_worlds: Option<usize>) -> Result<u8, Failure> {
    let m = agent_count(m)?;
    let goal = parse(text, m).map_err(usage)?;
    match decide_by_enumeration(&goal, m, n, max_worlds).map_err(usage)? {
        Verdict::Valid => {
            println!("valid");
            Ok(0)
        }
        Verdict::ValidUpToBound { max_worlds } => {
            println!("valid up to {max_worlds} worlds");
            Ok(0)
        }
        Verdict::CounterModel { model, world } => {
            println!("counter-model, falsified at world {world}:");
            println!("{}", model.to_json());
            Ok(1)
        }
    }
}

enum Case {
    Agree,
    Disagree { prover: bool },
    Error(String),
}

fn run_fuzz(depth: usize, atoms: usize, n: u32, count: usize, seed: u64) -> Result<u8, Failure> {
    if atoms == 0 {
        return Err(usage(anyhow!("--atoms must be at least 1")));
    }
    let names = atom_names(atoms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let formulas: Vec<Formula> = (0..count).map(|_| random_formula(&mut rng, depth, &names)).collect();
    let cases: Vec<Case> = formulas
        .par_iter()
        .map(|g| {
            let proved = match prove(&ProverConfig::new(n), g) {
                Ok(o) => o.result.is_provable(),
                Err(e) => return Case::Error(e.to_string()),
            };
            match decide_by_enumeration(g, AgentCount::ONE, n, None) {
                Ok(v) if v.is_counter_model() != proved => Case::Agree,
                Ok(_) => Case::Disagree { prover: proved },
                Err(e) => Case::Error(e.to_string()),
            }
        })
        .collect();
    for (g, case) in formulas.iter().zip(&cases) {
        match case {
            Case::Agree => {}
            Case::Disagree { prover } => {
                let (p, o) = if *prover { ("provable", "counter-model") } else { ("unprovable", "valid") };
                println!("disagreement on {}: prover says {p}, oracle says {o}", print(g));
                return Ok(1);
            }
            Case::Error(e) => return Err(internal(anyhow!("on {}: {e}", print(g)))),
        }
    }
    println!("agreement: {count}/{count}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Prove { formula, choices, emit_proof, emit_model, verbose } => {
            run_prove(formula, *choices, emit_proof.as_deref(), emit_model.as_deref(), *verbose)
        }
        Command::Check { file, agents, choices, mode } => run_check(file, *agents, *choices, *mode),
        Command::Oracle { formula, agents, choices, max_worlds } => {
            run_oracle(formula, *agents, *choices, *max_worlds)
        }
        Command::Fuzz { depth, atoms, choices, count, seed } => run_fuzz(*depth, *atoms, *choices, *count, *seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
