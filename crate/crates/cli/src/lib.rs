//! Command-line frontend for the workbench.
//!
//! Every command prints deterministic output and reports its verdict in the
//! exit code: 0 for equal, pass or proved; 1 for unequal, fail or disproved;
//! 2 for usage, parse and input errors; 3 when a prover gives up.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use ccs_core::equational::eliminate::eliminate_parallel;
use ccs_core::equational::fuzz::{fuzz_system, FuzzConfig};
use ccs_core::equational::proof::{check_proof_with, Proof};
use ccs_core::equational::prove::{prove_ground, ProofOutcome};
use ccs_core::equiv::{EquivContext, Semantics};
use ccs_core::sos::{check_parallel_decomposition, check_prop1_shape, validate_de_simone, DeSimoneRuleSet, Lts, OpRegistry, Prop1Status};
use ccs_core::syntax::{load_axiom_system, parse_rule_set_unchecked, parse_term, render_term, AxiomSystem};
use ccs_core::systems::{axiom_text, builtin_axioms, rule_text, System};
use ccs_core::witness::{family, verify_family, FamilyTag};
use ccs_core::{Alphabet, Error, Term};

/// Environment variable naming a TOML file with default settings.
pub const CONFIG_ENV: &str = "CCSW_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ccsw", version, about = "Workbench for recursion-free CCS")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalArgs {
    /// Comma-separated action names
    #[arg(long, global = true)]
    alphabet: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
    /// TOML file with defaults (overrides the CCSW_CONFIG variable)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a term and print its canonical rendering
    Parse { term: String },
    /// Print the transition system of a closed term
    Lts {
        term: String,
        #[arg(long)]
        rules: Option<String>,
    },
    /// Decide one equivalence between two closed terms
    Equiv {
        #[arg(long)]
        semantics: String,
        #[arg(long)]
        rules: Option<String>,
        p: String,
        q: String,
    },
    /// Every equivalence of the spectrum on two closed terms
    Matrix {
        #[arg(long)]
        rules: Option<String>,
        p: String,
        q: String,
    },
    /// Fuzz the soundness of every axiom of a system
    CheckAxioms {
        /// A path, or the name of a bundled file such as e_rs.ax
        #[arg(long)]
        file: String,
        /// Defaults to the finest bundled semantics of each axiom family
        #[arg(long)]
        semantics: Option<String>,
    },
    /// Eliminate parallel composition with a bundled system
    Eliminate {
        #[arg(long)]
        system: String,
        term: String,
        #[arg(long)]
        emit_proof: Option<PathBuf>,
    },
    /// Prove or disprove a ground equation
    Prove {
        #[arg(long)]
        semantics: String,
        p: String,
        q: String,
        #[arg(long)]
        emit_proof: Option<PathBuf>,
    },
    /// Check a proof file against its axiom system
    CheckProof {
        path: PathBuf,
        /// Axiom file to check against instead of the bundled system named in the proof
        #[arg(long)]
        system: Option<String>,
    },
    /// Build and verify a member of a witness family
    Witness {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rules: Option<String>,
    },
    /// Validate an operator definition
    Ops {
        #[arg(long)]
        rules: String,
        /// Also test p || q ~ f(p,q) + f(q,p) on samples
        #[arg(long)]
        check_pf: bool,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alphabet: Option<Vec<String>>,
    seed: Option<u64>,
    samples: Option<usize>,
    depth: Option<usize>,
    output: Option<Output>,
}

/// Resolved settings.
#[derive(Clone, Debug)]
pub struct Config {
    pub alphabet: Alphabet,
    pub seed: u64,
    pub samples: usize,
    pub depth: usize,
    pub output: Output,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            alphabet: Alphabet::new(["a", "b"]).expect("valid names"),
            seed: 0,
            samples: 500,
            depth: 4,
            output: Output::Text,
        }
    }
}

impl Config {
    fn fuzz(&self) -> FuzzConfig {
        FuzzConfig {
            alphabet: self.alphabet.clone(),
            samples: self.samples,
            depth: self.depth,
            seed: self.seed,
        }
    }
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn resolve(global: &GlobalArgs, env_config: Option<PathBuf>) -> CliResult<Config> {
    let mut cfg = Config::default();
    if let Some(path) = global.config.clone().or(env_config) {
        let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let file: FileConfig = toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        if let Some(names) = file.alphabet {
            cfg.alphabet = Alphabet::new(names)?;
        }
        cfg.seed = file.seed.unwrap_or(cfg.seed);
        cfg.samples = file.samples.unwrap_or(cfg.samples);
        cfg.depth = file.depth.unwrap_or(cfg.depth);
        cfg.output = file.output.unwrap_or(cfg.output);
    }
    if let Some(list) = &global.alphabet {
        cfg.alphabet = Alphabet::parse(list)?;
    }
    cfg.seed = global.seed.unwrap_or(cfg.seed);
    cfg.samples = global.samples.unwrap_or(cfg.samples);
    cfg.depth = global.depth.unwrap_or(cfg.depth);
    cfg.output = global.output.unwrap_or(cfg.output);
    Ok(cfg)
}

/// Runs the command line `argv` (program name first) and captures its output.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let env_config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let result = resolve(&cli.global, env_config).and_then(|cfg| {
        let mut out = String::new();
        let code = dispatch(&cli.command, &cfg, &mut out)?;
        Ok((code, out))
    });
    match result {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn term(src: &str, cfg: &Config) -> CliResult<Term> {
    Ok(parse_term(src, &cfg.alphabet)?)
}

fn closed(src: &str, cfg: &Config) -> CliResult<Term> {
    let t = term(src, cfg)?;
    if !t.is_closed() {
        return Err(Error::OpenTerm(render_term(&t)).into());
    }
    Ok(t)
}

fn semantics(s: &str) -> CliResult<Semantics> {
    Ok(s.parse()?)
}

/// A rule set from a file or a bundled name (`interleave_sync`, `alpha_both`, `broken`).
fn rule_set(arg: &str, cfg: &Config) -> CliResult<DeSimoneRuleSet> {
    let text = match rule_text(arg.trim_end_matches(".rules")) {
        Some(t) if !Path::new(arg).exists() => t.to_string(),
        _ => std::fs::read_to_string(arg).map_err(|e| usage(format!("{arg}: {e}")))?,
    };
    Ok(parse_rule_set_unchecked(&text, &cfg.alphabet)?)
}

fn registry(rules: &Option<String>, cfg: &Config) -> CliResult<OpRegistry> {
    match rules {
        Some(r) => Ok(OpRegistry::new().with(rule_set(r, cfg)?)?),
        None => Ok(OpRegistry::new()),
    }
}

/// An axiom system from a file or a bundled name such as `e_rs.ax`.
fn axiom_system(arg: &str, alphabet: &Alphabet) -> CliResult<AxiomSystem> {
    let stem = arg.trim_end_matches(".ax");
    if !Path::new(arg).exists() && axiom_text(stem).is_some() {
        return Ok(builtin_axioms(stem, alphabet)?);
    }
    if !Path::new(arg).exists() {
        return Err(usage(format!("{arg}: no such file or bundled axiom system")));
    }
    Ok(load_axiom_system(Path::new(arg), alphabet)?)
}

fn emit(out: &mut String, cfg: &Config, value: &Value, text: impl FnOnce(&mut String)) {
    match cfg.output {
        Output::Json => {
            out.push_str(&serde_json::to_string_pretty(value).expect("json values serialise"));
            out.push('\n');
        }
        Output::Text => text(out),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn verdict_code(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_NO
    }
}

fn dispatch(cmd: &Command, cfg: &Config, out: &mut String) -> CliResult<i32> {
    match cmd {
        Command::Parse { term: src } => {
            let t = term(src, cfg)?;
            let v = json!({
                "term": render_term(&t),
                "canonical": render_term(&t.ac_canonical()),
                "size": t.size(),
                "closed": t.is_closed(),
            });
            emit(out, cfg, &v, |o| {
                let _ = writeln!(o, "{}", render_term(&t));
            });
            Ok(EXIT_OK)
        }
        Command::Lts { term: src, rules } => {
            let t = closed(src, cfg)?;
            let lts = Lts::build(&t, &registry(rules, cfg)?)?;
            emit(out, cfg, &lts.to_json(), |o| {
                let _ = writeln!(o, "{} states, {} transitions", lts.len(), lts.transition_count());
                for (i, s) in lts.states().iter().enumerate() {
                    let _ = writeln!(o, "s{i} = {}", render_term(s));
                }
                for (i, a, j) in lts.transitions() {
                    let _ = writeln!(o, "s{i} -{a}-> s{j}");
                }
            });
            Ok(EXIT_OK)
        }
        Command::Equiv { semantics: s, rules, p, q } => {
            let s = semantics(s)?;
            let (p, q) = (closed(p, cfg)?, closed(q, cfg)?);
            let v = EquivContext::new(&p, &q, &registry(rules, cfg)?)?.verdict(s);
            let value = serde_json::to_value(&v).map_err(Error::from)?;
            emit(out, cfg, &value, |o| {
                let word = if v.equal { "equal" } else { "not equal" };
                let _ = writeln!(o, "{word} modulo {s}");
                if let Some(w) = &v.witness {
                    let _ = writeln!(o, "witness: {}", serde_json::to_string(w).expect("json values serialise"));
                }
            });
            Ok(verdict_code(v.equal))
        }
        Command::Matrix { rules, p, q } => {
            let (p, q) = (closed(p, cfg)?, closed(q, cfg)?);
            let m = EquivContext::new(&p, &q, &registry(rules, cfg)?)?.matrix();
            let value = Value::Object(m.iter().map(|(s, e)| (s.to_string(), Value::Bool(*e))).collect());
            emit(out, cfg, &value, |o| {
                for (s, e) in &m {
                    let _ = writeln!(o, "{:<4}{}", s.to_string(), if *e { "equal" } else { "-" });
                }
            });
            Ok(EXIT_OK)
        }
        Command::CheckAxioms { file, semantics: s } => {
            let sys = axiom_system(file, &cfg.alphabet)?;
            let sem = s.as_deref().map(semantics).transpose()?;
            let reports = fuzz_system(&sys, sem, &cfg.fuzz(), &OpRegistry::new())?;
            let all = reports.iter().all(|r| r.outcome.passed());
            let value = json!({
                "system": sys.name,
                "samples": cfg.samples,
                "depth": cfg.depth,
                "seed": cfg.seed,
                "pass": all,
                "axioms": reports,
            });
            emit(out, cfg, &value, |o| {
                for r in &reports {
                    let status = if r.outcome.passed() { "pass" } else { "FAIL" };
                    let _ = writeln!(o, "{:<28}{:<5}{status}", r.name, r.semantics.to_string());
                }
                let failed = reports.iter().filter(|r| !r.outcome.passed()).count();
                let _ = writeln!(o, "{} axioms, {failed} failed", reports.len());
            });
            Ok(verdict_code(all))
        }
        Command::Eliminate { system, term: src, emit_proof } => {
            let kind: System = system.parse()?;
            let t = closed(src, cfg)?;
            let e = eliminate_parallel(&t, kind, &cfg.alphabet)?;
            let proof = e.proof();
            if let Some(path) = emit_proof {
                write_file(path, &proof.to_json())?;
            }
            let value = json!({
                "system": kind.to_string(),
                "term": render_term(&t),
                "result": render_term(e.term()),
                "moves": e.moves(),
                "steps": proof.steps.len(),
            });
            emit(out, cfg, &value, |o| {
                let _ = writeln!(o, "{}", render_term(e.term()));
                let _ = writeln!(o, "{} moves, {} proof steps", e.moves(), proof.steps.len());
            });
            Ok(EXIT_OK)
        }
        Command::Prove { semantics: s, p, q, emit_proof } => {
            let s = semantics(s)?;
            let (p, q) = (closed(p, cfg)?, closed(q, cfg)?);
            let outcome = prove_ground(&p, &q, s, &cfg.alphabet)?;
            if let (Some(path), ProofOutcome::Proved { proof }) = (emit_proof, &outcome) {
                write_file(path, &proof.to_json())?;
            }
            let value = serde_json::to_value(&outcome).map_err(Error::from)?;
            emit(out, cfg, &value, |o| match &outcome {
                ProofOutcome::Proved { proof } => {
                    let gap = proof.trusted_gap.as_deref().map(|g| format!(", trusted gap {g}")).unwrap_or_default();
                    let _ = writeln!(o, "proved in {} steps from {}{gap}", proof.steps.len(), proof.system);
                }
                ProofOutcome::Disproved { verdict } => {
                    let _ = writeln!(o, "disproved: not equal modulo {s}");
                    if let Some(w) = &verdict.witness {
                        let _ = writeln!(o, "witness: {}", serde_json::to_string(w).expect("json values serialise"));
                    }
                }
                ProofOutcome::Unknown { reason } => {
                    let _ = writeln!(o, "unknown: {reason}");
                }
            });
            Ok(match outcome {
                ProofOutcome::Proved { .. } => EXIT_OK,
                ProofOutcome::Disproved { .. } => EXIT_NO,
                ProofOutcome::Unknown { .. } => EXIT_UNKNOWN,
            })
        }
        Command::CheckProof { path, system } => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let proof = Proof::from_json(&text)?;
            let sys = axiom_system(system.as_deref().unwrap_or(&proof.system), &proof.alphabet)?;
            let result = check_proof_with(&proof, &sys, &OpRegistry::new());
            let value = match &result {
                Ok(()) => json!({"valid": true, "system": sys.name, "steps": proof.steps.len()}),
                Err(e) => json!({"valid": false, "system": sys.name, "step": e.step, "reason": e.reason}),
            };
            emit(out, cfg, &value, |o| {
                let _ = match &result {
                    Ok(()) => writeln!(o, "valid proof of {} steps from {}", proof.steps.len(), sys.name),
                    Err(e) => writeln!(o, "invalid: {e}"),
                };
            });
            Ok(verdict_code(result.is_ok()))
        }
        Command::Witness { family: tag, n, rules } => {
            let tag: FamilyTag = tag.parse()?;
            let rs = rules.as_deref().map(|r| rule_set(r, cfg)).transpose()?;
            let w = family(tag, *n, &cfg.alphabet, rs.as_ref())?;
            let report = verify_family(&w, &cfg.fuzz())?;
            // reports are JSON in both output modes
            out.push_str(&serde_json::to_string(&report).map_err(Error::from)?);
            out.push('\n');
            let asymmetric = report.lhs_summand.unwrap_or(true) && !report.rhs_summand.unwrap_or(false);
            Ok(verdict_code(report.sound && asymmetric))
        }
        Command::Ops { rules, check_pf } => {
            let rs = rule_set(rules, cfg)?;
            let violations: Vec<String> = validate_de_simone(&rs).iter().map(|v| v.to_string()).collect();
            let prop1 = check_prop1_shape(&rs, &cfg.alphabet, cfg.samples, cfg.seed);
            let pf = if *check_pf {
                Some(check_parallel_decomposition(&rs, &cfg.alphabet, cfg.samples, cfg.seed, cfg.depth)?)
            } else {
                None
            };
            let ok = violations.is_empty() && prop1.status != Prop1Status::Fail && pf.as_ref().is_none_or(|v| v.passed());
            let value = json!({
                "op": rs.op.to_string(),
                "rules": rs.rules.len(),
                "de_simone": violations.is_empty(),
                "violations": violations,
                "prop1": prop1,
                "parallel_decomposition": pf,
            });
            emit(out, cfg, &value, |o| {
                let _ = writeln!(o, "operator {} with {} rules", rs.op, rs.rules.len());
                if violations.is_empty() {
                    let _ = writeln!(o, "de Simone format: ok");
                } else {
                    for v in &violations {
                        let _ = writeln!(o, "violation: {v}");
                    }
                }
                let _ = writeln!(o, "rule shapes: {:?}", prop1.status);
                if let Some(v) = &pf {
                    let _ = writeln!(o, "parallel decomposition: {}", serde_json::to_string(v).expect("json values serialise"));
                }
            });
            Ok(verdict_code(ok))
        }
    }
}
