//! Command-line front end: subcommand dispatch, file loading, and the
//! corpus manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use hylo_core::audit::{audit_derivation, AuditError};
use hylo_core::kernel::{check_derivation, parse_proof, proof_theory_path, CheckReport, ProofFile};
use hylo_core::semantics::{eval, find_countermodel, max_enum_from_env, parse_model, render_model};
use hylo_core::syntax::{parse_formula, print_formula};
use hylo_core::{Formula, Signature, Theory};
use serde::{Deserialize, Serialize};

pub mod corpus;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hylo",
    about = "Proof checker for hybrid-logic natural deduction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print its canonical form.
    Parse {
        /// Signature file (or a theory file, whose signature is used).
        #[arg(long)]
        sig: PathBuf,
        formula: String,
    },
    /// Check a proof file.
    Check {
        proof: PathBuf,
        /// Theory file; defaults to the one named in the proof header.
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula at a world of a model file.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Signature for models that do not declare their own symbols.
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long)]
        world: String,
        formula: String,
    },
    /// Search small models for a point falsifying a formula.
    Countermodel {
        #[arg(long)]
        sig: PathBuf,
        #[arg(long)]
        max_worlds: usize,
        formula: String,
    },
    /// Classify every formula occurrence of an accepted proof.
    Audit {
        proof: PathBuf,
        #[arg(long)]
        theory: Option<PathBuf>,
        /// Print one `<path> <classes> <formula>` line per occurrence.
        #[arg(long)]
        lines: bool,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Reads a signature file, or the signature of a theory file (`.hlt`).
pub fn load_signature(path: &Path) -> Result<Signature, String> {
    if path.extension().is_some_and(|e| e == "hlt") {
        let th = Theory::from_file(path).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(th.signature().clone());
    }
    Signature::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

/// Loads a proof together with its theory: `theory` if given, otherwise
/// the header path resolved against the proof file's directory.
pub fn load_proof(proof: &Path, theory: Option<&Path>) -> Result<(ProofFile, Theory), String> {
    let text = read(proof)?;
    let theory_path = match theory {
        Some(t) => t.to_path_buf(),
        None => {
            let named = proof_theory_path(&text)
                .map_err(|e| format!("{}: {e}", proof.display()))?
                .ok_or_else(|| {
                    format!(
                        "{}: no theory given and none named in the header",
                        proof.display()
                    )
                })?;
            proof.parent().unwrap_or(Path::new(".")).join(named)
        }
    };
    let th =
        Theory::from_file(&theory_path).map_err(|e| format!("{}: {e}", theory_path.display()))?;
    let file =
        parse_proof(&text, th.signature()).map_err(|e| format!("{}: {e}", proof.display()))?;
    Ok((file, th))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonDiagnostic {
    pub path: String,
    pub rule: String,
    pub kind: String,
    pub message: String,
}

/// Machine-readable check report. Field order is fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReport {
    pub verdict: String,
    pub end: Option<String>,
    pub gamma: Vec<String>,
    pub axioms: Vec<String>,
    pub diagnostics: Vec<JsonDiagnostic>,
}

impl From<&CheckReport> for JsonReport {
    fn from(r: &CheckReport) -> Self {
        let strings =
            |set: &std::collections::BTreeSet<Formula>| set.iter().map(print_formula).collect();
        JsonReport {
            verdict: r.verdict.to_string(),
            end: r.end_formula.as_ref().map(print_formula),
            gamma: strings(&r.undischarged),
            axioms: strings(&r.axiom_leaves),
            diagnostics: r
                .diagnostics
                .iter()
                .map(|d| JsonDiagnostic {
                    path: d.path.to_string(),
                    rule: d.rule.clone(),
                    kind: d.kind.to_string(),
                    message: d.message.clone(),
                })
                .collect(),
        }
    }
}

/// Runs a parsed command line, writing to `out` and `err`; returns the
/// exit status.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), String> {
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, String> {
    match cmd {
        Command::Parse { sig, formula } => {
            let sig = load_signature(&sig)?;
            let f = parse_formula(&formula, &sig).map_err(|e| e.to_string())?;
            emit(out, &format!("{}\n", print_formula(&f)))?;
            Ok(EXIT_OK)
        }
        Command::Check {
            proof,
            theory,
            json,
        } => {
            let (file, th) = load_proof(&proof, theory.as_deref())?;
            let report = check_derivation(&file.root, &th);
            if json {
                let text = serde_json::to_string_pretty(&JsonReport::from(&report))
                    .map_err(|e| e.to_string())?;
                emit(out, &format!("{text}\n"))?;
            } else {
                emit(out, &report.render())?;
            }
            Ok(if report.accepted() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Eval {
            model,
            sig,
            world,
            formula,
        } => {
            let base = sig.as_deref().map(load_signature).transpose()?;
            let (m, g) = parse_model(&read(&model)?, base.as_ref())
                .map_err(|e| format!("{}: {e}", model.display()))?;
            let w = m.world(&world).map_err(|e| e.to_string())?;
            let f = parse_formula(&formula, m.signature()).map_err(|e| e.to_string())?;
            let value = eval(&m, &g, w, &f).map_err(|e| e.to_string())?;
            emit(out, &format!("{value}\n"))?;
            Ok(EXIT_OK)
        }
        Command::Countermodel {
            sig,
            max_worlds,
            formula,
        } => {
            let sig = load_signature(&sig)?;
            let f = parse_formula(&formula, &sig).map_err(|e| e.to_string())?;
            match find_countermodel(&f, &sig, max_worlds, max_enum_from_env())
                .map_err(|e| e.to_string())?
            {
                None => {
                    emit(out, &format!("VALID up to {max_worlds}\n"))?;
                    Ok(EXIT_OK)
                }
                Some(c) => {
                    let text = render_model(&c.model, &c.assignment);
                    emit(
                        out,
                        &format!("{text}# falsified at {}\n", c.model.world_name(c.world)),
                    )?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Audit {
            proof,
            theory,
            lines,
        } => {
            let (file, th) = load_proof(&proof, theory.as_deref())?;
            match audit_derivation(&file.root, &th) {
                Ok(report) => {
                    emit(
                        out,
                        &if lines {
                            report.render_lines()
                        } else {
                            report.render()
                        },
                    )?;
                    Ok(if report.violations() == 0 {
                        EXIT_OK
                    } else {
                        EXIT_NEGATIVE
                    })
                }
                Err(AuditError::Rejected(report)) => {
                    emit(out, &report.render())?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
    }
}
