//! Derivation trees and the checker for the natural deduction calculus.

mod check;
mod file;
mod sexp;

use std::collections::BTreeSet;
use std::fmt;

pub use check::{check_derivation, check_rule_instance, collect_undischarged, Child};
pub use file::{parse_proof, proof_theory_path, render_proof, ProofError, ProofFile};

use crate::syntax::{Formula, Ident};

/// Assumption label. Always positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    AndI,
    AndE1,
    AndE2,
    ImpI,
    ImpE,
    Raa,
    SatI,
    SatE,
    BoxI(Ident),
    BoxE(Ident),
    /// Carries the nominal whose parcel the instance discharges.
    Term(Ident),
    Name,
    Derived(Ident),
}

impl Rule {
    /// Reads a rule id. Anything that is not built in names a derived rule.
    pub fn from_id(id: &str) -> Option<Rule> {
        Some(match id {
            "andI" => Rule::AndI,
            "andE1" => Rule::AndE1,
            "andE2" => Rule::AndE2,
            "impI" => Rule::ImpI,
            "impE" => Rule::ImpE,
            "raa" => Rule::Raa,
            "satI" => Rule::SatI,
            "satE" => Rule::SatE,
            "name" => Rule::Name,
            "term" => return None,
            _ => {
                if let Some(m) = id.strip_prefix("boxI.") {
                    Rule::BoxI(valid(m)?)
                } else if let Some(m) = id.strip_prefix("boxE.") {
                    Rule::BoxE(valid(m)?)
                } else {
                    Rule::Derived(valid(id)?)
                }
            }
        })
    }

    /// Whether instances of this rule may discharge assumptions.
    pub fn discharges(&self) -> bool {
        matches!(
            self,
            Rule::ImpI | Rule::Raa | Rule::BoxI(_) | Rule::Term(_) | Rule::Name
        )
    }
}

fn valid(s: &str) -> Option<Ident> {
    Ident::is_valid(s).then(|| Ident::new(s))
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::AndI => f.write_str("andI"),
            Rule::AndE1 => f.write_str("andE1"),
            Rule::AndE2 => f.write_str("andE2"),
            Rule::ImpI => f.write_str("impI"),
            Rule::ImpE => f.write_str("impE"),
            Rule::Raa => f.write_str("raa"),
            Rule::SatI => f.write_str("satI"),
            Rule::SatE => f.write_str("satE"),
            Rule::BoxI(m) => write!(f, "boxI.{m}"),
            Rule::BoxE(m) => write!(f, "boxE.{m}"),
            Rule::Term(_) => f.write_str("term"),
            Rule::Name => f.write_str("name"),
            Rule::Derived(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    Assume {
        label: Label,
        formula: Formula,
    },
    /// A named ground axiom of the theory.
    Axiom {
        name: Ident,
    },
    /// An instance of a named axiom schema.
    Schema {
        name: Ident,
        instance: Formula,
    },
    Rule {
        rule: Rule,
        conclusion: Formula,
        discharge: BTreeSet<Label>,
        premises: Vec<Derivation>,
    },
}

impl Derivation {
    pub fn assume(label: u32, formula: Formula) -> Derivation {
        Derivation::Assume {
            label: Label(label),
            formula,
        }
    }

    pub fn rule(
        rule: Rule,
        conclusion: Formula,
        discharge: &[u32],
        premises: Vec<Derivation>,
    ) -> Derivation {
        Derivation::Rule {
            rule,
            conclusion,
            discharge: discharge.iter().map(|&l| Label(l)).collect(),
            premises,
        }
    }

    /// Length of the longest root-to-leaf path, counting nodes.
    pub fn depth(&self) -> usize {
        match self {
            Derivation::Rule { premises, .. } => {
                1 + premises.iter().map(Derivation::depth).max().unwrap_or(0)
            }
            _ => 1,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Derivation::Rule { premises, .. } => {
                1 + premises.iter().map(Derivation::node_count).sum::<usize>()
            }
            _ => 1,
        }
    }

    /// Whether any instance uses a theory-derived rule.
    pub fn uses_derived_rules(&self) -> bool {
        match self {
            Derivation::Rule { rule, premises, .. } => {
                matches!(rule, Rule::Derived(_))
                    || premises.iter().any(Derivation::uses_derived_rules)
            }
            _ => false,
        }
    }

    /// Visits every node with its path, parents before children.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&TreePath, &'a Derivation)) {
        fn go<'a>(
            d: &'a Derivation,
            path: &mut TreePath,
            f: &mut impl FnMut(&TreePath, &'a Derivation),
        ) {
            f(path, d);
            if let Derivation::Rule { premises, .. } = d {
                for (i, p) in premises.iter().enumerate() {
                    path.0.push(i);
                    go(p, path, f);
                    path.0.pop();
                }
            }
        }
        go(self, &mut TreePath::default(), f);
    }
}

/// Position of a node: child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreePath(pub Vec<usize>);

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("r")?;
        for i in &self.0 {
            write!(f, ".{i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorKind {
    ShapeMismatch,
    SideConditionViolation,
    DischargeError,
    UnknownAxiom,
    SchemaMismatch,
    UnknownRule,
    IllFormed,
}

impl ErrorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorKind::ShapeMismatch => "shape-mismatch",
            ErrorKind::SideConditionViolation => "side-condition-violation",
            ErrorKind::DischargeError => "discharge-error",
            ErrorKind::UnknownAxiom => "unknown-axiom",
            ErrorKind::SchemaMismatch => "schema-mismatch",
            ErrorKind::UnknownRule => "unknown-rule",
            ErrorKind::IllFormed => "ill-formed",
        }
    }

    pub fn from_name(s: &str) -> Option<ErrorKind> {
        [
            ErrorKind::ShapeMismatch,
            ErrorKind::SideConditionViolation,
            ErrorKind::DischargeError,
            ErrorKind::UnknownAxiom,
            ErrorKind::SchemaMismatch,
            ErrorKind::UnknownRule,
            ErrorKind::IllFormed,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: TreePath,
    /// Rule id, or `assume`/`axiom`/`schema` for leaves.
    pub rule: String,
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}: {}",
            self.path, self.rule, self.kind, self.message
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "ACCEPT",
            Verdict::Reject => "REJECT",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub verdict: Verdict,
    /// `None` only when the root is an axiom leaf naming no axiom.
    pub end_formula: Option<Formula>,
    /// Γ: formulas of the undischarged assumptions.
    pub undischarged: BTreeSet<Formula>,
    pub undischarged_labelled: BTreeSet<(Label, Formula)>,
    /// Formulas justified by axioms or schema instances.
    pub axiom_leaves: BTreeSet<Formula>,
    pub diagnostics: Vec<Diagnostic>,
}

impl CheckReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    /// Human-readable rendering.
    pub fn render(&self) -> String {
        let mut out = format!("verdict: {}\n", self.verdict);
        match &self.end_formula {
            Some(f) => out.push_str(&format!("end: {f}\n")),
            None => out.push_str("end: ?\n"),
        }
        let list = |set: &BTreeSet<Formula>| {
            set.iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        };
        out.push_str(&format!("gamma: {{{}}}\n", list(&self.undischarged)));
        out.push_str(&format!("axioms: {{{}}}\n", list(&self.axiom_leaves)));
        for d in &self.diagnostics {
            out.push_str(&format!("error: {d}\n"));
        }
        out
    }
}
