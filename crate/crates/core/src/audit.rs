//! Analyticity audit: labels each formula occurrence of a checked
//! derivation with the subformula classes it falls into.
//!
//! With φ the end-formula and Γ the premises, an occurrence θ is in
//!
//! 1. if θ = @a ψ with ψ a subformula of φ, of a member of Γ, or of a
//!    formula of the form c or dia c;
//! 2. if θ itself is such a subformula;
//! 3. if θ is a nominal;
//! 4. if θ is @a ~p or ~p with p a propositional letter that is a
//!    subformula of φ or of a member of Γ;
//! 5. if θ is @a bot or bot.
//!
//! An occurrence in no class is a violation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::kernel::{check_derivation, CheckReport, Derivation, Rule, TreePath};
use crate::syntax::{subformulas, Formula};
use crate::theory::Theory;

/// A set of class numbers 1..=5.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Classes(u8);

impl Classes {
    pub fn contains(&self, class: u8) -> bool {
        (1..=5).contains(&class) && self.0 & (1 << class) != 0
    }

    fn insert(&mut self, class: u8) {
        self.0 |= 1 << class;
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=5).filter(|c| self.contains(*c))
    }

    /// Whether every class of `self` is in `other`.
    pub fn is_subset(&self, other: &Classes) -> bool {
        self.0 & !other.0 == 0
    }
}

impl fmt::Display for Classes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Subformulas of formulas of the form c or dia c: c, ~c, m ~c, dia m c, bot.
fn in_nominal_forms(psi: &Formula) -> bool {
    let nominal = |f: &Formula| matches!(f, Formula::Nominal(_));
    let neg_nominal = |f: &Formula| f.as_negation().is_some_and(nominal);
    match psi {
        Formula::Nominal(_) | Formula::Bot => true,
        Formula::Nec(_, body) => neg_nominal(body),
        _ => neg_nominal(psi) || psi.as_diamond().is_some_and(|(_, b)| nominal(b)),
    }
}

/// The reference set of subformulas of φ and Γ.
pub struct Reference {
    subs: BTreeSet<Formula>,
}

impl Reference {
    pub fn new<'a>(phi: &Formula, gamma: impl IntoIterator<Item = &'a Formula>) -> Reference {
        let mut subs = subformulas(phi);
        for g in gamma {
            subs.extend(subformulas(g));
        }
        Reference { subs }
    }

    fn admits(&self, psi: &Formula) -> bool {
        self.subs.contains(psi) || in_nominal_forms(psi)
    }

    pub fn classify(&self, theta: &Formula) -> Classes {
        let mut out = Classes::default();
        let negated_letter = |f: &Formula| {
            f.as_negation()
                .is_some_and(|p| matches!(p, Formula::Prop(_)) && self.subs.contains(p))
        };
        if let Formula::At(_, psi) = theta {
            if self.admits(psi) {
                out.insert(1);
            }
            if negated_letter(psi) {
                out.insert(4);
            }
            if **psi == Formula::Bot {
                out.insert(5);
            }
        }
        if self.admits(theta) {
            out.insert(2);
        }
        if matches!(theta, Formula::Nominal(_)) {
            out.insert(3);
        }
        if negated_letter(theta) {
            out.insert(4);
        }
        if *theta == Formula::Bot {
            out.insert(5);
        }
        out
    }
}

/// Classes of the occurrence `theta` relative to end-formula `phi` and
/// premises `gamma`.
pub fn classify_occurrence(theta: &Formula, phi: &Formula, gamma: &BTreeSet<Formula>) -> Classes {
    Reference::new(phi, gamma).classify(theta)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub path: TreePath,
    pub formula: Formula,
    pub classes: Classes,
}

impl Occurrence {
    pub fn violation(&self) -> bool {
        self.classes.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub end_formula: Formula,
    /// Undischarged assumptions, axiom and schema leaves, and conclusions
    /// of derived-rule instances.
    pub gamma: BTreeSet<Formula>,
    pub occurrences: Vec<Occurrence>,
}

impl AuditReport {
    pub fn violations(&self) -> usize {
        self.occurrences.iter().filter(|o| o.violation()).count()
    }

    /// One line per occurrence: `<path> <class-set> <formula>`.
    pub fn render_lines(&self) -> String {
        self.occurrences
            .iter()
            .map(|o| format!("{} {} {}\n", o.path, o.classes, o.formula))
            .collect()
    }

    pub fn render(&self) -> String {
        let gamma: Vec<String> = self.gamma.iter().map(|f| f.to_string()).collect();
        let mut out = format!(
            "end: {}\ngamma: {{{}}}\noccurrences: {}\nviolations: {}\n",
            self.end_formula,
            gamma.join("; "),
            self.occurrences.len(),
            self.violations()
        );
        for o in self.occurrences.iter().filter(|o| o.violation()) {
            out.push_str(&format!("violation: {} {}\n", o.path, o.formula));
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("the derivation does not check")]
    Rejected(Box<CheckReport>),
}

/// The formula at each node: assumption and instance formulas, axiom
/// bodies, and rule conclusions.
fn occurrences(d: &Derivation, th: &Theory) -> Vec<(TreePath, Formula)> {
    let mut out = Vec::new();
    d.walk(&mut |path, node| {
        let f = match node {
            Derivation::Assume { formula, .. } => Some(formula.clone()),
            Derivation::Axiom { name } => th.axiom(name).cloned(),
            Derivation::Schema { instance, .. } => Some(instance.clone()),
            Derivation::Rule { conclusion, .. } => Some(conclusion.clone()),
        };
        if let Some(f) = f {
            out.push((path.clone(), f));
        }
    });
    out
}

/// Audits a derivation that `check_derivation` accepts.
pub fn audit_derivation(d: &Derivation, th: &Theory) -> Result<AuditReport, AuditError> {
    let report = check_derivation(d, th);
    let (true, Some(end)) = (report.accepted(), report.end_formula.clone()) else {
        return Err(AuditError::Rejected(Box::new(report)));
    };
    let mut gamma = report.undischarged.clone();
    gamma.extend(report.axiom_leaves.iter().cloned());
    d.walk(&mut |_, node| {
        if let Derivation::Rule {
            rule: Rule::Derived(_),
            conclusion,
            ..
        } = node
        {
            gamma.insert(conclusion.clone());
        }
    });
    Ok(audit_with(d, th, end, gamma))
}

/// Classifies every occurrence against an explicit φ and Γ.
pub fn audit_with(
    d: &Derivation,
    th: &Theory,
    end: Formula,
    gamma: BTreeSet<Formula>,
) -> AuditReport {
    let reference = Reference::new(&end, &gamma);
    let occurrences = occurrences(d, th)
        .into_iter()
        .map(|(path, formula)| Occurrence {
            classes: reference.classify(&formula),
            path,
            formula,
        })
        .collect();
    AuditReport {
        end_formula: end,
        gamma,
        occurrences,
    }
}
