//! The formula language: signatures, formulas, and structural queries.
//!
//! Formulas are built from ordinary propositional symbols, nominals,
//! predicate atoms over time constants, conjunction, implication, falsum,
//! one box operator per declared modality name, and satisfaction operators.
//! Negation and diamond are abbreviations and have no constructor of their
//! own.

mod parse;
mod print;
mod signature;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse_formula, parse_pattern, SyntaxError};
pub(crate) use signature::strip_comment;
pub use signature::{Signature, SignatureError, Sort, SortError};

use crate::theory::Theory;

/// An identifier of any sort. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(s: &str) -> Self {
        Ident(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True if `s` is lexically an identifier: `[A-Za-z_][A-Za-z0-9_']*`.
    pub fn is_valid(s: &str) -> bool {
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl std::ops::Deref for Ident {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

/// Words the concrete syntax reserves. `box` may still name a modality.
pub const KEYWORDS: [&str; 3] = ["bot", "box", "dia"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Prop(Ident),
    Nominal(Ident),
    /// A predicate applied to time constants.
    Pred(Ident, Vec<Ident>),
    And(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Bot,
    /// Box operator of the named modality.
    Nec(Ident, Box<Formula>),
    /// Satisfaction operator `@a`.
    At(Ident, Box<Formula>),
}

impl Formula {
    pub fn prop(p: &str) -> Self {
        Formula::Prop(p.into())
    }

    pub fn nominal(a: &str) -> Self {
        Formula::Nominal(a.into())
    }

    pub fn pred(p: &str, terms: &[&str]) -> Self {
        Formula::Pred(p.into(), terms.iter().map(|&t| t.into()).collect())
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    /// `~f`, i.e. `f -> bot`.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::imp(f, Formula::Bot)
    }

    pub fn nec(m: &str, f: Formula) -> Self {
        Formula::Nec(m.into(), Box::new(f))
    }

    /// `dia m f`, i.e. `~ box m ~f`.
    pub fn dia(m: &str, f: Formula) -> Self {
        Formula::not(Formula::nec(m, Formula::not(f)))
    }

    pub fn at(a: &str, f: Formula) -> Self {
        Formula::At(a.into(), Box::new(f))
    }

    /// The body of a negation, if this is one.
    pub fn as_negation(&self) -> Option<&Formula> {
        match self {
            Formula::Imp(body, r) if **r == Formula::Bot => Some(body),
            _ => None,
        }
    }

    /// `(m, body)` if this is `dia m body`.
    pub fn as_diamond(&self) -> Option<(&Ident, &Formula)> {
        match self.as_negation()? {
            Formula::Nec(m, inner) => inner.as_negation().map(|body| (m, body)),
            _ => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::Prop(_) | Formula::Nominal(_) | Formula::Pred(..) | Formula::Bot
        )
    }

    /// Every identifier occurring in the formula, of any sort.
    pub fn identifiers(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_identifiers(&mut out);
        out
    }

    fn collect_identifiers(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Formula::Prop(x) | Formula::Nominal(x) => {
                out.insert(x.clone());
            }
            Formula::Pred(p, ts) => {
                out.insert(p.clone());
                out.extend(ts.iter().cloned());
            }
            Formula::And(l, r) | Formula::Imp(l, r) => {
                l.collect_identifiers(out);
                r.collect_identifiers(out);
            }
            Formula::Bot => {}
            Formula::Nec(m, body) | Formula::At(m, body) => {
                out.insert(m.clone());
                body.collect_identifiers(out);
            }
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::And(l, r) | Formula::Imp(l, r) => 1 + l.size() + r.size(),
            Formula::Nec(_, b) | Formula::At(_, b) => 1 + b.size(),
            _ => 1,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::render(self))
    }
}

/// Canonical concrete syntax of a formula.
pub fn print_formula(f: &Formula) -> String {
    print::render(f)
}

pub(crate) fn print_pattern(p: &crate::theory::Pattern) -> String {
    print::render_pattern(p)
}

/// The reflexive subformula set. For `@a psi` the nominal `a` is included.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_subformulas(f, &mut out);
    out
}

fn collect_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    if !out.insert(f.clone()) {
        return;
    }
    match f {
        Formula::And(l, r) | Formula::Imp(l, r) => {
            collect_subformulas(l, out);
            collect_subformulas(r, out);
        }
        Formula::Nec(_, body) => collect_subformulas(body, out),
        Formula::At(a, body) => {
            out.insert(Formula::Nominal(a.clone()));
            collect_subformulas(body, out);
        }
        _ => {}
    }
}

/// True iff `x` appears anywhere in `f`. There are no binders, so every
/// occurrence is free.
pub fn occurs_in(x: &str, f: &Formula) -> bool {
    match f {
        Formula::Prop(y) | Formula::Nominal(y) => y.as_str() == x,
        Formula::Pred(p, ts) => p.as_str() == x || ts.iter().any(|t| t.as_str() == x),
        Formula::And(l, r) | Formula::Imp(l, r) => occurs_in(x, l) || occurs_in(x, r),
        Formula::Bot => false,
        Formula::Nec(m, body) | Formula::At(m, body) => m.as_str() == x || occurs_in(x, body),
    }
}

pub fn is_satisfaction_statement(f: &Formula) -> bool {
    matches!(f, Formula::At(..))
}

/// Whether `f` may appear among the premises or conclusion of a `term`
/// inference under `th`: a satisfaction statement, or (when the theory
/// liberalizes the rule) an atom of a rigid predicate.
pub fn is_term_dischargeable(f: &Formula, th: &Theory) -> bool {
    match f {
        Formula::At(..) => true,
        Formula::Pred(p, _) => th.liberalized_term() && th.signature().is_rigid(p),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(fs: &[Formula]) -> BTreeSet<Formula> {
        fs.iter().cloned().collect()
    }

    #[test]
    fn subformulas_of_satisfaction_statement_include_the_nominal() {
        let f = Formula::at("a", Formula::prop("p"));
        assert_eq!(
            subformulas(&f),
            set(&[f.clone(), Formula::nominal("a"), Formula::prop("p")])
        );
    }

    #[test]
    fn subformulas_of_binary_and_modal() {
        let imp = Formula::imp(Formula::prop("p"), Formula::prop("q"));
        assert_eq!(
            subformulas(&imp),
            set(&[imp.clone(), Formula::prop("p"), Formula::prop("q")])
        );
        let b = Formula::nec("D", Formula::prop("p"));
        assert_eq!(subformulas(&b), set(&[b.clone(), Formula::prop("p")]));
    }

    #[test]
    fn occurrence() {
        assert!(occurs_in("a", &Formula::at("a", Formula::prop("p"))));
        assert!(!occurs_in("c", &Formula::nec("m", Formula::prop("p"))));
        assert!(occurs_in("t0", &Formula::pred("p", &["t0"])));
        assert!(occurs_in("m", &Formula::nec("m", Formula::prop("p"))));
    }

    #[test]
    fn satisfaction_statements() {
        assert!(is_satisfaction_statement(&Formula::at(
            "a",
            Formula::nec("D", Formula::prop("p"))
        )));
        assert!(!is_satisfaction_statement(&Formula::nec(
            "D",
            Formula::prop("p")
        )));
        assert!(!is_satisfaction_statement(&Formula::pred(
            "lt",
            &["t0", "t1"]
        )));
    }

    #[test]
    fn abbreviations() {
        let p = Formula::prop("p");
        assert_eq!(
            Formula::not(p.clone()),
            Formula::imp(p.clone(), Formula::Bot)
        );
        let d = Formula::dia("m", p.clone());
        let (m, body) = d.as_diamond().unwrap();
        assert_eq!(m.as_str(), "m");
        assert_eq!(body, &p);
        assert!(Formula::not(p).as_diamond().is_none());
    }
}
