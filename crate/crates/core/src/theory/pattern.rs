//! Formula patterns with metavariables, and first-order matching against
//! ground formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Formula, Ident};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermPattern {
    Const(Ident),
    Var(Ident),
}

/// A formula with holes. `Var` stands for an arbitrary formula, `Applied`
/// for a unary predicate symbol applied to a term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    Prop(Ident),
    Nominal(Ident),
    Pred(Ident, Vec<TermPattern>),
    And(Box<Pattern>, Box<Pattern>),
    Imp(Box<Pattern>, Box<Pattern>),
    Bot,
    Nec(Ident, Box<Pattern>),
    At(Ident, Box<Pattern>),
    Var(Ident),
    Applied(Ident, TermPattern),
}

/// The sort a metavariable is used at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarSort {
    Formula,
    Applied,
    Term,
}

impl fmt::Display for VarSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarSort::Formula => "formula",
            VarSort::Applied => "applied-formula",
            VarSort::Term => "term",
        })
    }
}

impl Pattern {
    pub(crate) fn not(p: Pattern) -> Pattern {
        Pattern::Imp(Box::new(p), Box::new(Pattern::Bot))
    }

    pub(crate) fn as_negation(&self) -> Option<&Pattern> {
        match self {
            Pattern::Imp(body, r) if **r == Pattern::Bot => Some(body),
            _ => None,
        }
    }

    pub(crate) fn as_diamond(&self) -> Option<(&Ident, &Pattern)> {
        match self.as_negation()? {
            Pattern::Nec(m, inner) => inner.as_negation().map(|body| (m, body)),
            _ => None,
        }
    }

    /// The formula this pattern denotes, if it has no metavariables.
    pub fn to_formula(&self) -> Option<Formula> {
        Subst::default().apply(self)
    }

    /// Collects metavariables with the sort of each use. A variable used at
    /// two sorts appears twice.
    pub fn variables(&self, out: &mut BTreeMap<Ident, BTreeSet<VarSort>>) {
        let mut add = |v: &Ident, s: VarSort| {
            out.entry(v.clone()).or_default().insert(s);
        };
        match self {
            Pattern::Var(v) => add(v, VarSort::Formula),
            Pattern::Applied(v, t) => {
                add(v, VarSort::Applied);
                if let TermPattern::Var(tv) = t {
                    add(tv, VarSort::Term);
                }
            }
            Pattern::Pred(_, ts) => {
                for t in ts {
                    if let TermPattern::Var(tv) = t {
                        add(tv, VarSort::Term);
                    }
                }
            }
            Pattern::And(l, r) | Pattern::Imp(l, r) => {
                l.variables(out);
                r.variables(out);
            }
            Pattern::Nec(_, b) | Pattern::At(_, b) => b.variables(out),
            Pattern::Prop(_) | Pattern::Nominal(_) | Pattern::Bot => {}
        }
    }
}

impl From<&Formula> for Pattern {
    fn from(f: &Formula) -> Self {
        match f {
            Formula::Prop(p) => Pattern::Prop(p.clone()),
            Formula::Nominal(a) => Pattern::Nominal(a.clone()),
            Formula::Pred(p, ts) => Pattern::Pred(
                p.clone(),
                ts.iter().map(|t| TermPattern::Const(t.clone())).collect(),
            ),
            Formula::And(l, r) => Pattern::And(Box::new((&**l).into()), Box::new((&**r).into())),
            Formula::Imp(l, r) => Pattern::Imp(Box::new((&**l).into()), Box::new((&**r).into())),
            Formula::Bot => Pattern::Bot,
            Formula::Nec(m, b) => Pattern::Nec(m.clone(), Box::new((&**b).into())),
            Formula::At(a, b) => Pattern::At(a.clone(), Box::new((&**b).into())),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_pattern(self))
    }
}

/// A substitution for metavariables, one map per sort.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    pub formulas: BTreeMap<Ident, Formula>,
    /// Applied variables bind a unary predicate symbol.
    pub predicates: BTreeMap<Ident, Ident>,
    pub terms: BTreeMap<Ident, Ident>,
}

impl Subst {
    /// `σ(pat)`, or `None` if some variable of `pat` is unbound.
    pub fn apply(&self, pat: &Pattern) -> Option<Formula> {
        Some(match pat {
            Pattern::Prop(p) => Formula::Prop(p.clone()),
            Pattern::Nominal(a) => Formula::Nominal(a.clone()),
            Pattern::Pred(p, ts) => Formula::Pred(
                p.clone(),
                ts.iter().map(|t| self.term(t)).collect::<Option<_>>()?,
            ),
            Pattern::And(l, r) => Formula::and(self.apply(l)?, self.apply(r)?),
            Pattern::Imp(l, r) => Formula::imp(self.apply(l)?, self.apply(r)?),
            Pattern::Bot => Formula::Bot,
            Pattern::Nec(m, b) => Formula::Nec(m.clone(), Box::new(self.apply(b)?)),
            Pattern::At(a, b) => Formula::At(a.clone(), Box::new(self.apply(b)?)),
            Pattern::Var(v) => self.formulas.get(v)?.clone(),
            Pattern::Applied(v, t) => {
                Formula::Pred(self.predicates.get(v)?.clone(), vec![self.term(t)?])
            }
        })
    }

    fn term(&self, t: &TermPattern) -> Option<Ident> {
        match t {
            TermPattern::Const(c) => Some(c.clone()),
            TermPattern::Var(v) => self.terms.get(v).cloned(),
        }
    }

    /// Extends `self` so that `σ(pat) = f`, respecting existing bindings.
    /// On failure `self` may hold partial bindings.
    pub fn match_into(&mut self, pat: &Pattern, f: &Formula) -> bool {
        match (pat, f) {
            (Pattern::Var(v), _) => bind(&mut self.formulas, v, f),
            (Pattern::Applied(v, t), Formula::Pred(p, ts)) if ts.len() == 1 => {
                bind(&mut self.predicates, v, p) && self.match_term(t, &ts[0])
            }
            (Pattern::Prop(a), Formula::Prop(b)) | (Pattern::Nominal(a), Formula::Nominal(b)) => {
                a == b
            }
            (Pattern::Pred(p, pts), Formula::Pred(q, ts)) => {
                p == q
                    && pts.len() == ts.len()
                    && pts.iter().zip(ts).all(|(pt, t)| self.match_term(pt, t))
            }
            (Pattern::And(pl, pr), Formula::And(l, r))
            | (Pattern::Imp(pl, pr), Formula::Imp(l, r)) => {
                self.match_into(pl, l) && self.match_into(pr, r)
            }
            (Pattern::Bot, Formula::Bot) => true,
            (Pattern::Nec(m, pb), Formula::Nec(n, b)) | (Pattern::At(m, pb), Formula::At(n, b)) => {
                m == n && self.match_into(pb, b)
            }
            _ => false,
        }
    }

    fn match_term(&mut self, pat: &TermPattern, t: &Ident) -> bool {
        match pat {
            TermPattern::Const(c) => c == t,
            TermPattern::Var(v) => bind(&mut self.terms, v, t),
        }
    }
}

fn bind<T: Clone + PartialEq>(map: &mut BTreeMap<Ident, T>, v: &Ident, value: &T) -> bool {
    match map.get(v) {
        Some(existing) => existing == value,
        None => {
            map.insert(v.clone(), value.clone());
            true
        }
    }
}

/// The most general substitution `σ` with `σ(pat) = f`, if any.
pub fn match_schema(pat: &Pattern, f: &Formula) -> Option<Subst> {
    let mut s = Subst::default();
    s.match_into(pat, f).then_some(s)
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        parts.extend(self.formulas.iter().map(|(v, x)| format!("?{v} := {x}")));
        parts.extend(self.predicates.iter().map(|(v, p)| format!("?{v} := {p}")));
        parts.extend(self.terms.iter().map(|(v, t)| format!("?{v} := {t}")));
        write!(f, "{{{}}}", parts.join(", "))
    }
}
