//! Canonical printing. Negation and diamond are re-sugared; operands of
//! prefix operators are parenthesized unless atomic or negated.

use super::{Formula, Ident};
use crate::theory::{Pattern, TermPattern};

enum View<'a, T> {
    Atom(String),
    Not(&'a T),
    Dia(&'a Ident, &'a T),
    Nec(&'a Ident, &'a T),
    At(&'a Ident, &'a T),
    And(&'a T, &'a T),
    Imp(&'a T, &'a T),
}

trait Shape: Sized {
    fn view(&self) -> View<'_, Self>;
}

impl Shape for Formula {
    fn view(&self) -> View<'_, Self> {
        if let Some((m, body)) = self.as_diamond() {
            return View::Dia(m, body);
        }
        if let Some(body) = self.as_negation() {
            return View::Not(body);
        }
        match self {
            Formula::Prop(x) | Formula::Nominal(x) => View::Atom(x.to_string()),
            Formula::Pred(p, ts) => View::Atom(format!(
                "{p}({})",
                ts.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(",")
            )),
            Formula::Bot => View::Atom("bot".into()),
            Formula::And(l, r) => View::And(l, r),
            Formula::Imp(l, r) => View::Imp(l, r),
            Formula::Nec(m, b) => View::Nec(m, b),
            Formula::At(a, b) => View::At(a, b),
        }
    }
}

fn term(t: &TermPattern) -> String {
    match t {
        TermPattern::Const(c) => c.to_string(),
        TermPattern::Var(v) => format!("?{v}"),
    }
}

impl Shape for Pattern {
    fn view(&self) -> View<'_, Self> {
        if let Some((m, body)) = self.as_diamond() {
            return View::Dia(m, body);
        }
        if let Some(body) = self.as_negation() {
            return View::Not(body);
        }
        match self {
            Pattern::Prop(x) | Pattern::Nominal(x) => View::Atom(x.to_string()),
            Pattern::Pred(p, ts) => View::Atom(format!(
                "{p}({})",
                ts.iter().map(term).collect::<Vec<_>>().join(",")
            )),
            Pattern::Bot => View::Atom("bot".into()),
            Pattern::Var(v) => View::Atom(format!("?{v}")),
            Pattern::Applied(v, t) => View::Atom(format!("?{v}({})", term(t))),
            Pattern::And(l, r) => View::And(l, r),
            Pattern::Imp(l, r) => View::Imp(l, r),
            Pattern::Nec(m, b) => View::Nec(m, b),
            Pattern::At(a, b) => View::At(a, b),
        }
    }
}

// Binding strength of the surrounding context.
const IMP: u8 = 0;
const AND: u8 = 1;
const UNARY: u8 = 2;

fn go<T: Shape>(t: &T, ctx: u8, out: &mut String) {
    match t.view() {
        View::Atom(s) => out.push_str(&s),
        View::Not(b) => {
            out.push('~');
            operand(b, out);
        }
        View::Dia(m, b) => {
            out.push_str("dia ");
            out.push_str(m);
            out.push(' ');
            operand(b, out);
        }
        View::Nec(m, b) => {
            out.push_str(m);
            out.push(' ');
            operand(b, out);
        }
        View::At(a, b) => {
            out.push('@');
            out.push_str(a);
            out.push(' ');
            operand(b, out);
        }
        View::And(l, r) => {
            let wrap = ctx > AND;
            if wrap {
                out.push('(');
            }
            go(l, AND, out);
            out.push_str(" & ");
            go(r, UNARY, out);
            if wrap {
                out.push(')');
            }
        }
        View::Imp(l, r) => {
            let wrap = ctx > IMP;
            if wrap {
                out.push('(');
            }
            go(l, AND, out);
            out.push_str(" -> ");
            go(r, IMP, out);
            if wrap {
                out.push(')');
            }
        }
    }
}

fn operand<T: Shape>(t: &T, out: &mut String) {
    match t.view() {
        View::Atom(_) | View::Not(_) => go(t, UNARY, out),
        _ => {
            out.push('(');
            go(t, IMP, out);
            out.push(')');
        }
    }
}

pub(super) fn render(f: &Formula) -> String {
    let mut out = String::new();
    go(f, IMP, &mut out);
    out
}

pub(crate) fn render_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    go(p, IMP, &mut out);
    out
}
