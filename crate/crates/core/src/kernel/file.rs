//! The proof file format.
//!
//! ```text
//! (proof (theory "rain.hlt")
//!   (rule impE "q" (discharge)
//!     (axiom "rain")
//!     (assume 1 "p")))
//! ```

use std::collections::BTreeSet;

use thiserror::Error;

use super::sexp::{quote, read, Sexp};
use super::{Derivation, Label, Rule};
use crate::syntax::{parse_formula, Ident, Signature, SyntaxError};

#[derive(Debug, Error, PartialEq)]
pub enum ProofError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}, column {col}: formula `{text}`: {source}")]
    Formula {
        line: usize,
        col: usize,
        text: String,
        source: SyntaxError,
    },
}

/// A parsed proof file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofFile {
    /// Theory path as written in the header, relative to the proof file.
    pub theory: Option<String>,
    pub root: Derivation,
}

fn line_col(text: &str, pos: usize) -> (usize, usize) {
    let before = &text[..pos.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before
        .rfind('\n')
        .map_or(before.len(), |i| before.len() - i - 1)
        + 1;
    (line, col)
}

struct Ctx<'a> {
    text: &'a str,
    sig: Option<&'a Signature>,
}

impl Ctx<'_> {
    fn err(&self, pos: usize, msg: impl Into<String>) -> ProofError {
        let (line, col) = line_col(self.text, pos);
        ProofError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn list<'s>(&self, e: &'s Sexp, what: &str) -> Result<&'s [Sexp], ProofError> {
        match e {
            Sexp::List(items, _) => Ok(items),
            _ => Err(self.err(e.pos(), format!("expected {what}"))),
        }
    }

    fn head<'s>(&self, items: &'s [Sexp], pos: usize) -> Result<&'s str, ProofError> {
        match items.first() {
            Some(Sexp::Atom(a, _)) => Ok(a),
            _ => Err(self.err(pos, "expected a keyword after `(`")),
        }
    }

    fn string<'s>(
        &self,
        e: Option<&'s Sexp>,
        pos: usize,
        what: &str,
    ) -> Result<&'s str, ProofError> {
        match e {
            Some(Sexp::Str(s, _)) => Ok(s),
            Some(other) => {
                Err(self.err(other.pos(), format!("expected {what} as a quoted string")))
            }
            None => Err(self.err(pos, format!("missing {what}"))),
        }
    }

    fn formula(&self, e: Option<&Sexp>, pos: usize) -> Result<crate::syntax::Formula, ProofError> {
        let text = self.string(e, pos, "a formula")?;
        let sig = self.sig.expect("formulas are parsed with a signature");
        parse_formula(text, sig).map_err(|source| {
            let (line, col) = line_col(self.text, e.map_or(pos, Sexp::pos));
            ProofError::Formula {
                line,
                col,
                text: text.to_string(),
                source,
            }
        })
    }

    fn label(&self, e: &Sexp) -> Result<Label, ProofError> {
        match e {
            Sexp::Atom(a, p) => match a.parse::<u32>() {
                Ok(n) if n > 0 && !a.starts_with(['+', '0']) => Ok(Label(n)),
                _ => Err(self.err(*p, format!("`{a}` is not a positive label"))),
            },
            _ => Err(self.err(e.pos(), "expected a label")),
        }
    }

    fn header<'s>(&self, top: &'s Sexp) -> Result<(Option<String>, Option<&'s Sexp>), ProofError> {
        let items = self.list(top, "`(proof ...)`")?;
        if self.head(items, top.pos())? != "proof" {
            return Err(self.err(top.pos(), "expected `(proof ...)`"));
        }
        let mut rest = &items[1..];
        let mut theory = None;
        if let Some(first @ Sexp::List(inner, p)) = rest.first() {
            if matches!(inner.first(), Some(Sexp::Atom(a, _)) if a == "theory") {
                if inner.len() != 2 {
                    return Err(self.err(*p, "`(theory ...)` takes one path"));
                }
                theory = Some(
                    self.string(inner.get(1), first.pos(), "a theory path")?
                        .to_string(),
                );
                rest = &rest[1..];
            }
        }
        match rest {
            [] => Ok((theory, None)),
            [node] => Ok((theory, Some(node))),
            [_, extra, ..] => Err(self.err(extra.pos(), "a proof has exactly one root node")),
        }
    }

    fn node(&self, e: &Sexp) -> Result<Derivation, ProofError> {
        let items = self.list(e, "a derivation node")?;
        let pos = e.pos();
        let key = self.head(items, pos)?;
        let arity = |n: usize| -> Result<(), ProofError> {
            if items.len() == n {
                Ok(())
            } else {
                Err(self.err(pos, format!("`{key}` takes {} argument(s)", n - 1)))
            }
        };
        match key {
            "assume" => {
                arity(3)?;
                Ok(Derivation::Assume {
                    label: self.label(&items[1])?,
                    formula: self.formula(items.get(2), pos)?,
                })
            }
            "axiom" => {
                arity(2)?;
                Ok(Derivation::Axiom {
                    name: self.ident(self.string(items.get(1), pos, "an axiom name")?, pos)?,
                })
            }
            "schema" => {
                arity(3)?;
                Ok(Derivation::Schema {
                    name: self.ident(self.string(items.get(1), pos, "a schema name")?, pos)?,
                    instance: self.formula(items.get(2), pos)?,
                })
            }
            "rule" => self.rule(items, pos),
            other => Err(self.err(pos, format!("unknown node kind `{other}`"))),
        }
    }

    fn ident(&self, s: &str, pos: usize) -> Result<Ident, ProofError> {
        if Ident::is_valid(s) {
            Ok(Ident::new(s))
        } else {
            Err(self.err(pos, format!("`{s}` is not a valid name")))
        }
    }

    fn rule(&self, items: &[Sexp], pos: usize) -> Result<Derivation, ProofError> {
        let id = match items.get(1) {
            Some(Sexp::Atom(a, _)) => a.as_str(),
            _ => return Err(self.err(pos, "expected a rule id")),
        };
        let conclusion = self.formula(items.get(2), pos)?;
        let mut rest = &items[3.min(items.len())..];
        let mut nominal = None;
        let mut discharge = None;
        while let Some(Sexp::List(inner, p)) = rest.first() {
            match inner.first() {
                Some(Sexp::Atom(k, _))
                    if k == "nominal" && nominal.is_none() && discharge.is_none() =>
                {
                    match inner.as_slice() {
                        [_, Sexp::Atom(a, _)] => nominal = Some(self.ident(a, *p)?),
                        _ => return Err(self.err(*p, "`(nominal ...)` takes one name")),
                    }
                }
                Some(Sexp::Atom(k, _)) if k == "discharge" && discharge.is_none() => {
                    let mut set = BTreeSet::new();
                    for l in &inner[1..] {
                        if !set.insert(self.label(l)?) {
                            return Err(self.err(l.pos(), "label repeated in discharge list"));
                        }
                    }
                    discharge = Some(set);
                }
                _ => break,
            }
            rest = &rest[1..];
        }
        let discharge = discharge.ok_or_else(|| self.err(pos, "missing `(discharge ...)`"))?;
        let rule = match (id, nominal) {
            ("term", Some(a)) => Rule::Term(a),
            ("term", None) => return Err(self.err(pos, "term needs `(nominal a)`")),
            (_, Some(_)) => return Err(self.err(pos, "only term takes `(nominal ...)`")),
            (id, None) => Rule::from_id(id)
                .ok_or_else(|| self.err(pos, format!("`{id}` is not a rule id")))?,
        };
        let premises = rest
            .iter()
            .map(|e| self.node(e))
            .collect::<Result<_, _>>()?;
        Ok(Derivation::Rule {
            rule,
            conclusion,
            discharge,
            premises,
        })
    }
}

/// The theory path named in a proof file's header, if any. Only the
/// header is examined; formulas are not parsed.
pub fn proof_theory_path(text: &str) -> Result<Option<String>, ProofError> {
    let ctx = Ctx { text, sig: None };
    let top = read(text).map_err(|(p, m)| ctx.err(p, m))?;
    Ok(ctx.header(&top)?.0)
}

/// Parses a proof file, reading formulas over `sig`.
pub fn parse_proof(text: &str, sig: &Signature) -> Result<ProofFile, ProofError> {
    let ctx = Ctx {
        text,
        sig: Some(sig),
    };
    let top = read(text).map_err(|(p, m)| ctx.err(p, m))?;
    let (theory, node) = ctx.header(&top)?;
    let node = node.ok_or_else(|| ctx.err(top.pos(), "a proof has exactly one root node"))?;
    Ok(ProofFile {
        theory,
        root: ctx.node(node)?,
    })
}

/// Canonical text of a proof file. [`parse_proof`] inverts it.
pub fn render_proof(p: &ProofFile) -> String {
    let mut out = String::from("(proof");
    if let Some(t) = &p.theory {
        out.push_str(&format!(" (theory {})", quote(t)));
    }
    render_node(&p.root, 1, &mut out);
    out.push_str(")\n");
    out
}

fn render_node(d: &Derivation, depth: usize, out: &mut String) {
    out.push('\n');
    out.push_str(&"  ".repeat(depth));
    match d {
        Derivation::Assume { label, formula } => {
            out.push_str(&format!("(assume {label} {})", quote(&formula.to_string())))
        }
        Derivation::Axiom { name } => out.push_str(&format!("(axiom {})", quote(name))),
        Derivation::Schema { name, instance } => out.push_str(&format!(
            "(schema {} {})",
            quote(name),
            quote(&instance.to_string())
        )),
        Derivation::Rule {
            rule,
            conclusion,
            discharge,
            premises,
        } => {
            out.push_str(&format!("(rule {rule} {}", quote(&conclusion.to_string())));
            if let Rule::Term(a) = rule {
                out.push_str(&format!(" (nominal {a})"));
            }
            out.push_str(" (discharge");
            for l in discharge {
                out.push_str(&format!(" {l}"));
            }
            out.push(')');
            for p in premises {
                render_node(p, depth + 1, out);
            }
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RAIN: &str = "\
(proof (theory \"rain.hlt\")
  (rule term \"@a q\" (nominal a) (discharge 2 3)
    (assume 1 \"@a p\")
    (rule satI \"@a q\" (discharge)
      (assume 3 \"a\")
      (rule impE \"q\" (discharge)
        (axiom \"rain\")
        (rule satE \"p\" (discharge)
          (assume 3 \"a\")
          (assume 2 \"@a p\"))))))
";

    fn sig() -> Signature {
        Signature::parse("prop: p q\nnom: a\n").unwrap()
    }

    #[test]
    fn canonical_round_trip() {
        let p = parse_proof(RAIN, &sig()).unwrap();
        assert_eq!(p.theory.as_deref(), Some("rain.hlt"));
        assert_eq!(render_proof(&p), RAIN);
        assert_eq!(
            proof_theory_path(RAIN).unwrap().as_deref(),
            Some("rain.hlt")
        );
    }

    #[test]
    fn comments_and_spacing_are_not_canonical() {
        let loose = "; a comment\n(proof (rule impI \"p -> p\" (discharge 1) (assume 1 \"p\")))";
        let p = parse_proof(loose, &sig()).unwrap();
        assert_eq!(p.theory, None);
        assert_eq!(
            render_proof(&p),
            "(proof\n  (rule impI \"p -> p\" (discharge 1)\n    (assume 1 \"p\")))\n"
        );
    }

    #[test]
    fn malformed() {
        let s = sig();
        for bad in [
            "(proof)",
            "(prf (assume 1 \"p\"))",
            "(proof (assume 0 \"p\"))",
            "(proof (assume 1 \"x\"))",
            "(proof (assume 1 p))",
            "(proof (rule impI \"p -> p\" (assume 1 \"p\")))",
            "(proof (rule term \"p\" (discharge)))",
            "(proof (rule andI \"p\" (nominal a) (discharge)))",
            "(proof (rule 12 \"p\" (discharge)))",
            "(proof (rule impI \"p -> p\" (discharge 1 1) (assume 1 \"p\")))",
            "(proof (foo))",
            "(proof (assume 1 \"p\") (assume 2 \"q\"))",
        ] {
            assert!(parse_proof(bad, &s).is_err(), "{bad}");
        }
    }

    #[test]
    fn error_positions() {
        let err = parse_proof("(proof\n  (assume 1 \"zz\"))", &sig()).unwrap_err();
        assert!(
            matches!(
                err,
                ProofError::Formula {
                    line: 2,
                    col: 13,
                    ..
                }
            ),
            "{err:?}"
        );
    }
}
