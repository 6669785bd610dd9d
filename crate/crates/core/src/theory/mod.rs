//! User-declared theories: ground axioms, axiom schemas and derived rules
//! over a signature.
//!
//! Theory files are line oriented. Signature declarations may be embedded
//! (`prop: p q`, `nom: a`, ...) or pulled in with `signature: <path>`; the
//! remaining lines are
//!
//! ```text
//! axiom <name>: <formula>
//! schema <name>: <pattern>
//! rule <name>: <pattern> , ... => <pattern>
//! option liberalized-term: on|off
//! ```

mod pattern;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use pattern::{match_schema, Pattern, Subst, TermPattern, VarSort};

use crate::syntax::{
    parse_pattern, strip_comment, Formula, Ident, Signature, SignatureError, SyntaxError,
};

/// Rule identifiers of the built-in calculus. Derived rules may not reuse them.
pub const BUILTIN_RULES: [&str; 12] = [
    "andI", "andE1", "andE2", "impI", "impE", "raa", "satI", "satE", "boxI", "boxE", "term", "name",
];

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("line {line}: {source}")]
    Signature {
        line: usize,
        #[source]
        source: SignatureError,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: in `{name}`: {source}")]
    Formula {
        line: usize,
        name: String,
        #[source]
        source: SyntaxError,
    },
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("`{0}` is reserved for a built-in rule")]
    Reserved(String),
    #[error("`{0}` is not a valid rule name")]
    BadName(String),
    #[error("in `{name}`: metavariable ?{var} is used as both {first} and {second}")]
    VarSort {
        name: String,
        var: String,
        first: VarSort,
        second: VarSort,
    },
    #[error("axiom `{0}` contains metavariables; declare it as a schema")]
    NotGround(String),
    #[error("conclusion of rule `{name}` uses ?{var}, which no premise binds")]
    UnboundVar { name: String, var: String },
    #[error("rule `{name}` expects {expected} premises, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("signature reference `{0}` cannot be resolved here")]
    Unresolved(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A derived rule: premise patterns over a conclusion pattern, all sharing
/// one substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedRule {
    pub name: Ident,
    pub premises: Vec<Pattern>,
    pub conclusion: Pattern,
}

impl fmt::Display for DerivedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prems: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        write!(f, "{} => {}", prems.join(" , "), self.conclusion)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    signature: Signature,
    axioms: BTreeMap<Ident, Formula>,
    schemas: BTreeMap<Ident, Pattern>,
    rules: BTreeMap<Ident, DerivedRule>,
    liberalized_term: bool,
}

impl Theory {
    /// An empty theory over `signature`.
    pub fn new(signature: Signature) -> Self {
        Theory {
            signature,
            ..Default::default()
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn liberalized_term(&self) -> bool {
        self.liberalized_term
    }

    pub fn set_liberalized_term(&mut self, on: bool) {
        self.liberalized_term = on;
    }

    pub fn axioms(&self) -> &BTreeMap<Ident, Formula> {
        &self.axioms
    }

    pub fn axiom(&self, name: &str) -> Option<&Formula> {
        self.axioms.get(name)
    }

    pub fn schemas(&self) -> &BTreeMap<Ident, Pattern> {
        &self.schemas
    }

    pub fn schema(&self, name: &str) -> Option<&Pattern> {
        self.schemas.get(name)
    }

    pub fn rules(&self) -> &BTreeMap<Ident, DerivedRule> {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&DerivedRule> {
        self.rules.get(name)
    }

    fn claim_name(&self, name: &str) -> Result<Ident, TheoryError> {
        if self.axioms.contains_key(name)
            || self.schemas.contains_key(name)
            || self.rules.contains_key(name)
        {
            return Err(TheoryError::Duplicate(name.into()));
        }
        Ok(Ident::new(name))
    }

    pub fn add_axiom(&mut self, name: &str, f: Formula) -> Result<(), TheoryError> {
        let id = self.claim_name(name)?;
        self.axioms.insert(id, f);
        Ok(())
    }

    pub fn add_schema(&mut self, name: &str, pat: Pattern) -> Result<(), TheoryError> {
        let id = self.claim_name(name)?;
        single_sorted(name, [&pat])?;
        self.schemas.insert(id, pat);
        Ok(())
    }

    pub fn add_rule(
        &mut self,
        name: &str,
        premises: Vec<Pattern>,
        conclusion: Pattern,
    ) -> Result<(), TheoryError> {
        let reserved =
            BUILTIN_RULES.contains(&name) || name.starts_with("boxI.") || name.starts_with("boxE.");
        if reserved {
            return Err(TheoryError::Reserved(name.into()));
        }
        if !Ident::is_valid(name) {
            return Err(TheoryError::BadName(name.into()));
        }
        let id = self.claim_name(name)?;
        let sorts = single_sorted(name, premises.iter().chain([&conclusion]))?;
        let mut bound = BTreeMap::new();
        premises.iter().for_each(|p| p.variables(&mut bound));
        if let Some(var) = sorts.keys().find(|v| !bound.contains_key(*v)) {
            return Err(TheoryError::UnboundVar {
                name: name.into(),
                var: var.to_string(),
            });
        }
        self.rules.insert(
            id.clone(),
            DerivedRule {
                name: id,
                premises,
                conclusion,
            },
        );
        Ok(())
    }

    /// Loads a theory whose signature is embedded in `text`.
    pub fn parse(text: &str) -> Result<Theory, TheoryError> {
        Self::parse_with(text, |r| Err(TheoryError::Unresolved(r.to_string())))
    }

    /// Loads a theory file, resolving `signature:` references relative to
    /// the file's directory.
    pub fn from_file(path: &Path) -> Result<Theory, TheoryError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| TheoryError::Io {
                path: p.to_path_buf(),
                source,
            })
        };
        let text = read(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse_with(&text, |r| read(&dir.join(r)))
    }

    /// Loads a theory, handing `signature: <ref>` lines to `resolve`.
    pub fn parse_with(
        text: &str,
        resolve: impl Fn(&str) -> Result<String, TheoryError>,
    ) -> Result<Theory, TheoryError> {
        let mut sig = Signature::new();
        let mut rigid = Vec::new();
        let mut items = Vec::new();
        let mut liberalized = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(reference) = line.strip_prefix("signature:") {
                let sig_text = resolve(reference.trim())?;
                for (j, sraw) in sig_text.lines().enumerate() {
                    let sline = strip_comment(sraw).trim();
                    if sline.is_empty() {
                        continue;
                    }
                    let known = sig.apply_line(sline, j + 1, &mut rigid).map_err(|source| {
                        TheoryError::Signature {
                            line: line_no,
                            source,
                        }
                    })?;
                    if !known {
                        return Err(TheoryError::Syntax {
                            line: line_no,
                            msg: format!("signature file line {}: unrecognised `{sline}`", j + 1),
                        });
                    }
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("option ") {
                let (key, value) = rest.split_once(':').ok_or_else(|| TheoryError::Syntax {
                    line: line_no,
                    msg: "option needs the form `option <key>: <value>`".into(),
                })?;
                liberalized = match (key.trim(), value.trim()) {
                    ("liberalized-term", "on") => true,
                    ("liberalized-term", "off") => false,
                    _ => {
                        return Err(TheoryError::Syntax {
                            line: line_no,
                            msg: format!("unknown option `{}`", rest.trim()),
                        })
                    }
                };
                continue;
            }
            let keyword = line.split_whitespace().next().unwrap_or("");
            if matches!(keyword, "axiom" | "schema" | "rule") {
                let rest = line[keyword.len()..].trim_start();
                let (name, body) = rest.split_once(':').ok_or_else(|| TheoryError::Syntax {
                    line: line_no,
                    msg: format!("`{keyword}` needs the form `{keyword} <name>: ...`"),
                })?;
                items.push((
                    line_no,
                    keyword,
                    name.trim().to_string(),
                    body.trim().to_string(),
                ));
                continue;
            }
            let known = sig
                .apply_line(line, line_no, &mut rigid)
                .map_err(|source| TheoryError::Signature {
                    line: line_no,
                    source,
                })?;
            if !known {
                return Err(TheoryError::Syntax {
                    line: line_no,
                    msg: format!("unrecognised line `{line}`"),
                });
            }
        }
        sig.finish(rigid)
            .map_err(|source| TheoryError::Signature { line: 0, source })?;

        let mut th = Theory::new(sig);
        th.liberalized_term = liberalized;
        for (line, keyword, name, body) in items {
            let formula_err = |source| TheoryError::Formula {
                line,
                name: name.clone(),
                source,
            };
            match keyword {
                "axiom" => {
                    let pat = parse_pattern(&body, &th.signature).map_err(formula_err)?;
                    let f = pat
                        .to_formula()
                        .ok_or_else(|| TheoryError::NotGround(name.clone()))?;
                    th.add_axiom(&name, f)?;
                }
                "schema" => {
                    let pat = parse_pattern(&body, &th.signature).map_err(formula_err)?;
                    th.add_schema(&name, pat)?;
                }
                _ => {
                    let (lhs, rhs) = body.split_once("=>").ok_or_else(|| TheoryError::Syntax {
                        line,
                        msg: format!("rule `{name}` needs `=>` before its conclusion"),
                    })?;
                    let premises = split_top_level(lhs)
                        .into_iter()
                        .map(|p| parse_pattern(p, &th.signature))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(formula_err)?;
                    let conclusion =
                        parse_pattern(rhs.trim(), &th.signature).map_err(formula_err)?;
                    th.add_rule(&name, premises, conclusion)?;
                }
            }
        }
        Ok(th)
    }

    /// Renders the theory with its signature embedded.
    pub fn render(&self) -> String {
        let mut out = self.signature.render();
        for (name, f) in &self.axioms {
            out.push_str(&format!("axiom {name}: {f}\n"));
        }
        for (name, p) in &self.schemas {
            out.push_str(&format!("schema {name}: {p}\n"));
        }
        for (name, r) in &self.rules {
            out.push_str(&format!("rule {name}: {r}\n"));
        }
        if self.liberalized_term {
            out.push_str("option liberalized-term: on\n");
        }
        out
    }
}

/// Splits on commas at parenthesis depth zero.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

fn single_sorted<'a>(
    name: &str,
    pats: impl IntoIterator<Item = &'a Pattern>,
) -> Result<BTreeMap<Ident, BTreeSet<VarSort>>, TheoryError> {
    let mut vars = BTreeMap::new();
    pats.into_iter().for_each(|p| p.variables(&mut vars));
    for (v, sorts) in &vars {
        let mut it = sorts.iter();
        if let (Some(&first), Some(&second)) = (it.next(), it.next()) {
            return Err(TheoryError::VarSort {
                name: name.into(),
                var: v.to_string(),
                first,
                second,
            });
        }
    }
    Ok(vars)
}

/// Applies a derived rule to concrete premises. Returns the instantiated
/// conclusion when one substitution matches every premise pattern.
pub fn instantiate_rule(
    rule: &DerivedRule,
    premises: &[Formula],
) -> Result<Option<Formula>, TheoryError> {
    if premises.len() != rule.premises.len() {
        return Err(TheoryError::Arity {
            name: rule.name.to_string(),
            expected: rule.premises.len(),
            found: premises.len(),
        });
    }
    let mut subst = Subst::default();
    for (pat, f) in rule.premises.iter().zip(premises) {
        if !subst.match_into(pat, f) {
            return Ok(None);
        }
    }
    Ok(subst.apply(&rule.conclusion))
}
