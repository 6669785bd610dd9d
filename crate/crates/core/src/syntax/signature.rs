use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Formula, Ident, KEYWORDS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("`{name}` is not a valid identifier")]
    BadIdent { name: String },
    #[error("`{name}` is a reserved word")]
    Reserved { name: String },
    #[error("`{name}` is already declared as a {existing}")]
    Clash { name: String, existing: Sort },
    #[error("rigid symbol `{name}` is not a declared predicate")]
    RigidNotPredicate { name: String },
    #[error("predicate `{name}` must have positive arity")]
    ZeroArity { name: String },
}

/// The sort an identifier is declared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Prop,
    Nominal,
    Modality,
    Predicate(usize),
    Time,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Prop => f.write_str("propositional symbol"),
            Sort::Nominal => f.write_str("nominal"),
            Sort::Modality => f.write_str("modality"),
            Sort::Predicate(n) => write!(f, "predicate of arity {n}"),
            Sort::Time => f.write_str("time constant"),
        }
    }
}

/// Declared vocabulary. The five identifier sets are pairwise disjoint and
/// every rigid symbol is a declared predicate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    props: BTreeSet<Ident>,
    nominals: BTreeSet<Ident>,
    modalities: BTreeSet<Ident>,
    predicates: BTreeMap<Ident, usize>,
    times: BTreeSet<Ident>,
    rigid: BTreeSet<Ident>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn props(&self) -> &BTreeSet<Ident> {
        &self.props
    }

    pub fn nominals(&self) -> &BTreeSet<Ident> {
        &self.nominals
    }

    pub fn modalities(&self) -> &BTreeSet<Ident> {
        &self.modalities
    }

    pub fn predicates(&self) -> &BTreeMap<Ident, usize> {
        &self.predicates
    }

    pub fn times(&self) -> &BTreeSet<Ident> {
        &self.times
    }

    pub fn rigid(&self) -> &BTreeSet<Ident> {
        &self.rigid
    }

    pub fn is_rigid(&self, pred: &str) -> bool {
        self.rigid.contains(pred)
    }

    pub fn sort_of(&self, name: &str) -> Option<Sort> {
        if self.props.contains(name) {
            Some(Sort::Prop)
        } else if self.nominals.contains(name) {
            Some(Sort::Nominal)
        } else if self.modalities.contains(name) {
            Some(Sort::Modality)
        } else if let Some(&n) = self.predicates.get(name) {
            Some(Sort::Predicate(n))
        } else if self.times.contains(name) {
            Some(Sort::Time)
        } else {
            None
        }
    }

    fn admit(&self, name: &str, sort: Sort) -> Result<Ident, SignatureError> {
        if !Ident::is_valid(name) {
            return Err(SignatureError::BadIdent { name: name.into() });
        }
        let reserved = KEYWORDS.contains(&name) && !(sort == Sort::Modality && name == "box");
        if reserved {
            return Err(SignatureError::Reserved { name: name.into() });
        }
        match self.sort_of(name) {
            Some(existing) if existing != sort => Err(SignatureError::Clash {
                name: name.into(),
                existing,
            }),
            _ => Ok(Ident::new(name)),
        }
    }

    pub fn add_prop(&mut self, name: &str) -> Result<(), SignatureError> {
        let id = self.admit(name, Sort::Prop)?;
        self.props.insert(id);
        Ok(())
    }

    pub fn add_nominal(&mut self, name: &str) -> Result<(), SignatureError> {
        let id = self.admit(name, Sort::Nominal)?;
        self.nominals.insert(id);
        Ok(())
    }

    pub fn add_modality(&mut self, name: &str) -> Result<(), SignatureError> {
        let id = self.admit(name, Sort::Modality)?;
        self.modalities.insert(id);
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if arity == 0 {
            return Err(SignatureError::ZeroArity { name: name.into() });
        }
        let id = self.admit(name, Sort::Predicate(arity))?;
        self.predicates.insert(id, arity);
        Ok(())
    }

    pub fn add_time(&mut self, name: &str) -> Result<(), SignatureError> {
        let id = self.admit(name, Sort::Time)?;
        self.times.insert(id);
        Ok(())
    }

    pub fn add_rigid(&mut self, name: &str) -> Result<(), SignatureError> {
        if !self.predicates.contains_key(name) {
            return Err(SignatureError::RigidNotPredicate { name: name.into() });
        }
        self.rigid.insert(Ident::new(name));
        Ok(())
    }

    /// Parses a whole signature file. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Signature, SignatureError> {
        let mut sig = Signature::new();
        let mut rigid = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if !sig.apply_line(line, i + 1, &mut rigid)? {
                return Err(SignatureError::Syntax {
                    line: i + 1,
                    msg: format!("unrecognised declaration `{line}`"),
                });
            }
        }
        sig.finish(rigid)?;
        Ok(sig)
    }

    /// Applies one declaration line if it is one. Rigid declarations are
    /// deferred into `rigid` so they may precede the predicates they name.
    pub(crate) fn apply_line(
        &mut self,
        line: &str,
        line_no: usize,
        rigid: &mut Vec<String>,
    ) -> Result<bool, SignatureError> {
        let Some((key, rest)) = line.split_once(':') else {
            return Ok(false);
        };
        let names = rest.split_whitespace();
        match key.trim() {
            "prop" => names.map(|n| self.add_prop(n)).try_for_each(|r| r)?,
            "nom" => names.map(|n| self.add_nominal(n)).try_for_each(|r| r)?,
            "mod" => names.map(|n| self.add_modality(n)).try_for_each(|r| r)?,
            "time" => names.map(|n| self.add_time(n)).try_for_each(|r| r)?,
            "rigid" => rigid.extend(names.map(String::from)),
            "pred" => {
                for decl in names {
                    let (name, arity) =
                        decl.split_once('/').ok_or_else(|| SignatureError::Syntax {
                            line: line_no,
                            msg: format!(
                                "predicate declaration `{decl}` needs the form name/arity"
                            ),
                        })?;
                    let arity = arity.parse().map_err(|_| SignatureError::Syntax {
                        line: line_no,
                        msg: format!("bad arity in `{decl}`"),
                    })?;
                    self.add_predicate(name, arity)?;
                }
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub(crate) fn finish(&mut self, rigid: Vec<String>) -> Result<(), SignatureError> {
        rigid.iter().try_for_each(|r| self.add_rigid(r))
    }

    /// The sub-signature keeping only the given identifiers.
    pub fn restrict_to(&self, keep: &BTreeSet<Ident>) -> Signature {
        let filter = |s: &BTreeSet<Ident>| s.intersection(keep).cloned().collect::<BTreeSet<_>>();
        Signature {
            props: filter(&self.props),
            nominals: filter(&self.nominals),
            modalities: filter(&self.modalities),
            predicates: self
                .predicates
                .iter()
                .filter(|(p, _)| keep.contains(*p))
                .map(|(p, n)| (p.clone(), *n))
                .collect(),
            times: filter(&self.times),
            rigid: filter(&self.rigid),
        }
    }

    /// Checks that every identifier in `f` is declared with the sort its
    /// position requires.
    pub fn check_formula(&self, f: &Formula) -> Result<(), SortError> {
        let expect = |name: &Ident, want: Sort| match self.sort_of(name) {
            None => Err(SortError::Undeclared(name.to_string())),
            Some(s) if s == want => Ok(()),
            Some(s) => Err(SortError::Mismatch {
                name: name.to_string(),
                expected: want,
                found: s,
            }),
        };
        match f {
            Formula::Prop(p) => expect(p, Sort::Prop),
            Formula::Nominal(a) => expect(a, Sort::Nominal),
            Formula::Pred(p, ts) => {
                match self.sort_of(p) {
                    None => return Err(SortError::Undeclared(p.to_string())),
                    Some(Sort::Predicate(n)) if n == ts.len() => {}
                    Some(Sort::Predicate(n)) => {
                        return Err(SortError::Arity {
                            name: p.to_string(),
                            expected: n,
                            found: ts.len(),
                        })
                    }
                    Some(s) => {
                        return Err(SortError::Mismatch {
                            name: p.to_string(),
                            expected: Sort::Predicate(ts.len()),
                            found: s,
                        })
                    }
                }
                ts.iter().try_for_each(|t| expect(t, Sort::Time))
            }
            Formula::And(l, r) | Formula::Imp(l, r) => {
                self.check_formula(l)?;
                self.check_formula(r)
            }
            Formula::Bot => Ok(()),
            Formula::Nec(m, body) => {
                expect(m, Sort::Modality)?;
                self.check_formula(body)
            }
            Formula::At(a, body) => {
                expect(a, Sort::Nominal)?;
                self.check_formula(body)
            }
        }
    }

    /// Renders the signature in its file format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |key: &str, items: Vec<String>| {
            if !items.is_empty() {
                out.push_str(&format!("{key}: {}\n", items.join(" ")));
            }
        };
        let names = |s: &BTreeSet<Ident>| s.iter().map(|x| x.to_string()).collect();
        line("prop", names(&self.props));
        line("nom", names(&self.nominals));
        line("mod", names(&self.modalities));
        line(
            "pred",
            self.predicates
                .iter()
                .map(|(p, n)| format!("{p}/{n}"))
                .collect(),
        );
        line("time", names(&self.times));
        line("rigid", names(&self.rigid));
        out
    }
}

/// A well-sortedness failure of an already constructed formula.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("`{name}` is a {found}, expected a {expected}")]
    Mismatch {
        name: String,
        expected: Sort,
        found: Sort,
    },
    #[error("predicate `{name}` has arity {expected}, applied to {found} terms")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signature_file() {
        let sig = Signature::parse(
            "# Sally-Anne\nnom: a\nmod: S D B\npred: p/1 lt/2\ntime: t0 t1\nrigid: lt\n",
        )
        .unwrap();
        assert_eq!(sig.sort_of("lt"), Some(Sort::Predicate(2)));
        assert_eq!(sig.sort_of("t1"), Some(Sort::Time));
        assert!(sig.is_rigid("lt"));
        assert!(!sig.is_rigid("p"));
        assert_eq!(Signature::parse(&sig.render()).unwrap(), sig);
    }

    #[test]
    fn sets_are_disjoint() {
        let err = Signature::parse("prop: p\nnom: p\n").unwrap_err();
        assert!(matches!(err, SignatureError::Clash { .. }));
    }

    #[test]
    fn rigid_requires_predicate() {
        let err = Signature::parse("prop: p\nrigid: p\n").unwrap_err();
        assert_eq!(err, SignatureError::RigidNotPredicate { name: "p".into() });
    }

    #[test]
    fn keywords_reserved_except_box_modality() {
        assert!(Signature::parse("mod: box\n").is_ok());
        assert!(matches!(
            Signature::parse("prop: box\n"),
            Err(SignatureError::Reserved { .. })
        ));
        assert!(matches!(
            Signature::parse("mod: dia\n"),
            Err(SignatureError::Reserved { .. })
        ));
    }

    #[test]
    fn check_formula_sorts() {
        let sig = Signature::parse("prop: p\nnom: a\npred: lt/2\ntime: t0\n").unwrap();
        assert!(sig
            .check_formula(&Formula::at("a", Formula::prop("p")))
            .is_ok());
        assert!(matches!(
            sig.check_formula(&Formula::at("p", Formula::prop("p"))),
            Err(SortError::Mismatch { .. })
        ));
        assert!(matches!(
            sig.check_formula(&Formula::pred("lt", &["t0"])),
            Err(SortError::Arity { .. })
        ));
        assert_eq!(
            sig.check_formula(&Formula::prop("x")),
            Err(SortError::Undeclared("x".into()))
        );
    }
}
