use std::collections::{BTreeMap, BTreeSet};

use super::{CheckReport, Derivation, Diagnostic, ErrorKind, Label, Rule, TreePath, Verdict};
use crate::syntax::{is_term_dischargeable, occurs_in, Formula, Ident};
use crate::theory::{instantiate_rule, match_schema, Theory};

/// A premise of a rule instance as seen by that instance: its end-formula
/// and its undischarged assumptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Child {
    pub end: Formula,
    pub open: BTreeSet<(Label, Formula)>,
}

impl Child {
    pub fn new(end: Formula, open: impl IntoIterator<Item = (u32, Formula)>) -> Child {
        Child {
            end,
            open: open.into_iter().map(|(l, f)| (Label(l), f)).collect(),
        }
    }
}

type Problem = (ErrorKind, String);

fn shape(msg: impl Into<String>) -> Option<Problem> {
    Some((ErrorKind::ShapeMismatch, msg.into()))
}

fn side(msg: impl Into<String>) -> Option<Problem> {
    Some((ErrorKind::SideConditionViolation, msg.into()))
}

fn discharge_err(msg: impl Into<String>) -> Option<Problem> {
    Some((ErrorKind::DischargeError, msg.into()))
}

/// Children whose assumptions an instance of `rule` may discharge.
fn scope<'a>(rule: &Rule, children: &'a [Child]) -> &'a [Child] {
    match rule {
        Rule::Term(_) => children.last().map_or(&[], std::slice::from_ref),
        _ => children,
    }
}

/// In-scope assumptions whose label is discharged.
fn claimed(
    rule: &Rule,
    children: &[Child],
    discharge: &BTreeSet<Label>,
) -> BTreeSet<(Label, Formula)> {
    scope(rule, children)
        .iter()
        .flat_map(|c| c.open.iter())
        .filter(|(l, _)| discharge.contains(l))
        .cloned()
        .collect()
}

/// Assumptions left open below the instance after its discharges.
fn remaining(
    rule: &Rule,
    children: &[Child],
    discharge: &BTreeSet<Label>,
) -> BTreeSet<(Label, Formula)> {
    let n = children.len();
    let mut out = BTreeSet::new();
    for (i, c) in children.iter().enumerate() {
        let in_scope = !matches!(rule, Rule::Term(_)) || i + 1 == n;
        out.extend(
            c.open
                .iter()
                .filter(|(l, _)| !(in_scope && discharge.contains(l)))
                .cloned(),
        );
    }
    out
}

fn arity(children: &[Child], n: usize, rule: &Rule) -> Option<Problem> {
    (children.len() != n).then(|| {
        (
            ErrorKind::ShapeMismatch,
            format!("{rule} takes {n} premise(s), found {}", children.len()),
        )
    })
}

/// Checks one rule instance given its premises. Shape is checked first,
/// then discharges, then side conditions; the first problem found is
/// returned.
pub fn check_rule_instance(
    rule: &Rule,
    conclusion: &Formula,
    children: &[Child],
    discharge: &BTreeSet<Label>,
    th: &Theory,
) -> Option<(ErrorKind, String)> {
    if let Some(p) = check_shape(rule, conclusion, children, th) {
        return Some(p);
    }
    if !rule.discharges() && !discharge.is_empty() {
        return discharge_err(format!("{rule} discharges no assumptions"));
    }
    let taken = claimed(rule, children, discharge);
    let allowed: Box<dyn Fn(&Formula) -> bool> = match rule {
        Rule::ImpI => match conclusion {
            Formula::Imp(ante, _) => {
                let ante = (**ante).clone();
                Box::new(move |f| *f == ante)
            }
            _ => unreachable!("shape checked"),
        },
        Rule::Raa => {
            let neg = Formula::not(conclusion.clone());
            Box::new(move |f| *f == neg)
        }
        Rule::BoxI(m) => {
            let Formula::At(c, _) = &children[0].end else {
                unreachable!("shape checked")
            };
            let dia = Formula::dia(m, Formula::Nominal(c.clone()));
            Box::new(move |f| *f == dia)
        }
        Rule::Term(a) => {
            let mut ok: BTreeSet<Formula> = children[..children.len() - 1]
                .iter()
                .map(|c| c.end.clone())
                .collect();
            ok.insert(Formula::Nominal(a.clone()));
            Box::new(move |f| ok.contains(f))
        }
        Rule::Name => Box::new(|f| matches!(f, Formula::Nominal(_))),
        _ => Box::new(|_| true),
    };
    if let Some((l, f)) = taken.iter().find(|(_, f)| !allowed(f)) {
        return discharge_err(format!("{rule} cannot discharge assumption {l} of `{f}`"));
    }
    let rest = remaining(rule, children, discharge);
    match rule {
        Rule::Raa => match conclusion {
            Formula::Prop(_) => None,
            _ => side(format!(
                "conclusion `{conclusion}` of raa is not a propositional letter"
            )),
        },
        Rule::BoxI(_) => {
            let Formula::At(c, _) = &children[0].end else {
                unreachable!("shape checked")
            };
            if occurs_in(c, conclusion) {
                return side(format!(
                    "nominal `{c}` occurs in the conclusion `{conclusion}`"
                ));
            }
            if let Some((l, f)) = rest.iter().find(|(_, f)| occurs_in(c, f)) {
                return side(format!(
                    "nominal `{c}` occurs in undischarged assumption {l} `{f}`"
                ));
            }
            None
        }
        Rule::Name => {
            let names: BTreeSet<&Ident> = taken
                .iter()
                .filter_map(|(_, f)| match f {
                    Formula::Nominal(a) => Some(a),
                    _ => None,
                })
                .collect();
            if names.len() > 1 {
                return discharge_err("name discharges assumptions of more than one nominal");
            }
            let a = names.into_iter().next()?;
            if occurs_in(a, conclusion) {
                return side(format!(
                    "nominal `{a}` occurs in the conclusion `{conclusion}`"
                ));
            }
            if let Some((l, f)) = rest.iter().find(|(_, f)| occurs_in(a, f)) {
                return side(format!(
                    "nominal `{a}` occurs in undischarged assumption {l} `{f}`"
                ));
            }
            None
        }
        Rule::Term(_) => {
            let (premises, last) = children.split_at(children.len() - 1);
            for (i, p) in premises.iter().enumerate() {
                if !is_term_dischargeable(&p.end, th) {
                    return side(format!(
                        "premise {i} `{}` is not a satisfaction statement",
                        p.end
                    ));
                }
            }
            if !is_term_dischargeable(conclusion, th) {
                return side(format!(
                    "conclusion `{conclusion}` is not a satisfaction statement"
                ));
            }
            let left: Vec<_> = last[0]
                .open
                .iter()
                .filter(|(l, _)| !discharge.contains(l))
                .collect();
            if let Some((l, f)) = left.first() {
                return side(format!(
                    "the delimited subderivation keeps undischarged assumption {l} `{f}`"
                ));
            }
            None
        }
        _ => None,
    }
}

fn check_shape(
    rule: &Rule,
    conclusion: &Formula,
    children: &[Child],
    th: &Theory,
) -> Option<Problem> {
    let ends: Vec<&Formula> = children.iter().map(|c| &c.end).collect();
    let want = |expected: Formula| -> Option<Problem> {
        (expected != *conclusion).then(|| {
            (
                ErrorKind::ShapeMismatch,
                format!("conclusion should be `{expected}`, found `{conclusion}`"),
            )
        })
    };
    match rule {
        Rule::AndI => arity(children, 2, rule)
            .or_else(|| want(Formula::and(ends[0].clone(), ends[1].clone()))),
        Rule::AndE1 | Rule::AndE2 => arity(children, 1, rule).or_else(|| match ends[0] {
            Formula::And(l, r) => want(if *rule == Rule::AndE1 {
                (**l).clone()
            } else {
                (**r).clone()
            }),
            f => shape(format!("premise `{f}` is not a conjunction")),
        }),
        Rule::ImpI => arity(children, 1, rule).or_else(|| match conclusion {
            Formula::Imp(_, cons) if **cons == *ends[0] => None,
            Formula::Imp(_, cons) => {
                shape(format!("premise should be `{cons}`, found `{}`", ends[0]))
            }
            _ => shape(format!("conclusion `{conclusion}` is not an implication")),
        }),
        Rule::ImpE => arity(children, 2, rule).or_else(|| match ends[0] {
            Formula::Imp(ante, cons) if **ante == *ends[1] => want((**cons).clone()),
            Formula::Imp(ante, _) => shape(format!(
                "second premise should be `{ante}`, found `{}`",
                ends[1]
            )),
            f => shape(format!("first premise `{f}` is not an implication")),
        }),
        Rule::Raa => arity(children, 1, rule).or_else(|| match ends[0] {
            Formula::Bot => None,
            f => shape(format!("premise `{f}` is not bot")),
        }),
        Rule::SatI => arity(children, 2, rule).or_else(|| match ends[0] {
            Formula::Nominal(a) => want(Formula::At(a.clone(), Box::new(ends[1].clone()))),
            f => shape(format!("first premise `{f}` is not a nominal")),
        }),
        Rule::SatE => arity(children, 2, rule).or_else(|| match (ends[0], ends[1]) {
            (Formula::Nominal(a), Formula::At(b, body)) if a == b => want((**body).clone()),
            (Formula::Nominal(a), f) => {
                shape(format!("second premise `{f}` is not of the form @{a} ..."))
            }
            (f, _) => shape(format!("first premise `{f}` is not a nominal")),
        }),
        Rule::BoxI(m) => {
            if !th.signature().modalities().contains(m) {
                return Some((ErrorKind::UnknownRule, format!("no modality `{m}`")));
            }
            arity(children, 1, rule).or_else(|| match ends[0] {
                Formula::At(c, body) if th.signature().nominals().contains(c) => {
                    want(Formula::Nec(m.clone(), body.clone()))
                }
                f => shape(format!("premise `{f}` is not of the form @c ...")),
            })
        }
        Rule::BoxE(m) => {
            if !th.signature().modalities().contains(m) {
                return Some((ErrorKind::UnknownRule, format!("no modality `{m}`")));
            }
            arity(children, 2, rule).or_else(|| match (ends[0], ends[1].as_diamond()) {
                (Formula::Nec(n, body), Some((k, Formula::Nominal(e)))) if n == m && k == m => {
                    want(Formula::At(e.clone(), body.clone()))
                }
                (Formula::Nec(n, _), _) if n == m => shape(format!(
                    "second premise `{}` is not of the form dia {m} e",
                    ends[1]
                )),
                (f, _) => shape(format!("first premise `{f}` is not of the form {m} ...")),
            })
        }
        Rule::Term(a) => {
            if !th.signature().nominals().contains(a) {
                return shape(format!("`{a}` is not a declared nominal"));
            }
            match ends.last() {
                None => shape("term needs a final premise"),
                Some(last) => want((*last).clone()),
            }
        }
        Rule::Name => arity(children, 1, rule).or_else(|| want(ends[0].clone())),
        Rule::Derived(name) => {
            let Some(dr) = th.rule(name) else {
                return Some((ErrorKind::UnknownRule, format!("no rule named `{name}`")));
            };
            if let Some(p) = arity(children, dr.premises.len(), rule) {
                return Some(p);
            }
            let premises: Vec<Formula> = ends.iter().map(|f| (*f).clone()).collect();
            match instantiate_rule(dr, &premises) {
                Ok(Some(c)) => want(c),
                _ => shape(format!(
                    "premises do not match `{dr}` under one instantiation"
                )),
            }
        }
    }
}

/// What a subtree contributes to its parent, when it could be determined.
struct Summary {
    end: Option<Formula>,
    open: BTreeSet<(Label, Formula)>,
}

struct Checker<'a> {
    th: &'a Theory,
    diagnostics: Vec<Diagnostic>,
    axiom_leaves: BTreeSet<Formula>,
}

impl Checker<'_> {
    fn report(&mut self, path: &TreePath, rule: impl ToString, (kind, message): Problem) {
        self.diagnostics.push(Diagnostic {
            path: path.clone(),
            rule: rule.to_string(),
            kind,
            message,
        });
    }

    fn visit(&mut self, d: &Derivation, path: &mut TreePath) -> Summary {
        match d {
            Derivation::Assume { label, formula } => Summary {
                end: Some(formula.clone()),
                open: BTreeSet::from([(*label, formula.clone())]),
            },
            Derivation::Axiom { name } => {
                let end = self.th.axiom(name).cloned();
                match &end {
                    Some(f) => {
                        self.axiom_leaves.insert(f.clone());
                    }
                    None => self.report(
                        path,
                        "axiom",
                        (ErrorKind::UnknownAxiom, format!("no axiom named `{name}`")),
                    ),
                }
                Summary {
                    end,
                    open: BTreeSet::new(),
                }
            }
            Derivation::Schema { name, instance } => {
                match self.th.schema(name) {
                    None => self.report(
                        path,
                        "schema",
                        (ErrorKind::UnknownAxiom, format!("no schema named `{name}`")),
                    ),
                    Some(pat) if match_schema(pat, instance).is_none() => self.report(
                        path,
                        "schema",
                        (
                            ErrorKind::SchemaMismatch,
                            format!("`{instance}` is not an instance of `{pat}`"),
                        ),
                    ),
                    Some(_) => {
                        self.axiom_leaves.insert(instance.clone());
                    }
                }
                Summary {
                    end: Some(instance.clone()),
                    open: BTreeSet::new(),
                }
            }
            Derivation::Rule {
                rule,
                conclusion,
                discharge,
                premises,
            } => {
                let mut summaries = Vec::with_capacity(premises.len());
                for (i, p) in premises.iter().enumerate() {
                    path.0.push(i);
                    summaries.push(self.visit(p, path));
                    path.0.pop();
                }
                let known: Option<Vec<Child>> = summaries
                    .iter()
                    .map(|s| {
                        s.end.clone().map(|end| Child {
                            end,
                            open: s.open.clone(),
                        })
                    })
                    .collect();
                let open = match &known {
                    Some(children) => {
                        if let Some(p) =
                            check_rule_instance(rule, conclusion, children, discharge, self.th)
                        {
                            self.report(path, rule, p);
                        }
                        remaining(rule, children, discharge)
                    }
                    None => {
                        let children: Vec<Child> = summaries
                            .into_iter()
                            .map(|s| Child {
                                end: Formula::Bot,
                                open: s.open,
                            })
                            .collect();
                        remaining(rule, &children, discharge)
                    }
                };
                Summary {
                    end: Some(conclusion.clone()),
                    open,
                }
            }
        }
    }
}

/// Structural checks that do not depend on rule shapes: well-sortedness,
/// one formula per label, one discharging instance per label, and every
/// leaf of a discharged label lying in the discharging instance's scope.
fn global_checks(d: &Derivation, th: &Theory, out: &mut Vec<Diagnostic>) {
    let mut formulas: BTreeMap<Label, Formula> = BTreeMap::new();
    let mut owner: BTreeMap<Label, TreePath> = BTreeMap::new();
    d.walk(&mut |path, node| {
        let leaf_kind = match node {
            Derivation::Assume { .. } => "assume",
            Derivation::Axiom { .. } => "axiom",
            Derivation::Schema { .. } => "schema",
            Derivation::Rule { .. } => "",
        };
        let mut push = |rule: String, kind, message| {
            out.push(Diagnostic {
                path: path.clone(),
                rule,
                kind,
                message,
            })
        };
        let formula = match node {
            Derivation::Assume { formula, .. } => Some(formula),
            Derivation::Schema { instance, .. } => Some(instance),
            Derivation::Rule { conclusion, .. } => Some(conclusion),
            Derivation::Axiom { .. } => None,
        };
        let rule_id = match node {
            Derivation::Rule { rule, .. } => rule.to_string(),
            _ => leaf_kind.to_string(),
        };
        if let Some(f) = formula {
            if let Err(e) = th.signature().check_formula(f) {
                push(rule_id.clone(), ErrorKind::IllFormed, e.to_string());
            }
        }
        match node {
            Derivation::Assume { label, formula } => match formulas.get(label) {
                Some(prev) if prev != formula => push(
                    rule_id,
                    ErrorKind::DischargeError,
                    format!("label {label} is used for both `{prev}` and `{formula}`"),
                ),
                Some(_) => {}
                None => {
                    formulas.insert(*label, formula.clone());
                }
            },
            Derivation::Rule { discharge, .. } => {
                for l in discharge {
                    if let Some(prev) = owner.get(l) {
                        push(
                            rule_id.clone(),
                            ErrorKind::DischargeError,
                            format!("label {l} is already discharged at {prev}"),
                        );
                    } else {
                        owner.insert(*l, path.clone());
                    }
                }
            }
            _ => {}
        }
    });

    fn scoped(
        d: &Derivation,
        path: &mut TreePath,
        active: &mut Vec<Label>,
        owner: &BTreeMap<Label, TreePath>,
        out: &mut Vec<Diagnostic>,
    ) {
        match d {
            Derivation::Assume { label, .. } => {
                if let Some(at) = owner.get(label) {
                    if !active.contains(label) {
                        out.push(Diagnostic {
                            path: path.clone(),
                            rule: "assume".into(),
                            kind: ErrorKind::DischargeError,
                            message: format!(
                                "assumption {label} lies outside the scope of the instance at {at} that discharges it"
                            ),
                        });
                    }
                }
            }
            Derivation::Rule {
                rule,
                discharge,
                premises,
                ..
            } => {
                let n = premises.len();
                for (i, p) in premises.iter().enumerate() {
                    let in_scope = !matches!(rule, Rule::Term(_)) || i + 1 == n;
                    let before = active.len();
                    if in_scope {
                        active.extend(discharge.iter().copied());
                    }
                    path.0.push(i);
                    scoped(p, path, active, owner, out);
                    path.0.pop();
                    active.truncate(before);
                }
            }
            _ => {}
        }
    }
    scoped(d, &mut TreePath::default(), &mut Vec::new(), &owner, out);
}

/// Checks a whole derivation against a theory.
pub fn check_derivation(d: &Derivation, th: &Theory) -> CheckReport {
    let mut diagnostics = Vec::new();
    global_checks(d, th, &mut diagnostics);
    let mut checker = Checker {
        th,
        diagnostics: Vec::new(),
        axiom_leaves: BTreeSet::new(),
    };
    let summary = checker.visit(d, &mut TreePath::default());
    diagnostics.extend(checker.diagnostics);
    CheckReport {
        verdict: if diagnostics.is_empty() {
            Verdict::Accept
        } else {
            Verdict::Reject
        },
        end_formula: summary.end,
        undischarged: summary.open.iter().map(|(_, f)| f.clone()).collect(),
        undischarged_labelled: summary.open,
        axiom_leaves: checker.axiom_leaves,
        diagnostics,
    }
}

/// The assumptions of `d` that no rule instance discharges: those whose
/// label is not discharged by any instance having them in scope.
pub fn collect_undischarged(d: &Derivation) -> Result<BTreeSet<(Label, Formula)>, String> {
    let mut formulas: BTreeMap<Label, Formula> = BTreeMap::new();
    let mut conflict = None;
    d.walk(&mut |_, node| {
        if let Derivation::Assume { label, formula } = node {
            match formulas.get(label) {
                Some(prev) if prev != formula && conflict.is_none() => {
                    conflict = Some(format!(
                        "label {label} is used for both `{prev}` and `{formula}`"
                    ));
                }
                Some(_) => {}
                None => {
                    formulas.insert(*label, formula.clone());
                }
            }
        }
    });
    if let Some(msg) = conflict {
        return Err(msg);
    }
    fn go(d: &Derivation, active: &mut Vec<Label>, out: &mut BTreeSet<(Label, Formula)>) {
        match d {
            Derivation::Assume { label, formula } => {
                if !active.contains(label) {
                    out.insert((*label, formula.clone()));
                }
            }
            Derivation::Rule {
                rule,
                discharge,
                premises,
                ..
            } => {
                let n = premises.len();
                for (i, p) in premises.iter().enumerate() {
                    let before = active.len();
                    if !matches!(rule, Rule::Term(_)) || i + 1 == n {
                        active.extend(discharge.iter().copied());
                    }
                    go(p, active, out);
                    active.truncate(before);
                }
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    go(d, &mut Vec::new(), &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn th() -> Theory {
        Theory::parse("prop: p q r\nnom: a b c e\nmod: box D\naxiom rain: p -> q\n").unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, th().signature()).unwrap()
    }

    fn labels(ls: &[u32]) -> BTreeSet<Label> {
        ls.iter().map(|&l| Label(l)).collect()
    }

    fn kind(rule: Rule, concl: &str, children: &[Child], discharge: &[u32]) -> Option<ErrorKind> {
        check_rule_instance(&rule, &f(concl), children, &labels(discharge), &th()).map(|(k, _)| k)
    }

    fn leaf(end: &str) -> Child {
        Child::new(f(end), [])
    }

    #[test]
    fn box_elimination() {
        let kids = [leaf("box p"), leaf("dia box e")];
        assert_eq!(kind(Rule::BoxE("box".into()), "@e p", &kids, &[]), None);
        assert_eq!(
            kind(Rule::BoxE("box".into()), "@a p", &kids, &[]),
            Some(ErrorKind::ShapeMismatch)
        );
        let swapped = [leaf("dia box e"), leaf("box p")];
        assert_eq!(
            kind(Rule::BoxE("box".into()), "@e p", &swapped, &[]),
            Some(ErrorKind::ShapeMismatch)
        );
        assert_eq!(
            kind(Rule::BoxE("D".into()), "@e p", &kids, &[]),
            Some(ErrorKind::ShapeMismatch)
        );
    }

    #[test]
    fn raa_needs_propositional_letter() {
        let kid = [Child::new(Formula::Bot, [(1, f("~(p -> q)"))])];
        assert_eq!(
            kind(Rule::Raa, "p -> q", &kid, &[1]),
            Some(ErrorKind::SideConditionViolation)
        );
        let kid = [Child::new(Formula::Bot, [(1, f("~p"))])];
        assert_eq!(kind(Rule::Raa, "p", &kid, &[1]), None);
        assert_eq!(
            kind(Rule::Raa, "a", &[leaf("bot")], &[]),
            Some(ErrorKind::SideConditionViolation)
        );
    }

    #[test]
    fn name_freshness() {
        let kid = [Child::new(f("p -> @a p"), [(1, f("a"))])];
        assert_eq!(
            kind(Rule::Name, "p -> @a p", &kid, &[1]),
            Some(ErrorKind::SideConditionViolation)
        );
        let kid = [Child::new(f("p"), [(1, f("a")), (2, f("@a p"))])];
        assert_eq!(
            kind(Rule::Name, "p", &kid, &[1]),
            Some(ErrorKind::SideConditionViolation)
        );
        let kid = [Child::new(f("p"), [(1, f("a")), (2, f("@b p"))])];
        assert_eq!(kind(Rule::Name, "p", &kid, &[1]), None);
        let kid = [Child::new(f("p"), [(1, f("@b p"))])];
        assert_eq!(
            kind(Rule::Name, "p", &kid, &[1]),
            Some(ErrorKind::DischargeError)
        );
    }

    #[test]
    fn box_introduction() {
        let kid = [Child::new(
            f("@c p"),
            [(1, f("dia box c")), (2, f("box p"))],
        )];
        assert_eq!(kind(Rule::BoxI("box".into()), "box p", &kid, &[1]), None);
        assert_eq!(
            kind(Rule::BoxI("box".into()), "box p", &kid, &[]),
            Some(ErrorKind::SideConditionViolation)
        );
        let kid = [Child::new(f("@c p"), [(1, f("dia box c")), (2, f("@c q"))])];
        assert_eq!(
            kind(Rule::BoxI("box".into()), "box p", &kid, &[1]),
            Some(ErrorKind::SideConditionViolation)
        );
        let kid = [Child::new(f("@c c"), [(1, f("dia box c"))])];
        assert_eq!(
            kind(Rule::BoxI("box".into()), "box c", &kid, &[1]),
            Some(ErrorKind::SideConditionViolation)
        );
        let kid = [Child::new(f("@c p"), [(1, f("dia D c"))])];
        assert_eq!(
            kind(Rule::BoxI("box".into()), "box p", &kid, &[1]),
            Some(ErrorKind::DischargeError)
        );
    }

    #[test]
    fn term_rule() {
        let last = Child::new(f("@a q"), [(2, f("@a p")), (3, f("a"))]);
        let kids = [leaf("@a p"), last.clone()];
        assert_eq!(kind(Rule::Term("a".into()), "@a q", &kids, &[2, 3]), None);
        assert_eq!(
            kind(Rule::Term("a".into()), "@a q", &kids, &[2]),
            Some(ErrorKind::SideConditionViolation)
        );
        let extra = Child::new(f("@a q"), [(2, f("@a p")), (3, f("a")), (4, f("r"))]);
        assert_eq!(
            kind(
                Rule::Term("a".into()),
                "@a q",
                &[leaf("@a p"), extra],
                &[2, 3]
            ),
            Some(ErrorKind::SideConditionViolation)
        );
        let local = Child::new(f("q"), [(2, f("p")), (3, f("a"))]);
        assert_eq!(
            kind(Rule::Term("a".into()), "q", &[leaf("p"), local], &[2, 3]),
            Some(ErrorKind::SideConditionViolation)
        );
        let only_a = Child::new(f("@a a"), [(3, f("a"))]);
        assert_eq!(kind(Rule::Term("a".into()), "@a a", &[only_a], &[3]), None);
        let wrong = Child::new(f("@a q"), [(2, f("@b p")), (3, f("a"))]);
        assert_eq!(
            kind(
                Rule::Term("a".into()),
                "@a q",
                &[leaf("@a p"), wrong],
                &[2, 3]
            ),
            Some(ErrorKind::DischargeError)
        );
    }

    #[test]
    fn connective_shapes() {
        assert_eq!(
            kind(Rule::AndI, "p & q", &[leaf("p"), leaf("q")], &[]),
            None
        );
        assert_eq!(
            kind(Rule::AndI, "q & p", &[leaf("p"), leaf("q")], &[]),
            Some(ErrorKind::ShapeMismatch)
        );
        assert_eq!(kind(Rule::AndE2, "q", &[leaf("p & q")], &[]), None);
        assert_eq!(
            kind(Rule::ImpE, "q", &[leaf("p -> q"), leaf("p")], &[]),
            None
        );
        assert_eq!(
            kind(Rule::ImpE, "q", &[leaf("p"), leaf("p -> q")], &[]),
            Some(ErrorKind::ShapeMismatch)
        );
        assert_eq!(kind(Rule::SatI, "@a p", &[leaf("a"), leaf("p")], &[]), None);
        assert_eq!(kind(Rule::SatE, "p", &[leaf("a"), leaf("@a p")], &[]), None);
        assert_eq!(
            kind(Rule::SatE, "p", &[leaf("@a p"), leaf("a")], &[]),
            Some(ErrorKind::ShapeMismatch)
        );
        assert_eq!(
            kind(Rule::AndI, "p & q", &[leaf("p"), leaf("q")], &[1]),
            Some(ErrorKind::DischargeError)
        );
        let kid = [Child::new(f("q"), [(1, f("q"))])];
        assert_eq!(
            kind(Rule::ImpI, "p -> q", &kid, &[1]),
            Some(ErrorKind::DischargeError)
        );
        assert_eq!(kind(Rule::ImpI, "p -> q", &kid, &[]), None);
        assert_eq!(
            kind(Rule::Derived("nope".into()), "p", &[leaf("p")], &[]),
            Some(ErrorKind::UnknownRule)
        );
    }

    #[test]
    fn whole_derivation() {
        let th = th();
        // p -> p, discharging a nominal that does not occur elsewhere.
        let d = Derivation::rule(
            Rule::ImpI,
            f("p -> p"),
            &[1],
            vec![Derivation::assume(1, f("p"))],
        );
        let r = check_derivation(&d, &th);
        assert!(r.accepted(), "{}", r.render());
        assert!(r.undischarged.is_empty());

        let d = Derivation::rule(
            Rule::ImpE,
            f("q"),
            &[],
            vec![
                Derivation::Axiom {
                    name: "rain".into(),
                },
                Derivation::assume(1, f("p")),
            ],
        );
        let r = check_derivation(&d, &th);
        assert!(r.accepted());
        assert_eq!(r.undischarged, BTreeSet::from([f("p")]));
        assert_eq!(r.axiom_leaves, BTreeSet::from([f("p -> q")]));
        assert_eq!(collect_undischarged(&d).unwrap(), r.undischarged_labelled);
    }

    #[test]
    fn label_discipline() {
        let th = th();
        let clash = Derivation::rule(
            Rule::AndI,
            f("p & q"),
            &[],
            vec![Derivation::assume(1, f("p")), Derivation::assume(1, f("q"))],
        );
        let r = check_derivation(&clash, &th);
        assert_eq!(r.diagnostics[0].kind, ErrorKind::DischargeError);
        assert!(collect_undischarged(&clash).is_err());

        // Label 1 is discharged on the left but also used on the right.
        let outside = Derivation::rule(
            Rule::AndI,
            f("(p -> p) & p"),
            &[],
            vec![
                Derivation::rule(
                    Rule::ImpI,
                    f("p -> p"),
                    &[1],
                    vec![Derivation::assume(1, f("p"))],
                ),
                Derivation::assume(1, f("p")),
            ],
        );
        let r = check_derivation(&outside, &th);
        assert!(!r.accepted());
        assert_eq!(r.diagnostics[0].kind, ErrorKind::DischargeError);
        assert_eq!(r.diagnostics[0].path.to_string(), "r.1");
    }
}
