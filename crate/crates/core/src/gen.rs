//! Random formulas and derivations over a signature, for property tests
//! and fuzzing. Generated derivations are plausible, not guaranteed to
//! check; callers filter them through the kernel.

use std::collections::BTreeMap;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

use crate::kernel::{collect_undischarged, Derivation, Label, Rule};
use crate::syntax::{Formula, Ident, Signature};

fn pick<R: Rng>(rng: &mut R, set: &std::collections::BTreeSet<Ident>) -> Option<Ident> {
    set.iter().choose(rng).cloned()
}

fn atom<R: Rng>(rng: &mut R, sig: &Signature) -> Formula {
    let mut options: Vec<Formula> = vec![Formula::Bot];
    options.extend(sig.props().iter().map(|p| Formula::Prop(p.clone())));
    options.extend(sig.nominals().iter().map(|a| Formula::Nominal(a.clone())));
    let times: Vec<&Ident> = sig.times().iter().collect();
    if !times.is_empty() {
        for (p, &k) in sig.predicates() {
            let ts = (0..k)
                .map(|_| (*times.choose(rng).unwrap()).clone())
                .collect();
            options.push(Formula::Pred(p.clone(), ts));
        }
    }
    // Favour letters over bot so formulas are not mostly constant.
    if options.len() > 1 && rng.gen_bool(0.85) {
        options.remove(0);
    }
    options.choose(rng).unwrap().clone()
}

/// A random formula over `sig` with at most `depth` nested connectives.
pub fn random_formula<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return atom(rng, sig);
    }
    let sub = |rng: &mut R| random_formula(rng, sig, depth - 1);
    match rng.gen_range(0..7) {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::imp(sub(rng), sub(rng)),
        2 => Formula::not(sub(rng)),
        3 => match pick(rng, sig.modalities()) {
            Some(m) => Formula::Nec(m, Box::new(sub(rng))),
            None => Formula::imp(sub(rng), sub(rng)),
        },
        4 => match pick(rng, sig.modalities()) {
            Some(m) => Formula::dia(&m, sub(rng)),
            None => Formula::and(sub(rng), sub(rng)),
        },
        _ => match pick(rng, sig.nominals()) {
            Some(a) => Formula::At(a, Box::new(sub(rng))),
            None => Formula::not(sub(rng)),
        },
    }
}

/// Builds derivations bottom-up, mostly respecting rule shapes.
struct Builder<'a, R> {
    rng: &'a mut R,
    sig: &'a Signature,
    next_label: u32,
    /// Labels already handed out, for building multi-leaf parcels.
    labels: BTreeMap<Formula, u32>,
}

impl<R: Rng> Builder<'_, R> {
    fn formula(&mut self) -> Formula {
        random_formula(self.rng, self.sig, 2)
    }

    fn assume(&mut self, f: Formula) -> Derivation {
        let reuse = self
            .labels
            .get(&f)
            .copied()
            .filter(|_| self.rng.gen_bool(0.4));
        let label = reuse.unwrap_or_else(|| {
            self.next_label += 1;
            self.labels.insert(f.clone(), self.next_label);
            self.next_label
        });
        Derivation::assume(label, f)
    }

    fn fresh_assume(&mut self, f: Formula) -> Derivation {
        self.next_label += 1;
        Derivation::assume(self.next_label, f)
    }

    fn nominal(&mut self) -> Option<Ident> {
        pick(self.rng, self.sig.nominals())
    }

    fn modality(&mut self) -> Option<Ident> {
        pick(self.rng, self.sig.modalities())
    }

    fn end(d: &Derivation) -> Formula {
        match d {
            Derivation::Assume { formula, .. } => formula.clone(),
            Derivation::Schema { instance, .. } => instance.clone(),
            Derivation::Rule { conclusion, .. } => conclusion.clone(),
            Derivation::Axiom { .. } => Formula::Bot,
        }
    }

    /// Labels of `d`'s open assumptions whose formula satisfies `keep`.
    fn open_labels(d: &Derivation, keep: impl Fn(&Formula) -> bool) -> Vec<u32> {
        collect_undischarged(d)
            .map(|set| {
                set.into_iter()
                    .filter(|(_, f)| keep(f))
                    .map(|(Label(l), _)| l)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// A derivation of `goal`, usually just an assumption.
    fn towards(&mut self, goal: Formula, depth: usize) -> Derivation {
        if depth > 1 && self.rng.gen_bool(0.3) {
            let d = self.build(depth - 1);
            if Self::end(&d) == goal {
                return d;
            }
        }
        self.assume(goal)
    }

    fn build(&mut self, depth: usize) -> Derivation {
        let d = self.build_step(depth);
        if d.depth() <= depth {
            return d;
        }
        let f = self.formula();
        self.assume(f)
    }

    fn build_step(&mut self, depth: usize) -> Derivation {
        if depth <= 1 || self.rng.gen_bool(0.15) {
            let f = self.formula();
            return self.assume(f);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..13) {
            0 => {
                let (l, r) = (self.build(d), self.build(d));
                let c = Formula::and(Self::end(&l), Self::end(&r));
                Derivation::rule(Rule::AndI, c, &[], vec![l, r])
            }
            1 | 2 => {
                let child = self.build(d);
                let child = match Self::end(&child) {
                    Formula::And(..) => child,
                    _ => {
                        let f = Formula::and(self.formula(), self.formula());
                        self.assume(f)
                    }
                };
                let Formula::And(l, r) = Self::end(&child) else {
                    unreachable!()
                };
                if self.rng.gen_bool(0.5) {
                    Derivation::rule(Rule::AndE1, *l, &[], vec![child])
                } else {
                    Derivation::rule(Rule::AndE2, *r, &[], vec![child])
                }
            }
            3 => {
                let child = self.build(d);
                let opened = collect_undischarged(&child).unwrap_or_default();
                let (ante, discharge) = match opened.iter().choose(self.rng) {
                    Some((l, f)) if self.rng.gen_bool(0.8) => (f.clone(), vec![l.0]),
                    _ => (self.formula(), vec![]),
                };
                let c = Formula::imp(ante, Self::end(&child));
                Derivation::rule(Rule::ImpI, c, &discharge, vec![child])
            }
            4 => {
                let major = self.build(d);
                let major = match Self::end(&major) {
                    Formula::Imp(..) => major,
                    _ => {
                        let f = Formula::imp(self.formula(), self.formula());
                        self.assume(f)
                    }
                };
                let Formula::Imp(ante, cons) = Self::end(&major) else {
                    unreachable!()
                };
                let minor = self.towards(*ante, d);
                Derivation::rule(Rule::ImpE, *cons, &[], vec![major, minor])
            }
            5 => {
                let Some(p) = pick(self.rng, self.sig.props()) else {
                    return self.build(d);
                };
                let p = Formula::Prop(p);
                let neg = self.fresh_assume(Formula::not(p.clone()));
                let Derivation::Assume { label, .. } = &neg else {
                    unreachable!()
                };
                let label = label.0;
                let minor = self.towards(p.clone(), d);
                let bot = Derivation::rule(Rule::ImpE, Formula::Bot, &[], vec![neg, minor]);
                Derivation::rule(Rule::Raa, p, &[label], vec![bot])
            }
            6 => {
                let Some(a) = self.nominal() else {
                    return self.build(d);
                };
                let nom = self.assume(Formula::Nominal(a.clone()));
                let body = self.build(d);
                let c = Formula::At(a, Box::new(Self::end(&body)));
                Derivation::rule(Rule::SatI, c, &[], vec![nom, body])
            }
            7 => {
                let major = self.build(d);
                let major = match Self::end(&major) {
                    Formula::At(..) => major,
                    _ => match self.nominal() {
                        Some(a) => {
                            let f = Formula::At(a, Box::new(self.formula()));
                            self.assume(f)
                        }
                        None => return major,
                    },
                };
                let Formula::At(a, body) = Self::end(&major) else {
                    unreachable!()
                };
                let nom = self.towards(Formula::Nominal(a), d);
                Derivation::rule(Rule::SatE, *body, &[], vec![nom, major])
            }
            8 => {
                let Some(m) = self.modality() else {
                    return self.build(d);
                };
                let Some(e) = self.nominal() else {
                    return self.build(d);
                };
                let major = self.build(d);
                let major = match Self::end(&major) {
                    Formula::Nec(n, _) if n == m => major,
                    _ => {
                        let f = Formula::Nec(m.clone(), Box::new(self.formula()));
                        self.assume(f)
                    }
                };
                let Formula::Nec(_, body) = Self::end(&major) else {
                    unreachable!()
                };
                let minor = self.towards(Formula::dia(&m, Formula::Nominal(e.clone())), d);
                Derivation::rule(Rule::BoxE(m), Formula::At(e, body), &[], vec![major, minor])
            }
            9 => {
                let Some(m) = self.modality() else {
                    return self.build(d);
                };
                let child = self.build(d);
                let child = match Self::end(&child) {
                    Formula::At(..) => child,
                    _ => {
                        // The usual detour: box elimination then reintroduction.
                        let Some(c) = self.nominal() else {
                            return child;
                        };
                        let body = self.formula();
                        let major = self.assume(Formula::Nec(m.clone(), Box::new(body)));
                        let Formula::Nec(_, body) = Self::end(&major) else {
                            unreachable!()
                        };
                        let minor =
                            self.fresh_assume(Formula::dia(&m, Formula::Nominal(c.clone())));
                        Derivation::rule(
                            Rule::BoxE(m.clone()),
                            Formula::At(c, body),
                            &[],
                            vec![major, minor],
                        )
                    }
                };
                let Formula::At(c, body) = Self::end(&child) else {
                    unreachable!()
                };
                let dia = Formula::dia(&m, Formula::Nominal(c));
                let discharge = Self::open_labels(&child, |f| *f == dia);
                Derivation::rule(
                    Rule::BoxI(m),
                    Formula::Nec(m_of(&dia), body),
                    &discharge,
                    vec![child],
                )
            }
            10 | 11 => {
                let Some(a) = self.nominal() else {
                    return self.build(d);
                };
                let body = self.build(d.saturating_sub(1).max(1));
                let nom = self.assume(Formula::Nominal(a.clone()));
                let last = if self.rng.gen_bool(0.8) {
                    let c = Formula::At(a.clone(), Box::new(Self::end(&body)));
                    Derivation::rule(Rule::SatI, c, &[], vec![nom, body])
                } else {
                    body
                };
                let opened = collect_undischarged(&last).unwrap_or_default();
                let nominal_a = Formula::Nominal(a.clone());
                let mut premises = Vec::new();
                let mut seen = std::collections::BTreeSet::new();
                for (_, f) in &opened {
                    if *f != nominal_a && seen.insert(f.clone()) {
                        premises.push(self.fresh_assume(f.clone()));
                    }
                }
                let discharge: Vec<u32> = opened.iter().map(|(l, _)| l.0).collect();
                let c = Self::end(&last);
                premises.push(last);
                Derivation::rule(Rule::Term(a), c, &discharge, premises)
            }
            _ => {
                let child = self.build(d);
                let Some(a) = self.nominal() else {
                    return child;
                };
                let nominal_a = Formula::Nominal(a);
                let discharge = Self::open_labels(&child, |f| *f == nominal_a);
                let c = Self::end(&child);
                Derivation::rule(Rule::Name, c, &discharge, vec![child])
            }
        }
    }
}

fn m_of(dia: &Formula) -> Ident {
    dia.as_diamond().expect("built as a diamond").0.clone()
}

/// A random derivation of depth at most `max_depth` using only the
/// built-in rules.
pub fn random_derivation<R: Rng>(rng: &mut R, sig: &Signature, max_depth: usize) -> Derivation {
    let mut b = Builder {
        rng,
        sig,
        next_label: 0,
        labels: BTreeMap::new(),
    };
    b.build(max_depth.max(1))
}
