//! Exhaustive enumeration of small models, and the searches built on it.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{
    canonical_worlds, eval, truth_at, Assignment, Model, ModelData, SemanticsError, World,
};
use crate::syntax::{Formula, Ident, Signature};

/// Environment variable overriding [`DEFAULT_MAX_ENUM`].
pub const MAX_ENUM_VAR: &str = "HYLO_MAX_ENUM";

/// Default cap on the number of (model, assignment) pairs one enumeration
/// may produce.
pub const DEFAULT_MAX_ENUM: u64 = 100_000_000;

/// The cap from [`MAX_ENUM_VAR`], or the default when unset or unparsable.
pub fn max_enum_from_env() -> u64 {
    std::env::var(MAX_ENUM_VAR)
        .ok()
        .and_then(|v| v.trim().replace('_', "").parse().ok())
        .unwrap_or(DEFAULT_MAX_ENUM)
}

/// Per-size layout of the bit vector that encodes one model.
struct Layout {
    n: usize,
    modalities: Vec<Ident>,
    props: Vec<Ident>,
    /// Each predicate with every tuple over the declared times.
    predicates: Vec<(Ident, Vec<Vec<Ident>>)>,
    bits: u32,
}

impl Layout {
    fn new(sig: &Signature, n: usize) -> Layout {
        let times: Vec<Ident> = sig.times().iter().cloned().collect();
        let predicates: Vec<_> = sig
            .predicates()
            .iter()
            .map(|(p, &k)| (p.clone(), tuples(&times, k)))
            .collect();
        let bits = sig.modalities().len() * n * n
            + sig.props().len() * n
            + predicates.iter().map(|(_, ts)| n * ts.len()).sum::<usize>();
        Layout {
            n,
            modalities: sig.modalities().iter().cloned().collect(),
            props: sig.props().iter().cloned().collect(),
            predicates,
            bits: u32::try_from(bits).unwrap_or(u32::MAX),
        }
    }

    fn decode(&self, signature: &Arc<Signature>, worlds: &Arc<[Ident]>, mut mask: u64) -> Model {
        let n = self.n;
        let mut take = || {
            let bit = mask & 1 == 1;
            mask >>= 1;
            bit
        };
        let mut relations = BTreeMap::new();
        for m in &self.modalities {
            relations.insert(m.clone(), (0..n * n).map(|_| take()).collect());
        }
        let mut valuation = BTreeMap::new();
        for p in &self.props {
            valuation.insert(p.clone(), (0..n).map(|_| take()).collect());
        }
        let mut extensions = BTreeMap::new();
        for (p, all) in &self.predicates {
            let per_world = (0..n)
                .map(|_| {
                    all.iter()
                        .filter(|_| take())
                        .cloned()
                        .collect::<BTreeSet<_>>()
                })
                .collect();
            extensions.insert(p.clone(), per_world);
        }
        Model(Arc::new(ModelData {
            signature: signature.clone(),
            worlds: worlds.clone(),
            relations,
            valuation,
            extensions,
        }))
    }
}

fn tuples(times: &[Ident], k: usize) -> Vec<Vec<Ident>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                times.iter().map(move |t| {
                    let mut next = prefix.clone();
                    next.push(t.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// Number of (model, assignment) pairs [`enumerate_models`] would yield,
/// or `None` if it does not fit in a `u128`.
pub fn enumeration_size(sig: &Signature, max_worlds: usize) -> Option<u128> {
    let nominals = u32::try_from(sig.nominals().len()).ok()?;
    let mut total: u128 = 0;
    for n in 1..=max_worlds {
        let layout = Layout::new(sig, n);
        let models = 1u128
            .checked_shl(layout.bits)
            .filter(|_| layout.bits < 128)?;
        let assignments = (n as u128).checked_pow(nominals)?;
        total = total.checked_add(models.checked_mul(assignments)?)?;
    }
    Some(total)
}

/// Every model with 1 to `max_worlds` worlds over `sig`, each paired with
/// every assignment. Worlds are named `w0..`; the order is deterministic.
pub fn enumerate_models(
    sig: &Signature,
    max_worlds: usize,
    cap: u64,
) -> Result<ModelStream, SemanticsError> {
    if max_worlds == 0 {
        return Err(SemanticsError::ZeroWorlds);
    }
    match enumeration_size(sig, max_worlds) {
        Some(count) if count <= cap as u128 => {}
        count => {
            return Err(SemanticsError::TooLarge {
                count: count.map_or_else(|| "more than 2^128".into(), |c| c.to_string()),
                cap,
                var: MAX_ENUM_VAR,
            })
        }
    }
    let signature = Arc::new(sig.clone());
    let mut stream = ModelStream {
        nominals: signature.nominals().iter().cloned().collect(),
        signature,
        max_worlds,
        layout: Layout::new(sig, 1),
        worlds: canonical_worlds(1),
        mask: 0,
        digits: Vec::new(),
        current: None,
    };
    stream.digits = vec![0; stream.nominals.len()];
    Ok(stream)
}

/// Iterator returned by [`enumerate_models`].
pub struct ModelStream {
    signature: Arc<Signature>,
    nominals: Vec<Ident>,
    max_worlds: usize,
    layout: Layout,
    worlds: Arc<[Ident]>,
    mask: u64,
    /// Assignment odometer, one digit per nominal.
    digits: Vec<usize>,
    current: Option<Model>,
}

impl ModelStream {
    fn advance_digits(&mut self) -> bool {
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < self.layout.n {
                return true;
            }
            *d = 0;
        }
        false
    }
}

impl Iterator for ModelStream {
    type Item = (Model, Assignment);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.layout.n > self.max_worlds {
                return None;
            }
            if self.current.is_none() {
                if self.layout.bits >= 64 || self.mask >> self.layout.bits != 0 {
                    let n = self.layout.n + 1;
                    self.layout = Layout::new(&self.signature, n);
                    self.worlds = canonical_worlds(n);
                    self.mask = 0;
                    continue;
                }
                self.current = Some(self.layout.decode(&self.signature, &self.worlds, self.mask));
            }
            let model = self.current.clone().expect("set above");
            let mut g = Assignment::new();
            for (a, d) in self.nominals.iter().zip(&self.digits) {
                g.set(a, World(*d));
            }
            if !self.advance_digits() {
                self.current = None;
                self.mask += 1;
            }
            return Some((model, g));
        }
    }
}

/// A falsifying point for a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: Model,
    pub assignment: Assignment,
    pub world: World,
}

/// Searches models with at most `max_worlds` worlds for a point where `f`
/// is false. The search runs over the symbols of `f`; the witness is then
/// stated over all of `sig`, with the unused symbols false or empty and
/// unused nominals naming `w0`.
pub fn find_countermodel(
    f: &Formula,
    sig: &Signature,
    max_worlds: usize,
    cap: u64,
) -> Result<Option<Countermodel>, SemanticsError> {
    sig.check_formula(f)?;
    let small = sig.restrict_to(&f.identifiers());
    for (m, g) in enumerate_models(&small, max_worlds, cap)? {
        if let Some(w) = m.worlds().find(|&w| !truth_at(&m, &g, w, f)) {
            let found = extend(&m, &g, w, sig);
            assert_eq!(
                eval(&found.model, &found.assignment, found.world, f),
                Ok(false),
                "countermodel must re-verify"
            );
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn extend(m: &Model, g: &Assignment, w: World, sig: &Signature) -> Countermodel {
    let model = m.with_signature(Arc::new(sig.clone()));
    let mut assignment = g.clone();
    for a in sig.nominals() {
        if assignment.get(a).is_none() {
            assignment.set(a, World(0));
        }
    }
    Countermodel {
        model,
        assignment,
        world: w,
    }
}

/// Outcome of a bounded local-consequence check.
#[derive(Clone, Debug)]
pub struct Entailment {
    /// (model, assignment) pairs in which every global formula held.
    pub models: u64,
    /// Points of those models where every premise held.
    pub premise_points: u64,
    pub violations: u64,
    pub first_violation: Option<Countermodel>,
}

impl Entailment {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks over every model with at most `max_worlds` worlds in which each
/// of `globals` holds at all worlds, that every point satisfying all of
/// `premises` satisfies `conclusion`. Only the symbols of the given
/// formulas are enumerated.
pub fn check_entailment(
    premises: &[Formula],
    globals: &[Formula],
    conclusion: &Formula,
    sig: &Signature,
    max_worlds: usize,
    cap: u64,
) -> Result<Entailment, SemanticsError> {
    let mut used = BTreeSet::new();
    for f in premises.iter().chain(globals).chain(Some(conclusion)) {
        sig.check_formula(f)?;
        used.extend(f.identifiers());
    }
    let small = sig.restrict_to(&used);
    let mut out = Entailment {
        models: 0,
        premise_points: 0,
        violations: 0,
        first_violation: None,
    };
    for (m, g) in enumerate_models(&small, max_worlds, cap)? {
        if !globals
            .iter()
            .all(|f| m.worlds().all(|w| truth_at(&m, &g, w, f)))
        {
            continue;
        }
        out.models += 1;
        for w in m.worlds() {
            if !premises.iter().all(|f| truth_at(&m, &g, w, f)) {
                continue;
            }
            out.premise_points += 1;
            if !truth_at(&m, &g, w, conclusion) {
                out.violations += 1;
                if out.first_violation.is_none() {
                    out.first_violation = Some(extend(&m, &g, w, sig));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    const BIG: u64 = u64::MAX;

    #[test]
    fn one_world_one_prop_one_nominal_one_modality() {
        let sig = Signature::parse("prop: p\nnom: a\nmod: box\n").unwrap();
        // A single world has two valuations for p and two relations
        // (with or without the loop); the only assignment sends a there.
        assert_eq!(enumeration_size(&sig, 1), Some(4));
        let all: Vec<_> = enumerate_models(&sig, 1, BIG).unwrap().collect();
        assert_eq!(all.len(), 4);
        let mut seen = BTreeSet::new();
        for (m, g) in &all {
            assert_eq!(g.get("a"), Some(World(0)));
            seen.insert((
                m.is_true("p", World(0)),
                m.related("box", World(0), World(0)),
            ));
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn empty_signature_and_no_nominals() {
        let sig = Signature::new();
        let all: Vec<_> = enumerate_models(&sig, 3, BIG).unwrap().collect();
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|(_, g)| g.is_empty()));
        assert_eq!(
            all.iter().map(|(m, _)| m.len()).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn sizes_match_counts() {
        let sig = Signature::parse("prop: p\nnom: a b\nmod: D\npred: s/1\ntime: t0 t1\n").unwrap();
        let counted = enumerate_models(&sig, 2, BIG).unwrap().count() as u128;
        // n=1: 2^(1+1+2) * 1; n=2: 2^(4+2+4) * 4
        assert_eq!(counted, 16 + 1024 * 4);
        assert_eq!(enumeration_size(&sig, 2), Some(counted));
    }

    #[test]
    fn guards() {
        let sig = Signature::parse("prop: p\nmod: box\n").unwrap();
        assert_eq!(
            enumerate_models(&sig, 0, BIG).err(),
            Some(SemanticsError::ZeroWorlds)
        );
        assert!(matches!(
            enumerate_models(&sig, 3, 10),
            Err(SemanticsError::TooLarge { .. })
        ));
    }

    #[test]
    fn deterministic_order() {
        let sig = Signature::parse("prop: p\nnom: a\nmod: box\n").unwrap();
        let a: Vec<_> = enumerate_models(&sig, 2, BIG).unwrap().collect();
        let b: Vec<_> = enumerate_models(&sig, 2, BIG).unwrap().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn countermodel_for_sat_to_local() {
        let sig = Signature::parse("prop: p q\nnom: a b\nmod: box\n").unwrap();
        let f = parse_formula("@a p -> p", &sig).unwrap();
        let c = find_countermodel(&f, &sig, 2, BIG).unwrap().unwrap();
        assert_eq!(c.model.len(), 2);
        let at = c.assignment.get("a").unwrap();
        assert_ne!(at, c.world);
        assert!(c.model.is_true("p", at));
        assert!(!c.model.is_true("p", c.world));
        assert_eq!(c.assignment.get("b"), Some(World(0)));
        assert_eq!(eval(&c.model, &c.assignment, c.world, &f), Ok(false));
    }

    #[test]
    fn no_countermodel_for_valid() {
        let sig = Signature::parse("prop: p\nnom: a\nmod: box\n").unwrap();
        let f = parse_formula("@a a", &sig).unwrap();
        assert_eq!(find_countermodel(&f, &sig, 3, BIG).unwrap(), None);
    }

    #[test]
    fn modus_ponens_entailment() {
        let sig = Signature::parse("prop: p q r\nnom: a\n").unwrap();
        let pf = |s| parse_formula(s, &sig).unwrap();
        let e =
            check_entailment(&[pf("@a p")], &[pf("p -> q")], &pf("@a q"), &sig, 3, BIG).unwrap();
        assert!(e.holds());
        assert!(e.premise_points > 0);
        let e = check_entailment(&[pf("@a p")], &[], &pf("@a q"), &sig, 2, BIG).unwrap();
        assert!(!e.holds());
        let c = e.first_violation.unwrap();
        assert_eq!(
            eval(&c.model, &c.assignment, c.world, &pf("@a q")),
            Ok(false)
        );
    }
}
