//! Finite Kripke models with one accessibility relation per modality name,
//! and the satisfaction relation over them.

mod enumerate;
mod file;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

pub use enumerate::{
    check_entailment, enumerate_models, enumeration_size, find_countermodel, max_enum_from_env,
    Countermodel, Entailment, ModelStream, DEFAULT_MAX_ENUM, MAX_ENUM_VAR,
};
pub use file::{parse_model, render_model};

use crate::syntax::{Formula, Ident, Signature, Sort, SortError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("world index {0} is out of range")]
    WorldOutOfRange(usize),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("`{0}` is not a valid world name")]
    BadWorldName(String),
    #[error("nominal `{0}` is not assigned a world")]
    Unassigned(String),
    #[error("tuple {tuple:?} for `{pred}` is not a tuple of {arity} declared time constants")]
    BadTuple {
        pred: String,
        arity: usize,
        tuple: Vec<String>,
    },
    #[error("max_worlds must be at least 1")]
    ZeroWorlds,
    #[error("enumeration of {count} models exceeds the cap of {cap} (set {var} to raise it)")]
    TooLarge {
        count: String,
        cap: u64,
        var: &'static str,
    },
    #[error("model file line {line}: {msg}")]
    File { line: usize, msg: String },
}

/// Index of a world within its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
struct ModelData {
    signature: Arc<Signature>,
    worlds: Arc<[Ident]>,
    /// Adjacency matrix per modality, row-major; absent means empty.
    relations: BTreeMap<Ident, Vec<bool>>,
    /// Truth per world for each propositional symbol; absent means false.
    valuation: BTreeMap<Ident, Vec<bool>>,
    /// Extension per world for each predicate.
    extensions: BTreeMap<Ident, Vec<BTreeSet<Vec<Ident>>>>,
}

/// A finite model over a signature. Cloning is cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model(Arc<ModelData>);

impl Model {
    /// A model with the given worlds, empty relations and everything false.
    pub fn new(signature: Arc<Signature>, worlds: &[&str]) -> Result<Model, SemanticsError> {
        if worlds.is_empty() {
            return Err(SemanticsError::NoWorlds);
        }
        let mut seen = BTreeSet::new();
        for w in worlds {
            if !Ident::is_valid(w) {
                return Err(SemanticsError::BadWorldName(w.to_string()));
            }
            if !seen.insert(*w) {
                return Err(SemanticsError::DuplicateWorld(w.to_string()));
            }
        }
        let worlds = worlds.iter().map(|w| Ident::new(w)).collect();
        Ok(Self::from_parts(signature, worlds))
    }

    /// A model with canonical world names `w0..w(n-1)`.
    pub fn with_size(signature: Arc<Signature>, n: usize) -> Result<Model, SemanticsError> {
        if n == 0 {
            return Err(SemanticsError::NoWorlds);
        }
        Ok(Self::from_parts(signature, canonical_worlds(n)))
    }

    fn from_parts(signature: Arc<Signature>, worlds: Arc<[Ident]>) -> Model {
        Model(Arc::new(ModelData {
            signature,
            worlds,
            relations: BTreeMap::new(),
            valuation: BTreeMap::new(),
            extensions: BTreeMap::new(),
        }))
    }

    pub fn signature(&self) -> &Signature {
        &self.0.signature
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.0.signature
    }

    pub fn len(&self) -> usize {
        self.0.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn worlds(&self) -> impl Iterator<Item = World> {
        (0..self.len()).map(World)
    }

    pub fn world(&self, name: &str) -> Result<World, SemanticsError> {
        self.0
            .worlds
            .iter()
            .position(|w| w.as_str() == name)
            .map(World)
            .ok_or_else(|| SemanticsError::UnknownWorld(name.into()))
    }

    pub fn world_name(&self, w: World) -> &str {
        &self.0.worlds[w.0]
    }

    fn in_range(&self, w: World) -> Result<(), SemanticsError> {
        if w.0 < self.len() {
            Ok(())
        } else {
            Err(SemanticsError::WorldOutOfRange(w.0))
        }
    }

    fn expect_sort(&self, name: &str, want: Sort) -> Result<Ident, SemanticsError> {
        match self.signature().sort_of(name) {
            Some(s) if s == want => Ok(Ident::new(name)),
            Some(found) => Err(SortError::Mismatch {
                name: name.into(),
                expected: want,
                found,
            }
            .into()),
            None => Err(SortError::Undeclared(name.into()).into()),
        }
    }

    pub fn add_edge(
        &mut self,
        modality: &str,
        from: World,
        to: World,
    ) -> Result<(), SemanticsError> {
        let m = self.expect_sort(modality, Sort::Modality)?;
        self.in_range(from)?;
        self.in_range(to)?;
        let n = self.len();
        let data = Arc::make_mut(&mut self.0);
        data.relations
            .entry(m)
            .or_insert_with(|| vec![false; n * n])[from.0 * n + to.0] = true;
        Ok(())
    }

    pub fn set_true(&mut self, prop: &str, w: World) -> Result<(), SemanticsError> {
        let p = self.expect_sort(prop, Sort::Prop)?;
        self.in_range(w)?;
        let n = self.len();
        let data = Arc::make_mut(&mut self.0);
        data.valuation.entry(p).or_insert_with(|| vec![false; n])[w.0] = true;
        Ok(())
    }

    pub fn add_tuple(
        &mut self,
        pred: &str,
        w: World,
        tuple: &[&str],
    ) -> Result<(), SemanticsError> {
        let arity = match self.signature().sort_of(pred) {
            Some(Sort::Predicate(k)) => k,
            Some(found) => {
                return Err(SortError::Mismatch {
                    name: pred.into(),
                    expected: Sort::Predicate(tuple.len()),
                    found,
                }
                .into())
            }
            None => return Err(SortError::Undeclared(pred.into()).into()),
        };
        let sig = self.signature();
        if tuple.len() != arity || tuple.iter().any(|t| !sig.times().contains(*t)) {
            return Err(SemanticsError::BadTuple {
                pred: pred.into(),
                arity,
                tuple: tuple.iter().map(|t| t.to_string()).collect(),
            });
        }
        self.in_range(w)?;
        let n = self.len();
        let data = Arc::make_mut(&mut self.0);
        data.extensions
            .entry(Ident::new(pred))
            .or_insert_with(|| vec![BTreeSet::new(); n])[w.0]
            .insert(tuple.iter().map(|t| Ident::new(t)).collect());
        Ok(())
    }

    pub fn related(&self, modality: &str, from: World, to: World) -> bool {
        let n = self.len();
        self.0
            .relations
            .get(modality)
            .is_some_and(|r| r[from.0 * n + to.0])
    }

    pub fn successors<'a>(
        &'a self,
        modality: &str,
        from: World,
    ) -> impl Iterator<Item = World> + 'a {
        let n = self.len();
        let row = self
            .0
            .relations
            .get(modality)
            .map(|r| &r[from.0 * n..from.0 * n + n]);
        (0..n)
            .filter(move |&v| row.is_some_and(|r| r[v]))
            .map(World)
    }

    pub fn is_true(&self, prop: &str, w: World) -> bool {
        self.0.valuation.get(prop).is_some_and(|v| v[w.0])
    }

    pub fn has_tuple(&self, pred: &str, w: World, tuple: &[Ident]) -> bool {
        self.0
            .extensions
            .get(pred)
            .is_some_and(|e| e[w.0].contains(tuple))
    }

    /// Extension of `pred` at `w`.
    pub fn extension_at(&self, pred: &str, w: World) -> impl Iterator<Item = &Vec<Ident>> {
        self.0
            .extensions
            .get(pred)
            .into_iter()
            .flat_map(move |e| e[w.0].iter())
    }

    /// Checks that `g` assigns every declared nominal a world of this model.
    pub fn check_assignment(&self, g: &Assignment) -> Result<(), SemanticsError> {
        for a in self.signature().nominals() {
            match g.get(a) {
                Some(w) => self.in_range(w)?,
                None => return Err(SemanticsError::Unassigned(a.to_string())),
            }
        }
        Ok(())
    }

    /// The same model re-homed onto a larger signature.
    pub(crate) fn with_signature(&self, signature: Arc<Signature>) -> Model {
        let mut data = (*self.0).clone();
        data.signature = signature;
        Model(Arc::new(data))
    }
}

pub(crate) fn canonical_worlds(n: usize) -> Arc<[Ident]> {
    (0..n).map(|i| Ident::new(&format!("w{i}"))).collect()
}

/// Assignment of worlds to nominals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<Ident, World>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, nominal: &str, w: World) {
        self.0.insert(Ident::new(nominal), w);
    }

    pub fn get(&self, nominal: &str) -> Option<World> {
        self.0.get(nominal).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, World)> {
        self.0.iter().map(|(a, w)| (a, *w))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `M, g, w |= f`.
pub fn eval(m: &Model, g: &Assignment, w: World, f: &Formula) -> Result<bool, SemanticsError> {
    m.in_range(w)?;
    m.signature().check_formula(f)?;
    check_nominals(m, g, f)?;
    Ok(truth_at(m, g, w, f))
}

/// `M, g |= f`: true at every world.
pub fn holds_at_all_worlds(m: &Model, g: &Assignment, f: &Formula) -> Result<bool, SemanticsError> {
    m.signature().check_formula(f)?;
    check_nominals(m, g, f)?;
    Ok(m.worlds().all(|w| truth_at(m, g, w, f)))
}

fn check_nominals(m: &Model, g: &Assignment, f: &Formula) -> Result<(), SemanticsError> {
    for id in f.identifiers() {
        if m.signature().sort_of(&id) == Some(Sort::Nominal) {
            match g.get(&id) {
                Some(w) => m.in_range(w)?,
                None => return Err(SemanticsError::Unassigned(id.to_string())),
            }
        }
    }
    Ok(())
}

/// The satisfaction clauses, for a formula already checked against the
/// model's signature and assignment.
pub(crate) fn truth_at(m: &Model, g: &Assignment, w: World, f: &Formula) -> bool {
    match f {
        Formula::Prop(p) => m.is_true(p, w),
        Formula::Nominal(a) => g.get(a) == Some(w),
        Formula::Pred(p, ts) => m.has_tuple(p, w, ts),
        Formula::And(l, r) => truth_at(m, g, w, l) && truth_at(m, g, w, r),
        Formula::Imp(l, r) => !truth_at(m, g, w, l) || truth_at(m, g, w, r),
        Formula::Bot => false,
        Formula::Nec(md, body) => m.successors(md, w).all(|v| truth_at(m, g, v, body)),
        Formula::At(a, body) => match g.get(a) {
            Some(v) => truth_at(m, g, v, body),
            None => panic!("nominal `{a}` unassigned; callers validate assignments"),
        },
    }
}

/// The set of worlds where `f` holds, computed bottom-up over subformulas.
/// Agrees with [`eval`] world by world; it exists as an independent route
/// for cross-checking.
pub fn truth_set(m: &Model, g: &Assignment, f: &Formula) -> Result<Vec<bool>, SemanticsError> {
    m.signature().check_formula(f)?;
    check_nominals(m, g, f)?;
    Ok(truth_set_unchecked(m, g, f))
}

fn truth_set_unchecked(m: &Model, g: &Assignment, f: &Formula) -> Vec<bool> {
    let n = m.len();
    match f {
        Formula::Prop(p) => (0..n).map(|w| m.is_true(p, World(w))).collect(),
        Formula::Nominal(a) => {
            let target = g.get(a);
            (0..n).map(|w| target == Some(World(w))).collect()
        }
        Formula::Pred(p, ts) => (0..n).map(|w| m.has_tuple(p, World(w), ts)).collect(),
        Formula::And(l, r) => {
            let (a, b) = (truth_set_unchecked(m, g, l), truth_set_unchecked(m, g, r));
            a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
        }
        Formula::Imp(l, r) => {
            let (a, b) = (truth_set_unchecked(m, g, l), truth_set_unchecked(m, g, r));
            a.iter().zip(&b).map(|(x, y)| !*x || *y).collect()
        }
        Formula::Bot => vec![false; n],
        Formula::Nec(md, body) => {
            let inner = truth_set_unchecked(m, g, body);
            (0..n)
                .map(|w| (0..n).all(|v| !m.related(md, World(w), World(v)) || inner[v]))
                .collect()
        }
        Formula::At(a, body) => {
            let inner = truth_set_unchecked(m, g, body);
            let value = g.get(a).is_some_and(|v| inner[v.0]);
            vec![value; n]
        }
    }
}
