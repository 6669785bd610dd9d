use std::sync::Arc;

use hylo_core::gen::random_formula;
use hylo_core::semantics::{
    enumerate_models, eval, find_countermodel, holds_at_all_worlds, parse_model, render_model,
    truth_set, Assignment, Model, World,
};
use hylo_core::syntax::parse_formula;
use hylo_core::{Formula, Signature};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sig() -> Signature {
    Signature::parse("prop: p q\nnom: a b\nmod: box D\npred: s/1\ntime: t0 t1\n").unwrap()
}

fn f(s: &str) -> Formula {
    parse_formula(s, &sig()).unwrap()
}

/// A random model with 1 to 3 worlds over `sig()`, with an assignment.
fn random_model(seed: u64) -> (Model, Assignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = Arc::new(sig());
    let n = rng.gen_range(1..=3);
    let mut m = Model::with_size(s.clone(), n).unwrap();
    for md in ["box", "D"] {
        for v in 0..n {
            for w in 0..n {
                if rng.gen_bool(0.4) {
                    m.add_edge(md, World(v), World(w)).unwrap();
                }
            }
        }
    }
    for w in 0..n {
        for p in ["p", "q"] {
            if rng.gen_bool(0.5) {
                m.set_true(p, World(w)).unwrap();
            }
        }
        for t in ["t0", "t1"] {
            if rng.gen_bool(0.5) {
                m.add_tuple("s", World(w), &[t]).unwrap();
            }
        }
    }
    let mut g = Assignment::new();
    for a in ["a", "b"] {
        g.set(a, World(rng.gen_range(0..n)));
    }
    (m, g)
}

fn formula(seed: u64) -> Formula {
    random_formula(&mut ChaCha8Rng::seed_from_u64(seed), &sig(), 4)
}

proptest! {
    #[test]
    fn diamond_matches_existential_reading(mseed: u64, fseed: u64, dia_box: bool) {
        let (m, g) = random_model(mseed);
        let phi = formula(fseed);
        let md = if dia_box { "box" } else { "D" };
        let dia = Formula::dia(md, phi.clone());
        for w in m.worlds() {
            let direct = m.worlds().any(|v| m.related(md, w, v) && eval(&m, &g, v, &phi).unwrap());
            prop_assert_eq!(eval(&m, &g, w, &dia).unwrap(), direct);
        }
    }

    #[test]
    fn satisfaction_statements_are_rigid(mseed: u64, fseed: u64, on_b: bool) {
        let (m, g) = random_model(mseed);
        let sat = Formula::at(if on_b { "b" } else { "a" }, formula(fseed));
        let first = eval(&m, &g, World(0), &sat).unwrap();
        for w in m.worlds() {
            prop_assert_eq!(eval(&m, &g, w, &sat).unwrap(), first);
        }
    }

    #[test]
    fn pointwise_and_setwise_evaluation_agree(mseed: u64, fseed: u64) {
        let (m, g) = random_model(mseed);
        let phi = formula(fseed);
        let set = truth_set(&m, &g, &phi).unwrap();
        for w in m.worlds() {
            prop_assert_eq!(eval(&m, &g, w, &phi).unwrap(), set[w.0]);
        }
        prop_assert_eq!(holds_at_all_worlds(&m, &g, &phi).unwrap(), set.iter().all(|b| *b));
    }

    #[test]
    fn model_files_round_trip(mseed: u64) {
        let (m, g) = random_model(mseed);
        let text = render_model(&m, &g);
        prop_assert_eq!(parse_model(&text, None).unwrap(), (m, g));
    }
}

#[test]
fn examples() {
    let (m, _) = parse_model("prop: p\nnom: a\nworlds: w\nval p: w\nassign: a=w\n", None).unwrap();
    let g = {
        let mut g = Assignment::new();
        g.set("a", World(0));
        g
    };
    assert!(eval(
        &m,
        &g,
        World(0),
        &parse_formula("p", m.signature()).unwrap()
    )
    .unwrap());
    let (m, g) = random_model(3);
    assert!(holds_at_all_worlds(&m, &g, &f("@a a")).unwrap());
    assert!(holds_at_all_worlds(&m, &g, &f("p -> p")).unwrap());
}

const VALID: [&str; 4] = [
    "@a a",
    "@a (p -> q) -> @a p -> @a q",
    "box (p -> q) -> box p -> box q",
    "@b (@a p) -> @a p",
];

const INVALID: [&str; 3] = ["p", "box p -> p", "@a p -> p"];

#[test]
fn validity_oracle() {
    for text in VALID {
        assert_eq!(
            find_countermodel(&f(text), &sig(), 3, u64::MAX).unwrap(),
            None,
            "{text}"
        );
    }
}

#[test]
fn invalidity_oracle() {
    for text in INVALID {
        let c = find_countermodel(&f(text), &sig(), 2, u64::MAX)
            .unwrap()
            .expect(text);
        assert!(c.model.len() <= 2);
        assert_eq!(eval(&c.model, &c.assignment, c.world, &f(text)), Ok(false));
    }
    let c = find_countermodel(&f("p"), &sig(), 2, u64::MAX)
        .unwrap()
        .unwrap();
    assert_eq!(c.model.len(), 1);
    assert!(!c.model.is_true("p", c.world));
}

#[test]
fn no_countermodel_means_true_everywhere() {
    let s = Signature::parse("prop: p\nnom: a b\nmod: box\n").unwrap();
    for text in [
        "@b (@a p) -> @a p",
        "box p -> box p",
        "@a (box ~a) -> @a (box ~a)",
    ] {
        let phi = parse_formula(text, &s).unwrap();
        assert_eq!(find_countermodel(&phi, &s, 2, u64::MAX).unwrap(), None);
        for (m, g) in enumerate_models(&s, 2, u64::MAX).unwrap() {
            assert!(holds_at_all_worlds(&m, &g, &phi).unwrap());
        }
    }
}

#[test]
fn countermodels_agree_with_enumeration() {
    // Whatever the search reports, exhaustive evaluation over the same
    // bound agrees on whether a falsifying point exists.
    let s = Signature::parse("prop: p\nnom: a\nmod: box\n").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..60 {
        let phi = random_formula(&mut rng, &s, 3);
        let found = find_countermodel(&phi, &s, 2, u64::MAX).unwrap();
        let exists = enumerate_models(&s, 2, u64::MAX)
            .unwrap()
            .any(|(m, g)| m.worlds().any(|w| !eval(&m, &g, w, &phi).unwrap()));
        assert_eq!(found.is_some(), exists, "{phi}");
    }
}
