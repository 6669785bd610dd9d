use std::collections::BTreeMap;

use hylo_core::gen::random_derivation;
use hylo_core::kernel::{check_derivation, collect_undischarged, Derivation};
use hylo_core::semantics::{check_entailment, eval};
use hylo_core::{Signature, Theory};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rule_counts(d: &Derivation, out: &mut BTreeMap<String, usize>) {
    d.walk(&mut |_, node| {
        if let Derivation::Rule { rule, .. } = node {
            *out.entry(rule.to_string()).or_default() += 1;
        }
    });
}

#[test]
fn accepted_random_derivations_are_sound() {
    let sig = Signature::parse("prop: p q\nnom: a b\nmod: box\n").unwrap();
    let th = Theory::new(sig.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut accepted = 0;
    let mut attempts = 0;
    let mut rules = BTreeMap::new();
    let mut invalid_rejects = 0;
    while accepted < 1000 {
        attempts += 1;
        assert!(
            attempts < 200_000,
            "only {accepted} accepted in {attempts} attempts"
        );
        let d = random_derivation(&mut rng, &sig, 6);
        if d.node_count() < 3 {
            continue;
        }
        let report = check_derivation(&d, &th);
        if !report.accepted() {
            // The semantic check must be able to tell: some rejected trees
            // claim conclusions that do not follow.
            if let (Ok(open), Some(end)) = (collect_undischarged(&d), report.end_formula) {
                let gamma: Vec<_> = open.into_iter().map(|(_, f)| f).collect();
                if !check_entailment(&gamma, &[], &end, &sig, 2, u64::MAX)
                    .unwrap()
                    .holds()
                {
                    invalid_rejects += 1;
                }
            }
            continue;
        }
        accepted += 1;
        rule_counts(&d, &mut rules);
        let gamma: Vec<_> = report.undischarged.iter().cloned().collect();
        let end = report.end_formula.unwrap();
        let e = check_entailment(&gamma, &[], &end, &sig, 2, u64::MAX).unwrap();
        if let Some(c) = &e.first_violation {
            assert_eq!(eval(&c.model, &c.assignment, c.world, &end), Ok(false));
        }
        assert!(e.holds(), "unsound acceptance:\n{d:#?}");
    }
    for id in [
        "andI", "andE1", "andE2", "impI", "impE", "raa", "satI", "satE", "boxI.box", "boxE.box",
        "term", "name",
    ] {
        assert!(
            rules.get(id).copied().unwrap_or(0) > 0,
            "rule {id} never exercised: {rules:?}"
        );
    }
    assert!(invalid_rejects > 0);
    eprintln!("{invalid_rejects} rejected derivations were semantically invalid");
    eprintln!("{accepted} accepted of {attempts}; {rules:?}");
}
