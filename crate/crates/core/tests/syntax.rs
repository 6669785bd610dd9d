use hylo_core::gen::random_formula;
use hylo_core::syntax::{parse_formula, print_formula, SyntaxError};
use hylo_core::{Formula, Signature};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sig() -> Signature {
    Signature::parse(
        "prop: p q r\nnom: a b\nmod: box D B S\npred: s/1 lt/2\ntime: t0 t1\nrigid: lt\n",
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(seed: u64, depth in 0usize..6) {
        let s = sig();
        let f = random_formula(&mut ChaCha8Rng::seed_from_u64(seed), &s, depth);
        let text = print_formula(&f);
        let back = parse_formula(&text, &s).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(print_formula(&back), text);
    }
}

#[test]
fn canonical_examples() {
    let s = Signature::parse("prop: p\nnom: a\nmod: D B\n").unwrap();
    let canon = |t: &str| print_formula(&parse_formula(t, &s).unwrap());
    assert_eq!(canon("@a D p"), "@a (D p)");
    assert_eq!(canon("~~p"), "~~p");
    assert_eq!(canon("~(B ~p)"), "dia B p");
    assert_eq!(canon("@a (p -> bot)"), "@a ~p");
    assert_eq!(canon("(p)"), "p");
    assert_eq!(
        parse_formula("@a D p", &s).unwrap(),
        Formula::at("a", Formula::nec("D", Formula::prop("p")))
    );
}

#[test]
fn errors() {
    let s = Signature::parse("prop: p\nnom: a\nmod: D B\n").unwrap();
    assert!(matches!(
        parse_formula("@x p", &s),
        Err(SyntaxError::Undeclared { ref name, .. }) if name == "x"
    ));
    assert!(matches!(
        parse_formula("@p p", &s),
        Err(SyntaxError::Sort { .. })
    ));
    for bad in ["", "p &", "(p", "p q", "?phi", "D", "p -> -> p", "p $ p"] {
        assert!(parse_formula(bad, &s).is_err(), "{bad}");
    }
}

proptest! {
    #[test]
    fn parsers_never_panic(text in "[ -~\n]{0,40}", noise in "[a-z@~&()>\\-\" 0-9]{0,40}") {
        let s = sig();
        for t in [&text, &noise] {
            let _ = parse_formula(t, &s);
            let _ = hylo_core::kernel::parse_proof(t, &s);
            let _ = hylo_core::kernel::parse_proof(&format!("(proof (rule andI \"{t}\" (discharge)))"), &s);
            let _ = hylo_core::semantics::parse_model(t, None);
            let _ = Signature::parse(t);
            let _ = hylo_core::Theory::parse(t);
        }
    }
}
