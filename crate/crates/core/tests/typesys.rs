mod common;

use common::chains::*;
use meshlite::typesys::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4000))]

    #[test]
    fn combine_matches_documented_rules(g in gen_chain()) {
        let Some(ctors) = build(&g) else { return Ok(()) };
        let got = TypeChain::from_ctors(ctors.clone());
        prop_assert_eq!(got.is_ok(), oracle_legal(&ctors), "{:?} -> {:?}", ctors, got);
        if let Ok(chain) = got {
            for a in Attribute::ALL {
                let _ = chain.resolve(a);
            }
            prop_assert_eq!(chain.resolve(Attribute::Ordering), AttrValue::Ordering(oracle_ordering(&ctors)));
            let _ = plan_of(&chain).and_then(|p| p.concrete());
        }
    }
}

#[test]
fn deterministic_sweep_covers_a_thousand_chains() {
    let (built, legal) = sweep(4000).unwrap();
    assert!(built >= 1000, "{built}");
    assert!(legal >= 100, "{legal}");
}

// ---- dedicated laws ----

fn chain(text: &str) -> Result<TypeChain, ChainSourceError> {
    parse_chain(text)
}

#[test]
fn rightmost_constructor_wins() {
    let c = chain("array[Int,4,4]::allocated[row[]::single[on[0]]]").unwrap();
    assert_eq!(c.resolve(Attribute::Ordering), AttrValue::Ordering(Ordering::RowMajor));
    let c = chain("Int::allocated[single[on[0]]]::channel[2,0]::async").unwrap();
    assert_eq!(
        c.resolve(Attribute::CommMode),
        AttrValue::CommMode(CommMode::PointToPoint { src: k(2), dst: k(0), asynchronous: true })
    );
    let c = chain("Char::const").unwrap();
    assert!(c.is_read_only());
    assert!(!chain("Char").unwrap().is_read_only());
}

#[test]
fn duplicate_attributes_rejected() {
    for text in [
        "array[Int,4]::allocated[row[]::col[]]",
        "Int::const::const",
        "array[Int,4,4]::allocated[horizontal[2]::vertical[2]::single[evendist[]]]",
        "Int::allocated[single[on[0]]::multiple[]]",
        "Int::allocated[single[on[0]]]::allocated[single[on[1]]]",
    ] {
        assert!(
            matches!(chain(text), Err(ChainSourceError::Type(TypeError::InvalidCombination { .. }))),
            "{text}"
        );
    }
}

#[test]
fn int_char_is_meaningless() {
    let err = chain("Int::Char").unwrap_err();
    let ChainSourceError::Type(TypeError::InvalidCombination { left, right, .. }) = err else { panic!("{err:?}") };
    assert_eq!((left.as_str(), right.as_str()), ("Int", "Char"));
}

#[test]
fn vertical_one_dimensional_rejected_in_either_order() {
    assert!(chain("array[Int,4]::allocated[vertical[2]::single[evendist[]]]").is_err());
    let v = TypeCtor::Allocated(TypeChain::from_ctors([TypeCtor::Vertical(k(2))]).unwrap());
    assert!(TypeChain::from_ctors([v, arr(ElemKind::Int, 1)]).is_err());
}

fn check(src: &str) -> Result<(), Vec<Diagnostic>> {
    meshlite::compile(src).map(drop)
}

fn rules(src: &str) -> Vec<&'static str> {
    check(src).unwrap_err().iter().map(|d| d.rule).collect()
}

#[test]
fn const_writes_rejected() {
    assert!(rules("var c : Int :: const := 3; c := 4;").contains(&"ConstViolation"));
    assert!(check("var c : Int :: const := 3; var x := c + 1;").is_ok());
}

#[test]
fn function_arguments_match_the_whole_chain() {
    let header = "var n := 4;\n\
        var A : array[complex,n,n]::allocated[row[]::horizontal[2]::single[evendist[]]];\n\
        var B : array[complex,n,n]::allocated[col[]::horizontal[2]::single[evendist[]]];\n";
    let f = "function f(X : array[complex,n,n]::allocated[row[]::horizontal[2]::single[evendist[]]]) { sync; };\n";
    assert!(check(&format!("{header}{f}f(A);")).is_ok());
    let r = rules(&format!("{header}{f}f(B);"));
    assert!(r.contains(&"ArgumentChainMismatch"), "{r:?}");
}
