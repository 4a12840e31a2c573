use proptest::prelude::*;
use qmc_core::linalg::max_abs_diff;
use qmc_core::logic::{
    parse_formula, parse_path_formula, resolve_bound, BoundError, Direction, PathFormula, StateFormula, SuperOpBound,
};
use qmc_core::model::load_model;
use qmc_core::superop::SuperOp;

const LOOP: &str = include_str!("../examples/loop.qmc.json");

fn bound() -> impl Strategy<Value = SuperOpBound> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(SuperOpBound::Scalar),
        Just(SuperOpBound::Scalar(0.0)),
        Just(SuperOpBound::Scalar(1.0)),
        "[A-Z][a-z0-9_]{0,4}".prop_map(SuperOpBound::Named),
    ]
}

fn atom() -> impl Strategy<Value = StateFormula> {
    prop_oneof![
        Just(StateFormula::True),
        "[a-z][a-z0-9_]{0,5}"
            .prop_filter("keyword", |s| s != "true")
            .prop_map(StateFormula::Atom),
    ]
}

fn state_formula() -> impl Strategy<Value = StateFormula> {
    atom().prop_recursive(4, 32, 3, |inner| {
        let path = prop_oneof![
            inner.clone().prop_map(|f| PathFormula::Next(Box::new(f))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PathFormula::Until(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone(), 0usize..50)
                .prop_map(|(a, b, k)| PathFormula::BoundedUntil(Box::new(a), Box::new(b), k)),
            inner.clone().prop_map(|f| PathFormula::Eventually(Box::new(f))),
            (inner.clone(), 0usize..50).prop_map(|(f, k)| PathFormula::BoundedEventually(Box::new(f), k)),
        ];
        prop_oneof![
            inner.clone().prop_map(StateFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| StateFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| StateFormula::or(a, b)),
            (prop_oneof![Just(Direction::AtMost), Just(Direction::AtLeast)], bound(), path)
                .prop_map(|(d, b, p)| StateFormula::threshold(d, b, p)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(f in state_formula()) {
        let text = f.to_string();
        let parsed = parse_formula(&text).unwrap();
        prop_assert_eq!(&parsed, &f, "{}", text);
        prop_assert_eq!(parsed.to_string(), text);
    }

    #[test]
    fn redundant_parentheses_do_not_change_the_ast(f in state_formula()) {
        let wrapped = format!("(({f}))");
        prop_assert_eq!(parse_formula(&wrapped).unwrap(), f);
    }
}

#[test]
fn bounded_until_with_zero_steps() {
    let p = parse_path_formula("a U<=0 b").unwrap();
    assert_eq!(p.step_bound(), Some(0));
    assert_eq!(p.to_string(), "a U<=0 b");
}

#[test]
fn step_bound_rewrites() {
    let f = parse_path_formula("F l3").unwrap().with_step_bound(5);
    assert_eq!(f.to_string(), "F<=5 l3");
    let u = parse_path_formula("a U b").unwrap().with_step_bound(2);
    assert_eq!(u.to_string(), "a U<=2 b");
    assert!(u.is_bounded());
}

#[test]
fn bounds_resolve_against_the_model() {
    let model = load_model(LOOP).unwrap();
    let half = resolve_bound(&SuperOpBound::Scalar(0.5), &model, 1e-9).unwrap();
    assert!(half.eqsim(&SuperOp::identity(2).scale(0.5).unwrap(), 1e-15));
    let zero = resolve_bound(&SuperOpBound::Scalar(0.0), &model, 1e-9).unwrap();
    assert_eq!(zero.matrix_rep(), SuperOp::zero(2).matrix_rep());
    let e0 = resolve_bound(&SuperOpBound::Named("E0".into()), &model, 1e-9).unwrap();
    assert!(max_abs_diff(e0.matrix_rep(), model.superop("E0").unwrap().matrix_rep()) == 0.0);
    assert_eq!(
        resolve_bound(&SuperOpBound::Named("Q".into()), &model, 1e-9).unwrap_err(),
        BoundError::Unknown("Q".into())
    );
    assert!(matches!(
        resolve_bound(&SuperOpBound::Scalar(1.5), &model, 1e-9),
        Err(BoundError::OutOfRange(_))
    ));
}

#[test]
fn bounds_above_identity_are_rejected() {
    let text = LOOP.replace(r#""H2": {"scale": [0.5, "E"]}"#, r#""H2": {"scale": [2.0, "E"]}"#);
    let model = load_model(&text).unwrap();
    assert_eq!(
        resolve_bound(&SuperOpBound::Named("H2".into()), &model, 1e-9).unwrap_err(),
        BoundError::NotSubUnital("H2".into())
    );
}
