use abott::arith::Rat;
use abott::classes::{parse_expression, ClassError, ClassExpression};
use abott::engine::{atiyah_bott, verify, ComputationSpec, EngineError};

fn spec(n: u32, d: u32, m: usize, exprs: &[&str]) -> ComputationSpec {
    let classes = exprs.iter().map(|e| parse_expression(e, n, d, m).unwrap()).collect();
    ComputationSpec::new(n, d, m, classes)
}

#[test]
fn printed_expressions_reparse_to_the_same_value() {
    let text = "2*O1_i(1)*(2*O1_i(1)+Psi([1,0]))*O1_i(2)^2";
    let e: ClassExpression = text.parse().unwrap();
    let printed = e.to_string();
    let a = atiyah_bott(&spec(2, 1, 2, &[text])).unwrap();
    let b = atiyah_bott(&spec(2, 1, 2, &[&printed])).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.values[0], Rat::from_int(2));
}

#[test]
fn linearity_in_the_class() {
    let r = atiyah_bott(&spec(
        4,
        2,
        0,
        &["Hypersurface(5)", "3*Hypersurface(5)", "Hypersurface(5)-Hypersurface(5)"],
    ))
    .unwrap();
    assert_eq!(r.values[1], r.values[0].clone() * Rat::from_int(3));
    assert!(r.values[2].is_zero());
}

#[test]
fn verify_agrees_with_single_run() {
    let s = spec(3, 2, 0, &["Incidency(2)^5*Contact()"]).with_seed(11);
    assert_eq!(verify(&s).unwrap().values, atiyah_bott(&s).unwrap().values);
    assert_eq!(atiyah_bott(&s).unwrap().values[0], Rat::from_int(40));
}

#[test]
fn wrong_codimension_is_rejected_before_summing() {
    let e: ClassExpression = "Hypersurface(5)".parse().unwrap();
    let err = atiyah_bott(&ComputationSpec::new(4, 2, 1, vec![e])).unwrap_err();
    assert!(matches!(err, EngineError::Class(ClassError::CodimMismatch { .. })), "{err}");
}

#[test]
fn syntax_errors_carry_positions() {
    match parse_expression("O1()^2 * Incidency(2", 2, 1, 0) {
        Err(ClassError::Syntax { pos, .. }) => assert!(pos > 9),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}
