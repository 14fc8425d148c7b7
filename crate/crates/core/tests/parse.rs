use mpqg_core::parse::{parse_coefficient, parse_exponent, parse_expr, parse_poly, parse_rational, ParseError};
use mpqg_core::yflag::build_flag_algebra;
use mpqg_core::{GenSymbol, HalfInt};

#[test]
fn syntax_errors_carry_positions() {
    match parse_poly("q^2 + * q") {
        Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 6),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_poly("(q + 1"), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse_poly("Y[2,1"), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse_poly(""), Err(ParseError::Syntax { .. })));
}

#[test]
fn negative_generator_power() {
    assert!(matches!(parse_poly("Y[2,1]^-1"), Err(ParseError::NegativeGeneratorPower { .. })));
}

#[test]
fn upper_flag_generator_is_unknown() {
    let f = build_flag_algebra(3, false).unwrap();
    let alg = &f.alg;
    assert_eq!(parse_expr("Y[2,3]", alg), Err(ParseError::UnknownGenerator(GenSymbol::Y(2, 3))));
    assert!(parse_expr("Y[3,1]*Y[2,1]", alg).is_ok());
}

#[test]
fn exponents_and_rationals() {
    let f = parse_exponent("1/2 - r1 + 3/2*r2").unwrap();
    assert_eq!(f.constant_part(), HalfInt::HALF);
    assert_eq!(f.label_coeff(1), -HalfInt::ONE);
    assert_eq!(f.label_coeff(2), HalfInt::ONE + HalfInt::HALF);
    assert_eq!(parse_rational("-6/4").unwrap(), num::BigRational::new((-3).into(), 2.into()));
    assert!(parse_exponent("1/3").is_err());
}

#[test]
fn coefficient_forms() {
    let a = parse_coefficient("q13^(1/2) * q^-1").unwrap();
    let b = parse_coefficient("q^-1 q13^(1/2)").unwrap();
    assert_eq!(a, b);
    assert_eq!(parse_coefficient("z1").unwrap(), parse_coefficient("q^(r1)").unwrap());
    assert_eq!(parse_coefficient(&a.to_string()).unwrap(), a);
}
