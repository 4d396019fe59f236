//! Exact arithmetic, gcd, divisibility, and the parse/print round trip.

use campo_core::num::{c_gauss, c_int, c_one};
use campo_core::parse::{parse_exppoly, parse_laurent, parse_ratfn, parse_unipoly};
use campo_core::poly::{divides, gcd2, LaurentPoly2, Vars};
use campo_core::ratfn::RationalFn2;
use campo_core::ExpPoly;
use num_complex::Complex64;

fn xy() -> Vars {
    Vars::xy()
}

fn lp(src: &str) -> LaurentPoly2 {
    parse_laurent(src, &xy()).expect("test polynomial parses")
}

fn rf(src: &str) -> RationalFn2 {
    parse_ratfn(src, &xy()).expect("test rational function parses")
}

fn ep(src: &str) -> ExpPoly {
    parse_exppoly(src, &xy()).expect("test expression parses")
}

#[test]
fn gcd_of_shared_factor_products() {
    // x²y − xy = xy(x−1) and xy² − y² = y²(x−1) share y(x−1)
    let g = gcd2(&lp("x^2*y - x*y"), &lp("x*y^2 - y^2"));
    assert_eq!(g, lp("x*y - y"), "gcd should be the monic product y*(x-1)");
}

#[test]
fn gcd_of_coprime_inputs_is_constant() {
    let g = gcd2(&lp("x^2"), &lp("y"));
    assert!(g.is_constant(), "x^2 and y share no factor, got {g}");
    let g2 = gcd2(&lp("x*y + 1"), &lp("x - y"));
    assert!(g2.is_constant(), "coprime inputs, got {g2}");
}

#[test]
fn gcd_with_zero_returns_the_other_argument_monic() {
    let zero = LaurentPoly2::zero(xy());
    let g = gcd2(&lp("3*x*y + 3"), &zero);
    assert_eq!(g, lp("x*y + 1"));
}

#[test]
fn gcd_handles_laurent_corners() {
    // common factor off the axes plus a shared monomial corner
    let a = lp("x^-1*y - x^-2*y"); // x^{-2} y (x - 1)
    let b = lp("y^2*x - y^2"); // y^2 (x - 1)
    let g = gcd2(&a, &b);
    // corner: x^min(-2,0) y^min(1,2) = x^-2 y; factor (x-1)
    assert_eq!(g, lp("x^-1*y - x^-2*y"));
}

#[test]
fn divisibility_is_polynomial_not_laurent() {
    assert!(divides(&lp("x"), &lp("x^2*y")));
    assert!(
        !divides(&lp("x"), &lp("x*y + 1")),
        "x does not divide xy+1 in the polynomial ring"
    );
    assert!(divides(&lp("x*y + 1"), &lp("x^2*y^2 + 2*x*y + 1")));
}

#[test]
fn exact_division_recovers_factors() {
    let prod = lp("x*y + 1").mul(&lp("x - y"));
    let q = prod.div_exact(&lp("x*y + 1")).expect("factor divides");
    assert_eq!(q, lp("x - y"));
    assert!(prod.div_exact(&lp("x + 1")).is_none());
}

#[test]
fn laurent_derivative_uses_the_power_rule() {
    let p = lp("x^-1");
    assert_eq!(p.derivative(0), lp("-x^-2"));
    assert_eq!(lp("x^3*y^-2").derivative(1), lp("-2*x^3*y^-3"));
}

#[test]
fn rational_functions_canonicalize() {
    // xy(x−1) / y²(x−1) = x/y
    let r = RationalFn2::new(lp("x^2*y - x*y"), lp("x*y^2 - y^2")).unwrap();
    assert_eq!(r, rf("x*y^-1"));
    assert!(r.is_laurent(), "monomial denominators move into the numerator");
    // scalar denominators normalize away
    assert_eq!(rf("(x + 1)/(2*x + 2)"), rf("1/2"));
    // denominator is monic and coprime to the numerator
    let s = rf("(x^2 - y^2)/(3*x + 3*y)");
    assert_eq!(s, rf("(x - y)/3"));
}

#[test]
fn rational_arithmetic_is_exact() {
    let a = rf("1/(x + 1)");
    let b = rf("1/(x - 1)");
    let sum = a.add(&b);
    assert_eq!(sum, rf("2*x/(x^2 - 1)"));
    let prod = a.mul(&b);
    assert_eq!(prod, rf("1/(x^2 - 1)"));
    let back = prod.div(&a).unwrap();
    assert_eq!(back, b);
}

#[test]
fn rational_derivative_quotient_rule() {
    let r = rf("x/(x + y)");
    // d/dx x/(x+y) = y/(x+y)^2
    assert_eq!(r.derivative(0), rf("y/(x^2 + 2*x*y + y^2)"));
}

#[test]
fn substitution_into_rational_functions() {
    // R = x(xy+1): substitute the cover x→u, y→(v−u)/u² and land on v
    let uv = Vars::uv();
    let r = parse_ratfn("x^2*y + x", &xy()).unwrap();
    let ix = parse_ratfn("u", &uv).unwrap();
    let iy = parse_ratfn("(v - u)/u^2", &uv).unwrap();
    let out = r.substitute(&ix, &iy).unwrap();
    assert_eq!(out, parse_ratfn("v", &uv).unwrap());
}

#[test]
fn exp_terms_collect_by_exponent() {
    let e = ep("2*exp(x*y) + x*exp(x*y) - exp(x*y)");
    assert_eq!(e, ep("(x + 1)*exp(x*y)"));
    let cancel = ep("exp(x) - exp(x)");
    assert!(cancel.is_zero());
}

#[test]
fn exp_derivative_includes_the_chain_term() {
    let e = ep("x*exp(-y)");
    assert_eq!(e.derivative(1), ep("-x*exp(-y)"));
    assert_eq!(e.derivative(0), ep("exp(-y)"));
    // d/dx exp(x^2 y) = 2xy exp(x^2 y)
    assert_eq!(ep("exp(x^2*y)").derivative(0), ep("2*x*y*exp(x^2*y)"));
}

#[test]
fn exp_substitution_keeps_laurent_exponents() {
    // x e^{-y} under (x,y) → (1/x, 1/y)
    let e = ep("x*exp(-y)");
    let ix = rf("x^-1");
    let iy = rf("y^-1");
    let out = e.substitute(&ix, &iy).unwrap();
    assert_eq!(out, ep("x^-1*exp(-y^-1)"));
    // but a substitution with a genuine denominator must be rejected
    let bad = e.substitute(&rf("x"), &rf("1/(x + 1)"));
    assert!(bad.is_err(), "exponent would leave the Laurent ring");
}

#[test]
fn numeric_evaluation_matches_structure() {
    let e = ep("x*exp(-y) + 1/2");
    let x = Complex64::new(0.3, -1.2);
    let y = Complex64::new(0.7, 0.4);
    let direct = x * (-y).exp() + 0.5;
    let got = e.eval(x, y);
    assert!((got - direct).norm() < 1e-12);
}

#[test]
fn print_parse_round_trip() {
    let samples = [
        "0",
        "1",
        "-3/2",
        "i",
        "x",
        "x*y",
        "x^2 - y^2",
        "x^-1*y^3 - 2",
        "(1+2*i)*x - i*y",
        "x/(x + 1)",
        "(x*y + 1)/(x^2 + 1)",
        "2*x/(x^2 - 1)",
        "exp(x)",
        "-exp(-x*y)",
        "x*exp(-y) + 1/2",
        "(x + 1)*exp(x*y) - y^-2*exp(-x)",
        "x/(x + 1)*exp(y)",
    ];
    for s in samples {
        let v = ep(s);
        let printed = v.to_string();
        let back = parse_exppoly(&printed, &xy())
            .unwrap_or_else(|e| panic!("reparse of {printed:?} failed: {e}"));
        assert_eq!(back, v, "round trip changed the value of {s:?}");
    }
}

#[test]
fn parser_reports_positions() {
    let err = parse_exppoly("x + $", &xy()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("byte 4"), "got: {msg}");
    let err2 = parse_exppoly("x + z", &xy()).unwrap_err();
    assert!(err2.to_string().contains("unknown variable 'z'"), "got: {err2}");
    let err3 = parse_exppoly("exp(1/(x+1))", &xy()).unwrap_err();
    assert!(
        err3.to_string().contains("Laurent"),
        "exp of a true rational function must be rejected, got: {err3}"
    );
}

#[test]
fn gaussian_rational_scalars() {
    let c = c_gauss(1, 2, -3, 4);
    let p = LaurentPoly2::constant(xy(), c.clone());
    let printed = p.to_string();
    let back = parse_laurent(&printed, &xy()).unwrap();
    assert_eq!(back, p, "scalar {printed} must round trip");
    assert_eq!(c_int(5), c_int(2) + c_int(3));
    assert_eq!(c_one() + c_one(), c_int(2));
}

#[test]
fn unipoly_parsing_and_calculus() {
    let p = parse_unipoly("1 + 2*z^3 - z^-1", "z").unwrap();
    assert_eq!(p.degree(), Some(3));
    assert_eq!(p.ord(), Some(-1));
    let d = p.derivative();
    assert_eq!(d, parse_unipoly("6*z^2 + z^-2", "z").unwrap());
    let r = parse_unipoly("z^2", "z")
        .unwrap()
        .eval_poly(&lp("x*y"))
        .unwrap();
    assert_eq!(r, lp("x^2*y^2"));
}
