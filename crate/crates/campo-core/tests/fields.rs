//! Lie derivatives, invariant curves, coordinate changes, and the cover H.

use campo_core::field::{
    has_isolated_singularities, is_invariant_curve, lie, lie_laurent, pullback_automorphism,
    pullback_h, pushforward_h, HMap, PlanarField, PolyMap,
};
use campo_core::parse::{parse_exppoly, parse_laurent, parse_unipoly};
use campo_core::poly::{LaurentPoly2, Vars};
use campo_core::ExpPoly;

fn xy() -> Vars {
    Vars::xy()
}

fn uv() -> Vars {
    Vars::uv()
}

fn lp(src: &str) -> LaurentPoly2 {
    parse_laurent(src, &xy()).unwrap()
}

fn ep(src: &str) -> ExpPoly {
    parse_exppoly(src, &xy()).unwrap()
}

fn field(p: &str, q: &str) -> PlanarField {
    PlanarField::new(xy(), ep(p), ep(q))
}

fn field_uv(p: &str, q: &str) -> PlanarField {
    PlanarField::new(
        uv(),
        parse_exppoly(p, &uv()).unwrap(),
        parse_exppoly(q, &uv()).unwrap(),
    )
}

#[test]
fn lie_derivative_of_products() {
    let x_field = field("x", "1");
    let h = ep("x*y");
    assert_eq!(lie(&x_field, &h), ep("x*y + x"));
    // derivation rule on a random-ish pair
    let f = ep("x^2 - y");
    let g = ep("x*y + 1");
    let lhs = lie(&x_field, &f.mul(&g));
    let rhs = lie(&x_field, &f).mul(&g).add(&f.mul(&lie(&x_field, &g)));
    assert_eq!(lhs, rhs);
}

#[test]
fn lie_kills_first_integrals_of_the_linear_family() {
    // λx∂x + ∂y with λ=2 conserves x·e^{−2y}
    let f = field("2*x", "1");
    let w = ep("x*exp(-2*y)");
    assert!(lie(&f, &w).is_zero());
}

#[test]
fn isolated_singularities_by_coprimality() {
    assert!(has_isolated_singularities(&field("x", "y")).unwrap());
    // a shared factor, even a monomial one, cuts out a curve of zeros
    assert!(!has_isolated_singularities(&field("x", "x*y")).unwrap());
    // no singularities at all counts as isolated
    assert!(has_isolated_singularities(&field("1", "x")).unwrap());
    // a zero component with a nonconstant partner gives a curve of zeros
    assert!(!has_isolated_singularities(&field("0", "x*y + 1")).unwrap());
    assert!(has_isolated_singularities(&field("0", "5")).unwrap());
    // outside the domain: the zero field and non-polynomial components
    assert!(has_isolated_singularities(&field("0", "0")).is_err());
    assert!(has_isolated_singularities(&field("x^-1", "y")).is_err());
}

#[test]
fn invariant_curve_with_cofactor() {
    let y_field = field("x^2", "-(2*x*y + 1)");
    let h = lp("x*y + 1");
    let cof = is_invariant_curve(&y_field, &h).unwrap().expect("invariant");
    assert_eq!(cof, ep("-x"));
    // definition check: lie(Y,h) = cof·h
    assert_eq!(lie_laurent(&y_field, &h), cof.mul(&ExpPoly::from_laurent(h)));
}

#[test]
fn non_invariant_curve_is_rejected() {
    let f = field("x", "1");
    assert!(is_invariant_curve(&f, &lp("y")).unwrap().is_none());
    // x = 0 is invariant for the Example-2 shaped field with (m,n) = (1,2)
    let y2 = field("x^2*y", "-(x*y^2 - 1)");
    let cof = is_invariant_curve(&y2, &lp("x")).unwrap().expect("x=0 invariant");
    assert_eq!(cof, ep("x*y"));
}

#[test]
fn swap_pullback_relabels() {
    let swap = PolyMap::new(xy(), (lp("y"), lp("x")), (lp("y"), lp("x"))).unwrap();
    let f = field("x", "1");
    let pulled = pullback_automorphism(&f, &swap).unwrap();
    assert_eq!(pulled, field("1", "y"));
}

#[test]
fn shear_pullback_conjugates() {
    // Φ = (x, y + x²), Φ⁻¹ = (x, y − x²)
    let shear = PolyMap::new(xy(), (lp("x"), lp("y + x^2")), (lp("x"), lp("y - x^2"))).unwrap();
    let pulled = pullback_automorphism(&field("x", "0"), &shear).unwrap();
    assert_eq!(pulled, field("x", "-2*x^2"));
    // ∂y is translation-invariant
    let dy = pullback_automorphism(&field("0", "1"), &shear).unwrap();
    assert_eq!(dy, field("0", "1"));
}

#[test]
fn pullback_transports_lie_derivatives() {
    // (Φ*X)(h∘Φ) = (Xh)∘Φ for a polynomial automorphism
    let shear = PolyMap::new(xy(), (lp("x"), lp("y + x^2")), (lp("x"), lp("y - x^2"))).unwrap();
    let x_field = field("x + y", "x*y");
    let h = ep("x^2*y - y");
    let pulled = pullback_automorphism(&x_field, &shear).unwrap();
    let ix = campo_core::parse::parse_ratfn("x", &xy()).unwrap();
    let iy = campo_core::parse::parse_ratfn("y + x^2", &xy()).unwrap();
    let lhs = lie(&pulled, &h.substitute(&ix, &iy).unwrap());
    let rhs = lie(&x_field, &h).substitute(&ix, &iy).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn bad_inverse_is_rejected() {
    let err = PolyMap::new(xy(), (lp("x"), lp("y + x^2")), (lp("x"), lp("y + x^2")));
    assert!(err.is_err());
}

#[test]
fn reciprocal_involution_pullback() {
    // the true conjugate of X = x e^{−y}(x∂x + ∂y) under (x,y) → (1/x,1/y)
    let inv = PolyMap::new(xy(), (lp("x^-1"), lp("y^-1")), (lp("x^-1"), lp("y^-1"))).unwrap();
    let x_field = field("x^2*exp(-y)", "x*exp(-y)");
    let pulled = pullback_automorphism(&x_field, &inv).unwrap();
    let expected = field("-exp(-y^-1)", "-x^-1*y^2*exp(-y^-1)");
    assert_eq!(pulled, expected);
    // involution: pulling back twice returns the original field
    let twice = pullback_automorphism(&pulled, &inv).unwrap();
    assert_eq!(twice, x_field);
}

#[test]
fn cover_components_satisfy_the_defining_relation() {
    // R∘H = vⁿ for R = x^m (x^ℓ y + p)ⁿ
    let p = parse_unipoly("1 + 2*x", "x").unwrap();
    let h = HMap::new(3, 2, 2, p).unwrap();
    let (h1, h2) = h.components(&uv());
    let r = h.r_function(&xy()).unwrap();
    let img = r
        .substitute(
            &campo_core::RationalFn2::from_laurent(h1),
            &campo_core::RationalFn2::from_laurent(h2),
        )
        .unwrap();
    let vn = campo_core::parse::parse_ratfn("v^2", &uv()).unwrap();
    assert_eq!(img, vn);
}

#[test]
fn monomial_cover_pullback() {
    // X = x y (x∂x − y∂y) pulls back through H(1,1,0,0) to v·u∂u
    let h = HMap::new(1, 1, 0, parse_unipoly("0", "x").unwrap()).unwrap();
    let x_field = field("x^2*y", "-x*y^2");
    let pulled = pullback_h(&x_field, &h, &uv()).unwrap();
    assert_eq!(pulled, field_uv("u*v", "0"));
}

#[test]
fn pushforward_descends_monomial_fields() {
    let h = HMap::new(1, 1, 0, parse_unipoly("0", "x").unwrap()).unwrap();
    let w = field_uv("u*v", "0");
    let pushed = pushforward_h(&w, &h, &xy()).unwrap();
    assert_eq!(pushed, field("x^2*y", "-x*y^2"));
    // u∂u descends to x∂x − y∂y
    let w2 = field_uv("u", "0");
    assert_eq!(pushforward_h(&w2, &h, &xy()).unwrap(), field("x", "-y"));
}

#[test]
fn pushforward_through_a_degree_two_cover() {
    // H = (u², v/u); u∂u descends to 2x∂x − y∂y
    let h = HMap::new(1, 2, 0, parse_unipoly("0", "x").unwrap()).unwrap();
    let w = field_uv("u", "0");
    assert_eq!(pushforward_h(&w, &h, &xy()).unwrap(), field("2*x", "-y"));
    // ∂u does not descend: 2u is not a function of u²
    let bad = pushforward_h(&field_uv("1", "0"), &h, &xy());
    assert!(bad.is_err());
}

#[test]
fn cover_round_trips() {
    let p = parse_unipoly("2", "x").unwrap();
    let h = HMap::new(2, 3, 1, p).unwrap();
    // a Laurent field on x ≠ 0
    let x_field = field("x^2*y - x^-1", "x*y^2 + 3");
    let pulled = pullback_h(&x_field, &h, &uv()).unwrap();
    let back = pushforward_h(&pulled, &h, &xy()).unwrap();
    assert_eq!(back, x_field);
}

#[test]
fn pullback_h_handles_exponential_factors() {
    // f = e^{−xy} with (m,n,ℓ,p) = (1,1,0,0): f∘H = e^{−v}
    let h = HMap::new(1, 1, 0, parse_unipoly("0", "x").unwrap()).unwrap();
    let x_field = field("x^2*exp(-x*y)", "exp(-x*y) - x*y*exp(-x*y)");
    let pulled = pullback_h(&x_field, &h, &uv()).unwrap();
    let expected = field_uv("u^2*exp(-v)", "u*exp(-v)");
    assert_eq!(pulled, expected);
}
