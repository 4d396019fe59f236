//! Chart-shape extraction, the contraction of the reduced differential,
//! the one-form of times, the exponent identity, and reconstruction.

use campo_core::family::FamilySpec;
use campo_core::field::HMap;
use campo_core::num::{c_int, c_one};
use campo_core::parse::{parse_exppoly, parse_laurent, parse_ratfn, parse_unipoly};
use campo_core::poly::Vars;
use campo_core::riccati::{
    build_y_from_uv, eta_contraction, eta_one_form, extract_uv_form, solve_k, time_form,
    verify_time_contraction, EtaShape, UVForm,
};
use campo_core::{ExpPoly, PlanarField, UniPoly};

fn field(p: &str, q: &str) -> PlanarField {
    let vars = Vars::xy();
    PlanarField::new(
        vars.clone(),
        parse_exppoly(p, &vars).unwrap(),
        parse_exppoly(q, &vars).unwrap(),
    )
}

fn lp(src: &str) -> campo_core::LaurentPoly2 {
    parse_laurent(src, &Vars::xy()).unwrap()
}

fn uv(src: &str) -> UniPoly {
    parse_unipoly(src, "v").unwrap()
}

fn hmap(m: i64, n: i64) -> HMap {
    HMap::new(m, n, 0, UniPoly::zero("x")).unwrap()
}

fn hmap_l(m: i64, n: i64, ell: i64, p: &str) -> HMap {
    HMap::new(m, n, ell, parse_unipoly(p, "x").unwrap()).unwrap()
}

#[test]
fn uv_extraction_on_simple_fields() {
    let f = extract_uv_form(&field("x", "-y"), &hmap(1, 1)).unwrap();
    assert_eq!(f.k, 0);
    assert_eq!(f.a, uv("1"));
    assert!(f.c.is_zero());

    let f = extract_uv_form(&field("x^2", "1 - x*y"), &hmap(1, 1)).unwrap();
    assert_eq!(f.k, 1);
    assert_eq!(f.a, uv("1"));
    assert_eq!(f.c, uv("1"));
    assert_eq!(f.c_monomial(), Some((c_one(), 0)));
}

#[test]
fn non_adapted_fields_are_rejected() {
    // the fibre component picks up a genuine u-dependence
    let err = extract_uv_form(&field("x", "x + y"), &hmap(1, 1)).unwrap_err();
    assert!(err.to_string().contains("depends on u"), "{err}");

    // a line of singular points violates the precondition
    let err = extract_uv_form(&field("y", "0"), &hmap(1, 1)).unwrap_err();
    assert!(err.to_string().contains("isolated"), "{err}");
}

#[test]
fn eta_has_coprime_coefficients() {
    let vars = Vars::xy();
    assert_eq!(eta_one_form(&hmap(1, 1), &vars).unwrap(), (lp("y"), lp("x")));
    assert_eq!(
        eta_one_form(&hmap(3, 2), &vars).unwrap(),
        (lp("3*y"), lp("2*x"))
    );
    assert_eq!(
        eta_one_form(&hmap_l(1, 1, 1, "1"), &vars).unwrap(),
        (lp("2*x*y + 1"), lp("x^2"))
    );
}

#[test]
fn eta_contraction_factors() {
    // diagonal-ish field: the contraction is a clean monomial
    let (eta_y, shape) = eta_contraction(&field("x", "2*y"), &hmap(1, 1)).unwrap();
    assert_eq!(eta_y, lp("3*x*y"));
    assert_eq!(
        shape,
        EtaShape { alpha: 1, beta: 1, gamma: 0, s: None, scale: c_int(3) }
    );

    // a displaced fibre appears as the third factor
    let (eta_y, shape) = eta_contraction(&field("x", "y*(x*y - 6)"), &hmap(1, 1)).unwrap();
    assert_eq!(eta_y, lp("x*y*(x*y - 5)"));
    assert_eq!(shape.alpha, 1);
    assert_eq!(shape.beta, 1);
    assert_eq!(shape.gamma, 1);
    assert_eq!(shape.s, Some(c_int(5)));
    assert_eq!(shape.scale, c_one());

    // when R is a first integral the contraction vanishes
    let err = eta_contraction(&field("2*x", "-3*y"), &hmap(3, 2)).unwrap_err();
    assert!(err.to_string().contains("first integral"), "{err}");
}

#[test]
fn time_form_contracts_to_one() {
    let vars = Vars::xy();
    let y = field("x", "2*y");
    let one = ExpPoly::one(vars.clone());
    let tau = time_form(&one, &y, &hmap(1, 1)).unwrap();
    assert_eq!(tau.coeff_num, lp("x*y"));
    assert_eq!(tau.coeff_den, parse_exppoly("3*x*y", &vars).unwrap());
    assert_eq!(tau.base_dx, parse_ratfn("x^-1", &vars).unwrap());
    assert_eq!(tau.base_dy, parse_ratfn("y^-1", &vars).unwrap());
    assert!(verify_time_contraction(&tau, &y));
    // ...but not for a different field
    assert!(!verify_time_contraction(&tau, &field("x", "0")));

    // a transcendental factor cancels exactly
    let f = parse_exppoly("exp(x^2*y)", &vars).unwrap();
    let x_field = y.mul_exppoly(&f);
    let tau_f = time_form(&f, &y, &hmap(1, 1)).unwrap();
    assert!(verify_time_contraction(&tau_f, &x_field));
    assert!(!verify_time_contraction(&tau_f, &y));

    // the first-integral degeneracy is reported
    assert!(time_form(&one, &field("2*x", "-3*y"), &hmap(3, 2)).is_err());
}

#[test]
fn exponent_identity_table() {
    let flat = |alpha, beta| EtaShape { alpha, beta, gamma: 0, s: None, scale: c_one() };
    assert_eq!(solve_k(&flat(1, 1), &hmap(1, 1), 1).unwrap(), 0);
    assert_eq!(solve_k(&flat(1, 0), &hmap(1, 1), 0).unwrap(), 1);
    assert_eq!(solve_k(&flat(2, 1), &hmap(2, 3), 1).unwrap(), 3);

    let curved = EtaShape { alpha: 1, beta: 1, gamma: 1, s: Some(c_int(5)), scale: c_one() };
    assert!(solve_k(&curved, &hmap(1, 1), 1).is_err());
    assert!(solve_k(&flat(1, 2), &hmap(1, 1), 1).is_err());
}

#[test]
fn reconstruction_from_chart_data() {
    let form = UVForm { k: 1, a: uv("1"), c: uv("1"), h: hmap(1, 1) };
    assert_eq!(build_y_from_uv(&form).unwrap(), field("x^2", "1 - x*y"));

    // a degenerate fibre component is rejected
    let form = UVForm { k: 0, a: uv("v"), c: uv("0"), h: hmap(1, 1) };
    assert!(build_y_from_uv(&form).is_err());

    // N = 0 forces k = m + n*l
    let form = UVForm { k: 2, a: uv("1"), c: uv("1"), h: hmap(1, 1) };
    let err = build_y_from_uv(&form).unwrap_err();
    assert!(err.to_string().contains("m + n*l"), "{err}");

    // N >= 1 needs the divisibility conditions
    let form = UVForm { k: 1, a: uv("1"), c: uv("v^2"), h: hmap(1, 2) };
    let err = build_y_from_uv(&form).unwrap_err();
    assert!(err.to_string().contains("divisible"), "{err}");
    let form = UVForm { k: 0, a: uv("1"), c: uv("v^2"), h: hmap(1, 2) };
    let err = build_y_from_uv(&form).unwrap_err();
    assert!(err.to_string().contains("N - 1"), "{err}");

    // N >= 1 needs a(0) != 0, else the singularities are not isolated
    let form = UVForm { k: 0, a: uv("v"), c: uv("v"), h: hmap(1, 1) };
    assert!(build_y_from_uv(&form).is_err());
}

fn aii_fixture() -> FamilySpec {
    FamilySpec::AII {
        f: None,
        kappa: 1,
        delta: 0,
        lambda: parse_unipoly("z^-1 + 1", "z").unwrap(),
        m: 1,
        n: 1,
        a: c_int(2),
    }
}

fn aiii_fixture() -> FamilySpec {
    FamilySpec::AIII {
        f: None,
        kappa: 1,
        delta: 1,
        ell: 1,
        p: parse_unipoly("1", "x").unwrap(),
        lambda: parse_unipoly("z^-1 + 1", "z").unwrap(),
        m: 1,
        n: 1,
        a: c_int(2),
    }
}

#[test]
fn family_charts_round_trip() {
    // second decomposition form: k = 0, a(v) = q(v), c(v) = a*v^(n*kappa+1)
    let spec = aii_fixture();
    let y = spec.y_field().unwrap();
    let h = spec.hmap().unwrap();
    let form = extract_uv_form(&y, &h).unwrap();
    assert_eq!(form.k, 0);
    assert_eq!(form.a, uv("1 + v"));
    assert_eq!(form.c, uv("2*v^2"));
    assert_eq!(build_y_from_uv(&form).unwrap(), y);

    // third decomposition form
    let spec = aiii_fixture();
    let y = spec.y_field().unwrap();
    let h = spec.hmap().unwrap();
    let form = extract_uv_form(&y, &h).unwrap();
    assert_eq!(form.k, 1);
    assert_eq!(build_y_from_uv(&form).unwrap(), y);

    // fourth form: N = 0, k = m + n*l
    for (m, n, a) in [(1i64, 1i64, "1"), (2, 1, "1"), (1, 2, "z")] {
        let spec = FamilySpec::B {
            f: None,
            m,
            n,
            ell: 0,
            p: UniPoly::zero("x"),
            c: c_one(),
            a: parse_unipoly(a, "z").unwrap(),
        };
        let y = spec.y_field().unwrap();
        let h = spec.hmap().unwrap();
        let form = extract_uv_form(&y, &h).unwrap();
        // the pole weight m + n*ell at ell = 0
        assert_eq!(form.k, m);
        assert_eq!(form.c_monomial(), Some((c_one(), 0)));
        assert_eq!(build_y_from_uv(&form).unwrap(), y);
    }

    // a deformed-fibre instance of the fourth form
    let spec = FamilySpec::B {
        f: None,
        m: 1,
        n: 1,
        ell: 1,
        p: parse_unipoly("1", "x").unwrap(),
        c: c_one(),
        a: parse_unipoly("1", "z").unwrap(),
    };
    let y = spec.y_field().unwrap();
    let h = spec.hmap().unwrap();
    let form = extract_uv_form(&y, &h).unwrap();
    assert_eq!(form.k, 2);
    assert_eq!(build_y_from_uv(&form).unwrap(), y);
}

#[test]
fn exponent_identity_agrees_with_extraction() {
    // on the second and third decomposition forms the contraction has
    // gamma = 0 and beta = N, so the identity reproduces the chart power
    for spec in [aii_fixture(), aiii_fixture()] {
        let y = spec.y_field().unwrap();
        let h = spec.hmap().unwrap();
        let form = extract_uv_form(&y, &h).unwrap();
        let (_, shape) = eta_contraction(&y, &h).unwrap();
        let (_, big_n) = form.c_monomial().unwrap();
        assert_eq!(shape.gamma, 0);
        assert_eq!(shape.beta, big_n);
        assert_eq!(solve_k(&shape, &h, big_n).unwrap(), form.k);
    }
    // the second form in exact numbers: alpha = m*kappa + 1, beta = n*kappa + 1
    let spec = aii_fixture();
    let (eta_y, shape) = eta_contraction(&spec.y_field().unwrap(), &spec.hmap().unwrap()).unwrap();
    assert_eq!(eta_y, lp("2*x^2*y^2"));
    assert_eq!(
        shape,
        EtaShape { alpha: 2, beta: 2, gamma: 0, s: None, scale: c_int(2) }
    );

    // on the fourth form the identity yields k = m + n*l
    for (m, n, ell, p, a) in [
        (1i64, 1i64, 0i64, "0", "1"),
        (2, 1, 0, "0", "1"),
        (1, 2, 0, "0", "z"),
        (1, 1, 1, "1", "1"),
    ] {
        let spec = FamilySpec::B {
            f: None,
            m,
            n,
            ell,
            p: parse_unipoly(p, "x").unwrap(),
            c: c_one(),
            a: parse_unipoly(a, "z").unwrap(),
        };
        let y = spec.y_field().unwrap();
        let h = spec.hmap().unwrap();
        let (_, shape) = eta_contraction(&y, &h).unwrap();
        assert_eq!(shape.beta, 0);
        assert_eq!(solve_k(&shape, &h, 0).unwrap(), m + n * ell);
        assert_eq!(extract_uv_form(&y, &h).unwrap().k, m + n * ell);
    }
}

#[test]
fn times_hold_on_family_instances() {
    // X = f*Y contracts the one-form of times to 1 for every family that
    // carries a deformed invariant function
    let f = parse_exppoly("exp(x*y^2)", &Vars::xy()).unwrap();
    let aii = FamilySpec::AII {
        f: Some(f.clone()),
        kappa: 1,
        delta: 0,
        lambda: parse_unipoly("z^-1 + 1", "z").unwrap(),
        m: 1,
        n: 1,
        a: c_int(2),
    };
    let y = aii.y_field().unwrap();
    let h = aii.hmap().unwrap();
    let tau = time_form(&f, &y, &h).unwrap();
    assert!(verify_time_contraction(&tau, &aii.build().unwrap()));

    let b = FamilySpec::B {
        f: Some(f.clone()),
        m: 2,
        n: 1,
        ell: 0,
        p: UniPoly::zero("x"),
        c: c_one(),
        a: parse_unipoly("1", "z").unwrap(),
    };
    let y = b.y_field().unwrap();
    let h = b.hmap().unwrap();
    let tau = time_form(&f, &y, &h).unwrap();
    assert!(verify_time_contraction(&tau, &b.complete_field().unwrap()));
}
