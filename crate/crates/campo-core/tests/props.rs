//! Randomized structural checks: algebraic identities that must hold
//! exactly for every draw. Set CAMPO_SEED to reproduce a run.

use campo_core::family::{check_star_direct, check_star_truncated, FamilySpec};
use campo_core::field::{lie, pullback_automorphism, pullback_h, HMap, PlanarField, PolyMap};
use campo_core::flow::{CPoint, ExactFlow, C64};
use campo_core::num::{c_gauss, c_int, CNum};
use campo_core::parse::{parse_exppoly, parse_unipoly};
use campo_core::poly::{LaurentPoly2, Vars};
use campo_core::ratfn::RationalFn2;
use campo_core::riccati::{build_y_from_uv, extract_uv_form};
use campo_core::unipoly::UniPoly;
use campo_core::ExpPoly;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng() -> ChaCha8Rng {
    let seed = std::env::var("CAMPO_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(0x0cab_a11e);
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_c(rng: &mut ChaCha8Rng) -> CNum {
    c_gauss(
        rng.gen_range(-3..=3),
        1,
        if rng.gen_bool(0.4) { rng.gen_range(-2..=2) } else { 0 },
        1,
    )
}

fn rand_c_nonzero(rng: &mut ChaCha8Rng) -> CNum {
    loop {
        let c = rand_c(rng);
        if c != c_int(0) {
            return c;
        }
    }
}

/// A random Laurent polynomial with exponents in the given range.
fn rand_laurent(rng: &mut ChaCha8Rng, vars: &Vars, lo: i64, hi: i64) -> LaurentPoly2 {
    let mut acc = LaurentPoly2::zero(vars.clone());
    for _ in 0..rng.gen_range(1..=3) {
        let a = rng.gen_range(lo..=hi);
        let b = rng.gen_range(lo..=hi);
        acc = acc.add(&LaurentPoly2::monomial(vars.clone(), a, b, rand_c(rng)));
    }
    acc
}

/// A random exponential polynomial: a Laurent part plus, sometimes, a
/// Laurent coefficient times exp of a small polynomial.
fn rand_exppoly(rng: &mut ChaCha8Rng, vars: &Vars, lo: i64) -> ExpPoly {
    let mut acc = ExpPoly::from_laurent(rand_laurent(rng, vars, lo, 2));
    if rng.gen_bool(0.6) {
        let coeff = ExpPoly::from_laurent(rand_laurent(rng, vars, lo, 2));
        let e = rand_laurent(rng, vars, 0, 2);
        acc = acc.add(&coeff.mul(&ExpPoly::exp_of(e)));
    }
    acc
}

fn rand_field(rng: &mut ChaCha8Rng, vars: &Vars, lo: i64) -> PlanarField {
    PlanarField::new(
        vars.clone(),
        rand_exppoly(rng, vars, lo),
        rand_exppoly(rng, vars, lo),
    )
}

/// A random univariate polynomial of degree <= maxdeg in the given letter.
fn rand_unipoly(rng: &mut ChaCha8Rng, var: &str, maxdeg: i64) -> UniPoly {
    let mut acc = UniPoly::zero(var);
    for e in 0..=maxdeg {
        if rng.gen_bool(0.7) {
            acc = acc.add(&UniPoly::monomial(var, e, rand_c(rng)));
        }
    }
    acc
}

fn coprime_pair(rng: &mut ChaCha8Rng) -> (i64, i64) {
    let pairs = [(1, 1), (1, 2), (2, 1), (3, 1), (1, 3), (3, 2), (2, 3)];
    pairs[rng.gen_range(0..pairs.len())]
}

// ---- the Lie derivative is a derivation -------------------------------------

#[test]
fn lie_is_a_derivation_on_products() {
    let mut rng = rng();
    let xy = Vars::xy();
    for _ in 0..20 {
        let x_field = rand_field(&mut rng, &xy, -2);
        let f = rand_exppoly(&mut rng, &xy, -2);
        let g = rand_exppoly(&mut rng, &xy, -2);
        let lhs = lie(&x_field, &f.mul(&g));
        let rhs = f.mul(&lie(&x_field, &g)).add(&g.mul(&lie(&x_field, &f)));
        assert!(
            lhs.sub(&rhs).is_zero(),
            "Leibniz rule failed for f={f:?}, g={g:?}"
        );
    }
}

#[test]
fn lie_is_linear_over_constants() {
    let mut rng = rng();
    let xy = Vars::xy();
    for _ in 0..20 {
        let x_field = rand_field(&mut rng, &xy, -2);
        let f = rand_exppoly(&mut rng, &xy, -2);
        let g = rand_exppoly(&mut rng, &xy, -2);
        let c = rand_c(&mut rng);
        let lhs = lie(&x_field, &f.scale(&c).add(&g));
        let rhs = lie(&x_field, &f).scale(&c).add(&lie(&x_field, &g));
        assert!(lhs.sub(&rhs).is_zero());
    }
}

// ---- coordinate changes commute with the Lie derivative ---------------------

/// A random elementary polynomial change of coordinates: a shear in either
/// direction or an invertible diagonal scaling.
fn rand_automorphism(rng: &mut ChaCha8Rng, vars: &Vars) -> PolyMap {
    let x = LaurentPoly2::var(vars.clone(), 0);
    let y = LaurentPoly2::var(vars.clone(), 1);
    match rng.gen_range(0..3) {
        0 => {
            // (x + p(y), y)
            let mut p = LaurentPoly2::zero(vars.clone());
            for b in 0..=2 {
                if rng.gen_bool(0.7) {
                    p = p.add(&LaurentPoly2::monomial(vars.clone(), 0, b, rand_c(rng)));
                }
            }
            PolyMap::new(
                vars.clone(),
                (x.add(&p), y.clone()),
                (x.sub(&p), y),
            )
            .unwrap()
        }
        1 => {
            // (x, y + q(x))
            let mut q = LaurentPoly2::zero(vars.clone());
            for a in 0..=2 {
                if rng.gen_bool(0.7) {
                    q = q.add(&LaurentPoly2::monomial(vars.clone(), a, 0, rand_c(rng)));
                }
            }
            PolyMap::new(
                vars.clone(),
                (x.clone(), y.add(&q)),
                (x, y.sub(&q)),
            )
            .unwrap()
        }
        _ => {
            // (a x, b y) with a, b invertible
            let a = rand_c_nonzero(rng);
            let b = rand_c_nonzero(rng);
            let ainv = c_int(1) / a.clone();
            let binv = c_int(1) / b.clone();
            PolyMap::new(
                vars.clone(),
                (x.scale(&a), y.scale(&b)),
                (x.scale(&ainv), y.scale(&binv)),
            )
            .unwrap()
        }
    }
}

/// A random polynomial field and observable (nonnegative exponents), so
/// that composition with a polynomial map stays in the same ring.
#[test]
fn polynomial_coordinate_changes_respect_lie() {
    let mut rng = rng();
    let xy = Vars::xy();
    for _ in 0..12 {
        let map = rand_automorphism(&mut rng, &xy);
        let x_field = rand_field(&mut rng, &xy, 0);
        let h = rand_exppoly(&mut rng, &xy, 0);
        let (f1, f2) = map.forward();
        let ix = RationalFn2::from_laurent(f1.clone());
        let iy = RationalFn2::from_laurent(f2.clone());
        let pulled = pullback_automorphism(&x_field, &map).unwrap();
        let lhs = lie(&pulled, &h.substitute(&ix, &iy).unwrap());
        let rhs = lie(&x_field, &h).substitute(&ix, &iy).unwrap();
        assert!(
            lhs.sub(&rhs).is_zero(),
            "pullback functoriality failed for map {:?}",
            map.forward()
        );
    }
}

#[test]
fn the_branched_cover_respects_lie() {
    let mut rng = rng();
    let xy = Vars::xy();
    let uv = Vars::uv();
    for _ in 0..10 {
        let (m, n) = coprime_pair(&mut rng);
        let ell = rng.gen_range(0..=2);
        let p = if ell == 0 {
            UniPoly::zero("x")
        } else {
            let mut p = UniPoly::constant("x", rand_c_nonzero(&mut rng));
            for e in 1..ell {
                if rng.gen_bool(0.5) {
                    p = p.add(&UniPoly::monomial("x", e, rand_c(&mut rng)));
                }
            }
            p
        };
        let h = HMap::new(m, n, ell, p).unwrap();
        let (h1, h2) = h.components(&uv);
        let ix = RationalFn2::from_laurent(h1);
        let iy = RationalFn2::from_laurent(h2);
        let x_field = rand_field(&mut rng, &xy, 0);
        let obs = rand_exppoly(&mut rng, &xy, 0);
        let pulled = pullback_h(&x_field, &h, &uv).unwrap();
        let lhs = lie(&pulled, &obs.substitute(&ix, &iy).unwrap());
        let rhs = lie(&x_field, &obs).substitute(&ix, &iy).unwrap();
        assert!(
            lhs.sub(&rhs).is_zero(),
            "cover functoriality failed for (m, n, ell) = ({m}, {n}, {ell})"
        );
    }
}

// ---- the holomorphy condition: truncated vs. direct -------------------------

/// Parameter draws engineered so the condition holds: constant-coefficient
/// cancellation at order zero with any higher terms pushed past x^ell.
fn engineered_star(rng: &mut ChaCha8Rng) -> (CNum, UniPoly, i64, i64, i64, UniPoly) {
    let lam0 = rand_c(rng);
    match rng.gen_range(0..3) {
        0 => {
            // constant p, lambda with a gap: m*d >= ell for the extra term
            let (m, n) = coprime_pair(rng);
            let ell = rng.gen_range(1..=3);
            let d = (ell + m - 1) / m + rng.gen_range(0..=1);
            let lambda = UniPoly::constant("z", lam0.clone())
                .add(&UniPoly::monomial("z", d, rand_c(rng)));
            let p = UniPoly::constant("z", rand_c_nonzero(rng));
            (lam0 * c_int(m), lambda, m, n, ell, p)
        }
        1 => {
            // ell = 1 tolerates any p with p(0) != 0 under constant lambda
            let (m, n) = coprime_pair(rng);
            let mut p = UniPoly::constant("z", rand_c_nonzero(rng));
            p = p.add(&UniPoly::monomial("z", 1, rand_c(rng)).shifted(rng.gen_range(0..=1)));
            (
                lam0.clone() * c_int(m),
                UniPoly::constant("z", lam0),
                m,
                n,
                1,
                p,
            )
        }
        _ => {
            // the classical shape: m = n = ell = 1, p = 1, lambda = a + z
            let a = rand_c(rng);
            (
                a.clone(),
                UniPoly::constant("z", a).add(&UniPoly::monomial("z", 1, c_int(1))),
                1,
                1,
                1,
                UniPoly::constant("z", c_int(1)),
            )
        }
    }
}

#[test]
fn star_truncation_matches_the_direct_test() {
    let mut rng = rng();
    let mut holds = 0;
    for i in 0..40 {
        let (a, lambda, m, n, ell, p) = if i % 2 == 0 {
            engineered_star(&mut rng)
        } else {
            let (m, n) = coprime_pair(&mut rng);
            let ell = rng.gen_range(1..=3);
            let mut p = UniPoly::constant("z", rand_c_nonzero(&mut rng));
            for e in 1..ell {
                if rng.gen_bool(0.5) {
                    p = p.add(&UniPoly::monomial("z", e, rand_c(&mut rng)));
                }
            }
            (rand_c(&mut rng), rand_unipoly(&mut rng, "z", 3), m, n, ell, p)
        };
        let t = check_star_truncated(&a, &lambda, m, n, ell, &p).unwrap();
        let d = check_star_direct(&a, &lambda, m, n, ell, &p).unwrap();
        assert_eq!(
            t, d,
            "truncated and direct tests disagree for a={a:?}, lambda={lambda:?}, \
             (m, n, ell) = ({m}, {n}, {ell}), p={p:?}"
        );
        if t {
            holds += 1;
        }
    }
    assert!(holds >= 10, "too few positive draws ({holds}) to be convincing");
}

// ---- chart-shape extraction round trips on random family members ------------

fn rand_lambda_pole(rng: &mut ChaCha8Rng, kappa: i64) -> UniPoly {
    // q(z)/z^kappa with q(0) != 0
    let mut q = UniPoly::monomial("z", -kappa, rand_c_nonzero(rng));
    for e in 1..=2 {
        if rng.gen_bool(0.6) {
            q = q.add(&UniPoly::monomial("z", e - kappa, rand_c(rng)));
        }
    }
    q
}

fn rand_aii(rng: &mut ChaCha8Rng) -> FamilySpec {
    let (m, n) = coprime_pair(rng);
    let kappa = rng.gen_range(1..=2);
    FamilySpec::AII {
        f: None,
        kappa,
        delta: 0,
        lambda: rand_lambda_pole(rng, kappa),
        m,
        n,
        a: rand_c_nonzero(rng),
    }
}

fn rand_aiii(rng: &mut ChaCha8Rng) -> FamilySpec {
    let (m, n) = coprime_pair(rng);
    let ell = rng.gen_range(1..=2);
    let mut p = UniPoly::constant("x", rand_c_nonzero(rng));
    for e in 1..ell {
        if rng.gen_bool(0.5) {
            p = p.add(&UniPoly::monomial("x", e, rand_c(rng)));
        }
    }
    let kappa = rng.gen_range(1..=2);
    FamilySpec::AIII {
        f: None,
        kappa,
        delta: ell,
        ell,
        p,
        lambda: rand_lambda_pole(rng, kappa),
        m,
        n,
        a: rand_c_nonzero(rng),
    }
}

fn rand_b(rng: &mut ChaCha8Rng) -> FamilySpec {
    let (m, n) = coprime_pair(rng);
    let ell = rng.gen_range(0..=2);
    let p = if ell == 0 {
        UniPoly::zero("x")
    } else {
        UniPoly::constant("x", rand_c_nonzero(rng))
    };
    // a in (1/z)*C[z^n]: exponents n*j - 1. The simple-pole term passes the
    // shape test but never pushes down to a polynomial plane field, so the
    // draws stay at j >= 1.
    let mut a = UniPoly::zero("z");
    for j in 1..=2 {
        if rng.gen_bool(0.6) {
            a = a.add(&UniPoly::monomial("z", n * j - 1, rand_c(rng)));
        }
    }
    if a.is_zero() {
        a = UniPoly::monomial("z", n - 1, rand_c_nonzero(rng));
    }
    FamilySpec::B {
        f: None,
        m,
        n,
        ell,
        p,
        c: rand_c_nonzero(rng),
        a,
    }
}

#[test]
fn chart_extraction_round_trips_on_random_members() {
    let mut rng = rng();
    for i in 0..30 {
        let spec = match i % 3 {
            0 => rand_aii(&mut rng),
            1 => rand_aiii(&mut rng),
            _ => rand_b(&mut rng),
        };
        spec.validate()
            .unwrap_or_else(|e| panic!("draw {i} invalid: {e} ({spec:?})"));
        let y = spec.y_field().unwrap();
        let h = spec.hmap().unwrap();
        let form = extract_uv_form(&y, &h)
            .unwrap_or_else(|e| panic!("extraction failed on draw {i}: {e} ({spec:?})"));
        let rebuilt = build_y_from_uv(&form)
            .unwrap_or_else(|e| panic!("reconstruction failed on draw {i}: {e}"));
        assert_eq!(rebuilt, y, "round trip changed the field on draw {i}: {spec:?}");
        if let FamilySpec::B { m, n, ell, .. } = &spec {
            assert_eq!(form.k, m + n * ell, "wrong exponent on draw {i}");
        }
    }
}

// ---- the flow is a one-parameter group ---------------------------------------

fn rel_gap(a: CPoint, b: CPoint) -> f64 {
    let dx = (a.x - b.x).norm();
    let dy = (a.y - b.y).norm();
    let scale = b.sup_norm().max(1.0);
    dx.max(dy) / scale
}

#[test]
fn exact_flows_compose_at_random_times() {
    let mut rng = rng();
    let ep = |s: &str| parse_exppoly(s, &Vars::xy()).unwrap();
    let fixtures: Vec<(FamilySpec, CPoint)> = vec![
        (
            FamilySpec::S2 {
                lambda: c_gauss(1, 1, 1, 2),
                mu: c_gauss(-1, 2, 0, 1),
            },
            CPoint::new(C64::new(1.0, 0.5), C64::new(-0.3, 1.0)),
        ),
        (
            FamilySpec::S4 {
                lambda: parse_unipoly("z", "z").unwrap(),
                m: 1,
                n: 1,
            },
            CPoint::new(C64::new(1.0, 0.0), C64::new(2.0, -1.0)),
        ),
        (
            FamilySpec::S5 {
                lambda: parse_unipoly("z", "z").unwrap(),
                m: 2,
                n: 1,
                ell: 2,
                p: parse_unipoly("1 + x", "x").unwrap(),
            },
            CPoint::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
        ),
        (
            FamilySpec::B {
                f: Some(ep("exp(-x*y)")),
                m: 1,
                n: 1,
                ell: 0,
                p: UniPoly::zero("x"),
                c: c_int(1),
                a: parse_unipoly("1", "z").unwrap(),
            },
            CPoint::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
        ),
        (
            FamilySpec::AII {
                f: Some(ep("x^-1*y^-2*exp(x^-1*y^-1)")),
                kappa: 1,
                delta: 0,
                lambda: parse_unipoly("z^-1 + 1", "z").unwrap(),
                m: 1,
                n: 1,
                a: c_int(1),
            },
            CPoint::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
        ),
    ];
    for (spec, z0) in fixtures {
        let flow = ExactFlow::new(&spec, z0).unwrap();
        for _ in 0..6 {
            let draw = |rng: &mut ChaCha8Rng| {
                C64::from_polar(0.6 * rng.gen::<f64>(), std::f64::consts::TAU * rng.gen::<f64>())
            };
            let t = draw(&mut rng);
            let s = draw(&mut rng);
            let direct = flow.at(t + s);
            let mid = flow.at(t);
            let via = ExactFlow::new(&spec, mid).unwrap().at(s);
            let gap = rel_gap(via, direct);
            assert!(
                gap < 1e-10,
                "group law violated for {} at t={t}, s={s}: gap {gap:e}",
                spec.tag()
            );
        }
    }
}
