//! Planar vector fields with exponential-polynomial components, Lie
//! derivatives along them, and coordinate changes: polynomial automorphisms
//! of the plane and the n-fold branched cover H used by the classification.

use crate::error::{Error, Result};
use crate::expr::ExpPoly;
use crate::num::{c_int, c_one, CNum};
use crate::poly::{gcd2, LaurentPoly2, Vars};
use crate::ratfn::RationalFn2;
use crate::unipoly::UniPoly;
use num_complex::Complex64;
use num_traits::Zero;
use std::fmt;

/// A vector field P·∂/∂x + Q·∂/∂y in the coordinates named by `vars`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlanarField {
    vars: Vars,
    p: ExpPoly,
    q: ExpPoly,
}

impl PlanarField {
    pub fn new(vars: Vars, p: ExpPoly, q: ExpPoly) -> Self {
        assert!(p.vars() == &vars && q.vars() == &vars, "component variable mismatch");
        PlanarField { vars, p, q }
    }

    pub fn from_laurent(vars: Vars, p: LaurentPoly2, q: LaurentPoly2) -> Self {
        Self::new(vars.clone(), ExpPoly::from_laurent(p), ExpPoly::from_laurent(q))
    }

    pub fn from_ratfn(vars: Vars, p: RationalFn2, q: RationalFn2) -> Self {
        Self::new(vars.clone(), ExpPoly::from_ratfn(p), ExpPoly::from_ratfn(q))
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn p(&self) -> &ExpPoly {
        &self.p
    }

    pub fn q(&self) -> &ExpPoly {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Multiply both components by a scalar function: f·X.
    pub fn mul_exppoly(&self, f: &ExpPoly) -> Self {
        PlanarField {
            vars: self.vars.clone(),
            p: self.p.mul(f),
            q: self.q.mul(f),
        }
    }

    pub fn mul_ratfn(&self, f: &RationalFn2) -> Self {
        PlanarField {
            vars: self.vars.clone(),
            p: self.p.mul_ratfn(f),
            q: self.q.mul_ratfn(f),
        }
    }

    pub fn scale(&self, c: &CNum) -> Self {
        PlanarField {
            vars: self.vars.clone(),
            p: self.p.scale(c),
            q: self.q.scale(c),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.vars == other.vars);
        PlanarField {
            vars: self.vars.clone(),
            p: self.p.add(&other.p),
            q: self.q.add(&other.q),
        }
    }

    pub fn neg(&self) -> Self {
        PlanarField { vars: self.vars.clone(), p: self.p.neg(), q: self.q.neg() }
    }

    /// Both components are Laurent polynomials.
    pub fn as_laurent(&self) -> Option<(LaurentPoly2, LaurentPoly2)> {
        let p = self.p.as_ratfn()?.as_laurent()?.clone();
        let q = self.q.as_ratfn()?.as_laurent()?.clone();
        Some((p, q))
    }

    pub fn as_ratfn(&self) -> Option<(RationalFn2, RationalFn2)> {
        Some((self.p.as_ratfn()?, self.q.as_ratfn()?))
    }

    pub fn is_polynomial(&self) -> bool {
        self.as_laurent()
            .is_some_and(|(p, q)| p.is_polynomial() && q.is_polynomial())
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (self.p.eval(x, y), self.q.eval(x, y))
    }

    pub fn with_vars(&self, vars: Vars) -> Self {
        PlanarField {
            vars: vars.clone(),
            p: self.p.with_vars(vars.clone()),
            q: self.q.with_vars(vars),
        }
    }
}

impl fmt::Display for PlanarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] d/d{} + [{}] d/d{}",
            self.p, self.vars.0, self.q, self.vars.1
        )
    }
}

/// Lie derivative of a scalar function along the field: X(h) = P·hₓ + Q·h_y.
pub fn lie(field: &PlanarField, h: &ExpPoly) -> ExpPoly {
    assert!(field.vars() == h.vars(), "variable mismatch in Lie derivative");
    field
        .p
        .mul(&h.derivative(0))
        .add(&field.q.mul(&h.derivative(1)))
}

pub fn lie_ratfn(field: &PlanarField, h: &RationalFn2) -> ExpPoly {
    lie(field, &ExpPoly::from_ratfn(h.clone()))
}

pub fn lie_laurent(field: &PlanarField, h: &LaurentPoly2) -> ExpPoly {
    lie(field, &ExpPoly::from_laurent(h.clone()))
}

/// Whether the singular set {P = Q = 0} is finite.
///
/// Defined for fields with polynomial components; true exactly when the
/// components are coprime (their gcd is a nonzero constant). A common
/// factor — monomial or not — cuts out a curve of singular points.
pub fn has_isolated_singularities(field: &PlanarField) -> Result<bool> {
    let Some((p, q)) = field.as_laurent() else {
        return Err(Error::Unsupported(
            "singularity analysis needs polynomial components".into(),
        ));
    };
    if !p.is_polynomial() || !q.is_polynomial() {
        return Err(Error::Unsupported(
            "singularity analysis needs polynomial components".into(),
        ));
    }
    if p.is_zero() && q.is_zero() {
        return Err(Error::Domain("the zero field has no singularity type".into()));
    }
    if p.is_zero() {
        return Ok(q.is_constant());
    }
    if q.is_zero() {
        return Ok(p.is_constant());
    }
    Ok(gcd2(&p, &q).is_constant())
}

/// Test whether {h = 0} is invariant: X(h) = k·h for a cofactor k.
///
/// Returns the cofactor when invariant. For fields with polynomial
/// components the cofactor is required to be a polynomial; for
/// Laurent-coefficient fields a Laurent-polynomial cofactor is accepted.
pub fn is_invariant_curve(field: &PlanarField, h: &LaurentPoly2) -> Result<Option<ExpPoly>> {
    if h.is_zero() || h.is_constant() {
        return Err(Error::Domain("a curve needs a nonconstant equation".into()));
    }
    let want_poly = field.is_polynomial() && h.is_polynomial();
    let l = lie_laurent(field, h);
    let hfn = RationalFn2::from_laurent(h.clone());
    let mut cof = ExpPoly::zero(field.vars().clone());
    for (e, r) in l.terms() {
        let q = r.div(&hfn)?;
        let ok = if want_poly { q.is_polynomial() } else { q.is_laurent() };
        if !ok {
            return Ok(None);
        }
        cof = cof.add(&ExpPoly::from_ratfn(q).mul(&ExpPoly::exp_of(e.clone())));
    }
    Ok(Some(cof))
}

// ---- polynomial automorphisms ---------------------------------------------

/// An invertible polynomial (or monomial-birational, e.g. (1/x,1/y)) change
/// of coordinates, given by the images of the two coordinates together with
/// its inverse. The constructor verifies both compositions exactly; for
/// components with negative exponents the map is understood off the
/// coordinate axes.
#[derive(Clone, Debug)]
pub struct PolyMap {
    vars: Vars,
    fwd: (LaurentPoly2, LaurentPoly2),
    inv: (LaurentPoly2, LaurentPoly2),
}

impl PolyMap {
    pub fn new(
        vars: Vars,
        fwd: (LaurentPoly2, LaurentPoly2),
        inv: (LaurentPoly2, LaurentPoly2),
    ) -> Result<Self> {
        let map = PolyMap { vars: vars.clone(), fwd, inv };
        let x = LaurentPoly2::var(vars.clone(), 0);
        let y = LaurentPoly2::var(vars.clone(), 1);
        let fi = (
            compose(&map.fwd.0, &map.inv)?,
            compose(&map.fwd.1, &map.inv)?,
        );
        let if_ = (
            compose(&map.inv.0, &map.fwd)?,
            compose(&map.inv.1, &map.fwd)?,
        );
        if fi.0 != x || fi.1 != y || if_.0 != x || if_.1 != y {
            return Err(Error::Domain(
                "the supplied inverse does not invert the map".into(),
            ));
        }
        Ok(map)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn forward(&self) -> &(LaurentPoly2, LaurentPoly2) {
        &self.fwd
    }

    pub fn inverse(&self) -> &(LaurentPoly2, LaurentPoly2) {
        &self.inv
    }
}

fn compose(p: &LaurentPoly2, images: &(LaurentPoly2, LaurentPoly2)) -> Result<LaurentPoly2> {
    let ix = RationalFn2::from_laurent(images.0.clone());
    let iy = RationalFn2::from_laurent(images.1.clone());
    let r = crate::ratfn::subst_laurent(p, &ix, &iy)?;
    r.as_laurent().cloned().ok_or_else(|| {
        Error::NotPolynomial("composition left the Laurent ring".into())
    })
}

/// Pull a field back along an invertible change of coordinates Φ:
/// (Φ*X)(z) = DΦ(z)⁻¹ · X(Φ(z)).
pub fn pullback_automorphism(field: &PlanarField, map: &PolyMap) -> Result<PlanarField> {
    assert!(field.vars() == map.vars(), "variable mismatch in pullback");
    let (f1, f2) = map.forward();
    let j11 = f1.derivative(0);
    let j12 = f1.derivative(1);
    let j21 = f2.derivative(0);
    let j22 = f2.derivative(1);
    let det = j11.mul(&j22).sub(&j12.mul(&j21));
    // the determinant of an invertible change is a unit: a nonzero constant
    // for polynomial automorphisms, a monomial for maps like (1/x, 1/y)
    let det_inv = det.invert().map_err(|_| {
        Error::Domain("the Jacobian determinant is not a unit".into())
    })?;
    let ix = RationalFn2::from_laurent(f1.clone());
    let iy = RationalFn2::from_laurent(f2.clone());
    let pc = field.p().substitute(&ix, &iy)?;
    let qc = field.q().substitute(&ix, &iy)?;
    let adj = ExpPoly::from_laurent(det_inv);
    let new_p = pc
        .mul(&ExpPoly::from_laurent(j22))
        .sub(&qc.mul(&ExpPoly::from_laurent(j12)))
        .mul(&adj);
    let new_q = qc
        .mul(&ExpPoly::from_laurent(j11))
        .sub(&pc.mul(&ExpPoly::from_laurent(j21)))
        .mul(&adj);
    Ok(PlanarField::new(field.vars().clone(), new_p, new_q))
}

// ---- the branched cover H --------------------------------------------------

/// The rational map H(u,v) = (uⁿ, u^{−(m+nℓ)}·(v − u^m·p(uⁿ))) together with
/// its shape data. It conjugates the distinguished families to Riccati form.
#[derive(Clone, Debug, PartialEq)]
pub struct HMap {
    m: i64,
    n: i64,
    ell: i64,
    p: UniPoly,
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl HMap {
    pub fn new(m: i64, n: i64, ell: i64, p: UniPoly) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("the covering degree n must be nonzero".into()));
        }
        if ell < 0 {
            return Err(Error::Domain("the pole order ell must be nonnegative".into()));
        }
        if gcd_i64(m, n) != 1 {
            return Err(Error::Domain(format!(
                "m and n must be coprime (got m={m}, n={n})"
            )));
        }
        if ell == 0 {
            if !p.is_zero() {
                return Err(Error::Domain("p must vanish when ell = 0".into()));
            }
        } else {
            if !p.is_polynomial() {
                return Err(Error::Domain("p must be a polynomial".into()));
            }
            if p.degree().is_none_or(|d| d >= ell) {
                return Err(Error::Domain(format!(
                    "p must be nonzero of degree < ell = {ell}"
                )));
            }
            if p.coeff(0).is_zero() {
                return Err(Error::Domain("p(0) must be nonzero".into()));
            }
        }
        Ok(HMap { m, n, ell, p })
    }

    pub fn m(&self) -> i64 {
        self.m
    }
    pub fn n(&self) -> i64 {
        self.n
    }
    pub fn ell(&self) -> i64 {
        self.ell
    }
    pub fn p(&self) -> &UniPoly {
        &self.p
    }

    /// m + nℓ, the pole order of the second component.
    pub fn weight(&self) -> i64 {
        self.m + self.n * self.ell
    }

    /// The two components as Laurent polynomials in (u, v).
    pub fn components(&self, uv: &Vars) -> (LaurentPoly2, LaurentPoly2) {
        let u_n = LaurentPoly2::monomial(uv.clone(), self.n, 0, c_one());
        // p(u^n) as a polynomial in u
        let p_un = self.p.stretch(self.n).rename(&uv.0).to_bivariate(uv.clone(), 0);
        let v = LaurentPoly2::var(uv.clone(), 1);
        let um = LaurentPoly2::monomial(uv.clone(), self.m, 0, c_one());
        let inner = v.sub(&um.mul(&p_un));
        let h2 = inner.shifted(-self.weight(), 0);
        (u_n, h2)
    }

    /// The section v = u^{m+nℓ}·y + u^m·p(uⁿ) inverting the second component.
    pub fn section_v(&self, uy: &Vars) -> LaurentPoly2 {
        let y = LaurentPoly2::var(uy.clone(), 1);
        let p_un = self.p.stretch(self.n).rename(&uy.0).to_bivariate(uy.clone(), 0);
        let um = LaurentPoly2::monomial(uy.clone(), self.m, 0, c_one());
        y.shifted(self.weight(), 0).add(&um.mul(&p_un))
    }

    /// The invariant monomial-type function R(x,y) = x^m·(x^ℓ·y + p(x))ⁿ as a
    /// rational function; satisfies R∘H = vⁿ.
    pub fn r_function(&self, xy: &Vars) -> Result<RationalFn2> {
        let x = RationalFn2::var(xy.clone(), 0);
        let w = RationalFn2::from_laurent(self.w_poly(xy));
        Ok(x.pow(self.m)?.mul(&w.pow(self.n)?))
    }

    /// x^ℓ·y + p(x), the deformed coordinate.
    pub fn w_poly(&self, xy: &Vars) -> LaurentPoly2 {
        let y = LaurentPoly2::var(xy.clone(), 1);
        let p_x = self.p.rename(&xy.0).to_bivariate(xy.clone(), 0);
        y.shifted(self.ell, 0).add(&p_x)
    }
}

/// Pull a field on the (x,y) chart back through H to the (u,v) chart:
/// (H*X)(u,v) = DH(u,v)⁻¹ · X(H(u,v)).
pub fn pullback_h(field: &PlanarField, h: &HMap, uv: &Vars) -> Result<PlanarField> {
    let (h1, h2) = h.components(uv);
    let j11 = h1.derivative(0); // n u^{n-1}
    let j12 = h1.derivative(1); // 0
    let j21 = h2.derivative(0);
    let j22 = h2.derivative(1); // u^{-(m+nl)}
    let det = j11.mul(&j22).sub(&j12.mul(&j21));
    // the determinant is a monomial in u, hence invertible in the Laurent ring
    let det_inv = det.invert()?;
    let ix = RationalFn2::from_laurent(h1.clone());
    let iy = RationalFn2::from_laurent(h2.clone());
    let pc = field.p().substitute(&ix, &iy)?;
    let qc = field.q().substitute(&ix, &iy)?;
    let adj = ExpPoly::from_laurent(det_inv);
    let new_p = pc
        .mul(&ExpPoly::from_laurent(j22))
        .sub(&qc.mul(&ExpPoly::from_laurent(j12)))
        .mul(&adj);
    let new_q = qc
        .mul(&ExpPoly::from_laurent(j11))
        .sub(&pc.mul(&ExpPoly::from_laurent(j21)))
        .mul(&adj);
    Ok(PlanarField::new(uv.clone(), new_p, new_q))
}

/// Push a field on the (u,v) chart forward through H to the (x,y) chart,
/// when it descends: (H∗W)(H(u,v)) = DH(u,v)·W(u,v). The result must be
/// expressible in x = uⁿ and y; otherwise the field does not descend.
pub fn pushforward_h(field: &PlanarField, h: &HMap, xy: &Vars) -> Result<PlanarField> {
    let uv = field.vars().clone();
    let n = h.n();
    // intermediate chart (u, y): substitute v = u^{m+nl} y + u^m p(u^n)
    let uy = Vars::new(&uv.0, &xy.1);
    let section = h.section_v(&uy);
    let iu = RationalFn2::var(uy.clone(), 0);
    let iv = RationalFn2::from_laurent(section);
    let wu = field.p().substitute(&iu, &iv)?;
    let wv = field.q().substitute(&iu, &iv)?;
    let (h1, h2) = h.components(&uv);
    let d1u = subst_uv_to_uy(&h1.derivative(0), h, &uy)?;
    let d2u = subst_uv_to_uy(&h2.derivative(0), h, &uy)?;
    let d2v = subst_uv_to_uy(&h2.derivative(1), h, &uy)?;
    let p_uy = ExpPoly::from_ratfn(d1u).mul(&wu);
    let q_uy = ExpPoly::from_ratfn(d2u)
        .mul(&wu)
        .add(&ExpPoly::from_ratfn(d2v).mul(&wv));
    let p_xy = collapse_power(&p_uy, n, xy)?;
    let q_xy = collapse_power(&q_uy, n, xy)?;
    Ok(PlanarField::new(xy.clone(), p_xy, q_xy))
}

fn subst_uv_to_uy(p: &LaurentPoly2, h: &HMap, uy: &Vars) -> Result<RationalFn2> {
    let iu = RationalFn2::var(uy.clone(), 0);
    let iv = RationalFn2::from_laurent(h.section_v(uy));
    crate::ratfn::subst_laurent(p, &iu, &iv)
}

/// Rewrite u-exponents as x-exponents via x = uⁿ; every u-exponent must be a
/// multiple of n.
fn collapse_power(f: &ExpPoly, n: i64, xy: &Vars) -> Result<ExpPoly> {
    let mut out = ExpPoly::zero(xy.clone());
    for (e, r) in f.terms() {
        let e2 = collapse_laurent(e, n, xy)?;
        let num = collapse_laurent(r.numerator(), n, xy)?;
        let den = collapse_laurent(r.denominator(), n, xy)?;
        let coeff = RationalFn2::new(num, den)?;
        out = out.add(&ExpPoly::from_ratfn(coeff).mul(&ExpPoly::exp_of(e2)));
    }
    Ok(out)
}

fn collapse_laurent(p: &LaurentPoly2, n: i64, xy: &Vars) -> Result<LaurentPoly2> {
    let mut out = LaurentPoly2::zero(xy.clone());
    for (m, c) in p.terms() {
        if m.a.rem_euclid(n.abs()) != 0 {
            return Err(Error::ShapeMismatch(format!(
                "the field does not descend: exponent {} is not a multiple of {}",
                m.a, n
            )));
        }
        out = out.add(&LaurentPoly2::monomial(xy.clone(), m.a / n, m.b, c.clone()));
    }
    Ok(out)
}

/// Convenience: the constant field scale helper c·X with an integer.
pub fn scale_int(field: &PlanarField, k: i64) -> PlanarField {
    field.scale(&c_int(k))
}
