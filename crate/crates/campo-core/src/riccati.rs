//! Chart normal forms over the branched cover and the one-form of times.
//!
//! Through the cover H the distinguished fields take the shape
//! u^k·(a(v)·u ∂u + c(v) ∂v). This module extracts that shape from a plane
//! field, contracts the reduced differential of R = x^m(x^ℓy+p)^n against a
//! field and factors the result into its rigid product form, assembles the
//! global one-form of times, evaluates the exponent identity for k, and
//! reconstructs the plane field from chart data.

use crate::error::{Error, Result};
use crate::expr::ExpPoly;
use crate::field::{
    has_isolated_singularities, pullback_h, pushforward_h, HMap, PlanarField,
};
use crate::num::{c_int, CNum};
use crate::poly::{gcd2, pow_cnum, LaurentPoly2, Vars};
use crate::ratfn::{subst_laurent, RationalFn2};
use crate::unipoly::UniPoly;
use num_traits::Zero;

/// The chart shape of a field through H: H*Y = u^k·(a(v)·u ∂u + c(v) ∂v).
#[derive(Clone, Debug, PartialEq)]
pub struct UVForm {
    pub k: i64,
    pub a: UniPoly,
    pub c: UniPoly,
    pub h: HMap,
}

impl UVForm {
    /// c(v) as a monomial c·v^N, when it is one.
    pub fn c_monomial(&self) -> Option<(CNum, i64)> {
        let mut it = self.c.terms();
        let (e, coeff) = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some((coeff.clone(), *e))
    }

    /// The field u^k·(a(v)·u ∂u + c(v) ∂v) on the chart.
    pub fn chart_field(&self, uv: &Vars) -> PlanarField {
        let av = self.a.rename(&uv.1).to_bivariate(uv.clone(), 1);
        let cv = self.c.rename(&uv.1).to_bivariate(uv.clone(), 1);
        PlanarField::from_laurent(
            uv.clone(),
            av.shifted(self.k + 1, 0),
            cv.shifted(self.k, 0),
        )
    }
}

/// η(Y) = scale · x^α · (x^ℓy+p)^β · (x^m(x^ℓy+p)^n − s)^γ exactly when
/// n > 0; for n < 0 the last factor reads (x^m − s·(x^ℓy+p)^{−n}).
#[derive(Clone, Debug, PartialEq)]
pub struct EtaShape {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    /// The displaced fibre value; present exactly when γ > 0, and nonzero.
    pub s: Option<CNum>,
    /// The one constant the factorization is defined up to.
    pub scale: CNum,
}

/// The global one-form of times τ = [x(x^ℓy+p)/(f·η(Y))]·dR/R, stored as an
/// exact scalar quotient over the base one-form dR/R.
#[derive(Clone, Debug)]
pub struct TimeForm {
    /// x·(x^ℓy + p), the numerator of the scalar coefficient.
    pub coeff_num: LaurentPoly2,
    /// f·η(Y), the denominator of the scalar coefficient.
    pub coeff_den: ExpPoly,
    /// The dx-coefficient of dR/R.
    pub base_dx: RationalFn2,
    /// The dy-coefficient of dR/R.
    pub base_dy: RationalFn2,
}

/// Pull a polynomial field with isolated singularities back through H and
/// match it against u^k·(a(v)·u ∂u + c(v) ∂v).
pub fn extract_uv_form(y: &PlanarField, h: &HMap) -> Result<UVForm> {
    if !y.is_polynomial() {
        return Err(Error::NotPolynomial(
            "the chart extraction needs a polynomial field".into(),
        ));
    }
    if !has_isolated_singularities(y)? {
        return Err(Error::Domain(
            "the chart extraction needs a field with isolated singularities".into(),
        ));
    }
    let uv = Vars::uv();
    let chart = pullback_h(y, h, &uv)?;
    let (pp, qq) = chart.as_laurent().ok_or_else(|| {
        Error::NotRiccati("the pullback does not have Laurent components".into())
    })?;
    let k = match (pp.is_zero(), qq.is_zero()) {
        (true, true) => unreachable!("isolated singularities exclude the zero field"),
        (false, true) => uniform_u_power(&pp, "u")? - 1,
        (true, false) => uniform_u_power(&qq, "v")?,
        (false, false) => {
            let kp = uniform_u_power(&pp, "u")? - 1;
            let kq = uniform_u_power(&qq, "v")?;
            if kp != kq {
                return Err(Error::NotRiccati(format!(
                    "the u-powers disagree: the u component carries u^{}, the v component u^{}",
                    kp + 1,
                    kq
                )));
            }
            kp
        }
    };
    Ok(UVForm {
        k,
        a: collect_v(&pp, &uv),
        c: collect_v(&qq, &uv),
        h: h.clone(),
    })
}

/// The single u-exponent shared by every term, or a shape error naming the
/// component that mixes powers of u.
fn uniform_u_power(p: &LaurentPoly2, component: &str) -> Result<i64> {
    let mut power = None;
    for (mo, _) in p.terms() {
        match power {
            None => power = Some(mo.a),
            Some(k) if k == mo.a => {}
            Some(_) => {
                return Err(Error::NotRiccati(format!(
                    "the {component} component depends on u after factoring its u-power"
                )));
            }
        }
    }
    power.ok_or_else(|| Error::NotRiccati(format!("the {component} component vanishes")))
}

fn collect_v(p: &LaurentPoly2, uv: &Vars) -> UniPoly {
    let mut out = UniPoly::zero(&uv.1);
    for (mo, c) in p.terms() {
        out.add_term(mo.b, c.clone());
    }
    out
}

/// The reduced coefficients (A, B) of η = A dx + B dy: the differential of R
/// with its codimension-one zeros and poles removed. A and B are coprime
/// polynomials; the removed gcd is taken monic, so the pair is canonical.
pub fn eta_one_form(h: &HMap, vars: &Vars) -> Result<(LaurentPoly2, LaurentPoly2)> {
    let r = h.r_function(vars)?;
    let rx = r.derivative(0);
    let ry = r.derivative(1);
    let a0 = rx.numerator().mul(ry.denominator());
    let b0 = ry.numerator().mul(rx.denominator());
    if a0.is_zero() && b0.is_zero() {
        return Err(Error::Domain("dR vanishes identically".into()));
    }
    let g = gcd2(&a0, &b0);
    let a = a0.div_exact(&g).expect("the gcd divides both coefficients");
    let b = b0.div_exact(&g).expect("the gcd divides both coefficients");
    Ok((a, b))
}

/// Contract η against a polynomial field with isolated singularities and
/// factor the resulting polynomial into the rigid product shape.
pub fn eta_contraction(y: &PlanarField, h: &HMap) -> Result<(LaurentPoly2, EtaShape)> {
    let eta_y = contract_eta(y, h)?;
    let shape = factor_eta(&eta_y, h, y.vars())?;
    Ok((eta_y, shape))
}

fn contract_eta(y: &PlanarField, h: &HMap) -> Result<LaurentPoly2> {
    let Some((p, q)) = y.as_laurent() else {
        return Err(Error::NotPolynomial(
            "the contraction needs a polynomial field".into(),
        ));
    };
    if !p.is_polynomial() || !q.is_polynomial() {
        return Err(Error::NotPolynomial(
            "the contraction needs a polynomial field".into(),
        ));
    }
    if !has_isolated_singularities(y)? {
        return Err(Error::Domain(
            "the contraction needs a field with isolated singularities".into(),
        ));
    }
    let (a, b) = eta_one_form(h, y.vars())?;
    let eta_y = a.mul(&p).add(&b.mul(&q));
    if eta_y.is_zero() {
        return Err(Error::Domain(
            "the contraction vanishes: R is a rational first integral of the field".into(),
        ));
    }
    Ok(eta_y)
}

fn shape_err(detail: &str) -> Error {
    Error::ShapeMismatch(format!(
        "the contraction does not factor as x^a*(x^l*y+p)^b*(R-s)^g: {detail}"
    ))
}

fn factor_eta(eta_y: &LaurentPoly2, h: &HMap, vars: &Vars) -> Result<EtaShape> {
    let (m, n) = (h.m(), h.n());
    if m < 0 {
        return Err(Error::Unsupported(
            "a negative x-exponent in R is outside the factored forms".into(),
        ));
    }
    let x = LaurentPoly2::var(vars.clone(), 0);
    let w = h.w_poly(vars);
    let mut rest = eta_y.clone();
    let mut alpha = 0i64;
    while let Some(qt) = rest.div_exact(&x) {
        rest = qt;
        alpha += 1;
    }
    let mut beta = 0i64;
    while let Some(qt) = rest.div_exact(&w) {
        rest = qt;
        beta += 1;
    }
    if let Some(scale) = rest.constant_value() {
        let shape = EtaShape { alpha, beta, gamma: 0, s: None, scale };
        verify_shape(eta_y, h, vars, &shape)?;
        return Ok(shape);
    }
    // The residue must be scale·(R − s)^γ. On the chart R becomes vⁿ, so the
    // residue must land in the fibre coordinate alone (up to the single
    // u-power the n < 0 form carries).
    let uv = Vars::uv();
    let (h1, h2) = h.components(&uv);
    let img = subst_laurent(
        &rest,
        &RationalFn2::from_laurent(h1),
        &RationalFn2::from_laurent(h2),
    )?;
    let img = img
        .as_laurent()
        .cloned()
        .ok_or_else(|| shape_err("the residue is not Laurent on the chart"))?;
    let mut upow = None;
    let mut uni = UniPoly::zero(&uv.1);
    for (mo, c) in img.terms() {
        match upow {
            None => upow = Some(mo.a),
            Some(k) if k == mo.a => {}
            Some(_) => return Err(shape_err("the residue depends on u on the chart")),
        }
        uni.add_term(mo.b, c.clone());
    }
    let upow = upow.expect("a nonconstant residue has terms");
    let nn = n.abs();
    let mut tpoly = UniPoly::zero("t");
    for (e, c) in uni.terms() {
        if *e < 0 || *e % nn != 0 {
            return Err(shape_err("the residue is not a polynomial in R"));
        }
        tpoly.add_term(*e / nn, c.clone());
    }
    let gamma = tpoly.degree().expect("the residue is nonzero");
    if gamma < 1 {
        return Err(shape_err("the residue is constant on the chart but not in the plane"));
    }
    // With t = vⁿ: scale·(t − s)^γ when n > 0, scale·(1 − s·t)^γ when n < 0.
    let (scale, s) = if n > 0 {
        let lead = tpoly.coeff(gamma);
        let s = -tpoly.coeff(gamma - 1) / (c_int(gamma) * lead.clone());
        for t in 0..=gamma {
            let expect = lead.clone() * binom(gamma, t) * pow_cnum(&(-s.clone()), gamma - t);
            if tpoly.coeff(t) != expect {
                return Err(shape_err("the residue is not a power of one displaced fibre"));
            }
        }
        (lead, s)
    } else {
        let head = tpoly.coeff(0);
        if head.is_zero() {
            return Err(shape_err("the residue vanishes on the zero fibre"));
        }
        let s = -tpoly.coeff(1) / (c_int(gamma) * head.clone());
        for t in 0..=gamma {
            let expect = head.clone() * binom(gamma, t) * pow_cnum(&(-s.clone()), t);
            if tpoly.coeff(t) != expect {
                return Err(shape_err("the residue is not a power of one displaced fibre"));
            }
        }
        (head, s)
    };
    if s.is_zero() {
        return Err(shape_err("the displaced fibre value s must be nonzero"));
    }
    let expected_upow = if n > 0 { 0 } else { m * n * gamma };
    if upow != expected_upow {
        return Err(shape_err("the residue carries the wrong power of u"));
    }
    let shape = EtaShape { alpha, beta, gamma, s: Some(s), scale };
    verify_shape(eta_y, h, vars, &shape)?;
    Ok(shape)
}

/// Reassemble the factored form and compare with the contraction exactly.
fn verify_shape(eta_y: &LaurentPoly2, h: &HMap, vars: &Vars, shape: &EtaShape) -> Result<()> {
    let x = LaurentPoly2::var(vars.clone(), 0);
    let w = h.w_poly(vars);
    let mut acc = x
        .pow(shape.alpha)?
        .mul(&w.pow(shape.beta)?)
        .scale(&shape.scale);
    if shape.gamma > 0 {
        let s = shape.s.clone().expect("gamma > 0 carries s");
        let factor = if h.n() > 0 {
            let r = x.pow(h.m())?.mul(&w.pow(h.n())?);
            r.sub(&LaurentPoly2::constant(vars.clone(), s))
        } else {
            x.pow(h.m())?.sub(&w.pow(-h.n())?.scale(&s))
        };
        acc = acc.mul(&factor.pow(shape.gamma)?);
    }
    if &acc != eta_y {
        return Err(shape_err("the factored form does not reassemble the contraction"));
    }
    Ok(())
}

fn binom(n: i64, k: i64) -> CNum {
    let mut acc = c_int(1);
    for t in 0..k {
        acc = acc * c_int(n - t) / c_int(t + 1);
    }
    acc
}

/// Build the global one-form of times for X = f·Y.
pub fn time_form(f: &ExpPoly, y: &PlanarField, h: &HMap) -> Result<TimeForm> {
    if f.is_zero() {
        return Err(Error::Domain("the scalar factor f must be nonzero".into()));
    }
    let vars = y.vars().clone();
    let eta_y = contract_eta(y, h)?;
    let x = LaurentPoly2::var(vars.clone(), 0);
    let r = h.r_function(&vars)?;
    let rinv = r.inv()?;
    Ok(TimeForm {
        coeff_num: x.mul(&h.w_poly(&vars)),
        coeff_den: f.mul(&ExpPoly::from_laurent(eta_y)),
        base_dx: r.derivative(0).mul(&rinv),
        base_dy: r.derivative(1).mul(&rinv),
    })
}

/// Contract τ with X and compare against 1, cross-multiplied to stay exact:
/// x·(x^ℓy+p) · (dR/R)(X) must equal f·η(Y).
pub fn verify_time_contraction(tau: &TimeForm, x: &PlanarField) -> bool {
    let base = x
        .p()
        .mul_ratfn(&tau.base_dx)
        .add(&x.q().mul_ratfn(&tau.base_dy));
    base.mul(&ExpPoly::from_laurent(tau.coeff_num.clone())) == tau.coeff_den
}

/// The exponent identity k = n(α−1) − m(N−1), valid under the standing
/// reduction γ = 0, β = N.
pub fn solve_k(shape: &EtaShape, h: &HMap, big_n: i64) -> Result<i64> {
    if shape.gamma != 0 {
        return Err(Error::Domain(
            "the exponent identity assumes gamma = 0".into(),
        ));
    }
    if shape.beta != big_n {
        return Err(Error::Domain(format!(
            "the exponent identity assumes beta = N (got beta = {}, N = {})",
            shape.beta, big_n
        )));
    }
    Ok(h.n() * (shape.alpha - 1) - h.m() * (big_n - 1))
}

/// Reconstruct the plane field from chart data by pushing
/// u^k·(a(v)·u ∂u + c(v) ∂v) forward through H, checking the divisibility
/// side conditions first and the polynomial/isolated-singularity shape
/// of the result after.
pub fn build_y_from_uv(form: &UVForm) -> Result<PlanarField> {
    let h = &form.h;
    let (m, n, ell) = (h.m(), h.n(), h.ell());
    let Some((_, big_n)) = form.c_monomial() else {
        return Err(Error::Domain(
            "c(v) must be a nonzero monomial c*v^N; a degenerate fibre component leaves no field with isolated singularities".into(),
        ));
    };
    if big_n < 0 {
        return Err(Error::Domain("the fibre exponent N must be nonnegative".into()));
    }
    if big_n >= 1 {
        if form.k % n != 0 {
            return Err(Error::Domain(format!(
                "k must be divisible by n (got k = {}, n = {})",
                form.k, n
            )));
        }
        if (big_n - 1) % n != 0 {
            return Err(Error::Domain(format!(
                "N - 1 must be divisible by n (got N = {big_n}, n = {n})"
            )));
        }
        if !form.a.is_polynomial() || form.a.coeff(0).is_zero() {
            return Err(Error::Domain(
                "a(0) must be nonzero when N >= 1; the field would not have isolated singularities".into(),
            ));
        }
    } else {
        if form.k != m + n * ell {
            return Err(Error::Domain(format!(
                "with N = 0, k must equal m + n*l = {} (got k = {})",
                m + n * ell,
                form.k
            )));
        }
        for (e, _) in form.a.terms() {
            if *e < -1 || (*e + 1) % n != 0 {
                return Err(Error::Domain(
                    "with N = 0, a must lie in (1/v)*C[v^n]".into(),
                ));
            }
        }
    }
    let uv = Vars::uv();
    let chart = form.chart_field(&uv);
    let y = pushforward_h(&chart, h, &Vars::xy())?;
    if !y.is_polynomial() {
        return Err(Error::NotPolynomial(
            "the reconstructed field is not polynomial".into(),
        ));
    }
    if !has_isolated_singularities(&y)? {
        return Err(Error::Domain(
            "the reconstructed field has non-isolated singularities".into(),
        ));
    }
    Ok(y)
}
