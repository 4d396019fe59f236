//! First and second integrals, structured Darboux polynomial search, and
//! rational first-integral reconstruction.
//!
//! The Darboux search is deliberately structured: candidate invariant curves
//! are x, y, and the fibre shapes x^ℓ·y + p(x) with deg p < ℓ. For the
//! latter, divisibility of the Lie derivative by the candidate is encoded by
//! substituting the root y = −p(x)/x^ℓ and demanding that the result vanish
//! identically; the coefficients of p enter as unknowns and the resulting
//! exact polynomial system is solved by linear elimination plus the
//! one-variable power rule (κ·uᵉ = 0 ⇒ u = 0). Solution components with
//! remaining free coefficients are represented by the canonical choice of
//! setting the free coefficients to zero. Every candidate that survives is
//! re-verified by exact division, so the output is sound regardless of the
//! solver's completeness.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expr::ExpPoly;
use crate::field::{lie, lie_ratfn, PlanarField};
use crate::num::{c_one, c_zero, CNum, Rat};
use crate::poly::{LaurentPoly2, Vars};
use crate::ratfn::RationalFn2;

/// An invariant algebraic curve h = 0 with its cofactor k: lie(Y,h) = k·h.
#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxCertificate {
    pub h: LaurentPoly2,
    pub k: LaurentPoly2,
}

/// The outcome of testing f against a field Y: whether f is a first
/// integral (Yf = 0), a second integral (Y²f = 0), and — when the split is
/// defined, i.e. Y²f = 0 and Y(y) = 1 — the decomposition f = H·y + G into
/// first integrals H and G.
#[derive(Clone, Debug)]
pub struct SecondIntegralReport {
    pub is_first: bool,
    pub is_second: bool,
    pub hpart: Option<ExpPoly>,
    pub gpart: Option<ExpPoly>,
}

/// True exactly when lie(X, f) canonicalizes to zero.
pub fn is_first_integral(x: &PlanarField, f: &ExpPoly) -> bool {
    lie(x, f).is_zero()
}

/// Evaluate Yf and Y²f exactly and, when applicable, the affine split.
pub fn second_integral_report(y: &PlanarField, f: &ExpPoly) -> SecondIntegralReport {
    let yf = lie(y, f);
    let is_first = yf.is_zero();
    let y2f = lie(y, &yf);
    let is_second = y2f.is_zero();
    let vars = y.vars().clone();
    let ycoord = ExpPoly::var(vars.clone(), 1);
    let mut hpart = None;
    let mut gpart = None;
    if is_second && lie(y, &ycoord) == ExpPoly::one(vars.clone()) {
        let h = yf.clone();
        let g = f.sub(&ycoord.mul(&yf));
        if lie(y, &h).is_zero() && lie(y, &g).is_zero() {
            hpart = Some(h);
            gpart = Some(g);
        }
    }
    SecondIntegralReport { is_first, is_second, hpart, gpart }
}

// ---- structured Darboux search ---------------------------------------------

/// Monomial in the unknown coefficients u_0, …, u_{r−1}.
type UMono = Vec<u16>;
/// Polynomial in the unknowns with exact complex-rational coefficients.
type ParamPoly = BTreeMap<UMono, CNum>;
/// Polynomial in (x, y, unknowns): key (x-exponent, y-exponent, u-monomial).
type TriPoly = BTreeMap<(i64, i64, UMono), CNum>;

fn tri_insert(t: &mut TriPoly, key: (i64, i64, UMono), c: CNum) {
    if c.is_zero() {
        return;
    }
    let entry = t.entry(key).or_insert_with(c_zero);
    *entry = entry.clone() + c;
}

fn tri_normalize(t: TriPoly) -> TriPoly {
    t.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn tri_mul(a: &TriPoly, b: &TriPoly) -> TriPoly {
    let mut out = TriPoly::new();
    for ((ax, ay, au), ac) in a {
        for ((bx, by, bu), bc) in b {
            let mut u = au.clone();
            for (i, e) in bu.iter().enumerate() {
                u[i] += e;
            }
            tri_insert(&mut out, (ax + bx, ay + by, u), ac.clone() * bc.clone());
        }
    }
    tri_normalize(out)
}

fn tri_add(a: &TriPoly, b: &TriPoly) -> TriPoly {
    let mut out = a.clone();
    for (k, c) in b {
        tri_insert(&mut out, k.clone(), c.clone());
    }
    tri_normalize(out)
}

fn tri_from_laurent(p: &LaurentPoly2, r: usize) -> TriPoly {
    let mut out = TriPoly::new();
    for (m, c) in p.terms() {
        tri_insert(&mut out, (m.a, m.b, vec![0; r]), c.clone());
    }
    out
}

fn pp_sub_value(pp: &ParamPoly, var: usize, value: &ParamPoly) -> ParamPoly {
    let mut out = ParamPoly::new();
    for (mono, c) in pp {
        let e = mono[var] as usize;
        let mut rest = mono.clone();
        rest[var] = 0;
        // (value)^e × rest
        let mut pow = ParamPoly::from([(vec![0u16; mono.len()], c_one())]);
        for _ in 0..e {
            pow = pp_mul(&pow, value);
        }
        for (pm, pc) in &pow {
            let mut key = rest.clone();
            for (i, ex) in pm.iter().enumerate() {
                key[i] += ex;
            }
            let entry = out.entry(key).or_insert_with(c_zero);
            *entry = entry.clone() + c.clone() * pc.clone();
        }
    }
    out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn pp_mul(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    let mut out = ParamPoly::new();
    for (am, ac) in a {
        for (bm, bc) in b {
            let mut key = am.clone();
            for (i, e) in bm.iter().enumerate() {
                key[i] += e;
            }
            let entry = out.entry(key).or_insert_with(c_zero);
            *entry = entry.clone() + ac.clone() * bc.clone();
        }
    }
    out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Solve the system {eq = 0} for r unknowns. Returns one solution (the
/// canonical one: free coefficients set to zero), or None when the system is
/// inconsistent or beyond the two elimination rules.
fn solve_param_system(mut eqs: Vec<ParamPoly>, r: usize) -> Option<Vec<CNum>> {
    // recorded substitutions u_i := ParamPoly (in the then-remaining unknowns)
    let mut subs: Vec<(usize, ParamPoly)> = Vec::new();
    let mut resolved = vec![false; r];
    loop {
        eqs.retain(|e| !e.is_empty());
        // inconsistent: a nonzero constant equation
        if eqs
            .iter()
            .any(|e| e.len() == 1 && e.keys().next().unwrap().iter().all(|&x| x == 0))
        {
            return None;
        }
        let mut action: Option<(usize, ParamPoly)> = None;
        // rule 1: a univariate equation that is a perfect power of an affine
        // form, κ·(u − ρ)^e = 0, has the unique root ρ
        'outer: for eq in &eqs {
            let mut used = None;
            let mut single = true;
            for mono in eq.keys() {
                for (i, e) in mono.iter().enumerate() {
                    if *e > 0 {
                        match used {
                            None => used = Some(i),
                            Some(j) if j == i => {}
                            Some(_) => {
                                single = false;
                                break;
                            }
                        }
                    }
                }
                if !single {
                    break;
                }
            }
            let (Some(i), true) = (used, single) else { continue };
            if let Some(root) = affine_power_root(eq, i) {
                let mut value = ParamPoly::new();
                if !root.is_zero() {
                    value.insert(vec![0; r], root);
                }
                action = Some((i, value));
                break 'outer;
            }
        }
        // rule 2: an equation affine-linear in some unknown u_i whose u_i
        // term is a lone degree-one monomial with constant coefficient
        if action.is_none() {
            'search: for eq in &eqs {
                for i in 0..r {
                    if resolved[i] {
                        continue;
                    }
                    let mut lone = vec![0u16; r];
                    lone[i] = 1;
                    let Some(a) = eq.get(&lone) else { continue };
                    // u_i must not occur in any other monomial of eq
                    if eq.keys().any(|m| m != &lone && m[i] > 0) {
                        continue;
                    }
                    let ainv = c_one() / a.clone();
                    let mut rest = ParamPoly::new();
                    for (m, c) in eq {
                        if m == &lone {
                            continue;
                        }
                        rest.insert(m.clone(), -(c.clone() * ainv.clone()));
                    }
                    action = Some((i, rest));
                    break 'search;
                }
            }
        }
        let Some((var, value)) = action else {
            if eqs.is_empty() {
                break;
            }
            return None;
        };
        resolved[var] = true;
        eqs = eqs.iter().map(|e| pp_sub_value(e, var, &value)).collect();
        for (_, pp) in subs.iter_mut() {
            *pp = pp_sub_value(pp, var, &value);
        }
        subs.push((var, value));
    }
    // canonical choice: unresolved unknowns are zero; stored values then
    // reference only unresolved unknowns, so they evaluate to constants
    let mut values = vec![c_zero(); r];
    for (var, pp) in &subs {
        let mut v = c_zero();
        for (mono, c) in pp {
            if mono.iter().all(|&e| e == 0) {
                v += c.clone();
            }
            // monomials with unresolved unknowns evaluate to zero
        }
        values[*var] = v;
    }
    Some(values)
}

/// If the univariate polynomial eq (in unknown i) equals κ·(u_i − ρ)^e for
/// some κ ≠ 0, return ρ — its unique root, necessarily complex-rational.
fn affine_power_root(eq: &ParamPoly, i: usize) -> Option<CNum> {
    let coeff_at = |j: u16| -> CNum {
        let mut mono = vec![0u16; eq.keys().next().map(|m| m.len()).unwrap_or(0)];
        mono[i] = j;
        eq.get(&mono).cloned().unwrap_or_else(c_zero)
    };
    let e = eq.keys().map(|m| m[i]).max()?;
    if e == 0 {
        return None;
    }
    let top = coeff_at(e);
    if top.is_zero() {
        return None;
    }
    if eq.len() == 1 {
        // κ·u^e
        return Some(c_zero());
    }
    // candidate ρ from the subleading coefficient: κ·e·(−ρ) = f_{e−1}
    let minus_rho = coeff_at(e - 1) / (top.clone() * crate::num::c_int(e as i64));
    let rho = -minus_rho;
    // verify the binomial expansion κ·Σ C(e,j)(−ρ)^{e−j} u^j
    let mut binom = CNum::from(Rat::from_integer(1.into()));
    let mut expected = vec![c_zero(); e as usize + 1];
    let mut rho_pow = CNum::from(Rat::from_integer(1.into()));
    // C(e, e−t) and (−ρ)^t for t = 0..e, filled from the top down
    for t in 0..=e {
        let j = e - t;
        expected[j as usize] = top.clone() * binom.clone() * rho_pow.clone();
        if t < e {
            let num = crate::num::c_int((e - t) as i64);
            let den = crate::num::c_int((t + 1) as i64);
            binom = binom * num / den;
            rho_pow *= -rho.clone();
        }
    }
    for (j, want) in expected.iter().enumerate() {
        if &coeff_at(j as u16) != want {
            return None;
        }
    }
    Some(rho)
}

fn certificate_for(p: &LaurentPoly2, q: &LaurentPoly2, h: &LaurentPoly2) -> Option<DarbouxCertificate> {
    let l = p.mul(&h.derivative(0)).add(&q.mul(&h.derivative(1)));
    if l.is_zero() {
        return Some(DarbouxCertificate { h: h.clone(), k: LaurentPoly2::zero(h.vars().clone()) });
    }
    l.div_exact(h).map(|k| DarbouxCertificate { h: h.clone(), k })
}

/// Search for invariant curves of the shapes x, y, and x^ℓ·y + p(x) with
/// deg p < ℓ for 1 ≤ ℓ ≤ lmax. Every returned certificate is re-verified
/// by exact division.
pub fn darboux_structured(y: &PlanarField, lmax: i64) -> Result<Vec<DarbouxCertificate>> {
    let Some((p, q)) = y.as_laurent() else {
        return Err(Error::Unsupported(
            "the Darboux search needs a field with polynomial components".into(),
        ));
    };
    if !p.is_polynomial() || !q.is_polynomial() {
        return Err(Error::Unsupported(
            "the Darboux search needs a field with polynomial components".into(),
        ));
    }
    if p.is_zero() && q.is_zero() {
        return Err(Error::Domain("the zero field is excluded".into()));
    }
    let vars = y.vars().clone();
    let mut out = Vec::new();
    for h in [LaurentPoly2::var(vars.clone(), 0), LaurentPoly2::var(vars.clone(), 1)] {
        if let Some(cert) = certificate_for(&p, &q, &h) {
            out.push(cert);
        }
    }
    for ell in 1..=lmax.max(0) {
        if let Some(h) = solve_fibre_shape(&p, &q, &vars, ell) {
            if out.iter().any(|c| c.h == h) {
                continue;
            }
            if let Some(cert) = certificate_for(&p, &q, &h) {
                out.push(cert);
            }
        }
    }
    Ok(out)
}

/// Set up and solve the root-substitution system for h = x^ℓ·y + p(x).
fn solve_fibre_shape(
    p: &LaurentPoly2,
    q: &LaurentPoly2,
    vars: &Vars,
    ell: i64,
) -> Option<LaurentPoly2> {
    let r = ell as usize; // unknowns u_0 … u_{ℓ−1} = coefficients of p(x)
    let tp = tri_from_laurent(p, r);
    let tq = tri_from_laurent(q, r);
    // p̃ and p̃′ in unknown form
    let mut ptilde = TriPoly::new();
    let mut ptilde_d = TriPoly::new();
    for d in 0..r {
        let mut mono = vec![0u16; r];
        mono[d] = 1;
        tri_insert(&mut ptilde, (d as i64, 0, mono.clone()), c_one());
        if d > 0 {
            tri_insert(&mut ptilde_d, (d as i64 - 1, 0, mono), crate::num::c_int(d as i64));
        }
    }
    // lie(Y, h) = P·(ℓ·x^{ℓ−1}·y + p̃′) + Q·x^ℓ
    let mut hx = ptilde_d.clone();
    tri_insert(&mut hx, (ell - 1, 1, vec![0; r]), crate::num::c_int(ell));
    let mut xl = TriPoly::new();
    tri_insert(&mut xl, (ell, 0, vec![0; r]), c_one());
    let l = tri_add(&tri_mul(&tp, &hx), &tri_mul(&tq, &xl));
    if l.is_empty() {
        // lie vanishes identically for every p: canonical choice p = 0
        return Some(LaurentPoly2::var(vars.clone(), 1).shifted(ell, 0));
    }
    // substitute y = −p̃/x^ℓ and clear x^{ℓ·J}
    let jmax = l.keys().map(|(_, b, _)| *b).max().unwrap();
    let mut neg_p_pow: Vec<TriPoly> = Vec::with_capacity(jmax as usize + 1);
    let one_tri = TriPoly::from([((0i64, 0i64, vec![0u16; r]), c_one())]);
    neg_p_pow.push(one_tri);
    let minus_p: TriPoly = ptilde.iter().map(|(k, c)| (k.clone(), -c.clone())).collect();
    for j in 1..=jmax as usize {
        let next = tri_mul(&neg_p_pow[j - 1], &minus_p);
        neg_p_pow.push(next);
    }
    let mut n = TriPoly::new();
    for ((a, b, u), c) in &l {
        let shift = ell * (jmax - b);
        for ((pa, _, pu), pc) in &neg_p_pow[*b as usize] {
            let mut uu = u.clone();
            for (i, e) in pu.iter().enumerate() {
                uu[i] += e;
            }
            tri_insert(&mut n, (a + pa + shift, 0, uu), c.clone() * pc.clone());
        }
    }
    let n = tri_normalize(n);
    // group by x-degree into equations over the unknowns
    let mut eqs: BTreeMap<i64, ParamPoly> = BTreeMap::new();
    for ((a, _, u), c) in n {
        let entry = eqs.entry(a).or_default();
        let slot = entry.entry(u).or_insert_with(c_zero);
        *slot = slot.clone() + c;
    }
    let eqs: Vec<ParamPoly> = eqs
        .into_values()
        .map(|e| e.into_iter().filter(|(_, c)| !c.is_zero()).collect::<ParamPoly>())
        .collect();
    let values = solve_param_system(eqs, r)?;
    let mut h = LaurentPoly2::var(vars.clone(), 1).shifted(ell, 0);
    for (d, v) in values.into_iter().enumerate() {
        h = h.add(&LaurentPoly2::monomial(vars.clone(), d as i64, 0, v));
    }
    Some(h)
}

// ---- rational first integral reconstruction --------------------------------

fn big_gcd(mut a: BigInt, mut b: BigInt) -> BigInt {
    while !b.is_zero() {
        let t = a.clone() % b.clone();
        a = b;
        b = t;
    }
    a.abs()
}

/// Exact kernel basis of the column space relation Σ αᵢ·colᵢ = 0, computed
/// by Gaussian elimination over the rationals. Basis vectors correspond to
/// the free columns in ascending order.
fn rational_kernel(mut rows: Vec<Vec<Rat>>, ncols: usize) -> Vec<Vec<Rat>> {
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(rix) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, rix);
        let inv = rows[rank][col].clone().recip();
        for x in rows[rank].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (dst, pv) in row.iter_mut().zip(pivot_row.iter()) {
                    *dst = dst.clone() - f.clone() * pv.clone();
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::from_integer(1.into());
        for col in 0..ncols {
            if let Some(prow) = pivot_of_col[col] {
                v[col] = -rows[prow][free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

fn primitive_integer_vector(v: &[Rat]) -> Option<Vec<i64>> {
    let mut scale = BigInt::from(1);
    for x in v {
        let d = x.denom().clone();
        let g = big_gcd(scale.clone(), d.clone());
        scale *= d / g;
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&scale / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = big_gcd(g, x.clone());
    }
    if g.is_zero() {
        return None;
    }
    let mut ints: Vec<BigInt> = ints.into_iter().map(|x| x / g.clone()).collect();
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in ints.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    ints.into_iter().map(|x| x.to_i64()).collect()
}

/// Combine verified certificates into a rational first integral R = Π hᵢ^{αᵢ}
/// by solving Σ αᵢ·kᵢ = 0 exactly; the first primitive kernel vector that
/// verifies wins. Returns None when the cofactors admit no relation.
pub fn rational_first_integral(
    y: &PlanarField,
    certs: &[DarbouxCertificate],
) -> Result<Option<RationalFn2>> {
    if certs.is_empty() {
        return Ok(None);
    }
    let vars = certs[0].h.vars().clone();
    // rows: for each monomial appearing in any cofactor, its real and
    // imaginary coefficient parts across the certificates
    let mut monomials = std::collections::BTreeSet::new();
    for c in certs {
        for (m, _) in c.k.terms() {
            monomials.insert(*m);
        }
    }
    let mut rows = Vec::new();
    for m in &monomials {
        let mut re_row = Vec::with_capacity(certs.len());
        let mut im_row = Vec::with_capacity(certs.len());
        for c in certs {
            let coeff = c.k.coeff(m.a, m.b);
            re_row.push(coeff.re.clone());
            im_row.push(coeff.im.clone());
        }
        rows.push(re_row);
        rows.push(im_row);
    }
    if rows.is_empty() {
        // all cofactors vanish: every certificate is itself a first integral
        let r = RationalFn2::from_laurent(certs[0].h.clone());
        return Ok(Some(r));
    }
    let basis = rational_kernel(rows, certs.len());
    for v in &basis {
        let Some(alpha) = primitive_integer_vector(v) else { continue };
        let mut r = RationalFn2::one(vars.clone());
        for (c, a) in certs.iter().zip(&alpha) {
            if *a == 0 {
                continue;
            }
            r = r.mul(&RationalFn2::from_laurent(c.h.clone()).pow(*a)?);
        }
        if r.is_constant() {
            continue;
        }
        if lie_ratfn(y, &r).is_zero() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}
