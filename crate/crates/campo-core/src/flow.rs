//! Complex-time flows of the classified complete fields.
//!
//! Three layers live here:
//!
//! * closed-form flow evaluators built per family ([`ExactFlow`],
//!   [`exact_flow`]),
//! * an adaptive Dormand–Prince 5(4) integrator over piecewise-linear
//!   complex-time paths ([`numeric_flow`]),
//! * a ray probe that searches for finite-time blow-up ([`completeness_probe`]).
//!
//! Unlike the symbolic layers of this crate, everything here is honest
//! floating point: no exactness is ever claimed for a flow value. Closed
//! forms fix all branch choices at construction time — chart lifts use the
//! principal n-th root, and initial points within [`CHART_EXCLUSION`] of the
//! branch locus x = 0 are refused outright rather than continued through a
//! cut. The formulas themselves are built from exponentials of entire
//! functions of t, so once a lift is fixed no further branch decisions occur
//! along any segment.

use crate::error::{Error, Result};
use crate::expr::ExpPoly;
use crate::family::FamilySpec;
use crate::field::{lie, PlanarField};
use crate::num::{c_int, c_one, c_to_f64, CNum};
use crate::poly::{pow_c64, LaurentPoly2, Vars};
use crate::ratfn::RationalFn2;
use crate::unipoly::UniPoly;
use num_complex::Complex64;

pub type C64 = Complex64;

/// A trajectory coordinate beyond this radius counts as numerical blow-up.
pub const BLOWUP_RADIUS: f64 = 1e12;
/// Steps below this fraction of the current segment abort the integration.
pub const MIN_STEP_FRACTION: f64 = 1e-14;
/// A starved step with the state already outside this ball is classified as
/// blow-up: near a pole the step size collapses in proportion to the
/// remaining distance, so the starvation is caused by the escape itself and
/// can starve out slightly before the trajectory crosses [`BLOWUP_RADIUS`].
pub const ESCAPE_RADIUS: f64 = 1e6;
/// Error control is relative with a small absolute floor: component scales
/// are tol·(ATOL_FLOOR + max(|z|, |z'|)). A pure absolute floor of size tol
/// would let tiny components carry errors that larger coordinates amplify.
const ATOL_FLOOR: f64 = 1e-6;
/// Chart lifts (principal n-th roots) are refused within this distance of
/// the branch point x = 0.
pub const CHART_EXCLUSION: f64 = 1e-12;

/// Hard cap on accepted integration steps per segment; crossing it is
/// reported as step underflow (the controller failed to make progress).
const MAX_STEPS: usize = 2_000_000;

/// A point of C² in floating-point coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CPoint {
    pub x: C64,
    pub y: C64,
}

impl CPoint {
    pub fn new(x: C64, y: C64) -> Self {
        CPoint { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// max(|x|, |y|).
    pub fn sup_norm(&self) -> f64 {
        self.x.norm().max(self.y.norm())
    }
}

/// Terminal state of a numeric trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowStatus {
    /// The whole path was traversed; every recorded sample is finite.
    Completed,
    /// A coordinate left the ball of radius [`BLOWUP_RADIUS`] at time `at`,
    /// or the stepper starved outside the ball of radius [`ESCAPE_RADIUS`]
    /// while chasing the escape.
    Blowup { at: C64 },
    /// The step size fell below [`MIN_STEP_FRACTION`] of the segment at
    /// time `at` with the trajectory still inside the escape ball.
    StepUnderflow { at: C64 },
}

/// A sampled complex-time trajectory.
///
/// `times[i]` is the complex time of sample `points[i]`; `points[0]` is the
/// initial point at the first path node. When `status` is `Completed`,
/// every sample is finite.
#[derive(Clone, Debug)]
pub struct FlowTrace {
    /// The requested piecewise-linear time path (its nodes).
    pub path: Vec<C64>,
    /// Complex time of each accepted sample.
    pub times: Vec<C64>,
    /// One sample per accepted step, starting with the initial point.
    pub points: Vec<CPoint>,
    pub status: FlowStatus,
    /// Max relative drift of the supplied invariant along the samples;
    /// `None` when no invariant was supplied.
    pub conserved_drift: Option<f64>,
}

fn json_c(z: C64) -> String {
    format!("[{:?},{:?}]", z.re, z.im)
}

impl FlowTrace {
    /// One JSON object per line: each sample as
    /// `{"t":[re,im],"x":[re,im],"y":[re,im]}`, then a final status record.
    pub fn json_lines(&self) -> String {
        let mut out = String::new();
        for (t, p) in self.times.iter().zip(&self.points) {
            out.push_str(&format!(
                "{{\"t\":{},\"x\":{},\"y\":{}}}\n",
                json_c(*t),
                json_c(p.x),
                json_c(p.y)
            ));
        }
        let mut tail = match self.status {
            FlowStatus::Completed => "{\"status\":\"completed\"".to_string(),
            FlowStatus::Blowup { at } => {
                format!("{{\"status\":\"blowup\",\"at\":{}", json_c(at))
            }
            FlowStatus::StepUnderflow { at } => {
                format!("{{\"status\":\"step-underflow\",\"at\":{}", json_c(at))
            }
        };
        if let Some(d) = self.conserved_drift {
            tail.push_str(&format!(",\"conserved_drift\":{d:?}"));
        }
        tail.push_str("}\n");
        out.push_str(&tail);
        out
    }
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Precomputed closed-form flow data. All constants are fixed at
/// construction; evaluation at a time t never fails (it may overflow to
/// non-finite values, which the caller can detect on the returned point).
#[derive(Clone, Debug)]
enum Closed {
    /// x ≡ x₀, y' = a(x₀)·y + b(x₀).
    Linear1d { x0: C64, y0: C64, a0: C64, b0: C64 },
    /// x = x₀·e^{λt}, y = e^{λmt}·(y₀ + x₀^m·t).
    Shear { x0: C64, y0: C64, lambda: C64, m: i64 },
    /// x = x₀·e^{lx·t}, w = w₀·e^{lw·t}, y recovered from (x, w).
    Exponential { x0: C64, w0: C64, lx: C64, lw: C64, ell: i64, p: UniPoly },
    /// Chart flow v(t) = v₀ + vel·t on the invariant level W = winv:
    /// u(t) = winv·e^{q(v(t))·cinv}, pushed forward through H.
    Chart {
        winv: C64,
        v0: C64,
        vel: C64,
        cinv: C64,
        q: UniPoly,
        n: i64,
        m: i64,
        ell: i64,
        p: UniPoly,
    },
    /// x(s), w(s) = (x₀·e^{n·I(s)}, w₀·e^{a·s − m·I(s)}) where
    /// I(s) = lin·s + Σ ampᵢ·(e^{rateᵢ·s} − 1) integrates the radial factor.
    Twisted {
        x0: C64,
        w0: C64,
        nf: f64,
        mf: f64,
        a: C64,
        lin: C64,
        pieces: Vec<(C64, C64)>,
        ell: i64,
        p: UniPoly,
    },
    /// x(s) = x₀ + c·s (drift = true) or x₀·e^{c·s} (drift = false),
    /// y(s) = y₀·e^{K(s)} with K the path integral of the monomial list.
    Path1d {
        x0: C64,
        y0: C64,
        c: C64,
        drift: bool,
        mono: Vec<(i64, C64)>,
    },
    /// Time substitution z(t) = base(s(t)), s' = g₀ + σ₀·s, s(0) = 0.
    Reparam { g0: C64, sigma0: C64, base: Box<Closed> },
}

fn recover_y(x: C64, w: C64, ell: i64, p: &UniPoly) -> C64 {
    if ell == 0 && p.is_zero() {
        w
    } else {
        (w - eval_uni(p, x)) * pow_c64(x, -ell)
    }
}

fn eval_uni(p: &UniPoly, z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (e, c) in p.terms() {
        acc += c_to_f64(c) * pow_c64(z, *e);
    }
    acc
}

fn eval_closed(kind: &Closed, t: C64) -> CPoint {
    match kind {
        Closed::Linear1d { x0, y0, a0, b0 } => {
            let y = if a0.norm() == 0.0 {
                y0 + b0 * t
            } else {
                let e = (a0 * t).exp();
                y0 * e + b0 * (e - 1.0) / a0
            };
            CPoint::new(*x0, y)
        }
        Closed::Shear { x0, y0, lambda, m } => {
            let x = x0 * (lambda * t).exp();
            let y = (lambda * (*m as f64) * t).exp() * (y0 + pow_c64(*x0, *m) * t);
            CPoint::new(x, y)
        }
        Closed::Exponential { x0, w0, lx, lw, ell, p } => {
            let x = x0 * (lx * t).exp();
            let w = w0 * (lw * t).exp();
            CPoint::new(x, recover_y(x, w, *ell, p))
        }
        Closed::Chart { winv, v0, vel, cinv, q, n, m, ell, p } => {
            let v = v0 + vel * t;
            let u = winv * (eval_uni(q, v) * cinv).exp();
            let x = pow_c64(u, *n);
            let w = v * pow_c64(u, -*m);
            CPoint::new(x, recover_y(x, w, *ell, p))
        }
        Closed::Twisted { x0, w0, nf, mf, a, lin, pieces, ell, p } => {
            let mut i_val = lin * t;
            for (amp, rate) in pieces {
                i_val += amp * ((rate * t).exp() - 1.0);
            }
            let x = x0 * (i_val * *nf).exp();
            let w = w0 * (a * t - i_val * *mf).exp();
            CPoint::new(x, recover_y(x, w, *ell, p))
        }
        Closed::Path1d { x0, y0, c, drift, mono } => {
            let mut k_val = C64::new(0.0, 0.0);
            let x;
            if *drift {
                x = x0 + c * t;
                for (k, ak) in mono {
                    let kk = (*k + 1) as f64;
                    k_val += ak * (pow_c64(x, k + 1) - pow_c64(*x0, k + 1)) / (c * kk);
                }
            } else {
                x = x0 * (c * t).exp();
                for (k, ak) in mono {
                    if *k == 0 {
                        k_val += ak * t;
                    } else {
                        let rate = c * (*k as f64);
                        k_val += ak * pow_c64(*x0, *k) * ((rate * t).exp() - 1.0) / rate;
                    }
                }
            }
            CPoint::new(x, y0 * k_val.exp())
        }
        Closed::Reparam { g0, sigma0, base } => {
            let s = if sigma0.norm() == 0.0 {
                g0 * t
            } else {
                g0 * ((sigma0 * t).exp() - 1.0) / sigma0
            };
            eval_closed(base, s)
        }
    }
}

/// A closed-form flow t ↦ z(t) of one family member through a fixed initial
/// point. Construction resolves all parameter, branch and divisor questions;
/// evaluation is then an entire formula in t.
#[derive(Clone, Debug)]
pub struct ExactFlow {
    spec: FamilySpec,
    z0: CPoint,
    kind: Closed,
}

impl ExactFlow {
    pub fn new(spec: &FamilySpec, z0: CPoint) -> Result<Self> {
        spec.validate()?;
        if !z0.is_finite() {
            return Err(Error::Domain("the initial point must be finite".into()));
        }
        let kind = build_closed(spec, z0)?;
        Ok(ExactFlow { spec: spec.clone(), z0, kind })
    }

    pub fn family(&self) -> &'static str {
        self.spec.tag()
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn initial(&self) -> CPoint {
        self.z0
    }

    /// The flow value at complex time t.
    pub fn at(&self, t: C64) -> CPoint {
        eval_closed(&self.kind, t)
    }
}

/// Closed-form flow of the family member through z0, evaluated at time t.
pub fn exact_flow(spec: &FamilySpec, z0: CPoint, t: C64) -> Result<CPoint> {
    Ok(ExactFlow::new(spec, z0)?.at(t))
}

fn require_finite(z: C64, what: &str) -> Result<C64> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain(format!(
            "the initial point lies on the excluded divisor: {what} is not finite there"
        )))
    }
}

fn branch_guard(x0: C64) -> Result<()> {
    if x0.norm() < CHART_EXCLUSION {
        return Err(Error::Domain(format!(
            "the initial point is within {CHART_EXCLUSION:e} of the branch locus x = 0; \
             the chart lift is undefined there"
        )));
    }
    Ok(())
}

fn build_closed(spec: &FamilySpec, z0: CPoint) -> Result<Closed> {
    let (x0, y0) = (z0.x, z0.y);
    match spec {
        FamilySpec::S1 { a, b } => Ok(Closed::Linear1d {
            x0,
            y0,
            a0: eval_uni(a, x0),
            b0: eval_uni(b, x0),
        }),
        FamilySpec::S2 { lambda, mu } => Ok(Closed::Exponential {
            x0,
            w0: y0,
            lx: c_to_f64(lambda),
            lw: c_to_f64(mu),
            ell: 0,
            p: UniPoly::zero("x"),
        }),
        FamilySpec::S3 { lambda, m } => Ok(Closed::Shear {
            x0,
            y0,
            lambda: c_to_f64(lambda),
            m: *m,
        }),
        FamilySpec::S4 { lambda, m, n } => {
            let r0 = pow_c64(x0, *m) * pow_c64(y0, *n);
            let big = require_finite(eval_uni(lambda, r0), "lambda(R)")?;
            Ok(Closed::Exponential {
                x0,
                w0: y0,
                lx: big * (*n as f64),
                lw: -big * (*m as f64),
                ell: 0,
                p: UniPoly::zero("x"),
            })
        }
        FamilySpec::S5 { lambda, m, n, ell, p } => {
            if *ell > 0 {
                branch_guard(x0)?;
            }
            let w0 = pow_c64(x0, *ell) * y0 + eval_uni(p, x0);
            let r0 = pow_c64(x0, *m) * pow_c64(w0, *n);
            let big = require_finite(eval_uni(lambda, r0), "lambda(R)")?;
            Ok(Closed::Exponential {
                x0,
                w0,
                lx: big * (*n as f64),
                lw: -big * (*m as f64),
                ell: *ell,
                p: p.clone(),
            })
        }
        FamilySpec::BII { a, lambda, m, n } => {
            twisted_base(x0, y0, lambda, *m, *n, 0, &UniPoly::zero("x"), a)
        }
        FamilySpec::BIII { a, lambda, m, n, ell, p } => {
            twisted_base(x0, y0, lambda, *m, *n, *ell, p, a)
        }
        FamilySpec::AI { f, big_n, eps, c, a, b } => {
            if f.is_none() {
                return Err(Error::Unsupported(
                    "f was left symbolic-opaque; the flow needs an explicit f".into(),
                ));
            }
            if !b.is_zero() {
                return Err(Error::Unsupported(
                    "the closed-form flow of this family is implemented for b = 0 only; \
                     use numeric_flow for b != 0"
                        .into(),
                ));
            }
            let s = *big_n - 1 + *eps;
            if s > 0 {
                return Err(Error::Unsupported(
                    "the closed-form flow needs N - 1 + eps <= 0 so the twisted \
                     coefficient x^{-s}·a(x) stays polynomial; use numeric_flow"
                        .into(),
                ));
            }
            let mono: Vec<(i64, C64)> = a
                .shifted(-s)
                .terms()
                .map(|(k, cf)| (*k, c_to_f64(cf)))
                .collect();
            let base = Closed::Path1d {
                x0,
                y0,
                c: c_to_f64(c),
                drift: *eps == 1,
                mono,
            };
            reparam(spec, z0, base)
        }
        FamilySpec::AII { lambda, m, n, a, .. } => {
            let base = twisted_base(x0, y0, lambda, *m, *n, 0, &UniPoly::zero("x"), a)?;
            reparam(spec, z0, base)
        }
        FamilySpec::AIII { lambda, m, n, ell, p, a, .. } => {
            let base = twisted_base(x0, y0, lambda, *m, *n, *ell, p, a)?;
            reparam(spec, z0, base)
        }
        FamilySpec::B { f, m, n, ell, p, c, a } => {
            let Some(f) = f else {
                return Err(Error::Unsupported(
                    "f was left symbolic-opaque; the flow needs an explicit f".into(),
                ));
            };
            branch_guard(x0)?;
            build_chart(spec, f, *m, *n, *ell, p, c, a, x0, y0)
        }
        FamilySpec::BI { .. } => Err(Error::Unsupported(
            "no closed-form flow is implemented for this family (the inhomogeneous \
             term integrates to a non-elementary function); use numeric_flow"
                .into(),
        )),
    }
}

/// Shared radial-twist flow: x' = n·λ(R)·x, w' = (a − m·λ(R))·w along the
/// level R = R₀·e^{n·a·s}, so I(s) = ∫λ(R(σ))dσ is an exponential sum.
#[allow(clippy::too_many_arguments)]
fn twisted_base(
    x0: C64,
    y0: C64,
    lambda: &UniPoly,
    m: i64,
    n: i64,
    ell: i64,
    p: &UniPoly,
    a: &CNum,
) -> Result<Closed> {
    if ell > 0 {
        branch_guard(x0)?;
    }
    let af = c_to_f64(a);
    let w0 = pow_c64(x0, ell) * y0 + eval_uni(p, x0);
    let r0 = pow_c64(x0, m) * pow_c64(w0, n);
    let mut lin = C64::new(0.0, 0.0);
    let mut pieces = Vec::new();
    for (j, cf) in lambda.terms() {
        let cj = c_to_f64(cf);
        if *j == 0 {
            lin += cj;
        } else {
            let rate = af * ((n * j) as f64);
            let amp = require_finite(cj * pow_c64(r0, *j) / rate, "lambda(R)")?;
            pieces.push((amp, rate));
        }
    }
    Ok(Closed::Twisted {
        x0,
        w0,
        nf: n as f64,
        mf: m as f64,
        a: af,
        lin,
        pieces,
        ell,
        p: p.clone(),
    })
}

/// Wrap a flow of F·Y into the flow of X = G·(F·Y) via the affine time
/// substitution s' = G₀ + σ₀·s. This is sound exactly when σ = lie(F·Y, G)
/// is a first integral of F·Y, which is checked symbolically.
fn reparam(spec: &FamilySpec, z0: CPoint, base: Closed) -> Result<Closed> {
    let fy = spec.fy_field()?;
    let d = spec.decompose()?;
    let slope = lie(&fy, &d.g);
    if !lie(&fy, &slope).is_zero() {
        return Err(Error::Unsupported(
            "the factor G of the decomposition is not affine along the flow \
             (lie(F*Y, lie(F*Y, G)) != 0), so no closed-form time substitution exists; \
             use numeric_flow"
                .into(),
        ));
    }
    let g0 = require_finite(d.g.eval(z0.x, z0.y), "G")?;
    let sigma0 = require_finite(slope.eval(z0.x, z0.y), "lie(F*Y, G)")?;
    Ok(Closed::Reparam { g0, sigma0, base: Box::new(base) })
}

/// Build the chart flow of the last family: in the cover coordinates the
/// field is (f∘H)·u^k·(a(v)·u∂u + c∂v) with k = m + nℓ, and W = u·e^{−q(v)/c}
/// (q' = a) is conserved. A closed form exists when (f∘H)·u^k = ρ·W^d for
/// some integer d, which makes v(t) affine and u(t) an explicit exponential.
#[allow(clippy::too_many_arguments)]
fn build_chart(
    spec: &FamilySpec,
    f: &ExpPoly,
    m: i64,
    n: i64,
    ell: i64,
    p: &UniPoly,
    c: &CNum,
    a: &UniPoly,
    x0: C64,
    y0: C64,
) -> Result<Closed> {
    let not_invariant = || {
        Error::Unsupported(
            "the factor f does not reduce to a power of the chart invariant \
             u*exp(-q(v)/c), so no closed-form flow is available; use numeric_flow"
                .into(),
        )
    };
    // q = ∫a dv; a v^{-1} term would make the invariant multivalued.
    let mut q = UniPoly::zero("v");
    for (e, cf) in a.terms() {
        if *e == -1 {
            return Err(Error::Unsupported(
                "a(v) has a v^{-1} term, so the integrating factor carries a \
                 logarithmic branch; use numeric_flow"
                    .into(),
            ));
        }
        q = q.add(&UniPoly::monomial("v", e + 1, cf.clone() / c_int(e + 1)));
    }

    let uv = Vars::uv();
    let h = spec.hmap()?;
    let (hx, hy) = h.components(&uv);
    let f_chart = f.substitute(
        &RationalFn2::from_laurent(hx),
        &RationalFn2::from_laurent(hy),
    )?;
    let k = m + n * ell;
    let phi = f_chart.mul(&ExpPoly::from_laurent(LaurentPoly2::monomial(
        uv.clone(),
        k,
        0,
        c_one(),
    )));
    if phi.num_terms() != 1 {
        return Err(not_invariant());
    }
    let (e_exp, coef) = phi.terms().next().expect("one term");
    let Some(lp) = coef.as_laurent() else {
        return Err(not_invariant());
    };
    if lp.num_terms() != 1 {
        return Err(not_invariant());
    }
    let (mono, rho) = lp.terms().next().expect("one monomial");
    if mono.b != 0 {
        return Err(not_invariant());
    }
    let d = mono.a;
    let expected = q
        .to_bivariate(uv.clone(), 1)
        .scale(&(-(c_int(d) / c.clone())));
    if *e_exp != expected {
        return Err(not_invariant());
    }

    // Principal chart lift of the initial point.
    let u0 = if n == 1 { x0 } else { x0.powf(1.0 / n as f64) };
    let w0 = pow_c64(x0, ell) * y0 + eval_uni(p, x0);
    let v0 = require_finite(pow_c64(u0, m) * w0, "the chart coordinate v")?;
    let cf = c_to_f64(c);
    let cinv = 1.0 / cf;
    let winv = require_finite(u0 * (-eval_uni(&q, v0) * cinv).exp(), "the chart invariant")?;
    let phi0 = require_finite(c_to_f64(rho) * pow_c64(winv, d), "the chart velocity")?;
    Ok(Closed::Chart {
        winv,
        v0,
        vel: cf * phi0,
        cinv,
        q,
        n,
        m,
        ell,
        p: p.clone(),
    })
}

// ---------------------------------------------------------------------------
// Numeric integration
// ---------------------------------------------------------------------------

type Z2 = (C64, C64);

fn z2_finite(z: Z2) -> bool {
    z.0.is_finite() && z.1.is_finite()
}

/// z + h·Σ cᵢ·kᵢ.
fn stage(z: Z2, h: f64, terms: &[(f64, Z2)]) -> Z2 {
    let mut acc = z;
    for (c, k) in terms {
        acc.0 += *c * h * k.0;
        acc.1 += *c * h * k.1;
    }
    acc
}

/// Integrate dz/dt = X(z) along the straight complex-time segments of
/// `path`, starting from `z0` at the first node.
///
/// The stepper is the Dormand–Prince 5(4) embedded pair with a PI step-size
/// controller (safety 0.9, exponents 0.17 and 0.04, growth clamped to
/// [0.2, 6]). The error control is relative at tolerance `tol` with a
/// small absolute floor of 1e-6·tol per component. The integration
/// never errors: leaving the ball of radius [`BLOWUP_RADIUS`] or starving
/// the step size below [`MIN_STEP_FRACTION`] of a segment is recorded in
/// the returned status. When `invariant` is supplied, its maximal relative
/// drift over the accepted samples is recorded.
pub fn numeric_flow(
    field: &PlanarField,
    z0: CPoint,
    path: &[C64],
    tol: f64,
    invariant: Option<&ExpPoly>,
) -> FlowTrace {
    let tol = tol.max(1e-14);
    let t0 = path.first().copied().unwrap_or_else(|| C64::new(0.0, 0.0));
    let mut times = vec![t0];
    let mut points = vec![z0];

    let inv0 = invariant.map(|g| g.eval(z0.x, z0.y));
    let inv_den = inv0.map(|v| if v.norm() > 0.0 { v.norm() } else { 1.0 });
    let mut drift = invariant.map(|_| 0.0_f64);
    let track = |z: Z2, drift: &mut Option<f64>| {
        if let (Some(g), Some(v0), Some(den)) = (invariant, inv0, inv_den) {
            let v = g.eval(z.0, z.1);
            let rel = (v - v0).norm() / den;
            if let Some(d) = drift {
                *d = d.max(rel);
            }
        }
    };

    let mut z: Z2 = (z0.x, z0.y);
    if !z2_finite(z) || z0.sup_norm() > BLOWUP_RADIUS {
        return FlowTrace {
            path: path.to_vec(),
            times,
            points,
            status: FlowStatus::Blowup { at: t0 },
            conserved_drift: drift,
        };
    }

    let mut status = FlowStatus::Completed;
    'segments: for seg in path.windows(2) {
        let (ta, tb) = (seg[0], seg[1]);
        let dir = tb - ta;
        if dir.norm() == 0.0 {
            continue;
        }
        // dz/dτ = dir·X(z) on τ ∈ [0, 1].
        let deriv = |w: Z2| -> Z2 {
            let (p, q) = field.eval(w.0, w.1);
            (dir * p, dir * q)
        };

        let mut tau = 0.0_f64;
        let mut h = 0.01_f64;
        let mut err_prev = 1e-4_f64;
        let mut k1 = deriv(z);
        if !z2_finite(k1) {
            status = FlowStatus::Blowup { at: ta };
            break 'segments;
        }
        let mut steps = 0usize;
        while tau < 1.0 {
            steps += 1;
            if steps > MAX_STEPS || h < MIN_STEP_FRACTION {
                let at = ta + dir * tau;
                status = if z.0.norm().max(z.1.norm()) > ESCAPE_RADIUS {
                    FlowStatus::Blowup { at }
                } else {
                    FlowStatus::StepUnderflow { at }
                };
                break 'segments;
            }
            h = h.min(1.0 - tau);

            // Dormand–Prince 5(4) stages.
            let k2 = deriv(stage(z, h, &[(1.0 / 5.0, k1)]));
            let k3 = deriv(stage(z, h, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]));
            let k4 = deriv(stage(
                z,
                h,
                &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)],
            ));
            let k5 = deriv(stage(
                z,
                h,
                &[
                    (19372.0 / 6561.0, k1),
                    (-25360.0 / 2187.0, k2),
                    (64448.0 / 6561.0, k3),
                    (-212.0 / 729.0, k4),
                ],
            ));
            let k6 = deriv(stage(
                z,
                h,
                &[
                    (9017.0 / 3168.0, k1),
                    (-355.0 / 33.0, k2),
                    (46732.0 / 5247.0, k3),
                    (49.0 / 176.0, k4),
                    (-5103.0 / 18656.0, k5),
                ],
            ));
            let z5 = stage(
                z,
                h,
                &[
                    (35.0 / 384.0, k1),
                    (500.0 / 1113.0, k3),
                    (125.0 / 192.0, k4),
                    (-2187.0 / 6784.0, k5),
                    (11.0 / 84.0, k6),
                ],
            );
            let k7 = deriv(z5);

            let err = if z2_finite(z5) && z2_finite(k7) {
                let e = stage(
                    (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
                    h,
                    &[
                        (71.0 / 57600.0, k1),
                        (-71.0 / 16695.0, k3),
                        (71.0 / 1920.0, k4),
                        (-17253.0 / 339200.0, k5),
                        (22.0 / 525.0, k6),
                        (-1.0 / 40.0, k7),
                    ],
                );
                let scx = tol * (ATOL_FLOOR + z.0.norm().max(z5.0.norm()));
                let scy = tol * (ATOL_FLOOR + z.1.norm().max(z5.1.norm()));
                let ex = e.0.norm() / scx;
                let ey = e.1.norm() / scy;
                (0.5 * (ex * ex + ey * ey)).sqrt()
            } else {
                f64::INFINITY
            };

            if err <= 1.0 {
                tau += h;
                z = z5;
                k1 = k7;
                let t_abs = ta + dir * tau;
                times.push(t_abs);
                points.push(CPoint::new(z.0, z.1));
                if !z2_finite(z) || z.0.norm().max(z.1.norm()) > BLOWUP_RADIUS {
                    status = FlowStatus::Blowup { at: t_abs };
                    break 'segments;
                }
                track(z, &mut drift);
                let fac = (0.9 * err.powf(-0.17) * err_prev.powf(0.04)).clamp(0.2, 6.0);
                err_prev = err.max(1e-10);
                h *= fac;
            } else if err.is_finite() {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            } else {
                h *= 0.1;
            }
        }
    }

    FlowTrace {
        path: path.to_vec(),
        times,
        points,
        status,
        conserved_drift: drift,
    }
}

// ---------------------------------------------------------------------------
// Completeness probing
// ---------------------------------------------------------------------------

/// Outcome of one probe ray.
#[derive(Clone, Debug)]
pub struct RaySummary {
    /// Direction of the ray in the complex-time plane.
    pub theta: f64,
    pub status: FlowStatus,
    /// Radius reached along the ray: the full radius when completed, else
    /// |t| of the terminating event.
    pub reached: f64,
    pub conserved_drift: Option<f64>,
}

/// Aggregate result of [`completeness_probe`].
///
/// A blow-up on any ray certifies that the field is incomplete (some
/// trajectory leaves every compact set in finite time). The converse does
/// not hold: an all-completed probe is numerical evidence only, never a
/// completeness certificate.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub rays: Vec<RaySummary>,
    /// True when some ray ended in blow-up.
    pub blowup_detected: bool,
}

impl ProbeReport {
    /// Whether the probe certified incompleteness.
    pub fn certified_incomplete(&self) -> bool {
        self.blowup_detected
    }
}

/// Integrate from z0 along the time rays t = r·e^{iθⱼ}, θⱼ = 2πj/nrays,
/// r ∈ [0, rmax], and summarize each ray. The rays are independent of one
/// another (they share nothing but the initial point).
pub fn completeness_probe(
    field: &PlanarField,
    z0: CPoint,
    rmax: f64,
    nrays: usize,
    tol: f64,
    invariant: Option<&ExpPoly>,
) -> Result<ProbeReport> {
    if nrays < 4 {
        return Err(Error::Domain(format!(
            "the probe needs at least 4 rays, got {nrays}"
        )));
    }
    if !(rmax.is_finite() && rmax > 0.0) {
        return Err(Error::Domain(format!(
            "the probe radius must be positive and finite, got {rmax}"
        )));
    }
    let mut rays = Vec::with_capacity(nrays);
    let mut blowup_detected = false;
    for j in 0..nrays {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / nrays as f64;
        let end = C64::from_polar(rmax, theta);
        let trace = numeric_flow(
            field,
            z0,
            &[C64::new(0.0, 0.0), end],
            tol,
            invariant,
        );
        let reached = match trace.status {
            FlowStatus::Completed => rmax,
            FlowStatus::Blowup { at } | FlowStatus::StepUnderflow { at } => at.norm(),
        };
        if matches!(trace.status, FlowStatus::Blowup { .. }) {
            blowup_detected = true;
        }
        rays.push(RaySummary {
            theta,
            status: trace.status,
            reached,
            conserved_drift: trace.conserved_drift,
        });
    }
    Ok(ProbeReport { rays, blowup_detected })
}
