//! Exact symbolic core for complete polynomial vector fields on the complex
//! plane: Gaussian-rational arithmetic, Laurent polynomials, rational
//! functions and exponential polynomials in two variables, planar fields
//! with their coordinate changes, the classified complete families with
//! validators and invariants, Riccati normal forms, and complex-time flows.

pub mod error;
pub mod expr;
pub mod family;
pub mod field;
pub mod flow;
pub mod integral;
pub mod num;
pub mod parse;
pub mod poly;
pub mod ratfn;
pub mod riccati;
pub mod unipoly;

pub use error::{Error, Result};
pub use expr::ExpPoly;
pub use family::{CanonicalIntegral, Decomposition, FamilySpec};
pub use integral::{
    darboux_structured, is_first_integral, rational_first_integral, second_integral_report,
    DarbouxCertificate, SecondIntegralReport,
};
pub use flow::{
    completeness_probe, exact_flow, numeric_flow, CPoint, ExactFlow, FlowStatus, FlowTrace,
    ProbeReport, RaySummary,
};
pub use field::{
    has_isolated_singularities, is_invariant_curve, lie, lie_laurent, lie_ratfn,
    pullback_automorphism, pullback_h, pushforward_h, HMap, PlanarField, PolyMap,
};
pub use num::{CNum, Rat};
pub use parse::{parse_exppoly, parse_laurent, parse_ratfn, parse_unipoly};
pub use poly::{divides, gcd2, LaurentPoly2, Mono, Vars};
pub use ratfn::RationalFn2;
pub use riccati::{
    build_y_from_uv, eta_contraction, eta_one_form, extract_uv_form, solve_k, time_form,
    verify_time_contraction, EtaShape, TimeForm, UVForm,
};
pub use unipoly::UniPoly;
