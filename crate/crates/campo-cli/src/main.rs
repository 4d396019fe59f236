//! `campo` — exact toolkit for complete polynomial and exp-polynomial
//! vector fields on the complex plane, with numeric flow probes.
//!
//! Exit codes: 0 when the command's verdicts are verified/true, 1 when a
//! well-formed claim is falsified, 2 on input errors (parse failures or
//! violated parameter invariants).

mod input;
mod report;

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use campo_core::family::{check_star_direct, FamilySpec};
use campo_core::field::{lie, lie_ratfn, HMap, PlanarField};
use campo_core::flow::{
    completeness_probe, numeric_flow, ExactFlow, FlowStatus, FlowTrace, C64,
};
use campo_core::integral::{
    darboux_structured, is_first_integral, rational_first_integral, second_integral_report,
};
use campo_core::num::c_display;
use campo_core::parse::parse_exppoly;
use campo_core::riccati::{eta_contraction, extract_uv_form, solve_k, time_form,
    verify_time_contraction};
use campo_core::{CanonicalIntegral, ExpPoly};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use input::{
    parse_c64, parse_field_file, parse_inline_field, parse_z0, spec_to_json, RawFamily,
};
use report::Report;

#[derive(Parser)]
#[command(name = "campo", version, about = "Exact classification toolkit for complete planar vector fields")]
struct Cli {
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FieldArgs {
    /// Inline field "x:<expr>, y:<expr>".
    #[arg(long, value_name = "FIELD")]
    field: Option<String>,
    /// JSON field document {"vars":["x","y"],"P":"...","Q":"..."}.
    #[arg(long, value_name = "PATH")]
    field_file: Option<PathBuf>,
}

impl FieldArgs {
    fn resolve(&self) -> Result<PlanarField> {
        match (&self.field, &self.field_file) {
            (Some(s), None) => parse_inline_field(s),
            (None, Some(p)) => parse_field_file(p),
            (None, None) => bail!("supply a field with --field or --field-file"),
            _ => bail!("--field and --field-file are mutually exclusive"),
        }
    }

    fn given(&self) -> bool {
        self.field.is_some() || self.field_file.is_some()
    }
}

#[derive(Args)]
struct CoverArgs {
    /// Exponent m of the covering map.
    #[arg(long)]
    m: i64,
    /// Covering degree n.
    #[arg(long)]
    n: i64,
    /// Pole order l of the deformed coordinate.
    #[arg(long, default_value_t = 0)]
    l: i64,
    /// Deformation polynomial p (required nonzero when l >= 1).
    #[arg(long, default_value = "0")]
    p: String,
}

impl CoverArgs {
    fn resolve(&self) -> Result<HMap> {
        let p = input::parse_unipoly_any(&self.p).context("parameter \"p\"")?;
        Ok(HMap::new(self.m, self.n, self.l, p)?)
    }
}

#[derive(Args)]
struct FamilyArgs {
    /// Inline family JSON, e.g. {"tag":"S4","lambda":"z","m":1,"n":2}.
    #[arg(long, value_name = "JSON")]
    family: Option<String>,
    /// Path to a family JSON document.
    #[arg(long, value_name = "PATH")]
    family_file: Option<PathBuf>,
    /// Family tag (S1..S5, BI, BII, BIII, AI, AII, AIII, B) for flag-style input.
    #[arg(long)]
    tag: Option<String>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    l: Option<i64>,
    #[arg(long)]
    kappa: Option<i64>,
    #[arg(long)]
    delta: Option<i64>,
    /// The fibre exponent N of the first affine form.
    #[arg(long = "big-n", alias = "N")]
    big_n: Option<i64>,
    #[arg(long)]
    eps: Option<i64>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    /// Transcendental factor f(x,y) where the family carries one.
    #[arg(long)]
    f: Option<String>,
}

impl FamilyArgs {
    fn given(&self) -> bool {
        self.family.is_some() || self.family_file.is_some() || self.tag.is_some()
    }

    fn resolve(&self) -> Result<FamilySpec> {
        let sources =
            self.family.is_some() as u8 + self.family_file.is_some() as u8 + self.tag.is_some() as u8;
        if sources == 0 {
            bail!("supply a family with --family, --family-file, or --tag plus parameter flags");
        }
        if sources > 1 {
            bail!("--family, --family-file, and --tag are mutually exclusive");
        }
        let raw = if let Some(src) = &self.family {
            let doc: Value = serde_json::from_str(src).context("--family is not valid JSON")?;
            RawFamily::from_json(&doc)?
        } else if let Some(path) = &self.family_file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let doc: Value = serde_json::from_str(&text)
                .with_context(|| format!("{} is not valid JSON", path.display()))?;
            RawFamily::from_json(&doc)?
        } else {
            let mut raw = RawFamily::new(self.tag.as_deref().unwrap());
            raw.set_int("m", self.m);
            raw.set_int("n", self.n);
            raw.set_int("l", self.l);
            raw.set_int("kappa", self.kappa);
            raw.set_int("delta", self.delta);
            raw.set_int("N", self.big_n);
            raw.set_int("eps", self.eps);
            raw.set_expr("p", &self.p);
            raw.set_expr("a", &self.a);
            raw.set_expr("b", &self.b);
            raw.set_expr("c", &self.c);
            raw.set_expr("d", &self.d);
            raw.set_expr("lambda", &self.lambda);
            raw.set_expr("mu", &self.mu);
            raw.set_expr("f", &self.f);
            raw
        };
        raw.into_spec()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a family specification against its parameter invariants.
    ValidateFamily(FamilyArgs),
    /// Decide lie(X, g) = 0 exactly.
    FirstIntegral {
        #[command(flatten)]
        field: FieldArgs,
        /// The candidate integral g(x,y).
        #[arg(long = "fn", value_name = "EXPR")]
        func: String,
    },
    /// Decide lie(Y, lie(Y, g)) = 0 exactly and recover the affine split.
    SecondIntegral {
        #[command(flatten)]
        field: FieldArgs,
        /// The candidate second integral g(x,y).
        #[arg(long = "fn", value_name = "EXPR")]
        func: String,
    },
    /// Search for invariant algebraic curves with exact cofactors.
    Darboux {
        #[command(flatten)]
        field: FieldArgs,
        /// Structured-ansatz degree bound.
        #[arg(long, default_value_t = 2)]
        lmax: i64,
    },
    /// Reconstruct a rational first integral from invariant curves.
    RationalIntegral {
        #[command(flatten)]
        field: FieldArgs,
        /// Structured-ansatz degree bound for the curve search.
        #[arg(long, default_value_t = 2)]
        lmax: i64,
    },
    /// Pull a field back through the branched cover and match the chart shape.
    UvForm {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        cover: CoverArgs,
    },
    /// Contract the cover's one-form against a field and factor the result.
    Eta {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        cover: CoverArgs,
    },
    /// Build the one-form of times of f·Y and verify its contraction is 1.
    TimeForm {
        #[command(flatten)]
        field: FieldArgs,
        /// The scalar factor f(x,y) (default 1).
        #[arg(long, default_value = "1")]
        f: String,
        #[command(flatten)]
        cover: CoverArgs,
    },
    /// Split a family member into G·F·Y and verify the scaling relation.
    Decompose(FamilyArgs),
    /// Integrate the flow along a straight segment (or broken path) of complex time.
    Flow {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        family: FamilyArgs,
        /// Start point "x, y" with complex components like "1+0.5i".
        #[arg(long, value_name = "POINT")]
        z0: String,
        /// Target complex time (straight segment from 0).
        #[arg(long, value_name = "TIME", conflicts_with = "path")]
        t: Option<String>,
        /// Broken time path "t1; t2; ..." visited from 0 in order.
        #[arg(long, value_name = "TIMES")]
        path: Option<String>,
        /// Relative tolerance of the embedded-pair stepper.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Track this expression's relative drift along the trace.
        #[arg(long, value_name = "EXPR")]
        conserved: Option<String>,
        /// Also evaluate the closed-form flow (needs a family) and compare.
        #[arg(long)]
        exact: bool,
        /// Tolerance for the closed-form/numeric comparison.
        #[arg(long, default_value_t = 1e-9)]
        agree_tol: f64,
        /// Print the trace as JSON lines (one sample per line) instead of a report.
        #[arg(long)]
        trace: bool,
    },
    /// Integrate along time rays in all directions and report blow-ups.
    Probe {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        family: FamilyArgs,
        /// Start point "x, y" with complex components.
        #[arg(long, value_name = "POINT")]
        z0: String,
        /// Radius of the probed time disk.
        #[arg(long)]
        rmax: f64,
        /// Number of equally spaced rays.
        #[arg(long, default_value_t = 8)]
        rays: usize,
        /// Relative tolerance of the embedded-pair stepper.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Track this expression's relative drift along every ray.
        #[arg(long, value_name = "EXPR")]
        conserved: Option<String>,
    },
}

enum Outcome {
    Report(Report, bool),
    Raw(String, bool),
}

fn main() {
    let cli = Cli::parse();
    let as_json = cli.json;
    match run(cli.command) {
        Ok(Outcome::Report(report, verified)) => {
            if as_json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json()).expect("report serializes")
                );
            } else {
                print!("{}", report.render_text());
            }
            std::process::exit(if verified { 0 } else { 1 });
        }
        Ok(Outcome::Raw(text, verified)) => {
            print!("{text}");
            std::process::exit(if verified { 0 } else { 1 });
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::ValidateFamily(args) => cmd_validate_family(&args),
        Command::FirstIntegral { field, func } => cmd_first_integral(&field, &func),
        Command::SecondIntegral { field, func } => cmd_second_integral(&field, &func),
        Command::Darboux { field, lmax } => cmd_darboux(&field, lmax),
        Command::RationalIntegral { field, lmax } => cmd_rational_integral(&field, lmax),
        Command::UvForm { field, cover } => cmd_uv_form(&field, &cover),
        Command::Eta { field, cover } => cmd_eta(&field, &cover),
        Command::TimeForm { field, f, cover } => cmd_time_form(&field, &f, &cover),
        Command::Decompose(args) => cmd_decompose(&args),
        Command::Flow {
            field,
            family,
            z0,
            t,
            path,
            tol,
            conserved,
            exact,
            agree_tol,
            trace,
        } => cmd_flow(
            &field, &family, &z0, t.as_deref(), path.as_deref(), tol, conserved.as_deref(),
            exact, agree_tol, trace,
        ),
        Command::Probe { field, family, z0, rmax, rays, tol, conserved } => {
            cmd_probe(&field, &family, &z0, rmax, rays, tol, conserved.as_deref())
        }
    }
}

// ---- symbolic subcommands ----------------------------------------------------

fn cmd_validate_family(args: &FamilyArgs) -> Result<Outcome> {
    let spec = args.resolve()?;
    let mut report = Report::new("validate-family");
    report.input("family", spec_to_json(&spec).to_string());
    let verdict = spec.validate();
    let accepted = verdict.is_ok();
    report.verdict_bool("accepted", accepted);
    if let Err(e) = &verdict {
        report.diagnostic(e);
    }
    match &spec {
        FamilySpec::BII { a, lambda, m, n }
        | FamilySpec::BIII { a, lambda, m, n, .. } => {
            let (ell, p) = match &spec {
                FamilySpec::BIII { ell, p, .. } => (*ell, p.clone()),
                _ => (0, campo_core::unipoly::UniPoly::zero("x")),
            };
            if let Ok(star) = check_star_direct(a, lambda, *m, *n, ell, &p) {
                report.verdict_bool("star_condition", star);
                if accepted {
                    report.certificates(json!({
                        "star_condition": {
                            "holds": star,
                            "checked": "direct divisibility in the plane ring",
                        }
                    }));
                }
            }
        }
        _ => {}
    }
    Ok(Outcome::Report(report, accepted))
}

fn cmd_first_integral(field: &FieldArgs, func: &str) -> Result<Outcome> {
    let x = field.resolve()?;
    let g = parse_exppoly(func, x.vars()).context("--fn")?;
    let mut report = Report::new("first-integral");
    report.input("field", &x).input("fn", &g);
    let verdict = is_first_integral(&x, &g);
    report.verdict_bool("is_first_integral", verdict);
    if !verdict {
        report.diagnostic(format!("lie(X, g) = {}", lie(&x, &g)));
    }
    Ok(Outcome::Report(report, verdict))
}

fn cmd_second_integral(field: &FieldArgs, func: &str) -> Result<Outcome> {
    let y = field.resolve()?;
    let g = parse_exppoly(func, y.vars()).context("--fn")?;
    let mut report = Report::new("second-integral");
    report.input("field", &y).input("fn", &g);
    let rep = second_integral_report(&y, &g);
    report.verdict_bool("is_first_integral", rep.is_first);
    report.verdict_bool("is_second_integral", rep.is_second);
    if rep.hpart.is_some() || rep.gpart.is_some() {
        report.certificates(json!({
            "affine_split": {
                "h_part": rep.hpart.as_ref().map(ToString::to_string),
                "g_part": rep.gpart.as_ref().map(ToString::to_string),
            }
        }));
    }
    if !rep.is_second {
        report.diagnostic(format!("lie(Y, lie(Y, g)) = {}", lie(&y, &lie(&y, &g))));
    }
    Ok(Outcome::Report(report, rep.is_second))
}

fn cmd_darboux(field: &FieldArgs, lmax: i64) -> Result<Outcome> {
    let y = field.resolve()?;
    let mut report = Report::new("darboux");
    report.input("field", &y).input("lmax", lmax);
    let certs = darboux_structured(&y, lmax)?;
    let found = !certs.is_empty();
    report.verdict_bool("found", found);
    let payload: Vec<Value> = certs
        .iter()
        .map(|c| json!({ "curve": c.h.to_string(), "cofactor": c.k.to_string() }))
        .collect();
    report.certificates(json!({ "invariant_curves": payload }));
    Ok(Outcome::Report(report, found))
}

fn cmd_rational_integral(field: &FieldArgs, lmax: i64) -> Result<Outcome> {
    let y = field.resolve()?;
    let mut report = Report::new("rational-integral");
    report.input("field", &y).input("lmax", lmax);
    let certs = darboux_structured(&y, lmax)?;
    let integral = rational_first_integral(&y, &certs)?;
    let found = integral.is_some();
    report.verdict_bool("has_rational_first_integral", found);
    let mut verified = found;
    if let Some(r) = &integral {
        let exact = is_first_integral(&y, &ExpPoly::from_ratfn(r.clone()));
        report.verdict_exact("integral", r);
        report.verdict_bool("verified_exactly", exact);
        verified = exact;
        let curves: Vec<Value> = certs
            .iter()
            .map(|c| json!({ "curve": c.h.to_string(), "cofactor": c.k.to_string() }))
            .collect();
        report.certificates(json!({
            "integral": r.to_string(),
            "invariant_curves": curves,
        }));
    } else {
        report.diagnostic(format!(
            "no multiplicative combination of the {} certificate(s) closes up",
            certs.len()
        ));
    }
    Ok(Outcome::Report(report, verified))
}

/// Map a core error on a well-formed input to a falsified verdict, except
/// shape preconditions that count as input errors.
fn falsify(e: campo_core::Error) -> Result<String> {
    match e {
        campo_core::Error::NotPolynomial(_) | campo_core::Error::Parse { .. } => Err(e.into()),
        other => Ok(other.to_string()),
    }
}

fn cmd_uv_form(field: &FieldArgs, cover: &CoverArgs) -> Result<Outcome> {
    let y = field.resolve()?;
    let h = cover.resolve()?;
    let mut report = Report::new("uv-form");
    report
        .input("field", &y)
        .input("cover", cover_echo(&h));
    match extract_uv_form(&y, &h) {
        Ok(form) => {
            report.verdict_bool("riccati_shape", true);
            report.certificates(json!({
                "k": form.k,
                "a": form.a.to_string(),
                "c": form.c.to_string(),
            }));
            if let Ok((_, shape)) = eta_contraction(&y, &h) {
                if shape.gamma == 0 {
                    match solve_k(&shape, &h, shape.beta) {
                        Ok(k2) if k2 == form.k => report.diagnostic(format!(
                            "exponent identity cross-check: k = {k2} (agrees)"
                        )),
                        Ok(k2) => report.diagnostic(format!(
                            "exponent identity cross-check: k = {k2} (DISAGREES with {})",
                            form.k
                        )),
                        Err(e) => report.diagnostic(format!(
                            "exponent identity cross-check unavailable: {e}"
                        )),
                    };
                }
            }
            Ok(Outcome::Report(report, true))
        }
        Err(e) => {
            let msg = falsify(e)?;
            report.verdict_bool("riccati_shape", false);
            report.diagnostic(msg);
            Ok(Outcome::Report(report, false))
        }
    }
}

fn cmd_eta(field: &FieldArgs, cover: &CoverArgs) -> Result<Outcome> {
    let y = field.resolve()?;
    let h = cover.resolve()?;
    let mut report = Report::new("eta");
    report.input("field", &y).input("cover", cover_echo(&h));
    match eta_contraction(&y, &h) {
        Ok((eta, shape)) => {
            report.verdict_bool("factored", true);
            report.certificates(json!({
                "contraction": eta.to_string(),
                "shape": {
                    "alpha": shape.alpha,
                    "beta": shape.beta,
                    "gamma": shape.gamma,
                    "s": shape.s.as_ref().map(c_display),
                    "scale": c_display(&shape.scale),
                }
            }));
            Ok(Outcome::Report(report, true))
        }
        Err(e) => {
            let msg = falsify(e)?;
            report.verdict_bool("factored", false);
            report.diagnostic(msg);
            Ok(Outcome::Report(report, false))
        }
    }
}

fn cmd_time_form(field: &FieldArgs, f_src: &str, cover: &CoverArgs) -> Result<Outcome> {
    let y = field.resolve()?;
    let h = cover.resolve()?;
    let f = parse_exppoly(f_src, y.vars()).context("--f")?;
    let mut report = Report::new("time-form");
    report
        .input("field", &y)
        .input("f", &f)
        .input("cover", cover_echo(&h));
    match time_form(&f, &y, &h) {
        Ok(tau) => {
            report.certificates(json!({
                "coeff_num": tau.coeff_num.to_string(),
                "coeff_den": tau.coeff_den.to_string(),
                "base_dx": tau.base_dx.to_string(),
                "base_dy": tau.base_dy.to_string(),
            }));
            let x = y.mul_exppoly(&f);
            let one = verify_time_contraction(&tau, &x);
            report.verdict_bool("contraction_is_one", one);
            Ok(Outcome::Report(report, one))
        }
        Err(e) => {
            let msg = falsify(e)?;
            report.verdict_bool("contraction_is_one", false);
            report.diagnostic(msg);
            Ok(Outcome::Report(report, false))
        }
    }
}

fn cmd_decompose(args: &FamilyArgs) -> Result<Outcome> {
    let spec = args.resolve()?;
    let mut report = Report::new("decompose");
    report.input("family", spec_to_json(&spec).to_string());
    let d = spec.decompose()?;
    report.verdict_bool("reassembles", true);
    // independent check of the scaling relation lie(F·Y, R) = Omega·R^j
    let fy = d.y.mul_ratfn(&d.f);
    let lhs = lie_ratfn(&fy, &d.r);
    let rhs = ExpPoly::from_ratfn(d.r.pow(i64::from(d.j))?.scale(&d.omega));
    let scaling_ok = lhs.sub(&rhs).is_zero();
    report.verdict_bool("scaling_relation", scaling_ok);
    report.certificates(json!({
        "g": d.g.to_string(),
        "f": d.f.to_string(),
        "y": d.y.to_string(),
        "r": d.r.to_string(),
        "omega": c_display(&d.omega),
        "j": d.j,
    }));
    Ok(Outcome::Report(report, scaling_ok))
}

fn cover_echo(h: &HMap) -> String {
    format!("m={}, n={}, l={}, p={}", h.m(), h.n(), h.ell(), h.p())
}

// ---- numeric subcommands -------------------------------------------------------

struct Source {
    x: PlanarField,
    spec: Option<FamilySpec>,
}

fn resolve_source(field: &FieldArgs, family: &FamilyArgs) -> Result<Source> {
    match (field.given(), family.given()) {
        (true, false) => Ok(Source { x: field.resolve()?, spec: None }),
        (false, true) => {
            let spec = family.resolve()?;
            let x = spec.complete_field()?;
            Ok(Source { x, spec: Some(spec) })
        }
        (false, false) => bail!("supply either a field (--field/--field-file) or a family"),
        (true, true) => bail!("a field and a family are mutually exclusive inputs"),
    }
}

fn resolve_invariant(
    conserved: Option<&str>,
    source: &Source,
    report: &mut Report,
) -> Result<Option<ExpPoly>> {
    if let Some(src) = conserved {
        let g = parse_exppoly(src, source.x.vars()).context("--conserved")?;
        report.input("conserved", &g);
        return Ok(Some(g));
    }
    if let Some(spec) = &source.spec {
        match spec.canonical_first_integral() {
            Ok(CanonicalIntegral::Rational(r)) => {
                let g = ExpPoly::from_ratfn(r);
                report.input("conserved", format!("{g} (canonical)"));
                return Ok(Some(g));
            }
            Ok(CanonicalIntegral::ChartRational(_)) => {
                report.diagnostic(
                    "the canonical integral lives on the covering chart; pass --conserved \
                     to track a plane expression",
                );
            }
            Ok(CanonicalIntegral::None) | Err(_) => {}
        }
    }
    Ok(None)
}

fn status_json(status: &FlowStatus) -> Value {
    match status {
        FlowStatus::Completed => json!({ "kind": "completed" }),
        FlowStatus::Blowup { at } => json!({ "kind": "blowup", "at": [at.re, at.im] }),
        FlowStatus::StepUnderflow { at } => {
            json!({ "kind": "step-underflow", "at": [at.re, at.im] })
        }
    }
}

fn fmt_c(z: C64) -> String {
    format!("[{:?}, {:?}]", z.re, z.im)
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    field: &FieldArgs,
    family: &FamilyArgs,
    z0: &str,
    t: Option<&str>,
    path: Option<&str>,
    tol: f64,
    conserved: Option<&str>,
    exact: bool,
    agree_tol: f64,
    trace: bool,
) -> Result<Outcome> {
    let source = resolve_source(field, family)?;
    let z0 = parse_z0(z0)?;
    let mut nodes = vec![C64::new(0.0, 0.0)];
    match (t, path) {
        (Some(t), None) => nodes.push(parse_c64(t).context("--t")?),
        (None, Some(p)) => {
            for part in p.split(';') {
                nodes.push(parse_c64(part).context("--path")?);
            }
        }
        (None, None) => bail!("supply a target time with --t or a broken path with --path"),
        _ => unreachable!("clap forbids --t with --path"),
    }
    let mut report = Report::new("flow");
    report
        .input("field", &source.x)
        .input("z0", format!("{}, {}", fmt_c(z0.x), fmt_c(z0.y)))
        .input(
            "path",
            nodes.iter().map(|t| fmt_c(*t)).collect::<Vec<_>>().join(" -> "),
        );
    if let Some(spec) = &source.spec {
        report.input("family", spec_to_json(spec).to_string());
    }
    let invariant = resolve_invariant(conserved, &source, &mut report)?;
    let flow_trace: FlowTrace = numeric_flow(&source.x, z0, &nodes, tol, invariant.as_ref());
    if trace {
        let ok = flow_trace.status == FlowStatus::Completed;
        return Ok(Outcome::Raw(flow_trace.json_lines(), ok));
    }
    let completed = flow_trace.status == FlowStatus::Completed;
    report.verdict_bool("completed", completed);
    let end = flow_trace.points.last().expect("a trace has at least its start");
    let mut cert = json!({
        "status": status_json(&flow_trace.status),
        "samples": flow_trace.points.len(),
        "endpoint": {
            "t": [flow_trace.times.last().unwrap().re, flow_trace.times.last().unwrap().im],
            "x": [end.x.re, end.x.im],
            "y": [end.y.re, end.y.im],
        },
    });
    if let Some(d) = flow_trace.conserved_drift {
        cert["conserved_drift"] = json!(d);
        report.verdict_exact("conserved_drift", format!("{d:.3e}"));
    }
    let mut verified = completed;
    if exact {
        let spec = source
            .spec
            .as_ref()
            .ok_or_else(|| anyhow!("--exact needs a family specification"))?;
        let closed = ExactFlow::new(spec, z0)?;
        let target = *nodes.last().unwrap();
        let at = closed.at(target);
        let denom = at.sup_norm().max(1.0);
        let dev = ((end.x - at.x).norm().max((end.y - at.y).norm())) / denom;
        let agree = completed && dev < agree_tol;
        report.verdict_bool("exact_matches_numeric", agree);
        cert["exact_endpoint"] = json!({ "x": [at.x.re, at.x.im], "y": [at.y.re, at.y.im] });
        cert["exact_deviation"] = json!(dev);
        verified = verified && agree;
    }
    report.certificates(cert);
    if let FlowStatus::Blowup { at } = flow_trace.status {
        report.diagnostic(format!("blow-up left the escape ball near t = {}", fmt_c(at)));
    }
    Ok(Outcome::Report(report, verified))
}

fn cmd_probe(
    field: &FieldArgs,
    family: &FamilyArgs,
    z0: &str,
    rmax: f64,
    rays: usize,
    tol: f64,
    conserved: Option<&str>,
) -> Result<Outcome> {
    let source = resolve_source(field, family)?;
    let z0 = parse_z0(z0)?;
    let mut report = Report::new("probe");
    report
        .input("field", &source.x)
        .input("z0", format!("{}, {}", fmt_c(z0.x), fmt_c(z0.y)))
        .input("rmax", rmax)
        .input("rays", rays);
    if let Some(spec) = &source.spec {
        report.input("family", spec_to_json(spec).to_string());
    }
    let invariant = resolve_invariant(conserved, &source, &mut report)?;
    let probe = completeness_probe(&source.x, z0, rmax, rays, tol, invariant.as_ref())?;
    let all_completed = probe
        .rays
        .iter()
        .all(|r| matches!(r.status, FlowStatus::Completed));
    report.verdict_bool("all_rays_completed", all_completed);
    report.verdict_bool("blowup_detected", probe.blowup_detected);
    let mut max_drift: Option<f64> = None;
    let ray_payload: Vec<Value> = probe
        .rays
        .iter()
        .map(|r| {
            if let Some(d) = r.conserved_drift {
                max_drift = Some(max_drift.map_or(d, |m| m.max(d)));
            }
            json!({
                "theta": r.theta,
                "status": status_json(&r.status),
                "reached": r.reached,
                "conserved_drift": r.conserved_drift,
            })
        })
        .collect();
    if let Some(d) = max_drift {
        report.verdict_exact("max_conserved_drift", format!("{d:.3e}"));
    }
    report.certificates(json!({ "rays": ray_payload }));
    if probe.blowup_detected {
        report.diagnostic("a blow-up ray certifies that the field is incomplete");
    } else if all_completed {
        report.diagnostic(
            "all rays completed: numerical evidence only, not a completeness certificate",
        );
    }
    Ok(Outcome::Report(report, all_completed))
}
