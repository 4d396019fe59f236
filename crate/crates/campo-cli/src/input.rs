//! Input plumbing: inline field shorthand, field files, family parameters
//! from flags or JSON, and numeric literals for flow commands.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use campo_core::family::FamilySpec;
use campo_core::field::PlanarField;
use campo_core::flow::{CPoint, C64};
use campo_core::num::{c_display, CNum};
use campo_core::parse::{parse_exppoly, parse_unipoly};
use campo_core::poly::Vars;
use campo_core::unipoly::UniPoly;
use campo_core::ExpPoly;
use serde_json::{json, Value};

// ---- fields --------------------------------------------------------------

/// Parse the inline shorthand `x:<expr>, y:<expr>`.
pub fn parse_inline_field(src: &str) -> Result<PlanarField> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != 2 {
        bail!("the field shorthand is \"x:<expr>, y:<expr>\" (exactly one comma)");
    }
    let p = parts[0]
        .trim()
        .strip_prefix("x:")
        .ok_or_else(|| anyhow!("the first component must start with \"x:\""))?;
    let q = parts[1]
        .trim()
        .strip_prefix("y:")
        .ok_or_else(|| anyhow!("the second component must start with \"y:\""))?;
    let vars = Vars::xy();
    let p = parse_exppoly(p, &vars).context("x-component")?;
    let q = parse_exppoly(q, &vars).context("y-component")?;
    Ok(PlanarField::new(vars, p, q))
}

/// Load a field from the JSON document `{"vars":["x","y"],"P":...,"Q":...}`.
pub fn parse_field_file(path: &Path) -> Result<PlanarField> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", path.display()))?;
    let vars = doc
        .get("vars")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("the field document needs \"vars\": [\"x\", \"y\"]"))?;
    if vars.len() != 2 {
        bail!("\"vars\" must list exactly two variable names");
    }
    let (va, vb) = (
        vars[0].as_str().ok_or_else(|| anyhow!("variable names must be strings"))?,
        vars[1].as_str().ok_or_else(|| anyhow!("variable names must be strings"))?,
    );
    if va.is_empty() || vb.is_empty() || va == vb {
        bail!("\"vars\" must be two distinct nonempty names");
    }
    let vars = Vars::new(va, vb);
    let read = |key: &str| -> Result<ExpPoly> {
        let src = doc
            .get(key)
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("the field document needs \"{key}\" as an expression string"))?;
        parse_exppoly(src, &vars).with_context(|| format!("component {key}"))
    };
    let p = read("P")?;
    let q = read("Q")?;
    Ok(PlanarField::new(vars, p, q))
}

// ---- numeric literals ------------------------------------------------------

/// Parse a complex double literal: `2`, `-1.5`, `i`, `-i`, `3+4i`, `1e-3-2i`.
pub fn parse_c64(src: &str) -> Result<C64> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty complex literal");
    }
    let parse_part = |p: &str, what: &str| -> Result<f64> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p
                .parse::<f64>()
                .map_err(|_| anyhow!("cannot parse \"{p}\" as the {what} part of \"{src}\"")),
        }
    };
    if let Some(body) = s.strip_suffix('i') {
        // split at the last top-level sign that is not an exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re = parse_part(&body[..idx], "real")?;
                let im = parse_part(&body[idx..], "imaginary")?;
                Ok(C64::new(re, im))
            }
            None => Ok(C64::new(0.0, parse_part(body, "imaginary")?)),
        }
    } else {
        Ok(C64::new(parse_part(&s, "real")?, 0.0))
    }
}

/// Parse the start point `"<x>, <y>"` with complex double components.
pub fn parse_z0(src: &str) -> Result<CPoint> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != 2 {
        bail!("the start point is \"<x>, <y>\" (exactly one comma)");
    }
    Ok(CPoint::new(parse_c64(parts[0])?, parse_c64(parts[1])?))
}

// ---- exact expressions ------------------------------------------------------

/// Parse a univariate Laurent polynomial, inferring the variable name from
/// the expression (defaulting to `z` for constants).
pub fn parse_unipoly_any(src: &str) -> Result<UniPoly> {
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut cur = String::new();
    for ch in src.chars().chain(std::iter::once(' ')) {
        if ch.is_ascii_alphabetic() || (!cur.is_empty() && ch.is_ascii_alphanumeric()) {
            cur.push(ch);
        } else if !cur.is_empty() {
            if cur != "i" && cur != "exp" {
                names.insert(cur.clone());
            }
            cur.clear();
        }
    }
    let var = match names.len() {
        0 => "z".to_string(),
        1 => names.into_iter().next().unwrap(),
        _ => bail!(
            "expected a univariate expression, found variables {}",
            names.into_iter().collect::<Vec<_>>().join(", ")
        ),
    };
    Ok(parse_unipoly(src, &var)?)
}

/// Parse an exact complex scalar such as `1`, `-2/3`, `1 + i/2`.
pub fn parse_scalar(src: &str) -> Result<CNum> {
    let p = parse_unipoly_any(src)?;
    if !p.is_constant() {
        bail!("expected a constant, got \"{src}\"");
    }
    Ok(p.constant_value().expect("constant polynomial has a value"))
}

// ---- family specifications ---------------------------------------------------

const INT_KEYS: [&str; 7] = ["m", "n", "l", "kappa", "delta", "N", "eps"];
const EXPR_KEYS: [&str; 8] = ["p", "a", "b", "c", "d", "lambda", "mu", "f"];

/// Family parameters gathered from flags or a JSON object, before the
/// tag-specific interpretation.
pub struct RawFamily {
    pub tag: String,
    ints: BTreeMap<String, i64>,
    exprs: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl RawFamily {
    pub fn new(tag: &str) -> Self {
        RawFamily {
            tag: tag.to_string(),
            ints: BTreeMap::new(),
            exprs: BTreeMap::new(),
            used: BTreeSet::new(),
        }
    }

    pub fn set_int(&mut self, key: &str, value: Option<i64>) {
        if let Some(v) = value {
            self.ints.insert(key.to_string(), v);
        }
    }

    pub fn set_expr(&mut self, key: &str, value: &Option<String>) {
        if let Some(v) = value {
            self.exprs.insert(key.to_string(), v.clone());
        }
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let obj = doc
            .as_object()
            .ok_or_else(|| anyhow!("a family specification is a JSON object"))?;
        let tag = obj
            .get("tag")
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("a family specification needs \"tag\""))?;
        let mut raw = RawFamily::new(tag);
        for (key, value) in obj {
            if key == "tag" {
                continue;
            }
            let canon = match key.as_str() {
                "ell" => "l",
                "big_n" => "N",
                other => other,
            };
            if INT_KEYS.contains(&canon) {
                let v = value
                    .as_i64()
                    .ok_or_else(|| anyhow!("parameter \"{key}\" must be an integer"))?;
                raw.ints.insert(canon.to_string(), v);
            } else if EXPR_KEYS.contains(&canon) {
                let v = match value {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => bail!("parameter \"{key}\" must be an expression string"),
                };
                raw.exprs.insert(canon.to_string(), v);
            } else {
                bail!("unknown family parameter \"{key}\"");
            }
        }
        Ok(raw)
    }

    fn req_int(&mut self, key: &str) -> Result<i64> {
        self.used.insert(key.to_string());
        self.ints
            .get(key)
            .copied()
            .ok_or_else(|| anyhow!("family {} needs the integer parameter \"{key}\"", self.tag))
    }

    fn int_or(&mut self, key: &str, default: i64) -> i64 {
        self.used.insert(key.to_string());
        self.ints.get(key).copied().unwrap_or(default)
    }

    fn req_poly(&mut self, key: &str) -> Result<UniPoly> {
        self.used.insert(key.to_string());
        let src = self
            .exprs
            .get(key)
            .ok_or_else(|| anyhow!("family {} needs the parameter \"{key}\"", self.tag))?;
        parse_unipoly_any(src).with_context(|| format!("parameter \"{key}\""))
    }

    fn poly_or_zero(&mut self, key: &str) -> Result<UniPoly> {
        self.used.insert(key.to_string());
        match self.exprs.get(key) {
            Some(src) => parse_unipoly_any(src).with_context(|| format!("parameter \"{key}\"")),
            None => Ok(UniPoly::zero("x")),
        }
    }

    fn req_scalar(&mut self, key: &str) -> Result<CNum> {
        self.used.insert(key.to_string());
        let src = self
            .exprs
            .get(key)
            .ok_or_else(|| anyhow!("family {} needs the parameter \"{key}\"", self.tag))?;
        parse_scalar(src).with_context(|| format!("parameter \"{key}\""))
    }

    fn opt_f(&mut self) -> Result<Option<ExpPoly>> {
        self.used.insert("f".to_string());
        match self.exprs.get("f") {
            Some(src) => Ok(Some(
                parse_exppoly(src, &Vars::xy()).context("parameter \"f\"")?,
            )),
            None => Ok(None),
        }
    }

    /// Interpret the collected parameters for the tag, rejecting leftovers.
    pub fn into_spec(mut self) -> Result<FamilySpec> {
        let spec = match self.tag.as_str() {
            "S1" => FamilySpec::S1 { a: self.req_poly("a")?, b: self.req_poly("b")? },
            "S2" => FamilySpec::S2 {
                lambda: self.req_scalar("lambda")?,
                mu: self.req_scalar("mu")?,
            },
            "S3" => FamilySpec::S3 {
                lambda: self.req_scalar("lambda")?,
                m: self.req_int("m")?,
            },
            "S4" => FamilySpec::S4 {
                lambda: self.req_poly("lambda")?,
                m: self.req_int("m")?,
                n: self.req_int("n")?,
            },
            "S5" => FamilySpec::S5 {
                lambda: self.req_poly("lambda")?,
                m: self.req_int("m")?,
                n: self.req_int("n")?,
                ell: self.req_int("l")?,
                p: self.req_poly("p")?,
            },
            "BI" => FamilySpec::BI {
                c: self.req_scalar("c")?,
                d: self.req_scalar("d")?,
                a: self.req_poly("a")?,
                b: self.req_poly("b")?,
            },
            "BII" => FamilySpec::BII {
                a: self.req_scalar("a")?,
                lambda: self.req_poly("lambda")?,
                m: self.req_int("m")?,
                n: self.req_int("n")?,
            },
            "BIII" => FamilySpec::BIII {
                a: self.req_scalar("a")?,
                lambda: self.req_poly("lambda")?,
                m: self.req_int("m")?,
                n: self.req_int("n")?,
                ell: self.req_int("l")?,
                p: self.req_poly("p")?,
            },
            "AI" => FamilySpec::AI {
                f: self.opt_f()?,
                big_n: self.req_int("N")?,
                eps: self.req_int("eps")?,
                c: self.req_scalar("c")?,
                a: self.req_poly("a")?,
                b: self.poly_or_zero("b")?,
            },
            "AII" => FamilySpec::AII {
                f: self.opt_f()?,
                kappa: self.req_int("kappa")?,
                delta: self.req_int("delta")?,
                lambda: self.req_poly("lambda")?,
                m: self.req_int("m")?,
                n: self.req_int("n")?,
                a: self.req_scalar("a")?,
            },
            "AIII" => FamilySpec::AIII {
                f: self.opt_f()?,
                kappa: self.req_int("kappa")?,
                delta: self.req_int("delta")?,
                lambda: self.req_poly("lambda")?,
                m: self.req_int("m")?,
                n: self.req_int("n")?,
                ell: self.req_int("l")?,
                p: self.req_poly("p")?,
                a: self.req_scalar("a")?,
            },
            "B" => FamilySpec::B {
                f: self.opt_f()?,
                m: self.req_int("m")?,
                n: self.req_int("n")?,
                ell: self.int_or("l", 0),
                p: self.poly_or_zero("p")?,
                c: self.req_scalar("c")?,
                a: self.req_poly("a")?,
            },
            other => bail!(
                "unknown family tag \"{other}\" (expected S1..S5, BI, BII, BIII, AI, AII, AIII, or B)"
            ),
        };
        let leftovers: Vec<String> = self
            .ints
            .keys()
            .chain(self.exprs.keys())
            .filter(|k| !self.used.contains(*k))
            .cloned()
            .collect();
        if !leftovers.is_empty() {
            bail!(
                "parameter(s) {} do not apply to family {}",
                leftovers.join(", "),
                self.tag
            );
        }
        Ok(spec)
    }
}

/// Canonical JSON echo of a family specification.
pub fn spec_to_json(spec: &FamilySpec) -> Value {
    let f_json = |f: &Option<ExpPoly>| match f {
        Some(f) => Value::String(f.to_string()),
        None => Value::Null,
    };
    match spec {
        FamilySpec::S1 { a, b } => json!({"tag": "S1", "a": a.to_string(), "b": b.to_string()}),
        FamilySpec::S2 { lambda, mu } => {
            json!({"tag": "S2", "lambda": c_display(lambda), "mu": c_display(mu)})
        }
        FamilySpec::S3 { lambda, m } => {
            json!({"tag": "S3", "lambda": c_display(lambda), "m": m})
        }
        FamilySpec::S4 { lambda, m, n } => {
            json!({"tag": "S4", "lambda": lambda.to_string(), "m": m, "n": n})
        }
        FamilySpec::S5 { lambda, m, n, ell, p } => json!({
            "tag": "S5", "lambda": lambda.to_string(), "m": m, "n": n, "l": ell,
            "p": p.to_string()
        }),
        FamilySpec::BI { c, d, a, b } => json!({
            "tag": "BI", "c": c_display(c), "d": c_display(d),
            "a": a.to_string(), "b": b.to_string()
        }),
        FamilySpec::BII { a, lambda, m, n } => json!({
            "tag": "BII", "a": c_display(a), "lambda": lambda.to_string(), "m": m, "n": n
        }),
        FamilySpec::BIII { a, lambda, m, n, ell, p } => json!({
            "tag": "BIII", "a": c_display(a), "lambda": lambda.to_string(),
            "m": m, "n": n, "l": ell, "p": p.to_string()
        }),
        FamilySpec::AI { f, big_n, eps, c, a, b } => json!({
            "tag": "AI", "f": f_json(f), "N": big_n, "eps": eps,
            "c": c_display(c), "a": a.to_string(), "b": b.to_string()
        }),
        FamilySpec::AII { f, kappa, delta, lambda, m, n, a } => json!({
            "tag": "AII", "f": f_json(f), "kappa": kappa, "delta": delta,
            "lambda": lambda.to_string(), "m": m, "n": n, "a": c_display(a)
        }),
        FamilySpec::AIII { f, kappa, delta, lambda, m, n, ell, p, a } => json!({
            "tag": "AIII", "f": f_json(f), "kappa": kappa, "delta": delta,
            "lambda": lambda.to_string(), "m": m, "n": n, "l": ell,
            "p": p.to_string(), "a": c_display(a)
        }),
        FamilySpec::B { f, m, n, ell, p, c, a } => json!({
            "tag": "B", "f": f_json(f), "m": m, "n": n, "l": ell,
            "p": p.to_string(), "c": c_display(c), "a": a.to_string()
        }),
    }
}
