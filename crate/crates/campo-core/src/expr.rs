//! Exponential polynomials: finite sums Σ Rₖ·exp(Eₖ) with rational-function
//! coefficients Rₖ and Laurent-polynomial exponents Eₖ.
//!
//! Distinct exponents index distinct terms, so the representation is
//! canonical and structural equality decides equality in the ring. The
//! rational part is the term with exponent 0.

use crate::error::{Error, Result};
use crate::num::CNum;
use crate::poly::{LaurentPoly2, Vars};
use crate::ratfn::{subst_laurent, RationalFn2};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExpPoly {
    vars: Vars,
    terms: BTreeMap<LaurentPoly2, RationalFn2>,
}

impl ExpPoly {
    pub fn zero(vars: Vars) -> Self {
        ExpPoly { vars, terms: BTreeMap::new() }
    }

    pub fn one(vars: Vars) -> Self {
        Self::from_ratfn(RationalFn2::one(vars))
    }

    pub fn constant(vars: Vars, c: CNum) -> Self {
        Self::from_ratfn(RationalFn2::constant(vars, c))
    }

    pub fn var(vars: Vars, idx: usize) -> Self {
        Self::from_ratfn(RationalFn2::var(vars, idx))
    }

    pub fn from_ratfn(r: RationalFn2) -> Self {
        let vars = r.vars().clone();
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(LaurentPoly2::zero(vars.clone()), r);
        }
        ExpPoly { vars, terms }
    }

    pub fn from_laurent(p: LaurentPoly2) -> Self {
        Self::from_ratfn(RationalFn2::from_laurent(p))
    }

    /// exp(e) as a value.
    pub fn exp_of(e: LaurentPoly2) -> Self {
        let vars = e.vars().clone();
        let mut terms = BTreeMap::new();
        terms.insert(e, RationalFn2::one(vars.clone()));
        ExpPoly { vars, terms }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LaurentPoly2, &RationalFn2)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The purely rational value, if no genuine exponential term is present.
    pub fn as_ratfn(&self) -> Option<RationalFn2> {
        match self.terms.len() {
            0 => Some(RationalFn2::zero(self.vars.clone())),
            1 => {
                let (e, r) = self.terms.iter().next().unwrap();
                if e.is_zero() {
                    Some(r.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_ratfn(&self) -> bool {
        self.as_ratfn().is_some()
    }

    fn insert(&mut self, e: LaurentPoly2, r: RationalFn2) {
        if r.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(r);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&r);
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, r) in &other.terms {
            out.insert(e.clone(), r.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ExpPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, r)| (e.clone(), r.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (e1, r1) in &self.terms {
            for (e2, r2) in &other.terms {
                out.insert(e1.add(e2), r1.mul(r2));
            }
        }
        out
    }

    pub fn mul_ratfn(&self, r: &RationalFn2) -> Self {
        self.mul(&Self::from_ratfn(r.clone()))
    }

    pub fn scale(&self, c: &CNum) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (e, r) in &self.terms {
            out.insert(e.clone(), r.scale(c));
        }
        out
    }

    /// Integer power; negative exponents require a single-term value.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one(self.vars.clone()));
        }
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Self::one(self.vars.clone());
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Reciprocal of a single-term value R·exp(E) ↦ R⁻¹·exp(−E).
    pub fn inv(&self) -> Result<Self> {
        if self.terms.is_empty() {
            return Err(Error::DivisionByZero("exponential polynomial".into()));
        }
        if self.terms.len() != 1 {
            return Err(Error::Domain(
                "cannot invert a sum of exponential terms".into(),
            ));
        }
        let (e, r) = self.terms.iter().next().unwrap();
        let mut out = Self::zero(self.vars.clone());
        out.insert(e.neg(), r.inv()?);
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if let Some(r) = other.as_ratfn() {
            if r.is_zero() {
                return Err(Error::DivisionByZero("exponential polynomial".into()));
            }
            let inv = r.inv()?;
            return Ok(self.mul_ratfn(&inv));
        }
        Ok(self.mul(&other.inv()?))
    }

    /// d/dxᵢ, term by term: (R·exp(E))' = (R' + R·E')·exp(E).
    pub fn derivative(&self, idx: usize) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (e, r) in &self.terms {
            let de = RationalFn2::from_laurent(e.derivative(idx));
            let coeff = r.derivative(idx).add(&r.mul(&de));
            out.insert(e.clone(), coeff);
        }
        out
    }

    /// Substitute rational functions for both variables. Exponents must stay
    /// Laurent-polynomial under the substitution.
    pub fn substitute(&self, ix: &RationalFn2, iy: &RationalFn2) -> Result<Self> {
        let vars = ix.vars().clone();
        let mut out = Self::zero(vars.clone());
        for (e, r) in &self.terms {
            let e_img = subst_laurent(e, ix, iy)?;
            let Some(e_new) = e_img.as_laurent().cloned() else {
                return Err(Error::NotPolynomial(format!(
                    "exponent {} does not stay polynomial under the substitution",
                    e
                )));
            };
            out.insert(e_new, r.substitute(ix, iy)?);
        }
        Ok(out)
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, r) in &self.terms {
            acc += r.eval(x, y) * e.eval(x, y).exp();
        }
        acc
    }

    pub fn with_vars(&self, vars: Vars) -> Self {
        ExpPoly {
            vars: vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, r)| (e.with_vars(vars.clone()), r.with_vars(vars.clone())))
                .collect(),
        }
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, r) in &self.terms {
            let piece = render_term(e, r);
            if first {
                write!(f, "{piece}")?;
                first = false;
            } else if let Some(rest) = piece.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {piece}")?;
            }
        }
        Ok(())
    }
}

fn render_term(e: &LaurentPoly2, r: &RationalFn2) -> String {
    if e.is_zero() {
        return r.to_string();
    }
    let exp_part = format!("exp({e})");
    if let Some(c) = r.constant_value() {
        use num_traits::One;
        if c.is_one() {
            return exp_part;
        }
        if (-c.clone()).is_one() {
            return format!("-{exp_part}");
        }
    }
    let rs = r.to_string();
    // a sum must be parenthesized before '*'; a single product is fine
    if rs.contains(" + ") || rs.contains(" - ") {
        format!("({rs})*{exp_part}")
    } else {
        format!("{rs}*{exp_part}")
    }
}
