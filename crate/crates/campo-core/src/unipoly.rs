//! Univariate Laurent polynomials over the Gaussian rationals.
//!
//! These carry the scalar coefficient data of field families: twist
//! coefficients a(x), b(x), the deformation p(x), and multiplier
//! coefficients λ(z). Exponents may be negative.

use crate::error::{Error, Result};
use crate::num::{c_int, c_one, c_to_f64, c_zero, CNum};
use crate::poly::{pow_c64, pow_cnum, LaurentPoly2, Vars};
use num_complex::Complex64;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    var: String,
    terms: BTreeMap<i64, CNum>,
}

impl UniPoly {
    pub fn zero(var: &str) -> Self {
        UniPoly { var: var.to_string(), terms: BTreeMap::new() }
    }

    pub fn constant(var: &str, c: CNum) -> Self {
        let mut p = Self::zero(var);
        p.add_term(0, c);
        p
    }

    pub fn var(var: &str) -> Self {
        let mut p = Self::zero(var);
        p.add_term(1, c_one());
        p
    }

    pub fn monomial(var: &str, e: i64, c: CNum) -> Self {
        let mut p = Self::zero(var);
        p.add_term(e, c);
        p
    }

    /// Build from (exponent, coefficient) pairs.
    pub fn from_terms(var: &str, terms: impl IntoIterator<Item = (i64, CNum)>) -> Self {
        let mut p = Self::zero(var);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: CNum) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn var_name(&self) -> &str {
        &self.var
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &CNum)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&0))
    }

    pub fn constant_value(&self) -> Option<CNum> {
        if self.is_zero() {
            return Some(c_zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn coeff(&self, e: i64) -> CNum {
        self.terms.get(&e).cloned().unwrap_or_else(c_zero)
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Lowest exponent with a nonzero coefficient (the order at the origin).
    pub fn ord(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| *e >= 0)
    }

    pub fn eval_at_zero(&self) -> Result<CNum> {
        if self.ord().is_some_and(|o| o < 0) {
            return Err(Error::Domain(format!(
                "{} has a pole at {} = 0",
                self, self.var
            )));
        }
        Ok(self.coeff(0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            var: self.var.clone(),
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.var);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &CNum) -> Self {
        if c.is_zero() {
            return Self::zero(&self.var);
        }
        UniPoly {
            var: self.var.clone(),
            terms: self.terms.iter().map(|(e, k)| (*e, k.clone() * c.clone())).collect(),
        }
    }

    pub fn shifted(&self, de: i64) -> Self {
        UniPoly {
            var: self.var.clone(),
            terms: self.terms.iter().map(|(e, c)| (e + de, c.clone())).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(&self.var);
        for (e, c) in &self.terms {
            if *e != 0 {
                out.add_term(e - 1, c.clone() * c_int(*e));
            }
        }
        out
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            acc += c_to_f64(c) * pow_c64(z, *e);
        }
        acc
    }

    pub fn eval_exact(&self, z: &CNum) -> CNum {
        let mut acc = c_zero();
        for (e, c) in &self.terms {
            acc += c.clone() * pow_cnum(z, *e);
        }
        acc
    }

    /// Substitute a bivariate value for the variable. Negative exponents of
    /// `self` require the image to be an invertible monomial.
    pub fn eval_poly(&self, image: &LaurentPoly2) -> Result<LaurentPoly2> {
        let mut acc = LaurentPoly2::zero(image.vars().clone());
        for (e, c) in &self.terms {
            let p = image.pow(*e)?;
            acc = acc.add(&p.scale(c));
        }
        Ok(acc)
    }

    /// View this polynomial in one slot of a bivariate variable pair.
    pub fn to_bivariate(&self, vars: Vars, idx: usize) -> LaurentPoly2 {
        let mut acc = LaurentPoly2::zero(vars.clone());
        for (e, c) in &self.terms {
            let (a, b) = if idx == 0 { (*e, 0) } else { (0, *e) };
            acc = acc.add(&LaurentPoly2::monomial(vars.clone(), a, b, c.clone()));
        }
        acc
    }

    /// Substitute z ↦ z^k (k ≥ 1).
    pub fn stretch(&self, k: i64) -> Self {
        assert!(k >= 1);
        UniPoly {
            var: self.var.clone(),
            terms: self.terms.iter().map(|(e, c)| (e * k, c.clone())).collect(),
        }
    }

    pub fn rename(&self, var: &str) -> Self {
        UniPoly { var: var.to_string(), terms: self.terms.clone() }
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // the second name never prints: a univariate never mentions it
        let vars = Vars::new(&self.var, "_unused_");
        write!(f, "{}", self.to_bivariate(vars, 0))
    }
}
