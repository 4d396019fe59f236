//! Rational functions in two variables over the Gaussian rationals.
//!
//! Values are kept in a canonical form so that structural equality decides
//! mathematical equality:
//!   - the denominator is a plain polynomial, monic in graded-lex order,
//!     with no monomial factor (monomial units are pushed into the
//!     numerator, which is allowed to be a Laurent polynomial);
//!   - numerator and denominator share no polynomial factor.

use crate::error::{Error, Result};
use crate::num::{c_one, CNum};
use crate::poly::{gcd2, LaurentPoly2, Vars};
use crate::unipoly::UniPoly;
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFn2 {
    num: LaurentPoly2,
    den: LaurentPoly2,
}

impl RationalFn2 {
    pub fn new(num: LaurentPoly2, den: LaurentPoly2) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("rational function".into()));
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: LaurentPoly2, den: LaurentPoly2) -> Self {
        let vars = num.vars().clone();
        if num.is_zero() {
            return RationalFn2 { num, den: LaurentPoly2::one(vars) };
        }
        // split off monomial corners
        let (na, nb) = num.min_exponents().unwrap();
        let (da, db) = den.min_exponents().unwrap();
        let n0 = num.shifted(-na, -nb);
        let d0 = den.shifted(-da, -db);
        // cancel the polynomial gcd
        let g = gcd2(&n0, &d0);
        let (n1, d1) = if g.is_constant() {
            (n0, d0)
        } else {
            (n0.div_exact(&g).expect("gcd divides"), d0.div_exact(&g).expect("gcd divides"))
        };
        // monic denominator; surplus scalar and monomial units go upstairs
        let lc = d1.leading_coeff().expect("nonzero denominator");
        let den = d1.scale(&(c_one() / lc.clone()));
        let num = n1.shifted(na - da, nb - db).scale(&(c_one() / lc));
        RationalFn2 { num, den }
    }

    pub fn zero(vars: Vars) -> Self {
        RationalFn2 {
            num: LaurentPoly2::zero(vars.clone()),
            den: LaurentPoly2::one(vars),
        }
    }

    pub fn one(vars: Vars) -> Self {
        Self::from_laurent(LaurentPoly2::one(vars))
    }

    pub fn constant(vars: Vars, c: CNum) -> Self {
        Self::from_laurent(LaurentPoly2::constant(vars, c))
    }

    pub fn var(vars: Vars, idx: usize) -> Self {
        Self::from_laurent(LaurentPoly2::var(vars, idx))
    }

    pub fn from_laurent(num: LaurentPoly2) -> Self {
        let one = LaurentPoly2::one(num.vars().clone());
        RationalFn2 { num, den: one }
    }

    pub fn from_unipoly(p: &UniPoly, vars: Vars, idx: usize) -> Self {
        Self::from_laurent(p.to_bivariate(vars, idx))
    }

    pub fn numerator(&self) -> &LaurentPoly2 {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly2 {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<CNum> {
        if self.den.is_one_poly() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// The value as a Laurent polynomial, if the denominator is trivial.
    pub fn as_laurent(&self) -> Option<&LaurentPoly2> {
        if self.den.is_one_poly() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_one_poly()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one_poly() && self.num.is_polynomial()
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        Self::reduce(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        RationalFn2 { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &CNum) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars().clone());
        }
        RationalFn2 { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero("rational function".into()));
        }
        Ok(Self::reduce(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.vars().clone()).div(self)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one(self.vars().clone()));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.vars().clone());
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self, idx: usize) -> Self {
        let n = self.num.derivative(idx).mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(idx)));
        Self::reduce(n, self.den.mul(&self.den))
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.num.eval(x, y) / self.den.eval(x, y)
    }

    pub fn eval_exact(&self, x: &CNum, y: &CNum) -> Result<CNum> {
        let d = self.den.eval_exact(x, y);
        if d.is_zero() {
            return Err(Error::DivisionByZero("denominator vanishes at the point".into()));
        }
        Ok(self.num.eval_exact(x, y) / d)
    }

    /// Substitute rational functions for both variables.
    pub fn substitute(&self, ix: &Self, iy: &Self) -> Result<Self> {
        let n = subst_laurent(&self.num, ix, iy)?;
        let d = subst_laurent(&self.den, ix, iy)?;
        n.div(&d)
    }

    /// If the value is a univariate polynomial in the given slot, extract it.
    pub fn to_unipoly(&self, idx: usize) -> Option<UniPoly> {
        let p = self.as_laurent()?;
        let name = if idx == 0 { &p.vars().0 } else { &p.vars().1 };
        let mut out = UniPoly::zero(name);
        for (m, c) in p.terms() {
            let (e, other) = if idx == 0 { (m.a, m.b) } else { (m.b, m.a) };
            if other != 0 {
                return None;
            }
            out.add_term(e, c.clone());
        }
        Some(out)
    }

    pub fn with_vars(&self, vars: Vars) -> Self {
        RationalFn2 {
            num: self.num.with_vars(vars.clone()),
            den: self.den.with_vars(vars),
        }
    }
}

/// Substitute rational functions for the variables of a Laurent polynomial.
pub fn subst_laurent(
    p: &LaurentPoly2,
    ix: &RationalFn2,
    iy: &RationalFn2,
) -> Result<RationalFn2> {
    let vars = ix.vars().clone();
    let mut acc = RationalFn2::zero(vars.clone());
    for (m, c) in p.terms() {
        let t = ix.pow(m.a)?.mul(&iy.pow(m.b)?).scale(c);
        acc = acc.add(&t);
    }
    Ok(acc)
}

impl LaurentPoly2 {
    /// True for the constant polynomial 1.
    pub fn is_one_poly(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }
}

impl fmt::Display for RationalFn2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            return write!(f, "{}", self.num);
        }
        let ns = self.num.to_string();
        let ds = self.den.to_string();
        let nw = if self.num.num_terms() > 1 { format!("({ns})") } else { ns };
        // a one-term denominator still needs parens when it carries a
        // coefficient or several factors, so parenthesize unless it is a
        // bare power of one variable
        let bare = self.den.num_terms() == 1
            && self
                .den
                .leading()
                .is_some_and(|(m, c)| c.is_one() && (m.a == 0) != (m.b == 0));
        let dw = if bare { ds } else { format!("({ds})") };
        write!(f, "{nw}/{dw}")
    }
}
