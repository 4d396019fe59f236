//! Scalar layer: exact rationals and Gaussian rationals.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt::Write as _;

/// Arbitrary-precision rational, always stored reduced with positive denominator.
pub type Rat = BigRational;

/// Gaussian rational a + b·i. Closed under +, −, ×, ÷ and conjugation.
pub type CNum = Complex<Rat>;

pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn c_zero() -> CNum {
    CNum::new(Rat::zero(), Rat::zero())
}

pub fn c_one() -> CNum {
    CNum::new(Rat::one(), Rat::zero())
}

pub fn c_i() -> CNum {
    CNum::new(Rat::zero(), Rat::one())
}

pub fn c_int(n: i64) -> CNum {
    CNum::new(rat_i64(n), Rat::zero())
}

pub fn c_rat(n: i64, d: i64) -> CNum {
    CNum::new(rat(n, d), Rat::zero())
}

pub fn c_from_rat(r: Rat) -> CNum {
    CNum::new(r, Rat::zero())
}

pub fn c_gauss(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> CNum {
    CNum::new(rat(re_n, re_d), rat(im_n, im_d))
}

/// Total order on Gaussian rationals (real part first) — used only to fix
/// canonical term order and leading-coefficient choices, not as a field order.
pub fn c_cmp(a: &CNum, b: &CNum) -> Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

pub fn c_to_f64(c: &CNum) -> num_complex::Complex64 {
    num_complex::Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical scalar rendering: `3`, `-3/2`, `i`, `-i`, `2*i`, `(1+2*i)`, `(1/2-i)`.
/// Mixed re/im values are parenthesized so they can be juxtaposed in products.
pub fn c_display(c: &CNum) -> String {
    if c.im.is_zero() {
        return fmt_rat(&c.re);
    }
    let im_part = |s: &mut String, im: &Rat, leading: bool| {
        let neg = im.is_negative();
        let a = im.abs();
        if neg {
            s.push('-');
        } else if !leading {
            s.push('+');
        }
        if a.is_one() {
            s.push('i');
        } else {
            let _ = write!(s, "{}*i", fmt_rat(&a));
        }
    };
    if c.re.is_zero() {
        let mut s = String::new();
        im_part(&mut s, &c.im, true);
        return s;
    }
    let mut s = String::from("(");
    s.push_str(&fmt_rat(&c.re));
    im_part(&mut s, &c.im, false);
    s.push(')');
    s
}

/// True when the value prints as a single unsigned token (no sign, no `+`),
/// so it can be used as a factor without extra parentheses.
pub fn c_is_plain(c: &CNum) -> bool {
    c.im.is_zero() && !c.re.is_negative() && c.re.denom().is_one()
}
