//! Parser for the expression language shared by the library and the CLI.
//!
//! Grammar (whitespace-insensitive, explicit `*` required):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-'* power
//! power  := atom ('^' exponent)?
//! atom   := INT | 'i' | IDENT | '(' expr ')' | 'exp' '(' expr ')'
//! exponent := '-'? INT | '(' '-'? INT ')'
//! ```
//!
//! `i` is the imaginary unit and `exp` the exponential; both are reserved.
//! The canonical printers of the value types emit exactly this language, so
//! print → parse is the identity.

use crate::error::{Error, Result};
use crate::expr::ExpPoly;
use crate::num::{c_i, CNum};
use crate::poly::{LaurentPoly2, Vars};
use crate::ratfn::RationalFn2;
use crate::unipoly::UniPoly;
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lit = &src[start..i];
                let v: BigInt = lit.parse().expect("digit run parses");
                out.push((Tok::Int(v), start));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a Vars,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse { pos, msg: format!("expected {what}") }),
        }
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos, msg: msg.into() })
    }

    fn lift<T>(&self, pos: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse { pos, msg },
            other => Error::Parse { pos, msg: other.to_string() },
        })
    }

    fn expr(&mut self) -> Result<ExpPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExpPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    let pos = self.here();
                    self.bump();
                    let rhs = self.unary()?;
                    let q = acc.div(&rhs);
                    acc = self.lift(pos, q)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<ExpPoly> {
        let mut neg = false;
        while matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            neg = !neg;
        }
        let v = self.power()?;
        Ok(if neg { v.neg() } else { v })
    }

    fn power(&mut self) -> Result<ExpPoly> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let pos = self.here();
            self.bump();
            let e = self.exponent()?;
            let p = base.pow(e);
            return self.lift(pos, p);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let pos = self.here();
        let parenthesized = matches!(self.peek(), Some(Tok::LParen));
        if parenthesized {
            self.bump();
        }
        let mut sign = 1i64;
        while matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            sign = -sign;
        }
        let v = match self.bump() {
            Some(Tok::Int(v)) => v,
            _ => return self.err(pos, "expected an integer exponent"),
        };
        if parenthesized {
            self.expect(Tok::RParen, "')'")?;
        }
        let small: i64 = match v.try_into() {
            Ok(x) => x,
            Err(_) => return self.err(pos, "exponent out of range"),
        };
        Ok(sign * small)
    }

    fn atom(&mut self) -> Result<ExpPoly> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Int(v)) => {
                let c = CNum::new(BigRational::from_integer(v), BigRational::from_integer(0.into()));
                Ok(ExpPoly::constant(self.vars.clone(), c))
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "i" => Ok(ExpPoly::constant(self.vars.clone(), c_i())),
                "exp" => {
                    self.expect(Tok::LParen, "'(' after exp")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    let Some(r) = arg.as_ratfn() else {
                        return self.err(pos, "nested exponentials are not supported");
                    };
                    let Some(lp) = r.as_laurent().cloned() else {
                        return self.err(
                            pos,
                            "the argument of exp must be a Laurent polynomial",
                        );
                    };
                    Ok(ExpPoly::exp_of(lp))
                }
                _ => match self.vars.index_of(&name) {
                    Some(idx) => Ok(ExpPoly::var(self.vars.clone(), idx)),
                    None => self.err(
                        pos,
                        format!("unknown variable '{name}' (expected {})", self.vars),
                    ),
                },
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => self.err(pos, "expected a value"),
        }
    }
}

/// Parse an exponential polynomial in the given variable pair.
pub fn parse_exppoly(src: &str, vars: &Vars) -> Result<ExpPoly> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, vars, src_len: src.len() };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse { pos: p.here(), msg: "unexpected trailing input".into() });
    }
    Ok(v)
}

/// Parse a rational function (no exponential terms allowed).
pub fn parse_ratfn(src: &str, vars: &Vars) -> Result<RationalFn2> {
    let v = parse_exppoly(src, vars)?;
    v.as_ratfn().ok_or_else(|| Error::Parse {
        pos: 0,
        msg: "exponential term where a rational function was expected".into(),
    })
}

/// Parse a Laurent polynomial (no denominators, no exponentials).
pub fn parse_laurent(src: &str, vars: &Vars) -> Result<LaurentPoly2> {
    let r = parse_ratfn(src, vars)?;
    r.as_laurent().cloned().ok_or_else(|| Error::Parse {
        pos: 0,
        msg: "denominator where a Laurent polynomial was expected".into(),
    })
}

/// Parse a univariate Laurent polynomial in the named variable.
pub fn parse_unipoly(src: &str, var: &str) -> Result<UniPoly> {
    let aux = if var == "aux_" { "aux__" } else { "aux_" };
    let vars = Vars::new(var, aux);
    let r = parse_ratfn(src, &vars)?;
    r.to_unipoly(0).ok_or_else(|| Error::Parse {
        pos: 0,
        msg: format!("expected a Laurent polynomial in '{var}' alone"),
    })
}
