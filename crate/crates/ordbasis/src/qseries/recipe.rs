//! Symbolic recipes for q-series and their s-expression text form.
//!
//! Grammar (whitespace separated, `;` starts a line comment):
//!
//! ```text
//! expr   := atom | '(' head expr* ')'
//! head   := '+' | '-' | '*' | '/' | '^' | 'euler' | 'qpow' | 'pslice' | 'dq'
//! atom   := 'E4' | 'Delta' | 'J' | rational
//! rational := integer | integer '/' positive-integer
//! ```
//!
//! `(euler D E)` is `Π_{n≥1} (1 - q^{Dn})^E`, `(qpow K)` is `q^K`,
//! `(pslice A B)` is `Σ_{n≥0} p(An+B) q^n`, `(dq X)` is `d/dq`,
//! `(^ X K)` is an integer power (negative allowed), `(- X)` negates
//! and `(- X Y)` subtracts.

use super::laurent::LaurentSeries;
use super::{
    delta_series, eisenstein_e4, euler_product, j_series, partition_slice,
};
use crate::error::{Error, Result};
use crate::exact::QRat;
use num::{BigInt, One, Zero};

/// Precision tag for series that are exact (monomials, constants).
const EXACT: i64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesRecipe {
    /// `Π_{n≥1} (1 - q^{δn})^e`
    EulerProduct { delta: i64, exponent: i64 },
    /// `q^k`
    QPower(i64),
    E4,
    Delta,
    J,
    /// `Σ_{n≥0} p(an+b) q^n`
    PartitionSlice { a: i64, b: i64 },
    /// d/dq
    Derivative(Box<SeriesRecipe>),
    Scalar(QRat),
    Sum(Vec<SeriesRecipe>),
    Sub(Box<SeriesRecipe>, Box<SeriesRecipe>),
    Neg(Box<SeriesRecipe>),
    Product(Vec<SeriesRecipe>),
    Div(Box<SeriesRecipe>, Box<SeriesRecipe>),
    Pow(Box<SeriesRecipe>, i64),
}

impl SeriesRecipe {
    pub fn parse(text: &str) -> Result<SeriesRecipe> {
        let mut p = Parser {
            text: text.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let expr = p.expr()?;
        p.skip_ws();
        if p.pos != p.text.len() {
            return Err(p.err("trailing input after expression"));
        }
        Ok(expr)
    }

    /// Lower bound on the valuation of this subtree's series.
    fn val_bound(&self) -> i64 {
        use SeriesRecipe::*;
        match self {
            EulerProduct { .. } | E4 | PartitionSlice { .. } | Scalar(_) => 0,
            QPower(k) => *k,
            Delta => 1,
            J => -1,
            Derivative(x) => x.val_bound() - 1,
            Sum(xs) => xs.iter().map(|x| x.val_bound()).min().unwrap_or(0),
            Sub(a, b) => a.val_bound().min(b.val_bound()),
            Neg(x) => x.val_bound(),
            Product(xs) => xs.iter().map(|x| x.val_bound()).sum(),
            Div(a, b) => a.val_bound() - b.val_bound().max(0) - b.val_bound().min(0),
            Pow(x, k) => {
                let v = x.val_bound();
                (k * v).min(-(k * v).abs())
                // conservative: powers may dig below in either direction
            }
        }
    }

    /// Most negative valuation over all subtrees, used as the initial
    /// working-precision lift.
    fn min_intermediate(&self) -> i64 {
        use SeriesRecipe::*;
        let own = self.val_bound();
        let children: i64 = match self {
            Derivative(x) | Neg(x) | Pow(x, _) => x.min_intermediate(),
            Sum(xs) | Product(xs) => {
                xs.iter().map(|x| x.min_intermediate()).min().unwrap_or(0)
            }
            Sub(a, b) | Div(a, b) => a.min_intermediate().min(b.min_intermediate()),
            _ => 0,
        };
        own.min(children)
    }

    fn eval(&self, w: i64) -> Result<LaurentSeries> {
        use SeriesRecipe::*;
        Ok(match self {
            EulerProduct { delta, exponent } => {
                if *delta < 1 {
                    return Err(Error::Eval("EulerProduct requires δ ≥ 1".into()));
                }
                euler_product(*delta, *exponent, w.max(1))
            }
            QPower(k) => LaurentSeries::monomial(QRat::one(), *k, EXACT),
            E4 => eisenstein_e4(w.max(1)),
            Delta => delta_series(w.max(2)),
            J => j_series(w.max(1)),
            PartitionSlice { a, b } => partition_slice(*a, *b, w.max(1))?,
            Derivative(x) => x.eval(w + 1)?.derivative(),
            Scalar(c) => LaurentSeries::constant(c.clone(), EXACT),
            Sum(xs) => {
                let mut acc = LaurentSeries::zero(EXACT);
                for x in xs {
                    acc = acc.add(&x.eval(w)?);
                }
                acc
            }
            Sub(a, b) => a.eval(w)?.sub(&b.eval(w)?),
            Neg(x) => x.eval(w)?.neg(),
            Product(xs) => {
                let mut acc = LaurentSeries::one(EXACT);
                for x in xs {
                    acc = acc.mul(&x.eval(w)?);
                }
                acc
            }
            Div(a, b) => a.eval(w)?.mul(&b.eval(w)?.inv()?),
            Pow(x, k) => x.eval(w)?.pow(*k)?,
        })
    }
}

/// Evaluate a recipe to absolute precision at least `T`. The working
/// precision is lifted automatically: negative valuations in intermediate
/// factors eat absolute precision, so the evaluation retries with a
/// larger window until the output genuinely reaches `O(q^T)`.
pub fn evaluate_recipe(recipe: &SeriesRecipe, trunc: i64) -> Result<LaurentSeries> {
    let mut lift = (-recipe.min_intermediate()).max(0);
    for _ in 0..64 {
        let s = recipe.eval(trunc + lift)?;
        if s.trunc() >= trunc {
            return Ok(s);
        }
        lift += trunc - s.trunc();
    }
    Err(Error::Precision(
        "working precision did not converge while evaluating recipe".into(),
    ))
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        loop {
            while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.text.len() && self.text[self.pos] == b';' {
                while self.pos < self.text.len() && self.text[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len()
            && !self.text[self.pos].is_ascii_whitespace()
            && self.text[self.pos] != b'('
            && self.text[self.pos] != b')'
            && self.text[self.pos] != b';'
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a token"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .map_err(|_| self.err("invalid utf-8 in token"))
    }

    fn int(&mut self) -> Result<i64> {
        let pos = self.pos;
        let tok = self.token()?;
        tok.parse::<i64>().map_err(|_| Error::Parse {
            position: pos,
            message: format!("expected an integer, got `{tok}`"),
        })
    }

    fn expr(&mut self) -> Result<SeriesRecipe> {
        self.skip_ws();
        if self.pos >= self.text.len() {
            return Err(self.err("unexpected end of input"));
        }
        if self.text[self.pos] == b'(' {
            self.pos += 1;
            let node = self.form()?;
            self.skip_ws();
            if self.pos >= self.text.len() || self.text[self.pos] != b')' {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            return Ok(node);
        }
        if self.text[self.pos] == b')' {
            return Err(self.err("unexpected `)`"));
        }
        let pos = self.pos;
        let tok = self.token()?;
        match tok {
            "E4" => Ok(SeriesRecipe::E4),
            "Delta" => Ok(SeriesRecipe::Delta),
            "J" => Ok(SeriesRecipe::J),
            _ => parse_rational(tok).map(SeriesRecipe::Scalar).ok_or(Error::Parse {
                position: pos,
                message: format!("unknown atom `{tok}`"),
            }),
        }
    }

    fn args(&mut self) -> Result<Vec<SeriesRecipe>> {
        let mut out = vec![];
        loop {
            self.skip_ws();
            if self.pos >= self.text.len() {
                return Err(self.err("unexpected end of input in form"));
            }
            if self.text[self.pos] == b')' {
                return Ok(out);
            }
            out.push(self.expr()?);
        }
    }

    fn form(&mut self) -> Result<SeriesRecipe> {
        let pos = self.pos;
        let head = self.token()?;
        match head {
            "euler" => {
                let delta = self.int()?;
                let exponent = self.int()?;
                Ok(SeriesRecipe::EulerProduct { delta, exponent })
            }
            "qpow" => Ok(SeriesRecipe::QPower(self.int()?)),
            "pslice" => {
                let a = self.int()?;
                let b = self.int()?;
                Ok(SeriesRecipe::PartitionSlice { a, b })
            }
            "dq" => {
                let x = self.expr()?;
                Ok(SeriesRecipe::Derivative(Box::new(x)))
            }
            "+" => Ok(SeriesRecipe::Sum(self.args()?)),
            "-" => {
                let args = self.args()?;
                match args.len() {
                    1 => Ok(SeriesRecipe::Neg(Box::new(args.into_iter().next().unwrap()))),
                    2 => {
                        let mut it = args.into_iter();
                        let a = it.next().unwrap();
                        let b = it.next().unwrap();
                        Ok(SeriesRecipe::Sub(Box::new(a), Box::new(b)))
                    }
                    n => Err(Error::Parse {
                        position: pos,
                        message: format!("`-` takes 1 or 2 arguments, got {n}"),
                    }),
                }
            }
            "*" => Ok(SeriesRecipe::Product(self.args()?)),
            "/" => {
                let a = self.expr()?;
                let b = self.expr()?;
                Ok(SeriesRecipe::Div(Box::new(a), Box::new(b)))
            }
            "^" => {
                let x = self.expr()?;
                let k = self.int()?;
                Ok(SeriesRecipe::Pow(Box::new(x), k))
            }
            other => Err(Error::Parse {
                position: pos,
                message: format!("unknown operator `{other}`"),
            }),
        }
    }
}

fn parse_rational(tok: &str) -> Option<QRat> {
    if let Some((n, d)) = tok.split_once('/') {
        let num: BigInt = n.parse().ok()?;
        let den: BigInt = d.parse().ok()?;
        if den <= BigInt::zero() {
            return None;
        }
        Some(QRat::new(num, den))
    } else {
        let num: BigInt = tok.parse().ok()?;
        Some(QRat::from_integer(num))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qint;

    pub fn recipe_t() -> SeriesRecipe {
        SeriesRecipe::parse("(* (qpow -5) (euler 1 12) (euler 11 -12))").unwrap()
    }

    #[test]
    fn t_has_pole_order_five() {
        let t = evaluate_recipe(&recipe_t(), 3).unwrap();
        assert_eq!(t.pole_order().unwrap(), 5);
        assert_eq!(t.coeff(-5), qint(1));
        assert!(t.trunc() >= 3);
    }

    #[test]
    fn h_expansion_matches_printed_values() {
        // h = q t Π(1-q^{11k}) Σ p(11n+6) q^n
        let h = SeriesRecipe::parse(
            "(* (qpow 1) (* (qpow -5) (euler 1 12) (euler 11 -12)) (euler 11 1) (pslice 11 6))",
        )
        .unwrap();
        let s = evaluate_recipe(&h, 1).unwrap();
        assert_eq!(s.coeff(-4), qint(11));
        assert_eq!(s.coeff(-3), qint(165));
        assert_eq!(s.coeff(-2), qint(748));
        assert_eq!(s.coeff(-1), qint(1639));
        assert_eq!(s.coeff(0), qint(3553));
        assert_eq!(s.pole_order().unwrap(), 4);
    }

    #[test]
    fn f_example_one_has_pole_order_six() {
        let f = SeriesRecipe::parse(
            "(* (dq (* (qpow -5) (euler 1 12) (euler 11 -12))) (euler 1 -2) (euler 11 -2))",
        )
        .unwrap();
        let s = evaluate_recipe(&f, 5).unwrap();
        assert_eq!(s.pole_order().unwrap(), 6);
    }

    #[test]
    fn f_example_two_has_pole_order_sixteen() {
        let f = SeriesRecipe::parse("(* J (^ (* (qpow -5) (euler 1 12) (euler 11 -12)) 3))")
            .unwrap();
        let s = evaluate_recipe(&f, 5).unwrap();
        assert_eq!(s.pole_order().unwrap(), 16);
        assert!(s.trunc() >= 5);
    }

    #[test]
    fn dtdq_identity_for_f() {
        // f · q Π(1-q^n)^2 (1-q^{11n})^2 = q · dt/dq at series level
        let f = SeriesRecipe::parse(
            "(* (dq (* (qpow -5) (euler 1 12) (euler 11 -12))) (euler 1 -2) (euler 11 -2))",
        )
        .unwrap();
        let t = recipe_t();
        for trunc in [10, 40] {
            let fs = evaluate_recipe(&f, trunc).unwrap();
            let b = evaluate_recipe(
                &SeriesRecipe::parse("(* (qpow 1) (euler 1 2) (euler 11 2))").unwrap(),
                trunc + 30,
            )
            .unwrap();
            let lhs = fs.mul(&b);
            let dt = evaluate_recipe(&t, trunc + 10).unwrap().derivative();
            let rhs = dt.shift(1);
            let diff = lhs.sub(&rhs);
            let window = lhs.trunc().min(rhs.trunc()).min(trunc);
            assert!(
                diff.truncate_to(window).is_zero(),
                "t'-identity failed at window {window}: {diff}"
            );
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = SeriesRecipe::parse("(* (qpow -5) (bogus 1))").unwrap_err();
        match err {
            Error::Parse { position, .. } => assert!(position > 0),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn scalar_arithmetic() {
        let r = SeriesRecipe::parse("(+ 3/2 (- 1/2))").unwrap();
        let s = evaluate_recipe(&r, 4).unwrap();
        assert_eq!(s.coeff(0), qint(1));
    }
}
