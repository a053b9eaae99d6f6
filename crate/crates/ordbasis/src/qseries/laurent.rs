//! Truncated Laurent series with absolute-precision tracking.
//!
//! A series is known modulo `O(q^trunc)`. The valuation is kept tight:
//! if the series is nonzero, its first stored coefficient is nonzero.
//! Coefficients between the last stored one and the precision bound are
//! implied zeros, so exactly-known series (monomials, constants) can
//! carry a very large `trunc` without allocating a window that wide.
//! The zero series stores no coefficients but remembers how far its
//! zeroness is known.

use crate::error::{Error, Result};
use crate::exact::QRat;
use num::{One, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    val: i64,
    coeffs: Vec<QRat>,
    trunc: i64,
}

impl LaurentSeries {
    /// Build from a raw window starting at exponent `val`; the valuation
    /// is tightened and trailing data beyond `trunc` is dropped.
    pub fn new(val: i64, coeffs: Vec<QRat>, trunc: i64) -> Self {
        let mut coeffs = coeffs;
        let window = trunc.saturating_sub(val).max(0);
        if (coeffs.len() as i64) > window {
            coeffs.truncate(window as usize);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => LaurentSeries {
                val: trunc,
                coeffs: vec![],
                trunc,
            },
            Some(k) => LaurentSeries {
                val: val + k as i64,
                coeffs: coeffs.split_off(k),
                trunc,
            },
        }
    }

    pub fn zero(trunc: i64) -> Self {
        LaurentSeries {
            val: trunc,
            coeffs: vec![],
            trunc,
        }
    }

    pub fn one(trunc: i64) -> Self {
        LaurentSeries::constant(QRat::one(), trunc)
    }

    pub fn constant(c: QRat, trunc: i64) -> Self {
        LaurentSeries::new(0, vec![c], trunc)
    }

    /// `c * q^k`
    pub fn monomial(c: QRat, k: i64, trunc: i64) -> Self {
        LaurentSeries::new(k, vec![c], trunc)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one_leading(&self) -> bool {
        !self.is_zero() && self.coeffs[0].is_one()
    }

    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Pole order at `i∞`: `-valuation`. Errors on the zero series.
    pub fn pole_order(&self) -> Result<i64> {
        self.valuation().map(|v| -v).ok_or(Error::ZeroSeries)
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Coefficient of `q^k`; zero below the valuation. Panics if the
    /// coefficient is not determined at this precision.
    pub fn coeff(&self, k: i64) -> QRat {
        assert!(k < self.trunc, "coefficient q^{k} beyond precision O(q^{})", self.trunc);
        if self.is_zero() || k < self.val {
            return QRat::zero();
        }
        self.coeffs
            .get((k - self.val) as usize)
            .cloned()
            .unwrap_or_else(QRat::zero)
    }

    pub fn leading_coeff(&self) -> Result<QRat> {
        if self.is_zero() {
            Err(Error::ZeroSeries)
        } else {
            Ok(self.coeffs[0].clone())
        }
    }

    /// Restrict to a lower precision. Panics when asked to *raise* it.
    pub fn truncate_to(&self, trunc: i64) -> LaurentSeries {
        assert!(trunc <= self.trunc, "cannot raise precision by truncation");
        LaurentSeries::new(self.val, self.coeffs.clone(), trunc)
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        LaurentSeries {
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            trunc: self.trunc + k,
        }
    }

    pub fn scale(&self, c: &QRat) -> LaurentSeries {
        if c.is_zero() {
            return LaurentSeries::zero(self.trunc);
        }
        LaurentSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            trunc: self.trunc,
        }
    }

    pub fn neg(&self) -> LaurentSeries {
        self.scale(&-QRat::one())
    }

    pub fn add(&self, rhs: &LaurentSeries) -> LaurentSeries {
        let trunc = self.trunc.min(rhs.trunc);
        if self.is_zero() {
            return rhs.truncate_to(trunc.min(rhs.trunc));
        }
        if rhs.is_zero() {
            return self.truncate_to(trunc.min(self.trunc));
        }
        let val = self.val.min(rhs.val);
        let upper = (self.val + self.coeffs.len() as i64)
            .max(rhs.val + rhs.coeffs.len() as i64)
            .min(trunc);
        let len = (upper - val).max(0) as usize;
        let mut coeffs = vec![QRat::zero(); len];
        for s in [self, rhs] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let k = s.val + i as i64;
                if k >= upper {
                    break;
                }
                coeffs[(k - val) as usize] = &coeffs[(k - val) as usize] + c;
            }
        }
        LaurentSeries::new(val, coeffs, trunc)
    }

    pub fn sub(&self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add(&rhs.neg())
    }

    /// Product with exact truncation bookkeeping: for nonzero inputs the
    /// result precision is `min(v1 + T2, v2 + T1)`.
    pub fn mul(&self, rhs: &LaurentSeries) -> LaurentSeries {
        if self.is_zero() || rhs.is_zero() {
            // zeroness of the product is known as far as the zero factor's
            // window shifted by the other factor's valuation
            let t = if self.is_zero() && rhs.is_zero() {
                self.trunc + rhs.trunc
            } else if self.is_zero() {
                self.trunc + rhs.val
            } else {
                rhs.trunc + self.val
            };
            return LaurentSeries::zero(t);
        }
        let val = self.val + rhs.val;
        let trunc = (self.val.saturating_add(rhs.trunc)).min(rhs.val.saturating_add(self.trunc));
        let len = (trunc.saturating_sub(val).max(0) as usize)
            .min(self.coeffs.len() + rhs.coeffs.len() - 1);
        // integer fast path: rational normalization per product term is
        // the dominant cost on large convolutions, and most series here
        // (eta quotients, scaled numerators) have integer coefficients
        let integral = |s: &LaurentSeries| s.coeffs.iter().all(|c| c.denom().is_one());
        if integral(self) && integral(rhs) {
            let mut coeffs = vec![num::BigInt::zero(); len];
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.is_zero() || i >= len {
                    continue;
                }
                let an = a.numer();
                let top = (len - i).min(rhs.coeffs.len());
                for (j, b) in rhs.coeffs.iter().take(top).enumerate() {
                    if !b.is_zero() {
                        coeffs[i + j] += an * b.numer();
                    }
                }
            }
            return LaurentSeries::new(
                val,
                coeffs.into_iter().map(QRat::from_integer).collect(),
                trunc,
            );
        }
        let mut coeffs = vec![QRat::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            let top = (len - i).min(rhs.coeffs.len());
            for (j, b) in rhs.coeffs.iter().take(top).enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        LaurentSeries::new(val, coeffs, trunc)
    }

    /// Multiplicative inverse; for input with valuation `v` and precision
    /// `T` the result has valuation `-v` and precision `T - 2v`.
    pub fn inv(&self) -> Result<LaurentSeries> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if self.coeffs.len() == 1 {
            // monomial: the inverse is exact to the same relative window
            let v = -self.val;
            let rel = self.trunc.saturating_sub(self.val);
            return Ok(LaurentSeries::new(
                v,
                vec![self.coeffs[0].clone().recip()],
                v.saturating_add(rel),
            ));
        }
        let rel = (self.trunc.saturating_sub(self.val) as usize).min(
            // a non-monomial series has a genuinely infinite inverse; cap the
            // window at something a caller-side precision lift can reach
            (1usize << 16).max(self.coeffs.len()),
        );
        let u0 = self.coeffs[0].clone();
        let u0inv = u0.recip();
        let mut inv = vec![QRat::zero(); rel];
        inv[0] = u0inv.clone();
        for k in 1..rel {
            let mut acc = QRat::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                if !self.coeffs[j].is_zero() && !inv[k - j].is_zero() {
                    acc += &self.coeffs[j] * &inv[k - j];
                }
            }
            inv[k] = -acc * &u0inv;
        }
        let val = -self.val;
        Ok(LaurentSeries::new(val, inv, val + rel as i64))
    }

    /// Integer power; negative exponents go through `inv`.
    pub fn pow(&self, e: i64) -> Result<LaurentSeries> {
        if e == 0 {
            return Ok(LaurentSeries::one(self.trunc));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc: Option<LaurentSeries> = None;
        let mut sq = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            n >>= 1;
            if n > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc.unwrap())
    }

    /// d/dq: maps `q^k` to `k q^{k-1}`.
    pub fn derivative(&self) -> LaurentSeries {
        if self.is_zero() {
            return LaurentSeries::zero(self.trunc - 1);
        }
        let coeffs: Vec<QRat> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * QRat::from_integer((self.val + i as i64).into()))
            .collect();
        LaurentSeries::new(self.val - 1, coeffs, self.trunc - 1)
    }

    /// Iterator over the stored `(exponent, coefficient)` pairs with
    /// nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &QRat)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.val + i as i64, c))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(fm, " + ")?;
            }
            first = false;
            match k {
                0 => write!(fm, "{c}")?,
                1 => write!(fm, "{c}*q")?,
                _ => write!(fm, "{c}*q^{k}")?,
            }
        }
        if first {
            write!(fm, "0")?;
        }
        write!(fm, " + O(q^{})", self.trunc)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qint;

    fn geom(trunc: i64) -> LaurentSeries {
        // 1 - q
        LaurentSeries::new(0, vec![qint(1), qint(-1)], trunc)
    }

    #[test]
    fn inv_geometric() {
        let s = geom(4).inv().unwrap();
        for k in 0..4 {
            assert_eq!(s.coeff(k), qint(1));
        }
        assert_eq!(s.trunc(), 4);
    }

    #[test]
    fn derivative_of_pole() {
        let s = LaurentSeries::monomial(qint(1), -5, 3);
        let d = s.derivative();
        assert_eq!(d.valuation(), Some(-6));
        assert_eq!(d.coeff(-6), qint(-5));
    }

    #[test]
    fn mul_precision_tracking() {
        // v1 = -2 (T=5), v2 = 3 (T=10) -> trunc = min(-2+10, 3+5) = 8
        let a = LaurentSeries::new(-2, vec![qint(1), qint(1)], 5);
        let b = LaurentSeries::new(3, vec![qint(2)], 10);
        let p = a.mul(&b);
        assert_eq!(p.trunc(), 8);
        assert_eq!(p.valuation(), Some(1));
    }

    #[test]
    fn inv_roundtrip() {
        let s = LaurentSeries::new(-3, vec![qint(2), qint(5), qint(-1), qint(7)], 1);
        let prod = s.mul(&s.inv().unwrap());
        assert!(prod.is_one_leading());
        for k in 1..prod.trunc() {
            assert!(prod.coeff(k).is_zero());
        }
    }

    #[test]
    fn cancellation_tightens_valuation() {
        let a = LaurentSeries::new(-1, vec![qint(1), qint(2)], 4);
        let b = LaurentSeries::new(-1, vec![qint(1), qint(3)], 4);
        let d = a.sub(&b);
        assert_eq!(d.valuation(), Some(0));
        assert_eq!(d.coeff(0), qint(-1));
    }
}
