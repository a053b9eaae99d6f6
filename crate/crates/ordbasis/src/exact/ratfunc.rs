//! Rational functions over ℚ, kept reduced with a monic denominator.

use super::poly::Poly;
use super::QRat;
use num::{One, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        let lc = den.leading();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc { num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: QRat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True iff the denominator is trivial.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn recip(&self) -> RatFunc {
        assert!(!self.is_zero(), "reciprocal of zero");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Pole order at x = ∞: `deg num - deg den` (negative for a zero there).
    pub fn pole_order_at_infinity(&self) -> i64 {
        assert!(!self.is_zero());
        self.num.degree() - self.den.degree()
    }

    /// Regular at x = ∞, i.e. an element of R_∞.
    pub fn regular_at_infinity(&self) -> bool {
        self.is_zero() || self.pole_order_at_infinity() <= 0
    }

    /// Substitute x ↦ 1/x.
    pub fn subst_inverse_x(&self) -> RatFunc {
        if self.is_zero() {
            return RatFunc::zero();
        }
        let dn = self.num.degree() as usize;
        let dd = self.den.degree() as usize;
        let mut num = self.num.reverse();
        let mut den = self.den.reverse();
        if dn < dd {
            num = num.shift_up(dd - dn);
        } else {
            den = den.shift_up(dn - dd);
        }
        RatFunc::new(num, den)
    }

    pub fn scale(&self, c: &QRat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiply by `x^j` without a full gcd reduction: `x^j` can only
    /// share powers of `x` with the (coprime) denominator.
    pub fn mul_pow_x(&self, j: usize) -> RatFunc {
        if j == 0 || self.is_zero() {
            return self.clone();
        }
        let v = (self.den.valuation_at_zero() as usize).min(j);
        RatFunc {
            num: self.num.shift_up(j - v),
            den: self.den.shift_down(v),
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        // cross-reduce first to keep the gcds small
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1);
        let d2 = rhs.den.div_exact(&g1);
        let n2 = rhs.num.div_exact(&g2);
        let d1 = self.den.div_exact(&g2);
        RatFunc::new(&n1 * &n2, &d1 * &d2)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.recip()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(fm, "{}", self.num)
        } else {
            write!(fm, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{self}")
    }
}
