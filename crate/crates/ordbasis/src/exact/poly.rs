//! Dense univariate polynomials over ℚ.
//!
//! Degrees in this problem stay small (a few hundred at most after
//! clearing denominators), so a dense coefficient vector is used
//! throughout. The gcd goes through the primitive polynomial remainder
//! sequence over ℤ to keep intermediate coefficients small.

use super::{qint, Int, QRat};
use num::{BigInt, Integer, One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial in one variable over ℚ; `coeffs[i]` is the coefficient of `x^i`.
/// The zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<QRat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<QRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(QRat::one())
    }

    pub fn constant(c: QRat) -> Self {
        Poly::new(vec![c])
    }

    pub fn constant_i64(c: i64) -> Self {
        Poly::constant(qint(c))
    }

    pub fn x() -> Self {
        Poly::monomial(1, QRat::one())
    }

    /// `c * x^k`
    pub fn monomial(k: usize, c: QRat) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![QRat::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| qint(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; the zero polynomial reports -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> QRat {
        self.coeffs.get(i).cloned().unwrap_or_else(QRat::zero)
    }

    pub fn coeffs(&self) -> &[QRat] {
        &self.coeffs
    }

    pub fn leading(&self) -> QRat {
        self.coeffs.last().cloned().unwrap_or_else(QRat::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &QRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![QRat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Exact division by `x^k`; requires valuation at least `k`.
    pub fn shift_down(&self, k: usize) -> Poly {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        assert!(
            self.coeffs.iter().take(k).all(|c| c.is_zero()),
            "shift_down below the valuation"
        );
        Poly::new(self.coeffs[k..].to_vec())
    }

    /// Coefficient reversal of length `degree + 1` (x ↦ 1/x, cleared).
    pub fn reverse(&self) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Poly::new(coeffs)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.leading();
        self.scale(&lc.recip())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * qint(i as i64 + 1))
                .collect(),
        )
    }

    pub fn eval(&self, x: &QRat) -> QRat {
        let mut acc = QRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Euclidean division: `self = q * div + r` with `deg r < deg div`.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        if self.degree() < div.degree() {
            return (Poly::zero(), self.clone());
        }
        let dlc = div.leading();
        let dd = div.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![QRat::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] / &dlc;
            for (j, dc) in div.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                let delta = dc * &q;
                rem[idx] = &rem[idx] - &delta;
            }
            quot[i - dd] = q;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, div: &Poly) -> Poly {
        let (q, r) = self.divrem(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Remainder modulo `m`.
    pub fn rem(&self, m: &Poly) -> Poly {
        self.divrem(m).1
    }

    /// Clear denominators and integer content: returns `(c, prim)` with
    /// `self = c * prim`, `prim` primitive over ℤ with positive leading
    /// coefficient. Zero returns `(0, 0)`.
    pub fn primitive(&self) -> (QRat, Vec<Int>) {
        if self.is_zero() {
            return (QRat::zero(), vec![]);
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<Int> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for a in &ints {
            g = g.gcd(a);
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        let prim: Vec<Int> = ints.iter().map(|a| a / &g).collect();
        (QRat::new(g, den), prim)
    }

    /// Monic gcd over ℚ. The heuristic gcd (evaluate at one large
    /// point, take the integer gcd, reconstruct in balanced base, then
    /// certify) handles the common case in near-linear time; the
    /// primitive remainder sequence over ℤ is the fallback.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        let (_, mut a) = self.primitive();
        let (_, mut b) = other.primitive();
        if let Some(g) = heuristic_gcd(&a, &b) {
            return g;
        }
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.is_empty() {
                break;
            }
            let r = int_prem(&a, &b);
            a = b;
            b = int_primitive(r);
        }
        Poly::new(a.into_iter().map(QRat::from_integer).collect()).monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        assert!(
            !(self.is_zero() && other.is_zero()),
            "ext_gcd of two zero polynomials"
        );
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Poly::one();
        let mut s1 = Poly::zero();
        let mut t0 = Poly::zero();
        let mut t1 = Poly::one();
        while !r1.is_zero() {
            // keep the remainder monic to tame coefficient growth
            let lc = r1.leading();
            r1 = r1.monic();
            s1 = s1.scale(&lc.recip());
            t1 = t1.scale(&lc.recip());
            let (q, r) = r0.divrem(&r1);
            let ns = &s0 - &(&q * &s1);
            let nt = &t0 - &(&q * &t1);
            r0 = r1;
            s0 = s1;
            t0 = t1;
            r1 = r;
            s1 = ns;
            t1 = nt;
        }
        let lc = r0.leading();
        (
            r0.monic(),
            s0.scale(&lc.recip()),
            t0.scale(&lc.recip()),
        )
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(other);
        (self * other).div_exact(&g).monic()
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Yun's squarefree decomposition: `self = c * Π factor_i^{mult_i}`
    /// with the factors monic, squarefree and pairwise coprime.
    pub fn squarefree_factor(&self) -> Vec<(Poly, usize)> {
        assert!(!self.is_zero(), "squarefree factorization of zero");
        let f = self.monic();
        if f.degree() == 0 {
            return vec![];
        }
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_exact(&a);
        let mut c = df.div_exact(&a);
        let mut d = &c - &b.derivative();
        let mut out = vec![];
        let mut mult = 1usize;
        loop {
            let g = b.gcd(&d);
            if g.degree() > 0 {
                out.push((g.clone(), mult));
            }
            b = b.div_exact(&g);
            if b.degree() == 0 {
                break;
            }
            c = d.div_exact(&g);
            d = &c - &b.derivative();
            mult += 1;
        }
        out
    }

    /// Valuation at x = 0 (number of trailing zero coefficients).
    pub fn valuation_at_zero(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    /// Canonical string, e.g. `x^2 - 3/2*x + 1`.
    pub fn to_string_canonical(&self) -> String {
        format!("{self}")
    }
}

fn int_primitive(mut v: Vec<Int>) -> Vec<Int> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    if v.is_empty() {
        return v;
    }
    let mut g = BigInt::zero();
    for a in &v {
        g = g.gcd(a);
    }
    if v.last().unwrap().is_negative() {
        g = -g;
    }
    v.into_iter().map(|a| a / &g).collect()
}

/// Pseudo-remainder of primitive integer polynomials, `a` scaled by
/// `lc(b)^(deg a - deg b + 1)`.
fn int_prem(a: &[Int], b: &[Int]) -> Vec<Int> {
    let db = b.len() - 1;
    let mut rem: Vec<Int> = a.to_vec();
    let lcb = b.last().unwrap().clone();
    while rem.len() > db {
        let lr = rem.last().unwrap().clone();
        if lr.is_zero() {
            rem.pop();
            continue;
        }
        let k = rem.len() - 1 - db;
        for c in rem.iter_mut() {
            *c = &*c * &lcb;
        }
        for (j, bc) in b.iter().enumerate() {
            rem[k + j] -= bc * &lr;
        }
        while rem.last().is_some_and(|c| c.is_zero()) {
            rem.pop();
        }
    }
    rem
}

/// Heuristic gcd of primitive integer polynomials: the gcd of the
/// evaluations at a large point ξ, read back in balanced base ξ, is a
/// candidate. It is accepted only with a certificate: it must divide
/// both inputs exactly, and the cofactors must be provably coprime
/// (gcd 1 modulo a degree-preserving prime). `None` falls back to the
/// remainder sequence.
fn heuristic_gcd(a: &[Int], b: &[Int]) -> Option<Poly> {
    // Coprime inputs (the common case for fraction reduction) are
    // certified directly, without any big-integer work.
    if certified_coprime(a, b) {
        return Some(Poly::one());
    }
    let maxbits = |v: &[Int]| v.iter().map(|c| c.bits()).max().unwrap_or(0);
    let mut shift = maxbits(a).min(maxbits(b)) + 3;
    // The evaluations have about deg·shift bits and big-integer gcd is
    // quadratic; past this size the remainder sequence is cheaper.
    if shift.saturating_mul(a.len().max(b.len()) as u64) > 1 << 19 {
        return None;
    }
    for _ in 0..4 {
        let xi: Int = Int::one() << shift;
        let va = int_eval(a, &xi);
        let vb = int_eval(b, &xi);
        let mut h = va.gcd(&vb);
        let half: Int = &xi >> 1;
        let mut cand: Vec<Int> = vec![];
        while !h.is_zero() {
            let mut d = h.mod_floor(&xi);
            if d > half {
                d -= &xi;
            }
            h = (&h - &d) / &xi;
            cand.push(d);
        }
        let cand = int_primitive(cand);
        if !cand.is_empty() {
            if let (Some(qa), Some(qb)) = (int_div_exact(a, &cand), int_div_exact(b, &cand)) {
                if certified_coprime(&qa, &qb) {
                    return Some(
                        Poly::new(cand.into_iter().map(QRat::from_integer).collect()).monic(),
                    );
                }
            }
        }
        shift = 2 * shift + 7;
    }
    None
}

fn int_eval(p: &[Int], x: &Int) -> Int {
    let mut acc = Int::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Exact division of integer polynomials; `None` if it does not divide.
fn int_div_exact(a: &[Int], d: &[Int]) -> Option<Vec<Int>> {
    if a.len() < d.len() {
        return None;
    }
    let dd = d.len() - 1;
    let lc = d.last().unwrap();
    let mut rem: Vec<Int> = a.to_vec();
    let mut quot = vec![Int::zero(); a.len() - dd];
    for k in (0..quot.len()).rev() {
        let top = std::mem::replace(&mut rem[k + dd], Int::zero());
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(lc);
        if !r.is_zero() {
            return None;
        }
        for (j, dc) in d.iter().enumerate().take(dd) {
            rem[k + j] -= dc * &q;
        }
        quot[k] = q;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(quot)
}

/// One-sided coprimality certificate: gcd of the images is 1 modulo a
/// prime that preserves both degrees. `false` means "not certified",
/// not "not coprime".
fn certified_coprime(a: &[Int], b: &[Int]) -> bool {
    // 2^61 - 1, 2^64 - 59, and a 30-bit prime
    const PRIMES: [u64; 3] = [2305843009213693951, 18446744073709551557, 1000000007];
    'primes: for &p in &PRIMES {
        let pb = Int::from(p);
        let to_mod = |v: &[Int]| -> Vec<u64> {
            v.iter()
                .map(|c| {
                    let m = c.mod_floor(&pb);
                    let (_, digits) = m.to_u64_digits();
                    digits.first().copied().unwrap_or(0)
                })
                .collect()
        };
        let mut ma = to_mod(a);
        let mut mb = to_mod(b);
        if ma.last() == Some(&0) || mb.last() == Some(&0) {
            continue; // degree drops; certificate invalid for this prime
        }
        // Euclid over ℤ/p
        while !mb.is_empty() {
            if mb.len() == 1 {
                return true; // nonzero constant: gcd is 1
            }
            let inv = modp_pow(*mb.last().unwrap(), p - 2, p);
            let db = mb.len() - 1;
            while ma.len() > db {
                let lr = *ma.last().unwrap();
                if lr == 0 {
                    ma.pop();
                    continue;
                }
                let k = ma.len() - 1 - db;
                let q = modp_mul(lr, inv, p);
                for (j, &bc) in mb.iter().enumerate() {
                    let t = modp_mul(q, bc, p);
                    ma[k + j] = if ma[k + j] >= t {
                        ma[k + j] - t
                    } else {
                        ma[k + j] + p - t
                    };
                }
                while ma.last() == Some(&0) {
                    ma.pop();
                }
            }
            if ma.is_empty() {
                continue 'primes; // common factor mod p: inconclusive
            }
            std::mem::swap(&mut ma, &mut mb);
        }
        // unreachable in practice: mb empty only via the swap above
    }
    false
}

fn modp_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn modp_pow(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = modp_mul(acc, base, p);
        }
        base = modp_mul(base, base, p);
        e >>= 1;
    }
    acc
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        // integer fast path: skip the per-term rational normalization
        let integral = |p: &Poly| p.coeffs.iter().all(|c| c.denom().is_one());
        if integral(self) && integral(rhs) {
            let mut out = vec![Int::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
            for (i, a) in self.coeffs.iter().enumerate() {
                let an = a.numer();
                if an.is_zero() {
                    continue;
                }
                for (j, b) in rhs.coeffs.iter().enumerate() {
                    if !b.numer().is_zero() {
                        out[i + j] += an * b.numer();
                    }
                }
            }
            return Poly::new(out.into_iter().map(QRat::from_integer).collect());
        }
        let mut out = vec![QRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(fm, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(fm, "-")?;
                }
                first = false;
            } else {
                write!(fm, " {sign} ")?;
            }
            let coeff_is_one = mag.is_one();
            match i {
                0 => write!(fm, "{mag}")?,
                1 => {
                    if coeff_is_one {
                        write!(fm, "x")?;
                    } else {
                        write!(fm, "{mag}*x")?;
                    }
                }
                _ => {
                    if coeff_is_one {
                        write!(fm, "x^{i}")?;
                    } else {
                        write!(fm, "{mag}*x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qfrac;

    fn p(v: &[i64]) -> Poly {
        Poly::from_i64(v)
    }

    #[test]
    fn divrem_roundtrip() {
        let a = p(&[1, 0, -3, 0, 2, 7]);
        let b = p(&[2, 1, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn gcd_basic() {
        // (x^2 - 1, x - 1) -> x - 1
        let g = p(&[-1, 0, 1]).gcd(&p(&[-1, 1]));
        assert_eq!(g, p(&[-1, 1]));
        // coprime
        let g = p(&[0, 1]).gcd(&p(&[1]));
        assert_eq!(g, Poly::one());
    }

    #[test]
    fn ext_gcd_identity() {
        // (x, 1) -> g = 1, s = 0, t = 1
        let (g, s, t) = p(&[0, 1]).ext_gcd(&p(&[1]));
        assert_eq!(g, Poly::one());
        assert_eq!(s, Poly::zero());
        assert_eq!(t, Poly::one());

        // random-ish degree 5 / degree 3 pair, re-expand
        let a = p(&[3, -1, 4, 0, -2, 5]);
        let b = p(&[1, 2, 0, 7]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        assert!(g.leading().is_one());
    }

    #[test]
    fn squarefree_decomposition() {
        // x^2 (x+1) -> [(x, 2), (x+1, 1)]
        let f = &p(&[0, 0, 1]) * &p(&[1, 1]);
        let sf = f.squarefree_factor();
        assert_eq!(sf, vec![(p(&[1, 1]), 1), (p(&[0, 1]), 2)]);

        let f = p(&[1, 3, 1]); // squarefree
        assert_eq!(f.squarefree_factor(), vec![(f.monic(), 1)]);
    }

    #[test]
    fn primitive_parts() {
        let f = Poly::new(vec![qfrac(1, 2), qfrac(3, 4)]);
        let (c, prim) = f.primitive();
        assert_eq!(prim, vec![Int::from(2), Int::from(3)]);
        assert_eq!(c, qfrac(1, 4));
    }
}
