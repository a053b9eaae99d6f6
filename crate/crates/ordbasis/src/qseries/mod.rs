//! Truncated Laurent series in q over ℚ, plus the recipe language that
//! builds every series the pipeline needs (Euler products, Eisenstein
//! series, the partition generating function and its slices).

pub mod laurent;
pub mod partition;
pub mod recipe;

pub use laurent::LaurentSeries;
pub use partition::{partition_number, partition_numbers};
pub use recipe::{evaluate_recipe, SeriesRecipe};

use crate::error::{Error, Result};
use crate::exact::QRat;
use num::{One, Zero};

/// Expansion of `Π_{n≥1} (1 - q^{δn})^e` to `O(q^T)`.
///
/// `e = ±1` go through Euler's pentagonal number theorem and the
/// partition recurrence; other exponents are built by binary powering.
pub fn euler_product(delta: i64, e: i64, trunc: i64) -> LaurentSeries {
    assert!(delta >= 1, "euler_product requires δ ≥ 1");
    assert!(trunc > 0, "euler_product requires T > 0");
    if e == 0 {
        return LaurentSeries::one(trunc);
    }
    let base = if e > 0 {
        pentagonal_series(delta, trunc)
    } else {
        partition_series(delta, trunc)
    };
    base.pow(e.abs()).expect("unit series power")
}

/// `Π (1 - q^{δn})` by the pentagonal number theorem.
fn pentagonal_series(delta: i64, trunc: i64) -> LaurentSeries {
    let len = trunc as usize;
    let mut coeffs = vec![QRat::zero(); len];
    coeffs[0] = QRat::one();
    let mut k: i64 = 1;
    loop {
        let g1 = delta * k * (3 * k - 1) / 2;
        let g2 = delta * k * (3 * k + 1) / 2;
        if g1 >= trunc && g2 >= trunc {
            break;
        }
        let sign = if k % 2 == 1 { -QRat::one() } else { QRat::one() };
        if g1 < trunc {
            coeffs[g1 as usize] = &coeffs[g1 as usize] + &sign;
        }
        if g2 < trunc {
            coeffs[g2 as usize] = &coeffs[g2 as usize] + &sign;
        }
        k += 1;
    }
    LaurentSeries::new(0, coeffs, trunc)
}

/// `Π (1 - q^{δn})^{-1}`, i.e. partition numbers in steps of δ.
fn partition_series(delta: i64, trunc: i64) -> LaurentSeries {
    let terms = ((trunc - 1) / delta) as usize;
    let p = partition_numbers(terms);
    let mut coeffs = vec![QRat::zero(); trunc as usize];
    for (n, pn) in p.iter().enumerate() {
        let idx = n as i64 * delta;
        if idx < trunc {
            coeffs[idx as usize] = QRat::from_integer(pn.clone());
        }
    }
    LaurentSeries::new(0, coeffs, trunc)
}

/// Eisenstein series `E_4 = 1 + 240 Σ σ_3(n) q^n` to `O(q^T)`.
pub fn eisenstein_e4(trunc: i64) -> LaurentSeries {
    assert!(trunc > 0);
    let len = trunc as usize;
    let mut sigma3 = vec![num::BigInt::zero(); len];
    for d in 1..len {
        let d3 = num::BigInt::from(d).pow(3);
        let mut m = d;
        while m < len {
            sigma3[m] += &d3;
            m += d;
        }
    }
    let mut coeffs: Vec<QRat> = sigma3
        .into_iter()
        .map(|s| QRat::from_integer(s * 240))
        .collect();
    coeffs[0] = QRat::one();
    LaurentSeries::new(0, coeffs, trunc)
}

/// `Δ = q Π (1 - q^n)^{24}` to `O(q^T)`.
pub fn delta_series(trunc: i64) -> LaurentSeries {
    euler_product(1, 24, trunc - 1).shift(1)
}

/// `J = E_4^3 / Δ = q^{-1} + 744 + ...` to absolute precision implied by inputs.
pub fn j_series(trunc: i64) -> LaurentSeries {
    // work a little beyond so the quotient reaches the requested precision
    let work = trunc + 4;
    let e4 = eisenstein_e4(work);
    let num = e4.pow(3).unwrap();
    let den = delta_series(work);
    num.mul(&den.inv().unwrap()).truncate_to(trunc)
}

/// `Σ_{n≥0} p(an + b) q^n` to `O(q^T)`.
pub fn partition_slice(a: i64, b: i64, trunc: i64) -> Result<LaurentSeries> {
    if a <= 0 {
        return Err(Error::Eval("PartitionSlice requires a ≥ 1".into()));
    }
    if b < 0 {
        return Err(Error::Eval("PartitionSlice requires b ≥ 0".into()));
    }
    let top = (a * (trunc - 1).max(0) + b) as usize;
    let p = partition_numbers(top);
    let coeffs: Vec<QRat> = (0..trunc.max(0))
        .map(|n| QRat::from_integer(p[(a * n + b) as usize].clone()))
        .collect();
    Ok(LaurentSeries::new(0, coeffs, trunc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qint;

    #[test]
    fn pentagonal_matches_hand_expansion() {
        // Π(1-q^n) = 1 - q - q^2 + q^5 + O(q^6)
        let s = euler_product(1, 1, 6);
        let expect = [1, -1, -1, 0, 0, 1];
        for (k, &e) in expect.iter().enumerate() {
            assert_eq!(s.coeff(k as i64), qint(e));
        }
    }

    #[test]
    fn zero_exponent_is_one() {
        let s = euler_product(7, 0, 5);
        assert!(s.is_one_leading());
        assert_eq!(s.pole_order().unwrap(), 0);
    }

    /// Oracle: partition numbers by brute-force enumeration of partitions.
    fn count_partitions(n: usize) -> u64 {
        fn rec(n: usize, max: usize) -> u64 {
            if n == 0 {
                return 1;
            }
            (1..=max.min(n)).map(|k| rec(n - k, k)).sum()
        }
        rec(n, n.max(1))
    }

    #[test]
    fn reciprocal_euler_is_partition_gf() {
        let s = euler_product(1, -1, 8);
        for n in 0..8 {
            assert_eq!(s.coeff(n as i64), qint(count_partitions(n) as i64));
        }
        // printed expansion check: 1 + q + 2q^2 + 3q^3 + 5q^4 + 7q^5 + 11q^6 + 15q^7
        let expect = [1, 1, 2, 3, 5, 7, 11, 15];
        for (k, &e) in expect.iter().enumerate() {
            assert_eq!(s.coeff(k as i64), qint(e));
        }
    }

    #[test]
    fn product_with_reciprocal_is_one() {
        for (delta, e) in [(1, 3), (2, -5), (11, 12)] {
            let a = euler_product(delta, e, 30);
            let b = euler_product(delta, -e, 30);
            let prod = a.mul(&b);
            assert!(prod.is_one_leading());
            assert_eq!(prod.pole_order().unwrap(), 0);
            for k in 1..30 {
                assert!(prod.coeff(k).is_zero(), "nonzero coeff at q^{k}");
            }
        }
    }

    #[test]
    fn j_has_simple_pole() {
        let j = j_series(3);
        assert_eq!(j.valuation().unwrap(), -1);
        assert_eq!(j.coeff(-1), qint(1));
        assert_eq!(j.coeff(0), qint(744));
        assert_eq!(j.coeff(1), qint(196884));
    }

    #[test]
    fn partition_slice_matches_gf() {
        let slice = partition_slice(1, 0, 20).unwrap();
        let gf = euler_product(1, -1, 20);
        for k in 0..20 {
            assert_eq!(slice.coeff(k), gf.coeff(k));
        }
    }
}
