//! Normalization of a global integral basis at infinity.
//!
//! Input: a ℚ[x]-basis `b_1..b_n` of `O_K` and an `R_∞`-basis
//! `b'_1..b'_n` of `O_∞`. Output: a new basis of `O_K` together with
//! exponents `d_i`, such that `d_i` is the smallest integer with
//! `b_i ∈ x^{d_i} O_∞` and the leading-coefficient vectors `V_i` are
//! linearly independent — so pole orders of ℚ[x]-combinations add up
//! with no cancellation.

use crate::error::{Error, Result};
use crate::exact::{Poly, QMatrix, RatFunc};
use crate::funcfield::FieldElement;
use crate::intbasis::{BasisKind, IntegralBasis};
use num::Zero;

#[derive(Clone)]
pub struct NormalizedBasis {
    pub b: Vec<FieldElement>,
    pub d: Vec<i64>,
}

/// The exact bookkeeping `D·b_i = Σ_j a_ij·b'_j` carried through the loop.
#[derive(Clone)]
pub struct CoordMatrix {
    pub a: Vec<Vec<Poly>>,
    pub den: Poly,
}

/// Coordinates of `elem` in the `O_∞` basis (which is triangular in y),
/// by back-substitution over ℚ(x).
fn coords_in_at_inf(at_inf: &IntegralBasis, elem: &FieldElement) -> Result<Vec<RatFunc>> {
    let n = at_inf.elems.len();
    let mut residual: Vec<RatFunc> = elem.coords().to_vec();
    let mut out = vec![RatFunc::zero(); n];
    for j in (0..n).rev() {
        let row = at_inf.elems[j].coords();
        if row[j].is_zero() || row.iter().skip(j + 1).any(|c| !c.is_zero()) {
            return Err(Error::InternalContractViolation(
                "at-infinity basis is not triangular in y".into(),
            ));
        }
        let c = &residual[j] / &row[j];
        for (l, rl) in row.iter().enumerate().take(j + 1) {
            let delta = &c * rl;
            residual[l] = &residual[l] - &delta;
        }
        out[j] = c;
    }
    if residual.iter().any(|r| !r.is_zero()) {
        return Err(Error::InternalContractViolation(
            "inconsistent bases: coordinate solve left a residual".into(),
        ));
    }
    Ok(out)
}

/// Smallest `d` with `x^{-d}·elem` in the `R_∞`-span of the at-infinity
/// basis.
pub fn minimal_d(elem: &FieldElement, at_inf: &IntegralBasis) -> Result<i64> {
    assert!(!elem.is_zero(), "minimal_d of the zero element");
    let coords = coords_in_at_inf(at_inf, elem)?;
    Ok(coords
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.pole_order_at_infinity())
        .max()
        .expect("nonzero element has a nonzero coordinate"))
}

pub fn normalize_at_infinity(
    global: &IntegralBasis,
    at_inf: &IntegralBasis,
) -> Result<NormalizedBasis> {
    assert_eq!(global.kind, BasisKind::Global);
    assert_eq!(at_inf.kind, BasisKind::AtInfinity);
    let n = global.elems.len();
    assert_eq!(at_inf.elems.len(), n, "bases of different rank");

    // steps 3-4: b_i = Σ r_ij b'_j, clear to a_ij = D·r_ij over ℚ[x]
    let r: Vec<Vec<RatFunc>> = global
        .elems
        .iter()
        .map(|b| coords_in_at_inf(at_inf, b))
        .collect::<Result<_>>()?;
    let mut den = Poly::one();
    for row in &r {
        for c in row {
            den = den.lcm(c.den());
        }
    }
    let mut a: Vec<Vec<Poly>> = r
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    let scaled = c * &RatFunc::from_poly(den.clone());
                    assert!(scaled.is_polynomial(), "D was not a common denominator");
                    scaled.num().clone()
                })
                .collect()
        })
        .collect();
    let deg_den = den.degree();

    // the multiset {d_i} strictly decreases each pass, so this terminates
    loop {
        // step 5: degrees, leading-coefficient vectors, exponents
        let mut m = vec![0i64; n];
        let mut d = vec![0i64; n];
        let mut vmat = QMatrix::zero(n, n); // column i holds V_i
        for i in 0..n {
            let mi = a[i]
                .iter()
                .map(|p| p.degree())
                .max()
                .expect("n >= 1");
            if mi < 0 {
                return Err(Error::InternalContractViolation(
                    "basis element became zero during normalization".into(),
                ));
            }
            m[i] = mi;
            d[i] = mi - deg_den;
            for j in 0..n {
                vmat.set(j, i, a[i][j].coeff(mi as usize));
            }
        }

        // step 6: stop when the V_i are independent
        let ns = vmat.nullspace();
        if ns.is_empty() {
            // reconstruct the basis from the invariant D·b_i = Σ_j a_ij·b'_j;
            // field-element arithmetic is kept out of the loop because its
            // rational-function normalization dominates the running time
            let field = global.elems[0].field().clone();
            let inv_den = RatFunc::new(Poly::one(), den.clone());
            let b = a
                .iter()
                .map(|row| {
                    let mut acc = field.zero();
                    for (j, p) in row.iter().enumerate() {
                        if !p.is_zero() {
                            acc = acc.add(&at_inf.elems[j].scale(&RatFunc::from_poly(p.clone())));
                        }
                    }
                    acc.scale(&inv_den)
                })
                .collect();
            return Ok(NormalizedBasis { b, d });
        }
        let c = &ns[0]; // first vector in canonical rref order

        // step 7: among c_i ≠ 0 pick maximal d_i, smallest index on ties
        let i = (0..n)
            .filter(|&k| !c[k].is_zero())
            .max_by_key(|&k| (d[k], std::cmp::Reverse(k)))
            .expect("nullspace vector is nonzero");

        // 7a/7b: b_i ← Σ_k c_k x^{d_i - d_k} b_k on the a-rows
        let mut newrow = vec![Poly::zero(); n];
        for k in 0..n {
            if c[k].is_zero() {
                continue;
            }
            let e = d[i] - d[k];
            assert!(e >= 0, "chosen index does not have maximal d");
            let factor = Poly::monomial(e as usize, c[k].clone());
            for j in 0..n {
                let delta = &factor * &a[k][j];
                newrow[j] = &newrow[j] + &delta;
            }
        }
        a[i] = newrow;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::FunctionField;
    use crate::intbasis::{infinity_basis, integral_basis, is_integral_at_infinity, Order};
    use crate::relation::BivariatePoly;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn curve(coeffs: &[((u32, u32), i64)]) -> Arc<FunctionField> {
        let mut m = BTreeMap::new();
        for &((i, j), c) in coeffs {
            m.insert((i, j), num::BigInt::from(c));
        }
        FunctionField::new(BivariatePoly::new(m)).unwrap()
    }

    fn paper_setup() -> (Arc<FunctionField>, NormalizedBasis, IntegralBasis) {
        let field = crate::funcfield::tests::paper_field();
        let global = integral_basis(&field).unwrap();
        let at_inf = infinity_basis(&field).unwrap();
        let nb = normalize_at_infinity(&global, &at_inf).unwrap();
        (field, nb, at_inf)
    }

    #[test]
    fn already_normalized_returned_unchanged() {
        let k = curve(&[((0, 2), 1), ((1, 0), -1)]);
        let global = integral_basis(&k).unwrap();
        let at_inf = infinity_basis(&k).unwrap();
        let nb = normalize_at_infinity(&global, &at_inf).unwrap();
        assert_eq!(nb.b, global.elems);
        assert_eq!(nb.d, vec![0, 1]);
    }

    #[test]
    fn minimal_d_basics() {
        let k = curve(&[((0, 2), 1), ((1, 0), -1)]);
        let at_inf = infinity_basis(&k).unwrap();
        assert_eq!(minimal_d(&k.one(), &at_inf).unwrap(), 0);
        assert_eq!(minimal_d(&k.x(), &at_inf).unwrap(), 1);
    }

    #[test]
    fn paper_exponent_multiset() {
        let (_, nb, _) = paper_setup();
        let mut d = nb.d.clone();
        d.sort();
        assert_eq!(d, vec![0, 1, 1, 1, 2]);
    }

    #[test]
    fn minimal_d_matches_returned_exponents() {
        let (_, nb, at_inf) = paper_setup();
        for (bi, &di) in nb.b.iter().zip(&nb.d) {
            assert_eq!(minimal_d(bi, &at_inf).unwrap(), di);
            // independent minimality check: x^{-d} b integral at infinity,
            // x^{-(d-1)} b not
            let xpow = |e: i64| -> RatFunc {
                if e >= 0 {
                    RatFunc::from_poly(Poly::x().pow(e as usize))
                } else {
                    RatFunc::new(Poly::one(), Poly::x().pow((-e) as usize))
                }
            };
            assert!(is_integral_at_infinity(&bi.scale(&xpow(-di))));
            assert!(!is_integral_at_infinity(&bi.scale(&xpow(-di + 1))));
        }
    }

    #[test]
    fn output_spans_same_module() {
        let (_, nb, _) = paper_setup();
        let field = crate::funcfield::tests::paper_field();
        let global = integral_basis(&field).unwrap();
        assert_eq!(
            Order::from_elements(&nb.b),
            Order::from_elements(&global.elems)
        );
        for e in &nb.b {
            assert!(e.is_integral());
        }
    }

    #[test]
    fn no_cancellation_for_combinations() {
        let (field, nb, at_inf) = paper_setup();
        // β = Σ c_j b_j with polynomial coefficients: minimal_d(β) must be
        // max(deg c_j + d_j), the paper's no-cancellation statement
        let cases: Vec<Vec<Poly>> = vec![
            vec![
                Poly::from_i64(&[1, 2]),
                Poly::from_i64(&[3]),
                Poly::zero(),
                Poly::from_i64(&[0, 0, 1]),
                Poly::from_i64(&[5]),
            ],
            vec![
                Poly::from_i64(&[-1]),
                Poly::zero(),
                Poly::from_i64(&[7, -2]),
                Poly::from_i64(&[1]),
                Poly::zero(),
            ],
            vec![
                Poly::zero(),
                Poly::from_i64(&[0, 1]),
                Poly::zero(),
                Poly::zero(),
                Poly::from_i64(&[2, 0, -3]),
            ],
        ];
        for cs in cases {
            let mut beta = field.zero();
            let mut expect = i64::MIN;
            for (c, (bj, &dj)) in cs.iter().zip(nb.b.iter().zip(&nb.d)) {
                if c.is_zero() {
                    continue;
                }
                beta = beta.add(&bj.scale(&RatFunc::from_poly(c.clone())));
                expect = expect.max(c.degree() + dj);
            }
            assert_eq!(minimal_d(&beta, &at_inf).unwrap(), expect);
        }
    }

    #[test]
    fn final_leading_vectors_independent() {
        let (_, nb, at_inf) = paper_setup();
        // re-derive the V_i at exit and re-assert independence
        let n = nb.b.len();
        let r: Vec<Vec<RatFunc>> = nb
            .b
            .iter()
            .map(|b| coords_in_at_inf(&at_inf, b).unwrap())
            .collect();
        let mut den = Poly::one();
        for row in &r {
            for c in row {
                den = den.lcm(c.den());
            }
        }
        let mut vmat = QMatrix::zero(n, n);
        for i in 0..n {
            let a: Vec<Poly> = r[i]
                .iter()
                .map(|c| (c * &RatFunc::from_poly(den.clone())).num().clone())
                .collect();
            let mi = a.iter().map(|p| p.degree()).max().unwrap();
            for j in 0..n {
                vmat.set(j, i, a[j].coeff(mi as usize));
            }
        }
        assert!(vmat.nullspace().is_empty());
    }
}
