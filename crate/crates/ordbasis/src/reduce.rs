//! Reduce a target q-series against an order-complete basis, rebuild
//! the closed form in `t` and `f`, and check partition congruences.
//!
//! The reduction is greedy on pole orders: as long as the working
//! series has a pole deeper than the basis reaches, the unique basis
//! element and `t`-power with matching combined order is subtracted;
//! then the remaining principal part and constant are cancelled
//! directly. Zero-certification is by truncation: the residual is
//! checked to vanish through the full precision window.

use crate::basis_rr::OrderCompleteBasis;
use crate::error::{Error, Result};
use crate::exact::{Poly, RatFunc};
use crate::funcfield::FieldElement;
use crate::qseries::{evaluate_recipe, LaurentSeries, SeriesRecipe};
use num::{BigInt, Integer, Zero};

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// (basis index into `ocb.entries`, coefficient polynomial in t)
    pub terms: Vec<(usize, Poly)>,
    pub residual_valuation: i64,
    pub certified_to: i64,
}

impl Decomposition {
    pub fn coefficient_for(&self, index: usize) -> Poly {
        self.terms
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Poly::zero)
    }
}

pub fn express(
    target: &LaurentSeries,
    ocb: &OrderCompleteBasis,
    ts: &LaurentSeries,
) -> Result<Decomposition> {
    if target.trunc() < 1 {
        return Err(Error::Precision(
            "target series does not reach the constant term".into(),
        ));
    }
    let n = ts.pole_order()?;
    let orders: Vec<i64> = ocb.entries.iter().map(|e| e.pole_order).collect();
    let max_o = orders.iter().max().copied().unwrap_or(0);
    let mut w = target.clone();
    let mut coeffs: Vec<Poly> = vec![Poly::zero(); ocb.entries.len()];

    // deep poles: P = k·n + o_i with k ≥ 1, maximal o_i (smallest k)
    while let Some(v) = w.valuation() {
        let p = -v;
        if p <= max_o {
            break;
        }
        let pick = orders
            .iter()
            .enumerate()
            .filter(|(_, &o)| p > o && (p - o) % n == 0)
            .max_by_key(|(_, &o)| o)
            .map(|(i, &o)| (i, (p - o) / n));
        let Some((i, k)) = pick else {
            return Err(Error::Gap(p));
        };
        let tk = ts.pow(k)?;
        let piece = tk.mul(&ocb.entries[i].series);
        let lead = piece.coeff(v);
        let c = w.coeff(v) / lead;
        w = w.sub(&piece.scale(&c));
        if w.trunc() < 1 {
            return Err(Error::Precision(format!(
                "precision window exhausted at pole order {p}; raise the input truncation"
            )));
        }
        coeffs[i] = &coeffs[i] + &Poly::monomial(k as usize, c);
    }

    // principal part and constant within basis reach: k = 0 terms
    while let Some(v) = w.valuation() {
        if v > 0 {
            break;
        }
        let p = -v;
        let Some(i) = orders.iter().position(|&o| o == p) else {
            return Err(Error::Gap(p));
        };
        let ser = &ocb.entries[i].series;
        let c = w.coeff(v) / ser.coeff(v);
        w = w.sub(&ser.scale(&c));
        coeffs[i] = &coeffs[i] + &Poly::constant(c);
    }

    let residual_valuation = w.valuation().unwrap_or(w.trunc());
    let terms = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .collect();
    Ok(Decomposition {
        terms,
        residual_valuation,
        certified_to: w.trunc(),
    })
}

/// `Σ coeff_i(x) · expr_i` as one field element.
pub fn closed_form(dec: &Decomposition, ocb: &OrderCompleteBasis) -> FieldElement {
    let field = ocb.entries[0].expr.field().clone();
    let mut acc = field.zero();
    for (i, c) in &dec.terms {
        acc = acc.add(&ocb.entries[*i].expr.scale(&RatFunc::from_poly(c.clone())));
    }
    acc
}

/// Valuation of `lhs − rhs` as q-series; the identity verifies at
/// truncation `T` iff the result is ≥ `T`.
pub fn verify_identity(
    lhs: &SeriesRecipe,
    rhs: &FieldElement,
    ts: &LaurentSeries,
    fs: &LaurentSeries,
    trunc: i64,
) -> Result<i64> {
    assert!(trunc >= 1);
    let l = evaluate_recipe(lhs, trunc)?;
    let r = rhs.to_qseries(ts, fs, trunc)?;
    let diff = l.sub(&r).truncate_to(trunc.min(l.trunc()).min(r.trunc()));
    if diff.trunc() < trunc {
        return Err(Error::InsufficientPrecision(format!(
            "difference only known to O(q^{}), need O(q^{trunc})",
            diff.trunc()
        )));
    }
    Ok(diff.valuation().unwrap_or(diff.trunc()))
}

/// All `n < count` with `p(a·n + b) ≢ 0 (mod m)`; empty means the
/// congruence holds through the window.
pub fn check_congruence(a: i64, b: i64, m: i64, count: i64) -> Vec<i64> {
    assert!(a >= 1 && b >= 0 && m >= 2 && count >= 1);
    let top = (a * (count - 1) + b) as usize;
    let pn = crate::qseries::partition_numbers(top);
    let modulus = BigInt::from(m);
    (0..count)
        .filter(|&n| !pn[(a * n + b) as usize].mod_floor(&modulus).is_zero())
        .collect()
}
