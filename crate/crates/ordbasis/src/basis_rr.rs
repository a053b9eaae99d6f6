//! Order-complete bases: `B_d = { x^j b_i | 0 ≤ j ≤ d − d_i }`,
//! q-expanded and brought into reduced echelon form so every pole order
//! appears exactly once.

use crate::error::{Error, Result};
use crate::exact::{Poly, RatFunc};
use crate::funcfield::FieldElement;
use crate::normalize::NormalizedBasis;
use crate::qseries::LaurentSeries;
use num::Zero;
use std::collections::BTreeSet;

#[derive(Clone)]
pub struct BasisEntry {
    pub pole_order: i64,
    pub expr: FieldElement,
    pub series: LaurentSeries,
}

#[derive(Clone)]
pub struct OrderCompleteBasis {
    /// pole orders strictly increasing
    pub entries: Vec<BasisEntry>,
    pub d_used: i64,
    /// pole orders in `[0, max]` not attained by any entry
    pub gaps: BTreeSet<i64>,
}

/// `x^j · b` coordinate-wise, avoiding the full rational-function
/// reduction a generic product would run on every coordinate.
fn mul_x_pow(b: &FieldElement, j: usize) -> FieldElement {
    if j == 0 {
        return b.clone();
    }
    b.field()
        .element(b.coords().iter().map(|c| c.mul_pow_x(j)).collect())
}

/// `B_d` as field elements, in the deterministic order (i ascending,
/// then j ascending).
pub fn build_bd(nb: &NormalizedBasis, d: i64) -> Vec<FieldElement> {
    assert!(d >= 0, "B_d needs d >= 0");
    let mut out = vec![];
    for (bi, &di) in nb.b.iter().zip(&nb.d) {
        for j in 0..=(d - di) {
            out.push(mul_x_pow(bi, j as usize));
        }
    }
    out
}

/// Number of elements `Σ_i max(0, d − d_i + 1)` without building them.
pub fn bd_count(nb: &NormalizedBasis, d: i64) -> i64 {
    nb.d.iter().map(|&di| (d - di + 1).max(0)).sum()
}

/// Genus derived from the Riemann-Roch count `|B_d| = d·n + 1 − g` for
/// large d; asserted stable across two consecutive d.
pub fn genus(nb: &NormalizedBasis) -> i64 {
    let n = nb.b.len() as i64;
    let d0 = nb.d.iter().copied().max().unwrap_or(0).max(1) + 2;
    let g = d0 * n + 1 - bd_count(nb, d0);
    let g2 = (d0 + 1) * n + 1 - bd_count(nb, d0 + 1);
    assert_eq!(g, g2, "Riemann-Roch count did not stabilize");
    g
}

/// Echelonize the q-expansions of `elems`: scale so each leading
/// coefficient is 1 and eliminate that exponent from every other
/// expansion. Entries come back sorted by pole order, all distinct.
pub fn ref_basis(
    elems: &[FieldElement],
    ts: &LaurentSeries,
    fs: &LaurentSeries,
    trunc: i64,
    d_used: i64,
) -> Result<OrderCompleteBasis> {
    assert!(trunc >= 1, "REF needs at least O(q^1) to separate constants");
    let rows: Vec<(FieldElement, LaurentSeries)> = elems
        .iter()
        .map(|e| Ok((e.clone(), e.to_qseries(ts, fs, trunc)?.truncate_to(trunc))))
        .collect::<Result<_>>()?;
    ref_from_rows(rows, d_used)
}

/// Echelonization core on precomputed (element, expansion) rows.
///
/// The elimination itself works on coordinate vectors over one common
/// denominator, so every row operation is plain polynomial arithmetic;
/// the rational-function reduction is paid once per output entry.
fn ref_from_rows(
    in_rows: Vec<(FieldElement, LaurentSeries)>,
    d_used: i64,
) -> Result<OrderCompleteBasis> {
    if in_rows.is_empty() {
        return Ok(OrderCompleteBasis {
            entries: vec![],
            d_used,
            gaps: [0].into_iter().collect(),
        });
    }
    let field = in_rows[0].0.field().clone();
    let mut den = Poly::one();
    {
        let mut seen: Vec<&Poly> = vec![];
        for (e, _) in &in_rows {
            for c in e.coords() {
                if !c.is_zero() && !seen.contains(&c.den()) {
                    seen.push(c.den());
                }
            }
        }
        for d in seen {
            den = den.lcm(d);
        }
    }
    let mut rows: Vec<(Vec<Poly>, LaurentSeries)> = in_rows
        .into_iter()
        .map(|(e, s)| {
            let nums = e
                .coords()
                .iter()
                .map(|c| {
                    if c.is_zero() {
                        Poly::zero()
                    } else {
                        c.num() * &den.div_exact(c.den())
                    }
                })
                .collect();
            (nums, s)
        })
        .collect();
    let mut pivots: Vec<(Vec<Poly>, LaurentSeries)> = vec![];
    while !rows.is_empty() {
        // largest pole (smallest valuation) first
        let mut best: Option<(usize, i64)> = None;
        for (idx, (_, s)) in rows.iter().enumerate() {
            match s.valuation() {
                None => {
                    return Err(Error::InternalContractViolation(
                        "B_d elements are linearly dependent (or the precision \
                         window is too small to separate them)"
                            .into(),
                    ))
                }
                Some(v) => {
                    if best.map_or(true, |(_, bv)| v < bv) {
                        best = Some((idx, v));
                    }
                }
            }
        }
        let (idx, v) = best.unwrap();
        let (mut nums, mut ser) = rows.remove(idx);
        let lead = ser.coeff(v);
        let inv = lead.recip();
        nums = nums.iter().map(|p| p.scale(&inv)).collect();
        ser = ser.scale(&inv);
        // reduced form: clear this exponent everywhere
        for (on, os) in rows.iter_mut().chain(pivots.iter_mut()) {
            let c = os.coeff(v);
            if !c.is_zero() {
                for (a, b) in on.iter_mut().zip(nums.iter()) {
                    *a = &*a - &b.scale(&c);
                }
                *os = os.sub(&ser.scale(&c));
            }
        }
        pivots.push((nums, ser));
    }
    let mut entries: Vec<BasisEntry> = pivots
        .into_iter()
        .map(|(nums, series)| {
            let coords = nums
                .into_iter()
                .map(|p| RatFunc::new(p, den.clone()))
                .collect();
            BasisEntry {
                pole_order: series.pole_order().expect("pivot is nonzero"),
                expr: field.element(coords),
                series,
            }
        })
        .collect();
    entries.sort_by_key(|e| e.pole_order);
    for w in entries.windows(2) {
        assert!(
            w[0].pole_order < w[1].pole_order,
            "pole orders not strictly increasing after REF"
        );
    }
    let attained: BTreeSet<i64> = entries.iter().map(|e| e.pole_order).collect();
    let max_order = attained.iter().max().copied().unwrap_or(0);
    let gaps = (0..=max_order).filter(|o| !attained.contains(o)).collect();
    Ok(OrderCompleteBasis {
        entries,
        d_used,
        gaps,
    })
}

/// A normalized basis with the q-expansions of its elements.
///
/// Evaluating one basis element is the expensive step (its coordinates
/// are large rational functions), so the expansions are computed once
/// and every `B_d` entry `x^j b_i` reuses them: its expansion is
/// `ts^j · series(b_i)`.
pub struct ExpandedBasis<'a> {
    nb: &'a NormalizedBasis,
    ts: LaurentSeries,
    series: Vec<LaurentSeries>,
}

impl<'a> ExpandedBasis<'a> {
    pub fn new(
        nb: &'a NormalizedBasis,
        ts: &LaurentSeries,
        fs: &LaurentSeries,
    ) -> Result<ExpandedBasis<'a>> {
        let series = nb
            .b
            .iter()
            .map(|b| b.to_qseries(ts, fs, 1))
            .collect::<Result<_>>()?;
        Ok(ExpandedBasis {
            nb,
            ts: ts.clone(),
            series,
        })
    }

    /// `B_d^REF` with every expansion truncated to `O(q^trunc)`.
    pub fn order_complete_basis(&self, d: i64, trunc: i64) -> Result<OrderCompleteBasis> {
        assert!(d >= 0, "B_d needs d >= 0");
        assert!(trunc >= 1, "REF needs at least O(q^1) to separate constants");
        let mut rows: Vec<(FieldElement, LaurentSeries)> = vec![];
        for ((bi, &di), si) in self.nb.b.iter().zip(&self.nb.d).zip(&self.series) {
            let mut tpow = LaurentSeries::one(i64::MAX / 4);
            for j in 0..=(d - di) {
                let s = si.mul(&tpow);
                if s.trunc() < trunc {
                    return Err(Error::InsufficientPrecision(format!(
                        "basis expansion reached O(q^{}), need O(q^{trunc}); \
                         raise the input precision",
                        s.trunc()
                    )));
                }
                rows.push((mul_x_pow(bi, j as usize), s.truncate_to(trunc)));
                if j < d - di {
                    tpow = tpow.mul(&self.ts);
                }
            }
        }
        ref_from_rows(rows, d)
    }

    /// Smallest `d` such that `B_d^REF` has an entry of pole order ≥ `P`;
    /// `Err(Gap)` if none appears up to the Riemann-Roch bound.
    pub fn min_d_for_order(&self, p_target: i64, trunc: i64) -> Result<i64> {
        assert!(p_target >= 0);
        let n = self.nb.b.len() as i64;
        let dmax = (p_target + n - 1) / n + 1;
        for d in 0..=dmax {
            let ocb = self.order_complete_basis(d, trunc)?;
            if ocb.entries.iter().any(|e| e.pole_order >= p_target) {
                return Ok(d);
            }
        }
        Err(Error::Gap(p_target))
    }
}

/// Convenience: `B_d^REF` from scratch.
pub fn order_complete_basis(
    nb: &NormalizedBasis,
    d: i64,
    ts: &LaurentSeries,
    fs: &LaurentSeries,
    trunc: i64,
) -> Result<OrderCompleteBasis> {
    ExpandedBasis::new(nb, ts, fs)?.order_complete_basis(d, trunc)
}

/// Convenience: `ExpandedBasis::min_d_for_order` from scratch.
pub fn min_d_for_order(
    nb: &NormalizedBasis,
    p_target: i64,
    ts: &LaurentSeries,
    fs: &LaurentSeries,
    trunc: i64,
) -> Result<i64> {
    ExpandedBasis::new(nb, ts, fs)?.min_d_for_order(p_target, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qint;
    use crate::funcfield::FunctionField;
    use crate::intbasis::{infinity_basis, integral_basis};
    use crate::normalize::{minimal_d, normalize_at_infinity};
    use crate::qseries::{evaluate_recipe, SeriesRecipe};
    use std::sync::Arc;

    fn paper_nb() -> (Arc<FunctionField>, NormalizedBasis) {
        let field = crate::funcfield::tests::paper_field();
        let global = integral_basis(&field).unwrap();
        let at_inf = infinity_basis(&field).unwrap();
        (field.clone(), normalize_at_infinity(&global, &at_inf).unwrap())
    }

    fn series_pair(trunc: i64) -> (LaurentSeries, LaurentSeries) {
        let t = SeriesRecipe::parse("(* (qpow -5) (euler 1 12) (euler 11 -12))").unwrap();
        let f = SeriesRecipe::parse(
            "(* (dq (* (qpow -5) (euler 1 12) (euler 11 -12))) (euler 1 -2) (euler 11 -2))",
        )
        .unwrap();
        (
            evaluate_recipe(&t, trunc).unwrap(),
            evaluate_recipe(&f, trunc).unwrap(),
        )
    }

    #[test]
    fn bd_counts_and_genus() {
        let (_, nb) = paper_nb();
        assert_eq!(build_bd(&nb, 0).len(), 1); // only the d_i = 0 element
        assert_eq!(build_bd(&nb, 1).len(), 5);
        assert_eq!(build_bd(&nb, 2).len(), 10);
        assert_eq!(bd_count(&nb, 4), 20);
        assert_eq!(genus(&nb), 1);
    }

    #[test]
    fn paper_b1_ref() {
        let (_, nb) = paper_nb();
        let (ts, fs) = series_pair(80);
        let ocb = order_complete_basis(&nb, 1, &ts, &fs, 10).unwrap();
        let orders: Vec<i64> = ocb.entries.iter().map(|e| e.pole_order).collect();
        assert_eq!(orders, vec![0, 2, 3, 4, 5]);
        assert_eq!(ocb.gaps.iter().copied().collect::<Vec<_>>(), vec![1]);
        // printed expansions: b_i = q^{-i} + c_i q^{-1} + O(q), with
        // b_2 = q^-2 + 2q^-1 + 5q + 8q^2, b_3 = q^-3 + q^-1 + 2q + 2q^2,
        // b_4 = q^-4 - 2q^-1 + 6q + 3q^2
        let by_order = |o: i64| -> &BasisEntry {
            ocb.entries.iter().find(|e| e.pole_order == o).unwrap()
        };
        for (o, checks) in [
            (2i64, vec![(-2, 1), (-1, 2), (0, 0), (1, 5), (2, 8)]),
            (3, vec![(-3, 1), (-2, 0), (-1, 1), (0, 0), (1, 2), (2, 2)]),
            (4, vec![(-4, 1), (-3, 0), (-2, 0), (-1, -2), (0, 0), (1, 6), (2, 3)]),
        ] {
            let e = by_order(o);
            for (k, v) in checks {
                assert_eq!(e.series.coeff(k), qint(v), "order {o} coeff q^{k}");
            }
        }
        // b_0 is the constant 1
        assert_eq!(by_order(0).series.coeff(0), qint(1));
        assert!(by_order(0).series.sub(&LaurentSeries::one(5)).truncate_to(5).is_zero());
    }

    #[test]
    fn ref_is_self_verifying() {
        let (_, nb) = paper_nb();
        let (ts, fs) = series_pair(100);
        for d in [1i64, 2, 3] {
            let ocb = order_complete_basis(&nb, d, &ts, &fs, 8).unwrap();
            assert_eq!(ocb.entries.len() as i64, bd_count(&nb, d));
            for (i, e) in ocb.entries.iter().enumerate() {
                assert_eq!(e.series.coeff(-e.pole_order), qint(1));
                for (j, other) in ocb.entries.iter().enumerate() {
                    if i != j {
                        assert!(
                            other.series.coeff(-e.pole_order).is_zero(),
                            "entry {j} has a nonzero coefficient at the pivot of {i}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn series_match_recomputation_at_double_precision() {
        let (_, nb) = paper_nb();
        let (ts, fs) = series_pair(60);
        let ocb = order_complete_basis(&nb, 1, &ts, &fs, 6).unwrap();
        let (ts2, fs2) = series_pair(120);
        for e in &ocb.entries {
            let redo = e.expr.to_qseries(&ts2, &fs2, 12).unwrap();
            assert!(redo.sub(&e.series).truncate_to(6).is_zero());
        }
    }

    #[test]
    fn entries_integral_and_within_d() {
        let (field, nb) = paper_nb();
        let (ts, fs) = series_pair(80);
        let at_inf = infinity_basis(&field).unwrap();
        let ocb = order_complete_basis(&nb, 2, &ts, &fs, 6).unwrap();
        for e in &ocb.entries {
            assert!(e.expr.is_integral());
            assert!(minimal_d(&e.expr, &at_inf).unwrap() <= 2);
        }
    }

    #[test]
    fn min_d_targets() {
        let (_, nb) = paper_nb();
        let (ts, fs) = series_pair(140);
        assert_eq!(min_d_for_order(&nb, 0, &ts, &fs, 4).unwrap(), 0);
        assert_eq!(min_d_for_order(&nb, 4, &ts, &fs, 4).unwrap(), 1);
        assert_eq!(min_d_for_order(&nb, 16, &ts, &fs, 4).unwrap(), 4);
    }

    #[test]
    fn singleton_constant() {
        let (field, _) = paper_nb();
        let (ts, fs) = series_pair(40);
        let ocb = ref_basis(&[field.one()], &ts, &fs, 4, 0).unwrap();
        assert_eq!(ocb.entries.len(), 1);
        assert_eq!(ocb.entries[0].pole_order, 0);
        assert!(ocb.gaps.is_empty());
    }

    #[test]
    fn dependent_input_rejected() {
        let (field, _) = paper_nb();
        let (ts, fs) = series_pair(40);
        let dup = vec![field.one(), field.one()];
        assert!(ref_basis(&dup, &ts, &fs, 4, 0).is_err());
    }
}
