//! The algebraic relation `p(x, y)` with `p(t, f) = 0`, found from the
//! q-expansions of `t` and `f` by undetermined coefficients.

use crate::error::{Error, Result};
use crate::exact::{Int, Poly, QRat};
use crate::qseries::LaurentSeries;
use num::{BigInt, Integer, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Integer-coefficient bivariate polynomial, content 1; `degy` is exact,
/// `degx` an upper bound attained by some monomial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BivariatePoly {
    coeffs: BTreeMap<(u32, u32), Int>,
    degx: u32,
    degy: u32,
}

impl BivariatePoly {
    pub fn new(coeffs: BTreeMap<(u32, u32), Int>) -> Self {
        let mut coeffs = coeffs;
        coeffs.retain(|_, c| !c.is_zero());
        let degx = coeffs.keys().map(|&(i, _)| i).max().unwrap_or(0);
        let degy = coeffs.keys().map(|&(_, j)| j).max().unwrap_or(0);
        BivariatePoly { coeffs, degx, degy }
    }

    pub fn degx(&self) -> u32 {
        self.degx
    }

    pub fn degy(&self) -> u32 {
        self.degy
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), Int> {
        &self.coeffs
    }

    pub fn coeff(&self, i: u32, j: u32) -> Int {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Coefficient of `y^j` as a polynomial in x.
    pub fn coeff_of_y(&self, j: u32) -> Poly {
        let mut v = vec![QRat::zero(); self.degx as usize + 1];
        for (&(i, jj), c) in &self.coeffs {
            if jj == j {
                v[i as usize] = QRat::from_integer(c.clone());
            }
        }
        Poly::new(v)
    }

    /// True iff the coefficient of `y^degy` is the constant 1.
    pub fn is_monic_in_y(&self) -> bool {
        self.coeff_of_y(self.degy).is_one()
    }

    /// Canonical sparse text: lines `i j coefficient`, sorted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (&(i, j), c) in &self.coeffs {
            out.push_str(&format!("{i} {j} {c}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<BivariatePoly> {
        let mut coeffs = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<String> {
                tok.map(|s| s.to_string()).ok_or(Error::Parse {
                    position: lineno,
                    message: "expected `i j coefficient`".into(),
                })
            };
            let i: u32 = parse(it.next())?.parse().map_err(|_| Error::Parse {
                position: lineno,
                message: "bad x-exponent".into(),
            })?;
            let j: u32 = parse(it.next())?.parse().map_err(|_| Error::Parse {
                position: lineno,
                message: "bad y-exponent".into(),
            })?;
            let c: BigInt = parse(it.next())?.parse().map_err(|_| Error::Parse {
                position: lineno,
                message: "bad coefficient".into(),
            })?;
            coeffs.insert((i, j), c);
        }
        if coeffs.is_empty() {
            return Err(Error::Parse {
                position: 0,
                message: "empty relation file".into(),
            });
        }
        Ok(BivariatePoly::new(coeffs))
    }

    /// Evaluate at series arguments.
    pub fn eval_series(&self, xs: &LaurentSeries, ys: &LaurentSeries) -> LaurentSeries {
        let max_i = self.degx as i64;
        let max_j = self.degy as i64;
        let xpows = power_table(xs, max_i);
        let ypows = power_table(ys, max_j);
        let mut acc: Option<LaurentSeries> = None;
        for (&(i, j), c) in &self.coeffs {
            let term = xpows[i as usize]
                .mul(&ypows[j as usize])
                .scale(&QRat::from_integer(c.clone()));
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.expect("nonzero polynomial")
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        // highest y first, then highest x
        let mut keys: Vec<_> = self.coeffs.keys().copied().collect();
        keys.sort_by_key(|&(i, j)| (std::cmp::Reverse(j), std::cmp::Reverse(i)));
        for (i, j) in keys {
            let c = &self.coeffs[&(i, j)];
            if first {
                if c.is_negative() {
                    write!(fm, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(fm, " - ")?;
            } else {
                write!(fm, " + ")?;
            }
            let mag = c.abs();
            let mut printed = false;
            if !mag.is_one() || (i == 0 && j == 0) {
                write!(fm, "{mag}")?;
                printed = true;
            }
            if i > 0 {
                if printed {
                    write!(fm, "*")?;
                }
                if i == 1 {
                    write!(fm, "x")?;
                } else {
                    write!(fm, "x^{i}")?;
                }
                printed = true;
            }
            if j > 0 {
                if printed {
                    write!(fm, "*")?;
                }
                if j == 1 {
                    write!(fm, "y")?;
                } else {
                    write!(fm, "y^{j}")?;
                }
            }
        }
        Ok(())
    }
}

fn power_table(s: &LaurentSeries, max: i64) -> Vec<LaurentSeries> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(LaurentSeries::one(s.trunc().saturating_sub(s.valuation().unwrap_or(0))));
    for k in 1..=max {
        let prev = &out[(k - 1) as usize];
        out.push(prev.mul(s));
    }
    out
}

/// The precision `find_relation` demands of its input series.
pub fn required_precision(n: i64, m: i64) -> i64 {
    n * m + (n + 1) * (m + 1) + 10
}

/// Find the relation `p` with `p(t, f) = 0` by an Ansatz over all
/// monomials `x^i y^j`, `i ≤ m`, `j ≤ n`, matching q-expansion
/// coefficients. The nullspace of the matching system must be exactly
/// one-dimensional.
pub fn find_relation(ts: &LaurentSeries, fs: &LaurentSeries) -> Result<BivariatePoly> {
    let n = ts.pole_order()?;
    let m = fs.pole_order()?;
    if n <= 0 || m <= 0 {
        return Err(Error::DegenerateInput(
            "generators must have genuine poles at i∞".into(),
        ));
    }
    if n.gcd(&m) != 1 {
        return Err(Error::Coprimality(n, m));
    }
    let need = required_precision(n, m);
    if ts.trunc() < need || fs.trunc() < need {
        return Err(Error::InsufficientPrecision(format!(
            "relation Ansatz needs series to O(q^{need}), got O(q^{}) and O(q^{})",
            ts.trunc(),
            fs.trunc()
        )));
    }

    // Apart from {x^m, y^n} — which collide at pole order n·m and are
    // the reason a relation exists at all — the Ansatz monomials
    // x^i y^j (i ≤ m, j ≤ n) have pairwise distinct pole orders
    // n·i + m·j, because n·i + m·j = n·i' + m·j' forces n | j − j' and
    // the exponent bounds leave only the one collision. The matching
    // system is therefore triangular in the pole-order ordering, its
    // nullspace is at most one-dimensional (every vector in it must
    // involve y^n, or its deepest pole could not cancel), and greedy
    // elimination starting from y^n computes it exactly.
    let tpows = power_table(ts, m);
    let fpows = power_table(fs, n);
    let mut w = fpows[n as usize].clone();
    let mut rat: BTreeMap<(u32, u32), QRat> = BTreeMap::new();
    rat.insert((0, n as u32), QRat::one());
    while let Some(v) = w.valuation() {
        if v > 0 {
            break;
        }
        let pord = -v;
        // unique (i, j) with n·i + m·j = pord and j < n; j = n is
        // excluded so pole order n·m resolves to x^m
        let pick = (0..n).find_map(|j| {
            let rest = pord - m * j;
            if rest >= 0 && rest % n == 0 && rest / n <= m {
                Some((rest / n, j))
            } else {
                None
            }
        });
        let Some((i, j)) = pick else {
            return Err(Error::DegenerateInput(format!(
                "pole order {pord} in the expansion of y^{n} is outside the Ansatz monomials"
            )));
        };
        let mono = tpows[i as usize].mul(&fpows[j as usize]);
        let c = w.coeff(v) / mono.coeff(v);
        w = w.sub(&mono.scale(&c));
        if w.trunc() < 1 {
            return Err(Error::InsufficientPrecision(
                "precision window exhausted during the Ansatz elimination".into(),
            ));
        }
        rat.insert((i as u32, j as u32), -c);
    }
    if !w.is_zero() {
        return Err(Error::DegenerateInput(format!(
            "no relation of degrees ({m}, {n}): elimination leaves a residual of valuation {}",
            w.valuation().unwrap()
        )));
    }

    // clear denominators, make content 1, leading y-coefficient positive
    let mut den = BigInt::one();
    for c in rat.values() {
        den = den.lcm(c.denom());
    }
    let ints: BTreeMap<(u32, u32), Int> = rat
        .iter()
        .map(|(&k, c)| (k, c.numer() * (&den / c.denom())))
        .collect();
    let mut content = BigInt::zero();
    for c in ints.values() {
        content = content.gcd(c);
    }
    let coeffs = ints
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, &c / &content))
        .collect();
    let mut p = BivariatePoly::new(coeffs);
    if p.degy() as i64 != n || p.degx() as i64 != m {
        return Err(Error::DegenerateInput(format!(
            "relation has degrees ({}, {}) instead of ({m}, {n})",
            p.degx(),
            p.degy()
        )));
    }
    // sign: leading coefficient of the y^n coefficient positive
    if p.coeff_of_y(p.degy()).leading().is_negative() {
        let flipped = p.coeffs.iter().map(|(k, c)| (*k, -c)).collect();
        p = BivariatePoly::new(flipped);
    }
    // substitute back at full working precision
    let residual = p.eval_series(ts, fs);
    if !residual.is_zero() {
        return Err(Error::InternalContractViolation(format!(
            "relation residual nonzero: valuation {}",
            residual.valuation().unwrap()
        )));
    }
    Ok(p)
}

/// Valuation of `p(ts, fs)`; the relation verifies at precision `T` iff
/// the returned value is ≥ `T`.
pub fn verify_relation(
    p: &BivariatePoly,
    ts: &LaurentSeries,
    fs: &LaurentSeries,
    trunc: i64,
) -> Result<i64> {
    if p.is_zero() {
        return Err(Error::DegenerateInput(
            "the zero polynomial is not a relation".into(),
        ));
    }
    let r = p.eval_series(ts, fs);
    if r.trunc() < trunc {
        return Err(Error::InsufficientPrecision(format!(
            "series only support verification to O(q^{}), need O(q^{trunc})",
            r.trunc()
        )));
    }
    Ok(r.valuation().unwrap_or(r.trunc()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qint;
    use crate::qseries::{evaluate_recipe, SeriesRecipe};

    fn series_t(trunc: i64) -> LaurentSeries {
        let r = SeriesRecipe::parse("(* (qpow -5) (euler 1 12) (euler 11 -12))").unwrap();
        evaluate_recipe(&r, trunc).unwrap()
    }

    fn series_f(trunc: i64) -> LaurentSeries {
        let r = SeriesRecipe::parse(
            "(* (dq (* (qpow -5) (euler 1 12) (euler 11 -12))) (euler 1 -2) (euler 11 -2))",
        )
        .unwrap();
        evaluate_recipe(&r, trunc).unwrap()
    }

    /// The paper's first relation:
    /// y^5 + 170xy^4 + 9345x^2y^3 + 167320x^3y^2 + (5^5x^2 - 7903458x + 5^5·11^6)x^4
    pub fn paper_relation() -> BivariatePoly {
        let mut c = BTreeMap::new();
        c.insert((0, 5), BigInt::from(1));
        c.insert((1, 4), BigInt::from(170));
        c.insert((2, 3), BigInt::from(9345));
        c.insert((3, 2), BigInt::from(167320));
        c.insert((6, 0), BigInt::from(3125)); // 5^5
        c.insert((5, 0), BigInt::from(-7903458));
        c.insert((4, 0), BigInt::from(3125i64 * 1771561)); // 5^5 · 11^6
        BivariatePoly::new(c)
    }

    #[test]
    fn polynomial_in_t_case() {
        // ts = q^-1, fs = q^-2 + q^-1  ->  y = x^2 + x
        let ts = LaurentSeries::new(-1, vec![qint(1)], 30);
        let fs = LaurentSeries::new(-2, vec![qint(1), qint(1)], 30);
        let p = find_relation(&ts, &fs).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert((0, 1), BigInt::from(1));
        expect.insert((2, 0), BigInt::from(-1));
        expect.insert((1, 0), BigInt::from(-1));
        assert_eq!(p, BivariatePoly::new(expect));
    }

    #[test]
    fn reproduces_paper_relation() {
        let need = required_precision(5, 6);
        let ts = series_t(need);
        let fs = series_f(need);
        let p = find_relation(&ts, &fs).unwrap();
        assert_eq!(p, paper_relation());
        assert!(p.is_monic_in_y());
        // determinism
        let p2 = find_relation(&ts, &fs).unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn residual_far_beyond_ansatz_window() {
        let t2 = 2 * required_precision(5, 6);
        let ts = series_t(t2);
        let fs = series_f(t2);
        let p = paper_relation();
        let val = verify_relation(&p, &ts, &fs, 50).unwrap();
        assert!(val >= 50, "residual valuation {val}");
    }

    #[test]
    fn perturbed_relation_fails() {
        let ts = series_t(100);
        let fs = series_f(100);
        let mut coeffs = paper_relation().coeffs().clone();
        *coeffs.get_mut(&(1, 4)).unwrap() += 1;
        let bad = BivariatePoly::new(coeffs);
        let val = verify_relation(&bad, &ts, &fs, 50).unwrap();
        assert!(val < 0, "perturbed relation should leave a principal part, got {val}");
    }

    #[test]
    fn zero_polynomial_rejected() {
        let ts = series_t(60);
        let fs = series_f(60);
        let zero = BivariatePoly::new(BTreeMap::new());
        assert!(verify_relation(&zero, &ts, &fs, 10).is_err());
    }

    #[test]
    fn coprimality_enforced() {
        let ts = series_t(100);
        match find_relation(&ts, &ts) {
            Err(Error::Coprimality(5, 5)) => {}
            other => panic!("expected coprimality error, got {other:?}"),
        }
    }

    #[test]
    fn text_roundtrip() {
        let p = paper_relation();
        let q = BivariatePoly::from_text(&p.to_text()).unwrap();
        assert_eq!(p, q);
    }
}
