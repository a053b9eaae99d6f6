//! Integral bases: a ℚ[x]-module basis of `O_K` and an `R_∞`-module
//! basis of `O_∞`.
//!
//! The maximality machinery is a multiplier-ring iteration per
//! squarefree discriminant factor `k` with multiplicity ≥ 2:
//! the radical of `kO` comes from the kernel of the trace form mod `k`,
//! then `O ← {z : z·rad ⊆ rad}` via exact linear algebra, iterated to
//! stabilization. Elimination mod a reducible `k` can hit a zero
//! divisor; the gcd it exposes splits `k` and the factor is reprocessed
//! in pieces.

use crate::error::{Error, Result};
use crate::exact::{Poly, QRat, RatFunc};
use crate::funcfield::{FieldElement, FunctionField};
use crate::relation::BivariatePoly;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisKind {
    Global,
    AtInfinity,
}

#[derive(Clone)]
pub struct IntegralBasis {
    pub elems: Vec<FieldElement>,
    pub kind: BasisKind,
}

/// An order in `K`, represented by an n×n coordinate matrix over ℚ[x]
/// with a common monic denominator: basis element `i` is
/// `(Σ_j mat[i][j] y^j) / den`, triangular in y (`mat[i][j] = 0` for `j > i`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Order {
    mat: Vec<Vec<Poly>>,
    den: Poly,
}

impl Order {
    fn base(n: usize) -> Order {
        let mat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Poly::one() } else { Poly::zero() })
                    .collect()
            })
            .collect();
        Order {
            mat,
            den: Poly::one(),
        }
    }

    fn n(&self) -> usize {
        // column count: `normalize` may be called on a stacked
        // (rows > n) generating set
        self.mat.first().map_or(0, |r| r.len())
    }

    /// Canonical form: HNF rows, content 1 against the denominator,
    /// denominator monic, pivots monic.
    fn normalize(mut self) -> Order {
        let n = self.n();
        self.mat = hnf_rows(self.mat, n);
        // strip common polynomial content of all entries and the denominator
        let mut g = self.den.clone();
        for row in &self.mat {
            for e in row {
                if g.is_one() {
                    break;
                }
                if !e.is_zero() {
                    g = g.gcd(e);
                }
            }
        }
        if !g.is_one() {
            for row in self.mat.iter_mut() {
                for e in row.iter_mut() {
                    if !e.is_zero() {
                        *e = e.div_exact(&g);
                    }
                }
            }
            self.den = self.den.div_exact(&g);
        }
        // make the denominator monic, folding the constant into the rows
        let lc = self.den.leading();
        if !lc.is_one() {
            let inv = lc.recip();
            self.den = self.den.scale(&inv);
            for row in self.mat.iter_mut() {
                for e in row.iter_mut() {
                    *e = e.scale(&inv);
                }
            }
        }
        // re-normalize pivots to monic after the content pass
        for i in 0..n {
            let lc = self.mat[i][i].leading();
            if !lc.is_zero() && !lc.is_one() {
                let inv = lc.recip();
                for e in self.mat[i].iter_mut() {
                    *e = e.scale(&inv);
                }
            }
        }
        self
    }

    pub fn elements(&self, field: &Arc<FunctionField>) -> Vec<FieldElement> {
        let den = RatFunc::from_poly(self.den.clone());
        self.mat
            .iter()
            .map(|row| {
                field.element(
                    row.iter()
                        .map(|p| &RatFunc::from_poly(p.clone()) / &den)
                        .collect(),
                )
            })
            .collect()
    }

    /// Coordinates of an element with respect to this order's basis
    /// (entries in ℚ(x); they are polynomials iff the element lies in
    /// the order's module).
    pub fn coords_of(&self, elem: &FieldElement) -> Vec<RatFunc> {
        let n = self.n();
        let den = RatFunc::from_poly(self.den.clone());
        let mut coords = vec![RatFunc::zero(); n];
        let mut residual: Vec<RatFunc> = elem.coords().to_vec();
        for i in (0..n).rev() {
            // row i is the only remaining contributor to coordinate y^i
            let pivot = RatFunc::from_poly(self.mat[i][i].clone());
            let c = &(&residual[i] * &den) / &pivot;
            for j in 0..=i {
                let delta = &(&c * &RatFunc::from_poly(self.mat[i][j].clone())) / &den;
                residual[j] = &residual[j] - &delta;
            }
            coords[i] = c;
        }
        debug_assert!(residual.iter().all(|r| r.is_zero()));
        coords
    }

    pub fn contains(&self, elem: &FieldElement) -> bool {
        self.coords_of(elem).iter().all(|c| c.is_polynomial())
    }

    /// Canonical order (module) spanned by the given elements over ℚ[x];
    /// two element families span the same module iff these compare equal.
    pub fn from_elements(elems: &[FieldElement]) -> Order {
        let mut den = Poly::one();
        for e in elems {
            for c in e.coords() {
                den = den.lcm(c.den());
            }
        }
        let rows = elems
            .iter()
            .map(|e| {
                e.coords()
                    .iter()
                    .map(|c| {
                        let scaled = c * &RatFunc::from_poly(den.clone());
                        assert!(scaled.is_polynomial());
                        scaled.num().clone()
                    })
                    .collect()
            })
            .collect();
        Order { mat: rows, den }.normalize()
    }

    /// Module sum of two orders over ℚ[x].
    fn merge(&self, other: &Order) -> Order {
        let d = self.den.lcm(&other.den);
        let s1 = d.div_exact(&self.den);
        let s2 = d.div_exact(&other.den);
        let mut rows: Vec<Vec<Poly>> = vec![];
        for row in &self.mat {
            rows.push(row.iter().map(|p| p * &s1).collect());
        }
        for row in &other.mat {
            rows.push(row.iter().map(|p| p * &s2).collect());
        }
        Order { mat: rows, den: d }.normalize()
    }
}

/// Hermite-style normal form of a set of row vectors over ℚ[x], with
/// columns processed from the highest y-degree down so the result is
/// triangular in y: the pivot row for column `i` has zero entries in
/// columns `> i`. Requires (and asserts) full rank n.
fn hnf_rows(rows: Vec<Vec<Poly>>, n: usize) -> Vec<Vec<Poly>> {
    let mut pool: Vec<Vec<Poly>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|p| !p.is_zero()))
        .collect();
    let mut pivots: Vec<Option<Vec<Poly>>> = vec![None; n];
    for col in (0..n).rev() {
        loop {
            let nz: Vec<usize> = pool
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .map(|(i, _)| i)
                .collect();
            if nz.is_empty() {
                break;
            }
            if nz.len() == 1 {
                let row = pool.remove(nz[0]);
                pivots[col] = Some(row);
                break;
            }
            // reduce the larger-degree entries by the smallest
            let &imin = nz
                .iter()
                .min_by_key(|&&i| pool[i][col].degree())
                .unwrap();
            let min_row = pool[imin].clone();
            for &i in &nz {
                if i == imin {
                    continue;
                }
                let (q, _) = pool[i][col].divrem(&min_row[col]);
                for j in 0..n {
                    let delta = &q * &min_row[j];
                    pool[i][j] = &pool[i][j] - &delta;
                }
            }
            pool.retain(|r| r.iter().any(|p| !p.is_zero()));
        }
    }
    assert!(
        pivots.iter().all(|p| p.is_some()),
        "module does not have full rank"
    );
    let mut out: Vec<Vec<Poly>> = pivots.into_iter().map(|p| p.unwrap()).collect();
    // monic pivots, then reduce lower columns of higher rows
    for i in 0..n {
        let lc = out[i][i].leading();
        if !lc.is_one() {
            let inv = lc.recip();
            for e in out[i].iter_mut() {
                *e = e.scale(&inv);
            }
        }
    }
    for j in 1..n {
        for i in (0..j).rev() {
            let (q, _) = out[j][i].divrem(&out[i][i]);
            if q.is_zero() {
                continue;
            }
            let pivot_row = out[i].clone();
            for c in 0..=i {
                let delta = &q * &pivot_row[c];
                out[j][c] = &out[j][c] - &delta;
            }
        }
    }
    out
}

// ---- integer polynomials in x (coefficients of y-polynomials) ----
//
// The resultant work stays in ℤ[x]: rational arithmetic normalizes a
// gcd on every operation, which is far too slow at the coefficient
// sizes a degree-(16, 5) relation produces.

type IPoly = Vec<num::BigInt>;

fn ip_trim(mut v: IPoly) -> IPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn ip_mul(a: &IPoly, b: &IPoly) -> IPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![num::BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    ip_trim(out)
}

fn ip_sub(a: &IPoly, b: &IPoly) -> IPoly {
    let n = a.len().max(b.len());
    let zero = num::BigInt::zero();
    let out = (0..n)
        .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
        .collect();
    ip_trim(out)
}

fn ip_pow(a: &IPoly, e: usize) -> IPoly {
    let mut acc = vec![num::BigInt::from(1)];
    for _ in 0..e {
        acc = ip_mul(&acc, a);
    }
    acc
}

/// Exact division in ℤ[x]; panics when not exact.
fn ip_div_exact(a: &IPoly, b: &IPoly) -> IPoly {
    assert!(!b.is_empty(), "integer poly division by zero");
    if a.is_empty() {
        return vec![];
    }
    assert!(a.len() >= b.len(), "inexact integer poly division");
    let mut rem = a.clone();
    let mut quot = vec![num::BigInt::zero(); a.len() - b.len() + 1];
    let lcb = b.last().unwrap();
    for k in (0..quot.len()).rev() {
        let top = rem[k + b.len() - 1].clone();
        if top.is_zero() {
            continue;
        }
        let (q, r) = num::Integer::div_rem(&top, lcb);
        assert!(r.is_zero(), "inexact integer poly division");
        for (j, bc) in b.iter().enumerate() {
            rem[k + j] -= bc * &q;
        }
        quot[k] = q;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact integer poly division");
    ip_trim(quot)
}

fn ip_to_poly(a: &IPoly) -> Poly {
    Poly::new(a.iter().map(|c| QRat::from_integer(c.clone())).collect())
}

/// Pseudo-remainder of y-polynomials over ℤ[x]:
/// `lc(b)^{deg a - deg b + 1} · a mod b`.
fn yprem(a: &[IPoly], b: &[IPoly]) -> Vec<IPoly> {
    let db = b.len() - 1;
    let lcb = b.last().unwrap().clone();
    let mut rem: Vec<IPoly> = a.to_vec();
    let mut scalings_left = (a.len() - 1 - db + 1) as i64;
    while rem.len() > db {
        let lr = rem.last().unwrap().clone();
        if lr.is_empty() {
            rem.pop();
            continue;
        }
        let k = rem.len() - 1 - db;
        for c in rem.iter_mut() {
            *c = ip_mul(c, &lcb);
        }
        for (j, bc) in b.iter().enumerate() {
            let delta = ip_mul(bc, &lr);
            rem[k + j] = ip_sub(&rem[k + j], &delta);
        }
        while rem.last().is_some_and(|c| c.is_empty()) {
            rem.pop();
        }
        scalings_left -= 1;
    }
    // normalize to the full lc^{δ+1} factor when degrees dropped early
    if scalings_left > 0 {
        let factor = ip_pow(&lcb, scalings_left as usize);
        for c in rem.iter_mut() {
            *c = ip_mul(c, &factor);
        }
    }
    rem
}

fn ydeg(a: &[IPoly]) -> i64 {
    a.len() as i64 - 1
}

/// True resultant (with sign) of two y-polynomials over ℤ[x] by the
/// subresultant PRS, which divides out the predictable content each
/// step so coefficient growth stays linear.
fn subresultant(mut a: Vec<IPoly>, mut b: Vec<IPoly>) -> IPoly {
    let one: IPoly = vec![num::BigInt::from(1)];
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut s = 1i64;
    if ydeg(&a) < ydeg(&b) {
        if ydeg(&a) % 2 == 1 && ydeg(&b) % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = one.clone();
    let mut h = one.clone();
    while ydeg(&b) > 0 {
        let delta = (ydeg(&a) - ydeg(&b)) as usize;
        if ydeg(&a) % 2 == 1 && ydeg(&b) % 2 == 1 {
            s = -s;
        }
        let r = yprem(&a, &b);
        a = b;
        let divisor = ip_mul(&g, &ip_pow(&h, delta));
        b = r.into_iter().map(|c| {
            if c.is_empty() {
                c
            } else {
                ip_div_exact(&c, &divisor)
            }
        }).collect();
        while b.last().is_some_and(|c| c.is_empty()) {
            b.pop();
        }
        if b.is_empty() {
            // common factor of positive degree
            return vec![];
        }
        g = a.last().unwrap().clone();
        // h <- g^δ / h^{δ-1}
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => ip_div_exact(&ip_pow(&g, delta), &ip_pow(&h, delta - 1)),
        };
    }
    // deg b == 0
    let da = ydeg(&a) as usize;
    let lb = b.last().unwrap().clone();
    // res = s · lc(B)^{deg A} / h^{deg A - 1}
    let num = ip_pow(&lb, da);
    let res = if da >= 1 {
        ip_div_exact(&num, &ip_pow(&h, da - 1))
    } else {
        num
    };
    if s < 0 {
        ip_trim(res.iter().map(|c| -c).collect())
    } else {
        res
    }
}

/// Resultant of `p` and `∂p/∂y` with respect to y.
pub fn resultant_y(p: &BivariatePoly) -> Poly {
    let n = p.degy() as usize;
    let mut a: Vec<IPoly> = vec![vec![]; n + 1];
    for (&(i, j), c) in p.coeffs() {
        let row = &mut a[j as usize];
        if row.len() <= i as usize {
            row.resize(i as usize + 1, num::BigInt::zero());
        }
        row[i as usize] = c.clone();
    }
    let da: Vec<IPoly> = (1..=n)
        .map(|j| ip_trim(a[j].iter().map(|c| c * num::BigInt::from(j as i64)).collect()))
        .collect();
    let a: Vec<IPoly> = a.into_iter().map(ip_trim).collect();
    ip_to_poly(&subresultant(a, da))
}

/// Yun squarefree decomposition, re-exported at the module level as the
/// localization-target provider.
pub fn squarefree_factor(d: &Poly) -> Vec<(Poly, usize)> {
    d.squarefree_factor()
}

// ---- arithmetic mod a squarefree k with D5-style splitting ----

/// A nontrivial factor of `k` discovered while trying to invert a zero
/// divisor.
struct SplitFound(Poly);

fn inv_mod(a: &Poly, k: &Poly) -> std::result::Result<Poly, SplitFound> {
    let (g, s, _) = a.ext_gcd(k);
    if g.degree() > 0 {
        return Err(SplitFound(g));
    }
    Ok(s.rem(k))
}

/// Kernel basis of the matrix over ℚ[x]/(k); entries reduced mod k.
fn kernel_mod_k(
    mut rows: Vec<Vec<Poly>>,
    ncols: usize,
    k: &Poly,
) -> std::result::Result<Vec<Vec<Poly>>, SplitFound> {
    for row in rows.iter_mut() {
        for e in row.iter_mut() {
            *e = e.rem(k);
        }
    }
    let nrows = rows.len();
    let mut pivots: Vec<usize> = vec![];
    let mut r = 0usize;
    for c in 0..ncols {
        if r >= nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = inv_mod(&rows[r][c], k)?;
        for j in 0..ncols {
            rows[r][j] = (&rows[r][j] * &inv).rem(k);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in 0..ncols {
                let delta = (&f * &pivot_row[j]).rem(k);
                row[j] = (&row[j] - &delta).rem(k);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut kernel = vec![];
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Poly::zero(); ncols];
        v[free] = Poly::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = (-&rows[i][free]).rem(k);
        }
        kernel.push(v);
    }
    Ok(kernel)
}

/// One multiplier-ring step at factor `k`: returns the enlarged order,
/// `None` when the order is already k-maximal.
fn multiplier_step(
    field: &Arc<FunctionField>,
    order: &Order,
    k: &Poly,
) -> std::result::Result<Option<Order>, SplitFound> {
    let n = order.n();
    let elems = order.elements(field);

    // radical of kO: kernel of the trace form mod k
    let mut trace_rows = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let t = elems[i].mul(&elems[j]).trace();
            assert!(
                t.is_polynomial(),
                "trace of integral elements must be polynomial"
            );
            let tp = t.num().rem(k);
            trace_rows[i][j] = tp.clone();
            trace_rows[j][i] = tp;
        }
    }
    let rad_kernel = kernel_mod_k(trace_rows, n, k)?;
    if rad_kernel.is_empty() {
        // rad(kO) = kO, whose multiplier ring is O itself
        return Ok(None);
    }

    // J basis (coordinates over the order basis)
    let mut jrows: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { k.clone() } else { Poly::zero() })
                .collect()
        })
        .collect();
    jrows.extend(rad_kernel);
    let jmat = hnf_rows(jrows, n);

    // J basis as field elements
    let jelems: Vec<FieldElement> = jmat
        .iter()
        .map(|row| {
            let mut acc = field.zero();
            for (l, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&elems[l].scale(&RatFunc::from_poly(c.clone())));
                }
            }
            acc
        })
        .collect();

    // action of each basis element on J / kJ, in J coordinates
    let mut action: Vec<Vec<Vec<Poly>>> = Vec::with_capacity(n);
    for ei in &elems {
        let mut a_i = Vec::with_capacity(n);
        for hj in &jelems {
            let prod = ei.mul(hj);
            // coords over the order basis (polynomial since J is an ideal)
            let in_order = order.coords_of(&prod);
            let mut u: Vec<Poly> = Vec::with_capacity(n);
            for c in &in_order {
                assert!(c.is_polynomial(), "product left the order module");
                u.push(c.num().clone());
            }
            // coords over the J basis by back-substitution (J triangular)
            let mut w = vec![Poly::zero(); n];
            let mut residual = u;
            for idx in (0..n).rev() {
                let (q, r) = residual[idx].divrem(&jmat[idx][idx]);
                assert!(r.is_zero(), "product is not in the radical module");
                for jj in 0..=idx {
                    let delta = &q * &jmat[idx][jj];
                    residual[jj] = &residual[jj] - &delta;
                }
                w[idx] = q;
            }
            a_i.push(w.iter().map(|p| p.rem(k)).collect());
        }
        action.push(a_i);
    }

    // solve Σ_i w_i · action_i ≡ 0 (mod k)
    let mut sys: Vec<Vec<Poly>> = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            sys.push((0..n).map(|i| action[i][j][l].clone()).collect());
        }
    }
    let wkernel = kernel_mod_k(sys, n, k)?;
    if wkernel.is_empty() {
        return Ok(None);
    }

    // O' = (1/k) · span(kI, kernel lifts), in order coordinates
    let mut wrows: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { k.clone() } else { Poly::zero() })
                .collect()
        })
        .collect();
    wrows.extend(wkernel);
    let whnf = hnf_rows(wrows, n);
    // new order matrix over the y-basis: (whnf · order.mat) / (k · den)
    let mut newmat = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for l in 0..n {
            if whnf[i][l].is_zero() {
                continue;
            }
            for j in 0..=l {
                let delta = &whnf[i][l] * &order.mat[l][j];
                newmat[i][j] = &newmat[i][j] + &delta;
            }
        }
    }
    let newden = &order.den * k;
    let newer = Order {
        mat: newmat,
        den: newden,
    }
    .normalize();
    if &newer == order {
        Ok(None)
    } else {
        Ok(Some(newer))
    }
}

/// Multiplicity of `k` in `p` (number of times `k` divides exactly).
fn val_at(p: &Poly, k: &Poly) -> i64 {
    let mut v = 0;
    let mut rest = p.clone();
    loop {
        let (q, r) = rest.divrem(k);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        rest = q;
    }
}

impl Order {
    /// Valuation at `k` of the module determinant over the `y`-basis.
    fn det_valuation_at(&self, k: &Poly) -> i64 {
        let n = self.n();
        let diag: i64 = (0..n).map(|i| val_at(&self.mat[i][i], k)).sum();
        diag - n as i64 * val_at(&self.den, k)
    }
}

/// Enlarge the base order to one maximal at every irreducible factor of
/// `k` (which must be squarefree and appear in the discriminant with
/// multiplicity exactly `mult`); handles zero-divisor splits by
/// refining `k`.
///
/// Each successful multiplier step with index `k^j` lowers the
/// discriminant valuation by `2j`, so once the remaining valuation
/// drops below 2 the order is already maximal there and the confirming
/// re-run (the most expensive step, on the largest order) is skipped.
fn maximize_at(field: &Arc<FunctionField>, k: Poly, mult: usize) -> Result<Order> {
    let n = field.degree();
    let mut result = Order::base(n);
    let mut stack = vec![k];
    let mut guard = 0usize;
    while let Some(factor) = stack.pop() {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::InternalContractViolation(
                "maximality iteration did not terminate".into(),
            ));
        }
        if factor.degree() < 1 {
            continue;
        }
        let mut order = Order::base(n);
        let mut remaining = mult as i64;
        let mut split: Option<Poly> = None;
        while remaining >= 2 {
            match multiplier_step(field, &order, &factor) {
                Ok(None) => break,
                Ok(Some(o)) => {
                    let j = order.det_valuation_at(&factor) - o.det_valuation_at(&factor);
                    assert!(j >= 1, "enlarged order must gain index at the factor");
                    remaining -= 2 * j;
                    order = o;
                }
                Err(SplitFound(d)) => {
                    split = Some(d);
                    break;
                }
            }
        }
        match split {
            Some(d) => {
                let rest = factor.div_exact(&d);
                stack.push(d);
                stack.push(rest);
            }
            None => result = result.merge(&order),
        }
    }
    Ok(result)
}

/// Discriminant factors that need work: squarefree factors of
/// `disc_y(p)` with multiplicity ≥ 2.
fn critical_factors(p: &BivariatePoly) -> Result<Vec<(Poly, usize)>> {
    let disc = resultant_y(p);
    if disc.is_zero() {
        return Err(Error::DegenerateInput(
            "zero discriminant: the relation is not squarefree".into(),
        ));
    }
    Ok(squarefree_factor(&disc)
        .into_iter()
        .filter(|(_, m)| *m >= 2)
        .collect())
}

/// Global integral basis of `O_K` over ℚ[x], triangular in y.
pub fn integral_basis_order(field: &Arc<FunctionField>) -> Result<Order> {
    let mut order = Order::base(field.degree());
    for (factor, mult) in critical_factors(field.relation())? {
        let local = maximize_at(field, factor, mult)?;
        order = order.merge(&local);
    }
    Ok(order)
}

pub fn integral_basis(field: &Arc<FunctionField>) -> Result<IntegralBasis> {
    let order = integral_basis_order(field)?;
    Ok(IntegralBasis {
        elems: order.elements(field),
        kind: BasisKind::Global,
    })
}

/// Record of the `ỹ = lc_y(p) · y` transform used to make a relation
/// monic in y.
#[derive(Clone, Debug)]
pub struct MonicSubstitution {
    pub scale: Poly,
}

impl MonicSubstitution {
    pub fn is_identity(&self) -> bool {
        self.scale.is_one()
    }
}

/// Monicizing transform: returns `p̃` monic in y and the substitution
/// record for transporting basis elements back.
pub fn make_monic(p: &BivariatePoly) -> (BivariatePoly, MonicSubstitution) {
    let n = p.degy();
    let lc = p.coeff_of_y(n);
    if lc.is_one() {
        return (
            p.clone(),
            MonicSubstitution {
                scale: Poly::one(),
            },
        );
    }
    // p̃(x, ỹ) = lc^{n-1} p(x, ỹ / lc): coefficient of ỹ^j is a_j · lc^{n-1-j}
    let mut coeffs: BTreeMap<(u32, u32), num::BigInt> = BTreeMap::new();
    for j in 0..=n {
        let a = p.coeff_of_y(j);
        if a.is_zero() {
            continue;
        }
        let scaled = &a * &lc.pow((n - 1 - j.min(n - 1)) as usize);
        let scaled = if j == n { Poly::one() } else { scaled };
        for (i, c) in scaled.coeffs().iter().enumerate() {
            if !c.is_zero() {
                assert!(c.denom().is_one(), "integer relation expected");
                coeffs.insert((i as u32, j), c.numer().clone());
            }
        }
    }
    (
        BivariatePoly::new(coeffs),
        MonicSubstitution { scale: lc },
    )
}

/// The relation after `x ↦ 1/x̃`, `ŷ = y x̃^w`, with the minimal integer
/// `w ≥ 0` making the transformed relation monic in `ŷ` with
/// coefficients regular (polynomial) at `x̃ = 0`.
pub fn infinity_transform(p: &BivariatePoly) -> (BivariatePoly, i64) {
    let n = p.degy() as i64;
    let mut w: i64 = 0;
    for j in 0..n {
        let a = p.coeff_of_y(j as u32);
        if a.is_zero() {
            continue;
        }
        let need = (a.degree() + (n - j) - 1) / (n - j); // ceil(deg / (n - j))
        w = w.max(need);
    }
    let mut coeffs: BTreeMap<(u32, u32), num::BigInt> = BTreeMap::new();
    for j in 0..=n {
        let a = p.coeff_of_y(j as u32);
        if a.is_zero() {
            continue;
        }
        let shift = (n - j) * w - a.degree();
        let rev = a.reverse().shift_up(shift as usize);
        for (i, c) in rev.coeffs().iter().enumerate() {
            if !c.is_zero() {
                coeffs.insert((i as u32, j as u32), c.numer().clone());
            }
        }
    }
    (BivariatePoly::new(coeffs), w)
}

/// Basis of `O_∞` as `R_∞`-module, expressed in the original field `K`.
///
/// Computed by the substitution recipe: send `x ↦ 1/x̃`, rescale
/// `ŷ = y x̃^w`, take a local integral basis at `x̃ = 0`, then transport
/// back with `x̃ = 1/x`.
pub fn infinity_basis(field: &Arc<FunctionField>) -> Result<IntegralBasis> {
    let p = field.relation();
    let (phat, w) = infinity_transform(p);
    let fhat = FunctionField::new(phat)?;
    let disc = resultant_y(fhat.relation());
    if disc.is_zero() {
        return Err(Error::DegenerateInput(
            "zero discriminant after the infinity transform".into(),
        ));
    }
    let xt = Poly::x();
    let mult = disc.valuation_at_zero();
    let order = if mult >= 2 {
        // local work is only needed at x̃ = 0
        maximize_at(&fhat, xt, mult as usize)?
    } else {
        Order::base(fhat.degree())
    };
    // transport: Σ_j (c_j(x̃)/den(x̃)) ŷ^j  ↦  Σ_j c_j(1/x)/den(1/x) · x^{-jw} y^j
    let n = field.degree();
    let elems = order
        .mat
        .iter()
        .map(|row| {
            let coords: Vec<RatFunc> = (0..n)
                .map(|j| {
                    if row[j].is_zero() {
                        return RatFunc::zero();
                    }
                    let c = RatFunc::new(row[j].clone(), order.den.clone()).subst_inverse_x();
                    let jw = (j as i64) * w;
                    &c * &RatFunc::new(Poly::one(), Poly::x().pow(jw as usize))
                })
                .collect();
            field.element(coords)
        })
        .collect();
    Ok(IntegralBasis {
        elems,
        kind: BasisKind::AtInfinity,
    })
}

/// Integrality over `R_∞`: all characteristic-polynomial coefficients
/// regular at `x = ∞`.
pub fn is_integral_at_infinity(elem: &FieldElement) -> bool {
    elem.charpoly().iter().all(|c| c.regular_at_infinity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qint;
    use std::collections::BTreeMap as Map;

    fn curve(coeffs: &[((u32, u32), i64)]) -> Arc<FunctionField> {
        let mut m = Map::new();
        for &((i, j), c) in coeffs {
            m.insert((i, j), num::BigInt::from(c));
        }
        FunctionField::new(BivariatePoly::new(m)).unwrap()
    }

    /// y^2 - x: smooth, trivial discriminant multiplicity.
    #[test]
    fn smooth_curve_global_basis_is_trivial() {
        let k = curve(&[((0, 2), 1), ((1, 0), -1)]);
        let basis = integral_basis(&k).unwrap();
        assert_eq!(basis.elems.len(), 2);
        assert_eq!(basis.elems[0], k.one());
        assert_eq!(basis.elems[1], k.y());
        for e in &basis.elems {
            assert!(e.is_integral());
        }
    }

    /// y^2 - x^2(x+1): the node demands y/x in the basis.
    #[test]
    fn nodal_cubic_basis() {
        let k = curve(&[((0, 2), 1), ((3, 0), -1), ((2, 0), -1)]);
        let basis = integral_basis(&k).unwrap();
        assert_eq!(basis.elems.len(), 2);
        assert_eq!(basis.elems[0], k.one());
        let y_over_x = k.y().scale(&RatFunc::new(Poly::one(), Poly::x()));
        assert_eq!(basis.elems[1], y_over_x);
        // (y/x)^2 = x + 1, monic integral
        assert!(y_over_x.is_integral());
    }

    #[test]
    fn smooth_curve_infinity_basis() {
        let k = curve(&[((0, 2), 1), ((1, 0), -1)]);
        let basis = infinity_basis(&k).unwrap();
        assert_eq!(basis.elems.len(), 2);
        assert_eq!(basis.elems[0], k.one());
        let y_over_x = k.y().scale(&RatFunc::new(Poly::one(), Poly::x()));
        assert_eq!(basis.elems[1], y_over_x);
        for e in &basis.elems {
            assert!(is_integral_at_infinity(e), "not integral at infinity: {e}");
        }
        // ... while y itself is not: charpoly X^2 - x has a pole at infinity
        assert!(!is_integral_at_infinity(&k.y()));
    }

    #[test]
    fn make_monic_cases() {
        // already monic
        let k = curve(&[((0, 2), 1), ((1, 0), -1)]);
        let (p, sub) = make_monic(k.relation());
        assert!(sub.is_identity());
        assert_eq!(&p, k.relation());

        // 2y^2 - x -> ỹ^2 - 2x with ỹ = 2y
        let mut m = Map::new();
        m.insert((0, 2), num::BigInt::from(2));
        m.insert((1, 0), num::BigInt::from(-1));
        let (p, sub) = make_monic(&BivariatePoly::new(m));
        let mut expect = Map::new();
        expect.insert((0u32, 2u32), num::BigInt::from(1));
        expect.insert((1, 0), num::BigInt::from(-2));
        assert_eq!(p, BivariatePoly::new(expect));
        assert_eq!(sub.scale, Poly::constant_i64(2));

        // x·y^2 - 1 -> ỹ^2 - x with ỹ = x·y
        let mut m = Map::new();
        m.insert((1, 2), num::BigInt::from(1));
        m.insert((0, 0), num::BigInt::from(-1));
        let (p, sub) = make_monic(&BivariatePoly::new(m));
        let mut expect = Map::new();
        expect.insert((1u32, 0u32), num::BigInt::from(-1));
        expect.insert((0, 2), num::BigInt::from(1));
        assert_eq!(p, BivariatePoly::new(expect));
        assert_eq!(sub.scale, Poly::x());
    }

    #[test]
    fn squarefree_factor_of_paper_disc() {
        let p = crate::funcfield::tests::paper_field();
        let disc = resultant_y(p.relation());
        assert!(!disc.is_zero());
        let sf = squarefree_factor(&disc);
        assert!(
            sf.iter().any(|(_, m)| *m >= 2),
            "paper discriminant must have a repeated factor"
        );
    }

    #[test]
    fn paper_basis_module_matches_closed_forms() {
        let field = crate::funcfield::tests::paper_field();
        let order = integral_basis_order(&field).unwrap();
        let elems = order.elements(&field);
        assert_eq!(elems.len(), 5);
        for e in &elems {
            assert!(e.is_integral(), "basis element not integral: {e}");
        }
        // the module contains ℚ[x][y]
        for i in 0..5i64 {
            assert!(order.contains(&field.y().pow(i).unwrap()));
        }
        // each paper closed form lies in the computed module
        assert!(order.contains(&field.one()));
        for i in [2usize, 3, 4] {
            let b = crate::funcfield::tests::paper_b(i);
            assert!(order.contains(&b), "paper b_{i} not in computed module");
        }
        // index formula: disc(basis) * (basis index)^2 = disc_y(p), so the
        // quotient disc_y(p)/disc(basis) must be a square in ℚ[x]
        let tm = crate::funcfield::trace_matrix(&elems);
        let disc_basis = crate::funcfield::mat_det(&tm);
        let disc_p = resultant_y(field.relation());
        let quotient = &RatFunc::from_poly(disc_p) / &disc_basis;
        assert!(quotient.is_polynomial(), "index quotient not polynomial");
        let q = quotient.num();
        // a square iff every squarefree multiplicity is even
        assert!(
            q.squarefree_factor().iter().all(|(_, m)| m % 2 == 0),
            "index quotient is not a square: {q}"
        );
    }

    #[test]
    fn maximality_iteration_is_idempotent() {
        let field = crate::funcfield::tests::paper_field();
        let order = integral_basis_order(&field).unwrap();
        for (factor, _) in critical_factors(field.relation()).unwrap() {
            let mut stack = vec![factor];
            while let Some(f) = stack.pop() {
                match multiplier_step(&field, &order, &f) {
                    Ok(None) => {}
                    Ok(Some(_)) => panic!("order enlarged again at factor {f}"),
                    Err(SplitFound(d)) => {
                        let rest = f.div_exact(&d);
                        stack.push(d);
                        stack.push(rest);
                    }
                }
            }
        }
    }

    #[test]
    fn paper_infinity_basis_is_integral_at_infinity() {
        let field = crate::funcfield::tests::paper_field();
        let basis = infinity_basis(&field).unwrap();
        assert_eq!(basis.elems.len(), 5);
        assert_eq!(basis.elems[0], field.one());
        for e in &basis.elems {
            assert!(is_integral_at_infinity(e), "not integral at infinity: {e}");
        }
    }

    #[test]
    fn resultant_matches_quadratic_formula() {
        // disc(y^2 + bx y + c) pattern: res_y(y^2 - x, 2y) = -(-4x) sign conv.
        let k = curve(&[((0, 2), 1), ((1, 0), -1)]);
        let r = resultant_y(k.relation());
        // res(y^2 - x, 2y) = 4·(value of y^2 - x at y=0 roots) = 4x up to sign
        assert_eq!(r.degree(), 1);
        assert!(r.coeff(1) == qint(4) || r.coeff(1) == qint(-4));
    }
}
