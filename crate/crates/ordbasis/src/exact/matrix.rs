//! Dense matrices over ℚ with fraction-free Gaussian elimination.
//!
//! The Ansatz systems have on the order of a hundred columns and
//! hundreds of rows of large integers, so the forward elimination is
//! done fraction-free (Bareiss) on an integer-scaled copy; only the
//! final normalization divides.

use super::{Int, QRat};
use num::{BigInt, Integer, One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QRat>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![QRat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<QRat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &QRat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: QRat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[QRat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Integer-scaled copy: each row multiplied by the lcm of its
    /// denominators.
    fn to_int_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows)
            .map(|r| {
                let mut den = BigInt::one();
                for v in self.row(r) {
                    den = den.lcm(v.denom());
                }
                self.row(r)
                    .iter()
                    .map(|v| v.numer() * (&den / v.denom()))
                    .collect()
            })
            .collect()
    }

    /// Reduced row echelon form over ℚ together with the pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let (echelon, pivots) = bareiss_echelon(self.to_int_rows(), self.cols);
        // back-substitute over ℚ
        let mut rows: Vec<Vec<QRat>> = echelon
            .iter()
            .map(|row| row.iter().map(|v| QRat::from_integer(v.clone())).collect())
            .collect();
        for i in (0..pivots.len()).rev() {
            let pc = pivots[i];
            let inv = rows[i][pc].clone().recip();
            for v in rows[i].iter_mut() {
                *v = &*v * &inv;
            }
            for j in 0..i {
                let factor = rows[j][pc].clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let delta = &rows[i][c] * &factor;
                    rows[j][c] = &rows[j][c] - &delta;
                }
            }
        }
        let rank = pivots.len();
        let mut out = rows;
        out.truncate(rank);
        while out.len() < self.rows {
            out.push(vec![QRat::zero(); self.cols]);
        }
        (QMatrix::from_rows(out), pivots)
    }

    /// Basis of the right nullspace, each vector normalized so its first
    /// nonzero entry is 1. Empty iff the matrix is injective.
    pub fn nullspace(&self) -> Vec<Vec<QRat>> {
        if self.cols == 0 {
            return vec![];
        }
        if self.rows == 0 {
            // zero-dimensional input: full standard basis
            return (0..self.cols)
                .map(|i| {
                    let mut v = vec![QRat::zero(); self.cols];
                    v[i] = QRat::one();
                    v
                })
                .collect();
        }
        let (rr, pivots) = self.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = vec![];
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![QRat::zero(); self.cols];
            v[free] = QRat::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rr.get(i, free).clone();
            }
            // normalize: first nonzero entry 1
            let lead = v.iter().find(|c| !c.is_zero()).unwrap().clone();
            let inv = lead.recip();
            for c in v.iter_mut() {
                *c = &*c * &inv;
            }
            basis.push(v);
        }
        basis
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[QRat]) -> Vec<QRat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = QRat::zero();
                for (c, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc += self.get(r, c) * x;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Fraction-free (Bareiss) forward elimination on integer rows.
/// Returns the echelon rows (pivot rows only, in order) and pivot columns.
/// Pivot choice: first nonzero entry scanning top-to-bottom.
fn bareiss_echelon(mut rows: Vec<Vec<Int>>, cols: usize) -> (Vec<Vec<Int>>, Vec<usize>) {
    let nrows = rows.len();
    let mut pivots = vec![];
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let (head, tail) = rows.split_at_mut(r + 1);
        let piv_row = &head[r];
        let piv = piv_row[c].clone();
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                // still rescale for the Bareiss division pattern
                for j in 0..cols {
                    row[j] = &row[j] * &piv / &prev;
                }
                continue;
            }
            let m = row[c].clone();
            for j in 0..cols {
                row[j] = (&row[j] * &piv - &piv_row[j] * &m) / &prev;
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(pivots.len());
    (rows, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qint;

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| qint(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn nullspace_injective() {
        assert!(m(&[&[1]]).nullspace().is_empty());
    }

    #[test]
    fn nullspace_one_relation() {
        let ns = m(&[&[1, 1]]).nullspace();
        assert_eq!(ns, vec![vec![qint(1), qint(-1)]]);
    }

    #[test]
    fn nullspace_exactness() {
        let mat = m(&[&[2, 4, 6], &[1, 2, 3], &[0, 1, 1]]);
        for v in mat.nullspace() {
            assert!(mat.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn rref_identity() {
        let id = m(&[&[1, 0], &[0, 1]]);
        let (r, piv) = id.rref();
        assert_eq!(r, id);
        assert_eq!(piv, vec![0, 1]);
    }

    #[test]
    fn rref_rank_one() {
        let (r, piv) = m(&[&[2, 4], &[1, 2]]).rref();
        assert_eq!(r, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn rref_idempotent() {
        let mat = m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        let (r1, _) = mat.rref();
        let (r2, _) = r1.rref();
        assert_eq!(r1, r2);
    }
}
