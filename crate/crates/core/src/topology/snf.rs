//! Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major. The shape is explicit so empty
/// dimensions stay meaningful (a `0 × n` map still has `n` columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows)
            .all(|i| (0..self.cols).all(|j| i == j || self.at(i, j).is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row(dst) -= q * row(src)
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let sub = q * self.at(src, j);
            *self.at_mut(dst, j) -= sub;
        }
    }

    /// col(dst) -= q * col(src)
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let sub = q * self.at(i, src);
            *self.at_mut(i, dst) -= sub;
        }
    }

    /// row(dst) += row(src)
    fn row_add(&mut self, dst: usize, src: usize) {
        for j in 0..self.cols {
            let add = self.at(src, j).clone();
            *self.at_mut(dst, j) += add;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = -self.at(i, j).clone();
            *self.at_mut(i, j) = x;
        }
    }
}

/// `u * a * v = s` with `s` diagonal, diagonal entries non-negative and each
/// dividing the next, and `u`, `v` unimodular.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries `d_1 | d_2 | …`.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|t| self.s.at(t, t).clone())
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.elementary_divisors().len()
    }

    /// Divisors greater than 1 — the torsion coefficients of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.elementary_divisors()
            .into_iter()
            .filter(|d| !d.is_one())
            .collect()
    }
}

/// Least-absolute-value entry of the trailing submatrix, if any is nonzero.
fn pivot(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            if s.at(i, j).is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if s.at(i, j).magnitude() < s.at(bi, bj).magnitude() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = pivot(&s, t) else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            // clear column t and row t; truncating division leaves
            // remainders strictly smaller than the pivot
            let mut dirty = false;
            for i in t + 1..m {
                if s.at(i, t).is_zero() {
                    continue;
                }
                let q = s.at(i, t) / s.at(t, t);
                if !q.is_zero() {
                    s.row_sub(i, t, &q);
                    u.row_sub(i, t, &q);
                }
                dirty |= !s.at(i, t).is_zero();
            }
            for j in t + 1..n {
                if s.at(t, j).is_zero() {
                    continue;
                }
                let q = s.at(t, j) / s.at(t, t);
                if !q.is_zero() {
                    s.col_sub(j, t, &q);
                    v.col_sub(j, t, &q);
                }
                dirty |= !s.at(t, j).is_zero();
            }
            if dirty {
                let (pi, pj) = pivot(&s, t).expect("submatrix still nonzero");
                s.swap_rows(t, pi);
                u.swap_rows(t, pi);
                s.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // pivot must divide the rest of the submatrix
            let bad = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !(s.at(i, j) % s.at(t, t)).is_zero()));
            match bad {
                Some(i) => {
                    s.row_add(t, i);
                    u.row_add(t, i);
                }
                None => break,
            }
        }
        if s.at(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithDecomposition { s, u, v }
}

/// Exact determinant by fraction-free (Bareiss) elimination — an
/// independent oracle for unimodularity checks.
pub fn det_bareiss(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.at(k, k).is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !a.at(i, k).is_zero()) else {
                return BigInt::ZERO;
            };
            a.swap_rows(k, i);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                *a.at_mut(i, j) = num / &prev;
            }
        }
        prev = a.at(k, k).clone();
    }
    sign * a.at(n - 1, n - 1)
}
