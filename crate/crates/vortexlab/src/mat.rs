//! Minimal dense-matrix helpers for the small problems this crate solves.
//! Everything here is O(n^3) on matrices of dimension at most ~64.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Mat {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = if n_rows == 0 { 0 } else { rows[0].len() };
        let mut m = Mat::zeros(n_rows, n_cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n_cols);
            m.data[i * n_cols..(i + 1) * n_cols].copy_from_slice(r);
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = Mat::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn symmetrized(&self) -> Mat {
        assert!(self.is_square());
        let mut s = self.clone();
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                s[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]);
            }
        }
        s
    }

    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Solve A x = b by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        assert!(self.is_square());
        let n = self.n_rows;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let (piv, piv_val) =
                (col..n)
                    .map(|r| (r, a[r * n + col].abs()))
                    .fold(
                        (col, 0.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if piv_val < 1e-300 {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                x[r] -= f * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col];
            for j in col + 1..n {
                acc -= a[col * n + j] * x[j];
            }
            x[col] = acc / a[col * n + col];
        }
        Some(x)
    }

    /// A^{-1} B, column by column.
    pub fn solve_mat(&self, b: &Mat) -> Option<Mat> {
        assert_eq!(self.n_rows, b.n_rows);
        let mut out = Mat::zeros(b.n_rows, b.n_cols);
        for j in 0..b.n_cols {
            let col: Vec<f64> = (0..b.n_rows).map(|i| b[(i, j)]).collect();
            let x = self.solve(&col)?;
            for i in 0..b.n_rows {
                out[(i, j)] = x[i];
            }
        }
        Some(out)
    }

    pub fn det(&self) -> f64 {
        assert!(self.is_square());
        let n = self.n_rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let (piv, piv_val) =
                (col..n)
                    .map(|r| (r, a[r * n + col].abs()))
                    .fold(
                        (col, 0.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if piv_val == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        det
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// Rank of the complex matrix (A - z I) by column-pivoted elimination,
/// with a relative tolerance on the pivots.
pub fn complex_shifted_rank(a: &Mat, z: Complex64, tol: f64) -> usize {
    assert!(a.is_square());
    let n = a.n_rows;
    let mut m: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let mut v = Complex64::new(a[(i, j)], 0.0);
            if i == j {
                v -= z;
            }
            v
        })
        .collect();
    let scale = a.frobenius().max(z.norm()).max(1.0);
    let mut rank = 0;
    for col in 0..n {
        let (piv, piv_val) =
            (rank..n)
                .map(|r| (r, m[r * n + col].norm()))
                .fold(
                    (rank, 0.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if piv_val <= tol * scale {
            continue;
        }
        if piv != rank {
            for j in 0..n {
                m.swap(rank * n + j, piv * n + j);
            }
        }
        let d = m[rank * n + col];
        for r in rank + 1..n {
            let f = m[r * n + col] / d;
            if f.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let sub = f * m[rank * n + j];
                m[r * n + j] -= sub;
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

/// |det(A - z I)| by complex LU.
pub fn complex_shifted_det(a: &Mat, z: Complex64) -> f64 {
    assert!(a.is_square());
    let n = a.n_rows;
    let mut m: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let mut v = Complex64::new(a[(i, j)], 0.0);
            if i == j {
                v -= z;
            }
            v
        })
        .collect();
    let mut det_abs = 1.0f64;
    for col in 0..n {
        let (piv, piv_val) =
            (col..n)
                .map(|r| (r, m[r * n + col].norm()))
                .fold(
                    (col, 0.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if piv_val == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
        }
        let d = m[col * n + col];
        det_abs *= d.norm();
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            for j in col..n {
                let sub = f * m[col * n + j];
                m[r * n + j] -= sub;
            }
        }
    }
    det_abs
}

/// Modified Gram-Schmidt orthonormalization of the columns; returns the
/// retained columns (those with residual norm above `tol`).
pub fn orthonormal_columns(cols: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        let mut v = c.clone();
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > tol {
            for vi in &mut v {
                *vi /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_det() {
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = a.solve(&[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
        assert!((a.det() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_rank_jordan_block() {
        let a = Mat::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        // rank(A - 0 I) = 1, so the double eigenvalue 0 is defective
        assert_eq!(complex_shifted_rank(&a, Complex64::new(0.0, 0.0), 1e-10), 1);
        let d = Mat::identity(3);
        assert_eq!(complex_shifted_rank(&d, Complex64::new(1.0, 0.0), 1e-10), 0);
    }

    #[test]
    fn gram_schmidt_drops_dependent() {
        let cols = vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]];
        let b = orthonormal_columns(&cols, 1e-10);
        assert_eq!(b.len(), 2);
        let dot: f64 = b[0].iter().zip(&b[1]).map(|(x, y)| x * y).sum();
        assert!(dot.abs() < 1e-12);
    }
}
