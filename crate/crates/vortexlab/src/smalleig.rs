//! Dense eigenvalue solvers for the small matrices the stability engine
//! produces (dimension at most ~64). Hand-rolled so the tolerances feeding
//! stability verdicts stay under this crate's control: cyclic Jacobi for
//! symmetric input, Hessenberg reduction plus Francis double-shift QR for
//! the general real case.

use crate::mat::{complex_shifted_det, complex_shifted_rank, Mat};
use crate::{Error, Result};
use num_complex::Complex64;

/// Spectrum of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymSpectrum {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one per eigenvalue (matching order).
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Spectrum of a general real matrix.
#[derive(Debug, Clone)]
pub struct GenSpectrum {
    pub eigenvalues: Vec<Complex64>,
    /// True when every repeated eigenvalue has a full eigenspace
    /// (rank(A - λI) drops by the multiplicity).
    pub semisimple: bool,
}

impl GenSpectrum {
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations,
/// iterated until the off-diagonal Frobenius norm falls below
/// `1e-14 ‖A‖`.
pub fn sym_eig(a: &Mat) -> Result<SymSpectrum> {
    if !a.is_square() {
        return Err(Error::Domain("sym_eig needs a square matrix".into()));
    }
    let n = a.n_rows;
    let norm = a.frobenius().max(f64::MIN_POSITIVE);
    if a.asymmetry() > 1e-12 * norm {
        return Err(Error::Domain(format!(
            "matrix is not symmetric: asymmetry {:.3e} vs norm {:.3e}",
            a.asymmetry(),
            norm
        )));
    }
    let mut m = a.symmetrized();
    let mut v = Mat::identity(n);
    let off = |m: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&m) <= 1e-14 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                // classical Jacobi rotation annihilating (p, q)
                let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[(i, j)]).collect())
        .collect();
    Ok(SymSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Householder reduction to upper Hessenberg form (in place).
fn hessenberg(a: &mut Mat) {
    let n = a.n_rows;
    for col in 0..n.saturating_sub(2) {
        let mut x: Vec<f64> = (col + 1..n).map(|i| a[(i, col)]).collect();
        let alpha = -x[0].signum() * x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        x[0] -= alpha;
        let vnorm2: f64 = x.iter().map(|v| v * v).sum();
        if vnorm2 < 1e-300 {
            continue;
        }
        // apply P = I - 2 v vᵀ / |v|² from both sides
        for j in 0..n {
            let dot: f64 = (0..x.len()).map(|k| x[k] * a[(col + 1 + k, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for k in 0..x.len() {
                a[(col + 1 + k, j)] -= f * x[k];
            }
        }
        for i in 0..n {
            let dot: f64 = (0..x.len()).map(|k| x[k] * a[(i, col + 1 + k)]).sum();
            let f = 2.0 * dot / vnorm2;
            for k in 0..x.len() {
                a[(i, col + 1 + k)] -= f * x[k];
            }
        }
    }
}

/// Eigenvalues of a general real matrix by the implicit double-shift QR
/// iteration on the Hessenberg form.
fn francis_eigenvalues(a: &Mat) -> Result<Vec<Complex64>> {
    let n = a.n_rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let norm = h.frobenius().max(f64::MIN_POSITIVE);
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n; // active block is rows 0..hi
    let mut iters_on_block = 0usize;
    let max_total = 60 * n.max(1);
    let mut total = 0usize;

    while hi > 0 {
        if total > max_total {
            return Err(Error::EigNoConvergence(format!(
                "QR stalled with {} of {} eigenvalues found",
                eigs.len(),
                n
            )));
        }
        // deflate tiny subdiagonals
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].abs() + h[(lo, lo)].abs();
            if h[(lo, lo - 1)].abs() <= f64::EPSILON * s.max(norm * 1e-3) {
                h[(lo, lo - 1)] = 0.0;
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eigs.push(Complex64::new(h[(hi - 1, hi - 1)], 0.0));
            hi -= 1;
            iters_on_block = 0;
            continue;
        }
        if lo == hi - 2 {
            let (e1, e2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            eigs.push(e1);
            eigs.push(e2);
            hi -= 2;
            iters_on_block = 0;
            continue;
        }

        // Francis double shift from the trailing 2x2 (exceptional shift
        // every 12 stalls, as in the classical implementations)
        iters_on_block += 1;
        total += 1;
        let (mut s, mut p) = (
            h[(hi - 2, hi - 2)] + h[(hi - 1, hi - 1)],
            h[(hi - 2, hi - 2)] * h[(hi - 1, hi - 1)] - h[(hi - 2, hi - 1)] * h[(hi - 1, hi - 2)],
        );
        if iters_on_block % 12 == 0 {
            let ex = h[(hi - 1, hi - 2)].abs()
                + if hi >= 3 {
                    h[(hi - 2, hi - 3)].abs()
                } else {
                    0.0
                };
            s = 2.0 * ex;
            p = ex * ex;
        }

        // first column of (H - aI)(H - bI) restricted to the active block
        let (l, r) = (lo, hi);
        let mut x = h[(l, l)] * h[(l, l)] + h[(l, l + 1)] * h[(l + 1, l)] - s * h[(l, l)] + p;
        let mut y = h[(l + 1, l)] * (h[(l, l)] + h[(l + 1, l + 1)] - s);
        let mut z = if l + 2 < r {
            h[(l + 2, l + 1)] * h[(l + 1, l)]
        } else {
            0.0
        };

        for k in l..r - 2 {
            // Householder on (x, y, z)
            let alpha = -(x.signum()) * (x * x + y * y + z * z).sqrt();
            if alpha.abs() > 1e-300 {
                let mut v = [x - alpha, y, z];
                let vnorm2: f64 = v.iter().map(|t| t * t).sum();
                if vnorm2 > 1e-300 {
                    for t in &mut v {
                        *t /= vnorm2.sqrt();
                    }
                    let rows = if k + 3 <= r { 3 } else { 2 };
                    // P A
                    for j in k.saturating_sub(1)..r {
                        let mut dot = 0.0;
                        for (idx, vi) in v.iter().enumerate().take(rows) {
                            dot += vi * h[(k + idx, j)];
                        }
                        for (idx, vi) in v.iter().enumerate().take(rows) {
                            h[(k + idx, j)] -= 2.0 * vi * dot;
                        }
                    }
                    // A P
                    let row_end = (k + 4).min(r);
                    for i in l..row_end {
                        let mut dot = 0.0;
                        for (idx, vi) in v.iter().enumerate().take(rows) {
                            dot += vi * h[(i, k + idx)];
                        }
                        for (idx, vi) in v.iter().enumerate().take(rows) {
                            h[(i, k + idx)] -= 2.0 * vi * dot;
                        }
                    }
                }
            }
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
            z = if k + 3 < r { h[(k + 3, k)] } else { 0.0 };
            if k > l {
                h[(k + 1, k - 1)] = 0.0;
                if k + 2 < r {
                    h[(k + 2, k - 1)] = 0.0;
                }
            }
        }
        // final 2-row rotation
        let k = r - 2;
        let g = x.hypot(y);
        if g > 1e-300 {
            let (c, sn) = (x / g, y / g);
            for j in k.saturating_sub(1)..r {
                let a1 = h[(k, j)];
                let a2 = h[(k + 1, j)];
                h[(k, j)] = c * a1 + sn * a2;
                h[(k + 1, j)] = -sn * a1 + c * a2;
            }
            for i in l..r {
                let a1 = h[(i, k)];
                let a2 = h[(i, k + 1)];
                h[(i, k)] = c * a1 + sn * a2;
                h[(i, k + 1)] = -sn * a1 + c * a2;
            }
            if k > l {
                h[(k + 1, k - 1)] = 0.0;
            }
        }
    }
    Ok(eigs)
}

/// Eigenvalues of a 2x2 real matrix.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> (Complex64, Complex64) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (
            Complex64::new(tr / 2.0 + s, 0.0),
            Complex64::new(tr / 2.0 - s, 0.0),
        )
    } else {
        let s = (-disc).sqrt();
        (Complex64::new(tr / 2.0, s), Complex64::new(tr / 2.0, -s))
    }
}

/// Eigenvalues of a general real square matrix, with a residual check via
/// the characteristic polynomial and a semisimplicity flag for repeated
/// eigenvalues.
pub fn gen_eig(a: &Mat) -> Result<GenSpectrum> {
    if !a.is_square() {
        return Err(Error::Domain("gen_eig needs a square matrix".into()));
    }
    let n = a.n_rows;
    let mut eigenvalues = francis_eigenvalues(a)?;
    // pair up conjugates exactly (tiny imaginary parts from real spectra)
    let scale = a.frobenius().max(1.0);
    for z in &mut eigenvalues {
        if z.im.abs() < 1e-12 * scale {
            z.im = 0.0;
        }
    }
    eigenvalues.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));

    // characteristic-polynomial residual, scaling-adjusted: dividing
    // |det(A - λI)| by the distances to the other computed eigenvalues
    // estimates how far λ is from a true root
    for (i, z) in eigenvalues.iter().enumerate() {
        let det = complex_shifted_det(a, *z);
        let mut denom = 1.0f64;
        for (j, w) in eigenvalues.iter().enumerate() {
            if j != i {
                denom *= (w - z).norm().max(1e-9 * scale);
            }
        }
        let resid = det / denom;
        if resid > 1e-6 * scale {
            return Err(Error::EigNoConvergence(format!(
                "eigenvalue {z} fails the characteristic-polynomial residual ({resid:.2e})"
            )));
        }
    }

    // cluster repeated eigenvalues and compare geometric multiplicity
    let tol = 1e-8 * scale;
    let mut semisimple = true;
    let mut visited = vec![false; n];
    for i in 0..n {
        if visited[i] {
            continue;
        }
        let mut cluster = vec![i];
        for j in i + 1..n {
            if !visited[j] && (eigenvalues[i] - eigenvalues[j]).norm() < tol {
                cluster.push(j);
            }
        }
        for &j in &cluster {
            visited[j] = true;
        }
        if cluster.len() > 1 {
            let centroid =
                cluster.iter().map(|&j| eigenvalues[j]).sum::<Complex64>() / cluster.len() as f64;
            let rank = complex_shifted_rank(a, centroid, 1e-8);
            if n - rank < cluster.len() {
                semisimple = false;
            }
        }
    }
    Ok(GenSpectrum {
        eigenvalues,
        semisimple,
    })
}

/// Match two spectra as multisets within `tol` (absolute). Returns the
/// worst pairing distance, or `None` if the lengths differ.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for za in a {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, zb) in b.iter().enumerate() {
            if !used[j] {
                let d = (za - zb).norm();
                if d < best.1 {
                    best = (j, d);
                }
            }
        }
        used[best.0] = true;
        worst = worst.max(best.1);
    }
    Some(worst)
}
