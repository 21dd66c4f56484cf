//! Dense real-symmetric eigensolver and small numeric utilities.
//!
//! The one eigensolver in this crate is a cyclic Jacobi iteration. It is
//! dense and O(n^3) per sweep, which is exactly right for the matrix sizes
//! that appear here: hopping matrices up to a few hundred sites, exact-
//! diagonalization sector blocks up to a few thousand basis states, and the
//! 4x4 (embedded 8x8) Hermitian matrices of the entanglement measures.
//! Rotations drive every off-diagonal element to exact zero, so convergence
//! is detected by an absolute off-diagonal norm threshold.
//!
//! Complex Hermitian problems are handled through the standard real
//! embedding: H = A + iB maps to the symmetric matrix [[A, -B], [B, A]],
//! whose spectrum is that of H with every eigenvalue doubled. The embedding
//! is a ring homomorphism, so matrix functions (square roots, products)
//! computed in the embedded space equal the embeddings of the complex
//! results.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Off-diagonal norm below which the Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-13;

/// Hard limit on Jacobi sweeps before reporting non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a real symmetric matrix.
///
/// `values` are ascending; column `j` of `vectors` is the unit eigenvector
/// for `values[j]`.
#[derive(Debug, Clone)]
pub struct EigenSym {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

/// Diagonalizes a real symmetric matrix by cyclic Jacobi rotations.
///
/// Only the upper triangle is read; the caller guarantees symmetry.
/// Returns [`Error::NoConvergence`] if the off-diagonal norm is still above
/// [`JACOBI_TOL`] after [`JACOBI_MAX_SWEEPS`] sweeps, which for symmetric
/// input indicates corrupted (non-finite) data rather than a hard problem.
pub fn eigen_sym(matrix: &Array2<f64>) -> Result<EigenSym> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::invalid(format!(
            "eigen_sym needs a square matrix, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    if n == 0 {
        return Err(Error::invalid("eigen_sym needs a nonempty matrix"));
    }

    let mut a = matrix.clone();
    let mut v: Array2<f64> = Array2::eye(n);
    // d carries the running diagonal, b/z the accumulated corrections.
    let mut d: Vec<f64> = (0..n).map(|i| a[[i, i]]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a[[p, q]].abs();
            }
        }
        if off <= JACOBI_TOL {
            return Ok(sorted(d, v));
        }
        // Early sweeps skip elements below a coarse threshold.
        let tresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = 100.0 * a[[p, q]].abs();
                // Negligible relative to both diagonal entries: zero it.
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[[p, q]] = 0.0;
                    continue;
                }
                if a[[p, q]].abs() <= tresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    a[[p, q]] / h
                } else {
                    let theta = 0.5 * h / a[[p, q]];
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * a[[p, q]];
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[[p, q]] = 0.0;
                let rotate = |a: &mut Array2<f64>, i: usize, j: usize, k: usize, l: usize| {
                    let g = a[[i, j]];
                    let h = a[[k, l]];
                    a[[i, j]] = g - s * (h + g * tau);
                    a[[k, l]] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut a, j, p, j, q);
                }
                for j in p + 1..q {
                    rotate(&mut a, p, j, j, q);
                }
                for j in q + 1..n {
                    rotate(&mut a, p, j, q, j);
                }
                for j in 0..n {
                    rotate(&mut v, j, p, j, q);
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }

    let mut off = 0.0;
    for p in 0..n - 1 {
        for q in p + 1..n {
            off += a[[p, q]].abs();
        }
    }
    Err(Error::NoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
        offdiag: off,
    })
}

fn sorted(d: Vec<f64>, v: Array2<f64>) -> EigenSym {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = Array1::from_iter(order.iter().map(|&i| d[i]));
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = v[[row, src]];
        }
    }
    EigenSym { values, vectors }
}

/// Embeds a 4x4 complex Hermitian matrix as the 8x8 real symmetric
/// [[Re, -Im], [Im, Re]]. Eigenvalues of the embedding are those of the
/// input, each with multiplicity doubled.
pub fn embed_hermitian4(h: &[[C64; 4]; 4]) -> Array2<f64> {
    let mut m = Array2::zeros((8, 8));
    for i in 0..4 {
        for j in 0..4 {
            m[[i, j]] = h[i][j].re;
            m[[i, j + 4]] = -h[i][j].im;
            m[[i + 4, j]] = h[i][j].im;
            m[[i + 4, j + 4]] = h[i][j].re;
        }
    }
    m
}

/// Reads a 4x4 complex matrix back out of its 8x8 real embedding.
pub fn unembed4(m: &Array2<f64>) -> [[C64; 4]; 4] {
    let mut h = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = C64::new(m[[i, j]], m[[i + 4, j]]);
        }
    }
    h
}

/// Sums `values` with Neumaier compensation; the result is independent of
/// summation order to well below 1e-12 for the magnitudes used here.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Least-squares line through `(x, y)` pairs; returns `(slope, intercept)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("linear_fit needs >= 2 paired points"));
    }
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxx = compensated_sum(x.iter().map(|&xi| (xi - mx) * (xi - mx)));
    let sxy = compensated_sum(x.iter().zip(y).map(|(&xi, &yi)| (xi - mx) * (yi - my)));
    if sxx == 0.0 {
        return Err(Error::invalid("linear_fit: x values are all equal"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
