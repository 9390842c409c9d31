//! Small dense Jacobi routines for Schmidt coefficients and density-matrix
//! spectra. Complex matrices are handled through their real embedding
//! `[[Re, -Im], [Im, Re]]`, which doubles every singular value/eigenvalue.

use num_complex::Complex;

use crate::scalar::Real;

const MAX_SWEEPS: usize = 60;

/// Real embedding of a complex `rows x cols` row-major matrix, stored
/// column-major (`2*cols` columns of length `2*rows`).
fn embed_columns<T: Real>(rows: usize, cols: usize, m: &[Complex<T>]) -> Vec<Vec<T>> {
    let mut out = vec![vec![T::zero(); 2 * rows]; 2 * cols];
    for r in 0..rows {
        for c in 0..cols {
            let z = m[r * cols + c];
            out[c][r] = z.re;
            out[c][rows + r] = z.im;
            out[cols + c][r] = -z.im;
            out[cols + c][rows + r] = z.re;
        }
    }
    out
}

/// Singular values of a complex matrix, largest first (one-sided Jacobi).
pub fn singular_values<T: Real>(rows: usize, cols: usize, m: &[Complex<T>]) -> Vec<T> {
    let mut g = embed_columns(rows, cols, m);
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..g.len() {
            for q in p + 1..g.len() {
                let (alpha, beta, gamma) = g[p].iter().zip(&g[q]).fold(
                    (T::zero(), T::zero(), T::zero()),
                    |(a, b, c), (&x, &y)| (a + x * x, b + y * y, c + x * y),
                );
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = g.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut norms: Vec<T> = g
        .iter()
        .map(|col| col.iter().map(|&x| x * x).sum::<T>().sqrt())
        .collect();
    norms.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    norms.into_iter().step_by(2).collect()
}

/// Eigenvalues of a Hermitian `n x n` matrix, ascending (cyclic Jacobi).
pub fn hermitian_eigenvalues<T: Real>(n: usize, m: &[Complex<T>]) -> Vec<T> {
    let size = 2 * n;
    let cols = embed_columns(n, n, m);
    // symmetric, so column-major equals row-major
    let mut a: Vec<T> = (0..size)
        .flat_map(|r| cols.iter().map(move |col| col[r]))
        .collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..size)
            .flat_map(|r| (0..size).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[r * size + c] * a[r * size + c])
            .sum();
        if off <= eps * eps {
            break;
        }
        for p in 0..size {
            for q in p + 1..size {
                let apq = a[p * size + q];
                if apq.abs() <= eps * eps {
                    continue;
                }
                let app = a[p * size + p];
                let aqq = a[q * size + q];
                let theta = (aqq - app) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[k * size + p];
                    let akq = a[k * size + q];
                    a[k * size + p] = c * akp - s * akq;
                    a[k * size + q] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[p * size + k];
                    let aqk = a[q * size + k];
                    a[p * size + k] = c * apk - s * aqk;
                    a[q * size + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut diag: Vec<T> = (0..size).map(|i| a[i * size + i]).collect();
    diag.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    diag.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn singular_values_of_diagonal_and_rank_one() {
        let m = [c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -2.0)];
        let s = singular_values(2, 2, &m);
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);

        // outer product u v^T has one nonzero singular value |u||v|
        let u = [c(1.0, 1.0), c(0.5, 0.0), c(0.0, 2.0)];
        let v = [c(2.0, 0.0), c(0.0, -1.0)];
        let m: Vec<_> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        let s = singular_values(3, 2, &m);
        let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((s[0] - nu * nv).abs() < 1e-12);
        assert!(s[1] < 1e-12);
    }

    #[test]
    fn eigenvalues_of_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = [c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)];
        let e = hermitian_eigenvalues(2, &m);
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
    }
}
