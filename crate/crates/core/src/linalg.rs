//! Small dense linear algebra kernels.
//!
//! Everything here operates on matrices that are either tall-and-thin (d x r
//! with small r) or tiny (r x r). The symmetric eigensolver is a cyclic
//! Jacobi sweep, the SVD is one-sided Jacobi, and the thin QR is modified
//! Gram-Schmidt with one reorthogonalization pass. No external LAPACK.

use ndarray::{s, Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// Symmetric part (A + A^T)/2.
pub fn sym(a: &Array2<f64>) -> Array2<f64> {
    (a + &a.t()) * 0.5
}

pub fn frob_norm(a: &ArrayView2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn is_finite(a: &ArrayView2<f64>) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn identity(n: usize) -> Array2<f64> {
    Array2::<f64>::eye(n)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// columns. Intended for small matrices (the crate never calls it above
/// r ~ 10).
pub fn sym_eig(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "sym_eig needs a square matrix");
    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let tol = 1e-15 * frob_norm(&a.view()).max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - sn * mkq;
                    m[[k, q]] = sn * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - sn * mqk;
                    m[[q, k]] = sn * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - sn * vkq;
                    v[[k, q]] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].partial_cmp(&m[[i, i]]).unwrap());
    let vals = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vecs = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        vecs.slice_mut(s![.., col]).assign(&v.slice(s![.., i]));
    }
    (vals, vecs)
}

/// Inverse square root of a symmetric positive definite matrix.
pub fn invsqrt_spd(a: &Array2<f64>) -> Result<Array2<f64>> {
    let (vals, vecs) = sym_eig(a);
    if vals.iter().any(|&l| l <= 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "matrix is not positive definite (min eigenvalue {:.3e})",
            vals.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }
    let scaled = &vecs * &vals.mapv(|l| 1.0 / l.sqrt());
    Ok(scaled.dot(&vecs.t()))
}

/// Thin QR factor of a full-column-rank d x r matrix via modified
/// Gram-Schmidt with one reorthogonalization pass.
pub fn thin_qr_q(a: &Array2<f64>) -> Result<Array2<f64>> {
    let (d, r) = a.dim();
    if r > d {
        return Err(Error::ShapeMismatch {
            expected: format!("at most {} columns", d),
            found: format!("{}", r),
        });
    }
    let mut q = a.clone();
    for _pass in 0..2 {
        for j in 0..r {
            for i in 0..j {
                let qi = q.slice(s![.., i]).to_owned();
                let proj = qi.dot(&q.slice(s![.., j]));
                let mut col = q.slice_mut(s![.., j]);
                col.scaled_add(-proj, &qi);
            }
            let norm = q.slice(s![.., j]).dot(&q.slice(s![.., j])).sqrt();
            if norm < 1e-14 {
                return Err(Error::DegenerateGeometry(
                    "rank-deficient matrix in QR orthonormalization".into(),
                ));
            }
            q.slice_mut(s![.., j]).mapv_inplace(|x| x / norm);
        }
    }
    Ok(q)
}

/// Singular values of a small matrix via one-sided Jacobi, descending.
pub fn singular_values(a: &Array2<f64>) -> Array1<f64> {
    // One-sided Jacobi orthogonalizes the columns of U = A by plane
    // rotations; column norms of the limit are the singular values.
    let mut u = a.clone();
    let n = u.ncols();
    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let up = u.slice(s![.., p]).to_owned();
                let uq = u.slice(s![.., q]).to_owned();
                let alpha = up.dot(&up);
                let beta = uq.dot(&uq);
                let gamma = up.dot(&uq);
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for k in 0..u.nrows() {
                    let ukp = u[[k, p]];
                    let ukq = u[[k, q]];
                    u[[k, p]] = c * ukp - sn * ukq;
                    u[[k, q]] = sn * ukp + c * ukq;
                }
            }
        }
        if converged {
            break;
        }
    }
    let mut svals: Vec<f64> = (0..n)
        .map(|j| u.slice(s![.., j]).dot(&u.slice(s![.., j])).sqrt())
        .collect();
    svals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Array1::from(svals)
}

/// Solves a small dense linear system by Gaussian elimination with partial
/// pivoting.
pub fn solve_dense(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let mut m = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if m[[row, col]].abs() > m[[pivot, col]].abs() {
                pivot = row;
            }
        }
        if m[[pivot, col]].abs() < 1e-300 {
            return Err(Error::DegenerateGeometry(
                "singular linear system".into(),
            ));
        }
        if pivot != col {
            for k in 0..n {
                m.swap([col, k], [pivot, k]);
            }
            x.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let factor = m[[row, col]] / m[[col, col]];
            for k in col..n {
                m[[row, k]] -= factor * m[[col, k]];
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in (col + 1)..n {
            acc -= m[[col, k]] * x[k];
        }
        x[col] = acc / m[[col, col]];
    }
    Ok(x)
}

/// Solves the Lyapunov-type equation `C M + M C^T = 2 I` for symmetric `M`
/// by vectorizing into an r^2 x r^2 dense system.
pub fn solve_lyapunov_2i(c: &Array2<f64>) -> Result<Array2<f64>> {
    let r = c.nrows();
    assert_eq!(r, c.ncols());
    let n = r * r;
    let mut big = Array2::zeros((n, n));
    // vec(C M) = (I (x) C) vec(M), vec(M C^T) = (C (x) I) vec(M),
    // column-major vec with index i + r*j.
    for i in 0..r {
        for j in 0..r {
            let row = i + r * j;
            for k in 0..r {
                big[[row, k + r * j]] += c[[i, k]]; // C M
                big[[row, i + r * k]] += c[[j, k]]; // M C^T
            }
        }
    }
    let mut rhs = Array1::zeros(n);
    for i in 0..r {
        rhs[i + r * i] = 2.0;
    }
    let sol = solve_dense(&big, &rhs)?;
    let mut m = Array2::zeros((r, r));
    for i in 0..r {
        for j in 0..r {
            m[[i, j]] = sol[i + r * j];
        }
    }
    Ok(sym(&m))
}
