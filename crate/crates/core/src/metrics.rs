//! Evaluation: ground-truth eigen-subspaces, principal angles and the
//! global gradient norm.

use ndarray::{s, Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::{ManifoldKind, ManifoldPoint};
use crate::objectives::GlobalObjective;
use crate::rng::{derive_rng, stream};
use crate::tol;

/// Top-r eigenpairs of a covariance matrix plus the optimal loss they imply.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// Top-r eigenvectors as a Stiefel point (sphere when r = 1 is still
    /// stored as St(d,1); callers convert as needed).
    pub x_star: ManifoldPoint,
    /// Descending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Optimal loss -1/2 sum of the top-r eigenvalues.
    pub f_star: f64,
    /// Set when the spectrum gap lambda_r - lambda_{r+1} is degenerate, in
    /// which case the subspace is not unique.
    pub eigengap_warning: bool,
}

/// Orthogonal (block power) iteration with QR re-orthonormalization.
///
/// Runs with a deterministic seeded start until the relative subspace
/// residual drops below `resid_tol`. Errors out after `max_iters` carrying
/// the last residual.
pub fn top_r_eigenvectors(
    a: &Array2<f64>,
    r: usize,
    resid_tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<GroundTruth> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", d, a.ncols()),
        });
    }
    if r == 0 || r > d {
        return Err(Error::InvalidConfig(format!("r = {} out of range for d = {}", r, d)));
    }
    let asym = linalg::frob_norm(&(a - &a.t()).view());
    let scale = linalg::frob_norm(&a.view());
    if asym > 1e-10 * scale.max(1.0) {
        return Err(Error::InvalidConfig("matrix is not symmetric".into()));
    }
    // iterate a slightly larger block so lambda_{r+1} is available for the
    // eigengap check
    let block = (r + 1).min(d);
    let mut rng = derive_rng(seed, &[stream::ORACLE]);
    let start = Array2::from_shape_simple_fn((d, block), || {
        rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal)
    });
    let mut q = linalg::thin_qr_q(&start)?;
    let norm_a = scale.max(1e-300);
    let mut residual = f64::INFINITY;
    for _iter in 0..max_iters {
        let z = a.dot(&q);
        q = linalg::thin_qr_q(&z).map_err(|_| Error::DegenerateGeometry(
            "orthogonal iteration collapsed (matrix may be rank deficient)".into(),
        ))?;
        // Ritz values on the block, then residual of the Ritz pairs
        let b = q.t().dot(&a.dot(&q));
        let (vals, vecs) = linalg::sym_eig(&linalg::sym(&b));
        let ritz = q.dot(&vecs);
        let resid_mat = a.dot(&ritz) - &ritz.dot(&Array2::from_diag(&vals));
        residual = linalg::frob_norm(&resid_mat.view()) / norm_a;
        if residual <= resid_tol {
            let x_star = ManifoldPoint::new(
                ManifoldKind::stiefel(d, r),
                ritz.slice(s![.., ..r]).to_owned(),
            )?;
            let eigenvalues: Vec<f64> = vals.iter().take(r).cloned().collect();
            let next = if block > r { vals[r] } else { f64::NEG_INFINITY };
            let gap_warning = block > r
                && (eigenvalues[r - 1] - next) <= tol::EIGENGAP_WARN * vals[0].abs().max(1e-300);
            let f_star = -0.5 * eigenvalues.iter().sum::<f64>();
            return Ok(GroundTruth {
                x_star,
                eigenvalues,
                f_star,
                eigengap_warning: gap_warning,
            });
        }
    }
    Err(Error::NonConvergence {
        iters: max_iters,
        residual,
    })
}

/// Sum of principal angles between the subspaces spanned by `x` and
/// `x_star`, in radians, from the singular values of X^T X*.
pub fn principal_angle_sum(x: &ManifoldPoint, x_star: &ManifoldPoint) -> Result<f64> {
    let (d1, r1) = x.kind().ambient_shape();
    let (d2, r2) = x_star.kind().ambient_shape();
    if d1 != d2 || r1 != r2 {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", d1, r1),
            found: format!("{}x{}", d2, r2),
        });
    }
    let cross = x.values().t().dot(x_star.values());
    let sigma = linalg::singular_values(&cross);
    Ok(sigma.iter().map(|s| s.clamp(0.0, 1.0).acos()).sum())
}

/// Norm of the global Riemannian gradient at `x`.
pub fn global_grad_norm(global: &GlobalObjective, x: &ManifoldPoint) -> Result<f64> {
    Ok(global.riemannian_grad(x)?.norm())
}

/// Ground truth for a global objective: top-r eigenpairs of the mean
/// covariance.
pub fn ground_truth(global: &GlobalObjective, r: usize) -> Result<GroundTruth> {
    top_r_eigenvectors(&global.mean_covariance(), r, tol::EIGEN_RESIDUAL, 5000, 0)
}

/// Eigenvalue residuals used by tests and validation: |A X - X diag(l)|_F.
pub fn eigen_residual(a: &Array2<f64>, gt: &GroundTruth) -> f64 {
    let lam = Array1::from(gt.eigenvalues.clone());
    let resid = a.dot(gt.x_star.values()) - &gt.x_star.values().dot(&Array2::from_diag(&lam));
    linalg::frob_norm(&resid.view())
}
