//! Numerical tolerances used across the crate.
//!
//! All thresholds live here so that the constraint checks, the inverse
//! retraction and the degenerate-case guards stay consistent. Values are
//! roughly 100x double-precision accumulation error at dimensions up to 1000.

/// Unit-norm constraint tolerance for sphere points.
pub const SPHERE_POINT: f64 = 1e-10;

/// Orthonormality tolerance `|X^T X - I|_F` for Stiefel points.
pub const STIEFEL_POINT: f64 = 1e-8;

/// Tangency tolerance `|x^T v|` (relative to `|v|`) on the sphere.
pub const SPHERE_TANGENT: f64 = 1e-10;

/// Tangency tolerance `|X^T V + V^T X|_F` (relative) on Stiefel.
pub const STIEFEL_TANGENT: f64 = 1e-8;

/// Below this geodesic angle the sphere log/transport formulas switch to
/// their first-order limits.
pub const SMALL_ANGLE: f64 = 1e-12;

/// `1 + x^T y` below this means the points are treated as antipodal.
pub const ANTIPODAL: f64 = 1e-12;

/// Minimal eigenvalue pair sum of sym(X^T Y) for the Sylvester system of the
/// inverse polar retraction to count as well-posed.
pub const SYLVESTER_PAIR_SUM: f64 = 1e-10;

/// Default stopping tolerance on the Riemannian gradient norm of the Karcher
/// mean subproblem.
pub const KARCHER_GRAD: f64 = 1e-6;

/// Default relative subspace residual for the eigenvector oracle.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Relative eigengap under which the eigenvector oracle flags a degenerate
/// spectrum.
pub const EIGENGAP_WARN: f64 = 1e-8;
