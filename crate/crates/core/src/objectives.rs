//! PCA/kPCA loss functions and their gradients.
//!
//! Each client holds a quadratic objective f_i(X) = -1/2 tr(X^T A_i X) with
//! a symmetric PSD covariance A_i; the global objective is their average.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::{project_tangent, ManifoldPoint, TangentVector};

/// A single client's trace objective over its covariance matrix.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    covariance: Array2<f64>,
    weight: f64,
}

impl QuadraticObjective {
    pub fn new(covariance: Array2<f64>) -> Result<Self> {
        Self::with_weight(covariance, 1.0)
    }

    pub fn with_weight(covariance: Array2<f64>, weight: f64) -> Result<Self> {
        if covariance.nrows() != covariance.ncols() {
            return Err(Error::ShapeMismatch {
                expected: "square covariance".into(),
                found: format!("{}x{}", covariance.nrows(), covariance.ncols()),
            });
        }
        if !linalg::is_finite(&covariance.view()) {
            return Err(Error::NonFinite("covariance matrix"));
        }
        let asym = linalg::frob_norm(&(&covariance - &covariance.t()).view());
        let scale = linalg::frob_norm(&covariance.view());
        if asym > 1e-10 * scale.max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "covariance is not symmetric (defect {:.3e})",
                asym
            )));
        }
        if weight <= 0.0 {
            return Err(Error::InvalidConfig("objective weight must be positive".into()));
        }
        Ok(QuadraticObjective { covariance, weight })
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn covariance(&self) -> &Array2<f64> {
        &self.covariance
    }

    fn check_point(&self, x: &ManifoldPoint) -> Result<()> {
        if x.kind().d() != self.dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("point with ambient dimension {}", self.dim()),
                found: format!("{}", x.kind()),
            });
        }
        Ok(())
    }

    /// -1/2 tr(X^T A X), scaled by the client weight.
    pub fn value(&self, x: &ManifoldPoint) -> Result<f64> {
        self.check_point(x)?;
        let ax = self.covariance.dot(x.values());
        Ok(-0.5 * self.weight * (x.values() * &ax).sum())
    }

    /// Ambient gradient -A X.
    pub fn euclidean_grad(&self, x: &ManifoldPoint) -> Result<Array2<f64>> {
        self.check_point(x)?;
        Ok(self.covariance.dot(x.values()) * (-self.weight))
    }

    /// Tangent projection of the ambient gradient.
    pub fn riemannian_grad(&self, x: &ManifoldPoint) -> Result<TangentVector> {
        let g = self.euclidean_grad(x)?;
        project_tangent(x, &g)
    }

    /// Smoothness estimate L_i = lambda_max(A_i), via the eigen-oracle.
    pub fn smoothness(&self) -> Result<f64> {
        let gt = crate::metrics::top_r_eigenvectors(&self.covariance, 1, 1e-10, 5000, 0)?;
        Ok(self.weight * gt.eigenvalues[0].abs())
    }
}

/// The federated objective f = 1/n sum f_i.
#[derive(Debug, Clone)]
pub struct GlobalObjective {
    clients: Vec<QuadraticObjective>,
}

impl GlobalObjective {
    pub fn new(clients: Vec<QuadraticObjective>) -> Result<Self> {
        if clients.is_empty() {
            return Err(Error::InvalidConfig("need at least one client objective".into()));
        }
        let d = clients[0].dim();
        if clients.iter().any(|c| c.dim() != d) {
            return Err(Error::InvalidConfig(
                "client objectives have inconsistent dimensions".into(),
            ));
        }
        Ok(GlobalObjective { clients })
    }

    pub fn num_clients(&self) -> usize {
        self.clients.len()
    }

    pub fn dim(&self) -> usize {
        self.clients[0].dim()
    }

    pub fn client(&self, i: usize) -> &QuadraticObjective {
        &self.clients[i]
    }

    pub fn clients(&self) -> &[QuadraticObjective] {
        &self.clients
    }

    pub fn value(&self, x: &ManifoldPoint) -> Result<f64> {
        let mut acc = 0.0;
        for c in &self.clients {
            acc += c.value(x)?;
        }
        Ok(acc / self.clients.len() as f64)
    }

    /// grad f = 1/n sum grad f_i, summed in client index order.
    pub fn riemannian_grad(&self, x: &ManifoldPoint) -> Result<TangentVector> {
        let mut acc = TangentVector::zero(x.clone());
        for c in &self.clients {
            acc = acc.add(&c.riemannian_grad(x)?)?;
        }
        Ok(acc.scale(1.0 / self.clients.len() as f64))
    }

    /// Mean of the client covariances (weights included).
    pub fn mean_covariance(&self) -> Array2<f64> {
        let d = self.dim();
        let mut acc = Array2::zeros((d, d));
        for c in &self.clients {
            acc = acc + c.covariance() * c.weight;
        }
        acc / self.clients.len() as f64
    }

    /// Smoothness bound L = sum_i L_i.
    pub fn smoothness_sum(&self) -> Result<f64> {
        let mut acc = 0.0;
        for c in &self.clients {
            acc += c.smoothness()?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::manifold::{exp_map, ManifoldKind};
    use crate::rng::derive_rng;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_psd(d: usize, seed: u64) -> Array2<f64> {
        let mut rng = derive_rng(seed, &[50]);
        let b = Array2::from_shape_simple_fn((d, d), || rng.sample::<f64, _>(StandardNormal));
        b.t().dot(&b)
    }

    fn random_point(kind: ManifoldKind, seed: u64) -> ManifoldPoint {
        let mut rng = derive_rng(seed, &[51]);
        ManifoldPoint::random(kind, &mut rng).unwrap()
    }

    fn random_tangent(x: &ManifoldPoint, seed: u64) -> crate::manifold::TangentVector {
        let mut rng = derive_rng(seed, &[52]);
        let (d, r) = x.kind().ambient_shape();
        let raw = Array2::from_shape_simple_fn((d, r), || rng.sample::<f64, _>(StandardNormal));
        crate::manifold::project_tangent(x, &raw).unwrap()
    }

    #[test]
    fn identity_covariance_value() {
        let kind = ManifoldKind::stiefel(6, 3);
        let x = random_point(kind, 1);
        let obj = QuadraticObjective::new(Array2::<f64>::eye(6)).unwrap();
        assert_abs_diff_eq!(obj.value(&x).unwrap(), -1.5, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_covariance_picks_the_eigenvalue() {
        let a = array![[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
        let obj = QuadraticObjective::new(a).unwrap();
        let x = ManifoldPoint::new(ManifoldKind::sphere(3), array![[1.0], [0.0], [0.0]]).unwrap();
        assert_abs_diff_eq!(obj.value(&x).unwrap(), -1.5, epsilon = 1e-15);
    }

    #[test]
    fn value_matches_naive_triple_loop() {
        let d = 7;
        let a = random_psd(d, 3);
        let obj = QuadraticObjective::new(a.clone()).unwrap();
        let x = random_point(ManifoldKind::stiefel(d, 2), 4);
        // naive: -1/2 sum_j sum_i sum_k X_ij A_ik X_kj
        let xv = x.values();
        let mut acc = 0.0;
        for j in 0..2 {
            for i in 0..d {
                for k in 0..d {
                    acc += xv[[i, j]] * a[[i, k]] * xv[[k, j]];
                }
            }
        }
        assert_abs_diff_eq!(obj.value(&x).unwrap(), -0.5 * acc, epsilon = 1e-12);
    }

    #[test]
    fn zero_and_identity_gradients() {
        let d = 5;
        let x = random_point(ManifoldKind::stiefel(d, 2), 6);
        let zero = QuadraticObjective::new(Array2::zeros((d, d))).unwrap();
        assert_eq!(zero.euclidean_grad(&x).unwrap(), Array2::zeros((d, 2)));
        let ident = QuadraticObjective::new(Array2::<f64>::eye(d)).unwrap();
        let g = ident.euclidean_grad(&x).unwrap();
        assert!(linalg::frob_norm(&(&g + x.values()).view()) < 1e-14);
    }

    #[test]
    fn euclidean_grad_matches_finite_differences() {
        // central differences of value() through free ambient perturbations
        let d = 6;
        let a = random_psd(d, 8);
        let obj = QuadraticObjective::new(a.clone()).unwrap();
        let x = random_point(ManifoldKind::sphere(d), 9);
        let g = obj.euclidean_grad(&x).unwrap();
        let h = 1e-6;
        let raw_value = |m: &Array2<f64>| -0.5 * (m * &a.dot(m)).sum();
        for i in 0..d {
            let mut plus = x.values().clone();
            let mut minus = x.values().clone();
            plus[[i, 0]] += h;
            minus[[i, 0]] -= h;
            let fd = (raw_value(&plus) - raw_value(&minus)) / (2.0 * h);
            let rel = (fd - g[[i, 0]]).abs() / (1.0 + g[[i, 0]].abs());
            assert!(rel <= 1e-6, "component {}: rel err {:.3e}", i, rel);
        }
    }

    #[test]
    fn gradient_vanishes_at_eigenvector() {
        let a = array![[4.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]];
        let obj = QuadraticObjective::new(a).unwrap();
        let x = ManifoldPoint::new(ManifoldKind::sphere(3), array![[1.0], [0.0], [0.0]]).unwrap();
        assert!(obj.riemannian_grad(&x).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn riemannian_grad_matches_directional_derivative() {
        for seed in 0..30 {
            let d = 8;
            let a = random_psd(d, 200 + seed);
            let scale = linalg::frob_norm(&a.view());
            let obj = QuadraticObjective::new(a).unwrap();
            let kind = if seed % 2 == 0 {
                ManifoldKind::sphere(d)
            } else {
                ManifoldKind::stiefel(d, 3)
            };
            let x = random_point(kind, 300 + seed);
            let xi = random_tangent(&x, 400 + seed);
            let g = obj.riemannian_grad(&x).unwrap();
            let h = 1e-6;
            let fp = obj.value(&exp_map(&x, &xi.scale(h)).unwrap()).unwrap();
            let fm = obj.value(&exp_map(&x, &xi.scale(-h)).unwrap()).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            assert!(
                (fd - g.inner(&xi)).abs() <= 1e-5 * (1.0 + scale),
                "seed {}: fd {:.6e} vs inner {:.6e}",
                seed,
                fd,
                g.inner(&xi)
            );
        }
    }

    #[test]
    fn global_gradient_of_identical_clients() {
        let d = 5;
        let a = random_psd(d, 12);
        let single = QuadraticObjective::new(a.clone()).unwrap();
        let global = GlobalObjective::new(vec![
            QuadraticObjective::new(a.clone()).unwrap(),
            QuadraticObjective::new(a.clone()).unwrap(),
            QuadraticObjective::new(a).unwrap(),
        ])
        .unwrap();
        let x = random_point(ManifoldKind::sphere(d), 13);
        let gs = single.riemannian_grad(&x).unwrap();
        let gg = global.riemannian_grad(&x).unwrap();
        assert!(linalg::frob_norm(&(gg.values() - gs.values()).view()) < 1e-12);
    }

    #[test]
    fn rotation_invariance_of_value() {
        let d = 6;
        let r = 3;
        let a = random_psd(d, 14);
        let obj = QuadraticObjective::new(a).unwrap();
        let x = random_point(ManifoldKind::stiefel(d, r), 15);
        // random orthogonal Q from QR of a random matrix
        let mut rng = derive_rng(16, &[53]);
        let raw = Array2::from_shape_simple_fn((r, r), || rng.sample::<f64, _>(StandardNormal));
        let q = linalg::thin_qr_q(&raw).unwrap();
        let xq = ManifoldPoint::new(x.kind(), x.values().dot(&q)).unwrap();
        assert!((obj.value(&x).unwrap() - obj.value(&xq).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn asymmetric_covariance_rejected() {
        let a = array![[1.0, 0.5], [0.0, 1.0]];
        assert!(QuadraticObjective::new(a).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let obj = QuadraticObjective::new(Array2::<f64>::eye(4)).unwrap();
        let x = random_point(ManifoldKind::sphere(5), 17);
        assert!(obj.value(&x).is_err());
    }
}
