//! Federated optimization over Riemannian manifolds.
//!
//! Building blocks for running federated eigen-subspace recovery (PCA and
//! kPCA) with three server/client schemes: variance-reduced local steps
//! with tangent-space consensus (`RFedSVRG`), plain local gradient descent
//! (`RFedAvg`) and proximal local subproblems (`RFedProx`).

pub mod consensus;
pub mod data;
pub mod error;
pub mod fedopt;
pub mod linalg;
pub mod manifold;
pub mod metrics;
pub mod objectives;
pub mod rng;
pub mod tol;

pub use error::{Error, Result};
pub use manifold::{ManifoldKind, ManifoldPoint, TangentVector};
