//! Carnot-Caratheodory distances, ball volumes, doubling ratios, moment
//! integrals, saddle points and Poisson/heat kernels on generalized
//! Heisenberg-type groups G(2n, m, U, W) with a diagonal sub-Laplacian
//! perturbation A = B^T B.
//!
//! The library is organized around an immutable [`GroupSpec`] describing the
//! spectral data (a_j, k_j), the center dimension m and the weights b_l.
//! Every operation is a pure function of its inputs; all sampling paths are
//! driven by an explicit seed so identical inputs give identical outputs.

pub mod config;
pub mod distance;
pub mod error;
pub mod group;
pub mod poisson;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod solve;
pub mod special;
pub mod verify;
pub mod volume;

pub use config::QuadConfig;
pub use error::{Error, Result};
pub use group::{new_spec, GroupPoint, GroupSpec, SpectrumBlock};
pub use scalar::RadialProfile;
