//! Numerics for rotation/boost-equivariant gauge connections.
//!
//! The crate builds the matrix Lie algebras so(n), so(p,q), su(n) and spin(p,q),
//! their tensor representations on R^n ⊗ g, and the invariant subspaces that
//! classify equivariant connection 1-forms. On top of that sit the closed-form
//! connection ansätze, their curvature, the Yang-Mills residual for diagonal
//! metrics, the reduced radial ODE / wave systems obtained by projecting the
//! residual onto the generator fields, and time/radius integrators with energy
//! diagnostics.

pub mod algebra;
pub mod ansatz;
pub mod equivariance;
pub mod error;
pub mod geometry;
pub mod group;
pub mod profile;
pub mod reduced;
pub mod solver;
pub mod verify;

pub use error::Error;

/// Dense complex matrix used for all algebra elements. Real-valued families
/// simply carry a zero imaginary part; dimensions never exceed 8.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense real matrix (group elements, representation operators).
pub type RMat = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type RVec = nalgebra::DVector<f64>;

pub(crate) type C64 = num_complex::Complex64;

/// Frobenius norm of a complex matrix.
pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Absolute tolerance scaled by the max-norm of the operands (floor 1).
/// All exact identities checked in this crate have integer or ±1 structure
/// constants, so `1e-12 * scale` leaves roundoff headroom.
pub fn scaled_tol(ops: &[&CMat]) -> f64 {
    let scale = ops.iter().map(|m| fro_norm(m)).fold(1.0_f64, f64::max);
    1e-12 * scale
}
