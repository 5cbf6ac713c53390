//! Point-vortex dynamics and stability of ring relative equilibria.
//!
//! The library covers four models: point vortices on the plane, on a
//! uniformly rotating plane, geostrophic (Bessel) vortices, and point
//! vortices on a rotating sphere with the Coriolis background vorticity
//! frozen to its steady profile. Ring configurations (latitudinal regular
//! polygons, optionally with polar or central vortices) are built by
//! [`builders`], integrated by [`dynamics`], and classified by the
//! energy-momentum machinery in [`stability`]. Parameter-plane scans and
//! frontier bisection live in [`sweep`]; the runnable verification suites
//! shared by the CLI and the acceptance tests live in [`suites`].
//!
//! Internally all dynamics use the normalization in which a planar ring of
//! `N` unit vortices of radius `R` with central strength `λ` rotates with
//! angular velocity `ξ = (N - 1 + 2λ) / (4R²)`. The per-model "raw"
//! Hamiltonian conventions (with their `1/4π` factors) are reported
//! alongside; see [`models`].

pub mod builders;
pub mod cli;
pub mod dynamics;
pub mod models;
pub mod smalleig;
pub mod specfun;
pub mod stability;
pub mod suites;
pub mod sweep;
pub mod system;

pub(crate) mod mat;

pub use builders::{
    build_double_ring, build_planar_ring, build_sphere_ring, RingConfig, RingFamily,
};
pub use system::{Model, PlanePoint, SpherePoint, VortexSystem, Vorticity};

use thiserror::Error;

/// Crate-wide error type. CLI exit codes map from these variants.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("vortex collision at t = {time:.6}: pair ({i}, {j}), distance {dist:.3e}")]
    Collision {
        time: f64,
        i: usize,
        j: usize,
        dist: f64,
    },
    #[error("singular evaluation: {0}")]
    Singularity(String),
    #[error("not a relative equilibrium: {0}")]
    NotRelativeEquilibrium(String),
    #[error("symmetry-adapted basis failed to block-diagonalize: {0}")]
    SymmetryBasis(String),
    #[error("eigenvalue solver did not converge: {0}")]
    EigNoConvergence(String),
    #[error("zero total momentum: {0}")]
    ZeroMomentum(String),
    #[error("no frontier in bracket: {0}")]
    NoFrontier(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
