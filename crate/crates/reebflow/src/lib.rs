//! Numerical deformation machinery for toric Sasaki geometry on weighted
//! Sasaki spheres.
//!
//! The crate evaluates the volume functional on the Reeb cone of
//! `S^{2n+1}`, its first variation (the Futaki invariant) and Hessian,
//! drives the volume-decreasing gradient flow on the normalized slice,
//! solves the n = 1 transverse Kahler-Ricci soliton as a momentum-profile
//! boundary value problem with curvature certification, and evaluates the
//! W / mu entropy functionals together with the volume-entropy bound.
//!
//! Modules:
//!
//! - [`reeb`]: the torus Lie algebra, Reeb-cone membership, the
//!   normalization hyperplane and the deformation maps.
//! - [`quad`]: exact reduction of basic link integrals to the standard
//!   simplex, plus a seeded Monte Carlo oracle.
//! - [`volume`]: volume, Futaki invariant, gradient and Hessian.
//! - [`flow`]: negative-gradient flow, damped Newton minimizer, properness
//!   probe.
//! - [`soliton`]: the n = 1 soliton profile solver and curvature data.
//! - [`entropy`]: W / mu functionals on the link and the cone.
//! - [`config`], [`report`], [`svg`]: CLI plumbing.

pub mod config;
pub mod entropy;
pub mod error;
pub mod flow;
mod linalg;
pub mod quad;
pub mod reeb;
pub mod report;
pub mod soliton;
pub mod svg;
pub mod volume;

pub use error::{Error, Result};
pub use flow::{minimize_volume, run_flow, FlowOptions, FlowTrajectory};
pub use quad::WeightedSphereLink;
pub use reeb::{HyperplaneSlice, ReebVector, TangentVector};
pub use soliton::{solve_soliton, MomentumProfile};
