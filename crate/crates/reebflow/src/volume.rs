//! The volume functional on the Reeb cone, its gradient (the Futaki
//! invariant up to the factor -2) and its Hessian.
//!
//! With the type-I deformation fixed by a Reeb vector `xi = sum a_i xi_i`
//! the contact form rescales to `eta_0 / eta_0(xi)`, and the link volume
//! reduces to a simplex average:
//!
//! ```text
//! Vol(xi) = Vol(S^{2n+1}) * E_u[ (sum a_i u_i)^{-(n+1)} ].
//! ```
//!
//! Gradient and Hessian are obtained by differentiating the integrand under
//! the integral sign; central finite differences appear only in tests.

// the Hessian assembly reads best as plain index loops
#![allow(clippy::needless_range_loop)]

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::quad::{integrate_basic, round_sphere_volume, WeightedSphereLink};
use crate::reeb::{project_tangent, reeb_membership, ReebVector, TangentVector};

/// Optimizer-facing calls reject Reeb vectors with a coefficient below this:
/// the volume integrand genuinely diverges at the cone boundary.
pub const BOUNDARY_GUARD: f64 = 1e-8;

/// Tangency tolerance for Futaki directions.
pub const TANGENT_TOL: f64 = 1e-10;

/// Everything the CLI reports about the volume functional at one point.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub reeb: Vec<f64>,
    /// Link volume in units of (2n+1)-volume.
    pub volume: f64,
    /// Volume divided by the round-sphere volume.
    pub relative_volume: f64,
    /// Slice-tangent volume gradient.
    pub grad: Vec<f64>,
    pub grad_norm: f64,
    /// min_i a_i; how close the point sits to the cone boundary.
    pub min_pairing: f64,
}

fn guard(xi: &ReebVector) -> Result<()> {
    if !reeb_membership(xi) {
        return Err(Error::NotInCone {
            min_coeff: xi.min_coeff(),
        });
    }
    if xi.min_coeff() < BOUNDARY_GUARD {
        return Err(Error::BoundaryProximity {
            min_coeff: xi.min_coeff(),
            guard: BOUNDARY_GUARD,
        });
    }
    Ok(())
}

fn check_dim(link: &WeightedSphereLink, xi: &ReebVector) -> Result<()> {
    if xi.n() != link.n() {
        return Err(Error::DimensionMismatch {
            expected: link.n() + 1,
            got: xi.n() + 1,
        });
    }
    Ok(())
}

#[inline]
fn pairing(a: &[f64], u: &[f64]) -> f64 {
    a.iter().zip(u).map(|(ai, ui)| ai * ui).sum()
}

/// Link volume of the Sasaki structure with Reeb vector `xi`.
pub fn volume(link: &WeightedSphereLink, xi: &ReebVector) -> Result<f64> {
    check_dim(link, xi)?;
    guard(xi)?;
    let p = -(link.n() as i32 + 1);
    integrate_basic(link, |u| pairing(xi.coeffs(), u).powi(p))
}

/// Volume relative to the round sphere.
pub fn relative_volume(link: &WeightedSphereLink, xi: &ReebVector) -> Result<f64> {
    volume(link, xi).map(|v| v / round_sphere_volume(link.n()))
}

/// Conjectured closed form of the relative volume for the weighted sphere:
/// `1 / prod a_i`.
///
/// Cross-validation oracle only; the test suite checks it against the
/// quadrature volume before anything trusts it.
pub fn closed_form_relative_volume(xi: &ReebVector) -> Result<f64> {
    if !reeb_membership(xi) {
        return Err(Error::NotInCone {
            min_coeff: xi.min_coeff(),
        });
    }
    Ok(xi.coeffs().iter().map(|a| a.recip()).product())
}

/// Directional derivative of the volume along an arbitrary direction `y`
/// (not necessarily tangent), by differentiation under the integral.
pub fn volume_derivative(link: &WeightedSphereLink, xi: &ReebVector, y: &[f64]) -> Result<f64> {
    check_dim(link, xi)?;
    guard(xi)?;
    if y.len() != xi.coeffs().len() {
        return Err(Error::DimensionMismatch {
            expected: xi.coeffs().len(),
            got: y.len(),
        });
    }
    let np1 = link.n() as f64 + 1.0;
    let p = -(link.n() as i32 + 2);
    let v = integrate_basic(link, |u| pairing(y, u) * pairing(xi.coeffs(), u).powi(p))?;
    Ok(-np1 * v)
}

/// Futaki invariant `Fut(JY)` at `xi`, pinned by the relation
/// `delta_Y Vol = -2 Fut(JY)` against the implemented volume.
pub fn futaki(link: &WeightedSphereLink, xi: &ReebVector, y: &TangentVector) -> Result<f64> {
    let charge: f64 = y.coeffs().iter().sum();
    if charge.abs() > TANGENT_TOL {
        return Err(Error::NotTangent { charge });
    }
    Ok(-0.5 * volume_derivative(link, xi, y.coeffs())?)
}

/// Checked power of the contact pairing: errors out where the volume
/// integrand has blown past the singular cutoff.
#[inline]
fn pairing_power(p: f64, n: usize, extra: i32, node: &[f64]) -> Result<f64> {
    let vol_integrand = p.powi(-(n as i32 + 1));
    if !vol_integrand.is_finite() || vol_integrand.abs() > crate::quad::SINGULAR_CUTOFF {
        return Err(Error::SingularNode {
            node: node.to_vec(),
            value: vol_integrand,
        });
    }
    Ok(p.powi(-(n as i32 + 1 + extra)))
}

/// Slice-tangent volume gradient: the tangent vector `g` with
/// `g . Y = delta_Y Vol` for every tangent `Y`.
pub fn grad_volume(link: &WeightedSphereLink, xi: &ReebVector) -> Result<TangentVector> {
    check_dim(link, xi)?;
    guard(xi)?;
    let n = link.n();
    let np1 = n as f64 + 1.0;
    let dim = n + 1;
    let mut partial = vec![0.0; dim];
    for node in link.simplex_rule() {
        let p = pairing(xi.coeffs(), &node.bary);
        let val = node.weight * pairing_power(p, n, 1, &node.bary)?;
        for (pj, uj) in partial.iter_mut().zip(&node.bary) {
            *pj += uj * val;
        }
    }
    let scale = -np1 * round_sphere_volume(n);
    for pj in &mut partial {
        *pj *= scale;
    }
    Ok(project_tangent(&partial))
}

/// Hessian of the volume restricted to the slice tangent space, expressed in
/// the orthonormal zero-sum basis; an `n x n` symmetric matrix.
pub fn hessian_volume(link: &WeightedSphereLink, xi: &ReebVector) -> Result<Vec<Vec<f64>>> {
    check_dim(link, xi)?;
    guard(xi)?;
    let n = link.n();
    let np1 = n as f64 + 1.0;
    let dim = n + 1;
    let mut ambient = vec![vec![0.0; dim]; dim];
    for node in link.simplex_rule() {
        let p = pairing(xi.coeffs(), &node.bary);
        let val = node.weight * pairing_power(p, n, 2, &node.bary)?;
        for j in 0..dim {
            let uj_val = node.bary[j] * val;
            for k in j..dim {
                ambient[j][k] += node.bary[k] * uj_val;
            }
        }
    }
    let scale = np1 * (np1 + 1.0) * round_sphere_volume(n);
    for j in 0..dim {
        for k in j..dim {
            ambient[j][k] *= scale;
            ambient[k][j] = ambient[j][k];
        }
    }
    let basis = linalg::zero_sum_basis(dim);
    let mut restricted = vec![vec![0.0; n]; n];
    for (alpha, ta) in basis.iter().enumerate() {
        for (beta, tb) in basis.iter().enumerate() {
            let mut s = 0.0;
            for j in 0..dim {
                for k in 0..dim {
                    s += ta[j] * ambient[j][k] * tb[k];
                }
            }
            restricted[alpha][beta] = s;
        }
    }
    Ok(restricted)
}

/// Ascending eigenvalues of the restricted Hessian.
pub fn hessian_eigenvalues(link: &WeightedSphereLink, xi: &ReebVector) -> Result<Vec<f64>> {
    Ok(linalg::sym_eigenvalues(&hessian_volume(link, xi)?))
}

/// Assemble the full report for one Reeb vector.
pub fn volume_report(link: &WeightedSphereLink, xi: &ReebVector) -> Result<VolumeReport> {
    let vol = volume(link, xi)?;
    let grad = grad_volume(link, xi)?;
    Ok(VolumeReport {
        reeb: xi.coeffs().to_vec(),
        volume: vol,
        relative_volume: vol / round_sphere_volume(link.n()),
        grad_norm: grad.norm(),
        grad: grad.coeffs().to_vec(),
        min_pairing: xi.min_coeff(),
    })
}
