//! Reeb cone of the weighted Sasaki sphere: the torus Lie algebra, cone
//! membership, the normalization hyperplane and the deformation maps.
//!
//! A Reeb vector is a coefficient vector `a = (a_0, ..., a_n)` against the
//! standard torus basis of the maximal torus acting on `S^{2n+1}`.  The Reeb
//! cone is the open positive orthant; the normalization hyperplane pins the
//! total charge `sum(a_i)` to `n + 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for slice membership and tangency checks.
pub const SLICE_TOL: f64 = 1e-12;

/// Boundary charge (holomorphic volume form degree) per unit of `l`; the
/// trivialization of the canonical bundle of `C^{n+1}` has `l = 1`.
pub const CANONICAL_L: f64 = 1.0;

/// Coefficient vector of a torus element `xi = sum a_i xi_i`.
///
/// The flow variable of the whole artifact.  Immutable value type; all
/// operations on it are pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReebVector {
    coeffs: Vec<f64>,
}

impl ReebVector {
    /// Build from coefficients. Rejects empty or non-finite input.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::BadDimension { len: coeffs.len() });
        }
        if let Some(&bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite { value: bad });
        }
        Ok(Self { coeffs })
    }

    /// Complex transverse dimension `n` (the sphere is `S^{2n+1}`).
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Smallest coefficient; equals the minimum of the contact pairing
    /// `eta_0(xi)` over the link.
    pub fn min_coeff(&self) -> f64 {
        self.coeffs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Parse a comma-separated decimal list, e.g. `0.5,1.5`.
    pub fn parse(text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| Error::ParseCoeff {
                    token: tok.trim().to_string(),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Self::new(coeffs)
    }

    /// Render as a comma-separated decimal list (inverse of [`parse`]).
    ///
    /// [`parse`]: ReebVector::parse
    pub fn to_csv(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl std::fmt::Display for ReebVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_csv())
    }
}

/// Tangent direction `Y = sum b_i xi_i` to the normalization hyperplane,
/// i.e. a torus element with vanishing charge `sum b_i = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    coeffs: Vec<f64>,
}

impl TangentVector {
    /// Wrap raw coefficients, checking tangency `|sum b_i| <= tol`.
    pub fn new(coeffs: Vec<f64>, tol: f64) -> Result<Self> {
        let sum: f64 = coeffs.iter().sum();
        if sum.abs() > tol {
            return Err(Error::NotTangent { charge: sum });
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|b| b * b).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector {
            coeffs: self.coeffs.iter().map(|b| s * b).collect(),
        }
    }
}

/// The normalization hyperplane `c(xi) = level` in the torus Lie algebra.
///
/// For the weighted sphere the charge functional is the all-ones vector, so
/// the constraint reads `sum a_i = (n+1) * l` with `l = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneSlice {
    level: f64,
    charge_functional: Vec<f64>,
}

impl HyperplaneSlice {
    /// The canonical slice for transverse dimension `n`: level `(n+1) * l`.
    pub fn standard(n: usize) -> Self {
        Self {
            level: (n as f64 + 1.0) * CANONICAL_L,
            charge_functional: vec![1.0; n + 1],
        }
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    /// Charge of `xi` against the holomorphic volume form.
    ///
    /// Panics on a dimension mismatch; pair the slice and the vector with
    /// the same `n`.
    pub fn charge(&self, xi: &ReebVector) -> f64 {
        assert_eq!(
            self.charge_functional.len(),
            xi.coeffs().len(),
            "slice and Reeb vector live in different torus dimensions"
        );
        self.charge_functional
            .iter()
            .zip(xi.coeffs())
            .map(|(c, a)| c * a)
            .sum()
    }

    /// Whether `xi` sits on the slice within [`SLICE_TOL`].
    pub fn contains(&self, xi: &ReebVector) -> bool {
        (self.charge(xi) - self.level).abs() <= SLICE_TOL * self.level.max(1.0)
    }
}

/// Contact pairing `eta_0(xi)` at a point `z` of the unit sphere:
/// `sum a_i |z_i|^2`.
///
/// Rejects points off the unit sphere (norm differing from 1 by more than
/// 1e-12) and dimension mismatches.
pub fn contact_pairing(xi: &ReebVector, z: &[Complex64]) -> Result<f64> {
    if z.len() != xi.coeffs().len() {
        return Err(Error::DimensionMismatch {
            expected: xi.coeffs().len(),
            got: z.len(),
        });
    }
    let norm_sq: f64 = z.iter().map(|zi| zi.norm_sqr()).sum();
    if (norm_sq.sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitPoint {
            norm: norm_sq.sqrt(),
        });
    }
    Ok(xi
        .coeffs()
        .iter()
        .zip(z)
        .map(|(a, zi)| a * zi.norm_sqr())
        .sum())
}

/// Reeb-cone membership: `min_M eta_0(xi) > 0`.
///
/// The pairing is linear in the squared moduli, so its minimum over the link
/// is attained at a coordinate circle; the minimum is computed over those
/// extreme values rather than assumed.
pub fn reeb_membership(xi: &ReebVector) -> bool {
    // eta_0(xi) restricted to the i-th coordinate circle equals a_i.
    let min = xi.coeffs().iter().copied().fold(f64::INFINITY, f64::min);
    min > 0.0
}

/// Charge `c(xi) = sum a_i` of the Reeb vector (with `l = 1`).
pub fn normalization_charge(xi: &ReebVector) -> f64 {
    xi.coeffs().iter().sum()
}

/// Scale `xi` along its ray onto the slice: `(level / c(xi)) * xi`.
pub fn normalize_to_slice(xi: &ReebVector, slice: &HyperplaneSlice) -> Result<ReebVector> {
    if !reeb_membership(xi) {
        return Err(Error::NotInCone {
            min_coeff: xi.min_coeff(),
        });
    }
    let charge = slice.charge(xi);
    if charge <= 0.0 {
        return Err(Error::NonPositiveCharge { charge });
    }
    let s = slice.level() / charge;
    ReebVector::new(xi.coeffs().iter().map(|a| s * a).collect())
}

/// Project a raw direction onto the slice tangent space by subtracting the
/// mean: `b_i' = b_i - mean(b)`.  Linear and idempotent; image is exactly
/// `{sum b_i = 0}`.
pub fn project_tangent(raw: &[f64]) -> TangentVector {
    let mean: f64 = raw.iter().sum::<f64>() / raw.len() as f64;
    TangentVector {
        coeffs: raw.iter().map(|b| b - mean).collect(),
    }
}

/// Homothetic transformation `xi -> lambda^{-1} xi` (`lambda > 0`).
pub fn homothetic(xi: &ReebVector, lambda: f64) -> Result<ReebVector> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::BadHomothety { lambda });
    }
    ReebVector::new(xi.coeffs().iter().map(|a| a / lambda).collect())
}
