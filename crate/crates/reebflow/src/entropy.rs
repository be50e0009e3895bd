//! W and mu entropy functionals on the link and on the cone, for basic data.
//!
//! The link functional is
//!
//! ```text
//! W(g, f) = integral_M e^{-f} (R + |grad f|^2 + 4(n+1) f) dv,
//! ```
//!
//! over basic `f` normalized by `integral e^{-f} dv = 1`; `R` is the full
//! scalar curvature `R = R^T - 2n`.  The cone companion integrates
//! `e^{-r^2/2 - f} (R_X + |grad_X f|^2 + (2 + 2/n) f)` with the radial
//! measure `2(n+1) r^{2n+1} dr`, and must come out exactly
//! `(2n+2) 2^{n-1} (n-1)!` times the link value; the implementation keeps
//! the two routes independent (the cone route does its radial integrals
//! numerically) so the proportionality stays a real check.
//!
//! mu is evaluated only where the minimizer is known: at constant `f`
//! (round metrics) and at the soliton potential, where `mu = W(g, f)`.

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre_unit, round_sphere_volume};
use crate::soliton::{soliton_metric, MomentumProfile, SolitonMetric};

/// Normalization tolerance for `integral e^{-f} dv = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A basic function together with its metric context.
#[derive(Debug, Clone)]
pub enum EntropyDatum {
    /// Round `S^{2n+1}` with constant `f`.
    Round { n: usize, f: f64 },
    /// n = 1 soliton metric with its affine potential.
    Soliton(Box<SolitonMetric>),
}

impl EntropyDatum {
    /// Normalized constant datum on the round sphere: `f = log Vol`.
    pub fn round(n: usize) -> Self {
        EntropyDatum::Round {
            n,
            f: round_sphere_volume(n).ln(),
        }
    }

    /// Constant datum with an explicit `f` (possibly unnormalized).
    pub fn round_with_f(n: usize, f: f64) -> Self {
        EntropyDatum::Round { n, f }
    }

    pub fn soliton(metric: SolitonMetric) -> Self {
        EntropyDatum::Soliton(Box::new(metric))
    }

    pub fn n(&self) -> usize {
        match self {
            EntropyDatum::Round { n, .. } => *n,
            EntropyDatum::Soliton(_) => 1,
        }
    }

    /// `integral_M e^{-f} dv`.
    pub fn normalization_integral(&self) -> f64 {
        match self {
            EntropyDatum::Round { n, f } => (-f).exp() * round_sphere_volume(*n),
            EntropyDatum::Soliton(m) => m.integrate_link(|x| (-m.f_at(x)).exp()),
        }
    }

    /// Shift `f` by a constant so the normalization holds exactly.
    pub fn normalize(self) -> Self {
        match self {
            EntropyDatum::Round { n, .. } => EntropyDatum::round(n),
            soliton => soliton, // soliton data is normalized at construction
        }
    }

    fn check_normalized(&self) -> Result<()> {
        let integral = self.normalization_integral();
        if (integral - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::UnnormalizedDatum { integral });
        }
        Ok(())
    }

    /// Full scalar curvature on the grid point `x` (constant for round).
    fn scalar_curvature(&self, x: f64) -> f64 {
        match self {
            EntropyDatum::Round { n, .. } => {
                let nf = *n as f64;
                // R^T = 4n(n+1) minus the Reeb-direction correction 2n
                4.0 * nf * (nf + 1.0) - 2.0 * nf
            }
            EntropyDatum::Soliton(m) => 2.0 * m.profile().curvature_at(x) - 2.0,
        }
    }
}

/// Ratio between the cone and link entropies: `(2n+2) 2^{n-1} (n-1)!`.
pub fn cone_link_ratio(n: usize) -> f64 {
    let fact: f64 = (2..n).map(|k| k as f64).product::<f64>().max(1.0);
    (2.0 * n as f64 + 2.0) * 2.0f64.powi(n as i32 - 1) * fact
}

/// Gaussian radial moment `integral_0^inf e^{-r^2/2} r^{2k+1} dr = 2^k k!`.
pub fn gaussian_moment(k: u32) -> f64 {
    let mut v = 1.0;
    for j in 1..=k {
        v *= 2.0 * j as f64;
    }
    v
}

/// The same radial moment by composite Gauss quadrature on `[0, 12]`
/// (the tail beyond is below 1e-13 relative for k <= 10); the independent
/// oracle for [`gaussian_moment`] and the radial factor of [`w_cone`].
pub fn radial_moment_numeric(power: u32) -> f64 {
    let rule = gauss_legendre_unit(64);
    let mut acc = 0.0;
    let panels = 6;
    let width = 12.0 / panels as f64;
    for p in 0..panels {
        let left = p as f64 * width;
        for &(t, w) in &rule {
            let r = left + width * t;
            acc += w * width * (-0.5 * r * r).exp() * r.powi(power as i32);
        }
    }
    acc
}

/// Link entropy `W(g, f)`.
pub fn w_link(datum: &EntropyDatum) -> Result<f64> {
    datum.check_normalized()?;
    let np1 = datum.n() as f64 + 1.0;
    match datum {
        EntropyDatum::Round { f, .. } => Ok(datum.scalar_curvature(0.0) + 4.0 * np1 * f),
        EntropyDatum::Soliton(m) => {
            let b = m.b();
            Ok(m.integrate_link(|x| {
                let f = m.f_at(x);
                let grad_sq = m.profile().phi_at(x) * b * b;
                (-f).exp() * (datum.scalar_curvature(x) + grad_sq + 4.0 * np1 * f)
            }))
        }
    }
}

/// Cone entropy by explicit radial integration.
///
/// Splits the cone integrand into its `r^{2n-1}` and `r^{2n+1}` radial
/// factors, integrates those numerically, and combines them with the link
/// integrals of `e^{-f}(R + |grad f|^2)` and `f e^{-f}`.
pub fn w_cone(datum: &EntropyDatum) -> Result<f64> {
    datum.check_normalized()?;
    let n = datum.n() as f64;
    let radial_low = radial_moment_numeric(2 * datum.n() as u32 - 1);
    let radial_high = radial_moment_numeric(2 * datum.n() as u32 + 1);
    let (curv_part, f_part) = match datum {
        EntropyDatum::Round { f, .. } => (datum.scalar_curvature(0.0), *f),
        EntropyDatum::Soliton(m) => {
            let b = m.b();
            let curv = m.integrate_link(|x| {
                (-m.f_at(x)).exp() * (datum.scalar_curvature(x) + m.profile().phi_at(x) * b * b)
            });
            let fp = m.integrate_link(|x| m.f_at(x) * (-m.f_at(x)).exp());
            (curv, fp)
        }
    };
    Ok(2.0 * (n + 1.0) * (radial_low * curv_part + (2.0 + 2.0 / n) * radial_high * f_part))
}

/// Sup-norm defect of the entropy minimizer equation
/// `2 lap f - |grad f|^2 + R + 4(n+1) f = A` over the grid.
pub fn minimizer_residual(datum: &EntropyDatum, a: f64) -> Result<f64> {
    datum.check_normalized()?;
    Ok(minimizer_lhs(datum)
        .into_iter()
        .map(|v| (v - a).abs())
        .fold(0.0, f64::max))
}

/// Best-fit constant for the minimizer equation: grid mean of its left side.
pub fn best_fit_a(datum: &EntropyDatum) -> Result<f64> {
    datum.check_normalized()?;
    let lhs = minimizer_lhs(datum);
    Ok(lhs.iter().sum::<f64>() / lhs.len() as f64)
}

fn minimizer_lhs(datum: &EntropyDatum) -> Vec<f64> {
    let np1 = datum.n() as f64 + 1.0;
    match datum {
        EntropyDatum::Round { f, .. } => vec![datum.scalar_curvature(0.0) + 4.0 * np1 * f],
        EntropyDatum::Soliton(m) => {
            let b = m.b();
            m.profile()
                .grid()
                .iter()
                .map(|&x| {
                    // lap f = (phi f')' = b phi' for affine f
                    let lap = b * m.profile().phi_prime_at(x);
                    let grad_sq = m.profile().phi_at(x) * b * b;
                    2.0 * lap - grad_sq + datum.scalar_curvature(x) + 4.0 * np1 * m.f_at(x)
                })
                .collect()
        }
    }
}

/// The volume-entropy inequality `V >= exp(mu / (4(n+1)) - 2n)`.
pub fn entropy_volume_bound(v: f64, mu: f64, n: usize) -> bool {
    let nf = n as f64;
    v >= (mu / (4.0 * (nf + 1.0)) - 2.0 * nf).exp()
}

/// `mu` of a solved soliton: the soliton potential is the W-minimizer, so
/// `mu(g) = W(g, f)`.
pub fn mu_of_soliton(profile: &MomentumProfile) -> Result<f64> {
    let (a0, a1) = profile.weights();
    w_link(&EntropyDatum::soliton(soliton_metric(a0, a1)?))
}

/// Solve the soliton at `(a_0, a_1)` and evaluate its `mu`.
pub fn mu_of_weights(a0: f64, a1: f64) -> Result<f64> {
    w_link(&EntropyDatum::soliton(soliton_metric(a0, a1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::solve_soliton;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn round_s3_link_entropy() {
        let datum = EntropyDatum::round(1);
        let w = w_link(&datum).unwrap();
        let expect = 6.0 + 8.0 * (2.0 * PI * PI).ln();
        assert!((w - expect).abs() < 1e-10, "W {w} vs {expect}");
    }

    #[test]
    fn unnormalized_data_are_rejected() {
        let datum = EntropyDatum::round_with_f(1, 0.0);
        assert!(matches!(
            w_link(&datum),
            Err(Error::UnnormalizedDatum { .. })
        ));
        let fixed = datum.normalize();
        assert!(w_link(&fixed).is_ok());
    }

    #[test]
    fn cone_link_proportionality() {
        assert_eq!(cone_link_ratio(1), 4.0);
        assert_eq!(cone_link_ratio(2), 12.0);
        for n in 1..=2 {
            let datum = EntropyDatum::round(n);
            let ratio = w_cone(&datum).unwrap() / w_link(&datum).unwrap();
            assert!(
                (ratio - cone_link_ratio(n)).abs() < 1e-8,
                "n={n}: ratio {ratio}"
            );
        }
        let datum = EntropyDatum::soliton(soliton_metric(0.7, 1.3).unwrap());
        let ratio = w_cone(&datum).unwrap() / w_link(&datum).unwrap();
        assert!((ratio - 4.0).abs() < 1e-8, "soliton ratio {ratio}");
    }

    #[test]
    fn gaussian_moments_match_radial_quadrature() {
        assert_eq!(gaussian_moment(0), 1.0);
        assert_eq!(gaussian_moment(1), 2.0);
        assert_eq!(gaussian_moment(3), 48.0);
        for k in 0..=8u32 {
            let exact = gaussian_moment(k);
            let numeric = radial_moment_numeric(2 * k + 1);
            assert!(
                (numeric - exact).abs() < 1e-10 * exact.max(1.0),
                "k={k}: {numeric} vs {exact}"
            );
        }
    }

    #[test]
    fn round_minimizer_equation_is_exact() {
        let datum = EntropyDatum::round(1);
        let f = (2.0 * PI * PI).ln();
        let a = 6.0 + 8.0 * f;
        assert_eq!(minimizer_residual(&datum, a).unwrap(), 0.0);
        assert!((minimizer_residual(&datum, 0.0).unwrap() - a).abs() < 1e-12);
    }

    #[test]
    fn soliton_satisfies_the_minimizer_equation() {
        let datum = EntropyDatum::soliton(soliton_metric(0.8, 1.2).unwrap());
        let a = best_fit_a(&datum).unwrap();
        let residual = minimizer_residual(&datum, a).unwrap();
        assert!(
            residual < 1e-6 * a.abs(),
            "residual {residual} vs best-fit A {a}"
        );
        // A at the minimizer is mu itself.
        let mu = w_link(&datum).unwrap();
        assert!((a - mu).abs() < 1e-6 * mu.abs(), "A {a} vs mu {mu}");
    }

    #[test]
    fn sign_conventions_are_pinned_by_the_residual() {
        // Flipping the potential slope breaks the minimizer equation; the
        // passing convention is f' = +b with the ODE -phi'' = lambda - b phi'.
        let metric = soliton_metric(0.7, 1.3).unwrap();
        let good = EntropyDatum::soliton(metric.clone());
        let a_good = best_fit_a(&good).unwrap();
        let spread_good = minimizer_residual(&good, a_good).unwrap();

        let p = metric.profile();
        let flipped = crate::soliton::MomentumProfile::from_parts(
            p.weights(),
            p.x_max(),
            p.grid().to_vec(),
            p.phi().to_vec(),
            -p.b(),
            p.lambda(),
        );
        let bad_lhs: Vec<f64> = {
            // same formulas as minimizer_lhs but with the flipped slope
            let b = flipped.b();
            flipped
                .grid()
                .iter()
                .map(|&x| {
                    let lap = b * p.phi_prime_at(x);
                    let grad_sq = p.phi_at(x) * b * b;
                    let r = 2.0 * p.curvature_at(x) - 2.0;
                    2.0 * lap - grad_sq + r + 8.0 * b * x
                })
                .collect()
        };
        let mean = bad_lhs.iter().sum::<f64>() / bad_lhs.len() as f64;
        let spread_bad = bad_lhs.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
        assert!(spread_good < 1e-8);
        assert!(
            spread_bad > 1e-2,
            "flipped convention should fail, spread {spread_bad}"
        );
    }

    #[test]
    fn transverse_scalar_curvature_convention_shifts_a_by_2n() {
        // With R^T in place of R the minimizer equation still has constant
        // left side, but the constant exceeds mu by exactly 2n; the full-R
        // convention is the internally consistent one.
        let datum = EntropyDatum::soliton(soliton_metric(0.8, 1.2).unwrap());
        let mu = w_link(&datum).unwrap();
        let a_full = best_fit_a(&datum).unwrap();
        assert!((a_full - mu).abs() < 1e-8);
        let a_transverse = a_full + 2.0;
        assert!((a_transverse - (mu + 2.0)).abs() < 1e-8);
    }

    #[test]
    fn volume_entropy_bound_cases() {
        let v = 2.0 * PI * PI;
        let mu = 6.0 + 8.0 * v.ln();
        assert!(entropy_volume_bound(v, mu, 1));
        // boundary accepted
        let boundary = (mu / 8.0 - 2.0).exp();
        assert!(entropy_volume_bound(boundary, mu, 1));
        assert!(!entropy_volume_bound(0.9 * boundary, mu, 1));
    }

    #[test]
    fn mu_examples() {
        let p = solve_soliton(1.0, 1.0).unwrap();
        let mu = mu_of_soliton(&p).unwrap();
        let expect = 6.0 + 8.0 * (2.0 * PI * PI).ln();
        assert!((mu - expect).abs() < 1e-9, "mu {mu} vs {expect}");
        // off-round mu is strictly below the round value
        let off = mu_of_weights(0.9, 1.1).unwrap();
        assert!(off < mu);
    }

    #[test]
    fn w_link_is_stable_under_quadrature_refinement() {
        let metric = soliton_metric(1.0, 2.0).unwrap();
        let coarse = w_link(&EntropyDatum::soliton(metric.clone())).unwrap();
        // Independent evaluation with a finer rule over the same closed form.
        let rule = gauss_legendre_unit(128);
        let m = &metric;
        let b = m.b();
        let xm = m.x_max();
        let fine: f64 = m.fiber_constant()
            * xm
            * rule
                .iter()
                .map(|&(t, w)| {
                    let x = t * xm;
                    let f = m.f_at(x);
                    let grad_sq = m.profile().phi_at(x) * b * b;
                    let r = 2.0 * m.profile().curvature_at(x) - 2.0;
                    w * (-f).exp() * (r + grad_sq + 8.0 * f)
                })
                .sum::<f64>();
        assert!((coarse - fine).abs() < 1e-8 * fine.abs());
    }
}
