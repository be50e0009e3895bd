//! Deterministic integration of basic (torus-invariant) integrands over the
//! weighted-sphere link.
//!
//! Every integrand this artifact needs is a function of the squared
//! coordinate moduli `u_i = |z_i|^2` only.  For a uniform point on
//! `S^{2n+1}` the vector `(u_0, ..., u_n)` is uniform on the standard
//! `n`-simplex, so link integrals reduce exactly (in distribution) to
//! simplex averages:
//!
//! ```text
//! integral_M F dv = Vol(S^{2n+1}) * E_simplex[F],   Vol(S^{2n+1}) = 2 pi^{n+1} / n!
//! ```
//!
//! The simplex average is evaluated with a positive-weight product Gauss
//! rule (stick-breaking map of a tensor Gauss-Legendre grid; the map's
//! polynomial Jacobian is folded into the weights).  A seeded Monte Carlo
//! estimate over uniform sphere points serves as the independent oracle for
//! the reduction.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Nodes where `|F|` exceeds this abort integration: the integrand is
/// genuinely divergent near the cone boundary and a polluted value would be
/// worse than an error.
pub const SINGULAR_CUTOFF: f64 = 1e12;

/// Minimum admissible Monte Carlo sample count.
pub const MC_MIN_SAMPLES: u64 = 1_000;

/// Volume of the round unit sphere `S^{2n+1}`: `2 pi^{n+1} / n!`.
pub fn round_sphere_volume(n: usize) -> f64 {
    let mut v = 2.0 * std::f64::consts::PI.powi(n as i32 + 1);
    for k in 2..=n {
        v /= k as f64;
    }
    v
}

/// One node of a simplex rule: barycentric coordinates (length `n + 1`,
/// summing to 1) and a positive averaging weight.
#[derive(Debug, Clone)]
pub struct SimplexNode {
    pub bary: Vec<f64>,
    pub weight: f64,
}

/// The link `S^{2n+1}` together with its quadrature data.
#[derive(Debug, Clone)]
pub struct WeightedSphereLink {
    n: usize,
    simplex_rule: Vec<SimplexNode>,
    mc_seed: u64,
    mc_samples: u64,
}

impl WeightedSphereLink {
    /// Build the link with the default rule resolution for dimension `n`.
    pub fn new(n: usize) -> Self {
        Self::with_rule(n, default_points_per_axis(n))
    }

    /// Build the link with `points` Gauss nodes per simplex axis.
    pub fn with_rule(n: usize, points: usize) -> Self {
        Self {
            n,
            simplex_rule: simplex_rule(n, points),
            mc_seed: 0x5eeb,
            mc_samples: 1_000_000,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn simplex_rule(&self) -> &[SimplexNode] {
        &self.simplex_rule
    }

    pub fn mc_seed(&self) -> u64 {
        self.mc_seed
    }

    pub fn mc_samples(&self) -> u64 {
        self.mc_samples
    }

    pub fn set_mc_seed(&mut self, seed: u64) {
        self.mc_seed = seed;
    }

    pub fn set_mc_samples(&mut self, samples: u64) {
        self.mc_samples = samples;
    }

    /// Rule nodes plus the simplex vertices; dense enough that the minimum
    /// of a linear functional over it equals the link minimum.
    pub fn dense_node_set(&self) -> Vec<Vec<f64>> {
        let mut nodes: Vec<Vec<f64>> = self.simplex_rule.iter().map(|s| s.bary.clone()).collect();
        for i in 0..=self.n {
            let mut v = vec![0.0; self.n + 1];
            v[i] = 1.0;
            nodes.push(v);
        }
        nodes
    }
}

fn default_points_per_axis(n: usize) -> usize {
    match n {
        0 | 1 => 128,
        2 => 64,
        _ => 48,
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`, in ascending node order.
pub fn gauss_legendre_unit(m: usize) -> Vec<(f64, f64)> {
    assert!(m >= 1);
    let mut rule = Vec::with_capacity(m);
    for i in 0..m {
        // Newton iteration on P_m from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d2) = legendre_pair(m, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((0.5 + 0.5 * x, 0.5 * w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

fn legendre_pair(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Positive-weight rule for the uniform average over the standard
/// `n`-simplex in barycentric coordinates.
///
/// Stick-breaking map `u_0 = t_1`, `u_1 = t_2 (1 - t_1)`, ... of a tensor
/// Gauss-Legendre grid on `[0,1]^n`; the Jacobian `prod (1-t_i)^{n-i}` is a
/// polynomial, so the product rule stays exact for polynomial integrands up
/// to degree `2m - 1 - n` per axis.  Weights are positive and sum to 1.
pub fn simplex_rule(n: usize, points: usize) -> Vec<SimplexNode> {
    let gl = gauss_legendre_unit(points);
    let mut rule = Vec::with_capacity(points.pow(n as u32));
    let n_fact: f64 = (2..=n).map(|k| k as f64).product::<f64>().max(1.0);
    let mut index = vec![0usize; n];
    loop {
        let mut bary = Vec::with_capacity(n + 1);
        let mut rest = 1.0;
        let mut w = n_fact;
        for (axis, &i) in index.iter().enumerate() {
            let (t, wt) = gl[i];
            bary.push(t * rest);
            w *= wt * (1.0 - t).powi((n - 1 - axis) as i32);
            rest *= 1.0 - t;
        }
        bary.push(rest);
        rule.push(SimplexNode { bary, weight: w });
        // odometer over the tensor grid
        let mut axis = 0;
        loop {
            if axis == n {
                return rule;
            }
            index[axis] += 1;
            if index[axis] < points {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

/// Deterministic quadrature of a basic integrand `F(u_0, ..., u_n)` over the
/// link: `Vol(S^{2n+1})` times the simplex average of `F`.
///
/// Fails with the offending node if `F` is non-finite or exceeds
/// [`SINGULAR_CUTOFF`] anywhere on the rule.
pub fn integrate_basic<F>(link: &WeightedSphereLink, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut acc = 0.0;
    for node in &link.simplex_rule {
        let v = f(&node.bary);
        if !v.is_finite() || v.abs() > SINGULAR_CUTOFF {
            return Err(Error::SingularNode {
                node: node.bary.clone(),
                value: v,
            });
        }
        acc += node.weight * v;
    }
    Ok(round_sphere_volume(link.n) * acc)
}

/// Simplex average of `F` (no sphere volume factor).
pub fn simplex_average<F>(link: &WeightedSphereLink, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    integrate_basic(link, f).map(|v| v / round_sphere_volume(link.n))
}

/// Seeded Monte Carlo estimate of the same integral from uniform points on
/// the sphere itself, bypassing the simplex reduction.
///
/// Returns `(estimate, standard_error)`.  Bit-identical for equal seeds.
pub fn mc_integrate<F>(
    link: &WeightedSphereLink,
    f: F,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if samples < MC_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MC_MIN_SAMPLES,
            got: samples,
        });
    }
    let dim = link.n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut gauss = vec![0.0f64; 2 * dim];
    let mut u = vec![0.0f64; dim];
    for _ in 0..samples {
        // Box-Muller pairs; a uniform direction in C^{n+1} normalized to the
        // sphere has squared moduli u_i distributed uniformly on the simplex.
        for pair in gauss.chunks_exact_mut(2) {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen::<f64>();
            let r = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
            pair[0] = r * c;
            pair[1] = r * s;
        }
        let norm_sq: f64 = gauss.iter().map(|g| g * g).sum();
        for (ui, pair) in u.iter_mut().zip(gauss.chunks_exact(2)) {
            *ui = (pair[0] * pair[0] + pair[1] * pair[1]) / norm_sq;
        }
        let v = f(&u);
        sum += v;
        sum_sq += v * v;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let vol = round_sphere_volume(link.n);
    Ok((vol * mean, vol * (var / nf).sqrt()))
}
