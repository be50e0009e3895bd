//! Deformation of the Reeb vector along the negative volume gradient on the
//! normalized slice, a damped-Newton direct minimizer, and the straight-ray
//! properness probe.
//!
//! The flow field is `-grad Vol` projected to the slice tangent space; the
//! unique critical point of the (strictly convex, proper) volume functional
//! is the symmetric Reeb vector, so both routes must land there and the
//! test suite holds them against each other.

use serde::Serialize;

use crate::entropy::mu_of_weights;
use crate::error::{Error, Result};
use crate::linalg;
use crate::quad::WeightedSphereLink;
use crate::reeb::{normalize_to_slice, HyperplaneSlice, ReebVector};
use crate::volume::{grad_volume, hessian_volume, volume};

/// Flow and minimizer controls.
#[derive(Debug, Clone)]
pub struct FlowOptions {
    /// Initial RK4 step.
    pub dt0: f64,
    /// Terminate when the slice-tangent gradient norm falls below this.
    pub grad_tol: f64,
    /// Terminate at this flow time.
    pub t_max: f64,
    /// Trajectories must keep `min_i a_i` above this.
    pub boundary_guard: f64,
    /// Attach the soliton entropy `mu` to every recorded state (n = 1 only).
    pub attach_mu: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            dt0: 0.01,
            grad_tol: 1e-8,
            t_max: 1e3,
            boundary_guard: 1e-6,
            attach_mu: false,
        }
    }
}

/// One recorded point of a flow trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct FlowState {
    pub t: f64,
    pub reeb: Vec<f64>,
    pub volume: f64,
    pub grad_norm: f64,
    pub mu: Option<f64>,
}

/// Why a trajectory stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    GradientTolerance,
    MaxTime,
    BoundaryGuard,
    StepFailure,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowTrajectory {
    pub states: Vec<FlowState>,
    pub terminated_by: TerminationReason,
}

impl FlowTrajectory {
    pub fn final_reeb(&self) -> ReebVector {
        ReebVector::new(
            self.states
                .last()
                .expect("trajectory is never empty")
                .reeb
                .clone(),
        )
        .expect("recorded states hold valid vectors")
    }
}

fn min_coeff(coeffs: &[f64]) -> f64 {
    coeffs.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `-grad Vol` as raw slice-tangent components.
fn negative_gradient(link: &WeightedSphereLink, coeffs: &[f64], guard: f64) -> Result<Vec<f64>> {
    if min_coeff(coeffs) < guard {
        return Err(Error::BoundaryGuardTrip {
            min_coeff: min_coeff(coeffs),
        });
    }
    let xi = ReebVector::new(coeffs.to_vec())?;
    let g = grad_volume(link, &xi)?;
    Ok(g.coeffs().iter().map(|c| -c).collect())
}

fn record_state(
    link: &WeightedSphereLink,
    t: f64,
    xi: &ReebVector,
    opts: &FlowOptions,
) -> Result<FlowState> {
    let vol = volume(link, xi)?;
    let grad = grad_volume(link, xi)?;
    let mu = if opts.attach_mu && link.n() == 1 {
        Some(mu_of_weights(xi.coeffs()[0], xi.coeffs()[1])?)
    } else {
        None
    };
    Ok(FlowState {
        t,
        reeb: xi.coeffs().to_vec(),
        volume: vol,
        grad_norm: grad.norm(),
        mu,
    })
}

/// One RK4 step of the projected negative gradient field, re-projected to
/// the slice; the step is retried with `dt/2` (up to 20 halvings) until the
/// volume strictly decreases.
pub fn flow_step(
    link: &WeightedSphereLink,
    state: &FlowState,
    dt: f64,
    opts: &FlowOptions,
) -> Result<FlowState> {
    let slice = HyperplaneSlice::standard(link.n());
    let xi = ReebVector::new(state.reeb.clone())?;
    if state.grad_norm < opts.grad_tol {
        // Zero field: the state is already critical.
        let mut fixed = record_state(link, state.t + dt, &xi, opts)?;
        fixed.mu = state.mu;
        return Ok(fixed);
    }
    let guard = opts.boundary_guard;
    let mut dt_try = dt;
    let mut last_guard_trip = None;
    for _ in 0..=20 {
        let step = || -> Result<ReebVector> {
            let y0 = &state.reeb;
            let k1 = negative_gradient(link, y0, guard)?;
            let k2 = negative_gradient(link, &shifted(y0, &k1, dt_try / 2.0), guard)?;
            let k3 = negative_gradient(link, &shifted(y0, &k2, dt_try / 2.0), guard)?;
            let k4 = negative_gradient(link, &shifted(y0, &k3, dt_try), guard)?;
            let mut next = y0.clone();
            for i in 0..next.len() {
                next[i] += dt_try / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if min_coeff(&next) < guard {
                return Err(Error::BoundaryGuardTrip {
                    min_coeff: min_coeff(&next),
                });
            }
            normalize_to_slice(&ReebVector::new(next)?, &slice)
        };
        match step() {
            Ok(next) => {
                let vol = volume(link, &next)?;
                // Strict decrease, up to the resolution of the volume itself:
                // close to the critical point the true decrease drops below
                // one ulp.
                if vol <= state.volume + 8.0 * f64::EPSILON * state.volume.abs() {
                    let mut out = record_state(link, state.t + dt_try, &next, opts)?;
                    out.volume = vol;
                    return Ok(out);
                }
                last_guard_trip = None;
            }
            // An overshoot past the guard at this trial step size is retried
            // with a smaller one, like a volume increase.
            Err(Error::BoundaryGuardTrip { min_coeff })
            | Err(Error::BoundaryProximity { min_coeff, .. }) => {
                last_guard_trip = Some(min_coeff);
            }
            Err(Error::SingularNode { value, .. }) => {
                last_guard_trip = Some(value);
            }
            Err(other) => return Err(other),
        }
        dt_try /= 2.0;
    }
    match last_guard_trip {
        Some(min_coeff) => Err(Error::BoundaryGuardTrip { min_coeff }),
        None => Err(Error::StepFailure {
            t: state.t,
            halvings: 20,
        }),
    }
}

fn shifted(base: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
    base.iter().zip(dir).map(|(b, d)| b + s * d).collect()
}

fn validate_start(link: &WeightedSphereLink, xi: &ReebVector, guard: f64) -> Result<()> {
    let slice = HyperplaneSlice::standard(link.n());
    if xi.n() != link.n() {
        return Err(Error::DimensionMismatch {
            expected: link.n() + 1,
            got: xi.n() + 1,
        });
    }
    if min_coeff(xi.coeffs()) <= guard {
        return Err(Error::InvalidStart {
            reason: format!(
                "min coefficient {} at or below the guard {guard}",
                xi.min_coeff()
            ),
        });
    }
    let charge = slice.charge(xi);
    if (charge - slice.level()).abs() > 1e-10 * slice.level() {
        return Err(Error::InvalidStart {
            reason: format!(
                "charge {charge} differs from the slice level {}",
                slice.level()
            ),
        });
    }
    Ok(())
}

/// Integrate the negative gradient flow from `xi0` until the gradient
/// tolerance, the time horizon, the boundary guard or a failed step ends it.
pub fn run_flow(
    link: &WeightedSphereLink,
    xi0: &ReebVector,
    opts: &FlowOptions,
) -> Result<FlowTrajectory> {
    validate_start(link, xi0, opts.boundary_guard)?;
    let mut states = vec![record_state(link, 0.0, xi0, opts)?];
    let terminated_by = loop {
        let last = states.last().expect("non-empty");
        if last.grad_norm < opts.grad_tol {
            break TerminationReason::GradientTolerance;
        }
        if last.t >= opts.t_max {
            break TerminationReason::MaxTime;
        }
        let dt = opts.dt0.min(opts.t_max - last.t);
        match flow_step(link, last, dt, opts) {
            Ok(next) => states.push(next),
            Err(Error::StepFailure { .. }) => break TerminationReason::StepFailure,
            Err(Error::BoundaryGuardTrip { .. }) => break TerminationReason::BoundaryGuard,
            Err(other) => return Err(other),
        }
    };
    Ok(FlowTrajectory {
        states,
        terminated_by,
    })
}

/// Damped Newton minimization of the volume on the slice, with backtracking
/// line search; returns the point with gradient norm below 1e-10.
pub fn minimize_volume(link: &WeightedSphereLink, xi0: &ReebVector) -> Result<ReebVector> {
    minimize_volume_with_guard(link, xi0, FlowOptions::default().boundary_guard)
}

pub fn minimize_volume_with_guard(
    link: &WeightedSphereLink,
    xi0: &ReebVector,
    guard: f64,
) -> Result<ReebVector> {
    validate_start(link, xi0, guard)?;
    let slice = HyperplaneSlice::standard(link.n());
    let basis = linalg::zero_sum_basis(link.n() + 1);
    let mut xi = xi0.clone();
    let mut vol = volume(link, &xi)?;
    for _ in 0..200 {
        let grad = grad_volume(link, &xi)?;
        if grad.norm() < 1e-10 {
            return Ok(xi);
        }
        let hess = hessian_volume(link, &xi)?;
        let g_t: Vec<f64> = basis
            .iter()
            .map(|t| t.iter().zip(grad.coeffs()).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let rhs: Vec<f64> = g_t.iter().map(|g| -g).collect();
        let d_t = linalg::solve(&hess, &rhs).ok_or(Error::NewtonStalled {
            iterations: 0,
            grad_norm: grad.norm(),
        })?;
        // back to ambient coordinates; exactly slice-tangent
        let mut dir = vec![0.0; link.n() + 1];
        for (alpha, t) in basis.iter().enumerate() {
            for (di, ti) in dir.iter_mut().zip(t) {
                *di += d_t[alpha] * ti;
            }
        }
        let slope: f64 = grad.coeffs().iter().zip(&dir).map(|(a, b)| a * b).sum();
        // Newton direction of a strictly convex function descends; a
        // non-descent direction means the Hessian solve went bad.
        if slope >= 0.0 {
            return Err(Error::NewtonStalled {
                iterations: 0,
                grad_norm: grad.norm(),
            });
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = shifted(xi.coeffs(), &dir, step);
            if min_coeff(&cand) >= guard {
                let cand = normalize_to_slice(&ReebVector::new(cand)?, &slice)?;
                let v = volume(link, &cand)?;
                // Armijo, slackened by the floating resolution of the volume
                // so full Newton steps keep being accepted near the optimum.
                if v <= vol + 1e-4 * step * slope + 8.0 * f64::EPSILON * vol.abs() {
                    xi = cand;
                    vol = v;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::BoundaryGuardTrip {
                min_coeff: xi.min_coeff(),
            });
        }
    }
    let grad = grad_volume(link, &xi)?;
    Err(Error::NewtonStalled {
        iterations: 200,
        grad_norm: grad.norm(),
    })
}

/// Evaluate the volume along the straight ray toward the `index`-th boundary
/// facet: the slice point with `a_index = eps` and the remaining mass spread
/// equally.  Returns `(eps, volume)` pairs.
pub fn properness_probe(
    link: &WeightedSphereLink,
    index: usize,
    eps_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let n = link.n();
    let level = HyperplaneSlice::standard(n).level();
    if index > n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: index,
        });
    }
    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if !(eps > 0.0 && eps <= level / (n as f64 + 1.0)) {
            return Err(Error::InvalidStart {
                reason: format!("eps {eps} outside (0, {}]", level / (n as f64 + 1.0)),
            });
        }
        let mut coeffs = vec![(level - eps) / n as f64; n + 1];
        coeffs[index] = eps;
        out.push((eps, volume(link, &ReebVector::new(coeffs)?)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi(coeffs: &[f64]) -> ReebVector {
        ReebVector::new(coeffs.to_vec()).unwrap()
    }

    #[test]
    fn flow_step_fixes_the_critical_point() {
        let link = WeightedSphereLink::new(1);
        let opts = FlowOptions::default();
        let state = record_state(&link, 0.0, &xi(&[1.0, 1.0]), &opts).unwrap();
        let next = flow_step(&link, &state, 0.01, &opts).unwrap();
        for (a, b) in next.reeb.iter().zip(&state.reeb) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn flow_step_decreases_volume_and_stays_on_slice() {
        let link = WeightedSphereLink::new(1);
        let opts = FlowOptions::default();
        let state = record_state(&link, 0.0, &xi(&[0.5, 1.5]), &opts).unwrap();
        let next = flow_step(&link, &state, 0.01, &opts).unwrap();
        assert!(next.volume < state.volume);
        let charge: f64 = next.reeb.iter().sum();
        assert!((charge - 2.0).abs() < 1e-12);
    }

    #[test]
    fn flow_converges_to_the_symmetric_point_n1() {
        let link = WeightedSphereLink::new(1);
        let opts = FlowOptions::default();
        let traj = run_flow(&link, &xi(&[0.5, 1.5]), &opts).unwrap();
        assert_eq!(traj.terminated_by, TerminationReason::GradientTolerance);
        let last = traj.final_reeb();
        for a in last.coeffs() {
            assert!((a - 1.0).abs() < 1e-6, "limit {last}");
        }
        // volume strictly decreases along the recorded states
        for pair in traj.states.windows(2) {
            assert!(pair[1].volume < pair[0].volume + 1e-12);
            assert!(pair[1].t > pair[0].t);
        }
    }

    #[test]
    fn flow_converges_n2() {
        let link = WeightedSphereLink::new(2);
        let opts = FlowOptions::default();
        let traj = run_flow(&link, &xi(&[0.2, 0.8, 2.0]), &opts).unwrap();
        let last = traj.final_reeb();
        for a in last.coeffs() {
            assert!((a - 1.0).abs() < 1e-6, "limit {last}");
        }
    }

    #[test]
    fn trivial_trajectory_from_the_critical_point() {
        let link = WeightedSphereLink::new(1);
        let traj = run_flow(&link, &xi(&[1.0, 1.0]), &FlowOptions::default()).unwrap();
        assert_eq!(traj.states.len(), 1);
        assert_eq!(traj.terminated_by, TerminationReason::GradientTolerance);
    }

    #[test]
    fn time_horizon_terminates_the_flow() {
        let link = WeightedSphereLink::new(1);
        let opts = FlowOptions { t_max: 0.05, ..FlowOptions::default() };
        let traj = run_flow(&link, &xi(&[0.5, 1.5]), &opts).unwrap();
        assert_eq!(traj.terminated_by, TerminationReason::MaxTime);
        let last = traj.states.last().unwrap();
        assert!(last.t >= 0.05 && last.t < 0.05 + opts.dt0);
    }

    #[test]
    fn run_flow_rejects_off_slice_and_exterior_starts() {
        let link = WeightedSphereLink::new(1);
        let opts = FlowOptions::default();
        assert!(matches!(
            run_flow(&link, &xi(&[1.0, 2.0]), &opts),
            Err(Error::InvalidStart { .. })
        ));
        assert!(matches!(
            run_flow(&link, &xi(&[-0.5, 2.5]), &opts),
            Err(Error::InvalidStart { .. })
        ));
    }

    #[test]
    fn newton_minimizer_reaches_machine_precision() {
        for n in 1..=3usize {
            let link = WeightedSphereLink::new(n);
            let mut start = vec![0.6; n + 1];
            start[n] = (n as f64 + 1.0) - 0.6 * n as f64;
            let min = minimize_volume(&link, &xi(&start)).unwrap();
            for a in min.coeffs() {
                assert!((a - 1.0).abs() < 1e-8, "n={n}: minimizer {min}");
            }
        }
    }

    #[test]
    fn newton_iterates_decrease_volume() {
        // indirectly: final volume is the round one, below the start
        let link = WeightedSphereLink::new(2);
        let start = xi(&[0.5, 1.0, 1.5]);
        let v0 = volume(&link, &start).unwrap();
        let min = minimize_volume(&link, &start).unwrap();
        let v1 = volume(&link, &min).unwrap();
        assert!(v1 < v0);
    }

    #[test]
    fn flow_and_newton_agree() {
        let link = WeightedSphereLink::new(2);
        let start = xi(&[0.9, 0.6, 1.5]);
        let traj = run_flow(&link, &start, &FlowOptions::default()).unwrap();
        let newton = minimize_volume(&link, &start).unwrap();
        for (a, b) in traj.final_reeb().coeffs().iter().zip(newton.coeffs()) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn properness_probe_values() {
        let link = WeightedSphereLink::new(1);
        let round = 2.0 * std::f64::consts::PI.powi(2);
        let probe = properness_probe(&link, 0, &[1.0, 0.1, 0.01]).unwrap();
        assert!((probe[0].1 - round).abs() < 1e-9 * round);
        assert!((probe[1].1 / round - 1.0 / (0.1 * 1.9)).abs() < 1e-8);
        assert!((probe[2].1 / round - 1.0 / (0.01 * 1.99)).abs() < 1e-6);
        assert!(properness_probe(&link, 0, &[0.0]).is_err());
        assert!(properness_probe(&link, 0, &[1.5]).is_err());
    }

    #[test]
    fn mu_is_attached_when_requested() {
        let link = WeightedSphereLink::new(1);
        let opts = FlowOptions {
            attach_mu: true,
            t_max: 0.05,
            ..FlowOptions::default()
        };
        let traj = run_flow(&link, &xi(&[0.5, 1.5]), &opts).unwrap();
        assert!(traj.states.iter().all(|s| s.mu.is_some()));
        // mu never decreases along the flow
        for pair in traj.states.windows(2) {
            assert!(pair[1].mu.unwrap() >= pair[0].mu.unwrap() - 1e-8);
        }
    }
}
