//! Brute-force trajectory oracle.
//!
//! Integrates the c-number stochastic equations du = A u dt + B dW with
//! B B^T = D, trajectory by trajectory, and estimates symmetrized moments
//! with jackknife standard errors. For a linear system those moments obey
//! the same Lyapunov dynamics as the quantum symmetrized moments, so this
//! estimator validates the solver and the closed-form layer without sharing
//! any of their code path.
//!
//! The default integrator samples the *exact* one-step transition kernel
//! (matrix exponential plus integrated diffusion), so the estimate carries
//! no discretization bias at any dt; Euler-Maruyama is kept as a second
//! scheme to cross-check the kernel itself. Trajectories draw from
//! independent counter-based streams and reduce in a fixed pairwise order,
//! so results are bit-identical for a given seed regardless of thread count.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::{discretize, psd_factor};
use crate::rng::CounterRng;
use crate::system::{LinearQuantumSystem, StateBasis};

/// Factor a symmetric PSD diffusion matrix as D = B B^T (eigenvalue based;
/// rank-deficient D keeps zero columns). Indefinite matrices are rejected
/// with the offending eigenvalue.
pub fn factor_diffusion(d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    psd_factor(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Scheme {
    /// Sample the exact transition kernel of the linear SDE.
    #[default]
    #[serde(rename = "exact")]
    ExactKernel,
    /// First-order Euler-Maruyama; biased at finite dt, used for
    /// cross-checks.
    #[serde(rename = "euler")]
    EulerMaruyama,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEnsembleSpec {
    pub n_trajectories: usize,
    pub dt_s: f64,
    pub t_final_s: f64,
    /// Portion of each trajectory discarded before sampling.
    #[serde(default)]
    pub burn_in_s: f64,
    pub seed: u64,
    #[serde(default)]
    pub scheme: Scheme,
}

impl TrajectoryEnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories < 2 {
            return Err(Error::InvalidParameter {
                name: "n_trajectories",
                value: self.n_trajectories as f64,
                reason: "need at least 2 trajectories for standard errors",
            });
        }
        if self.dt_s <= 0.0 || !self.dt_s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt_s",
                value: self.dt_s,
                reason: "must be a positive time step",
            });
        }
        if self.burn_in_s < 0.0 || !self.burn_in_s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "burn_in_s",
                value: self.burn_in_s,
                reason: "must be nonnegative",
            });
        }
        if !self.t_final_s.is_finite() || self.t_final_s <= self.burn_in_s {
            return Err(Error::InvalidParameter {
                name: "t_final_s",
                value: self.t_final_s,
                reason: "must exceed the burn-in",
            });
        }
        Ok(())
    }
}

/// Ensemble moment estimate with entrywise jackknife standard errors.
///
/// `n_effective` counts the independent units behind the standard errors:
/// the trajectories, not the (autocorrelated) time samples within them.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub basis: StateBasis,
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub standard_errors: DMatrix<f64>,
    pub mean_standard_errors: DVector<f64>,
    pub n_effective: usize,
}

impl MomentEstimate {
    /// Occupation of one mode with a propagated standard error.
    pub fn occupation(&self, mode: &str) -> Result<(f64, f64)> {
        let (ix, iy) = self.basis.mode_indices(mode)?;
        let n = 0.5 * (self.covariance[(ix, ix)] + self.covariance[(iy, iy)]) - 0.5
            + 0.5 * (self.mean[ix] * self.mean[ix] + self.mean[iy] * self.mean[iy]);
        let se_cov = 0.5
            * (self.standard_errors[(ix, ix)].powi(2) + self.standard_errors[(iy, iy)].powi(2))
                .sqrt();
        let se_mean = self.mean[ix].abs() * self.mean_standard_errors[ix]
            + self.mean[iy].abs() * self.mean_standard_errors[iy];
        Ok((n, se_cov + se_mean))
    }

    /// Quadrature variance in the reporting convention (vacuum = 1), with
    /// its standard error.
    pub fn quadrature_variance(&self, label: &str) -> Result<(f64, f64)> {
        let i = self.basis.index_of(label)?;
        Ok((
            2.0 * self.covariance[(i, i)],
            2.0 * self.standard_errors[(i, i)],
        ))
    }
}

/// Per-trajectory sufficient statistics: time-averaged first and second
/// moments.
#[derive(Clone)]
struct UnitStats {
    mean: DVector<f64>,
    second: DMatrix<f64>,
}

struct Stepper {
    phi: Option<DMatrix<f64>>,
    noise_factor: DMatrix<f64>,
    drift_dt: Option<DMatrix<f64>>,
}

impl Stepper {
    fn build(sys: &LinearQuantumSystem, dt: f64, scheme: Scheme) -> Result<Self> {
        match scheme {
            Scheme::ExactKernel => {
                let (phi, q) = discretize(sys.drift(), sys.diffusion(), dt);
                Ok(Self {
                    phi: Some(phi),
                    noise_factor: factor_diffusion(&q)?,
                    drift_dt: None,
                })
            }
            Scheme::EulerMaruyama => Ok(Self {
                phi: None,
                noise_factor: factor_diffusion(sys.diffusion())? * dt.sqrt(),
                drift_dt: Some(sys.drift() * dt),
            }),
        }
    }

    #[inline]
    fn advance(
        &self,
        u: &mut DVector<f64>,
        scratch: &mut DVector<f64>,
        z: &mut DVector<f64>,
        rng: &mut CounterRng,
    ) {
        for zi in z.iter_mut() {
            *zi = rng.normal();
        }
        match (&self.phi, &self.drift_dt) {
            (Some(phi), _) => {
                scratch.gemv(1.0, phi, u, 0.0);
                scratch.gemv(1.0, &self.noise_factor, z, 1.0);
                std::mem::swap(u, scratch);
            }
            (None, Some(a_dt)) => {
                scratch.copy_from(u);
                scratch.gemv(1.0, a_dt, u, 1.0);
                scratch.gemv(1.0, &self.noise_factor, z, 1.0);
                std::mem::swap(u, scratch);
            }
            _ => unreachable!(),
        }
    }
}

/// Initial condition for the stationary estimate: each mode starts in the
/// thermal state of its own bath (vacuum when it has no bath), which is
/// independent of anything the Lyapunov solver computes.
fn bath_equilibrium(sys: &LinearQuantumSystem) -> GaussianState {
    let basis = sys.basis().clone();
    let occupations: Vec<f64> = basis
        .modes()
        .iter()
        .map(|m| sys.noise_occupation(m).unwrap_or(0.0))
        .collect();
    GaussianState::thermal(basis, &occupations).expect("mode count matches")
}

fn sample_initial(
    init_mean: &DVector<f64>,
    init_factor: &DMatrix<f64>,
    rng: &mut CounterRng,
) -> DVector<f64> {
    let n = init_mean.len();
    let z = DVector::from_fn(n, |_, _| rng.normal());
    init_mean + init_factor * z
}

/// Stationary moment estimate: integrate to `t_final_s`, discard the first
/// `burn_in_s`, time-average each trajectory and pool across trajectories.
pub fn simulate_ensemble(
    sys: &LinearQuantumSystem,
    spec: &TrajectoryEnsembleSpec,
) -> Result<MomentEstimate> {
    spec.validate()?;
    let n = sys.dim();
    let stepper = Stepper::build(sys, spec.dt_s, spec.scheme)?;
    let init = bath_equilibrium(sys);
    let init_factor = psd_factor(init.covariance())?;
    let n_steps = (spec.t_final_s / spec.dt_s).ceil() as usize;
    let burn_steps = ((spec.burn_in_s / spec.dt_s).ceil() as usize).min(n_steps - 1);
    let guard = divergence_guard(&init);

    let units: Vec<Result<UnitStats>> = (0..spec.n_trajectories)
        .into_par_iter()
        .map(|traj| {
            let mut rng = CounterRng::for_trajectory(spec.seed, traj as u64);
            let mut u = sample_initial(init.mean(), &init_factor, &mut rng);
            let mut scratch = DVector::zeros(n);
            let mut z = DVector::zeros(n);
            let mut sum = DVector::zeros(n);
            let mut outer = DMatrix::zeros(n, n);
            let mut count = 0usize;
            for step in 1..=n_steps {
                stepper.advance(&mut u, &mut scratch, &mut z, &mut rng);
                if u.iter().any(|x| !x.is_finite()) || u.norm() > guard {
                    return Err(Error::DivergentEnsemble {
                        trajectory: traj,
                        step,
                    });
                }
                if step > burn_steps {
                    sum += &u;
                    outer.ger(1.0, &u, &u, 1.0);
                    count += 1;
                }
            }
            let inv = 1.0 / count as f64;
            Ok(UnitStats {
                mean: sum * inv,
                second: outer * inv,
            })
        })
        .collect();

    let units: Vec<UnitStats> = units.into_iter().collect::<Result<_>>()?;
    Ok(jackknife(sys.basis().clone(), &units))
}

/// Ensemble moments at evenly spaced checkpoint times (including t = 0),
/// starting every trajectory from a draw of `initial`. Standard errors are
/// jackknifed across trajectories at each checkpoint.
pub fn simulate_time_bins(
    sys: &LinearQuantumSystem,
    spec: &TrajectoryEnsembleSpec,
    initial: &GaussianState,
    n_bins: usize,
) -> Result<Vec<(f64, MomentEstimate)>> {
    spec.validate()?;
    if n_bins == 0 {
        return Err(Error::InvalidParameter {
            name: "n_bins",
            value: 0.0,
            reason: "need at least one checkpoint",
        });
    }
    if initial.basis() != sys.basis() {
        return Err(Error::DimensionMismatch {
            what: "initial state basis",
            expected: sys.dim(),
            got: initial.basis().dim(),
        });
    }
    let n = sys.dim();
    let stepper = Stepper::build(sys, spec.dt_s, spec.scheme)?;
    let init_factor = psd_factor(initial.covariance())?;
    let n_steps = (spec.t_final_s / spec.dt_s).ceil() as usize;
    let checkpoints: Vec<usize> = (0..=n_bins)
        .map(|k| (k as f64 / n_bins as f64 * n_steps as f64).round() as usize)
        .collect();
    let guard = divergence_guard(initial);

    let snapshots: Vec<Result<Vec<DVector<f64>>>> = (0..spec.n_trajectories)
        .into_par_iter()
        .map(|traj| {
            let mut rng = CounterRng::for_trajectory(spec.seed, traj as u64);
            let mut u = sample_initial(initial.mean(), &init_factor, &mut rng);
            let mut scratch = DVector::zeros(n);
            let mut z = DVector::zeros(n);
            let mut shots = Vec::with_capacity(checkpoints.len());
            shots.push(u.clone());
            for step in 1..=n_steps {
                stepper.advance(&mut u, &mut scratch, &mut z, &mut rng);
                if u.iter().any(|x| !x.is_finite()) || u.norm() > guard {
                    return Err(Error::DivergentEnsemble {
                        trajectory: traj,
                        step,
                    });
                }
                if checkpoints.contains(&step) {
                    shots.push(u.clone());
                }
            }
            Ok(shots)
        })
        .collect();

    let snapshots: Vec<Vec<DVector<f64>>> = snapshots.into_iter().collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(checkpoints.len());
    for (bin, &step) in checkpoints.iter().enumerate() {
        let units: Vec<UnitStats> = snapshots
            .iter()
            .map(|shots| {
                let u = &shots[bin];
                UnitStats {
                    mean: u.clone(),
                    second: u * u.transpose(),
                }
            })
            .collect();
        out.push((
            step as f64 * spec.dt_s,
            jackknife(sys.basis().clone(), &units),
        ));
    }
    Ok(out)
}

fn divergence_guard(initial: &GaussianState) -> f64 {
    1e12 * (1.0 + initial.covariance().norm().sqrt() + initial.mean().norm())
}

/// Debugging dump: one CSV row per kept step and trajectory,
/// `trajectory_id,time_s,<one column per state component>`. Replays the
/// same per-trajectory streams as [`simulate_ensemble`] (same seed rule,
/// same initial draw), sequentially, keeping every `stride`-th step. Meant
/// for small ensembles; every front end leaves it off by default.
pub fn dump_trajectories<W: std::io::Write>(
    sys: &LinearQuantumSystem,
    spec: &TrajectoryEnsembleSpec,
    stride: usize,
    out: &mut W,
) -> Result<()> {
    spec.validate()?;
    if stride == 0 {
        return Err(Error::InvalidParameter {
            name: "stride",
            value: 0.0,
            reason: "must keep at least every step (stride >= 1)",
        });
    }
    let n = sys.dim();
    let stepper = Stepper::build(sys, spec.dt_s, spec.scheme)?;
    let init = bath_equilibrium(sys);
    let init_factor = psd_factor(init.covariance())?;
    let n_steps = (spec.t_final_s / spec.dt_s).ceil() as usize;
    let guard = divergence_guard(&init);

    let mut header = vec!["trajectory_id".to_owned(), "time_s".to_owned()];
    header.extend(sys.basis().labels().iter().cloned());
    writeln!(out, "{}", header.join(","))?;
    let mut write_row = |traj: usize, step: usize, u: &DVector<f64>| -> Result<()> {
        let mut row = vec![
            traj.to_string(),
            format!("{:.12e}", step as f64 * spec.dt_s),
        ];
        row.extend(u.iter().map(|x| format!("{x:.12e}")));
        writeln!(out, "{}", row.join(","))?;
        Ok(())
    };

    for traj in 0..spec.n_trajectories {
        let mut rng = CounterRng::for_trajectory(spec.seed, traj as u64);
        let mut u = sample_initial(init.mean(), &init_factor, &mut rng);
        let mut scratch = DVector::zeros(n);
        let mut z = DVector::zeros(n);
        write_row(traj, 0, &u)?;
        for step in 1..=n_steps {
            stepper.advance(&mut u, &mut scratch, &mut z, &mut rng);
            if u.iter().any(|x| !x.is_finite()) || u.norm() > guard {
                return Err(Error::DivergentEnsemble {
                    trajectory: traj,
                    step,
                });
            }
            if step.is_multiple_of(stride) {
                write_row(traj, step, &u)?;
            }
        }
    }
    Ok(())
}

/// Pairwise (tree) sum of per-trajectory statistics: associative,
/// order-fixed, and numerically gentler than a running sum.
fn pairwise_sum(units: &[UnitStats]) -> UnitStats {
    match units.len() {
        0 => unreachable!("validated n_trajectories >= 2"),
        1 => units[0].clone(),
        len => {
            let (lo, hi) = units.split_at(len / 2);
            let a = pairwise_sum(lo);
            let b = pairwise_sum(hi);
            UnitStats {
                mean: a.mean + b.mean,
                second: a.second + b.second,
            }
        }
    }
}

/// Pooled estimate plus leave-one-trajectory-out jackknife: bias-corrected
/// covariance and entrywise standard errors.
fn jackknife(basis: StateBasis, units: &[UnitStats]) -> MomentEstimate {
    let n_units = units.len();
    let dim = units[0].mean.len();
    let k = n_units as f64;
    let totals = pairwise_sum(units);

    let pooled_mean = &totals.mean / k;
    let pooled_second = &totals.second / k;
    let pooled_cov = &pooled_second - &pooled_mean * pooled_mean.transpose();

    // Leave-one-out replicas of the covariance estimator.
    let mut loo_sum = DMatrix::<f64>::zeros(dim, dim);
    let mut loo_mean_sq = DMatrix::<f64>::zeros(dim, dim);
    let mut loo_mean_sum = DVector::<f64>::zeros(dim);
    let mut loo_mean_sq_sum = DVector::<f64>::zeros(dim);
    let mut replicas = Vec::with_capacity(n_units);
    for unit in units {
        let m = (&totals.mean - &unit.mean) / (k - 1.0);
        let s = (&totals.second - &unit.second) / (k - 1.0);
        let c = &s - &m * m.transpose();
        loo_sum += &c;
        loo_mean_sum += &m;
        replicas.push((m, c));
    }
    let loo_avg = &loo_sum / k;
    let loo_mean_avg = &loo_mean_sum / k;
    for (m, c) in &replicas {
        let dc = c - &loo_avg;
        loo_mean_sq += dc.component_mul(&dc);
        let dm = m - &loo_mean_avg;
        loo_mean_sq_sum += dm.component_mul(&dm);
    }
    let se_factor = (k - 1.0) / k;
    let standard_errors = (loo_mean_sq * se_factor).map(f64::sqrt);
    let mean_standard_errors = (loo_mean_sq_sum * se_factor).map(f64::sqrt);

    // Jackknife bias correction of the pooled covariance.
    let covariance = crate::linalg::symmetrize(&(pooled_cov * k - loo_avg * (k - 1.0)));

    MomentEstimate {
        basis,
        mean: pooled_mean,
        covariance,
        standard_errors,
        mean_standard_errors,
        n_effective: n_units,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModeSpec;
    use crate::scenarios::{build_parametric_system, ScenarioConfig};
    use crate::system::NoiseInput;

    fn single_damped_mode(gamma: f64, occupation: f64) -> LinearQuantumSystem {
        let basis = StateBasis::from_modes(&["a"]);
        let drift = DMatrix::from_diagonal(&DVector::from_vec(vec![-gamma / 2.0; 2]));
        let diffusion =
            DMatrix::from_diagonal(&DVector::from_vec(vec![gamma * (occupation + 0.5); 2]));
        LinearQuantumSystem::new(
            basis,
            drift,
            diffusion,
            vec![NoiseInput {
                label: "A".into(),
                mode: "a".into(),
                occupation,
                rate_rad_per_s: gamma,
            }],
        )
        .unwrap()
    }

    fn quick_spec(seed: u64) -> TrajectoryEnsembleSpec {
        TrajectoryEnsembleSpec {
            n_trajectories: 64,
            dt_s: 0.1,
            t_final_s: 120.0,
            burn_in_s: 15.0,
            seed,
            scheme: Scheme::ExactKernel,
        }
    }

    #[test]
    fn stationary_single_mode_within_three_sigma() {
        let n_bath = 1.5;
        let sys = single_damped_mode(1.0, n_bath);
        let est = simulate_ensemble(&sys, &quick_spec(42)).unwrap();
        let expect = n_bath + 0.5;
        for i in 0..2 {
            let got = est.covariance[(i, i)];
            let se = est.standard_errors[(i, i)];
            assert!(
                (got - expect).abs() <= 3.0 * se,
                "V[{i}{i}] = {got} +/- {se}, expected {expect}"
            );
        }
        let off = est.covariance[(0, 1)];
        assert!(off.abs() <= 3.0 * est.standard_errors[(0, 1)].max(1e-3));
        let (n_est, n_se) = est.occupation("a").unwrap();
        assert!((n_est - n_bath).abs() <= 3.0 * n_se);
    }

    #[test]
    fn bit_identical_for_equal_seeds() {
        let sys = single_damped_mode(0.7, 0.3);
        let a = simulate_ensemble(&sys, &quick_spec(7)).unwrap();
        let b = simulate_ensemble(&sys, &quick_spec(7)).unwrap();
        assert_eq!(a, b);
        let c = simulate_ensemble(&sys, &quick_spec(8)).unwrap();
        assert_ne!(a.covariance, c.covariance);
    }

    #[test]
    fn euler_and_exact_schemes_agree() {
        let sys = single_damped_mode(1.0, 2.0);
        let mut spec = quick_spec(3);
        spec.dt_s = 0.02;
        spec.n_trajectories = 96;
        let exact = simulate_ensemble(&sys, &spec).unwrap();
        spec.scheme = Scheme::EulerMaruyama;
        let euler = simulate_ensemble(&sys, &spec).unwrap();
        for i in 0..2 {
            let d = (exact.covariance[(i, i)] - euler.covariance[(i, i)]).abs();
            let se = (exact.standard_errors[(i, i)].powi(2)
                + euler.standard_errors[(i, i)].powi(2))
            .sqrt();
            // Allow the O(gamma dt) Euler bias on top of the noise.
            assert!(d <= 3.0 * se + 0.05 * exact.covariance[(i, i)], "d = {d}");
        }
    }

    #[test]
    fn halving_dt_shifts_less_than_a_standard_error() {
        let sys = single_damped_mode(1.0, 1.0);
        let spec = quick_spec(12);
        let coarse = simulate_ensemble(&sys, &spec).unwrap();
        let mut fine_spec = spec;
        fine_spec.dt_s /= 2.0;
        let fine = simulate_ensemble(&sys, &fine_spec).unwrap();
        for i in 0..2 {
            let shift = (coarse.covariance[(i, i)] - fine.covariance[(i, i)]).abs();
            let se = coarse.standard_errors[(i, i)].max(fine.standard_errors[(i, i)]);
            assert!(shift < se, "shift {shift} vs se {se}");
        }
    }

    #[test]
    fn divergence_detected_above_threshold() {
        let cfg = ScenarioConfig::parametric(
            1.0,
            ModeSpec::new(1.0, 0.1, 0.0),
            ModeSpec::new(1.0, 0.1, 0.0),
            400.0,
        );
        let sys = build_parametric_system(&cfg).unwrap();
        let spec = TrajectoryEnsembleSpec {
            n_trajectories: 4,
            dt_s: 1.0,
            t_final_s: 3000.0,
            burn_in_s: 0.0,
            seed: 1,
            scheme: Scheme::ExactKernel,
        };
        assert!(matches!(
            simulate_ensemble(&sys, &spec),
            Err(Error::DivergentEnsemble { .. })
        ));
    }

    #[test]
    fn spec_validation() {
        let mut spec = quick_spec(0);
        spec.n_trajectories = 1;
        assert!(spec.validate().is_err());
        let mut spec = quick_spec(0);
        spec.dt_s = 0.0;
        assert!(spec.validate().is_err());
        let mut spec = quick_spec(0);
        spec.burn_in_s = spec.t_final_s;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn time_bins_track_relaxation() {
        // A hot mode decaying toward a cold bath: ensemble variance at the
        // checkpoints must follow V(t) = (V0 - Vss) e^{-gamma t} + Vss.
        let gamma = 1.0;
        let sys = single_damped_mode(gamma, 0.0);
        let initial = GaussianState::thermal(sys.basis().clone(), &[5.0]).unwrap();
        let spec = TrajectoryEnsembleSpec {
            n_trajectories: 4000,
            dt_s: 0.05,
            t_final_s: 4.0,
            burn_in_s: 0.0,
            seed: 5,
            scheme: Scheme::ExactKernel,
        };
        let bins = simulate_time_bins(&sys, &spec, &initial, 8).unwrap();
        assert_eq!(bins.len(), 9);
        for (t, est) in &bins {
            let expect = 5.0 * (-gamma * t).exp() + 0.5;
            let got = est.covariance[(0, 0)];
            let se = est.standard_errors[(0, 0)];
            assert!(
                (got - expect).abs() <= 4.0 * se,
                "t = {t}: {got} vs {expect} (se {se})"
            );
        }
    }

    #[test]
    fn factor_diffusion_is_reexported_psd_factor() {
        let d = DMatrix::<f64>::identity(4, 4) * 2.0;
        let b = factor_diffusion(&d).unwrap();
        assert!((&b * b.transpose() - &d).norm() < 1e-12);
    }

    #[test]
    fn trajectory_dump_shape_and_determinism() {
        let sys = single_damped_mode(1.0, 0.5);
        let spec = TrajectoryEnsembleSpec {
            n_trajectories: 3,
            dt_s: 0.5,
            t_final_s: 5.0,
            burn_in_s: 0.0,
            seed: 17,
            scheme: Scheme::ExactKernel,
        };
        let mut a = Vec::new();
        dump_trajectories(&sys, &spec, 2, &mut a).unwrap();
        let mut b = Vec::new();
        dump_trajectories(&sys, &spec, 2, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "trajectory_id,time_s,X_a,Y_a");
        // 3 trajectories x (t = 0 plus every 2nd of 10 steps).
        assert_eq!(lines.count(), 3 * 6);
        assert!(matches!(
            dump_trajectories(&sys, &spec, 0, &mut Vec::new()),
            Err(Error::InvalidParameter { name: "stride", .. })
        ));
    }
}
