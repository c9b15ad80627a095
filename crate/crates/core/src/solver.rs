//! Steady-state and transient second moments of a linear quantum system.
//!
//! The stationary covariance solves the continuous Lyapunov equation
//! A V + V A^T + D = 0. Systems here are at most 8x8, so the solve is the
//! direct vectorized one, (I (x) A + A (x) I) vec(V) = -vec(D), sharpened by
//! a few rounds of iterative refinement so the slow mode of a stiff system
//! keeps full relative accuracy. Transient covariances propagate with the
//! exact one-step kernel (matrix exponential plus integrated diffusion), so
//! there is no step-size bias to tune away.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::{discretize, max_real_eigenvalue, symmetrize};
use crate::system::LinearQuantumSystem;

/// Relative margin below which the slowest eigenvalue counts as borderline.
pub const DEFAULT_STABILITY_MARGIN: f64 = 1e-12;

/// Outcome of a steady-state solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    /// True iff the drift is Hurwitz (every eigenvalue real part < 0).
    pub stable: bool,
    /// |max Re eig| within the configured margin of zero: threshold-grazing.
    pub borderline: bool,
    pub max_drift_eigenvalue_real_part: f64,
    /// The stationary state; `None` when the drift is not Hurwitz.
    pub state: Option<GaussianState>,
    /// Frobenius norm of A V + V A^T + D at the returned solution.
    pub residual: Option<f64>,
}

impl SolverReport {
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            stable: bool,
            borderline: bool,
            max_drift_eigenvalue_real_part: f64,
            residual: Option<f64>,
            state: Option<serde_json::Value>,
            #[serde(skip_serializing_if = "Option::is_none")]
            note: Option<&'a str>,
        }
        let state = match &self.state {
            Some(s) => Some(serde_json::from_str(&s.to_json()?)?),
            None => None,
        };
        Ok(serde_json::to_string_pretty(&Doc {
            stable: self.stable,
            borderline: self.borderline,
            max_drift_eigenvalue_real_part: self.max_drift_eigenvalue_real_part,
            residual: self.residual,
            state,
            note: (!self.stable).then_some("drift is not Hurwitz; no stationary state"),
        })?)
    }
}

/// Solve A V + V A^T + D = 0 for symmetric V (A must be Hurwitz for the
/// result to be the stationary covariance; the algebra itself only needs
/// the Kronecker sum to be invertible).
pub fn solve_lyapunov(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || d.nrows() != n || d.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "Lyapunov operands",
            expected: n,
            got: d.nrows().max(d.ncols()).max(a.ncols()),
        });
    }
    let eye = DMatrix::<f64>::identity(n, n);
    // vec(AV + VA^T) = (I (x) A + A (x) I) vec(V), column-major vec.
    let m = eye.kronecker(a) + a.kronecker(&eye);
    let lu = m.lu();
    let rhs = DVector::from_column_slice(d.as_slice());
    let solve = |b: &DVector<f64>| -> Result<DMatrix<f64>> {
        let x = lu.solve(&(-b)).ok_or(Error::MinimizerFailed {
            reason: "singular Kronecker sum: drift eigenvalues lambda_i + lambda_j = 0".into(),
        })?;
        Ok(DMatrix::from_column_slice(n, n, x.as_slice()))
    };
    let mut v = symmetrize(&solve(&rhs)?);

    // Iterative refinement: drives the residual down to evaluation noise so
    // slow-mode entries of stiff systems stay accurate.
    let mut best = v.clone();
    let mut best_norm = f64::INFINITY;
    for _ in 0..4 {
        let resid = a * &v + &v * a.transpose() + d;
        let rnorm = resid.norm();
        if rnorm < best_norm {
            best_norm = rnorm;
            best = v.clone();
        }
        let floor = 1e-16 * (a.norm() * v.norm() + d.norm());
        if rnorm <= floor {
            break;
        }
        let correction = symmetrize(&solve(&DVector::from_column_slice(resid.as_slice()))?);
        v += correction;
    }
    Ok(best)
}

/// Stationary Gaussian state of a linear system, with stability reporting.
pub fn steady_state(sys: &LinearQuantumSystem) -> SolverReport {
    steady_state_with_margin(sys, DEFAULT_STABILITY_MARGIN)
}

/// Like [`steady_state`], with an explicit relative margin for flagging a
/// borderline slowest eigenvalue.
pub fn steady_state_with_margin(sys: &LinearQuantumSystem, margin_rel: f64) -> SolverReport {
    let a = sys.drift();
    let d = sys.diffusion();
    let max_re = max_real_eigenvalue(a);
    let margin = margin_rel * a.norm();
    let stable = max_re < 0.0;
    let borderline = max_re.abs() <= margin;
    if !stable {
        return SolverReport {
            stable,
            borderline,
            max_drift_eigenvalue_real_part: max_re,
            state: None,
            residual: None,
        };
    }
    match solve_lyapunov(a, d) {
        Ok(v) => {
            let residual = (a * &v + &v * a.transpose() + d).norm();
            let state = GaussianState::new(sys.basis().clone(), DVector::zeros(sys.dim()), v)
                .expect("dimensions match by construction");
            SolverReport {
                stable,
                borderline,
                max_drift_eigenvalue_real_part: max_re,
                state: Some(state),
                residual: Some(residual),
            }
        }
        // Hurwitz drift guarantees an invertible Kronecker sum, so a failed
        // solve can only mean a numerically defective matrix; report it as
        // unstable-with-no-state rather than panicking.
        Err(_) => SolverReport {
            stable: false,
            borderline,
            max_drift_eigenvalue_real_part: max_re,
            state: None,
            residual: None,
        },
    }
}

/// Covariance (and mean) trajectory under dV/dt = A V + V A^T + D.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSeries {
    pub times_s: Vec<f64>,
    pub states: Vec<GaussianState>,
}

impl CovarianceSeries {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &GaussianState {
        self.states.last().expect("series is never empty")
    }

    /// CSV with a `time_s` column followed by one column per requested
    /// covariance entry (internal canonical scaling), labeled
    /// `cov_<row>_<col>`.
    pub fn write_csv<W: std::io::Write>(
        &self,
        out: &mut W,
        pairs: &[(String, String)],
    ) -> Result<()> {
        let mut header = vec!["time_s".to_owned()];
        for (r, c) in pairs {
            header.push(format!("cov_{r}_{c}"));
        }
        writeln!(out, "{}", header.join(","))?;
        for (t, state) in self.times_s.iter().zip(&self.states) {
            let mut row = vec![format!("{t:.12e}")];
            for (r, c) in pairs {
                let i = state.basis().index_of(r)?;
                let j = state.basis().index_of(c)?;
                row.push(format!("{:.12e}", state.covariance()[(i, j)]));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Propagate an initial Gaussian state for `n_steps` steps of length `dt_s`,
/// returning the full trajectory including the initial state.
///
/// Each step applies the exact kernel V <- Phi V Phi^T + Q and symmetrizes,
/// so stable systems converge to the Lyapunov solution and undamped
/// quadratures (e.g. a measured quadrature with its bath off) are preserved
/// exactly.
pub fn evolve_covariance(
    sys: &LinearQuantumSystem,
    initial: &GaussianState,
    dt_s: f64,
    n_steps: usize,
) -> Result<CovarianceSeries> {
    if dt_s <= 0.0 || !dt_s.is_finite() {
        return Err(Error::InvalidParameter {
            name: "dt_s",
            value: dt_s,
            reason: "must be a positive time step",
        });
    }
    if initial.basis() != sys.basis() {
        return Err(Error::DimensionMismatch {
            what: "initial state basis",
            expected: sys.dim(),
            got: initial.basis().dim(),
        });
    }
    let stable = max_real_eigenvalue(sys.drift()) < 0.0;
    let (phi, q) = discretize(sys.drift(), sys.diffusion(), dt_s);
    let blowup = 1e14 * initial.covariance().norm().max(1.0);

    let mut mean = initial.mean().clone();
    let mut cov = initial.covariance().clone();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(initial.clone());
    for step in 1..=n_steps {
        mean = &phi * mean;
        cov = symmetrize(&(&phi * &cov * phi.transpose() + &q));
        let norm = cov.norm();
        if !norm.is_finite() || (stable && norm > blowup) {
            return Err(Error::CovarianceBlowup {
                step,
                norm,
                stable_system: stable,
            });
        }
        times.push(step as f64 * dt_s);
        states.push(GaussianState::new(
            sys.basis().clone(),
            mean.clone(),
            cov.clone(),
        )?);
    }
    Ok(CovarianceSeries {
        times_s: times,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModeSpec;
    use crate::rng::CounterRng;
    use crate::scenarios::{
        build_bae_system, build_cooling_system, build_parametric_system, ScenarioConfig,
    };
    use crate::system::{NoiseInput, StateBasis};
    use approx::assert_relative_eq;

    fn mode(gamma: f64) -> ModeSpec {
        ModeSpec::new(1.0, gamma, 0.0)
    }

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

    #[test]
    fn single_mode_detailed_balance() {
        let sys = single_damped_mode(0.8, 2.5);
        let report = steady_state(&sys);
        assert!(report.stable && !report.borderline);
        let v = report.state.unwrap();
        assert_relative_eq!(
            v.covariance(),
            &(DMatrix::identity(2, 2) * 3.0),
            max_relative = 1e-12
        );
        assert_relative_eq!(v.occupation("a").unwrap(), 2.5, max_relative = 1e-12);
    }

    #[test]
    fn cooling_occupation_matches_closed_form() {
        let (g, alpha_sq, gamma_a, gamma_b, n_a, n_b) = (0.02, 400.0, 1.0, 0.2, 0.1, 50.0);
        let mut cfg = ScenarioConfig::cooling(g, mode(gamma_a), mode(gamma_b), alpha_sq);
        cfg.optical_bath_occupation = Some(n_a);
        cfg.microwave_bath_occupation = Some(n_b);
        let sys = build_cooling_system(&cfg).unwrap();
        let report = steady_state(&sys);
        let n_lyap = report.state.unwrap().occupation("b").unwrap();
        let fig =
            crate::formulas::cooling_figures(g, alpha_sq, gamma_a, gamma_b, n_a, n_b).unwrap();
        assert!(
            (n_lyap / fig.n_ss - 1.0).abs() < 1e-9,
            "lyapunov {n_lyap} vs formula {}",
            fig.n_ss
        );
    }

    #[test]
    fn unit_gain_halves_the_bath_occupation() {
        // G = 1 with a cold optical bath leaves n_b = N_b / 2. Reaching
        // G = 1 takes G0 = (1 + gamma_b/gamma_a) / (1 - gamma_b/gamma_a).
        let (gamma_a, gamma_b, n_b) = (1.0, 0.5, 60.0);
        let g0 = (1.0 + gamma_b / gamma_a) / (1.0 - gamma_b / gamma_a);
        let g = 0.01;
        let alpha_sq = g0 * gamma_a * gamma_b / (4.0 * g * g);
        let mut cfg = ScenarioConfig::cooling(g, mode(gamma_a), mode(gamma_b), alpha_sq);
        cfg.optical_bath_occupation = Some(0.0);
        cfg.microwave_bath_occupation = Some(n_b);
        let sys = build_cooling_system(&cfg).unwrap();
        let state = steady_state(&sys).state.unwrap();
        assert_relative_eq!(
            state.occupation("b").unwrap(),
            n_b / 2.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn parametric_just_above_threshold_is_unstable() {
        let (g, gamma_a, gamma_b) = (0.05, 1.0, 0.3);
        let alpha_sq = 1.0001 * gamma_a * gamma_b / (4.0 * g * g);
        let cfg = ScenarioConfig::parametric(g, mode(gamma_a), mode(gamma_b), alpha_sq);
        let sys = build_parametric_system(&cfg).unwrap();
        let report = steady_state(&sys);
        assert!(!report.stable);
        assert!(report.state.is_none());
        assert!(report.max_drift_eigenvalue_real_part > 0.0);
    }

    #[test]
    fn lyapunov_residual_is_tiny() {
        let mut rng = CounterRng::new(17);
        for _ in 0..50 {
            let g = 10f64.powf(rng.uniform() * 4.0 - 2.0);
            let alpha_sq = 10f64.powf(rng.uniform() * 4.0);
            let gamma_a = 10f64.powf(rng.uniform() * 4.0 - 2.0);
            let gamma_b = 10f64.powf(rng.uniform() * 4.0 - 2.0);
            let mut cfg = ScenarioConfig::cooling(g, mode(gamma_a), mode(gamma_b), alpha_sq);
            cfg.optical_bath_occupation = Some(rng.uniform() * 10.0);
            cfg.microwave_bath_occupation = Some(rng.uniform() * 1e3);
            let sys = build_cooling_system(&cfg).unwrap();
            let report = steady_state(&sys);
            assert!(report.stable);
            let v = report.state.as_ref().unwrap().covariance();
            let bound = 1e-9 * (sys.drift().norm() * v.norm() + sys.diffusion().norm());
            assert!(
                report.residual.unwrap() <= bound,
                "residual {} > {}",
                report.residual.unwrap(),
                bound
            );
        }
    }

    #[test]
    fn evolve_constant_when_drift_and_diffusion_vanish() {
        let basis = StateBasis::from_modes(&["a"]);
        let sys = LinearQuantumSystem::new(
            basis.clone(),
            DMatrix::zeros(2, 2),
            DMatrix::zeros(2, 2),
            vec![],
        )
        .unwrap();
        let init = GaussianState::thermal(basis, &[4.0]).unwrap();
        let series = evolve_covariance(&sys, &init, 0.5, 20).unwrap();
        for s in &series.states {
            assert_eq!(s.covariance(), init.covariance());
        }
    }

    #[test]
    fn evolve_matches_matrix_exponential_solution() {
        // V(t) = e^{At} (V0 - Vss) e^{A^T t} + Vss for stable systems.
        let mut cfg = ScenarioConfig::cooling(0.1, mode(1.0), mode(0.4), 9.0);
        cfg.optical_bath_occupation = Some(0.0);
        cfg.microwave_bath_occupation = Some(5.0);
        let sys = build_cooling_system(&cfg).unwrap();
        let v_ss = steady_state(&sys).state.unwrap().covariance().clone();
        let init = GaussianState::thermal(sys.basis().clone(), &[0.0, 20.0]).unwrap();
        let dt = 0.25;
        let series = evolve_covariance(&sys, &init, dt, 40).unwrap();
        for (k, state) in series.states.iter().enumerate() {
            let t = k as f64 * dt;
            let e = (sys.drift() * t).exp();
            let expected = &e * (init.covariance() - &v_ss) * e.transpose() + &v_ss;
            assert!(
                (state.covariance() - &expected).norm() <= 1e-9 * expected.norm(),
                "step {k}"
            );
        }
        // Converged to the stationary solution at t >> 1/gamma_b.
        let series = evolve_covariance(&sys, &init, 1.0, 200).unwrap();
        assert!((series.last().covariance() - &v_ss).norm() <= 1e-8 * v_ss.norm());
    }

    #[test]
    fn evolve_preserves_symmetry_exactly() {
        let mut cfg = ScenarioConfig::cooling(0.3, mode(1.0), mode(0.4), 2.0);
        cfg.microwave_bath_occupation = Some(1.0);
        let sys = build_cooling_system(&cfg).unwrap();
        let init = GaussianState::vacuum(sys.basis().clone());
        let series = evolve_covariance(&sys, &init, 0.3, 50).unwrap();
        for s in &series.states {
            assert_eq!(s.covariance(), &s.covariance().transpose());
        }
    }

    #[test]
    fn bae_measured_quadrature_variance_frozen() {
        let cfg = ScenarioConfig::bae(0.1, mode(1.0), mode(0.3), 4.0, 0.0, 0.0);
        let sys = build_bae_system(&cfg).unwrap();
        let init = GaussianState::thermal(sys.basis().clone(), &[0.0, 7.0]).unwrap();
        let var0 = init.quadrature_variance("X_b").unwrap();
        let series = evolve_covariance(&sys, &init, 1.0, 1000).unwrap();
        let mut prev_y = -f64::INFINITY;
        for s in &series.states {
            let vx = s.quadrature_variance("X_b").unwrap();
            assert!((vx / var0 - 1.0).abs() < 1e-9, "Var(X_b) drifted: {vx}");
            let vy = s.quadrature_variance("Y_b").unwrap();
            assert!(vy >= prev_y, "Var(Y_b) must grow monotonically");
            prev_y = vy;
        }
    }

    #[test]
    fn bae_backaction_growth_matches_ou_integral() {
        // Var(y_b)(t) = Var(y_b)(0) + (2g|alpha|)^2 (N_a + 1/2) (4/gamma_a)
        //               * [t - (2/gamma_a)(1 - e^{-gamma_a t / 2})]
        // in canonical scaling, for a stationary optical mode.
        let (g, alpha_sq, gamma_a) = (0.05, 9.0, 1.0);
        let cfg = ScenarioConfig::bae(g, mode(gamma_a), mode(0.3), alpha_sq, 0.0, 0.0);
        let sys = build_bae_system(&cfg).unwrap();
        let init = GaussianState::vacuum(sys.basis().clone());
        let dt = 0.5;
        let series = evolve_covariance(&sys, &init, dt, 200).unwrap();
        let kappa = 2.0 * g * alpha_sq.sqrt();
        let iy = sys.basis().index_of("Y_b").unwrap();
        for (k, s) in series.states.iter().enumerate() {
            let t = k as f64 * dt;
            let growth = kappa
                * kappa
                * 0.5
                * (4.0 / gamma_a)
                * (t - (2.0 / gamma_a) * (1.0 - (-gamma_a * t / 2.0).exp()));
            let expected = 0.5 + growth;
            let got = s.covariance()[(iy, iy)];
            assert!(
                (got - expected).abs() <= 1e-9 * expected,
                "t = {t}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn evolve_rejects_bad_dt_and_mismatched_basis() {
        let sys = single_damped_mode(1.0, 0.0);
        let init = GaussianState::vacuum(StateBasis::from_modes(&["a"]));
        assert!(evolve_covariance(&sys, &init, 0.0, 10).is_err());
        let wrong = GaussianState::vacuum(StateBasis::from_modes(&["a", "b"]));
        assert!(matches!(
            evolve_covariance(&sys, &wrong, 0.1, 10),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn report_serializes_with_and_without_state() {
        let sys = single_damped_mode(1.0, 0.5);
        let text = steady_state(&sys).to_json().unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["stable"], serde_json::json!(true));
        assert!(doc["state"]["covariance"][0][0].is_number());

        let cfg = ScenarioConfig::parametric(1.0, mode(0.1), mode(0.1), 400.0);
        let sys = build_parametric_system(&cfg).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&steady_state(&sys).to_json().unwrap()).unwrap();
        assert_eq!(doc["stable"], serde_json::json!(false));
        assert!(doc["state"].is_null());
        assert!(doc["note"].as_str().unwrap().contains("Hurwitz"));
    }

    #[test]
    fn series_csv_export_by_label_pairs() {
        let mut cfg = ScenarioConfig::cooling(0.1, mode(1.0), mode(0.4), 4.0);
        cfg.microwave_bath_occupation = Some(2.0);
        let sys = build_cooling_system(&cfg).unwrap();
        let init = GaussianState::vacuum(sys.basis().clone());
        let series = evolve_covariance(&sys, &init, 0.5, 4).unwrap();
        let pairs = vec![
            ("X_b".to_owned(), "X_b".to_owned()),
            ("X_a".to_owned(), "Y_b".to_owned()),
        ];
        let mut buf = Vec::new();
        series.write_csv(&mut buf, &pairs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "time_s,cov_X_b_X_b,cov_X_a_Y_b");
        assert_eq!(lines.count(), 5);
        let bad = vec![("X_q".to_owned(), "X_a".to_owned())];
        assert!(series.write_csv(&mut Vec::new(), &bad).is_err());
    }

    #[test]
    fn runaway_parametric_transient_reports_blowup() {
        let (g, gamma) = (1.0, 0.1);
        let alpha_sq = 400.0; // far above threshold
        let cfg = ScenarioConfig::parametric(g, mode(gamma), mode(gamma), alpha_sq);
        let sys = build_parametric_system(&cfg).unwrap();
        let init = GaussianState::vacuum(sys.basis().clone());
        let err = evolve_covariance(&sys, &init, 10.0, 10_000).unwrap_err();
        match err {
            Error::CovarianceBlowup { stable_system, .. } => assert!(!stable_system),
            other => panic!("expected blowup, got {other:?}"),
        }
    }
}
