//! One function per subcommand.

use std::fmt;
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use serde_json::Value;

use cavity_eo::units::{hz_from_angular, TWO_PI};
use cavity_eo::{
    build_system, cooling_figures, cooling_limit, evolve_covariance, pa_threshold,
    parasitic_figures, simulate_ensemble, steady_state, GaussianState, MomentEstimate, Regime,
    SolverReport, TrajectoryEnsembleSpec,
};

use crate::config::{ResolvedScenario, RunConfig};
use crate::output::{self, Cell, Sidecar};

/// Configuration / validation failure: exit code 2.
#[derive(Debug)]
pub struct ConfigFailure(pub String);

impl fmt::Display for ConfigFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigFailure {}

/// A steady state was demanded but the drift is not Hurwitz: exit code 3.
#[derive(Debug)]
pub struct SteadyStateUnavailable(pub String);

impl fmt::Display for SteadyStateUnavailable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no steady state: {}", self.0)
    }
}

impl std::error::Error for SteadyStateUnavailable {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

pub struct Ctx {
    pub raw_config: Value,
    pub config: RunConfig,
    pub preset_name: Option<String>,
    pub overrides: Vec<String>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub format: OutputFormat,
    pub command: &'static str,
}

impl Ctx {
    pub fn emit(&self, stem: &str, headers: &[&str], rows: &[Vec<Cell>]) -> Result<Vec<String>> {
        std::fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("creating {}", self.out_dir.display()))?;
        let mut outputs = Vec::new();
        match self.format {
            OutputFormat::Csv => {
                let path = self.out_dir.join(format!("{stem}.csv"));
                output::write_csv(&path, headers, rows)?;
                outputs.push(path.display().to_string());
            }
            OutputFormat::Json => {
                let path = self.out_dir.join(format!("{stem}.json"));
                let objects: Vec<serde_json::Map<String, Value>> = rows
                    .iter()
                    .map(|row| {
                        headers
                            .iter()
                            .zip(row)
                            .map(|(h, cell)| {
                                let v = match cell {
                                    Cell::Float(x) => serde_json::json!(x),
                                    Cell::Bool(x) => serde_json::json!(x),
                                    Cell::Text(s) => serde_json::json!(s),
                                    Cell::Missing => Value::Null,
                                };
                                ((*h).to_owned(), v)
                            })
                            .collect()
                    })
                    .collect();
                std::fs::write(&path, serde_json::to_string_pretty(&objects)?)
                    .with_context(|| format!("writing {}", path.display()))?;
                outputs.push(path.display().to_string());
            }
        }
        let sidecar = Sidecar {
            tool: "cavity-eo",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            preset: self.preset_name.as_deref(),
            overrides: &self.overrides,
            seed: self.seed,
            generated_at_unix_s: output::unix_now(),
            config: self.raw_config.clone(),
            outputs: outputs.clone(),
        };
        output::write_sidecar(&self.out_dir, stem, &sidecar)?;
        Ok(outputs)
    }

    fn resolve(&self) -> Result<ResolvedScenario> {
        self.config
            .resolve()
            .map_err(|e| anyhow!(ConfigFailure(format!("{e:#}"))))
    }
}

/// Device block to coupling-rate report.
pub fn run_coupling(ctx: &Ctx) -> Result<()> {
    let device = ctx
        .config
        .device
        .ok_or_else(|| anyhow!(ConfigFailure("`coupling` needs a device block".into())))?;
    let g = device
        .coupling_rate()
        .map_err(|e| anyhow!(ConfigFailure(e.to_string())))?;
    let phi_per_volt = device.phase_per_volt()?;
    let v_zp = cavity_eo::voltage_zero_point(device.omega_b_rad_per_s, device.capacitance_f)?;
    let headers = [
        "g_rad_per_s",
        "g_Hz",
        "phase_per_volt_rad_per_V",
        "voltage_zero_point_V",
        "overlap_factor",
    ];
    let row = vec![
        Cell::Float(g),
        Cell::Float(hz_from_angular(g)),
        Cell::Float(phi_per_volt),
        Cell::Float(v_zp),
        Cell::Float(device.overlap_factor),
    ];
    let outputs = ctx.emit("coupling", &headers, &[row])?;
    println!(
        "coupling rate g = {:.6e} rad/s (2pi x {:.3} Hz) -> {}",
        g,
        g / TWO_PI,
        outputs.join(", ")
    );
    Ok(())
}

/// Shared solver step: build the system, solve, and hand back the report.
fn solve(resolved: &ResolvedScenario) -> Result<SolverReport> {
    let sys = build_system(&resolved.scenario)?;
    Ok(steady_state(&sys))
}

fn occupation_cell(report: &SolverReport, mode: &str) -> Cell {
    match &report.state {
        Some(state) => state
            .occupation(mode)
            .map(Cell::Float)
            .unwrap_or(Cell::Missing),
        None => Cell::Missing,
    }
}

/// Scenario observables (used by the single-run commands and by `sweep`).
pub fn scenario_headers(regime: Regime) -> &'static [&'static str] {
    match regime {
        Regime::Cooling => &[
            "g_rad_per_s",
            "alpha_minus_sq",
            "gamma_a_rad_per_s",
            "gamma_b_rad_per_s",
            "N_a",
            "N_b",
            "G0",
            "G",
            "cooling_limit",
            "n_ss_formula",
            "n_ss_lyapunov",
            "max_re_eig_rad_per_s",
            "stable",
        ],
        Regime::ParametricAmp => &[
            "g_rad_per_s",
            "alpha_plus_sq",
            "gamma_a_rad_per_s",
            "gamma_b_rad_per_s",
            "C_plus",
            "max_re_eig_rad_per_s",
            "stable",
            "n_a_lyapunov",
            "n_b_lyapunov",
            "log_negativity",
        ],
        Regime::ParasiticThreeMode => &[
            "g_rad_per_s",
            "alpha0_sq",
            "delta_rad_per_s",
            "mu",
            "Gamma0",
            "Gamma",
            "N_b",
            "n_ss_formula",
            "n_ss_lyapunov",
            "approx_valid",
            "max_re_eig_rad_per_s",
            "stable",
        ],
        Regime::BackActionEvading => &[],
    }
}

/// Compute one observable row for the resolved scenario. Returns the row
/// plus the solver report (for exit-code decisions).
pub fn scenario_row(resolved: &ResolvedScenario) -> Result<(Vec<Cell>, SolverReport)> {
    let sc = &resolved.scenario;
    let report = solve(resolved)?;
    let row = match sc.regime {
        Regime::Cooling => {
            let alpha_sq = sc.alpha_minus_sq.expect("resolved cooling has alpha");
            let (n_a, n_b) = (sc.optical_occupation(), sc.microwave_occupation());
            let fig = cooling_figures(
                sc.g_rad_per_s,
                alpha_sq,
                sc.optical.gamma_rad_per_s,
                sc.microwave.gamma_rad_per_s,
                n_a,
                n_b,
            )?;
            vec![
                Cell::Float(sc.g_rad_per_s),
                Cell::Float(alpha_sq),
                Cell::Float(sc.optical.gamma_rad_per_s),
                Cell::Float(sc.microwave.gamma_rad_per_s),
                Cell::Float(n_a),
                Cell::Float(n_b),
                Cell::Float(fig.cooperativity),
                Cell::Float(fig.gain),
                Cell::Float(cooling_limit(
                    sc.optical.gamma_rad_per_s,
                    sc.microwave.gamma_rad_per_s,
                )?),
                Cell::Float(fig.n_ss),
                occupation_cell(&report, "b"),
                Cell::Float(report.max_drift_eigenvalue_real_part),
                Cell::Bool(report.stable),
            ]
        }
        Regime::ParametricAmp => {
            let alpha_sq = sc.alpha_plus_sq.expect("resolved parametric has alpha");
            let c_plus = pa_threshold(
                sc.g_rad_per_s,
                alpha_sq,
                sc.optical.gamma_rad_per_s,
                sc.microwave.gamma_rad_per_s,
            )?;
            let log_neg = match &report.state {
                Some(state) => state
                    .log_negativity(("a", "b"))
                    .map(Cell::Float)
                    .unwrap_or(Cell::Missing),
                None => Cell::Missing,
            };
            vec![
                Cell::Float(sc.g_rad_per_s),
                Cell::Float(alpha_sq),
                Cell::Float(sc.optical.gamma_rad_per_s),
                Cell::Float(sc.microwave.gamma_rad_per_s),
                Cell::Float(c_plus),
                Cell::Float(report.max_drift_eigenvalue_real_part),
                Cell::Bool(report.stable),
                occupation_cell(&report, "a"),
                occupation_cell(&report, "b"),
                log_neg,
            ]
        }
        Regime::ParasiticThreeMode => {
            let alpha_sq = sc.alpha0_sq.expect("resolved parasitic has alpha");
            let delta = sc.delta_rad_per_s.expect("resolved parasitic has delta");
            let n_b = sc.microwave_occupation();
            let fig = parasitic_figures(
                sc.g_rad_per_s,
                alpha_sq,
                sc.optical.gamma_rad_per_s,
                sc.microwave.gamma_rad_per_s,
                delta,
                n_b,
            )?;
            vec![
                Cell::Float(sc.g_rad_per_s),
                Cell::Float(alpha_sq),
                Cell::Float(delta),
                Cell::Float(fig.mu),
                Cell::Float(fig.cooperativity),
                Cell::Float(fig.gain),
                Cell::Float(n_b),
                Cell::Float(fig.n_ss),
                occupation_cell(&report, "b"),
                Cell::Bool(fig.validity.within_regime),
                Cell::Float(report.max_drift_eigenvalue_real_part),
                Cell::Bool(report.stable),
            ]
        }
        Regime::BackActionEvading => {
            return Err(anyhow!(ConfigFailure(
                "the bae scenario produces a time series; use the `bae` subcommand".into()
            )))
        }
    };
    Ok((row, report))
}

/// Restrict (headers, rows) to the requested observables, keeping the
/// first `keep` columns (axis or time columns) unconditionally.
pub fn filter_columns<'a>(
    requested: &Option<Vec<String>>,
    headers: &[&'a str],
    rows: Vec<Vec<Cell>>,
    keep: usize,
) -> Result<(Vec<&'a str>, Vec<Vec<Cell>>)> {
    let Some(requested) = requested else {
        return Ok((headers.to_vec(), rows));
    };
    let mut indices = Vec::with_capacity(keep + requested.len());
    indices.extend(0..keep);
    for name in requested {
        let i = headers.iter().position(|h| h == name).ok_or_else(|| {
            anyhow!(ConfigFailure(format!(
                "unknown observable `{name}`; available: {}",
                headers[keep..].join(", ")
            )))
        })?;
        indices.push(i);
    }
    let headers = indices.iter().map(|&i| headers[i]).collect();
    let rows = rows
        .into_iter()
        .map(|row| indices.iter().map(|&i| row[i].clone()).collect())
        .collect();
    Ok((headers, rows))
}

fn run_scalar_scenario(ctx: &Ctx, expected: Regime, demand_steady: bool) -> Result<()> {
    let resolved = ctx.resolve()?;
    if resolved.scenario.regime != expected {
        return Err(anyhow!(ConfigFailure(format!(
            "this subcommand expects a `{expected}` scenario, preset says `{}`",
            resolved.scenario.regime
        ))));
    }
    let headers = scenario_headers(expected);
    let (row, report) = scenario_row(&resolved)?;
    let (headers, rows) = filter_columns(&ctx.config.outputs, headers, vec![row], 0)?;
    let outputs = ctx.emit(ctx.command, &headers, &rows)?;
    let pump_note = match resolved.pump_photons {
        Some(n) => format!(", pump photons = {n:.4e}"),
        None => String::new(),
    };
    println!(
        "{}: g = {:.4e} rad/s{pump_note}, stable = {}, max Re eig = {:.3e} rad/s -> {}",
        ctx.command,
        resolved.g_rad_per_s,
        report.stable,
        report.max_drift_eigenvalue_real_part,
        outputs.join(", ")
    );
    if demand_steady && !report.stable {
        return Err(anyhow!(SteadyStateUnavailable(format!(
            "drift max Re eigenvalue = {:.6e} rad/s",
            report.max_drift_eigenvalue_real_part
        ))));
    }
    Ok(())
}

pub fn run_cooling(ctx: &Ctx) -> Result<()> {
    run_scalar_scenario(ctx, Regime::Cooling, true)
}

pub fn run_pa(ctx: &Ctx) -> Result<()> {
    // Above threshold is a legitimate answer here, so instability is data,
    // not an error.
    run_scalar_scenario(ctx, Regime::ParametricAmp, false)
}

pub fn run_parasitic(ctx: &Ctx) -> Result<()> {
    run_scalar_scenario(ctx, Regime::ParasiticThreeMode, true)
}

/// Time evolution of the double-sideband measurement scenario; writes a
/// time-series CSV of paper-convention quadrature variances.
pub fn run_bae(ctx: &Ctx) -> Result<()> {
    let resolved = ctx.resolve()?;
    let sc = &resolved.scenario;
    if sc.regime != Regime::BackActionEvading {
        return Err(anyhow!(ConfigFailure(format!(
            "this subcommand expects a `bae` scenario, preset says `{}`",
            sc.regime
        ))));
    }
    let sys = build_system(sc)?;
    let (dt_s, n_steps) = match ctx.config.evolution {
        Some(e) => (e.dt_s, e.n_steps),
        None => (1.0 / sc.optical.gamma_rad_per_s, 1000),
    };
    let initial = GaussianState::thermal(
        sys.basis().clone(),
        &[sc.optical_occupation(), sc.microwave_occupation()],
    )?;
    let series = evolve_covariance(&sys, &initial, dt_s, n_steps)?;
    let headers = ["time_s", "var_X_a", "var_Y_a", "var_X_b", "var_Y_b"];
    let rows: Vec<Vec<Cell>> = series
        .times_s
        .iter()
        .zip(&series.states)
        .map(|(t, s)| {
            let var = |label: &str| Cell::Float(s.quadrature_variance(label).unwrap());
            vec![
                Cell::Float(*t),
                var("X_a"),
                var("Y_a"),
                var("X_b"),
                var("Y_b"),
            ]
        })
        .collect();
    let (headers, rows) = filter_columns(&ctx.config.outputs, &headers, rows, 1)?;
    let outputs = ctx.emit("bae", &headers, &rows)?;
    let first = series.states.first().unwrap();
    let last = series.last();
    println!(
        "bae: Var(X_b) {:.6e} -> {:.6e}, Var(Y_b) {:.6e} -> {:.6e} over {} steps -> {}",
        first.quadrature_variance("X_b").unwrap(),
        last.quadrature_variance("X_b").unwrap(),
        first.quadrature_variance("Y_b").unwrap(),
        last.quadrature_variance("Y_b").unwrap(),
        n_steps,
        outputs.join(", ")
    );
    Ok(())
}

struct CompareRow {
    observable: &'static str,
    closed_form: Option<f64>,
    lyapunov: Option<f64>,
    oracle: Option<(f64, f64)>,
    note: String,
}

impl CompareRow {
    fn into_cells(self, rel_tol: f64, sigma_tol: f64) -> (Vec<Cell>, bool) {
        let rel = match (self.closed_form, self.lyapunov) {
            (Some(cf), Some(ly)) => Some((cf - ly).abs() / ly.abs().max(1e-300)),
            _ => None,
        };
        let sigma = match (self.lyapunov, self.oracle) {
            (Some(ly), Some((mc, se))) if se > 0.0 => Some((ly - mc).abs() / se),
            _ => None,
        };
        let pass = rel.map(|r| r <= rel_tol).unwrap_or(true)
            && sigma.map(|s| s <= sigma_tol).unwrap_or(true);
        let cells = vec![
            Cell::Text(self.observable.to_owned()),
            Cell::opt(self.closed_form),
            Cell::opt(self.lyapunov),
            Cell::opt(self.oracle.map(|(v, _)| v)),
            Cell::opt(self.oracle.map(|(_, se)| se)),
            Cell::opt(rel),
            Cell::opt(sigma),
            Cell::Bool(pass),
            Cell::Text(self.note),
        ];
        (cells, pass)
    }
}

fn oracle_occupation(est: &Option<MomentEstimate>, mode: &str) -> Option<(f64, f64)> {
    est.as_ref().and_then(|e| e.occupation(mode).ok())
}

/// Three-way comparison: closed form vs Lyapunov vs trajectory oracle, one
/// row per observable with discrepancy ratios and pass/fail.
pub fn run_compare(ctx: &Ctx, dump_stride: Option<usize>) -> Result<()> {
    let resolved = ctx.resolve()?;
    let sc = &resolved.scenario;
    let oracle_doc = ctx.config.oracle.ok_or_else(|| {
        anyhow!(ConfigFailure(
            "`compare` needs an oracle block (n_trajectories, dt_s, t_final_s, ...)".into()
        ))
    })?;
    let tolerances = ctx.config.compare.unwrap_or_default();

    let sys = build_system(sc)?;
    let report = steady_state(&sys);
    let spec = TrajectoryEnsembleSpec {
        n_trajectories: oracle_doc.n_trajectories,
        dt_s: oracle_doc.dt_s,
        t_final_s: oracle_doc.t_final_s,
        burn_in_s: oracle_doc.burn_in_s,
        seed: ctx.seed,
        scheme: oracle_doc.scheme,
    };
    if let Some(stride) = dump_stride {
        std::fs::create_dir_all(&ctx.out_dir)
            .with_context(|| format!("creating {}", ctx.out_dir.display()))?;
        let path = ctx.out_dir.join("trajectories.csv");
        let mut file = std::io::BufWriter::new(
            std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?,
        );
        match cavity_eo::dump_trajectories(&sys, &spec, stride, &mut file) {
            Ok(()) => println!("compare: dumped trajectories to {}", path.display()),
            Err(e) => println!("compare: trajectory dump stopped: {e}"),
        }
    }
    let oracle_run = simulate_ensemble(&sys, &spec);
    let (oracle_est, oracle_note) = match oracle_run {
        Ok(est) => (Some(est), String::new()),
        Err(e) => (None, format!("oracle: {e}")),
    };
    let lyap_note = if report.stable {
        String::new()
    } else {
        "lyapunov: unstable".to_owned()
    };

    let lyap_occ =
        |mode: &str| -> Option<f64> { report.state.as_ref().and_then(|s| s.occupation(mode).ok()) };

    let mut rows: Vec<CompareRow> = Vec::new();
    match sc.regime {
        Regime::Cooling => {
            let fig = cooling_figures(
                sc.g_rad_per_s,
                sc.alpha_minus_sq.expect("resolved"),
                sc.optical.gamma_rad_per_s,
                sc.microwave.gamma_rad_per_s,
                sc.optical_occupation(),
                sc.microwave_occupation(),
            )?;
            rows.push(CompareRow {
                observable: "n_b",
                closed_form: Some(fig.n_ss),
                lyapunov: lyap_occ("b"),
                oracle: oracle_occupation(&oracle_est, "b"),
                note: format!("{lyap_note}{oracle_note}"),
            });
            rows.push(CompareRow {
                observable: "n_a",
                closed_form: None,
                lyapunov: lyap_occ("a"),
                oracle: oracle_occupation(&oracle_est, "a"),
                note: String::new(),
            });
        }
        Regime::ParasiticThreeMode => {
            let fig = parasitic_figures(
                sc.g_rad_per_s,
                sc.alpha0_sq.expect("resolved"),
                sc.optical.gamma_rad_per_s,
                sc.microwave.gamma_rad_per_s,
                sc.delta_rad_per_s.expect("resolved"),
                sc.microwave_occupation(),
            )?;
            rows.push(CompareRow {
                observable: "n_b",
                closed_form: Some(fig.n_ss),
                lyapunov: lyap_occ("b"),
                oracle: oracle_occupation(&oracle_est, "b"),
                note: format!(
                    "approx_valid={}{lyap_note}{oracle_note}",
                    fig.validity.within_regime
                ),
            });
            rows.push(CompareRow {
                observable: "n_a_minus",
                closed_form: None,
                lyapunov: lyap_occ("a_minus"),
                oracle: oracle_occupation(&oracle_est, "a_minus"),
                note: String::new(),
            });
            rows.push(CompareRow {
                observable: "n_a_plus",
                closed_form: None,
                lyapunov: lyap_occ("a_plus"),
                oracle: oracle_occupation(&oracle_est, "a_plus"),
                note: String::new(),
            });
        }
        Regime::ParametricAmp => {
            let c_plus = pa_threshold(
                sc.g_rad_per_s,
                sc.alpha_plus_sq.expect("resolved"),
                sc.optical.gamma_rad_per_s,
                sc.microwave.gamma_rad_per_s,
            )?;
            rows.push(CompareRow {
                observable: "C_plus",
                closed_form: Some(c_plus),
                lyapunov: None,
                oracle: None,
                note: String::new(),
            });
            // Stability flags must agree across all three routes.
            let flags_consistent =
                (c_plus < 1.0) == report.stable && report.stable == oracle_est.is_some();
            rows.push(CompareRow {
                observable: "stable",
                closed_form: Some(if c_plus < 1.0 { 1.0 } else { 0.0 }),
                lyapunov: Some(if report.stable { 1.0 } else { 0.0 }),
                oracle: Some((if oracle_est.is_some() { 1.0 } else { 0.0 }, f64::NAN)),
                note: format!("flags_consistent={flags_consistent}; {oracle_note}"),
            });
            if report.stable {
                rows.push(CompareRow {
                    observable: "n_b",
                    closed_form: None,
                    lyapunov: lyap_occ("b"),
                    oracle: oracle_occupation(&oracle_est, "b"),
                    note: String::new(),
                });
            }
        }
        Regime::BackActionEvading => {
            return Err(anyhow!(ConfigFailure(
                "`compare` covers the steady-state scenarios (cooling, parametric, parasitic)"
                    .into()
            )));
        }
    }

    let headers = [
        "observable",
        "closed_form",
        "lyapunov",
        "oracle",
        "oracle_se",
        "rel_closed_form_vs_lyapunov",
        "sigma_lyapunov_vs_oracle",
        "pass",
        "note",
    ];
    let mut all_pass = true;
    let cells: Vec<Vec<Cell>> = rows
        .into_iter()
        .map(|r| {
            let (c, pass) = r.into_cells(
                tolerances.rel_tol_closed_form_vs_lyapunov,
                tolerances.sigma_tol_oracle,
            );
            all_pass &= pass;
            c
        })
        .collect();
    let outputs = ctx.emit("compare", &headers, &cells)?;
    println!(
        "compare ({}): {} -> {}",
        sc.regime,
        if all_pass { "all pass" } else { "DISCREPANCY" },
        outputs.join(", ")
    );
    Ok(())
}
