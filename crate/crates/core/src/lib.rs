//! Linearized quantum dynamics of cavity electro-optic systems.
//!
//! An electro-optic modulator inside an optical cavity couples a cavity
//! optical mode to a microwave resonator mode the same way radiation
//! pressure couples light to a mechanical oscillator. Pumping the optical
//! cavity on a sideband turns that static coupling into beam-splitter
//! exchange (sideband cooling of the microwave mode), non-degenerate
//! down-conversion (two-mode squeezing / entanglement with an oscillation
//! threshold), or - with both sidebands pumped equally - a back-action
//! evading measurement of one microwave quadrature.
//!
//! The crate covers that ground in five layers:
//!
//! - [`params`]: device geometry and environment to rates (coupling rate g,
//!   thermal occupations, pump photon numbers);
//! - [`scenarios`]: each pumping regime to a concrete drift/diffusion
//!   system over labeled quadratures ([`system`]);
//! - [`solver`]: stationary covariances via the Lyapunov equation and exact
//!   transient propagation, with observables on [`gaussian`] states;
//! - [`formulas`]: the closed-form figures (cooling gain and its saturation
//!   limit, parasitic floor, oscillation threshold) used as analytic
//!   cross-checks and for fast sweeps;
//! - [`oracle`]: a seeded trajectory ensemble that estimates the same
//!   moments by brute force, sharing no code with the solver path.
//!
//! Covariances are symmetrized moments over canonical quadratures with
//! vacuum = (1/2) I; reported quadrature variances use the convention in
//! which vacuum has variance 1 (twice the internal diagonal).

pub mod error;
pub mod formulas;
pub mod gaussian;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod rng;
pub mod scenarios;
pub mod solver;
pub mod system;
pub mod units;

pub use error::{Error, Result};
pub use formulas::{
    cooling_figures, cooling_limit, optimal_parasitic_detuning, pa_threshold, parasitic_figures,
    CoolingFigures, DetuningOptimum, ParasiticFigures,
};
pub use gaussian::{symplectic_eigenvalues, GaussianState};
pub use oracle::{
    dump_trajectories, factor_diffusion, simulate_ensemble, simulate_time_bins, MomentEstimate,
    Scheme, TrajectoryEnsembleSpec,
};
pub use params::{
    pump_photon_number, thermal_occupation, voltage_zero_point, EomDeviceParams, ModeSpec,
    PumpConfig,
};
pub use scenarios::{
    build_bae_system, build_cooling_system, build_parametric_system, build_parasitic_system,
    build_system, Regime, ScenarioConfig,
};
pub use solver::{evolve_covariance, steady_state, CovarianceSeries, SolverReport};
pub use system::{LinearQuantumSystem, NoiseInput, StateBasis};
