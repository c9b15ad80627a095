//! Builders that turn physical rates into the drift/diffusion system of each
//! pumping scenario.
//!
//! All four builders expand the two-mode (or three-mode) amplitude equations
//! into canonical quadratures, with input-output damping normalized as
//! (-gamma/2, sqrt(gamma)) so gamma is the energy decay rate, and each bath
//! contributing gamma (N + 1/2) to its quadrature pair of the diffusion
//! matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModeSpec;
use crate::system::{LinearQuantumSystem, NoiseInput, StateBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "cooling")]
    Cooling,
    #[serde(rename = "parametric")]
    ParametricAmp,
    #[serde(rename = "parasitic")]
    ParasiticThreeMode,
    #[serde(rename = "bae")]
    BackActionEvading,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Cooling => "cooling",
            Regime::ParametricAmp => "parametric",
            Regime::ParasiticThreeMode => "parasitic",
            Regime::BackActionEvading => "bae",
        };
        write!(f, "{s}")
    }
}

/// Everything a builder needs for one pumping scenario.
///
/// Pump amplitudes are dimensionless intracavity photon numbers |alpha|^2;
/// the pump phases enter through `theta_plus_rad` / `theta_minus_rad`.
/// Bath occupations default to the thermal occupation of each mode spec and
/// can be overridden directly (useful for dimensionless test systems).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub regime: Regime,
    pub g_rad_per_s: f64,
    pub optical: ModeSpec,
    pub microwave: ModeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_minus_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_plus_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0_sq: Option<f64>,
    #[serde(default)]
    pub theta_plus_rad: f64,
    #[serde(default)]
    pub theta_minus_rad: f64,
    /// Pump detuning from the center optical mode (parasitic regime), rad/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_rad_per_s: Option<f64>,
    /// Back-action-evading regime only: damp the microwave mode too.
    #[serde(default)]
    pub include_microwave_bath: bool,
    /// Override N(omega_a) instead of deriving it from the optical mode spec.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_bath_occupation: Option<f64>,
    /// Override N(omega_b) instead of deriving it from the microwave mode spec.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub microwave_bath_occupation: Option<f64>,
    /// Occupation of the red-sideband optical bath (parasitic regime).
    #[serde(default)]
    pub sideband_bath_occupation_minus: f64,
    /// Occupation of the blue-sideband optical bath (parasitic regime).
    #[serde(default)]
    pub sideband_bath_occupation_plus: f64,
}

impl ScenarioConfig {
    fn base(regime: Regime, g_rad_per_s: f64, optical: ModeSpec, microwave: ModeSpec) -> Self {
        Self {
            regime,
            g_rad_per_s,
            optical,
            microwave,
            alpha_minus_sq: None,
            alpha_plus_sq: None,
            alpha0_sq: None,
            theta_plus_rad: 0.0,
            theta_minus_rad: 0.0,
            delta_rad_per_s: None,
            include_microwave_bath: false,
            optical_bath_occupation: None,
            microwave_bath_occupation: None,
            sideband_bath_occupation_minus: 0.0,
            sideband_bath_occupation_plus: 0.0,
        }
    }

    pub fn cooling(
        g_rad_per_s: f64,
        optical: ModeSpec,
        microwave: ModeSpec,
        alpha_minus_sq: f64,
    ) -> Self {
        Self {
            alpha_minus_sq: Some(alpha_minus_sq),
            ..Self::base(Regime::Cooling, g_rad_per_s, optical, microwave)
        }
    }

    pub fn parametric(
        g_rad_per_s: f64,
        optical: ModeSpec,
        microwave: ModeSpec,
        alpha_plus_sq: f64,
    ) -> Self {
        Self {
            alpha_plus_sq: Some(alpha_plus_sq),
            ..Self::base(Regime::ParametricAmp, g_rad_per_s, optical, microwave)
        }
    }

    pub fn parasitic(
        g_rad_per_s: f64,
        optical: ModeSpec,
        microwave: ModeSpec,
        alpha0_sq: f64,
        delta_rad_per_s: f64,
    ) -> Self {
        Self {
            alpha0_sq: Some(alpha0_sq),
            delta_rad_per_s: Some(delta_rad_per_s),
            ..Self::base(Regime::ParasiticThreeMode, g_rad_per_s, optical, microwave)
        }
    }

    pub fn bae(
        g_rad_per_s: f64,
        optical: ModeSpec,
        microwave: ModeSpec,
        alpha_sq: f64,
        theta_plus_rad: f64,
        theta_minus_rad: f64,
    ) -> Self {
        Self {
            alpha_plus_sq: Some(alpha_sq),
            alpha_minus_sq: Some(alpha_sq),
            theta_plus_rad,
            theta_minus_rad,
            ..Self::base(Regime::BackActionEvading, g_rad_per_s, optical, microwave)
        }
    }

    fn validate_common(&self) -> Result<()> {
        self.optical.validate()?;
        self.microwave.validate()?;
        if self.g_rad_per_s < 0.0 || !self.g_rad_per_s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "g_rad_per_s",
                value: self.g_rad_per_s,
                reason: "must be nonnegative",
            });
        }
        for (name, v) in [
            ("alpha_minus_sq", self.alpha_minus_sq),
            ("alpha_plus_sq", self.alpha_plus_sq),
            ("alpha0_sq", self.alpha0_sq),
        ] {
            if let Some(v) = v {
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::InvalidParameter {
                        name,
                        value: v,
                        reason: "pump photon number must be nonnegative",
                    });
                }
            }
        }
        for (name, v) in [
            ("optical_bath_occupation", self.optical_bath_occupation),
            ("microwave_bath_occupation", self.microwave_bath_occupation),
            (
                "sideband_bath_occupation_minus",
                Some(self.sideband_bath_occupation_minus),
            ),
            (
                "sideband_bath_occupation_plus",
                Some(self.sideband_bath_occupation_plus),
            ),
        ] {
            if let Some(v) = v {
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::InvalidParameter {
                        name,
                        value: v,
                        reason: "bath occupation must be nonnegative",
                    });
                }
            }
        }
        Ok(())
    }

    fn expect_regime(&self, expected: Regime, builder: &'static str) -> Result<()> {
        if self.regime != expected {
            return Err(Error::WrongRegime {
                expected: builder,
                got: self.regime.to_string(),
            });
        }
        Ok(())
    }

    fn require_amplitude(&self, value: Option<f64>, name: &'static str) -> Result<f64> {
        value.ok_or(Error::InvalidParameter {
            name,
            value: f64::NAN,
            reason: "required by this regime but not set",
        })
    }

    /// N(omega_a), with override.
    pub fn optical_occupation(&self) -> f64 {
        self.optical_bath_occupation
            .unwrap_or_else(|| self.optical.bath_occupation())
    }

    /// N(omega_b), with override.
    pub fn microwave_occupation(&self) -> f64 {
        self.microwave_bath_occupation
            .unwrap_or_else(|| self.microwave.bath_occupation())
    }
}

/// Beam-splitter coupling block of d(x_t, p_t)/dt = kappa R(phi) (x_s, p_s):
/// target mode t driven by source mode s through i g alpha e^{i phi}.
fn beam_splitter_block(kappa: f64, phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    DMatrix::from_row_slice(2, 2, &[-kappa * s, -kappa * c, kappa * c, -kappa * s])
}

/// Reverse direction of the beam-splitter coupling (i g alpha^* on the
/// partner equation).
fn beam_splitter_block_conj(kappa: f64, phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    DMatrix::from_row_slice(2, 2, &[kappa * s, -kappa * c, kappa * c, kappa * s])
}

/// Down-conversion coupling block (i g alpha e^{i phi} acting on the
/// conjugate amplitude); the same block applies in both directions.
fn parametric_block(kappa: f64, phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    DMatrix::from_row_slice(2, 2, &[-kappa * s, kappa * c, kappa * c, kappa * s])
}

fn set_block(m: &mut DMatrix<f64>, row: usize, col: usize, block: &DMatrix<f64>) {
    m.view_mut((row, col), (2, 2)).copy_from(block);
}

fn damping_and_diffusion(
    drift: &mut DMatrix<f64>,
    diffusion: &mut DMatrix<f64>,
    mode_index: usize,
    gamma: f64,
    occupation: f64,
) {
    let i = 2 * mode_index;
    drift[(i, i)] += -gamma / 2.0;
    drift[(i + 1, i + 1)] += -gamma / 2.0;
    diffusion[(i, i)] += gamma * (occupation + 0.5);
    diffusion[(i + 1, i + 1)] += gamma * (occupation + 0.5);
}

/// Red-detuned pumping: beam-splitter exchange between the optical and
/// microwave modes (counter-rotating terms dropped). Basis (X_a, Y_a, X_b, Y_b).
pub fn build_cooling_system(cfg: &ScenarioConfig) -> Result<LinearQuantumSystem> {
    cfg.expect_regime(Regime::Cooling, "cooling")?;
    cfg.validate_common()?;
    let alpha_sq = cfg.require_amplitude(cfg.alpha_minus_sq, "alpha_minus_sq")?;
    let kappa = cfg.g_rad_per_s * alpha_sq.sqrt();
    let phi = cfg.theta_minus_rad;

    let basis = StateBasis::from_modes(&["a", "b"]);
    let n = basis.dim();
    let mut drift = DMatrix::zeros(n, n);
    let mut diffusion = DMatrix::zeros(n, n);
    set_block(&mut drift, 0, 2, &beam_splitter_block(kappa, phi));
    set_block(&mut drift, 2, 0, &beam_splitter_block_conj(kappa, phi));
    let n_a = cfg.optical_occupation();
    let n_b = cfg.microwave_occupation();
    damping_and_diffusion(
        &mut drift,
        &mut diffusion,
        0,
        cfg.optical.gamma_rad_per_s,
        n_a,
    );
    damping_and_diffusion(
        &mut drift,
        &mut diffusion,
        1,
        cfg.microwave.gamma_rad_per_s,
        n_b,
    );

    LinearQuantumSystem::new(
        basis,
        drift,
        diffusion,
        vec![
            NoiseInput {
                label: "A".into(),
                mode: "a".into(),
                occupation: n_a,
                rate_rad_per_s: cfg.optical.gamma_rad_per_s,
            },
            NoiseInput {
                label: "B".into(),
                mode: "b".into(),
                occupation: n_b,
                rate_rad_per_s: cfg.microwave.gamma_rad_per_s,
            },
        ],
    )
}

/// Blue-detuned pumping: non-degenerate down-conversion of the optical and
/// microwave modes. Stable only below the oscillation threshold
/// 4 g^2 |alpha_+|^2 / (gamma_a gamma_b) = 1.
pub fn build_parametric_system(cfg: &ScenarioConfig) -> Result<LinearQuantumSystem> {
    cfg.expect_regime(Regime::ParametricAmp, "parametric")?;
    cfg.validate_common()?;
    let alpha_sq = cfg.require_amplitude(cfg.alpha_plus_sq, "alpha_plus_sq")?;
    let kappa = cfg.g_rad_per_s * alpha_sq.sqrt();
    let phi = cfg.theta_plus_rad;

    let basis = StateBasis::from_modes(&["a", "b"]);
    let n = basis.dim();
    let mut drift = DMatrix::zeros(n, n);
    let mut diffusion = DMatrix::zeros(n, n);
    set_block(&mut drift, 0, 2, &parametric_block(kappa, phi));
    set_block(&mut drift, 2, 0, &parametric_block(kappa, phi));
    let n_a = cfg.optical_occupation();
    let n_b = cfg.microwave_occupation();
    damping_and_diffusion(
        &mut drift,
        &mut diffusion,
        0,
        cfg.optical.gamma_rad_per_s,
        n_a,
    );
    damping_and_diffusion(
        &mut drift,
        &mut diffusion,
        1,
        cfg.microwave.gamma_rad_per_s,
        n_b,
    );

    LinearQuantumSystem::new(
        basis,
        drift,
        diffusion,
        vec![
            NoiseInput {
                label: "A".into(),
                mode: "a".into(),
                occupation: n_a,
                rate_rad_per_s: cfg.optical.gamma_rad_per_s,
            },
            NoiseInput {
                label: "B".into(),
                mode: "b".into(),
                occupation: n_b,
                rate_rad_per_s: cfg.microwave.gamma_rad_per_s,
            },
        ],
    )
}

/// Detuned pumping of the center optical mode: resonant up-conversion into
/// the red sideband mode plus parasitic down-conversion into the blue one.
/// Basis (X_a_minus, Y_a_minus, X_a_plus, Y_a_plus, X_b, Y_b); the center
/// mode is treated classically through alpha_0 (undepleted pump, phase
/// absorbed so alpha_0 >= 0).
pub fn build_parasitic_system(cfg: &ScenarioConfig) -> Result<LinearQuantumSystem> {
    cfg.expect_regime(Regime::ParasiticThreeMode, "parasitic")?;
    cfg.validate_common()?;
    let alpha0_sq = cfg.require_amplitude(cfg.alpha0_sq, "alpha0_sq")?;
    let delta = cfg.delta_rad_per_s.ok_or(Error::InvalidParameter {
        name: "delta_rad_per_s",
        value: f64::NAN,
        reason: "required by the parasitic regime but not set",
    })?;
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    if !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta_rad_per_s",
            value: delta,
            reason: "must be finite",
        });
    }
    let kappa = cfg.g_rad_per_s * alpha0_sq.sqrt();
    let gamma_a = cfg.optical.gamma_rad_per_s;
    let gamma_b = cfg.microwave.gamma_rad_per_s;

    let basis = StateBasis::from_modes(&["a_minus", "a_plus", "b"]);
    let n = basis.dim();
    let mut drift = DMatrix::zeros(n, n);
    let mut diffusion = DMatrix::zeros(n, n);

    // Red sideband rotates at 2*delta and couples to b like down-conversion.
    drift[(0, 1)] += -2.0 * delta;
    drift[(1, 0)] += 2.0 * delta;
    set_block(&mut drift, 0, 4, &parametric_block(kappa, 0.0));
    set_block(&mut drift, 4, 0, &parametric_block(kappa, 0.0));
    // Blue sideband exchanges quanta with b like a beam splitter.
    set_block(&mut drift, 2, 4, &beam_splitter_block(kappa, 0.0));
    set_block(&mut drift, 4, 2, &beam_splitter_block_conj(kappa, 0.0));

    let n_minus = cfg.sideband_bath_occupation_minus;
    let n_plus = cfg.sideband_bath_occupation_plus;
    let n_b = cfg.microwave_occupation();
    damping_and_diffusion(&mut drift, &mut diffusion, 0, gamma_a, n_minus);
    damping_and_diffusion(&mut drift, &mut diffusion, 1, gamma_a, n_plus);
    damping_and_diffusion(&mut drift, &mut diffusion, 2, gamma_b, n_b);

    LinearQuantumSystem::new(
        basis,
        drift,
        diffusion,
        vec![
            NoiseInput {
                label: "A_minus".into(),
                mode: "a_minus".into(),
                occupation: n_minus,
                rate_rad_per_s: gamma_a,
            },
            NoiseInput {
                label: "A_plus".into(),
                mode: "a_plus".into(),
                occupation: n_plus,
                rate_rad_per_s: gamma_a,
            },
            NoiseInput {
                label: "B".into(),
                mode: "b".into(),
                occupation: n_b,
                rate_rad_per_s: gamma_b,
            },
        ],
    )
}

/// Equal-magnitude double-sideband pumping: the measured microwave
/// quadrature X_b is dynamically decoupled while the back-action piles into
/// Y_b. Basis (X_a, Y_a, X_b, Y_b), referenced to the pump phases through
/// theta = (theta_+ + theta_-)/2 and nu = (theta_+ - theta_-)/2; the drift
/// matrix itself is invariant under those phases.
///
/// With `include_microwave_bath` the microwave quadratures additionally get
/// phase-insensitive thermal damping (-gamma_b/2 plus the matching
/// diffusion); with the flag off, the X_b and Y_b rows carry no damping and
/// no noise, exactly as printed.
pub fn build_bae_system(cfg: &ScenarioConfig) -> Result<LinearQuantumSystem> {
    cfg.expect_regime(Regime::BackActionEvading, "bae")?;
    cfg.validate_common()?;
    let plus_sq = cfg.require_amplitude(cfg.alpha_plus_sq, "alpha_plus_sq")?;
    let minus_sq = cfg.require_amplitude(cfg.alpha_minus_sq, "alpha_minus_sq")?;
    let scale = plus_sq.max(minus_sq);
    if (plus_sq - minus_sq).abs() > 1e-12 * scale {
        return Err(Error::UnequalSidebands { plus_sq, minus_sq });
    }
    let kappa = 2.0 * cfg.g_rad_per_s * plus_sq.sqrt();
    let gamma_a = cfg.optical.gamma_rad_per_s;

    let basis = StateBasis::from_modes(&["a", "b"]);
    let n = basis.dim();
    let mut drift = DMatrix::zeros(n, n);
    let mut diffusion = DMatrix::zeros(n, n);
    drift[(1, 2)] = kappa; // dY_a/dt <- 2 g |alpha| X_b
    drift[(3, 0)] = kappa; // dY_b/dt <- 2 g |alpha| X_a
    let n_a = cfg.optical_occupation();
    damping_and_diffusion(&mut drift, &mut diffusion, 0, gamma_a, n_a);

    let mut noise = vec![NoiseInput {
        label: "A".into(),
        mode: "a".into(),
        occupation: n_a,
        rate_rad_per_s: gamma_a,
    }];
    if cfg.include_microwave_bath {
        let n_b = cfg.microwave_occupation();
        damping_and_diffusion(
            &mut drift,
            &mut diffusion,
            1,
            cfg.microwave.gamma_rad_per_s,
            n_b,
        );
        noise.push(NoiseInput {
            label: "B".into(),
            mode: "b".into(),
            occupation: n_b,
            rate_rad_per_s: cfg.microwave.gamma_rad_per_s,
        });
    }

    LinearQuantumSystem::new(basis, drift, diffusion, noise)
}

/// Dispatch on the configured regime.
pub fn build_system(cfg: &ScenarioConfig) -> Result<LinearQuantumSystem> {
    match cfg.regime {
        Regime::Cooling => build_cooling_system(cfg),
        Regime::ParametricAmp => build_parametric_system(cfg),
        Regime::ParasiticThreeMode => build_parasitic_system(cfg),
        Regime::BackActionEvading => build_bae_system(cfg),
    }
}
