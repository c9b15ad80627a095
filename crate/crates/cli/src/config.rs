//! Run configuration: the preset JSON schema, `--set` overrides, and
//! resolution into a concrete scenario.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use cavity_eo::units::angular_from_wavelength;
use cavity_eo::{
    pump_photon_number, EomDeviceParams, ModeSpec, PumpConfig, Regime, ScenarioConfig,
};

/// One cavity/resonator mode as written in config files: the frequency can
/// be given either as `omega_rad_per_s` or as a vacuum `wavelength_m`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_rad_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_m: Option<f64>,
    pub gamma_rad_per_s: f64,
    #[serde(rename = "bath_temperature_K")]
    pub bath_temperature_k: f64,
}

impl ModeDoc {
    pub fn resolve(&self, which: &str) -> Result<ModeSpec> {
        let omega = match (self.omega_rad_per_s, self.wavelength_m) {
            (Some(omega), None) => omega,
            (None, Some(lambda)) => {
                if lambda <= 0.0 || !lambda.is_finite() {
                    bail!("{which}: wavelength_m must be positive, got {lambda}");
                }
                angular_from_wavelength(lambda)
            }
            (Some(_), Some(_)) => {
                bail!("{which}: give either omega_rad_per_s or wavelength_m, not both")
            }
            (None, None) => bail!("{which}: one of omega_rad_per_s or wavelength_m is required"),
        };
        let spec = ModeSpec::new(omega, self.gamma_rad_per_s, self.bath_temperature_k);
        spec.validate().map_err(|e| anyhow!("{which}: {e}"))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpDoc {
    #[serde(rename = "power_W")]
    pub power_w: f64,
    /// Defaults to the optical mode's frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_rad_per_s: Option<f64>,
    #[serde(default)]
    pub detuning_rad_per_s: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionDoc {
    pub dt_s: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDoc {
    pub n_trajectories: usize,
    pub dt_s: f64,
    pub t_final_s: f64,
    #[serde(default)]
    pub burn_in_s: f64,
    #[serde(default)]
    pub scheme: cavity_eo::Scheme,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareDoc {
    pub rel_tol_closed_form_vs_lyapunov: f64,
    pub sigma_tol_oracle: f64,
}

impl Default for CompareDoc {
    fn default() -> Self {
        Self {
            rel_tol_closed_form_vs_lyapunov: 1e-9,
            sigma_tol_oracle: 3.0,
        }
    }
}

/// The complete run configuration a preset file deserializes into.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub description: String,
    pub scenario: Regime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<EomDeviceParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_rad_per_s: Option<f64>,
    pub optical_mode: ModeDoc,
    pub microwave_mode: ModeDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpDoc>,
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
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_rad_per_s: Option<f64>,
    #[serde(default)]
    pub include_microwave_bath: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_bath_occupation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub microwave_bath_occupation: Option<f64>,
    #[serde(default)]
    pub sideband_bath_occupation_minus: f64,
    #[serde(default)]
    pub sideband_bath_occupation_plus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareDoc>,
    /// Restrict the emitted observable columns to this subset (sweep and
    /// single-scenario commands); axis and time columns always stay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
}

/// A `RunConfig` with its derived quantities filled in.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub scenario: ScenarioConfig,
    /// The coupling rate actually used (explicit or device-derived).
    pub g_rad_per_s: f64,
    /// Pump photon number, when a pump block drove the amplitudes.
    pub pump_photons: Option<f64>,
}

impl RunConfig {
    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_value(value).context("config does not match the expected schema")?;
        Ok(cfg)
    }

    /// Coupling rate: explicit `g_rad_per_s` wins, then the device block.
    pub fn coupling_rate(&self) -> Result<f64> {
        if let Some(g) = self.g_rad_per_s {
            if g < 0.0 || !g.is_finite() {
                bail!("g_rad_per_s must be nonnegative, got {g}");
            }
            return Ok(g);
        }
        let device = self
            .device
            .as_ref()
            .ok_or_else(|| anyhow!("neither g_rad_per_s nor a device block is configured"))?;
        Ok(device.coupling_rate()?)
    }

    /// Pump config with the carrier defaulted to the optical mode.
    pub fn pump_config(&self) -> Result<Option<PumpConfig>> {
        let Some(p) = &self.pump else {
            return Ok(None);
        };
        let omega = match p.omega_rad_per_s {
            Some(w) => w,
            None => self.optical_mode.resolve("optical_mode")?.omega_rad_per_s,
        };
        Ok(Some(PumpConfig::new(
            p.power_w,
            omega,
            p.detuning_rad_per_s,
            p.phase_rad,
        )))
    }

    /// Build the concrete scenario: device to g, pump to photon number,
    /// documents to mode specs.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let optical = self.optical_mode.resolve("optical_mode")?;
        let microwave = self.microwave_mode.resolve("microwave_mode")?;
        let g = self.coupling_rate()?;

        let pump = self.pump_config()?;
        let mut pump_photons = None;
        let mut photons_for = |explicit: Option<f64>, name: &str| -> Result<Option<f64>> {
            if explicit.is_some() {
                return Ok(explicit);
            }
            match &pump {
                Some(p) => {
                    let n = pump_photon_number(p, optical.gamma_rad_per_s)?;
                    pump_photons = Some(n);
                    Ok(Some(n))
                }
                None => bail!("{name} is not set and no pump block is configured"),
            }
        };

        let (alpha_minus_sq, alpha_plus_sq, alpha0_sq) = match self.scenario {
            Regime::Cooling => (
                photons_for(self.alpha_minus_sq, "alpha_minus_sq")?,
                None,
                None,
            ),
            Regime::ParametricAmp => (
                None,
                photons_for(self.alpha_plus_sq, "alpha_plus_sq")?,
                None,
            ),
            Regime::ParasiticThreeMode => (None, None, photons_for(self.alpha0_sq, "alpha0_sq")?),
            Regime::BackActionEvading => {
                let plus = photons_for(self.alpha_plus_sq, "alpha_plus_sq")?;
                let minus = match self.alpha_minus_sq {
                    Some(v) => Some(v),
                    None => plus,
                };
                (minus, plus, None)
            }
        };

        let scenario = ScenarioConfig {
            regime: self.scenario,
            g_rad_per_s: g,
            optical,
            microwave,
            alpha_minus_sq,
            alpha_plus_sq,
            alpha0_sq,
            theta_plus_rad: self.theta_plus_rad,
            theta_minus_rad: self.theta_minus_rad,
            delta_rad_per_s: self.delta_rad_per_s,
            include_microwave_bath: self.include_microwave_bath,
            optical_bath_occupation: self.optical_bath_occupation,
            microwave_bath_occupation: self.microwave_bath_occupation,
            sideband_bath_occupation_minus: self.sideband_bath_occupation_minus,
            sideband_bath_occupation_plus: self.sideband_bath_occupation_plus,
        };

        Ok(ResolvedScenario {
            scenario,
            g_rad_per_s: g,
            pump_photons,
        })
    }
}

/// Apply one `--set path=value` override to the raw config document.
/// Paths are dot-separated (`pump.power_W=1e-3`); values parse as JSON
/// scalars first, then fall back to strings. Unknown paths are rejected by
/// the typed parse afterwards.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| anyhow!("--set expects <path>=<value>, got `{assignment}`"))?;
    if path.is_empty() {
        bail!("--set path is empty in `{assignment}`");
    }
    // JSON-parse the value so integers stay integers and floats stay
    // floats; anything that is not a JSON scalar becomes a string.
    let value: Value = match serde_json::from_str::<Value>(raw) {
        Ok(v @ (Value::Number(_) | Value::Bool(_) | Value::Null)) => v,
        _ => Value::String(raw.to_owned()),
    };
    let mut node = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, key) in parts.iter().enumerate() {
        let map = node.as_object_mut().ok_or_else(|| {
            anyhow!(
                "--set path `{path}`: `{}` is not an object",
                parts[..i].join(".")
            )
        })?;
        if i + 1 == parts.len() {
            map.insert((*key).to_owned(), value);
            return Ok(());
        }
        node = map
            .entry((*key).to_owned())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("loop returns on the last path segment")
}
