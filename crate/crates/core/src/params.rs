//! Device and environment parameters, and the scalar rates derived from them.
//!
//! This is the bridge from lab quantities (geometry, capacitance, pump power,
//! bath temperature) to the model-level rates that drive the dynamics: the
//! single-photon coupling rate, thermal occupations, and intracavity pump
//! photon numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{C_LIGHT, HBAR, K_B};

/// Electro-optic modulator / resonator parameters.
///
/// JSON keys carry explicit unit suffixes (`"d_m"`, `"C_F"`,
/// `"omega_b_rad_per_s"`, ...) so a config file can never be misread in the
/// wrong unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EomDeviceParams {
    /// Optical refractive index of the electro-optic medium.
    pub n: f64,
    /// Electro-optic coefficient (m/V). May be zero (no electro-optic effect).
    #[serde(rename = "r_m_per_V")]
    pub r_m_per_volt: f64,
    /// Length of the medium along the optical axis (m).
    pub l_m: f64,
    /// Thickness of the medium across which the voltage is applied (m).
    pub d_m: f64,
    /// Optical round-trip time (s).
    pub tau_s: f64,
    /// Capacitance of the microwave resonator (F).
    #[serde(rename = "C_F")]
    pub capacitance_f: f64,
    /// Optical resonance, angular (rad/s).
    pub omega_a_rad_per_s: f64,
    /// Microwave resonance, angular (rad/s).
    pub omega_b_rad_per_s: f64,
    /// Optional mode-overlap correction in (0, 1], multiplying the coupling
    /// rate. Defaults to 1 (perfect overlap).
    #[serde(default = "default_overlap")]
    pub overlap_factor: f64,
}

fn default_overlap() -> f64 {
    1.0
}

impl EomDeviceParams {
    pub fn validate(&self) -> Result<()> {
        let strict = [
            ("n", self.n),
            ("l_m", self.l_m),
            ("d_m", self.d_m),
            ("tau_s", self.tau_s),
            ("C_F", self.capacitance_f),
            ("omega_a_rad_per_s", self.omega_a_rad_per_s),
            ("omega_b_rad_per_s", self.omega_b_rad_per_s),
        ];
        for (name, value) in strict {
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be strictly positive",
                });
            }
        }
        if self.r_m_per_volt < 0.0 || !self.r_m_per_volt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r_m_per_V",
                value: self.r_m_per_volt,
                reason: "must be nonnegative",
            });
        }
        if self.l_m > C_LIGHT * self.tau_s {
            return Err(Error::InvalidParameter {
                name: "l_m",
                value: self.l_m,
                reason: "medium longer than the optical round trip (l > c*tau)",
            });
        }
        if self.omega_b_rad_per_s >= 0.1 * self.omega_a_rad_per_s {
            return Err(Error::InvalidParameter {
                name: "omega_b_rad_per_s",
                value: self.omega_b_rad_per_s,
                reason: "microwave frequency must be far below the optical one",
            });
        }
        if !(self.overlap_factor > 0.0 && self.overlap_factor <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "overlap_factor",
                value: self.overlap_factor,
                reason: "must lie in (0, 1]",
            });
        }
        Ok(())
    }

    /// Round-trip phase shift per volt (rad/V): omega_a n^3 r l / (c d).
    pub fn phase_per_volt(&self) -> Result<f64> {
        self.validate()?;
        Ok(
            self.omega_a_rad_per_s * self.n.powi(3) * self.r_m_per_volt * self.l_m
                / (C_LIGHT * self.d_m),
        )
    }

    /// Single-photon electro-optic coupling rate g (rad/s).
    ///
    /// g = phase_per_volt * voltage_zero_point / tau, scaled by the mode
    /// overlap factor.
    pub fn coupling_rate(&self) -> Result<f64> {
        let phi_per_volt = self.phase_per_volt()?;
        let v_zp = voltage_zero_point(self.omega_b_rad_per_s, self.capacitance_f)?;
        Ok(self.overlap_factor * phi_per_volt * v_zp / self.tau_s)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let dev: Self = serde_json::from_str(text)?;
        dev.validate()?;
        Ok(dev)
    }
}

/// Zero-point voltage scale sqrt(hbar omega_b / 2C) of a capacitively
/// modelled microwave resonator (V).
pub fn voltage_zero_point(omega_b_rad_per_s: f64, capacitance_f: f64) -> Result<f64> {
    if omega_b_rad_per_s <= 0.0 || !omega_b_rad_per_s.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega_b_rad_per_s",
            value: omega_b_rad_per_s,
            reason: "must be strictly positive",
        });
    }
    if capacitance_f <= 0.0 || !capacitance_f.is_finite() {
        return Err(Error::InvalidParameter {
            name: "C_F",
            value: capacitance_f,
            reason: "must be strictly positive",
        });
    }
    Ok((HBAR * omega_b_rad_per_s / (2.0 * capacitance_f)).sqrt())
}

/// Bose-Einstein occupation 1 / (exp(hbar omega / k_B T) - 1).
///
/// T = 0 (or any nonpositive temperature) returns exactly 0 rather than
/// evaluating the divergent exponential.
pub fn thermal_occupation(omega_rad_per_s: f64, temperature_k: f64) -> f64 {
    debug_assert!(omega_rad_per_s > 0.0);
    if temperature_k <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega_rad_per_s / (K_B * temperature_k);
    // exp_m1 keeps full precision in the classical regime x << 1.
    1.0 / x.exp_m1()
}

/// One optical or microwave pump tone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    /// Optical power (W).
    #[serde(rename = "power_W")]
    pub power_w: f64,
    /// Carrier angular frequency (rad/s).
    pub omega_rad_per_s: f64,
    /// Pump frequency minus the nearest cavity resonance (rad/s).
    #[serde(default)]
    pub detuning_rad_per_s: f64,
    /// Pump phase (rad); wrapped to (-pi, pi] on construction.
    #[serde(default)]
    pub phase_rad: f64,
}

impl PumpConfig {
    pub fn new(
        power_w: f64,
        omega_rad_per_s: f64,
        detuning_rad_per_s: f64,
        phase_rad: f64,
    ) -> Self {
        Self {
            power_w,
            omega_rad_per_s,
            detuning_rad_per_s,
            phase_rad: wrap_phase(phase_rad),
        }
    }

    /// Same as [`PumpConfig::new`] with the carrier given as a vacuum
    /// wavelength in meters.
    pub fn with_wavelength(
        power_w: f64,
        lambda_m: f64,
        detuning_rad_per_s: f64,
        phase_rad: f64,
    ) -> Self {
        Self::new(
            power_w,
            crate::units::angular_from_wavelength(lambda_m),
            detuning_rad_per_s,
            phase_rad,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.power_w < 0.0 || !self.power_w.is_finite() {
            return Err(Error::InvalidParameter {
                name: "power_W",
                value: self.power_w,
                reason: "must be nonnegative",
            });
        }
        if self.omega_rad_per_s <= 0.0 || !self.omega_rad_per_s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega_rad_per_s",
                value: self.omega_rad_per_s,
                reason: "must be strictly positive",
            });
        }
        if !self.detuning_rad_per_s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "detuning_rad_per_s",
                value: self.detuning_rad_per_s,
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// Phase wrapped to (-pi, pi], regardless of what was deserialized.
    pub fn wrapped_phase(&self) -> f64 {
        wrap_phase(self.phase_rad)
    }
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_phase(phase_rad: f64) -> f64 {
    use std::f64::consts::PI;
    let mut p = phase_rad.rem_euclid(crate::units::TWO_PI);
    if p > PI {
        p -= crate::units::TWO_PI;
    }
    p
}

/// Intracavity photon number |alpha|^2 = gamma_a P / (hbar omega (delta^2 + gamma_a^2/4))
/// of a continuous-wave pump driving a Lorentzian resonance.
///
/// Assumes undepleted pumping of a single resonance.
pub fn pump_photon_number(pump: &PumpConfig, gamma_a_rad_per_s: f64) -> Result<f64> {
    pump.validate()?;
    if gamma_a_rad_per_s <= 0.0 || !gamma_a_rad_per_s.is_finite() {
        return Err(Error::InvalidParameter {
            name: "gamma_a_rad_per_s",
            value: gamma_a_rad_per_s,
            reason: "must be strictly positive",
        });
    }
    let delta = pump.detuning_rad_per_s;
    let lorentzian = delta * delta + gamma_a_rad_per_s * gamma_a_rad_per_s / 4.0;
    Ok(gamma_a_rad_per_s * pump.power_w / (HBAR * pump.omega_rad_per_s * lorentzian))
}

/// One bosonic cavity/resonator mode coupled to a thermal bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub omega_rad_per_s: f64,
    /// Energy decay rate (linewidth), rad/s.
    pub gamma_rad_per_s: f64,
    #[serde(rename = "bath_temperature_K")]
    pub bath_temperature_k: f64,
}

impl ModeSpec {
    pub fn new(omega_rad_per_s: f64, gamma_rad_per_s: f64, bath_temperature_k: f64) -> Self {
        Self {
            omega_rad_per_s,
            gamma_rad_per_s,
            bath_temperature_k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega_rad_per_s <= 0.0 || !self.omega_rad_per_s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega_rad_per_s",
                value: self.omega_rad_per_s,
                reason: "must be strictly positive",
            });
        }
        if self.gamma_rad_per_s < 0.0 || !self.gamma_rad_per_s.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma_rad_per_s",
                value: self.gamma_rad_per_s,
                reason: "must be nonnegative",
            });
        }
        if self.bath_temperature_k < 0.0 || !self.bath_temperature_k.is_finite() {
            return Err(Error::InvalidParameter {
                name: "bath_temperature_K",
                value: self.bath_temperature_k,
                reason: "must be nonnegative",
            });
        }
        Ok(())
    }

    /// Thermal occupation of this mode's bath at its own frequency.
    pub fn bath_occupation(&self) -> f64 {
        thermal_occupation(self.omega_rad_per_s, self.bath_temperature_k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{angular_from_hz, angular_from_wavelength, TWO_PI};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// The improved-device parameter set: n^3 r = 300 pm/V, d = 10 um,
    /// l/(c tau) = 0.5, C = 1 pF, lambda_0 = 1550 nm, omega_b = 2pi x 9 GHz.
    fn improved_device() -> EomDeviceParams {
        let n: f64 = 2.2;
        EomDeviceParams {
            n,
            r_m_per_volt: 300e-12 / n.powi(3),
            l_m: 0.5 * C_LIGHT * 1e-10,
            d_m: 10e-6,
            tau_s: 1e-10,
            capacitance_f: 1e-12,
            omega_a_rad_per_s: angular_from_wavelength(1550e-9),
            omega_b_rad_per_s: angular_from_hz(9e9),
            overlap_factor: 1.0,
        }
    }

    #[test]
    fn coupling_rate_reaches_5khz() {
        let g = improved_device().coupling_rate().unwrap();
        let target = angular_from_hz(5e3);
        assert!(
            (g / target - 1.0).abs() < 0.05,
            "g = 2pi x {} Hz, expected 2pi x 5 kHz within 5%",
            g / TWO_PI
        );
    }

    #[test]
    fn coupling_rate_zero_without_electro_optic_effect() {
        let mut dev = improved_device();
        dev.r_m_per_volt = 0.0;
        assert_eq!(dev.coupling_rate().unwrap(), 0.0);
    }

    #[test]
    fn coupling_rate_square_root_law_in_capacitance() {
        let dev = improved_device();
        let mut doubled = dev;
        doubled.capacitance_f *= 2.0;
        let ratio = doubled.coupling_rate().unwrap() / dev.coupling_rate().unwrap();
        assert_relative_eq!(ratio, 0.5f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn coupling_rate_consistency_identity() {
        // g must equal phase_per_volt * voltage_zero_point / tau exactly,
        // since that is how it is computed.
        let dev = improved_device();
        let g = dev.coupling_rate().unwrap();
        let by_parts = dev.phase_per_volt().unwrap()
            * voltage_zero_point(dev.omega_b_rad_per_s, dev.capacitance_f).unwrap()
            / dev.tau_s;
        assert_eq!(g, by_parts);
    }

    #[test]
    fn phase_per_volt_halves_with_doubled_thickness() {
        let dev = improved_device();
        let mut thick = dev;
        thick.d_m *= 2.0;
        assert_relative_eq!(
            thick.phase_per_volt().unwrap(),
            dev.phase_per_volt().unwrap() / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_nonpositive_fields() {
        let mut dev = improved_device();
        dev.d_m = 0.0;
        assert!(matches!(
            dev.coupling_rate(),
            Err(Error::InvalidParameter { name: "d_m", .. })
        ));
        let mut dev = improved_device();
        dev.r_m_per_volt = -1e-12;
        assert!(dev.coupling_rate().is_err());
    }

    #[test]
    fn rejects_medium_longer_than_round_trip() {
        let mut dev = improved_device();
        dev.l_m = 2.0 * C_LIGHT * dev.tau_s;
        assert!(matches!(
            dev.validate(),
            Err(Error::InvalidParameter { name: "l_m", .. })
        ));
    }

    #[test]
    fn voltage_zero_point_microvolt_scale() {
        // sqrt(hbar * 2pi*9GHz / 2pF) = 1.7268 uV
        let v = voltage_zero_point(angular_from_hz(9e9), 1e-12).unwrap();
        assert!((v / 1.73e-6 - 1.0).abs() < 0.02, "v = {v}");
        assert_relative_eq!(v, 1.726_768e-6, max_relative = 1e-4);
    }

    #[test]
    fn voltage_zero_point_limits() {
        // C -> infinity and omega_b -> 0 both drive the scale to zero.
        assert!(voltage_zero_point(angular_from_hz(9e9), 1e6).unwrap() < 1e-12);
        assert!(voltage_zero_point(1e-12, 1e-12).unwrap() < 1e-9);
        assert!(voltage_zero_point(0.0, 1e-12).is_err());
        assert!(voltage_zero_point(1.0, 0.0).is_err());
    }

    #[test]
    fn thermal_occupation_zero_temperature() {
        assert_eq!(thermal_occupation(angular_from_hz(9e9), 0.0), 0.0);
    }

    #[test]
    fn thermal_occupation_microwave_room_temperature() {
        // 1/(exp(hbar omega / k_B T) - 1) at 2pi x 9 GHz, 300 K.
        let n = thermal_occupation(angular_from_hz(9e9), 300.0);
        assert!((n / 694.0 - 1.0).abs() < 0.01, "n = {n}");
    }

    #[test]
    fn thermal_occupation_optical_negligible() {
        let n = thermal_occupation(angular_from_wavelength(1550e-9), 300.0);
        assert!(n < 1e-13, "n = {n}");
    }

    #[test]
    fn pump_photon_number_feasibility() {
        // P = 2 mW, lambda_0 = 1550 nm, gamma_a = 2pi x 40 MHz, and the
        // detuning chosen so that gamma_a^2/(16 delta^2) = 0.5.
        let gamma_a = angular_from_hz(40e6);
        let delta = gamma_a / 8.0f64.sqrt();
        let pump = PumpConfig::with_wavelength(2e-3, 1550e-9, delta, 0.0);
        let n = pump_photon_number(&pump, gamma_a).unwrap();
        assert!((n / 1.7e8 - 1.0).abs() < 0.05, "n = {n:e}");
        assert_relative_eq!(n, 1.655_78e8, max_relative = 1e-4);
    }

    #[test]
    fn pump_photon_number_zero_power() {
        let pump = PumpConfig::with_wavelength(0.0, 1550e-9, 0.0, 0.0);
        assert_eq!(pump_photon_number(&pump, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn pump_photon_number_lorentzian_factor() {
        let gamma_a = angular_from_hz(40e6);
        let on_res = PumpConfig::with_wavelength(1e-3, 1550e-9, 0.0, 0.0);
        let half_line = PumpConfig::with_wavelength(1e-3, 1550e-9, gamma_a / 2.0, 0.0);
        let ratio = pump_photon_number(&on_res, gamma_a).unwrap()
            / pump_photon_number(&half_line, gamma_a).unwrap();
        assert_relative_eq!(ratio, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn device_json_round_trip() {
        let dev = improved_device();
        let text = serde_json::to_string_pretty(&dev).unwrap();
        assert!(text.contains("\"C_F\""));
        assert!(text.contains("\"r_m_per_V\""));
        assert!(text.contains("\"omega_b_rad_per_s\""));
        let back = EomDeviceParams::from_json_str(&text).unwrap();
        assert_eq!(dev, back);
    }

    #[test]
    fn phase_wrapping() {
        use std::f64::consts::PI;
        assert_relative_eq!(wrap_phase(3.0 * PI), PI, max_relative = 1e-12);
        assert_relative_eq!(wrap_phase(-0.5), -0.5, max_relative = 1e-12);
        assert_eq!(wrap_phase(PI), PI);
    }

    proptest! {
        /// g scales linearly in r, l, omega_a and as 1/d, 1/tau, 1/sqrt(C).
        #[test]
        fn coupling_rate_scaling_laws(k in 1e-2f64..1e2) {
            let dev = improved_device();
            let g = dev.coupling_rate().unwrap();

            let mut scaled = dev;
            scaled.r_m_per_volt *= k;
            prop_assert!((scaled.coupling_rate().unwrap() / (k * g) - 1.0).abs() < 1e-12);

            // Shrink l only (growing it can violate l <= c tau).
            let kl = k.min(1.0);
            let mut scaled = dev;
            scaled.l_m *= kl;
            prop_assert!((scaled.coupling_rate().unwrap() / (kl * g) - 1.0).abs() < 1e-12);

            let mut scaled = dev;
            scaled.d_m *= k;
            prop_assert!((scaled.coupling_rate().unwrap() * k / g - 1.0).abs() < 1e-12);

            // tau enters as 1/tau at fixed l (grow only, to keep l <= c tau).
            let kt = k.max(1.0);
            let mut scaled = dev;
            scaled.tau_s *= kt;
            prop_assert!((scaled.coupling_rate().unwrap() * kt / g - 1.0).abs() < 1e-12);

            let mut scaled = dev;
            scaled.capacitance_f *= k;
            prop_assert!((scaled.coupling_rate().unwrap() * k.sqrt() / g - 1.0).abs() < 1e-12);

            // omega_a enters linearly (omega_b stays well below omega_a for k >= 1e-2).
            let ka = k.max(1.0);
            let mut scaled = dev;
            scaled.omega_a_rad_per_s *= ka;
            prop_assert!((scaled.coupling_rate().unwrap() / (ka * g) - 1.0).abs() < 1e-12);
        }

        /// Planck-form scale invariance: N(omega, T) = N(2 omega, 2 T) exactly.
        #[test]
        fn thermal_occupation_scale_invariance(
            omega in 1e3f64..1e15,
            t in 1e-3f64..1e4,
        ) {
            prop_assert_eq!(
                thermal_occupation(omega, t),
                thermal_occupation(2.0 * omega, 2.0 * t)
            );
        }

        /// N is monotone increasing in T and decreasing in omega (where the
        /// occupation has not underflowed to zero).
        #[test]
        fn thermal_occupation_monotone(
            omega in 1e6f64..1e15,
            t in 1e-2f64..1e4,
        ) {
            let n = thermal_occupation(omega, t);
            prop_assume!(thermal_occupation(1.5 * omega, t) > 0.0);
            prop_assert!(thermal_occupation(omega, 1.5 * t) > n);
            prop_assert!(thermal_occupation(1.5 * omega, t) < n);
        }

        /// Photon number is even in the detuning.
        #[test]
        fn pump_photon_number_even_in_detuning(delta in -1e9f64..1e9) {
            let gamma_a = angular_from_hz(40e6);
            let plus = PumpConfig::with_wavelength(1e-3, 1550e-9, delta, 0.0);
            let minus = PumpConfig::with_wavelength(1e-3, 1550e-9, -delta, 0.0);
            prop_assert_eq!(
                pump_photon_number(&plus, gamma_a).unwrap(),
                pump_photon_number(&minus, gamma_a).unwrap()
            );
        }
    }
}
