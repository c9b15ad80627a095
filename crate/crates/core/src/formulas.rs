//! Closed-form steady-state figures.
//!
//! These are the analytic expressions the numerical solver is validated
//! against, and the cheap path for wide design sweeps. The two-mode cooling
//! formula is exact for the linearized beam-splitter system; the three-mode
//! parasitic formula holds for gamma_b << gamma_a and 2 g |alpha_0| <<
//! gamma_a and carries validity flags instead of hard errors outside that
//! regime.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{pump_photon_number, PumpConfig};

fn check_rate(name: &'static str, value: f64) -> Result<()> {
    if value <= 0.0 || !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be strictly positive",
        });
    }
    Ok(())
}

fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    if value < 0.0 || !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be nonnegative",
        });
    }
    Ok(())
}

/// Sideband-cooling figures of merit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingFigures {
    /// Bare cooperativity G_0 = 4 g^2 |alpha_-|^2 / (gamma_a gamma_b).
    pub cooperativity: f64,
    /// Saturating cooling gain G = G_0 / (1 + (gamma_b/gamma_a)(1 + G_0)).
    pub gain: f64,
    /// Steady microwave occupation (N_b + G N_a) / (1 + G).
    pub n_ss: f64,
}

/// Exact steady-state figures of the two-mode beam-splitter system.
pub fn cooling_figures(
    g: f64,
    alpha_minus_sq: f64,
    gamma_a: f64,
    gamma_b: f64,
    n_a: f64,
    n_b: f64,
) -> Result<CoolingFigures> {
    check_nonneg("g", g)?;
    check_nonneg("alpha_minus_sq", alpha_minus_sq)?;
    check_rate("gamma_a", gamma_a)?;
    check_rate("gamma_b", gamma_b)?;
    check_nonneg("n_a", n_a)?;
    check_nonneg("n_b", n_b)?;
    let cooperativity = 4.0 * g * g * alpha_minus_sq / (gamma_a * gamma_b);
    let gain = cooperativity / (1.0 + (gamma_b / gamma_a) * (1.0 + cooperativity));
    let n_ss = (n_b + gain * n_a) / (1.0 + gain);
    Ok(CoolingFigures {
        cooperativity,
        gain,
        n_ss,
    })
}

/// Saturation limit of the cooling gain at infinite pump power:
/// lim G = gamma_a / gamma_b.
pub fn cooling_limit(gamma_a: f64, gamma_b: f64) -> Result<f64> {
    check_rate("gamma_a", gamma_a)?;
    check_rate("gamma_b", gamma_b)?;
    Ok(gamma_a / gamma_b)
}

/// Whether the parasitic approximation's assumptions hold (ratios <= 0.1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParasiticValidity {
    /// gamma_b / gamma_a.
    pub gamma_ratio: f64,
    /// 2 g |alpha_0| / gamma_a.
    pub coupling_ratio: f64,
    pub within_regime: bool,
}

/// Figures of merit for cooling through a detuned center mode with a
/// parasitic blue sideband.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParasiticFigures {
    /// Gamma_0 = 4 g^2 |alpha_0|^2 / (gamma_a gamma_b).
    pub cooperativity: f64,
    /// Gamma = Gamma_0 / (1 + mu).
    pub gain: f64,
    /// Back-action floor mu = gamma_a^2 / (16 delta^2).
    pub mu: f64,
    /// Steady microwave occupation (N_b + Gamma mu) / (1 + Gamma).
    pub n_ss: f64,
    pub validity: ParasiticValidity,
}

/// Approximate steady-state occupation for the three-mode parasitic system.
pub fn parasitic_figures(
    g: f64,
    alpha0_sq: f64,
    gamma_a: f64,
    gamma_b: f64,
    delta: f64,
    n_b: f64,
) -> Result<ParasiticFigures> {
    check_nonneg("g", g)?;
    check_nonneg("alpha0_sq", alpha0_sq)?;
    check_rate("gamma_a", gamma_a)?;
    check_rate("gamma_b", gamma_b)?;
    check_nonneg("n_b", n_b)?;
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    if !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must be finite",
        });
    }
    let cooperativity = 4.0 * g * g * alpha0_sq / (gamma_a * gamma_b);
    let mu = gamma_a * gamma_a / (16.0 * delta * delta);
    let gain = cooperativity / (1.0 + mu);
    let n_ss = (n_b + gain * mu) / (1.0 + gain);
    let gamma_ratio = gamma_b / gamma_a;
    let coupling_ratio = 2.0 * g * alpha0_sq.sqrt() / gamma_a;
    Ok(ParasiticFigures {
        cooperativity,
        gain,
        mu,
        n_ss,
        validity: ParasiticValidity {
            gamma_ratio,
            coupling_ratio,
            within_regime: gamma_ratio <= 0.1 && coupling_ratio <= 0.1,
        },
    })
}

/// Result of minimizing the parasitic occupation over the pump detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetuningOptimum {
    pub delta_rad_per_s: f64,
    pub mu: f64,
    pub n_ss: f64,
    /// The minimum sat on an edge of the search bracket
    /// [gamma_a/100, 100 gamma_a] rather than strictly inside it.
    pub at_bracket_edge: bool,
}

/// Minimize the parasitic steady occupation over the detuning delta > 0,
/// with the pump photon number |alpha_0(delta)|^2 folded in through the
/// Lorentzian pump response.
///
/// Golden-section search on ln(delta) over [gamma_a/100, 100 gamma_a] after
/// a coarse bracketing scan; relative tolerance 1e-6. In the classical
/// regime N_b >> Gamma mu the optimum sits at mu = 1/2.
pub fn optimal_parasitic_detuning(
    pump: &PumpConfig,
    g: f64,
    gamma_a: f64,
    gamma_b: f64,
    n_b: f64,
) -> Result<DetuningOptimum> {
    check_nonneg("g", g)?;
    check_rate("gamma_a", gamma_a)?;
    check_rate("gamma_b", gamma_b)?;
    check_nonneg("n_b", n_b)?;
    pump.validate()?;

    let objective = |ln_delta: f64| -> Result<f64> {
        let delta = ln_delta.exp();
        let mut p = *pump;
        p.detuning_rad_per_s = delta;
        let alpha0_sq = pump_photon_number(&p, gamma_a)?;
        Ok(parasitic_figures(g, alpha0_sq, gamma_a, gamma_b, delta, n_b)?.n_ss)
    };

    let lo = (gamma_a / 100.0).ln();
    let hi = (100.0 * gamma_a).ln();

    // Coarse scan to bracket the minimum.
    let coarse = 64usize;
    let mut best_k = 0usize;
    let mut best_val = f64::INFINITY;
    for k in 0..=coarse {
        let x = lo + (hi - lo) * k as f64 / coarse as f64;
        let f = objective(x)?;
        if !f.is_finite() {
            return Err(Error::MinimizerFailed {
                reason: format!("objective not finite at delta = {}", x.exp()),
            });
        }
        if f < best_val {
            best_val = f;
            best_k = k;
        }
    }
    let step = (hi - lo) / coarse as f64;
    let mut a = lo + step * (best_k.saturating_sub(1)) as f64;
    let mut b = (lo + step * (best_k + 1) as f64).min(hi);
    let at_edge = best_k == 0 || best_k == coarse;

    // Golden-section within the bracket.
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-6 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let ln_opt = 0.5 * (a + b);
    let mut delta_opt = ln_opt.exp();
    let mut n_min = objective(ln_opt)?;
    // Keep edge optima exactly on the edge.
    if at_edge {
        let (edge, f_edge) = if best_k == 0 {
            (lo, objective(lo)?)
        } else {
            (hi, objective(hi)?)
        };
        if f_edge <= n_min {
            delta_opt = edge.exp();
            n_min = f_edge;
        }
    }
    let mu = gamma_a * gamma_a / (16.0 * delta_opt * delta_opt);
    Ok(DetuningOptimum {
        delta_rad_per_s: delta_opt,
        mu,
        n_ss: n_min,
        at_bracket_edge: at_edge,
    })
}

/// Oscillation-threshold cooperativity C_+ = 4 g^2 |alpha_+|^2 /
/// (gamma_a gamma_b); C_+ >= 1 means the parametric system is above
/// threshold (drift not Hurwitz).
pub fn pa_threshold(g: f64, alpha_plus_sq: f64, gamma_a: f64, gamma_b: f64) -> Result<f64> {
    check_nonneg("g", g)?;
    check_nonneg("alpha_plus_sq", alpha_plus_sq)?;
    check_rate("gamma_a", gamma_a)?;
    check_rate("gamma_b", gamma_b)?;
    Ok(4.0 * g * g * alpha_plus_sq / (gamma_a * gamma_b))
}
