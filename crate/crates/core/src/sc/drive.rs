//! Drive configurations and their effective displacements.

use serde::{Deserialize, Serialize};

use super::Displacement;
use crate::circuit::{CircuitModel, ModeFrame};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitiveDrive {
    /// drive amplitude Omega_d, rad/ns
    pub omega_amp: f64,
    pub omega_d: f64,
    pub theta: f64,
}

impl CapacitiveDrive {
    /// Linear-response displacement Omega_d omega_d / (omega_d^2 - omega0^2).
    pub fn displacement(&self, omega0: f64) -> Result<f64> {
        check_detuning(self.omega_d, omega0)?;
        Ok(self.omega_amp * self.omega_d / (self.omega_d * self.omega_d - omega0 * omega0))
    }

    pub fn phase(&self) -> f64 {
        self.theta - std::f64::consts::FRAC_PI_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxDrive {
    /// modulation amplitude of the external flux, radians
    pub phi_ac0: f64,
    pub omega_d: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveConfig {
    Capacitive(CapacitiveDrive),
    Flux(FluxDrive),
    Multi { capacitive: Vec<CapacitiveDrive>, flux: Option<FluxDrive> },
}

impl DriveConfig {
    pub fn displacement(&self, model: &CircuitModel, frame: &ModeFrame) -> Result<Displacement> {
        match self {
            DriveConfig::Capacitive(c) => Ok(Displacement::capacitive(c.displacement(frame.omega0)?)),
            DriveConfig::Flux(f) => {
                Ok(Displacement::flux(flux_drive_amplitudes(model, frame, f.phi_ac0, f.omega_d)?))
            }
            DriveConfig::Multi { capacitive, flux } => {
                let cap = capacitive.iter().map(|c| c.displacement(frame.omega0)).collect::<Result<Vec<_>>>()?;
                let flux = match flux {
                    Some(f) => Some(flux_drive_amplitudes(model, frame, f.phi_ac0, f.omega_d)?),
                    None => None,
                };
                Ok(Displacement { capacitive: cap, flux })
            }
        }
    }
}

fn check_detuning(omega_d: f64, omega0: f64) -> Result<()> {
    if (omega_d - omega0).abs() <= 1e-9 * omega0.abs() || !omega_d.is_finite() {
        return Err(Error::OnResonance { omega_d, omega0 });
    }
    Ok(())
}

/// Linear-response corrections eps_i = E_J c2^(i) phi_zpf^2 omega0 / (2 (omega_d^2 - omega0^2)),
/// one per cosine term.
pub fn flux_correction_factors(model: &CircuitModel, frame: &ModeFrame, omega_d: f64) -> Result<Vec<f64>> {
    check_detuning(omega_d, frame.omega0)?;
    let terms = model
        .cosine_terms()
        .ok_or_else(|| Error::UnsupportedModel("flux drive requires a cosine-family potential".into()))?;
    let w0 = frame.omega0;
    let scale = frame.phi_zpf * frame.phi_zpf * w0 / (2.0 * (omega_d * omega_d - w0 * w0));
    Ok(terms.iter().map(|t| t.derivative(2, frame.phi0) * scale).collect())
}

/// Per-term displacements Pi_i = 2 phi_ac0 (d_i - sum_j d_j eps_j), d_i = flux_coeff_i / freq_i.
pub fn flux_drive_amplitudes(model: &CircuitModel, frame: &ModeFrame, phi_ac0: f64, omega_d: f64) -> Result<Vec<f64>> {
    let eps = flux_correction_factors(model, frame, omega_d)?;
    let d = bare_ratios(model)?;
    let shift: f64 = d.iter().zip(&eps).map(|(a, b)| a * b).sum();
    Ok(d.iter().map(|di| 2.0 * phi_ac0 * (di - shift)).collect())
}

/// Displacements without the linear-response correction, Pi_i = 2 phi_ac0 d_i.
pub fn flux_drive_amplitudes_bare(model: &CircuitModel, phi_ac0: f64) -> Result<Vec<f64>> {
    Ok(bare_ratios(model)?.iter().map(|d| 2.0 * phi_ac0 * d).collect())
}

fn bare_ratios(model: &CircuitModel) -> Result<Vec<f64>> {
    let terms = model
        .cosine_terms()
        .ok_or_else(|| Error::UnsupportedModel("flux drive requires a cosine-family potential".into()))?;
    Ok(terms.iter().map(|t| if t.freq == 0.0 { 0.0 } else { t.flux_coeff / t.freq }).collect())
}
