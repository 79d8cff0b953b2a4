//! Physical constants and unit conversions.
//!
//! Internal energies are angular frequencies in rad/ns (hbar = 1). Inputs
//! and outputs use ordinary frequency in GHz.

use std::f64::consts::TAU;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// GHz (ordinary frequency) to rad/ns.
pub fn ghz(f: f64) -> f64 {
    f * TAU
}

pub fn mhz(f: f64) -> f64 {
    f * 1e-3 * TAU
}

pub fn to_ghz(w: f64) -> f64 {
    w / TAU
}

pub fn to_mhz(w: f64) -> f64 {
    w / TAU * 1e3
}

pub fn to_hz(w: f64) -> f64 {
    w / TAU * 1e9
}

/// Josephson energy E_J/h in GHz for a junction inductance in nH.
pub fn josephson_energy_ghz(l_j_nh: f64) -> f64 {
    let phi = FLUX_QUANTUM / TAU;
    phi * phi / (PLANCK * l_j_nh * 1e-9) * 1e-9
}

/// Charging energy E_C/h in GHz for a capacitance in pF.
pub fn charging_energy_ghz(c_pf: f64) -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * PLANCK * c_pf * 1e-12) * 1e-9
}

/// External flux given as a fraction of the flux quantum, in radians.
pub fn flux_phase(fraction: f64) -> f64 {
    fraction * TAU
}
