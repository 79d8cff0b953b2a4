//! Reference circuits: four Kerr-cat designs (A to D) and a SNAIL-coupled
//! beam-splitter.

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitModel, SnailArray, SnailArrayStrayL};
use crate::effective::BeamSplitterSetup;
use crate::units::{charging_energy_ghz, flux_phase, ghz, josephson_energy_ghz, mhz};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KerrCatPreset {
    pub name: String,
    pub model: CircuitModel,
    /// rad/ns
    pub e_c: f64,
    /// largest recommended effective drive
    pub pi_tilde_max: f64,
    /// reference omega0 / 2pi, GHz
    pub omega0_ghz: f64,
    /// reference K / 2pi at zero drive, MHz
    pub kerr_mhz: f64,
}

fn preset(
    name: &str,
    m: u32,
    l_j_nh: f64,
    x_j: f64,
    c_pf: f64,
    alpha: f64,
    phi_e: f64,
    pi_tilde_max: f64,
    reference: (f64, f64),
) -> KerrCatPreset {
    KerrCatPreset {
        name: name.into(),
        model: CircuitModel::SnailArrayStrayL(SnailArrayStrayL {
            snail: SnailArray { m, n: 3, alpha, e_j: ghz(josephson_energy_ghz(l_j_nh)), phi_e: flux_phase(phi_e) },
            x_j,
        }),
        e_c: ghz(charging_energy_ghz(c_pf)),
        pi_tilde_max,
        omega0_ghz: reference.0,
        kerr_mhz: reference.1,
    }
}

pub fn config_a() -> KerrCatPreset {
    preset("A", 1, 0.8, 100.0, 0.32, 0.11, 0.32, 1.5, (5.6, 6.76))
}

pub fn config_b() -> KerrCatPreset {
    preset("B", 2, 0.6, 1.0, 0.16, 0.11, 0.46, 3.0, (5.2, -2.58))
}

pub fn config_c() -> KerrCatPreset {
    preset("C", 1, 0.35, 10.0, 0.62, 0.05, 0.34, 2.9, (5.9, 1.15))
}

pub fn config_d() -> KerrCatPreset {
    preset("D", 2, 0.39, 0.27, 0.17, 0.0739, 0.25, 5.3, (6.3, 0.72))
}

pub fn kerr_cat_presets() -> [KerrCatPreset; 4] {
    [config_a(), config_b(), config_c(), config_d()]
}

/// Beam-splitter with a single SNAIL (N = 5, alpha = 0.18) as coupler;
/// `phi_e` in flux quanta.
pub fn beam_splitter_setup(phi_e: f64) -> BeamSplitterSetup {
    BeamSplitterSetup {
        coupler: CircuitModel::SnailArray(SnailArray { m: 1, n: 5, alpha: 0.18, e_j: ghz(86.0), phi_e: flux_phase(phi_e) }),
        e_c: mhz(177.0),
        omega_b: ghz(2.976),
        omega_c: ghz(6.915),
        g_b: mhz(75.6),
        g_c: mhz(134.9),
    }
}
