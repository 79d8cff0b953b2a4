//! Built-in configurations: Kerr-cat designs A to D, the SNAIL-coupled
//! beam-splitter, and two sweeps.

use crate::config::{
    AxisSection, BeamSplitterSection, CircuitKind, CircuitSection, ConstraintSection, DriveKind, DriveSection,
    KerrCatSection, Numerics, ObjectiveSection, RunConfig, SweepSection, SweepTaskName,
};

pub const NAMES: [&str; 7] = [
    "kerr-cat-configA",
    "kerr-cat-configB",
    "kerr-cat-configC",
    "kerr-cat-configD",
    "beam-splitter",
    "sweep-kerr-cat",
    "sweep-beam-splitter",
];

fn kerr_cat_circuit(m: u32, l_j: f64, x_j: f64, c: f64, alpha: f64, phi_e: f64) -> CircuitSection {
    CircuitSection {
        m: Some(m),
        n: Some(3),
        alpha: Some(alpha),
        lj_nh: Some(l_j),
        x_j: Some(x_j),
        phi_e_flux: Some(phi_e),
        c_pf: Some(c),
        ..CircuitSection::empty(CircuitKind::SnailStray)
    }
}

fn kerr_cat(circuit: CircuitSection) -> RunConfig {
    RunConfig {
        circuit,
        drive: Some(DriveSection::capacitive(0.0)),
        numerics: Numerics::default(),
        kerrcat: Some(KerrCatSection::default()),
        beamsplitter: None,
        eigen: None,
        sweep: None,
        output: None,
    }
}

fn coupler(phi_e: f64) -> CircuitSection {
    CircuitSection {
        m: Some(1),
        n: Some(5),
        alpha: Some(0.18),
        ej_ghz: Some(86.0),
        phi_e_flux: Some(phi_e),
        ec_mhz: Some(177.0),
        ..CircuitSection::empty(CircuitKind::Snail)
    }
}

fn cavities() -> BeamSplitterSection {
    BeamSplitterSection {
        omega_b_ghz: 2.976,
        omega_c_ghz: 6.915,
        g_b_mhz: 75.6,
        g_c_mhz: 134.9,
        dispersive_limit: None,
        sw_limit: None,
    }
}

pub fn get(name: &str) -> Option<RunConfig> {
    let cfg = match name {
        "kerr-cat-configA" => kerr_cat(kerr_cat_circuit(1, 0.8, 100.0, 0.32, 0.11, 0.32)),
        "kerr-cat-configB" => kerr_cat(kerr_cat_circuit(2, 0.6, 1.0, 0.16, 0.11, 0.46)),
        "kerr-cat-configC" => kerr_cat(kerr_cat_circuit(1, 0.35, 10.0, 0.62, 0.05, 0.34)),
        "kerr-cat-configD" => kerr_cat(kerr_cat_circuit(2, 0.39, 0.27, 0.17, 0.0739, 0.25)),
        "beam-splitter" => RunConfig {
            circuit: coupler(0.38),
            drive: Some(DriveSection::capacitive(0.5)),
            numerics: Numerics::default(),
            kerrcat: None,
            beamsplitter: Some(cavities()),
            eigen: None,
            sweep: None,
            output: None,
        },
        "sweep-kerr-cat" => {
            let mut cfg = kerr_cat(kerr_cat_circuit(1, 0.8, 100.0, 0.32, 0.11, 0.32));
            cfg.drive = Some(DriveSection { kind: DriveKind::Capacitive, pi_tilde: None, pi: Some(0.5), phi_ac0_rad: None, bare_amplitudes: false });
            cfg.sweep = Some(SweepSection {
                task: SweepTaskName::Kerrcat,
                axes: vec![
                    AxisSection { param: "phi_e_flux".into(), values: None, from: Some(0.05), to: Some(0.48), count: Some(44) },
                    AxisSection { param: "x_J".into(), values: Some(vec![1.0, 10.0, 100.0]), from: None, to: None, count: None },
                ],
                constraints: vec![
                    ConstraintSection { quantity: "K_MHz".into(), min: Some(1.0), max: None },
                    ConstraintSection { quantity: "omega0_GHz".into(), min: Some(4.0), max: Some(8.0) },
                ],
                objective: ObjectiveSection { quantity: "cat_size".into(), maximize: true },
                pi_tilde_max: None,
                chaos_threshold: Some(crate::config::DEFAULT_THRESHOLD),
            });
            cfg
        }
        "sweep-beam-splitter" => RunConfig {
            circuit: coupler(0.38),
            drive: Some(DriveSection { kind: DriveKind::Capacitive, pi_tilde: None, pi: Some(0.1), phi_ac0_rad: None, bare_amplitudes: false }),
            numerics: Numerics::default(),
            kerrcat: None,
            beamsplitter: Some(cavities()),
            eigen: None,
            sweep: Some(SweepSection {
                task: SweepTaskName::Beamsplitter,
                axes: vec![
                    AxisSection { param: "phi_e_flux".into(), values: None, from: Some(0.30), to: Some(0.45), count: Some(16) },
                    AxisSection { param: "pi".into(), values: None, from: Some(0.05), to: Some(1.0), count: Some(20) },
                ],
                constraints: vec![
                    ConstraintSection { quantity: "chi_bc_Hz".into(), min: Some(30.0), max: None },
                    ConstraintSection { quantity: "sw_ratio".into(), min: None, max: Some(0.25) },
                ],
                objective: ObjectiveSection { quantity: "on_off_ratio".into(), maximize: true },
                pi_tilde_max: None,
                chaos_threshold: None,
            }),
            output: None,
        },
        _ => return None,
    };
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use supercoeff_core::presets::{beam_splitter_setup, kerr_cat_presets};

    #[test]
    fn kerr_cat_examples_match_presets_exactly() {
        for (name, preset) in NAMES[..4].iter().zip(kerr_cat_presets()) {
            let (model, e_c) = get(name).unwrap().model().unwrap();
            assert_eq!(model, preset.model, "{name}");
            assert_eq!(e_c, preset.e_c, "{name}");
        }
    }

    #[test]
    fn beam_splitter_example_matches_preset() {
        let cfg = get("beam-splitter").unwrap();
        let (model, e_c) = cfg.model().unwrap();
        let setup = cfg.beamsplitter.unwrap().setup(model, e_c);
        assert_eq!(setup, beam_splitter_setup(0.38));
    }

    #[test]
    fn every_example_survives_toml() {
        for name in NAMES {
            let cfg = get(name).unwrap();
            let text = crate::config::to_toml(&cfg).unwrap();
            assert_eq!(crate::config::parse(&text, false).unwrap(), cfg, "{name}");
        }
    }

    #[test]
    fn sweep_examples_build_specs() {
        for name in ["sweep-kerr-cat", "sweep-beam-splitter"] {
            get(name).unwrap().sweep_spec().unwrap().validate().unwrap();
        }
    }
}
