use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitModel, ModeFrame};
use crate::error::{Error, Result};
use crate::sc::{
    flux_drive_amplitudes, flux_drive_amplitudes_bare, Displacement, EngineChoice, ScIndex, ScProblem,
};

/// `coef * C_a * C_b`, indices as (n, l, p).
pub type ProductTerm = (f64, (u32, u32, u32), (u32, u32, u32));

/// Squeezing correction, each product divided by omega_d.
pub const EPS2_CORRECTION: [ProductTerm; 12] = [
    (-2.0, (0, 1, 1), (0, 3, 0)),
    (-6.0, (0, 1, 0), (0, 3, 1)),
    (-6.0 / 5.0, (0, 1, 2), (0, 3, 1)),
    (-6.0, (0, 2, 1), (0, 4, 0)),
    (-2.0, (0, 2, 0), (1, 0, 1)),
    (2.0, (0, 2, 2), (1, 0, 1)),
    (-1.0, (0, 2, 1), (1, 0, 2)),
    (2.0, (0, 1, 1), (1, 1, 0)),
    (-12.0, (0, 3, 1), (1, 1, 0)),
    (-2.0, (0, 1, 0), (1, 1, 1)),
    (2.0 / 3.0, (0, 1, 2), (1, 1, 1)),
    (-4.0, (0, 3, 0), (1, 1, 1)),
];

/// Kerr correction, each product divided by omega_d.
pub const KERR_CORRECTION: [ProductTerm; 7] = [
    (6.0, (0, 3, 0), (0, 3, 0)),
    (108.0 / 5.0, (0, 3, 1), (0, 3, 1)),
    (36.0, (0, 4, 0), (0, 4, 0)),
    (6.0, (1, 1, 0), (1, 1, 0)),
    (-4.0, (1, 1, 1), (1, 1, 1)),
    (12.0, (0, 2, 0), (1, 2, 0)),
    (18.0, (1, 2, 0), (1, 2, 0)),
];

/// Frequency-shift correction, each product divided by omega_d.
pub const DETUNING_CORRECTION: [ProductTerm; 12] = [
    (-4.0, (0, 2, 0), (0, 2, 0)),
    (-2.0, (0, 2, 1), (0, 2, 1)),
    (8.0 / 3.0, (0, 2, 2), (0, 2, 2)),
    (-12.0, (0, 3, 0), (0, 3, 0)),
    (-216.0 / 5.0, (0, 3, 1), (0, 3, 1)),
    (-48.0, (0, 4, 0), (0, 4, 0)),
    (-8.0, (0, 1, 0), (1, 1, 0)),
    (-4.0, (1, 1, 0), (1, 1, 0)),
    (16.0 / 3.0, (0, 1, 1), (1, 1, 1)),
    (8.0 / 3.0, (1, 1, 1), (1, 1, 1)),
    (-12.0, (0, 2, 0), (1, 2, 0)),
    (-6.0, (1, 2, 0), (1, 2, 0)),
];

const RWA_INDICES: [(u32, u32, u32); 3] = [(1, 0, 0), (2, 0, 0), (0, 2, 1)];

fn product_sum(terms: &[ProductTerm], c: &dyn Fn(u32, u32, u32) -> f64) -> f64 {
    terms.iter().map(|&(k, a, b)| k * c(a.0, a.1, a.2) * c(b.0, b.1, b.2)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrCatParams {
    pub omega0: f64,
    pub omega_d: f64,
    pub omega_q: f64,
    pub kerr: f64,
    pub eps2: f64,
    pub detuning: f64,
    /// eps2 / |K|
    pub cat_size: f64,
    /// eps2 / omega_q
    pub chaos_ratio: f64,
    /// drive phase, 0 or pi
    pub gamma: f64,
    pub delta_correction: f64,
    pub kerr_correction: f64,
    pub eps2_correction: f64,
}

impl KerrCatParams {
    /// Combine RWA amplitudes and (optionally) a separate table for the
    /// correction products. Lookups are C_{nl,p} at drive phase zero.
    pub fn assemble(
        omega0: f64,
        omega_d: f64,
        rwa: &dyn Fn(u32, u32, u32) -> f64,
        corrections: Option<&dyn Fn(u32, u32, u32) -> f64>,
    ) -> Self {
        let (d1, k1, e1) = match corrections {
            Some(c) => (
                product_sum(&DETUNING_CORRECTION, c) / omega_d,
                product_sum(&KERR_CORRECTION, c) / omega_d,
                product_sum(&EPS2_CORRECTION, c) / omega_d,
            ),
            None => (0.0, 0.0, 0.0),
        };
        let omega_q = omega0 + rwa(1, 0, 0) + d1;
        let kerr = -rwa(2, 0, 0) + k1;
        let eps2 = rwa(0, 2, 1) + e1;
        KerrCatParams {
            omega0,
            omega_d,
            omega_q,
            kerr,
            eps2,
            detuning: omega_q - omega_d / 2.0,
            cat_size: eps2 / kerr.abs(),
            chaos_ratio: eps2 / omega_q,
            gamma: 0.0,
            delta_correction: d1,
            kerr_correction: k1,
            eps2_correction: e1,
        }
    }

    /// Shift the drive phase by pi: odd harmonics change sign, which flips
    /// the squeezing amplitude and leaves K and the frequency shifts intact.
    fn flip_phase(mut self) -> Self {
        self.eps2 = -self.eps2;
        self.eps2_correction = -self.eps2_correction;
        self.cat_size = -self.cat_size;
        self.chaos_ratio = -self.chaos_ratio;
        self.gamma = if self.gamma == 0.0 { std::f64::consts::PI } else { 0.0 };
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KerrCatDrive {
    /// capacitive drive with effective displacement Pi~
    Capacitive { pi_tilde: f64 },
    /// flux drive with linear-response corrected branch displacements
    Flux { phi_ac0: f64 },
    /// flux drive with uncorrected displacements 2 phi_ac0 d_i
    FluxBare { phi_ac0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrivePhase {
    /// choose 0 or pi so that eps2 >= 0
    Auto,
    Zero,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrCatOptions {
    pub engine: EngineChoice,
    pub corrections: bool,
    pub fix_detuning_zero: bool,
    /// drive frequency when not solved for, default 2 omega0; also the start of the iteration
    pub omega_d: Option<f64>,
    pub phase: DrivePhase,
    pub max_iterations: usize,
    pub relaxation: f64,
    pub tolerance: f64,
}

impl Default for KerrCatOptions {
    fn default() -> Self {
        KerrCatOptions {
            engine: EngineChoice::default(),
            corrections: true,
            fix_detuning_zero: true,
            omega_d: None,
            phase: DrivePhase::Auto,
            max_iterations: 200,
            relaxation: 0.5,
            tolerance: 1e-10,
        }
    }
}

fn needed_indices(corrections: bool) -> Vec<ScIndex> {
    let mut v: Vec<(u32, u32, u32)> = RWA_INDICES.to_vec();
    if corrections {
        for t in EPS2_CORRECTION.iter().chain(&KERR_CORRECTION).chain(&DETUNING_CORRECTION) {
            v.push(t.1);
            v.push(t.2);
        }
    }
    v.sort_unstable();
    v.dedup();
    v.into_iter().map(|(n, l, p)| ScIndex::new(n, l, p)).collect()
}

struct Table(HashMap<(u32, u32, u32), f64>);

impl Table {
    fn get(&self, n: u32, l: u32, p: u32) -> f64 {
        self.0.get(&(n, l, p)).copied().unwrap_or(0.0)
    }
}

fn sc_table(
    model: &CircuitModel,
    frame: &ModeFrame,
    drive: KerrCatDrive,
    omega_d: f64,
    opts: &KerrCatOptions,
) -> Result<Table> {
    let disp = match drive {
        KerrCatDrive::Capacitive { pi_tilde } => Displacement::capacitive(pi_tilde),
        KerrCatDrive::Flux { phi_ac0 } => Displacement::flux(flux_drive_amplitudes(model, frame, phi_ac0, omega_d)?),
        KerrCatDrive::FluxBare { phi_ac0 } => Displacement::flux(flux_drive_amplitudes_bare(model, phi_ac0)?),
    };
    let problem = ScProblem::new(model, frame, &disp)?;
    let mut map = HashMap::new();
    for idx in needed_indices(opts.corrections) {
        map.insert((idx.n, idx.l, idx.p), problem.evaluate(idx, opts.engine)?.value);
    }
    Ok(Table(map))
}

fn evaluate_at(
    model: &CircuitModel,
    frame: &ModeFrame,
    drive: KerrCatDrive,
    omega_d: f64,
    opts: &KerrCatOptions,
    cached: &mut Option<Table>,
) -> Result<KerrCatParams> {
    let depends_on_omega_d = matches!(drive, KerrCatDrive::Flux { .. });
    if cached.is_none() || depends_on_omega_d {
        *cached = Some(sc_table(model, frame, drive, omega_d, opts)?);
    }
    let t = cached.as_ref().expect("table computed above");
    let lookup = |n, l, p| t.get(n, l, p);
    let corr: Option<&dyn Fn(u32, u32, u32) -> f64> = if opts.corrections { Some(&lookup) } else { None };
    Ok(KerrCatParams::assemble(frame.omega0, omega_d, &lookup, corr))
}

/// Kerr-cat parameters of a two-photon driven nonlinear mode.
///
/// With `fix_detuning_zero` the drive frequency is iterated to omega_d = 2 omega_q
/// by damped fixed-point steps.
pub fn kerr_cat(
    model: &CircuitModel,
    frame: &ModeFrame,
    drive: KerrCatDrive,
    opts: &KerrCatOptions,
) -> Result<KerrCatParams> {
    let mut omega_d = opts.omega_d.unwrap_or(2.0 * frame.omega0);
    let mut cached = None;
    let mut params = evaluate_at(model, frame, drive, omega_d, opts, &mut cached)?;
    if opts.fix_detuning_zero {
        let mut converged = false;
        for _ in 0..opts.max_iterations {
            if params.detuning.abs() < opts.tolerance * frame.omega0 {
                converged = true;
                break;
            }
            omega_d = (1.0 - opts.relaxation) * omega_d + opts.relaxation * 2.0 * params.omega_q;
            params = evaluate_at(model, frame, drive, omega_d, opts, &mut cached)?;
        }
        if !converged && params.detuning.abs() >= opts.tolerance * frame.omega0 {
            return Err(Error::FixedPointDiverged {
                iterations: opts.max_iterations,
                residual: params.detuning.abs() / frame.omega0,
            });
        }
    }
    let flip = match opts.phase {
        DrivePhase::Zero => false,
        DrivePhase::Pi => true,
        DrivePhase::Auto => params.eps2 < 0.0,
    };
    Ok(if flip { params.flip_phase() } else { params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{mode_frame, SnailArray, SnailArrayStrayL};
    use crate::units::{charging_energy_ghz, flux_phase, ghz, josephson_energy_ghz};

    fn config_a() -> (CircuitModel, ModeFrame) {
        let model = CircuitModel::SnailArrayStrayL(SnailArrayStrayL {
            snail: SnailArray { m: 1, n: 3, alpha: 0.11, e_j: ghz(josephson_energy_ghz(0.8)), phi_e: flux_phase(0.32) },
            x_j: 100.0,
        });
        let frame = mode_frame(&model, ghz(charging_energy_ghz(0.32)), 30).unwrap();
        (model, frame)
    }

    #[test]
    fn zero_drive_has_no_squeezing() {
        let (model, frame) = config_a();
        let p = kerr_cat(&model, &frame, KerrCatDrive::Capacitive { pi_tilde: 0.0 }, &KerrCatOptions::default()).unwrap();
        assert_eq!(p.eps2, 0.0);
        assert_eq!(p.cat_size, 0.0);
    }

    #[test]
    fn rwa_limit_reproduces_bare_coefficients() {
        let (model, frame) = config_a();
        let opts = KerrCatOptions { corrections: false, fix_detuning_zero: false, phase: DrivePhase::Zero, ..Default::default() };
        let p = kerr_cat(&model, &frame, KerrCatDrive::Capacitive { pi_tilde: 0.7 }, &opts).unwrap();
        let prob = ScProblem::new(&model, &frame, &Displacement::capacitive(0.7)).unwrap();
        let c = |n, l, q| prob.evaluate(ScIndex::new(n, l, q), opts.engine).unwrap().value;
        assert_eq!(p.omega_q, frame.omega0 + c(1, 0, 0));
        assert_eq!(p.kerr, -c(2, 0, 0));
        assert_eq!(p.eps2, c(0, 2, 1));
    }

    #[test]
    fn fixed_point_reaches_zero_detuning() {
        let (model, frame) = config_a();
        let opts = KerrCatOptions::default();
        let p = kerr_cat(&model, &frame, KerrCatDrive::Capacitive { pi_tilde: 1.0 }, &opts).unwrap();
        let again = kerr_cat(
            &model,
            &frame,
            KerrCatDrive::Capacitive { pi_tilde: 1.0 },
            &KerrCatOptions { fix_detuning_zero: false, omega_d: Some(p.omega_d), ..opts },
        )
        .unwrap();
        assert!(again.detuning.abs() / frame.omega0 <= 1e-10);
        assert!(p.eps2 >= 0.0);
    }

    #[test]
    fn phase_flip_changes_only_squeezing_sign() {
        let (model, frame) = config_a();
        let base = KerrCatOptions { fix_detuning_zero: false, ..Default::default() };
        let zero = kerr_cat(&model, &frame, KerrCatDrive::Capacitive { pi_tilde: 0.8 }, &KerrCatOptions { phase: DrivePhase::Zero, ..base }).unwrap();
        let pi = kerr_cat(&model, &frame, KerrCatDrive::Capacitive { pi_tilde: 0.8 }, &KerrCatOptions { phase: DrivePhase::Pi, ..base }).unwrap();
        assert_eq!(zero.eps2, -pi.eps2);
        assert_eq!(zero.kerr, pi.kerr);
        assert_eq!(zero.omega_q, pi.omega_q);
    }

    #[test]
    fn correction_tables_only_reference_the_truncation_window() {
        for (_, a, b) in EPS2_CORRECTION.iter().chain(&KERR_CORRECTION).chain(&DETUNING_CORRECTION) {
            for &(n, l, p) in [a, b] {
                assert!(2 * n + l <= 4 && p <= 2);
            }
        }
    }

    #[test]
    fn fixed_point_failure_is_reported() {
        let (model, frame) = config_a();
        let opts = KerrCatOptions { max_iterations: 1, ..Default::default() };
        let r = kerr_cat(&model, &frame, KerrCatDrive::Capacitive { pi_tilde: 1.0 }, &opts);
        assert!(matches!(r, Err(Error::FixedPointDiverged { .. })));
    }
}
