use serde::{Deserialize, Serialize};

use crate::circuit::{mode_frame, CircuitModel, ModeFrame};
use crate::error::{Error, Result};
use crate::sc::{flux_drive_amplitudes, Displacement, EngineChoice, ScProblem, ThreeModeIndex};

/// `coef * C_a * C_b / (wa * omega_a' + wd * omega_d)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionTerm {
    pub coef: f64,
    pub a: ThreeModeIndex,
    pub b: ThreeModeIndex,
    pub wa: f64,
    pub wd: f64,
}

const fn term(coef: f64, a: ThreeModeIndex, b: ThreeModeIndex, wa: f64, wd: f64) -> CorrectionTerm {
    CorrectionTerm { coef, a, b, wa, wd }
}

const fn ix(na: u32, la: u32, nb: u32, lb: u32, nc: u32, lc: u32, p: u32) -> ThreeModeIndex {
    ThreeModeIndex::new(na, la, nb, lb, nc, lc, p)
}

pub const G_AB_CORRECTION: [CorrectionTerm; 8] = [
    term(-1.0, ix(0, 1, 0, 1, 0, 0, 2), ix(0, 2, 0, 0, 0, 0, 0), 1.0, 0.0),
    term(-2.0, ix(0, 1, 0, 1, 0, 0, 1), ix(0, 2, 0, 0, 0, 0, 1), 2.0, -1.0),
    term(-1.0, ix(0, 1, 0, 1, 0, 0, 0), ix(0, 2, 0, 0, 0, 0, 2), 1.0, -2.0),
    term(-2.0, ix(0, 1, 0, 0, 0, 0, 2), ix(0, 2, 0, 1, 0, 0, 0), 1.0, 2.0),
    term(-2.0, ix(0, 1, 0, 0, 0, 0, 1), ix(0, 2, 0, 1, 0, 0, 1), 1.0, 1.0),
    term(-1.0, ix(0, 1, 0, 1, 0, 0, 1), ix(1, 0, 0, 0, 0, 0, 1), 0.0, 1.0),
    term(-1.0, ix(0, 1, 0, 0, 0, 0, 2), ix(1, 0, 0, 1, 0, 0, 0), 1.0, -2.0),
    term(-1.0, ix(0, 1, 0, 0, 0, 0, 1), ix(1, 0, 0, 1, 0, 0, 1), 1.0, -1.0),
];

pub const G_AC_CORRECTION: [CorrectionTerm; 8] = [
    term(-2.0, ix(0, 1, 0, 0, 0, 1, 2), ix(0, 2, 0, 0, 0, 0, 1), 2.0, -1.0),
    term(-1.0, ix(0, 1, 0, 0, 0, 1, 1), ix(0, 2, 0, 0, 0, 0, 2), 1.0, -1.0),
    term(-2.0, ix(0, 1, 0, 0, 0, 0, 3), ix(0, 2, 0, 0, 0, 1, 0), 1.0, 3.0),
    term(-2.0, ix(0, 1, 0, 0, 0, 0, 2), ix(0, 2, 0, 0, 0, 1, 1), 1.0, 2.0),
    term(-1.0, ix(0, 1, 0, 0, 0, 1, 2), ix(1, 0, 0, 0, 0, 0, 1), 0.0, 1.0),
    term(-1.0, ix(0, 1, 0, 0, 0, 1, 1), ix(1, 0, 0, 0, 0, 0, 2), 0.0, 2.0),
    term(-1.0, ix(0, 1, 0, 0, 0, 0, 3), ix(1, 0, 0, 0, 0, 1, 0), 1.0, -3.0),
    term(-1.0, ix(0, 1, 0, 0, 0, 0, 2), ix(1, 0, 0, 0, 0, 1, 1), 1.0, -2.0),
];

const A00_0: ThreeModeIndex = ix(0, 1, 0, 0, 0, 0, 0);
const A00_1: ThreeModeIndex = ix(0, 1, 0, 0, 0, 0, 1);
const A11_0: ThreeModeIndex = ix(1, 1, 0, 0, 0, 0, 0);
const A11_1: ThreeModeIndex = ix(1, 1, 0, 0, 0, 0, 1);

pub const DELTA_A_CORRECTION: [CorrectionTerm; 6] = [
    term(-4.0, A00_0, A11_0, 1.0, 0.0),
    term(-2.0, A11_0, A11_0, 1.0, 0.0),
    term(-4.0, A00_1, A11_1, 1.0, -1.0),
    term(-4.0, A00_1, A11_1, 1.0, 1.0),
    term(-2.0, A11_1, A11_1, 1.0, -1.0),
    term(-2.0, A11_1, A11_1, 1.0, 1.0),
];

const X111_0: ThreeModeIndex = ix(0, 1, 0, 1, 0, 1, 0);
const X111_1: ThreeModeIndex = ix(0, 1, 0, 1, 0, 1, 1);

pub const CHI_CORRECTION: [CorrectionTerm; 17] = [
    term(1.0, X111_0, X111_0, 1.0, -5.0),
    term(-1.0, X111_0, X111_0, 3.0, -5.0),
    term(-1.0, X111_0, X111_0, 1.0, -1.0),
    term(-1.0, X111_0, X111_0, 1.0, 1.0),
    term(-2.0, ix(0, 1, 0, 0, 0, 1, 0), ix(0, 1, 1, 0, 0, 1, 0), 2.0, -3.0),
    term(-2.0, ix(0, 1, 0, 0, 0, 1, 0), ix(0, 1, 1, 0, 0, 1, 0), 0.0, 3.0),
    term(1.0, X111_1, X111_1, 1.0, -6.0),
    term(-2.0, X111_1, X111_1, 1.0, 0.0),
    term(1.0, X111_1, X111_1, 1.0, -4.0),
    term(-1.0, X111_1, X111_1, 3.0, -4.0),
    term(-4.0, X111_1, X111_1, 3.0, -6.0),
    term(-1.0, X111_1, X111_1, 1.0, 2.0),
    term(-1.0, ix(0, 1, 0, 1, 0, 0, 0), ix(0, 1, 0, 1, 1, 0, 0), 1.0, -1.0),
    term(-1.0, ix(0, 1, 0, 1, 0, 0, 0), ix(0, 1, 0, 1, 1, 0, 0), 0.0, 1.0),
    term(-2.0, ix(0, 1, 0, 0, 1, 0, 0), ix(0, 1, 1, 0, 0, 0, 0), 1.0, 0.0),
    term(-2.0, ix(0, 1, 0, 0, 1, 0, 1), ix(0, 1, 1, 0, 0, 0, 1), 1.0, -1.0),
    term(-2.0, ix(0, 1, 0, 0, 1, 0, 1), ix(0, 1, 1, 0, 0, 0, 1), 1.0, 1.0),
];

const G_AB_RWA: ThreeModeIndex = ix(0, 1, 0, 1, 0, 0, 2);
const G_AC_RWA: ThreeModeIndex = ix(0, 1, 0, 0, 0, 1, 3);
const DELTA_A_RWA: ThreeModeIndex = ix(1, 0, 0, 0, 0, 0, 0);
const CHI_RWA: ThreeModeIndex = ix(0, 0, 1, 0, 1, 0, 0);
const G_BC: ThreeModeIndex = ix(0, 0, 0, 1, 0, 1, 1);

fn correction_sum(terms: &[CorrectionTerm], c: &dyn Fn(ThreeModeIndex) -> f64, omega_a: f64, omega_d: f64) -> f64 {
    terms.iter().map(|t| t.coef * c(t.a) * c(t.b) / (t.wa * omega_a + t.wd * omega_d)).sum()
}

/// Coupler mode dispersively coupled to two linear cavities. Frequencies and
/// couplings in rad/ns; the coupler frequency follows from its frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSplitterSetup {
    pub coupler: CircuitModel,
    pub e_c: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    pub g_b: f64,
    pub g_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplerDrive {
    /// capacitive drive, Pi = n_zpf Pi~
    Capacitive { pi: f64 },
    /// flux drive of a cosine-family coupler; Pi~ is reported as the largest branch displacement
    Flux { phi_ac0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterOptions {
    pub engine: EngineChoice,
    pub n_max: u32,
    /// largest allowed g / |omega_cavity - omega_a|
    pub dispersive_limit: f64,
    /// flag threshold on g_ab / delta~ and g_ac / delta~
    pub sw_limit: f64,
    /// |delta~| below this fraction of omega_a' is an error
    pub resonance_tolerance: f64,
}

impl Default for BeamSplitterOptions {
    fn default() -> Self {
        BeamSplitterOptions {
            engine: EngineChoice::default(),
            n_max: 30,
            dispersive_limit: 0.25,
            sw_limit: 0.25,
            resonance_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterParams {
    pub omega_a: f64,
    pub omega_a_dressed: f64,
    pub omega_b_dressed: f64,
    pub omega_c_dressed: f64,
    pub xi_b: f64,
    pub xi_c: f64,
    pub omega_d: f64,
    pub pi_tilde: f64,
    pub g_bs: f64,
    pub chi_bc: f64,
    pub g_ab: f64,
    pub g_ac: f64,
    pub g_bc: f64,
    pub delta_a: f64,
    pub delta_tilde: f64,
    pub g_ab_ratio: f64,
    pub g_ac_ratio: f64,
    /// either ratio above the Schrieffer-Wolff limit
    pub sw_violated: bool,
}

/// Combine SC lookups into beam-splitter parameters.
pub fn assemble_beam_splitter(
    c: &dyn Fn(ThreeModeIndex) -> f64,
    omega_a_dressed: f64,
    omega_b_dressed: f64,
    omega_d: f64,
) -> (f64, f64, f64, f64, f64, f64) {
    let wa = omega_a_dressed;
    let g_ab = c(G_AB_RWA) + correction_sum(&G_AB_CORRECTION, c, wa, omega_d);
    let g_ac = c(G_AC_RWA) + correction_sum(&G_AC_CORRECTION, c, wa, omega_d);
    let delta_a = c(DELTA_A_RWA) + correction_sum(&DELTA_A_CORRECTION, c, wa, omega_d);
    let chi = c(CHI_RWA) + correction_sum(&CHI_CORRECTION, c, wa, omega_d);
    let delta_tilde = wa + omega_b_dressed - 2.0 * omega_d + delta_a;
    let g_bs = c(G_BC) - 2.0 * g_ab * g_ac / delta_tilde;
    (g_bs, chi, g_ab, g_ac, delta_a, delta_tilde)
}

fn all_indices() -> Vec<ThreeModeIndex> {
    let mut v = vec![G_AB_RWA, G_AC_RWA, DELTA_A_RWA, CHI_RWA, G_BC];
    for t in G_AB_CORRECTION.iter().chain(&G_AC_CORRECTION).chain(&DELTA_A_CORRECTION).chain(&CHI_CORRECTION) {
        v.push(t.a);
        v.push(t.b);
    }
    let mut out: Vec<ThreeModeIndex> = Vec::new();
    for i in v {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// Beam-splitter and cross-Kerr rates between two cavities mediated by a driven coupler.
pub fn beam_splitter(setup: &BeamSplitterSetup, drive: CouplerDrive, opts: &BeamSplitterOptions) -> Result<BeamSplitterParams> {
    let frame = mode_frame(&setup.coupler, setup.e_c, opts.n_max)?;
    beam_splitter_with_frame(setup, &frame, drive, opts)
}

pub fn beam_splitter_with_frame(
    setup: &BeamSplitterSetup,
    frame: &ModeFrame,
    drive: CouplerDrive,
    opts: &BeamSplitterOptions,
) -> Result<BeamSplitterParams> {
    let wa = frame.omega0;
    let (wb, wc) = (setup.omega_b, setup.omega_c);
    let ratio = (setup.g_b / (wb - wa)).abs().max((setup.g_c / (wc - wa)).abs());
    if !(ratio <= opts.dispersive_limit) {
        return Err(Error::DispersiveViolated { ratio });
    }
    let shift_b = setup.g_b * setup.g_b / (wa - wb);
    let shift_c = setup.g_c * setup.g_c / (wa - wc);
    let wa_d = wa + shift_b + shift_c;
    let wb_d = wb - shift_b;
    let wc_d = wc - shift_c;
    let xi_b = 2.0 * setup.g_b * wb / (wb * wb - wa * wa);
    let xi_c = 2.0 * setup.g_c * wc / (wc * wc - wa * wa);
    let omega_d = wc_d - wb_d;

    let (pi_tilde, disp) = match drive {
        CouplerDrive::Capacitive { pi } => {
            let t = pi / frame.n_zpf;
            (t, Displacement::capacitive(t))
        }
        CouplerDrive::Flux { phi_ac0 } => {
            let amps = flux_drive_amplitudes(&setup.coupler, frame, phi_ac0, omega_d)?;
            (amps.iter().fold(0.0f64, |m, a| m.max(a.abs())), Displacement::flux(amps))
        }
    };
    let problem = ScProblem::new(&setup.coupler, frame, &disp)?;
    let mut table = Vec::new();
    for idx in all_indices() {
        table.push((idx, problem.three_mode(idx, xi_b, xi_c, opts.engine)?.value));
    }
    let lookup = |i: ThreeModeIndex| table.iter().find(|(k, _)| *k == i).map_or(0.0, |(_, v)| *v);
    let (g_bs, chi_bc, g_ab, g_ac, delta_a, delta_tilde) = assemble_beam_splitter(&lookup, wa_d, wb_d, omega_d);
    if !(delta_tilde.abs() > opts.resonance_tolerance * wa_d) {
        return Err(Error::ResonanceTooClose { delta_tilde });
    }
    let g_ab_ratio = (g_ab / delta_tilde).abs();
    let g_ac_ratio = (g_ac / delta_tilde).abs();
    Ok(BeamSplitterParams {
        omega_a: wa,
        omega_a_dressed: wa_d,
        omega_b_dressed: wb_d,
        omega_c_dressed: wc_d,
        xi_b,
        xi_c,
        omega_d,
        pi_tilde,
        g_bs,
        chi_bc,
        g_ab,
        g_ac,
        g_bc: lookup(G_BC),
        delta_a,
        delta_tilde,
        g_ab_ratio,
        g_ac_ratio,
        sw_violated: g_ab_ratio > opts.sw_limit || g_ac_ratio > opts.sw_limit,
    })
}
