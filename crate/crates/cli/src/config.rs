//! Run configuration: strict TOML (or JSON) with unit-suffixed keys.
//!
//! Energies are frequencies E/h in GHz unless the key says otherwise, fluxes
//! are fractions of the flux quantum, drive amplitudes are dimensionless.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use supercoeff_core::circuit::{CircuitModel, HigherHarmonics, SnailArray, SnailArrayStrayL, SquidArray, TwoCosine};
use supercoeff_core::effective::{BeamSplitterOptions, BeamSplitterSetup, DrivePhase, KerrCatOptions};
use supercoeff_core::eigen::{EigenBasis, DEFAULT_GRID_POINTS};
use supercoeff_core::oracle::OracleOptions;
use supercoeff_core::sc::{EngineChoice, DEFAULT_S_MAX};
use supercoeff_core::sweep::{
    Axis, Constraint, Objective, Quantity, SweepDrive, SweepParam, SweepSpec, SweepTask, DEFAULT_CHAOS_THRESHOLD,
};
use supercoeff_core::units::{charging_energy_ghz, flux_phase, ghz, josephson_energy_ghz, mhz};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSection>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kerrcat: Option<KerrCatSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beamsplitter: Option<BeamSplitterSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen: Option<EigenSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    Transmon,
    TwoCosine,
    Snail,
    SnailStray,
    Squid,
    Harmonics,
}

impl CircuitKind {
    fn name(self) -> &'static str {
        match self {
            CircuitKind::Transmon => "transmon",
            CircuitKind::TwoCosine => "two_cosine",
            CircuitKind::Snail => "snail",
            CircuitKind::SnailStray => "snail_stray",
            CircuitKind::Squid => "squid",
            CircuitKind::Harmonics => "harmonics",
        }
    }

    /// Keys a circuit of this kind may carry (besides `kind` and the charging energy).
    fn allowed(self) -> &'static [&'static str] {
        match self {
            CircuitKind::Transmon => &["EJ_GHz", "LJ_nH"],
            CircuitKind::TwoCosine => &["A_GHz", "B_GHz", "a1", "b1", "a2", "b2", "phi_e_flux"],
            CircuitKind::Snail => &["M", "N", "alpha", "EJ_GHz", "LJ_nH", "phi_e_flux"],
            CircuitKind::SnailStray => &["M", "N", "alpha", "EJ_GHz", "LJ_nH", "phi_e_flux", "x_J"],
            CircuitKind::Squid => &["M", "alpha", "EJ_GHz", "LJ_nH", "phi_e_flux", "r_a", "r_b"],
            CircuitKind::Harmonics => &["A_m_GHz", "B_m_GHz", "a1", "b1", "a2", "b2", "phi_e_flux"],
        }
    }
}

/// Circuit parameters. Which keys apply depends on `kind`; keys that do not
/// apply are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    pub kind: CircuitKind,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "EJ_GHz", default, skip_serializing_if = "Option::is_none")]
    pub ej_ghz: Option<f64>,
    #[serde(rename = "LJ_nH", default, skip_serializing_if = "Option::is_none")]
    pub lj_nh: Option<f64>,
    #[serde(rename = "x_J", default, skip_serializing_if = "Option::is_none")]
    pub x_j: Option<f64>,
    /// external flux, or dc bias for SQUIDs
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_e_flux: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_b: Option<f64>,
    #[serde(rename = "A_GHz", default, skip_serializing_if = "Option::is_none")]
    pub a_ghz: Option<f64>,
    #[serde(rename = "B_GHz", default, skip_serializing_if = "Option::is_none")]
    pub b_ghz: Option<f64>,
    #[serde(rename = "A_m_GHz", default, skip_serializing_if = "Option::is_none")]
    pub a_m_ghz: Option<Vec<f64>>,
    #[serde(rename = "B_m_GHz", default, skip_serializing_if = "Option::is_none")]
    pub b_m_ghz: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<f64>,
    #[serde(rename = "EC_GHz", default, skip_serializing_if = "Option::is_none")]
    pub ec_ghz: Option<f64>,
    #[serde(rename = "EC_MHz", default, skip_serializing_if = "Option::is_none")]
    pub ec_mhz: Option<f64>,
    #[serde(rename = "C_pF", default, skip_serializing_if = "Option::is_none")]
    pub c_pf: Option<f64>,
}

impl CircuitSection {
    pub fn empty(kind: CircuitKind) -> Self {
        CircuitSection {
            kind,
            m: None,
            n: None,
            alpha: None,
            ej_ghz: None,
            lj_nh: None,
            x_j: None,
            phi_e_flux: None,
            r_a: None,
            r_b: None,
            a_ghz: None,
            b_ghz: None,
            a_m_ghz: None,
            b_m_ghz: None,
            a1: None,
            b1: None,
            a2: None,
            b2: None,
            ec_ghz: None,
            ec_mhz: None,
            c_pf: None,
        }
    }

    fn present(&self) -> BTreeSet<&'static str> {
        let mut s = BTreeSet::new();
        let mut mark = |on: bool, k: &'static str| {
            if on {
                s.insert(k);
            }
        };
        mark(self.m.is_some(), "M");
        mark(self.n.is_some(), "N");
        mark(self.alpha.is_some(), "alpha");
        mark(self.ej_ghz.is_some(), "EJ_GHz");
        mark(self.lj_nh.is_some(), "LJ_nH");
        mark(self.x_j.is_some(), "x_J");
        mark(self.phi_e_flux.is_some(), "phi_e_flux");
        mark(self.r_a.is_some(), "r_a");
        mark(self.r_b.is_some(), "r_b");
        mark(self.a_ghz.is_some(), "A_GHz");
        mark(self.b_ghz.is_some(), "B_GHz");
        mark(self.a_m_ghz.is_some(), "A_m_GHz");
        mark(self.b_m_ghz.is_some(), "B_m_GHz");
        mark(self.a1.is_some(), "a1");
        mark(self.b1.is_some(), "b1");
        mark(self.a2.is_some(), "a2");
        mark(self.b2.is_some(), "b2");
        s
    }

    /// Charging energy in rad/ns.
    pub fn e_c(&self) -> Result<f64> {
        match (self.ec_ghz, self.ec_mhz, self.c_pf) {
            (Some(v), None, None) => Ok(ghz(v)),
            (None, Some(v), None) => Ok(mhz(v)),
            (None, None, Some(c)) => Ok(ghz(charging_energy_ghz(c))),
            (None, None, None) => bail!("[circuit] needs a charging energy: one of EC_GHz, EC_MHz, C_pF"),
            _ => bail!("[circuit] give exactly one of EC_GHz, EC_MHz, C_pF"),
        }
    }

    fn e_j(&self) -> Result<f64> {
        match (self.ej_ghz, self.lj_nh) {
            (Some(v), None) => Ok(ghz(v)),
            (None, Some(l)) => Ok(ghz(josephson_energy_ghz(l))),
            (None, None) => bail!("[circuit] kind {} needs one of EJ_GHz, LJ_nH", self.kind.name()),
            _ => bail!("[circuit] give EJ_GHz or LJ_nH, not both"),
        }
    }

    pub fn to_model(&self) -> Result<CircuitModel> {
        let allowed = self.kind.allowed();
        if let Some(extra) = self.present().into_iter().find(|k| !allowed.contains(k)) {
            bail!("[circuit] key `{extra}` does not apply to kind {}", self.kind.name());
        }
        let kind = self.kind.name();
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| anyhow!("[circuit] kind {kind} needs `{key}`"));
        let count = |v: Option<u32>, key: &str| v.ok_or_else(|| anyhow!("[circuit] kind {kind} needs `{key}`"));
        let model = match self.kind {
            CircuitKind::Transmon => CircuitModel::TwoCosine(TwoCosine {
                a: -self.e_j()?,
                b: 0.0,
                a1: 1.0,
                b1: 1.0,
                a2: 0.0,
                b2: 0.0,
                phi_e: 0.0,
            }),
            CircuitKind::TwoCosine => CircuitModel::TwoCosine(TwoCosine {
                a: ghz(need(self.a_ghz, "A_GHz")?),
                b: ghz(need(self.b_ghz, "B_GHz")?),
                a1: need(self.a1, "a1")?,
                b1: need(self.b1, "b1")?,
                a2: need(self.a2, "a2")?,
                b2: need(self.b2, "b2")?,
                phi_e: flux_phase(need(self.phi_e_flux, "phi_e_flux")?),
            }),
            CircuitKind::Snail | CircuitKind::SnailStray => {
                let snail = SnailArray {
                    m: count(self.m, "M")?,
                    n: count(self.n, "N")?,
                    alpha: need(self.alpha, "alpha")?,
                    e_j: self.e_j()?,
                    phi_e: flux_phase(need(self.phi_e_flux, "phi_e_flux")?),
                };
                if self.kind == CircuitKind::Snail {
                    CircuitModel::SnailArray(snail)
                } else {
                    CircuitModel::SnailArrayStrayL(SnailArrayStrayL { snail, x_j: need(self.x_j, "x_J")? })
                }
            }
            CircuitKind::Squid => CircuitModel::SquidArray(SquidArray {
                m: count(self.m, "M")?,
                alpha: need(self.alpha, "alpha")?,
                e_j: self.e_j()?,
                r_a: need(self.r_a, "r_a")?,
                r_b: need(self.r_b, "r_b")?,
                phi_dc: flux_phase(need(self.phi_e_flux, "phi_e_flux")?),
            }),
            CircuitKind::Harmonics => {
                let list = |v: &Option<Vec<f64>>, key: &str| -> Result<Vec<f64>> {
                    Ok(v.as_ref().ok_or_else(|| anyhow!("[circuit] kind {kind} needs `{key}`"))?.iter().map(|x| ghz(*x)).collect())
                };
                CircuitModel::HigherHarmonics(HigherHarmonics {
                    a_m: list(&self.a_m_ghz, "A_m_GHz")?,
                    b_m: list(&self.b_m_ghz, "B_m_GHz")?,
                    a1: need(self.a1, "a1")?,
                    b1: need(self.b1, "b1")?,
                    a2: need(self.a2, "a2")?,
                    b2: need(self.b2, "b2")?,
                    phi_e: flux_phase(need(self.phi_e_flux, "phi_e_flux")?),
                })
            }
        };
        model.validate().context("[circuit] invalid parameters")?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveKind {
    Capacitive,
    Flux,
}

/// Capacitive drives take `pi_tilde` (phase displacement) or `pi` (charge
/// displacement, pi = n_zpf pi_tilde); flux drives take `phi_ac0_rad`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub kind: DriveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_tilde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_ac0_rad: Option<f64>,
    /// flux drive: skip the drive-frequency correction of the amplitudes
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub bare_amplitudes: bool,
}

/// Resolved drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    PiTilde(f64),
    Pi(f64),
    Flux { phi_ac0: f64, bare: bool },
}

impl Drive {
    pub fn pi_tilde(self, n_zpf: f64) -> Option<f64> {
        match self {
            Drive::PiTilde(t) => Some(t),
            Drive::Pi(p) => Some(p / n_zpf),
            Drive::Flux { .. } => None,
        }
    }
}

impl DriveSection {
    pub fn capacitive(pi_tilde: f64) -> Self {
        DriveSection { kind: DriveKind::Capacitive, pi_tilde: Some(pi_tilde), pi: None, phi_ac0_rad: None, bare_amplitudes: false }
    }

    pub fn resolve(&self) -> Result<Drive> {
        match self.kind {
            DriveKind::Capacitive => {
                if self.phi_ac0_rad.is_some() || self.bare_amplitudes {
                    bail!("[drive] capacitive drive takes pi_tilde or pi only");
                }
                match (self.pi_tilde, self.pi) {
                    (Some(t), None) => Ok(Drive::PiTilde(t)),
                    (None, Some(p)) => Ok(Drive::Pi(p)),
                    _ => bail!("[drive] capacitive drive needs exactly one of pi_tilde, pi"),
                }
            }
            DriveKind::Flux => {
                if self.pi_tilde.is_some() || self.pi.is_some() {
                    bail!("[drive] flux drive takes phi_ac0_rad only");
                }
                let phi_ac0 = self.phi_ac0_rad.ok_or_else(|| anyhow!("[drive] flux drive needs phi_ac0_rad"))?;
                Ok(Drive::Flux { phi_ac0, bare: self.bare_amplitudes })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineName {
    Auto,
    Series,
    Closed,
}

/// Numerical settings; every field has a documented default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub engine: EngineName,
    /// highest series shell
    pub s_max: u32,
    /// highest expansion coefficient kept in the mode frame; default 2 s_max
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    pub oracle_dim: usize,
    pub oracle_phases: usize,
    /// fixed-point tolerance on |Delta| / omega0
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        let k = KerrCatOptions::default();
        let o = OracleOptions::default();
        Numerics {
            engine: EngineName::Auto,
            s_max: DEFAULT_S_MAX,
            n_max: None,
            oracle_dim: o.dim,
            oracle_phases: o.n_phase,
            tolerance: k.tolerance,
            max_iterations: k.max_iterations,
        }
    }
}

impl Numerics {
    pub fn engine(&self) -> EngineChoice {
        match self.engine {
            EngineName::Auto => EngineChoice::Auto { s_max: self.s_max },
            EngineName::Series => EngineChoice::Series { s_max: self.s_max },
            EngineName::Closed => EngineChoice::Closed,
        }
    }

    pub fn frame_order(&self) -> u32 {
        self.n_max.unwrap_or(2 * self.s_max).max(self.s_max).max(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseName {
    Auto,
    Zero,
    Pi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrCatSection {
    #[serde(default = "yes")]
    pub corrections: bool,
    #[serde(default = "yes")]
    pub fix_detuning_zero: bool,
    /// fixed drive frequency, or start of the detuning iteration
    #[serde(rename = "omega_d_GHz", default, skip_serializing_if = "Option::is_none")]
    pub omega_d_ghz: Option<f64>,
    #[serde(default = "auto_phase")]
    pub phase: PhaseName,
}

impl Default for KerrCatSection {
    fn default() -> Self {
        KerrCatSection { corrections: true, fix_detuning_zero: true, omega_d_ghz: None, phase: PhaseName::Auto }
    }
}

fn yes() -> bool {
    true
}

fn auto_phase() -> PhaseName {
    PhaseName::Auto
}

impl KerrCatSection {
    pub fn options(&self, numerics: &Numerics) -> KerrCatOptions {
        KerrCatOptions {
            engine: numerics.engine(),
            corrections: self.corrections,
            fix_detuning_zero: self.fix_detuning_zero,
            omega_d: self.omega_d_ghz.map(ghz),
            phase: match self.phase {
                PhaseName::Auto => DrivePhase::Auto,
                PhaseName::Zero => DrivePhase::Zero,
                PhaseName::Pi => DrivePhase::Pi,
            },
            max_iterations: numerics.max_iterations,
            tolerance: numerics.tolerance,
            ..Default::default()
        }
    }
}

/// Cavities coupled to the circuit in `[circuit]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSplitterSection {
    #[serde(rename = "omega_b_GHz")]
    pub omega_b_ghz: f64,
    #[serde(rename = "omega_c_GHz")]
    pub omega_c_ghz: f64,
    #[serde(rename = "g_b_MHz")]
    pub g_b_mhz: f64,
    #[serde(rename = "g_c_MHz")]
    pub g_c_mhz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersive_limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sw_limit: Option<f64>,
}

impl BeamSplitterSection {
    pub fn setup(&self, coupler: CircuitModel, e_c: f64) -> BeamSplitterSetup {
        BeamSplitterSetup {
            coupler,
            e_c,
            omega_b: ghz(self.omega_b_ghz),
            omega_c: ghz(self.omega_c_ghz),
            g_b: mhz(self.g_b_mhz),
            g_c: mhz(self.g_c_mhz),
        }
    }

    pub fn options(&self, numerics: &Numerics) -> BeamSplitterOptions {
        let d = BeamSplitterOptions::default();
        BeamSplitterOptions {
            engine: numerics.engine(),
            n_max: numerics.frame_order(),
            dispersive_limit: self.dispersive_limit.unwrap_or(d.dispersive_limit),
            sw_limit: self.sw_limit.unwrap_or(d.sw_limit),
            ..d
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisName {
    Charge,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenSection {
    pub basis: BasisName,
    #[serde(default = "default_cutoff")]
    pub cutoff: u32,
    #[serde(default)]
    pub n_g: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// states 0..states enter the table
    #[serde(default = "default_states")]
    pub states: usize,
    #[serde(default = "default_pmax")]
    pub p_max: u32,
}

fn default_cutoff() -> u32 {
    20
}

fn default_points() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_states() -> usize {
    4
}

fn default_pmax() -> u32 {
    2
}

impl Default for EigenSection {
    fn default() -> Self {
        EigenSection {
            basis: BasisName::Charge,
            cutoff: default_cutoff(),
            n_g: 0.0,
            points: default_points(),
            states: default_states(),
            p_max: default_pmax(),
        }
    }
}

impl EigenSection {
    pub fn basis(&self) -> Result<EigenBasis> {
        match self.basis {
            BasisName::Charge => Ok(EigenBasis::Charge { cutoff: self.cutoff, n_g: self.n_g }),
            BasisName::Grid => {
                if self.n_g != 0.0 {
                    bail!("[eigen] the grid basis has no charge offset; use basis = \"charge\" for n_g");
                }
                Ok(EigenBasis::Grid { points: self.points })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTaskName {
    Kerrcat,
    Beamsplitter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub task: SweepTaskName,
    pub axes: Vec<AxisSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintSection>,
    pub objective: ObjectiveSection,
    /// limit on the phase displacement; default 2 for circuits without a closed form
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_tilde_max: Option<f64>,
    /// mark Kerr-cat points with eps2 / omega_q above this as infeasible
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chaos_threshold: Option<f64>,
}

/// Axis by explicit `values` or by `from`, `to`, `count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub param: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    pub quantity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSection {
    pub quantity: String,
    #[serde(default = "yes")]
    pub maximize: bool,
}

/// Quantity names as written in configs and output headers, with the factor
/// taking the config unit to internal units.
pub const QUANTITIES: [(&str, Quantity, f64); 11] = [
    ("omega0_GHz", Quantity::Omega0, GHZ),
    ("pi_tilde", Quantity::PiTilde, 1.0),
    ("omega_q_GHz", Quantity::OmegaQ, GHZ),
    ("K_MHz", Quantity::KerrAbs, MHZ),
    ("eps2_MHz", Quantity::Eps2, MHZ),
    ("cat_size", Quantity::CatSize, 1.0),
    ("chaos_ratio", Quantity::ChaosRatio, 1.0),
    ("g_BS_MHz", Quantity::GBs, MHZ),
    ("chi_bc_Hz", Quantity::ChiAbs, HZ),
    ("sw_ratio", Quantity::SwRatio, 1.0),
    ("on_off_ratio", Quantity::OnOffRatio, 1.0),
];

const GHZ: f64 = std::f64::consts::TAU;
const MHZ: f64 = std::f64::consts::TAU * 1e-3;
const HZ: f64 = std::f64::consts::TAU * 1e-9;

fn quantity(name: &str) -> Result<(Quantity, f64)> {
    QUANTITIES
        .iter()
        .find(|q| q.0 == name)
        .map(|q| (q.1, q.2))
        .ok_or_else(|| {
            let names: Vec<&str> = QUANTITIES.iter().map(|q| q.0).collect();
            anyhow!("unknown quantity `{name}`; expected one of {}", names.join(", "))
        })
}

pub const SWEEP_PARAMS: [(&str, SweepParam); 7] = [
    ("phi_e_flux", SweepParam::PhiE),
    ("M", SweepParam::M),
    ("N", SweepParam::N),
    ("alpha", SweepParam::Alpha),
    ("x_J", SweepParam::XJ),
    ("pi", SweepParam::Pi),
    ("phi_ac0_rad", SweepParam::PhiAc0),
];

pub fn sweep_param_name(p: SweepParam) -> &'static str {
    SWEEP_PARAMS.iter().find(|s| s.1 == p).map(|s| s.0).unwrap_or("?")
}

impl AxisSection {
    fn to_axis(&self) -> Result<Axis> {
        let param = SWEEP_PARAMS
            .iter()
            .find(|s| s.0 == self.param)
            .map(|s| s.1)
            .ok_or_else(|| anyhow!("[sweep] unknown axis parameter `{}`", self.param))?;
        match (&self.values, self.from, self.to, self.count) {
            (Some(v), None, None, None) => Ok(Axis { param, values: v.clone() }),
            (None, Some(a), Some(b), Some(n)) => Ok(Axis::linspace(param, a, b, n)),
            _ => bail!("[sweep] axis `{}` needs either values or from, to, count", self.param),
        }
    }
}

impl RunConfig {
    pub fn model(&self) -> Result<(CircuitModel, f64)> {
        Ok((self.circuit.to_model()?, self.circuit.e_c()?))
    }

    pub fn drive(&self) -> Result<Drive> {
        self.drive.as_ref().ok_or_else(|| anyhow!("config needs a [drive] section"))?.resolve()
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let s = self.sweep.as_ref().ok_or_else(|| anyhow!("config needs a [sweep] section"))?;
        let (circuit, e_c) = self.model()?;
        let drive = match self.drive()? {
            Drive::Pi(pi) => SweepDrive::Capacitive { pi },
            Drive::PiTilde(_) => bail!("[drive] sweeps fix the charge displacement: give `pi` instead of `pi_tilde`"),
            Drive::Flux { phi_ac0, bare: false } => SweepDrive::Flux { phi_ac0 },
            Drive::Flux { bare: true, .. } => bail!("[drive] bare_amplitudes is not available in sweeps"),
        };
        let task = match s.task {
            SweepTaskName::Kerrcat => {
                let k = self.kerrcat.clone().unwrap_or_default();
                if k.omega_d_ghz.is_some() || k.phase != PhaseName::Auto {
                    bail!("[kerrcat] sweeps support only corrections and fix_detuning_zero");
                }
                SweepTask::KerrCat { corrections: k.corrections, fix_detuning_zero: k.fix_detuning_zero }
            }
            SweepTaskName::Beamsplitter => {
                let b = self.beamsplitter.as_ref().ok_or_else(|| anyhow!("beam-splitter sweep needs [beamsplitter]"))?;
                SweepTask::BeamSplitter {
                    omega_b: ghz(b.omega_b_ghz),
                    omega_c: ghz(b.omega_c_ghz),
                    g_b: mhz(b.g_b_mhz),
                    g_c: mhz(b.g_c_mhz),
                }
            }
        };
        let constraints = s
            .constraints
            .iter()
            .map(|c| {
                let (q, unit) = quantity(&c.quantity)?;
                Ok(Constraint { quantity: q, min: c.min.map(|v| v * unit), max: c.max.map(|v| v * unit) })
            })
            .collect::<Result<Vec<_>>>()?;
        let objective = Objective { quantity: quantity(&s.objective.quantity)?.0, maximize: s.objective.maximize };
        Ok(SweepSpec {
            task,
            circuit,
            e_c,
            drive,
            axes: s.axes.iter().map(AxisSection::to_axis).collect::<Result<_>>()?,
            constraints,
            objective,
            s_max: self.numerics.s_max,
            pi_tilde_max: s.pi_tilde_max,
        })
    }

    pub fn chaos_threshold(&self) -> Option<f64> {
        self.sweep.as_ref().and_then(|s| s.chaos_threshold)
    }
}

pub const DEFAULT_THRESHOLD: f64 = DEFAULT_CHAOS_THRESHOLD;

/// Factor from internal units to the unit in the quantity's name.
pub fn output_scale(q: Quantity) -> f64 {
    QUANTITIES.iter().find(|x| x.1 == q).map(|x| 1.0 / x.2).unwrap_or(1.0)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

/// Read a TOML config, or a JSON config or JSON output (which embeds its config).
pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text, path.extension().and_then(|e| e.to_str()) == Some("json"))
        .with_context(|| format!("invalid config {}", path.display()))
}

pub fn parse(text: &str, json: bool) -> Result<RunConfig> {
    if json {
        let mut v: serde_json::Value = serde_json::from_str(text)?;
        if let Some(inner) = v.get_mut("config") {
            v = inner.take();
        }
        Ok(serde_json::from_value(v)?)
    } else {
        Ok(toml::from_str(text)?)
    }
}

pub fn to_toml(cfg: &RunConfig) -> Result<String> {
    Ok(toml::to_string(cfg)?)
}
