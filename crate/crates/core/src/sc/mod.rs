//! Supercoefficients C_{nl,p}: amplitudes of the normal-ordered terms
//! a^dag^n a^(n+l) e^{+-i p omega_d t} of a driven nonlinear mode.
//!
//! Values are unhalved. The Hamiltonian carries each amplitude once per
//! operator ordering and once per drive exponential, so the coefficient of
//! a static a^dag^n a^n term is exactly C_{n0,0}.

mod closed;
mod drive;
mod series;

pub use closed::squid_compact_sc;
pub use drive::{
    flux_correction_factors, flux_drive_amplitudes, flux_drive_amplitudes_bare, CapacitiveDrive, DriveConfig, FluxDrive,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{term_coeffs, CircuitModel, ModeFrame};
use crate::error::{Error, Result};
use crate::special::factorial;

pub const DEFAULT_S_MAX: u32 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScIndex {
    pub n: u32,
    pub l: u32,
    pub p: u32,
}

impl ScIndex {
    pub const fn new(n: u32, l: u32, p: u32) -> Self {
        ScIndex { n, l, p }
    }
}

/// Per-mode operator index (n, l).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub n: u32,
    pub l: u32,
}

/// Coupler mode a and cavity modes b, c sharing one drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreeModeIndex {
    pub a: ModeIndex,
    pub b: ModeIndex,
    pub c: ModeIndex,
    pub p: u32,
}

impl ThreeModeIndex {
    /// Index written as `C_{na la, nb lb, nc lc, p}`.
    pub const fn new(na: u32, la: u32, nb: u32, lb: u32, nc: u32, lc: u32, p: u32) -> Self {
        ThreeModeIndex {
            a: ModeIndex { n: na, l: la },
            b: ModeIndex { n: nb, l: lb },
            c: ModeIndex { n: nc, l: lc },
            p,
        }
    }

    /// Number of cavity operators, 2 n_b + l_b + 2 n_c + l_c.
    pub fn cavity_order(&self) -> u32 {
        2 * self.b.n + self.b.l + 2 * self.c.n + self.c.l
    }
}

/// Single mode with one harmonic index per drive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiDriveIndex {
    pub n: u32,
    pub l: u32,
    pub p: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Series,
    Closed,
    Oracle,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Series => "series",
            Engine::Closed => "closed",
            Engine::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScValue<I = ScIndex> {
    pub index: I,
    /// rad/ns
    pub value: f64,
    pub engine: Engine,
    /// last shell magnitude / |value| (series engine only)
    pub convergence: Option<f64>,
}

/// Engine selection for pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum EngineChoice {
    Series { s_max: u32 },
    Closed,
    /// closed form when the model admits one, series otherwise
    Auto { s_max: u32 },
}

impl Default for EngineChoice {
    fn default() -> Self {
        EngineChoice::Series { s_max: DEFAULT_S_MAX }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub s_max: u32,
    /// fail with NotConverged above this last-shell ratio
    pub fail_above: Option<f64>,
    pub warn_above: f64,
}

impl SeriesOptions {
    pub fn new(s_max: u32) -> Self {
        SeriesOptions { s_max, fail_above: None, warn_above: 1e-6 }
    }
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions::new(DEFAULT_S_MAX)
    }
}

/// Drive displacements as seen by the potential.
///
/// `capacitive` holds one effective displacement per capacitive drive; `flux`
/// holds one displacement per cosine term of the model for a single flux
/// drive. Harmonic indices are ordered capacitive first, flux last.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Displacement {
    pub capacitive: Vec<f64>,
    pub flux: Option<Vec<f64>>,
}

impl Displacement {
    pub fn capacitive(pi_tilde: f64) -> Self {
        Displacement { capacitive: vec![pi_tilde], flux: None }
    }

    pub fn flux(per_term: Vec<f64>) -> Self {
        Displacement { capacitive: Vec::new(), flux: Some(per_term) }
    }

    pub fn drive_count(&self) -> usize {
        self.capacitive.len() + usize::from(self.flux.is_some())
    }
}

/// Operator structure of one SC after the index has been lowered.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TermShape {
    /// total operator count sum(2 n + l)
    pub op_order: u32,
    /// prod n! (n + l)!
    pub denom: f64,
    /// prod over cavity modes of xi^(2n + l)
    pub mode_factor: f64,
    /// 1 + sum xi^2
    pub gauss_scale: f64,
    pub p: Vec<u32>,
}

impl TermShape {
    pub fn single(n: u32, l: u32, p: Vec<u32>) -> Self {
        TermShape {
            op_order: 2 * n + l,
            denom: factorial(n) * factorial(n + l),
            mode_factor: 1.0,
            gauss_scale: 1.0,
            p,
        }
    }

    pub fn three_mode(idx: &ThreeModeIndex, xi_b: f64, xi_c: f64) -> Self {
        let ord = |m: ModeIndex| 2 * m.n + m.l;
        let den = |m: ModeIndex| factorial(m.n) * factorial(m.n + m.l);
        TermShape {
            op_order: ord(idx.a) + ord(idx.b) + ord(idx.c),
            denom: den(idx.a) * den(idx.b) * den(idx.c),
            mode_factor: xi_b.powi(ord(idx.b) as i32) * xi_c.powi(ord(idx.c) as i32),
            gauss_scale: 1.0 + xi_b * xi_b + xi_c * xi_c,
            p: vec![idx.p],
        }
    }

    pub fn p_total(&self) -> u32 {
        self.p.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SeriesChannel {
    /// c_0 .. c_{n_max}
    pub coeffs: Vec<f64>,
    pub drives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CosineChannel {
    pub amplitude: f64,
    pub freq: f64,
    /// freq * phi0 + phase
    pub angle: f64,
    pub drives: Vec<f64>,
}

/// A driven mode prepared for SC evaluation by either engine.
#[derive(Debug, Clone, PartialEq)]
pub struct ScProblem {
    e_j: f64,
    phi_zpf: f64,
    n_drives: usize,
    series: Vec<SeriesChannel>,
    cosine: Option<Vec<CosineChannel>>,
}

impl ScProblem {
    pub fn new(model: &CircuitModel, frame: &ModeFrame, disp: &Displacement) -> Result<Self> {
        let terms = model.cosine_terms();
        let cap = disp.capacitive.clone();
        let (series, cosine) = match &disp.flux {
            None => {
                let series = vec![SeriesChannel { coeffs: frame.coeffs.clone(), drives: cap.clone() }];
                let cosine = terms.map(|ts| {
                    ts.iter()
                        .map(|t| CosineChannel {
                            amplitude: t.amplitude,
                            freq: t.freq,
                            angle: t.freq * frame.phi0 + t.phase,
                            drives: cap.clone(),
                        })
                        .collect()
                });
                (series, cosine)
            }
            Some(per_term) => {
                let ts = terms.ok_or_else(|| {
                    Error::UnsupportedModel("flux drive requires a cosine-family potential".into())
                })?;
                if ts.len() != per_term.len() {
                    return Err(Error::InvalidParameter(format!(
                        "flux displacement has {} entries for {} potential terms",
                        per_term.len(),
                        ts.len()
                    )));
                }
                let mut series = Vec::new();
                let mut cosine = Vec::new();
                for (t, &pi) in ts.iter().zip(per_term) {
                    let mut drives = cap.clone();
                    drives.push(pi);
                    series.push(SeriesChannel {
                        coeffs: term_coeffs(t, frame.phi0, frame.n_max(), frame.e_j),
                        drives: drives.clone(),
                    });
                    cosine.push(CosineChannel {
                        amplitude: t.amplitude,
                        freq: t.freq,
                        angle: t.freq * frame.phi0 + t.phase,
                        drives,
                    });
                }
                (series, Some(cosine))
            }
        };
        Ok(ScProblem { e_j: frame.e_j, phi_zpf: frame.phi_zpf, n_drives: disp.drive_count(), series, cosine })
    }

    /// Capacitive single-drive problem built from the frame alone (series engine only).
    pub fn from_frame(frame: &ModeFrame, pi_tilde: f64) -> Self {
        ScProblem {
            e_j: frame.e_j,
            phi_zpf: frame.phi_zpf,
            n_drives: 1,
            series: vec![SeriesChannel { coeffs: frame.coeffs.clone(), drives: vec![pi_tilde] }],
            cosine: None,
        }
    }

    pub fn has_closed_form(&self) -> bool {
        self.cosine.is_some()
    }

    pub fn drive_count(&self) -> usize {
        self.n_drives
    }

    fn check_drives(&self, shape: &TermShape) -> Result<()> {
        if shape.p.len() != self.n_drives {
            return Err(Error::InvalidParameter(format!(
                "index carries {} harmonic orders for {} drives",
                shape.p.len(),
                self.n_drives
            )));
        }
        Ok(())
    }

    pub(crate) fn eval_series(&self, shape: &TermShape, opts: &SeriesOptions) -> Result<(f64, f64)> {
        self.check_drives(shape)?;
        let need = opts.s_max as usize;
        if self.series.iter().any(|c| c.coeffs.len() <= need) {
            return Err(Error::InvalidParameter(format!(
                "frame carries c_n up to n = {}, series needs {need}",
                self.series[0].coeffs.len() - 1
            )));
        }
        let mut value = 0.0;
        let mut last = 0.0;
        for ch in &self.series {
            let (v, l) = series::evaluate(ch, shape, self.e_j, self.phi_zpf, opts.s_max);
            value += v;
            last += l;
        }
        let ratio = convergence_ratio(last, value);
        if let Some(tol) = opts.fail_above {
            if ratio > tol {
                return Err(Error::NotConverged { ratio, tolerance: tol });
            }
        }
        if ratio > opts.warn_above {
            log::warn!("series shell ratio {ratio:e} above {:e}", opts.warn_above);
        }
        Ok((value, ratio))
    }

    pub(crate) fn eval_closed(&self, shape: &TermShape) -> Result<f64> {
        self.check_drives(shape)?;
        let channels = self
            .cosine
            .as_ref()
            .ok_or_else(|| Error::UnsupportedModel("closed form needs a cosine-family potential".into()))?;
        Ok(channels.iter().map(|c| closed::evaluate(c, shape, self.phi_zpf)).sum())
    }

    fn eval(&self, shape: &TermShape, engine: EngineChoice) -> Result<(f64, Engine, Option<f64>)> {
        match engine {
            EngineChoice::Closed => Ok((self.eval_closed(shape)?, Engine::Closed, None)),
            EngineChoice::Auto { .. } if self.has_closed_form() => {
                Ok((self.eval_closed(shape)?, Engine::Closed, None))
            }
            EngineChoice::Series { s_max } | EngineChoice::Auto { s_max } => {
                let (v, r) = self.eval_series(shape, &SeriesOptions::new(s_max))?;
                Ok((v, Engine::Series, Some(r)))
            }
        }
    }

    pub fn series(&self, idx: ScIndex, opts: &SeriesOptions) -> Result<ScValue> {
        let (value, ratio) = self.eval_series(&TermShape::single(idx.n, idx.l, vec![idx.p]), opts)?;
        Ok(ScValue { index: idx, value, engine: Engine::Series, convergence: Some(ratio) })
    }

    pub fn closed(&self, idx: ScIndex) -> Result<ScValue> {
        let value = self.eval_closed(&TermShape::single(idx.n, idx.l, vec![idx.p]))?;
        Ok(ScValue { index: idx, value, engine: Engine::Closed, convergence: None })
    }

    pub fn evaluate(&self, idx: ScIndex, engine: EngineChoice) -> Result<ScValue> {
        let (value, engine, convergence) = self.eval(&TermShape::single(idx.n, idx.l, vec![idx.p]), engine)?;
        Ok(ScValue { index: idx, value, engine, convergence })
    }

    pub fn multidrive(&self, idx: &MultiDriveIndex, engine: EngineChoice) -> Result<ScValue<MultiDriveIndex>> {
        let (value, engine, convergence) = self.eval(&TermShape::single(idx.n, idx.l, idx.p.clone()), engine)?;
        Ok(ScValue { index: idx.clone(), value, engine, convergence })
    }

    pub fn three_mode(
        &self,
        idx: ThreeModeIndex,
        xi_b: f64,
        xi_c: f64,
        engine: EngineChoice,
    ) -> Result<ScValue<ThreeModeIndex>> {
        let (value, engine, convergence) = self.eval(&TermShape::three_mode(&idx, xi_b, xi_c), engine)?;
        Ok(ScValue { index: idx, value, engine, convergence })
    }

    /// All (n, l, p) with 2n + l <= max_order and p <= max_p, ordered by (p, l, n).
    pub fn table(&self, max_order: u32, max_p: u32, engine: EngineChoice) -> Result<Vec<ScValue>> {
        index_set(max_order, max_p).into_par_iter().map(|idx| self.evaluate(idx, engine)).collect()
    }
}

fn convergence_ratio(last: f64, value: f64) -> f64 {
    if last == 0.0 {
        0.0
    } else if value == 0.0 {
        f64::INFINITY
    } else {
        (last / value).abs()
    }
}

pub fn index_set(max_order: u32, max_p: u32) -> Vec<ScIndex> {
    let mut v = Vec::new();
    for p in 0..=max_p {
        for l in 0..=max_order {
            for n in 0..=(max_order - l) / 2 {
                v.push(ScIndex { n, l, p });
            }
        }
    }
    v
}

/// Truncated-series SC for a single capacitive drive.
pub fn sc_series(frame: &ModeFrame, pi_tilde: f64, idx: ScIndex, s_max: u32) -> Result<ScValue> {
    ScProblem::from_frame(frame, pi_tilde).series(idx, &SeriesOptions::new(s_max))
}

/// Closed-form SC for a cosine-family model.
pub fn sc_closed(model: &CircuitModel, frame: &ModeFrame, disp: &Displacement, idx: ScIndex) -> Result<ScValue> {
    ScProblem::new(model, frame, disp)?.closed(idx)
}

pub fn sc_higher_harmonics(
    model: &CircuitModel,
    frame: &ModeFrame,
    disp: &Displacement,
    idx: ScIndex,
) -> Result<ScValue> {
    match model {
        CircuitModel::HigherHarmonics(_) => sc_closed(model, frame, disp, idx),
        _ => Err(Error::UnsupportedModel("expected a higher-harmonics model".into())),
    }
}

pub fn sc_multidrive(
    model: &CircuitModel,
    frame: &ModeFrame,
    disp: &Displacement,
    idx: &MultiDriveIndex,
    engine: EngineChoice,
) -> Result<ScValue<MultiDriveIndex>> {
    if disp.flux.is_some() && disp.flux.as_ref().map_or(0, |f| f.len()) == 0 {
        return Err(Error::InvalidParameter("empty flux displacement".into()));
    }
    ScProblem::new(model, frame, disp)?.multidrive(idx, engine)
}

pub fn sc_three_mode(
    model: &CircuitModel,
    frame: &ModeFrame,
    disp: &Displacement,
    xi_b: f64,
    xi_c: f64,
    idx: ThreeModeIndex,
    engine: EngineChoice,
) -> Result<ScValue<ThreeModeIndex>> {
    ScProblem::new(model, frame, disp)?.three_mode(idx, xi_b, xi_c, engine)
}
