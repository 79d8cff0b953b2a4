//! Constrained grid scans over circuit and drive parameters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{mode_frame, CircuitModel};
use crate::effective::{
    beam_splitter_with_frame, kerr_cat, BeamSplitterOptions, BeamSplitterParams, BeamSplitterSetup, CouplerDrive,
    KerrCatDrive, KerrCatOptions, KerrCatParams,
};
use crate::error::{Error, Result};
use crate::sc::EngineChoice;
use crate::units::flux_phase;

/// Free parameters a sweep can scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// external flux (dc bias for SQUIDs), flux quanta
    PhiE,
    M,
    N,
    Alpha,
    XJ,
    /// capacitive drive, Pi = n_zpf Pi~
    Pi,
    /// flux modulation amplitude, radians
    PhiAc0,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::PhiE => "phi_e",
            SweepParam::M => "m",
            SweepParam::N => "n",
            SweepParam::Alpha => "alpha",
            SweepParam::XJ => "x_j",
            SweepParam::Pi => "pi",
            SweepParam::PhiAc0 => "phi_ac0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linspace(param: SweepParam, lo: f64, hi: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
        };
        Axis { param, values }
    }
}

/// Quantities available to constraints and objectives; rates in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Omega0,
    PiTilde,
    OmegaQ,
    KerrAbs,
    Eps2,
    CatSize,
    ChaosRatio,
    GBs,
    ChiAbs,
    SwRatio,
    /// g_BS / |chi_bc|
    OnOffRatio,
}

impl Quantity {
    /// 0: drive bound, 1: needs the mode frame, 2: needs supercoefficients
    fn cost(self) -> u8 {
        match self {
            Quantity::PiTilde => 0,
            Quantity::Omega0 => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub quantity: Quantity,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

impl Constraint {
    pub fn at_least(quantity: Quantity, min: f64) -> Self {
        Constraint { quantity, min: Some(min), max: None }
    }

    pub fn at_most(quantity: Quantity, max: f64) -> Self {
        Constraint { quantity, min: None, max: Some(max) }
    }

    fn holds(&self, v: f64) -> bool {
        v.is_finite() && self.min.map_or(true, |m| v >= m) && self.max.map_or(true, |m| v <= m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    pub quantity: Quantity,
    #[serde(default = "yes")]
    pub maximize: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepDrive {
    Capacitive { pi: f64 },
    Flux { phi_ac0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepTask {
    KerrCat { corrections: bool, fix_detuning_zero: bool },
    /// cavity side of the beam-splitter; the coupler is the sweep circuit
    BeamSplitter { omega_b: f64, omega_c: f64, g_b: f64, g_c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub task: SweepTask,
    pub circuit: CircuitModel,
    pub e_c: f64,
    pub drive: SweepDrive,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
    pub s_max: u32,
    /// drive limit on Pi~; `None` picks 2 for series-only circuits and no limit otherwise
    #[serde(default)]
    pub pi_tilde_max: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one axis".into()));
        }
        for a in &self.axes {
            if a.values.is_empty() || a.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("axis {} needs finite values", a.param.name())));
            }
        }
        if self.s_max < 3 {
            return Err(Error::InvalidParameter("s_max must be at least 3".into()));
        }
        self.circuit.validate()
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of grid point `i`, first axis slowest.
    pub fn point(&self, mut i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            let n = a.values.len();
            out[k] = a.values[i % n];
            i /= n;
        }
        out
    }

    fn drive_limit(&self) -> Option<f64> {
        match self.pi_tilde_max {
            Some(v) => Some(v),
            None if self.circuit.cosine_terms().is_none() => Some(2.0),
            None => None,
        }
    }
}

fn apply(model: &mut CircuitModel, drive: &mut SweepDrive, param: SweepParam, v: f64) -> Result<()> {
    let count = |v: f64| -> Result<u32> {
        if v >= 1.0 && (v - v.round()).abs() < 1e-9 {
            Ok(v.round() as u32)
        } else {
            Err(Error::InvalidParameter(format!("{} must be a positive integer (got {v})", param.name())))
        }
    };
    let unsupported = || Error::InvalidParameter(format!("parameter {} does not apply to this circuit", param.name()));
    match param {
        SweepParam::Pi => match drive {
            SweepDrive::Capacitive { pi } => *pi = v,
            SweepDrive::Flux { .. } => return Err(Error::InvalidParameter("pi axis needs a capacitive drive".into())),
        },
        SweepParam::PhiAc0 => match drive {
            SweepDrive::Flux { phi_ac0 } => *phi_ac0 = v,
            SweepDrive::Capacitive { .. } => return Err(Error::InvalidParameter("phi_ac0 axis needs a flux drive".into())),
        },
        _ => {
            let snail = match model {
                CircuitModel::SnailArray(s) => Some(s),
                CircuitModel::SnailArrayStrayL(s) => Some(&mut s.snail),
                _ => None,
            };
            if let Some(s) = snail {
                match param {
                    SweepParam::PhiE => s.phi_e = flux_phase(v),
                    SweepParam::M => s.m = count(v)?,
                    SweepParam::N => s.n = count(v)?,
                    SweepParam::Alpha => s.alpha = v,
                    SweepParam::XJ => match model {
                        CircuitModel::SnailArrayStrayL(st) => st.x_j = v,
                        _ => return Err(unsupported()),
                    },
                    _ => unreachable!(),
                }
            } else if let CircuitModel::SquidArray(s) = model {
                match param {
                    SweepParam::PhiE => s.phi_dc = flux_phase(v),
                    SweepParam::M => s.m = count(v)?,
                    SweepParam::Alpha => s.alpha = v,
                    _ => return Err(unsupported()),
                }
            } else {
                return Err(unsupported());
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EffectiveRecord {
    KerrCat(KerrCatParams),
    BeamSplitter(BeamSplitterParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub params: Vec<f64>,
    pub omega0: Option<f64>,
    pub pi_tilde: Option<f64>,
    pub effective: Option<EffectiveRecord>,
    pub feasible: bool,
    /// failed constraints and evaluation errors
    pub violations: Vec<String>,
    pub objective: Option<f64>,
}

impl PointRecord {
    pub fn quantity(&self, q: Quantity) -> Option<f64> {
        match q {
            Quantity::Omega0 => return self.omega0,
            Quantity::PiTilde => return self.pi_tilde,
            _ => {}
        }
        match self.effective.as_ref()? {
            EffectiveRecord::KerrCat(k) => match q {
                Quantity::OmegaQ => Some(k.omega_q),
                Quantity::KerrAbs => Some(k.kerr.abs()),
                Quantity::Eps2 => Some(k.eps2),
                Quantity::CatSize => Some(k.cat_size),
                Quantity::ChaosRatio => Some(k.chaos_ratio),
                _ => None,
            },
            EffectiveRecord::BeamSplitter(b) => match q {
                Quantity::GBs => Some(b.g_bs),
                Quantity::ChiAbs => Some(b.chi_bc.abs()),
                Quantity::SwRatio => Some(b.g_ab_ratio.max(b.g_ac_ratio)),
                Quantity::OnOffRatio => Some((b.g_bs / b.chi_bc).abs()),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param_names: Vec<String>,
    pub records: Vec<PointRecord>,
    /// grid index of the optimum among feasible points
    pub best: Option<usize>,
}

impl SweepResult {
    pub fn best(&self) -> Result<&PointRecord> {
        self.best.map(|i| &self.records[i]).ok_or(Error::NoFeasiblePoint)
    }

    pub fn feasible_count(&self) -> usize {
        self.records.iter().filter(|r| r.feasible).count()
    }

    /// Re-apply a constraint list to stored records without recomputing them.
    pub fn refilter(&self, constraints: &[Constraint], objective: &Objective) -> SweepResult {
        let records = self
            .records
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r.feasible {
                    r.violations = check(&r, constraints, 0..=2);
                    r.feasible = r.violations.is_empty();
                }
                r.objective = if r.feasible { r.quantity(objective.quantity) } else { None };
                r
            })
            .collect::<Vec<_>>();
        let best = argmax(&records, objective.maximize);
        SweepResult { param_names: self.param_names.clone(), records, best }
    }
}

fn check(r: &PointRecord, constraints: &[Constraint], costs: std::ops::RangeInclusive<u8>) -> Vec<String> {
    let mut sorted: Vec<&Constraint> = constraints.iter().filter(|c| costs.contains(&c.quantity.cost())).collect();
    sorted.sort_by_key(|c| c.quantity.cost());
    let mut out = Vec::new();
    for c in sorted {
        match r.quantity(c.quantity) {
            Some(v) if c.holds(v) => {}
            Some(v) => out.push(format!("{:?}={v}", c.quantity)),
            None => out.push(format!("{:?} unavailable", c.quantity)),
        }
    }
    out
}

fn argmax(records: &[PointRecord], maximize: bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in records {
        if let (true, Some(v)) = (r.feasible, r.objective) {
            if !v.is_finite() {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, b)) => if maximize { v > b } else { v < b },
            };
            if better {
                best = Some((r.index, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Evaluate a single grid point.
pub fn evaluate_point(spec: &SweepSpec, index: usize) -> PointRecord {
    let params = spec.point(index);
    let mut rec = PointRecord {
        index,
        params: params.clone(),
        omega0: None,
        pi_tilde: None,
        effective: None,
        feasible: false,
        violations: Vec::new(),
        objective: None,
    };
    let mut model = spec.circuit.clone();
    let mut drive = spec.drive;
    for (a, v) in spec.axes.iter().zip(&params) {
        if let Err(e) = apply(&mut model, &mut drive, a.param, *v) {
            rec.violations.push(e.to_string());
            return rec;
        }
    }
    if let Err(e) = model.validate() {
        rec.violations.push(e.to_string());
        return rec;
    }
    let frame = match mode_frame(&model, spec.e_c, spec.s_max.max(8) + 2) {
        Ok(f) => f,
        Err(e) => {
            rec.violations.push(e.to_string());
            return rec;
        }
    };
    rec.omega0 = Some(frame.omega0);
    if let SweepDrive::Capacitive { pi } = drive {
        rec.pi_tilde = Some(pi / frame.n_zpf);
    }
    if let (Some(limit), Some(t)) = (spec.drive_limit(), rec.pi_tilde) {
        if t.abs() > limit {
            rec.violations.push(format!("PiTilde={t} above drive limit {limit}"));
        }
    }
    rec.violations.extend(check(&rec, &spec.constraints, 0..=1));
    if !rec.violations.is_empty() {
        return rec;
    }
    let engine = EngineChoice::Auto { s_max: spec.s_max };
    let effective = match &spec.task {
        SweepTask::KerrCat { corrections, fix_detuning_zero } => {
            let kdrive = match drive {
                SweepDrive::Capacitive { pi } => KerrCatDrive::Capacitive { pi_tilde: pi / frame.n_zpf },
                SweepDrive::Flux { phi_ac0 } => KerrCatDrive::Flux { phi_ac0 },
            };
            let opts = KerrCatOptions {
                engine,
                corrections: *corrections,
                fix_detuning_zero: *fix_detuning_zero,
                ..Default::default()
            };
            kerr_cat(&model, &frame, kdrive, &opts).map(EffectiveRecord::KerrCat)
        }
        SweepTask::BeamSplitter { omega_b, omega_c, g_b, g_c } => {
            let setup = BeamSplitterSetup {
                coupler: model.clone(),
                e_c: spec.e_c,
                omega_b: *omega_b,
                omega_c: *omega_c,
                g_b: *g_b,
                g_c: *g_c,
            };
            let cdrive = match drive {
                SweepDrive::Capacitive { pi } => CouplerDrive::Capacitive { pi },
                SweepDrive::Flux { phi_ac0 } => CouplerDrive::Flux { phi_ac0 },
            };
            let opts = BeamSplitterOptions { engine, ..Default::default() };
            beam_splitter_with_frame(&setup, &frame, cdrive, &opts).map(EffectiveRecord::BeamSplitter)
        }
    };
    match effective {
        Ok(e) => {
            if let EffectiveRecord::BeamSplitter(b) = &e {
                rec.pi_tilde = Some(b.pi_tilde);
            }
            rec.effective = Some(e);
        }
        Err(e) => {
            rec.violations.push(e.to_string());
            return rec;
        }
    }
    rec.violations.extend(check(&rec, &spec.constraints, 2..=2));
    rec.feasible = rec.violations.is_empty();
    if rec.feasible {
        rec.objective = rec.quantity(spec.objective.quantity);
    }
    rec
}

fn finish(spec: &SweepSpec, records: Vec<PointRecord>) -> SweepResult {
    let best = argmax(&records, spec.objective.maximize);
    SweepResult { param_names: spec.axes.iter().map(|a| a.param.name().to_string()).collect(), records, best }
}

/// Evaluate every grid point in parallel; records come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let records = (0..spec.point_count()).into_par_iter().map(|i| evaluate_point(spec, i)).collect();
    Ok(finish(spec, records))
}

pub fn run_sweep_sequential(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let records = (0..spec.point_count()).map(|i| evaluate_point(spec, i)).collect();
    Ok(finish(spec, records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosFiltered {
    pub result: SweepResult,
    pub best_before: Option<usize>,
    pub best_after: Option<usize>,
    pub removed: usize,
}

/// Mark Kerr-cat points with eps2 / omega_q above `threshold` as infeasible.
pub fn chaos_filter(result: &SweepResult, objective: &Objective, threshold: f64) -> ChaosFiltered {
    let before = result.feasible_count();
    let filtered = result.refilter(&[Constraint::at_most(Quantity::ChaosRatio, threshold)], objective);
    ChaosFiltered {
        removed: before - filtered.feasible_count(),
        best_before: result.best,
        best_after: filtered.best,
        result: filtered,
    }
}

pub const DEFAULT_CHAOS_THRESHOLD: f64 = 0.025;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{SnailArray, SnailArrayStrayL};
    use crate::units::{charging_energy_ghz, ghz, josephson_energy_ghz, mhz};

    fn spec(points: usize) -> SweepSpec {
        SweepSpec {
            task: SweepTask::KerrCat { corrections: true, fix_detuning_zero: true },
            circuit: CircuitModel::SnailArrayStrayL(SnailArrayStrayL {
                snail: SnailArray { m: 1, n: 3, alpha: 0.11, e_j: ghz(josephson_energy_ghz(0.8)), phi_e: 0.0 },
                x_j: 100.0,
            }),
            e_c: ghz(charging_energy_ghz(0.32)),
            drive: SweepDrive::Capacitive { pi: 0.5 },
            axes: vec![Axis::linspace(SweepParam::PhiE, 0.2, 0.45, points)],
            constraints: vec![Constraint::at_least(Quantity::KerrAbs, mhz(1.0))],
            objective: Objective { quantity: Quantity::CatSize, maximize: true },
            s_max: 8,
            pi_tilde_max: None,
        }
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let mut s = spec(3);
        s.axes.push(Axis { param: SweepParam::Alpha, values: vec![0.1, 0.2] });
        assert_eq!(s.point(0), vec![0.2, 0.1]);
        assert_eq!(s.point(1), vec![0.2, 0.2]);
        assert_eq!(s.point(2), vec![0.325, 0.1]);
        assert_eq!(s.point_count(), 6);
    }

    #[test]
    fn single_point_equals_direct_call() {
        let s = spec(1);
        let r = run_sweep(&s).unwrap();
        let mut model = s.circuit.clone();
        if let CircuitModel::SnailArrayStrayL(st) = &mut model {
            st.snail.phi_e = flux_phase(0.2);
        }
        let frame = mode_frame(&model, s.e_c, 10).unwrap();
        let opts = KerrCatOptions { engine: EngineChoice::Auto { s_max: 8 }, ..Default::default() };
        let direct = kerr_cat(&model, &frame, KerrCatDrive::Capacitive { pi_tilde: 0.5 / frame.n_zpf }, &opts).unwrap();
        assert_eq!(r.records[0].effective, Some(EffectiveRecord::KerrCat(direct)));
    }

    #[test]
    fn parallel_matches_sequential() {
        let s = spec(12);
        assert_eq!(run_sweep(&s).unwrap(), run_sweep_sequential(&s).unwrap());
    }

    #[test]
    fn chaos_filter_identity_and_zero_threshold() {
        let s = spec(8);
        let r = run_sweep(&s).unwrap();
        let loose = chaos_filter(&r, &s.objective, 1e9);
        assert_eq!(loose.result, r);
        assert_eq!(loose.removed, 0);
        let strict = chaos_filter(&r, &s.objective, 0.0);
        assert_eq!(strict.result.feasible_count(), 0);
        assert!(strict.best_after.is_none());
        assert!(matches!(strict.result.best(), Err(Error::NoFeasiblePoint)));
    }

    #[test]
    fn infeasible_points_are_kept() {
        let mut s = spec(6);
        s.constraints.push(Constraint::at_least(Quantity::KerrAbs, ghz(10.0)));
        let r = run_sweep(&s).unwrap();
        assert_eq!(r.records.len(), 6);
        assert_eq!(r.feasible_count(), 0);
        assert!(r.records.iter().all(|p| !p.violations.is_empty()));
    }

    #[test]
    fn wrong_axis_for_circuit() {
        let mut s = spec(2);
        s.circuit = CircuitModel::SnailArray(SnailArray { m: 1, n: 3, alpha: 0.11, e_j: 100.0, phi_e: 1.0 });
        s.axes.push(Axis { param: SweepParam::XJ, values: vec![1.0] });
        let r = run_sweep(&s).unwrap();
        assert!(r.records.iter().all(|p| !p.feasible));
    }
}
