//! Self-consistency checks across the three computation paths.

use anyhow::Result;
use rayon::prelude::*;

use supercoeff_core::circuit::{mode_frame, CircuitModel, ModeFrame, SnailArray, SquidArray, TwoCosine};
use supercoeff_core::effective::{kerr_cat, KerrCatDrive, KerrCatOptions};
use supercoeff_core::oracle::{extract_sc, OracleOptions};
use supercoeff_core::presets::kerr_cat_presets;
use supercoeff_core::sc::{index_set, Displacement, EngineChoice, ScProblem, SeriesOptions};
use supercoeff_core::units::{flux_phase, to_ghz, to_mhz};

use crate::config::RunConfig;
use crate::output::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn from_errors(name: String, errors: &[f64], tolerance: f64) -> Check {
        let worst = errors.iter().fold(0.0f64, |a, e| a.max(*e));
        Check { name, cases: errors.len(), worst, tolerance, pass: errors.iter().all(|e| e.is_finite() && *e <= tolerance) }
    }

    fn failed(name: String, why: &str) -> Check {
        log::error!("{name}: {why}");
        Check { name, cases: 0, worst: f64::NAN, tolerance: 0.0, pass: false }
    }
}

fn transmon(e_j: f64) -> CircuitModel {
    CircuitModel::TwoCosine(TwoCosine { a: -e_j, b: 0.0, a1: 1.0, b1: 1.0, a2: 0.0, b2: 0.0, phi_e: 0.0 })
}

fn snail(m: u32, n: u32, alpha: f64, phi_e: f64) -> CircuitModel {
    CircuitModel::SnailArray(SnailArray { m, n, alpha, e_j: 20.0, phi_e: flux_phase(phi_e) })
}

fn squid(m: u32, alpha: f64, phi_dc: f64) -> CircuitModel {
    CircuitModel::SquidArray(SquidArray { m, alpha, e_j: 20.0, r_a: 0.9, r_b: 0.1, phi_dc: flux_phase(phi_dc) })
}

fn test_frame(model: &CircuitModel, n_max: u32) -> Result<ModeFrame> {
    let mut f = mode_frame(model, 0.1, n_max)?;
    f.phi_zpf = 0.3;
    Ok(f)
}

/// Relative oracle error; coefficients that vanish by symmetry are compared
/// on an absolute scale.
fn oracle_errors(model: &CircuitModel, frame: &ModeFrame, pi_tilde: f64, opts: &OracleOptions, engine: EngineChoice) -> Result<Vec<f64>> {
    let ex = extract_sc(model, frame, pi_tilde, opts)?;
    let prob = ScProblem::new(model, frame, &Displacement::capacitive(pi_tilde))?;
    ex.values
        .iter()
        .map(|v| {
            let c = prob.evaluate(v.index, engine)?.value;
            let floor = 1e-12 * frame.e_j;
            Ok(if c.abs() <= floor { (v.value - c).abs() / (1e-4 * frame.e_j) } else { (v.value - c).abs() / c.abs() })
        })
        .collect()
}

fn oracle_check(label: &str, model: &CircuitModel, pis: &[f64], opts: &OracleOptions, engine: EngineChoice) -> Vec<Check> {
    pis.par_iter()
        .map(|&pi| {
            let name = format!("oracle {label} pi_tilde={pi}");
            match test_frame(model, 24).and_then(|f| oracle_errors(model, &f, pi, opts, engine)) {
                Ok(e) => Check::from_errors(name, &e, 1e-6),
                Err(e) => Check::failed(name, &e.to_string()),
            }
        })
        .collect()
}

fn is_even_about_minimum(frame: &ModeFrame) -> bool {
    let scale = frame.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    frame.coeffs.iter().skip(1).step_by(2).all(|c| c.abs() <= 1e-12 * scale)
}

/// Series against closed form; returns per-coefficient error in units of the
/// tolerance, so 1 is the pass line.
fn engine_errors(model: &CircuitModel, phi_zpf: f64, pi_tilde: f64) -> Result<Vec<f64>> {
    let mut frame = mode_frame(model, 1.0, 44)?;
    frame.phi_zpf = phi_zpf;
    let prob = ScProblem::new(model, &frame, &Displacement::capacitive(pi_tilde))?;
    let even = is_even_about_minimum(&frame);
    let mut out = Vec::new();
    for p in 0..=6 {
        for idx in index_set(6 - p, p).into_iter().filter(|i| i.p == p) {
            let s = prob.series(idx, &SeriesOptions::new(40))?.value;
            let c = prob.closed(idx)?.value;
            out.push(if even && (idx.l + idx.p) % 2 == 1 {
                s.abs().max(c.abs()) / (1e-12 * frame.e_j)
            } else {
                (s - c).abs() / (1e-9 * c.abs() + 1e-14 * frame.e_j)
            });
        }
    }
    Ok(out)
}

fn engine_check(cases: usize) -> Check {
    let mut circuits = Vec::new();
    for m in 1..=3 {
        for (n, alpha) in [(2, 0.3), (3, 0.29), (3, 0.1)] {
            for phi in [0.1, 0.3, 0.45] {
                circuits.push(snail(m, n, alpha, phi));
            }
        }
        for alpha in [0.05, 0.5, 1.0] {
            for phi in [0.0, 0.2, 0.4] {
                circuits.push(squid(m, alpha, phi));
            }
        }
    }
    let grid: Vec<(usize, f64, f64)> = (0..cases)
        .map(|i| (i % circuits.len(), 0.05 + 0.45 * ((i * 7) % 10) as f64 / 9.0, 2.0 * ((i * 3) % 11) as f64 / 10.0))
        .collect();
    let results: Vec<Result<Vec<f64>>> = grid.par_iter().map(|&(c, zpf, pi)| engine_errors(&circuits[c], zpf, pi)).collect();
    let name = format!("series vs closed, {cases} circuits");
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(e) => errors.extend(e),
            Err(e) => return Check::failed(name, &e.to_string()),
        }
    }
    Check::from_errors(name, &errors, 1.0)
}

fn preset_checks() -> Vec<Check> {
    kerr_cat_presets()
        .iter()
        .map(|p| {
            let name = format!("design {} omega0 and K", p.name);
            let run = || -> Result<Vec<f64>> {
                let frame = mode_frame(&p.model, p.e_c, 30)?;
                let k = kerr_cat(&p.model, &frame, KerrCatDrive::Capacitive { pi_tilde: 0.0 }, &KerrCatOptions::default())?;
                Ok(vec![
                    (to_ghz(frame.omega0) / p.omega0_ghz - 1.0).abs() / 0.03,
                    (to_mhz(k.kerr) / p.kerr_mhz - 1.0).abs() / 0.10,
                ])
            };
            match run() {
                Ok(e) => Check::from_errors(name, &e, 1.0),
                Err(e) => Check::failed(name, &e.to_string()),
            }
        })
        .collect()
}

pub fn run(suite: Suite, config: Option<&RunConfig>) -> Result<Vec<Check>> {
    let opts = OracleOptions::default();
    let mut checks = Vec::new();
    if let Some(cfg) = config {
        let (model, e_c) = cfg.model()?;
        let frame = mode_frame(&model, e_c, cfg.numerics.frame_order())?;
        let opts = OracleOptions { dim: cfg.numerics.oracle_dim, n_phase: cfg.numerics.oracle_phases, ..opts };
        let pis: Vec<f64> = match cfg.drive.as_ref().map(|d| d.resolve()).transpose()? {
            Some(d) => vec![0.0, d.pi_tilde(frame.n_zpf).unwrap_or(0.0)],
            None => vec![0.0, 0.5, 1.5],
        };
        for pi in pis {
            let name = format!("oracle config pi_tilde={}", num(pi));
            checks.push(match oracle_errors(&model, &frame, pi, &opts, cfg.numerics.engine()) {
                Ok(e) => Check::from_errors(name, &e, 1e-6),
                Err(e) => Check::failed(name, &e.to_string()),
            });
        }
        return Ok(checks);
    }
    let (circuits, pis, cases): (Vec<(&str, CircuitModel)>, Vec<f64>, usize) = match suite {
        Suite::Quick => (vec![("transmon", transmon(20.0)), ("snail M=1", snail(1, 3, 0.29, 0.4))], vec![0.0, 0.5], 20),
        Suite::Full => (
            vec![
                ("transmon", transmon(20.0)),
                ("snail M=1", snail(1, 3, 0.29, 0.4)),
                ("snail M=2", snail(2, 3, 0.2, 0.3)),
                ("squid M=1", squid(1, 0.5, 0.13)),
                ("squid M=3", squid(3, 0.8, 0.2)),
            ],
            vec![0.0, 0.5, 1.5],
            200,
        ),
    };
    for (label, model) in &circuits {
        checks.extend(oracle_check(label, model, &pis, &opts, EngineChoice::Closed));
    }
    checks.push(engine_check(cases));
    if suite == Suite::Full {
        checks.extend(preset_checks());
    }
    Ok(checks)
}

pub fn render(checks: &[Check]) -> Result<(String, String)> {
    let mut t = Table::new("verify", &["check", "cases", "worst", "tolerance", "status"]);
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(5);
    let mut text = format!("{:<width$}  {:>6}  {:>18}  {:>18}  status\n", "check", "cases", "worst", "tolerance");
    for c in checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        t.push(vec![c.name.clone(), c.cases.to_string(), num(c.worst), num(c.tolerance), status.into()]);
        text += &format!("{:<width$}  {:>6}  {:>18}  {:>18}  {status}\n", c.name, c.cases, num(c.worst), num(c.tolerance));
    }
    Ok((t.render()?, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let checks = run(Suite::Quick, None).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn a_failing_check_is_reported() {
        let c = Check::from_errors("x".into(), &[0.5, 2.0], 1.0);
        assert!(!c.pass);
        assert_eq!(c.worst, 2.0);
        assert!(!Check::from_errors("nan".into(), &[f64::NAN], 1.0).pass);
    }
}
