//! Subcommand bodies. Each returns the rendered CSV, an optional JSON
//! document and a short human summary.

use anyhow::{anyhow, bail, Result};
use serde::Serialize;

use supercoeff_core::circuit::{mode_frame, CircuitModel, ModeFrame};
use supercoeff_core::effective::{
    beam_splitter_with_frame, chaos_ratio, kerr_cat, BeamSplitterParams, ChaosReport, CouplerDrive, KerrCatDrive,
    KerrCatParams,
};
use supercoeff_core::eigen::{diagonalize_static, sc_eigen};
use supercoeff_core::sc::{flux_drive_amplitudes, flux_drive_amplitudes_bare, Displacement, ScProblem};
use supercoeff_core::sweep::{chaos_filter, run_sweep, EffectiveRecord, PointRecord, Quantity, SweepResult, SweepTask};
use supercoeff_core::units::{ghz, to_ghz, to_hz, to_mhz};

use crate::config::{output_scale, sweep_param_name, Drive, RunConfig, QUANTITIES};
use crate::output::{num, opt, Table};

pub struct Report {
    pub csv: String,
    pub json: Option<String>,
    pub summary: String,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    format: &'static str,
    version: u32,
    config: &'a RunConfig,
    result: T,
}

fn document<T: Serialize>(format: &'static str, config: &RunConfig, result: T) -> Result<String> {
    crate::output::json(&Document { format, version: crate::output::FORMAT_VERSION, config, result })
}

fn frame(cfg: &RunConfig) -> Result<(CircuitModel, ModeFrame)> {
    let (model, e_c) = cfg.model()?;
    let frame = mode_frame(&model, e_c, cfg.numerics.frame_order())?;
    Ok((model, frame))
}

/// Supercoefficient table over 2n + l <= max_order, p <= max_p.
pub fn sc(cfg: &RunConfig, max_order: u32, max_p: u32) -> Result<Report> {
    let (model, frame) = frame(cfg)?;
    let disp = match cfg.drive()? {
        Drive::Flux { phi_ac0, bare } => {
            let omega_d = cfg.kerrcat.as_ref().and_then(|k| k.omega_d_ghz).map(ghz).unwrap_or(2.0 * frame.omega0);
            Displacement::flux(if bare {
                flux_drive_amplitudes_bare(&model, phi_ac0)?
            } else {
                flux_drive_amplitudes(&model, &frame, phi_ac0, omega_d)?
            })
        }
        d => Displacement::capacitive(d.pi_tilde(frame.n_zpf).unwrap()),
    };
    let prob = ScProblem::new(&model, &frame, &disp)?;
    let values = prob.table(max_order, max_p, cfg.numerics.engine())?;
    let mut t = Table::new("sc", &["n", "l", "p", "value_GHz", "engine", "convergence"]);
    for v in &values {
        t.push(vec![
            v.index.n.to_string(),
            v.index.l.to_string(),
            v.index.p.to_string(),
            num(to_ghz(v.value)),
            v.engine.name().to_string(),
            opt(v.convergence),
        ]);
    }
    let summary = format!(
        "{} coefficients; omega0 = {} GHz, phi_zpf = {}",
        values.len(),
        num(to_ghz(frame.omega0)),
        num(frame.phi_zpf)
    );
    Ok(Report { csv: t.render()?, json: None, summary })
}

/// Kerr-cat parameters in output units.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KerrCatRecord {
    pub omega0_GHz: f64,
    pub omega_d_GHz: f64,
    pub omega_q_GHz: f64,
    pub K_MHz: f64,
    pub eps2_MHz: f64,
    pub detuning_MHz: f64,
    pub cat_size: f64,
    pub chaos_ratio: f64,
    pub chaos_class: String,
    pub gamma_rad: f64,
    pub pi_tilde: Option<f64>,
}

impl KerrCatRecord {
    const HEADER: [&'static str; 11] = [
        "omega0_GHz",
        "omega_d_GHz",
        "omega_q_GHz",
        "K_MHz",
        "eps2_MHz",
        "detuning_MHz",
        "cat_size",
        "chaos_ratio",
        "chaos_class",
        "gamma_rad",
        "pi_tilde",
    ];

    fn new(k: &KerrCatParams, chaos: &ChaosReport, pi_tilde: Option<f64>) -> Self {
        KerrCatRecord {
            omega0_GHz: to_ghz(k.omega0),
            omega_d_GHz: to_ghz(k.omega_d),
            omega_q_GHz: to_ghz(k.omega_q),
            K_MHz: to_mhz(k.kerr),
            eps2_MHz: to_mhz(k.eps2),
            detuning_MHz: to_mhz(k.detuning),
            cat_size: k.cat_size,
            chaos_ratio: k.chaos_ratio,
            chaos_class: format!("{:?}", chaos.class).to_lowercase(),
            gamma_rad: k.gamma,
            pi_tilde,
        }
    }

    fn row(&self) -> Vec<String> {
        vec![
            num(self.omega0_GHz),
            num(self.omega_d_GHz),
            num(self.omega_q_GHz),
            num(self.K_MHz),
            num(self.eps2_MHz),
            num(self.detuning_MHz),
            num(self.cat_size),
            num(self.chaos_ratio),
            self.chaos_class.clone(),
            num(self.gamma_rad),
            opt(self.pi_tilde),
        ]
    }
}

pub fn kerrcat(cfg: &RunConfig) -> Result<Report> {
    let (model, frame) = frame(cfg)?;
    let drive = cfg.drive()?;
    let kdrive = match drive {
        Drive::Flux { phi_ac0, bare: false } => KerrCatDrive::Flux { phi_ac0 },
        Drive::Flux { phi_ac0, bare: true } => KerrCatDrive::FluxBare { phi_ac0 },
        d => KerrCatDrive::Capacitive { pi_tilde: d.pi_tilde(frame.n_zpf).unwrap() },
    };
    let opts = cfg.kerrcat.clone().unwrap_or_default().options(&cfg.numerics);
    let k = kerr_cat(&model, &frame, kdrive, &opts)?;
    let chaos = chaos_ratio(&k);
    let rec = KerrCatRecord::new(&k, &chaos, drive.pi_tilde(frame.n_zpf));
    let mut t = Table::new("kerrcat", &KerrCatRecord::HEADER);
    t.push(rec.row());
    let summary = format!(
        "omega_q = {} GHz, K = {} MHz, eps2 = {} MHz, cat size = {}, chaos ratio = {} ({})",
        num(rec.omega_q_GHz),
        num(rec.K_MHz),
        num(rec.eps2_MHz),
        num(rec.cat_size),
        num(rec.chaos_ratio),
        rec.chaos_class
    );
    Ok(Report { csv: t.render()?, json: Some(document("kerrcat", cfg, &rec)?), summary })
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSplitterRecord {
    pub omega_a_GHz: f64,
    pub omega_a_dressed_GHz: f64,
    pub omega_b_dressed_GHz: f64,
    pub omega_c_dressed_GHz: f64,
    pub omega_d_GHz: f64,
    pub pi_tilde: f64,
    pub xi_b: f64,
    pub xi_c: f64,
    pub g_BS_MHz: f64,
    pub chi_bc_Hz: f64,
    pub g_ab_MHz: f64,
    pub g_ac_MHz: f64,
    pub g_bc_MHz: f64,
    pub delta_a_MHz: f64,
    pub delta_tilde_MHz: f64,
    pub g_ab_ratio: f64,
    pub g_ac_ratio: f64,
    pub sw_violated: bool,
}

impl BeamSplitterRecord {
    const HEADER: [&'static str; 18] = [
        "omega_a_GHz",
        "omega_a_dressed_GHz",
        "omega_b_dressed_GHz",
        "omega_c_dressed_GHz",
        "omega_d_GHz",
        "pi_tilde",
        "xi_b",
        "xi_c",
        "g_BS_MHz",
        "chi_bc_Hz",
        "g_ab_MHz",
        "g_ac_MHz",
        "g_bc_MHz",
        "delta_a_MHz",
        "delta_tilde_MHz",
        "g_ab_ratio",
        "g_ac_ratio",
        "sw_violated",
    ];

    fn new(b: &BeamSplitterParams) -> Self {
        BeamSplitterRecord {
            omega_a_GHz: to_ghz(b.omega_a),
            omega_a_dressed_GHz: to_ghz(b.omega_a_dressed),
            omega_b_dressed_GHz: to_ghz(b.omega_b_dressed),
            omega_c_dressed_GHz: to_ghz(b.omega_c_dressed),
            omega_d_GHz: to_ghz(b.omega_d),
            pi_tilde: b.pi_tilde,
            xi_b: b.xi_b,
            xi_c: b.xi_c,
            g_BS_MHz: to_mhz(b.g_bs),
            chi_bc_Hz: to_hz(b.chi_bc),
            g_ab_MHz: to_mhz(b.g_ab),
            g_ac_MHz: to_mhz(b.g_ac),
            g_bc_MHz: to_mhz(b.g_bc),
            delta_a_MHz: to_mhz(b.delta_a),
            delta_tilde_MHz: to_mhz(b.delta_tilde),
            g_ab_ratio: b.g_ab_ratio,
            g_ac_ratio: b.g_ac_ratio,
            sw_violated: b.sw_violated,
        }
    }

    fn row(&self) -> Vec<String> {
        let mut r: Vec<String> = [
            self.omega_a_GHz,
            self.omega_a_dressed_GHz,
            self.omega_b_dressed_GHz,
            self.omega_c_dressed_GHz,
            self.omega_d_GHz,
            self.pi_tilde,
            self.xi_b,
            self.xi_c,
            self.g_BS_MHz,
            self.chi_bc_Hz,
            self.g_ab_MHz,
            self.g_ac_MHz,
            self.g_bc_MHz,
            self.delta_a_MHz,
            self.delta_tilde_MHz,
            self.g_ab_ratio,
            self.g_ac_ratio,
        ]
        .iter()
        .map(|x| num(*x))
        .collect();
        r.push(self.sw_violated.to_string());
        r
    }
}

pub fn beamsplitter(cfg: &RunConfig) -> Result<Report> {
    let (model, frame) = frame(cfg)?;
    let section = cfg.beamsplitter.as_ref().ok_or_else(|| anyhow!("config needs a [beamsplitter] section"))?;
    let setup = section.setup(model, frame.e_c);
    let cdrive = match cfg.drive()? {
        Drive::Flux { phi_ac0, bare: false } => CouplerDrive::Flux { phi_ac0 },
        Drive::Flux { bare: true, .. } => bail!("[drive] bare_amplitudes applies to Kerr-cat runs only"),
        d => CouplerDrive::Capacitive { pi: d.pi_tilde(frame.n_zpf).unwrap() * frame.n_zpf },
    };
    let b = beam_splitter_with_frame(&setup, &frame, cdrive, &section.options(&cfg.numerics))?;
    let rec = BeamSplitterRecord::new(&b);
    let mut t = Table::new("beamsplitter", &BeamSplitterRecord::HEADER);
    t.push(rec.row());
    let mut summary = format!(
        "g_BS = {} MHz, chi_bc = {} Hz, omega_d = {} GHz, pi_tilde = {}",
        num(rec.g_BS_MHz),
        num(rec.chi_bc_Hz),
        num(rec.omega_d_GHz),
        num(rec.pi_tilde)
    );
    if rec.sw_violated {
        summary += "; warning: perturbative ratio above limit";
    }
    Ok(Report { csv: t.render()?, json: Some(document("beamsplitter", cfg, &rec)?), summary })
}

/// Supercoefficients between eigenstates j, k of the static Hamiltonian.
pub fn eigen(cfg: &RunConfig) -> Result<Report> {
    let (model, frame) = frame(cfg)?;
    let section = cfg.eigen.clone().unwrap_or_default();
    let drive = match cfg.drive.as_ref().map(|d| d.resolve()).transpose()? {
        None => supercoeff_core::eigen::EigenDrive::None,
        Some(Drive::Flux { phi_ac0, .. }) => supercoeff_core::eigen::EigenDrive::Flux { phi_ac0 },
        Some(d) => supercoeff_core::eigen::EigenDrive::Capacitive { ratio: d.pi_tilde(frame.n_zpf).unwrap() },
    };
    let ef = diagonalize_static(&model, frame.e_c, drive, section.basis()?, frame.phi0, frame.phi_zpf)?;
    let states = section.states.min(ef.dim());
    let mut t = Table::new("eigen", &["j", "k", "p", "value_GHz", "value_imag_GHz"]);
    for j in 0..states {
        for k in 0..states {
            for p in 0..=section.p_max {
                let v = sc_eigen(&ef, j, k, p)?;
                t.push(vec![j.to_string(), k.to_string(), p.to_string(), num(to_ghz(v.re)), num(to_ghz(v.im))]);
            }
        }
    }
    let levels: Vec<String> = ef.energies.iter().take(states).map(|e| num(to_ghz(e - ef.energies[0]))).collect();
    let summary = format!("{} states of {}; levels above ground (GHz): {}", states, ef.dim(), levels.join(", "));
    Ok(Report { csv: t.render()?, json: None, summary })
}

#[derive(Serialize)]
struct SweepSummary {
    points: usize,
    feasible: usize,
    parameters: Vec<String>,
    objective: String,
    maximize: bool,
    best: Option<BestPoint>,
    chaos_filter: Option<ChaosSummary>,
}

#[derive(Serialize)]
struct BestPoint {
    index: usize,
    params: Vec<f64>,
    objective: f64,
}

#[derive(Serialize)]
struct ChaosSummary {
    threshold: f64,
    removed: usize,
    best_before: Option<usize>,
    best_after: Option<usize>,
}

fn quantity_name(q: Quantity) -> &'static str {
    QUANTITIES.iter().find(|x| x.1 == q).map(|x| x.0).unwrap_or("?")
}

fn best_point(r: &SweepResult, scale: f64) -> Option<BestPoint> {
    r.best.map(|i| {
        let p = &r.records[i];
        BestPoint { index: i, params: p.params.clone(), objective: p.objective.unwrap_or(f64::NAN) * scale }
    })
}

fn sweep_row(r: &PointRecord, task: &SweepTask, scale: f64) -> Vec<String> {
    let mut row = vec![r.index.to_string()];
    row.extend(r.params.iter().map(|v| num(*v)));
    row.push(r.feasible.to_string());
    row.push(opt(r.omega0.map(to_ghz)));
    row.push(opt(r.pi_tilde));
    match task {
        SweepTask::KerrCat { .. } => {
            let k = match &r.effective {
                Some(EffectiveRecord::KerrCat(k)) => Some(k),
                _ => None,
            };
            row.push(opt(k.map(|k| to_ghz(k.omega_q))));
            row.push(opt(k.map(|k| to_mhz(k.kerr))));
            row.push(opt(k.map(|k| to_mhz(k.eps2))));
            row.push(opt(k.map(|k| k.cat_size)));
            row.push(opt(k.map(|k| k.chaos_ratio)));
        }
        SweepTask::BeamSplitter { .. } => {
            let b = match &r.effective {
                Some(EffectiveRecord::BeamSplitter(b)) => Some(b),
                _ => None,
            };
            row.push(opt(b.map(|b| to_ghz(b.omega_d))));
            row.push(opt(b.map(|b| to_mhz(b.g_bs))));
            row.push(opt(b.map(|b| to_hz(b.chi_bc))));
            row.push(opt(b.map(|b| b.g_ab_ratio.max(b.g_ac_ratio))));
        }
    }
    row.push(opt(r.objective.map(|v| v * scale)));
    row.push(r.violations.join("; "));
    row
}

pub fn sweep(cfg: &RunConfig) -> Result<(Report, bool)> {
    let spec = cfg.sweep_spec()?;
    spec.validate()?;
    let mut result = run_sweep(&spec)?;
    let mut chaos = None;
    if let Some(threshold) = cfg.chaos_threshold() {
        if !matches!(spec.task, SweepTask::KerrCat { .. }) {
            bail!("[sweep] chaos_threshold applies to Kerr-cat sweeps only");
        }
        let f = chaos_filter(&result, &spec.objective, threshold);
        chaos = Some(ChaosSummary { threshold, removed: f.removed, best_before: f.best_before, best_after: f.best_after });
        result = f.result;
    }
    let mut header = vec!["index".to_string()];
    header.extend(spec.axes.iter().map(|a| sweep_param_name(a.param).to_string()));
    header.extend(["feasible", "omega0_GHz", "pi_tilde"].map(String::from));
    match spec.task {
        SweepTask::KerrCat { .. } => {
            header.extend(["omega_q_GHz", "K_MHz", "eps2_MHz", "cat_size", "chaos_ratio"].map(String::from))
        }
        SweepTask::BeamSplitter { .. } => header.extend(["omega_d_GHz", "g_BS_MHz", "chi_bc_Hz", "sw_ratio"].map(String::from)),
    }
    header.extend(["objective", "violations"].map(String::from));
    let scale = output_scale(spec.objective.quantity);
    let mut t = Table::with_header("sweep", header);
    for r in &result.records {
        t.push(sweep_row(r, &spec.task, scale));
    }
    let best = best_point(&result, scale);
    let summary_doc = SweepSummary {
        points: result.records.len(),
        feasible: result.feasible_count(),
        parameters: spec.axes.iter().map(|a| sweep_param_name(a.param).to_string()).collect(),
        objective: quantity_name(spec.objective.quantity).to_string(),
        maximize: spec.objective.maximize,
        best,
        chaos_filter: chaos,
    };
    let summary = match &summary_doc.best {
        Some(b) => format!(
            "{} of {} points feasible; best point {} at ({}) with {} = {}",
            summary_doc.feasible,
            summary_doc.points,
            b.index,
            summary_doc
                .parameters
                .iter()
                .zip(&b.params)
                .map(|(n, v)| format!("{n} = {}", num(*v)))
                .collect::<Vec<_>>()
                .join(", "),
            summary_doc.objective,
            num(b.objective)
        ),
        None => format!("no feasible point among {}", summary_doc.points),
    };
    let found = summary_doc.best.is_some();
    Ok((Report { csv: t.render()?, json: Some(document("sweep", cfg, &summary_doc)?), summary }, found))
}
