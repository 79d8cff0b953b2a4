//! Brute-force supercoefficients from a truncated Fock space.
//!
//! The driven potential is applied as a matrix function of the phase operator,
//! split into drive harmonics by sampling the drive phase, and the normal-ordered
//! amplitudes are recovered by a least-squares fit over Fock matrix elements.
//! Nothing here depends on the series or closed-form engines.

use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::TAU;

use crate::circuit::{CircuitModel, ModeFrame};
use crate::error::{Error, Result};
use crate::sc::{Engine, ScIndex, ScValue};

pub const DEFAULT_DIM: usize = 60;
pub const DEFAULT_PHASES: usize = 64;
pub const MAX_CONDITION: f64 = 1e10;

/// Dense operator on the Fock states 0..dim. Real symmetric: the potential and
/// the phase operator are real in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub dim: usize,
    pub matrix: DMatrix<f64>,
}

impl FockOperator {
    pub fn element(&self, m: usize, n: usize) -> f64 {
        self.matrix[(m, n)]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).norm()
    }
}

/// Spectral decomposition of phi_zpf (a + a^dag), reused across drive phases.
#[derive(Debug, Clone)]
pub struct PhaseOperator {
    nodes: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl PhaseOperator {
    pub fn new(phi_zpf: f64, dim: usize) -> Self {
        let mut x = DMatrix::<f64>::zeros(dim, dim);
        for m in 1..dim {
            let v = phi_zpf * (m as f64).sqrt();
            x[(m - 1, m)] = v;
            x[(m, m - 1)] = v;
        }
        let eig = SymmetricEigen::new(x);
        PhaseOperator { nodes: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors }
    }

    #[cfg(test)]
    fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let values: Vec<f64> = self.nodes.iter().map(|&x| f(x)).collect();
        self.apply_values(&values)
    }

    fn apply_values(&self, values: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, w) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*w);
        }
        scaled * self.vectors.transpose()
    }
}

/// Nonlinear part of U(phi0 + x + Pi~ cos(phase)) with its value, slope and
/// curvature at phi0 removed.
fn nonlinear_potential(model: &CircuitModel, frame: &ModeFrame, y: f64) -> Result<f64> {
    let u = model.potential(frame.phi0 + y)?;
    let e = frame.e_j;
    Ok(u - e * (frame.coeffs[0] + frame.coeffs[1] * y + 0.5 * frame.coeffs[2] * y * y))
}

pub fn build_driven_hamiltonian(
    model: &CircuitModel,
    frame: &ModeFrame,
    pi_tilde: f64,
    phase: f64,
    dim: usize,
) -> Result<FockOperator> {
    let op = PhaseOperator::new(frame.phi_zpf, dim);
    driven_with(&op, model, frame, pi_tilde, phase)
}

fn driven_with(op: &PhaseOperator, model: &CircuitModel, frame: &ModeFrame, pi_tilde: f64, phase: f64) -> Result<FockOperator> {
    let shift = pi_tilde * phase.cos();
    let values = op.nodes.iter().map(|&x| nonlinear_potential(model, frame, x + shift)).collect::<Result<Vec<_>>>()?;
    let matrix = op.apply_values(&values);
    Ok(FockOperator { dim: op.nodes.len(), matrix })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub dim: usize,
    pub n_phase: usize,
    /// largest 2n + l extracted
    pub max_order: u32,
    pub max_p: u32,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { dim: DEFAULT_DIM, n_phase: DEFAULT_PHASES, max_order: 4, max_p: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub values: Vec<ScValue>,
    /// largest relative least-squares residual over the (l, p) systems
    pub residual: f64,
    /// largest condition number over the (l, p) systems
    pub condition: f64,
}

impl Extraction {
    pub fn get(&self, idx: ScIndex) -> Option<f64> {
        self.values.iter().find(|v| v.index == idx).map(|v| v.value)
    }
}

fn fact(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Drive harmonics G_p = (1/N) sum_k H(psi_k) cos(p psi_k), p = 0..=max_p.
pub fn harmonics(
    model: &CircuitModel,
    frame: &ModeFrame,
    pi_tilde: f64,
    dim: usize,
    n_phase: usize,
    max_p: u32,
) -> Result<Vec<DMatrix<f64>>> {
    let op = PhaseOperator::new(frame.phi_zpf, dim);
    let mut out = vec![DMatrix::<f64>::zeros(dim, dim); max_p as usize + 1];
    for k in 0..n_phase {
        let psi = TAU * k as f64 / n_phase as f64;
        let h = driven_with(&op, model, frame, pi_tilde, psi)?;
        for (p, g) in out.iter_mut().enumerate() {
            *g += &h.matrix * ((p as f64 * psi).cos() / n_phase as f64);
        }
    }
    Ok(out)
}

/// Recover C_{nl,p} for 2n + l <= max_order and p <= max_p.
pub fn extract_sc(model: &CircuitModel, frame: &ModeFrame, pi_tilde: f64, opts: &OracleOptions) -> Result<Extraction> {
    if opts.n_phase < 2 * opts.max_p as usize + 2 {
        return Err(Error::InvalidParameter(format!("n_phase must be at least {}", 2 * opts.max_p + 2)));
    }
    if opts.dim < 4 * opts.max_order as usize {
        return Err(Error::InvalidParameter(format!("dim must be at least {}", 4 * opts.max_order)));
    }
    let g = harmonics(model, frame, pi_tilde, opts.dim, opts.n_phase, opts.max_p)?;
    let mut values = Vec::new();
    let (mut residual, mut condition) = (0.0f64, 0.0f64);
    for p in 0..=opts.max_p {
        for l in 0..=opts.max_order {
            let n_req = ((opts.max_order - l) / 2) as usize;
            let unknowns = n_req + 3;
            let rows = 2 * (unknowns - 1) + 4;
            if rows + l as usize > opts.dim {
                return Err(Error::InvalidParameter(format!("dim {} too small for l = {l}", opts.dim)));
            }
            let a = DMatrix::from_fn(rows, unknowns, |m, n| if n <= m { 1.0 / fact(m - n) } else { 0.0 });
            let b = nalgebra::DVector::from_fn(rows, |m, _| {
                let lu = l as usize;
                g[p as usize][(m, m + lu)] / (fact(m + lu) * fact(m)).sqrt()
            });
            let svd = a.clone().svd(true, true);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            let cond = smax / smin;
            condition = condition.max(cond);
            if !(cond <= MAX_CONDITION) {
                return Err(Error::IllConditioned { condition: cond });
            }
            let x = svd.solve(&b, 1e-14 * smax).map_err(|e| Error::InvalidParameter(e.into()))?;
            let r = (&a * &x - &b).norm();
            let scale = b.norm();
            residual = residual.max(if scale > 0.0 { r / scale } else { r });
            for n in 0..=n_req {
                values.push(ScValue { index: ScIndex::new(n as u32, l, p), value: x[n], engine: Engine::Oracle, convergence: None });
            }
        }
    }
    Ok(Extraction { values, residual, condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{mode_frame, SnailArray, SquidArray, TwoCosine};
    use crate::sc::{Displacement, EngineChoice, ScProblem};

    fn transmon(e_j: f64) -> CircuitModel {
        CircuitModel::TwoCosine(TwoCosine { a: -e_j, b: 0.0, a1: 1.0, b1: 1.0, a2: 0.0, b2: 0.0, phi_e: 0.0 })
    }

    #[test]
    fn harmonic_potential_cancels() {
        let model = transmon(1.0);
        let frame = mode_frame(&model, 0.01, 8).unwrap();
        let op = PhaseOperator::new(frame.phi_zpf, 30);
        let m = op.apply(|x| x * x) - op.apply(|x| x) * op.apply(|x| x);
        assert!(m.norm() < 1e-12);
        let quad = op.apply(|x| 0.5 * x * x);
        let mut exact = DMatrix::<f64>::zeros(30, 30);
        let z2 = frame.phi_zpf * frame.phi_zpf;
        for i in 0..30 {
            exact[(i, i)] = z2 * (i as f64 + 0.5);
            if i + 2 < 30 {
                let v = 0.5 * z2 * (((i + 1) * (i + 2)) as f64).sqrt();
                exact[(i, i + 2)] = v;
                exact[(i + 2, i)] = v;
            }
        }
        assert!((quad.view((0, 0), (28, 28)) - exact.view((0, 0), (28, 28))).norm() < 1e-12);
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let model = transmon(20.0);
        let frame = mode_frame(&model, 0.2, 8).unwrap();
        let h = build_driven_hamiltonian(&model, &frame, 0.7, 0.4, 40).unwrap();
        assert!(h.hermiticity_defect() <= 1e-12 * h.matrix.norm());
    }

    #[test]
    fn fourier_orthogonality() {
        let model = transmon(20.0);
        let frame = mode_frame(&model, 0.2, 8).unwrap();
        let op = PhaseOperator::new(frame.phi_zpf, 30);
        let n = 64;
        let mut odd = DMatrix::<f64>::zeros(30, 30);
        for k in 0..n {
            let psi = TAU * k as f64 / n as f64;
            odd += driven_with(&op, &model, &frame, 0.8, psi).unwrap().matrix * ((2.0 * psi).sin() / n as f64);
        }
        assert!(odd.norm() < 1e-12 * 20.0);
    }

    #[test]
    fn transmon_matches_closed_form() {
        let e_j = 20.0;
        let model = transmon(e_j);
        let e_c = 0.3f64.powi(4) * e_j / 2.0;
        let frame = mode_frame(&model, e_c, 12).unwrap();
        assert!((frame.phi_zpf - 0.3).abs() < 1e-12);
        let ex = extract_sc(&model, &frame, 0.5, &OracleOptions::default()).unwrap();
        let problem = ScProblem::new(&model, &frame, &Displacement::capacitive(0.5)).unwrap();
        for v in &ex.values {
            let c = problem.evaluate(v.index, EngineChoice::Closed).unwrap().value;
            let tol = if c == 0.0 { 1e-10 * e_j } else { 1e-6 * c.abs().max(1e-12 * e_j) };
            assert!((v.value - c).abs() <= tol, "{:?}: {} vs {}", v.index, v.value, c);
            if (v.index.l + v.index.p) % 2 == 1 {
                assert!(v.value.abs() <= 1e-10 * e_j);
            }
        }
    }

    #[test]
    fn linear_term_from_asymmetric_potential() {
        let model = CircuitModel::SnailArray(SnailArray { m: 1, n: 3, alpha: 0.29, e_j: 50.0, phi_e: 0.4 * TAU });
        let frame = mode_frame(&model, 0.25, 14).unwrap();
        let ex = extract_sc(&model, &frame, 0.0, &OracleOptions::default()).unwrap();
        let linear = ex.get(ScIndex::new(0, 1, 0)).unwrap();
        let series = ScProblem::from_frame(&frame, 0.0).series(ScIndex::new(0, 1, 0), &crate::sc::SeriesOptions::new(13)).unwrap().value;
        assert!(linear.abs() > 1e-6);
        assert!((linear - series).abs() <= 1e-6 * series.abs());
    }

    #[test]
    fn truncation_robustness() {
        let model = CircuitModel::SquidArray(SquidArray { m: 2, alpha: 0.6, e_j: 40.0, r_a: 0.5, r_b: 0.5, phi_dc: 0.9 });
        let frame = mode_frame(&model, 0.2, 14).unwrap();
        let small = extract_sc(&model, &frame, 0.5, &OracleOptions { dim: 50, ..Default::default() }).unwrap();
        let large = extract_sc(&model, &frame, 0.5, &OracleOptions { dim: 100, ..Default::default() }).unwrap();
        for (a, b) in small.values.iter().zip(&large.values) {
            assert!((a.value - b.value).abs() <= 1e-8 * b.value.abs().max(1e-6 * 40.0), "{:?}", a.index);
        }
    }

    #[test]
    fn too_few_phases_rejected() {
        let model = transmon(20.0);
        let frame = mode_frame(&model, 0.2, 8).unwrap();
        let r = extract_sc(&model, &frame, 0.5, &OracleOptions { n_phase: 4, max_p: 2, ..Default::default() });
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }
}
