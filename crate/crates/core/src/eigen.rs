//! Supercoefficients in the eigenbasis of the drive-renormalized static
//! Hamiltonian 4 E_C (n - n_g)^2 + sum_i A_i J0(x_i) cos(f_i phi + theta_i).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::circuit::{CircuitModel, CosineTerm};
use crate::error::{Error, Result};
use crate::special::bessel_j;

pub const DEFAULT_GRID_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EigenBasis {
    /// charge states -cutoff..=cutoff; needs integer cosine frequencies
    Charge { cutoff: u32, n_g: f64 },
    /// uniform periodic phase grid with a Fourier kinetic term, n_g = 0
    Grid { points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EigenDrive {
    None,
    /// capacitive drive, ratio = Omega_d / omega_d; term argument f_i * ratio
    Capacitive { ratio: f64 },
    /// flux drive; term argument 2 phi_ac0 * flux weight
    Flux { phi_ac0: f64 },
}

impl EigenDrive {
    fn argument(&self, t: &CosineTerm) -> f64 {
        match *self {
            EigenDrive::None => 0.0,
            EigenDrive::Capacitive { ratio } => t.freq * ratio,
            EigenDrive::Flux { phi_ac0 } => 2.0 * phi_ac0 * t.flux_coeff,
        }
    }
}

#[derive(Debug, Clone)]
enum Coordinates {
    Charge { charges: Vec<f64> },
    Grid { phis: Vec<f64>, weight: f64 },
}

#[derive(Debug, Clone)]
pub struct EigenFrame {
    pub basis: EigenBasis,
    /// ascending
    pub energies: Vec<f64>,
    /// column j is state |j>
    pub vectors: DMatrix<Complex64>,
    terms: Vec<CosineTerm>,
    args: Vec<f64>,
    coords: Coordinates,
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

fn charge_hamiltonian(terms: &[CosineTerm], args: &[f64], e_c: f64, cutoff: u32, n_g: f64) -> Result<(DMatrix<Complex64>, Vec<f64>)> {
    if let Some(t) = terms.iter().find(|t| !is_integer(t.freq)) {
        return Err(Error::BasisMismatch(format!("charge basis needs integer cosine frequencies (got {})", t.freq)));
    }
    let dim = 2 * cutoff as usize + 1;
    let charges: Vec<f64> = (0..dim).map(|i| i as f64 - cutoff as f64).collect();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, q) in charges.iter().enumerate() {
        h[(i, i)] = Complex64::new(4.0 * e_c * (q - n_g) * (q - n_g), 0.0);
    }
    for (t, x) in terms.iter().zip(args) {
        let k = t.freq.round() as i64;
        let amp = 0.5 * t.amplitude * bessel_j(0, *x);
        let e = Complex64::from_polar(amp, t.phase);
        add_shift(&mut h, k, e);
    }
    Ok((h, charges))
}

/// Add e * e^{ik phi} + h.c.; e^{ik phi} raises the charge by k.
fn add_shift(h: &mut DMatrix<Complex64>, k: i64, e: Complex64) {
    let dim = h.nrows() as i64;
    for m in 0..dim {
        let n = m + k;
        if (0..dim).contains(&n) {
            h[(n as usize, m as usize)] += e;
            h[(m as usize, n as usize)] += e.conj();
        }
    }
}

/// Periodic Fourier second-derivative matrix for -d^2/dphi^2 on `n` points over `length`.
fn kinetic_row(n: usize, length: f64) -> Vec<f64> {
    let dk = TAU / length;
    let half = n / 2;
    (0..n)
        .map(|d| {
            let mut s = 0.0;
            for m in 0..n {
                let j = m as i64 - half as i64 + 1;
                let k = j as f64 * dk;
                s += k * k * (k * length * d as f64 / n as f64).cos();
            }
            s / n as f64
        })
        .collect()
}

fn grid_hamiltonian(terms: &[CosineTerm], args: &[f64], e_c: f64, points: usize, center: f64, phi_zpf: f64) -> (DMatrix<f64>, Vec<f64>, f64) {
    let (lo, length) = if terms.iter().all(|t| is_integer(t.freq)) {
        (center - TAU / 2.0, TAU)
    } else {
        let l = 8.0 * (6.0 * phi_zpf).max(1.0);
        (center - l, 2.0 * l)
    };
    let dx = length / points as f64;
    let phis: Vec<f64> = (0..points).map(|j| lo + j as f64 * dx).collect();
    let row = kinetic_row(points, length);
    let mut h = DMatrix::<f64>::zeros(points, points);
    for i in 0..points {
        for j in 0..points {
            let d = if i >= j { i - j } else { points - (j - i) };
            h[(i, j)] = 4.0 * e_c * row[d];
        }
        let u: f64 = terms.iter().zip(args).map(|(t, x)| t.value(phis[i]) * bessel_j(0, *x)).sum();
        h[(i, i)] += u;
    }
    (h, phis, dx)
}

fn sorted<T: nalgebra::ComplexField<RealField = f64>>(eig: SymmetricEigen<T, nalgebra::Dyn>) -> (Vec<f64>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])].clone());
    (energies, vectors)
}

/// Diagonalize the static Hamiltonian of a cosine-family circuit.
///
/// On the grid basis the domain is [-pi, pi) around `center` when all cosine
/// frequencies are integers (compact phase), and otherwise a box of half-width
/// 8 max(1, 6 phi_zpf) around `center`, with `phi_zpf` the harmonic estimate.
pub fn diagonalize_static(
    model: &CircuitModel,
    e_c: f64,
    drive: EigenDrive,
    basis: EigenBasis,
    center: f64,
    phi_zpf: f64,
) -> Result<EigenFrame> {
    model.validate()?;
    let terms = model
        .cosine_terms()
        .ok_or_else(|| Error::UnsupportedModel("eigenbasis needs a cosine-family potential".into()))?;
    let args: Vec<f64> = terms.iter().map(|t| drive.argument(t)).collect();
    match basis {
        EigenBasis::Charge { cutoff, n_g } => {
            let (h, charges) = charge_hamiltonian(&terms, &args, e_c, cutoff, n_g)?;
            let (energies, vectors) = sorted(SymmetricEigen::new(h));
            Ok(EigenFrame { basis, energies, vectors, terms, args, coords: Coordinates::Charge { charges } })
        }
        EigenBasis::Grid { points } => {
            if points < 8 {
                return Err(Error::InvalidParameter(format!("grid needs at least 8 points (got {points})")));
            }
            let (h, phis, dx) = grid_hamiltonian(&terms, &args, e_c, points, center, phi_zpf);
            let (energies, real) = sorted(SymmetricEigen::new(h));
            let vectors = real.map(|x| Complex64::new(x, 0.0));
            Ok(EigenFrame { basis, energies, vectors, terms, args, coords: Coordinates::Grid { phis, weight: dx } })
        }
    }
}

impl EigenFrame {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// <n| e^{i(f phi + theta)} |l> for a cosine term's argument.
    fn exp_element(&self, t: &CosineTerm, n: usize, l: usize) -> Complex64 {
        let (vn, vl) = (self.vectors.column(n), self.vectors.column(l));
        match &self.coords {
            Coordinates::Grid { phis, .. } => phis
                .iter()
                .enumerate()
                .map(|(j, phi)| vn[j].conj() * vl[j] * Complex64::from_polar(1.0, t.freq * phi + t.phase))
                .sum(),
            Coordinates::Charge { charges } => {
                let k = t.freq.round() as i64;
                let dim = charges.len() as i64;
                let mut s = Complex64::new(0.0, 0.0);
                for m in 0..dim {
                    let r = m + k;
                    if (0..dim).contains(&r) {
                        s += vn[r as usize].conj() * vl[m as usize];
                    }
                }
                s * Complex64::from_polar(1.0, t.phase)
            }
        }
    }

    /// <n| cos(f phi + theta) |l> and <n| sin(f phi + theta) |l>.
    pub fn trig_elements(&self, t: &CosineTerm, n: usize, l: usize) -> (Complex64, Complex64) {
        let plus = self.exp_element(t, n, l);
        let flipped = CosineTerm { freq: -t.freq, phase: -t.phase, ..*t };
        let minus = self.exp_element(&flipped, n, l);
        ((plus + minus) * 0.5, (plus - minus) / Complex64::new(0.0, 2.0))
    }

    pub fn terms(&self) -> &[CosineTerm] {
        &self.terms
    }

    /// Grid nodes, or None in the charge basis.
    pub fn grid(&self) -> Option<(&[f64], f64)> {
        match &self.coords {
            Coordinates::Grid { phis, weight } => Some((phis, *weight)),
            Coordinates::Charge { .. } => None,
        }
    }
}

/// Amplitude of |n><l| (e^{ip w t} + (-1)^p e^{-ip w t}) in the eigenbasis.
pub fn sc_eigen(frame: &EigenFrame, n: usize, l: usize, p: u32) -> Result<Complex64> {
    if n >= frame.dim() || l >= frame.dim() {
        return Err(Error::InvalidParameter(format!("state index beyond basis size {}", frame.dim())));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (t, x) in frame.terms.iter().zip(&frame.args) {
        let weight = t.amplitude * bessel_j(p, *x);
        if weight == 0.0 {
            continue;
        }
        let (c, s) = frame.trig_elements(t, n, l);
        total += if p % 2 == 0 { c * weight } else { Complex64::new(0.0, 1.0) * s * weight };
    }
    Ok(total)
}

/// First zero of J0.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::TwoCosine;
    use crate::special::factorial;

    fn transmon(e_j: f64) -> CircuitModel {
        CircuitModel::TwoCosine(TwoCosine { a: -e_j, b: 0.0, a1: 1.0, b1: 1.0, a2: 0.0, b2: 0.0, phi_e: 0.0 })
    }

    fn zpf(e_j: f64, e_c: f64) -> f64 {
        (2.0 * e_c / e_j).powf(0.25)
    }

    #[test]
    fn transmon_anharmonicity_is_negative() {
        let (ej, ec) = (50.0, 1.0);
        let f = diagonalize_static(&transmon(ej), ec, EigenDrive::None, EigenBasis::Charge { cutoff: 25, n_g: 0.0 }, 0.0, zpf(ej, ec)).unwrap();
        assert!(f.energies[1] - f.energies[0] < (8.0 * ej * ec).sqrt());
        assert!(f.energies[2] - f.energies[1] < f.energies[1] - f.energies[0]);
    }

    #[test]
    fn bessel_zero_drive_leaves_free_rotor() {
        let (ej, ec, ng) = (30.0, 1.0, 0.2);
        let drive = EigenDrive::Capacitive { ratio: J0_FIRST_ZERO };
        let f = diagonalize_static(&transmon(ej), ec, drive, EigenBasis::Charge { cutoff: 20, n_g: ng }, 0.0, 0.5).unwrap();
        let mut rotor: Vec<f64> = (-20..=20).map(|j| 4.0 * ec * (j as f64 - ng).powi(2)).collect();
        rotor.sort_by(f64::total_cmp);
        for k in 0..8 {
            assert!((f.energies[k] - rotor[k]).abs() <= 1e-8 * rotor[k].max(1.0), "{k}");
        }
    }

    #[test]
    fn grid_and_charge_bases_agree() {
        let (ej, ec) = (20.0, 1.0);
        let model = CircuitModel::TwoCosine(TwoCosine { a: -ej, b: -0.3 * ej, a1: 1.0, b1: 2.0, a2: 0.0, b2: 1.0, phi_e: 0.7 });
        let drive = EigenDrive::Capacitive { ratio: 0.4 };
        let c = diagonalize_static(&model, ec, drive, EigenBasis::Charge { cutoff: 40, n_g: 0.0 }, 0.0, zpf(ej, ec)).unwrap();
        let g = diagonalize_static(&model, ec, drive, EigenBasis::Grid { points: 256 }, 0.0, zpf(ej, ec)).unwrap();
        for k in 0..6 {
            assert!(((c.energies[k] - g.energies[k]) / c.energies[k]).abs() < 1e-8, "{k}: {} {}", c.energies[k], g.energies[k]);
        }
        for (n, l, p) in [(0, 1, 1), (0, 2, 2), (1, 3, 1), (2, 2, 0)] {
            let a = sc_eigen(&c, n, l, p).unwrap().norm();
            let b = sc_eigen(&g, n, l, p).unwrap().norm();
            assert!((a - b).abs() < 1e-8 * ej, "{n}{l}{p}: {a} {b}");
        }
    }

    #[test]
    fn charge_basis_rejects_fractional_frequency() {
        let model = CircuitModel::TwoCosine(TwoCosine { a: -1.0, b: 0.0, a1: 0.5, b1: 1.0, a2: 0.0, b2: 0.0, phi_e: 0.0 });
        let r = diagonalize_static(&model, 0.1, EigenDrive::None, EigenBasis::Charge { cutoff: 10, n_g: 0.0 }, 0.0, 0.5);
        assert!(matches!(r, Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn parity_selection() {
        let (ej, ec) = (40.0, 1.0);
        let f = diagonalize_static(&transmon(ej), ec, EigenDrive::Capacitive { ratio: 0.6 }, EigenBasis::Charge { cutoff: 25, n_g: 0.0 }, 0.0, zpf(ej, ec)).unwrap();
        let t = f.terms()[0];
        for (n, l) in [(0, 0), (0, 2), (2, 4), (1, 1), (1, 3)] {
            assert!(f.trig_elements(&t, n, l).1.norm() < 1e-10);
        }
        assert!(f.trig_elements(&t, 0, 1).0.norm() < 1e-10);
        assert!(f.trig_elements(&t, 0, 2).0.norm() > 1e-3);
        assert!(sc_eigen(&f, 0, 0, 1).unwrap().norm() < 1e-10 * ej);
        assert!(sc_eigen(&f, 0, 1, 1).unwrap().norm() > 1e-3);
    }

    #[test]
    fn cosine_element_matches_grid_quadrature() {
        let (ej, ec) = (40.0, 1.0);
        let model = transmon(ej);
        let c = diagonalize_static(&model, ec, EigenDrive::None, EigenBasis::Charge { cutoff: 30, n_g: 0.0 }, 0.0, zpf(ej, ec)).unwrap();
        let g = diagonalize_static(&model, ec, EigenDrive::None, EigenBasis::Grid { points: 128 }, 0.0, zpf(ej, ec)).unwrap();
        let (phis, dx) = g.grid().unwrap();
        let psi = |k: usize, j: usize| g.vectors[(j, k)].re / dx.sqrt();
        let quad: f64 = (0..phis.len()).map(|j| psi(0, j) * phis[j].cos() * psi(2, j) * dx).sum();
        let t = c.terms()[0];
        assert!((c.trig_elements(&t, 0, 2).0.norm() - quad.abs()).abs() < 1e-8);
    }

    #[test]
    fn undriven_harmonics_vanish() {
        let f = diagonalize_static(&transmon(30.0), 1.0, EigenDrive::None, EigenBasis::Charge { cutoff: 20, n_g: 0.1 }, 0.0, 0.5).unwrap();
        for p in 1..4 {
            assert_eq!(sc_eigen(&f, 0, 2, p).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let model = CircuitModel::TwoCosine(TwoCosine { a: -25.0, b: -4.0, a1: 1.0, b1: 2.0, a2: 0.3, b2: 1.0, phi_e: 0.4 });
        let f = diagonalize_static(&model, 1.0, EigenDrive::Capacitive { ratio: 0.5 }, EigenBasis::Charge { cutoff: 25, n_g: 0.15 }, 0.0, 0.5).unwrap();
        for p in 0..4u32 {
            for (n, l) in [(0, 1), (1, 3), (0, 4)] {
                let a = sc_eigen(&f, n, l, p).unwrap();
                let b = sc_eigen(&f, l, n, p).unwrap();
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                assert!((b - a.conj() * sign).norm() < 1e-10, "p {p}");
            }
        }
    }

    #[test]
    fn completeness_bound() {
        let f = diagonalize_static(&transmon(30.0), 1.0, EigenDrive::None, EigenBasis::Charge { cutoff: 20, n_g: 0.0 }, 0.0, 0.5).unwrap();
        let t = f.terms()[0];
        let s: f64 = (0..f.dim()).map(|j| f.trig_elements(&t, j, 0).0.norm_sqr()).sum();
        assert!(s <= 1.0 + 1e-12);
    }

    /// <m| cos(x (a + a^dag)) |n> for a harmonic oscillator, via Laguerre polynomials.
    fn oscillator_cos(x: f64, m: usize, n: usize) -> f64 {
        let (lo, hi) = (m.min(n), m.max(n));
        let k = hi - lo;
        if k % 2 == 1 {
            return 0.0;
        }
        let y = x * x;
        let lag: f64 = (0..=lo)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial((lo + k) as u32) / (factorial((lo - j) as u32) * factorial((k + j) as u32) * factorial(j as u32)) * y.powi(j as i32)
            })
            .sum();
        let phase = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        (-y / 2.0).exp() * (factorial(lo as u32) / factorial(hi as u32)).sqrt() * x.powi(k as i32) * lag * phase
    }

    #[test]
    fn harmonic_limit() {
        let (ej, ec) = (100.0, 1.0);
        let f = diagonalize_static(&transmon(ej), ec, EigenDrive::None, EigenBasis::Charge { cutoff: 30, n_g: 0.0 }, 0.0, zpf(ej, ec)).unwrap();
        let t = f.terms()[0];
        for m in 0..3 {
            for n in (m..3).step_by(2) {
                let exact = f.trig_elements(&t, m, n).0.norm();
                let ho = oscillator_cos(zpf(ej, ec), m, n).abs();
                assert!((exact - ho).abs() <= 0.05 * ho, "{m}{n}: {exact} {ho}");
            }
        }
    }
}
