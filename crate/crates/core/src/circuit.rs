//! Single-degree-of-freedom circuit potentials, their minima and the
//! dimensionless expansion coefficients c_n = U^(n)(phi0) / E_J.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::special::binomial;

const GRID_POINTS: usize = 4096;
const C2_FLOOR: f64 = 1e-9;

/// One term `amplitude * cos(freq * phi + phase)` of a cosine-family potential.
///
/// `flux_coeff` is the weight of the external flux inside `phase`; a flux
/// drive modulates the term through it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineTerm {
    pub amplitude: f64,
    pub freq: f64,
    pub phase: f64,
    pub flux_coeff: f64,
}

impl CosineTerm {
    pub fn value(&self, phi: f64) -> f64 {
        self.amplitude * (self.freq * phi + self.phase).cos()
    }

    /// k-th derivative at phi.
    pub fn derivative(&self, k: u32, phi: f64) -> f64 {
        self.amplitude * self.freq.powi(k as i32) * shifted_cos(self.freq * phi + self.phase, k)
    }
}

/// cos(theta + k*pi/2) without rounding in the quarter-turn shift.
pub(crate) fn shifted_cos(theta: f64, k: u32) -> f64 {
    match k % 4 {
        0 => theta.cos(),
        1 => -theta.sin(),
        2 => -theta.cos(),
        _ => theta.sin(),
    }
}

/// A cos(a1 phi + a2 phi_e) + B cos(b1 phi + b2 phi_e)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoCosine {
    pub a: f64,
    pub b: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub phi_e: f64,
}

/// M SNAILs in series, each a small junction (alpha E_J) shunted by N large ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnailArray {
    pub m: u32,
    pub n: u32,
    pub alpha: f64,
    pub e_j: f64,
    pub phi_e: f64,
}

/// SNAIL array in series with a linear inductor, x_j = L_J / L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnailArrayStrayL {
    pub snail: SnailArray,
    pub x_j: f64,
}

/// M dc-SQUIDs in series with junction asymmetry alpha.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquidArray {
    pub m: u32,
    pub alpha: f64,
    pub e_j: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub phi_dc: f64,
}

/// sum_m A_m cos(m a1 phi + a2 phi_e) + B_m cos(m b1 phi + b2 phi_e), m = 1, 2, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HigherHarmonics {
    pub a_m: Vec<f64>,
    pub b_m: Vec<f64>,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub phi_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircuitModel {
    TwoCosine(TwoCosine),
    SnailArray(SnailArray),
    SnailArrayStrayL(SnailArrayStrayL),
    SquidArray(SquidArray),
    HigherHarmonics(HigherHarmonics),
}

impl SnailArray {
    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("SNAIL counts M, N must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0 / self.n as f64) {
            return Err(Error::InvalidParameter(format!(
                "SNAIL asymmetry {} outside (0, 1/N) = (0, {})",
                self.alpha,
                1.0 / self.n as f64
            )));
        }
        positive("E_J", self.e_j)
    }

    fn terms(&self) -> Vec<CosineTerm> {
        let (m, n) = (self.m as f64, self.n as f64);
        vec![
            CosineTerm { amplitude: -m * self.alpha * self.e_j, freq: 1.0 / m, phase: 0.0, flux_coeff: 0.0 },
            CosineTerm {
                amplitude: -m * n * self.e_j,
                freq: 1.0 / (m * n),
                phase: -self.phi_e / n,
                flux_coeff: -1.0 / n,
            },
        ]
    }

    /// Derivative F^(k)(s) of the single-SNAIL current alpha sin s + sin((s - phi_e)/N).
    fn current_derivative(&self, k: u32, s: f64) -> f64 {
        let n = self.n as f64;
        // sin(x + k pi/2) = cos(x + (k+3) pi/2)
        self.alpha * shifted_cos(s, k + 3) + n.powi(-(k as i32)) * shifted_cos((s - self.phi_e) / n, k + 3)
    }

    fn single_potential(&self, s: f64) -> f64 {
        let n = self.n as f64;
        -self.alpha * self.e_j * s.cos() - n * self.e_j * ((s - self.phi_e) / n).cos()
    }
}

impl SquidArray {
    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("SQUID count M must be >= 1".into()));
        }
        if (self.r_a + self.r_b - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "gauge coefficients must satisfy r_a + r_b = 1 (got {})",
                self.r_a + self.r_b
            )));
        }
        positive("alpha", self.alpha)?;
        positive("E_J", self.e_j)
    }

    fn terms(&self) -> Vec<CosineTerm> {
        let m = self.m as f64;
        vec![
            CosineTerm {
                amplitude: -m * self.alpha * self.e_j,
                freq: 1.0 / m,
                phase: -self.r_a * self.phi_dc,
                flux_coeff: -self.r_a,
            },
            CosineTerm {
                amplitude: -m * self.e_j,
                freq: 1.0 / m,
                phase: self.r_b * self.phi_dc,
                flux_coeff: self.r_b,
            },
        ]
    }

    /// Effective junction energy of one SQUID at bias phi_dc.
    pub fn effective_ej(&self) -> f64 {
        let a = self.alpha;
        self.e_j * (1.0 + a * a + 2.0 * a * self.phi_dc.cos()).sqrt()
    }

    /// Minimum position M * lambda.
    pub fn analytic_minimum(&self) -> f64 {
        let (a, ra, rb, f) = (self.alpha, self.r_a, self.r_b, self.phi_dc);
        let lambda = (a * (ra * f).sin() - (rb * f).sin()).atan2(a * (ra * f).cos() + (rb * f).cos());
        self.m as f64 * lambda
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite (got {v})")))
    }
}

impl CircuitModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            CircuitModel::TwoCosine(t) => {
                if t.a1 == 0.0 && t.b1 == 0.0 {
                    return Err(Error::InvalidParameter("both cosine frequencies are zero".into()));
                }
                Ok(())
            }
            CircuitModel::SnailArray(s) => s.validate(),
            CircuitModel::SnailArrayStrayL(s) => {
                s.snail.validate()?;
                positive("x_J", s.x_j)
            }
            CircuitModel::SquidArray(s) => s.validate(),
            CircuitModel::HigherHarmonics(h) => {
                if h.a_m.is_empty() && h.b_m.is_empty() {
                    return Err(Error::InvalidParameter("empty harmonic lists".into()));
                }
                Ok(())
            }
        }
    }

    /// Energy scale E_J used to make c_n dimensionless.
    ///
    /// For the generic families this is the largest term amplitude.
    pub fn energy_scale(&self) -> f64 {
        match self {
            CircuitModel::SnailArray(s) => s.e_j,
            CircuitModel::SnailArrayStrayL(s) => s.snail.e_j,
            CircuitModel::SquidArray(s) => s.e_j,
            CircuitModel::TwoCosine(t) => t.a.abs().max(t.b.abs()),
            CircuitModel::HigherHarmonics(h) => {
                h.a_m.iter().chain(&h.b_m).fold(0.0, |acc: f64, x| acc.max(x.abs()))
            }
        }
    }

    /// Cosine decomposition; `None` for the stray-inductor circuit.
    pub fn cosine_terms(&self) -> Option<Vec<CosineTerm>> {
        let terms = match self {
            CircuitModel::TwoCosine(t) => vec![
                CosineTerm { amplitude: t.a, freq: t.a1, phase: t.a2 * t.phi_e, flux_coeff: t.a2 },
                CosineTerm { amplitude: t.b, freq: t.b1, phase: t.b2 * t.phi_e, flux_coeff: t.b2 },
            ],
            CircuitModel::SnailArray(s) => s.terms(),
            CircuitModel::SquidArray(s) => s.terms(),
            CircuitModel::HigherHarmonics(h) => {
                let mut v = Vec::new();
                for (i, &amp) in h.a_m.iter().enumerate() {
                    let m = (i + 1) as f64;
                    v.push(CosineTerm { amplitude: amp, freq: m * h.a1, phase: h.a2 * h.phi_e, flux_coeff: h.a2 });
                }
                for (i, &amp) in h.b_m.iter().enumerate() {
                    let m = (i + 1) as f64;
                    v.push(CosineTerm { amplitude: amp, freq: m * h.b1, phase: h.b2 * h.phi_e, flux_coeff: h.b2 });
                }
                v
            }
            CircuitModel::SnailArrayStrayL(_) => return None,
        };
        Some(terms.into_iter().filter(|t| t.amplitude != 0.0).collect())
    }

    /// Potential energy U(phi).
    pub fn potential(&self, phi: f64) -> Result<f64> {
        match self {
            CircuitModel::SnailArrayStrayL(s) => {
                let sn = stray_internal_phase(s, phi)?;
                Ok(stray_energy(s, phi, sn))
            }
            _ => Ok(self.cosine_terms().unwrap_or_default().iter().map(|t| t.value(phi)).sum()),
        }
    }

    /// Length of the window searched for the global minimum.
    fn search_period(&self) -> f64 {
        match self {
            CircuitModel::SnailArrayStrayL(s) => TAU * s.snail.n as f64,
            _ => {
                let min_freq = self
                    .cosine_terms()
                    .unwrap_or_default()
                    .iter()
                    .map(|t| t.freq.abs())
                    .filter(|f| *f > 0.0)
                    .fold(f64::INFINITY, f64::min);
                TAU / min_freq
            }
        }
    }
}

/// Global minimum of U over one fundamental period centred on zero.
pub fn find_minimum(model: &CircuitModel) -> Result<f64> {
    model.validate()?;
    match model {
        CircuitModel::SnailArrayStrayL(s) => {
            // the array minimum sits where the single-SNAIL current vanishes,
            // independent of the series inductor
            let sn = &s.snail;
            let s_min = minimize_1d(
                |x| sn.single_potential(x),
                |x| sn.e_j * sn.current_derivative(0, x),
                |x| sn.e_j * sn.current_derivative(1, x),
                TAU * sn.n as f64,
                sn.e_j,
            )?;
            Ok(sn.m as f64 * s_min)
        }
        _ => {
            let terms = model.cosine_terms().unwrap_or_default();
            let scale = model.energy_scale();
            minimize_1d(
                |x| terms.iter().map(|t| t.value(x)).sum(),
                |x| terms.iter().map(|t| t.derivative(1, x)).sum(),
                |x| terms.iter().map(|t| t.derivative(2, x)).sum(),
                model.search_period(),
                scale,
            )
        }
    }
}

fn minimize_1d(
    u: impl Fn(f64) -> f64,
    du: impl Fn(f64) -> f64,
    d2u: impl Fn(f64) -> f64,
    period: f64,
    scale: f64,
) -> Result<f64> {
    if !period.is_finite() {
        return Err(Error::NoMinimumFound("potential has no finite period".into()));
    }
    let h = period / GRID_POINTS as f64;
    let (mut best_x, mut best_u) = (0.0, f64::INFINITY);
    for i in 0..GRID_POINTS {
        let x = -period / 2.0 + i as f64 * h;
        let v = u(x);
        if v < best_u {
            best_u = v;
            best_x = x;
        }
    }
    // Newton on U' within the bracketing cell, bisection as a fallback
    let (mut lo, mut hi) = (best_x - h, best_x + h);
    let mut x = best_x;
    for _ in 0..200 {
        let g = du(x);
        if g.abs() < 1e-12 * scale {
            if d2u(x) <= 0.0 {
                break;
            }
            return Ok(x);
        }
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let curv = d2u(x);
        let step = if curv > 0.0 { x - g / curv } else { f64::NAN };
        x = if step.is_finite() && step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-15 * period.max(1.0) {
            if du(x).abs() < 1e-9 * scale && d2u(x) > 0.0 {
                return Ok(x);
            }
            break;
        }
    }
    Err(Error::NoMinimumFound(format!("refinement failed near phi = {best_x}")))
}

fn stray_energy(s: &SnailArrayStrayL, phi: f64, sn: f64) -> f64 {
    let m = s.snail.m as f64;
    let d = phi - m * sn;
    m * s.snail.single_potential(sn) + 0.5 * s.x_j * s.snail.e_j * d * d
}

/// Internal SNAIL phase phi_s solving the current-conservation relation at
/// total phase phi; among multiple roots the lowest-energy one.
pub fn stray_internal_phase(s: &SnailArrayStrayL, phi: f64) -> Result<f64> {
    let sn = &s.snail;
    let m = sn.m as f64;
    let g = |x: f64| sn.current_derivative(0, x) + s.x_j * (m * x - phi);
    let dg = |x: f64| sn.current_derivative(1, x) + s.x_j * m;
    let span = (1.0 + sn.alpha) / s.x_j;
    let (lo, hi) = ((phi - span) / m - 1e-9, (phi + span) / m + 1e-9);
    let cells = 512;
    let h = (hi - lo) / cells as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut a = lo;
    let mut ga = g(a);
    for i in 1..=cells {
        let b = lo + i as f64 * h;
        let gb = g(b);
        if ga == 0.0 || ga * gb < 0.0 {
            let root = refine_root(&g, &dg, a, b)?;
            let e = stray_energy(s, phi, root);
            if best.map_or(true, |(_, eb)| e < eb) {
                best = Some((root, e));
            }
        }
        a = b;
        ga = gb;
    }
    best.map(|(r, _)| r)
        .ok_or_else(|| Error::RootNotConverged(format!("no current-conservation root at phi = {phi}")))
}

fn refine_root(g: &impl Fn(f64) -> f64, dg: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let glo = g(lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if (gx < 0.0) == (glo < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - gx / dg(x);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootNotConverged(format!("bracket [{lo}, {hi}]")))
}

/// c_0 .. c_{n_max} at phi0 (c_0 = U(phi0)/E_J).
pub fn nonlinear_coeffs(model: &CircuitModel, phi0: f64, n_max: u32) -> Result<Vec<f64>> {
    match model {
        CircuitModel::SnailArrayStrayL(s) => stray_inductor_coeffs(s, phi0, n_max),
        _ => {
            let ej = model.energy_scale();
            let terms = model.cosine_terms().unwrap_or_default();
            Ok((0..=n_max).map(|k| terms.iter().map(|t| t.derivative(k, phi0)).sum::<f64>() / ej).collect())
        }
    }
}

/// Coefficients of a single cosine term, normalised by `e_j`.
pub fn term_coeffs(term: &CosineTerm, phi0: f64, n_max: u32, e_j: f64) -> Vec<f64> {
    (0..=n_max).map(|k| term.derivative(k, phi0) / e_j).collect()
}

/// c_0 .. c_{n_max} for the stray-inductor circuit by repeated implicit
/// differentiation of the current-conservation identity.
pub fn stray_inductor_coeffs(s: &SnailArrayStrayL, phi0: f64, n_max: u32) -> Result<Vec<f64>> {
    s.snail.validate()?;
    positive("x_J", s.x_j)?;
    let sn = &s.snail;
    let m = sn.m as f64;
    let s0 = stray_internal_phase(s, phi0)?;
    let denom = sn.current_derivative(1, s0) + s.x_j * m;
    if denom.abs() < 1e-14 {
        return Err(Error::RootNotConverged("singular implicit derivative".into()));
    }
    let nd = n_max.max(2) as usize;
    // d[j] = d^j phi_s / d phi^j, j >= 1
    let mut d = vec![0.0; nd];
    d[1] = s.x_j / denom;
    for j in 2..nd {
        let bell = bell_table(j, &d);
        let mut acc = 0.0;
        for k in 2..=j {
            acc += sn.current_derivative(k as u32, s0) * bell[j][k];
        }
        d[j] = -acc / denom;
    }
    let mut c = vec![0.0; n_max as usize + 1];
    c[0] = stray_energy(s, phi0, s0) / sn.e_j;
    if n_max >= 1 {
        // equals x_J (phi0 - M phi_s) on the root, without the x_J amplification
        c[1] = sn.current_derivative(0, s0);
    }
    if n_max >= 2 {
        c[2] = s.x_j * (1.0 - m * d[1]);
    }
    for n in 3..=n_max as usize {
        c[n] = -m * s.x_j * d[n - 1];
    }
    Ok(c)
}

/// Partial Bell polynomials B_{n,k}(x_1, ..., x_{n-k+1}) for n <= n_top.
fn bell_table(n_top: usize, x: &[f64]) -> Vec<Vec<f64>> {
    let mut b = vec![vec![0.0; n_top + 1]; n_top + 1];
    b[0][0] = 1.0;
    for n in 1..=n_top {
        for k in 1..=n {
            let mut acc = 0.0;
            for i in 1..=(n - k + 1) {
                acc += binomial((n - 1) as u32, (i - 1) as u32) * x[i] * b[n - i][k - 1];
            }
            b[n][k] = acc;
        }
    }
    b
}

/// Harmonic frame of the nonlinear mode about the potential minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeFrame {
    pub phi0: f64,
    /// c_0 .. c_{n_max}
    pub coeffs: Vec<f64>,
    pub e_j: f64,
    pub e_c: f64,
    pub omega0: f64,
    pub phi_zpf: f64,
    pub n_zpf: f64,
}

impl ModeFrame {
    pub fn c(&self, n: u32) -> f64 {
        self.coeffs.get(n as usize).copied().unwrap_or(0.0)
    }

    pub fn c2(&self) -> f64 {
        self.c(2)
    }

    pub fn n_max(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }
}

pub fn mode_frame(model: &CircuitModel, e_c: f64, n_max: u32) -> Result<ModeFrame> {
    positive("E_C", e_c)?;
    let phi0 = match model {
        CircuitModel::SquidArray(s) => {
            s.validate()?;
            s.analytic_minimum()
        }
        _ => find_minimum(model)?,
    };
    let coeffs = nonlinear_coeffs(model, phi0, n_max.max(2))?;
    let e_j = model.energy_scale();
    let c2 = coeffs[2];
    if c2 <= C2_FLOOR {
        return Err(Error::DegenerateMinimum { c2 });
    }
    let phi_zpf = (2.0 * e_c / (e_j * c2)).powf(0.25);
    Ok(ModeFrame {
        phi0,
        coeffs,
        e_j,
        e_c,
        omega0: (8.0 * e_c * e_j * c2).sqrt(),
        phi_zpf,
        n_zpf: 0.5 / phi_zpf,
    })
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{charging_energy_ghz, flux_phase, ghz, josephson_energy_ghz};
    use num_complex::Complex64;

    fn transmon(ej: f64) -> CircuitModel {
        CircuitModel::TwoCosine(TwoCosine { a: -ej, b: 0.0, a1: 1.0, b1: 0.0, a2: 0.0, b2: 0.0, phi_e: 0.0 })
    }

    fn snail(m: u32, n: u32, alpha: f64, phi_e: f64) -> SnailArray {
        SnailArray { m, n, alpha, e_j: 100.0, phi_e }
    }

    // Cauchy integral on a circle: c_n = n!/(2 pi r^n) sum_k f(phi0 + r e^{i t_k}) e^{-i n t_k}
    fn contour_derivative(f: impl Fn(Complex64) -> Complex64, x0: f64, n: u32, r: f64) -> f64 {
        let pts = 256;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..pts {
            let t = TAU * k as f64 / pts as f64;
            let z = Complex64::from_polar(r, t);
            acc += f(x0 + z) * Complex64::from_polar(1.0, -(n as f64) * t);
        }
        crate::special::factorial(n) * acc.re / (pts as f64 * r.powi(n as i32))
    }

    #[test]
    fn transmon_minimum_and_coeffs() {
        let m = transmon(10.0);
        assert!(find_minimum(&m).unwrap().abs() < 1e-12);
        let c = nonlinear_coeffs(&m, 0.0, 4).unwrap();
        assert!((c[2] - 1.0).abs() < 1e-15 && c[3].abs() < 1e-15 && (c[4] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn snail_minimum_matches_dense_grid() {
        let s = snail(1, 3, 0.11, flux_phase(0.32));
        let model = CircuitModel::SnailArray(s.clone());
        let phi0 = find_minimum(&model).unwrap();
        let period = TAU * 3.0;
        let pts = 1_000_000;
        let (mut bx, mut bu) = (0.0, f64::INFINITY);
        for i in 0..pts {
            let x = -period / 2.0 + period * i as f64 / pts as f64;
            let u = model.potential(x).unwrap();
            if u < bu {
                bu = u;
                bx = x;
            }
        }
        // local parabolic refine of the grid optimum
        let h = period / pts as f64;
        let (um, u0, up) =
            (model.potential(bx - h).unwrap(), model.potential(bx).unwrap(), model.potential(bx + h).unwrap());
        let refined = bx - h * (up - um) / (2.0 * (up - 2.0 * u0 + um));
        assert!((phi0 - refined).abs() < 1e-8, "{phi0} vs {refined}");
    }

    #[test]
    fn snail_coeffs_match_contour_derivatives() {
        for (m, n, alpha, f) in [(1, 3, 0.11, 0.32), (2, 3, 0.11, 0.46), (3, 2, 0.2, 0.4)] {
            let model = CircuitModel::SnailArray(snail(m, n, alpha, flux_phase(f)));
            let phi0 = find_minimum(&model).unwrap();
            let c = nonlinear_coeffs(&model, phi0, 8).unwrap();
            let terms = model.cosine_terms().unwrap();
            let u = |z: Complex64| -> Complex64 {
                terms.iter().map(|t| t.amplitude * (z * t.freq + t.phase).cos()).sum::<Complex64>() / 100.0
            };
            for k in 2..=8 {
                let reference = contour_derivative(u, phi0, k, 1.5);
                assert!(
                    (c[k as usize] - reference).abs() <= 1e-6 * reference.abs().max(1e-6),
                    "c_{k}: {} vs {reference}",
                    c[k as usize]
                );
            }
            assert!(c[1].abs() < 1e-10);
        }
    }

    #[test]
    fn squid_minimum_and_curvature() {
        for &(m, alpha, f) in &[(1u32, 0.3, 0.7), (3, 0.9, 2.0), (2, 0.05, -1.0)] {
            let s = SquidArray { m, alpha, e_j: 50.0, r_a: 0.9, r_b: 0.1, phi_dc: f };
            let model = CircuitModel::SquidArray(s.clone());
            let phi0 = s.analytic_minimum();
            let grid = find_minimum(&model).unwrap();
            let period = TAU * m as f64;
            let diff = (phi0 - grid).rem_euclid(period);
            assert!(diff.min(period - diff) < 1e-9);
            let c = nonlinear_coeffs(&model, phi0, 2).unwrap();
            assert!(c[1].abs() < 1e-12);
            assert!((c[2] - s.effective_ej() / (m as f64 * s.e_j)).abs() < 1e-10);
        }
    }

    #[test]
    fn single_harmonic_list_equals_two_cosine() {
        let hh = CircuitModel::HigherHarmonics(HigherHarmonics {
            a_m: vec![-3.0],
            b_m: vec![-9.0],
            a1: 1.0,
            b1: 1.0 / 3.0,
            a2: 0.0,
            b2: -1.0 / 3.0,
            phi_e: 1.3,
        });
        let tc = CircuitModel::TwoCosine(TwoCosine { a: -3.0, b: -9.0, a1: 1.0, b1: 1.0 / 3.0, a2: 0.0, b2: -1.0 / 3.0, phi_e: 1.3 });
        let p0 = find_minimum(&tc).unwrap();
        assert_eq!(find_minimum(&hh).unwrap(), p0);
        assert_eq!(nonlinear_coeffs(&hh, p0, 10).unwrap(), nonlinear_coeffs(&tc, p0, 10).unwrap());
    }

    #[test]
    fn stray_inductor_large_xj_limit() {
        let base = snail(2, 3, 0.11, flux_phase(0.46));
        let plain = CircuitModel::SnailArray(base.clone());
        let phi0 = find_minimum(&plain).unwrap();
        let c_inf = nonlinear_coeffs(&plain, phi0, 8).unwrap();
        let stray = CircuitModel::SnailArrayStrayL(SnailArrayStrayL { snail: base, x_j: 1e6 });
        let phi0s = find_minimum(&stray).unwrap();
        assert!((phi0s - phi0).abs() < 1e-9);
        let c = nonlinear_coeffs(&stray, phi0s, 8).unwrap();
        assert!(c[1].abs() < 1e-9);
        for k in 2..=8 {
            assert!((c[k] - c_inf[k]).abs() <= 1e-3, "c_{k}");
            assert!((c[k] - c_inf[k]).abs() <= 1e-4 * c_inf[k].abs().max(1e-2), "c_{k}");
        }
    }

    // complex continuation of the current-conservation root around the contour
    fn stray_contour_derivative(s: &SnailArrayStrayL, phi0: f64, s0: f64, n: u32, r: f64) -> f64 {
        let sn = &s.snail;
        let (m, nn) = (sn.m as f64, sn.n as f64);
        let u0 = stray_energy(s, phi0, s0);
        let pts = 512;
        let mut guess = Complex64::new(s0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=pts {
            let t = TAU * k as f64 / pts as f64;
            // walk out along the real axis first, then around the circle
            let path: Vec<Complex64> = if k == 0 {
                (1..=32).map(|j| Complex64::new(phi0 + r * j as f64 / 32.0, 0.0)).collect()
            } else {
                vec![phi0 + Complex64::from_polar(r, t)]
            };
            let mut u = Complex64::new(0.0, 0.0);
            for phi in path {
                let mut x = guess;
                for _ in 0..80 {
                    let g = x.sin() * sn.alpha + ((x - sn.phi_e) / nn).sin() + (x * m - phi) * s.x_j;
                    let dg = x.cos() * sn.alpha + ((x - sn.phi_e) / nn).cos() / nn + s.x_j * m;
                    x -= g / dg;
                }
                guess = x;
                let d = phi - x * m;
                u = (x.cos() * (-sn.alpha) - ((x - sn.phi_e) / nn).cos() * nn) * m + d * d * (0.5 * s.x_j) - u0;
            }
            if k < pts {
                acc += u * Complex64::from_polar(1.0, -(n as f64) * t);
            }
        }
        crate::special::factorial(n) * acc.re / (pts as f64 * r.powi(n as i32))
    }

    #[test]
    fn stray_inductor_config_d_matches_contour_derivatives() {
        let s = SnailArrayStrayL { snail: SnailArray { m: 2, n: 3, alpha: 0.0739, e_j: 1.0, phi_e: flux_phase(0.25) }, x_j: 0.27 };
        let model = CircuitModel::SnailArrayStrayL(s.clone());
        let phi0 = find_minimum(&model).unwrap();
        let c = nonlinear_coeffs(&model, phi0, 8).unwrap();
        let s0 = stray_internal_phase(&s, phi0).unwrap();
        assert!(c[1].abs() < 1e-12);
        for k in 2..=8 {
            let reference = stray_contour_derivative(&s, phi0, s0, k, 1.2);
            assert!(
                (c[k as usize] - reference).abs() <= 1e-5 * reference.abs(),
                "c_{k}: {} vs {reference}",
                c[k as usize]
            );
        }
    }

    #[test]
    fn config_a_frame() {
        let ej = ghz(josephson_energy_ghz(0.8));
        let ec = ghz(charging_energy_ghz(0.32));
        let model = CircuitModel::SnailArrayStrayL(SnailArrayStrayL {
            snail: SnailArray { m: 1, n: 3, alpha: 0.11, e_j: ej, phi_e: flux_phase(0.32) },
            x_j: 100.0,
        });
        let f = mode_frame(&model, ec, 26).unwrap();
        assert!((f.omega0 / TAU / 5.6 - 1.0).abs() < 0.03);
        assert_eq!(f.phi_zpf * f.n_zpf, 0.5);
    }

    #[test]
    fn invalid_snail_rejected() {
        let m = CircuitModel::SnailArray(snail(1, 3, 0.4, 0.0));
        assert!(matches!(find_minimum(&m), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn shifted_start_same_energy() {
        let tc = TwoCosine { a: -2.0, b: -5.0, a1: 1.0, b1: 0.5, a2: 0.0, b2: -0.5, phi_e: 2.0 };
        let base = CircuitModel::TwoCosine(tc.clone());
        let p0 = find_minimum(&base).unwrap();
        let u0 = base.potential(p0).unwrap();
        // same circuit expressed with a shifted external flux by a full period of the slow term
        let shifted = CircuitModel::TwoCosine(TwoCosine { phi_e: 2.0 + 2.0 * TAU, ..tc });
        let p1 = find_minimum(&shifted).unwrap();
        assert!((shifted.potential(p1).unwrap() - u0).abs() < 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }
}
