//! Bessel closed form of the SC sum for cosine-family potentials.

use super::series::convolve_drives;
use super::{CosineChannel, ScIndex, TermShape};
use crate::circuit::{shifted_cos, ModeFrame, SquidArray};
use crate::special::{bessel_j, factorial};

/// Resummed drive/Gaussian factor of one cosine term with the S < 3 shells removed.
fn bracket(freq: f64, drives: &[f64], shape: &TermShape, phi_zpf: f64) -> f64 {
    let y = 0.5 * freq * freq * phi_zpf * phi_zpf * shape.gauss_scale;
    let bessel: f64 = drives.iter().zip(&shape.p).map(|(&x, &p)| bessel_j(p, freq * x)).product();
    let mut full = bessel * (-y).exp();

    let base = shape.op_order + shape.p_total();
    if base < 3 {
        let t_max = ((2 - base) / 2) as usize;
        let scaled: Vec<f64> = drives.iter().map(|x| freq * x).collect();
        let d = convolve_drives(&scaled, &shape.p, t_max);
        for t in 0..=t_max {
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            let shell: f64 = (0..=t).map(|m| y.powi(m as i32) / factorial(m as u32) * d[t - m]).sum();
            full -= sign * shell;
        }
    }
    full
}

pub(super) fn evaluate(ch: &CosineChannel, shape: &TermShape, phi_zpf: f64) -> f64 {
    let q = shape.op_order;
    let pref = ch.amplitude * (ch.freq * phi_zpf).powi(q as i32) * shape.mode_factor / shape.denom;
    if pref == 0.0 {
        return 0.0;
    }
    pref * shifted_cos(ch.angle, q + shape.p_total()) * bracket(ch.freq, &ch.drives, shape, phi_zpf)
}

/// SQUID-array SC written through the combined amplitude A_p and angle lambda'_p
/// of both junction branches (flux-drive displacements `pi_a`, `pi_b`).
pub fn squid_compact_sc(squid: &SquidArray, frame: &ModeFrame, pi_a: f64, pi_b: f64, idx: ScIndex) -> f64 {
    let m = squid.m as f64;
    let shape = TermShape::single(idx.n, idx.l, vec![idx.p]);
    let f = 1.0 / m;
    let ja = bracket(f, &[pi_a], &shape, frame.phi_zpf);
    let jb = bracket(f, &[pi_b], &shape, frame.phi_zpf);
    let (ra, rb, phi) = (squid.r_a, squid.r_b, squid.phi_dc);
    let re = squid.alpha * ja * (ra * phi).cos() + jb * (rb * phi).cos();
    let im = -squid.alpha * ja * (ra * phi).sin() + jb * (rb * phi).sin();
    let amp = re.hypot(im);
    let lambda = -im.atan2(re);
    let q = shape.op_order;
    -m * squid.e_j * (f * frame.phi_zpf).powi(q as i32) / shape.denom
        * amp
        * shifted_cos(frame.phi0 / m - lambda, q + idx.p)
}
