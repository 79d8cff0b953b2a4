//! Truncated S-shell sum of the SC expansion.

use super::{SeriesChannel, TermShape};
use crate::special::factorial;

/// Per-drive factors (x/2)^(2k+p) / (k! (k+p)!) for k = 0..=k_max.
pub(super) fn drive_factors(x: f64, p: u32, k_max: usize) -> Vec<f64> {
    (0..=k_max as u32)
        .map(|k| (0.5 * x).powi((2 * k + p) as i32) / (factorial(k) * factorial(k + p)))
        .collect()
}

/// D[K] = sum over (k_1..k_D) with sum K of prod_i f_i[k_i].
pub(super) fn convolve_drives(amps: &[f64], ps: &[u32], k_max: usize) -> Vec<f64> {
    let mut acc = vec![0.0; k_max + 1];
    acc[0] = 1.0;
    for (&x, &p) in amps.iter().zip(ps) {
        let f = drive_factors(x, p, k_max);
        let mut next = vec![0.0; k_max + 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in f.iter().enumerate().take(k_max + 1 - i) {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// Returns (value, magnitude of the last included shell).
pub(super) fn evaluate(ch: &SeriesChannel, shape: &TermShape, e_j: f64, phi_zpf: f64, s_max: u32) -> (f64, f64) {
    let base = shape.op_order + shape.p_total();
    if base > s_max {
        return (0.0, 0.0);
    }
    let r = ((s_max - base) / 2) as usize;
    let pref = e_j * phi_zpf.powi(shape.op_order as i32) * shape.mode_factor / shape.denom;
    let y = 0.5 * phi_zpf * phi_zpf * shape.gauss_scale;
    let d = convolve_drives(&ch.drives, &shape.p, r);
    let gauss: Vec<f64> = (0..=r as u32).map(|m| y.powi(m as i32) / factorial(m)).collect();

    let mut value = 0.0;
    let mut last = 0.0;
    for t in 0..=r {
        let s = base as usize + 2 * t;
        if s < 3 {
            continue;
        }
        let shell_sum: f64 = (0..=t).map(|m| gauss[m] * d[t - m]).sum();
        let shell = pref * ch.coeffs[s] * shell_sum;
        value += shell;
        last = shell;
    }
    (value, last.abs())
}
