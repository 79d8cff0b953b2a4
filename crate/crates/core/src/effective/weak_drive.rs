use crate::circuit::{ModeFrame, SquidArray};

/// Weak-drive Kerr and squeezing of a flux-pumped SQUID array, from the
/// compact single-cosine form: returns (K, eps2).
pub fn weak_drive_squid_check(squid: &SquidArray, frame: &ModeFrame, phi_ac0: f64) -> (f64, f64) {
    let m = squid.m as f64;
    let damp = (-frame.phi_zpf * frame.phi_zpf / (2.0 * m * m)).exp();
    let kerr = frame.e_c * damp / (2.0 * m * m);
    let (a, x) = (squid.alpha, squid.phi_dc);
    let root = (1.0 + a * a + 2.0 * a * x.cos()).sqrt();
    let e_eff = squid.effective_ej();
    let slope = -squid.e_j * a * x.sin() / root;
    let eps2 = phi_ac0 / 2.0 * (2.0 * frame.e_c / (m * e_eff)).sqrt() * damp * slope;
    (kerr, eps2)
}
