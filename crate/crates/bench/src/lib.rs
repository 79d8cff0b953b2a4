//! Shared fixtures for the benchmarks in `benches/`.

use supercoeff_core::circuit::{mode_frame, CircuitModel, ModeFrame, SnailArray};
use supercoeff_core::units::flux_phase;

/// SNAIL with E_J = 500 E_C and a moderately large zero-point phase.
pub fn snail_fixture(n_max: u32) -> (CircuitModel, ModeFrame) {
    let model = CircuitModel::SnailArray(SnailArray { m: 1, n: 3, alpha: 0.29, e_j: 500.0, phi_e: flux_phase(0.4) });
    let mut frame = mode_frame(&model, 1.0, n_max).expect("fixture frame");
    frame.phi_zpf = 0.3;
    (model, frame)
}
