use serde::{Deserialize, Serialize};

use super::KerrCatParams;

pub const CHAOS_ONSET: f64 = 0.02;
pub const CHAOS_UPPER: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChaosClass {
    Regular,
    Onset,
    Chaotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosReport {
    pub ratio: f64,
    pub class: ChaosClass,
    /// heuristic width (omega_q / 4 eps2) exp(-omega_q / 4 eps2)
    pub layer_width: f64,
}

impl ChaosClass {
    pub fn of(ratio: f64) -> Self {
        let r = ratio.abs();
        if r < CHAOS_ONSET {
            ChaosClass::Regular
        } else if r <= CHAOS_UPPER {
            ChaosClass::Onset
        } else {
            ChaosClass::Chaotic
        }
    }
}

pub fn chaos_ratio(params: &KerrCatParams) -> ChaosReport {
    let ratio = params.eps2 / params.omega_q;
    let layer_width = if ratio == 0.0 {
        0.0
    } else {
        let x = 1.0 / (4.0 * ratio.abs());
        x * (-x).exp()
    };
    ChaosReport { ratio, class: ChaosClass::of(ratio), layer_width }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(eps2: f64, omega_q: f64) -> KerrCatParams {
        KerrCatParams {
            omega0: omega_q,
            omega_d: 2.0 * omega_q,
            omega_q,
            kerr: 0.01,
            eps2,
            detuning: 0.0,
            cat_size: eps2 / 0.01,
            chaos_ratio: eps2 / omega_q,
            gamma: 0.0,
            delta_correction: 0.0,
            kerr_correction: 0.0,
            eps2_correction: 0.0,
        }
    }

    #[test]
    fn classes() {
        assert_eq!(chaos_ratio(&params(0.0, 30.0)).class, ChaosClass::Regular);
        assert_eq!(chaos_ratio(&params(0.0, 30.0)).ratio, 0.0);
        assert_eq!(chaos_ratio(&params(0.75, 30.0)).class, ChaosClass::Onset);
        assert_eq!(chaos_ratio(&params(1.2, 30.0)).class, ChaosClass::Chaotic);
        assert_eq!(ChaosClass::of(0.02), ChaosClass::Onset);
        assert_eq!(ChaosClass::of(0.03), ChaosClass::Onset);
    }

    #[test]
    fn layer_width_grows_with_drive() {
        let w1 = chaos_ratio(&params(0.3, 30.0)).layer_width;
        let w2 = chaos_ratio(&params(0.9, 30.0)).layer_width;
        assert!(w2 > w1 && w1 > 0.0);
        let r = 0.025;
        let x = 1.0 / (4.0 * r);
        assert!((chaos_ratio(&params(r * 30.0, 30.0)).layer_width - x * (-x).exp()).abs() < 1e-15);
    }
}
