//! Supercoefficients of driven Josephson circuits.
//!
//! Three independent routes to the amplitudes C_{nl,p} of normal-ordered
//! parametric processes: a truncated series in the potential derivatives,
//! a Bessel closed form for cosine potentials, and a brute-force Fock-space
//! extraction ([`oracle`]). On top sit effective Kerr-cat and beam-splitter
//! parameters, exact-eigenbasis coefficients and design sweeps.

pub mod circuit;
pub mod effective;
pub mod eigen;
pub mod error;
pub mod oracle;
pub mod presets;
pub mod sc;
pub mod special;
pub mod sweep;
pub mod units;

pub use circuit::{
    find_minimum, mode_frame, nonlinear_coeffs, stray_inductor_coeffs, CircuitModel, CosineTerm, HigherHarmonics,
    ModeFrame, SnailArray, SnailArrayStrayL, SquidArray, TwoCosine,
};
pub use error::{Error, Result};
pub use sc::{
    sc_closed, sc_higher_harmonics, sc_multidrive, sc_series, sc_three_mode, Displacement, Engine, EngineChoice,
    MultiDriveIndex, ScIndex, ScProblem, ScValue, SeriesOptions, ThreeModeIndex,
};
pub use effective::{
    beam_splitter, chaos_ratio, kerr_cat, weak_drive_squid_check, BeamSplitterOptions, BeamSplitterParams,
    BeamSplitterSetup, ChaosClass, ChaosReport, CouplerDrive, DrivePhase, KerrCatDrive, KerrCatOptions, KerrCatParams,
};
