//! Effective-Hamiltonian parameters assembled from supercoefficients, with
//! first-order corrections beyond the rotating-wave approximation.

mod beam_splitter;
mod chaos;
mod kerr_cat;
mod weak_drive;

pub use beam_splitter::{
    assemble_beam_splitter, beam_splitter, beam_splitter_with_frame, BeamSplitterOptions, BeamSplitterParams, BeamSplitterSetup, CouplerDrive,
    CHI_CORRECTION, DELTA_A_CORRECTION, G_AB_CORRECTION, G_AC_CORRECTION,
};
pub use chaos::{chaos_ratio, ChaosClass, ChaosReport, CHAOS_ONSET, CHAOS_UPPER};
pub use kerr_cat::{
    kerr_cat, DrivePhase, KerrCatDrive, KerrCatOptions, KerrCatParams, DETUNING_CORRECTION, EPS2_CORRECTION,
    KERR_CORRECTION,
};
pub use weak_drive::weak_drive_squid_check;
