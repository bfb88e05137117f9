//! Single-photon scattering in semi-infinite coupled-resonator waveguides
//! (CRWs) connected by a driven cyclic three-level giant atom.
//!
//! The crate evaluates the closed-form reflection/transfer amplitudes for
//! two-channel, offset-coupling, and three-channel router layouts, checks
//! them against an exact truncated-lattice linear solver, and provides band
//! sweeps, peak finding, and reflection-zero analysis on top.

pub mod analytic;
pub mod error;
pub mod model;
pub mod oracle;
pub mod spectra;

pub use analytic::{PhasePrediction, ScatteringSolution};
pub use error::Error;
pub use model::{
    ChannelWavenumber, EffectivePotentials, LabFrameParams, ModeCoordinate, PhaseFactors,
    RouterConfig, Transition, WaveguideSpec,
};
pub use oracle::{DeviationReport, LatticeSystem, VerificationOutcome};
pub use spectra::{BandEdge, BandEdgeProfile, GridSpec, Method, PeakReport, RateSpectrum};

pub type Result<T> = std::result::Result<T, Error>;
