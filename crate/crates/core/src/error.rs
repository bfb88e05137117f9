use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Wavenumber on or too close to a band edge (zero group velocity).
    #[error("wavenumber k = {k} is outside the open band interval (0, pi)")]
    BandEdgeWavenumber { k: f64 },

    /// Energy sits exactly on a band edge of some waveguide.
    #[error("energy E = {energy} lies on a band edge (detuning {detuning}, hopping {hopping})")]
    BandEdgeEnergy {
        energy: f64,
        detuning: f64,
        hopping: f64,
    },

    /// The effective potentials V_d and G diverge at E^2 = Omega^2.
    #[error("effective potentials are singular at E^2 = Omega^2 (E = {energy}, Omega = {rabi})")]
    SingularPotential { energy: f64, rabi: f64 },

    /// Closed forms require equal hoppings and equal detunings across waveguides.
    #[error("closed-form amplitudes require matched bands: {0}")]
    AnalyticAssumption(String),

    /// Configurations with no printed closed form (only the lattice solver applies).
    #[error("no closed form for this configuration: {0}")]
    NoClosedForm(String),

    #[error("truncation length {given} too small; need at least {required}")]
    TruncationTooSmall { given: usize, required: usize },

    #[error("lattice system is numerically degenerate at k = {k}")]
    DegenerateSystem { k: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A sweep aborts on the first failing grid point, with its index attached.
    #[error("sweep failed at grid index {index} (k = {k}): {source}")]
    SweepPoint {
        index: usize,
        k: f64,
        #[source]
        source: Box<Error>,
    },

    /// A row's flux residual exceeded the sweep tolerance.
    #[error("flux residual {residual} exceeds {tolerance} at k = {k}")]
    FluxViolation {
        k: f64,
        residual: f64,
        tolerance: f64,
    },

    /// Found reflection zeros do not pair one-to-one with the phase-law prediction.
    #[error("reflection zeros disagree with the phase prediction: {0}")]
    ZeroMismatch(String),
}
