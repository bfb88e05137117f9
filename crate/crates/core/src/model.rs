//! Domain types, parameter validation, band dispersion, rotating-frame
//! reduction, and the energy-dependent effective potentials.
//!
//! Conventions: all energies, couplings, and frequencies are in units of the
//! hopping strength, detunings default to zero, and the band of a waveguide
//! with detuning `Δ` and hopping `ξ` is `E = Δ − 2ξ cos k` with `k ∈ (0, π)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Error;
use crate::Result;

/// Wavenumbers closer than this to a band endpoint are rejected (the group
/// velocity 2ξ sin k vanishes at k ∈ {0, π} and no transfer can occur there).
pub const ENDPOINT_MARGIN: f64 = 1e-6;

/// Which atomic transition a waveguide's end cavity couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    /// |g> <-> |f>; the input waveguide.
    ViaF,
    /// |g> <-> |e>; output waveguides.
    ViaE,
}

/// One semi-infinite coupled-resonator waveguide attached to the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideSpec {
    pub detuning: f64,
    pub hopping: f64,
    pub coupling: f64,
    /// Lattice site (1-based) the atom attaches to. Always 1 for outputs;
    /// the input may attach deeper into the chain (offset-coupling model).
    pub coupling_site: usize,
    pub transition: Transition,
}

impl WaveguideSpec {
    pub fn new(
        detuning: f64,
        hopping: f64,
        coupling: f64,
        coupling_site: usize,
        transition: Transition,
    ) -> Result<Self> {
        if !hopping.is_finite() || hopping <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "hopping must be strictly positive, got {hopping}"
            )));
        }
        if !coupling.is_finite() || coupling < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "coupling must be nonnegative, got {coupling}"
            )));
        }
        if coupling_site < 1 {
            return Err(Error::InvalidConfig(
                "coupling site must be at least 1".into(),
            ));
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidConfig("detuning must be finite".into()));
        }
        Ok(Self {
            detuning,
            hopping,
            coupling,
            coupling_site,
            transition,
        })
    }

    /// Input waveguide (|g>-|f> transition) with unit hopping and zero detuning.
    pub fn input(coupling: f64, coupling_site: usize) -> Result<Self> {
        Self::new(0.0, 1.0, coupling, coupling_site, Transition::ViaF)
    }

    /// Output waveguide (|g>-|e> transition) coupled at site 1, unit hopping,
    /// zero detuning.
    pub fn output(coupling: f64) -> Result<Self> {
        Self::new(0.0, 1.0, coupling, 1, Transition::ViaE)
    }
}

/// Lab-frame frequencies before the rotating-frame reduction. The classical
/// drive is resonant by construction: ν = ω_e − ω_f.
#[derive(Debug, Clone, PartialEq)]
pub struct LabFrameParams {
    pub omega_input: f64,
    pub omega_outputs: Vec<f64>,
    pub omega_f: f64,
    pub omega_e: f64,
    pub nu: f64,
}

/// Per-waveguide detunings after the rotating-frame reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatingFrameDetunings {
    pub input: f64,
    pub outputs: Vec<f64>,
}

impl LabFrameParams {
    pub fn new(
        omega_input: f64,
        omega_outputs: Vec<f64>,
        omega_f: f64,
        omega_e: f64,
        nu: f64,
    ) -> Result<Self> {
        let scale = 1.0_f64.max(omega_e.abs()).max(omega_f.abs());
        if (nu - (omega_e - omega_f)).abs() > 1e-12 * scale {
            return Err(Error::InvalidConfig(format!(
                "drive must be resonant: nu = omega_e - omega_f, got nu = {nu}, \
                 omega_e - omega_f = {}",
                omega_e - omega_f
            )));
        }
        Ok(Self {
            omega_input,
            omega_outputs,
            omega_f,
            omega_e,
            nu,
        })
    }
}

/// Rotating-frame reduction: the input waveguide is measured against ω_f,
/// every output against ω_e.
pub fn reduce_to_rotating_frame(lab: &LabFrameParams) -> RotatingFrameDetunings {
    RotatingFrameDetunings {
        input: lab.omega_input - lab.omega_f,
        outputs: lab
            .omega_outputs
            .iter()
            .map(|w| w - lab.omega_e)
            .collect(),
    }
}

/// Full router: drive strength plus the attached waveguides.
#[derive(Debug, Clone, PartialEq)]
pub struct RouterConfig {
    pub rabi: f64,
    pub input: WaveguideSpec,
    pub outputs: Vec<WaveguideSpec>,
}

impl RouterConfig {
    pub fn new(rabi: f64, input: WaveguideSpec, outputs: Vec<WaveguideSpec>) -> Result<Self> {
        if !rabi.is_finite() || rabi < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "Rabi frequency must be nonnegative, got {rabi}"
            )));
        }
        if input.transition != Transition::ViaF {
            return Err(Error::InvalidConfig(
                "the input waveguide must couple via the |g>-|f> transition".into(),
            ));
        }
        if outputs.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one output waveguide is required".into(),
            ));
        }
        for (i, w) in outputs.iter().enumerate() {
            if w.transition != Transition::ViaE {
                return Err(Error::InvalidConfig(format!(
                    "output waveguide {i} must couple via the |g>-|e> transition; \
                     exactly one waveguide (the input) couples via |g>-|f>"
                )));
            }
            if w.coupling_site != 1 {
                return Err(Error::InvalidConfig(format!(
                    "output waveguide {i} must couple at site 1, got {}",
                    w.coupling_site
                )));
            }
        }
        Ok(Self {
            rabi,
            input,
            outputs,
        })
    }

    /// Two waveguides, both coupled at site 1, unit hopping, zero detuning.
    pub fn two_channel(g_in: f64, g_out: f64, rabi: f64) -> Result<Self> {
        Self::new(
            rabi,
            WaveguideSpec::input(g_in, 1)?,
            vec![WaveguideSpec::output(g_out)?],
        )
    }

    /// Two waveguides with the input coupled at site `l`.
    pub fn offset(g_in: f64, site: usize, g_out: f64, rabi: f64) -> Result<Self> {
        Self::new(
            rabi,
            WaveguideSpec::input(g_in, site)?,
            vec![WaveguideSpec::output(g_out)?],
        )
    }

    /// One input and two outputs, all coupled at site 1.
    pub fn three_channel(g_in: f64, g_b: f64, g_c: f64, rabi: f64) -> Result<Self> {
        Self::new(
            rabi,
            WaveguideSpec::input(g_in, 1)?,
            vec![WaveguideSpec::output(g_b)?, WaveguideSpec::output(g_c)?],
        )
    }

    pub fn waveguide_count(&self) -> usize {
        1 + self.outputs.len()
    }

    /// Iterate over all waveguides, input first.
    pub fn waveguides(&self) -> impl Iterator<Item = &WaveguideSpec> {
        std::iter::once(&self.input).chain(self.outputs.iter())
    }

    /// Whether all waveguides share one band (equal hoppings and detunings);
    /// the closed forms are only valid in this regime.
    pub fn equal_band(&self) -> bool {
        self.outputs
            .iter()
            .all(|w| w.hopping == self.input.hopping && w.detuning == self.input.detuning)
    }
}

fn check_wavenumber(k: f64) -> Result<()> {
    if !k.is_finite() || k < ENDPOINT_MARGIN || k > PI - ENDPOINT_MARGIN {
        return Err(Error::BandEdgeWavenumber { k });
    }
    Ok(())
}

/// Band dispersion E = Δ − 2ξ cos k; monotone increasing on (0, π).
pub fn dispersion_energy(k: f64, w: &WaveguideSpec) -> Result<f64> {
    check_wavenumber(k)?;
    Ok(w.detuning - 2.0 * w.hopping * k.cos())
}

/// A propagating photon mode: paired (k, E) on a waveguide's band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoordinate {
    k: f64,
    energy: f64,
}

impl ModeCoordinate {
    pub fn from_wavenumber(k: f64, w: &WaveguideSpec) -> Result<Self> {
        let energy = dispersion_energy(k, w)?;
        Ok(Self { k, energy })
    }

    /// Inverse construction; fails unless the energy is strictly inside the band.
    pub fn from_energy(energy: f64, w: &WaveguideSpec) -> Result<Self> {
        match wavenumber_from_energy(energy, w)? {
            ChannelWavenumber::Propagating { k } => Ok(Self { k, energy }),
            ChannelWavenumber::Evanescent { .. } => Err(Error::BandEdgeEnergy {
                energy,
                detuning: w.detuning,
                hopping: w.hopping,
            }),
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }
}

/// Per-waveguide closure at a fixed energy: either a real wavenumber inside
/// the band or a decaying Bloch factor e^{ik} with |e^{ik}| < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelWavenumber {
    Propagating { k: f64 },
    Evanescent { bloch_factor: Complex64 },
}

impl ChannelWavenumber {
    /// e^{ik} in either regime.
    pub fn bloch_factor(&self) -> Complex64 {
        match *self {
            ChannelWavenumber::Propagating { k } => Complex64::from_polar(1.0, k),
            ChannelWavenumber::Evanescent { bloch_factor } => bloch_factor,
        }
    }

    /// Group velocity 2ξ sin k; zero flux for evanescent channels.
    pub fn group_velocity(&self, hopping: f64) -> f64 {
        match *self {
            ChannelWavenumber::Propagating { k } => 2.0 * hopping * k.sin(),
            ChannelWavenumber::Evanescent { .. } => 0.0,
        }
    }
}

/// Invert the dispersion relation. Inside the band this returns the real
/// k = arccos((Δ−E)/2ξ) ∈ (0, π); outside it returns the root of
/// e^{ik} + e^{−ik} = (Δ−E)/ξ inside the unit disk, so the closure decays.
pub fn wavenumber_from_energy(energy: f64, w: &WaveguideSpec) -> Result<ChannelWavenumber> {
    let c = (w.detuning - energy) / (2.0 * w.hopping);
    if !c.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "non-finite energy {energy}"
        )));
    }
    if c.abs() < 1.0 {
        let k = c.acos();
        check_wavenumber(k).map_err(|_| Error::BandEdgeEnergy {
            energy,
            detuning: w.detuning,
            hopping: w.hopping,
        })?;
        Ok(ChannelWavenumber::Propagating { k })
    } else if c.abs() - 1.0 < 5e-13 {
        Err(Error::BandEdgeEnergy {
            energy,
            detuning: w.detuning,
            hopping: w.hopping,
        })
    } else {
        // z^2 - 2cz + 1 = 0; the product of roots is 1, take the one inside
        // the unit disk.
        let z = c - c.signum() * (c * c - 1.0).sqrt();
        Ok(ChannelWavenumber::Evanescent {
            bloch_factor: Complex64::new(z, 0.0),
        })
    }
}

/// Energy-dependent δ-like potentials V_d and the dispersive couplings G
/// between channel pairs. Finite only away from E = ±Ω; the closed forms in
/// [`crate::analytic`] use multiplied-out expressions instead and stay
/// regular there.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePotentials {
    /// V_d = g_d² E / (E² − Ω²), input first.
    pub v: Vec<f64>,
    /// Input-output couplings Ω g_a g_d / (E² − Ω²), one per output.
    pub input_output: Vec<f64>,
    /// Output-output couplings E g_d g_d' / (E² − Ω²) for d < d'.
    pub output_output: Vec<(usize, usize, f64)>,
}

pub fn effective_potentials(energy: f64, cfg: &RouterConfig) -> Result<EffectivePotentials> {
    let denom = energy * energy - cfg.rabi * cfg.rabi;
    if denom == 0.0 {
        return Err(Error::SingularPotential {
            energy,
            rabi: cfg.rabi,
        });
    }
    let v = cfg
        .waveguides()
        .map(|w| w.coupling * w.coupling * energy / denom)
        .collect();
    let g_in = cfg.input.coupling;
    let input_output = cfg
        .outputs
        .iter()
        .map(|w| cfg.rabi * g_in * w.coupling / denom)
        .collect();
    let mut output_output = Vec::new();
    for i in 0..cfg.outputs.len() {
        for j in (i + 1)..cfg.outputs.len() {
            output_output.push((
                i,
                j,
                energy * cfg.outputs[i].coupling * cfg.outputs[j].coupling / denom,
            ));
        }
    }
    Ok(EffectivePotentials {
        v,
        input_output,
        output_output,
    })
}

/// Phase factors entering the offset-coupling closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFactors {
    /// N = e^{2ik} − 1.
    pub n_factor: Complex64,
    /// M₊ = e^{2ikl} − 1.
    pub m_plus: Complex64,
    /// M₋ = e^{−2ikl} − 1.
    pub m_minus: Complex64,
    /// D = (E² − Ω²) ξ².
    pub d_factor: f64,
}

impl PhaseFactors {
    pub fn new(k: f64, coupling_site: usize, energy: f64, rabi: f64, hopping: f64) -> Self {
        let l = coupling_site as f64;
        Self {
            n_factor: Complex64::from_polar(1.0, 2.0 * k) - 1.0,
            m_plus: Complex64::from_polar(1.0, 2.0 * k * l) - 1.0,
            m_minus: Complex64::from_polar(1.0, -2.0 * k * l) - 1.0,
            d_factor: (energy * energy - rabi * rabi) * hopping * hopping,
        }
    }
}
