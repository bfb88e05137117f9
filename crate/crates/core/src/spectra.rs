//! Band sweeps, rate spectra, transfer-peak and reflection-zero finding, and
//! band-edge profiles.
//!
//! Grids are uniform in k; the energy column is emitted alongside for
//! plotting against E. Rows are evaluated independently (in parallel) and
//! assembled in grid order, so identical inputs give bit-identical spectra.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::analytic::{closed_form_amplitudes, phase_prediction, ScatteringSolution};
use crate::error::Error;
use crate::model::{dispersion_energy, ModeCoordinate, RouterConfig, ENDPOINT_MARGIN};
use crate::oracle::{scatter, DEFAULT_TRUNCATION};
use crate::Result;

/// Every sweep row must conserve flux to this tolerance or the sweep fails.
pub const FLUX_TOLERANCE: f64 = 1e-10;

/// Which solver evaluates the grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Oracle,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Oracle => "oracle",
        }
    }
}

/// Uniform wavenumber grid strictly inside (0, π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            k_min: 1e-3 * PI,
            k_max: (1.0 - 1e-3) * PI,
            points: 2001,
        }
    }
}

impl GridSpec {
    pub fn new(k_min: f64, k_max: f64, points: usize) -> Result<Self> {
        let grid = Self {
            k_min,
            k_max,
            points,
        };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 grid points, got {}",
                self.points
            )));
        }
        if !(self.k_min.is_finite() && self.k_max.is_finite()) || self.k_min >= self.k_max {
            return Err(Error::InvalidGrid(format!(
                "need k_min < k_max, got [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        if self.k_min < ENDPOINT_MARGIN || self.k_max > PI - ENDPOINT_MARGIN {
            return Err(Error::InvalidGrid(format!(
                "grid [{}, {}] touches a band edge; k must stay inside \
                 [{ENDPOINT_MARGIN}, pi - {ENDPOINT_MARGIN}]",
                self.k_min, self.k_max
            )));
        }
        Ok(())
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        let step = (self.k_max - self.k_min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.k_min + i as f64 * step)
            .collect()
    }
}

/// One grid row: rates and the flux residual at a band point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub k: f64,
    pub energy: f64,
    pub reflection: f64,
    pub transfers: Vec<f64>,
    pub flux_residual: f64,
}

/// Sampled rate spectrum for one config.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSpectrum {
    pub config: RouterConfig,
    pub grid: GridSpec,
    pub method: Method,
    pub rows: Vec<SpectrumRow>,
}

impl RateSpectrum {
    pub fn total_transfer(&self, row: usize) -> f64 {
        self.rows[row].transfers.iter().sum()
    }
}

fn evaluate_point(k: f64, cfg: &RouterConfig, method: Method) -> Result<ScatteringSolution> {
    let mode = ModeCoordinate::from_wavenumber(k, &cfg.input)?;
    match method {
        Method::Analytic => closed_form_amplitudes(&mode, cfg),
        Method::Oracle => scatter(&mode, cfg, DEFAULT_TRUNCATION),
    }
}

fn row_at(k: f64, cfg: &RouterConfig, method: Method) -> Result<SpectrumRow> {
    let sol = evaluate_point(k, cfg, method)?;
    if sol.flux_residual > FLUX_TOLERANCE {
        return Err(Error::FluxViolation {
            k,
            residual: sol.flux_residual,
            tolerance: FLUX_TOLERANCE,
        });
    }
    Ok(SpectrumRow {
        k,
        energy: dispersion_energy(k, &cfg.input)?,
        reflection: sol.reflection_rate,
        transfers: sol.transfer_rates,
        flux_residual: sol.flux_residual,
    })
}

/// Sweep the grid with the chosen method. Aborts on the first failing point
/// with its grid index attached.
pub fn sweep(cfg: &RouterConfig, grid: &GridSpec, method: Method) -> Result<RateSpectrum> {
    grid.validate()?;
    let ks = grid.wavenumbers();
    let rows: Vec<SpectrumRow> = ks
        .par_iter()
        .enumerate()
        .map(|(index, &k)| {
            row_at(k, cfg, method).map_err(|e| Error::SweepPoint {
                index,
                k,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(RateSpectrum {
        config: cfg.clone(),
        grid: *grid,
        method,
        rows,
    })
}

/// A refined local maximum of the total transfer rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub k: f64,
    pub energy: f64,
    pub height: f64,
    /// Full width at half the peak height, in k; absent when a half-height
    /// crossing falls outside the grid.
    pub half_max_width: Option<f64>,
}

/// A refined reflection zero paired with its phase-law prediction k = nπ/(l−1).
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMatch {
    pub n: usize,
    pub k_predicted: f64,
    pub k_found: f64,
    pub deviation: f64,
    pub reflection_at_zero: f64,
}

/// Peaks of the transfer rate and/or zeros of the reflection rate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakReport {
    pub peaks: Vec<Peak>,
    pub zeros: Vec<ZeroMatch>,
    /// Set when l = 1: R vanishes over the whole band, so there are no
    /// isolated zeros to list.
    pub global_perfect_transfer: bool,
}

/// Locate strict local maxima of the total transfer rate with 3-point
/// parabolic refinement. A flat spectrum reports zero peaks.
pub fn find_transfer_peaks(spectrum: &RateSpectrum) -> Result<PeakReport> {
    let n = spectrum.rows.len();
    if n < 3 {
        return Err(Error::InvalidGrid(format!(
            "peak finding needs at least 3 grid points, got {n}"
        )));
    }
    let t: Vec<f64> = (0..n).map(|i| spectrum.total_transfer(i)).collect();
    let (lo, hi) = t
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let mut report = PeakReport::default();
    if hi - lo < 1e-12 {
        return Ok(report);
    }
    let ks: Vec<f64> = spectrum.rows.iter().map(|r| r.k).collect();
    for i in 1..n - 1 {
        if !(t[i] > t[i - 1] && t[i] > t[i + 1]) {
            continue;
        }
        let h = ks[i + 1] - ks[i];
        let curv = t[i - 1] - 2.0 * t[i] + t[i + 1];
        let (k_peak, height) = if curv.abs() < 1e-300 {
            (ks[i], t[i])
        } else {
            let delta = 0.5 * (t[i - 1] - t[i + 1]) / curv * h;
            let height = t[i] - (t[i - 1] - t[i + 1]).powi(2) / (8.0 * curv);
            (ks[i] + delta, height)
        };
        let half = height / 2.0;
        let left = crossing(&ks, &t, i, half, -1);
        let right = crossing(&ks, &t, i, half, 1);
        report.peaks.push(Peak {
            k: k_peak,
            energy: dispersion_energy(k_peak, &spectrum.config.input)?,
            height,
            half_max_width: left.zip(right).map(|(a, b)| b - a),
        });
    }
    Ok(report)
}

/// Linear-interpolated k where T crosses `level`, scanning from `i` in
/// direction `dir`.
fn crossing(ks: &[f64], t: &[f64], i: usize, level: f64, dir: isize) -> Option<f64> {
    let mut j = i as isize;
    loop {
        let next = j + dir;
        if next < 0 || next as usize >= t.len() {
            return None;
        }
        let (a, b) = (j as usize, next as usize);
        if (t[a] - level) * (t[b] - level) <= 0.0 && t[a] != t[b] {
            let frac = (t[a] - level) / (t[a] - t[b]);
            return Some(ks[a] + frac * (ks[b] - ks[a]));
        }
        j = next;
    }
}

/// Refine the k of minimal R inside [a, b] to |Δk| < 1e−9, by bisection on
/// the sign of a central-difference slope of R (with a ternary-search
/// fallback when the bracket slopes are inconclusive).
fn refine_reflection_minimum<F: Fn(f64) -> Result<f64>>(
    reflection: &F,
    mut a: f64,
    mut b: f64,
) -> Result<f64> {
    const TOL: f64 = 1e-9;
    let h = 1e-7;
    let slope = |k: f64| -> Result<f64> { Ok(reflection(k + h)? - reflection(k - h)?) };
    let (sa, sb) = (slope(a + h)?, slope(b - h)?);
    if sa < 0.0 && sb > 0.0 {
        let (mut lo, mut hi) = (a + h, b - h);
        while hi - lo > TOL {
            let mid = 0.5 * (lo + hi);
            if slope(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(0.5 * (lo + hi));
    }
    // ternary search on R itself
    while b - a > TOL {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if reflection(m1)? < reflection(m2)? {
            b = m2;
        } else {
            a = m1;
        }
    }
    Ok(0.5 * (a + b))
}

/// Find the reflection zeros of the offset-coupling router at the
/// perfect-transfer parameter point and pair them one-to-one with the
/// phase-law prediction k = nπ/(l−1).
pub fn find_reflection_zeros(
    cfg: &RouterConfig,
    coupling_site: usize,
    grid: &GridSpec,
) -> Result<PeakReport> {
    let xi = cfg.input.hopping;
    let matched = cfg.outputs.len() == 1
        && cfg.equal_band()
        && cfg.input.detuning == 0.0
        && (cfg.input.coupling - xi).abs() < 1e-12
        && (cfg.outputs[0].coupling - xi).abs() < 1e-12
        && (cfg.rabi - xi).abs() < 1e-12;
    if !matched {
        return Err(Error::InvalidConfig(
            "reflection-zero analysis requires the perfect-transfer point \
             g_a = g_b = Omega = xi with one output and zero detuning"
                .into(),
        ));
    }
    let mut site_cfg = cfg.clone();
    site_cfg.input.coupling_site = coupling_site;

    let spectrum = sweep(&site_cfg, grid, Method::Analytic)?;
    let prediction = phase_prediction(coupling_site);

    let mut report = PeakReport::default();
    if coupling_site == 1 {
        let max_r = spectrum
            .rows
            .iter()
            .map(|r| r.reflection)
            .fold(0.0_f64, f64::max);
        if max_r > 1e-10 {
            return Err(Error::ZeroMismatch(format!(
                "expected the global perfect-transfer regime at l = 1 but \
                 max R = {max_r}"
            )));
        }
        report.global_perfect_transfer = true;
        return Ok(report);
    }

    let reflection = |k: f64| -> Result<f64> {
        let mode = ModeCoordinate::from_wavenumber(k, &site_cfg.input)?;
        Ok(closed_form_amplitudes(&mode, &site_cfg)?.reflection_rate)
    };

    // candidate zero cells: local minima of the sampled R
    let r: Vec<f64> = spectrum.rows.iter().map(|row| row.reflection).collect();
    let ks: Vec<f64> = spectrum.rows.iter().map(|row| row.k).collect();
    let mut found: Vec<(f64, f64)> = Vec::new();
    for i in 1..r.len() - 1 {
        if r[i] <= r[i - 1] && r[i] <= r[i + 1] && r[i] < 1e-4 {
            let k0 = refine_reflection_minimum(&reflection, ks[i - 1], ks[i + 1])?;
            let r0 = reflection(k0)?;
            if r0 < 1e-8 {
                found.push((k0, r0));
            }
        }
    }

    let predicted = &prediction.perfect_transfer_wavenumbers;
    if found.len() != predicted.len() {
        return Err(Error::ZeroMismatch(format!(
            "predicted {} zeros at l = {coupling_site}, found {} (at {:?})",
            predicted.len(),
            found.len(),
            found.iter().map(|(k, _)| *k).collect::<Vec<_>>()
        )));
    }
    for (n, (&kp, &(kf, rf))) in predicted.iter().zip(found.iter()).enumerate() {
        report.zeros.push(ZeroMatch {
            n: n + 1,
            k_predicted: kp,
            k_found: kf,
            deviation: (kf - kp).abs(),
            reflection_at_zero: rf,
        });
    }
    Ok(report)
}

/// Which band edge a profile hugs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandEdge {
    /// k → 0 (E → Δ − 2ξ).
    Lower,
    /// k → π (E → Δ + 2ξ).
    Upper,
}

/// Dense band-edge spectrum plus the k-width over which R collapses.
#[derive(Debug, Clone, PartialEq)]
pub struct BandEdgeProfile {
    pub spectrum: RateSpectrum,
    /// k-distance between the last sample with R > 0.99 (edge side) and the
    /// first with R < 0.01; absent when R never reaches 0.99 near the edge.
    pub transition_width: Option<f64>,
}

/// Sample `samples` points covering `span` from a band edge inward.
pub fn band_edge_profile(
    cfg: &RouterConfig,
    edge: BandEdge,
    span: f64,
    samples: usize,
) -> Result<BandEdgeProfile> {
    if span < 10.0 * ENDPOINT_MARGIN {
        return Err(Error::InvalidGrid(format!(
            "band-edge span {span} below the resolvable width {}",
            10.0 * ENDPOINT_MARGIN
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidGrid("need at least 2 edge samples".into()));
    }
    // anchor the edge-side endpoint at the resolvable margin so the profile
    // captures R -> 1 before it collapses
    let grid = match edge {
        BandEdge::Lower => GridSpec::new(ENDPOINT_MARGIN, span, samples)?,
        BandEdge::Upper => GridSpec::new(PI - span, PI - ENDPOINT_MARGIN, samples)?,
    };
    let method = if cfg.equal_band() && cfg.outputs.len() <= 2 {
        Method::Analytic
    } else {
        Method::Oracle
    };
    let spectrum = sweep(cfg, &grid, method)?;

    // walk away from the edge
    let indices: Vec<usize> = match edge {
        BandEdge::Lower => (0..spectrum.rows.len()).collect(),
        BandEdge::Upper => (0..spectrum.rows.len()).rev().collect(),
    };
    let mut k_high: Option<f64> = None;
    let mut width = None;
    for &i in &indices {
        let row = &spectrum.rows[i];
        if row.reflection > 0.99 {
            k_high = Some(row.k);
        } else if row.reflection < 0.01 {
            if let Some(kh) = k_high {
                width = Some((row.k - kh).abs());
            }
            break;
        }
    }
    Ok(BandEdgeProfile {
        spectrum,
        transition_width: width,
    })
}
