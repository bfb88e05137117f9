//! Exact numerical solver for the discrete stationary scattering equations on
//! a truncated lattice.
//!
//! The truncation is not an approximation: beyond the last coupling site the
//! field is an exact superposition of Bloch waves, so each waveguide ends with
//! two rows — the stationary equation at site J with the site-(J+1) amplitude
//! substituted by its plane-wave/decaying closure, and a matching row pinning
//! the ansatz at site J. Results are therefore independent of J above the
//! minimum, which the tests check to 1e−12.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::analytic::{closed_form_amplitudes, ScatteringSolution};
use crate::error::Error;
use crate::model::{wavenumber_from_energy, ModeCoordinate, RouterConfig};
use crate::Result;

/// Default per-waveguide truncation length; comfortably above any coupling
/// site used in practice, and the resulting systems stay below ~200 unknowns.
pub const DEFAULT_TRUNCATION: usize = 64;

/// Assembled complex linear system for one (mode, config) pair.
///
/// Unknown layout: `[U_f, U_e]`, then per waveguide (input first) the site
/// amplitudes `A_1..A_J` followed by that waveguide's scattering coefficient
/// (`r` for the input, `t_d` for outputs).
#[derive(Debug, Clone)]
pub struct LatticeSystem {
    matrix: DMatrix<Complex64>,
    rhs: DVector<Complex64>,
    truncation: usize,
    k_in: f64,
    /// Group velocity of each channel (input first); zero for evanescent outputs.
    velocities: Vec<f64>,
}

impl LatticeSystem {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<Complex64> {
        &self.rhs
    }

    fn block(&self, waveguide: usize) -> usize {
        2 + waveguide * (self.truncation + 1)
    }

    /// Column of the site-`j` amplitude (1-based) of a waveguide.
    pub fn site_column(&self, waveguide: usize, site: usize) -> usize {
        self.block(waveguide) + site - 1
    }

    /// Column of a waveguide's scattering coefficient.
    pub fn coefficient_column(&self, waveguide: usize) -> usize {
        self.block(waveguide) + self.truncation
    }
}

/// Build the truncated stationary system for a photon incident on the input
/// waveguide. Output closures may be evanescent when the shared energy falls
/// outside an output band.
pub fn build_system(
    mode: &ModeCoordinate,
    cfg: &RouterConfig,
    truncation: usize,
) -> Result<LatticeSystem> {
    let required = (cfg.input.coupling_site + 2).max(3);
    if truncation < required {
        return Err(Error::TruncationTooSmall {
            given: truncation,
            required,
        });
    }
    let energy = mode.energy();
    let k_in = mode.k();
    let n_wg = cfg.waveguide_count();
    let dim = 2 + n_wg * (truncation + 1);

    // Per-channel closure: the input propagates by construction; each output
    // takes the Bloch factor at the shared energy.
    let mut bloch: Vec<Complex64> = Vec::with_capacity(n_wg);
    let mut velocities: Vec<f64> = Vec::with_capacity(n_wg);
    bloch.push(Complex64::from_polar(1.0, k_in));
    velocities.push(2.0 * cfg.input.hopping * k_in.sin());
    for out in &cfg.outputs {
        let ch = wavenumber_from_energy(energy, out)?;
        bloch.push(ch.bloch_factor());
        velocities.push(ch.group_velocity(out.hopping));
    }

    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut rhs = DVector::<Complex64>::zeros(dim);
    let sys = LatticeSystem {
        matrix: DMatrix::zeros(0, 0),
        rhs: DVector::zeros(0),
        truncation,
        k_in,
        velocities: velocities.clone(),
    };

    let e = Complex64::new(energy, 0.0);
    let z_in = bloch[0];
    let z_in_inv = z_in.conj(); // |z_in| = 1

    // atom rows: E U_f = Omega U_e + g_a A_l ; E U_e = Omega U_f + sum g_d B_1
    m[(0, 0)] = -e;
    m[(0, 1)] = Complex64::new(cfg.rabi, 0.0);
    m[(0, sys.site_column(0, cfg.input.coupling_site))] = Complex64::new(cfg.input.coupling, 0.0);
    m[(1, 0)] = Complex64::new(cfg.rabi, 0.0);
    m[(1, 1)] = -e;
    for (d, out) in cfg.outputs.iter().enumerate() {
        m[(1, sys.site_column(d + 1, 1))] = Complex64::new(out.coupling, 0.0);
    }

    let mut row = 2;
    for (d, wg) in cfg.waveguides().enumerate() {
        let z = bloch[d];
        let atom_col = if d == 0 { 0 } else { 1 };
        let site = if d == 0 { cfg.input.coupling_site } else { 1 };
        let xi = Complex64::new(wg.hopping, 0.0);
        for j in 1..=truncation {
            let delta_e = Complex64::new(wg.detuning - energy, 0.0);
            m[(row, sys.site_column(d, j))] += delta_e;
            if j >= 2 {
                m[(row, sys.site_column(d, j - 1))] -= xi;
            }
            if j < truncation {
                m[(row, sys.site_column(d, j + 1))] -= xi;
            } else {
                // closure for the fictitious site J+1
                if d == 0 {
                    m[(row, sys.coefficient_column(0))] -= xi * z.powi(truncation as i32 + 1);
                    rhs[row] += xi * z_in_inv.powi(truncation as i32 + 1);
                } else {
                    m[(row, sys.coefficient_column(d))] -= xi * z.powi(truncation as i32 + 1);
                }
            }
            if j == site {
                m[(row, atom_col)] += Complex64::new(wg.coupling, 0.0);
            }
            row += 1;
        }
        // matching row pinning the ansatz at site J
        m[(row, sys.site_column(d, truncation))] = Complex64::new(1.0, 0.0);
        m[(row, sys.coefficient_column(d))] = -z.powi(truncation as i32);
        if d == 0 {
            rhs[row] = z_in_inv.powi(truncation as i32);
        }
        row += 1;
    }

    Ok(LatticeSystem {
        matrix: m,
        rhs,
        truncation,
        k_in,
        velocities,
    })
}

/// Solve the assembled system by dense LU with partial pivoting and extract
/// amplitudes, flux-weighted rates, and the flux residual.
pub fn solve(system: &LatticeSystem) -> Result<ScatteringSolution> {
    let lu = system.matrix.clone().lu();
    let x = lu.solve(&system.rhs).ok_or(Error::DegenerateSystem {
        k: system.k_in,
    })?;

    let n_wg = system.velocities.len();
    let r = x[system.coefficient_column(0)];
    let transfer: Vec<Complex64> = (1..n_wg)
        .map(|d| x[system.coefficient_column(d)])
        .collect();
    let boundary: Vec<Complex64> = (0..n_wg).map(|d| x[system.site_column(d, 1)]).collect();
    let atom = (x[0], x[1]);

    let v_in = system.velocities[0];
    let reflection_rate = r.norm_sqr();
    let transfer_rates: Vec<f64> = transfer
        .iter()
        .zip(&system.velocities[1..])
        .map(|(t, v)| v / v_in * t.norm_sqr())
        .collect();
    let flux_residual =
        (1.0 - reflection_rate - transfer_rates.iter().sum::<f64>()).abs();

    Ok(ScatteringSolution {
        reflection_amplitude: r,
        transfer_amplitudes: transfer,
        boundary_amplitudes: boundary,
        standing_wave_amplitude: None,
        atom_amplitudes: Some(atom),
        reflection_rate,
        transfer_rates,
        flux_residual,
    })
}

/// Convenience: build and solve in one step.
pub fn scatter(
    mode: &ModeCoordinate,
    cfg: &RouterConfig,
    truncation: usize,
) -> Result<ScatteringSolution> {
    solve(&build_system(mode, cfg, truncation)?)
}

/// Worst-case deviation between the closed forms and the lattice solver over
/// a wavenumber grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    /// max over the grid of componentwise |analytic − oracle| for r and every t_d.
    pub max_amplitude_deviation: f64,
    pub worst_k: f64,
    pub max_flux_residual_analytic: f64,
    pub max_flux_residual_oracle: f64,
}

/// Outcome of a verification run: a two-method comparison when the config is
/// within the closed forms' assumptions, otherwise an oracle-only
/// self-consistency summary.
#[derive(Debug, Clone, PartialEq)]
pub enum VerificationOutcome {
    Compared(DeviationReport),
    OracleOnly { max_flux_residual: f64 },
}

pub fn verify_against_analytic(
    cfg: &RouterConfig,
    wavenumbers: &[f64],
    truncation: usize,
) -> Result<VerificationOutcome> {
    if wavenumbers.is_empty() {
        return Err(Error::InvalidGrid("empty wavenumber grid".into()));
    }

    // Probe whether closed forms apply at all; per-point errors other than
    // assumption violations still propagate below.
    let probe = ModeCoordinate::from_wavenumber(wavenumbers[0], &cfg.input)
        .and_then(|m| closed_form_amplitudes(&m, cfg));
    let analytic_applies = !matches!(
        probe,
        Err(Error::AnalyticAssumption(_)) | Err(Error::NoClosedForm(_))
    );

    let mut max_dev = 0.0_f64;
    let mut worst_k = wavenumbers[0];
    let mut max_flux_analytic = 0.0_f64;
    let mut max_flux_oracle = 0.0_f64;

    for (index, &k) in wavenumbers.iter().enumerate() {
        let with_ctx = |e: Error| Error::SweepPoint {
            index,
            k,
            source: Box::new(e),
        };
        let mode = ModeCoordinate::from_wavenumber(k, &cfg.input).map_err(with_ctx)?;
        let numeric = scatter(&mode, cfg, truncation).map_err(with_ctx)?;
        max_flux_oracle = max_flux_oracle.max(numeric.flux_residual);
        if analytic_applies {
            let closed = closed_form_amplitudes(&mode, cfg).map_err(with_ctx)?;
            max_flux_analytic = max_flux_analytic.max(closed.flux_residual);
            let mut dev =
                (closed.reflection_amplitude - numeric.reflection_amplitude).norm();
            for (a, b) in closed
                .transfer_amplitudes
                .iter()
                .zip(&numeric.transfer_amplitudes)
            {
                dev = dev.max((a - b).norm());
            }
            if dev > max_dev {
                max_dev = dev;
                worst_k = k;
            }
        }
    }

    if analytic_applies {
        Ok(VerificationOutcome::Compared(DeviationReport {
            max_amplitude_deviation: max_dev,
            worst_k,
            max_flux_residual_analytic: max_flux_analytic,
            max_flux_residual_oracle: max_flux_oracle,
        }))
    } else {
        Ok(VerificationOutcome::OracleOnly {
            max_flux_residual: max_flux_oracle,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Transition, WaveguideSpec};
    use std::f64::consts::PI;

    fn mode(k: f64, cfg: &RouterConfig) -> ModeCoordinate {
        ModeCoordinate::from_wavenumber(k, &cfg.input).unwrap()
    }

    #[test]
    fn matrix_dimension_counts_sites_and_coefficients() {
        let cfg = RouterConfig::two_channel(1.0, 1.0, 1.0).unwrap();
        let sys = build_system(&mode(1.0, &cfg), &cfg, 8).unwrap();
        assert_eq!(sys.dimension(), 2 + 9 + 9);
    }

    #[test]
    fn truncation_below_coupling_site_is_rejected() {
        let cfg = RouterConfig::offset(1.0, 6, 1.0, 1.0).unwrap();
        assert!(matches!(
            build_system(&mode(1.0, &cfg), &cfg, 7),
            Err(Error::TruncationTooSmall { required: 8, .. })
        ));
    }

    #[test]
    fn zero_couplings_decouple_atom_from_lattice() {
        let cfg = RouterConfig::two_channel(0.0, 0.0, 1.0).unwrap();
        let sys = build_system(&mode(1.0, &cfg), &cfg, 8).unwrap();
        // atom rows touch no lattice column, lattice rows touch no atom column
        for col in 2..sys.dimension() {
            assert_eq!(sys.matrix()[(0, col)], Complex64::new(0.0, 0.0));
            assert_eq!(sys.matrix()[(1, col)], Complex64::new(0.0, 0.0));
        }
        for row in 2..sys.dimension() {
            assert_eq!(sys.matrix()[(row, 0)], Complex64::new(0.0, 0.0));
            assert_eq!(sys.matrix()[(row, 1)], Complex64::new(0.0, 0.0));
        }
        // a hard wall alone reflects everything with r = -1
        let sol = solve(&sys).unwrap();
        assert!((sol.reflection_amplitude - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(sol.transfer_amplitudes[0].norm() < 1e-14);
    }

    #[test]
    fn offset_source_sits_on_the_coupling_site_row_only() {
        let cfg = RouterConfig::offset(0.8, 3, 1.0, 1.0).unwrap();
        let sys = build_system(&mode(1.0, &cfg), &cfg, 8).unwrap();
        for j in 1..=8usize {
            let row = 2 + (j - 1);
            let got = sys.matrix()[(row, 0)];
            if j == 3 {
                assert_eq!(got, Complex64::new(0.8, 0.0));
            } else {
                assert_eq!(got, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn agrees_with_two_channel_closed_form() {
        let cfg = RouterConfig::two_channel(0.4, 0.6, 1.0).unwrap();
        let m = mode(PI / 3.0, &cfg);
        let numeric = scatter(&m, &cfg, DEFAULT_TRUNCATION).unwrap();
        let closed = crate::analytic::two_channel_amplitudes(&m, &cfg).unwrap();
        assert!(
            (numeric.reflection_amplitude - closed.reflection_amplitude).norm() < 1e-10
        );
        assert!(
            (numeric.transfer_amplitudes[0] - closed.transfer_amplitudes[0]).norm() < 1e-10
        );
    }

    #[test]
    fn perfect_transfer_point_reflects_nothing() {
        let cfg = RouterConfig::two_channel(1.0, 1.0, 1.0).unwrap();
        let sol = scatter(&mode(0.3 * PI, &cfg), &cfg, DEFAULT_TRUNCATION).unwrap();
        assert!(sol.reflection_amplitude.norm() < 1e-10);
    }

    #[test]
    fn truncation_length_is_immaterial() {
        let cfg = RouterConfig::offset(0.7, 4, 1.1, 0.9).unwrap();
        let a = scatter(&mode(1.3, &cfg), &cfg, 20).unwrap();
        let b = scatter(&mode(1.3, &cfg), &cfg, 200).unwrap();
        assert!((a.reflection_amplitude - b.reflection_amplitude).norm() < 1e-12);
        assert!((a.transfer_amplitudes[0] - b.transfer_amplitudes[0]).norm() < 1e-12);
    }

    #[test]
    fn hard_wall_residual_vanishes_at_site_one() {
        // the stationary equation at j = 1 with A_0 = 0 must hold residually
        let cfg = RouterConfig::three_channel(0.9, 0.7, 1.2, 0.8).unwrap();
        let m = mode(1.9, &cfg);
        let sys = build_system(&m, &cfg, 32).unwrap();
        let lu = sys.matrix.clone().lu();
        let x = lu.solve(&sys.rhs).unwrap();
        let residual = &sys.matrix * &x - &sys.rhs;
        for i in 0..residual.len() {
            assert!(residual[i].norm() < 1e-12, "row {i}: {}", residual[i].norm());
        }
        // in particular the j = 1 rows, where the hard wall A_0 = 0 is encoded
        assert!(x[sys.site_column(0, 1)].is_finite());
    }

    #[test]
    fn atom_rows_hold_residually() {
        let cfg = RouterConfig::offset(1.1, 3, 0.6, 0.7).unwrap();
        let m = mode(2.1, &cfg);
        let sys = build_system(&m, &cfg, 40).unwrap();
        let lu = sys.matrix.clone().lu();
        let x = lu.solve(&sys.rhs).unwrap();
        let (u_f, u_e) = (x[0], x[1]);
        let e = m.energy();
        let a_l = x[sys.site_column(0, 3)];
        let b_1 = x[sys.site_column(1, 1)];
        assert!((cfg.rabi * u_e + 1.1 * a_l - e * u_f).norm() < 1e-12);
        assert!((cfg.rabi * u_f + 0.6 * b_1 - e * u_e).norm() < 1e-12);
    }

    #[test]
    fn standing_wave_region_fits_sine_profile() {
        let cfg = RouterConfig::offset(1.0, 5, 1.0, 1.0).unwrap();
        let m = mode(1.1, &cfg);
        let sys = build_system(&m, &cfg, 32).unwrap();
        let lu = sys.matrix.clone().lu();
        let x = lu.solve(&sys.rhs).unwrap();
        let a2 = x[sys.site_column(0, 1)] / m.k().sin();
        for j in 1..5usize {
            let expected = a2 * (m.k() * j as f64).sin();
            assert!(
                (x[sys.site_column(0, j)] - expected).norm() < 1e-10,
                "site {j}"
            );
        }
    }

    #[test]
    fn evanescent_output_carries_no_flux_but_decays() {
        // detune the output so the shared energy falls outside its band
        let input = WaveguideSpec::input(1.0, 1).unwrap();
        let output = WaveguideSpec::new(5.0, 1.0, 1.0, 1, Transition::ViaE).unwrap();
        let cfg = RouterConfig::new(1.0, input, vec![output]).unwrap();
        let m = mode(PI / 2.0, &cfg); // E = 0, output band is [3, 7]
        let sys = build_system(&m, &cfg, 32).unwrap();
        let sol = solve(&sys).unwrap();
        assert_eq!(sol.transfer_rates[0], 0.0);
        assert!((sol.reflection_rate - 1.0).abs() < 1e-10);
        assert!(sol.flux_residual < 1e-10);
        // amplitude decays along the output chain
        let lu = sys.matrix.clone().lu();
        let x = lu.solve(&sys.rhs).unwrap();
        let a3 = x[sys.site_column(1, 3)].norm();
        let a8 = x[sys.site_column(1, 8)].norm();
        assert!(a8 < a3 * 1e-2);
    }

    #[test]
    fn unequal_hoppings_conserve_velocity_weighted_flux() {
        let input = WaveguideSpec::input(0.9, 1).unwrap();
        let output = WaveguideSpec::new(0.3, 1.7, 1.1, 1, Transition::ViaE).unwrap();
        let cfg = RouterConfig::new(0.8, input, vec![output]).unwrap();
        for &k in &[0.5, 1.2, 2.0, 2.9] {
            let sol = scatter(&mode(k, &cfg), &cfg, 48).unwrap();
            assert!(sol.flux_residual < 1e-10, "k = {k}: {}", sol.flux_residual);
        }
    }

    #[test]
    fn verify_reports_oracle_only_for_unequal_bands() {
        let input = WaveguideSpec::input(1.0, 1).unwrap();
        let output = WaveguideSpec::new(0.0, 1.5, 1.0, 1, Transition::ViaE).unwrap();
        let cfg = RouterConfig::new(1.0, input, vec![output]).unwrap();
        let ks: Vec<f64> = (1..50).map(|i| i as f64 * PI / 50.0).collect();
        match verify_against_analytic(&cfg, &ks, 32).unwrap() {
            VerificationOutcome::OracleOnly { max_flux_residual } => {
                assert!(max_flux_residual < 1e-10);
            }
            other => panic!("expected oracle-only outcome, got {other:?}"),
        }
    }

    #[test]
    fn verify_compares_methods_on_matched_bands() {
        let cfg = RouterConfig::offset(1.0, 5, 1.0, 1.0).unwrap();
        let ks: Vec<f64> = (1..200).map(|i| i as f64 * PI / 200.0).collect();
        match verify_against_analytic(&cfg, &ks, DEFAULT_TRUNCATION).unwrap() {
            VerificationOutcome::Compared(report) => {
                assert!(report.max_amplitude_deviation < 1e-9);
                assert!(report.max_flux_residual_analytic < 1e-10);
                assert!(report.max_flux_residual_oracle < 1e-10);
            }
            other => panic!("expected comparison, got {other:?}"),
        }
    }
}
