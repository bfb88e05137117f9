//! Closed-form scattering amplitudes for the two-channel, offset-coupling,
//! and three-channel routers, plus the pathway-interference phase law.
//!
//! All expressions are evaluated in their multiplied-out rational form
//! (polynomials in e^{ik}); the E = ±Ω points are regular here even though
//! the intermediate effective potentials diverge there. The three-channel
//! reflection numerator carries `+e^{ik}D`, matching the two-channel form;
//! both the g_c → 0 reduction and the lattice solver confirm this.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Error;
use crate::model::{ModeCoordinate, PhaseFactors, RouterConfig};
use crate::Result;

/// Scattering amplitudes and rates at one band point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub reflection_amplitude: Complex64,
    /// One transfer amplitude per output waveguide, in config order.
    pub transfer_amplitudes: Vec<Complex64>,
    /// Site-1 amplitudes per waveguide, input first.
    pub boundary_amplitudes: Vec<Complex64>,
    /// Standing-wave amplitude on the input chain between the hard wall and
    /// an offset coupling site (sites 1 <= j < l); absent for l = 1.
    pub standing_wave_amplitude: Option<Complex64>,
    /// (U_f, U_e); filled by the lattice solver.
    pub atom_amplitudes: Option<(Complex64, Complex64)>,
    pub reflection_rate: f64,
    /// Flux-weighted transfer rates; equals |t_d|^2 for equal-band configs.
    pub transfer_rates: Vec<f64>,
    /// |1 - R - sum T_d|.
    pub flux_residual: f64,
}

impl ScatteringSolution {
    pub(crate) fn from_amplitudes(
        reflection_amplitude: Complex64,
        transfer_amplitudes: Vec<Complex64>,
        boundary_amplitudes: Vec<Complex64>,
    ) -> Self {
        let reflection_rate = reflection_amplitude.norm_sqr();
        let transfer_rates: Vec<f64> =
            transfer_amplitudes.iter().map(|t| t.norm_sqr()).collect();
        let flux_residual =
            (1.0 - reflection_rate - transfer_rates.iter().sum::<f64>()).abs();
        Self {
            reflection_amplitude,
            transfer_amplitudes,
            boundary_amplitudes,
            standing_wave_amplitude: None,
            atom_amplitudes: None,
            reflection_rate,
            transfer_rates,
            flux_residual,
        }
    }

    pub fn total_transfer_rate(&self) -> f64 {
        self.transfer_rates.iter().sum()
    }
}

/// Closed forms assume all waveguides share one band; unequal configs are
/// the lattice solver's business.
fn require_equal_band(cfg: &RouterConfig) -> Result<()> {
    if !cfg.equal_band() {
        return Err(Error::AnalyticAssumption(
            "all hoppings and all detunings must be equal across waveguides".into(),
        ));
    }
    Ok(())
}

/// Reflection and transfer amplitudes for the two-waveguide router with both
/// couplings at site 1.
pub fn two_channel_amplitudes(
    mode: &ModeCoordinate,
    cfg: &RouterConfig,
) -> Result<ScatteringSolution> {
    require_equal_band(cfg)?;
    if cfg.outputs.len() != 1 {
        return Err(Error::NoClosedForm(format!(
            "two_channel_amplitudes needs exactly one output, got {}",
            cfg.outputs.len()
        )));
    }
    if cfg.input.coupling_site != 1 {
        return Err(Error::NoClosedForm(
            "input coupled at site l > 1; use offset_coupling_amplitudes".into(),
        ));
    }
    let k = mode.k();
    let e = mode.energy();
    let xi = cfg.input.hopping;
    let om = cfg.rabi;
    let ga2 = cfg.input.coupling * cfg.input.coupling;
    let gb2 = cfg.outputs[0].coupling * cfg.outputs[0].coupling;
    let z = Complex64::from_polar(1.0, k);
    let d = (e * e - om * om) * xi * xi;

    let den = z.powi(3) * ga2 * gb2 + z * z * (ga2 + gb2) * e * xi + z * d;
    let r = -(z * ga2 * gb2 + (ga2 + z * z * gb2) * e * xi + z * d) / den;
    let t = (z * z - 1.0) * cfg.input.coupling * cfg.outputs[0].coupling * om * xi / den;

    let boundary = vec![z.conj() + r * z, t * z];
    Ok(ScatteringSolution::from_amplitudes(r, vec![t], boundary))
}

/// Amplitudes for the two-waveguide router with the input coupled at site
/// `l = cfg.input.coupling_site`; reduces exactly to the site-1 form at l = 1.
pub fn offset_coupling_amplitudes(
    mode: &ModeCoordinate,
    cfg: &RouterConfig,
) -> Result<ScatteringSolution> {
    require_equal_band(cfg)?;
    if cfg.outputs.len() != 1 {
        return Err(Error::NoClosedForm(format!(
            "offset_coupling_amplitudes needs exactly one output, got {}",
            cfg.outputs.len()
        )));
    }
    let l = cfg.input.coupling_site;
    let k = mode.k();
    let e = mode.energy();
    let xi = cfg.input.hopping;
    let om = cfg.rabi;
    let ga = cfg.input.coupling;
    let gb = cfg.outputs[0].coupling;
    let ga2 = ga * ga;
    let gb2 = gb * gb;
    let z = Complex64::from_polar(1.0, k);
    let pf = PhaseFactors::new(k, l, e, om, xi);
    let (n, mp, mm, d) = (pf.n_factor, pf.m_plus, pf.m_minus, pf.d_factor);

    let den = z * z * mp * ga2 * gb2 + z * (mp * ga2 + n * gb2) * e * xi + n * d;
    let r = (z * z * mm * ga2 * gb2 + z * (mm * ga2 - n * gb2) * e * xi - n * d) / den;
    let t = z.powi(-(l as i32)) * mp * n * ga * gb * om * xi / den;

    let a_site_l = z.powi(-(l as i32)) + r * z.powi(l as i32);
    let standing = standing_wave_amplitude(k, l, e, om, xi, ga, gb, r, t, a_site_l);
    let input_boundary = match (l, standing) {
        (1, _) => z.conj() + r * z,
        (_, Some(a2)) => a2 * k.sin(),
        (_, None) => Complex64::new(f64::NAN, f64::NAN),
    };
    let mut sol = ScatteringSolution::from_amplitudes(r, vec![t], vec![input_boundary, t * z]);
    sol.standing_wave_amplitude = standing;
    Ok(sol)
}

/// Amplitude A2 of the standing wave A_j = A2 sin(kj) on sites 1 <= j < l.
#[allow(clippy::too_many_arguments)]
fn standing_wave_amplitude(
    k: f64,
    l: usize,
    e: f64,
    om: f64,
    xi: f64,
    ga: f64,
    gb: f64,
    r: Complex64,
    t: Complex64,
    a_site_l: Complex64,
) -> Option<Complex64> {
    if l == 1 {
        return None;
    }
    let z = Complex64::from_polar(1.0, k);
    let sin_kl = (k * l as f64).sin();
    if sin_kl.abs() >= 1e-6 {
        return Some(a_site_l / sin_kl);
    }
    // sin(kl) ~ 0 forces A_l ~ 0; recover A2 from the stationary equation at
    // site l instead. Needs the atom amplitude U_f, hence E^2 != Omega^2.
    let s = e * e - om * om;
    let sin_prev = (k * (l as f64 - 1.0)).sin();
    if s.abs() < 1e-12 || sin_prev.abs() < 1e-12 {
        return None;
    }
    let u_f = (om * gb * t * z + e * ga * a_site_l) / s;
    let a_next = z.powi(-(l as i32 + 1)) + r * z.powi(l as i32 + 1);
    Some((ga * u_f / xi + 2.0 * k.cos() * a_site_l - a_next) / sin_prev)
}

/// Amplitudes for the three-waveguide router (one input, two outputs, all
/// coupled at site 1).
pub fn three_channel_amplitudes(
    mode: &ModeCoordinate,
    cfg: &RouterConfig,
) -> Result<ScatteringSolution> {
    require_equal_band(cfg)?;
    if cfg.outputs.len() != 2 {
        return Err(Error::NoClosedForm(format!(
            "three_channel_amplitudes needs exactly two outputs, got {}",
            cfg.outputs.len()
        )));
    }
    if cfg.input.coupling_site != 1 {
        return Err(Error::NoClosedForm(
            "no closed form for an offset input with two outputs".into(),
        ));
    }
    let k = mode.k();
    let e = mode.energy();
    let xi = cfg.input.hopping;
    let om = cfg.rabi;
    let ga = cfg.input.coupling;
    let gb = cfg.outputs[0].coupling;
    let gc = cfg.outputs[1].coupling;
    let ga2 = ga * ga;
    let go2 = gb * gb + gc * gc;
    let z = Complex64::from_polar(1.0, k);
    let d = (e * e - om * om) * xi * xi;

    let den = z.powi(3) * ga2 * go2 + z * z * (ga2 + go2) * e * xi + z * d;
    let r = -(z * ga2 * go2 + (ga2 + z * z * go2) * e * xi + z * d) / den;
    // t_b and t_c share everything but one coupling factor, so their ratio
    // is exactly g_b/g_c.
    let pref = (z * z - 1.0) * ga * om * xi / den;
    let tb = pref * gb;
    let tc = pref * gc;

    let boundary = vec![z.conj() + r * z, tb * z, tc * z];
    Ok(ScatteringSolution::from_amplitudes(r, vec![tb, tc], boundary))
}

/// Dispatch to the closed form matching the config's layout.
pub fn closed_form_amplitudes(
    mode: &ModeCoordinate,
    cfg: &RouterConfig,
) -> Result<ScatteringSolution> {
    match (cfg.outputs.len(), cfg.input.coupling_site) {
        (1, 1) => two_channel_amplitudes(mode, cfg),
        (1, _) => offset_coupling_amplitudes(mode, cfg),
        (2, 1) => three_channel_amplitudes(mode, cfg),
        _ => Err(Error::NoClosedForm(format!(
            "{} outputs with input site {}",
            cfg.outputs.len(),
            cfg.input.coupling_site
        ))),
    }
}

/// The phase-difference law Δφ(k) = 2k(l−1) + π between the two pathways
/// composing the final reflected wave, and the wavenumbers where the
/// interference is fully destructive.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePrediction {
    pub coupling_site: usize,
    /// k = nπ/(l−1) inside (0, π); empty for l = 1, where Δφ ≡ π and the
    /// reflection vanishes over the whole band instead.
    pub perfect_transfer_wavenumbers: Vec<f64>,
}

impl PhasePrediction {
    pub fn delta_phi(&self, k: f64) -> f64 {
        2.0 * k * (self.coupling_site as f64 - 1.0) + PI
    }
}

pub fn phase_prediction(coupling_site: usize) -> PhasePrediction {
    let zeros = if coupling_site <= 1 {
        Vec::new()
    } else {
        (1..coupling_site - 1)
            .map(|n| n as f64 * PI / (coupling_site - 1) as f64)
            .collect()
    };
    PhasePrediction {
        coupling_site,
        perfect_transfer_wavenumbers: zeros,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mode(k: f64, cfg: &RouterConfig) -> ModeCoordinate {
        ModeCoordinate::from_wavenumber(k, &cfg.input).unwrap()
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() < tol,
            "expected {b}, got {a} (|diff| = {})",
            (a - b).norm()
        );
    }

    #[test]
    fn perfect_transfer_point_has_unit_transfer_and_phase() {
        let cfg = RouterConfig::two_channel(1.0, 1.0, 1.0).unwrap();
        let sol = two_channel_amplitudes(&mode(PI / 2.0, &cfg), &cfg).unwrap();
        assert!(sol.reflection_amplitude.norm() < 1e-14);
        // phase frozen from the lattice linear solve at this point
        assert_close(sol.transfer_amplitudes[0], Complex64::new(0.0, -1.0), 1e-12);
        assert!(sol.reflection_rate < 1e-14);
        assert!((sol.transfer_rates[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn drive_off_means_full_reflection() {
        let cfg = RouterConfig::two_channel(1.0, 1.0, 0.0).unwrap();
        let sol = two_channel_amplitudes(&mode(PI / 2.0, &cfg), &cfg).unwrap();
        assert_eq!(sol.transfer_amplitudes[0], Complex64::new(0.0, 0.0));
        assert!((sol.reflection_rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_couplings_match_frozen_lattice_solution() {
        // golden values from the truncated-lattice solve (J = 64) at
        // g_a = 0.4, g_b = 0.6, Omega = 1, k = pi/3 (E = -1)
        let cfg = RouterConfig::two_channel(0.4, 0.6, 1.0).unwrap();
        let sol = two_channel_amplitudes(&mode(PI / 3.0, &cfg), &cfg).unwrap();
        assert_close(
            sol.reflection_amplitude,
            Complex64::new(-0.5243276168072151, 0.12729221024109164),
            1e-12,
        );
        assert_close(
            sol.transfer_amplitudes[0],
            Complex64::new(-0.682885077871474, -0.4924887956955633),
            1e-12,
        );
    }

    #[test]
    fn unequal_band_is_rejected() {
        let input = crate::model::WaveguideSpec::input(1.0, 1).unwrap();
        let output =
            crate::model::WaveguideSpec::new(0.0, 1.3, 1.0, 1, crate::model::Transition::ViaE)
                .unwrap();
        let cfg = RouterConfig::new(1.0, input, vec![output]).unwrap();
        let m = ModeCoordinate::from_wavenumber(PI / 2.0, &cfg.input).unwrap();
        assert!(matches!(
            two_channel_amplitudes(&m, &cfg),
            Err(Error::AnalyticAssumption(_))
        ));
    }

    #[test]
    fn offset_at_site_one_reduces_to_two_channel() {
        let cfg = RouterConfig::two_channel(0.7, 1.1, 0.8).unwrap();
        for &k in &[0.3, 1.0, 2.5] {
            let m = mode(k, &cfg);
            let a = two_channel_amplitudes(&m, &cfg).unwrap();
            let b = offset_coupling_amplitudes(&m, &cfg).unwrap();
            assert_close(a.reflection_amplitude, b.reflection_amplitude, 1e-12);
            assert_close(a.transfer_amplitudes[0], b.transfer_amplitudes[0], 1e-12);
            assert_close(a.boundary_amplitudes[0], b.boundary_amplitudes[0], 1e-12);
            assert_close(a.boundary_amplitudes[1], b.boundary_amplitudes[1], 1e-12);
        }
    }

    #[test]
    fn offset_site_three_transfers_fully_at_half_band() {
        let cfg = RouterConfig::offset(1.0, 3, 1.0, 1.0).unwrap();
        let sol = offset_coupling_amplitudes(&mode(PI / 2.0, &cfg), &cfg).unwrap();
        assert!(sol.reflection_rate < 1e-14);
        assert!((sol.transfer_rates[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn offset_site_five_reflects_away_from_predicted_zeros() {
        // pi/3 is not a multiple of pi/4, so R must be well off zero
        let cfg = RouterConfig::offset(1.0, 5, 1.0, 1.0).unwrap();
        let sol = offset_coupling_amplitudes(&mode(PI / 3.0, &cfg), &cfg).unwrap();
        assert!(sol.reflection_rate > 1e-3);
    }

    #[test]
    fn offset_standing_wave_matches_site_l_value() {
        let cfg = RouterConfig::offset(0.9, 4, 1.2, 0.7).unwrap();
        let m = mode(0.8, &cfg);
        let sol = offset_coupling_amplitudes(&m, &cfg).unwrap();
        let a2 = sol.standing_wave_amplitude.unwrap();
        let z = Complex64::from_polar(1.0, m.k());
        let a_l = z.powi(-4) + sol.reflection_amplitude * z.powi(4);
        assert_close(a2 * (4.0 * m.k()).sin(), a_l, 1e-12);
    }

    #[test]
    fn three_channel_with_dead_output_reduces_to_two_channel() {
        let three = RouterConfig::three_channel(1.0, 1.0, 0.0, 1.0).unwrap();
        let two = RouterConfig::two_channel(1.0, 1.0, 1.0).unwrap();
        for &k in &[0.4, 1.2, 2.8] {
            let m = mode(k, &three);
            let a = three_channel_amplitudes(&m, &three).unwrap();
            let b = two_channel_amplitudes(&m, &two).unwrap();
            assert_eq!(a.transfer_amplitudes[1], Complex64::new(0.0, 0.0));
            assert_close(a.reflection_amplitude, b.reflection_amplitude, 1e-12);
            assert_close(a.transfer_amplitudes[0], b.transfer_amplitudes[0], 1e-12);
        }
    }

    #[test]
    fn three_channel_decouples_without_drive() {
        let cfg = RouterConfig::three_channel(0.5, 0.4, 0.6, 0.0).unwrap();
        let sol = three_channel_amplitudes(&mode(1.1, &cfg), &cfg).unwrap();
        assert!((sol.reflection_rate - 1.0).abs() < 1e-12);
        assert!(sol.transfer_rates[0] == 0.0 && sol.transfer_rates[1] == 0.0);
    }

    #[test]
    fn three_channel_ratio_law_at_half_band() {
        let cfg = RouterConfig::three_channel(1.0, 0.5, 0.8, 1.0).unwrap();
        let sol = three_channel_amplitudes(&mode(PI / 2.0, &cfg), &cfg).unwrap();
        let ratio = sol.transfer_rates[0] / sol.transfer_rates[1];
        assert!((ratio - 25.0 / 64.0).abs() < 1e-14);
    }

    #[test]
    fn phase_prediction_examples() {
        let p1 = phase_prediction(1);
        assert!(p1.perfect_transfer_wavenumbers.is_empty());
        assert!((p1.delta_phi(0.3) - PI).abs() < 1e-15);
        assert!((p1.delta_phi(2.9) - PI).abs() < 1e-15);

        let p3 = phase_prediction(3);
        assert_eq!(p3.perfect_transfer_wavenumbers.len(), 1);
        assert!((p3.perfect_transfer_wavenumbers[0] - PI / 2.0).abs() < 1e-15);

        let p5 = phase_prediction(5);
        let expect = [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];
        assert_eq!(p5.perfect_transfer_wavenumbers.len(), 3);
        for (a, b) in p5.perfect_transfer_wavenumbers.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }

        let p6 = phase_prediction(6);
        assert_eq!(p6.perfect_transfer_wavenumbers.len(), 4);
        for (n, k) in p6.perfect_transfer_wavenumbers.iter().enumerate() {
            assert!((k - (n + 1) as f64 * PI / 5.0).abs() < 1e-15);
            // every listed zero satisfies delta_phi = pi (mod 2 pi)
            let phi = p6.delta_phi(*k);
            let m = ((phi - PI) / (2.0 * PI)).round();
            assert!((phi - PI - 2.0 * PI * m).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn flux_is_conserved_two_channel(k in 0.01..3.13f64,
                                         ga in 0.1..2.0f64,
                                         gb in 0.1..2.0f64,
                                         om in 0.0..2.0f64) {
            let cfg = RouterConfig::two_channel(ga, gb, om).unwrap();
            let sol = two_channel_amplitudes(&mode(k, &cfg), &cfg).unwrap();
            prop_assert!(sol.flux_residual < 1e-10);
            prop_assert!(sol.reflection_rate <= 1.0 + 1e-10);
        }

        #[test]
        fn flux_is_conserved_offset(k in 0.01..3.13f64,
                                    l in 1usize..7,
                                    ga in 0.1..2.0f64,
                                    gb in 0.1..2.0f64,
                                    om in 0.0..2.0f64) {
            let cfg = RouterConfig::offset(ga, l, gb, om).unwrap();
            let sol = offset_coupling_amplitudes(&mode(k, &cfg), &cfg).unwrap();
            prop_assert!(sol.flux_residual < 1e-10);
        }

        #[test]
        fn flux_is_conserved_three_channel(k in 0.01..3.13f64,
                                           ga in 0.1..2.0f64,
                                           gb in 0.1..2.0f64,
                                           gc in 0.1..2.0f64,
                                           om in 0.0..2.0f64) {
            let cfg = RouterConfig::three_channel(ga, gb, gc, om).unwrap();
            let sol = three_channel_amplitudes(&mode(k, &cfg), &cfg).unwrap();
            prop_assert!(sol.flux_residual < 1e-10);
        }

        #[test]
        fn perfect_transfer_band_is_flat(k in 0.001..3.14f64) {
            prop_assume!(k > 1e-3 && k < PI - 1e-3);
            let cfg = RouterConfig::two_channel(1.0, 1.0, 1.0).unwrap();
            let sol = two_channel_amplitudes(&mode(k, &cfg), &cfg).unwrap();
            prop_assert!(sol.reflection_rate < 1e-10);
        }

        #[test]
        fn transfer_rate_symmetric_under_coupling_swap(k in 0.01..3.13f64,
                                                       ga in 0.1..2.0f64,
                                                       gb in 0.1..2.0f64,
                                                       om in 0.1..2.0f64) {
            let cfg_ab = RouterConfig::two_channel(ga, gb, om).unwrap();
            let cfg_ba = RouterConfig::two_channel(gb, ga, om).unwrap();
            let a = two_channel_amplitudes(&mode(k, &cfg_ab), &cfg_ab).unwrap();
            let b = two_channel_amplitudes(&mode(k, &cfg_ba), &cfg_ba).unwrap();
            prop_assert!((a.transfer_rates[0] - b.transfer_rates[0]).abs() < 1e-12);
            prop_assert!((a.reflection_rate - b.reflection_rate).abs() < 1e-12);
        }

        #[test]
        fn band_symmetry_of_rates(k in 0.01..1.5f64,
                                  ga in 0.1..2.0f64,
                                  gb in 0.1..2.0f64,
                                  gc in 0.1..2.0f64,
                                  om in 0.0..2.0f64) {
            let two = RouterConfig::two_channel(ga, gb, om).unwrap();
            let a = two_channel_amplitudes(&mode(k, &two), &two).unwrap();
            let b = two_channel_amplitudes(&mode(PI - k, &two), &two).unwrap();
            prop_assert!((a.transfer_rates[0] - b.transfer_rates[0]).abs() < 1e-12);

            let three = RouterConfig::three_channel(ga, gb, gc, om).unwrap();
            let a = three_channel_amplitudes(&mode(k, &three), &three).unwrap();
            let b = three_channel_amplitudes(&mode(PI - k, &three), &three).unwrap();
            prop_assert!((a.total_transfer_rate() - b.total_transfer_rate()).abs() < 1e-12);
        }

        #[test]
        fn ratio_law_is_exact(k in 0.01..3.13f64,
                              ga in 0.1..2.0f64,
                              gb in 0.1..2.0f64,
                              gc in 0.1..2.0f64,
                              om in 0.1..2.0f64) {
            let cfg = RouterConfig::three_channel(ga, gb, gc, om).unwrap();
            let sol = three_channel_amplitudes(&mode(k, &cfg), &cfg).unwrap();
            let (tb, tc) = (sol.transfer_rates[0], sol.transfer_rates[1]);
            prop_assert!((tb * gc * gc - tc * gb * gb).abs() <= 1e-12 * tb.max(tc));
        }
    }
}
