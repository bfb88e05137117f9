//! Canonical parameter sets behind the named figures, plus the band-edge
//! inset sweeps that accompany the three-channel panels.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crw_router::spectra::{band_edge_profile, sweep, BandEdge, GridSpec, Method};
use crw_router::RouterConfig;

use crate::config::ConfigDocument;
use crate::output::write_csv;
use crate::CliError;

pub const FIGURE_NAMES: [&str; 14] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig4a", "fig4b", "fig4c", "fig4d", "fig8a", "fig8b",
    "fig8c", "fig8d", "fig9a", "fig9b",
];

fn config_for(name: &str) -> Option<RouterConfig> {
    let cfg = match name {
        "fig2a" => RouterConfig::two_channel(0.4, 0.4, 1.0),
        "fig2b" => RouterConfig::two_channel(0.4, 0.6, 1.0),
        "fig2c" => RouterConfig::two_channel(0.9, 0.9, 1.0),
        "fig2d" => RouterConfig::two_channel(1.0, 1.0, 1.0),
        "fig4a" => RouterConfig::offset(1.0, 1, 1.0, 1.0),
        "fig4b" => RouterConfig::offset(1.0, 3, 1.0, 1.0),
        "fig4c" => RouterConfig::offset(1.0, 5, 1.0, 1.0),
        "fig4d" => RouterConfig::offset(1.0, 6, 1.0, 1.0),
        "fig8a" => RouterConfig::three_channel(0.5, 0.4, 0.6, 1.0),
        "fig8b" => RouterConfig::three_channel(0.5, 0.4, 0.6, 0.0),
        "fig8c" => RouterConfig::three_channel(1.0, 1.0, 0.01, 1.0),
        "fig8d" => RouterConfig::three_channel(1.0, 0.01, 1.0, 1.0),
        "fig9a" => RouterConfig::three_channel(1.0, 0.5, 0.8, 1.0),
        "fig9b" => RouterConfig::three_channel(1.0, 0.2, 0.9, 1.0),
        _ => return None,
    };
    Some(cfg.expect("figure parameter sets are valid"))
}

fn csv_to(path: &Path, spectrum: &crw_router::RateSpectrum, hash: &str) -> Result<(), CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", path.display())))?;
    write_csv(BufWriter::new(file), spectrum, hash)
}

/// Render one named figure into `out_dir` as `{name}.csv`; the three-channel
/// steering panels (fig8*) additionally emit `{name}_inset_lower.csv` and
/// `{name}_inset_upper.csv` resolving the band-edge reflection collapse.
pub fn render(name: &str, out_dir: &Path) -> Result<(), CliError> {
    let cfg = config_for(name).ok_or_else(|| {
        CliError::usage(format!(
            "unknown figure '{name}'; valid names: {}",
            FIGURE_NAMES.join(", ")
        ))
    })?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", out_dir.display())))?;

    let hash = ConfigDocument::from(&cfg).hash();
    let spectrum = sweep(&cfg, &GridSpec::default(), Method::Analytic)?;
    csv_to(&out_dir.join(format!("{name}.csv")), &spectrum, &hash)?;

    if name.starts_with("fig8") {
        for (edge, tag) in [(BandEdge::Lower, "lower"), (BandEdge::Upper, "upper")] {
            let profile = band_edge_profile(&cfg, edge, 2.0 * PI * 1e-4, 100)?;
            csv_to(
                &out_dir.join(format!("{name}_inset_{tag}.csv")),
                &profile.spectrum,
                &hash,
            )?;
        }
    }
    Ok(())
}
