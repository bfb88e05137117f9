//! Spectrum serialization: CSV with a provenance comment line, or JSON.

use std::io::Write;

use serde::Serialize;

use crw_router::RateSpectrum;

use crate::CliError;

/// CSV: `# config_hash=<hash> method=<name>`, a header row, then one row per
/// grid point with every float printed to 17 significant digits.
pub fn write_csv<W: Write>(
    mut w: W,
    spectrum: &RateSpectrum,
    config_hash: &str,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::numerical(format!("write failed: {e}"));
    writeln!(
        w,
        "# config_hash={config_hash} method={}",
        spectrum.method.name()
    )
    .map_err(io)?;
    let transfer_headers: Vec<String> = (1..=spectrum.config.outputs.len())
        .map(|d| format!("T_{d}"))
        .collect();
    writeln!(w, "k,E,R,{},flux_residual", transfer_headers.join(",")).map_err(io)?;
    for row in &spectrum.rows {
        let transfers: Vec<String> = row.transfers.iter().map(|t| format!("{t:.16e}")).collect();
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{},{:.16e}",
            row.k,
            row.energy,
            row.reflection,
            transfers.join(","),
            row.flux_residual
        )
        .map_err(io)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    k: f64,
    #[serde(rename = "E")]
    energy: f64,
    #[serde(rename = "R")]
    reflection: f64,
    #[serde(rename = "T")]
    transfers: &'a [f64],
    flux_residual: f64,
}

#[derive(Serialize)]
struct JsonSpectrum<'a> {
    config_hash: &'a str,
    method: &'a str,
    k_min: f64,
    k_max: f64,
    points: usize,
    rows: Vec<JsonRow<'a>>,
}

pub fn write_json<W: Write>(
    mut w: W,
    spectrum: &RateSpectrum,
    config_hash: &str,
) -> Result<(), CliError> {
    let doc = JsonSpectrum {
        config_hash,
        method: spectrum.method.name(),
        k_min: spectrum.grid.k_min,
        k_max: spectrum.grid.k_max,
        points: spectrum.grid.points,
        rows: spectrum
            .rows
            .iter()
            .map(|r| JsonRow {
                k: r.k,
                energy: r.energy,
                reflection: r.reflection,
                transfers: &r.transfers,
                flux_residual: r.flux_residual,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut w, &doc)
        .map_err(|e| CliError::numerical(format!("JSON write failed: {e}")))?;
    writeln!(w).map_err(|e| CliError::numerical(format!("write failed: {e}")))?;
    Ok(())
}
