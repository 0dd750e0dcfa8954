use std::fs;
use std::path::Path;

use super::manifest::{sha256_hex, ManifestFile, RunManifest};
use crate::{Error, Result};

/// Emits gnuplot command files for every CSV the run produced, plus a
/// log-log fit line for scale scans. Refuses to plot an incomplete run.
/// The new files are appended to the manifest so it stays exhaustive.
pub fn emit_plots(dir: &Path) -> Result<Vec<String>> {
    let mut manifest = RunManifest::load(dir)?;
    if manifest.incomplete {
        let listed: Vec<&str> = manifest.files.iter().map(|f| f.path.as_str()).collect();
        return Err(Error::Config(format!(
            "run is incomplete; refusing to plot. files present: {}",
            listed.join(", ")
        )));
    }

    let csvs: Vec<String> = manifest
        .files
        .iter()
        .filter(|f| f.path.ends_with(".csv"))
        .map(|f| f.path.clone())
        .collect();
    if csvs.is_empty() {
        return Err(Error::Config("no CSV data files in the manifest".into()));
    }

    let fit = manifest
        .files
        .iter()
        .find(|f| f.path == "fractal_fit.json")
        .map(|f| -> Result<(f64, f64)> {
            let raw = fs::read_to_string(dir.join(&f.path))?;
            let v: serde_json::Value = serde_json::from_str(&raw)?;
            let slope = v["slope"].as_f64().unwrap_or(0.0);
            let intercept = v["intercept"].as_f64().unwrap_or(0.0);
            Ok((slope, intercept))
        })
        .transpose()?;

    let mut written = Vec::new();
    for csv in &csvs {
        let stem = csv.trim_end_matches(".csv");
        let name = format!("plot_{stem}.gp");
        let script = plot_script(csv, fit);
        fs::write(dir.join(&name), script.as_bytes())?;
        manifest
            .files
            .push(ManifestFile { path: name.clone(), sha256: sha256_hex(script.as_bytes()) });
        written.push(name);
    }
    manifest.save(dir)?;
    Ok(written)
}

fn plot_script(csv: &str, fit: Option<(f64, f64)>) -> String {
    let stem = csv.trim_end_matches(".csv");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set output '{stem}.svg'\nset terminal svg\n"));
    if stem == "scale_scan" {
        s.push_str("set logscale xy\nset xlabel 'dt'\nset ylabel 'path length'\n");
        if let Some((slope, intercept)) = fit {
            s.push_str(&format!(
                "fitline(x) = exp({intercept}) * x**({slope})\n\
                 plot '{csv}' using 1:2 skip 1 with points title 'scan', \
                 fitline(x) with lines title 'fit'\n"
            ));
            return s;
        }
    } else {
        s.push_str("set xlabel 'x'\n");
    }
    s.push_str(&format!(
        "plot for [col=2:*] '{csv}' using 1:col skip 1 with lines title columnheader\n"
    ));
    s
}
