//! `plot-data`: balls and set samples as CSV rows `cx,cy[,cz],r,tag`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cochain_core::approx::parse_certificate;
use cochain_core::rational::to_f64;
use cochain_core::{Point, SpaceSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `x` rounded to 12 significant digits, printed in shortest form.
pub fn format12(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("float formatting round-trips");
    format!("{rounded}")
}

fn default_out(certificate: &Path) -> PathBuf {
    let stem = certificate.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    certificate.with_file_name(format!("{stem}.plot.csv"))
}

pub fn plot_data(certificate: &Path, out: Option<&Path>, samples: usize, seed: u64) -> Result<ExitCode> {
    let text = fs::read_to_string(certificate).with_context(|| format!("reading {}", certificate.display()))?;
    let cert = parse_certificate(&text)?;
    let dim = match cert.space {
        SpaceSpec::Euclidean { n } if n == 2 || n == 3 => n,
        other => bail!("plot data needs euclidean:2 or euclidean:3, got {other}"),
    };
    let csv_path = out.map(Path::to_path_buf).unwrap_or_else(|| default_out(certificate));
    let json_path = csv_path.with_extension("json");
    if json_path == certificate || csv_path == certificate {
        bail!("output {} would overwrite the certificate", csv_path.display());
    }

    let set_samples: Vec<Point> = match cert.set.geometry()? {
        Some(g) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| g.sample(&mut rng)).collect()
        }
        None => {
            log::warn!("no exact geometry for {}; writing balls only", cert.set.shape_name());
            Vec::new()
        }
    };

    let mut header: Vec<&str> = vec!["cx", "cy", "cz"][..dim].to_vec();
    header.extend(["r", "tag"]);
    let mut w = csv::Writer::from_path(&csv_path).with_context(|| format!("writing {}", csv_path.display()))?;
    w.write_record(&header)?;
    for b in &cert.balls {
        let mut row: Vec<String> = b.center().coords().iter().map(|c| format12(to_f64(c))).collect();
        row.push(format12(b.radius_f64()));
        row.push("ball".into());
        w.write_record(&row)?;
    }
    for p in &set_samples {
        let mut row: Vec<String> = p.coords().iter().map(|c| format12(to_f64(c))).collect();
        row.push("0".into());
        row.push("set-sample".into());
        w.write_record(&row)?;
    }
    w.flush()?;

    let exact = serde_json::json!({ "balls": cert.balls, "set_samples": set_samples });
    fs::write(&json_path, serde_json::to_string(&exact)?)
        .with_context(|| format!("writing {}", json_path.display()))?;
    log::info!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(ExitCode::SUCCESS)
}
