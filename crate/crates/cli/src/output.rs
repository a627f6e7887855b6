use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use topochain::reproduce::{emit_plot_script, PlotKind};

/// What goes into the `#` line at the top of every CSV.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub spec_sha256: String,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(spec_bytes: &[u8], config: impl Serialize) -> Self {
        Provenance {
            version: env!("CARGO_PKG_VERSION"),
            spec_sha256: sha256_hex(spec_bytes),
            config: serde_json::to_value(config).expect("config serialises"),
        }
    }

    pub fn line(&self) -> String {
        format!("# topochain {} spec_sha256={} config={}", self.version, self.spec_sha256, self.config)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Fails early when the file could not be created later.
pub fn check_output_path(path: &Path) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if !parent.is_dir() {
        bail!("output directory {} does not exist", parent.display());
    }
    if path.is_dir() {
        bail!("{} is a directory", path.display());
    }
    Ok(())
}

pub fn write_csv(path: &Path, prov: &Provenance, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", prov.line())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<csv>.gp` next to the CSV and returns its path.
pub fn write_plot_script(csv_path: &Path, kind: PlotKind, header: &[String]) -> Result<PathBuf> {
    let name = csv_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let script = emit_plot_script(&name, kind, header);
    let path = csv_path.with_extension("gp");
    std::fs::write(&path, script).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}
