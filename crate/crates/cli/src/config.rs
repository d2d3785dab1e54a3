//! Run configuration: a JSON file may supply any field, and command-line
//! flags override whatever the file says.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub ell: Option<f64>,
    pub preset: Option<String>,
    pub nodes: Option<usize>,
    pub tol: Option<f64>,
    pub grid: Option<[usize; 2]>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub x0: Option<f64>,
    pub t: Option<f64>,
}

/// Fully resolved configuration after merging defaults, the optional
/// config file, and command-line flags.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub ell: f64,
    pub preset: String,
    pub nodes: usize,
    pub tol: f64,
    pub grid: [usize; 2],
    pub out: PathBuf,
    pub seed: u64,
    pub x0: f64,
    pub t: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ell: 1.0,
            preset: "separable-k1".into(),
            nodes: 16,
            tol: 1e-6,
            grid: [64, 128],
            out: default_out_dir(),
            seed: 42,
            x0: 0.5,
            t: 1.0,
        }
    }
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os("TRICOMI_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("tricomi-out"))
}

pub fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
}

impl RunConfig {
    /// defaults <- file <- flags, rightmost wins.
    pub fn merge(file: Option<FileConfig>, flags: FileConfig) -> Self {
        let mut cfg = RunConfig::default();
        for layer in [file.unwrap_or_default(), flags] {
            if let Some(v) = layer.ell {
                cfg.ell = v;
            }
            if let Some(v) = layer.preset {
                cfg.preset = v;
            }
            if let Some(v) = layer.nodes {
                cfg.nodes = v;
            }
            if let Some(v) = layer.tol {
                cfg.tol = v;
            }
            if let Some(v) = layer.grid {
                cfg.grid = v;
            }
            if let Some(v) = layer.out {
                cfg.out = v;
            }
            if let Some(v) = layer.seed {
                cfg.seed = v;
            }
            if let Some(v) = layer.x0 {
                cfg.x0 = v;
            }
            if let Some(v) = layer.t {
                cfg.t = v;
            }
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = FileConfig { ell: Some(3.0), seed: Some(7), ..Default::default() };
        let flags = FileConfig { ell: Some(1.0), ..Default::default() };
        let cfg = RunConfig::merge(Some(file), flags);
        assert_eq!(cfg.ell, 1.0);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.preset, "separable-k1");
    }
}
