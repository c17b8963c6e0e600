//! Optional TOML defaults file: the same keys as the long flags, with
//! dashes (`max-iters = 500` backs `--max-iters 500`). Values given on
//! the command line always win; boolean flags OR with the file.

use std::path::Path;

use malc_core::{Error, Result};
use serde::Deserialize;

/// Keys a defaults file may set. Unknown keys are rejected so typos
/// surface instead of being silently ignored.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub c1: Option<OneOrMany>,
    pub c2: Option<OneOrMany>,
    pub phi: Option<String>,
    pub max_iters: Option<usize>,
    pub rel_tol: Option<f64>,
    pub tol_window: Option<usize>,
    pub scale: Option<bool>,
    pub bias: Option<bool>,
    pub penalize_bias: Option<bool>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub strict: Option<bool>,
    pub theta_max_init: Option<bool>,
    pub validation_fraction: Option<f64>,
    pub stratified: Option<bool>,
    pub warm_start: Option<bool>,
    pub format: Option<String>,
    pub label: Option<String>,
}

/// `c1 = 0.1` and `c1 = [0.1, 0.2]` are both legal TOML here: train wants
/// the scalar, frontier the list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn scalar(&self, key: &str) -> Result<f64> {
        match self {
            OneOrMany::One(v) => Ok(*v),
            OneOrMany::Many(_) => Err(Error::InvalidArgument(format!(
                "config key {key} must be a single number here, not a list"
            ))),
        }
    }

    pub fn list(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(vs) => vs.clone(),
        }
    }
}

/// Loads the file when a path was given; otherwise the all-empty default.
pub fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    toml::from_str(&text).map_err(|e| {
        Error::InvalidArgument(format!("config file {}: {e}", path.display()))
    })
}

/// Flag beats config beats built-in default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Boolean flags can only switch on, so the file value ORs in.
pub fn pick_flag(flag: bool, config: Option<bool>) -> bool {
    flag || config.unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_full_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(
            f,
            "c1 = [0.1, 0.2]\nc2 = 0.05\nphi = \"logistic\"\nmax-iters = 500\n\
             rel-tol = 1e-4\nscale = true\nseed = 9\nvalidation-fraction = 0.25\n"
        )
        .unwrap();
        let cfg = load_config(Some(f.path())).unwrap();
        assert_eq!(cfg.c1.as_ref().unwrap().list(), vec![0.1, 0.2]);
        assert!(cfg.c1.unwrap().scalar("c1").is_err());
        assert_eq!(cfg.c2.unwrap().scalar("c2").unwrap(), 0.05);
        assert_eq!(cfg.phi.as_deref(), Some("logistic"));
        assert_eq!(cfg.max_iters, Some(500));
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.validation_fraction, Some(0.25));
        assert_eq!(cfg.jobs, None);
    }

    #[test]
    fn rejects_unknown_keys() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "max_iters = 3").unwrap(); // underscore, not dash
        assert!(load_config(Some(f.path())).is_err());
    }

    #[test]
    fn no_path_is_empty_config() {
        let cfg = load_config(None).unwrap();
        assert!(cfg.c1.is_none() && cfg.seed.is_none());
    }

    #[test]
    fn precedence_helpers() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick::<u64>(None, None, 3), 3);
        assert!(pick_flag(true, None));
        assert!(pick_flag(false, Some(true)));
        assert!(!pick_flag(false, None));
    }
}
