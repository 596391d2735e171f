//! `key=value` configuration file, overridden by command-line flags.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use morfwork::workbench::ResourcePaths;

use crate::CliError;

pub const CONFIG_ENV: &str = "MORFWORK_CONFIG";
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

#[derive(Clone, Debug)]
pub struct Config {
    pub resources: ResourcePaths,
    pub corpus: Option<PathBuf>,
    pub tagged: Option<PathBuf>,
    pub index: Option<PathBuf>,
    /// Directory holding the built UI bundle.
    pub ui: Option<PathBuf>,
    pub listen: SocketAddr,
    pub ascii_fold: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            resources: ResourcePaths::default(),
            corpus: None,
            tagged: None,
            index: None,
            ui: None,
            listen: DEFAULT_LISTEN.parse().expect("valid default address"),
            ascii_fold: false,
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("`{key}` expects true or false, got `{value}`")),
    }
}

impl Config {
    /// Parses config text. Relative paths are taken relative to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| CliError::Config(format!("config line {}: {m}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let path = || Some(base.join(value));
            match key {
                "rules" => cfg.resources.rules = path(),
                "paradigms" => cfg.resources.paradigms = path(),
                "lexicon" => cfg.resources.lexicon = path(),
                "constraints" => cfg.resources.constraints = path(),
                "stats" => cfg.resources.stats = path(),
                "implications" => cfg.resources.implications = path(),
                "corpus" => cfg.corpus = path(),
                "tagged" => cfg.tagged = path(),
                "index" => cfg.index = path(),
                "ui" => cfg.ui = path(),
                "listen" => {
                    cfg.listen = value
                        .parse()
                        .map_err(|_| err(format!("`{value}` is not a socket address")))?
                }
                "ascii_fold" | "asciiFold" => cfg.ascii_fold = parse_bool(key, value).map_err(err)?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_relative_to_base() {
        let cfg = Config::parse(
            "# comment\nlexicon = words.tsv\nlisten=0.0.0.0:9000\nascii_fold=true\n",
            Path::new("/etc/mw"),
        )
        .unwrap();
        assert_eq!(cfg.resources.lexicon, Some(PathBuf::from("/etc/mw/words.tsv")));
        assert_eq!(cfg.listen.port(), 9000);
        assert!(cfg.ascii_fold);
        assert!(cfg.resources.rules.is_none());
    }

    #[test]
    fn rejects_bad_lines() {
        for text in ["nonsense\n", "colour=red\n", "listen=here\n", "ascii_fold=maybe\n"] {
            assert!(matches!(Config::parse(text, Path::new(".")), Err(CliError::Config(_))), "{text}");
        }
    }
}
