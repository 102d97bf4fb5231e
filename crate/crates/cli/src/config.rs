use serde::{Deserialize, Serialize};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Environment variable that may name the config file.
pub const CONFIG_ENV: &str = "CAMPUS_AR_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LogLevel {
    Error,
    Warn,
    #[default]
    Info,
    Debug,
}

impl LogLevel {
    pub fn as_filter(self) -> &'static str {
        match self {
            LogLevel::Error => "error",
            LogLevel::Warn => "warn",
            LogLevel::Info => "info",
            LogLevel::Debug => "debug",
        }
    }
}

/// Service configuration. Relative paths are taken relative to the directory
/// holding the config file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    pub graph_path: PathBuf,
    pub staff_path: PathBuf,
    pub advisors_path: PathBuf,
    pub listen_address: String,
    #[serde(default)]
    pub log_level: LogLevel,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path} does not parse: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{field} {path} does not exist")]
    MissingFile { field: &'static str, path: PathBuf },
    #[error("listen_address {0:?} is not host:port with a port in 1..65535")]
    BadListenAddress(String),
}

impl AppConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<AppConfig, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg: AppConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_owned(),
                source,
            })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.graph_path, &mut cfg.staff_path, &mut cfg.advisors_path] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (field, path) in [
            ("graph_path", &self.graph_path),
            ("staff_path", &self.staff_path),
            ("advisors_path", &self.advisors_path),
        ] {
            if !path.exists() {
                return Err(ConfigError::MissingFile {
                    field,
                    path: path.clone(),
                });
            }
        }
        self.socket_addr().map(|_| ())
    }

    pub fn socket_addr(&self) -> Result<SocketAddr, ConfigError> {
        let bad = || ConfigError::BadListenAddress(self.listen_address.clone());
        let addr = self
            .listen_address
            .parse::<SocketAddr>()
            .or_else(|_| {
                // Accept `localhost:port` as well as literal addresses.
                let (host, port) = self.listen_address.rsplit_once(':').ok_or_else(bad)?;
                let port: u16 = port.parse().map_err(|_| bad())?;
                match host {
                    "localhost" => Ok(SocketAddr::from(([127, 0, 0, 1], port))),
                    _ => Err(bad()),
                }
            })?;
        if addr.port() == 0 {
            return Err(bad());
        }
        Ok(addr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        for f in ["g.json", "s.csv", "a.csv"] {
            std::fs::write(dir.join(f), "").unwrap();
        }
        let path = dir.join("cfg.json");
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{"graph_path":"g.json","staff_path":"s.csv","advisors_path":"a.csv",
                "listen_address":"127.0.0.1:8080","log_level":"DEBUG"}"#,
        );
        let cfg = AppConfig::load(&path).unwrap();
        assert_eq!(cfg.graph_path, dir.path().join("g.json"));
        assert_eq!(cfg.log_level, LogLevel::Debug);
        assert_eq!(cfg.socket_addr().unwrap().port(), 8080);
    }

    #[test]
    fn rejects_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = |listen: &str, graph: &str| {
            let body = format!(
                r#"{{"graph_path":"{graph}","staff_path":"s.csv","advisors_path":"a.csv","listen_address":"{listen}"}}"#
            );
            AppConfig::load(write_config(dir.path(), &body))
        };
        assert!(cfg("127.0.0.1:8080", "g.json").is_ok());
        assert!(cfg("localhost:9000", "g.json").is_ok());
        assert!(matches!(cfg("127.0.0.1:0", "g.json"), Err(ConfigError::BadListenAddress(_))));
        assert!(matches!(cfg("nowhere", "g.json"), Err(ConfigError::BadListenAddress(_))));
        assert!(matches!(
            cfg("127.0.0.1:8080", "missing.json"),
            Err(ConfigError::MissingFile { field: "graph_path", .. })
        ));
        let path = write_config(dir.path(), r#"{"graph_path":"g.json"}"#);
        assert!(matches!(AppConfig::load(path), Err(ConfigError::Parse { .. })));
    }
}
