//! Library surface of the command-line harness, so integration tests can
//! drive the commands directly.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use commands::{cmd_figure, cmd_gap, cmd_kernel, cmd_simulate};
pub use config::{resolve, RunConfig};
pub use verify::cmd_verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn from_io(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o failure: {e}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Flag-level overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub theta: Option<f64>,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub variant: Option<String>,
}

/// Caps the rayon worker pool; one command per process, so this is done
/// once up front.
pub fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
    }

    #[test]
    fn flag_overrides_take_precedence() {
        let overrides = Overrides {
            theta: Some(0.25),
            seed: Some(9),
            t: Some(2.5),
            ..Default::default()
        };
        let cfg = resolve(None, &overrides).unwrap();
        assert_eq!(cfg.theta, 0.25);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.t, 2.5);
    }

    #[test]
    fn invalid_theta_rejected_at_resolve_time() {
        let overrides = Overrides { theta: Some(1.5), ..Default::default() };
        assert!(resolve(None, &overrides).is_err());
    }
}
