use std::fmt;

use thiserror::Error;

/// Which full-offload requirement could not be met.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// Edge user -> center user side-link must carry the edge bits.
    SidelinkBits,
    /// Center user -> BS must relay the edge bits.
    RelayedEdgeBits,
    /// Center user -> BS must carry its own bits under edge interference.
    CenterBits,
    /// `1 - beta_edge * 2^(L_center / (t_center W))` must stay positive.
    PositivityCondition,
    /// Ideal beam gain cap is below the gain floor.
    BeamGainCap,
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Threshold::SidelinkBits => "sidelink-bits",
            Threshold::RelayedEdgeBits => "relayed-edge-bits",
            Threshold::CenterBits => "center-bits",
            Threshold::PositivityCondition => "positivity-condition",
            Threshold::BeamGainCap => "beam-gain-cap",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("demand exceeds per-pair time budget: center phase needs {needed:.6e} s, budget is {budget:.6e} s")]
    TimeBudgetExceeded { needed: f64, budget: f64 },

    #[error("infeasible {threshold} threshold: requires {required:.6e}, limit {limit:.6e}")]
    Infeasible {
        threshold: Threshold,
        required: f64,
        limit: f64,
    },

    #[error("offload targets unreachable with CM beamforming: gain {achieved:.6e} is {deficit:.6e} short of {required:.6e}")]
    BeamformingInfeasible {
        achieved: f64,
        required: f64,
        deficit: f64,
    },

    #[error("feasible set is empty")]
    EmptyFeasibleSet,

    #[error("solver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize, trace: Vec<f64> },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for the errors that mean "this pair cannot meet its demand",
    /// as opposed to bad input or a solver failure.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::TimeBudgetExceeded { .. }
                | Error::Infeasible { .. }
                | Error::BeamformingInfeasible { .. }
                | Error::EmptyFeasibleSet
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
