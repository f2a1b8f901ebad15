use crate::circuit::GateKind;
use crate::mc::PurityEstimate;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{kind} gate not supported here: {reason}")]
    UnsupportedGate { kind: GateKind, reason: &'static str },

    #[error("gate is not invertible: {0}")]
    NotInvertible(GateKind),

    #[error("invalid circuit spec: {0}")]
    BadSpec(String),

    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: u32, n: u32 },

    #[error("regions overlap")]
    OverlappingRegions,

    #[error("entropy too large for sample budget (purity {:.3e} +/- {:.3e} after {} samples)",
            estimate.mean, estimate.stderr, estimate.samples)]
    Unresolvable { estimate: PurityEstimate },

    #[error("recorded outcome has zero probability in this state")]
    ZeroProbability,

    #[error("dense oracle limited to {max} qubits, got {n}")]
    OracleTooLarge { n: u32, max: u32 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("rescaled curves have no overlapping support")]
    NoOverlap,

    #[error("scan grid does not straddle the transition")]
    NoStraddle,

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("engine incompatible with request: {0}")]
    EngineMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
