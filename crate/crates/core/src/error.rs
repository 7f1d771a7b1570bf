use thiserror::Error;

/// Errors raised by the simulation and compilation engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("two-path condition violated: {0}")]
    ConditionViolated(String),

    #[error("grid of {0} points per axis is too coarse (need at least 64)")]
    ResolutionTooCoarse(usize),

    #[error("local refinement did not converge near ({phi1:.6}, {phi2:.6})")]
    RefinementFailed { phi1: f64, phi2: f64 },

    #[error("gate phase undefined: sinh(d) and sin(beta) both vanish")]
    Degenerate,

    #[error("target gate phase {target:.6} rad cannot be reached with epsilon in (0, {eta:.6})")]
    Unattainable { target: f64, eta: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("overlap collapsed to {min_overlap:.3e} at flux {flux:.6} rad; refine the flux grid")]
    OverlapCollapse { min_overlap: f64, flux: f64 },

    #[error("outcome {outcome:+} has probability {probability:.3e}")]
    ImpossibleOutcome { outcome: i8, probability: f64 },

    #[error("forced measurement did not terminate after {0} attempts")]
    NonTermination(usize),

    #[error("bus and phase ground are shorted through junctions {0:?}")]
    ShortCircuit(Vec<u32>),

    #[error("ground-side parity requested without a tare record")]
    TareMissing,

    #[error("bus-side Majorana set {0:?} has odd cardinality")]
    OddSet(Vec<String>),

    #[error("no junction setting measures {0}")]
    Unreachable(String),

    #[error("device description: {0}")]
    Device(String),
}

pub type Result<T> = std::result::Result<T, Error>;
