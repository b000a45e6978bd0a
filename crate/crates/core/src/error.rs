use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("algebra mismatch: left operand has {left} modes, right operand has {right}")]
    AlgebraMismatch { left: usize, right: usize },

    #[error("mode {mode} is outside an algebra with {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("algebra with {0} modes exceeds the 32-mode bitmask limit")]
    TooManyModes(usize),

    #[error("integration variable {0} appears more than once")]
    RepeatedVariable(String),

    #[error("matrix is {rows}x{cols}, expected {expected}x{expected}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("covariance matrix is singular (|det| = {0:e})")]
    SingularCovariance(f64),

    #[error("{what}: closed formula {formula} disagrees with brute force {brute} (relative {relative:e})")]
    RouteMismatch {
        what: &'static str,
        formula: String,
        brute: String,
        relative: f64,
    },

    #[error("degenerate spectrum: k = 0 and m = 0 leave the Hamiltonian with no sign")]
    DegenerateSpectrum,

    #[error("velocity {0} is not inside (-1, 1)")]
    Superluminal(f64),

    #[error("Pauli exclusion: mode {mode} is already occupied, excitation vanishes")]
    PauliExclusion { mode: usize },

    #[error("polar phase undefined for a zero spinor")]
    ZeroSpinor,

    #[error("trajectory amplitude |q| = {modulus:e} at t = {time} hit the 1/q singularity")]
    Singularity { time: f64, modulus: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no lattice modes with ||k| - {mu}| <= {delta} for L = {side}; increase L or the band width")]
    EmptyShell { mu: f64, delta: f64, side: f64 },

    #[error("residual region point {point:?} touches an excluded zone: {reason}")]
    ExcludedZone { point: [f64; 4], reason: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
