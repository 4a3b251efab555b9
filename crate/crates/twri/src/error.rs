use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid packet: {0}")]
    InvalidPacket(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at {0}")]
    NonFinite(String),

    #[error("boundary decay violated: |q{mode}| = {value:e} at the x-boundary of slice {slice}")]
    BoundaryDecay { mode: usize, slice: usize, value: f64 },

    #[error("step size underflow at x = {x} (lambda = {lambda}); spectral parameter too large for window and tolerance")]
    StepUnderflow { x: f64, lambda: Complex64 },

    #[error("zero of the scattering function on or near a contour edge after maximal subdivision near {0}")]
    ContourZero(Complex64),

    #[error("region must lie strictly inside one half-plane of the spectral plane")]
    RegionStraddlesAxis,

    #[error("coupling signs {0:?} do not give a focusing spectral problem for every mode")]
    UnsupportedCoupling([i8; 3]),

    #[error("pole collision between {a} and {b}")]
    PoleCollision { a: String, b: String },

    #[error("packet supports overlap or touch: packets {0} and {1}")]
    OverlappingSupports(usize, usize),

    #[error("more than one packet assigned to mode {0}")]
    DuplicateMode(usize),

    #[error("singular reconstruction system at x = {x}, t = {t} (condition estimate {condition:e})")]
    SingularSystem { x: f64, t: f64, condition: f64 },

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("CFL violation: courant number {0} exceeds 1")]
    Cfl(f64),

    #[error("simulation blew up at t = {0}")]
    BlowUp(f64),

    #[error("insufficient grid margin: {0}")]
    Margin(String),

    #[error("at grid index (it = {it}, ix = {ix}): {source}")]
    AtGridPoint {
        it: usize,
        ix: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("checksum mismatch for {0}")]
    Checksum(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
