use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{a} has no inverse modulo {q} (gcd = {gcd})")]
    NotInvertible { a: i64, q: u64, gcd: u64 },

    #[error("modulus {0} must be odd")]
    EvenModulus(u64),

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("gcd({a}, {c}) != 1")]
    NotCoprime { a: i64, c: u64 },

    #[error("level {p} divides modulus {q}; this case is not implemented")]
    LevelDividesModulus { p: u64, q: u64 },

    #[error("quadrature did not converge: last estimates {last:?} and {previous:?} ({detail})")]
    NonConvergence {
        last: (f64, f64),
        previous: (f64, f64),
        detail: String,
    },

    #[error("no stationary point: {0}")]
    NoStationaryPoint(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("coefficient table too short: need n up to {needed}, have {have}")]
    InsufficientCoefficients { needed: u64, have: u64 },

    #[error("coefficient file line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("coefficient table rejected: {0}")]
    InvalidTable(String),

    #[error("enumeration budget exceeded: {size} > {budget}")]
    Budget { size: u128, budget: u128 },

    #[error("configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
