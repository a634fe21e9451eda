//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shifted derivative identity needs n >= m, got m = {m}, n = {n}")]
    ShiftExceedsOrder { m: usize, n: usize },

    #[error("exact integer arithmetic overflowed 128 bits ({context})")]
    Overflow { context: &'static str },

    #[error("table memory cap exceeded: {needed} coefficients requested, cap is {cap}")]
    MemoryCap { needed: usize, cap: usize },

    #[error("table of size {m_max}x{n_max} too small: entry ({m},{n}) required")]
    TableTooSmall {
        m: usize,
        n: usize,
        m_max: usize,
        n_max: usize,
    },

    #[error("cannot find roots of the zero polynomial")]
    ZeroPolynomial,

    #[error("locus function undefined: {0}")]
    DegenerateLocus(&'static str),

    #[error("phi evaluated at a zero of A(z)B(z), z = {re}+{im}i")]
    PhiPole { re: f64, im: f64 },

    #[error("root set is not real at pairing tolerance: |Im| = {max_im} at index {index}")]
    NonrealSample { max_im: f64, index: usize },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
