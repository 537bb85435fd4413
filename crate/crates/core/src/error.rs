use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid interval [{a}, {b}]")]
    Interval { a: f64, b: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("coincident particles at index {index} (position {position})")]
    Singularity { index: usize, position: f64 },

    #[error("step size exhausted after {halvings} halvings at t = {time}; smallest gap {gap:e}")]
    Stiffness { time: f64, gap: f64, halvings: u32 },

    #[error("requested time {0} is not on the trajectory grid")]
    OffGrid(f64),

    #[error("empty input: {0}")]
    Empty(String),
}

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {x} is not finite")))
    }
}
