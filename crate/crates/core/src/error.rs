use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("derivative order {order} out of range 1..={max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("value {0} outside [0, 1]")]
    OutOfDomain(f64),

    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),

    #[error("singular or ill-conditioned increment matrix on [{lo}, {hi}] (condition number {cond:.3e})")]
    IllConditioned { lo: f64, hi: f64, cond: f64 },

    #[error("no admissible node tuple; best smallest singular value {best:.3e}")]
    NoAdmissibleNodes { best: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("radius {r} below resolution limit {min}")]
    RadiusTooSmall { r: f64, min: f64 },

    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("solution left [0, 1] by {excess:.3e} at t = {time}")]
    RangeEscape { excess: f64, time: f64 },

    #[error("insufficient time span: {0}")]
    TimeSpan(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
