use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model parameters violate `A, B, B0 > 0` or `alpha > beta > 1`.
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParams { key: &'static str, reason: String },

    /// A root scan could not bracket a sign change below the cap.
    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    /// Newton iterations ran out before the gradient tolerance was met.
    #[error("spear solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    /// A decay bound was requested for a matrix class with `r_plus >= 1`.
    #[error("decay hypothesis violated: r_plus = {r_plus} >= 1")]
    Hypothesis { r_plus: f64 },

    /// Two particles came closer than the overlap guard.
    #[error("particles {i} and {j} overlap at t = {time} (distance {distance:e})")]
    Overlap {
        i: usize,
        j: usize,
        distance: f64,
        time: f64,
    },

    /// The integrator produced NaN or infinite state.
    #[error("non-finite state at t = {time}, particle {particle}")]
    NonFinite { time: f64, particle: usize },

    #[error("linear algebra failure: {0}")]
    Singular(String),
}
