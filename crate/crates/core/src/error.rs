use std::fmt;

/// Error conditions reported by the numerical routines.
///
/// Variants carry the last relevant values to help with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside a function's mathematical domain.
    Domain(String),

    /// A point does not satisfy the domain constraints `x3 >= 0`,
    /// `|x1|^p <= x3`.
    OutsideDomain { x1: f64, x2: f64, x3: f64, p: f64 },

    /// A bracketed root search failed to reach its tolerance.
    Convergence {
        what: &'static str,
        residual: f64,
        iterations: u32,
    },

    /// The case equation has no root in the admissible range. This is a
    /// legitimate outcome for the rejected trajectory cases.
    NoRoot(&'static str),

    /// The point lies outside the acceptable sector of the requested
    /// trajectory case.
    Sector(&'static str),

    /// A finite-difference stencil would leave the domain or cross one of
    /// the non-smoothness sets.
    StepSize(String),

    /// Step functions of different depths were combined.
    DepthMismatch { left: u32, right: u32 },

    /// The envelope sweep iteration hit its cap before converging.
    SweepLimit { sweeps: u32, residual: f64 },

    /// The growth statistic of the critical-constant search landed inside
    /// the classification dead band at the final bisection width.
    AmbiguousClassification { c: f64, growth: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::OutsideDomain { x1, x2, x3, p } => write!(
                f,
                "point ({x1}, {x2}, {x3}) is outside the domain for p = {p}"
            ),
            Error::Convergence {
                what,
                residual,
                iterations,
            } => write!(
                f,
                "{what}: no convergence after {iterations} iterations (residual {residual:e})"
            ),
            Error::NoRoot(what) => write!(f, "{what}: equation has no root in the valid range"),
            Error::Sector(msg) => write!(f, "point outside the acceptable sector: {msg}"),
            Error::StepSize(msg) => write!(f, "finite-difference step error: {msg}"),
            Error::DepthMismatch { left, right } => {
                write!(f, "depth mismatch: {left} vs {right}")
            }
            Error::SweepLimit { sweeps, residual } => write!(
                f,
                "envelope did not converge after {sweeps} sweeps (residual {residual:e})"
            ),
            Error::AmbiguousClassification { c, growth } => write!(
                f,
                "growth {growth:e} at c = {c} is inside the classification dead band"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
