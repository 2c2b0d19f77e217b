//! Rational points on the circle and the 2-sphere that approximate given real
//! points, built from stereographic parameters, continued fractions and a
//! lattice-point sweep, together with exhaustive enumeration oracles.
//!
//! Every emitted approximation is certified with exact or interval arithmetic;
//! nothing is decided with floating point.

pub mod circle;
pub mod contfrac;
pub mod export;
pub mod numeric;
pub mod oracle;
pub mod sphere2;
pub mod stereo;

pub use circle::{approx_circle, sharpness_experiment, ApproxRecord, CircleOptions, SharpnessReport};
pub use contfrac::{CFExpansion, Convergent, FractionClass, Tail};
pub use numeric::{BigRational, NumericError, Precision, QuadSurd, RealScalar};
pub use sphere2::{LatticeSolution, Transform4};
pub use stereo::{SpherePoint, StereoParam};

/// Errors surfaced by the approximation engines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The input is the antipode `(0, …, 0, -1)`, whose parameter is at infinity.
    #[error("point is the antipode; its parameter lies at infinity")]
    AtInfinity,
    #[error("expansion has no explicit period")]
    NotPeriodic,
    #[error("search stopped after {found} of {wanted} results")]
    Exhausted { found: usize, wanted: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Precision ran out before a comparison could be certified.
    pub fn is_unresolved(&self) -> bool {
        matches!(self, Error::Numeric(NumericError::Unresolved { .. }))
    }
}
