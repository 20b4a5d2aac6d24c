use thiserror::Error;

/// Errors raised by the geometric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("operation `{0}` is undefined at the point at infinity")]
    InfiniteOperand(&'static str),
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("lift is not null: |<v,v>| = {0:e}")]
    NonNullLift(f64),
    #[error("points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("triple lies on a C-circle; normal form needs cos(A4) > 0")]
    NormalizationDegenerate,
    #[error("variety point has a zero component")]
    ZeroComponent,
    #[error("point is off the variety: residuals ({0:e}, {1:e})")]
    OffVariety(f64, f64),
    #[error("point lies on the CR singular set; the Levi form is degenerate there")]
    LeviDegenerate,
    #[error("point has Im(zeta3) = {0:e}; outside the open set where Im(zeta3) != 0")]
    NotInXStar(f64),
    #[error("(zeta1, zeta2) is not in the domain P: arccos argument {0}")]
    DomainNotInP(f64),
    #[error("Cartan data is degenerate: {0}")]
    DegenerateCartan(&'static str),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
