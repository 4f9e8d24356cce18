use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A wedge product would produce a form of degree greater than 8.
    DegreeOverflow,
    /// Two forms of different degrees were combined additively.
    DegreeMismatch { left: usize, right: usize },
    /// An index tuple contained repeats or indices outside 0..8.
    InvalidIndices,
    /// Interior product of a degree-0 form.
    ZeroDegreeContraction,
    /// A form did not have the degree an operation requires.
    WrongDegree { expected: usize, got: usize },
    /// Metric coefficient matrix is not symmetric.
    NonSymmetricMetric,
    /// Metric coefficient matrix failed the Cholesky positivity check.
    NotPositiveDefinite,
    /// Hodge star was handed an orientation form of non-unit norm.
    NonUnitOrientation,
    /// A linear system could not be solved.
    SingularMatrix,
    /// A chart point lies outside the chart or too close to its boundary.
    OutOfChart(&'static str),
    /// A scalar argument violated its documented range.
    OutOfRange(&'static str),
    /// The four spanning vectors of a plane are (numerically) dependent.
    DegeneratePlane,
    /// An operation needed a pack built in a different coframe.
    WrongBasis(&'static str),
    /// An iterative numerical procedure failed to converge.
    NoConvergence(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegreeOverflow => write!(f, "degree exceeds 8"),
            Error::DegreeMismatch { left, right } => {
                write!(f, "degree mismatch: {left} vs {right}")
            }
            Error::InvalidIndices => write!(f, "invalid basis index tuple"),
            Error::ZeroDegreeContraction => write!(f, "interior product of a 0-form"),
            Error::WrongDegree { expected, got } => {
                write!(f, "expected a {expected}-form, got a {got}-form")
            }
            Error::NonSymmetricMetric => write!(f, "metric coefficients are not symmetric"),
            Error::NotPositiveDefinite => write!(f, "metric is not positive definite"),
            Error::NonUnitOrientation => write!(f, "orientation form does not have unit norm"),
            Error::SingularMatrix => write!(f, "singular matrix"),
            Error::OutOfChart(what) => write!(f, "point outside chart domain: {what}"),
            Error::OutOfRange(what) => write!(f, "argument out of range: {what}"),
            Error::DegeneratePlane => write!(f, "spanning vectors are linearly dependent"),
            Error::WrongBasis(need) => write!(f, "operation requires the {need} coframe"),
            Error::NoConvergence(what) => write!(f, "no convergence: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
