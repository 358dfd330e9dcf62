//! Error type shared by all survbound operations.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Total weight of the density is zero, infinite or NaN.
    #[error("density is not normalizable (total weight {weight})")]
    NonNormalizable { weight: f64 },

    /// A density sample or atom weight is negative.
    #[error("negative density {value} at E = {energy}")]
    NegativeDensity { energy: f64, value: f64 },

    /// Parameters violate the constraints of the distribution kind.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Cut-off lies outside the (open-lower, closed-upper) support.
    #[error("cut-off {cutoff} outside support ({lower}, {upper}]")]
    CutoffOutOfSupport { cutoff: f64, lower: f64, upper: f64 },

    /// The k-th raw energy moment does not exist for this distribution.
    #[error("energy moment h_{k} diverges for this distribution")]
    MomentDivergent { k: usize },

    /// Requested moment order exceeds what 64-bit arithmetic supports.
    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    /// Moment data does not extend far enough for the requested order.
    #[error("moments available through order {have}, need {need}")]
    InsufficientOrder { have: usize, need: usize },

    /// A correlation moment came out non-positive; the input moments
    /// are inconsistent or too noisy.
    #[error("correlation moment of order {k} is non-positive ({value})")]
    NonPositiveCorrelationMoment { k: usize, value: f64 },

    /// An edge moment came out non-positive.
    #[error("edge moment b_{k} is non-positive ({value})")]
    NonPositiveEdgeMoment { k: usize, value: f64 },

    /// Edge moments are degenerate (zero-variance distribution below
    /// the cut-off), so no envelope time exists.
    #[error("edge moments are degenerate; no envelope time defined")]
    DegenerateEdge,

    /// Closed-form and numeric envelope roots disagree beyond tolerance.
    #[error("closed-form root {closed} disagrees with numeric root {numeric}")]
    RootMismatch { closed: f64, numeric: f64 },

    /// The envelope equation has no positive root at this cut-off.
    #[error("envelope equation has no positive root")]
    NoPositiveRoot,

    /// No cut-off in the sweep produced an envelope point.
    #[error("no cut-off in the grid produced an envelope point")]
    EmptyEnvelope,

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed: requested {requested:e}, achieved {achieved:e}")]
    QuadratureFailure { requested: f64, achieved: f64 },

    /// Malformed distribution spec file or tabulated data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
