use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building a cluster or solving for its
/// lifetime.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A node id outside `0..N`.
    UnknownNode(usize),
    /// A node appears in the conditioning prefix of its own load.
    NodeInPrefix(usize),
    /// A polling order that is not a permutation of the node ids.
    NotAPermutation,
    /// Cluster or model parameters out of range.
    InvalidParameter(&'static str),
    /// The correlation model produces a covariance that is not positive
    /// definite (duplicate positions, zero decay with several nodes, ...).
    DegenerateCorrelation,
    /// A Gaussian conditional load is not strictly positive after the offset.
    NonPositiveLoad { node: usize, bits: f64 },
    /// The energy budget is below the infimum `h ln 2` of the energy function.
    InfeasibleEnergy { bits: f64, energy: f64 },
    /// No node has anything to transmit; the lifetime is unbounded.
    UnboundedLifetime,
    /// An exhaustive or combinatorial search exceeded its size guard.
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    /// The operation needs a different correlation model or energy mode.
    WrongModel(&'static str),
    /// A root finder or the simplex failed to converge.
    Numeric(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownNode(id) => write!(f, "unknown node id {id}"),
            Error::NodeInPrefix(id) => write!(f, "node {id} is already in the polled prefix"),
            Error::NotAPermutation => f.write_str("order is not a permutation of the node ids"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DegenerateCorrelation => {
                f.write_str("covariance matrix is not positive definite")
            }
            Error::NonPositiveLoad { node, bits } => write!(
                f,
                "node {node} has non-positive conditional load {bits} bits; raise the entropy offset"
            ),
            Error::InfeasibleEnergy { bits, energy } => write!(
                f,
                "energy {energy} cannot carry {bits} bits in any finite time (needs > h ln 2)"
            ),
            Error::UnboundedLifetime => f.write_str("lifetime is unbounded (nothing to transmit)"),
            Error::TooLarge { what, size, limit } => {
                write!(f, "{what}: size {size} exceeds limit {limit}")
            }
            Error::WrongModel(what) => write!(f, "wrong model: {what}"),
            Error::Numeric(what) => write!(f, "numeric failure: {what}"),
        }
    }
}

impl core::error::Error for Error {}
