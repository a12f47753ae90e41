use thiserror::Error;

use crate::geometry::GroupElement;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("{value} is not a non-square modulo {ell}")]
    NotNonSquare { value: u64, ell: u64 },

    #[error("{value} is not a primitive root modulo {ell}")]
    NotPrimitiveRoot { value: u64, ell: u64 },

    #[error("binomial C({n}, {k}) requested with n >= ell = {ell}")]
    BinomialOutOfRange { n: u64, k: u64, ell: u64 },

    #[error("matrix ({a} {b}; {c} {d}) is not invertible modulo {ell}")]
    Singular { a: u64, b: u64, c: u64, d: u64, ell: u64 },

    #[error("points must be distinct")]
    Diagonal,

    #[error("a point of C_l needs a nonzero sqrt(eps)-part")]
    RealPoint,

    #[error("chart domain error: {0}")]
    ChartDomain(String),

    #[error("slope must be nonzero")]
    ZeroSlope,

    #[error("invalid coefficient scheme: {0}")]
    InvalidScheme(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("subgroup is not a group: {0}")]
    NotAGroup(AxiomFailure),

    #[error("no geometric identification for the coset space of {0}")]
    UnsupportedIdentification(String),

    #[error("subgroup too large to materialize at ell = {ell} ({size} elements)")]
    SubgroupTooLarge { ell: u64, size: u64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {dim} exceeds the exact-determinant bound {bound}")]
    DimensionTooLarge { dim: usize, bound: usize },

    #[error("{root} does not have multiplicative order {order} modulo {ell}")]
    BadRootOfUnity { root: u64, order: usize, ell: u64 },

    #[error("certificate failure: {0}")]
    Certificate(String),
}

/// The group axiom a candidate subgroup violated, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    Empty,
    NotInvertible(GroupElement),
    MissingIdentity,
    NotClosed { left: GroupElement, right: GroupElement, product: GroupElement },
    MissingInverse(GroupElement),
}

impl std::fmt::Display for AxiomFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomFailure::Empty => write!(f, "empty element list"),
            AxiomFailure::NotInvertible(g) => write!(f, "{g} is singular"),
            AxiomFailure::MissingIdentity => write!(f, "identity missing"),
            AxiomFailure::NotClosed { left, right, product } => {
                write!(f, "{left} * {right} = {product} is not in the set")
            }
            AxiomFailure::MissingInverse(g) => write!(f, "inverse of {g} missing"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
