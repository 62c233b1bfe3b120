use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("pair function undefined on ({left}, {right})")]
    UndefinedPair { left: String, right: String },

    #[error("space must contain at least one point")]
    EmptySpace,

    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("points have inconsistent dimensions: point {index} has {len} coordinates, expected {expected}")]
    RaggedPoints { index: usize, len: usize, expected: usize },

    #[error("distance d({i},{j}) is negative or not finite")]
    InvalidDistance { i: usize, j: usize },

    #[error("nonzero self-distance at point {i}")]
    NonZeroDiagonal { i: usize },

    #[error("distance matrix is not symmetric at ({i},{j})")]
    Asymmetric { i: usize, j: usize },

    #[error("points {i} and {j} coincide (zero off-diagonal distance)")]
    DuplicatePoints { i: usize, j: usize },

    #[error("triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },

    #[error("point id {id} out of range for a space of {n} points")]
    PointOutOfRange { id: usize, n: usize },

    #[error("subset lists point {id} more than once")]
    DuplicateMember { id: usize },

    #[error("subset must have at least two points, got {len}")]
    SubsetTooSmall { len: usize },

    #[error("base point {id} is not a member of the subset")]
    BaseNotInSubset { id: usize },

    #[error("base points must be distinct, both are {id}")]
    BasePointsEqual { id: usize },

    #[error("pair function has shape {found}, expected {expected}")]
    ShapeMismatch { expected: String, found: String },

    #[error("group element {element} is not a permutation of the {n} points")]
    NotAPermutation { element: usize, n: usize },

    #[error("group element {element} is listed more than once")]
    DuplicateGroupElement { element: usize },

    #[error("identity permutation missing from the group")]
    IdentityMissing,

    #[error("group element {element} maps subset point {point} outside the subset")]
    SubsetNotInvariant { element: usize, point: usize },

    #[error("group is not closed: element {left} composed with element {right} is not listed")]
    NotClosed { left: usize, right: usize },

    #[error("inverse of group element {element} is not listed")]
    InverseMissing { element: usize },

    #[error("pair function is not invariant: element {element} moves ({x},{x2})")]
    NotInvariant { element: usize, x: usize, x2: usize },

    #[error("operator I requires a group")]
    GroupRequired,

    #[error("instance file: {0}")]
    InstanceFormat(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
