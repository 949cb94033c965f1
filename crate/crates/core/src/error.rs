use thiserror::Error;

/// Errors raised by the geometric and numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("role mismatch: expected {expected}, got {got}")]
    RoleMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("homogeneous vector has all coordinates zero")]
    ZeroVector,

    #[error(
        "point lies on the pole hyperplane of the affine chart (|denominator| = {denominator:e})"
    )]
    PoleHyperplane { denominator: f64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("polynomial is not real-valued: coefficient of {term} is {coeff} but its mirror {mirror} has {mirror_coeff}")]
    NotHermitian {
        term: String,
        coeff: String,
        mirror: String,
        mirror_coeff: String,
    },

    #[error("complex gradient vanishes at the point (|d rho| = {norm:e})")]
    DegenerateGradient { norm: f64 },

    #[error("barycentric coordinates {0:?} are outside the simplex")]
    OutsideSimplex(Vec<f64>),

    #[error("sampling radius too large: hypersurface {label} becomes active inside the ball")]
    RadiusTooLarge { label: String },

    #[error("hypersurface is not strongly C-convex along the edge: c = ({c1}, {c2})")]
    NotStronglyConvex { c1: f64, c2: f64 },

    #[error("kernel pole: {0}")]
    Pole(String),

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("frame vector {index} is not tangent to the incidence locus (defect {defect:e})")]
    NotTangent { index: usize, defect: f64 },

    #[error("gradients of the edge members are complex-parallel (sin angle = {0:e})")]
    NotTransverse(f64),

    #[error("least-squares system is rank deficient: {0}")]
    RankDeficient(String),

    #[error("edge invariant is negative (eta = {0}); the boundary measure is undefined")]
    NegativeEta(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid domain description: {0}")]
    Spec(String),

    #[error("numerical iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("point {0} is not in the interior of the domain")]
    NotInterior(String),

    #[error("Levi form is not positive: {0}")]
    LeviNotPositive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
