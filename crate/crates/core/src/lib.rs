//! Projectively invariant Cauchy-Fantappie-Leray kernels, edge invariants and
//! boundary measures for piecewise-smooth domains in CP^2.

pub mod chart;
pub mod domain;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod invariants;
pub mod kernels;
pub mod measures;
pub mod poly;
pub mod projective;
pub mod quadrature;
pub mod sampling;
pub mod spec;

pub use error::{Error, Result};
pub use poly::{gradient_hyperplane, parse_poly, wirtinger, HermitianPoly, Poly, Wirtinger};
pub use projective::{
    dual_map, normalize_map, pair, pull_back_section, Bidegree, HomVec, Point2, ProjMap, Role,
    Section, SectionValue, C,
};
