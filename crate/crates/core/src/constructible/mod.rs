//! Sign-condition sets and their compact approximations: polynomials with
//! exact rational interval arithmetic, Boolean sign formulas, the closed
//! relaxations, adaptive box approximation, telescopes, and box homology.

mod boxes;
mod formula;
mod polynomial;
mod telescope;

pub use boxes::{
    approximate, parse_box, parse_box_file, raster_ppm, triangulate, BoxComplex, Policy, RBox,
};
pub use formula::{
    box_contains_ball, compactify, parse_formula_file, quadrant_formula, quadrant_formula_text,
    relax, sign_sets, ClosedAtom, ClosedFormula, ClosedNode, FormulaNode, Rel, SignFormula, Tri,
};
pub use polynomial::{Interval, Polynomial};
pub use telescope::{
    box_betti_nerve, box_betti_nerve_upto, box_homology, stabilize, telescope, StabilizeReport,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructibleError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("too many functions for sign-set enumeration: {0} > 16")]
    TooManyFunctions(usize),
    #[error("thresholds must satisfy 0 < eps < delta < 1")]
    BadThresholds,
    #[error("subdivision depth {0} exceeds the supported maximum 24")]
    DepthTooLarge(u32),
    #[error("max depth reached with undecided cells in strict mode")]
    DepthExceeded,
    #[error("formula lives in dimension {expected}, box in dimension {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("telescope needs m >= 1 and a stabilization schedule of length >= 2")]
    BadParams,
    #[error(transparent)]
    Ladder(#[from] crate::mcomplex::McError),
}
