//! Exact combinatorial topology at desk scale: finite simplicial complexes
//! with integer homology, posets and nerves, marked complexes with cores,
//! the cap-bounded chain complexes `M(m_0, ..., m_N)`, interval-arithmetic
//! box approximations of sign-condition sets and their telescopes, fibred
//! powers over coordinate projections, and explicit Betti-bound formulas.
//!
//! Everything is exact: vertex ids are integers, coordinates are arbitrary
//! precision rationals, homology is integral via Smith normal form. All
//! operations are deterministic for fixed inputs and seeds.

pub mod bounds;
pub mod cliques;
pub mod constructible;
pub mod homology;
pub mod marking;
pub mod mcomplex;
pub mod poset;
pub mod reduce;
pub mod sign;
pub mod simplicial;
pub mod spectral;
pub mod suite;

pub use homology::BettiVector;
pub use sign::Sign;
pub use simplicial::{Simplex, SimplicialComplex, Subdivision, VertexId};

/// Arbitrary precision rational used throughout the geometric layers.
pub type Rational = num::BigRational;
/// Arbitrary precision integer used by homology and the bound calculators.
pub type Integer = num::BigInt;

/// Shorthand for an exact rational from an integer pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(Integer::from(num), Integer::from(den))
}
