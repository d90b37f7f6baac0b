//! Exact-arithmetic library for the integral structure of maximal parabolic
//! subgroups of orthogonal groups of even lattices.
//!
//! Everything is computed over arbitrary-precision integers and rationals;
//! no floating point is used anywhere. The main entry points are:
//!
//! - [`mat`]: generic exact matrices, Hermite/Smith normal forms, kernels,
//!   rational solving and saturation;
//! - [`lattice`]: even lattices, dual lattices, discriminant groups with
//!   their `Q/Z`-valued forms, and the sublattice calculus;
//! - [`frame`]: adapted coordinate frames for primitive isotropic
//!   sublattices (unimodular complements, the correction map `alpha`, the
//!   glue map `iota` and its dual, exact membership by decomposition);
//! - [`parabolic`]: coordinates for parabolic elements, the integral
//!   Heisenberg group, membership tests for the discriminant-kernel
//!   parabolic with a brute-force oracle, determinant/spinor norm, and the
//!   obstruction cocycle `b_M`;
//! - [`boundary`]: arithmetic descriptors of canonical toroidal boundary
//!   components for signature `(n,2)` lattices with rank-2 isotropic parts;
//! - [`selfcheck`]: the reproducible invariant suite used by the CLI.

pub mod boundary;
pub mod congruence;
pub mod error;
pub mod finquad;
pub mod fixtures;
pub mod frame;
pub mod json;
pub mod lattice;
pub mod mat;
pub mod parabolic;
pub mod sample;
pub mod selfcheck;
pub mod spinor;

pub use error::Error;

/// Arbitrary-precision integer scalar used throughout.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational scalar, always kept in lowest terms.
pub type Rat = num_rational::BigRational;

/// Exact integer matrix.
pub type IntMatrix = mat::Matrix<Int>;
/// Exact rational matrix.
pub type RatMatrix = mat::Matrix<Rat>;

/// Shorthand for fallible operations of this crate.
pub type Result<T> = std::result::Result<T, Error>;
