//! Exact symbolic computation for birational self-maps of projective
//! n-space over the rationals, prime fields and cyclotomic fields.
//!
//! The crate provides sparse homogeneous polynomial arithmetic with
//! multivariate GCD, projective rational maps with composition and
//! common-factor cancellation, group words over named generator alphabets,
//! a catalog of explicit Cremona-group constructions with exact identity
//! verification, the `Psi_{P,Q,R}` machinery with a recursive birationality
//! criterion backed by finite-field fiber oracles, and exact free-product
//! certificates through the pencil representation into `PGL(2)`.

pub mod field;
pub mod poly;
pub mod ratmap;
pub mod words;
pub mod constructions;
pub mod freeness;
pub mod pan;

pub use field::{FieldDescriptor, FieldElem, FieldError};
pub use poly::{HomPoly, Monomial, MultiPoly, PolyError};
pub use ratmap::{standard_involution, LinearMap, MapError, ProjPoint, RatMap};
pub use words::{Alphabet, BirationalPair, GroupWord, WordError};
