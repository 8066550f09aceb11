#![cfg_attr(not(test), no_std)]
//! Exact differential calculus on Z₂ⁿ-graded formal superdomains, at the
//! level of jets at a basepoint.
//!
//! The kernel is allocation-only (`no_std` + `alloc`): every value is an
//! immutable algebraic object with exact rational coefficients.

extern crate alloc;

pub mod error;
pub mod grading;
pub mod series;
pub mod matrix;
pub mod morphism;
pub mod localforms;
pub mod forms;
pub mod cohomology;

pub use error::{Error, Result};
pub use grading::{scalar_sign, standard_order, Coordinate, CoordinateSystem, Degree, DegreeSignature, Sign};
pub use cohomology::{derham_ranks, find_potential, CohomologyCell, DeRhamTable};
pub use forms::{differential, differential_with_cap, Form, VectorField};
pub use localforms::{constant_rank_factor, immersion_normal_form, invert_morphism, submersion_normal_form, ConstantRankFactorization, CoordinateChange, ImmersionNormalForm, SubmersionNormalForm};
pub use matrix::{scalar_rank, ConstantRank, GradedMatrix, QMatrix, RankProfile};
pub use morphism::{compose, jacobian_multiplicativity_check, pair_morphism, product_domain, Classification, Domain, Morphism, PointKind, TangentMap};
pub use series::{JetAlgebra, Monomial, Series};

/// Exact coefficients.
pub type Rational = num_rational::BigRational;
