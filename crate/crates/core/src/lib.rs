//! Exact symbolic engine for torus-equivariant push-forwards over
//! Grassmannians via iterated residues, and for determinantal formulas of
//! refined shifted factorial Grothendieck polynomials.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere. The building blocks:
//!
//! - [`ring`]: multivariate Laurent polynomials over named variables with
//!   role-tagged exponent rules, plus degree truncation for formal series.
//! - [`residue`]: residues at 0 and infinity of rational functions whose
//!   denominators are products of binomial factors `1 - c*m`, the closed-form
//!   residue table, and the linear map `phi`.
//! - [`symfun`]: complete homogeneous and elementary symmetric polynomials,
//!   Schur polynomials via Jacobi-Trudi, partitions, and a fraction-free
//!   determinant.
//! - [`pushforward`]: K-theoretic and cohomological push-forwards from the
//!   Grassmann bundle as executable operations, the wall-crossing recursion,
//!   and independent fixed-point / series oracles.
//! - [`grothendieck`]: refined shifted factorial Grothendieck polynomials,
//!   their determinantal formulas, and related identities.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything is safe to share and send between threads.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod grothendieck;
pub mod pushforward;
pub mod residue;
pub mod ring;
pub mod symfun;

pub use ring::{LaurentPoly, Monomial, Rational, RingError, Truncation, VarId, VarRole, VarTable};
