//! Explicit intertwining operators between permutation modules of
//! `G = GL2(F_l)`, and exact certificates that they are surjective.
//!
//! For an odd prime `l` and a non-square `eps`:
//!
//! * [`correspondence::build_psi_plus`] sends an unordered pair `{a, b}` of
//!   points of `P^1(F_l)` to the sum of the points of the geodesic joining
//!   them in the finite upper half plane `H_l`;
//! * [`correspondence::build_psi`] sends an ordered pair `(a, b)` to a
//!   weighted sum over slopes `s` of the slope-`s` paths from `a` to `b` in
//!   the punctured plane `C_l`.
//!
//! Both are `G`-equivariant and surjective over `Q`. The crate checks this
//! three ways: exact rank certificates ([`exact_linalg`]), double coset
//! operators built from first principles ([`cosets`]), and circulant
//! eigenvalue certificates computed inside `F_l` ([`circulant`]).
//! [`verify::run_verification`] chains all of them into a [`RunReport`].

pub mod circulant;
pub mod correspondence;
pub mod cosets;
pub mod error;
pub mod exact_linalg;
pub mod geometry;
pub mod modular_arith;
mod operator;
pub mod verify;

pub use correspondence::{CoefficientScheme, OperatorMatrix, Side};
pub use error::{Error, Result};
pub use geometry::{
    BasisKind, CartanOrbit, CartanPoint, GroupElement, OrderedPair, ProjectivePoint, UnorderedPair,
};
pub use modular_arith::{PrimeContext, Residue};
pub use verify::{run_verification, RunReport, VerifyOptions};
