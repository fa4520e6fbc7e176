//! Numerical laboratory for reflection positivity.
//!
//! The crate builds the machinery around a unitary period-2 operator `J`
//! intertwining a group representation with its twist by an involution τ:
//! semidefinite J-forms on distinguished subspaces, their radicals and
//! GNS-style quotients, contraction bounds for induced operators, and
//! generator spectra of the induced contraction semigroups.  Everything is
//! exercised on four concrete models:
//!
//! * [`sl2`] — exact group/Lie/cone/semigroup calculus for SL(2,ℝ);
//! * [`series`] — the discretized principal/complementary series on (−1,1),
//!   with the kernel |1−xy|^{s−1} and the intertwining integral operator;
//! * [`heisenberg`] — the Schrödinger representation, phase-averaging
//!   decomposition of invariant subspaces, and a reflection-positive
//!   distribution built from a 2D Fourier integral;
//! * [`axb`] — the two irreducible representations of the (ax+b)-group,
//!   projection fields classifying translation-invariant subspaces, classical
//!   escape times, and a deficiency-index probe for (d/dx)² + e^{2x}.
//!
//! [`kernels`] supplies quadrature, Gram-form assembly and PSD diagnostics;
//! [`quotient`] the radical/contraction/generator engine shared by the
//! models.  All types are immutable values and every operation is a pure
//! function, so the whole crate is safe for unrestricted concurrent use.

pub mod axb;
pub mod heisenberg;
pub mod kernels;
pub mod linalg;
pub mod quotient;
pub mod series;
pub mod sl2;

pub use kernels::{BumpBasis, FormMatrix, PsdVerdict, QuadratureRule};
pub use sl2::{GroupElement, LieElement};



