//! Constructive block coding between symbolic dynamical systems.
//!
//! The crate builds injective block codes from a low-entropy source process
//! into a mixing subshift of finite type: specification interpolation fills
//! the gaps between planted words, marker words synchronize the decoder, and a
//! boys/girls marriage dictionary assigns source blocks to target words. The
//! quantitative inequalities behind the construction are checked exactly with
//! big integers or empirically on seeded samples.
//!
//! A separate exact-arithmetic toolkit classifies toral automorphisms and
//! decides the Halmos invariant for cyclic rotations.

pub(crate) mod automaton;
pub mod bigmath;
pub mod cli;
pub mod codec;
pub mod dict;
pub mod estimators;
pub mod interp;
pub mod markers;
pub mod measures;
pub mod shiftspace;
pub mod splicer;
pub mod toral;

pub use shiftspace::{build_sft, full_shift, Sft, Word};
