//! Certification toolkit for rational hulls of fibered totally real surfaces
//! in C^2.
//!
//! The crate carries a small gallery of surfaces (a Rudin-style Klein bottle
//! and its mirror, preimage tori of the conjugate Hopf fibration, spin tori
//! over immersed plane curves, and totally real graph discs), the rational
//! maps fibering each of them over a plane curve, hull decompositions built
//! from bounded fiber components that avoid an algebraic curve, and the
//! numeric certificates backing each step: winding-number constancy for
//! attached disc families, annulus zero-count identities, boundary moment
//! vanishing, Laurent approximation gaps, and Stokes bounding checks.

pub mod certificates;
pub mod curve;
pub mod fibration;
pub mod forms;
pub mod numerics;
pub mod poly;
pub mod surfaces;
pub mod types;

pub use types::Point2C;
