//! Construction, classification, and verification of composite traveling-wave
//! profiles for the nonlinear variational wave equation and the Camassa-Holm
//! equation.
//!
//! Global bounded traveling waves for these equations are built by gluing
//! local classical solutions at points where one-sided derivatives may jump
//! or blow up. Monotone pieces are stored in the w-parametrization, i.e. as
//! tables of xi(w) rather than w(xi), which turns slope blow-ups into regular
//! zeros of dxi/dw.
//!
//! The crate is split into:
//! - shared domain types and coefficient families ([`coefficient`],
//!   [`segment`], [`profile`], [`tol`]),
//! - equation-specific constructors and gluing checkers ([`nvw`], [`ch`]),
//! - numerical certification of the weak-solution property ([`bump`],
//!   [`verify`]),
//! - small numerical kernels they share ([`quad`], [`root`], [`cubic`],
//!   [`pchip`]).

#![no_std]

extern crate alloc;

pub mod bump;
pub mod ch;
pub mod coefficient;
pub mod cubic;
pub mod math;
pub mod nvw;
pub mod pchip;
pub mod profile;
pub mod quad;
pub mod root;
pub mod rng;
pub mod segment;
pub mod tol;
pub mod verify;

pub use coefficient::CoefficientSpec;
pub use profile::{GlueKind, GluePoint, Profile};
pub use segment::{EndpointFlag, ExtendedSlope, Orientation, Segment, SegmentEq};
pub use tol::ToleranceConfig;
