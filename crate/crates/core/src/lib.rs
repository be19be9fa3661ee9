//! Frequency-domain coupled vibroacoustic finite elements.
//!
//! The crate is `no_std` (with `alloc`) and contains only the numerical
//! core: configuration types and validation, material laws, structured
//! quadratic meshing with a frequency-dependent mesh schedule, element and
//! block-system assembly, mortar coupling of non-conforming interfaces,
//! sparse direct and domain-decomposition-preconditioned iterative solvers,
//! and Krylov model order reduction. File formats, timing and the command
//! line live in the `vibro` companion crate.
//!
//! Time convention is `e^{+iωt}` throughout: dissipative stiffness terms have
//! positive imaginary parts, dissipative mass terms negative ones.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assembly;
pub mod config;
pub mod dense;
pub mod element;
mod error;
pub mod lu;
pub mod materials;
pub mod math;
pub mod mesh;
pub mod mor;
pub mod mortar;
pub mod solvers;
pub mod sparse;

pub use error::{Error, Result};
pub use math::C64;
