//! Casimir forces between a sphere and a plate from Lifshitz theory.
//!
//! The crate is organised around three layers:
//!
//! * [`dielectric`] builds ε(iξ) on the imaginary frequency axis, either in
//!   closed form (Drude) or from an absorption spectrum ε″(ω) through the
//!   Kramers–Kronig integral, optionally with a transparency window removed.
//! * [`lifshitz`] turns two dielectric models and a sphere–plate geometry
//!   into a force, with the ideal-metal proximity-force result as reference.
//! * [`calibration`] simulates the simultaneous electrostatic calibration
//!   and Casimir measurement: synthetic lock-in parabolas, the α(d_pz) fit
//!   for k and d₀, and F_C = β/k with propagated uncertainties.
//!
//! All quantities are SI inside the library.
//!
//! ```
//! use casimir::lifshitz::{lifshitz_sphere_plate, ForceQuery, Geometry, QuadratureSettings};
//! use casimir::dielectric::DielectricModel;
//!
//! let query = ForceQuery::new(
//!     Geometry::new(100e-6, 100e-9).unwrap(),
//!     DielectricModel::IdealMetal,
//!     DielectricModel::IdealMetal,
//!     QuadratureSettings::default(),
//! );
//! let f = lifshitz_sphere_plate(&query).unwrap();
//! assert!((f.force - 2.723e-10).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod constants;
pub mod dielectric;
pub mod error;
pub mod format;
pub mod grid;
pub mod lifshitz;
pub mod quadrature;

pub use error::{Error, Result};

/// The guide's chapters, compiled as doc-tests so their snippets stay current.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/dielectric.md")]
    pub mod dielectric {}
    #[doc = include_str!("../../../book/src/lifshitz.md")]
    pub mod lifshitz {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    pub mod calibration {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
