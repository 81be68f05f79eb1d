//! Symbolic-numeric machinery for Schur-function expansions of KP tau
//! functions attached to plane algebraic curves.
//!
//! The crate is organised in layers.  At the bottom sit exact combinatorial
//! and symbolic tools: integer [`partitions`], the exact symmetric-function
//! layer [`schur`] and the small symbolic polynomial ring [`sympoly`].  The
//! numeric layer provides graded truncated power series ([`series`]),
//! curve models with local expansions at infinity ([`curve`]), numerically
//! integrated period matrices ([`periods`]) and the Riemann theta / Klein
//! sigma kernel ([`thetasigma`]).  On top, [`tau`] assembles tau-function
//! series and extracts Plucker coordinates and affine (big-cell)
//! coordinates by independent routes, and [`identities`] bundles the
//! closed-form oracles and identity suites used for verification.

pub mod curve;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod mono;
pub mod partitions;
pub mod periods;
pub mod scalar;
pub mod schur;
pub mod series;
pub mod sympoly;
pub mod tau;
pub mod thetasigma;
pub mod xiseries;

pub use error::{Error, Result};
