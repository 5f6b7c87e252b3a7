//! Common information of correlated source pairs on the Gray-Wyner network.
//!
//! The crate computes Gács-Körner and Wyner common information for finite
//! joints (lossless and lossy), the bivariate-Gaussian closed forms, the
//! excess-rate tradeoff curves, and Gray-Wyner rate points. Every numerical
//! solver has a brute-force counterpart that the tests compare against.
//!
//! All quantities are in bits.

pub mod aux;
pub mod csv;
pub mod error;
pub mod gaussian;
pub mod gk;
pub mod gw;
pub mod lossy;
pub mod prob;
pub mod verify;

pub use error::{Error, Result};
pub use prob::{Axis, JointPMF, NDDist};
