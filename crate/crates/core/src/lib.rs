//! Exact construction and verification of hiding regions for
//! piecewise-linear interval IFS pairs close to the identity.
//!
//! Everything is computed over exact rationals. The geometry layer
//! ([`region`], [`periodic`], [`plmap`], [`transform`]) is generic over
//! [`Scalar`]; the constructions above it work with [`Rat`].

pub mod assembly;
pub mod deform;
pub mod error;
pub mod farey;
pub mod leap;
pub mod local_models;
pub mod periodic;
pub mod plmap;
pub mod region;
pub mod scalar;
pub mod smoothing;
pub mod template;
pub mod transform;
pub mod verifier;

pub use error::{Error, Result};
pub use scalar::{int, rat, Rat, Scalar};

pub type Interval = region::Ivl<Rat>;
pub type RatRegion = region::Region<Rat>;
pub type RatSet = region::ClosedSet<Rat>;
pub type RatPeriodic = periodic::PeriodicRegion<Rat>;
pub type RatMap = plmap::PLMap<Rat>;
