//! Acoustic energetics of a sound field seen through a spherical-harmonic
//! spatial filter: beam patterns and their velocity companions, intensity,
//! energy density and diffuseness estimators, closed-form reference fields,
//! and a seeded Monte-Carlo scene simulator to verify one against the other.

pub mod beam;
pub mod coupling;
pub mod energetics;
pub mod error;
pub mod formats;
pub mod reference;
pub mod scene;
pub mod sh;

pub use num_complex;

pub use error::{Error, Result};
pub use sh::MAX_ORDER;
