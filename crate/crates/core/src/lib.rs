//! Near-resonance approximation of the rotating Navier-Stokes equations on an
//! anisotropic 3-torus.
//!
//! The crate works entirely in Fourier coefficient space:
//!
//! * [`lattice`]: torus geometry, adjusted wavevectors, truncation balls.
//! * [`helical`]: Leray projection, Coriolis symbol, helical basis, `e^{τℒ}`.
//! * [`resonance`]: triplet values, bandwidth rules, triad enumeration.
//! * [`field`]: truncated spectral fields and their norms.
//! * [`bilinear`]: the restricted advection form and trilinear pairings.
//! * [`solver`]: integrating-factor RK4 for the full and restricted systems.
//! * [`sublevel`]: the continuous sublevel geometry, quartic roots and
//!   elliptic integrals.
//! * [`counting`]: exact lattice-point counts and lower-bound constructions.
//!
//! With the default `parallel` feature the heavy loops run on rayon; without
//! it everything runs sequentially with the same partitioning and results.

pub mod bilinear;
pub mod counting;
pub mod error;
pub mod field;
pub mod helical;
pub mod lattice;
pub mod par;
pub mod quadrature;
pub mod resonance;
pub mod solver;
pub mod sublevel;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use helical::{CVec3, Sign};
pub use lattice::{ModeTable, TorusGeometry, WaveVector};
pub use resonance::{BandwidthMode, BandwidthSpec, SignTriple};
