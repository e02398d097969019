//! Wave mixing of a bichromatic drive on a two-level system coupled to a
//! one-dimensional waveguide.
//!
//! The crate carries two descriptions of the same side-peak spectrum:
//!
//! * [`semiclassical`]: closed-form quasi-stationary coherence of a TLS
//!   driven by two classical tones, checked against direct integration of the
//!   optical Bloch equations in [`bloch`].
//! * [`smatrix`], [`diagrams`], [`multiphoton`] and [`coherent`]: the
//!   few-photon scattering matrix, the semion loop diagrams behind the
//!   connected multiphoton T matrix, the combinatorics of disconnected
//!   diagrams and the coherent-state side-peak amplitudes built from them.
//!
//! Units are ħ = 1 throughout. Frequencies are reported in units of Γ when a
//! configuration has been rescaled with [`params::SystemParams::rescaled`].

pub mod bloch;
pub mod coherent;
pub mod diagrams;
pub mod error;
pub mod multiphoton;
pub mod params;
pub mod semiclassical;
pub mod smatrix;
pub mod verify;

pub use error::{Error, Result};
pub use params::{DriveConfig, PeakRecord, PeakSpectrum, RawConfig, Side, SystemParams};
