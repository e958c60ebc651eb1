//! Exact bound states of a two-dimensional Klein-Gordon particle with equal
//! scalar and vector pseudoharmonic coupling, in a uniform magnetic field
//! threaded by an Aharonov-Bohm flux line.
//!
//! All quantities are in natural units: `ħ = c = M = e = 1`. Energies are
//! measured in `Mc²`, lengths in Compton wavelengths `ħ/(Mc)`, and the
//! magnetic field enters through the dimensionless cyclotron energy
//! `ħω_c/(Mc²)`.
//!
//! Module map:
//! - [`specfun`]: Laguerre polynomials, polynomial Kummer function, log-gamma.
//! - [`model`]: physical parameters and the map to the radial problem `(ν², β², γ²)`.
//! - [`spectra`]: quantization condition, relativistic root solvers and all limiting cases.
//! - [`wavefun`]: normalized radial and planar wave functions.
//! - [`oracle`]: finite-difference eigenvalue check of the radial equation.
//! - [`cli`]: command-line front end and CSV/JSON serialization.

pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod spectra;
pub mod specfun;
pub mod wavefun;

pub use error::{Error, Result};
pub use model::{Branch, PhysicalSystem, QuantumState, SpectralParams};
pub use spectra::{EnergyLevel, LevelKind, Method};
pub use wavefun::RadialWaveFunction;
