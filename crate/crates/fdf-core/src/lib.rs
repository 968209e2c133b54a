//! Pseudospectral solver and verification harness for the generalized
//! finite-depth dispersive equation family
//!
//! ```text
//! du/dt = G_delta(d2u/dx2) + sign * u^k du/dx
//! ```
//!
//! on a periodic box, where `G_delta` is the depth-`delta` singular integral
//! operator with Fourier symbol `-i (coth(2 pi delta xi) - 1/(2 pi delta xi))`,
//! together with its deep-water (Hilbert transform) and shallow-water (Airy)
//! limits.
//!
//! The crate is organized around six concerns:
//!
//! * [`spectral`] — periodic grids, FFT-based transforms, dealiased products;
//! * [`dispersion`] — dispersion relations, resonance functions, and their
//!   empirical growth-rate verifiers;
//! * [`dynamics`] — exact linear propagation and exponential time stepping;
//! * [`observables`] — conserved quantities and Sobolev norms;
//! * [`experiments`] — deep-water limit studies, symmetry checks, and a
//!   frequency-window ill-posedness probe;
//! * [`config`] / [`snapshot`] / [`diagnostics`] — run configuration and I/O.

pub mod config;
pub mod diagnostics;
pub mod dispersion;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod init;
pub mod observables;
pub mod snapshot;
pub mod spectral;

pub use error::FdfError;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, FdfError>;
