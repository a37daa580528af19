//! Desk-scale simulator for a pair of "phase-sensitive" chaotic light beams
//! and for the entangled biphotons they are sometimes compared against.
//!
//! Two classical beams built from the same random mode amplitudes, with
//! anti-correlated phases and frequencies, are pointwise conjugates of each
//! other: they carry identical intensity traces, and their intensity
//! cross-correlation shows the Hanbury-Brown-Twiss peak at twice the
//! uncorrelated background. Passing the beams through quadratic-phase media
//! reshapes every sample path, yet the curve `g2(tau)` survives whenever the
//! two media carry opposite coefficients - not because the dispersion
//! cancels, but because both beams reshape the same way. The zero-lag
//! correlation deficit grows as `c1 (d1 + d2)^2` for small strengths, and a
//! short chaotic pulse sent through the same media broadens fully on both
//! sides.
//!
//! A frequency-anticorrelated photon pair behaves differently in kind: its
//! coincidence profile is a single coherent sum over modes, the media enter
//! only through `d1 + d2`, and opposite-coefficient media reproduce the
//! dispersion-free profile bit for bit, with no accidental background.
//!
//! The crate is organized along that storyline:
//!
//! - [`field`]: chaotic mode sets, synthesis, the conjugate partner, a
//!   Markov (autoregressive) backend, and deterministic pulses.
//! - [`dispersion`]: quadratic-phase media via a mode path and an
//!   FFT path.
//! - [`correlation`]: `g2` estimators with standard errors, the media
//!   sweep, and the quadratic surface fit.
//! - [`quantum`]: biphoton coincidence profiles and the classical/quantum
//!   comparison.
//! - [`scenario`]: seeded end-to-end runs with CSV/JSON outputs, used by
//!   the `twinbeam` command-line tool.
//!
//! The accompanying book under `book/` walks through the physics chapter by
//! chapter with runnable snippets.
//!
//! ```
//! use twinbeam::field::{conjugate_partner_modes, sample_chaotic_modes, synthesize_field, SpectralEnvelope};
//! use twinbeam::grid::TimeGrid;
//!
//! let env = SpectralEnvelope::gaussian(1.0, 1.0)?;
//! let modes = sample_chaotic_modes(&env, 64, 4.0, 7)?;
//! let grid = TimeGrid::centered(20.0, 0.05)?;
//!
//! let beam1 = synthesize_field(&modes, &grid)?;
//! let beam2 = synthesize_field(&conjugate_partner_modes(&modes), &grid)?;
//!
//! // The two beams only differ in phase: identical intensities.
//! for (a, b) in beam1.intensity().values().iter().zip(beam2.intensity().values()) {
//!     assert!((a - b).abs() < 1e-12);
//! }
//! # Ok::<(), twinbeam::Error>(())
//! ```

pub mod correlation;
pub mod dispersion;
mod error;
pub mod field;
pub mod grid;
pub mod quantum;
pub mod scenario;

pub use error::{Error, Result};
