//! Spectral toolkit for the quantum Rabi-Stark model
//!
//! ```text
//! H = ω a†a + σ_z (γ a†a + Δ) + g σ_x (a† + a)
//! ```
//!
//! The discrete spectrum is computed three independent ways and
//! cross-validated:
//!
//! * [`gfunction`] — roots of the spectral determinants G±(x) built from the
//!   three-term recurrence of the effective Rabi model (valid for γ < ω),
//! * [`exact_diag`] — truncated Fock-space diagonalization with parity and
//!   photon-content observables, valid for every parameter value,
//! * [`confluence`] — closed-form analytics at the critical point γ = ω:
//!   continuum thresholds, the bound states embedded in the continuum and the
//!   lower bound states below threshold,
//!
//! plus the [`slow_mode`] effective-potential picture (adiabatic bands, their
//! harmonic spectra, the double-well onset and a finite-difference band
//! solver).

mod band_lu;
pub mod confluence;
pub mod error;
pub mod exact_diag;
pub mod gfunction;
pub mod model;
pub mod slow_mode;
mod tridiag;

pub use confluence::{
    alpha, bic_energies, classify_energy, lambda_value, lbs_energies, thresholds, ConfluenceRoot,
    ConfluenceSpectrum, CriticalParams, EnergyClass, Thresholds,
};
pub use error::{Error, Result};
pub use exact_diag::{
    build_hamiltonian, classify_prebics, converged_spectrum, detect_avoided_crossings, diagonalize,
    sweep, AvoidedCrossing, ConvergenceSettings, EigenSolution, SpectralGraph,
    TruncatedHamiltonian, TruncationPolicy,
};
pub use gfunction::{find_roots, g_value, pole_set, GSeriesSettings, GValue, PoleSet};
pub use model::{ModelParams, Parity, RenormalizedView};
pub use slow_mode::{
    band_asymptote, band_value, double_well_onset, harmonic_band_levels, sample_band,
    solve_band_schrodinger, Band, BandPotential,
};
