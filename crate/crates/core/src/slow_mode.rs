//! Effective-potential picture of the slow radiation mode.
//!
//! Treating the field coordinate q as slow and dropping its momentum yields
//! two adiabatic potential bands (m = 1 convention, so q is dimensionless up
//! to √ω factors):
//!
//! ```text
//! E_{a,b}(q) = (ω²/2) q² − ω/2 ± √[ (Δ − γ/2 + (ωγ/2) q²)² + 2ω g² q² ]
//! ```
//!
//! The upper band a confines for all parameters and its harmonic levels
//! ascend with g; the lower band b supports descending levels, develops a
//! double well above the onset coupling and flattens to the continuum
//! threshold −Δ − 2g²/ω at γ = ω. All energies returned here use the
//! Hamiltonian convention directly comparable with exact diagonalization;
//! the ω/2 zero-point bookkeeping (E′ = E + ω/2 inside the band equations)
//! is handled internally.

use crate::confluence::CriticalParams;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::tridiag::SymTridiag;

/// The two adiabatic bands: `A` adds the square root, `B` subtracts it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    A,
    B,
}

impl Band {
    fn sign(self) -> f64 {
        match self {
            Band::A => 1.0,
            Band::B => -1.0,
        }
    }

    /// The factor 1 ± γ/ω dividing the band Schrödinger equation.
    pub fn mass_divisor(self, params: &ModelParams) -> f64 {
        1.0 + self.sign() * params.gamma / params.omega
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Band::A => write!(f, "a"),
            Band::B => write!(f, "b"),
        }
    }
}

/// E_a(q) or E_b(q); valid for every parameter value including γ = ω.
pub fn band_value(params: &ModelParams, band: Band, q: f64) -> f64 {
    let q2 = q * q;
    let root = ((params.delta - params.gamma / 2.0 + params.omega * params.gamma / 2.0 * q2)
        .powi(2)
        + 2.0 * params.omega * params.g * params.g * q2)
        .sqrt();
    params.omega * params.omega / 2.0 * q2 - params.omega / 2.0 + band.sign() * root
}

/// A sampled band with its effective-mass metadata.
#[derive(Debug, Clone)]
pub struct BandPotential {
    pub band: Band,
    pub q_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// 1 ± γ/ω entering the band Schrödinger equation.
    pub effective_mass_divisor: f64,
}

/// Samples the band on `n_points` uniform points over [−q_half_width, q_half_width].
pub fn sample_band(
    params: &ModelParams,
    band: Band,
    q_half_width: f64,
    n_points: usize,
) -> Result<BandPotential> {
    if q_half_width.is_nan() || q_half_width <= 0.0 || n_points < 2 {
        return Err(Error::Domain(
            "sample_band needs q_half_width > 0 and at least two points".into(),
        ));
    }
    let h = 2.0 * q_half_width / (n_points - 1) as f64;
    let q_grid: Vec<f64> = (0..n_points)
        .map(|i| -q_half_width + i as f64 * h)
        .collect();
    let values = q_grid
        .iter()
        .map(|&q| band_value(params, band, q))
        .collect();
    Ok(BandPotential {
        band,
        q_grid,
        values,
        effective_mass_divisor: band.mass_divisor(params),
    })
}

/// Harmonic-approximation levels of a band, n = 0..count:
///
/// ```text
/// E_n^a = Δ′ + (n+½) ω₊ √(1 + 2g²/(ω₊Δ′)) − ω/2,   ω₊ = ω + γ
/// E_n^b = −Δ′ + (n+½) ω₋ √(1 − 2g²/(ω₋Δ′)) − ω/2,  ω₋ = ω − γ
/// ```
///
/// with Δ′ = Δ − γ/2 > 0 required; band b additionally needs γ < ω and a
/// positive square-root argument (it turns imaginary above the double-well
/// onset).
pub fn harmonic_band_levels(params: &ModelParams, band: Band, count: usize) -> Result<Vec<f64>> {
    let dp = params.delta - params.gamma / 2.0;
    if dp <= 0.0 {
        return Err(Error::Domain(format!(
            "harmonic band levels need delta' = delta - gamma/2 > 0, got {dp}"
        )));
    }
    let (freq, offset) = match band {
        Band::A => {
            let wp = params.omega + params.gamma;
            let arg = 1.0 + 2.0 * params.g * params.g / (wp * dp);
            (wp * arg.sqrt(), dp)
        }
        Band::B => {
            if params.gamma >= params.omega {
                return Err(Error::Domain(
                    "band b has no harmonic regime at or beyond gamma = omega".into(),
                ));
            }
            let wm = params.omega - params.gamma;
            let arg = 1.0 - 2.0 * params.g * params.g / (wm * dp);
            if arg <= 0.0 {
                return Err(Error::Domain(format!(
                    "band b harmonic frequency is imaginary: 1 - 2g²/(ω₋Δ′) = {arg} \
                     (coupling beyond the double-well onset)"
                )));
            }
            (wm * arg.sqrt(), -dp)
        }
    };
    Ok((0..count)
        .map(|n| offset + (n as f64 + 0.5) * freq - params.omega / 2.0)
        .collect())
}

/// The coupling g* = √(ωΔ′(1−γ/ω)/2) where the harmonic term of band b
/// vanishes; beyond it the band develops a double-well structure.
pub fn double_well_onset(params: &ModelParams) -> Result<f64> {
    let dp = params.delta - params.gamma / 2.0;
    if dp <= 0.0 {
        return Err(Error::Domain(format!(
            "double-well onset needs delta' = delta - gamma/2 > 0, got {dp}"
        )));
    }
    if params.gamma > params.omega {
        return Err(Error::Domain(
            "double-well onset is defined for gamma <= omega".into(),
        ));
    }
    Ok((params.omega * dp * (1.0 - params.gamma / params.omega) / 2.0).sqrt())
}

/// Solves the effective band Schrödinger equation on a Dirichlet box by
/// second-order central differences and returns the lowest `k_levels`
/// energies in the Hamiltonian convention.
///
/// The band potential (shifted to E′ = E + ω/2) divided by 1 ± γ/ω forms the
/// potential, the kinetic term is −(1/2m) d²/dq² with m = 1, and the
/// eigenvalue E′/(1 ± γ/ω) is mapped back to E. The box must be wide enough
/// that every requested level lies below the boundary potential.
pub fn solve_band_schrodinger(
    params: &ModelParams,
    band: Band,
    q_half_width: f64,
    n_points: usize,
    k_levels: usize,
) -> Result<Vec<f64>> {
    if band == Band::B && params.gamma >= params.omega {
        return Err(Error::Domain(
            "band b is a scattering problem at gamma >= omega (mass divisor <= 0)".into(),
        ));
    }
    if n_points < 101 || n_points.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "n_points must be odd and >= 101, got {n_points}"
        )));
    }
    if q_half_width.is_nan() || q_half_width <= 0.0 {
        return Err(Error::Domain("q_half_width must be > 0".into()));
    }
    let interior = n_points - 2;
    if k_levels == 0 || k_levels > interior {
        return Err(Error::Domain(format!(
            "k_levels must satisfy 1 <= k <= {interior}, got {k_levels}"
        )));
    }

    let divisor = band.mass_divisor(params);
    let h = 2.0 * q_half_width / (n_points - 1) as f64;
    let potential = |q: f64| (band_value(params, band, q) + params.omega / 2.0) / divisor;

    let kin = 1.0 / (2.0 * h * h); // m = 1
    let diag: Vec<f64> = (1..=interior)
        .map(|i| 2.0 * kin + potential(-q_half_width + i as f64 * h))
        .collect();
    let offdiag = vec![-kin; interior - 1];
    let eigenvalues = SymTridiag::new(diag, offdiag).lowest_eigenvalues(k_levels);

    let boundary = potential(-q_half_width).min(potential(q_half_width));
    let top = eigenvalues[k_levels - 1];
    if top >= boundary {
        return Err(Error::BoundaryTooTight {
            level: k_levels - 1,
            level_value: top * divisor - params.omega / 2.0,
            boundary_value: boundary * divisor - params.omega / 2.0,
        });
    }

    Ok(eigenvalues
        .into_iter()
        .map(|lambda| lambda * divisor - params.omega / 2.0)
        .collect())
}

/// Large-q limit of band b at γ = ω: the continuum threshold −Δ − 2g²/ω.
pub fn band_asymptote(cp: &CriticalParams) -> f64 {
    -cp.delta - 2.0 * cp.g * cp.g / cp.omega
}
