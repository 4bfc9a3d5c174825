//! Closed-form spectral analytics at the critical Stark coupling γ = ω.
//!
//! At the critical point the eigenvalue problem reduces to an sl₂ operator
//! with coefficient α(E) = 1 + ω(E+Δ)/g² and eigenvalue
//! Λ(E) = (E²−Δ²)/(2g²) + (ω/2g²)(E+Δ). |α| > 1 supports discrete
//! normalizable states, |α| < 1 a continuum:
//!
//! * α > 1 ⇔ E > −Δ — the bound states embedded in the continuum (BICs),
//!   roots of √(α²−1)(n+½) = Λ;
//! * α < −1 ⇔ E < −Δ − 2g²/ω — the lower bound states (LBS), roots of
//!   √(α²−1)(n+½) = −Λ, which exist only when ω(ω/2 − Δ) > g²;
//! * the full continuum extends upward from E_thr = −Δ − 2g²/ω.

use crate::error::{Error, Result};

/// Parameter set at the critical point; the Stark coupling is pinned to ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalParams {
    pub omega: f64,
    pub delta: f64,
    pub g: f64,
}

impl CriticalParams {
    pub fn new(omega: f64, delta: f64, g: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Domain(format!(
                "omega must be finite and > 0, got {omega}"
            )));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::Domain(format!(
                "delta must be finite and >= 0, got {delta}"
            )));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Domain(format!("g must be finite and >= 0, got {g}")));
        }
        Ok(Self { omega, delta, g })
    }

    fn require_coupling(&self, op: &str) -> Result<()> {
        if self.g > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{op} is undefined at g = 0; the confluence presumes coupling \
                 (use the baseline ladders for the decoupled limit)"
            )))
        }
    }
}

/// α(E) = 1 + ω(E+Δ)/g². Requires g > 0.
pub fn alpha(cp: &CriticalParams, energy: f64) -> Result<f64> {
    cp.require_coupling("alpha")?;
    Ok(1.0 + cp.omega * (energy + cp.delta) / (cp.g * cp.g))
}

/// Λ(E) = (E²−Δ²)/(2g²) + (ω/2g²)(E+Δ). Requires g > 0.
pub fn lambda_value(cp: &CriticalParams, energy: f64) -> Result<f64> {
    cp.require_coupling("lambda_value")?;
    let g2 = cp.g * cp.g;
    Ok((energy * energy - cp.delta * cp.delta) / (2.0 * g2)
        + cp.omega * (energy + cp.delta) / (2.0 * g2))
}

/// Classification of an energy against the α partition of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyClass {
    /// α > 1 (E > −Δ): discrete spectrum, the BIC region.
    DiscreteUpper,
    /// |α| < 1: the small continuum −Δ − 2g²/ω < E < −Δ.
    SmallContinuum,
    /// α < −1 with E above Δ − ω: the window where lower bound states
    /// may exist (their existence needs ω(ω/2 − Δ) > g² on top).
    DiscreteLowerWindow,
    /// α < −1 with E at or below Δ − ω: no discrete state possible.
    BelowThreshold,
    /// |α − 1| ≤ tol (E ≈ −Δ): degenerate exponents.
    BoundaryAlphaPlusOne,
    /// |α + 1| ≤ tol (E ≈ −Δ − 2g²/ω): degenerate exponents.
    BoundaryAlphaMinusOne,
}

/// Tags `energy` by the α-range it falls in; boundary tags apply when α is
/// within `tol` of ±1.
pub fn classify_energy(cp: &CriticalParams, energy: f64, tol: f64) -> Result<EnergyClass> {
    let a = alpha(cp, energy)?;
    Ok(if (a - 1.0).abs() <= tol {
        EnergyClass::BoundaryAlphaPlusOne
    } else if (a + 1.0).abs() <= tol {
        EnergyClass::BoundaryAlphaMinusOne
    } else if a > 1.0 {
        EnergyClass::DiscreteUpper
    } else if a > -1.0 {
        EnergyClass::SmallContinuum
    } else if energy > cp.delta - cp.omega {
        EnergyClass::DiscreteLowerWindow
    } else {
        EnergyClass::BelowThreshold
    })
}

/// The three marker energies of the critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Continuum threshold E_thr = −Δ − 2g²/ω (α = −1).
    pub e_thr: f64,
    /// First pole of the G-function, E_c = −(Δ + g²/ω); the continuum bound
    /// suggested by the pole structure alone.
    pub e_c: f64,
    /// Upper edge −Δ of the small continuum (α = +1).
    pub small_continuum_upper: f64,
}

/// E_thr < E_c < −Δ for any g > 0; all three collapse to −Δ at g = 0.
pub fn thresholds(cp: &CriticalParams) -> Thresholds {
    let g2w = cp.g * cp.g / cp.omega;
    Thresholds {
        e_thr: -cp.delta - 2.0 * g2w,
        e_c: -(cp.delta + g2w),
        small_continuum_upper: -cp.delta,
    }
}

/// One root of a confluence eigenvalue equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfluenceRoot {
    /// Oscillator quantum number n of the defining equation.
    pub n: usize,
    pub energy: f64,
    /// |√(α²−1)(n+½) ∓ Λ| at the returned energy.
    pub residual: f64,
}

/// Roots found per quantum number, sorted by energy, plus the n values for
/// which no root was found in the bracket.
#[derive(Debug, Clone, Default)]
pub struct ConfluenceSpectrum {
    pub roots: Vec<ConfluenceRoot>,
    pub missing: Vec<usize>,
}

impl ConfluenceSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.energy).collect()
    }

    /// Energies of the roots with the given quantum number (normally one).
    pub fn energies_for(&self, n: usize) -> Vec<f64> {
        self.roots
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.energy)
            .collect()
    }
}

const SCAN_POINTS: usize = 512;

/// BIC energies: roots of √(α(E)²−1)(n+½) = Λ(E) on (max(−Δ, Δ−ω), ∞) for
/// n = 0..n_count. All sign-change roots are returned (the defining equation
/// is not known to be single-rooted); every returned energy satisfies
/// α(E) > 1 and a residual below `solver_tol`.
pub fn bic_energies(
    cp: &CriticalParams,
    n_count: usize,
    solver_tol: f64,
) -> Result<ConfluenceSpectrum> {
    cp.require_coupling("bic_energies")?;
    let e_floor = (-cp.delta).max(cp.delta - cp.omega);
    let u_floor = alpha(cp, e_floor)?; // >= 1
    let scale = cp.g * cp.g / cp.omega; // dE/du

    let mut spectrum = ConfluenceSpectrum::default();
    for n in 0..n_count {
        let half = n as f64 + 0.5;
        let f = |u: f64| -> f64 {
            let e = e_floor + (u - u_floor) * scale;
            (u * u - 1.0).max(0.0).sqrt() * half - lambda_raw(cp, e)
        };
        // push the window upward until f is decisively negative
        let mut span = (2.0 * n as f64 + 4.0) * (cp.omega + cp.delta + cp.g + 1.0) / scale;
        let mut tries = 0;
        while f(u_floor + span) >= 0.0 && tries < 60 {
            span *= 2.0;
            tries += 1;
        }
        let u_hi = u_floor + 2.0 * span;
        let roots = scan_roots(&f, u_floor + 1e-12 * u_floor.abs().max(1.0), u_hi);
        record(
            cp,
            &mut spectrum,
            n,
            roots,
            e_floor,
            u_floor,
            scale,
            solver_tol,
            false,
        );
    }
    spectrum
        .roots
        .sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(spectrum)
}

/// Lower-bound-state energies: roots of √(α(E)²−1)(n+½) = −Λ(E) on
/// (Δ−ω, −Δ−2g²/ω) for n = 0..n_count. Empty whenever ω(ω/2 − Δ) ≤ g²
/// (the window closes and no lower discrete spectrum exists).
pub fn lbs_energies(
    cp: &CriticalParams,
    n_count: usize,
    solver_tol: f64,
) -> Result<ConfluenceSpectrum> {
    cp.require_coupling("lbs_energies")?;
    let mut spectrum = ConfluenceSpectrum::default();
    if cp.omega * (cp.omega / 2.0 - cp.delta) <= cp.g * cp.g {
        spectrum.missing = (0..n_count).collect();
        return Ok(spectrum);
    }
    let e_floor = cp.delta - cp.omega;
    let u_floor = alpha(cp, e_floor)?; // < -1 inside the existence window
    let scale = cp.g * cp.g / cp.omega;
    let u_ceiling = -1.0; // E = E_thr

    for n in 0..n_count {
        let half = n as f64 + 0.5;
        let f = |u: f64| -> f64 {
            let e = e_floor + (u - u_floor) * scale;
            (u * u - 1.0).max(0.0).sqrt() * half + lambda_raw(cp, e)
        };
        let margin = 1e-12 * u_floor.abs().max(1.0);
        let roots = scan_roots(&f, u_floor + margin, u_ceiling - margin);
        record(
            cp,
            &mut spectrum,
            n,
            roots,
            e_floor,
            u_floor,
            scale,
            solver_tol,
            true,
        );
    }
    spectrum
        .roots
        .sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(spectrum)
}

fn lambda_raw(cp: &CriticalParams, energy: f64) -> f64 {
    let g2 = cp.g * cp.g;
    (energy * energy - cp.delta * cp.delta) / (2.0 * g2)
        + cp.omega * (energy + cp.delta) / (2.0 * g2)
}

/// All sign-change roots of `f` on [lo, hi], located on a uniform scan and
/// refined by bisection to machine width.
fn scan_roots(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if hi <= lo {
        return out;
    }
    let mut prev_u = lo;
    let mut prev_f = f(lo);
    for i in 1..=SCAN_POINTS {
        let u = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
        let fu = f(u);
        if prev_f == 0.0 {
            out.push(prev_u);
        } else if prev_f * fu < 0.0 {
            let (mut a, mut b) = (prev_u, u);
            let mut fa = prev_f;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if (b - a).abs() <= 4.0 * f64::EPSILON * m.abs().max(f64::MIN_POSITIVE) {
                    break;
                }
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev_u = u;
        prev_f = fu;
    }
    if prev_f == 0.0 {
        out.push(prev_u);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn record(
    cp: &CriticalParams,
    spectrum: &mut ConfluenceSpectrum,
    n: usize,
    u_roots: Vec<f64>,
    e_floor: f64,
    u_floor: f64,
    scale: f64,
    solver_tol: f64,
    lbs: bool,
) {
    let mut found = false;
    let half = n as f64 + 0.5;
    for u in u_roots {
        let e = e_floor + (u - u_floor) * scale;
        let lam = lambda_raw(cp, e);
        let root_term = (u * u - 1.0).max(0.0).sqrt() * half;
        let residual = if lbs {
            (root_term + lam).abs()
        } else {
            (root_term - lam).abs()
        };
        if residual <= solver_tol {
            spectrum.roots.push(ConfluenceRoot {
                n,
                energy: e,
                residual,
            });
            found = true;
        }
    }
    if !found {
        spectrum.missing.push(n);
    }
}
