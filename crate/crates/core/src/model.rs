//! Model parameters of the quantum Rabi-Stark Hamiltonian
//!
//! ```text
//! H = ω a†a + σ_z (γ a†a + Δ) + g σ_x (a† + a)
//! ```
//!
//! together with the exact g = 0 ladders, the closed-form crossing couplings
//! and the scale transformation onto an effective quantum Rabi model with
//! renormalized parameters. Energies are reported in units of ω unless the
//! caller sets ω ≠ 1 explicitly; ℏ = 1 throughout.

use crate::error::{Error, Result};

/// Physical parameters (ω, γ, Δ, g) of the Rabi-Stark Hamiltonian.
///
/// γ = ω and γ > ω are representable (the operator stays self-adjoint there);
/// operations restricted to the subcritical regime γ < ω enforce that bound
/// themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Mode frequency ω > 0.
    pub omega: f64,
    /// Stark coupling γ ≥ 0.
    pub gamma: f64,
    /// Qubit splitting Δ ≥ 0.
    pub delta: f64,
    /// Rabi coupling g ≥ 0.
    pub g: f64,
}

impl ModelParams {
    pub fn new(omega: f64, gamma: f64, delta: f64, g: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Domain(format!(
                "omega must be finite and > 0, got {omega}"
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::Domain(format!(
                "gamma must be finite and >= 0, got {gamma}"
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
        Ok(Self {
            omega,
            gamma,
            delta,
            g,
        })
    }

    /// Same parameter set with a different Rabi coupling; used by sweeps.
    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega, self.gamma, self.delta, g)
    }

    /// True in the subcritical regime γ < ω where the scale transformation
    /// onto the effective Rabi model is regular.
    pub fn is_subcritical(&self) -> bool {
        self.gamma < self.omega
    }

    fn require_subcritical(&self, op: &str) -> Result<()> {
        if self.is_subcritical() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{op} requires gamma < omega (the scale transformation is singular at \
                 gamma = omega); got gamma = {}, omega = {}",
                self.gamma, self.omega
            )))
        }
    }

    /// Scale transformation to the effective quantum Rabi model.
    ///
    /// Fails for γ ≥ ω where the transformation is singular.
    pub fn renormalize(&self) -> Result<RenormalizedView> {
        self.require_subcritical("renormalize")?;
        let denom = self.omega * self.omega - self.gamma * self.gamma;
        Ok(RenormalizedView {
            eta: (self.omega + self.gamma) / (self.omega - self.gamma),
            g_tilde: self.g / denom.sqrt(),
            epsilon: denom.sqrt(),
            omega: self.omega,
            gamma: self.gamma,
            delta: self.delta,
            g: self.g,
        })
    }

    /// The two exact g = 0 energy ladders, lowest `count` rungs each:
    /// upper (ω+γ)n + Δ and lower (ω−γ)n − Δ for n = 0..count.
    ///
    /// Entries are indexed by photon number n, which is ascending order for
    /// γ ≤ ω. At γ = ω the lower ladder is the massively degenerate level
    /// E = −Δ (and it descends with n for γ > ω, where the model has no
    /// ground state); at γ = 0 the two merge into the quantum Rabi model
    /// spectrum {nω ± Δ}.
    pub fn baseline_ladders(&self, count: usize) -> (Vec<f64>, Vec<f64>) {
        let upper = (0..count)
            .map(|n| (self.omega + self.gamma) * n as f64 + self.delta)
            .collect();
        let lower = (0..count)
            .map(|n| (self.omega - self.gamma) * n as f64 - self.delta)
            .collect();
        (upper, lower)
    }

    /// Couplings g_c^(n) = √(n + Δ/γ) · √(ω² − γ²) at which the additional
    /// level crossings occur, for n = 0..count (strictly increasing).
    ///
    /// Requires 0 < γ < ω: all g_c^(n) → ∞ as γ → 0, and the square root
    /// turns imaginary for γ > ω.
    pub fn crossing_couplings(&self, count: usize) -> Result<Vec<f64>> {
        if self.gamma <= 0.0 {
            return Err(Error::Domain(
                "crossing couplings diverge as gamma -> 0; require gamma > 0".into(),
            ));
        }
        self.require_subcritical("crossing_couplings")?;
        let scale = self.omega * self.omega - self.gamma * self.gamma;
        Ok((0..count)
            .map(|n| ((n as f64 + self.delta / self.gamma) * scale).sqrt())
            .collect())
    }

    /// The g-independent energy E = −ωΔ/γ of the special crossing array,
    /// where G₊ and G₋ coincide. Requires γ > 0.
    pub fn degenerate_energy(&self) -> Result<f64> {
        if self.gamma <= 0.0 {
            return Err(Error::Domain(
                "the degenerate crossing energy -omega*delta/gamma requires gamma > 0".into(),
            ));
        }
        Ok(-self.omega * self.delta / self.gamma)
    }
}

/// Derived quantities of the effective quantum Rabi model obtained from the
/// scale transformation; valid for γ < ω only.
///
/// η = (ω+γ)/(ω−γ), g̃ = g/√(ω²−γ²), and the energy-dependent maps
/// Ẽ(E) = (ωE + γΔ)/(ω²−γ²), Δ̃(E) = (ωΔ + γE)/(ω²−γ²) and the spectral
/// parameter x(E) = Ẽ(E) + g̃². All of these diverge monotonically as γ → ω⁻.
#[derive(Debug, Clone, Copy)]
pub struct RenormalizedView {
    /// Scale factor η ≥ 1 (η = 1 exactly at γ = 0).
    pub eta: f64,
    /// Renormalized coupling g̃ = g/√(ω²−γ²).
    pub g_tilde: f64,
    /// Gap scale √(ω²−γ²) of the subcritical regime.
    pub epsilon: f64,
    omega: f64,
    gamma: f64,
    delta: f64,
    g: f64,
}

impl RenormalizedView {
    fn denom(&self) -> f64 {
        self.omega * self.omega - self.gamma * self.gamma
    }

    /// Renormalized energy Ẽ(E) = (ωE + γΔ)/(ω²−γ²).
    pub fn e_tilde(&self, energy: f64) -> f64 {
        (self.omega * energy + self.gamma * self.delta) / self.denom()
    }

    /// Renormalized splitting Δ̃(E) = (ωΔ + γE)/(ω²−γ²).
    pub fn delta_tilde(&self, energy: f64) -> f64 {
        (self.omega * self.delta + self.gamma * energy) / self.denom()
    }

    /// Spectral parameter x(E) = Ẽ(E) + g̃² = (ωE + γΔ + g²)/(ω²−γ²).
    pub fn x(&self, energy: f64) -> f64 {
        (self.omega * energy + self.gamma * self.delta + self.g * self.g) / self.denom()
    }

    /// Inverse of [`RenormalizedView::x`]: the energy with spectral parameter x.
    pub fn energy_of_x(&self, x: f64) -> f64 {
        (x * self.denom() - self.gamma * self.delta - self.g * self.g) / self.omega
    }
}

/// Z₂ parity sector of the model, the eigenvalue of P = (−1)^{a†a} σ_z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Positive,
    Negative,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Positive, Parity::Negative];

    pub fn sign(self) -> f64 {
        match self {
            Parity::Positive => 1.0,
            Parity::Negative => -1.0,
        }
    }

    /// Parity of the basis state |n, σ⟩: (−1)^n σ.
    pub fn of_state(n: usize, spin_up: bool) -> Parity {
        let sign = if n.is_multiple_of(2) { 1 } else { -1 } * if spin_up { 1 } else { -1 };
        if sign > 0 {
            Parity::Positive
        } else {
            Parity::Negative
        }
    }

    pub fn from_sign(sign: f64) -> Parity {
        if sign >= 0.0 {
            Parity::Positive
        } else {
            Parity::Negative
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Positive => write!(f, "+1"),
            Parity::Negative => write!(f, "-1"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega: f64, gamma: f64, delta: f64, g: f64) -> ModelParams {
        ModelParams::new(omega, gamma, delta, g).unwrap()
    }

    #[test]
    fn renormalize_gamma_zero_identity() {
        let rv = params(1.0, 0.0, 0.7, 0.5).renormalize().unwrap();
        assert_eq!(rv.eta, 1.0);
        assert_eq!(rv.g_tilde, 0.5);
        // x(E) = E + 0.25 at gamma = 0
        assert!((rv.x(1.3) - 1.55).abs() < 1e-15);
        assert!((rv.x(0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn renormalize_direct_arithmetic() {
        let rv = params(1.0, 0.6, 0.0, 0.0).renormalize().unwrap();
        assert!((rv.eta - 4.0).abs() < 1e-15);
        assert_eq!(rv.g_tilde, 0.0);
        // x(E) = E / 0.64
        assert!((rv.x(1.0) - 1.0 / 0.64).abs() < 1e-15);
    }

    #[test]
    fn renormalize_hand_evaluated_x() {
        // x(0) = (0 + 0.9*0.7 + 0.09) / (1 - 0.81) = 0.72 / 0.19
        let rv = params(1.0, 0.9, 0.7, 0.3).renormalize().unwrap();
        let expected = 0.72 / 0.19;
        assert!((rv.x(0.0) - expected).abs() < 1e-12 * expected);
        assert!((expected - 3.789_473_684_210_526).abs() < 1e-12);
    }

    #[test]
    fn renormalize_rejects_critical_and_beyond() {
        assert!(params(1.0, 1.0, 0.7, 0.5).renormalize().is_err());
        assert!(params(1.0, 1.5, 0.7, 0.5).renormalize().is_err());
    }

    #[test]
    fn x_identity_e_tilde_plus_g_tilde_squared() {
        for &(omega, gamma, delta, g) in &[
            (1.0, 0.0, 0.7, 0.5),
            (1.0, 0.2, 0.7, 1.2),
            (1.0, 0.9, 0.05, 0.3),
            (2.5, 1.7, 0.4, 0.9),
        ] {
            let rv = params(omega, gamma, delta, g).renormalize().unwrap();
            for e in [-3.0, -0.55, 0.0, 1.7, 12.0] {
                let lhs = rv.x(e) - rv.e_tilde(e);
                let rhs = rv.g_tilde * rv.g_tilde;
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0),
                    "x - e_tilde != g_tilde^2 at ({omega},{gamma},{delta},{g}), E={e}"
                );
            }
        }
    }

    #[test]
    fn renormalized_quantities_diverge_monotonically_toward_critical_stark() {
        let mut prev: Option<(f64, f64, f64, f64)> = None;
        for gamma in [0.5, 0.9, 0.99, 0.999] {
            let rv = params(1.0, gamma, 0.7, 0.4).renormalize().unwrap();
            let cur = (
                rv.eta,
                rv.g_tilde,
                rv.e_tilde(1.3).abs(),
                rv.delta_tilde(1.3).abs(),
            );
            if let Some(p) = prev {
                assert!(cur.0 > p.0 && cur.1 > p.1 && cur.2 > p.2 && cur.3 > p.3);
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn energy_of_x_inverts_x() {
        let rv = params(1.0, 0.45, 0.7, 0.8).renormalize().unwrap();
        for e in [-2.0, -0.1, 0.6, 4.2] {
            assert!((rv.energy_of_x(rv.x(e)) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn ladders_first_two_rungs() {
        let (upper, lower) = params(1.0, 0.2, 0.7, 0.0).baseline_ladders(2);
        assert_eq!(upper, vec![0.7, 1.9]);
        assert!((lower[0] + 0.7).abs() < 1e-15);
        assert!((lower[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn ladders_degenerate_at_critical_stark() {
        let (_, lower) = params(1.0, 1.0, 0.3, 0.0).baseline_ladders(6);
        for e in lower {
            assert!(
                (e + 0.3).abs() < 1e-15,
                "lower ladder must collapse to -delta"
            );
        }
    }

    #[test]
    fn ladders_merge_to_free_oscillator() {
        let (upper, lower) = params(1.0, 0.0, 0.0, 0.0).baseline_ladders(4);
        assert_eq!(upper, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(lower, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn crossing_couplings_hand_value() {
        let gc = params(1.0, 0.2, 0.7, 0.0).crossing_couplings(1).unwrap();
        // sqrt(3.5 * 0.96); cross-checked by locating the G+ = G- degeneracy
        // in the gfunction tests.
        assert!((gc[0] - 3.36_f64.sqrt()).abs() < 1e-14);
        assert!((gc[0] - 1.833_030_277_982_336).abs() < 1e-12);
    }

    #[test]
    fn crossing_couplings_zero_delta_and_empty() {
        let gc = params(1.0, 0.5, 0.0, 0.0).crossing_couplings(1).unwrap();
        assert_eq!(gc[0], 0.0);
        let empty = params(1.0, 0.5, 0.3, 0.0).crossing_couplings(0).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn crossing_couplings_strictly_increasing() {
        let gc = params(1.0, 0.37, 0.61, 0.0).crossing_couplings(12).unwrap();
        for w in gc.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn crossing_couplings_rejects_gamma_zero() {
        assert!(params(1.0, 0.0, 0.7, 0.0).crossing_couplings(3).is_err());
    }

    #[test]
    fn crossing_energy_sits_on_integer_spectral_parameter() {
        // Evaluating x at E = -omega*delta/gamma with g = g_c^(n) yields exactly n.
        for &(omega, gamma, delta) in &[(1.0, 0.2, 0.7), (1.0, 0.9, 0.05), (2.0, 1.1, 0.4)] {
            let base = params(omega, gamma, delta, 0.0);
            let e_star = base.degenerate_energy().unwrap();
            for (n, gc) in base.crossing_couplings(8).unwrap().into_iter().enumerate() {
                let rv = base.with_g(gc).unwrap().renormalize().unwrap();
                let x = rv.x(e_star);
                assert!(
                    (x - n as f64).abs() <= 1e-12 * (n as f64).max(1.0),
                    "x(E*) = {x}, expected {n}"
                );
            }
        }
    }

    #[test]
    fn degenerate_energy_values() {
        assert!((params(1.0, 0.7, 0.7, 0.0).degenerate_energy().unwrap() + 1.0).abs() < 1e-15);
        // gamma -> omega limit gives -delta
        assert!((params(1.0, 1.0, 0.7, 0.0).degenerate_energy().unwrap() + 0.7).abs() < 1e-15);
        assert_eq!(params(1.0, 0.4, 0.0, 0.0).degenerate_energy().unwrap(), 0.0);
        assert!(params(1.0, 0.0, 0.7, 0.0).degenerate_energy().is_err());
    }

    #[test]
    fn parity_of_states() {
        assert_eq!(Parity::of_state(0, true), Parity::Positive);
        assert_eq!(Parity::of_state(0, false), Parity::Negative);
        assert_eq!(Parity::of_state(1, false), Parity::Positive);
        assert_eq!(Parity::of_state(3, true), Parity::Negative);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(0.0, 0.0, 0.1, 0.1).is_err());
        assert!(ModelParams::new(1.0, -0.1, 0.1, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.1, -0.1, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.1, -0.1).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 0.1, 0.1).is_err());
    }
}
