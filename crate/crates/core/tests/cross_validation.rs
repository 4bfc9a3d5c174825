//! Cross-validation between the three spectrum routes: G-function roots,
//! exact diagonalization, and the critical-point analytics.

use stark_core::*;

/// Every G root in [−2, 6] matches an exact-diag eigenvalue of the same
/// parity within 1e−7, over a grid of subcritical parameter combinations.
#[test]
fn gfunction_roots_match_exact_diag_on_parameter_grid() {
    let settings = GSeriesSettings::default();
    for gamma in [0.0, 0.2, 0.5] {
        for delta in [0.3, 0.7] {
            for g in [0.2, 0.8] {
                let p = ModelParams::new(1.0, gamma, delta, g).unwrap();
                let sol = diagonalize(&build_hamiltonian(&p, 200).unwrap(), 60).unwrap();
                for parity in Parity::BOTH {
                    let roots = find_roots(&p, parity, -2.0, 6.0, &settings, 64).unwrap();
                    let ed: Vec<f64> = sol
                        .indices_with_parity(parity)
                        .into_iter()
                        .map(|i| sol.energies[i])
                        .collect();
                    assert!(!roots.is_empty());
                    for r in &roots {
                        let nearest = ed
                            .iter()
                            .map(|e| (e - r).abs())
                            .fold(f64::INFINITY, f64::min);
                        assert!(
                            nearest < 1e-7,
                            "root {r} unmatched (gamma={gamma}, delta={delta}, g={g}, {parity}): \
                             nearest eigenvalue {nearest:.2e} away"
                        );
                    }
                }
            }
        }
    }
}

/// Sign changes of G on a fine grid inside one pole-free interval equal the
/// number of roots reported there; the evaluation is continuous between
/// samples.
#[test]
fn g_is_continuous_between_poles() {
    let p = ModelParams::new(1.0, 0.2, 0.7, 0.5).unwrap();
    let settings = GSeriesSettings::default();
    let poles = pole_set(&p, 4).unwrap();
    let (a, b) = (poles.energies[1], poles.energies[2]);
    let margin = 1e-4 * (b - a);
    let mut sign_changes = 0;
    let mut prev: Option<f64> = None;
    for i in 0..=256 {
        let e = (a + margin) + (b - a - 2.0 * margin) * i as f64 / 256.0;
        let s = g_value(&p, Parity::Positive, e, &settings).unwrap().signum;
        if let Some(p0) = prev {
            if p0 * s < 0.0 {
                sign_changes += 1;
            }
        }
        prev = Some(s);
    }
    let roots = find_roots(&p, Parity::Positive, a + margin, b - margin, &settings, 256).unwrap();
    assert_eq!(
        sign_changes,
        roots.len(),
        "sign flips without a bracketed root between poles at {a}..{b}"
    );
    // the G-conjecture bound: at most two roots strictly between poles
    assert!(roots.len() <= 2);
}

/// Near the critical point (γ = 0.999, Δ = 0.05) the exact-diag spectrum
/// reproduces the first-confluence analytics: the ground state follows the
/// lower-bound-state root inside the existence window, and the n = 0 BIC
/// sits on the ascending low-photon level.
#[test]
fn confluence_analytics_match_exact_diag_near_critical_point() {
    let base = ModelParams::new(1.0, 0.999, 0.05, 0.0).unwrap();
    for g in [0.3, 0.5] {
        let cp = CriticalParams::new(1.0, 0.05, g).unwrap();
        let p = base.with_g(g).unwrap();
        let sol = diagonalize(&build_hamiltonian(&p, 1200).unwrap(), 900).unwrap();

        // ground state vs analytic LBS root (1% documented tolerance)
        let lbs = lbs_energies(&cp, 1, 1e-10).unwrap();
        let lbs0 = lbs.roots[0].energy;
        let rel = (sol.energies[0] - lbs0).abs() / lbs0.abs();
        assert!(
            rel < 0.01,
            "ground state {} vs LBS root {lbs0} at g={g}: rel {rel:.4}",
            sol.energies[0]
        );

        // n = 0 BIC vs the ascending low-photon level (1% documented tolerance)
        let bic0 = bic_energies(&cp, 1, 1e-10).unwrap().roots[0].energy;
        let prebic = sol
            .indices_with_parity(Parity::Positive)
            .into_iter()
            .map(|i| (sol.energies[i], sol.photon_content[i]))
            .filter(|(e, _)| (e - bic0).abs() < 0.1)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("a low-photon state near the BIC energy");
        let rel = (prebic.0 - bic0).abs() / bic0.abs().max(1.0);
        assert!(
            rel < 0.01,
            "preBIC {} vs BIC {bic0} at g={g}: rel {rel:.4}",
            prebic.0
        );
    }
}

/// Truncation refinement witness: growing n_trunc 200 → 250 moves none of
/// the lowest 10 energies by more than 1e−10 at moderate coupling, and 200
/// Fock states already converge the lowest 20 levels in this regime.
#[test]
fn truncation_refinement_witness() {
    for g in [0.5, 1.0] {
        let p = ModelParams::new(1.0, 0.2, 0.7, g).unwrap();
        let coarse = diagonalize(&build_hamiltonian(&p, 200).unwrap(), 10).unwrap();
        let fine = diagonalize(&build_hamiltonian(&p, 250).unwrap(), 10).unwrap();
        for (a, b) in coarse.energies.iter().zip(fine.energies.iter()) {
            assert!((a - b).abs() < 1e-10, "g={g}: {a} vs {b}");
        }

        let settings = ConvergenceSettings {
            rel_tol: 1e-9,
            n_start: 200,
            n_cap: 500,
        };
        let sol = converged_spectrum(&p, 20, &settings).unwrap();
        assert!(
            sol.converged,
            "20 levels must converge from n_trunc = 200 at g={g}"
        );
    }
}

/// The avoided crossings between the lowest preBIC and the preContinuum
/// narrow as γ approaches the critical coupling: the first detected gap
/// shrinks monotonically across γ = 0.8, 0.9, 0.95.
#[test]
fn prebic_crossing_gaps_narrow_toward_critical_stark() {
    let mut first_gaps = Vec::new();
    for gamma in [0.8, 0.9, 0.95] {
        let base = ModelParams::new(1.0, gamma, 0.7, 0.0).unwrap();
        let g_grid: Vec<f64> = (0..81).map(|i| 0.1 + 1.3 * i as f64 / 80.0).collect();
        let graph = sweep(
            &base,
            &g_grid,
            40,
            Some(Parity::Positive),
            &TruncationPolicy::Fixed(200),
        )
        .unwrap();
        // crossings whose energy tracks the n = 0 BIC trajectory
        let mut candidates: Vec<(f64, f64)> = graph
            .avoided_crossings
            .iter()
            .filter_map(|ac| {
                let j = graph.g_grid.iter().position(|&g| g >= ac.g_at_min)?;
                let e = graph.levels[ac.level_pair.0][j];
                let cp = CriticalParams::new(1.0, 0.7, ac.g_at_min).unwrap();
                let bic0 = bic_energies(&cp, 1, 1e-10).unwrap().roots[0].energy;
                ((e - bic0).abs() < 0.3).then_some((ac.g_at_min, ac.gap))
            })
            .collect();
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert!(
            !candidates.is_empty(),
            "no preBIC crossings detected at gamma={gamma}"
        );
        first_gaps.push(candidates[0].1);
    }
    assert!(
        first_gaps[0] > first_gaps[1] && first_gaps[1] > first_gaps[2],
        "first preBIC crossing gap must narrow with gamma: {first_gaps:?}"
    );
}

/// Truncation-starved continuum at n_trunc = 200 (γ = 0.9, Δ = 0.7, g = 0.5): the
/// positive-parity window (20, 32) holds exactly the three isolated
/// low-photon preBIC levels — a genuine continuum state there would need
/// photon content ≈ E/(ω−γ) ≥ 200, beyond the truncation — and each sits
/// near an even-n critical-point level; the dense high-photon region lives
/// below.
#[test]
fn prebics_isolated_above_truncated_continuum() {
    let p = ModelParams::new(1.0, 0.9, 0.7, 0.5).unwrap();
    let sol = diagonalize(&build_hamiltonian(&p, 200).unwrap(), 400).unwrap();
    let pos = sol.indices_with_parity(Parity::Positive);

    let isolated: Vec<(f64, f64)> = pos
        .iter()
        .map(|&i| (sol.energies[i], sol.photon_content[i]))
        .filter(|(e, _)| (20.0..32.0).contains(e))
        .collect();
    assert_eq!(
        isolated.len(),
        3,
        "expected three isolated preBICs, got {isolated:?}"
    );
    for (e, photon) in &isolated {
        assert!(*photon < 20.0, "state at {e} has photon content {photon}");
    }

    // classify_prebics picks out exactly those states within the window
    let prebic_ids = classify_prebics(&sol, 20.0);
    let in_window: Vec<usize> = prebic_ids
        .into_iter()
        .filter(|&i| (20.0..32.0).contains(&sol.energies[i]) && sol.parity_expectation[i] > 0.0)
        .collect();
    assert_eq!(in_window.len(), 3);

    // each tracks an even-n critical-point level (growing deviation with n)
    let cp = CriticalParams::new(1.0, 0.7, 0.5).unwrap();
    let bic = bic_energies(&cp, 17, 1e-10).unwrap();
    for (e, _) in &isolated {
        let nearest = bic
            .roots
            .iter()
            .filter(|r| r.n % 2 == 0)
            .map(|r| (r.energy - e).abs() / e.abs())
            .fold(f64::INFINITY, f64::min);
        assert!(
            nearest < 0.06,
            "state at {e} is {nearest:.3} away from the BIC ladder"
        );
    }

    // the dense preContinuum sits below, with photon content near the
    // truncation ceiling
    let max_photon_below: f64 = pos
        .iter()
        .map(|&i| (sol.energies[i], sol.photon_content[i]))
        .filter(|(e, _)| *e < 20.0)
        .map(|(_, ph)| ph)
        .fold(0.0, f64::max);
    assert!(
        max_photon_below > 150.0,
        "dense region missing below E = 20"
    );
}

/// The degenerate-energy identity seen by all three modules: x(E*) is the
/// integer n at g = g_c^(n), the two lowest exact-diag levels collapse onto
/// E*, and both G parities report the root.
#[test]
fn degeneracy_seen_by_all_routes() {
    let base = ModelParams::new(1.0, 0.5, 0.4, 0.0).unwrap();
    let e_star = base.degenerate_energy().unwrap();
    let gc = base.crossing_couplings(1).unwrap()[0];
    let p = base.with_g(gc).unwrap();

    let sol = diagonalize(&build_hamiltonian(&p, 160).unwrap(), 2).unwrap();
    assert!((sol.energies[0] - e_star).abs() < 1e-6);
    assert!((sol.energies[1] - e_star).abs() < 1e-6);

    let settings = GSeriesSettings {
        pole_guard: 1e-9,
        ..GSeriesSettings::default()
    };
    for parity in Parity::BOTH {
        let roots = find_roots(&p, parity, e_star - 1e-2, e_star + 1e-2, &settings, 64).unwrap();
        assert!(
            roots.iter().any(|r| (r - e_star).abs() < 1e-7),
            "{parity}: no root at the crossing energy, got {roots:?}"
        );
    }
}
