//! Mode runners: each produces the primary row table, runtime metadata for
//! the sidecar, and (for crosscheck) the discrepancy table.

use std::time::Instant;

use stark_core::{
    band_asymptote, bic_energies, build_hamiltonian, converged_spectrum, diagonalize,
    double_well_onset, find_roots, harmonic_band_levels, lbs_energies, pole_set,
    solve_band_schrodinger, sweep, thresholds, Band, CriticalParams, EigenSolution, Error,
    ModelParams, Parity, TruncationPolicy,
};

use crate::config::{ConfigError, Mode, ParityChoice, RunConfig};
use crate::output::{write_discrepancies, write_rows, write_sidecar, Discrepancy, Row};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(Error),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Numerical(e) => write!(f, "numerical error: {e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Executes the configured run and writes all artifact files.
pub fn run(config: &RunConfig) -> Result<(), RunError> {
    let start = Instant::now();
    let (rows, runtime) = match config.mode {
        Mode::Sweep => run_sweep(config)?,
        Mode::Gfunction => run_gfunction(config)?,
        Mode::Confluence => run_confluence(config)?,
        Mode::Slowmode => run_slowmode(config)?,
        Mode::Crosscheck => run_crosscheck(config)?,
    };
    write_rows(&config.out_path, config.format, &rows)?;
    write_sidecar(config, runtime, start.elapsed().as_millis())?;
    eprintln!(
        "wrote {} rows to {} (metadata: {})",
        rows.len(),
        config.out_path.display(),
        crate::output::sidecar_path(&config.out_path).display()
    );
    Ok(())
}

fn parity_tag(p: f64) -> Option<i8> {
    Some(if p >= 0.0 { 1 } else { -1 })
}

fn solution_rows(g: f64, sol: &EigenSolution, source: &'static str, rows: &mut Vec<Row>) {
    for k in 0..sol.len() {
        rows.push(Row {
            g,
            level_index: k,
            energy: sol.energies[k],
            parity: parity_tag(sol.parity_expectation[k]),
            photon_content: Some(sol.photon_content[k]),
            source,
        });
    }
}

fn run_sweep(config: &RunConfig) -> Result<(Vec<Row>, serde_json::Value), RunError> {
    let parity_filter = match config.parity {
        ParityChoice::Both => None,
        ParityChoice::One(p) => Some(p),
    };
    let graph = sweep(
        &config.params,
        &config.g_grid,
        config.k_levels,
        parity_filter,
        &config.truncation,
    )?;
    let mut rows = Vec::new();
    for (j, &g) in graph.g_grid.iter().enumerate() {
        for k in 0..graph.k_levels() {
            let e = graph.levels[k][j];
            if e.is_nan() {
                continue;
            }
            rows.push(Row {
                g,
                level_index: k,
                energy: e,
                parity: parity_tag(graph.parities[k][j]),
                photon_content: Some(graph.photon[k][j]),
                source: "exact-diag",
            });
        }
    }
    let crossings: Vec<serde_json::Value> = graph
        .avoided_crossings
        .iter()
        .map(|ac| {
            serde_json::json!({
                "g_at_min": ac.g_at_min,
                "gap": ac.gap,
                "level_pair": [ac.level_pair.0, ac.level_pair.1],
            })
        })
        .collect();
    // level indices whose photon content stays below the threshold: the
    // preBIC candidates of each column
    let prebics: Vec<Vec<usize>> = (0..graph.g_grid.len())
        .map(|j| {
            (0..graph.k_levels())
                .filter(|&k| graph.photon[k][j] < config.photon_threshold)
                .collect()
        })
        .collect();
    let runtime = serde_json::json!({
        "n_trunc_used": graph.n_trunc_used,
        "columns_converged": graph.column_converged,
        "avoided_crossings": crossings,
        "prebic_levels_below_photon_threshold": prebics,
    });
    Ok((rows, runtime))
}

fn run_gfunction(config: &RunConfig) -> Result<(Vec<Row>, serde_json::Value), RunError> {
    let parities: &[Parity] = match config.parity {
        ParityChoice::Both => &Parity::BOTH,
        ParityChoice::One(Parity::Positive) => &[Parity::Positive],
        ParityChoice::One(Parity::Negative) => &[Parity::Negative],
    };
    let mut rows = Vec::new();
    for &g in &config.g_grid {
        let params = config.params.with_g(g)?;
        for &parity in parities {
            let roots = find_roots(
                &params,
                parity,
                config.e_lo,
                config.e_hi,
                &config.gseries,
                config.scan_points,
            )?;
            for (k, root) in roots.into_iter().enumerate() {
                rows.push(Row {
                    g,
                    level_index: k,
                    energy: root,
                    parity: Some(if parity == Parity::Positive { 1 } else { -1 }),
                    photon_content: None,
                    source: "gfunction",
                });
            }
        }
    }
    let poles = pole_set(&config.params, 8)?;
    let runtime = serde_json::json!({
        "pole_spacing": poles.spacing,
        "first_pole": poles.energies.first(),
        "series": {
            "n_terms_max": config.gseries.n_terms_max,
            "tail_tolerance": config.gseries.tail_tolerance,
            "pole_guard": config.gseries.pole_guard,
        },
    });
    Ok((rows, runtime))
}

fn run_confluence(config: &RunConfig) -> Result<(Vec<Row>, serde_json::Value), RunError> {
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for &g in &config.g_grid {
        if g <= 0.0 {
            continue; // the confluence analytics presume coupling
        }
        let cp = CriticalParams::new(config.params.omega, config.params.delta, g)?;
        let bic = bic_energies(&cp, config.confluence_n_max, config.solver_tol)?;
        for root in &bic.roots {
            rows.push(Row {
                g,
                level_index: root.n,
                energy: root.energy,
                parity: Some(if root.n % 2 == 0 { 1 } else { -1 }),
                photon_content: None,
                source: "bic",
            });
        }
        let lbs = lbs_energies(&cp, config.confluence_n_max, config.solver_tol)?;
        for root in &lbs.roots {
            rows.push(Row {
                g,
                level_index: root.n,
                energy: root.energy,
                parity: None,
                photon_content: None,
                source: "lbs",
            });
        }
        let t = thresholds(&cp);
        for (idx, e) in [t.e_thr, t.e_c, t.small_continuum_upper]
            .into_iter()
            .enumerate()
        {
            rows.push(Row {
                g,
                level_index: idx,
                energy: e,
                parity: None,
                photon_content: None,
                source: "threshold",
            });
        }
        missing.push(serde_json::json!({
            "g": g,
            "bic_missing": bic.missing,
            "lbs_missing": lbs.missing,
        }));
    }
    Ok((rows, serde_json::json!({ "missing_roots": missing })))
}

fn run_slowmode(config: &RunConfig) -> Result<(Vec<Row>, serde_json::Value), RunError> {
    let bands: &[Band] = match config.band {
        None => &[Band::A, Band::B],
        Some(Band::A) => &[Band::A],
        Some(Band::B) => &[Band::B],
    };
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &g in &config.g_grid {
        let params = config.params.with_g(g)?;
        for &band in bands {
            let (harm_src, fd_src): (&'static str, &'static str) = match band {
                Band::A => ("band-a-harmonic", "band-a-fd"),
                Band::B => ("band-b-harmonic", "band-b-fd"),
            };
            match harmonic_band_levels(&params, band, config.harmonic_count) {
                Ok(levels) => {
                    for (n, e) in levels.into_iter().enumerate() {
                        rows.push(Row {
                            g,
                            level_index: n,
                            energy: e,
                            parity: None,
                            photon_content: None,
                            source: harm_src,
                        });
                    }
                }
                // the harmonic window closes above the double-well onset and
                // for delta' <= 0; the finite-difference levels still stand
                Err(Error::Domain(msg)) => {
                    notes.push(serde_json::json!({ "g": g, "band": band.to_string(), "harmonic_skipped": msg }));
                }
                Err(e) => return Err(e.into()),
            }
            let fd = solve_band_schrodinger(
                &params,
                band,
                config.q_half_width,
                config.n_points,
                config.band_k_levels,
            )?;
            for (n, e) in fd.into_iter().enumerate() {
                rows.push(Row {
                    g,
                    level_index: n,
                    energy: e,
                    parity: None,
                    photon_content: None,
                    source: fd_src,
                });
            }
        }
    }
    let onset = double_well_onset(&config.params)
        .map(|v| serde_json::json!(v))
        .unwrap_or(serde_json::json!(null));
    let asymptote = CriticalParams::new(config.params.omega, config.params.delta, config.params.g)
        .map(|cp| serde_json::json!(band_asymptote(&cp)))
        .unwrap_or(serde_json::json!(null));
    let runtime = serde_json::json!({
        "double_well_onset": onset,
        "band_b_asymptote_at_critical_stark": asymptote,
        "notes": notes,
    });
    Ok((rows, runtime))
}

fn solve_column(
    params: &ModelParams,
    k: usize,
    truncation: &TruncationPolicy,
) -> Result<EigenSolution, Error> {
    match truncation {
        TruncationPolicy::Fixed(n) => {
            let h = build_hamiltonian(params, *n)?;
            let k = k.min(h.dimension());
            diagonalize(&h, k)
        }
        TruncationPolicy::Adaptive(c) => converged_spectrum(params, k, c),
    }
}

fn run_crosscheck(config: &RunConfig) -> Result<(Vec<Row>, serde_json::Value), RunError> {
    let mut rows = Vec::new();
    let mut diffs: Vec<Discrepancy> = Vec::new();
    let mut notes = Vec::new();

    // (a) G-function roots vs exact diagonalization at the configured g
    if config.params.is_subcritical() {
        let sol = solve_column(&config.params, config.k_levels.max(40), &config.truncation)?;
        solution_rows(config.params.g, &sol, "exact-diag", &mut rows);
        for parity in Parity::BOTH {
            let roots = find_roots(
                &config.params,
                parity,
                config.e_lo,
                config.e_hi,
                &config.gseries,
                config.scan_points,
            )?;
            let ed: Vec<f64> = sol
                .indices_with_parity(parity)
                .into_iter()
                .map(|i| sol.energies[i])
                .filter(|e| (config.e_lo..=config.e_hi).contains(e))
                .collect();
            for (k, (root, e)) in roots.iter().zip(ed.iter()).take(10).enumerate() {
                rows.push(Row {
                    g: config.params.g,
                    level_index: k,
                    energy: *root,
                    parity: Some(if parity == Parity::Positive { 1 } else { -1 }),
                    photon_content: None,
                    source: "gfunction",
                });
                diffs.push(Discrepancy {
                    section: "gfunc-vs-ed",
                    g: config.params.g,
                    level: k,
                    reference: *e,
                    candidate: *root,
                    tolerance: config.tol_gfunc_vs_ed,
                });
            }
        }
    } else {
        notes.push(serde_json::json!({
            "section": "gfunc-vs-ed",
            "skipped": "gamma >= omega: the G-function requires the subcritical regime",
        }));
    }

    // (b) critical-point BIC vs the ascending low-photon level, per grid point
    for &g in &config.g_grid {
        if g <= 0.0 {
            continue;
        }
        let cp = CriticalParams::new(config.params.omega, config.params.delta, g)?;
        let bic = bic_energies(&cp, 1, config.solver_tol)?;
        let Some(bic0) = bic.roots.first() else {
            continue;
        };
        let params = config.params.with_g(g)?;
        let sol = solve_column(&params, config.k_levels, &config.truncation)?;
        let prebic = sol
            .indices_with_parity(Parity::Positive)
            .into_iter()
            .map(|i| (sol.energies[i], sol.photon_content[i]))
            .filter(|(e, _)| (e - bic0.energy).abs() < 0.6)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        rows.push(Row {
            g,
            level_index: 0,
            energy: bic0.energy,
            parity: Some(1),
            photon_content: None,
            source: "bic",
        });
        match prebic {
            Some((e_pre, photon)) => {
                rows.push(Row {
                    g,
                    level_index: 0,
                    energy: e_pre,
                    parity: Some(1),
                    photon_content: Some(photon),
                    source: "prebic",
                });
                diffs.push(Discrepancy {
                    section: "bic-vs-prebic",
                    g,
                    level: 0,
                    reference: bic0.energy,
                    candidate: e_pre,
                    tolerance: config.tol_bic_rel,
                });
            }
            None => notes.push(serde_json::json!({
                "section": "bic-vs-prebic",
                "g": g,
                "skipped": "no positive-parity level within 0.6 of the BIC energy",
            })),
        }
    }

    // (c) harmonic band levels vs exact diagonalization inside the validity window
    match double_well_onset(&config.params) {
        Ok(onset) => {
            for &g in &config.g_grid {
                if g >= 0.5 * onset {
                    continue;
                }
                let params = config.params.with_g(g)?;
                let sol = solve_column(&params, config.k_levels, &config.truncation)?;
                for band in [Band::A, Band::B] {
                    let source: &'static str = match band {
                        Band::A => "band-a-harmonic",
                        Band::B => "band-b-harmonic",
                    };
                    let levels = harmonic_band_levels(&params, band, config.harmonic_count)?;
                    for (n, e) in levels.into_iter().enumerate() {
                        rows.push(Row {
                            g,
                            level_index: n,
                            energy: e,
                            parity: None,
                            photon_content: None,
                            source,
                        });
                        let nearest = sol
                            .energies
                            .iter()
                            .copied()
                            .min_by(|a, b| (a - e).abs().partial_cmp(&(b - e).abs()).unwrap());
                        if let Some(ed) = nearest {
                            diffs.push(Discrepancy {
                                section: "band-vs-ed",
                                g,
                                level: n,
                                reference: ed,
                                candidate: e,
                                tolerance: config.tol_band_rel,
                            });
                        }
                    }
                }
            }
        }
        Err(e) => notes.push(serde_json::json!({
            "section": "band-vs-ed",
            "skipped": format!("no harmonic validity window: {e}"),
        })),
    }

    let diff_path = {
        let mut os = config.out_path.as_os_str().to_os_string();
        os.push(".diff.csv");
        std::path::PathBuf::from(os)
    };
    let relative_sections = ["bic-vs-prebic", "band-vs-ed"];
    write_discrepancies(&diff_path, &diffs, &relative_sections)?;

    let summary = |section: &str, relative: bool| -> serde_json::Value {
        let section_rows: Vec<&Discrepancy> =
            diffs.iter().filter(|d| d.section == section).collect();
        let max_abs = section_rows
            .iter()
            .map(|d| d.abs_diff())
            .fold(0.0_f64, f64::max);
        let max_rel = section_rows
            .iter()
            .map(|d| d.rel_diff())
            .fold(0.0_f64, f64::max);
        let flagged = section_rows.iter().filter(|d| d.flagged(relative)).count();
        serde_json::json!({
            "entries": section_rows.len(),
            "max_abs_diff": max_abs,
            "max_rel_diff": max_rel,
            "flagged": flagged,
        })
    };
    let runtime = serde_json::json!({
        "diff_table": diff_path.display().to_string(),
        "gfunc_vs_ed": summary("gfunc-vs-ed", false),
        "bic_vs_prebic": summary("bic-vs-prebic", true),
        "band_vs_ed": summary("band-vs-ed", true),
        "notes": notes,
    });
    Ok((rows, runtime))
}
