//! Flat key = value run configuration with `[section]` headers.
//!
//! Every knob has a default; the fully resolved configuration is echoed into
//! the metadata sidecar so a run is self-describing.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use stark_core::{
    Band, ConvergenceSettings, GSeriesSettings, ModelParams, Parity, TruncationPolicy,
};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Sweep,
    Gfunction,
    Confluence,
    Slowmode,
    Crosscheck,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Sweep => "sweep",
            Mode::Gfunction => "gfunction",
            Mode::Confluence => "confluence",
            Mode::Slowmode => "slowmode",
            Mode::Crosscheck => "crosscheck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy)]
pub enum ParityChoice {
    Both,
    One(Parity),
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: ModelParams,
    pub g_grid: Vec<f64>,
    pub k_levels: usize,
    pub parity: ParityChoice,
    pub truncation: TruncationPolicy,
    pub gseries: GSeriesSettings,
    pub e_lo: f64,
    pub e_hi: f64,
    pub scan_points: usize,
    pub confluence_n_max: usize,
    pub solver_tol: f64,
    pub band: Option<Band>,
    pub q_half_width: f64,
    pub n_points: usize,
    pub band_k_levels: usize,
    pub harmonic_count: usize,
    pub tol_gfunc_vs_ed: f64,
    pub tol_bic_rel: f64,
    pub tol_band_rel: f64,
    pub photon_threshold: f64,
    pub out_path: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    /// Echo of every resolved setting for the metadata sidecar.
    pub fn describe(&self) -> serde_json::Value {
        let parity = match self.parity {
            ParityChoice::Both => "both".to_string(),
            ParityChoice::One(p) => p.to_string(),
        };
        let (adaptive, n_trunc, n_start, n_cap, rel_tol) = match self.truncation {
            TruncationPolicy::Fixed(n) => (false, n, 0, 0, 0.0),
            TruncationPolicy::Adaptive(c) => (true, 0, c.n_start, c.n_cap, c.rel_tol),
        };
        serde_json::json!({
            "mode": self.mode.as_str(),
            "model": {
                "omega": self.params.omega,
                "gamma": self.params.gamma,
                "delta": self.params.delta,
                "g": self.params.g,
            },
            "grid": { "values": self.g_grid },
            "spectrum": {
                "k_levels": self.k_levels,
                "parity": parity,
                "adaptive": adaptive,
                "n_trunc": n_trunc,
                "n_start": n_start,
                "n_cap": n_cap,
                "rel_tol": rel_tol,
            },
            "gfunction": {
                "e_lo": self.e_lo,
                "e_hi": self.e_hi,
                "n_terms_max": self.gseries.n_terms_max,
                "tail_tolerance": self.gseries.tail_tolerance,
                "pole_guard": self.gseries.pole_guard,
                "scan_points": self.scan_points,
            },
            "confluence": { "n_max": self.confluence_n_max, "solver_tol": self.solver_tol },
            "slowmode": {
                "band": self.band.map(|b| b.to_string()).unwrap_or_else(|| "both".into()),
                "q_half_width": self.q_half_width,
                "n_points": self.n_points,
                "k_levels": self.band_k_levels,
                "harmonic_count": self.harmonic_count,
            },
            "tolerances": {
                "gfunc_vs_ed": self.tol_gfunc_vs_ed,
                "bic_vs_prebic_rel": self.tol_bic_rel,
                "band_vs_ed_rel": self.tol_band_rel,
                "photon_threshold": self.photon_threshold,
            },
            "output": {
                "path": self.out_path.display().to_string(),
                "format": match self.format { OutputFormat::Csv => "csv", OutputFormat::Json => "json" },
            },
        })
    }
}

struct Raw {
    values: BTreeMap<(String, String), String>,
}

impl Raw {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(i) => &raw_line[..i],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {}: expected `key = value` or `[section]`, got `{raw_line}`",
                    lineno + 1
                )));
            };
            values.insert(
                (section.clone(), key.trim().to_string()),
                value.trim().to_string(),
            );
        }
        Ok(Self { values })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.values.remove(&(section.to_string(), key.to_string()))
    }

    fn f64(&mut self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(section, key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| ConfigError(format!("[{section}] {key}: `{s}` is not a number"))),
        }
    }

    fn usize(&mut self, section: &str, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(section, key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| ConfigError(format!("[{section}] {key}: `{s}` is not a count"))),
        }
    }

    fn bool(&mut self, section: &str, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.take(section, key).as_deref() {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(s) => Err(ConfigError(format!(
                "[{section}] {key}: `{s}` is not a boolean (true/false)"
            ))),
        }
    }
}

/// Parses and validates a config file for the given mode. `out_override`
/// comes from `--out` and takes precedence over `[output] path`.
pub fn parse_config(
    text: &str,
    mode: Mode,
    out_override: Option<PathBuf>,
) -> Result<RunConfig, ConfigError> {
    let mut raw = Raw::parse(text)?;

    let omega = raw.f64("model", "omega", 1.0)?;
    let gamma = raw.f64("model", "gamma", 0.0)?;
    let delta = raw.f64("model", "delta", 0.0)?;
    let g = raw.f64("model", "g", 0.0)?;
    let params = ModelParams::new(omega, gamma, delta, g)
        .map_err(|e| ConfigError(format!("[model]: {e}")))?;

    let grid_start = raw.f64("grid", "start", g)?;
    let grid_stop = raw.f64("grid", "stop", g)?;
    let grid_count = raw.usize("grid", "count", 1)?;
    if grid_count == 0 {
        return Err(ConfigError("[grid] count must be >= 1".into()));
    }
    let g_grid: Vec<f64> = if grid_count == 1 {
        vec![grid_start]
    } else {
        if grid_stop <= grid_start {
            return Err(ConfigError(
                "[grid] stop must exceed start when count > 1".into(),
            ));
        }
        (0..grid_count)
            .map(|i| grid_start + (grid_stop - grid_start) * i as f64 / (grid_count - 1) as f64)
            .collect()
    };

    let k_levels = raw.usize("spectrum", "k_levels", 10)?;
    let parity = match raw.take("spectrum", "parity").as_deref() {
        None | Some("both") => ParityChoice::Both,
        Some("+1") | Some("+") | Some("positive") => ParityChoice::One(Parity::Positive),
        Some("-1") | Some("-") | Some("negative") => ParityChoice::One(Parity::Negative),
        Some(s) => {
            return Err(ConfigError(format!(
                "[spectrum] parity: `{s}` is not one of +1, -1, both"
            )))
        }
    };
    let adaptive = raw.bool("spectrum", "adaptive", false)?;
    let n_trunc = raw.usize("spectrum", "n_trunc", 200)?;
    let n_start = raw.usize("spectrum", "n_start", 100)?;
    let n_cap = raw.usize("spectrum", "n_cap", 4000)?;
    let rel_tol = raw.f64("spectrum", "rel_tol", 1e-8)?;
    let truncation = if adaptive {
        TruncationPolicy::Adaptive(ConvergenceSettings {
            rel_tol,
            n_start,
            n_cap,
        })
    } else {
        TruncationPolicy::Fixed(n_trunc)
    };

    let gseries = GSeriesSettings {
        n_terms_max: raw.usize("gfunction", "n_terms_max", 1024)?,
        tail_tolerance: raw.f64("gfunction", "tail_tolerance", 1e-12)?,
        pole_guard: raw.f64("gfunction", "pole_guard", 1e-6)?,
    };
    gseries
        .validate()
        .map_err(|e| ConfigError(format!("[gfunction]: {e}")))?;
    let e_lo = raw.f64("gfunction", "e_lo", -2.0)?;
    let e_hi = raw.f64("gfunction", "e_hi", 6.0)?;
    let scan_points = raw.usize("gfunction", "scan_points", 64)?;

    let confluence_n_max = raw.usize("confluence", "n_max", 8)?;
    let solver_tol = raw.f64("confluence", "solver_tol", 1e-10)?;
    if solver_tol.is_nan() || solver_tol <= 0.0 {
        return Err(ConfigError("[confluence] solver_tol must be > 0".into()));
    }

    let band = match raw.take("slowmode", "band").as_deref() {
        None | Some("both") => None,
        Some("a") => Some(Band::A),
        Some("b") => Some(Band::B),
        Some(s) => {
            return Err(ConfigError(format!(
                "[slowmode] band: `{s}` is not a, b or both"
            )))
        }
    };
    let q_half_width = raw.f64("slowmode", "q_half_width", 12.0)?;
    let n_points = raw.usize("slowmode", "n_points", 1001)?;
    let band_k_levels = raw.usize("slowmode", "k_levels", 8)?;
    let harmonic_count = raw.usize("slowmode", "harmonic_count", 8)?;

    let tol_gfunc_vs_ed = raw.f64("tolerances", "gfunc_vs_ed", 1e-7)?;
    let tol_bic_rel = raw.f64("tolerances", "bic_vs_prebic_rel", 0.02)?;
    let tol_band_rel = raw.f64("tolerances", "band_vs_ed_rel", 0.05)?;
    let photon_threshold = raw.f64("tolerances", "photon_threshold", 1.0)?;
    for (name, v) in [
        ("gfunc_vs_ed", tol_gfunc_vs_ed),
        ("bic_vs_prebic_rel", tol_bic_rel),
        ("band_vs_ed_rel", tol_band_rel),
        ("photon_threshold", photon_threshold),
    ] {
        if v.is_nan() || v <= 0.0 {
            return Err(ConfigError(format!("[tolerances] {name} must be > 0")));
        }
    }

    let out_path = match (out_override, raw.take("output", "path")) {
        (Some(p), _) => p,
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => {
            return Err(ConfigError(
                "output path required: set [output] path or pass --out".into(),
            ))
        }
    };
    let format = match raw.take("output", "format").as_deref() {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(s) => {
            return Err(ConfigError(format!(
                "[output] format: `{s}` is not csv or json"
            )))
        }
    };

    if let Some(((section, key), _)) = raw.values.iter().next() {
        return Err(ConfigError(format!(
            "unknown key `{key}` in section [{section}]"
        )));
    }

    // mode-specific requirements
    match mode {
        Mode::Sweep | Mode::Crosscheck => {
            if g_grid.len() > 1 && g_grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ConfigError(
                    "[grid]: values must be strictly ascending".into(),
                ));
            }
        }
        Mode::Gfunction => {
            if gamma >= omega {
                return Err(ConfigError(
                    "mode gfunction requires gamma < omega (the G-function lives in the \
                     subcritical regime)"
                        .into(),
                ));
            }
            if e_lo.is_nan() || e_hi.is_nan() || e_lo > e_hi {
                return Err(ConfigError("[gfunction]: e_lo must not exceed e_hi".into()));
            }
        }
        Mode::Confluence => {
            if g <= 0.0 {
                return Err(ConfigError("mode confluence requires [model] g > 0".into()));
            }
        }
        Mode::Slowmode => {}
    }

    Ok(RunConfig {
        mode,
        params,
        g_grid,
        k_levels,
        parity,
        truncation,
        gseries,
        e_lo,
        e_hi,
        scan_points,
        confluence_n_max,
        solver_tol,
        band,
        q_half_width,
        n_points,
        band_k_levels,
        harmonic_count,
        tol_gfunc_vs_ed,
        tol_bic_rel,
        tol_band_rel,
        photon_threshold,
        out_path,
        format,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_sweep_config() {
        let cfg = parse_config(
            "[model]\nomega = 1.0\ngamma = 0.2\ndelta = 0.7\n\n[grid]\nstart = 0\nstop = 3\ncount = 61\n\n[output]\npath = out.csv\n",
            Mode::Sweep,
            None,
        )
        .unwrap();
        assert_eq!(cfg.g_grid.len(), 61);
        assert_eq!(cfg.g_grid[60], 3.0);
        assert!(matches!(cfg.truncation, TruncationPolicy::Fixed(200)));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_numbers() {
        assert!(parse_config("[model]\nomega = 1.0\n", Mode::Sweep, None).is_err());
        assert!(parse_config("[model]\nomega = abc\n", Mode::Sweep, None).is_err());
        assert!(parse_config("no equals sign", Mode::Sweep, None).is_err());
    }

    #[test]
    fn comments_and_out_override() {
        let cfg = parse_config(
            "# a comment\n[model] # trailing\ngamma = 0.1 # also fine\n",
            Mode::Slowmode,
            Some(PathBuf::from("x.csv")),
        )
        .unwrap();
        assert_eq!(cfg.params.gamma, 0.1);
        assert_eq!(cfg.out_path, PathBuf::from("x.csv"));
    }

    #[test]
    fn gfunction_mode_requires_subcritical() {
        let err = parse_config(
            "[model]\ngamma = 1.0\n[output]\npath = x.csv\n",
            Mode::Gfunction,
            None,
        )
        .unwrap_err();
        assert!(err.0.contains("gamma < omega"));
    }

    #[test]
    fn single_point_grid() {
        let cfg = parse_config(
            "[model]\ng = 0.4\n[grid]\nstart = 0.4\nstop = 0.4\ncount = 1\n[output]\npath = x.csv\n",
            Mode::Sweep,
            None,
        )
        .unwrap();
        assert_eq!(cfg.g_grid, vec![0.4]);
    }
}
