//! Run configuration in a flat `key = value` text format.
//!
//! One assignment per line, `#` starts a comment, keys are dotted. Every key
//! must belong to the schema below; anything else is rejected so that typos
//! never fall back to defaults silently.
//!
//! ```text
//! grid.n_cells = 256            # required, >= 2
//! grid.length = 1.0             # required, > 0
//! params.R = 1.0                # required, > 0
//! params.R_mu = 1.0             # required, > 0
//! params.epsilon = 0.0          # default 0; > 0 only with mode = regularized
//! mode = degenerate             # degenerate | regularized | pme_g
//! t_end = 1.0                   # required, >= 0
//! sample_dt = 0.01              # default t_end / 100
//! snapshot_times = 0.5, 1.0     # default none; each in [0, t_end]
//! controls.cfl_safety = 0.4
//! controls.dt_max = 0.01
//! controls.clamp_tol = 1e-12
//! controls.clamp_abort_fraction = 1e-8
//! output_dir = output
//! seed = 0
//! initial.f.kind = cosine_perturbation   # required for f and g
//! initial.f.base = 1.0
//! initial.f.amplitude = 0.1
//! initial.f.mode = 1
//! initial.g.kind = flat
//! initial.g.value = 1.0
//! ```
//!
//! Initial profile kinds and their keys (`initial.<f|g>.`):
//!
//! | kind | keys |
//! |------|------|
//! | `flat` | `value` |
//! | `cosine_perturbation` | `base`, `amplitude`, `mode` (default 1) |
//! | `bump` | `center`, `width`, `height`, `base` (default 0) |
//! | `compact_support` | `support_lo`, `support_hi`, `height` |
//! | `random_fourier` | `base`, `amplitude`, `n_modes` (default 4) |
//! | `from_file` | `path` (snapshot CSV; the `f` or `g` column is read) |
//!
//! Every kind also accepts `floor` (default 0): values below it are raised
//! to it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::dynamics::{Mode, SchemeControls};
use crate::error::Result;
use crate::grid::Grid;
use crate::model::Params;
use crate::simulation::Schedule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key '{key}' given more than once")]
    DuplicateKey { line: usize, key: String },

    #[error("missing required key '{key}'")]
    MissingKey { key: String },

    #[error("invalid value '{value}' for '{key}': {message}")]
    InvalidValue {
        key: String,
        value: String,
        message: String,
    },

    #[error("inconsistent keys {}: {message}", keys.join(", "))]
    Constraint { keys: Vec<String>, message: String },
}

impl ConfigError {
    /// Keys named by this error.
    pub fn keys(&self) -> Vec<&str> {
        match self {
            ConfigError::Syntax { .. } => Vec::new(),
            ConfigError::UnknownKey { key, .. }
            | ConfigError::DuplicateKey { key, .. }
            | ConfigError::MissingKey { key }
            | ConfigError::InvalidValue { key, .. } => vec![key.as_str()],
            ConfigError::Constraint { keys, .. } => keys.iter().map(String::as_str).collect(),
        }
    }

    fn invalid(key: &str, value: impl ToString, message: impl Into<String>) -> Self {
        ConfigError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
            message: message.into(),
        }
    }

    fn constraint(keys: &[&str], message: impl Into<String>) -> Self {
        ConfigError::Constraint {
            keys: keys.iter().map(|k| k.to_string()).collect(),
            message: message.into(),
        }
    }
}

/// One initial profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Flat { value: f64 },
    CosinePerturbation { base: f64, amplitude: f64, mode: u32 },
    /// `base + height * exp(-((x - center) / width)^2)`
    Bump { center: f64, width: f64, height: f64, base: f64 },
    /// Parabolic cap `height * (1 - s^2)` on `(lo, hi)`, zero outside.
    CompactSupport { lo: f64, hi: f64, height: f64 },
    /// `base + sum_k a_k cos(k pi x / L)`, `a_k` uniform in `[-amplitude, amplitude] / k`.
    RandomFourier { base: f64, amplitude: f64, n_modes: u32 },
    FromFile { path: PathBuf },
}

impl Shape {
    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Flat { .. } => "flat",
            Shape::CosinePerturbation { .. } => "cosine_perturbation",
            Shape::Bump { .. } => "bump",
            Shape::CompactSupport { .. } => "compact_support",
            Shape::RandomFourier { .. } => "random_fourier",
            Shape::FromFile { .. } => "from_file",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub shape: Shape,
    pub floor: f64,
}

impl Profile {
    pub fn new(shape: Shape) -> Self {
        Self { shape, floor: 0.0 }
    }

    pub fn flat(value: f64) -> Self {
        Self::new(Shape::Flat { value })
    }

    pub fn cosine(base: f64, amplitude: f64, mode: u32) -> Self {
        Self::new(Shape::CosinePerturbation { base, amplitude, mode })
    }
}

/// Initial data for both layers.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub f: Profile,
    pub g: Profile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_cells: usize,
    pub length: f64,
    pub params: Params,
    pub mode: Mode,
    pub initial: InitialSpec,
    pub t_end: f64,
    pub sample_dt: f64,
    pub snapshot_times: Vec<f64>,
    pub controls: SchemeControls,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    /// A config with default schedule and controls.
    pub fn new(n_cells: usize, length: f64, params: Params, mode: Mode, initial: InitialSpec, t_end: f64) -> Self {
        Self {
            n_cells,
            length,
            params,
            mode,
            initial,
            t_end,
            sample_dt: default_sample_dt(t_end),
            snapshot_times: Vec::new(),
            controls: SchemeControls::default(),
            output_dir: PathBuf::from("output"),
            seed: 0,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n_cells, self.length)
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            t_end: self.t_end,
            sample_dt: self.sample_dt,
            snapshot_times: self.snapshot_times.clone(),
        }
    }

    /// Cross-key constraints; every error names the keys involved.
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        if self.n_cells < 2 {
            return Err(ConfigError::invalid("grid.n_cells", self.n_cells, "must be >= 2"));
        }
        positive("grid.length", self.length)?;
        positive("params.R", self.params.r)?;
        positive("params.R_mu", self.params.r_mu)?;
        let eps = self.params.epsilon;
        if !(0.0..1.0).contains(&eps) {
            return Err(ConfigError::invalid("params.epsilon", eps, "must lie in [0, 1)"));
        }
        match self.mode {
            Mode::Regularized if eps <= 0.0 => {
                return Err(ConfigError::constraint(
                    &["params.epsilon", "mode"],
                    "mode = regularized requires params.epsilon > 0",
                ))
            }
            Mode::Degenerate | Mode::PmeG if eps != 0.0 => {
                return Err(ConfigError::constraint(
                    &["params.epsilon", "mode"],
                    format!("mode = {} requires params.epsilon = 0", self.mode),
                ))
            }
            _ => {}
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(ConfigError::invalid("t_end", self.t_end, "must be finite and >= 0"));
        }
        positive("sample_dt", self.sample_dt)?;
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|t| !(t.is_finite() && **t >= 0.0 && **t <= self.t_end))
        {
            return Err(ConfigError::constraint(
                &["snapshot_times", "t_end"],
                format!("snapshot time {t} outside [0, {}]", self.t_end),
            ));
        }
        let c = &self.controls;
        if !(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0) {
            return Err(ConfigError::invalid("controls.cfl_safety", c.cfl_safety, "must lie in (0, 1]"));
        }
        positive("controls.dt_max", c.dt_max)?;
        nonnegative("controls.clamp_tol", c.clamp_tol)?;
        nonnegative("controls.clamp_abort_fraction", c.clamp_abort_fraction)?;
        validate_profile("initial.f", &self.initial.f, self.length)?;
        validate_profile("initial.g", &self.initial.g, self.length)?;
        Ok(())
    }

    /// Renders the config in the text format accepted by [`parse_config`].
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("grid.n_cells", self.n_cells.to_string());
        put("grid.length", num(self.length));
        put("params.R", num(self.params.r));
        put("params.R_mu", num(self.params.r_mu));
        put("params.epsilon", num(self.params.epsilon));
        put("mode", self.mode.to_string());
        put("t_end", num(self.t_end));
        put("sample_dt", num(self.sample_dt));
        if !self.snapshot_times.is_empty() {
            let list: Vec<String> = self.snapshot_times.iter().map(|&t| num(t)).collect();
            put("snapshot_times", list.join(", "));
        }
        put("controls.cfl_safety", num(self.controls.cfl_safety));
        put("controls.dt_max", num(self.controls.dt_max));
        put("controls.clamp_tol", num(self.controls.clamp_tol));
        put("controls.clamp_abort_fraction", num(self.controls.clamp_abort_fraction));
        put("output_dir", self.output_dir.display().to_string());
        put("seed", self.seed.to_string());
        for (field, p) in [("f", &self.initial.f), ("g", &self.initial.g)] {
            let prefix = format!("initial.{field}");
            put(&format!("{prefix}.kind"), p.shape.kind().to_string());
            for (k, v) in shape_entries(&p.shape) {
                put(&format!("{prefix}.{k}"), v);
            }
            put(&format!("{prefix}.floor"), num(p.floor));
        }
        s
    }
}

fn num(v: f64) -> String {
    // Shortest representation that parses back to the same bits.
    format!("{v:?}")
}

fn shape_entries(shape: &Shape) -> Vec<(&'static str, String)> {
    match shape {
        Shape::Flat { value } => vec![("value", num(*value))],
        Shape::CosinePerturbation { base, amplitude, mode } => vec![
            ("base", num(*base)),
            ("amplitude", num(*amplitude)),
            ("mode", mode.to_string()),
        ],
        Shape::Bump {
            center,
            width,
            height,
            base,
        } => vec![
            ("center", num(*center)),
            ("width", num(*width)),
            ("height", num(*height)),
            ("base", num(*base)),
        ],
        Shape::CompactSupport { lo, hi, height } => vec![
            ("support_lo", num(*lo)),
            ("support_hi", num(*hi)),
            ("height", num(*height)),
        ],
        Shape::RandomFourier {
            base,
            amplitude,
            n_modes,
        } => vec![
            ("base", num(*base)),
            ("amplitude", num(*amplitude)),
            ("n_modes", n_modes.to_string()),
        ],
        Shape::FromFile { path } => vec![("path", path.display().to_string())],
    }
}

fn default_sample_dt(t_end: f64) -> f64 {
    if t_end > 0.0 {
        t_end / 100.0
    } else {
        1.0
    }
}

fn positive(key: &str, v: f64) -> std::result::Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, v, "must be finite and > 0"))
    }
}

fn nonnegative(key: &str, v: f64) -> std::result::Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, v, "must be finite and >= 0"))
    }
}

fn finite(key: &str, v: f64) -> std::result::Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, v, "must be finite"))
    }
}

fn validate_profile(prefix: &str, p: &Profile, length: f64) -> std::result::Result<(), ConfigError> {
    let key = |k: &str| format!("{prefix}.{k}");
    nonnegative(&key("floor"), p.floor)?;
    match &p.shape {
        Shape::Flat { value } => nonnegative(&key("value"), *value),
        Shape::CosinePerturbation { base, amplitude, .. } => {
            finite(&key("base"), *base)?;
            finite(&key("amplitude"), *amplitude)
        }
        Shape::Bump {
            center,
            width,
            height,
            base,
        } => {
            finite(&key("center"), *center)?;
            positive(&key("width"), *width)?;
            nonnegative(&key("height"), *height)?;
            nonnegative(&key("base"), *base)
        }
        Shape::CompactSupport { lo, hi, height } => {
            finite(&key("support_lo"), *lo)?;
            finite(&key("support_hi"), *hi)?;
            positive(&key("height"), *height)?;
            if !(*lo >= 0.0 && lo < hi && *hi <= length) {
                return Err(ConfigError::constraint(
                    &[&key("support_lo"), &key("support_hi"), "grid.length"],
                    format!("support ({lo}, {hi}) must satisfy 0 <= lo < hi <= L = {length}"),
                ));
            }
            Ok(())
        }
        Shape::RandomFourier { base, amplitude, .. } => {
            finite(&key("base"), *base)?;
            nonnegative(&key("amplitude"), *amplitude)
        }
        Shape::FromFile { .. } => Ok(()),
    }
}

const TOP_LEVEL_KEYS: &[&str] = &[
    "grid.n_cells",
    "grid.length",
    "params.R",
    "params.R_mu",
    "params.epsilon",
    "mode",
    "t_end",
    "sample_dt",
    "snapshot_times",
    "controls.cfl_safety",
    "controls.dt_max",
    "controls.clamp_tol",
    "controls.clamp_abort_fraction",
    "output_dir",
    "seed",
];

const PROFILE_KEYS: &[&str] = &[
    "kind",
    "value",
    "base",
    "amplitude",
    "mode",
    "center",
    "width",
    "height",
    "support_lo",
    "support_hi",
    "n_modes",
    "path",
    "floor",
];

fn is_known_key(key: &str) -> bool {
    if TOP_LEVEL_KEYS.contains(&key) {
        return true;
    }
    ["initial.f.", "initial.g."]
        .iter()
        .any(|p| key.strip_prefix(p).is_some_and(|rest| PROFILE_KEYS.contains(&rest)))
}

struct Entries {
    map: BTreeMap<String, String>,
    used: std::collections::BTreeSet<String>,
}

impl Entries {
    fn raw(&mut self, key: &str) -> Option<String> {
        let v = self.map.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn required(&mut self, key: &str) -> std::result::Result<String, ConfigError> {
        self.raw(key).ok_or_else(|| ConfigError::MissingKey { key: key.to_string() })
    }

    fn f64_opt(&mut self, key: &str) -> std::result::Result<Option<f64>, ConfigError> {
        self.raw(key).map(|v| parse_f64(key, &v)).transpose()
    }

    fn f64_req(&mut self, key: &str) -> std::result::Result<f64, ConfigError> {
        let v = self.required(key)?;
        parse_f64(key, &v)
    }

    fn f64_or(&mut self, key: &str, default: f64) -> std::result::Result<f64, ConfigError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn int_opt<T: std::str::FromStr>(&mut self, key: &str) -> std::result::Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| ConfigError::invalid(key, &v, "expected a nonnegative integer"))
            })
            .transpose()
    }
}

fn parse_f64(key: &str, v: &str) -> std::result::Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| ConfigError::invalid(key, v, "expected a real number"))
}

/// Parses and validates a configuration text.
pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: line_no,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: line_no,
                message: "empty key".into(),
            });
        }
        if !is_known_key(key) {
            return Err(ConfigError::UnknownKey {
                line: line_no,
                key: key.to_string(),
            });
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(ConfigError::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
    }
    let mut e = Entries {
        map,
        used: Default::default(),
    };

    let n_cells_raw = e.required("grid.n_cells")?;
    let n_cells: usize = n_cells_raw
        .parse::<i64>()
        .map_err(|_| ConfigError::invalid("grid.n_cells", &n_cells_raw, "expected an integer"))
        .and_then(|n| {
            if n >= 2 {
                Ok(n as usize)
            } else {
                Err(ConfigError::invalid("grid.n_cells", n, "must be >= 2"))
            }
        })?;
    let length = e.f64_req("grid.length")?;
    let r = e.f64_req("params.R")?;
    let r_mu = e.f64_req("params.R_mu")?;
    let epsilon = e.f64_or("params.epsilon", 0.0)?;
    let mode = match e.raw("mode") {
        Some(v) => v
            .parse::<Mode>()
            .map_err(|msg| ConfigError::invalid("mode", &v, msg))?,
        None => Mode::Degenerate,
    };
    let t_end = e.f64_req("t_end")?;
    let sample_dt = e.f64_or("sample_dt", default_sample_dt(t_end))?;
    let snapshot_times = match e.raw("snapshot_times") {
        Some(v) if !v.is_empty() => v
            .split(',')
            .map(|s| parse_f64("snapshot_times", s.trim()))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        _ => Vec::new(),
    };
    let d = SchemeControls::default();
    let controls = SchemeControls {
        cfl_safety: e.f64_or("controls.cfl_safety", d.cfl_safety)?,
        dt_max: e.f64_or("controls.dt_max", d.dt_max)?,
        clamp_tol: e.f64_or("controls.clamp_tol", d.clamp_tol)?,
        clamp_abort_fraction: e.f64_or("controls.clamp_abort_fraction", d.clamp_abort_fraction)?,
    };
    let output_dir = PathBuf::from(e.raw("output_dir").unwrap_or_else(|| "output".into()));
    let seed = e.int_opt::<u64>("seed")?.unwrap_or(0);
    let initial = InitialSpec {
        f: parse_profile(&mut e, "initial.f")?,
        g: parse_profile(&mut e, "initial.g")?,
    };

    // Keys from the schema that the chosen profile kinds do not use.
    if let Some(key) = e.map.keys().find(|k| !e.used.contains(*k)) {
        let prefix = &key[..key.rfind('.').unwrap_or(0)];
        let kind = e.map.get(&format!("{prefix}.kind")).cloned().unwrap_or_default();
        return Err(ConfigError::invalid(
            key,
            &e.map[key],
            format!("not used by {prefix}.kind = {kind}"),
        ));
    }

    let params = crate::model::Params { r, r_mu, epsilon };
    let config = RunConfig {
        n_cells,
        length,
        params,
        mode,
        initial,
        t_end,
        sample_dt,
        snapshot_times,
        controls,
        output_dir,
        seed,
    };
    config.validate()?;
    Ok(config)
}

fn parse_profile(e: &mut Entries, prefix: &str) -> std::result::Result<Profile, ConfigError> {
    let key = |k: &str| format!("{prefix}.{k}");
    let kind = e.required(&key("kind"))?;
    let shape = match kind.as_str() {
        "flat" => Shape::Flat {
            value: e.f64_req(&key("value"))?,
        },
        "cosine_perturbation" => Shape::CosinePerturbation {
            base: e.f64_req(&key("base"))?,
            amplitude: e.f64_req(&key("amplitude"))?,
            mode: e.int_opt(&key("mode"))?.unwrap_or(1),
        },
        "bump" => Shape::Bump {
            center: e.f64_req(&key("center"))?,
            width: e.f64_req(&key("width"))?,
            height: e.f64_req(&key("height"))?,
            base: e.f64_or(&key("base"), 0.0)?,
        },
        "compact_support" => Shape::CompactSupport {
            lo: e.f64_req(&key("support_lo"))?,
            hi: e.f64_req(&key("support_hi"))?,
            height: e.f64_req(&key("height"))?,
        },
        "random_fourier" => Shape::RandomFourier {
            base: e.f64_req(&key("base"))?,
            amplitude: e.f64_req(&key("amplitude"))?,
            n_modes: e.int_opt(&key("n_modes"))?.unwrap_or(4),
        },
        "from_file" => Shape::FromFile {
            path: PathBuf::from(e.required(&key("path"))?),
        },
        other => {
            return Err(ConfigError::invalid(
                &key("kind"),
                other,
                "expected flat, cosine_perturbation, bump, compact_support, random_fourier or from_file",
            ))
        }
    };
    let floor = e.f64_or(&key("floor"), 0.0)?;
    Ok(Profile { shape, floor })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
grid.n_cells = 64
grid.length = 1.0
params.R = 1.0
params.R_mu = 2.0
t_end = 0.5
initial.f.kind = flat
initial.f.value = 1.0
initial.g.kind = flat
initial.g.value = 0.5
";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.n_cells, 64);
        assert_eq!(c.params.r_mu, 2.0);
        assert_eq!(c.params.epsilon, 0.0);
        assert_eq!(c.mode, Mode::Degenerate);
        assert_eq!(c.sample_dt, 0.005);
        assert!(c.snapshot_times.is_empty());
        assert_eq!(c.controls, SchemeControls::default());
        assert_eq!(c.output_dir, PathBuf::from("output"));
        assert_eq!(c.seed, 0);
        assert_eq!(c.initial.f, Profile::flat(1.0));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# header\n\n{MINIMAL}   # trailing\nseed = 7 # inline\n");
        assert_eq!(parse_config(&text).unwrap().seed, 7);
    }

    #[test]
    fn epsilon_with_degenerate_mode_names_both_keys() {
        let text = format!("{MINIMAL}params.epsilon = 0.1\nmode = degenerate\n");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Constraint { .. }));
        assert_eq!(err.keys(), vec!["params.epsilon", "mode"]);
    }

    #[test]
    fn regularized_needs_epsilon() {
        let text = format!("{MINIMAL}mode = regularized\n");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.keys(), vec!["params.epsilon", "mode"]);
        let ok = format!("{MINIMAL}mode = regularized\nparams.epsilon = 0.05\n");
        assert_eq!(parse_config(&ok).unwrap().mode, Mode::Regularized);
    }

    #[test]
    fn negative_cell_count_names_key() {
        let text = MINIMAL.replace("grid.n_cells = 64", "grid.n_cells = -4");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.keys(), vec!["grid.n_cells"]);
        assert!(err.to_string().contains("grid.n_cells"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(&format!("{MINIMAL}grid.n_cell = 3\n")).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 10, .. }));
        let err = parse_config(&format!("{MINIMAL}initial.h.kind = flat\n")).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { .. }));
    }

    #[test]
    fn keys_foreign_to_the_kind_are_rejected() {
        let err = parse_config(&format!("{MINIMAL}initial.f.width = 0.1\n")).unwrap_err();
        assert_eq!(err.keys(), vec!["initial.f.width"]);
    }

    #[test]
    fn missing_and_malformed() {
        let err = parse_config(&MINIMAL.replace("t_end = 0.5\n", "")).unwrap_err();
        assert_eq!(err, ConfigError::MissingKey { key: "t_end".into() });
        let err = parse_config(&MINIMAL.replace("params.R = 1.0", "params.R = one")).unwrap_err();
        assert_eq!(err.keys(), vec!["params.R"]);
        let err = parse_config(&format!("{MINIMAL}mode\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 10, .. }));
        let err = parse_config(&format!("{MINIMAL}t_end = 1.0\n")).unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { .. }));
    }

    #[test]
    fn snapshot_times_must_lie_in_run() {
        let ok = parse_config(&format!("{MINIMAL}snapshot_times = 0, 0.25,0.5\n")).unwrap();
        assert_eq!(ok.snapshot_times, vec![0.0, 0.25, 0.5]);
        let err = parse_config(&format!("{MINIMAL}snapshot_times = 0.75\n")).unwrap_err();
        assert_eq!(err.keys(), vec!["snapshot_times", "t_end"]);
    }

    #[test]
    fn every_profile_kind_parses() {
        let base = MINIMAL.replace("initial.f.kind = flat\ninitial.f.value = 1.0\n", "");
        let cases = [
            "initial.f.kind = cosine_perturbation\ninitial.f.base = 1\ninitial.f.amplitude = 0.1\n",
            "initial.f.kind = bump\ninitial.f.center = 0.5\ninitial.f.width = 0.1\ninitial.f.height = 1\n",
            "initial.f.kind = compact_support\ninitial.f.support_lo = 0.4\ninitial.f.support_hi = 0.6\ninitial.f.height = 1\n",
            "initial.f.kind = random_fourier\ninitial.f.base = 1\ninitial.f.amplitude = 0.2\ninitial.f.n_modes = 3\ninitial.f.floor = 0.01\n",
            "initial.f.kind = from_file\ninitial.f.path = snap.csv\n",
        ];
        for case in cases {
            let c = parse_config(&format!("{base}{case}")).unwrap();
            assert!(case.contains(c.initial.f.shape.kind()));
        }
        let bad = "initial.f.kind = compact_support\ninitial.f.support_lo = 0.6\ninitial.f.support_hi = 0.4\ninitial.f.height = 1\n";
        assert!(parse_config(&format!("{base}{bad}")).is_err());
    }

    #[test]
    fn rendered_config_parses_back() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.snapshot_times = vec![0.1, 0.3];
        c.initial.g = Profile::new(Shape::CompactSupport {
            lo: 0.2,
            hi: 0.7,
            height: 0.3,
        });
        assert_eq!(parse_config(&c.to_config_string()).unwrap(), c);
    }
}
