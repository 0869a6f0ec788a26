//! Flat `key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Only `grid_n` is required. See [`DEFAULTS`] for everything else.

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::integrator::{Scheme, SchemeConfig};
use crate::io::initial::IcSpec;
use crate::tensor::ModelParams;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}`: invalid value `{value}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("key `c`: c = {0} violates the restriction c > 0 (the bulk energy must be bounded below)")]
    CPositivity(f64),
    #[error("key `xi`: xi = {0} is only supported by check-formulas; time evolution requires xi = 0")]
    NonzeroXi(f64),
}

/// Which subcommand the configuration is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigMode {
    /// `run`, `twin` and the other time-stepping commands.
    Run,
    /// Pointwise formula evaluation, where `xi ≠ 0` is allowed.
    CheckFormulas,
}

/// Every key with its default; `None` marks a required key or one without a
/// default.
pub const DEFAULTS: &[(&str, Option<&str>)] = &[
    ("grid_n", None),
    ("box_len", Some("6.283185307179586")),
    ("a", Some("-0.2")),
    ("b", Some("1")),
    ("c", Some("1")),
    ("l_elastic", Some("0.1")),
    ("gamma", Some("1")),
    ("nu", Some("0.1")),
    ("xi", Some("0")),
    ("dt", Some("0.001")),
    ("scheme", Some("if_rk2")),
    ("t_end", Some("1")),
    ("galerkin_n_cut", None),
    ("diag_every", Some("1")),
    ("save_every", Some("1000")),
    ("ic", Some("random_band")),
    ("seed", Some("0")),
    ("ic.k_max", Some("6")),
    ("ic.slope", Some("2")),
    ("ic.energy_q", Some("0.5")),
    ("ic.energy_u", Some("0.5")),
    ("ic.s", Some("0.5")),
    ("ic.theta0", Some("0")),
    ("ic.amplitude", Some("1")),
    ("ic.modes", Some("2")),
    ("ic.path", None),
    ("s_index", Some("1.5")),
    ("output_dir", Some("out")),
];

const IC_KEYS: &[(&str, &[&str])] = &[
    ("random_band", &["seed", "ic.k_max", "ic.slope", "ic.energy_q", "ic.energy_u"]),
    ("uniaxial_texture", &["seed", "ic.s", "ic.theta0", "ic.amplitude", "ic.modes"]),
    ("taylor_green_u", &["ic.amplitude"]),
    ("from_file", &["ic.path"]),
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid_n: usize,
    pub box_len: f64,
    pub params: ModelParams,
    pub scheme: SchemeConfig,
    pub ic: IcSpec,
    pub s_index: f64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.ic.seed()
    }
}

struct Entries {
    given: BTreeMap<String, String>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&str> {
        self.given
            .get(key)
            .map(String::as_str)
            .or_else(|| DEFAULTS.iter().find(|(k, _)| *k == key).and_then(|(_, v)| *v))
    }

    fn get<T: std::str::FromStr>(&self, key: &'static str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key).ok_or(ConfigError::MissingKey(key))?;
        raw.parse::<T>().map_err(|e| invalid(key, raw, e.to_string()))
    }

    fn finite(&self, key: &'static str) -> Result<f64, ConfigError> {
        let v: f64 = self.get(key)?;
        if !v.is_finite() {
            return Err(invalid(key, self.raw(key).unwrap_or(""), "must be finite"));
        }
        Ok(v)
    }
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { key: key.to_string(), value: value.to_string(), reason: reason.into() }
}

/// Parses and fully validates a configuration.
pub fn parse_config(text: &str, mode: ConfigMode) -> Result<RunConfig, ConfigError> {
    let mut given = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, v)| !k.is_empty() && !v.is_empty())
            .ok_or_else(|| ConfigError::Syntax { line: line_no, text: line.to_string() })?;
        if !DEFAULTS.iter().any(|(d, _)| *d == k) {
            return Err(ConfigError::UnknownKey { line: line_no, key: k.to_string() });
        }
        if given.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ConfigError::DuplicateKey { line: line_no, key: k.to_string() });
        }
    }
    let e = Entries { given };

    let grid_n: usize = e.get("grid_n")?;
    if grid_n < 16 || !grid_n.is_power_of_two() {
        return Err(invalid("grid_n", &grid_n.to_string(), "must be a power of two and at least 16"));
    }
    let box_len = e.finite("box_len")?;
    if box_len <= 0.0 {
        return Err(invalid("box_len", &box_len.to_string(), "must be positive"));
    }

    let params = ModelParams {
        a: e.finite("a")?,
        b: e.finite("b")?,
        c: e.finite("c")?,
        l_elastic: e.finite("l_elastic")?,
        gamma: e.finite("gamma")?,
        nu: e.finite("nu")?,
        xi: e.finite("xi")?,
    };
    if params.c <= 0.0 {
        return Err(ConfigError::CPositivity(params.c));
    }
    for (key, v) in [("l_elastic", params.l_elastic), ("gamma", params.gamma), ("nu", params.nu)] {
        if v <= 0.0 {
            return Err(invalid(key, &v.to_string(), "must be positive"));
        }
    }
    if mode == ConfigMode::Run && params.xi != 0.0 {
        return Err(ConfigError::NonzeroXi(params.xi));
    }

    let galerkin_n_cut = match e.raw("galerkin_n_cut") {
        None => None,
        Some(_) => {
            let n = e.finite("galerkin_n_cut")?;
            if n < 1.0 {
                return Err(invalid("galerkin_n_cut", &n.to_string(), "must be at least 1"));
            }
            Some(n)
        }
    };
    let scheme = SchemeConfig {
        dt: e.finite("dt")?,
        scheme: e.get::<Scheme>("scheme")?,
        t_end: e.finite("t_end")?,
        galerkin_n_cut,
        diag_every: e.get("diag_every")?,
        save_every: e.get("save_every")?,
    };
    if scheme.dt <= 0.0 {
        return Err(invalid("dt", &scheme.dt.to_string(), "must be positive"));
    }
    if scheme.t_end < 0.0 {
        return Err(invalid("t_end", &scheme.t_end.to_string(), "must be non-negative"));
    }
    for (key, v) in [("diag_every", scheme.diag_every), ("save_every", scheme.save_every)] {
        if v == 0 {
            return Err(invalid(key, "0", "must be at least 1"));
        }
    }

    let kind: String = e.get("ic")?;
    let allowed = IC_KEYS
        .iter()
        .find(|(k, _)| *k == kind)
        .map(|(_, keys)| *keys)
        .ok_or_else(|| invalid("ic", &kind, "expected random_band, uniaxial_texture, taylor_green_u or from_file"))?;
    for key in e.given.keys() {
        let ic_specific = IC_KEYS.iter().any(|(_, keys)| keys.contains(&key.as_str()));
        if ic_specific && !allowed.contains(&key.as_str()) {
            return Err(invalid(key, &e.given[key], format!("not used by ic = {kind}")));
        }
    }
    let nonneg = |key: &'static str| -> Result<f64, ConfigError> {
        let v = e.finite(key)?;
        if v < 0.0 {
            return Err(invalid(key, &v.to_string(), "must be non-negative"));
        }
        Ok(v)
    };
    let ic = match kind.as_str() {
        "random_band" => IcSpec::RandomBand {
            k_max: nonneg("ic.k_max")?,
            slope: e.finite("ic.slope")?,
            energy_q: nonneg("ic.energy_q")?,
            energy_u: nonneg("ic.energy_u")?,
            seed: e.get("seed")?,
        },
        "uniaxial_texture" => IcSpec::UniaxialTexture {
            s: e.finite("ic.s")?,
            theta0: e.finite("ic.theta0")?,
            amplitude: e.finite("ic.amplitude")?,
            modes: e.get("ic.modes")?,
            seed: e.get("seed")?,
        },
        "taylor_green_u" => IcSpec::TaylorGreenU { amplitude: e.finite("ic.amplitude")? },
        _ => IcSpec::FromFile { path: PathBuf::from(e.raw("ic.path").ok_or(ConfigError::MissingKey("ic.path"))?) },
    };

    let s_index = e.finite("s_index")?;
    if s_index <= 1.0 {
        return Err(invalid("s_index", &s_index.to_string(), "must exceed 1"));
    }
    let output_dir = PathBuf::from(e.raw("output_dir").unwrap_or("out"));

    Ok(RunConfig { grid_n, box_len, params, scheme, ic, s_index, output_dir })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = parse_config("grid_n = 32\n", ConfigMode::Run).unwrap();
        assert_eq!(cfg.grid_n, 32);
        assert_eq!(cfg.box_len, std::f64::consts::TAU);
        assert_eq!(cfg.params, ModelParams::default());
        assert_eq!(cfg.scheme, SchemeConfig::default());
        assert_eq!(cfg.ic, IcSpec::default());
        assert_eq!(cfg.s_index, 1.5);
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn comments_and_spacing() {
        let text = "# header\n  grid_n=64   # trailing\n\nscheme = if_euler\nic = taylor_green_u\nic.amplitude = 2\n";
        let cfg = parse_config(text, ConfigMode::Run).unwrap();
        assert_eq!(cfg.scheme.scheme, Scheme::IfEuler);
        assert_eq!(cfg.ic, IcSpec::TaylorGreenU { amplitude: 2.0 });
    }

    #[test]
    fn c_restriction_cites_the_key() {
        let err = parse_config("grid_n = 32\nc = -1\n", ConfigMode::Run).unwrap_err();
        assert_eq!(err, ConfigError::CPositivity(-1.0));
        assert!(err.to_string().contains("c > 0"));
    }

    #[test]
    fn xi_scope_rule() {
        let text = "grid_n = 32\nxi = 0.5\n";
        assert_eq!(parse_config(text, ConfigMode::Run).unwrap_err(), ConfigError::NonzeroXi(0.5));
        assert_eq!(parse_config(text, ConfigMode::CheckFormulas).unwrap().params.xi, 0.5);
    }

    #[test]
    fn distinct_errors() {
        let run = |t: &str| parse_config(t, ConfigMode::Run).unwrap_err();
        assert!(matches!(run(""), ConfigError::MissingKey("grid_n")));
        assert!(matches!(run("grid_n = 32\nfoo = 1"), ConfigError::UnknownKey { line: 2, .. }));
        assert!(matches!(run("grid_n = 32\ngrid_n = 64"), ConfigError::DuplicateKey { .. }));
        assert!(matches!(run("grid_n 32"), ConfigError::Syntax { line: 1, .. }));
        assert!(matches!(run("grid_n = 30"), ConfigError::InvalidValue { .. }));
        assert!(matches!(run("grid_n = 32\nscheme = rk4"), ConfigError::InvalidValue { .. }));
        assert!(matches!(run("grid_n = 32\ns_index = 1"), ConfigError::InvalidValue { .. }));
        assert!(matches!(run("grid_n = 32\ndt = 0"), ConfigError::InvalidValue { .. }));
        assert!(matches!(run("grid_n = 32\nic = from_file"), ConfigError::MissingKey("ic.path")));
        assert!(matches!(run("grid_n = 32\nic.path = x.qnsf"), ConfigError::InvalidValue { .. }));
    }
}
