//! Experiment configuration: built-in defaults, `key = value` files and
//! command-line overrides, applied in that order.

use std::path::{Path, PathBuf};

use crate::capacity::DEFAULT_TOL_BITS;
use crate::error::{Error, Result};

use super::format::format_sig;

/// Fully resolved parameters for one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub km: f64,
    pub s0: f64,
    pub vmax: f64,
    pub volume: f64,
    pub delta_list: Vec<f64>,
    pub q_list: Vec<f64>,
    pub tol_bits: f64,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
    pub emit_plot_script: bool,
    pub e0: Option<f64>,
    pub k1: Option<f64>,
    pub k_minus1: Option<f64>,
    pub k2: Option<f64>,
    pub full_ode: bool,
}

/// Partial configuration; every `Some` replaces the corresponding field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub km: Option<f64>,
    pub s0: Option<f64>,
    pub vmax: Option<f64>,
    pub volume: Option<f64>,
    pub delta: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub tol_bits: Option<f64>,
    pub out: Option<PathBuf>,
    pub plot_script: Option<bool>,
    pub e0: Option<f64>,
    pub k1: Option<f64>,
    pub k_minus1: Option<f64>,
    pub k2: Option<f64>,
    pub full_ode: Option<bool>,
}

/// `0.01, 0.02, ..., 0.5`.
pub fn default_delta_grid() -> Vec<f64> {
    (1..=50).map(|k| k as f64 / 100.0).collect()
}

pub const DEFAULT_Q_LIST: [f64; 6] = [0.1, 0.25, 0.5, 0.75, 0.9, 1.0];

impl ExperimentConfig {
    /// `Km = 0.1, S0 = 10, Vmax = 1, V = 100` with the default (delta, q) grid.
    pub fn fig2_defaults() -> Self {
        Self {
            km: 0.1,
            s0: 10.0,
            vmax: 1.0,
            volume: 100.0,
            delta_list: default_delta_grid(),
            q_list: DEFAULT_Q_LIST.to_vec(),
            tol_bits: DEFAULT_TOL_BITS,
            output_path: None,
            emit_plot_script: false,
            e0: None,
            k1: None,
            k_minus1: None,
            k2: None,
            full_ode: false,
        }
    }

    /// `Km = 0.1, S0 = 30, Vmax = 1`, delta in `{0.1, ..., 0.5}`.
    pub fn table2_defaults() -> Self {
        Self {
            s0: 30.0,
            delta_list: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            ..Self::fig2_defaults()
        }
    }

    pub fn apply(&mut self, o: ConfigOverrides) {
        macro_rules! set {
            ($($field:ident <- $src:ident),* $(,)?) => {
                $(if let Some(v) = o.$src { self.$field = v; })*
            };
        }
        set!(km <- km, s0 <- s0, vmax <- vmax, volume <- volume, delta_list <- delta,
             q_list <- q, tol_bits <- tol_bits, emit_plot_script <- plot_script,
             full_ode <- full_ode);
        if o.out.is_some() {
            self.output_path = o.out;
        }
        if o.e0.is_some() {
            self.e0 = o.e0;
        }
        if o.k1.is_some() {
            self.k1 = o.k1;
        }
        if o.k_minus1.is_some() {
            self.k_minus1 = o.k_minus1;
        }
        if o.k2.is_some() {
            self.k2 = o.k2;
        }
    }

    /// Checks every invariant, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("km", self.km), ("s0", self.s0), ("vmax", self.vmax), ("volume", self.volume)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(name, format!("must be positive and finite, got {v}")));
            }
        }
        if self.delta_list.is_empty() {
            return Err(Error::config("delta", "list must not be empty"));
        }
        for &d in &self.delta_list {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::config("delta", format!("must be positive, got {d}")));
            }
            if d >= self.s0 {
                return Err(Error::config(
                    "delta",
                    format!("infeasible perturbation budget: delta = {d} must be below s0 = {}", self.s0),
                ));
            }
        }
        if self.q_list.is_empty() {
            return Err(Error::config("q", "list must not be empty"));
        }
        if let Some(&q) = self.q_list.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::config("q", format!("must lie in [0, 1], got {q}")));
        }
        if !(self.tol_bits > 0.0 && self.tol_bits.is_finite()) {
            return Err(Error::config("tol-bits", format!("must be positive, got {}", self.tol_bits)));
        }
        if let Some(e0) = self.e0 {
            if !(e0 >= 0.0 && e0.is_finite()) {
                return Err(Error::config("e0", format!("must be non-negative, got {e0}")));
            }
        }
        for (name, v) in [("k1", self.k1), ("k-minus1", self.k_minus1), ("k2", self.k2)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::config(name, format!("must be positive and finite, got {v}")));
                }
            }
        }
        Ok(())
    }

    /// The effective configuration as `key = value` lines, in config-file syntax.
    pub fn describe(&self) -> Vec<String> {
        let list = |v: &[f64]| v.iter().map(|&x| format_sig(x)).collect::<Vec<_>>().join(",");
        let mut lines = vec![
            format!("km = {}", format_sig(self.km)),
            format!("s0 = {}", format_sig(self.s0)),
            format!("vmax = {}", format_sig(self.vmax)),
            format!("volume = {}", format_sig(self.volume)),
            format!("delta = {}", list(&self.delta_list)),
            format!("q = {}", list(&self.q_list)),
            format!("tol-bits = {}", format_sig(self.tol_bits)),
        ];
        for (name, v) in [("e0", self.e0), ("k1", self.k1), ("k-minus1", self.k_minus1), ("k2", self.k2)] {
            if let Some(v) = v {
                lines.push(format!("{name} = {}", format_sig(v)));
            }
        }
        lines
    }
}

/// Parses `key = value` lines; `#` starts a comment. Keys are the long flag
/// names (`tol-bits`, `k-minus1`, ...); underscores are accepted for hyphens.
pub fn parse_config(text: &str) -> Result<ConfigOverrides> {
    let mut o = ConfigOverrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let num = || parse_number(&key, value);
        match key.as_str() {
            "km" => o.km = Some(num()?),
            "s0" => o.s0 = Some(num()?),
            "vmax" => o.vmax = Some(num()?),
            "volume" => o.volume = Some(num()?),
            "delta" => o.delta = Some(parse_list(&key, value)?),
            "q" => o.q = Some(parse_list(&key, value)?),
            "tol-bits" => o.tol_bits = Some(num()?),
            "out" => o.out = Some(PathBuf::from(value)),
            "plot-script" => o.plot_script = Some(parse_bool(&key, value)?),
            "e0" => o.e0 = Some(num()?),
            "k1" => o.k1 = Some(num()?),
            "k-minus1" => o.k_minus1 = Some(num()?),
            "k2" => o.k2 = Some(num()?),
            "full-ode" => o.full_ode = Some(parse_bool(&key, value)?),
            _ => return Err(Error::config(key.clone(), "unknown configuration key")),
        }
    }
    Ok(o)
}

pub fn load_config(path: &Path) -> Result<ConfigOverrides> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("not a number: `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_number(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::config(key, format!("not a boolean: `{value}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_syntax() {
        let text = "# sweep\nkm = 0.2\ns0=12 # inline\n\ndelta = 0.1, 0.2\nq_list_is_not_a_key = 1\n";
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("q-list-is-not-a-key"));

        let o = parse_config("km = 0.2\ns0=12 # inline\ndelta = 0.1, 0.2\ntol_bits = 1e-8\nplot-script = true\n")
            .unwrap();
        assert_eq!(o.km, Some(0.2));
        assert_eq!(o.s0, Some(12.0));
        assert_eq!(o.delta, Some(vec![0.1, 0.2]));
        assert_eq!(o.tol_bits, Some(1e-8));
        assert_eq!(o.plot_script, Some(true));
    }

    #[test]
    fn flags_override_file() {
        let mut cfg = ExperimentConfig::fig2_defaults();
        cfg.apply(parse_config("km = 0.2\nvolume = 50").unwrap());
        cfg.apply(ConfigOverrides {
            km: Some(0.3),
            ..Default::default()
        });
        assert_eq!(cfg.km, 0.3);
        assert_eq!(cfg.volume, 50.0);
        assert_eq!(cfg.s0, 10.0);
    }

    #[test]
    fn validation_names_field() {
        let mut cfg = ExperimentConfig::fig2_defaults();
        cfg.delta_list = vec![0.1, 10.0];
        let err = cfg.validate().unwrap_err();
        assert!(matches!(&err, Error::InvalidConfig { field, .. } if field == "delta"));
        assert!(err.to_string().contains("infeasible perturbation budget"));

        let mut cfg = ExperimentConfig::fig2_defaults();
        cfg.q_list = vec![1.2];
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { field, .. }) if field == "q"));

        let mut cfg = ExperimentConfig::fig2_defaults();
        cfg.volume = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { field, .. }) if field == "volume"));

        assert!(ExperimentConfig::fig2_defaults().validate().is_ok());
        assert!(ExperimentConfig::table2_defaults().validate().is_ok());
    }

    #[test]
    fn describe_round_trips_through_parser() {
        let cfg = ExperimentConfig::table2_defaults();
        let text = cfg.describe().join("\n");
        let mut back = ExperimentConfig::fig2_defaults();
        back.apply(parse_config(&text).unwrap());
        assert_eq!(back, cfg);
    }
}
