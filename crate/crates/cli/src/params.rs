//! Run parameters shared by `integrate` and `verify`: flags, an optional
//! `key = value` config file, and per-check defaults.

use std::collections::BTreeMap;
use std::path::Path;

use riccati_core::numerics::FunctionSpec;

use crate::CliError;

/// Keys accepted on the command line and in config files.
pub const KEYS: [&str; 11] = ["v", "w", "ics", "domain", "grid", "tol", "seed", "out", "alpha", "sign", "k"];

pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    raw: BTreeMap<String, String>,
}

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn from_config_text(text: &str) -> Result<Self, CliError> {
        let mut out = Params::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            out.set(k.trim().trim_start_matches("--"), v.trim())?;
        }
        Ok(out)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Params::from_config_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!("unknown parameter {key:?}")));
        }
        self.raw.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.raw.get(key).map(String::as_str)
    }

    /// `self` overlaid with `flags`; flags win.
    pub fn overlay(mut self, flags: &Params) -> Params {
        for (k, v) in &flags.raw {
            self.raw.insert(k.clone(), v.clone());
        }
        self
    }

    /// Parses every value once so malformed input is a usage error before
    /// anything runs.
    pub fn validate(&self) -> Result<(), CliError> {
        for (k, v) in &self.raw {
            match k.as_str() {
                "v" | "w" => drop(parse_spec(k, v)?),
                "ics" => drop(parse_reals(k, v)?),
                "domain" => drop(parse_domain(v)?),
                "grid" => drop(parse_grid(v)?),
                "tol" => drop(parse_tol(v)?),
                "seed" => drop(parse_seed(v)?),
                "alpha" | "k" => drop(parse_real(k, v)?),
                "sign" => drop(parse_sign(v)?),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn scope(&self) -> Scope<'_> {
        Scope { params: self, used: BTreeMap::new() }
    }
}

fn usage(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("--{key} {value:?}: {why}"))
}

fn parse_spec(key: &str, v: &str) -> Result<FunctionSpec, CliError> {
    v.parse().map_err(|e| usage(key, v, e))
}

fn parse_real(key: &str, v: &str) -> Result<f64, CliError> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(usage(key, v, "not a finite number")),
    }
}

fn parse_reals(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').map(|t| parse_real(key, t)).collect()
}

fn parse_domain(v: &str) -> Result<(f64, f64), CliError> {
    match parse_reals("domain", v)?.as_slice() {
        [a, b] if a < b => Ok((*a, *b)),
        _ => Err(usage("domain", v, "expected x0,x1 with x0 < x1")),
    }
}

fn parse_grid(v: &str) -> Result<usize, CliError> {
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(usage("grid", v, "expected an integer >= 2")),
    }
}

fn parse_tol(v: &str) -> Result<f64, CliError> {
    match parse_real("tol", v)? {
        t if t > 0.0 => Ok(t),
        _ => Err(usage("tol", v, "must be positive")),
    }
}

fn parse_seed(v: &str) -> Result<u64, CliError> {
    v.trim().parse().map_err(|_| usage("seed", v, "expected a non-negative integer"))
}

fn parse_sign(v: &str) -> Result<f64, CliError> {
    match v.trim() {
        "+" | "+1" | "1" | "plus" => Ok(1.0),
        "-" | "-1" | "minus" => Ok(-1.0),
        _ => Err(usage("sign", v, "expected + or -")),
    }
}

/// Typed access with defaults that records every value a check actually
/// used, so reports show the effective parameters.
#[derive(Debug)]
pub struct Scope<'a> {
    params: &'a Params,
    used: BTreeMap<String, String>,
}

impl Scope<'_> {
    fn raw(&mut self, key: &str, default: &str) -> String {
        let v = self.params.get(key).unwrap_or(default).to_string();
        self.used.insert(key.to_string(), v.clone());
        v
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.params.get(key).is_some()
    }

    pub fn spec(&mut self, key: &str, default: &str) -> Result<FunctionSpec, CliError> {
        let v = self.raw(key, default);
        parse_spec(key, &v)
    }

    pub fn reals(&mut self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        let v = self.raw(key, default);
        parse_reals(key, &v)
    }

    /// Like [`Scope::reals`] but with a required length.
    pub fn reals_n<const N: usize>(&mut self, key: &str, default: &str) -> Result<[f64; N], CliError> {
        let v = self.reals(key, default)?;
        v.try_into().map_err(|v: Vec<f64>| usage(key, &format!("{v:?}"), format!("expected {N} values")))
    }

    pub fn real(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.raw(key, &default.to_string());
        parse_real(key, &v)
    }

    pub fn domain(&mut self, default: (f64, f64)) -> Result<(f64, f64), CliError> {
        let v = self.raw("domain", &format!("{},{}", default.0, default.1));
        parse_domain(&v)
    }

    pub fn grid(&mut self, default: usize) -> Result<usize, CliError> {
        let v = self.raw("grid", &default.to_string());
        parse_grid(&v)
    }

    pub fn tol(&mut self) -> Result<f64, CliError> {
        let v = self.raw("tol", &DEFAULT_TOL.to_string());
        parse_tol(&v)
    }

    pub fn seed(&mut self, default: u64) -> Result<u64, CliError> {
        let v = self.raw("seed", &default.to_string());
        parse_seed(&v)
    }

    /// Both signs unless `--sign` is given.
    pub fn signs(&mut self) -> Result<Vec<f64>, CliError> {
        match self.params.get("sign") {
            Some(v) => {
                let s = parse_sign(v)?;
                self.used.insert("sign".into(), v.to_string());
                Ok(vec![s])
            }
            None => Ok(vec![1.0, -1.0]),
        }
    }

    /// Records a value the check fixes regardless of flags.
    pub fn fixed(&mut self, key: &str, value: impl std::fmt::Display) {
        self.used.insert(key.to_string(), value.to_string());
    }

    pub fn params(&self) -> BTreeMap<String, String> {
        self.used.clone()
    }

    /// Same recorded parameters plus `extra`.
    pub fn params_with(&self, extra: &[(&str, String)]) -> BTreeMap<String, String> {
        let mut p = self.used.clone();
        for (k, v) in extra {
            p.insert(k.to_string(), v.clone());
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_and_flags() {
        let cfg = Params::from_config_text("# comment\nv = const:2\n--tol=1e-8\n\nseed = 3").unwrap();
        let mut flags = Params::new();
        flags.set("tol", "1e-5").unwrap();
        let p = cfg.overlay(&flags);
        assert_eq!(p.get("v"), Some("const:2"));
        assert_eq!(p.get("tol"), Some("1e-5"));
        assert_eq!(p.get("seed"), Some("3"));
        assert!(p.validate().is_ok());
        assert!(Params::from_config_text("bogus = 1").is_err());
        assert!(Params::from_config_text("v const:1").is_err());
    }

    #[test]
    fn validation() {
        for (k, v) in [("domain", "1,0"), ("grid", "1"), ("tol", "-1"), ("sign", "x"), ("v", "cos"), ("ics", "1,a")] {
            let mut p = Params::new();
            p.set(k, v).unwrap();
            assert!(matches!(p.validate(), Err(CliError::Usage(_))), "{k} {v}");
        }
    }

    #[test]
    fn scope_records_defaults() {
        let mut p = Params::new();
        p.set("grid", "17").unwrap();
        let mut s = p.scope();
        assert_eq!(s.grid(5).unwrap(), 17);
        assert_eq!(s.domain((0.0, 1.5)).unwrap(), (0.0, 1.5));
        assert_eq!(s.reals_n::<2>("ics", "1,0").unwrap(), [1.0, 0.0]);
        assert!(s.reals_n::<3>("ics", "1,0").is_err());
        assert_eq!(s.signs().unwrap(), vec![1.0, -1.0]);
        let used = s.params();
        assert_eq!(used["grid"], "17");
        assert_eq!(used["domain"], "0,1.5");
        assert!(!used.contains_key("sign"));
    }
}
