use std::collections::BTreeMap;

use serde::Serialize;

use riccati_core::diffpoly::DiffPoly;
use riccati_core::numerics::ResidualReport;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    pub x0: f64,
    pub x1: f64,
    pub n: usize,
}

impl GridInfo {
    pub fn of(grid: &[f64]) -> Option<GridInfo> {
        Some(GridInfo { x0: *grid.first()?, x1: *grid.last()?, n: grid.len() })
    }
}

/// One line of the `verify` report. Symbolic checks have no grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub grid: Option<GridInfo>,
    pub max_abs_residual: f64,
    pub rms_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl Entry {
    pub fn numeric(check: &str, params: BTreeMap<String, String>, grid: &[f64], r: &ResidualReport) -> Entry {
        Entry {
            check: check.to_string(),
            params,
            grid: GridInfo::of(grid),
            max_abs_residual: r.max_abs,
            rms_residual: r.rms,
            tolerance: r.tolerance,
            pass: r.pass,
            notes: Vec::new(),
        }
    }

    /// Passes iff `difference` is the zero polynomial; the residuals are
    /// taken over its coefficient magnitudes.
    pub fn exact(check: &str, params: BTreeMap<String, String>, difference: &DiffPoly) -> Entry {
        let r = ResidualReport::from_values(&difference.coefficient_magnitudes(), 0.0);
        let mut e = Entry::numeric(check, params, &[], &r);
        if !difference.is_zero() {
            e.notes.push(format!("nonzero difference: {difference}"));
        }
        e
    }

    /// Negative control: passes when the residual is at least `threshold`.
    pub fn control(check: &str, params: BTreeMap<String, String>, grid: &[f64], r: &ResidualReport, threshold: f64) -> Entry {
        let mut e = Entry::numeric(check, params, grid, r);
        e.tolerance = threshold;
        e.pass = r.max_abs >= threshold;
        e.notes.push("negative control: passes when the residual reaches the tolerance".into());
        e
    }

    /// An entry for a check that stopped with an error.
    pub fn failed(check: &str, message: String) -> Entry {
        Entry {
            check: check.to_string(),
            params: BTreeMap::new(),
            grid: None,
            max_abs_residual: f64::INFINITY,
            rms_residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            notes: vec![message],
        }
    }

    pub fn note(mut self, n: impl Into<String>) -> Entry {
        self.notes.push(n.into());
        self
    }

    pub fn notes(mut self, ns: impl IntoIterator<Item = String>) -> Entry {
        self.notes.extend(ns);
        self
    }
}

/// Orders entries by check name, then parameters; equal keys keep their
/// production order.
pub fn sort_entries(entries: &mut [Entry]) {
    entries.sort_by(|a, b| a.check.cmp(&b.check).then_with(|| a.params.cmp(&b.params)));
}

pub fn to_json(entries: &[Entry]) -> String {
    let mut s = serde_json::to_string_pretty(entries).expect("entries serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_names_and_order() {
        let e = Entry::exact("x", BTreeMap::new(), &DiffPoly::zero());
        let v: serde_json::Value = serde_json::from_str(&to_json(&[e])).unwrap();
        let keys: Vec<&str> = v[0].as_object().unwrap().keys().map(String::as_str).collect();
        let mut want = vec!["check", "params", "grid", "max_abs_residual", "rms_residual", "tolerance", "pass", "notes"];
        want.sort();
        let mut got = keys.clone();
        got.sort();
        assert_eq!(got, want);
        assert_eq!(v[0]["pass"], true);
        assert_eq!(v[0]["max_abs_residual"], 0.0);
        assert!(v[0]["grid"].is_null());
    }

    #[test]
    fn exact_difference_fails() {
        let e = Entry::exact("x", BTreeMap::new(), &(DiffPoly::dep("u", 0) * DiffPoly::rat(-3, 2)));
        assert!(!e.pass);
        assert_eq!(e.max_abs_residual, 1.5);
        assert_eq!(e.notes.len(), 1);
    }

    #[test]
    fn ordering() {
        let mut p1 = BTreeMap::new();
        p1.insert("sign".to_string(), "-1".to_string());
        let mut entries = vec![
            Entry::failed("b", "x".into()),
            Entry::exact("a", p1, &DiffPoly::zero()),
            Entry::exact("a", BTreeMap::new(), &DiffPoly::zero()),
        ];
        sort_entries(&mut entries);
        assert_eq!(entries[0].check, "a");
        assert!(entries[0].params.is_empty());
        assert_eq!(entries[2].check, "b");
    }
}
