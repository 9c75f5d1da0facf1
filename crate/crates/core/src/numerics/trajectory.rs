use serde::Serialize;

/// Integrator settings and step statistics attached to a trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IntegratorMeta {
    pub rtol: f64,
    pub atol: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Solution samples on a strictly increasing grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub names: Vec<String>,
    pub meta: IntegratorMeta,
}

impl Trajectory {
    pub fn new(names: Vec<String>, meta: IntegratorMeta) -> Self {
        Trajectory { grid: Vec::new(), states: Vec::new(), names, meta }
    }

    /// Builds a trajectory from precomputed samples.
    pub fn from_samples(names: Vec<String>, grid: Vec<f64>, states: Vec<Vec<f64>>) -> Self {
        assert_eq!(grid.len(), states.len());
        Trajectory { grid, states, names, meta: IntegratorMeta::default() }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn push(&mut self, x: f64, y: Vec<f64>) {
        debug_assert_eq!(y.len(), self.names.len());
        debug_assert!(self.grid.last().is_none_or(|last| x > *last));
        self.grid.push(x);
        self.states.push(y);
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// One state component over the whole grid.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    pub fn component_named(&self, name: &str) -> Option<Vec<f64>> {
        self.index_of(name).map(|i| self.component(i))
    }

    pub fn x0(&self) -> f64 {
        self.grid[0]
    }

    pub fn x1(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Samples with `x <= x_max`.
    pub fn truncated(&self, x_max: f64) -> Trajectory {
        let n = self.grid.iter().take_while(|x| **x <= x_max).count();
        Trajectory {
            grid: self.grid[..n].to_vec(),
            states: self.states[..n].to_vec(),
            names: self.names.clone(),
            meta: self.meta.clone(),
        }
    }

    /// Samples with indices in `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Trajectory {
        Trajectory {
            grid: self.grid[range.clone()].to_vec(),
            states: self.states[range].to_vec(),
            names: self.names.clone(),
            meta: self.meta.clone(),
        }
    }

    /// Same grid with extra components appended.
    pub fn with_columns(&self, names: &[&str], cols: &[Vec<f64>]) -> Trajectory {
        let mut out = self.clone();
        out.names.extend(names.iter().map(|s| s.to_string()));
        for (i, s) in out.states.iter_mut().enumerate() {
            s.extend(cols.iter().map(|c| c[i]));
        }
        out
    }
}

/// `n` equally spaced points from `x0` to `x1` inclusive.
pub fn uniform_grid(x0: f64, x1: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    let h = (x1 - x0) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { x1 } else { x0 + h * i as f64 }).collect()
}

/// Longest run of consecutive `true` entries, as an index range.
pub fn longest_run(mask: &[bool]) -> Option<std::ops::Range<usize>> {
    let mut best: Option<std::ops::Range<usize>> = None;
    let mut start = None;
    for (i, ok) in mask.iter().chain(std::iter::once(&false)).enumerate() {
        match (ok, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if best.as_ref().is_none_or(|b| i - s > b.len()) {
                    best = Some(s..i);
                }
                start = None;
            }
            _ => {}
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs() {
        assert_eq!(longest_run(&[true, false, true, true, false]), Some(2..4));
        assert_eq!(longest_run(&[true, true]), Some(0..2));
        assert_eq!(longest_run(&[false]), None);
        assert_eq!(longest_run(&[]), None);
    }

    #[test]
    fn grid_and_truncation() {
        let g = uniform_grid(0.0, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let t = Trajectory::from_samples(vec!["a".into()], g.clone(), g.iter().map(|x| vec![*x]).collect());
        assert_eq!(t.truncated(0.6).len(), 3);
        assert_eq!(t.with_columns(&["b"], &[vec![1.0; 5]]).states[2], vec![0.5, 1.0]);
    }
}
