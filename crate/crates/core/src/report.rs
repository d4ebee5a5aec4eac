use serde::Serialize;

/// One named sub-check: the largest violation seen and where.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub worst_x: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        CheckEntry {
            name: name.into(),
            residual: 0.0,
            worst_x: f64::NAN,
            tolerance,
            passed: true,
        }
    }

    /// Record a violation magnitude at `x`; NaN always wins.
    pub fn observe(&mut self, residual: f64, x: f64) {
        if self.residual.is_nan() {
            return;
        }
        if residual > self.residual
            || residual.is_nan()
            || self.worst_x.is_nan() && residual == self.residual
        {
            self.residual = residual;
            self.worst_x = x;
        }
    }

    pub fn finish(mut self) -> Self {
        self.passed = self.residual <= self.tolerance;
        self
    }
}

/// Result of a grid check. `sup_residual`/`worst_x` come from the sub-check
/// with the largest residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub sup_residual: f64,
    pub worst_x: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_inf: Option<f64>,
    pub details: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn from_entries(check: impl Into<String>, details: Vec<CheckEntry>) -> Self {
        let details: Vec<CheckEntry> = details.into_iter().map(CheckEntry::finish).collect();
        let worst = details
            .iter()
            .filter(|e| !e.residual.is_nan())
            .max_by(|a, b| a.residual.total_cmp(&b.residual));
        let nan = details.iter().find(|e| e.residual.is_nan());
        let (sup_residual, worst_x) = match (nan, worst) {
            (Some(e), _) => (f64::NAN, e.worst_x),
            (None, Some(e)) => (e.residual, e.worst_x),
            (None, None) => (0.0, f64::NAN),
        };
        CheckReport {
            check: check.into(),
            sup_residual,
            worst_x,
            passed: details.iter().all(|e| e.passed),
            q_inf: None,
            details,
            notes: Vec::new(),
        }
    }

    pub fn with_q_inf(mut self, q_inf: f64) -> Self {
        self.q_inf = Some(q_inf);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.details.iter().find(|e| e.name == name)
    }

    /// Residual of one named sub-check; panics if the check is absent.
    pub fn residual(&self, name: &str) -> f64 {
        self.entry(name)
            .unwrap_or_else(|| panic!("no sub-check named {name} in {}", self.check))
            .residual
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_iff_all_entries_pass() {
        let mut a = CheckEntry::new("a", 1e-3);
        a.observe(1e-4, 2.0);
        let mut b = CheckEntry::new("b", 1e-12);
        b.observe(1e-13, 5.0);
        let r = CheckReport::from_entries("t", vec![a.clone(), b.clone()]);
        assert!(r.passed);
        assert_eq!((r.sup_residual, r.worst_x), (1e-4, 2.0));

        b.observe(1e-11, 6.0);
        let r = CheckReport::from_entries("t", vec![a, b]);
        assert!(!r.passed);
        assert_eq!(r.entry("b").unwrap().worst_x, 6.0);
    }

    #[test]
    fn nan_fails() {
        let mut a = CheckEntry::new("a", 1.0);
        a.observe(f64::NAN, 3.0);
        a.observe(0.5, 4.0);
        let r = CheckReport::from_entries("t", vec![a]);
        assert!(!r.passed);
        assert!(r.sup_residual.is_nan());
        assert_eq!(r.worst_x, 3.0);
    }

    #[test]
    fn json_key_order() {
        let r = CheckReport::from_entries("minssd", vec![CheckEntry::new("x", 0.0)]);
        let s = serde_json::to_string(&r).unwrap();
        let keys = [
            "\"check\"",
            "\"sup_residual\"",
            "\"worst_x\"",
            "\"passed\"",
            "\"details\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{s}");
    }
}
