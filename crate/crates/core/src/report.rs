use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `residual <= tolerance`.
    Upper,
    /// Passes when `residual > tolerance`: an obstruction that must be present.
    Lower,
}

/// One named residual compared against its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub points_checked: usize,
    pub bound: Bound,
}

impl CheckEntry {
    /// `pass` is `residual <= tolerance`; a NaN residual fails.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            points_checked: 1,
            bound: Bound::Upper,
        }
    }

    /// Entry that passes when the residual is strictly above `threshold` (obstruction present).
    pub fn exceeds(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance: threshold,
            pass: residual > threshold,
            points_checked: 1,
            bound: Bound::Lower,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.push(CheckEntry::new(name, residual, tolerance));
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.get(name).map(|e| e.residual)
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    /// Folds another point's report into this one: entries with equal names keep the worst
    /// residual and add their point counts; new names are appended in order.
    pub fn merge_max(&mut self, other: &VerificationReport) {
        for e in &other.entries {
            match self.entries.iter_mut().find(|x| x.name == e.name) {
                Some(x) => {
                    let worse = match (x.pass, e.pass) {
                        (true, false) => true,
                        (false, true) => false,
                        _ => match x.bound {
                            Bound::Upper => e.residual > x.residual || e.residual.is_nan(),
                            Bound::Lower => e.residual < x.residual,
                        },
                    };
                    let count = x.points_checked + e.points_checked;
                    if worse {
                        *x = e.clone();
                    }
                    x.points_checked = count;
                }
                None => self.entries.push(e.clone()),
            }
        }
    }
}
