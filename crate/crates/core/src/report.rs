//! Pass/fail records for identity sweeps.

/// One checked identity instance.
#[derive(Clone, Debug)]
pub struct Check {
    pub family: &'static str,
    pub instance: String,
    pub holds: bool,
}

/// The outcome of a sweep of identity checks.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, family: &'static str, instance: impl Into<String>, holds: bool) {
        self.checks.push(Check { family, instance: instance.into(), holds });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn mismatches(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    /// Family names in order of first appearance.
    pub fn families(&self) -> Vec<&'static str> {
        let mut f: Vec<&'static str> = Vec::new();
        for c in &self.checks {
            if !f.contains(&c.family) {
                f.push(c.family);
            }
        }
        f
    }

    /// Number of checks per family, in order of first appearance.
    pub fn counts(&self) -> Vec<(&'static str, usize, usize)> {
        self.families()
            .into_iter()
            .map(|fam| {
                let all: Vec<&Check> = self.checks.iter().filter(|c| c.family == fam).collect();
                (fam, all.iter().filter(|c| c.holds).count(), all.len())
            })
            .collect()
    }
}
