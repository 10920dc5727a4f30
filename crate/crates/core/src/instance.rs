//! Jobs, instances, and structural validation.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Integer time point. All times handled by this crate are non-negative.
pub type Time = i64;

/// Job identifier as it appears in instance files.
pub type JobId = u64;

/// Exclusive upper limit for any deadline. Derived quantities (sums of windows,
/// products in the bounds) stay far away from `i64` overflow below this.
pub const TIME_LIMIT: Time = 1 << 62;

/// A single job with its half-open time window `[release, deadline)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub id: JobId,
    pub release: Time,
    pub deadline: Time,
    pub processing: Time,
}

impl Job {
    pub fn new(id: JobId, release: Time, deadline: Time, processing: Time) -> Self {
        Self {
            id,
            release,
            deadline,
            processing,
        }
    }

    /// Length `d - t` of the time window.
    pub fn window(&self) -> Time {
        self.deadline - self.release
    }

    /// Idle allowance `(d - t) - p` inside the window. Negative when the job cannot fit.
    pub fn slack(&self) -> Time {
        self.window() - self.processing
    }

    /// Whether the job's window contains `t`.
    pub fn is_live_at(&self, t: Time) -> bool {
        self.release <= t && t < self.deadline
    }

    pub fn fits_window(&self) -> bool {
        self.processing <= self.window()
    }
}

/// A set of jobs to be placed on `machines` identical machines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub machines: usize,
    pub jobs: Vec<Job>,
}

impl Instance {
    pub fn new(machines: usize, jobs: Vec<Job>) -> Self {
        Self { machines, jobs }
    }

    /// Same jobs, different machine count.
    pub fn with_machines(&self, machines: usize) -> Self {
        Self {
            machines,
            jobs: self.jobs.clone(),
        }
    }

    /// Copy with every release and deadline moved by `delta`.
    pub fn shifted(&self, delta: Time) -> Self {
        let jobs = self
            .jobs
            .iter()
            .map(|j| Job::new(j.id, j.release + delta, j.deadline + delta, j.processing))
            .collect();
        Self::new(self.machines, jobs)
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.jobs.iter().find(|j| j.id == id)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }
}

/// One problem found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoMachines,
    DuplicateId {
        job: JobId,
    },
    NegativeTime {
        job: JobId,
    },
    TimeOutOfRange {
        job: JobId,
    },
    EmptyWindow {
        job: JobId,
    },
    NonPositiveProcessing {
        job: JobId,
    },
    /// The processing time exceeds the window length. The instance is well
    /// formed but can never be scheduled.
    WindowTooShort {
        job: JobId,
    },
}

impl Violation {
    /// Structural violations make the instance unusable; a short window only
    /// makes it infeasible.
    pub fn is_structural(&self) -> bool {
        !matches!(self, Violation::WindowTooShort { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoMachines => write!(f, "machines < 1"),
            Violation::DuplicateId { job } => write!(f, "duplicate id {job}"),
            Violation::NegativeTime { job } => write!(f, "job {job}: negative time"),
            Violation::TimeOutOfRange { job } => write!(f, "job {job}: deadline must be < 2^62"),
            Violation::EmptyWindow { job } => write!(f, "job {job}: deadline <= release"),
            Violation::NonPositiveProcessing { job } => write!(f, "job {job}: processing < 1"),
            Violation::WindowTooShort { job } => write!(f, "job {job}: window too short"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// No violations at all.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// No structural violations; short windows are tolerated.
    pub fn is_well_formed(&self) -> bool {
        self.violations.iter().all(|v| !v.is_structural())
    }

    pub fn has_short_window(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::WindowTooShort { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

pub fn validate(instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    if instance.machines < 1 {
        violations.push(Violation::NoMachines);
    }
    let mut seen = HashSet::with_capacity(instance.jobs.len());
    for job in &instance.jobs {
        let id = job.id;
        if !seen.insert(id) {
            violations.push(Violation::DuplicateId { job: id });
        }
        if job.release < 0 || job.deadline < 0 {
            violations.push(Violation::NegativeTime { job: id });
        }
        if job.deadline >= TIME_LIMIT {
            violations.push(Violation::TimeOutOfRange { job: id });
        }
        if job.deadline <= job.release {
            violations.push(Violation::EmptyWindow { job: id });
        }
        if job.processing < 1 {
            violations.push(Violation::NonPositiveProcessing { job: id });
        } else if job.deadline > job.release && !job.fits_window() {
            violations.push(Violation::WindowTooShort { job: id });
        }
    }
    ValidationReport { violations }
}
