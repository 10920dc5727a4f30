use serde::Serialize;

use ics_core::bounds::{looseness_height_bound, slack_height_bound, HeightBound, MachineLowerBound, Precheck};
use ics_core::dp::PartStats;
use ics_core::instances::ReductionReport;
use ics_core::schedule::Placement;
use ics_core::{Instance, InstanceProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Feasible,
    Infeasible,
    Ok,
    Mismatch,
    Error,
}

#[derive(Debug, Default, Serialize)]
pub struct Bounds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub looseness: Option<HeightBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<HeightBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precheck: Option<Precheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub machine_lower_bound: Option<MachineLowerBound>,
}

impl Bounds {
    /// Both height bounds for the instance's own parameters, where defined.
    pub fn for_profile(p: &InstanceProfile) -> Self {
        if p.machines == 0 || !p.fits {
            return Self::default();
        }
        Self {
            looseness: looseness_height_bound(p.machines, p.ell.max(1), p.looseness).ok(),
            slack: Some(slack_height_bound(p.machines, p.slack as u64)),
            ..Self::default()
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct Stats {
    pub dp_invoked: bool,
    pub precheck_rejected: bool,
    pub memo_entries: u64,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<PartStats>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<InstanceProfile>,
    pub bounds: Bounds,
    pub answer: Answer,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<Placement>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimum_machines: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrosscheckSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub stats: Stats,
}

impl RunReport {
    pub fn new(command: String) -> Self {
        Self {
            command,
            profile: None,
            bounds: Bounds::default(),
            answer: Answer::Ok,
            schedule: None,
            minimum_machines: None,
            reduction: None,
            crosscheck: None,
            instance: None,
            error: None,
            stats: Stats::default(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.answer {
            Answer::Feasible | Answer::Ok => 0,
            Answer::Infeasible | Answer::Mismatch => 1,
            Answer::Error => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self) -> String {
        let mut out = Vec::new();
        out.push(format!("command: {}", self.command));
        if let Some(p) = &self.profile {
            out.push(format!(
                "profile: n={} m={} ell={} t_max={} lambda={} sigma={} h={}{}",
                p.n,
                p.machines,
                p.ell,
                p.t_max,
                ics_core::analysis::format_ratio(&p.looseness),
                p.slack,
                p.height,
                if p.fits {
                    ""
                } else {
                    " (some job does not fit its window)"
                }
            ));
        }
        if let Some(b) = &self.bounds.looseness {
            out.push(format!("looseness height bound: {}", b.value));
        }
        if let Some(b) = &self.bounds.slack {
            out.push(format!("slack height bound: {}", b.value));
        }
        if let Some(p) = &self.bounds.precheck {
            out.push(match p {
                Precheck::Pass { height, bound } => format!("precheck: pass (h={height} <= {bound})"),
                Precheck::Reject { height, bound } => format!("precheck: reject (h={height} > {bound})"),
                Precheck::Unschedulable { .. } => "precheck: reject (a job does not fit its window)".to_string(),
            });
        }
        if let Some(lb) = &self.bounds.machine_lower_bound {
            out.push(format!(
                "machine lower bound: {} (slack {}, looseness {}, load {})",
                lb.value, lb.slack_term, lb.looseness_term, lb.load_term
            ));
        }
        if let Some(r) = &self.reduction {
            out.push(format!("reduction: A={} B={} jobs={}", r.a_sum, r.big_b, r.jobs));
            out.push(format!("properties: {}", r.summary));
            if let Some(path) = &r.written_to {
                out.push(format!("wrote {path}"));
            }
        }
        if let Some(c) = &self.crosscheck {
            out.push(format!(
                "crosscheck: {} instances, {} mismatches, {} bound violations",
                c.instances, c.mismatches, c.bound_violations
            ));
        }
        if let Some(m) = self.minimum_machines {
            out.push(format!("minimum machines: {m}"));
        }
        if let Some(s) = &self.schedule {
            out.push("schedule:".to_string());
            for p in s {
                out.push(format!("  job {} on machine {} at {}", p.job, p.machine, p.start));
            }
        }
        if self.stats.dp_invoked || self.stats.precheck_rejected {
            let memo = if self.stats.parts.is_empty() {
                String::new()
            } else {
                format!(
                    ", {} memo entries over {} parts",
                    self.stats.memo_entries,
                    self.stats.parts.len()
                )
            };
            out.push(format!(
                "stats: dp {}{memo}, {:.3} ms",
                if self.stats.dp_invoked { "invoked" } else { "skipped" },
                self.stats.wall_time_ms
            ));
        }
        out.push(format!(
            "answer: {}",
            serde_json::to_value(self.answer)
                .expect("answer serializes")
                .as_str()
                .unwrap_or("?")
        ));
        out.join("\n")
    }
}

#[derive(Debug, Serialize)]
pub struct ReductionSummary {
    pub a_sum: i64,
    pub big_b: i64,
    pub trivial: bool,
    pub jobs: usize,
    pub properties: ReductionReport,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub written_to: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CrosscheckSummary {
    pub instances: u64,
    pub mismatches: usize,
    pub bound_violations: usize,
    pub feasible: usize,
    pub precheck_rejections: usize,
    /// Seeds of offending instances.
    pub failing_seeds: Vec<u64>,
}
