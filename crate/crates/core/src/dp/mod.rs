//! Exact feasibility by dynamic programming over live-job subsets and
//! machine idle offsets.
//!
//! [`Solver`] splits an instance at idle gaps, moves each part to start at
//! time 0, and runs one table per part. Two evaluators share the recurrence:
//! [`DpTable`] memoizes every `(t, S, b)` entry it touches, while
//! [`FrontierTable`] stores only the minimal 1-entries of each `(t, S)` slice
//! and scales to much longer windows. Both are checked against each other and
//! against the brute-force oracle in the test suites.

mod frontier;
mod table;
mod timeline;

use serde::Serialize;
use thiserror::Error;

pub use frontier::FrontierTable;
pub use table::{DpState, DpTable, Rule};

use crate::analysis::split_at_gaps;
use crate::instance::{validate, Instance, JobId, Time, ValidationReport};
use crate::schedule::Schedule;
use crate::Feasibility;

/// Default ceiling on the projected state count of one part.
pub const DEFAULT_BUDGET: u64 = 1 << 40;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("malformed instance: {0}")]
    Malformed(ValidationReport),
    #[error("budget exceeded: {projected} projected states > budget {budget}")]
    BudgetExceeded { projected: u128, budget: u64 },
    #[error("invalid DP state: {0}")]
    InvalidState(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Minimal-vector antichains per `(t, S)`.
    #[default]
    Frontier,
    /// Plain memo over every `(t, S, b)`.
    Table,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub budget: u64,
    pub strategy: Strategy,
    /// Record enough to rebuild a schedule.
    pub witness: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            strategy: Strategy::default(),
            witness: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartStats {
    pub jobs: usize,
    /// Machines the table was built for: `min(m, jobs)`.
    pub machines: usize,
    pub t_max: Time,
    pub ell: Time,
    pub height: usize,
    pub entries: u64,
    /// `(t_max + 1) * 2^h * (2ℓ + 1)^m` for this part.
    #[serde(serialize_with = "serialize_u128")]
    pub entry_bound: u128,
    pub feasible: bool,
}

fn serialize_u128<S: serde::Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub dp_invoked: bool,
    pub parts: Vec<PartStats>,
}

impl SolveStats {
    pub fn memo_entries(&self) -> u64 {
        self.parts.iter().map(|p| p.entries).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub feasibility: Feasibility,
    /// Present iff feasible and a witness was requested.
    pub schedule: Option<Schedule>,
    pub stats: SolveStats,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Solver {
    pub config: SolverConfig,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Self { config }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.config.budget = budget;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.config.strategy = strategy;
        self
    }

    pub fn with_witness(mut self, witness: bool) -> Self {
        self.config.witness = witness;
        self
    }

    pub fn solve(&self, instance: &Instance) -> Result<SolveOutcome, SolveError> {
        let report = validate(instance);
        if !report.is_well_formed() {
            return Err(SolveError::Malformed(report));
        }
        let mut stats = SolveStats::default();
        if report.has_short_window() {
            return Ok(SolveOutcome {
                feasibility: Feasibility::Infeasible,
                schedule: None,
                stats,
            });
        }

        let mut schedule = self.config.witness.then(Schedule::new);
        for part in split_at_gaps(instance) {
            let origin = part.jobs.iter().map(|j| j.release).min().unwrap_or(0);
            // Machines beyond the part's job count stay idle.
            let machines = instance.machines.min(part.len());
            let local = part.shifted(-origin).with_machines(machines);

            stats.dp_invoked = true;
            let (feasible, placed, part_stats) = self.solve_part(&local)?;
            stats.parts.push(part_stats);
            if !feasible {
                return Ok(SolveOutcome {
                    feasibility: Feasibility::Infeasible,
                    schedule: None,
                    stats,
                });
            }
            if let (Some(schedule), Some(placed)) = (schedule.as_mut(), placed) {
                for (job, machine, start) in placed {
                    schedule.assign(job, machine, start + origin);
                }
            }
        }
        Ok(SolveOutcome {
            feasibility: Feasibility::Feasible,
            schedule,
            stats,
        })
    }

    #[allow(clippy::type_complexity)]
    fn solve_part(&self, part: &Instance) -> Result<(bool, Option<Vec<(JobId, usize, Time)>>, PartStats), SolveError> {
        let profile = crate::analysis::profile(part);
        let budget = self.config.budget;
        let (feasible, placed, entries, entry_bound) = match self.config.strategy {
            Strategy::Table => {
                let mut table = DpTable::new(part, budget, self.config.witness)?;
                let feasible = table.decide();
                let placed = if self.config.witness { table.witness() } else { None };
                (feasible, placed, table.entries(), table.entry_bound())
            }
            Strategy::Frontier => {
                let mut table = FrontierTable::new(part, budget)?;
                let feasible = table.decide();
                let placed = if self.config.witness { table.witness() } else { None };
                (feasible, placed, table.entries(), table.entry_bound())
            }
        };
        let stats = PartStats {
            jobs: part.len(),
            machines: part.machines,
            t_max: profile.t_max,
            ell: profile.ell,
            height: profile.height,
            entries,
            entry_bound,
            feasible,
        };
        Ok((feasible, placed, stats))
    }
}

pub fn decide(instance: &Instance) -> Result<Feasibility, SolveError> {
    Ok(Solver::default().solve(instance)?.feasibility)
}

pub fn solve_with_witness(instance: &Instance) -> Result<Option<Schedule>, SolveError> {
    Ok(Solver::default().with_witness(true).solve(instance)?.schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;
    use crate::schedule::verify_schedule;

    fn i1() -> Instance {
        Instance::new(1, vec![Job::new(0, 0, 2, 2)])
    }

    fn i2(m: usize) -> Instance {
        Instance::new(m, vec![Job::new(0, 0, 3, 2), Job::new(1, 1, 3, 2)])
    }

    fn both() -> [Solver; 2] {
        [
            Solver::default().with_witness(true),
            Solver::default().with_witness(true).with_strategy(Strategy::Table),
        ]
    }

    #[test]
    fn single_job_witness() {
        for solver in both() {
            let out = solver.solve(&i1()).unwrap();
            assert_eq!(out.feasibility, Feasibility::Feasible);
            let s = out.schedule.unwrap();
            assert_eq!(s.get(0).unwrap().machine, 1);
            assert_eq!(s.get(0).unwrap().start, 0);
        }
    }

    #[test]
    fn overlapping_pair() {
        for solver in both() {
            let out = solver.solve(&i2(1)).unwrap();
            assert_eq!(out.feasibility, Feasibility::Infeasible);
            assert!(out.schedule.is_none());
            let out = solver.solve(&i2(2)).unwrap();
            let s = out.schedule.unwrap();
            assert!(verify_schedule(&i2(2), &s));
            assert_eq!(s.get(1).unwrap().start, 1);
        }
    }

    #[test]
    fn empty_and_short_window() {
        assert_eq!(decide(&Instance::new(2, vec![])).unwrap(), Feasibility::Feasible);
        let short = Instance::new(4, vec![Job::new(0, 0, 2, 3)]);
        let out = Solver::default().solve(&short).unwrap();
        assert_eq!(out.feasibility, Feasibility::Infeasible);
        assert!(!out.stats.dp_invoked);
        assert!(matches!(
            decide(&Instance::new(0, vec![])),
            Err(SolveError::Malformed(_))
        ));
    }

    #[test]
    fn gaps_are_solved_separately() {
        let inst = Instance::new(
            1,
            vec![Job::new(0, 0, 2, 1), Job::new(1, 100, 102, 2), Job::new(2, 100, 103, 1)],
        );
        for solver in both() {
            let out = solver.solve(&inst).unwrap();
            assert_eq!(out.stats.parts.len(), 2);
            assert_eq!(out.stats.parts[1].t_max, 0);
            assert!(verify_schedule(&inst, &out.schedule.unwrap()));
        }
    }

    #[test]
    fn budget_error_is_reported() {
        let inst = Instance::new(3, (0..3).map(|id| Job::new(id, 0, 1000, 10)).collect());
        let err = Solver::default().with_budget(1000).solve(&inst).unwrap_err();
        assert!(matches!(err, SolveError::BudgetExceeded { budget: 1000, .. }));
    }
}
