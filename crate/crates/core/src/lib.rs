//! Exact feasibility for non-preemptive scheduling of jobs with release times
//! and deadlines on identical machines, parameterized by machine count and the
//! height of the window family.
//!
//! * [`instance`], [`analysis`], [`schedule`]: the data model, window
//!   statistics, and schedule checking.
//! * [`dp`]: the dynamic program over live-job subsets and idle offsets.
//! * [`bounds`]: height bounds from looseness and slack, precheck drivers, and
//!   machine minimization.
//! * [`oracle`]: brute-force deciders used as ground truth.
//! * [`instances`]: the bin-packing reduction and random generation.

use std::fmt;

use serde::Serialize;

pub mod analysis;
pub mod bounds;
pub mod dp;
pub mod instance;
pub mod instances;
pub mod oracle;
pub mod schedule;

pub use analysis::{profile, InstanceProfile, Looseness};
pub use dp::{decide, solve_with_witness, SolveError, Solver, SolverConfig, Strategy};
pub use instance::{validate, Instance, Job, JobId, Time};
pub use schedule::{verify_schedule, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(self) -> bool {
        self == Feasibility::Feasible
    }
}

impl From<bool> for Feasibility {
    fn from(ok: bool) -> Self {
        if ok {
            Feasibility::Feasible
        } else {
            Feasibility::Infeasible
        }
    }
}

impl fmt::Display for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feasibility::Feasible => "feasible",
            Feasibility::Infeasible => "infeasible",
        })
    }
}
