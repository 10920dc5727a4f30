//! Schedules and their verification against an instance.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, JobId, Time};

/// Where and when a job runs. Machines are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub machine: usize,
    pub start: Time,
}

/// A feasibility witness: one assignment per job.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    pub assignments: BTreeMap<JobId, Assignment>,
}

/// Serialized form of one assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub job: JobId,
    pub machine: usize,
    pub start: Time,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, job: JobId, machine: usize, start: Time) {
        self.assignments.insert(job, Assignment { machine, start });
    }

    pub fn get(&self, job: JobId) -> Option<Assignment> {
        self.assignments.get(&job).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Placements sorted by `(machine, start)`, ties by job id.
    pub fn placements(&self) -> Vec<Placement> {
        let mut out: Vec<Placement> = self
            .assignments
            .iter()
            .map(|(&job, a)| Placement {
                job,
                machine: a.machine,
                start: a.start,
            })
            .collect();
        out.sort_by_key(|p| (p.machine, p.start, p.job));
        out
    }

    pub fn from_placements(placements: &[Placement]) -> Self {
        let mut schedule = Self::new();
        for p in placements {
            schedule.assign(p.job, p.machine, p.start);
        }
        schedule
    }

    /// Copy with every start moved by `delta`.
    pub fn shifted(&self, delta: Time) -> Self {
        let mut out = self.clone();
        for a in out.assignments.values_mut() {
            a.start += delta;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleViolation {
    MissingJob {
        job: JobId,
    },
    UnknownJob {
        job: JobId,
    },
    BadMachine {
        job: JobId,
        machine: usize,
    },
    StartsEarly {
        job: JobId,
    },
    FinishesLate {
        job: JobId,
    },
    Overlap {
        machine: usize,
        first: JobId,
        second: JobId,
    },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingJob { job } => write!(f, "job {job} is not scheduled"),
            Self::UnknownJob { job } => write!(f, "job {job} is not in the instance"),
            Self::BadMachine { job, machine } => write!(f, "job {job} on nonexistent machine {machine}"),
            Self::StartsEarly { job } => write!(f, "job {job} starts before its release"),
            Self::FinishesLate { job } => write!(f, "job {job} finishes after its deadline"),
            Self::Overlap { machine, first, second } => {
                write!(f, "jobs {first} and {second} overlap on machine {machine}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScheduleCheck {
    pub violations: Vec<ScheduleViolation>,
}

impl ScheduleCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every job is placed once, inside its window, on an existing
/// machine, with no two jobs overlapping on a machine.
pub fn check_schedule(instance: &Instance, schedule: &Schedule) -> ScheduleCheck {
    let mut violations = Vec::new();
    let mut per_machine: BTreeMap<usize, Vec<(Time, Time, JobId)>> = BTreeMap::new();

    for job in &instance.jobs {
        let Some(a) = schedule.get(job.id) else {
            violations.push(ScheduleViolation::MissingJob { job: job.id });
            continue;
        };
        if a.machine < 1 || a.machine > instance.machines {
            violations.push(ScheduleViolation::BadMachine {
                job: job.id,
                machine: a.machine,
            });
        }
        if a.start < job.release {
            violations.push(ScheduleViolation::StartsEarly { job: job.id });
        }
        if a.start.saturating_add(job.processing) > job.deadline {
            violations.push(ScheduleViolation::FinishesLate { job: job.id });
        }
        per_machine
            .entry(a.machine)
            .or_default()
            .push((a.start, a.start.saturating_add(job.processing), job.id));
    }
    for &id in schedule.assignments.keys() {
        if instance.job(id).is_none() {
            violations.push(ScheduleViolation::UnknownJob { job: id });
        }
    }
    for (machine, mut runs) in per_machine {
        runs.sort_unstable();
        for pair in runs.windows(2) {
            let (_, end, first) = pair[0];
            let (start, _, second) = pair[1];
            if start < end {
                violations.push(ScheduleViolation::Overlap { machine, first, second });
            }
        }
    }
    ScheduleCheck { violations }
}

pub fn verify_schedule(instance: &Instance, schedule: &Schedule) -> bool {
    check_schedule(instance, schedule).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;

    fn i1() -> Instance {
        Instance::new(1, vec![Job::new(0, 0, 2, 2)])
    }

    fn one(job: JobId, machine: usize, start: Time) -> Schedule {
        let mut s = Schedule::new();
        s.assign(job, machine, start);
        s
    }

    #[test]
    fn exact_fit_accepted() {
        assert!(verify_schedule(&i1(), &one(0, 1, 0)));
    }

    #[test]
    fn late_finish_rejected() {
        let check = check_schedule(&i1(), &one(0, 1, 1));
        assert_eq!(check.violations, vec![ScheduleViolation::FinishesLate { job: 0 }]);
    }

    #[test]
    fn overlap_rejected() {
        let inst = Instance::new(2, vec![Job::new(0, 0, 5, 2), Job::new(1, 0, 5, 2)]);
        let mut s = Schedule::new();
        s.assign(0, 1, 0);
        s.assign(1, 1, 1);
        let check = check_schedule(&inst, &s);
        assert_eq!(
            check.violations,
            vec![ScheduleViolation::Overlap {
                machine: 1,
                first: 0,
                second: 1
            }]
        );
        s.assign(1, 2, 1);
        assert!(verify_schedule(&inst, &s));
    }

    #[test]
    fn back_to_back_is_fine() {
        let inst = Instance::new(1, vec![Job::new(0, 0, 4, 2), Job::new(1, 0, 4, 2)]);
        let mut s = Schedule::new();
        s.assign(0, 1, 0);
        s.assign(1, 1, 2);
        assert!(verify_schedule(&inst, &s));
    }

    #[test]
    fn missing_extra_and_bad_machine() {
        let inst = i1();
        let check = check_schedule(&inst, &one(5, 1, 0));
        assert_eq!(
            check.violations,
            vec![
                ScheduleViolation::MissingJob { job: 0 },
                ScheduleViolation::UnknownJob { job: 5 }
            ]
        );
        let check = check_schedule(&inst, &one(0, 2, 0));
        assert_eq!(
            check.violations,
            vec![ScheduleViolation::BadMachine { job: 0, machine: 2 }]
        );
    }

    #[test]
    fn placements_sorted_by_machine_then_start() {
        let mut s = Schedule::new();
        s.assign(3, 2, 0);
        s.assign(1, 1, 5);
        s.assign(2, 1, 0);
        let order: Vec<JobId> = s.placements().iter().map(|p| p.job).collect();
        assert_eq!(order, vec![2, 1, 3]);
        assert_eq!(Schedule::from_placements(&s.placements()), s);
    }
}
