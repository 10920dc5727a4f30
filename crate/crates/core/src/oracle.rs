//! Exhaustive deciders for small scheduling and bin-packing instances.
//!
//! Everything here is deliberately naive. These functions are the ground truth
//! the dynamic program, the bound drivers, and the reduction are tested
//! against, so they share no code with them beyond the instance types.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{validate, Instance, Job, Time, ValidationReport};
use crate::schedule::Schedule;
use crate::Feasibility;

pub const DEFAULT_JOB_CAP: usize = 8;
pub const DEFAULT_ITEM_CAP: usize = 12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle refuses {n} jobs (cap {cap})")]
    TooManyJobs { n: usize, cap: usize },
    #[error("oracle refuses {n} items (cap {cap})")]
    TooManyItems { n: usize, cap: usize },
    #[error("malformed instance: {0}")]
    Malformed(ValidationReport),
    #[error("invalid bin packing instance: {0}")]
    InvalidBinPacking(String),
}

/// Start times of `jobs` run back to back in the given order, each as early as
/// possible. `None` if some job misses its deadline.
///
/// For a fixed sequence on one machine this placement finishes every job no
/// later than any other feasible placement, so it decides the sequence exactly.
pub fn greedy_sequence(jobs: &[Job]) -> Option<Vec<Time>> {
    let mut free = Time::MIN;
    let mut starts = Vec::with_capacity(jobs.len());
    for job in jobs {
        let start = free.max(job.release);
        if start + job.processing > job.deadline {
            return None;
        }
        starts.push(start);
        free = start + job.processing;
    }
    Some(starts)
}

/// Brute-force scheduler over machine assignments and per-machine orders.
#[derive(Clone, Copy, Debug)]
pub struct BruteForce {
    pub max_jobs: usize,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self {
            max_jobs: DEFAULT_JOB_CAP,
        }
    }
}

impl BruteForce {
    pub fn decide(&self, instance: &Instance) -> Result<Feasibility, OracleError> {
        Ok(self
            .schedule(instance)?
            .map_or(Feasibility::Infeasible, |_| Feasibility::Feasible))
    }

    pub fn schedule(&self, instance: &Instance) -> Result<Option<Schedule>, OracleError> {
        let report = validate(instance);
        if !report.is_well_formed() {
            return Err(OracleError::Malformed(report));
        }
        let n = instance.jobs.len();
        if n > self.max_jobs {
            return Err(OracleError::TooManyJobs { n, cap: self.max_jobs });
        }
        let mut jobs = instance.jobs.clone();
        jobs.sort_by_key(|j| j.id);

        let mut search = Search {
            jobs: &jobs,
            machines: instance.machines,
            loads: vec![0u32; instance.machines.min(n)],
            orders: FxHashMap::default(),
        };
        if !search.assign(0, 0) {
            return Ok(None);
        }
        let mut schedule = Schedule::new();
        for (machine, mask) in search.loads.clone().into_iter().enumerate() {
            let (order, starts) = search
                .single_machine(mask)
                .clone()
                .expect("accepted assignment has a feasible order");
            for (k, start) in order.into_iter().zip(starts) {
                schedule.assign(jobs[k].id, machine + 1, start);
            }
        }
        Ok(Some(schedule))
    }
}

/// A job order on one machine with its greedy start times.
type Sequenced = Option<(Vec<usize>, Vec<Time>)>;

struct Search<'a> {
    jobs: &'a [Job],
    machines: usize,
    /// Job subset (bit per job) on each opened machine.
    loads: Vec<u32>,
    /// Memo of the best single-machine order per subset.
    orders: FxHashMap<u32, Sequenced>,
}

impl Search<'_> {
    /// Places job `k` and the rest. The first job goes on machine 1 and every
    /// job may open at most one new machine, which removes machine relabelings.
    fn assign(&mut self, k: usize, opened: usize) -> bool {
        if k == self.jobs.len() {
            return true;
        }
        let limit = (opened + 1).min(self.machines);
        for machine in 0..limit {
            self.loads[machine] |= 1 << k;
            let ok = self.single_machine(self.loads[machine]).is_some() && self.assign(k + 1, opened.max(machine + 1));
            if ok {
                return true;
            }
            self.loads[machine] &= !(1 << k);
        }
        false
    }

    fn single_machine(&mut self, mask: u32) -> &Sequenced {
        if !self.orders.contains_key(&mask) {
            let members: Vec<usize> = (0..self.jobs.len()).filter(|&k| mask >> k & 1 == 1).collect();
            let found = first_feasible_order(self.jobs, &members);
            self.orders.insert(mask, found);
        }
        &self.orders[&mask]
    }
}

/// Tries every order of `members` on one machine.
fn first_feasible_order(jobs: &[Job], members: &[usize]) -> Sequenced {
    fn extend(jobs: &[Job], rest: &mut Vec<usize>, order: &mut Vec<usize>, starts: &mut Vec<Time>, free: Time) -> bool {
        if rest.is_empty() {
            return true;
        }
        for idx in 0..rest.len() {
            let k = rest[idx];
            let job = &jobs[k];
            let start = free.max(job.release);
            if start + job.processing > job.deadline {
                continue;
            }
            rest.remove(idx);
            order.push(k);
            starts.push(start);
            if extend(jobs, rest, order, starts, start + job.processing) {
                return true;
            }
            starts.pop();
            order.pop();
            rest.insert(idx, k);
        }
        false
    }
    let mut rest = members.to_vec();
    let mut order = Vec::new();
    let mut starts = Vec::new();
    extend(jobs, &mut rest, &mut order, &mut starts, Time::MIN).then_some((order, starts))
}

pub fn brute_force_decide(instance: &Instance) -> Result<Feasibility, OracleError> {
    BruteForce::default().decide(instance)
}

pub fn brute_force_schedule(instance: &Instance) -> Result<Option<Schedule>, OracleError> {
    BruteForce::default().schedule(instance)
}

/// Bin packing: can `items` be split into `bins` groups of total size at most `volume`?
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinPackingInstance {
    pub volume: i64,
    pub items: Vec<i64>,
    pub bins: usize,
}

impl BinPackingInstance {
    pub fn new(volume: i64, items: Vec<i64>, bins: usize) -> Self {
        Self { volume, items, bins }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let bad = |msg: String| Err(OracleError::InvalidBinPacking(msg));
        if self.volume < 1 {
            return bad(format!("volume {} < 1", self.volume));
        }
        if let Some(a) = self.items.iter().find(|&&a| a < 1) {
            return bad(format!("item {a} < 1"));
        }
        if self.bins < 1 || self.bins > self.items.len() {
            return bad(format!("bins must be in 1..={}, got {}", self.items.len(), self.bins));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Item indices (0-based) per bin; always `bins` entries, some possibly empty.
pub type Partition = Vec<Vec<usize>>;

pub fn bin_packing_decide(bp: &BinPackingInstance) -> Result<Option<Partition>, OracleError> {
    bin_packing_decide_capped(bp, DEFAULT_ITEM_CAP)
}

pub fn bin_packing_decide_capped(bp: &BinPackingInstance, cap: usize) -> Result<Option<Partition>, OracleError> {
    bp.validate()?;
    let n = bp.items.len();
    if n > cap {
        return Err(OracleError::TooManyItems { n, cap });
    }

    fn place(bp: &BinPackingInstance, i: usize, loads: &mut [i64], bins: &mut Partition, opened: usize) -> bool {
        if i == bp.items.len() {
            return true;
        }
        let a = bp.items[i];
        // Empty bins are interchangeable: only the first one is tried.
        let limit = (opened + 1).min(loads.len());
        for b in 0..limit {
            if loads[b] + a > bp.volume {
                continue;
            }
            loads[b] += a;
            bins[b].push(i);
            if place(bp, i + 1, loads, bins, opened.max(b + 1)) {
                return true;
            }
            bins[b].pop();
            loads[b] -= a;
        }
        false
    }

    let mut loads = vec![0i64; bp.bins];
    let mut bins: Partition = vec![Vec::new(); bp.bins];
    if !place(bp, 0, &mut loads, &mut bins, 0) {
        return Ok(None);
    }
    debug_assert!(bins
        .iter()
        .all(|bin| bin.iter().map(|&i| bp.items[i]).sum::<i64>() <= bp.volume));
    Ok(Some(bins))
}
