//! Window analytics: looseness, slack, height, live and due job sets, and
//! splitting at idle gaps.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::instance::{Instance, JobId, Time};

/// Exact rational looseness `max_j (d_j - t_j) / p_j`.
pub type Looseness = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceProfile {
    pub n: usize,
    pub machines: usize,
    /// Longest window `max_j (d_j - t_j)`.
    pub ell: Time,
    /// Latest release.
    pub t_max: Time,
    #[serde(serialize_with = "serialize_ratio")]
    pub looseness: Looseness,
    pub slack: Time,
    /// Largest number of windows sharing a time point.
    pub height: usize,
    /// False if some job has `p_j > d_j - t_j`; the instance is then infeasible
    /// and looseness/slack may fall below 1 and 0.
    pub fits: bool,
}

pub fn serialize_ratio<S: Serializer>(r: &Looseness, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

/// `"13/12"`, or `"3"` for integers.
pub fn format_ratio(r: &Looseness) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn profile(instance: &Instance) -> InstanceProfile {
    let jobs = &instance.jobs;
    if jobs.is_empty() {
        return InstanceProfile {
            n: 0,
            machines: instance.machines,
            ell: 0,
            t_max: 0,
            looseness: Ratio::from_integer(1),
            slack: 0,
            height: 0,
            fits: true,
        };
    }
    let ell = jobs.iter().map(|j| j.window()).max().unwrap_or(0);
    let t_max = jobs.iter().map(|j| j.release).max().unwrap_or(0);
    let looseness = jobs
        .iter()
        .map(|j| Ratio::new(j.window(), j.processing))
        .max()
        .expect("non-empty");
    let slack = jobs.iter().map(|j| j.slack()).max().expect("non-empty");
    InstanceProfile {
        n: jobs.len(),
        machines: instance.machines,
        ell,
        t_max,
        looseness,
        slack,
        height: height(instance),
        fits: jobs.iter().all(|j| j.fits_window()),
    }
}

/// Maximum overlap of the half-open windows, by an event sweep.
pub fn height(instance: &Instance) -> usize {
    let mut events: Vec<(Time, i32)> = Vec::with_capacity(2 * instance.jobs.len());
    for j in &instance.jobs {
        events.push((j.release, 1));
        events.push((j.deadline, -1));
    }
    // A window closing at t is gone before one opening at t is counted.
    events.sort_unstable();
    let mut live = 0i64;
    let mut best = 0i64;
    for (_, delta) in events {
        live += i64::from(delta);
        best = best.max(live);
    }
    best as usize
}

/// `S_t`: jobs whose window contains `t`.
pub fn jobs_live_at(instance: &Instance, t: Time) -> BTreeSet<JobId> {
    instance.jobs.iter().filter(|j| j.is_live_at(t)).map(|j| j.id).collect()
}

/// `S_t^<`: jobs that must be finished by `t`.
pub fn jobs_due_by(instance: &Instance, t: Time) -> BTreeSet<JobId> {
    instance.jobs.iter().filter(|j| j.deadline <= t).map(|j| j.id).collect()
}

/// Splits the instance into time-disjoint parts.
///
/// Jobs are grouped so that the latest deadline of one part is at most the
/// earliest release of the next; no window crosses a part boundary, so the
/// parts can be solved independently. Every part keeps the machine count.
/// Parts come in time order and keep the input order of their jobs.
pub fn split_at_gaps(instance: &Instance) -> Vec<Instance> {
    let mut order: Vec<usize> = (0..instance.jobs.len()).collect();
    order.sort_by_key(|&i| (instance.jobs[i].release, i));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut frontier = Time::MIN;
    for i in order {
        let job = &instance.jobs[i];
        match groups.last_mut() {
            Some(group) if job.release < frontier => group.push(i),
            _ => groups.push(vec![i]),
        }
        frontier = frontier.max(job.deadline);
    }
    groups
        .into_iter()
        .map(|mut group| {
            group.sort_unstable();
            Instance::new(instance.machines, group.into_iter().map(|i| instance.jobs[i]).collect())
        })
        .collect()
}
