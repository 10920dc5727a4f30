#![allow(dead_code)]

use proptest::prelude::*;

use ics_core::{Instance, Job, Time};

/// Up to `n_max` jobs on 1 to `m_max` machines. Releases lie in
/// `[0, horizon)`, processing times in `[1, horizon]`, and the window slack
/// in `[0, slack_max]`.
pub fn instances(n_max: usize, m_max: usize, horizon: Time, slack_max: Time) -> impl Strategy<Value = Instance> {
    (
        1..=m_max,
        prop::collection::vec((0..horizon, 1..=horizon, 0..=slack_max), 0..=n_max),
    )
        .prop_map(|(m, raw)| {
            let jobs = raw
                .into_iter()
                .enumerate()
                .map(|(id, (r, p, s))| Job::new(id as u64, r, r + p + s, p))
                .collect();
            Instance::new(m, jobs)
        })
}

pub fn i1() -> Instance {
    Instance::new(1, vec![Job::new(0, 0, 2, 2)])
}

pub fn i2(m: usize) -> Instance {
    Instance::new(m, vec![Job::new(0, 0, 3, 2), Job::new(1, 1, 3, 2)])
}

pub fn five_units(m: usize) -> Instance {
    Instance::new(m, (0..5).map(|id| Job::new(id, 0, 1, 1)).collect())
}
