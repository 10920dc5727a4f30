use crate::analysis;
use crate::instance::{Instance, Job, Time};

/// Precomputed `S_t` lookup for one instance.
///
/// Jobs are re-indexed by ascending id; `S_t` is stored as the sorted list of
/// those local indices, so bit `k` of a subset mask at time `t` always names
/// the `k`-th smallest id live at `t`.
#[derive(Clone, Debug)]
pub(crate) struct Timeline {
    pub jobs: Vec<Job>,
    pub machines: usize,
    pub ell: Time,
    pub t_max: Time,
    pub height: usize,
    /// Sorted distinct event times (0, releases, deadlines).
    events: Vec<Time>,
    /// `live[k]` is `S_t` for `t` in `[events[k], events[k + 1])`.
    live: Vec<Vec<usize>>,
}

impl Timeline {
    pub fn new(instance: &Instance) -> Self {
        let mut jobs = instance.jobs.clone();
        jobs.sort_by_key(|j| j.id);
        let profile = analysis::profile(instance);

        let mut events: Vec<Time> = std::iter::once(0)
            .chain(jobs.iter().flat_map(|j| [j.release, j.deadline]))
            .collect();
        events.sort_unstable();
        events.dedup();
        let live = events
            .iter()
            .map(|&t| (0..jobs.len()).filter(|&k| jobs[k].is_live_at(t)).collect())
            .collect();

        Self {
            jobs,
            machines: instance.machines,
            ell: profile.ell,
            t_max: profile.t_max,
            height: profile.height,
            events,
            live,
        }
    }

    pub fn live_at(&self, t: Time) -> &[usize] {
        match self.events.partition_point(|&e| e <= t) {
            0 => &[],
            k => &self.live[k - 1],
        }
    }

    /// Latest event time strictly before `t` (at least 0).
    pub fn prev_event(&self, t: Time) -> Time {
        match self.events.partition_point(|&e| e < t) {
            0 => 0,
            k => self.events[k - 1],
        }
    }

    pub fn full_mask(&self, t: Time) -> u64 {
        mask_of_len(self.live_at(t).len())
    }

    /// Case (a) guard: every job of `mask` (over `S_t`) is already live at `t - 1`.
    pub fn subset_live_before(&self, t: Time, mask: u64) -> bool {
        t >= 1 && bits(mask).map(|k| self.live_at(t)[k]).all(|j| self.jobs[j].release < t)
    }

    /// Re-indexes `mask` from `S_t` to `S_prev` and adds the jobs live at
    /// `prev` with deadline exactly `t`. Assumes the case (a) guard holds.
    pub fn carry_back(&self, t: Time, mask: u64, prev: Time) -> u64 {
        let cur = self.live_at(t);
        let before = self.live_at(prev);
        let mut out = 0u64;
        for k in bits(mask) {
            let pos = before
                .binary_search(&cur[k])
                .expect("case (a) subset is live at the earlier time");
            out |= 1 << pos;
        }
        for (pos, &j) in before.iter().enumerate() {
            if self.jobs[j].deadline == t {
                out |= 1 << pos;
            }
        }
        out
    }

    /// `(t_max + 1) * 2^h * (2 ell + 1)^m`, saturating.
    pub fn entry_bound(&self) -> u128 {
        entry_bound(self.t_max, self.height, self.ell, self.machines)
    }
}

pub(crate) fn entry_bound(t_max: Time, height: usize, ell: Time, machines: usize) -> u128 {
    let times = (t_max.max(0) as u128) + 1;
    let subsets = if height >= 127 { u128::MAX } else { 1u128 << height };
    let radix = 2 * (ell.max(0) as u128) + 1;
    let offsets = u32::try_from(machines)
        .ok()
        .and_then(|m| radix.checked_pow(m))
        .unwrap_or(u128::MAX);
    times.saturating_mul(subsets).saturating_mul(offsets)
}

pub(crate) fn mask_of_len(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&k| mask >> k & 1 == 1)
}
