//! The same recurrence as [`DpTable`](super::DpTable), stored by its minimal
//! 1-entries.
//!
//! For fixed `(t, S)` the table is upward closed in `b` (through case (b)(i),
//! and case (a) inherits it) and symmetric under permuting machines. So
//! `T[t, S, ·]` is determined by the antichain `F(t, S)` of its minimal
//! offset vectors, each kept sorted ascending:
//! `T[t, S, b] = 1` iff some `f ∈ F(t, S)` satisfies `f ≤ sort(b)`.
//!
//! The cases translate to:
//!
//! * base: `F(0, ∅) = {(-ℓ, …, -ℓ)}`;
//! * (a): `F(t, S) = min { max(f - k, -ℓ) : f ∈ F(e, S') }` where `e` is the
//!   previous event time and `k = t - e`; no job is released or due strictly
//!   between, so the `k` unit steps collapse into one;
//! * (b): for every `j ∈ S`, `f ∈ F(t, S \ {j})` and slot `i`, the job ends at
//!   `t + v` with `v = max(f_i + p_j, t_j - t + p_j, 1)`, allowed if
//!   `v ≤ d_j - t`; the candidate is `f` with slot `i` raised to `v`.
//!
//! The answer is 1 iff `F(t_max, S_{t_max})` is non-empty.

use rustc_hash::FxHashMap;

use super::timeline::{bits, mask_of_len, Timeline};
use super::{DpState, SolveError};
use crate::instance::{Instance, JobId, Time};

type Key = (Time, u64);

#[derive(Clone, Copy, Debug)]
enum Origin {
    Base,
    Shift {
        from: Key,
        index: usize,
    },
    /// Job `job` (local index) raised slot `slot` of `from[index]`; the new
    /// value sits at `pos` after re-sorting.
    Place {
        from: Key,
        index: usize,
        job: usize,
        slot: usize,
        pos: usize,
    },
}

#[derive(Clone, Debug)]
struct Profile {
    offsets: Box<[Time]>,
    origin: Origin,
}

pub struct FrontierTable {
    tl: Timeline,
    memo: FxHashMap<Key, Vec<Profile>>,
}

impl FrontierTable {
    pub fn new(instance: &Instance, budget: u64) -> Result<Self, SolveError> {
        let tl = Timeline::new(instance);
        let projected = tl.entry_bound();
        if projected > u128::from(budget) {
            return Err(SolveError::BudgetExceeded { projected, budget });
        }
        Ok(Self {
            tl,
            memo: FxHashMap::default(),
        })
    }

    pub fn entry_bound(&self) -> u128 {
        self.tl.entry_bound()
    }

    /// Stored minimal vectors over all memoized `(t, S)`.
    pub fn entries(&self) -> u64 {
        self.memo.values().map(|f| f.len() as u64).sum()
    }

    /// Number of memoized `(t, S)` slices.
    pub fn slices(&self) -> usize {
        self.memo.len()
    }

    pub fn decide(&mut self) -> bool {
        let t = self.tl.t_max;
        let key = (t, self.tl.full_mask(t));
        !self.frontier(key).is_empty()
    }

    /// `T[state]` read off the antichain.
    pub fn entry(&mut self, state: &DpState) -> Result<bool, SolveError> {
        let tl = &self.tl;
        let bad = |msg: String| Err(SolveError::InvalidState(msg));
        if state.t < 0 || state.t > tl.t_max {
            return bad(format!("t = {} outside [0, {}]", state.t, tl.t_max));
        }
        if state.live_subset > mask_of_len(tl.live_at(state.t).len()) {
            return bad(format!("subset {:#b} is not within S_{}", state.live_subset, state.t));
        }
        if state.idle_offsets.len() != tl.machines || state.idle_offsets.iter().any(|b| b.abs() > tl.ell) {
            return bad(format!("offsets {:?} out of range", state.idle_offsets));
        }
        let mut b = state.idle_offsets.clone();
        b.sort_unstable();
        Ok(self
            .frontier((state.t, state.live_subset))
            .iter()
            .any(|f| dominates(&f.offsets, &b)))
    }

    /// A schedule as `(job id, machine from 1, start)`, or `None` if infeasible.
    pub fn witness(&mut self) -> Option<Vec<(JobId, usize, Time)>> {
        if !self.decide() {
            return None;
        }
        let t = self.tl.t_max;
        let mut key = (t, self.tl.full_mask(t));
        let mut index = 0;
        let m = self.tl.machines;
        let mut machine_of: Vec<usize> = (0..m).collect();
        let mut out = Vec::with_capacity(self.tl.jobs.len());
        loop {
            let profile = &self.memo[&key][index];
            match profile.origin {
                Origin::Base => break,
                Origin::Shift { from, index: i } => {
                    key = from;
                    index = i;
                }
                Origin::Place {
                    from,
                    index: i,
                    job,
                    slot,
                    pos,
                } => {
                    let job = self.tl.jobs[job];
                    let end = key.0 + profile.offsets[pos];
                    out.push((job.id, machine_of[pos] + 1, end - job.processing));
                    let next: Vec<usize> = (0..m)
                        .map(|r| {
                            if r == slot {
                                return machine_of[pos];
                            }
                            let r = if r < slot { r } else { r - 1 };
                            machine_of[if r >= pos { r + 1 } else { r }]
                        })
                        .collect();
                    machine_of = next;
                    key = from;
                    index = i;
                }
            }
        }
        Some(out)
    }

    fn frontier(&mut self, root: Key) -> &[Profile] {
        let mut stack = vec![root];
        while let Some(&key) = stack.last() {
            if self.memo.contains_key(&key) {
                stack.pop();
                continue;
            }
            let deps = self.dependencies(key);
            let missing: Vec<Key> = deps.into_iter().filter(|d| !self.memo.contains_key(d)).collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            let front = self.compute(key);
            self.memo.insert(key, front);
            stack.pop();
        }
        &self.memo[&root]
    }

    fn shift_source(&self, (t, mask): Key) -> Option<Key> {
        if !self.tl.subset_live_before(t, mask) {
            return None;
        }
        let e = self.tl.prev_event(t);
        Some((e, self.tl.carry_back(t, mask, e)))
    }

    fn dependencies(&self, key: Key) -> Vec<Key> {
        let (t, mask) = key;
        if t == 0 && mask == 0 {
            return Vec::new();
        }
        if let Some(src) = self.shift_source(key) {
            return vec![src];
        }
        bits(mask).map(|k| (t, mask & !(1 << k))).collect()
    }

    fn compute(&self, key: Key) -> Vec<Profile> {
        let (t, mask) = key;
        let ell = self.tl.ell;
        let m = self.tl.machines;
        let mut front = Vec::new();
        if t == 0 && mask == 0 {
            front.push(Profile {
                offsets: vec![-ell; m].into_boxed_slice(),
                origin: Origin::Base,
            });
            return front;
        }
        if let Some(from) = self.shift_source(key) {
            let steps = t - from.0;
            for (index, f) in self.memo[&from].iter().enumerate() {
                let offsets = f.offsets.iter().map(|&b| (b - steps).max(-ell)).collect();
                insert(
                    &mut front,
                    Profile {
                        offsets,
                        origin: Origin::Shift { from, index },
                    },
                );
            }
            return front;
        }
        let live = self.tl.live_at(t);
        for k in bits(mask) {
            let j = live[k];
            let job = self.tl.jobs[j];
            let from = (t, mask & !(1 << k));
            let earliest_end = job.release - t + job.processing;
            let latest_end = job.deadline - t;
            for (index, f) in self.memo[&from].iter().enumerate() {
                for slot in 0..m {
                    if slot > 0 && f.offsets[slot] == f.offsets[slot - 1] {
                        continue;
                    }
                    let v = (f.offsets[slot] + job.processing).max(earliest_end).max(1);
                    if v > latest_end {
                        continue;
                    }
                    let mut offsets: Vec<Time> = Vec::with_capacity(m);
                    offsets.extend(f.offsets[..slot].iter().chain(&f.offsets[slot + 1..]));
                    let pos = offsets.partition_point(|&x| x < v);
                    offsets.insert(pos, v);
                    insert(
                        &mut front,
                        Profile {
                            offsets: offsets.into_boxed_slice(),
                            origin: Origin::Place {
                                from,
                                index,
                                job: j,
                                slot,
                                pos,
                            },
                        },
                    );
                }
            }
        }
        front
    }
}

/// Componentwise `a ≤ b`.
fn dominates(a: &[Time], b: &[Time]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn insert(front: &mut Vec<Profile>, candidate: Profile) {
    if front.iter().any(|e| dominates(&e.offsets, &candidate.offsets)) {
        return;
    }
    front.retain(|e| !dominates(&candidate.offsets, &e.offsets));
    front.push(candidate);
}
