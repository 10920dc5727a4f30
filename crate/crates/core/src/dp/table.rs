//! The dynamic program over `(t, S, b)` states, evaluated top-down with a
//! memo keyed by the full state.
//!
//! `T[t, S, b] = 1` iff all jobs in `S ∪ S_t^<` can be scheduled so that
//! machine `i` is idle from time `t + b_i` on. Entries are computed by:
//!
//! * base: `T[0, ∅, b] = 1` for every `b`;
//! * (a) if `t ≥ 1` and `S ⊆ S_{t-1}`: `T[t-1, S ∪ (S_{t-1} ∩ S_t^<), min(b + 1, ℓ)]`;
//! * (b) otherwise, 1 iff for some machine `i`
//!   (i) `b_i > -ℓ` and `T[t, S, b - e_i] = 1`, or
//!   (ii) for some `j ∈ S`: `b_i > 0`, `t + b_i ≤ d_j`, `t + b_i - p_j ≥ t_j`,
//!   and `T[t, S \ {j}, b - p_j e_i] = 1`.
//!
//! The answer is `T[t_max, S_{t_max}, ℓ·1]`.

use rustc_hash::FxHashMap;

use super::timeline::Timeline;
use super::SolveError;
use crate::instance::{Instance, JobId, Time};

/// A table index. `live_subset` is a bit set over `S_t` listed by ascending job id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DpState {
    pub t: Time,
    pub live_subset: u64,
    pub idle_offsets: Vec<Time>,
}

/// The recurrence case that made an entry 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Base,
    CaseA,
    CaseBi { machine: usize },
    CaseBii { job: JobId, machine: usize },
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Base,
    CaseA,
    CaseBi(u32),
    /// Position in `S_t`, machine.
    CaseBii(u32, u32),
}

enum Class {
    Base,
    CaseA(u64),
    CaseB,
}

/// Memo table for one instance.
///
/// States are packed into a single `u64` as
/// `((t * 2^h) + S) * (2ℓ+1)^m + Σ (b_i + ℓ) (2ℓ+1)^i`; the constructor refuses
/// instances whose state space does not fit the budget (and thus `u64`).
pub struct DpTable {
    tl: Timeline,
    radix: u64,
    powers: Vec<u64>,
    offset_span: u64,
    subset_span: u64,
    values: FxHashMap<u64, bool>,
    rules: FxHashMap<u64, Step>,
    record_rules: bool,
}

impl DpTable {
    pub fn new(instance: &Instance, budget: u64, record_rules: bool) -> Result<Self, SolveError> {
        let tl = Timeline::new(instance);
        let projected = tl.entry_bound();
        if projected > u128::from(budget) || projected > u128::from(u64::MAX) {
            return Err(SolveError::BudgetExceeded { projected, budget });
        }
        let radix = 2 * tl.ell as u64 + 1;
        let mut powers = Vec::with_capacity(tl.machines);
        let mut p = 1u64;
        for _ in 0..tl.machines {
            powers.push(p);
            p *= radix;
        }
        Ok(Self {
            radix,
            powers,
            offset_span: p,
            subset_span: 1u64 << tl.height,
            tl,
            values: FxHashMap::default(),
            rules: FxHashMap::default(),
            record_rules,
        })
    }

    pub fn machines(&self) -> usize {
        self.tl.machines
    }

    pub fn ell(&self) -> Time {
        self.tl.ell
    }

    pub fn t_max(&self) -> Time {
        self.tl.t_max
    }

    pub fn height(&self) -> usize {
        self.tl.height
    }

    /// Number of memoized states.
    pub fn entries(&self) -> u64 {
        self.values.len() as u64
    }

    /// `(t_max + 1) * 2^h * (2ℓ + 1)^m`.
    pub fn entry_bound(&self) -> u128 {
        self.tl.entry_bound()
    }

    /// Job ids of `S_t` in bit order.
    pub fn live_ids(&self, t: Time) -> Vec<JobId> {
        self.tl.live_at(t).iter().map(|&k| self.tl.jobs[k].id).collect()
    }

    /// Builds a state from job ids, which must all be live at `t`.
    pub fn state(&self, t: Time, jobs: &[JobId], idle_offsets: Vec<Time>) -> Result<DpState, SolveError> {
        let live = self.live_ids(t);
        let mut mask = 0u64;
        for id in jobs {
            let pos = live
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| SolveError::InvalidState(format!("job {id} is not live at {t}")))?;
            mask |= 1 << pos;
        }
        Ok(DpState {
            t,
            live_subset: mask,
            idle_offsets,
        })
    }

    /// The state the final answer is read from.
    pub fn root(&self) -> DpState {
        let t = self.tl.t_max;
        DpState {
            t,
            live_subset: self.tl.full_mask(t),
            idle_offsets: vec![self.tl.ell; self.tl.machines],
        }
    }

    /// Value of `T[state]`, computing whatever it depends on.
    pub fn entry(&mut self, state: &DpState) -> Result<bool, SolveError> {
        let key = self.encode(state)?;
        Ok(self.evaluate(key))
    }

    /// The rule recorded for a 1-entry (witness mode only).
    pub fn rule(&self, state: &DpState) -> Option<Rule> {
        let key = self.encode(state).ok()?;
        let step = *self.rules.get(&key)?;
        Some(match step {
            Step::Base => Rule::Base,
            Step::CaseA => Rule::CaseA,
            Step::CaseBi(i) => Rule::CaseBi {
                machine: i as usize + 1,
            },
            Step::CaseBii(pos, i) => Rule::CaseBii {
                job: self.tl.jobs[self.tl.live_at(state.t)[pos as usize]].id,
                machine: i as usize + 1,
            },
        })
    }

    pub fn decide(&mut self) -> bool {
        let root = self.root();
        self.entry(&root).expect("root state is well formed")
    }

    /// Follows the recorded rules down from the root. Returns
    /// `(job id, machine from 1, start)` for every job, or `None` if the root
    /// is 0 or rules were not recorded.
    pub fn witness(&mut self) -> Option<Vec<(JobId, usize, Time)>> {
        if !self.record_rules || !self.decide() {
            return None;
        }
        let mut key = self.encode(&self.root()).ok()?;
        let mut out = Vec::with_capacity(self.tl.jobs.len());
        loop {
            let (t, _, _) = self.split(key);
            match *self.rules.get(&key)? {
                Step::Base => break,
                Step::CaseA => match self.classify(key) {
                    Class::CaseA(child) => key = child,
                    _ => unreachable!("recorded case (a) at a state outside case (a)"),
                },
                Step::CaseBi(i) => key -= self.powers[i as usize],
                Step::CaseBii(pos, i) => {
                    let j = self.tl.live_at(t)[pos as usize];
                    let job = self.tl.jobs[j];
                    let b = self.offset(key, i as usize);
                    out.push((job.id, i as usize + 1, t + b - job.processing));
                    key = key - (1u64 << pos) * self.offset_span - job.processing as u64 * self.powers[i as usize];
                }
            }
        }
        Some(out)
    }

    fn encode(&self, s: &DpState) -> Result<u64, SolveError> {
        let tl = &self.tl;
        let bad = |msg: String| Err(SolveError::InvalidState(msg));
        if s.t < 0 || s.t > tl.t_max {
            return bad(format!("t = {} outside [0, {}]", s.t, tl.t_max));
        }
        if s.live_subset > super::timeline::mask_of_len(tl.live_at(s.t).len()) {
            return bad(format!("subset {:#b} is not within S_{}", s.live_subset, s.t));
        }
        if s.idle_offsets.len() != tl.machines {
            return bad(format!(
                "expected {} offsets, got {}",
                tl.machines,
                s.idle_offsets.len()
            ));
        }
        if let Some(b) = s.idle_offsets.iter().find(|b| b.abs() > tl.ell) {
            return bad(format!("offset {b} outside [-{0}, {0}]", tl.ell));
        }
        let code: u64 = s
            .idle_offsets
            .iter()
            .zip(&self.powers)
            .map(|(&b, &p)| (b + tl.ell) as u64 * p)
            .sum();
        Ok(((s.t as u64) * self.subset_span + s.live_subset) * self.offset_span + code)
    }

    fn split(&self, key: u64) -> (Time, u64, u64) {
        let code = key % self.offset_span;
        let rest = key / self.offset_span;
        ((rest / self.subset_span) as Time, rest % self.subset_span, code)
    }

    fn offset(&self, key: u64, machine: usize) -> Time {
        ((key % self.offset_span) / self.powers[machine] % self.radix) as Time - self.tl.ell
    }

    fn classify(&self, key: u64) -> Class {
        let (t, mask, code) = self.split(key);
        if t == 0 && mask == 0 {
            return Class::Base;
        }
        if !self.tl.subset_live_before(t, mask) {
            return Class::CaseB;
        }
        let prev_mask = self.tl.carry_back(t, mask, t - 1);
        let ell = self.tl.ell;
        let mut prev_code = 0u64;
        for &p in &self.powers {
            let b = (code / p % self.radix) as Time - ell;
            prev_code += ((b + 1).min(ell) + ell) as u64 * p;
        }
        Class::CaseA((((t - 1) as u64) * self.subset_span + prev_mask) * self.offset_span + prev_code)
    }

    /// The `cursor`-th candidate of case (b): placements (ii) first, then the
    /// idle descents (i). `None` past the end, `Some(None)` if inapplicable.
    fn candidate(&self, key: u64, cursor: usize) -> Option<Option<(u64, Step)>> {
        let (t, mask, _) = self.split(key);
        let live = self.tl.live_at(t);
        let m = self.tl.machines;
        let ell = self.tl.ell;
        let placements = live.len() * m;
        if cursor < placements {
            let (pos, i) = (cursor / m, cursor % m);
            if mask >> pos & 1 == 0 {
                return Some(None);
            }
            let job = &self.tl.jobs[live[pos]];
            let b = self.offset(key, i);
            let ok = b > 0 && t + b <= job.deadline && t + b - job.processing >= job.release;
            if !ok {
                return Some(None);
            }
            debug_assert!(b - job.processing >= -ell);
            let child = key - (1u64 << pos) * self.offset_span - job.processing as u64 * self.powers[i];
            return Some(Some((child, Step::CaseBii(pos as u32, i as u32))));
        }
        let i = cursor - placements;
        if i >= m {
            return None;
        }
        if self.offset(key, i) > -ell {
            Some(Some((key - self.powers[i], Step::CaseBi(i as u32))))
        } else {
            Some(None)
        }
    }

    fn evaluate(&mut self, root: u64) -> bool {
        if let Some(&v) = self.values.get(&root) {
            return v;
        }
        let mut stack: Vec<(u64, usize)> = vec![(root, 0)];
        'frames: while let Some(&(key, start)) = stack.last() {
            let (value, step) = match self.classify(key) {
                Class::Base => (true, Some(Step::Base)),
                Class::CaseA(child) => match self.values.get(&child) {
                    Some(&v) => (v, v.then_some(Step::CaseA)),
                    None => {
                        stack.push((child, 0));
                        continue 'frames;
                    }
                },
                Class::CaseB => {
                    let mut cursor = start;
                    loop {
                        match self.candidate(key, cursor) {
                            None => break (false, None),
                            Some(None) => cursor += 1,
                            Some(Some((child, step))) => match self.values.get(&child) {
                                Some(true) => break (true, Some(step)),
                                Some(false) => cursor += 1,
                                None => {
                                    if let Some(top) = stack.last_mut() {
                                        top.1 = cursor;
                                    }
                                    stack.push((child, 0));
                                    continue 'frames;
                                }
                            },
                        }
                    }
                }
            };
            self.values.insert(key, value);
            if self.record_rules {
                if let Some(step) = step {
                    self.rules.insert(key, step);
                }
            }
            stack.pop();
        }
        self.values[&root]
    }
}
