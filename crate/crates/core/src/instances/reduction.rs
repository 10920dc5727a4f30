//! Bin packing to interval-constrained scheduling.
//!
//! For items `a_1..a_n`, `m` bins of volume `V` and an exponent `c ≥ 1`, let
//! `A = Σ a_i` and `B = (mn)^c A`. Item `i` becomes `m` jobs released at
//! `(i - 1)B`: one of length `B + a_i` and `m - 1` of length `B`, all due at
//! `iB + A` (or `nB + V` for the last item). The jobs of consecutive items
//! overlap only in `[iB, iB + A)`, which plays the role of the bins. The
//! scheduling instance is feasible iff the items pack.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{self, format_ratio, serialize_ratio, Looseness};
use crate::instance::{Instance, Job, JobId, Time, TIME_LIMIT};
use crate::oracle::{BinPackingInstance, Partition};
use crate::schedule::Schedule;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid bin packing instance: {0}")]
    Invalid(String),
    #[error("the reduction needs at least 2 items, got {0}")]
    TooFewItems(usize),
    #[error("exponent c must be at least 1, got {0}")]
    BadExponent(u32),
    #[error("arithmetic overflow: {0} does not fit in 62 bits")]
    Overflow(&'static str),
    #[error("partition does not match the instance: {0}")]
    BadPartition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionOutput {
    pub instance: Instance,
    /// `A`, the total item size.
    pub a_sum: i64,
    /// `B = (mn)^c A`.
    pub big_b: i64,
    /// `V > A`: every packing works and `instance` is a fixed one-job instance.
    pub trivial: bool,
    /// `(item, copy)`, both from 1, to job id. Empty when `trivial`.
    #[serde(skip)]
    pub job_map: BTreeMap<(usize, usize), JobId>,
}

impl ReductionOutput {
    pub fn job_id(&self, item: usize, copy: usize) -> Option<JobId> {
        self.job_map.get(&(item, copy)).copied()
    }
}

fn within_limit(v: Option<i64>, what: &'static str) -> Result<i64, ReductionError> {
    match v {
        Some(v) if v < TIME_LIMIT => Ok(v),
        _ => Err(ReductionError::Overflow(what)),
    }
}

pub fn reduce_bin_packing(bp: &BinPackingInstance, c: u32) -> Result<ReductionOutput, ReductionError> {
    bp.validate().map_err(|e| ReductionError::Invalid(e.to_string()))?;
    let n = bp.items.len();
    let m = bp.bins;
    if n < 2 {
        return Err(ReductionError::TooFewItems(n));
    }
    if c < 1 {
        return Err(ReductionError::BadExponent(c));
    }

    let a_sum = within_limit(bp.items.iter().try_fold(0i64, |s, &a| s.checked_add(a)), "A")?;
    let mn = within_limit(i64::try_from(m).ok().and_then(|m| m.checked_mul(n as i64)), "mn")?;
    let scale = within_limit(mn.checked_pow(c), "(mn)^c")?;
    let big_b = within_limit(scale.checked_mul(a_sum), "B")?;

    if bp.volume > a_sum {
        return Ok(ReductionOutput {
            instance: Instance::new(m, vec![Job::new(0, 0, 1, 1)]),
            a_sum,
            big_b,
            trivial: true,
            job_map: BTreeMap::new(),
        });
    }

    let last_deadline = (n as i64).checked_mul(big_b).and_then(|x| x.checked_add(bp.volume));
    within_limit(last_deadline, "nB + V")?;
    within_limit(
        (n as i64 - 1).checked_mul(big_b).and_then(|x| x.checked_add(a_sum)),
        "(n-1)B + A",
    )?;
    within_limit(
        big_b.checked_add(bp.items.iter().copied().max().unwrap_or(0)),
        "B + a_i",
    )?;

    let mut jobs = Vec::with_capacity(m * n);
    let mut job_map = BTreeMap::new();
    for (idx, &a) in bp.items.iter().enumerate() {
        let i = idx as i64 + 1;
        let release = (i - 1) * big_b;
        let deadline = if idx + 1 < n {
            i * big_b + a_sum
        } else {
            i * big_b + bp.volume
        };
        for k in 1..=m {
            let id = (idx * m + (k - 1)) as JobId;
            let processing = if k == 1 { big_b + a } else { big_b };
            jobs.push(Job::new(id, release, deadline, processing));
            job_map.insert((idx + 1, k), id);
        }
    }
    Ok(ReductionOutput {
        instance: Instance::new(m, jobs),
        a_sum,
        big_b,
        trivial: false,
        job_map,
    })
}

/// Structural checks on a reduction output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    /// The trivial branch was taken; the checks below are not meaningful.
    pub vacuous: bool,
    pub jobs: usize,
    pub expected_jobs: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub looseness: Looseness,
    /// `1 + (mn)^-c`.
    #[serde(serialize_with = "serialize_ratio")]
    pub looseness_cap: Looseness,
    pub height: usize,
    /// `2m`.
    pub height_cap: usize,
    /// Sorting by release also sorts by deadline.
    pub agreeable: bool,
    /// `B ≥ 2A`.
    pub b_covers_twice_a: bool,
}

impl ReductionReport {
    pub fn job_count_ok(&self) -> bool {
        self.jobs == self.expected_jobs
    }

    pub fn looseness_ok(&self) -> bool {
        self.looseness <= self.looseness_cap
    }

    pub fn height_ok(&self) -> bool {
        self.height <= self.height_cap
    }

    pub fn all_hold(&self) -> bool {
        self.vacuous
            || (self.job_count_ok()
                && self.looseness_ok()
                && self.height_ok()
                && self.agreeable
                && self.b_covers_twice_a)
    }

    pub fn summary(&self) -> String {
        if self.vacuous {
            return "trivial branch (V > A): properties vacuous".to_string();
        }
        let verdict = if self.all_hold() {
            "all properties hold"
        } else {
            "PROPERTY VIOLATED"
        };
        format!(
            "jobs {}/{}, looseness {} <= {}, height {} <= {}, agreeable {}: {}",
            self.jobs,
            self.expected_jobs,
            format_ratio(&self.looseness),
            format_ratio(&self.looseness_cap),
            self.height,
            self.height_cap,
            self.agreeable,
            verdict
        )
    }
}

pub fn verify_reduction(bp: &BinPackingInstance, out: &ReductionOutput, c: u32) -> ReductionReport {
    let inst = &out.instance;
    let p = analysis::profile(inst);
    let m = bp.bins;
    let mn = (m * bp.items.len()) as i64;
    let scale = mn.checked_pow(c).unwrap_or(i64::MAX - 1);
    let mut by_release: Vec<&Job> = inst.jobs.iter().collect();
    by_release.sort_by_key(|j| (j.release, j.deadline));
    let agreeable = by_release.windows(2).all(|w| w[0].deadline <= w[1].deadline);
    ReductionReport {
        vacuous: out.trivial,
        jobs: inst.len(),
        expected_jobs: m * bp.items.len(),
        looseness: p.looseness,
        looseness_cap: Ratio::new(scale + 1, scale),
        height: p.height,
        height_cap: 2 * m,
        agreeable,
        b_covers_twice_a: out.big_b >= 2 * out.a_sum,
    }
}

/// The schedule a packing induces.
///
/// Item `i` occupies all `m` machines from `(i - 1)B` on. The long job goes to
/// its bin's machine and the short ones to the others, each delayed by the
/// load its machine has already taken from earlier items, so machine `k`
/// finishes item `i` at `iB` plus the size of bin `k` so far.
pub fn reduction_schedule(
    bp: &BinPackingInstance,
    out: &ReductionOutput,
    partition: &Partition,
) -> Result<Schedule, ReductionError> {
    let mut schedule = Schedule::new();
    if out.trivial {
        schedule.assign(0, 1, 0);
        return Ok(schedule);
    }
    let n = bp.items.len();
    let m = bp.bins;
    if partition.len() > m {
        return Err(ReductionError::BadPartition(format!(
            "{} bins for {m} machines",
            partition.len()
        )));
    }
    let mut bin_of = vec![None; n];
    for (k, bin) in partition.iter().enumerate() {
        for &i in bin {
            match bin_of.get_mut(i) {
                Some(slot @ None) => *slot = Some(k),
                Some(Some(_)) => return Err(ReductionError::BadPartition(format!("item {} packed twice", i + 1))),
                None => return Err(ReductionError::BadPartition(format!("no item {}", i + 1))),
            }
        }
    }
    let mut load: Vec<Time> = vec![0; m];
    for (i, bin) in bin_of.into_iter().enumerate() {
        let k = bin.ok_or_else(|| ReductionError::BadPartition(format!("item {} unpacked", i + 1)))?;
        let origin = i as Time * out.big_b;
        let mut others = (0..m).filter(|&l| l != k);
        for copy in 1..=m {
            let machine = if copy == 1 {
                k
            } else {
                others.next().expect("m - 1 other machines")
            };
            let id = out.job_map[&(i + 1, copy)];
            schedule.assign(id, machine + 1, origin + load[machine]);
        }
        load[k] += bp.items[i];
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::verify_schedule;

    fn three_bins() -> BinPackingInstance {
        BinPackingInstance::new(3, vec![1, 2, 2, 3], 3)
    }

    #[test]
    fn three_bins_golden() {
        let out = reduce_bin_packing(&three_bins(), 1).unwrap();
        assert!(!out.trivial);
        assert_eq!((out.a_sum, out.big_b), (8, 96));
        assert_eq!(out.instance.len(), 12);
        assert_eq!(out.instance.machines, 3);
        let job = |i, k| *out.instance.job(out.job_id(i, k).unwrap()).unwrap();
        assert_eq!(job(1, 1), Job::new(0, 0, 104, 97));
        assert_eq!(job(1, 2), Job::new(1, 0, 104, 96));
        assert_eq!(job(4, 1), Job::new(9, 288, 387, 99));
        let report = verify_reduction(&three_bins(), &out, 1);
        assert!(report.all_hold(), "{}", report.summary());
        assert_eq!(report.looseness, Ratio::new(13, 12));
        assert_eq!(report.height, 6);
    }

    #[test]
    fn three_bins_packing_translates() {
        let out = reduce_bin_packing(&three_bins(), 1).unwrap();
        let partition = vec![vec![0, 2], vec![1], vec![3]];
        let s = reduction_schedule(&three_bins(), &out, &partition).unwrap();
        assert!(verify_schedule(&out.instance, &s));
        assert_eq!(s.get(out.job_id(3, 1).unwrap()).unwrap().start, 2 * 96 + 1);
    }

    #[test]
    fn trivial_branch() {
        let bp = BinPackingInstance::new(100, vec![1, 2], 2);
        let out = reduce_bin_packing(&bp, 1).unwrap();
        assert!(out.trivial);
        assert_eq!(out.instance, Instance::new(2, vec![Job::new(0, 0, 1, 1)]));
        assert!(verify_reduction(&bp, &out, 1).vacuous);
        assert!(verify_schedule(
            &out.instance,
            &reduction_schedule(&bp, &out, &vec![vec![0, 1], vec![]]).unwrap()
        ));
    }

    #[test]
    fn two_items_two_bins() {
        let bp = BinPackingInstance::new(2, vec![1, 2], 2);
        let out = reduce_bin_packing(&bp, 1).unwrap();
        let report = verify_reduction(&bp, &out, 1);
        assert_eq!(report.jobs, 4);
        assert!(report.agreeable);
        assert!(report.all_hold());
    }

    #[test]
    fn errors() {
        let one = BinPackingInstance::new(3, vec![1], 1);
        assert_eq!(reduce_bin_packing(&one, 1), Err(ReductionError::TooFewItems(1)));
        assert_eq!(
            reduce_bin_packing(&three_bins(), 0),
            Err(ReductionError::BadExponent(0))
        );
        let huge = BinPackingInstance::new(1, vec![1 << 40, 1 << 40], 2);
        assert!(matches!(
            reduce_bin_packing(&huge, 20),
            Err(ReductionError::Overflow(_))
        ));
        let bad = BinPackingInstance::new(0, vec![1, 2], 2);
        assert!(matches!(reduce_bin_packing(&bad, 1), Err(ReductionError::Invalid(_))));
    }

    #[test]
    fn bad_partitions_are_reported() {
        let out = reduce_bin_packing(&three_bins(), 1).unwrap();
        assert!(reduction_schedule(&three_bins(), &out, &vec![vec![0], vec![1], vec![2]]).is_err());
        assert!(reduction_schedule(&three_bins(), &out, &vec![vec![0, 0], vec![1, 2], vec![3]]).is_err());
    }
}
