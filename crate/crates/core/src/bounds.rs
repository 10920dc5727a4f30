//! Height bounds for feasible instances, the precheck-then-solve drivers, and
//! machine-count minimization.
//!
//! On `m` machines a feasible instance with looseness `λ > 1` and longest
//! window `ℓ` has height at most `2m (ln ℓ / (ln λ - ln(λ - 1)) + 1)`; with
//! slack `σ` it has height at most `(2σ + 1) m`. An instance whose height
//! exceeds either bound is rejected without running the dynamic program.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{self, format_ratio, serialize_ratio, InstanceProfile, Looseness};
use crate::dp::{SolveError, SolveOutcome, Solver};
use crate::instance::{Instance, Time};
use crate::Feasibility;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundError {
    #[error("looseness {} < 1", format_ratio(.0))]
    LoosenessBelowOne(Looseness),
    #[error("window length {0} < 1")]
    EmptyWindow(Time),
    #[error("machines < 1")]
    NoMachines,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundSource {
    Looseness {
        #[serde(serialize_with = "serialize_ratio")]
        lambda: Looseness,
        ell: Time,
        machines: usize,
    },
    Slack {
        sigma: Time,
        machines: usize,
    },
    /// `λ = 1`: every job fills its window, so at most `m` windows can share a point.
    Degenerate {
        machines: usize,
    },
}

/// Upper bound on the height of any feasible instance with the given parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightBound {
    pub value: u64,
    pub source: BoundSource,
}

pub fn looseness_height_bound(machines: usize, ell: Time, lambda: Looseness) -> Result<HeightBound, BoundError> {
    if machines < 1 {
        return Err(BoundError::NoMachines);
    }
    let one = Ratio::from_integer(1);
    if lambda < one {
        return Err(BoundError::LoosenessBelowOne(lambda));
    }
    if lambda == one {
        return Ok(HeightBound {
            value: machines as u64,
            source: BoundSource::Degenerate { machines },
        });
    }
    if ell < 1 {
        return Err(BoundError::EmptyWindow(ell));
    }
    // ln λ - ln(λ - 1) = -ln(1 - 1/λ), and 1/λ = denom / numer.
    let inv = *lambda.denom() as f64 / *lambda.numer() as f64;
    let gap = -(-inv).ln_1p();
    let per_machine = 2.0 * ((ell as f64).ln() / gap + 1.0);
    let raw = machines as f64 * per_machine;
    // Rounding error may put an exact integer bound just below itself; the
    // margin keeps the floored value an upper bound.
    let padded = raw + 1e-9 * raw.max(1.0);
    let value = if padded >= u64::MAX as f64 {
        u64::MAX
    } else {
        padded.floor() as u64
    };
    Ok(HeightBound {
        value,
        source: BoundSource::Looseness { lambda, ell, machines },
    })
}

pub fn slack_height_bound(machines: usize, sigma: u64) -> HeightBound {
    let value = sigma
        .saturating_mul(2)
        .saturating_add(1)
        .saturating_mul(machines as u64);
    HeightBound {
        value,
        source: BoundSource::Slack {
            sigma: sigma.min(Time::MAX as u64) as Time,
            machines,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecheckMode {
    Looseness,
    Slack,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Precheck {
    Pass {
        height: u64,
        bound: u64,
    },
    /// Height above the bound; the instance is infeasible.
    Reject {
        height: u64,
        bound: u64,
    },
    /// Some job cannot fit its own window.
    Unschedulable {
        height: u64,
    },
}

impl Precheck {
    pub fn rejects(&self) -> bool {
        !matches!(self, Precheck::Pass { .. })
    }
}

/// The bound(s) `mode` selects for this instance; the smaller one wins.
pub fn instance_bound(profile: &InstanceProfile, mode: PrecheckMode) -> Result<u64, BoundError> {
    let m = profile.machines;
    let by_slack = || slack_height_bound(m, profile.slack.max(0) as u64).value;
    let by_looseness = || looseness_height_bound(m, profile.ell, profile.looseness).map(|b| b.value);
    Ok(match mode {
        PrecheckMode::Slack => by_slack(),
        PrecheckMode::Looseness => by_looseness()?,
        PrecheckMode::Both => by_slack().min(by_looseness()?),
    })
}

pub fn precheck(instance: &Instance, mode: PrecheckMode) -> Precheck {
    precheck_profile(&analysis::profile(instance), mode)
}

pub fn precheck_profile(profile: &InstanceProfile, mode: PrecheckMode) -> Precheck {
    let height = profile.height as u64;
    if !profile.fits {
        return Precheck::Unschedulable { height };
    }
    match instance_bound(profile, mode) {
        Ok(bound) if height <= bound => Precheck::Pass { height, bound },
        Ok(bound) => Precheck::Reject { height, bound },
        // Only reachable with zero machines, which the solver rejects anyway.
        Err(_) => Precheck::Reject { height, bound: 0 },
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Driver {
    /// Straight to the dynamic program.
    #[default]
    Plain,
    /// Looseness precheck, then the dynamic program.
    Looseness,
    /// Slack precheck, then the dynamic program.
    Slack,
}

#[derive(Clone, Debug)]
pub struct DriverOutcome {
    pub feasibility: Feasibility,
    pub precheck: Option<Precheck>,
    /// `None` when the precheck decided the instance.
    pub solve: Option<SolveOutcome>,
}

impl DriverOutcome {
    pub fn dp_invoked(&self) -> bool {
        self.solve.as_ref().is_some_and(|s| s.stats.dp_invoked)
    }
}

pub fn run_driver(instance: &Instance, driver: Driver, solver: &Solver) -> Result<DriverOutcome, SolveError> {
    let mode = match driver {
        Driver::Plain => None,
        Driver::Looseness => Some(PrecheckMode::Looseness),
        Driver::Slack => Some(PrecheckMode::Slack),
    };
    let check = mode.map(|mode| precheck(instance, mode));
    if let Some(check) = check.filter(Precheck::rejects) {
        let report = crate::instance::validate(instance);
        if !report.is_well_formed() {
            return Err(SolveError::Malformed(report));
        }
        return Ok(DriverOutcome {
            feasibility: Feasibility::Infeasible,
            precheck: Some(check),
            solve: None,
        });
    }
    let outcome = solver.solve(instance)?;
    Ok(DriverOutcome {
        feasibility: outcome.feasibility,
        precheck: check,
        solve: Some(outcome),
    })
}

pub fn solve_bounded_looseness(instance: &Instance) -> Result<DriverOutcome, SolveError> {
    run_driver(instance, Driver::Looseness, &Solver::default())
}

pub fn solve_bounded_slack(instance: &Instance) -> Result<DriverOutcome, SolveError> {
    run_driver(instance, Driver::Slack, &Solver::default())
}

/// Lower bound on the machine count of any feasible schedule, with the
/// contribution of each argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MachineLowerBound {
    /// `⌈h / (2σ + 1)⌉`.
    pub slack_term: u64,
    /// Smallest `m` whose looseness bound reaches `h`.
    pub looseness_term: u64,
    /// `⌈Σ p_j / (max d_j - min t_j)⌉`.
    pub load_term: u64,
    pub value: u64,
}

pub fn min_machines_lower_bound(instance: &Instance) -> MachineLowerBound {
    let p = analysis::profile(instance);
    let h = p.height as u64;

    let load_term = match (
        instance.jobs.iter().map(|j| j.release).min(),
        instance.jobs.iter().map(|j| j.deadline).max(),
    ) {
        (Some(lo), Some(hi)) if hi > lo => {
            let work: i128 = instance.jobs.iter().map(|j| i128::from(j.processing)).sum();
            let span = i128::from(hi - lo);
            ((work + span - 1) / span) as u64
        }
        _ => 0,
    };

    let (slack_term, looseness_term) = if p.n == 0 || !p.fits {
        (0, 0)
    } else {
        let slack_term = h.div_ceil(2 * p.slack as u64 + 1);
        let looseness_term = (1..)
            .find(|&m| {
                looseness_height_bound(m, p.ell, p.looseness)
                    .map(|b| b.value >= h)
                    .unwrap_or(true)
            })
            .expect("the bound grows without limit in m") as u64;
        (slack_term, looseness_term)
    };

    MachineLowerBound {
        slack_term,
        looseness_term,
        load_term,
        value: slack_term.max(looseness_term).max(load_term).max(1),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinMachines {
    pub lower_bound: MachineLowerBound,
    /// Smallest feasible machine count, if one up to the cap exists.
    pub minimum: Option<usize>,
    /// Machine counts tried, in order, with their answers.
    pub tried: Vec<(usize, Feasibility)>,
}

/// Scans `m = lower bound, lower bound + 1, …, m_max` until the instance is feasible.
pub fn min_machines_with(instance: &Instance, m_max: usize, solver: &Solver) -> Result<MinMachines, SolveError> {
    let lower_bound = min_machines_lower_bound(instance);
    let mut tried = Vec::new();
    let start = usize::try_from(lower_bound.value).unwrap_or(usize::MAX);
    for m in start..=m_max {
        let feasibility = solver.solve(&instance.with_machines(m))?.feasibility;
        tried.push((m, feasibility));
        if feasibility.is_feasible() {
            return Ok(MinMachines {
                lower_bound,
                minimum: Some(m),
                tried,
            });
        }
    }
    Ok(MinMachines {
        lower_bound,
        minimum: None,
        tried,
    })
}

pub fn min_machines(instance: &Instance, m_max: usize) -> Result<Option<usize>, SolveError> {
    Ok(min_machines_with(instance, m_max, &Solver::default())?.minimum)
}
