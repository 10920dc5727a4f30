//! Seeded random instances with a cap on slack or looseness.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{format_ratio, Looseness};
use crate::instance::{Instance, Job, Time, TIME_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// Every job has `d - t - p ≤ σ`.
    TargetSlack(Time),
    /// Every job has `d - t ≤ ⌊λ p⌋`.
    TargetLooseness(Looseness),
    /// `d - t - p` uniform in `[0, horizon]`.
    Unconstrained,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("horizon must be at least 1, got {0}")]
    Horizon(Time),
    #[error("horizon {0} is too large")]
    HorizonTooLarge(Time),
    #[error("machines must be at least 1")]
    NoMachines,
    #[error("target slack must be non-negative, got {0}")]
    NegativeSlack(Time),
    #[error("target looseness must be at least 1, got {}", format_ratio(.0))]
    LoosenessBelowOne(Looseness),
    #[error("cannot parse style {0:?}; expected slack:<σ>, looseness:<p/q> or unconstrained")]
    BadStyle(String),
}

impl FromStr for Style {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenerateError::BadStyle(s.to_string());
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "unconstrained" if arg.is_empty() => Ok(Style::Unconstrained),
            "slack" => arg.trim().parse().map(Style::TargetSlack).map_err(|_| bad()),
            "looseness" => {
                let (num, den) = arg.split_once('/').unwrap_or((arg, "1"));
                let num: i64 = num.trim().parse().map_err(|_| bad())?;
                let den: i64 = den.trim().parse().map_err(|_| bad())?;
                if den <= 0 {
                    return Err(bad());
                }
                Ok(Style::TargetLooseness(Ratio::new(num, den)))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Style::TargetSlack(s) => write!(f, "slack:{s}"),
            Style::TargetLooseness(l) => write!(f, "looseness:{}", format_ratio(l)),
            Style::Unconstrained => f.write_str("unconstrained"),
        }
    }
}

/// `n` jobs on `m` machines with releases in `[0, horizon)` and processing
/// times in `[1, horizon]`; the window slack is drawn within the style's cap.
/// Job ids are `0..n`. The same arguments always give the same instance.
pub fn random_instance(seed: u64, n: usize, m: usize, style: Style, horizon: Time) -> Result<Instance, GenerateError> {
    if horizon < 1 {
        return Err(GenerateError::Horizon(horizon));
    }
    if horizon > TIME_LIMIT / 4 {
        return Err(GenerateError::HorizonTooLarge(horizon));
    }
    if m < 1 {
        return Err(GenerateError::NoMachines);
    }
    match style {
        Style::TargetSlack(s) if s < 0 => return Err(GenerateError::NegativeSlack(s)),
        Style::TargetLooseness(l) if l < Ratio::from_integer(1) => return Err(GenerateError::LoosenessBelowOne(l)),
        _ => {}
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs = (0..n as u64)
        .map(|id| {
            let release = rng.gen_range(0..horizon);
            let processing = rng.gen_range(1..=horizon);
            let max_slack = match style {
                Style::TargetSlack(s) => s.min(TIME_LIMIT / 4),
                Style::TargetLooseness(l) => {
                    let window = i128::from(*l.numer()) * i128::from(processing) / i128::from(*l.denom());
                    (window - i128::from(processing)).min(i128::from(TIME_LIMIT / 4)) as Time
                }
                Style::Unconstrained => horizon,
            };
            let slack = rng.gen_range(0..=max_slack);
            Job::new(id, release, release + processing + slack, processing)
        })
        .collect();
    Ok(Instance::new(m, jobs))
}

/// One member of a mixed-style test suite: up to `n_max` jobs on 1 to `m_max`
/// machines, every deadline at most `t_max`.
///
/// Releases, processing times, and slack are each drawn from a horizon of
/// `max(1, t_max / 3)`, and the style rotates between slack, looseness and
/// unconstrained draws.
pub fn suite_instance(seed: u64, n_max: usize, m_max: usize, t_max: Time) -> Result<Instance, GenerateError> {
    let horizon = (t_max / 3).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=n_max);
    let m = rng.gen_range(1..=m_max.max(1));
    let style = match rng.gen_range(0..3) {
        0 => Style::TargetSlack(rng.gen_range(0..=horizon)),
        1 => {
            let (num, den) = [(1, 1), (5, 4), (3, 2), (2, 1)][rng.gen_range(0..4)];
            Style::TargetLooseness(Ratio::new(num, den))
        }
        _ => Style::Unconstrained,
    };
    random_instance(rng.gen(), n, m, style, horizon)
}
