//! Seeded fuzzing of the identities and inequalities on random sequences.
//!
//! Trial `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`,
//! so every trial is reproducible on its own and the summary does not
//! depend on how trials are scheduled across threads.

use hardy_core::{
    copson_verify, critical_hardy_check, hardy_deficit, stability_report, verify_identity, Complex, Exponent64,
    FinSeq64, DEFAULT_ABS_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::{identity_pair_for_fuzz, identity_violations, Family, RunConfig, SequenceFile, Violation};

/// Identifier of the random generator written into every fuzz report.
pub const GENERATOR: &str = "chacha8 (rand_chacha 0.9), seed_from_u64(seed), stream = trial index; \
length ~ U{1..=support_max}, values re, im ~ N(0, 1)";

/// Aggregate of a fuzz run. Minimum slacks and maximum residuals are
/// order-independent reductions over all trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub generator: String,
    pub trials: usize,
    pub max_identity_residual: Option<f64>,
    pub min_copson_slack: Option<f64>,
    pub min_remainder: f64,
    pub min_deficit: f64,
    pub min_stability_margin: Option<f64>,
    pub min_critical_slack: f64,
    pub violations: Vec<Violation>,
}

/// The sequence for trial `index`.
pub fn trial_sequence(seed: u64, index: u64, support_max: usize) -> FinSeq64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let len = rng.random_range(1..=support_max);
    let values: Vec<Complex<f64>> = (0..len)
        .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    FinSeq64::from_values(&values).expect("normal samples are finite")
}

struct Trial {
    identity_residual: Option<f64>,
    copson_slack: Option<f64>,
    min_remainder: f64,
    deficit: f64,
    margin: Option<f64>,
    critical_slack: f64,
    violations: Vec<Violation>,
}

fn tag(mut v: Vec<Violation>, trial: usize) -> Vec<Violation> {
    for x in &mut v {
        x.check = format!("trial {trial}: {}", x.check);
    }
    v
}

fn run_trial(config: &RunConfig, p: Exponent64, tables: Option<&SequenceFile>, index: usize) -> Result<Trial> {
    let u = trial_sequence(config.seed, index as u64, config.support_max);
    let tol = config.tol;
    let mut violations = Vec::new();

    let (identity_residual, copson_slack, min_remainder) = if config.family == Family::Copson {
        // the Copson inequality needs u(1) = 0: move the draw one step right
        let shifted = FinSeq64::from_entries(u.iter().map(|(n, z)| (n + 1, z)))?;
        let report = copson_verify(&shifted, p, config.alpha)?;
        let threshold = -tol * report.scale();
        if report.residual < threshold {
            violations.push(Violation::new("copson_slack", None, report.residual, threshold));
        }
        let min_rem = report.per_index.iter().map(|t| t.remainder).fold(f64::INFINITY, f64::min);
        (None, Some(report.residual), min_rem)
    } else {
        let pair = identity_pair_for_fuzz(config, p, tables)?;
        let report = verify_identity(&u, &pair)?;
        violations.extend(identity_violations(&report, tol));
        let min_rem = report.per_index.iter().map(|t| t.remainder).fold(f64::INFINITY, f64::min);
        (Some(report.relative_residual()), None, min_rem)
    };

    let deficit = hardy_deficit(&u, p)?;
    let size: f64 = u.iter().map(|(_, z)| z.norm().powf(p.get())).sum();
    if deficit < -DEFAULT_ABS_TOL * size.max(1.0) {
        violations.push(Violation::new("deficit_nonnegative", None, deficit, -DEFAULT_ABS_TOL * size.max(1.0)));
    }

    let margin = if p.get() >= 2.0 {
        let r = stability_report(&u, p)?;
        let threshold = -tol * (r.deficit + 1.0);
        if r.margin < threshold {
            violations.push(Violation::new("stability_margin", None, r.margin, threshold));
        }
        Some(r.margin)
    } else {
        None
    };

    let real = FinSeq64::from_entries(u.iter().map(|(n, z)| (n, Complex::new(z.re, 0.0))))?;
    let critical = critical_hardy_check(&real, p)?;
    let threshold = -tol * critical.lhs.max(1.0);
    if critical.slack < threshold {
        violations.push(Violation::new("critical_hardy_slack", None, critical.slack, threshold));
    }
    if critical.rhs > critical.rhs_at_v1 {
        violations.push(Violation::new("critical_hardy_infimum", None, critical.rhs, critical.rhs_at_v1));
    }

    Ok(Trial {
        identity_residual,
        copson_slack,
        min_remainder,
        deficit,
        margin,
        critical_slack: critical.slack,
        violations: tag(violations, index),
    })
}

pub fn fuzz(config: &RunConfig, p: Exponent64, tables: Option<&SequenceFile>) -> Result<FuzzSummary> {
    let trials: Vec<Trial> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, p, tables, i))
        .collect::<Result<_>>()?;
    let fold_opt = |xs: Vec<Option<f64>>, pick: fn(f64, f64) -> f64| xs.into_iter().flatten().reduce(pick);
    Ok(FuzzSummary {
        generator: GENERATOR.to_string(),
        trials: config.trials,
        max_identity_residual: fold_opt(trials.iter().map(|t| t.identity_residual).collect(), f64::max),
        min_copson_slack: fold_opt(trials.iter().map(|t| t.copson_slack).collect(), f64::min),
        min_remainder: trials.iter().map(|t| t.min_remainder).fold(f64::INFINITY, f64::min),
        min_deficit: trials.iter().map(|t| t.deficit).fold(f64::INFINITY, f64::min),
        min_stability_margin: fold_opt(trials.iter().map(|t| t.margin).collect(), f64::min),
        min_critical_slack: trials.iter().map(|t| t.critical_slack).fold(f64::INFINITY, f64::min),
        violations: trials.into_iter().flat_map(|t| t.violations).collect(),
    })
}
