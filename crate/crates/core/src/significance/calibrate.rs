//! Monte-Carlo realization of Cochran's null model.
//!
//! Each trial draws a fresh matrix in which row `i` holds exactly `u_i`
//! ones placed uniformly at random among the `j` sites. Trial `k` uses a
//! ChaCha8 generator keyed by `seed` (via `seed_from_u64`) on stream `k`;
//! the ones of each row are chosen by a partial Fisher-Yates shuffle of
//! `0..j` driven by `random_range`. A trial's matrix therefore depends only
//! on `(seed, k)`, and sequential and parallel runs agree bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::chisq::{chi_square_isf, chi_square_sf};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

pub const MIN_TRIALS: usize = 1000;

/// Probabilities at which empirical and χ² quantiles are compared.
pub const QUANTILE_LEVELS: [f64; 5] = [0.5, 0.9, 0.95, 0.99, 0.999];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantile {
    pub level: f64,
    pub empirical: f64,
    pub chi_square: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub subjects: usize,
    pub sites: usize,
    pub trials: usize,
    pub seed: u64,
    /// Trials where Q is undefined (zero denominator).
    pub degenerate: usize,
    pub df: u32,
    pub quantiles: Vec<Quantile>,
    /// Fraction of trials with Q at or above the χ² 0.05 critical value.
    pub rejection_rate_05: Option<f64>,
    pub observed_q: Option<f64>,
    /// `(1 + #{Q_trial ≥ Q_obs}) / (1 + trials)`.
    pub empirical_p: Option<f64>,
    /// χ² tail probability of `observed_q`, for comparison.
    pub chi_square_p: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct CalibrationOptions {
    pub trials: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl CalibrationOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            execution: Execution::default(),
        }
    }
}

/// Matrix column totals for one trial.
pub fn null_column_totals(row_totals: &[usize], sites: usize, seed: u64, trial: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut order: Vec<usize> = Vec::with_capacity(sites);
    let mut totals = vec![0u32; sites];
    for &u in row_totals {
        order.clear();
        order.extend(0..sites);
        for k in 0..u {
            let r = rng.random_range(k..sites);
            order.swap(k, r);
            totals[order[k]] += 1;
        }
    }
    totals
}

fn q_from_totals(sites: u64, totals: &[u32], denominator: u64) -> f64 {
    let sum: u64 = totals.iter().map(|&t| u64::from(t)).sum();
    let sq: u64 = totals.iter().map(|&t| u64::from(t).pow(2)).sum();
    ((sites - 1) * (sites * sq - sum * sum)) as f64 / denominator as f64
}

pub fn null_calibration(
    subjects: usize,
    row_totals: &[usize],
    sites: usize,
    observed_q: Option<f64>,
    options: CalibrationOptions,
) -> Result<Calibration> {
    if row_totals.len() != subjects {
        return Err(Error::Domain(format!(
            "{} row totals for {subjects} subjects",
            row_totals.len()
        )));
    }
    if sites < 2 {
        return Err(Error::Domain("calibration needs at least two sites".into()));
    }
    if options.trials < MIN_TRIALS {
        return Err(Error::Domain(format!(
            "calibration needs at least {MIN_TRIALS} trials, got {}",
            options.trials
        )));
    }
    if let Some((i, &u)) = row_totals.iter().enumerate().find(|(_, &u)| u > sites) {
        return Err(Error::Domain(format!(
            "row total u_{i} = {u} exceeds the {sites} sites"
        )));
    }
    let j = sites as u64;
    let df = (sites - 1) as u32;
    let denominator: u64 = row_totals
        .iter()
        .map(|&u| u as u64 * (j - u as u64))
        .sum();

    let mut result = Calibration {
        subjects,
        sites,
        trials: options.trials,
        seed: options.seed,
        degenerate: 0,
        df,
        quantiles: Vec::new(),
        rejection_rate_05: None,
        observed_q,
        empirical_p: None,
        chi_square_p: observed_q.map(|q| chi_square_sf(q, df)).transpose()?,
    };
    if denominator == 0 {
        // Row totals fix every row at all-zeros or all-ones.
        result.degenerate = options.trials;
        return Ok(result);
    }

    let mut qs = par::map_range(options.execution, options.trials, |k| {
        let totals = null_column_totals(row_totals, sites, options.seed, k as u64);
        q_from_totals(j, &totals, denominator)
    });

    let critical = chi_square_isf(0.05, df)?;
    let n = qs.len() as f64;
    result.rejection_rate_05 = Some(qs.iter().filter(|&&q| q >= critical).count() as f64 / n);
    if let Some(obs) = observed_q {
        // Guard against rounding when the observed value comes from the same formula.
        let hits = qs.iter().filter(|&&q| q >= obs - 1e-9 * obs.abs()).count();
        result.empirical_p = Some((hits as f64 + 1.0) / (n + 1.0));
    }
    qs.sort_by(f64::total_cmp);
    result.quantiles = QUANTILE_LEVELS
        .iter()
        .map(|&level| {
            let rank = ((level * n).ceil() as usize).clamp(1, qs.len());
            Ok(Quantile {
                level,
                empirical: qs[rank - 1],
                chi_square: chi_square_isf(1.0 - level, df)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_keep_their_totals() {
        // Totals only reveal column sums; check row counts by single-row draws.
        for trial in 0..50 {
            let t = null_column_totals(&[7], 20, 99, trial);
            assert_eq!(t.iter().sum::<u32>(), 7);
            assert!(t.iter().all(|&x| x <= 1));
        }
        let t = null_column_totals(&[3, 5, 0, 20], 20, 1, 0);
        assert_eq!(t.iter().sum::<u32>(), 28);
        assert!(t.iter().all(|&x| (1..=3).contains(&x)));
    }

    #[test]
    fn deterministic_per_trial() {
        assert_eq!(
            null_column_totals(&[4, 6], 30, 5, 17),
            null_column_totals(&[4, 6], 30, 5, 17)
        );
        assert_ne!(
            null_column_totals(&[4, 6], 30, 5, 17),
            null_column_totals(&[4, 6], 30, 5, 18)
        );
    }

    #[test]
    fn all_zero_rows_are_degenerate() {
        let c = null_calibration(3, &[0, 0, 0], 10, None, CalibrationOptions::new(1000, 1)).unwrap();
        assert_eq!(c.degenerate, 1000);
        assert!(c.quantiles.is_empty());
        assert_eq!(c.rejection_rate_05, None);
    }

    #[test]
    fn argument_errors() {
        let opts = CalibrationOptions::new(1000, 1);
        assert!(null_calibration(2, &[3, 11], 10, None, opts).is_err());
        assert!(null_calibration(3, &[3, 1], 10, None, opts).is_err());
        assert!(null_calibration(2, &[3, 1], 10, None, CalibrationOptions::new(999, 1)).is_err());
    }

    #[test]
    fn sequential_matches_default() {
        let mut opts = CalibrationOptions::new(2000, 42);
        let a = null_calibration(3, &[2, 3, 4], 12, Some(10.0), opts).unwrap();
        opts.execution = Execution::Sequential;
        let b = null_calibration(3, &[2, 3, 4], 12, Some(10.0), opts).unwrap();
        assert_eq!(a, b);
    }
}
