//! Deep-water limit study: how fast the finite-depth flow approaches the
//! infinite-depth one as the depth grows.

use crate::config::SimConfig;
use crate::dispersion::{Dispersion, EquationSpec};
use crate::dynamics::{run, RunOptions, RunPlan};
use crate::observables::hs_norm_spectrum;
use crate::spectral::Spectrum;
use crate::{FdfError, Result};
use num_complex::Complex64;

/// Outcome of [`limit_study`].
#[derive(Debug, Clone)]
pub struct LimitStudyResult {
    /// Depths, in the strictly increasing order they were run.
    pub deltas: Vec<f64>,
    /// Per depth, the largest Sobolev distance to the deep-water
    /// reference seen at any output time.
    pub errors: Vec<f64>,
    /// Decay exponent fitted by least squares on the largest-depth half
    /// of the list (`errors ~ delta^-rate`); `None` when a vanishing
    /// error leaves the log-log fit undefined.
    pub fitted_rate: Option<f64>,
    /// Sobolev order the distances were measured in.
    pub s: f64,
    /// Common end time of all runs.
    pub t_end: f64,
}

/// Runs the finite-depth equation at each listed depth and the
/// deep-water equation once, all with the same grid, step size, initial
/// data, and output schedule, then reports each depth's worst-case
/// Sobolev distance to the reference over the output times.
///
/// The config supplies grid, data, nonlinearity power, sign, end time,
/// and cadence; its equation kind is not consulted, since the study
/// always pits the depth family against its own deep-water member. The
/// shared step size is the config's, or else the default rule evaluated
/// on the deep-water symbol — the fastest of the family, so the phase
/// cap it satisfies holds at every depth.
///
/// With `linear_only` the nonlinear term is disabled in every run, which
/// reduces each error to an exactly computable per-mode phase gap.
pub fn limit_study(
    config: &SimConfig,
    deltas: &[f64],
    s: f64,
    linear_only: bool,
) -> Result<LimitStudyResult> {
    if deltas.len() < 3 {
        return Err(FdfError::InvalidArgument(format!(
            "a depth study needs at least three depths, got {}",
            deltas.len()
        )));
    }
    for pair in deltas.windows(2) {
        if pair[0] >= pair[1] {
            return Err(FdfError::InvalidArgument(format!(
                "depths must be strictly increasing, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }

    let grid = config.grid()?;
    let u0 = config.initial_field(&grid)?;
    let reference_eq = EquationSpec::new(Dispersion::Bo, config.k, config.sign)?;
    let plan = RunPlan {
        dt: config.resolved_dt(&grid, Dispersion::Bo),
        t_end: config.t_end,
        output_every: config.output_every,
        snapshot_times: Vec::new(),
    };
    let opts = RunOptions {
        linear_only,
        store_every: Some(config.output_every),
        ..RunOptions::default()
    };

    let reference = run(&u0, &reference_eq, &plan, &opts)?;
    let mut errors = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let eq = EquationSpec::new(Dispersion::Fdf { delta }, config.k, config.sign)?;
        let out = run(&u0, &eq, &plan, &opts)?;
        debug_assert_eq!(out.stored.len(), reference.stored.len());
        let mut worst = 0.0_f64;
        for ((_, a), (_, b)) in out.stored.iter().zip(&reference.stored) {
            worst = worst.max(spectral_gap(a, b, s)?);
        }
        errors.push(worst);
    }

    Ok(LimitStudyResult {
        deltas: deltas.to_vec(),
        fitted_rate: fitted_decay_rate(deltas, &errors),
        errors,
        s,
        t_end: config.t_end,
    })
}

/// Sobolev distance between two coefficient states on the same grid.
fn spectral_gap(a: &Spectrum, b: &Spectrum, s: f64) -> Result<f64> {
    debug_assert_eq!(a.grid(), b.grid());
    let diff: Vec<Complex64> = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(&x, &y)| x - y)
        .collect();
    hs_norm_spectrum(&Spectrum::new(a.grid().clone(), diff)?, s)
}

/// Least-squares slope of `-log error` against `log delta` over the
/// largest `ceil(len / 2)` depths; `None` when any error there is zero
/// (or negative), since its logarithm is undefined.
fn fitted_decay_rate(deltas: &[f64], errors: &[f64]) -> Option<f64> {
    let keep = deltas.len().div_ceil(2);
    let start = deltas.len() - keep;
    let tail: Vec<(f64, f64)> = deltas[start..]
        .iter()
        .zip(&errors[start..])
        .map(|(&d, &e)| (d, e))
        .collect();
    if tail.iter().any(|&(_, e)| e <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = tail.iter().map(|&(d, _)| d.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, e)| e.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let y_mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-(sxy / sxx))
}
