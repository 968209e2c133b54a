//! Scaling-symmetry check: the cubic finite-depth flow maps onto itself
//! under `u -> lambda^(-1/2) u(x / lambda, t / lambda^2)` with the depth
//! stretched to `lambda * delta`, and the discrete flow should agree up
//! to discretization error.

use crate::config::SimConfig;
use crate::dispersion::{Dispersion, EquationSpec};
use crate::dynamics::{run, RunOptions, RunPlan};
use crate::observables::{hs_distance, hs_norm};
use crate::spectral::{Field, SpectralGrid};
use crate::{FdfError, Result};

/// Image of a state under the symmetry: the same mode count on a box
/// stretched by `lambda`, values shrunk by `lambda^(-1/2)`. Grid point
/// `j` of the image sits at `lambda` times grid point `j` of the
/// original, so the values transport index-wise.
pub fn scaled_data(u0: &Field, lambda: f64) -> Result<Field> {
    check_lambda(lambda)?;
    let grid = SpectralGrid::new(u0.grid().n(), lambda * u0.grid().length())?;
    let factor = lambda.powf(-0.5);
    let values = u0.values().iter().map(|&v| factor * v).collect();
    Field::new(grid, values)
}

/// Runs the config's cubic finite-depth problem once as given and once
/// pushed through the symmetry (box `lambda * L`, depth `lambda *
/// delta`, horizon `lambda^2 * T`, data rescaled), then returns the
/// relative `H^(1/2)` discrepancy between the first run's image and the
/// second run's result.
///
/// Both runs take steps of the same size — the second simply takes
/// `lambda^2` times as many — so in the second run's own units its step
/// is `lambda^2` times finer and the discrepancy is dominated by the
/// first run's time-stepping error. At `lambda = 1` the two runs are
/// identical and the discrepancy is exactly zero.
pub fn scaling_check(config: &SimConfig, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let spec = config.equation_spec()?;
    let delta = match spec.dispersion {
        Dispersion::Fdf { delta } => delta,
        _ => {
            return Err(FdfError::InvalidArgument(
                "the scaling symmetry applies to the finite-depth equation".into(),
            ))
        }
    };
    if spec.k != 2 {
        return Err(FdfError::InvalidArgument(format!(
            "the scaling symmetry holds for the cubic nonlinearity, not k = {}",
            spec.k
        )));
    }

    let grid = config.grid()?;
    let u0 = config.initial_field(&grid)?;
    let dt = config.resolved_dt(&grid, spec.dispersion);
    let opts = RunOptions::default();
    let base = run(
        &u0,
        &spec,
        &RunPlan {
            dt,
            t_end: config.t_end,
            output_every: u64::MAX,
            snapshot_times: Vec::new(),
        },
        &opts,
    )?;

    let v0 = scaled_data(&u0, lambda)?;
    let stretched = EquationSpec::new(
        Dispersion::Fdf {
            delta: lambda * delta,
        },
        2,
        spec.sign,
    )?;
    let t_long = lambda * lambda * config.t_end;
    let steps = (t_long / dt).round().max(1.0);
    let scaled = run(
        &v0,
        &stretched,
        &RunPlan {
            dt: t_long / steps,
            t_end: t_long,
            output_every: u64::MAX,
            snapshot_times: Vec::new(),
        },
        &opts,
    )?;

    let image = scaled_data(&base.final_state.field, lambda)?;
    let gap = hs_distance(&image, &scaled.final_state.field, 0.5)?;
    let norm = hs_norm(&scaled.final_state.field, 0.5)?;
    Ok(if norm > 0.0 { gap / norm } else { gap })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(FdfError::InvalidArgument(format!(
            "scaling factor lambda = {lambda} must be finite and positive"
        )));
    }
    Ok(())
}
