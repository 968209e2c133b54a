//! Consistency check between the two finite-depth forms: at depth
//! `delta` they are the same cubic flow up to the speed factor
//! `c = 3 / (2 pi delta)` — amplitudes carry `sqrt(c)` and times divide
//! by `c`.

use crate::config::SimConfig;
use crate::dispersion::{Dispersion, EquationSpec};
use crate::dynamics::{default_dt, run, snapped_dt, RunOptions, RunPlan};
use crate::observables::{hs_distance, hs_norm};
use crate::spectral::Field;
use crate::{FdfError, Result};
use std::f64::consts::PI;

/// Runs the first form to time `c * T` and the second form, from
/// `sqrt(c)`-amplified data, to time `T`, then returns the relative
/// `H^(1/2)` discrepancy between the first result mapped through the
/// correspondence and the second.
///
/// The two runs snap their step sizes to their own horizons
/// independently from one shared request (the config's step, or the
/// default rule on the first form), so the discrepancy reflects genuine
/// discretization differences rather than a shared trajectory. The
/// depth under test is the `delta` argument; the config supplies grid,
/// data, sign, and end time, and must carry the cubic nonlinearity.
pub fn transform_check(config: &SimConfig, delta: f64) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(FdfError::InvalidArgument(format!(
            "depth delta = {delta} must be finite and positive"
        )));
    }
    if config.k != 2 {
        return Err(FdfError::InvalidArgument(format!(
            "the depth-rescaling correspondence holds for the cubic nonlinearity, not k = {}",
            config.k
        )));
    }

    let grid = config.grid()?;
    let u0 = config.initial_field(&grid)?;
    let c = 3.0 / (2.0 * PI * delta);
    let eq_first = EquationSpec::new(Dispersion::Fdf { delta }, 2, config.sign)?;
    let eq_second = EquationSpec::new(Dispersion::Fdf2 { delta }, 2, config.sign)?;
    let dt_request = config
        .dt
        .unwrap_or_else(|| default_dt(&grid, eq_first.dispersion));
    let opts = RunOptions::default();

    let first = run(
        &u0,
        &eq_first,
        &RunPlan {
            dt: snapped_dt(c * config.t_end, dt_request),
            t_end: c * config.t_end,
            output_every: u64::MAX,
            snapshot_times: Vec::new(),
        },
        &opts,
    )?;

    let amplified = rescale(&u0, c.sqrt());
    let second = run(
        &amplified,
        &eq_second,
        &RunPlan {
            dt: snapped_dt(config.t_end, dt_request),
            t_end: config.t_end,
            output_every: u64::MAX,
            snapshot_times: Vec::new(),
        },
        &opts,
    )?;

    let mapped = rescale(&first.final_state.field, c.sqrt());
    let gap = hs_distance(&mapped, &second.final_state.field, 0.5)?;
    let norm = hs_norm(&second.final_state.field, 0.5)?;
    Ok(if norm > 0.0 { gap / norm } else { gap })
}

fn rescale(field: &Field, factor: f64) -> Field {
    let values = field.values().iter().map(|&v| factor * v).collect();
    Field::new(field.grid().clone(), values).expect("rescaling keeps the value count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EquationKind;
    use crate::dispersion::Sign;
    use crate::init::InitialData;

    fn cubic_config(grid_n: usize, grid_length: f64, t_end: f64, amplitude: f64) -> SimConfig {
        SimConfig {
            equation: EquationKind::Mfdf,
            delta: Some(1.0),
            k: 2,
            sign: Sign::Defocusing,
            grid_n,
            grid_length,
            dt: None,
            t_end,
            output_every: 100,
            snapshot_times: Vec::new(),
            init: InitialData::Gaussian {
                amplitude,
                sigma: 1.5,
            },
            seed: 0,
        }
    }

    #[test]
    fn unit_speed_depth_makes_the_forms_coincide() {
        let config = cubic_config(128, 16.0 * PI, 0.5, 0.5);
        let discrepancy = transform_check(&config, 3.0 / (2.0 * PI)).unwrap();
        assert!(discrepancy <= 1e-12, "discrepancy {discrepancy}");
    }

    #[test]
    fn zero_data_gives_zero_discrepancy() {
        let config = cubic_config(64, 16.0 * PI, 0.5, 0.0);
        assert_eq!(transform_check(&config, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn moderate_depth_discrepancy_is_discretization_sized() {
        let config = cubic_config(256, 32.0 * PI, 0.5, 0.3);
        let discrepancy = transform_check(&config, 1.0).unwrap();
        assert!(
            discrepancy > 0.0 && discrepancy <= 1e-6,
            "discrepancy {discrepancy}"
        );
    }

    #[test]
    fn non_cubic_power_is_rejected() {
        let mut config = cubic_config(64, 16.0 * PI, 0.1, 0.3);
        config.equation = EquationKind::Gfdf;
        config.k = 3;
        assert!(transform_check(&config, 1.0).is_err());
        let config = cubic_config(64, 16.0 * PI, 0.1, 0.3);
        assert!(transform_check(&config, -1.0).is_err());
    }
}
