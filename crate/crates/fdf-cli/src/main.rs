//! Command-line front end: simulation runs, verification studies, and
//! file inspection, all driven by flat `key = value` config documents.
//!
//! Exit codes: 0 on success, 1 when arguments or configuration fail
//! validation, 2 when a run fails at runtime (blow-up, I/O, malformed
//! files).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use fdf_core::config::{parse_config, SimConfig};
use fdf_core::diagnostics::{render_diagnostics, write_diagnostics};
use fdf_core::dispersion::{verify_dispersion_bounds, EquationSpec};
use fdf_core::dynamics::{run, RunOptions, SimState};
use fdf_core::experiments::{illposed_probe, limit_study, scaling_check, transform_check};
use fdf_core::observables::invariants;
use fdf_core::snapshot::{read_snapshot, write_snapshot};
use fdf_core::{FdfError, Result};

#[derive(Parser)]
#[command(
    name = "fdf",
    version,
    about = "Pseudospectral solver and verification harness for the finite-depth dispersive family"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured problem; writes diagnostics.csv, any
    /// requested snapshots, and final.bin into the output directory.
    Simulate {
        /// Config document (flat key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the config's problem at each depth against the deep-water
    /// reference; prints a delta,error table and the fitted decay rate.
    LimitStudy {
        #[arg(long)]
        config: PathBuf,
        /// Strictly increasing depths, comma-separated (at least three).
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
        /// Sobolev order the errors are measured in.
        #[arg(long)]
        s: f64,
    },
    /// Compare the config's cubic run against its image under the
    /// scaling symmetry at stretch factor lambda.
    ScalingCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lambda: f64,
    },
    /// Compare the config's two finite-depth forms through the
    /// depth-rescaling correspondence at the config's depth.
    TransformCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate symbol-bound ratios over a frequency range at four
    /// samples per octave.
    CheckDispersion {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        ximin: f64,
        #[arg(long)]
        ximax: f64,
    },
    /// Evaluate the high-frequency window probe of the cubic response.
    IllposedProbe {
        /// Carrier frequency of the window pair.
        #[arg(long = "N")]
        carrier: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Recompute the invariant row from a stored snapshot.
    Invariants {
        #[arg(long)]
        snapshot: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let kind = err.kind();
            let _ = err.print();
            return match kind {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                FdfError::InvalidGrid(_)
                | FdfError::InvalidArgument(_)
                | FdfError::EmptySample(_)
                | FdfError::Config { .. } => 1,
                FdfError::NonFinite(_)
                | FdfError::BlowUp { .. }
                | FdfError::Snapshot(_)
                | FdfError::Io(_) => 2,
            })
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::LimitStudy { config, deltas, s } => {
            let config = load_config(&config)?;
            let result = limit_study(&config, &deltas, s, false)?;
            println!("delta,error");
            for (delta, error) in result.deltas.iter().zip(&result.errors) {
                println!("{},{}", csv(*delta), csv(*error));
            }
            match result.fitted_rate {
                Some(rate) => println!("fitted_rate = {rate}"),
                None => println!("fitted_rate = undefined (zero error in the fitted tail)"),
            }
            Ok(())
        }
        Command::ScalingCheck { config, lambda } => {
            let config = load_config(&config)?;
            let discrepancy = scaling_check(&config, lambda)?;
            println!("lambda,discrepancy");
            println!("{},{}", csv(lambda), csv(discrepancy));
            println!("discrepancy = {discrepancy}");
            Ok(())
        }
        Command::TransformCheck { config } => {
            let config = load_config(&config)?;
            let delta = config.delta.ok_or_else(|| {
                FdfError::config_key("delta", "the transform check needs a config with a depth")
            })?;
            let discrepancy = transform_check(&config, delta)?;
            println!("delta,discrepancy");
            println!("{},{}", csv(delta), csv(discrepancy));
            println!("discrepancy = {discrepancy}");
            Ok(())
        }
        Command::CheckDispersion {
            delta,
            ximin,
            ximax,
        } => {
            let reports = verify_dispersion_bounds(delta, ximin, ximax, 4)?;
            println!("regime,quantity,min_ratio,max_ratio,samples");
            for r in &reports {
                println!(
                    "{},{},{},{},{}",
                    r.regime.label(),
                    r.quantity.label(),
                    csv(r.min_ratio),
                    csv(r.max_ratio),
                    r.sample_count
                );
            }
            Ok(())
        }
        Command::IllposedProbe {
            carrier,
            gamma,
            s,
            t,
            delta,
        } => {
            let probe = illposed_probe(carrier, gamma, s, t, delta)?;
            println!("carrier,gamma,s,t,delta,hs_value");
            println!(
                "{},{},{},{},{},{}",
                csv(probe.carrier),
                csv(probe.gamma),
                csv(probe.s),
                csv(probe.t),
                csv(probe.delta),
                csv(probe.hs_value)
            );
            println!("hs_value = {}", probe.hs_value);
            Ok(())
        }
        Command::Invariants { snapshot } => {
            let stored = read_snapshot(&snapshot)?;
            if stored.delta < 0.0 {
                return Err(FdfError::Snapshot(format!(
                    "stored depth {} is negative",
                    stored.delta
                )));
            }
            let eq = if stored.delta > 0.0 {
                EquationSpec::fdf(stored.delta)?
            } else {
                EquationSpec::bo()
            };
            let record = invariants(&stored.field()?, &eq, stored.time);
            print!("{}", render_diagnostics(&[record]));
            Ok(())
        }
    }
}

fn simulate(config_path: &Path, out: &Path) -> Result<()> {
    let config = load_config(config_path)?;
    let grid = config.grid()?;
    let u0 = config.initial_field(&grid)?;
    let eq = config.equation_spec()?;
    let plan = config.run_plan(&grid, eq.dispersion);
    let output = run(&u0, &eq, &plan, &RunOptions::default())?;

    fs::create_dir_all(out)?;
    write_diagnostics(&output.records, &out.join("diagnostics.csv"))?;
    for (index, (time, field)) in output.snapshots.iter().enumerate() {
        let state = SimState {
            time: *time,
            field: field.clone(),
            step_count: (time / plan.dt).round() as u64,
        };
        let name = format!("snapshot_{index:03}.bin");
        write_snapshot(&state, &eq, &out.join(&name))?;
        println!("wrote {name} (t = {time})");
    }
    write_snapshot(&output.final_state, &eq, &out.join("final.bin"))?;
    println!(
        "wrote diagnostics.csv ({} records) and final.bin (t = {}, {} steps, max|u| = {:.6e})",
        output.records.len(),
        output.final_state.time,
        output.final_state.step_count,
        output.final_state.field.max_abs()
    );
    Ok(())
}

fn load_config(path: &Path) -> Result<SimConfig> {
    parse_config(&fs::read_to_string(path)?)
}

/// Fixed-width scientific rendering shared with the diagnostics format,
/// so tables are byte-deterministic.
fn csv(x: f64) -> String {
    format!("{x:.16e}")
}
