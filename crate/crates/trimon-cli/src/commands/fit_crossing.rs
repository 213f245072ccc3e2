//! `fit-crossing`: extract the inter-device coupling from avoided-crossing
//! spectroscopy data.

use super::{is_quiet, output_dir, Command};
use crate::error::{CliError, Result};
use clap::{Arg, ArgAction, ArgMatches};
use serde_json::json;
use trimon_core::constants::j_over_pi_mhz;
use trimon_core::crossing::{
    fit_avoided_crossing, synthetic_dataset, Branch, CrossingDataset, CrossingPoint,
};

pub struct FitCrossing;

fn parse_csv(path: &str) -> Result<CrossingDataset> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("flux")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Config(format!(
                "{path}:{}: expected flux,freq_hz,branch",
                lineno + 1
            )));
        }
        let flux: f64 = fields[0]
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("{path}:{}: {e}", lineno + 1)))?;
        let freq_hz: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("{path}:{}: {e}", lineno + 1)))?;
        let branch = match fields[2].trim() {
            "+" | "plus" => Branch::Plus,
            "-" | "minus" => Branch::Minus,
            other => {
                return Err(CliError::Config(format!(
                    "{path}:{}: unknown branch '{other}'",
                    lineno + 1
                )))
            }
        };
        points.push(CrossingPoint {
            flux,
            freq_hz,
            branch,
        });
    }
    CrossingDataset::new(points, None).map_err(CliError::from)
}

impl Command for FitCrossing {
    fn name(&self) -> &'static str {
        "fit-crossing"
    }

    fn about(&self) -> &'static str {
        "Fit the avoided-crossing branch model to spectroscopy data"
    }

    fn configure(&self, cmd: clap::Command) -> clap::Command {
        cmd.arg(
            Arg::new("data")
                .long("data")
                .value_name("CSV")
                .help("input rows: flux,freq_hz,branch(+|-)"),
        )
        .arg(
            Arg::new("demo")
                .long("demo")
                .action(ArgAction::SetTrue)
                .conflicts_with("data")
                .help("fit a built-in synthetic dataset (J/pi = 77.6 MHz)"),
        )
        .arg(
            Arg::new("noise-mhz")
                .long("noise-mhz")
                .value_name("MHZ")
                .value_parser(clap::value_parser!(f64))
                .default_value("0.0")
                .help("Gaussian frequency noise added to the demo dataset"),
        )
    }

    fn run(&self, matches: &ArgMatches) -> Result<()> {
        let dataset = if matches.get_flag("demo") {
            let noise = *matches.get_one::<f64>("noise-mhz").expect("default") * 1e6;
            let seed = matches.get_one::<u64>("seed").copied();
            if noise > 0.0 && seed.is_none() {
                return Err(CliError::Config(
                    "a noisy demo dataset is stochastic: provide --seed".into(),
                ));
            }
            let fluxes: Vec<f64> = (0..17).map(|i| 0.30 + 0.005 * i as f64).collect();
            synthetic_dataset(
                77.6e6 / 2.0,
                5.5585e9,
                8.0e9,
                1.0,
                &fluxes,
                noise,
                seed.unwrap_or(0),
            )
        } else if let Some(path) = matches.get_one::<String>("data") {
            parse_csv(path)?
        } else {
            return Err(CliError::Usage("provide --data <CSV> or --demo".into()));
        };

        let fit = fit_avoided_crossing(&dataset)?;
        let report = json!({
            "j_hz": fit.j_hz,
            "j_pi_mhz": j_over_pi_mhz(fit.j_hz),
            "omega_q_hz": fit.omega_q_hz,
            "omega_max_hz": fit.omega_max_hz,
            "flux_scale": fit.flux_scale,
            "residual_rms_hz": fit.residual_rms_hz,
            "points": dataset.points.len(),
        });
        let out = output_dir(matches)?;
        let path = out.write_json("crossing_fit.json", &report)?;
        if !is_quiet(matches) {
            println!(
                "J/pi = {:.2} MHz, omega_q = {:.4} GHz, residual rms = {:.1} kHz",
                j_over_pi_mhz(fit.j_hz),
                fit.omega_q_hz / 1e9,
                fit.residual_rms_hz / 1e3
            );
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}
