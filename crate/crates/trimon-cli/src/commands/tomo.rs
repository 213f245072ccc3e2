//! `tomo`: end-to-end synthetic tomography — state preparation (matrix or
//! pulse level), dispersive-readout Monte Carlo, MLE reconstruction, fidelity
//! and optional bootstrap uncertainty.

use super::{is_quiet, optional_config, output_dir, Command};
use crate::commands::simulate::{load_sequence, pulse_config_for, spin_model_for};
use crate::error::{CliError, Result};
use crate::output::matrix_json;
use crate::protocols;
use clap::{Arg, ArgMatches};
use serde_json::json;
use trimon_core::gates::{apply_with_frame, FrameLedger};
use trimon_core::linalg::projector;
use trimon_core::pulse::simulate_circuit;
use trimon_core::readout::{histogram, run_tomography, MeasurementModel, Outcome};
use trimon_core::tomo::{bootstrap_fidelity, fidelity, mle_reconstruct, MleOptions};

pub struct Tomo;

impl Command for Tomo {
    fn name(&self) -> &'static str {
        "tomo"
    }

    fn about(&self) -> &'static str {
        "Synthetic readout and maximum-likelihood state reconstruction"
    }

    fn configure(&self, cmd: clap::Command) -> clap::Command {
        cmd.arg(
            Arg::new("protocol")
                .long("protocol")
                .value_name("NAME")
                .value_parser(["bell", "swap", "transfer"])
                .conflicts_with("circuit")
                .help("built-in demonstration protocol (default: bell)"),
        )
        .arg(
            Arg::new("circuit")
                .long("circuit")
                .value_name("PATH")
                .help("JSON circuit description"),
        )
        .arg(
            Arg::new("level")
                .long("level")
                .value_name("LEVEL")
                .value_parser(["matrix", "pulse"])
                .default_value("matrix")
                .help("state-preparation level"),
        )
        .arg(
            Arg::new("bootstrap")
                .long("bootstrap")
                .value_name("N")
                .value_parser(clap::value_parser!(usize))
                .default_value("0")
                .help("bootstrap resamples for the fidelity uncertainty (0 = skip)"),
        )
    }

    fn run(&self, matches: &ArgMatches) -> Result<()> {
        let (sequence, initial, label) = load_sequence(matches)?;
        let level = matches.get_one::<String>("level").expect("default").clone();
        let shots = matches.get_one::<usize>("shots").copied().unwrap_or(10_000);
        let bootstrap = *matches.get_one::<usize>("bootstrap").expect("default");

        let config = optional_config(matches)?;
        let model = match &config {
            Some(c) => c.measurement_model()?,
            None => MeasurementModel::default(),
        };
        let seed = matches
            .get_one::<u64>("seed")
            .copied()
            .or_else(|| config.as_ref().and_then(|c| c.readout.seed));
        let seed = if shots > 0 {
            seed.ok_or_else(|| {
                CliError::Config(
                    "sampled tomography is stochastic: provide --seed or readout.seed".into(),
                )
            })?
        } else {
            seed.unwrap_or(0)
        };

        // prepare the state
        let (rho, prep_fidelity) = match level.as_str() {
            "matrix" => {
                let (u, _) = apply_with_frame(&sequence, FrameLedger::default())?;
                let state = &u * &initial;
                (projector(&state), 1.0)
            }
            "pulse" => {
                let spin = spin_model_for(matches)?;
                let pulse_config = pulse_config_for(matches)?;
                let result = simulate_circuit(&sequence, &spin, &pulse_config, &initial)?;
                (projector(&result.final_state), result.fidelity_to_ideal)
            }
            _ => unreachable!("validated by clap"),
        };

        // the ideal reconstruction target
        let target = if let Some(name) = matches.get_one::<String>("protocol") {
            projector(&protocols::by_name(name)?.target)
        } else if matches.get_one::<String>("circuit").is_some() {
            let ideal = trimon_core::gates::ideal_circuit(&sequence)? * &initial;
            projector(&ideal)
        } else {
            projector(&protocols::bell().target)
        };

        let data = run_tomography(&rho, &model, shots, seed)?;
        let mle_opts = MleOptions {
            seed: seed ^ 0x5ca1_ab1e,
            ..Default::default()
        };
        let result = mle_reconstruct(&data, &mle_opts)?;
        let f = fidelity(&target, &result.rho)?;
        let f_std = if bootstrap > 0 && shots > 0 {
            Some(bootstrap_fidelity(&data, &target, bootstrap, &mle_opts)?)
        } else {
            None
        };

        let out = output_dir(matches)?;
        if !data.records.is_empty() {
            let rows: Vec<String> = data
                .records
                .iter()
                .map(|r| {
                    let outcome = match r.outcome {
                        Outcome::ZeroZero => "00",
                        Outcome::OneOne => "11",
                        Outcome::Discard => "discard",
                    };
                    format!("{},{:.6e},{}", r.setting, r.v, outcome)
                })
                .collect();
            out.write_csv("shots.csv", "setting_k,v_p,outcome", &rows)?;

            let lo = model.means()[3] - 4.0 * model.sigma;
            let hi = model.means()[0] + 4.0 * model.sigma;
            let bins = histogram(&data.records, lo, hi, 80);
            let rows: Vec<String> = bins
                .iter()
                .map(|(l, r, n)| format!("{l:.6e},{r:.6e},{n}"))
                .collect();
            out.write_csv("histogram.csv", "bin_left_v,bin_right_v,count", &rows)?;
        }

        let report = json!({
            "input": label,
            "level": level,
            "shots_per_setting": shots,
            "seed": seed,
            "analytic": data.analytic,
            "preparation_fidelity": prep_fidelity,
            "rho": matrix_json(&result.rho),
            "stokes": result.stokes,
            "fidelity": f,
            "fidelity_std": f_std,
            "log_likelihood": result.log_likelihood,
            "f_k": result.f_k,
            "probability_floor_hits": result.floor_hits,
        });
        let path = out.write_json("tomo_result.json", &report)?;
        if !is_quiet(matches) {
            match f_std {
                Some(std) => println!("{label}: fidelity {f:.4} ± {std:.4}"),
                None => println!("{label}: fidelity {f:.4}"),
            }
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}
