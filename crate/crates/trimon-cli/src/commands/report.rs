//! `report`: one JSON summary per device, merging fresh derivations with any
//! prior command outputs found in the output directory.

use super::{is_quiet, output_dir, required_config, Command};
use crate::commands::derive::derived_report;
use crate::config::derive_all;
use crate::error::Result;
use clap::ArgMatches;
use serde_json::{json, Value};
use trimon_core::circuit::Qubit;
use trimon_core::constants::{j_over_pi_mhz, GHZ, MHZ};

pub struct Report;

impl Command for Report {
    fn name(&self) -> &'static str {
        "report"
    }

    fn about(&self) -> &'static str {
        "Aggregate derivations and prior outputs into a single summary"
    }

    fn configure(&self, cmd: clap::Command) -> clap::Command {
        cmd
    }

    fn run(&self, matches: &ArgMatches) -> Result<()> {
        let config = required_config(matches)?;
        let derived = derive_all(&config)?;
        let out = output_dir(matches)?;

        let chi = derived.chi.as_ref();
        let j_pairs = [derived.kerr.j_ab, derived.kerr.j_bc, derived.kerr.j_ca];
        let qubits: Vec<Value> = Qubit::ALL
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                json!({
                    "label": q.to_string(),
                    "omega_upper_ghz": derived.table.upper(q) / GHZ,
                    "alpha_2pi_mhz": derived.kerr.alpha(q) / MHZ,
                    "chi_2pi_mhz": chi.map(|c| match q {
                        Qubit::A => c.chi_a / MHZ,
                        Qubit::B => c.chi_b / MHZ,
                        Qubit::C => c.chi_c / MHZ,
                    }),
                    "j_pair_pi_mhz": j_over_pi_mhz(j_pairs[i]),
                })
            })
            .collect();

        let report = json!({
            "qubits": qubits,
            "couplings_pi_mhz": {
                "j_ab": j_over_pi_mhz(derived.kerr.j_ab),
                "j_bc": j_over_pi_mhz(derived.kerr.j_bc),
                "j_ca": j_over_pi_mhz(derived.kerr.j_ca),
            },
            "derived": derived_report(&derived),
            "spectrum": out.read_json_if_present("spectrum.json"),
            "simulation": out.read_json_if_present("simulate_result.json"),
            "tomography": out.read_json_if_present("tomo_result.json"),
            "crossing": out.read_json_if_present("crossing_fit.json"),
        });
        let path = out.write_json("report.json", &report)?;
        if matches.get_one::<String>("format").map(String::as_str) == Some("csv") {
            let rows: Vec<String> = report["qubits"]
                .as_array()
                .unwrap()
                .iter()
                .map(|q| {
                    format!(
                        "{},{:.6},{:.2},{},{:.2}",
                        q["label"].as_str().unwrap_or("?"),
                        q["omega_upper_ghz"].as_f64().unwrap_or(f64::NAN),
                        q["alpha_2pi_mhz"].as_f64().unwrap_or(f64::NAN),
                        q["chi_2pi_mhz"]
                            .as_f64()
                            .map_or("".to_string(), |v| format!("{v:.4}")),
                        q["j_pair_pi_mhz"].as_f64().unwrap_or(f64::NAN),
                    )
                })
                .collect();
            out.write_csv(
                "report.csv",
                "qubit,omega_upper_ghz,alpha_2pi_mhz,chi_2pi_mhz,j_pair_pi_mhz",
                &rows,
            )?;
        }
        if !is_quiet(matches) {
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}
