//! `spectrum`: exact-diagonalization oracle vs the closed-form levels.

use super::{is_quiet, output_dir, required_config, Command};
use crate::config::derive_all;
use crate::error::{CliError, Result};
use clap::{Arg, ArgMatches};
use serde_json::json;
use trimon_core::circuit::perturbative_energy;
use trimon_core::spectrum::{levels_by_occupation, exact_spectrum, PotentialForm, SpectrumOptions};

pub struct Spectrum;

const OCCUPATIONS: [(usize, usize, usize); 7] = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 0),
    (0, 1, 1),
    (1, 0, 1),
];

impl Command for Spectrum {
    fn name(&self) -> &'static str {
        "spectrum"
    }

    fn about(&self) -> &'static str {
        "Diagonalize the truncated circuit Hamiltonian and compare with the closed-form levels"
    }

    fn configure(&self, cmd: clap::Command) -> clap::Command {
        cmd.arg(
            Arg::new("n-max")
                .long("n-max")
                .value_name("N")
                .value_parser(clap::value_parser!(usize))
                .default_value("6")
                .help("Fock states per mode"),
        )
        .arg(
            Arg::new("potential")
                .long("potential")
                .value_name("FORM")
                .value_parser(["harmonic", "quartic", "cosine"])
                .default_value("quartic")
                .help("junction potential entering the oracle"),
        )
    }

    fn run(&self, matches: &ArgMatches) -> Result<()> {
        let config = required_config(matches)?;
        let derived = derive_all(&config)?;
        let n_max = *matches.get_one::<usize>("n-max").expect("default");
        let form: PotentialForm = matches
            .get_one::<String>("potential")
            .expect("default")
            .parse()
            .map_err(|e| CliError::Usage(format!("{e}")))?;
        let opts = SpectrumOptions {
            n_max,
            form,
            check_convergence: true,
        };
        let spec = derived.spec;
        let levels = levels_by_occupation(&spec, &opts, &OCCUPATIONS)?;
        let full = exact_spectrum(&spec, &opts)?;

        let mut rows = Vec::new();
        let mut entries = Vec::new();
        for (i, occ) in OCCUPATIONS.iter().enumerate() {
            let pert = perturbative_energy(
                (occ.0 as u32, occ.1 as u32, occ.2 as u32),
                &derived.modes,
                &derived.kerr,
            );
            let exact = levels[i];
            let rel = if pert != 0.0 { (exact - pert) / pert } else { 0.0 };
            rows.push(format!(
                "{} {} {},{:.8e},{:.8e},{:.6e}",
                occ.0, occ.1, occ.2, exact, pert, rel
            ));
            entries.push(json!({
                "occupation": [occ.0, occ.1, occ.2],
                "exact_hz": exact,
                "perturbative_hz": pert,
                "relative_difference": rel,
            }));
        }
        // pairwise shifts from the identified levels
        let zz = |i: usize, j: usize, k: usize| levels[k] - levels[i] - levels[j];
        let zz_exact = [zz(1, 2, 4), zz(2, 3, 5), zz(1, 3, 6)];
        let zz_pert = [
            -2.0 * derived.kerr.j_ab,
            -2.0 * derived.kerr.j_bc,
            -2.0 * derived.kerr.j_ca,
        ];
        let pairs = ["ab", "bc", "ca"];
        let mut zz_entries = Vec::new();
        for i in 0..3 {
            rows.push(format!(
                "zz_{},{:.8e},{:.8e},{:.6e}",
                pairs[i],
                zz_exact[i],
                zz_pert[i],
                (zz_exact[i] - zz_pert[i]) / zz_pert[i]
            ));
            zz_entries.push(json!({
                "pair": pairs[i],
                "exact_hz": zz_exact[i],
                "perturbative_hz": zz_pert[i],
                "relative_difference": (zz_exact[i] - zz_pert[i]) / zz_pert[i],
            }));
        }

        let report = json!({
            "n_max": n_max,
            "potential": format!("{form:?}").to_lowercase(),
            "converged": full.is_converged(),
            "top_layer_leakage": full.leakage,
            "levels": entries,
            "pairwise_shifts": zz_entries,
            "spectrum_hz": full.levels.iter().take(20).collect::<Vec<_>>(),
        });
        let out = output_dir(matches)?;
        let json_path = out.write_json("spectrum.json", &report)?;
        out.write_csv(
            "spectrum.csv",
            "level,exact_hz,perturbative_hz,relative_difference",
            &rows,
        )?;

        if !is_quiet(matches) {
            if !full.is_converged() {
                eprintln!(
                    "warning: truncation too small, top-layer leakage {:.2e}",
                    full.leakage.unwrap_or(f64::NAN)
                );
            }
            println!("wrote {}", json_path.display());
        }
        Ok(())
    }
}
