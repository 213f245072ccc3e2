//! `derive`: closed-form device parameters from circuit inputs.

use super::{is_quiet, output_dir, required_config, Command};
use crate::config::{derive_all, Derived};
use crate::error::Result;
use clap::ArgMatches;
use serde_json::{json, Value};
use trimon_core::constants::{j_over_pi_mhz, GHZ, MHZ};
use trimon_core::circuit::Qubit;

pub struct Derive;

pub fn derived_report(d: &Derived) -> Value {
    let mut report = json!({
        "device": {
            "ej_hz": d.spec.ej_hz,
            "c_a_f": d.spec.c_a,
            "c_b_f": d.spec.c_b,
            "c_cp_f": d.spec.c_cp,
            "flux": d.spec.flux,
        },
        "charging_energies": {
            "e_ca_hz": d.charging.e_ca,
            "e_cb_hz": d.charging.e_cb,
            "e_cc_hz": d.charging.e_cc,
        },
        "mode_params": {
            "omega_a_hz": d.modes.omega_a,
            "omega_b_hz": d.modes.omega_b,
            "omega_c_hz": d.modes.omega_c,
            "omega_a_ghz": d.modes.omega_a / GHZ,
            "omega_b_ghz": d.modes.omega_b / GHZ,
            "omega_c_ghz": d.modes.omega_c / GHZ,
            "z_a_ohm": d.modes.z_a,
            "z_b_ohm": d.modes.z_b,
            "z_c_ohm": d.modes.z_c,
        },
        "kerr_couplings": {
            "j_a_hz": d.kerr.j_a,
            "j_b_hz": d.kerr.j_b,
            "j_c_hz": d.kerr.j_c,
            "j_ab_hz": d.kerr.j_ab,
            "j_bc_hz": d.kerr.j_bc,
            "j_ca_hz": d.kerr.j_ca,
            "j_ab_pi_mhz": j_over_pi_mhz(d.kerr.j_ab),
            "j_bc_pi_mhz": j_over_pi_mhz(d.kerr.j_bc),
            "j_ca_pi_mhz": j_over_pi_mhz(d.kerr.j_ca),
            "alpha_a_hz": d.kerr.alpha_a,
            "alpha_b_hz": d.kerr.alpha_b,
            "alpha_c_hz": d.kerr.alpha_c,
            "alpha_a_2pi_mhz": d.kerr.alpha_a / MHZ,
            "alpha_b_2pi_mhz": d.kerr.alpha_b / MHZ,
            "alpha_c_2pi_mhz": d.kerr.alpha_c / MHZ,
        },
        "transition_bands": {
            "omega_a_upper_hz": d.table.upper(Qubit::A),
            "omega_a_lower_hz": d.table.lower(Qubit::A),
            "omega_b_upper_hz": d.table.upper(Qubit::B),
            "omega_b_lower_hz": d.table.lower(Qubit::B),
            "omega_c_upper_hz": d.table.upper(Qubit::C),
            "omega_c_lower_hz": d.table.lower(Qubit::C),
            "omega_a_upper_ghz": d.table.upper(Qubit::A) / GHZ,
            "omega_b_upper_ghz": d.table.upper(Qubit::B) / GHZ,
            "omega_c_upper_ghz": d.table.upper(Qubit::C) / GHZ,
            "conditional_hz": d.table.cond,
        },
    });
    if let (Some(cav), Some(chi)) = (&d.cavity, &d.chi) {
        report["cavity"] = json!({
            "omega_bare_hz": cav.omega_bare,
            "g_hz": cav.g,
            "kappa_hz": cav.kappa,
            "delta0_hz": cav.delta0,
            "delta1_hz": cav.delta1,
        });
        report["dispersive_shifts"] = json!({
            "chi_a_hz": chi.chi_a,
            "chi_b_hz": chi.chi_b,
            "chi_c_hz": chi.chi_c,
            "chi_a_2pi_mhz": chi.chi_a / MHZ,
            "chi_b_2pi_mhz": chi.chi_b / MHZ,
            "chi_c_2pi_mhz": chi.chi_c / MHZ,
        });
    }
    report
}

fn derived_csv_rows(d: &Derived) -> Vec<String> {
    let mut rows = vec![
        format!("e_ca,{:.6e},{:.4},MHz", d.charging.e_ca, d.charging.e_ca / MHZ),
        format!("e_cb,{:.6e},{:.4},MHz", d.charging.e_cb, d.charging.e_cb / MHZ),
        format!("e_cc,{:.6e},{:.4},MHz", d.charging.e_cc, d.charging.e_cc / MHZ),
        format!("omega_a,{:.6e},{:.6},GHz", d.modes.omega_a, d.modes.omega_a / GHZ),
        format!("omega_b,{:.6e},{:.6},GHz", d.modes.omega_b, d.modes.omega_b / GHZ),
        format!("omega_c,{:.6e},{:.6},GHz", d.modes.omega_c, d.modes.omega_c / GHZ),
        format!("j_ab,{:.6e},{:.2},MHz (J/pi)", d.kerr.j_ab, j_over_pi_mhz(d.kerr.j_ab)),
        format!("j_bc,{:.6e},{:.2},MHz (J/pi)", d.kerr.j_bc, j_over_pi_mhz(d.kerr.j_bc)),
        format!("j_ca,{:.6e},{:.2},MHz (J/pi)", d.kerr.j_ca, j_over_pi_mhz(d.kerr.j_ca)),
        format!("alpha_a,{:.6e},{:.2},MHz", d.kerr.alpha_a, d.kerr.alpha_a / MHZ),
        format!("alpha_b,{:.6e},{:.2},MHz", d.kerr.alpha_b, d.kerr.alpha_b / MHZ),
        format!("alpha_c,{:.6e},{:.2},MHz", d.kerr.alpha_c, d.kerr.alpha_c / MHZ),
        format!(
            "omega_a_upper,{:.6e},{:.6},GHz",
            d.table.upper(Qubit::A),
            d.table.upper(Qubit::A) / GHZ
        ),
        format!(
            "omega_b_upper,{:.6e},{:.6},GHz",
            d.table.upper(Qubit::B),
            d.table.upper(Qubit::B) / GHZ
        ),
        format!(
            "omega_c_upper,{:.6e},{:.6},GHz",
            d.table.upper(Qubit::C),
            d.table.upper(Qubit::C) / GHZ
        ),
    ];
    if let Some(chi) = &d.chi {
        rows.push(format!("chi_a,{:.6e},{:.4},MHz", chi.chi_a, chi.chi_a / MHZ));
        rows.push(format!("chi_b,{:.6e},{:.4},MHz", chi.chi_b, chi.chi_b / MHZ));
        rows.push(format!("chi_c,{:.6e},{:.4},MHz", chi.chi_c, chi.chi_c / MHZ));
    }
    rows
}

impl Command for Derive {
    fn name(&self) -> &'static str {
        "derive"
    }

    fn about(&self) -> &'static str {
        "Derive charging energies, mode parameters, Kerr couplings, bands and dispersive shifts"
    }

    fn configure(&self, cmd: clap::Command) -> clap::Command {
        cmd
    }

    fn run(&self, matches: &ArgMatches) -> Result<()> {
        let config = required_config(matches)?;
        let derived = derive_all(&config)?;
        let out = output_dir(matches)?;
        let report = derived_report(&derived);
        let json_path = out.write_json("derived_params.json", &report)?;
        let csv_path = out.write_csv(
            "derived_params.csv",
            "quantity,value_hz,display_value,display_unit",
            &derived_csv_rows(&derived),
        )?;
        if !is_quiet(matches) {
            println!(
                "J/pi = ({:.1}, {:.1}, {:.1}) MHz; bands (A,B,C upper) = ({:.4}, {:.4}, {:.4}) GHz",
                j_over_pi_mhz(derived.kerr.j_ab),
                j_over_pi_mhz(derived.kerr.j_bc),
                j_over_pi_mhz(derived.kerr.j_ca),
                derived.table.upper(Qubit::A) / GHZ,
                derived.table.upper(Qubit::B) / GHZ,
                derived.table.upper(Qubit::C) / GHZ,
            );
            println!("wrote {} and {}", json_path.display(), csv_path.display());
        }
        Ok(())
    }
}
