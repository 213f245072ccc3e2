use clap::{Arg, ArgAction};
use trimon_cli::commands;

fn build_cli(registry: &[Box<dyn commands::Command>]) -> clap::Command {
    let mut root = clap::Command::new("trimon")
        .about("Three-qubit longitudinally-coupled circuit: derivation, simulation and analysis")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .disable_help_subcommand(true)
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .global(true)
                .help("JSON run configuration"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("U64")
                .global(true)
                .value_parser(clap::value_parser!(u64))
                .help("RNG seed (required for stochastic commands)"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .global(true)
                .default_value("trimon-out")
                .help("output directory"),
        )
        .arg(
            Arg::new("shots")
                .long("shots")
                .value_name("N")
                .global(true)
                .value_parser(clap::value_parser!(usize))
                .help("shots per tomography setting (0 = analytic)"),
        )
        .arg(
            Arg::new("dt-ps")
                .long("dt-ps")
                .value_name("PS")
                .global(true)
                .value_parser(clap::value_parser!(f64))
                .help("integrator step in picoseconds"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .value_name("FMT")
                .global(true)
                .value_parser(["json", "csv"])
                .default_value("json")
                .help("primary report format"),
        )
        .arg(
            Arg::new("quiet")
                .long("quiet")
                .action(ArgAction::SetTrue)
                .global(true)
                .help("suppress the console summary"),
        );
    for command in registry {
        let sub = clap::Command::new(command.name()).about(command.about());
        root = root.subcommand(command.configure(sub));
    }
    root
}

fn main() {
    let registry = commands::registry();
    let matches = match build_cli(&registry).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };

    let (name, sub) = matches
        .subcommand()
        .expect("subcommand required by parser");
    let Some(command) = commands::lookup(&registry, name) else {
        eprintln!("unknown command '{name}'");
        std::process::exit(1);
    };
    if let Err(err) = command.run(sub) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
