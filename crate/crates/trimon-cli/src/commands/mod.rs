//! Analysis command registry: each subcommand implements [`Command`] and is
//! looked up by name at dispatch time.

use crate::config::ConfigFile;
use crate::error::{CliError, Result};
use crate::output::OutputDir;
use clap::ArgMatches;
use std::path::PathBuf;

mod derive;
mod fit_crossing;
mod report;
mod simulate;
mod spectrum;
mod tomo;

pub(crate) fn required_config(matches: &ArgMatches) -> Result<ConfigFile> {
    let path = matches
        .get_one::<String>("config")
        .ok_or_else(|| CliError::Usage("--config <PATH> is required for this command".into()))?;
    ConfigFile::load(&PathBuf::from(path))
}

pub(crate) fn optional_config(matches: &ArgMatches) -> Result<Option<ConfigFile>> {
    match matches.get_one::<String>("config") {
        Some(path) => Ok(Some(ConfigFile::load(&PathBuf::from(path))?)),
        None => Ok(None),
    }
}

pub(crate) fn output_dir(matches: &ArgMatches) -> Result<OutputDir> {
    let out = matches.get_one::<String>("out").expect("has default");
    OutputDir::create(&PathBuf::from(out))
}

pub(crate) fn is_quiet(matches: &ArgMatches) -> bool {
    matches.get_flag("quiet")
}

pub trait Command {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Attach command-specific arguments.
    fn configure(&self, cmd: clap::Command) -> clap::Command;
    fn run(&self, matches: &ArgMatches) -> Result<()>;
}

/// All registered commands, in help order.
pub fn registry() -> Vec<Box<dyn Command>> {
    vec![
        Box::new(derive::Derive),
        Box::new(spectrum::Spectrum),
        Box::new(simulate::Simulate),
        Box::new(tomo::Tomo),
        Box::new(fit_crossing::FitCrossing),
        Box::new(report::Report),
    ]
}

/// Find a command by its registered name.
pub fn lookup<'a>(commands: &'a [Box<dyn Command>], name: &str) -> Option<&'a dyn Command> {
    commands
        .iter()
        .find(|c| c.name() == name)
        .map(|c| c.as_ref())
}
