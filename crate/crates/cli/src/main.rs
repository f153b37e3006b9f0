//! `gaugenet` command-line interface.
//!
//! Exit codes: 0 on success, 1 when a numerical contract fails, 2 on
//! invalid input or usage.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gaugenet::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use args::{resolve, ActionCommand, Cli, Command, DiracCommand};
use output::{render, Output};

fn with_config<T, F>(args: &T, cli: &Cli, f: F) -> Result<(Value, Output)>
where
    T: Serialize + serde::de::DeserializeOwned + Clone,
    F: FnOnce(&T) -> Result<Output>,
{
    let resolved = resolve(args.clone(), cli.config.as_deref())?;
    let out = f(&resolved)?;
    Ok((serde_json::to_value(&resolved)?, out))
}

fn dispatch(cli: &Cli) -> Result<(String, Value, Output)> {
    let cfg = cli.config.as_deref();
    let (name, (config, out)) = match &cli.command {
        Command::Brat(a) => ("brat", with_config(a, cli, commands::brat)?),
        Command::Hom(a) => ("hom", with_config(a, cli, commands::hom)?),
        Command::Rep(r) => {
            let name = match r {
                args::RepCommand::Dim(_) => "rep dim",
                args::RepCommand::Weights(_) => "rep weights",
                args::RepCommand::Tensor(_) => "rep tensor",
                args::RepCommand::Casimir(_) => "rep casimir",
                args::RepCommand::Invariant(_) => "rep invariant",
            };
            (name, commands::rep(r, cfg)?)
        }
        Command::Basis(a) => ("basis", with_config(a, cli, commands::basis)?),
        Command::Hamiltonian(a) => ("hamiltonian", with_config(a, cli, commands::hamiltonian)?),
        Command::Dirac(DiracCommand::Spectrum(a)) => {
            let mut a = resolve(a.clone(), cfg)?;
            a.lattice.normalize()?;
            let out = commands::dirac_spectrum(&a)?;
            ("dirac spectrum", (serde_json::to_value(&a)?, out))
        }
        Command::Action(ActionCommand::Compare(a)) => {
            let mut a = resolve(a.clone(), cfg)?;
            a.lattice.normalize()?;
            let out = commands::action_compare(&a)?;
            ("action compare", (serde_json::to_value(&a)?, out))
        }
        Command::Continuum(a) => ("continuum", with_config(a, cli, commands::continuum)?),
        Command::Mc(a) => {
            let a = resolve(a.clone(), cfg)?;
            let (params, out) = commands::mc(&a)?;
            let mut config = serde_json::to_value(&a)?;
            config["sampler"] = params;
            ("mc", (config, out))
        }
        Command::Ks(a) => ("ks", with_config(a, cli, commands::ks)?),
    };
    Ok((name.to_string(), config, out))
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_numerical() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((name, config, out)) => {
            let text = render(&name, &config, &out, cli.json);
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            match out.violation {
                Some(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
