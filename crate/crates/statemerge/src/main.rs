use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, Command};
use statemerge::config::{flag_args, load_config, overrides_from};
use statemerge::run::run;

fn cli() -> Command {
    Command::new("statemerge")
        .about("Learn probabilistic automata by red-blue state merging")
        .arg(
            Arg::new("input")
                .value_name("INPUT")
                .help("Abbadingo-formatted traces"),
        )
        .arg(
            Arg::new("ini")
                .long("ini")
                .value_name("FILE")
                .help("ini file with a [default] section"),
        )
        .args(flag_args())
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let ini = match matches.get_one::<String>("ini") {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("error: {path}: {e}");
                return ExitCode::from(2);
            }
        },
        None => String::new(),
    };
    let input = matches.get_one::<String>("input").map(PathBuf::from);
    let cfg = match load_config(&ini, &overrides_from(&matches), input) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg, &mut std::io::stdout().lock()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
