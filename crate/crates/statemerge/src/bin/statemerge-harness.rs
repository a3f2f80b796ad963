//! Scores learned models on external datasets.
//!
//! ```text
//! statemerge-harness pautomac TRAIN TEST SOLUTION [--ini FILE] [--key VALUE...]
//! statemerge-harness anomaly TRAIN TEST [--ini FILE] [--key VALUE...]
//! ```

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Command};
use statemerge::config::{flag_args, load_config, overrides_from, RunConfig};
use statemerge::harness::{anomaly_f1, pautomac_perplexity};

fn with_flags(cmd: Command) -> Command {
    cmd.arg(Arg::new("ini").long("ini").value_name("FILE"))
        .args(flag_args())
}

fn cli() -> Command {
    Command::new("statemerge-harness")
        .about("Perplexity and anomaly-detection scores on external data")
        .subcommand_required(true)
        .subcommand(with_flags(
            Command::new("pautomac")
                .arg(Arg::new("train").required(true))
                .arg(Arg::new("test").required(true))
                .arg(Arg::new("solution").required(true)),
        ))
        .subcommand(with_flags(
            Command::new("anomaly")
                .arg(Arg::new("train").required(true))
                .arg(Arg::new("test").required(true)),
        ))
}

fn config(m: &ArgMatches) -> Result<RunConfig, String> {
    let ini = match m.get_one::<String>("ini") {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{p}: {e}"))?,
        None => String::new(),
    };
    let train = m.get_one::<String>("train").map(PathBuf::from);
    load_config(&ini, &overrides_from(m), train).map_err(|e| e.to_string())
}

fn path(m: &ArgMatches, name: &str) -> PathBuf {
    PathBuf::from(m.get_one::<String>(name).expect("required argument"))
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, m) = matches.subcommand().expect("subcommand required");
    let cfg = match config(m) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match name {
        "pautomac" => pautomac_perplexity(
            &cfg,
            &path(m, "train"),
            &path(m, "test"),
            &path(m, "solution"),
        )
        .map(|r| {
            println!("states {}", r.states);
            println!("perplexity {:.6}", r.perplexity);
            println!("target perplexity {:.6}", r.optimum);
        }),
        _ => anomaly_f1(&cfg, &path(m, "train"), &path(m, "test")).map(|c| {
            println!(
                "tp {} fp {} fn {} tn {}",
                c.true_positives, c.false_positives, c.false_negatives, c.true_negatives
            );
            println!("f1 {:.4}", c.f1());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
