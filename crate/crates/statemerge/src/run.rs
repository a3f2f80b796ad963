//! The three run modes: greedy batch learning, beam search, and prediction.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use statemerge_core::inference::trace_scores;
use statemerge_core::search::{replay, search};
use statemerge_core::{
    evaluation_by_name, greedy_run, parse_abbadingo, Action, Mode, ParseError, Pdfa, Progress,
    TraceSet,
};
use thiserror::Error;

use crate::config::RunConfig;
use crate::dot::export_dot;
use crate::fmt::format_g;
use crate::model::{export_model, import_model, Metadata, ModelError, ParamsDoc};
use crate::predict::write_predictions;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error("console: {0}")]
    Console(#[from] io::Error),
}

fn with_suffix(input: &Path, suffix: &str) -> PathBuf {
    let mut s = input.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn dot_path(input: &Path) -> PathBuf {
    with_suffix(input, ".ff.final.dot")
}

pub fn json_path(input: &Path) -> PathBuf {
    with_suffix(input, ".ff.final.json")
}

pub fn predictions_path(input: &Path) -> PathBuf {
    with_suffix(input, ".ff.final.result.csv")
}

fn read(path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, RunError> {
    fs::write(&path, text).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Progress printer: ` x<frequency> ` for extensions, ` m<score> ` for merges.
pub struct ConsoleProgress<'a> {
    out: &'a mut dyn Write,
    error: Option<io::Error>,
}

impl<'a> ConsoleProgress<'a> {
    pub fn new(out: &'a mut dyn Write) -> Self {
        ConsoleProgress { out, error: None }
    }

    fn emit(&mut self, text: &str) {
        if self.error.is_none() {
            if let Err(e) = self.out.write_all(text.as_bytes()) {
                self.error = Some(e);
            }
        }
    }

    pub fn finish(self) -> io::Result<()> {
        match self.error {
            Some(e) => Err(e),
            None => self.out.flush(),
        }
    }
}

impl Progress for ConsoleProgress<'_> {
    fn action(&mut self, action: &Action) {
        let token = match *action {
            Action::Extend { frequency, .. } => format!(" x{frequency} "),
            Action::Merge { score, .. } => format!(" m{} ", format_g(score)),
        };
        self.emit(&token);
    }

    fn finished(&mut self) {
        self.emit("no more possible merges\n");
    }
}

pub fn load_traces(path: &Path) -> Result<TraceSet, RunError> {
    parse_abbadingo(&read(path)?).map_err(|source| RunError::Input {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<Pdfa, RunError> {
    import_model(&read(path)?)
        .map(|(pdfa, _)| pdfa)
        .map_err(|source| RunError::Model {
            path: path.to_path_buf(),
            source,
        })
}

/// Learns a model with the configured mode.
pub fn learn(cfg: &RunConfig, ts: &TraceSet, out: &mut dyn Write) -> Result<Pdfa, RunError> {
    let mut eval = evaluation_by_name(&cfg.heuristic_name).expect("validated heuristic");
    let mut progress = ConsoleProgress::new(out);
    let pdfa = match cfg.params.mode {
        Mode::Search => {
            let found = search(ts, eval.as_mut(), &cfg.params, cfg.beam_width);
            // Replaying the winning path reports its actions in order.
            let apta = replay(
                ts,
                eval.as_mut(),
                &cfg.params,
                &found.best.path,
                &mut progress,
            );
            Pdfa::from_apta(&apta, &cfg.params)
        }
        _ => greedy_run(ts, eval.as_mut(), &cfg.params, &mut progress),
    };
    progress.finish()?;
    Ok(pdfa)
}

/// Runs `cfg`, printing banners and progress to `out`. Returns the files
/// written.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>, RunError> {
    writeln!(out, "Using heuristic {}", cfg.heuristic_name)?;
    match cfg.params.mode {
        Mode::Predict => {
            writeln!(out, "predict mode selected")?;
            let model_path = cfg.aptafile.as_deref().expect("validated aptafile");
            let pdfa = load_model(model_path)?;
            let ts = load_traces(&cfg.input)?;
            let records: Vec<_> = ts
                .iter()
                .map(|t| trace_scores(&pdfa, &t.symbols, cfg.params.correction))
                .collect();
            let csv = write(predictions_path(&cfg.input), &write_predictions(&records))?;
            Ok(vec![csv])
        }
        mode => {
            let ts = load_traces(&cfg.input)?;
            writeln!(
                out,
                "Creating apta using evaluation class {}",
                cfg.heuristic_name
            )?;
            writeln!(out, "{} mode selected", mode.as_str())?;
            let start = match mode {
                Mode::Search => "starting beam search",
                _ => "starting greedy merging",
            };
            writeln!(out, "{start}")?;
            let pdfa = learn(cfg, &ts, out)?;
            let meta = Metadata {
                evaluation: cfg.heuristic_name.clone(),
                parameters: ParamsDoc::from(&cfg.params),
            };
            let dot = write(dot_path(&cfg.input), &export_dot(&pdfa, cfg.include_sinks))?;
            let json = write(json_path(&cfg.input), &export_model(&pdfa, Some(meta)))?;
            Ok(vec![dot, json])
        }
    }
}
