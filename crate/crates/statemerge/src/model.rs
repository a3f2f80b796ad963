//! Versioned JSON model documents.
//!
//! ```json
//! {
//!   "version": 1,
//!   "alphabet_size": 2,
//!   "finalprob": true,
//!   "start": 0,
//!   "states": [{ "id": 0, "final_count": 0, "path_count": 20, "sink": false }],
//!   "transitions": [{ "source": 0, "symbol": 0, "target": 1, "count": 20 }],
//!   "metadata": { "evaluation": "alergia", "parameters": { ... } }
//! }
//! ```
//!
//! States and transitions are listed by ascending id and symbol, so equal
//! models serialize to identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statemerge_core::pdfa::PdfaDefect;
use statemerge_core::{EvalParams, Mode, Pdfa, PdfaState, Transition};
use thiserror::Error;

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("unsupported model version {0}")]
    Version(u32),
    #[error("negative count in {0}")]
    NegativeCount(String),
    #[error("duplicate state {0}")]
    DuplicateState(u32),
    #[error("state {state} has two transitions on symbol {symbol}")]
    Nondeterministic { state: u32, symbol: u32 },
    #[error("transition from unknown state {0}")]
    UnknownSource(u32),
    #[error("inconsistent model: {0:?}")]
    Defect(PdfaDefect),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub id: u32,
    pub final_count: i64,
    pub path_count: i64,
    #[serde(default)]
    pub sink: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub source: u32,
    pub symbol: u32,
    pub target: u32,
    pub count: i64,
}

/// Learning settings recorded alongside the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub confidence_bound: f64,
    pub largestblue: bool,
    pub shallowfirst: bool,
    pub extend: bool,
    pub blueblue: bool,
    pub redfixed: bool,
    pub markovian: u32,
    pub ktail: u32,
    pub sinkson: bool,
    pub sink_count: u64,
    pub state_count: u64,
    pub symbol_count: u64,
    pub correction: f64,
    pub finalprob: bool,
    pub mode: String,
}

impl From<&EvalParams> for ParamsDoc {
    fn from(p: &EvalParams) -> Self {
        ParamsDoc {
            confidence_bound: p.confidence_bound,
            largestblue: p.largestblue,
            shallowfirst: p.shallowfirst,
            extend: p.extend,
            blueblue: p.blueblue,
            redfixed: p.redfixed,
            markovian: p.markovian,
            ktail: p.ktail,
            sinkson: p.sinkson,
            sink_count: p.sink_count,
            state_count: p.state_count,
            symbol_count: p.symbol_count,
            correction: p.correction,
            finalprob: p.finalprob,
            mode: p.mode.as_str().into(),
        }
    }
}

impl ParamsDoc {
    pub fn to_params(&self) -> Option<EvalParams> {
        Some(EvalParams {
            confidence_bound: self.confidence_bound,
            largestblue: self.largestblue,
            shallowfirst: self.shallowfirst,
            extend: self.extend,
            blueblue: self.blueblue,
            redfixed: self.redfixed,
            markovian: self.markovian,
            ktail: self.ktail,
            sinkson: self.sinkson,
            sink_count: self.sink_count,
            state_count: self.state_count,
            symbol_count: self.symbol_count,
            correction: self.correction,
            finalprob: self.finalprob,
            mode: Mode::from_name(&self.mode)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub evaluation: String,
    pub parameters: ParamsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub version: u32,
    pub alphabet_size: u32,
    pub finalprob: bool,
    pub start: u32,
    pub states: Vec<StateDoc>,
    pub transitions: Vec<TransitionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl ModelDocument {
    pub fn from_pdfa(pdfa: &Pdfa, metadata: Option<Metadata>) -> ModelDocument {
        let states = pdfa
            .states
            .iter()
            .map(|(&id, s)| StateDoc {
                id,
                final_count: s.final_count as i64,
                path_count: s.path_count as i64,
                sink: s.sink,
            })
            .collect();
        let transitions = pdfa
            .states
            .iter()
            .flat_map(|(&id, s)| {
                s.transitions.iter().map(move |(&symbol, t)| TransitionDoc {
                    source: id,
                    symbol,
                    target: t.target,
                    count: t.count as i64,
                })
            })
            .collect();
        ModelDocument {
            version: MODEL_VERSION,
            alphabet_size: pdfa.alphabet_size,
            finalprob: pdfa.finalprob,
            start: pdfa.start,
            states,
            transitions,
            metadata,
        }
    }

    pub fn to_pdfa(&self) -> Result<Pdfa, ModelError> {
        if self.version != MODEL_VERSION {
            return Err(ModelError::Version(self.version));
        }
        let count = |v: i64, what: &dyn Fn() -> String| {
            u64::try_from(v).map_err(|_| ModelError::NegativeCount(what()))
        };
        let mut states = BTreeMap::new();
        for s in &self.states {
            let state = PdfaState {
                final_count: count(s.final_count, &|| format!("state {}", s.id))?,
                path_count: count(s.path_count, &|| format!("state {}", s.id))?,
                transitions: BTreeMap::new(),
                sink: s.sink,
            };
            if states.insert(s.id, state).is_some() {
                return Err(ModelError::DuplicateState(s.id));
            }
        }
        for t in &self.transitions {
            let c = count(t.count, &|| {
                format!("transition {} -{}->", t.source, t.symbol)
            })?;
            let source = states
                .get_mut(&t.source)
                .ok_or(ModelError::UnknownSource(t.source))?;
            let tr = Transition {
                target: t.target,
                count: c,
            };
            if source.transitions.insert(t.symbol, tr).is_some() {
                return Err(ModelError::Nondeterministic {
                    state: t.source,
                    symbol: t.symbol,
                });
            }
        }
        let pdfa = Pdfa {
            alphabet_size: self.alphabet_size,
            finalprob: self.finalprob,
            start: self.start,
            states,
        };
        pdfa.validate().map_err(ModelError::Defect)?;
        Ok(pdfa)
    }
}

pub fn export_model(pdfa: &Pdfa, metadata: Option<Metadata>) -> String {
    let doc = ModelDocument::from_pdfa(pdfa, metadata);
    let mut text = serde_json::to_string_pretty(&doc).expect("model serializes");
    text.push('\n');
    text
}

pub fn import_model(text: &str) -> Result<(Pdfa, Option<Metadata>), ModelError> {
    let doc: ModelDocument = serde_json::from_str(text)?;
    let pdfa = doc.to_pdfa()?;
    Ok((pdfa, doc.metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::abab_model;
    use proptest::prelude::*;

    #[test]
    fn round_trip_with_metadata() {
        let meta = Metadata {
            evaluation: "alergia".into(),
            parameters: ParamsDoc::from(&EvalParams::default()),
        };
        let text = export_model(&abab_model(), Some(meta.clone()));
        let (back, m) = import_model(&text).unwrap();
        assert_eq!(back, abab_model());
        assert_eq!(m, Some(meta.clone()));
        assert_eq!(
            m.unwrap().parameters.to_params(),
            Some(EvalParams::default())
        );
    }

    #[test]
    fn empty_model_is_start_state_only() {
        let text = export_model(&Pdfa::single_state(0, false), None);
        let doc: ModelDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(doc.states.len(), 1);
        assert!(doc.transitions.is_empty());
        assert_eq!(import_model(&text).unwrap().0, Pdfa::single_state(0, false));
    }

    fn doc_with(f: impl FnOnce(&mut ModelDocument)) -> String {
        let mut doc = ModelDocument::from_pdfa(&abab_model(), None);
        f(&mut doc);
        serde_json::to_string(&doc).unwrap()
    }

    #[test]
    fn invalid_documents() {
        let dangling = doc_with(|d| d.transitions[0].target = 99);
        assert!(matches!(
            import_model(&dangling),
            Err(ModelError::Defect(PdfaDefect::DanglingTarget {
                target: 99,
                ..
            }))
        ));
        let negative = doc_with(|d| d.transitions[1].count = -1);
        assert!(matches!(
            import_model(&negative),
            Err(ModelError::NegativeCount(_))
        ));
        let version = doc_with(|d| d.version = 2);
        assert!(matches!(
            import_model(&version),
            Err(ModelError::Version(2))
        ));
        let dup = doc_with(|d| {
            let t = d.transitions[0].clone();
            d.transitions.push(t)
        });
        assert!(matches!(
            import_model(&dup),
            Err(ModelError::Nondeterministic { .. })
        ));
        assert!(matches!(
            import_model("{\"version\": 1}"),
            Err(ModelError::Schema(_))
        ));
        assert!(matches!(
            import_model("not json"),
            Err(ModelError::Schema(_))
        ));
    }

    fn arb_pdfa() -> impl Strategy<Value = Pdfa> {
        (1u32..6, 1u32..4, any::<bool>()).prop_flat_map(|(n, k, finalprob)| {
            let state = (
                0u64..50,
                prop::collection::btree_map(0..k, (0..n, 0u64..50), 0..=k as usize),
                any::<bool>(),
            );
            prop::collection::vec(state, n as usize).prop_map(move |raw| {
                let states = raw
                    .into_iter()
                    .enumerate()
                    .map(|(i, (fin, tr, sink))| {
                        let transitions: BTreeMap<u32, Transition> = tr
                            .into_iter()
                            .map(|(a, (target, count))| (a, Transition { target, count }))
                            .collect();
                        let path = fin + transitions.values().map(|t| t.count).sum::<u64>();
                        let s = PdfaState {
                            final_count: fin,
                            path_count: path,
                            transitions,
                            sink,
                        };
                        (i as u32, s)
                    })
                    .collect();
                Pdfa {
                    alphabet_size: k,
                    finalprob,
                    start: 0,
                    states,
                }
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless(p in arb_pdfa()) {
            let text = export_model(&p, None);
            let (back, _) = import_model(&text).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(export_model(&back, None), text);
        }
    }
}
