/// Whether the learner runs greedily, searches, or only scores traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Batch,
    Search,
    Predict,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Batch => "batch",
            Mode::Search => "search",
            Mode::Predict => "predict",
        }
    }

    pub fn from_name(name: &str) -> Option<Mode> {
        match name {
            "batch" => Some(Mode::Batch),
            "search" => Some(Mode::Search),
            "predict" => Some(Mode::Predict),
            _ => None,
        }
    }
}

/// Every knob of the merging framework and its evaluation functions.
///
/// Field names follow the configuration keys accepted by the CLI.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalParams {
    /// Significance level used by the statistical consistency checks.
    pub confidence_bound: f64,
    /// Only consider merges of the most frequent blue state.
    pub largestblue: bool,
    /// Only consider merges of the shallowest blue state.
    pub shallowfirst: bool,
    /// Color a blue state red when it has no consistent merge.
    pub extend: bool,
    /// Also try merges between two blue states.
    pub blueblue: bool,
    /// Merges that add transitions to red states are inconsistent.
    pub redfixed: bool,
    /// Merged states must share this many trailing incoming symbols (0 = off).
    pub markovian: u32,
    /// Only test pairs up to this determinization depth (0 = unlimited).
    pub ktail: u32,
    pub sinkson: bool,
    /// States reached fewer times than this are sinks.
    pub sink_count: u64,
    /// States below this count are merged without being tested.
    pub state_count: u64,
    /// Symbols below this count in a state are pooled.
    pub symbol_count: u64,
    /// Laplace correction added to every count after pooling.
    pub correction: f64,
    /// Model final probabilities (distributions over all strings).
    pub finalprob: bool,
    pub mode: Mode,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            confidence_bound: 0.01,
            largestblue: true,
            shallowfirst: false,
            extend: true,
            blueblue: false,
            redfixed: false,
            markovian: 0,
            ktail: 0,
            sinkson: false,
            sink_count: 25,
            state_count: 0,
            symbol_count: 0,
            correction: 1.0,
            finalprob: false,
            mode: Mode::Batch,
        }
    }
}

impl EvalParams {
    /// Sinks and statistical tests together only make sense when untested
    /// states are also sinks, i.e. `state_count < sink_count`.
    pub fn sink_thresholds_coherent(&self) -> bool {
        !self.sinkson || self.state_count == 0 || self.state_count < self.sink_count
    }
}
