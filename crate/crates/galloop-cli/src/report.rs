//! JSON report envelope shared by all subcommands.

use galloop::verify::SuiteReport;
use serde::Serialize;

/// Echo of the resolved run configuration, embedded in every report so a
/// report is reproducible from itself (the seed fixes all sampling).
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: Option<usize>,
    pub atol: Option<f64>,
    pub mass: f64,
    pub time_shift_sign: String,
    pub drop_aq_gauge: bool,
    /// The frame text that was parsed (the built-in default is spelled out).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ly: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal: Option<[f64; 3]>,
}

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
    pub wall_time_ms: u128,
}

impl Report {
    pub fn new(command: &str, config: RunConfig, suites: Vec<SuiteReport>, ms: u128) -> Self {
        let pass = suites.iter().all(|s| s.all_pass());
        Report {
            command: command.to_string(),
            config,
            suites,
            pass,
            wall_time_ms: ms,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
