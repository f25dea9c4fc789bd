//! Scenario files, parallel search, CSV export and the command-line front end
//! for [`clusterlife_core`].

pub mod cli;
pub mod error;
pub mod export;
pub mod parallel;
pub mod scenario;

pub use error::{AppError, Result};
pub use scenario::{
    generate_scenario, load_scenario, parse_scenario, GenParams, Scenario, ScenarioFile,
};
