//! Multi-lablet discrete-event simulation: independent jittered clocks,
//! wired-OR data links, dock injections, sensor stimuli and the supercap
//! power model.

mod analysis;
mod clock;
mod engine;
mod power;
mod scenario;
mod sensor;

pub use analysis::{
    divergence_table, ecl_experiment, first_divergence, predicted_divergence, replication_scenario,
    PairDivergence, ECL_EXPERIMENT_LABLETS,
};
pub use clock::{draw_offset, lablet_rng, ClockModel, MAX_CLOCK_OFFSET};
pub use engine::{components, run, run_with, SimOutput};
pub use power::{
    charger_current, discharge_time, ecl_mask, power_step, SupercapModel, AREAL_CAPACITANCE,
    ECL_THRESHOLD_V, MAX_VOLTAGE, SUPERCAP_AREA_M2,
};
pub use scenario::{
    DockAction, DockEntry, LabletSpec, Link, PowerSpec, Scenario, StartMode, DEFAULT_JITTER,
};
pub use sensor::{
    mv_per_ph, sensor_bits, SensorChannel, StimulusTrack, S0_THRESHOLD_MV, S1_THRESHOLD_MV,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("scenario file: {0}")]
    Parse(String),
}
