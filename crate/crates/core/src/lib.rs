//! Behavioural model of the lablet: a minimal, sub-millimetre controller that
//! drives electrode patterns from a 58-bit program, plus the serial link,
//! a supercapacitor power model and a discrete-event array simulator.

// Range checks are written `!(x > lo)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comm;
pub mod exec;
pub mod fsm;
pub mod pattern;
pub mod program;
pub mod sim;
pub mod trace;
pub mod variant;

pub use comm::{Command, Opcode};
pub use fsm::{LabletState, Mode, TickInputs, TickOutputs};
pub use pattern::{default_rom, ActuationFrame, Electrode, PatternRom, Tri};
pub use program::{LabletProgram, PhaseConfig, ProgramWord};
pub use variant::{Preset, VariantParams};
