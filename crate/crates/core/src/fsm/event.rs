use std::fmt;

use crate::comm::Command;
use crate::program::ProgramWord;

/// Controller event. Rendered as `kind` or `kind:payload`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    PowerOn,
    PowerLost,
    Autorun,
    PhaseEntered(u8),
    Halted,
    ConditionFired { phase: u8, code: u8 },
    RepeatExhausted(u8),
    Recorded { phase: u8, s0: bool, s1: bool },
    SendStarted { bits: usize },
    SendCompleted,
    CommandReceived(Command),
    CommandIgnored(Command),
    CommandRejected(String),
    ProgramLoaded { word: ProgramWord, record: bool },
    ProgramRejected(String),
}

impl EventKind {
    pub fn kind(&self) -> &'static str {
        match self {
            EventKind::PowerOn => "power_on",
            EventKind::PowerLost => "power_lost",
            EventKind::Autorun => "autorun",
            EventKind::PhaseEntered(_) => "phase_entered",
            EventKind::Halted => "halted",
            EventKind::ConditionFired { .. } => "condition_fired",
            EventKind::RepeatExhausted(_) => "repeat_exhausted",
            EventKind::Recorded { .. } => "recorded",
            EventKind::SendStarted { .. } => "send_started",
            EventKind::SendCompleted => "send_completed",
            EventKind::CommandReceived(_) => "command",
            EventKind::CommandIgnored(_) => "command_ignored",
            EventKind::CommandRejected(_) => "command_rejected",
            EventKind::ProgramLoaded { .. } => "program_loaded",
            EventKind::ProgramRejected(_) => "program_rejected",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())?;
        match self {
            EventKind::PhaseEntered(p) | EventKind::RepeatExhausted(p) => write!(f, ":{p}"),
            EventKind::ConditionFired { phase, code } => write!(f, ":p{phase}/se{code}"),
            EventKind::Recorded { phase, s0, s1 } => {
                write!(f, ":p{phase}/{}{}", *s0 as u8, *s1 as u8)
            }
            EventKind::SendStarted { bits } => write!(f, ":{bits}"),
            EventKind::CommandReceived(c) | EventKind::CommandIgnored(c) => {
                write!(f, ":{}@{}", c.opcode, c.target_id)
            }
            EventKind::CommandRejected(r) | EventKind::ProgramRejected(r) => write!(f, ":{r}"),
            EventKind::ProgramLoaded { word, record } => {
                write!(f, ":{word}{}", if *record { "+rec" } else { "" })
            }
            _ => Ok(()),
        }
    }
}

/// An event stamped with the lablet's tick index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub tick: u64,
    pub kind: EventKind,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind, self.tick)
    }
}
