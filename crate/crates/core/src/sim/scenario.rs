//! Scenario description and its TOML form.
//!
//! ```toml
//! duration_s = 25.0
//! rng_seed = 1
//! jitter = 0.1            # ε range when a lablet has no clock_offset
//! bit_flip_prob = 0.0     # per receiver tick
//!
//! [[lablet]]
//! variant = "id0"         # or an inline table: { base = "id4", pulsethreshold = 4 }
//! program = "..."         # optional: hex word or assembly
//! clock_offset = 0.01     # optional ε
//! start = "idle"          # or "run"
//! initial_v = 1.0
//! supply_v = 1.0          # dock supply; `undocked = true` runs from the cap alone
//!
//! [[link]]                # DOUT of `from` drives DIN of `to`
//! from = 0
//! to = 1
//! until_s = 0.4           # optional window: from_s / until_s
//!
//! [[stimulus]]
//! lablet = 0
//! channel = "both"        # or "s0" / "s1"
//! points = [[0.0, -20.0], [1.0, 90.0]]
//!
//! [[dock]]
//! time_s = 0.1
//! targets = [0]
//! command = "RUN"         # or: program = "<hex|asm>", with optional record = [s0 x4, s1 x4]
//! id = 7                  # optional target id, defaults to broadcast
//! ```

use serde::Deserialize;

use super::power::SupercapModel;
use super::sensor::{SensorChannel, StimulusTrack};
use super::SimError;
use crate::comm::{Command, Opcode, RecordBlock, BROADCAST_ID};
use crate::program::LabletProgram;
use crate::variant::{parse_program, Preset, VariantParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartMode {
    #[default]
    Idle,
    Run,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpec {
    pub initial_v: f64,
    /// Dock supply behind the rectifier; `None` when undocked.
    pub supply_v: Option<f64>,
    pub charger_ohms: f64,
    pub leakage_a: f64,
    pub capacitance_f: Option<f64>,
    /// Drain per driven electrode.
    pub load_per_electrode_a: f64,
}

impl Default for PowerSpec {
    fn default() -> Self {
        PowerSpec {
            initial_v: 1.0,
            supply_v: Some(1.0),
            charger_ohms: 1e7,
            leakage_a: 1.5e-9,
            capacitance_f: None,
            load_per_electrode_a: 0.0,
        }
    }
}

impl PowerSpec {
    pub fn supercap(&self) -> SupercapModel {
        let mut cap = SupercapModel::charged(self.initial_v);
        cap.leakage_current = self.leakage_a;
        if let Some(c) = self.capacitance_f {
            cap.capacitance = c;
        }
        cap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabletSpec {
    pub variant: VariantParams,
    pub program: Option<LabletProgram>,
    pub clock_offset: Option<f64>,
    pub start: StartMode,
    pub power: PowerSpec,
}

impl LabletSpec {
    pub fn new(variant: VariantParams) -> Self {
        LabletSpec {
            variant,
            program: None,
            clock_offset: None,
            start: StartMode::Idle,
            power: PowerSpec::default(),
        }
    }

    pub fn with_program(mut self, program: LabletProgram) -> Self {
        self.program = Some(program);
        self
    }

    pub fn with_offset(mut self, eps: f64) -> Self {
        self.clock_offset = Some(eps);
        self
    }

    pub fn running(mut self) -> Self {
        self.start = StartMode::Run;
        self
    }
}

/// Directed coupling of one lablet's data output to another's input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub from_s: f64,
    pub until_s: f64,
}

impl Link {
    pub fn new(from: usize, to: usize) -> Self {
        Link {
            from,
            to,
            from_s: 0.0,
            until_s: f64::INFINITY,
        }
    }

    pub fn active_at(&self, t: f64) -> bool {
        t >= self.from_s && t < self.until_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DockAction {
    Command(Command),
    /// PROG command followed by the program frame.
    Program {
        program: LabletProgram,
        record: Option<RecordBlock>,
        target_id: u8,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DockEntry {
    pub time_s: f64,
    pub targets: Vec<usize>,
    pub action: DockAction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub lablets: Vec<LabletSpec>,
    pub links: Vec<Link>,
    pub stimuli: Vec<StimulusTrack>,
    pub dock: Vec<DockEntry>,
    pub duration_s: f64,
    pub rng_seed: u64,
    pub jitter: f64,
    pub bit_flip_prob: f64,
}

pub const DEFAULT_JITTER: f64 = 0.1;

impl Scenario {
    pub fn new(lablets: Vec<LabletSpec>, duration_s: f64, rng_seed: u64) -> Self {
        Scenario {
            lablets,
            links: Vec::new(),
            stimuli: Vec::new(),
            dock: Vec::new(),
            duration_s,
            rng_seed,
            jitter: DEFAULT_JITTER,
            bit_flip_prob: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Invalid(m));
        let n = self.lablets.len();
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return bad(format!("duration {} must be positive", self.duration_s));
        }
        if !(0.0..=0.5).contains(&self.jitter) {
            return bad(format!("jitter {} outside 0..0.5", self.jitter));
        }
        if !(0.0..=1.0).contains(&self.bit_flip_prob) {
            return bad(format!("bit flip probability {} outside 0..1", self.bit_flip_prob));
        }
        for (i, l) in self.lablets.iter().enumerate() {
            l.variant.check().map_err(|e| SimError::Invalid(format!("lablet {i}: {e}")))?;
            if let Some(p) = &l.program {
                p.encode().map_err(|e| SimError::Invalid(format!("lablet {i}: {e}")))?;
            }
            if l.clock_offset.is_some_and(|e| !(e.abs() <= 0.5)) {
                return bad(format!("lablet {i}: clock offset out of range"));
            }
            l.power
                .supercap()
                .check()
                .map_err(|e| SimError::Invalid(format!("lablet {i}: {e}")))?;
            if !(l.power.charger_ohms > 0.0) {
                return bad(format!("lablet {i}: charger resistance must be positive"));
            }
        }
        for k in &self.links {
            if k.from >= n || k.to >= n {
                return bad(format!("link {} -> {} references a missing lablet", k.from, k.to));
            }
            if k.from == k.to {
                return bad(format!("link {} -> {} is a self-loop", k.from, k.to));
            }
        }
        for s in &self.stimuli {
            if s.lablet >= n {
                return bad(format!("stimulus targets missing lablet {}", s.lablet));
            }
        }
        for d in &self.dock {
            if let Some(t) = d.targets.iter().find(|&&t| t >= n) {
                return bad(format!("dock entry at {} s targets missing lablet {t}", d.time_s));
            }
            if !(d.time_s >= 0.0) {
                return bad("dock times must be non-negative".into());
            }
            if let DockAction::Program { program, record, .. } = &d.action {
                if program.records() != record.is_some() {
                    return bad("dock record block must be given iff the program sets TSDAT".into());
                }
            }
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Scenario, SimError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
        raw.build()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawVariant {
    Preset(String),
    Custom(toml::Table),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLablet {
    #[serde(default)]
    variant: Option<RawVariant>,
    program: Option<String>,
    clock_offset: Option<f64>,
    #[serde(default)]
    start: StartMode,
    initial_v: Option<f64>,
    supply_v: Option<f64>,
    #[serde(default)]
    undocked: bool,
    charger_ohms: Option<f64>,
    leakage_a: Option<f64>,
    capacitance_f: Option<f64>,
    load_per_electrode_a: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    from: usize,
    to: usize,
    from_s: Option<f64>,
    until_s: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStimulus {
    lablet: usize,
    #[serde(default)]
    channel: SensorChannel,
    points: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDock {
    time_s: f64,
    targets: Vec<usize>,
    command: Option<String>,
    program: Option<String>,
    record: Option<Vec<bool>>,
    id: Option<u8>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    duration_s: f64,
    #[serde(default)]
    rng_seed: u64,
    jitter: Option<f64>,
    #[serde(default)]
    bit_flip_prob: f64,
    #[serde(default)]
    lablet: Vec<RawLablet>,
    #[serde(default)]
    link: Vec<RawLink>,
    #[serde(default)]
    stimulus: Vec<RawStimulus>,
    #[serde(default)]
    dock: Vec<RawDock>,
}

impl RawScenario {
    fn build(self) -> Result<Scenario, SimError> {
        let parse = |m: String| SimError::Parse(m);
        let mut lablets = Vec::new();
        for (i, l) in self.lablet.into_iter().enumerate() {
            let variant = match l.variant {
                None => Preset::Id0.params(),
                Some(RawVariant::Preset(name)) => {
                    VariantParams::preset(&name).map_err(|e| parse(format!("lablet {i}: {e}")))?
                }
                Some(RawVariant::Custom(table)) => {
                    let text = toml::to_string(&table).map_err(|e| parse(e.to_string()))?;
                    VariantParams::from_toml(&text).map_err(|e| parse(format!("lablet {i}: {e}")))?
                }
            };
            let program = l
                .program
                .as_deref()
                .map(parse_program)
                .transpose()
                .map_err(|e| parse(format!("lablet {i}: {e}")))?;
            let d = PowerSpec::default();
            lablets.push(LabletSpec {
                variant,
                program,
                clock_offset: l.clock_offset,
                start: l.start,
                power: PowerSpec {
                    initial_v: l.initial_v.unwrap_or(d.initial_v),
                    supply_v: if l.undocked { None } else { Some(l.supply_v.unwrap_or(1.0)) },
                    charger_ohms: l.charger_ohms.unwrap_or(d.charger_ohms),
                    leakage_a: l.leakage_a.unwrap_or(d.leakage_a),
                    capacitance_f: l.capacitance_f,
                    load_per_electrode_a: l.load_per_electrode_a.unwrap_or(0.0),
                },
            });
        }
        let links = self
            .link
            .into_iter()
            .map(|k| Link {
                from: k.from,
                to: k.to,
                from_s: k.from_s.unwrap_or(0.0),
                until_s: k.until_s.unwrap_or(f64::INFINITY),
            })
            .collect();
        let stimuli = self
            .stimulus
            .into_iter()
            .map(|s| StimulusTrack::new(s.lablet, s.channel, s.points).map_err(parse))
            .collect::<Result<_, _>>()?;
        let mut dock = Vec::new();
        for d in self.dock {
            let target_id = d.id.unwrap_or(BROADCAST_ID);
            let action = match (d.command, d.program) {
                (Some(c), None) => {
                    let op: Opcode = c.parse().map_err(|e: String| parse(e))?;
                    if op == Opcode::Prog {
                        return Err(parse("use `program = ...` to send PROG".into()));
                    }
                    DockAction::Command(Command::new(op, target_id))
                }
                (None, Some(p)) => {
                    let program = parse_program(&p).map_err(parse)?;
                    let record = match d.record {
                        None if program.records() => Some(RecordBlock::default()),
                        None => None,
                        Some(bits) if bits.len() == 8 => Some(RecordBlock::from_bits(&bits)),
                        Some(bits) => return Err(parse(format!("record needs 8 flags, got {}", bits.len()))),
                    };
                    DockAction::Program {
                        program,
                        record,
                        target_id,
                    }
                }
                _ => return Err(parse("dock entry needs exactly one of `command` or `program`".into())),
            };
            dock.push(DockEntry {
                time_s: d.time_s,
                targets: d.targets,
                action,
            });
        }
        let sc = Scenario {
            lablets,
            links,
            stimuli,
            dock,
            duration_s: self.duration_s,
            rng_seed: self.rng_seed,
            jitter: self.jitter.unwrap_or(DEFAULT_JITTER),
            bit_flip_prob: self.bit_flip_prob,
        };
        sc.validate()?;
        Ok(sc)
    }
}
