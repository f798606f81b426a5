//! The lablet controller: a deterministic state machine advanced once per
//! slow-clock tick.
//!
//! Execution is three-level. The phase pointer selects one of P1..P3 (P0 is
//! the communication/idle phase), a repeat counter runs the phase's inner
//! loop `rep_count(rep)` times, and the pattern counter walks the 8 slots of
//! the inner loop, holding each slot for `step_multiplier(tim, ti)` ticks.
//! At each inner-loop boundary the phase condition is evaluated (and, with
//! TSDAT, sensors are recorded on the same clock edge, so conditions 12-14
//! compare against the previously recorded values).

mod condition;
mod event;

pub use condition::{eval_condition, ConditionInputs};
pub use event::{Event, EventKind};

use std::fmt;

use crate::comm::{
    self, command_bits, encode_bits, frame_program, parse_command, Command, DecoderState,
    LineWaveform, Opcode, RecordBlock, BROADCAST_ID,
};
use crate::pattern::{ActuationFrame, Electrode, PatternRom, Tri};
use crate::program::{rep_count, step_multiplier, LabletProgram};
use crate::variant::VariantParams;

/// Autorun fires when the 12-bit clock divider wraps.
pub const AUTORUN_TIMEOUT_TICKS: u32 = 4096;
const CLKDIV_MASK: u16 = 0x0FFF;

/// Bit pattern transmitted in response to TEST.
pub const TEST_PATTERN: [bool; 8] = [true, false, true, false, true, false, true, false];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Idle,
    Prog,
    Send,
    Run,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Idle => "IDLE",
            Mode::Prog => "PROG",
            Mode::Send => "SEND",
            Mode::Run => "RUN",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Mode::Idle => 0,
            Mode::Prog => 1,
            Mode::Send => 2,
            Mode::Run => 3,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "IDLE" => Ok(Mode::Idle),
            "PROG" => Ok(Mode::Prog),
            "SEND" => Ok(Mode::Send),
            "RUN" => Ok(Mode::Run),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// TSDAT recording memory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecordLog {
    pub mem_s0: [bool; 4],
    pub mem_s1: [bool; 4],
    /// Tick index of the last recording per phase.
    pub event_times: [Option<u64>; 4],
}

impl RecordLog {
    pub fn block(&self) -> RecordBlock {
        RecordBlock {
            mem_s0: self.mem_s0,
            mem_s1: self.mem_s1,
        }
    }

    pub fn load_block(&mut self, block: &RecordBlock) {
        self.mem_s0 = block.mem_s0;
        self.mem_s1 = block.mem_s1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickInputs {
    /// Data-in lines; line 1 is only used by bipolar variants.
    pub din: [bool; 2],
    pub s0: bool,
    pub s1: bool,
    pub power_good: bool,
}

impl Default for TickInputs {
    fn default() -> Self {
        TickInputs {
            din: [false; 2],
            s0: false,
            s1: false,
            power_good: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TickOutputs {
    /// Mode and phase in effect while this tick's outputs were driven.
    pub mode: Mode,
    pub phase: u8,
    pub frame: ActuationFrame,
    /// Data-out lines (line 1 only driven by bipolar variants).
    pub dout: [Tri; 2],
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AfterSend {
    Idle,
    Phase(u8),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Transmitter {
    wave: LineWaveform,
    segment: usize,
    elapsed: u32,
    after: AfterSend,
}

/// Full controller state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabletState {
    pub mode: Mode,
    pub phase: u8,
    pub patterncnt: u8,
    pub repeatcnt: u8,
    /// 12-bit divider: step timer in RUN, autorun timeout in IDLE.
    pub clkdivider: u16,
    pub decoder: DecoderState,
    pub commandin: u8,
    pub trigd: bool,
    pub din1: bool,
    pub din2: bool,
    pub comd: bool,
    pub dout: bool,
    pub doutact: bool,
    /// Current actuator drive.
    pub act: ActuationFrame,
    pub prog: LabletProgram,
    pub rec: RecordLog,
    // Model-side bookkeeping not in the flip-flop inventory.
    command_len: u8,
    rx_frame: Vec<bool>,
    rx_idle: u32,
    tx: Option<Transmitter>,
    autorun_armed: bool,
    powered: bool,
    ticks: u64,
}

/// Power-on state for a variant.
pub fn reset(variant: &VariantParams) -> LabletState {
    LabletState {
        mode: Mode::Idle,
        phase: 0,
        patterncnt: 0,
        repeatcnt: 0,
        clkdivider: 0,
        decoder: DecoderState::new(),
        commandin: 0,
        trigd: false,
        din1: false,
        din2: false,
        comd: false,
        dout: false,
        doutact: false,
        act: ActuationFrame::REST,
        prog: variant.default_program,
        rec: RecordLog::default(),
        command_len: 0,
        rx_frame: Vec::new(),
        rx_idle: 0,
        tx: None,
        autorun_armed: variant.autorun,
        powered: true,
        ticks: 0,
    }
}

/// Pure form of [`LabletState::tick`].
pub fn tick(
    state: &LabletState,
    inputs: &TickInputs,
    variant: &VariantParams,
    rom: &PatternRom,
) -> (LabletState, TickOutputs) {
    let mut next = state.clone();
    let out = next.tick(inputs, variant, rom);
    (next, out)
}

fn drive(level: bool) -> Tri {
    if level {
        Tri::Hi
    } else {
        Tri::Lo
    }
}

impl LabletState {
    pub fn new(variant: &VariantParams) -> Self {
        reset(variant)
    }

    /// Ticks executed since construction.
    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    pub fn is_powered(&self) -> bool {
        self.powered
    }

    /// Actuator drive bits (Hi) for all six electrodes.
    pub fn act_bits(&self) -> [bool; 6] {
        self.act.0.map(|t| t == Tri::Hi)
    }

    /// Output enables for A0..A1; PWR2 has a separate sink-only control.
    pub fn actenab_bits(&self) -> [bool; 5] {
        std::array::from_fn(|i| self.act.0[i].is_driven())
    }

    /// Bit widths of the counters are respected.
    pub fn counters_in_range(&self, variant: &VariantParams) -> bool {
        self.patterncnt < 8
            && self.repeatcnt < 128
            && self.repeatcnt as u32 <= rep_count(self.prog.rep)
            && self.clkdivider <= CLKDIV_MASK
            && self.decoder.pulsecnt <= variant.pulse_counter_max()
            && self.phase <= 3
    }

    /// Starts the program at P1 as if a RUN command had arrived.
    pub fn start(&mut self, variant: &VariantParams) -> Vec<Event> {
        let mut ev = Vec::new();
        self.autorun_armed = false;
        self.enter_phase(1, variant, &mut ev);
        ev
    }

    fn push(&self, events: &mut Vec<Event>, kind: EventKind) {
        events.push(Event {
            tick: self.ticks,
            kind,
        });
    }

    /// Advances one slow-clock tick.
    pub fn tick(
        &mut self,
        inputs: &TickInputs,
        variant: &VariantParams,
        rom: &PatternRom,
    ) -> TickOutputs {
        let mut events = Vec::new();
        if !inputs.power_good {
            if self.powered {
                let ticks = self.ticks;
                *self = reset(variant);
                self.ticks = ticks;
                self.powered = false;
                self.push(&mut events, EventKind::PowerLost);
            }
            self.ticks += 1;
            return TickOutputs {
                mode: Mode::Idle,
                phase: 0,
                frame: ActuationFrame::REST,
                dout: [Tri::Z; 2],
                events,
            };
        }
        if !self.powered {
            self.powered = true;
            self.push(&mut events, EventKind::PowerOn);
        }

        let mark = if variant.data_bipo {
            self.din1 = inputs.din[0];
            self.din2 = inputs.din[1];
            self.din1 && !self.din2
        } else {
            self.din2 = self.din1;
            self.din1 = inputs.din[0];
            self.din2
        };
        if self.mode != Mode::Send {
            self.receive(mark, variant, &mut events);
        }

        let mode = self.mode;
        let phase = self.phase;
        let mut dout = [Tri::Z; 2];
        let frame = match self.mode {
            Mode::Idle => {
                self.act = ActuationFrame::REST;
                self.autorun_check(variant, &mut events);
                ActuationFrame::REST
            }
            Mode::Prog => {
                self.act = ActuationFrame::REST;
                ActuationFrame::REST
            }
            Mode::Send => {
                self.act = ActuationFrame::REST;
                dout = self.transmit(variant, &mut events);
                ActuationFrame::REST
            }
            Mode::Run => self.run_step(inputs, variant, rom, &mut events),
        };
        self.ticks += 1;
        TickOutputs {
            mode,
            phase,
            frame,
            dout,
            events,
        }
    }

    fn receive(&mut self, mark: bool, variant: &VariantParams, events: &mut Vec<Event>) {
        match self.decoder.tick(mark, variant) {
            Some(bit) => {
                self.rx_idle = 0;
                if self.mode == Mode::Prog {
                    self.rx_frame.push(bit);
                    if comm::expected_frame_len(&self.rx_frame) == Some(self.rx_frame.len()) {
                        self.finish_program(variant, events);
                    }
                } else {
                    self.commandin = (self.commandin << 1) | bit as u8;
                    self.command_len += 1;
                    if self.command_len == 8 {
                        self.command_len = 0;
                        match parse_command(self.commandin) {
                            Ok(cmd) => self.handle_command(cmd, variant, events),
                            Err(e) => self.push(events, EventKind::CommandRejected(e.to_string())),
                        }
                    }
                }
            }
            None if mark => self.rx_idle = 0,
            None => {
                self.rx_idle = self.rx_idle.saturating_add(1);
                if self.rx_idle >= comm::bit_timeout_ticks(variant) {
                    if self.mode == Mode::Prog {
                        let got = self.rx_frame.len();
                        self.rx_frame.clear();
                        self.push(
                            events,
                            EventKind::ProgramRejected(format!("incomplete frame ({got} bits)")),
                        );
                        self.mode = Mode::Idle;
                        self.phase = 0;
                        self.clkdivider = 0;
                    } else if self.command_len > 0 {
                        self.command_len = 0;
                        self.push(events, EventKind::CommandRejected("timeout".into()));
                    }
                    self.rx_idle = 0;
                }
            }
        }
    }

    fn finish_program(&mut self, variant: &VariantParams, events: &mut Vec<Event>) {
        let bits = std::mem::take(&mut self.rx_frame);
        match comm::deframe_program(&bits) {
            Ok((word, record)) => {
                self.prog = word.decode();
                if let Some(r) = &record {
                    self.rec.load_block(r);
                }
                self.push(
                    events,
                    EventKind::ProgramLoaded {
                        word,
                        record: record.is_some(),
                    },
                );
            }
            Err(e) => self.push(events, EventKind::ProgramRejected(e.to_string())),
        }
        let _ = variant;
        self.mode = Mode::Idle;
        self.phase = 0;
        self.clkdivider = 0;
    }

    /// Acts on a decoded command. With WITH_ID only commands addressed to
    /// this lablet or to the broadcast id are obeyed.
    pub fn handle_command(&mut self, cmd: Command, variant: &VariantParams, events: &mut Vec<Event>) {
        if variant.with_id && cmd.target_id != variant.def_id && cmd.target_id != BROADCAST_ID {
            self.push(events, EventKind::CommandIgnored(cmd));
            return;
        }
        self.push(events, EventKind::CommandReceived(cmd));
        self.comd = true;
        if self.mode == Mode::Idle {
            self.clkdivider = 0;
        }
        match cmd.opcode {
            Opcode::Prog => {
                self.tx = None;
                self.mode = Mode::Prog;
                self.phase = 0;
                self.act = ActuationFrame::REST;
                self.rx_frame.clear();
                self.rx_idle = 0;
            }
            Opcode::Run => {
                self.autorun_armed = false;
                self.enter_phase(1, variant, events);
            }
            Opcode::Send => {
                let bits = self.program_payload();
                self.start_send(&bits, AfterSend::Idle, variant, events);
            }
            Opcode::Trig => self.trigd = true,
            Opcode::Stop => {
                self.trigd = false;
                self.tx = None;
                self.enter_phase(0, variant, events);
            }
            Opcode::Test => self.start_send(&TEST_PATTERN, AfterSend::Idle, variant, events),
        }
    }

    /// PROG command (broadcast) followed by the program frame, with the
    /// record block when TSDAT is set.
    pub fn program_payload(&self) -> Vec<bool> {
        let word = self.prog.encode().expect("loaded programs are always encodable");
        let block = self.rec.block();
        let record = self.prog.records().then_some(&block);
        let mut bits = command_bits(Command::broadcast(Opcode::Prog)).to_vec();
        bits.extend(frame_program(word, record).expect("record presence follows TSDAT"));
        bits
    }

    fn start_send(
        &mut self,
        bits: &[bool],
        after: AfterSend,
        variant: &VariantParams,
        events: &mut Vec<Event>,
    ) {
        let wave = encode_bits(bits, variant).expect("payload is never empty");
        self.push(events, EventKind::SendStarted { bits: bits.len() });
        self.tx = Some(Transmitter {
            wave,
            segment: 0,
            elapsed: 0,
            after,
        });
        self.mode = Mode::Send;
        self.act = ActuationFrame::REST;
    }

    fn transmit(&mut self, variant: &VariantParams, events: &mut Vec<Event>) -> [Tri; 2] {
        let Some(tx) = self.tx.as_mut() else {
            self.doutact = false;
            self.enter_phase(0, variant, events);
            return [Tri::Z; 2];
        };
        let seg = tx.wave.segments[tx.segment];
        let lines = tx.wave.lines(seg.mark);
        let bipolar = tx.wave.bipolar;
        tx.elapsed += 1;
        if tx.elapsed >= seg.duration {
            tx.elapsed = 0;
            tx.segment += 1;
        }
        let done = tx.segment >= tx.wave.segments.len();
        let after = tx.after;
        self.dout = lines[0];
        self.doutact = true;
        if done {
            self.tx = None;
            self.doutact = false;
            self.push(events, EventKind::SendCompleted);
            match after {
                AfterSend::Idle => self.enter_phase(0, variant, events),
                AfterSend::Phase(p) => self.enter_phase(p, variant, events),
            }
        }
        [drive(lines[0]), if bipolar { drive(lines[1]) } else { Tri::Z }]
    }

    fn enter_phase(&mut self, phase: u8, variant: &VariantParams, events: &mut Vec<Event>) {
        let _ = variant;
        self.clkdivider = 0;
        self.patterncnt = 0;
        if phase == 0 {
            self.mode = Mode::Idle;
            self.phase = 0;
            self.repeatcnt = 0;
            self.act = ActuationFrame::REST;
            self.push(events, EventKind::Halted);
        } else {
            self.mode = Mode::Run;
            self.phase = phase;
            self.repeatcnt = rep_count(self.prog.rep) as u8;
            self.comd = false;
            self.push(events, EventKind::PhaseEntered(phase));
        }
    }

    /// IDLE housekeeping: advance the divider and start the program once it
    /// wraps, if autorun is armed.
    pub fn autorun_check(&mut self, variant: &VariantParams, events: &mut Vec<Event>) {
        self.clkdivider = (self.clkdivider + 1) & CLKDIV_MASK;
        if variant.autorun && self.autorun_armed && self.clkdivider == 0 {
            self.autorun_armed = false;
            self.push(events, EventKind::Autorun);
            self.enter_phase(1, variant, events);
        }
    }

    fn run_step(
        &mut self,
        inputs: &TickInputs,
        variant: &VariantParams,
        rom: &PatternRom,
        events: &mut Vec<Event>,
    ) -> ActuationFrame {
        let cfg = *self.prog.phase(self.phase);
        let frame = rom.frame_at(&cfg, self.patterncnt as usize);
        self.act = frame;
        debug_assert!(frame[Electrode::Pwr2] != Tri::Hi);
        self.clkdivider += 1;
        if self.clkdivider as u32 >= step_multiplier(self.prog.tim, cfg.ti) {
            self.clkdivider = 0;
            self.patterncnt += 1;
            if self.patterncnt == 8 {
                self.patterncnt = 0;
                self.loop_boundary(inputs.s0, inputs.s1, variant, events);
            }
        }
        frame
    }

    fn loop_boundary(&mut self, s0: bool, s1: bool, variant: &VariantParams, events: &mut Vec<Event>) {
        let cfg = *self.prog.phase(self.phase);
        let p = self.phase as usize;
        let fired = eval_condition(
            cfg.se,
            ConditionInputs {
                s0,
                s1,
                trigd: self.trigd,
                comd: self.comd,
                mem_s0: self.rec.mem_s0[p],
                mem_s1: self.rec.mem_s1[p],
            },
            variant.longcond,
        );
        self.record_sample(s0, s1, events);
        self.repeatcnt = self.repeatcnt.saturating_sub(1);
        self.apply_condition(fired, variant, events);
    }

    /// TSDAT recording of the sensor bits for the current phase.
    pub fn record_sample(&mut self, s0: bool, s1: bool, events: &mut Vec<Event>) {
        if !self.prog.records() {
            return;
        }
        let p = self.phase as usize;
        self.rec.mem_s0[p] = s0;
        self.rec.mem_s1[p] = s1;
        self.rec.event_times[p] = Some(self.ticks);
        self.push(
            events,
            EventKind::Recorded {
                phase: self.phase,
                s0,
                s1,
            },
        );
    }

    /// Phase transition at an inner-loop boundary, after `repeatcnt` has been
    /// decremented.
    pub fn apply_condition(&mut self, fired: bool, variant: &VariantParams, events: &mut Vec<Event>) {
        let cfg = *self.prog.phase(self.phase);
        let next = cfg.ca.next_phase;
        if fired {
            self.push(
                events,
                EventKind::ConditionFired {
                    phase: self.phase,
                    code: cfg.se,
                },
            );
            if cfg.ca.send {
                let bits = self.program_payload();
                self.start_send(&bits, AfterSend::Phase(next), variant, events);
            } else {
                self.enter_phase(next, variant, events);
            }
        } else if self.repeatcnt == 0 {
            self.push(events, EventKind::RepeatExhausted(self.phase));
            self.enter_phase(next, variant, events);
        }
    }
}
