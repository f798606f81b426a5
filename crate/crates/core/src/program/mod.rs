//! Lablet program data model and the packed 58-bit program word.
//!
//! Packing is MSB-first in the order `[REP|DAT|TIM|P1|P2|P3]`, with each
//! phase packed as `[TI|EC|SC|EP|CA|PA|NE|SE]` and the action field `CA`
//! holding `next_phase` in its two high bits and `send` in the low bit.
//! The serialized hex form is 15 hex digits: the word left-padded with two
//! zero bits to 60 bits.

mod asm;
mod validate;

pub use asm::{assemble, condition_description, disassemble, AsmError};
pub use validate::{validate, validate_with_rom, Diagnostic, Diagnostics, Severity};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Width of the program word in bits.
pub const PROGRAM_BITS: usize = 58;
/// Width of one phase configuration in bits.
pub const PHASE_BITS: usize = 18;
/// Width of the global header (REP, DAT, TIM).
pub const GLOBAL_BITS: usize = 4;
/// Hex digits in the serialized program word.
pub const HEX_DIGITS: usize = 15;

/// Field widths of one phase, in packing order.
pub const PHASE_FIELDS: [(&str, u32); 8] = [
    ("ti", 1),
    ("ec", 1),
    ("sc", 2),
    ("ep", 3),
    ("ca", 3),
    ("pa", 3),
    ("ne", 1),
    ("se", 4),
];

/// Field widths of the global header, in packing order.
pub const GLOBAL_FIELDS: [(&str, u32); 3] = [("rep", 2), ("dat", 1), ("tim", 1)];

const _: () = {
    let mut sum = 0;
    let mut i = 0;
    while i < PHASE_FIELDS.len() {
        sum += PHASE_FIELDS[i].1;
        i += 1;
    }
    assert!(sum as usize == PHASE_BITS);
    assert!(2 + 1 + 1 == GLOBAL_BITS);
    assert!(GLOBAL_BITS + 3 * PHASE_BITS == PROGRAM_BITS);
    assert!(HEX_DIGITS * 4 == PROGRAM_BITS + 2);
};

const WORD_MASK: u64 = (1 << PROGRAM_BITS) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("field `{field}` value {value} exceeds {width} bit(s)")]
    FieldOverflow {
        field: String,
        value: u32,
        width: u32,
    },
    #[error("program word must be exactly {PROGRAM_BITS} bits, got {0}")]
    Length(usize),
    #[error("program word {0:#x} does not fit in {PROGRAM_BITS} bits")]
    WordOverflow(u64),
    #[error("malformed program hex `{0}`: expected {HEX_DIGITS} hex digits")]
    Hex(String),
}

/// Action taken when a phase condition fires (3 bits).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConditionAction {
    /// 0 halts to P0/idle, 1..=3 select a run phase.
    pub next_phase: u8,
    pub send: bool,
}

impl ConditionAction {
    pub fn bits(self) -> u8 {
        (self.next_phase << 1) | self.send as u8
    }

    pub fn from_bits(bits: u8) -> Self {
        ConditionAction {
            next_phase: (bits >> 1) & 0b11,
            send: bits & 1 == 1,
        }
    }
}

/// One 18-bit run-phase configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseConfig {
    /// Step time MSB (x16 when set).
    pub ti: u8,
    /// Pattern group: 0 = pair patterns, 1 = triple and higher.
    pub ec: u8,
    /// Saturation (duty) select.
    pub sc: u8,
    /// Polarity / pattern select within the group.
    pub ep: u8,
    pub ca: ConditionAction,
    /// Pattern sequence address.
    pub pa: u8,
    /// Inversion.
    pub ne: u8,
    /// Condition code, see [`crate::fsm::eval_condition`].
    pub se: u8,
}

impl PhaseConfig {
    fn fields(&self) -> [(&'static str, u32, u32); 8] {
        [
            ("ti", self.ti as u32, 1),
            ("ec", self.ec as u32, 1),
            ("sc", self.sc as u32, 2),
            ("ep", self.ep as u32, 3),
            ("ca", self.ca.bits() as u32, 3),
            ("pa", self.pa as u32, 3),
            ("ne", self.ne as u32, 1),
            ("se", self.se as u32, 4),
        ]
    }

    fn check(&self, phase: usize) -> Result<(), CodecError> {
        if self.ca.next_phase > 3 {
            return Err(CodecError::FieldOverflow {
                field: format!("p{phase}.next"),
                value: self.ca.next_phase as u32,
                width: 2,
            });
        }
        for (name, value, width) in self.fields() {
            if value >> width != 0 {
                return Err(CodecError::FieldOverflow {
                    field: format!("p{phase}.{name}"),
                    value,
                    width,
                });
            }
        }
        Ok(())
    }

    fn pack(&self) -> u64 {
        self.fields()
            .iter()
            .fold(0u64, |acc, &(_, value, width)| (acc << width) | value as u64)
    }

    fn unpack(bits: u64) -> Self {
        let mut rest = bits;
        let mut take = |width: u32| {
            let shift = PHASE_BITS as u32 - width;
            let v = (rest >> shift) & ((1 << width) - 1);
            rest = (rest << width) & ((1 << PHASE_BITS) - 1);
            v as u8
        };
        let ti = take(1);
        let ec = take(1);
        let sc = take(2);
        let ep = take(3);
        let ca = ConditionAction::from_bits(take(3));
        let pa = take(3);
        let ne = take(1);
        let se = take(4);
        PhaseConfig {
            ti,
            ec,
            sc,
            ep,
            ca,
            pa,
            ne,
            se,
        }
    }
}

/// The complete 58-bit lablet program.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabletProgram {
    /// Repeat selector, see [`rep_count`].
    pub rep: u8,
    /// TSDAT: record sensor data at each inner-loop boundary.
    pub dat: u8,
    /// Global step-time LSB (x4 when set).
    pub tim: u8,
    /// Phases P1, P2, P3.
    pub phases: [PhaseConfig; 3],
}

impl LabletProgram {
    /// Configuration of run phase `phase` (1..=3).
    pub fn phase(&self, phase: u8) -> &PhaseConfig {
        &self.phases[(phase as usize).clamp(1, 3) - 1]
    }

    pub fn encode(&self) -> Result<ProgramWord, CodecError> {
        encode(self)
    }

    pub fn records(&self) -> bool {
        self.dat == 1
    }
}

/// A packed program word; only the low 58 bits are ever set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProgramWord(u64);

impl ProgramWord {
    pub fn new(raw: u64) -> Result<Self, CodecError> {
        if raw & !WORD_MASK != 0 {
            return Err(CodecError::WordOverflow(raw));
        }
        Ok(ProgramWord(raw))
    }

    /// Truncates to 58 bits.
    pub fn from_raw_truncating(raw: u64) -> Self {
        ProgramWord(raw & WORD_MASK)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    /// The 58 bits, most significant first.
    pub fn bits(self) -> Vec<bool> {
        (0..PROGRAM_BITS)
            .rev()
            .map(|i| (self.0 >> i) & 1 == 1)
            .collect()
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, CodecError> {
        if bits.len() != PROGRAM_BITS {
            return Err(CodecError::Length(bits.len()));
        }
        Ok(ProgramWord(
            bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64),
        ))
    }

    pub fn decode(self) -> LabletProgram {
        let w = self.0;
        let phase = |i: usize| {
            let shift = (2 - i) * PHASE_BITS;
            PhaseConfig::unpack((w >> shift) & ((1 << PHASE_BITS) - 1))
        };
        LabletProgram {
            rep: ((w >> 56) & 0b11) as u8,
            dat: ((w >> 55) & 1) as u8,
            tim: ((w >> 54) & 1) as u8,
            phases: [phase(0), phase(1), phase(2)],
        }
    }

    pub fn to_hex(self) -> String {
        format!("{:0width$X}", self.0, width = HEX_DIGITS)
    }
}

impl fmt::Display for ProgramWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for ProgramWord {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
        if t.len() != HEX_DIGITS || !t.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(CodecError::Hex(s.to_string()));
        }
        let raw = u64::from_str_radix(t, 16).map_err(|_| CodecError::Hex(s.to_string()))?;
        ProgramWord::new(raw).map_err(|_| CodecError::Hex(s.to_string()))
    }
}

/// Packs a program into its 58-bit word.
pub fn encode(program: &LabletProgram) -> Result<ProgramWord, CodecError> {
    for (name, value, width) in [
        ("rep", program.rep, 2u32),
        ("dat", program.dat, 1),
        ("tim", program.tim, 1),
    ] {
        if (value as u32) >> width != 0 {
            return Err(CodecError::FieldOverflow {
                field: name.to_string(),
                value: value as u32,
                width,
            });
        }
    }
    let mut word = ((program.rep as u64) << 2) | ((program.dat as u64) << 1) | program.tim as u64;
    for (i, phase) in program.phases.iter().enumerate() {
        phase.check(i + 1)?;
        word = (word << PHASE_BITS) | phase.pack();
    }
    Ok(ProgramWord(word))
}

/// Unpacks a 58-entry bit slice (MSB first).
pub fn decode(bits: &[bool]) -> Result<LabletProgram, CodecError> {
    Ok(ProgramWord::from_bits(bits)?.decode())
}

/// Inner-loop repeat count for the 2-bit selector: 1, 4, 16 or 64.
pub fn rep_count(rep: u8) -> u32 {
    1 << (2 * (rep & 0b11))
}

/// Slow-clock ticks per actuation step: `(tim ? 4 : 1) * (ti ? 16 : 1)`.
pub fn step_multiplier(tim_global: u8, ti_phase: u8) -> u32 {
    let global = if tim_global & 1 == 1 { 4 } else { 1 };
    let phase = if ti_phase & 1 == 1 { 16 } else { 1 };
    global * phase
}
