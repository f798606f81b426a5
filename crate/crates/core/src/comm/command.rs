//! Command byte layout, MSB first: `[target_id:3 | opcode:3 | p_id:1 | p_op:1]`
//! where `p_id` and `p_op` are even parity over the id and opcode bits.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Target id accepted by every lablet.
pub const BROADCAST_ID: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Opcode {
    Prog = 1,
    Run = 2,
    Send = 3,
    Trig = 4,
    Test = 5,
    Stop = 6,
}

impl Opcode {
    pub const ALL: [Opcode; 6] = [
        Opcode::Prog,
        Opcode::Run,
        Opcode::Send,
        Opcode::Trig,
        Opcode::Test,
        Opcode::Stop,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Opcode> {
        Opcode::ALL.into_iter().find(|o| o.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Opcode::Prog => "prog",
            Opcode::Run => "run",
            Opcode::Send => "send",
            Opcode::Trig => "trig",
            Opcode::Test => "test",
            Opcode::Stop => "stop",
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Opcode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Opcode::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Command {
    pub opcode: Opcode,
    pub target_id: u8,
}

impl Command {
    pub fn new(opcode: Opcode, target_id: u8) -> Self {
        Command {
            opcode,
            target_id: target_id & 7,
        }
    }

    pub fn broadcast(opcode: Opcode) -> Self {
        Command::new(opcode, BROADCAST_ID)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CommandError {
    #[error("command byte {0:#010b} fails parity")]
    Parity(u8),
    #[error("command byte {byte:#010b} carries unknown opcode {opcode}")]
    UnknownOpcode { byte: u8, opcode: u8 },
    #[error("command frame must be 8 bits, got {0}")]
    Length(usize),
}

fn parity(v: u8) -> u8 {
    (v.count_ones() & 1) as u8
}

pub fn encode_command(cmd: Command) -> u8 {
    let id = cmd.target_id & 7;
    let op = cmd.opcode.code();
    (id << 5) | (op << 2) | (parity(id) << 1) | parity(op)
}

pub fn parse_command(byte: u8) -> Result<Command, CommandError> {
    let id = byte >> 5;
    let op = (byte >> 2) & 7;
    if (byte >> 1) & 1 != parity(id) || byte & 1 != parity(op) {
        return Err(CommandError::Parity(byte));
    }
    let opcode = Opcode::from_code(op).ok_or(CommandError::UnknownOpcode { byte, opcode: op })?;
    Ok(Command {
        opcode,
        target_id: id,
    })
}

/// Command byte as 8 bits, MSB first.
pub fn command_bits(cmd: Command) -> [bool; 8] {
    let b = encode_command(cmd);
    std::array::from_fn(|i| (b >> (7 - i)) & 1 == 1)
}

pub fn parse_command_bits(bits: &[bool]) -> Result<Command, CommandError> {
    if bits.len() != 8 {
        return Err(CommandError::Length(bits.len()));
    }
    parse_command(bits.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_roundtrip() {
        for op in Opcode::ALL {
            for id in 0..8 {
                let c = Command::new(op, id);
                assert_eq!(parse_command(encode_command(c)), Ok(c));
                assert_eq!(parse_command_bits(&command_bits(c)), Ok(c));
            }
        }
    }

    #[test]
    fn single_bit_flips_rejected() {
        for op in Opcode::ALL {
            for id in 0..8 {
                let b = encode_command(Command::new(op, id));
                for bit in 0..8 {
                    assert_eq!(parse_command(b ^ (1 << bit)), Err(CommandError::Parity(b ^ (1 << bit))));
                }
            }
        }
    }

    #[test]
    #[allow(clippy::unusual_byte_groupings)]
    fn unknown_opcodes() {
        // opcode 0 and 7 with correct parity
        assert!(matches!(parse_command(0b000_000_00), Err(CommandError::UnknownOpcode { opcode: 0, .. })));
        assert!(matches!(parse_command(0b000_111_01), Err(CommandError::UnknownOpcode { opcode: 7, .. })));
        assert_eq!(parse_command_bits(&[true; 7]), Err(CommandError::Length(7)));
    }
}
