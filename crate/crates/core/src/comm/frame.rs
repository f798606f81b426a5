//! Program frames: the 58-bit word, followed by an 8-bit record block when
//! the word's TSDAT bit is set. The record block is `memS0[P0..P3]` then
//! `memS1[P0..P3]`.

use thiserror::Error;

use crate::program::{ProgramWord, PROGRAM_BITS};

pub const RECORD_BITS: usize = 8;
pub const FRAME_BITS_WITH_RECORD: usize = PROGRAM_BITS + RECORD_BITS;

/// Bit index of TSDAT within the transmitted word.
const DAT_BIT: usize = 2;

/// Recorded sensor bits per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct RecordBlock {
    pub mem_s0: [bool; 4],
    pub mem_s1: [bool; 4],
}

impl RecordBlock {
    pub fn bits(&self) -> [bool; RECORD_BITS] {
        let mut out = [false; RECORD_BITS];
        out[..4].copy_from_slice(&self.mem_s0);
        out[4..].copy_from_slice(&self.mem_s1);
        out
    }

    pub fn from_bits(bits: &[bool]) -> RecordBlock {
        let mut r = RecordBlock::default();
        r.mem_s0.copy_from_slice(&bits[..4]);
        r.mem_s1.copy_from_slice(&bits[4..RECORD_BITS]);
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("incomplete program frame: {got} of {expected} bits")]
    Incomplete { got: usize, expected: usize },
    #[error("program frame too long: {0} bits")]
    TooLong(usize),
    #[error("record block present={present} but TSDAT={dat}")]
    RecordMismatch { present: bool, dat: bool },
}

/// Frame length implied by the first bits of a frame, once the TSDAT bit
/// has been received.
pub fn expected_frame_len(prefix: &[bool]) -> Option<usize> {
    prefix.get(DAT_BIT).map(|&dat| {
        if dat {
            FRAME_BITS_WITH_RECORD
        } else {
            PROGRAM_BITS
        }
    })
}

pub fn frame_program(
    word: ProgramWord,
    record: Option<&RecordBlock>,
) -> Result<Vec<bool>, FrameError> {
    let mut bits = word.bits();
    let dat = bits[DAT_BIT];
    if dat != record.is_some() {
        return Err(FrameError::RecordMismatch {
            present: record.is_some(),
            dat,
        });
    }
    if let Some(r) = record {
        bits.extend_from_slice(&r.bits());
    }
    Ok(bits)
}

pub fn deframe_program(bits: &[bool]) -> Result<(ProgramWord, Option<RecordBlock>), FrameError> {
    let expected = expected_frame_len(bits).unwrap_or(PROGRAM_BITS);
    if bits.len() < expected {
        return Err(FrameError::Incomplete {
            got: bits.len(),
            expected,
        });
    }
    if bits.len() > expected {
        return Err(FrameError::TooLong(bits.len()));
    }
    let word = ProgramWord::from_bits(&bits[..PROGRAM_BITS]).expect("length checked");
    let record = (expected == FRAME_BITS_WITH_RECORD).then(|| RecordBlock::from_bits(&bits[PROGRAM_BITS..]));
    Ok((word, record))
}
