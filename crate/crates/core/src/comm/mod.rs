//! Pulse-length serial link: waveform encoding, the tick-driven decoder,
//! command bytes and program framing.
//!
//! A bit is a Hi pulse of `pulselong` (1) or `pulseshort` (0) clocks followed
//! by a Lo separator of `pulsepause` clocks, or, in DC-free mode, a Lo as
//! long as the preceding Hi. Bipolar variants drive two lines with HL as the
//! mark and LH as the space.

mod command;
mod frame;

pub use command::{command_bits, encode_command, parse_command, parse_command_bits, Command, CommandError, Opcode, BROADCAST_ID};
pub use frame::{
    deframe_program, expected_frame_len, frame_program, FrameError, RecordBlock, FRAME_BITS_WITH_RECORD, RECORD_BITS,
};

use thiserror::Error;

use crate::variant::VariantParams;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommError {
    #[error("cannot encode an empty bit sequence")]
    Empty,
}

/// One constant-level stretch of a waveform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    /// Hi on a unipolar line, HL on a bipolar pair.
    pub mark: bool,
    /// Slow-clock counts, at least 1.
    pub duration: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LineWaveform {
    pub bipolar: bool,
    pub segments: Vec<Segment>,
}

impl LineWaveform {
    /// Line states for a segment level: `[line0, line1]`. The second line is
    /// idle (low) in unipolar mode.
    pub fn lines(&self, mark: bool) -> [bool; 2] {
        match (self.bipolar, mark) {
            (false, m) => [m, false],
            (true, true) => [true, false],
            (true, false) => [false, true],
        }
    }

    pub fn total_ticks(&self) -> u32 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn mark_ticks(&self) -> u32 {
        self.segments.iter().filter(|s| s.mark).map(|s| s.duration).sum()
    }

    pub fn space_ticks(&self) -> u32 {
        self.total_ticks() - self.mark_ticks()
    }

    /// Per-tick mark levels.
    pub fn expand(&self) -> Vec<bool> {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.mark, s.duration as usize))
            .collect()
    }

    /// Adds `delta(i)` to segment `i`'s duration, never below one clock.
    pub fn perturbed(&self, mut delta: impl FnMut(usize) -> i32) -> LineWaveform {
        LineWaveform {
            bipolar: self.bipolar,
            segments: self
                .segments
                .iter()
                .enumerate()
                .map(|(i, s)| Segment {
                    mark: s.mark,
                    duration: (s.duration as i64 + delta(i) as i64).max(1) as u32,
                })
                .collect(),
        }
    }
}

/// Encodes bits (first bit first) as a line waveform.
pub fn encode_bits(bits: &[bool], variant: &VariantParams) -> Result<LineWaveform, CommError> {
    if bits.is_empty() {
        return Err(CommError::Empty);
    }
    let mut segments = Vec::with_capacity(bits.len() * 2);
    for &bit in bits {
        let hi = if bit { variant.pulselong } else { variant.pulseshort } as u32;
        let lo = if variant.data_dcfree {
            hi
        } else {
            variant.pulsepause as u32
        };
        segments.push(Segment {
            mark: true,
            duration: hi,
        });
        segments.push(Segment {
            mark: false,
            duration: lo,
        });
    }
    Ok(LineWaveform {
        bipolar: variant.data_bipo,
        segments,
    })
}

/// Receive-side pulse measurement for one line.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecoderState {
    /// Consecutive mark ticks, saturating at the counter width.
    pub pulsecnt: u32,
    prev_mark: bool,
}

impl DecoderState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Consumes one tick. A bit is emitted on the mark-to-space edge: 1 when
    /// the mark lasted more than `pulsethreshold` clocks.
    pub fn tick(&mut self, mark: bool, variant: &VariantParams) -> Option<bool> {
        let out = if mark {
            self.pulsecnt = (self.pulsecnt + 1).min(variant.pulse_counter_max());
            None
        } else if self.prev_mark {
            let bit = self.pulsecnt > variant.pulsethreshold as u32;
            self.pulsecnt = 0;
            Some(bit)
        } else {
            None
        };
        self.prev_mark = mark;
        out
    }

    pub fn in_pulse(&self) -> bool {
        self.prev_mark
    }
}

/// Functional form of [`DecoderState::tick`].
pub fn decode_tick(
    dec: DecoderState,
    mark: bool,
    variant: &VariantParams,
) -> (DecoderState, Option<bool>) {
    let mut next = dec;
    let bit = next.tick(mark, variant);
    (next, bit)
}

/// Decodes a whole waveform sampled once per clock, followed by idle.
pub fn decode_waveform(wave: &LineWaveform, variant: &VariantParams) -> Vec<bool> {
    let mut dec = DecoderState::new();
    wave.expand()
        .into_iter()
        .chain(std::iter::once(false))
        .filter_map(|m| dec.tick(m, variant))
        .collect()
}

/// Idle ticks after which a partially received frame is abandoned.
pub fn bit_timeout_ticks(variant: &VariantParams) -> u32 {
    let gap = if variant.data_dcfree {
        variant.pulselong
    } else {
        variant.pulsepause
    } as u32;
    4 * (variant.pulselong as u32 + gap)
}
