//! Actuation patterns: tristate electrode frames and the pattern ROM that
//! expands a phase configuration into its 8-slot inner-loop sequence.

mod rom;

pub use rom::{default_rom, generate_default_rom, PatternRom, RomError};

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::program::PhaseConfig;

/// Actuator electrodes in drive order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Electrode {
    A0,
    Do,
    A2,
    Di,
    A1,
    Pwr2,
}

impl Electrode {
    pub const ALL: [Electrode; 6] = [
        Electrode::A0,
        Electrode::Do,
        Electrode::A2,
        Electrode::Di,
        Electrode::A1,
        Electrode::Pwr2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Electrode::A0 => "A0",
            Electrode::Do => "DO",
            Electrode::A2 => "A2",
            Electrode::Di => "DI",
            Electrode::A1 => "A1",
            Electrode::Pwr2 => "PWR2",
        }
    }
}

impl fmt::Display for Electrode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tristate drive level.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tri {
    Lo,
    Hi,
    #[default]
    Z,
}

impl Tri {
    pub fn flipped(self) -> Tri {
        match self {
            Tri::Lo => Tri::Hi,
            Tri::Hi => Tri::Lo,
            Tri::Z => Tri::Z,
        }
    }

    pub fn is_driven(self) -> bool {
        self != Tri::Z
    }

    pub fn as_char(self) -> char {
        match self {
            Tri::Lo => '0',
            Tri::Hi => '1',
            Tri::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Tri> {
        match c {
            '0' => Some(Tri::Lo),
            '1' => Some(Tri::Hi),
            'Z' | 'z' => Some(Tri::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Drive state of the six actuator electrodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ActuationFrame(pub [Tri; 6]);

impl ActuationFrame {
    pub const REST: ActuationFrame = ActuationFrame([Tri::Z; 6]);

    pub fn is_rest(&self) -> bool {
        self.0.iter().all(|t| *t == Tri::Z)
    }

    pub fn driven_count(&self) -> usize {
        self.0.iter().filter(|t| t.is_driven()).count()
    }

    /// Swaps Hi and Lo on every electrode.
    pub fn flipped(&self) -> ActuationFrame {
        ActuationFrame(self.0.map(Tri::flipped))
    }

    /// True for rest frames, and for frames that close a circuit: a Hi and a
    /// Lo among A0..A1, or PWR2 sinking against at least one Hi.
    pub fn completes_circuit(&self) -> bool {
        if self.is_rest() {
            return true;
        }
        let signal = &self.0[..5];
        let hi = signal.contains(&Tri::Hi);
        let lo = signal.contains(&Tri::Lo);
        (hi && lo) || (self[Electrode::Pwr2] == Tri::Lo && hi)
    }

    /// Frame invariants: PWR2 never Hi, circuit completion.
    pub fn is_valid(&self) -> bool {
        self[Electrode::Pwr2] != Tri::Hi && self.completes_circuit()
    }

    pub fn from_pair(hi: Electrode, lo: Electrode) -> ActuationFrame {
        let mut f = ActuationFrame::REST;
        f[hi] = Tri::Hi;
        f[lo] = Tri::Lo;
        f
    }
}

impl Index<Electrode> for ActuationFrame {
    type Output = Tri;
    fn index(&self, e: Electrode) -> &Tri {
        &self.0[e.index()]
    }
}

impl IndexMut<Electrode> for ActuationFrame {
    fn index_mut(&mut self, e: Electrode) -> &mut Tri {
        &mut self.0[e.index()]
    }
}

impl fmt::Display for ActuationFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.0 {
            write!(f, "{}", t.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for ActuationFrame {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 6 {
            return Err(format!("frame `{s}` must have 6 characters"));
        }
        let mut f = ActuationFrame::REST;
        for (i, c) in chars.into_iter().enumerate() {
            f.0[i] = Tri::from_char(c).ok_or_else(|| format!("bad drive `{c}` in `{s}`"))?;
        }
        Ok(f)
    }
}

/// Signed pattern choice for one inner-loop slot; 0 rests, a negative value
/// selects the pattern `|po|` with inverted polarity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PatternSelector(i8);

impl PatternSelector {
    pub const REST: PatternSelector = PatternSelector(0);

    pub fn new(po: i8) -> Option<Self> {
        (-3..=3).contains(&po).then_some(PatternSelector(po))
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn magnitude(self) -> u8 {
        self.0.unsigned_abs()
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn is_active(self) -> bool {
        self.0 != 0
    }
}

/// All unordered electrode pairs, lexicographic in drive order.
pub fn pair_catalogue() -> Vec<(Electrode, Electrode)> {
    let mut pairs = Vec::with_capacity(15);
    for (i, &a) in Electrode::ALL.iter().enumerate() {
        for &b in &Electrode::ALL[i + 1..] {
            pairs.push((a, b));
        }
    }
    pairs
}

/// Sequence lookup for a (pa, sc) address.
pub fn sequence_select(pa: u8, sc: u8, rom: &PatternRom) -> [PatternSelector; 8] {
    *rom.sequence(pa, sc)
}

/// Resolves one slot selector into a frame.
pub fn resolve_frame(
    sel: PatternSelector,
    ep: u8,
    ec: u8,
    ne: u8,
    rom: &PatternRom,
) -> ActuationFrame {
    rom.resolve(sel, ep, ec, ne)
}

/// Frame driven at inner-loop slot `idx` of a phase.
pub fn frame_at(phase: &PhaseConfig, idx: usize, rom: &PatternRom) -> ActuationFrame {
    let sel = rom.sequence(phase.pa, phase.sc)[idx % 8];
    rom.resolve(sel, phase.ep, phase.ec, phase.ne)
}
