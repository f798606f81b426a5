//! Pattern ROM: sequence table `(pa, sc) -> 8 selectors` and frame table
//! `(|po|, ep, ec) -> frame`.
//!
//! The built-in ROM is generated by fixed rules:
//!
//! * `sc` sets the number of active slots: 2, 4, 6, 8 (tri sequences: 3, 4,
//!   6, 8). Slot `i` is active when `(i * n) % 8 < n`.
//! * `pa` 0..=2 deploy pattern `pa + 1` solo; `pa` 3..=5 alternate the
//!   pattern pairs (1,2), (1,3), (2,3) as `+p, +q, -p, -q, ...`; `pa` 6 cycles
//!   1, 2, 3 and `pa` 7 cycles `+1, +2, +3, -1, -2, -3`.
//! * `ec = 0` frames walk the 15-pair catalogue, first electrode Hi. Entries
//!   past the fifteenth repeat the catalogue with reversed polarity unless
//!   the pair includes PWR2.
//! * `ec = 1` frames are triples (`|po| = 1`), quads (2) and five/six-electrode
//!   patterns (3), alternating Hi/Lo over the signal electrodes with PWR2 Lo.
//!
//! Override files replace individual entries:
//!
//! ```text
//! # seq <pa> <sc> = <8 selectors in -3..3>
//! seq 0 0 = 1 0 0 0 -1 0 0 0
//! # frame <|po|> <ep> <ec> = <6 chars over 0 1 Z, order A0 DO A2 DI A1 PWR2>
//! frame 1 0 0 = 10ZZZZ
//! ```

use std::fmt::Write as _;
use std::sync::OnceLock;

use thiserror::Error;

use super::{pair_catalogue, ActuationFrame, Electrode, PatternSelector, Tri};
use crate::program::PhaseConfig;

type SequenceTable = [[[PatternSelector; 8]; 4]; 8];
type FrameTable = [[[ActuationFrame; 2]; 8]; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRom {
    sequences: SequenceTable,
    frames: FrameTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RomError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("ROM violates invariants: {}", .0.join("; "))]
    Invariant(Vec<String>),
}

static DEFAULT_ROM: OnceLock<PatternRom> = OnceLock::new();

/// The built-in ROM, generated once.
pub fn default_rom() -> &'static PatternRom {
    DEFAULT_ROM.get_or_init(generate_default_rom)
}

fn active_slots(n: usize) -> impl Iterator<Item = usize> {
    (0..8).filter(move |i| (i * n) % 8 < n)
}

fn generate_sequence(pa: u8, sc: u8) -> [PatternSelector; 8] {
    let tri = pa >= 6;
    let n = if tri { [3, 4, 6, 8] } else { [2, 4, 6, 8] }[sc as usize];
    let mut seq = [PatternSelector::REST; 8];
    for (k, slot) in active_slots(n).enumerate() {
        let (mag, negative) = match pa {
            0..=2 => (pa as usize + 1, false),
            3..=5 => {
                let pair = [(1, 2), (1, 3), (2, 3)][pa as usize - 3];
                let p = if k % 2 == 0 { pair.0 } else { pair.1 };
                (p, (k / 2) % 2 == 1)
            }
            6 => (k % 3 + 1, false),
            _ => (k % 3 + 1, (k / 3) % 2 == 1),
        };
        let po = if negative { -(mag as i8) } else { mag as i8 };
        seq[slot] = PatternSelector(po);
    }
    seq
}

fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &first) in pool.iter().enumerate() {
        for mut rest in combinations(&pool[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn alternating(members: &[usize], start_hi: bool) -> ActuationFrame {
    let mut f = ActuationFrame::REST;
    let mut hi = start_hi;
    for &m in members {
        if m == Electrode::Pwr2.index() {
            f.0[m] = Tri::Lo;
        } else {
            f.0[m] = if hi { Tri::Hi } else { Tri::Lo };
            hi = !hi;
        }
    }
    f
}

fn generate_frames() -> FrameTable {
    let mut frames = [[[ActuationFrame::REST; 2]; 8]; 3];
    let pairs = pair_catalogue();
    for k in 0..24 {
        let (a, b) = pairs[k % pairs.len()];
        let reversed = k >= pairs.len() && b != Electrode::Pwr2;
        frames[k / 8][k % 8][0] = if reversed {
            ActuationFrame::from_pair(b, a)
        } else {
            ActuationFrame::from_pair(a, b)
        };
    }

    let signal: Vec<usize> = (0..5).collect();
    let all: Vec<usize> = (0..6).collect();
    let triples = combinations(&signal, 3);
    let quads = combinations(&all, 4);
    let mut higher: Vec<ActuationFrame> = combinations(&all, 5)
        .iter()
        .map(|m| alternating(m, true))
        .collect();
    higher.push(alternating(&all, true));
    higher.push(alternating(&all, false));
    for ep in 0..8 {
        frames[0][ep][1] = alternating(&triples[ep], true);
        frames[1][ep][1] = alternating(&quads[ep], true);
        frames[2][ep][1] = higher[ep];
    }
    frames
}

/// Runs the ROM generator.
pub fn generate_default_rom() -> PatternRom {
    let mut sequences = [[[PatternSelector::REST; 8]; 4]; 8];
    for pa in 0..8u8 {
        for sc in 0..4u8 {
            sequences[pa as usize][sc as usize] = generate_sequence(pa, sc);
        }
    }
    PatternRom {
        sequences,
        frames: generate_frames(),
    }
}

impl PatternRom {
    pub fn sequence(&self, pa: u8, sc: u8) -> &[PatternSelector; 8] {
        &self.sequences[(pa & 7) as usize][(sc & 3) as usize]
    }

    /// Stored frame for pattern `magnitude` (1..=3).
    pub fn frame(&self, magnitude: u8, ep: u8, ec: u8) -> ActuationFrame {
        let m = (magnitude.clamp(1, 3) - 1) as usize;
        self.frames[m][(ep & 7) as usize][(ec & 1) as usize]
    }

    /// Selector resolution before the PWR2 clamp; may drive PWR2 high.
    pub fn unclamped_frame(&self, sel: PatternSelector, ep: u8, ec: u8, ne: u8) -> ActuationFrame {
        if !sel.is_active() {
            return ActuationFrame::REST;
        }
        let base = self.frame(sel.magnitude(), ep, ec);
        if (ne & 1 == 1) ^ sel.is_negative() {
            base.flipped()
        } else {
            base
        }
    }

    /// Resolves a selector. PWR2 can only sink current: where inversion would
    /// drive it high it floats instead, and if that leaves no closed circuit
    /// the slot rests.
    pub fn resolve(&self, sel: PatternSelector, ep: u8, ec: u8, ne: u8) -> ActuationFrame {
        let mut f = self.unclamped_frame(sel, ep, ec, ne);
        if f[Electrode::Pwr2] == Tri::Hi {
            f[Electrode::Pwr2] = Tri::Z;
            if !f.completes_circuit() {
                return ActuationFrame::REST;
            }
        }
        f
    }

    pub fn frame_at(&self, phase: &PhaseConfig, idx: usize) -> ActuationFrame {
        super::frame_at(phase, idx, self)
    }

    /// First `(|po|, ep)` in group `ec` whose stored frame matches.
    pub fn find_frame(&self, pred: impl Fn(&ActuationFrame) -> bool, ec: u8) -> Option<(u8, u8)> {
        (1..=3u8)
            .flat_map(|m| (0..8u8).map(move |ep| (m, ep)))
            .find(|&(m, ep)| pred(&self.frame(m, ep, ec)))
    }

    /// Lists every violated ROM invariant.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut covered = [false; 15];
        let pairs = pair_catalogue();
        for m in 1..=3u8 {
            for ep in 0..8u8 {
                for ec in 0..2u8 {
                    let f = self.frame(m, ep, ec);
                    if f.is_rest() {
                        problems.push(format!("frame {m} {ep} {ec} is a rest frame"));
                    }
                    if !f.is_valid() {
                        problems.push(format!("frame {m} {ep} {ec} = {f} is not drivable"));
                    }
                    if ec == 0 {
                        if f.driven_count() != 2 {
                            problems.push(format!("frame {m} {ep} 0 = {f} is not a pair"));
                        } else if let Some(i) = pairs
                            .iter()
                            .position(|&(a, b)| f[a].is_driven() && f[b].is_driven())
                        {
                            covered[i] = true;
                        }
                    } else if f.driven_count() < 3 {
                        problems.push(format!("frame {m} {ep} 1 = {f} drives fewer than 3"));
                    }
                }
            }
        }
        for (i, c) in covered.iter().enumerate() {
            if !c {
                let (a, b) = pairs[i];
                problems.push(format!("pair {a}-{b} missing from ec=0 table"));
            }
        }
        for pa in 0..8u8 {
            for sc in 0..4u8 {
                let seq = self.sequence(pa, sc);
                if seq.iter().any(|s| s.value().unsigned_abs() > 3) {
                    problems.push(format!("sequence {pa} {sc} has a selector out of range"));
                }
                if sc > 0 {
                    let prev = self.sequence(pa, sc - 1).iter().filter(|s| s.is_active()).count();
                    let cur = seq.iter().filter(|s| s.is_active()).count();
                    if cur < prev {
                        problems.push(format!("sequence {pa} {sc} lowers the duty cycle"));
                    }
                }
            }
        }
        problems
    }

    /// Applies an override file on top of this ROM.
    pub fn with_overrides(&self, text: &str) -> Result<PatternRom, RomError> {
        let mut rom = self.clone();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let code = raw.split('#').next().unwrap_or("").trim();
            if code.is_empty() {
                continue;
            }
            let err = |message: String| RomError::Parse { line, message };
            let (lhs, rhs) = code
                .split_once('=')
                .ok_or_else(|| err("expected `=`".into()))?;
            let head: Vec<&str> = lhs.split_whitespace().collect();
            let index = |s: &str, max: u8| -> Result<u8, RomError> {
                s.parse::<u8>()
                    .ok()
                    .filter(|v| *v <= max)
                    .ok_or_else(|| err(format!("index `{s}` out of range 0..={max}")))
            };
            match head.as_slice() {
                ["seq", pa, sc] => {
                    let (pa, sc) = (index(pa, 7)?, index(sc, 3)?);
                    let vals: Vec<&str> = rhs.split_whitespace().collect();
                    if vals.len() != 8 {
                        return Err(err(format!("sequence needs 8 selectors, got {}", vals.len())));
                    }
                    for (slot, v) in vals.iter().enumerate() {
                        let po = v
                            .parse::<i8>()
                            .ok()
                            .and_then(PatternSelector::new)
                            .ok_or_else(|| err(format!("selector `{v}` not in -3..3")))?;
                        rom.sequences[pa as usize][sc as usize][slot] = po;
                    }
                }
                ["frame", m, ep, ec] => {
                    let m = index(m, 3)?;
                    if m == 0 {
                        return Err(err("pattern magnitude must be 1..=3".into()));
                    }
                    let (ep, ec) = (index(ep, 7)?, index(ec, 1)?);
                    let f: ActuationFrame = rhs.parse().map_err(err)?;
                    rom.frames[m as usize - 1][ep as usize][ec as usize] = f;
                }
                _ => return Err(err(format!("unrecognised entry `{}`", lhs.trim()))),
            }
        }
        let problems = rom.check();
        if problems.is_empty() {
            Ok(rom)
        } else {
            Err(RomError::Invariant(problems))
        }
    }

    /// Full ROM in override-file syntax.
    pub fn to_override_text(&self) -> String {
        let mut out = String::new();
        for pa in 0..8u8 {
            for sc in 0..4u8 {
                let vals: Vec<String> = self
                    .sequence(pa, sc)
                    .iter()
                    .map(|s| s.value().to_string())
                    .collect();
                let _ = writeln!(out, "seq {pa} {sc} = {}", vals.join(" "));
            }
        }
        for m in 1..=3u8 {
            for ep in 0..8u8 {
                for ec in 0..2u8 {
                    let _ = writeln!(out, "frame {m} {ep} {ec} = {}", self.frame(m, ep, ec));
                }
            }
        }
        out
    }
}
