//! Build-variant parameters and the five fabricated presets `id0`..`id4`.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::program::{
    assemble, encode, ConditionAction, LabletProgram, PhaseConfig, ProgramWord,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantParams {
    pub sysclk_hz: u32,
    pub def_id: u8,
    pub with_id: bool,
    pub default_program: LabletProgram,
    pub longcond: bool,
    pub autorun: bool,
    /// DI/DO sit inside the channel (layout 3a).
    pub ddinchan: bool,
    pub data_bipo: bool,
    pub data_dcfree: bool,
    pub pulsecntbits: u8,
    pub pulsethreshold: u8,
    pub pulselong: u8,
    pub pulseshort: u8,
    pub pulsepause: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariantError {
    #[error("unknown variant preset `{0}` (expected id0..id4)")]
    UnknownPreset(String),
    #[error("invalid variant: {0}")]
    Invalid(String),
    #[error("variant file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Id0,
    Id1,
    Id2,
    Id3,
    Id4,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Id0, Preset::Id1, Preset::Id2, Preset::Id3, Preset::Id4];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Id0 => "id0",
            Preset::Id1 => "id1",
            Preset::Id2 => "id2",
            Preset::Id3 => "id3",
            Preset::Id4 => "id4",
        }
    }

    pub fn params(self) -> VariantParams {
        // sysclk, id, longcond, autorun, ddinchan, bipo, dcfree, cntbits, thr, long, short, pause
        let (sysclk_hz, def_id, program, longcond, autorun, ddinchan, bipo, dcfree, bits, thr, long, short, pause) =
            match self {
                Preset::Id0 => (200, 0, prog_02(), false, true, true, true, false, 5, 4, 7, 2, 3),
                Preset::Id1 => (200, 1, prog_02(), false, true, true, true, true, 5, 9, 16, 2, 7),
                Preset::Id2 => (200, 2, def_prog(), true, false, false, false, false, 5, 9, 16, 3, 7),
                Preset::Id3 => (200, 3, prog_03(), false, true, false, true, true, 4, 3, 5, 2, 1),
                Preset::Id4 => (20, 4, prog_04(), true, true, false, true, true, 5, 3, 5, 2, 1),
            };
        VariantParams {
            sysclk_hz,
            def_id,
            with_id: true,
            default_program: program,
            longcond,
            autorun,
            ddinchan,
            data_bipo: bipo,
            data_dcfree: dcfree,
            pulsecntbits: bits,
            pulsethreshold: thr,
            pulselong: long,
            pulseshort: short,
            pulsepause: pause,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = VariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| VariantError::UnknownPreset(s.to_string()))
    }
}

fn phase(pa: u8, sc: u8, ep: u8, ec: u8, se: u8, next_phase: u8, send: bool) -> PhaseConfig {
    PhaseConfig {
        pa,
        sc,
        ep,
        ec,
        se,
        ca: ConditionAction { next_phase, send },
        ..Default::default()
    }
}

/// Stand-in for `PROG_02`: heavy tri-pattern loop in P1, repeating forever.
pub fn prog_02() -> LabletProgram {
    LabletProgram {
        rep: 0,
        dat: 0,
        tim: 0,
        phases: [
            phase(6, 3, 0, 0, 0, 1, false),
            phase(3, 1, 2, 0, 0, 1, false),
            phase(0, 0, 0, 0, 0, 0, false),
        ],
    }
}

/// Stand-in for `PROG_03`: twin pattern until sensor 1 trips, then a
/// triple pattern until both sensors are high, then back.
pub fn prog_03() -> LabletProgram {
    LabletProgram {
        rep: 1,
        dat: 0,
        tim: 0,
        phases: [
            phase(3, 1, 2, 0, 2, 2, false),
            phase(1, 2, 5, 1, 3, 1, false),
            phase(0, 0, 0, 0, 0, 0, false),
        ],
    }
}

/// Stand-in for `PROG_04`: records sensors and reports a change of sensor 0
/// by sending the program with its record, then halts.
pub fn prog_04() -> LabletProgram {
    LabletProgram {
        rep: 2,
        dat: 1,
        tim: 1,
        phases: [
            phase(0, 1, 3, 0, 12, 2, true),
            phase(7, 2, 1, 1, 0, 1, false),
            phase(0, 0, 0, 0, 0, 0, false),
        ],
    }
}

/// Stand-in for `DEF_PROG`: the all-zero program.
pub fn def_prog() -> LabletProgram {
    LabletProgram::default()
}

impl VariantParams {
    pub fn preset(name: &str) -> Result<VariantParams, VariantError> {
        Ok(name.parse::<Preset>()?.params())
    }

    pub fn nominal_period_s(&self) -> f64 {
        1.0 / self.sysclk_hz as f64
    }

    /// Saturation value of the pulse-length counter.
    pub fn pulse_counter_max(&self) -> u32 {
        (1u32 << self.pulsecntbits) - 1
    }

    pub fn check(&self) -> Result<(), VariantError> {
        let bad = |m: String| Err(VariantError::Invalid(m));
        if self.sysclk_hz == 0 {
            return bad("sysclk_hz must be positive".into());
        }
        if self.def_id > 7 {
            return bad(format!("def_id {} exceeds 3 bits", self.def_id));
        }
        if !(1..=8).contains(&self.pulsecntbits) {
            return bad(format!("pulsecntbits {} out of range", self.pulsecntbits));
        }
        if self.pulseshort == 0 || self.pulsepause == 0 {
            return bad("pulse durations must be at least one clock".into());
        }
        if !(self.pulseshort < self.pulsethreshold && self.pulsethreshold < self.pulselong) {
            return bad(format!(
                "need pulseshort < pulsethreshold < pulselong, got {} / {} / {}",
                self.pulseshort, self.pulsethreshold, self.pulselong
            ));
        }
        if self.pulselong as u32 > self.pulse_counter_max() {
            return bad(format!(
                "pulselong {} does not fit a {}-bit counter",
                self.pulselong, self.pulsecntbits
            ));
        }
        encode(&self.default_program).map_err(|e| VariantError::Invalid(e.to_string()))?;
        Ok(())
    }

    /// Flip-flop inventory of the controller state, in register order.
    pub fn flip_flop_budget(&self) -> Vec<(&'static str, u32)> {
        vec![
            ("state", 2),
            ("phase", 2),
            ("patterncnt", 3),
            ("repeatcnt", 7),
            ("clkdivider", 12),
            ("pulsecnt", self.pulsecntbits as u32),
            ("commandin", 8),
            ("trigd", 1),
            ("din1", 1),
            ("din2", 1),
            ("comd", 1),
            ("dout", 1),
            ("doutact", 1),
            ("act", 6),
            ("actenab", 5),
            ("prog", 3 * 18 + 4),
        ]
    }

    /// Parses a TOML variant file. `base` names a preset to start from; any
    /// other key overrides that preset's value.
    pub fn from_toml(text: &str) -> Result<VariantParams, VariantError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            base: Option<String>,
            sysclk_hz: Option<u32>,
            def_id: Option<u8>,
            with_id: Option<bool>,
            program: Option<String>,
            longcond: Option<bool>,
            autorun: Option<bool>,
            ddinchan: Option<bool>,
            data_bipo: Option<bool>,
            data_dcfree: Option<bool>,
            pulsecntbits: Option<u8>,
            pulsethreshold: Option<u8>,
            pulselong: Option<u8>,
            pulseshort: Option<u8>,
            pulsepause: Option<u8>,
        }
        let raw: Raw = toml::from_str(text).map_err(|e| VariantError::Parse(e.to_string()))?;
        let mut v = VariantParams::preset(raw.base.as_deref().unwrap_or("id0"))?;
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(x) = raw.$f { v.$f = x; } )* };
        }
        take!(
            sysclk_hz, def_id, with_id, longcond, autorun, ddinchan, data_bipo, data_dcfree,
            pulsecntbits, pulsethreshold, pulselong, pulseshort, pulsepause
        );
        if let Some(p) = raw.program {
            v.default_program = parse_program(&p).map_err(VariantError::Parse)?;
        }
        v.check()?;
        Ok(v)
    }
}

/// Accepts a 15-digit hex word or inline assembly text.
pub fn parse_program(text: &str) -> Result<LabletProgram, String> {
    if let Ok(w) = text.trim().parse::<ProgramWord>() {
        return Ok(w.decode());
    }
    assemble(text).map_err(|e| e.to_string())
}
