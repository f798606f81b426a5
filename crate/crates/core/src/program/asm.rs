//! Line-oriented assembly text for lablet programs.
//!
//! ```text
//! # comment
//! global rep=16 dat=1 tim=0
//! phase 1: ti=0 ec=0 sc=3 ep=2 pa=6 ne=0 se=1 next=2 send=0
//! phase 2: se=10 next=0 send=1
//! ```
//!
//! Key/value lines that follow a `phase N:` header belong to that phase; bare
//! key/value lines before any header are global. Unspecified fields are 0.

use std::fmt::Write as _;

use thiserror::Error;

use super::{rep_count, ConditionAction, LabletProgram, PhaseConfig};

const CONDITION_DESCRIPTIONS: [&str; 16] = [
    "Default, no action",
    "Sensor 0",
    "Sensor 1",
    "Both sensors",
    "Sensors differ",
    "Trig cmd received",
    "Trig and sensor 0",
    "Trig and sensor 1",
    "Not sensor 0",
    "Not sensor 1",
    "Command rec'vd",
    "No command rec'vd",
    "Sensor 0 new val",
    "Sensor 1 new val",
    "New sensor value",
    "Sensor 0 only",
];

/// Human-readable label of a condition code.
pub fn condition_description(se: u8) -> &'static str {
    CONDITION_DESCRIPTIONS[(se & 0xF) as usize]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsmErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("value `{value}` out of range for `{key}`")]
    OutOfRange { key: String, value: String },
    #[error("duplicate `{0}`")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct AsmError {
    pub line: usize,
    pub column: usize,
    pub kind: AsmErrorKind,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Global,
    Phase(usize),
}

struct Parser {
    program: LabletProgram,
    seen_global: Vec<&'static str>,
    seen_phase: [Vec<&'static str>; 3],
    seen_header: [bool; 3],
    section: Section,
}

/// Parses assembly text into a program. Range checks are per field width;
/// variant-specific restrictions are left to [`super::validate`].
pub fn assemble(text: &str) -> Result<LabletProgram, AsmError> {
    let mut p = Parser {
        program: LabletProgram::default(),
        seen_global: Vec::new(),
        seen_phase: Default::default(),
        seen_header: [false; 3],
        section: Section::Global,
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let code = raw.split('#').next().unwrap_or("");
        let mut tokens = tokenize(code).peekable();
        while let Some((col, tok)) = tokens.next() {
            let err = |kind| AsmError {
                line: line_no,
                column: col,
                kind,
            };
            if tok == "global" {
                p.section = Section::Global;
                continue;
            }
            if tok == "phase" {
                let (ncol, num) = tokens
                    .next()
                    .ok_or_else(|| err(AsmErrorKind::Syntax("expected phase number".into())))?;
                let num = num.strip_suffix(':').map(|n| (n, true)).unwrap_or((num, false));
                let (digits, had_colon) = num;
                let n = match digits {
                    "1" => 0,
                    "2" => 1,
                    "3" => 2,
                    other => {
                        return Err(AsmError {
                            line: line_no,
                            column: ncol,
                            kind: AsmErrorKind::OutOfRange {
                                key: "phase".into(),
                                value: other.into(),
                            },
                        })
                    }
                };
                if !had_colon {
                    match tokens.next() {
                        Some((_, ":")) => {}
                        Some((c, t)) => {
                            return Err(AsmError {
                                line: line_no,
                                column: c,
                                kind: AsmErrorKind::Syntax(format!("expected `:`, found `{t}`")),
                            })
                        }
                        None => {
                            return Err(AsmError {
                                line: line_no,
                                column: ncol + digits.len(),
                                kind: AsmErrorKind::Syntax("expected `:`".into()),
                            })
                        }
                    }
                }
                if p.seen_header[n] {
                    return Err(err(AsmErrorKind::Duplicate(format!("phase {}", n + 1))));
                }
                p.seen_header[n] = true;
                p.section = Section::Phase(n);
                continue;
            }
            let Some((key, value)) = tok.split_once('=') else {
                return Err(err(AsmErrorKind::Syntax(format!(
                    "expected key=value, found `{tok}`"
                ))));
            };
            p.assign(key, value).map_err(err)?;
        }
    }
    Ok(p.program)
}

fn tokenize(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

fn parse_num(key: &str, value: &str, max: u32) -> Result<u8, AsmErrorKind> {
    let out_of_range = || AsmErrorKind::OutOfRange {
        key: key.to_string(),
        value: value.to_string(),
    };
    let v: u32 = value.parse().map_err(|_| out_of_range())?;
    if v > max {
        return Err(out_of_range());
    }
    Ok(v as u8)
}

impl Parser {
    fn assign(&mut self, key: &str, value: &str) -> Result<(), AsmErrorKind> {
        match self.section {
            Section::Global => {
                let name: &'static str = match key {
                    "rep" => "rep",
                    "dat" => "dat",
                    "tim" => "tim",
                    _ => return Err(AsmErrorKind::UnknownKeyword(key.to_string())),
                };
                if self.seen_global.contains(&name) {
                    return Err(AsmErrorKind::Duplicate(name.to_string()));
                }
                self.seen_global.push(name);
                match name {
                    "rep" => {
                        let count: u32 = value.parse().map_err(|_| AsmErrorKind::OutOfRange {
                            key: key.into(),
                            value: value.into(),
                        })?;
                        self.program.rep = (0..4u8)
                            .find(|&r| rep_count(r) == count)
                            .ok_or_else(|| AsmErrorKind::OutOfRange {
                                key: key.into(),
                                value: value.into(),
                            })?;
                    }
                    "dat" => self.program.dat = parse_num(key, value, 1)?,
                    _ => self.program.tim = parse_num(key, value, 1)?,
                }
            }
            Section::Phase(n) => {
                let (name, max): (&'static str, u32) = match key {
                    "ti" => ("ti", 1),
                    "ec" => ("ec", 1),
                    "sc" => ("sc", 3),
                    "ep" => ("ep", 7),
                    "pa" => ("pa", 7),
                    "ne" => ("ne", 1),
                    "se" => ("se", 15),
                    "next" => ("next", 3),
                    "send" => ("send", 1),
                    _ => return Err(AsmErrorKind::UnknownKeyword(key.to_string())),
                };
                if self.seen_phase[n].contains(&name) {
                    return Err(AsmErrorKind::Duplicate(name.to_string()));
                }
                self.seen_phase[n].push(name);
                let v = parse_num(key, value, max)?;
                let ph = &mut self.program.phases[n];
                match name {
                    "ti" => ph.ti = v,
                    "ec" => ph.ec = v,
                    "sc" => ph.sc = v,
                    "ep" => ph.ep = v,
                    "pa" => ph.pa = v,
                    "ne" => ph.ne = v,
                    "se" => ph.se = v,
                    "next" => ph.ca.next_phase = v,
                    _ => ph.ca.send = v == 1,
                }
            }
        }
        Ok(())
    }
}

fn phase_line(out: &mut String, n: usize, ph: &PhaseConfig) {
    let ConditionAction { next_phase, send } = ph.ca;
    let _ = writeln!(
        out,
        "phase {n}: ti={} ec={} sc={} ep={} pa={} ne={} se={} next={} send={}  # {}",
        ph.ti,
        ph.ec,
        ph.sc,
        ph.ep,
        ph.pa,
        ph.ne,
        ph.se,
        next_phase,
        send as u8,
        condition_description(ph.se),
    );
}

/// Renders a program as assembly text; every condition code is annotated
/// with its description. Output is stable for a given program.
pub fn disassemble(program: &LabletProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "global rep={} dat={} tim={}",
        rep_count(program.rep),
        program.dat,
        program.tim
    );
    for (i, ph) in program.phases.iter().enumerate() {
        phase_line(&mut out, i + 1, ph);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source_is_zero_program() {
        assert_eq!(assemble("").unwrap(), LabletProgram::default());
        assert_eq!(assemble("# nothing\n\n").unwrap(), LabletProgram::default());
    }

    #[test]
    fn bare_global_keys_and_phase_blocks() {
        let src = "rep=64 dat=1\nphase 1: sc=3 pa=6\nphase 2:\n  se=10 next=0 send=1\nphase 3 : ep=7\n";
        let p = assemble(src).unwrap();
        assert_eq!(p.rep, 3);
        assert_eq!(p.dat, 1);
        assert_eq!(p.phases[0].sc, 3);
        assert_eq!(p.phases[0].pa, 6);
        assert_eq!(p.phases[1].se, 10);
        assert_eq!(p.phases[1].ca, ConditionAction { next_phase: 0, send: true });
        assert_eq!(p.phases[2].ep, 7);
    }

    #[test]
    fn errors_carry_position() {
        let e = assemble("global rep=64\nphase 1: se=16").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        assert!(matches!(e.kind, AsmErrorKind::OutOfRange { .. }));

        let e = assemble("global rep=5").unwrap_err();
        assert!(matches!(e.kind, AsmErrorKind::OutOfRange { .. }));

        let e = assemble("phase 1: foo=1").unwrap_err();
        assert_eq!(e.kind, AsmErrorKind::UnknownKeyword("foo".into()));

        let e = assemble("phase 1: se=1 se=2").unwrap_err();
        assert_eq!(e.kind, AsmErrorKind::Duplicate("se".into()));

        let e = assemble("phase 4: se=1").unwrap_err();
        assert_eq!(e.column, 7);

        let e = assemble("global rep").unwrap_err();
        assert!(matches!(e.kind, AsmErrorKind::Syntax(_)));
    }

    #[test]
    fn longcond_code_is_accepted_by_assembler() {
        let p = assemble("phase 1: se=12").unwrap();
        assert_eq!(p.phases[0].se, 12);
    }

    #[test]
    fn zero_program_annotation() {
        let text = disassemble(&LabletProgram::default());
        let p1 = text.lines().find(|l| l.starts_with("phase 1:")).unwrap();
        assert!(p1.ends_with("# Default, no action"), "{p1}");
    }

    #[test]
    fn command_condition_annotation() {
        let mut p = LabletProgram::default();
        p.phases[0].se = 10;
        assert!(disassemble(&p).contains("# Command rec'vd"));
    }
}
