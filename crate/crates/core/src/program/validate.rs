use std::fmt;

use crate::pattern::{self, Electrode, PatternRom, Tri};
use crate::variant::VariantParams;

use super::LabletProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Dotted field path, e.g. `p2.se`.
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: {}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Warning)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }
}

/// Checks a program against a variant using the built-in pattern ROM.
pub fn validate(program: &LabletProgram, variant: &VariantParams) -> Diagnostics {
    validate_with_rom(program, variant, pattern::default_rom())
}

pub fn validate_with_rom(
    program: &LabletProgram,
    variant: &VariantParams,
    rom: &PatternRom,
) -> Diagnostics {
    let mut out = Vec::new();
    if program.rep > 3 || program.dat > 1 || program.tim > 1 {
        out.push(Diagnostic {
            severity: Severity::Error,
            field: "global".into(),
            message: "global field exceeds its bit width".into(),
        });
    }
    for (i, ph) in program.phases.iter().enumerate() {
        let n = i + 1;
        if ph.se > 15 {
            out.push(Diagnostic {
                severity: Severity::Error,
                field: format!("p{n}.se"),
                message: format!("condition {} exceeds 4 bits", ph.se),
            });
        } else if ph.se > 7 && !variant.longcond {
            out.push(Diagnostic {
                severity: Severity::Error,
                field: format!("p{n}.se"),
                message: format!(
                    "condition {} requires LONGCOND; this variant supports codes 0-7 only",
                    ph.se
                ),
            });
        }
        if ph.ti > 1 || ph.ec > 1 || ph.sc > 3 || ph.ep > 7 || ph.pa > 7 || ph.ne > 1 {
            out.push(Diagnostic {
                severity: Severity::Error,
                field: format!("p{n}"),
                message: "phase field exceeds its bit width".into(),
            });
            continue;
        }
        if ph.ca.next_phase > 3 {
            out.push(Diagnostic {
                severity: Severity::Error,
                field: format!("p{n}.next"),
                message: format!("next phase {} out of range", ph.ca.next_phase),
            });
        }
        let clamped: Vec<usize> = (0..8)
            .filter(|&idx| {
                let sel = rom.sequence(ph.pa, ph.sc)[idx];
                sel.is_active()
                    && rom.unclamped_frame(sel, ph.ep, ph.ec, ph.ne)[Electrode::Pwr2] == Tri::Hi
            })
            .collect();
        if !clamped.is_empty() {
            out.push(Diagnostic {
                severity: Severity::Warning,
                field: format!("p{n}"),
                message: format!(
                    "pattern slots {clamped:?} would drive PWR2 high; PWR2 is left floating there"
                ),
            });
        }
    }
    Diagnostics(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variant::Preset;

    #[test]
    fn longcond_restriction() {
        let mut p = LabletProgram::default();
        p.phases[0].se = 12;
        let d = validate(&p, &Preset::Id0.params());
        assert_eq!(d.errors().count(), 1);
        let d = validate(&p, &Preset::Id2.params());
        assert!(!d.has_errors());
    }

    #[test]
    fn zero_program_clean_everywhere() {
        for preset in Preset::ALL {
            assert!(validate(&LabletProgram::default(), &preset.params()).is_empty());
        }
    }

    #[test]
    fn negated_pwr2_pair_warns() {
        let rom = pattern::default_rom();
        let (po, ep) = rom
            .find_frame(|f| f[Electrode::Pwr2] == Tri::Lo, 0)
            .expect("pair table contains a PWR2 pair");
        assert_eq!(po, 1, "first PWR2 pair sits in the |po|=1 bank");
        let mut p = LabletProgram::default();
        p.phases[0].ep = ep;
        p.phases[0].sc = 3;
        assert!(validate(&p, &Preset::Id4.params()).warnings().count() == 0);
        p.phases[0].ne = 1;
        let d = validate(&p, &Preset::Id4.params());
        assert_eq!(d.warnings().count(), 1);
        assert!(!d.has_errors());
    }
}
