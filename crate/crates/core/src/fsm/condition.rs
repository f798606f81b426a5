/// Sensor and event inputs to a phase condition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConditionInputs {
    pub s0: bool,
    pub s1: bool,
    pub trigd: bool,
    pub comd: bool,
    /// Recorded sensor values for the current phase.
    pub mem_s0: bool,
    pub mem_s1: bool,
}

/// Evaluates condition code `se`. Without LONGCOND only the low three bits
/// of the code are decoded.
pub fn eval_condition(se: u8, i: ConditionInputs, longcond: bool) -> bool {
    let code = if longcond { se & 0xF } else { se & 0x7 };
    let ConditionInputs {
        s0,
        s1,
        trigd,
        comd,
        mem_s0,
        mem_s1,
    } = i;
    match code {
        0 => false,
        1 => s0,
        2 => s1,
        3 => s0 && s1,
        4 => s0 != s1,
        5 => trigd,
        6 => trigd && s0,
        7 => trigd && s1,
        8 => !s0,
        9 => !s1,
        10 => comd,
        11 => !comd,
        12 => s0 != mem_s0,
        13 => s1 != mem_s1,
        14 => s0 != mem_s0 || s1 != mem_s1,
        _ => s0 && !s1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(s0: bool, s1: bool) -> ConditionInputs {
        ConditionInputs {
            s0,
            s1,
            ..Default::default()
        }
    }

    #[test]
    fn spot_checks() {
        assert!(!eval_condition(0, inputs(true, true), true));
        assert!(eval_condition(4, inputs(true, false), false));
        assert!(!eval_condition(15, inputs(true, true), true));
        assert!(eval_condition(15, inputs(true, false), true));
    }

    #[test]
    fn short_codes_truncate() {
        // 12 decodes as 4 (sensors differ) without LONGCOND
        assert_eq!(
            eval_condition(12, inputs(true, false), false),
            eval_condition(4, inputs(true, false), false)
        );
        let same = ConditionInputs {
            mem_s0: true,
            ..inputs(true, false)
        };
        assert!(!eval_condition(12, same, true));
        assert!(eval_condition(12, same, false));
    }
}
