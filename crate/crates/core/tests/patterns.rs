use lablet::pattern::{default_rom, frame_at, Electrode, PatternSelector, Tri};
use lablet::program::PhaseConfig;
use proptest::prelude::*;

proptest! {
    #[test]
    fn every_slot_is_a_valid_frame(pa in 0..8u8, sc in 0..4u8, ep in 0..8u8, ec in 0..2u8, ne in 0..2u8, idx in 0..64usize) {
        let phase = PhaseConfig { pa, sc, ep, ec, ne, ..Default::default() };
        let f = frame_at(&phase, idx, default_rom());
        prop_assert!(f.is_valid(), "{}", f);
        prop_assert_eq!(f, frame_at(&phase, idx % 8, default_rom()));
    }
}

/// Independent duty rule: `n` active slots of 8 spread evenly.
fn spread(n: usize) -> Vec<bool> {
    (0..8).map(|i| (i * n) % 8 < n).collect()
}

#[test]
fn duty_follows_even_spread() {
    let rom = default_rom();
    for pa in 0..8u8 {
        for sc in 0..4u8 {
            let active: Vec<bool> = rom.sequence(pa, sc).iter().map(|s| s.is_active()).collect();
            let n = active.iter().filter(|&&a| a).count();
            assert_eq!(active, spread(n), "pa={pa} sc={sc}");
        }
        assert_eq!(rom.sequence(pa, 3).iter().filter(|s| s.is_active()).count(), 8);
    }
}

#[test]
fn pwr2_only_sinks() {
    let rom = default_rom();
    for m in 1..=3i8 {
        for sign in [1, -1] {
            let sel = PatternSelector::new(sign * m).unwrap();
            for ep in 0..8 {
                for ec in 0..2 {
                    for ne in 0..2 {
                        assert_ne!(rom.resolve(sel, ep, ec, ne)[Electrode::Pwr2], Tri::Hi);
                    }
                }
            }
        }
    }
}

#[test]
fn rom_override_text_roundtrips() {
    let rom = default_rom();
    let again = rom.with_overrides(&rom.to_override_text()).unwrap();
    assert_eq!(&again, rom);
    assert!(rom.check().is_empty());
}
