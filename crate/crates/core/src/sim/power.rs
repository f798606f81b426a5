use crate::pattern::{ActuationFrame, Tri};

/// Areal capacitance of the on-chip supercap, F/m².
pub const AREAL_CAPACITANCE: f64 = 0.85;
/// Supercap footprint: 100 µm × 100 µm.
pub const SUPERCAP_AREA_M2: f64 = 100e-6 * 100e-6;
pub const MAX_VOLTAGE: f64 = 1.8;
/// Drive level above which ECL emission occurs.
pub const ECL_THRESHOLD_V: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupercapModel {
    pub capacitance: f64,
    pub voltage: f64,
    pub leakage_current: f64,
    pub por_rising: f64,
    pub brownout_falling: f64,
    pub power_good: bool,
}

impl Default for SupercapModel {
    fn default() -> Self {
        SupercapModel::charged(1.0)
    }
}

impl SupercapModel {
    /// Default-sized supercap at `voltage`, power-good state from POR.
    pub fn charged(voltage: f64) -> Self {
        let mut cap = SupercapModel {
            capacitance: AREAL_CAPACITANCE * SUPERCAP_AREA_M2,
            voltage,
            leakage_current: 1.5e-9,
            por_rising: 0.30,
            brownout_falling: 0.25,
            power_good: false,
        };
        cap.power_good = voltage >= cap.por_rising;
        cap
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.capacitance > 0.0) {
            return Err("capacitance must be positive".into());
        }
        if !(0.0..=MAX_VOLTAGE).contains(&self.voltage) {
            return Err(format!("supercap voltage {} outside 0..{MAX_VOLTAGE} V", self.voltage));
        }
        if !(self.por_rising > self.brownout_falling) {
            return Err("POR level must exceed the brown-out level".into());
        }
        if self.leakage_current < 0.0 {
            return Err("leakage must be non-negative".into());
        }
        Ok(())
    }
}

/// One explicit integration step. `load_current` is the total drain,
/// leakage included.
pub fn power_step(cap: &SupercapModel, load_current: f64, charge_current: f64, dt: f64) -> SupercapModel {
    debug_assert!(dt > 0.0);
    let v = (cap.voltage + (charge_current - load_current) * dt / cap.capacitance).clamp(0.0, MAX_VOLTAGE);
    let power_good = if cap.power_good {
        v >= cap.brownout_falling
    } else {
        v >= cap.por_rising
    };
    SupercapModel {
        voltage: v,
        power_good,
        ..*cap
    }
}

/// Rectifying charger: current flows only while the source is above the cap.
pub fn charger_current(source_v: f64, cap_v: f64, series_ohms: f64) -> f64 {
    ((source_v - cap_v) / series_ohms).max(0.0)
}

/// Seconds for a constant drain to take the cap from its voltage to `target`.
pub fn discharge_time(cap: &SupercapModel, load_current: f64, target: f64) -> f64 {
    (cap.voltage - target) * cap.capacitance / load_current
}

/// Electrodes that emit light: driven high at a supply of at least 0.8 V.
pub fn ecl_mask(frame: &ActuationFrame, drive_voltage: f64) -> [bool; 6] {
    frame.0.map(|t| t == Tri::Hi && drive_voltage >= ECL_THRESHOLD_V)
}
