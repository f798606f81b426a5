use std::str::FromStr;

use serde::Deserialize;

pub const S0_THRESHOLD_MV: f64 = -15.0;
pub const S1_THRESHOLD_MV: f64 = 85.0;

/// Comparator outputs for an ISFET-REFET potential difference.
pub fn sensor_bits(delta_mv: f64) -> (bool, bool) {
    (delta_mv >= S0_THRESHOLD_MV, delta_mv >= S1_THRESHOLD_MV)
}

/// Nernst slope used to author pH stimuli.
pub fn mv_per_ph() -> f64 {
    59.0
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorChannel {
    #[default]
    Both,
    S0,
    S1,
}

impl FromStr for SensorChannel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "both" => Ok(SensorChannel::Both),
            "s0" => Ok(SensorChannel::S0),
            "s1" => Ok(SensorChannel::S1),
            other => Err(format!("unknown sensor channel `{other}`")),
        }
    }
}

/// Piecewise-constant potential applied to one lablet's comparators.
#[derive(Debug, Clone, PartialEq)]
pub struct StimulusTrack {
    pub lablet: usize,
    pub channel: SensorChannel,
    /// `(time_s, mv)`, times strictly increasing.
    pub points: Vec<(f64, f64)>,
}

impl StimulusTrack {
    pub fn new(lablet: usize, channel: SensorChannel, points: Vec<(f64, f64)>) -> Result<Self, String> {
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err("stimulus values must be finite".into());
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err("stimulus times must be strictly increasing".into());
        }
        Ok(StimulusTrack {
            lablet,
            channel,
            points,
        })
    }

    /// Value at `t`; 0 mV before the first point.
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.points.partition_point(|p| p.0 <= t);
        if n == 0 {
            0.0
        } else {
            self.points[n - 1].1
        }
    }

    /// Linear ramp in `steps` equal stairs from `mv0` at `t0` to `mv1` at `t1`.
    pub fn ramp(lablet: usize, channel: SensorChannel, t0: f64, t1: f64, mv0: f64, mv1: f64, steps: usize) -> Self {
        let steps = steps.max(1);
        let points = (0..=steps)
            .map(|i| {
                let f = i as f64 / steps as f64;
                (t0 + f * (t1 - t0), mv0 + f * (mv1 - mv0))
            })
            .collect();
        StimulusTrack::new(lablet, channel, points).expect("ramp times increase")
    }

    /// Parses `time_s,mv[,channel]` rows (header optional) into tracks for
    /// one lablet, one track per channel present.
    pub fn from_csv(text: &str, lablet: usize) -> Result<Vec<StimulusTrack>, String> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut by_channel: Vec<(SensorChannel, Vec<(f64, f64)>)> = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| e.to_string())?;
            if i == 0 && row.get(0).is_some_and(|c| c.parse::<f64>().is_err()) {
                continue;
            }
            let line = row.position().map_or(i + 1, |p| p.line() as usize);
            let num = |k: usize| -> Result<f64, String> {
                row.get(k)
                    .ok_or_else(|| format!("line {line}: missing column {}", k + 1))?
                    .parse::<f64>()
                    .map_err(|_| format!("line {line}: bad number `{}`", &row[k]))
            };
            let (t, mv) = (num(0)?, num(1)?);
            let ch = match row.get(2) {
                Some(c) if !c.is_empty() => c.parse().map_err(|e| format!("line {line}: {e}"))?,
                _ => SensorChannel::Both,
            };
            match by_channel.iter_mut().find(|(c, _)| *c == ch) {
                Some((_, pts)) => pts.push((t, mv)),
                None => by_channel.push((ch, vec![(t, mv)])),
            }
        }
        by_channel
            .into_iter()
            .map(|(ch, pts)| StimulusTrack::new(lablet, ch, pts))
            .collect()
    }
}
