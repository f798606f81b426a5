//! Per-tick trace records, the CSV trace format and waveform-dump export.
//!
//! CSV columns, in order:
//! `time_s,lablet,mode,phase,a0,do,a2,di,a1,pwr2,s0,s1,vdd_mv,ecl_mask,event`.
//! Electrode columns hold `0`, `1` or `Z`; `ecl_mask` is six `0/1` characters
//! in electrode order; `event` joins `kind[:payload]` entries with `;`.

mod vcd_export;

pub use vcd_export::{write_vcd, VCD_SIGNALS_PER_LABLET};

use std::io;

use thiserror::Error;

use crate::fsm::Mode;
use crate::pattern::ActuationFrame;

pub const CSV_COLUMNS: [&str; 15] = [
    "time_s", "lablet", "mode", "phase", "a0", "do", "a2", "di", "a1", "pwr2", "s0", "s1",
    "vdd_mv", "ecl_mask", "event",
];

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace I/O: {0}")]
    Io(#[from] io::Error),
    #[error("trace CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("waveform dump: {0}")]
    Vcd(String),
}

/// State of one lablet after one of its ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time_s: f64,
    pub lablet: usize,
    /// Tick index of this lablet (not serialized; recovered by counting).
    pub tick: u64,
    pub mode: Mode,
    pub phase: u8,
    pub frame: ActuationFrame,
    pub s0: bool,
    pub s1: bool,
    pub vdd_mv: f64,
    pub ecl: [bool; 6],
    pub events: Vec<String>,
}

/// Records ordered by time, ties by lablet index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceSet {
    pub lablets: usize,
    pub records: Vec<TraceRecord>,
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

impl TraceSet {
    pub fn for_lablet(&self, idx: usize) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(move |r| r.lablet == idx)
    }

    pub fn is_ordered(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| (w[0].time_s, w[0].lablet) < (w[1].time_s, w[1].lablet))
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), TraceError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_COLUMNS)?;
        for r in &self.records {
            let time = format!("{:.9}", r.time_s);
            let lablet = r.lablet.to_string();
            let phase = r.phase.to_string();
            let drives: Vec<String> = r.frame.0.iter().map(|t| t.as_char().to_string()).collect();
            let vdd = format!("{:.1}", r.vdd_mv);
            let ecl: String = r.ecl.iter().map(|&b| bit(b)).collect();
            let events = r.events.join(";");
            let mut row: Vec<&str> = vec![&time, &lablet, r.mode.name(), &phase];
            row.extend(drives.iter().map(String::as_str));
            row.extend([bit(r.s0), bit(r.s1), &vdd, &ecl, &events]);
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("trace is ASCII")
    }

    pub fn read_csv<R: io::Read>(r: R) -> Result<TraceSet, TraceError> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().ne(CSV_COLUMNS) {
            return Err(TraceError::Malformed {
                row: 0,
                message: format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
            });
        }
        let mut set = TraceSet::default();
        let mut ticks: Vec<u64> = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            let bad = |message: String| TraceError::Malformed { row: i + 1, message };
            let num = |k: usize| -> Result<f64, TraceError> {
                row[k].parse::<f64>().map_err(|_| bad(format!("bad number `{}`", &row[k])))
            };
            let flag = |k: usize| match &row[k] {
                "0" => Ok(false),
                "1" => Ok(true),
                s => Err(bad(format!("bad flag `{s}` in {}", CSV_COLUMNS[k]))),
            };
            let lablet: usize = row[1].parse().map_err(|_| bad(format!("bad lablet `{}`", &row[1])))?;
            let frame = (4..10)
                .map(|k| &row[k])
                .collect::<String>()
                .parse::<ActuationFrame>()
                .map_err(|e| bad(e.to_string()))?;
            let ecl_s = &row[13];
            if ecl_s.len() != 6 || !ecl_s.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(bad(format!("bad ecl_mask `{ecl_s}`")));
            }
            let mut ecl = [false; 6];
            for (e, b) in ecl.iter_mut().zip(ecl_s.bytes()) {
                *e = b == b'1';
            }
            if ticks.len() <= lablet {
                ticks.resize(lablet + 1, 0);
            }
            let rec = TraceRecord {
                time_s: num(0)?,
                lablet,
                tick: ticks[lablet],
                mode: row[2].parse().map_err(bad)?,
                phase: row[3].parse().map_err(|_| bad(format!("bad phase `{}`", &row[3])))?,
                frame,
                s0: flag(10)?,
                s1: flag(11)?,
                vdd_mv: num(12)?,
                ecl,
                events: if row[14].is_empty() {
                    Vec::new()
                } else {
                    row[14].split(';').map(str::to_string).collect()
                },
            };
            ticks[lablet] += 1;
            if let Some(prev) = set.records.last() {
                if rec.time_s < prev.time_s {
                    return Err(bad("timestamps go backwards".into()));
                }
            }
            set.lablets = set.lablets.max(lablet + 1);
            set.records.push(rec);
        }
        Ok(set)
    }
}
