use std::io;

use vcd::{IdCode, TimescaleUnit, Value};

use super::{TraceError, TraceRecord, TraceSet};
use crate::pattern::{Electrode, Tri};

/// Six electrodes, two sensors and a 2-bit mode.
pub const VCD_SIGNALS_PER_LABLET: usize = 9;

fn tri(t: Tri) -> Value {
    match t {
        Tri::Lo => Value::V0,
        Tri::Hi => Value::V1,
        Tri::Z => Value::Z,
    }
}

fn level(b: bool) -> Value {
    if b {
        Value::V1
    } else {
        Value::V0
    }
}

type Sample = ([Value; 8], [Value; 2]);

fn sample(r: &TraceRecord) -> Sample {
    let mut s = [Value::X; 8];
    for (i, t) in r.frame.0.iter().enumerate() {
        s[i] = tri(*t);
    }
    s[6] = level(r.s0);
    s[7] = level(r.s1);
    let m = r.mode.code();
    (s, [level(m & 2 != 0), level(m & 1 != 0)])
}

/// Writes a value-change dump with one module per lablet, timescale 1 ms.
/// Timestamps are rounded to the nearest millisecond.
pub fn write_vcd<W: io::Write>(set: &TraceSet, w: W) -> Result<(), TraceError> {
    let mut out = vcd::Writer::new(w);
    out.timescale(1, TimescaleUnit::MS)?;
    out.add_module("lablets")?;
    let mut ids: Vec<(Vec<IdCode>, IdCode)> = Vec::with_capacity(set.lablets);
    for l in 0..set.lablets {
        out.add_module(&format!("lablet{l}"))?;
        let mut scalars = Vec::with_capacity(8);
        for e in Electrode::ALL {
            scalars.push(out.add_wire(1, &e.name().to_lowercase())?);
        }
        scalars.push(out.add_wire(1, "s0")?);
        scalars.push(out.add_wire(1, "s1")?);
        let mode = out.add_wire(2, "mode")?;
        out.upscope()?;
        ids.push((scalars, mode));
    }
    out.upscope()?;
    out.enddefinitions()?;

    let mut last: Vec<Option<Sample>> = vec![None; set.lablets];
    let mut now: Option<u64> = None;
    for r in &set.records {
        if r.lablet >= set.lablets {
            return Err(TraceError::Vcd(format!("lablet {} out of range", r.lablet)));
        }
        let ts = (r.time_s * 1000.0).round().max(0.0) as u64;
        if now.is_some_and(|n| ts < n) {
            return Err(TraceError::Vcd("timestamps go backwards".into()));
        }
        let cur = sample(r);
        let prev = last[r.lablet];
        if prev == Some(cur) {
            continue;
        }
        if now != Some(ts) {
            out.timestamp(ts)?;
            now = Some(ts);
        }
        let (scalars, mode) = &ids[r.lablet];
        for (k, id) in scalars.iter().enumerate() {
            if prev.is_none_or(|p| p.0[k] != cur.0[k]) {
                out.change_scalar(*id, cur.0[k])?;
            }
        }
        if prev.is_none_or(|p| p.1 != cur.1) {
            out.change_vector(*mode, cur.1)?;
        }
        last[r.lablet] = Some(cur);
    }
    out.flush()?;
    Ok(())
}
