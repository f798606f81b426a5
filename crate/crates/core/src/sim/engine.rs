use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::clock::{draw_offset, lablet_rng, ClockModel};
use super::power::{charger_current, ecl_mask, power_step, SupercapModel};
use super::scenario::{DockAction, Link, Scenario, StartMode};
use super::sensor::{sensor_bits, SensorChannel, StimulusTrack};
use super::SimError;
use crate::comm::{command_bits, encode_bits, frame_program, Command, Opcode};
use crate::exec::{par_map, Execution};
use crate::fsm::{LabletState, TickInputs};
use crate::pattern::{default_rom, ActuationFrame, Tri};
use crate::trace::{TraceRecord, TraceSet};

/// Stream key for channel bit flips, distinct from the clock-offset draw.
const FLIP_STREAM_KEY: u64 = 0xB17F_11B5;

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub trace: TraceSet,
    /// Controller state of every lablet after its last tick.
    pub finals: Vec<LabletState>,
    /// Clock offset ε used for each lablet.
    pub offsets: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct DockInterval {
    start: f64,
    end: f64,
    lines: [bool; 2],
}

/// Scenario data resolved once and shared read-only by all groups.
struct Prepared<'a> {
    sc: &'a Scenario,
    clocks: Vec<ClockModel>,
    inbound: Vec<Vec<Link>>,
    dock: Vec<Vec<DockInterval>>,
    sensors: Vec<[Option<&'a StimulusTrack>; 2]>,
}

fn prepare(sc: &Scenario) -> Result<Prepared<'_>, SimError> {
    sc.validate()?;
    let n = sc.lablets.len();
    let clocks = sc
        .lablets
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let eps = l.clock_offset.unwrap_or_else(|| draw_offset(sc.rng_seed, i, sc.jitter));
            ClockModel::new(l.variant.sysclk_hz as f64, eps).map_err(SimError::Invalid)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut inbound = vec![Vec::new(); n];
    for k in &sc.links {
        inbound[k.to].push(*k);
    }

    let mut dock = vec![Vec::new(); n];
    for entry in &sc.dock {
        for &t in &entry.targets {
            let v = &sc.lablets[t].variant;
            let bits: Vec<bool> = match &entry.action {
                DockAction::Command(c) => command_bits(*c).to_vec(),
                DockAction::Program {
                    program,
                    record,
                    target_id,
                } => {
                    let word = program.encode().map_err(|e| SimError::Invalid(e.to_string()))?;
                    let mut b = command_bits(Command::new(Opcode::Prog, *target_id)).to_vec();
                    b.extend(
                        frame_program(word, record.as_ref())
                            .map_err(|e| SimError::Invalid(e.to_string()))?,
                    );
                    b
                }
            };
            let wave = encode_bits(&bits, v).expect("dock payload is never empty");
            let tn = v.nominal_period_s();
            let mut at = 0u64;
            for seg in &wave.segments {
                let lines = wave.lines(seg.mark);
                if lines.iter().any(|&l| l) {
                    dock[t].push(DockInterval {
                        start: entry.time_s + at as f64 * tn,
                        end: entry.time_s + (at + seg.duration as u64) as f64 * tn,
                        lines,
                    });
                }
                at += seg.duration as u64;
            }
        }
    }
    for d in &mut dock {
        d.sort_by(|a, b| a.start.total_cmp(&b.start));
    }

    let mut sensors: Vec<[Option<&StimulusTrack>; 2]> = vec![[None; 2]; n];
    // channel-specific tracks take precedence over `both`
    for pass in [SensorChannel::Both, SensorChannel::S0] {
        for s in &sc.stimuli {
            match (pass, s.channel) {
                (SensorChannel::Both, SensorChannel::Both) => sensors[s.lablet] = [Some(s); 2],
                (SensorChannel::S0, SensorChannel::S0) => sensors[s.lablet][0] = Some(s),
                (SensorChannel::S0, SensorChannel::S1) => sensors[s.lablet][1] = Some(s),
                _ => {}
            }
        }
    }
    Ok(Prepared {
        sc,
        clocks,
        inbound,
        dock,
        sensors,
    })
}

/// Weakly connected components of the link graph, each sorted, ordered by
/// smallest member.
pub fn components(sc: &Scenario) -> Vec<Vec<usize>> {
    let n = sc.lablets.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for k in &sc.links {
        if k.from < n && k.to < n {
            let (a, b) = (find(&mut parent, k.from), find(&mut parent, k.to));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

struct Runner {
    state: LabletState,
    cap: SupercapModel,
    flips: Option<ChaCha8Rng>,
    dout: [Tri; 2],
    prev_frame: ActuationFrame,
    dock_cursor: usize,
    pending: Vec<String>,
    next_tick: u64,
}

fn run_group(p: &Prepared<'_>, members: &[usize]) -> (Vec<TraceRecord>, Vec<(usize, LabletState)>) {
    let sc = p.sc;
    let rom = default_rom();
    let mut runners: Vec<Option<Runner>> = (0..sc.lablets.len()).map(|_| None).collect();
    let mut heap = BinaryHeap::new();
    for &i in members {
        let spec = &sc.lablets[i];
        let mut state = LabletState::new(&spec.variant);
        if let Some(prog) = spec.program {
            state.prog = prog;
        }
        let mut pending = Vec::new();
        if spec.start == StartMode::Run {
            pending.extend(state.start(&spec.variant).iter().map(|e| e.kind.to_string()));
        }
        runners[i] = Some(Runner {
            state,
            cap: spec.power.supercap(),
            flips: (sc.bit_flip_prob > 0.0).then(|| lablet_rng(sc.rng_seed ^ FLIP_STREAM_KEY, i)),
            dout: [Tri::Z; 2],
            prev_frame: ActuationFrame::REST,
            dock_cursor: 0,
            pending,
            next_tick: 0,
        });
        heap.push(Reverse((0u64, i)));
    }

    let mut records = Vec::new();
    while let Some(Reverse((_, i))) = heap.pop() {
        let spec = &sc.lablets[i];
        let clock = p.clocks[i];
        let k = runners[i].as_ref().expect("member").next_tick;
        let t = clock.tick_time(k);

        let mut din = [false; 2];
        for link in &p.inbound[i] {
            if link.active_at(t) {
                let src = runners[link.from].as_ref().expect("same component").dout;
                din[0] |= src[0] == Tri::Hi;
                din[1] |= src[1] == Tri::Hi;
            }
        }

        let r = runners[i].as_mut().expect("member");
        let dock = &p.dock[i];
        while r.dock_cursor < dock.len() && dock[r.dock_cursor].end <= t {
            r.dock_cursor += 1;
        }
        for iv in dock[r.dock_cursor..].iter().take_while(|iv| iv.start <= t) {
            if t < iv.end {
                din[0] |= iv.lines[0];
                din[1] |= iv.lines[1];
            }
        }
        if let Some(rng) = r.flips.as_mut() {
            if rng.random::<f64>() < sc.bit_flip_prob {
                din[0] = !din[0];
            }
        }

        if k > 0 {
            let load = r.cap.leakage_current
                + spec.power.load_per_electrode_a * r.prev_frame.driven_count() as f64;
            let charge = spec
                .power
                .supply_v
                .map_or(0.0, |s| charger_current(s, r.cap.voltage, spec.power.charger_ohms));
            r.cap = power_step(&r.cap, load, charge, clock.period_s());
        }

        let mv = |track: Option<&StimulusTrack>| track.map_or(0.0, |s| s.value_at(t));
        let s0 = sensor_bits(mv(p.sensors[i][0])).0;
        let s1 = sensor_bits(mv(p.sensors[i][1])).1;
        let out = r.state.tick(
            &TickInputs {
                din,
                s0,
                s1,
                power_good: r.cap.power_good,
            },
            &spec.variant,
            rom,
        );
        r.dout = out.dout;
        r.prev_frame = out.frame;
        let mut events = std::mem::take(&mut r.pending);
        events.extend(out.events.iter().map(|e| e.kind.to_string()));
        records.push(TraceRecord {
            time_s: t,
            lablet: i,
            tick: k,
            mode: out.mode,
            phase: out.phase,
            frame: out.frame,
            s0,
            s1,
            vdd_mv: r.cap.voltage * 1000.0,
            ecl: ecl_mask(&out.frame, r.cap.voltage),
            events,
        });

        r.next_tick = k + 1;
        let next = clock.tick_time(k + 1);
        if next < sc.duration_s {
            heap.push(Reverse((next.to_bits(), i)));
        }
    }
    let finals = members
        .iter()
        .map(|&i| (i, runners[i].take().expect("member").state))
        .collect();
    (records, finals)
}

pub fn run(sc: &Scenario) -> Result<SimOutput, SimError> {
    run_with(sc, Execution::Parallel)
}

/// Runs the scenario. With [`Execution::Parallel`] each connected group of
/// lablets is simulated on its own worker; the merged trace is identical to
/// the sequential one.
pub fn run_with(sc: &Scenario, exec: Execution) -> Result<SimOutput, SimError> {
    let p = prepare(sc)?;
    let groups = match exec.effective() {
        Execution::Sequential => vec![(0..sc.lablets.len()).collect::<Vec<_>>()],
        Execution::Parallel => components(sc),
    };
    let results = par_map(exec, groups, |g| run_group(&p, &g));
    let mut records = Vec::new();
    let mut finals: Vec<Option<LabletState>> = vec![None; sc.lablets.len()];
    for (recs, fin) in results {
        records.extend(recs);
        for (i, s) in fin {
            finals[i] = Some(s);
        }
    }
    records.sort_by(|a, b| a.time_s.total_cmp(&b.time_s).then(a.lablet.cmp(&b.lablet)));
    Ok(SimOutput {
        trace: TraceSet {
            lablets: sc.lablets.len(),
            records,
        },
        finals: finals.into_iter().map(|s| s.expect("every lablet simulated")).collect(),
        offsets: p.clocks.iter().map(|c| c.epsilon).collect(),
    })
}
