use super::clock::draw_offset;
use super::scenario::{LabletSpec, Link, Scenario};
use crate::fsm::AUTORUN_TIMEOUT_TICKS;
use crate::program::LabletProgram;
use crate::trace::{TraceRecord, TraceSet};
use crate::variant::{Preset, VariantParams};

/// First tick of lablet `a` at which its frame disagrees with lablet `b`'s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairDivergence {
    pub a: usize,
    pub b: usize,
    pub tick: Option<u64>,
}

/// Compares lablet `i`'s frame held over each of its tick intervals with
/// lablet `j`'s latest frame at the interval midpoint.
pub fn first_divergence(trace: &TraceSet, i: usize, j: usize) -> Option<u64> {
    let ri: Vec<&TraceRecord> = trace.for_lablet(i).collect();
    let rj: Vec<&TraceRecord> = trace.for_lablet(j).collect();
    if rj.is_empty() {
        return None;
    }
    let mut p = 0;
    for w in ri.windows(2) {
        let mid = 0.5 * (w[0].time_s + w[1].time_s);
        while p + 1 < rj.len() && rj[p + 1].time_s <= mid {
            p += 1;
        }
        if rj[p].time_s <= mid && rj[p].frame != w[0].frame {
            return Some(w[0].tick);
        }
    }
    None
}

pub fn divergence_table(trace: &TraceSet) -> Vec<PairDivergence> {
    let n = trace.lablets;
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| PairDivergence {
            a,
            b,
            tick: first_divergence(trace, a, b),
        })
        .collect()
}

/// Skew prediction for two lablets running the same program, whose frames
/// change on every tick from tick `start` on and rest before it. Lablet
/// `i`'s tick `k` midpoint falls in lablet `j`'s tick
/// `m = floor((k + 1/2) T_i / T_j)`; the first `k` with `m != k` and either
/// side already running is the predicted disagreement.
pub fn predicted_divergence(period_i: f64, period_j: f64, start: u64, horizon: u64) -> Option<u64> {
    let r = period_i / period_j;
    (0..horizon).find(|&k| {
        let m = ((k as f64 + 0.5) * r).floor() as u64;
        m != k && k.max(m) >= start
    })
}

pub const ECL_EXPERIMENT_LABLETS: usize = 4;

/// Four identical id0 lablets with seeded ±1 % clock offsets, powered on
/// together and left to autorun their default program.
pub fn ecl_experiment(seed: u64) -> Scenario {
    let v = Preset::Id0.params();
    let lablets = (0..ECL_EXPERIMENT_LABLETS)
        .map(|i| LabletSpec::new(v.clone()).with_offset(draw_offset(seed, i, 0.01)))
        .collect();
    let duration = (AUTORUN_TIMEOUT_TICKS as f64 + 800.0) * v.nominal_period_s();
    let mut sc = Scenario::new(lablets, duration, seed);
    sc.jitter = 0.01;
    sc
}

/// Lablet 0 runs `program` and is coupled to idle lablet 1, optionally
/// disconnected at `disconnect_s`.
pub fn replication_scenario(
    variant: VariantParams,
    program: LabletProgram,
    duration_s: f64,
    disconnect_s: Option<f64>,
) -> Scenario {
    let a = LabletSpec::new(variant.clone())
        .with_program(program)
        .with_offset(0.0)
        .running();
    let b = LabletSpec::new(variant).with_offset(0.0);
    let mut sc = Scenario::new(vec![a, b], duration_s, 0);
    let mut link = Link::new(0, 1);
    if let Some(t) = disconnect_s {
        link.until_s = t;
    }
    sc.links.push(link);
    sc
}
