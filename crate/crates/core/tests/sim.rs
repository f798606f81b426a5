use lablet::exec::{with_threads, Execution};
use lablet::sim::{self, components, ecl_mask, run_with, LabletSpec, Link, Scenario};
use lablet::trace::{write_vcd, TraceSet, VCD_SIGNALS_PER_LABLET};
use lablet::variant::Preset;
use lablet::Mode;

const SCENARIO: &str = r#"
duration_s = 8.0
rng_seed = 7
jitter = 0.05
bit_flip_prob = 0.0005

[[lablet]]
variant = "id0"
start = "run"
program = """
global rep=1 dat=0 tim=0
phase 1: pa=6 sc=3 se=1 next=2 send=1
phase 2: pa=3 sc=1 next=2
"""

[[lablet]]
variant = { base = "id0", pulsethreshold = 4 }

[[lablet]]
variant = "id4"
supply_v = 1.0

[[link]]
from = 0
to = 1

[[stimulus]]
lablet = 0
channel = "s1"
points = [[0.0, 0.0], [1.0, 100.0]]

[[dock]]
time_s = 0.5
targets = [2]
command = "RUN"
"#;

#[test]
fn toml_scenario_runs() {
    let sc = Scenario::from_toml(SCENARIO).unwrap();
    assert_eq!(sc.lablets.len(), 3);
    assert_eq!(components(&sc), vec![vec![0, 1], vec![2]]);
    let out = sim::run(&sc).unwrap();
    assert!(out.trace.is_ordered());
    // id4 ticks at 20(1+ε) Hz for 8 s
    let period = 1.0 / (20.0 * (1.0 + out.offsets[2]));
    let expect = (0..).take_while(|&k| k as f64 * period < 8.0).count();
    assert_eq!(out.trace.for_lablet(2).count(), expect);
    assert!(out.trace.for_lablet(2).any(|r| r.mode == Mode::Run));
    // lablet 0 fires at its first loop boundary and programs its neighbour
    assert!(out.trace.for_lablet(1).any(|r| r.events.iter().any(|e| e.starts_with("program_loaded"))));
    assert_eq!(out.finals[1].prog, out.finals[0].prog);
}

#[test]
fn bad_scenarios_are_rejected() {
    assert!(Scenario::from_toml("duration_s = 1.0\n[[lablet]]\nvariant = \"id9\"").is_err());
    let mut sc = Scenario::new(vec![LabletSpec::new(Preset::Id0.params())], 1.0, 0);
    sc.links.push(Link::new(0, 3));
    assert!(sc.validate().is_err());
}

#[test]
fn parallel_matches_sequential() {
    let sc = Scenario::from_toml(SCENARIO).unwrap();
    let seq = run_with(&sc, Execution::Sequential).unwrap().trace.to_csv_string();
    for threads in [1, 3] {
        let par = with_threads(Some(threads), || run_with(&sc, Execution::Parallel)).unwrap();
        assert_eq!(par.trace.to_csv_string(), seq);
    }
}

#[test]
fn ecl_only_where_driven_high() {
    let out = sim::run(&Scenario::from_toml(SCENARIO).unwrap()).unwrap();
    for r in &out.trace.records {
        assert_eq!(r.ecl, ecl_mask(&r.frame, r.vdd_mv / 1000.0));
    }
}

#[test]
fn csv_roundtrips() {
    let out = sim::run(&Scenario::from_toml(SCENARIO).unwrap()).unwrap();
    let text = out.trace.to_csv_string();
    let back = TraceSet::read_csv(text.as_bytes()).unwrap();
    assert_eq!(back.to_csv_string(), text);
    assert!(TraceSet::read_csv("nonsense\n1,2\n".as_bytes()).is_err());
}

#[test]
fn vcd_declares_every_lablet() {
    let out = sim::run(&Scenario::from_toml(SCENARIO).unwrap()).unwrap();
    let mut buf = Vec::new();
    write_vcd(&out.trace, &mut buf).unwrap();
    let mut parser = vcd::Parser::new(&buf[..]);
    let header = parser.parse_header().unwrap();
    assert_eq!(header.timescale, Some((1, vcd::TimescaleUnit::MS)));
    let mut vars = 0;
    let mut scopes = 0;
    fn walk(items: &[vcd::ScopeItem], vars: &mut usize, scopes: &mut usize) {
        for it in items {
            match it {
                vcd::ScopeItem::Scope(s) => {
                    if s.identifier.starts_with("lablet") && s.identifier != "lablets" {
                        *scopes += 1;
                    }
                    walk(&s.items, vars, scopes);
                }
                vcd::ScopeItem::Var(_) => *vars += 1,
                _ => {}
            }
        }
    }
    walk(&header.items, &mut vars, &mut scopes);
    assert_eq!(scopes, 3);
    assert_eq!(vars, 3 * VCD_SIGNALS_PER_LABLET);
    assert!(parser.count() > 0);
}
