use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use lablet::exec::{with_threads, Execution};
use lablet::program::{assemble, disassemble, encode, validate, ProgramWord};
use lablet::sim::{
    self, divergence_table, draw_offset, ecl_experiment, predicted_divergence, LabletSpec, Scenario,
    StimulusTrack,
};
use lablet::trace::{write_vcd, TraceSet};
use lablet::variant::{parse_program, VariantParams};

#[derive(Parser)]
#[command(name = "lablet", version, about = "Lablet controller emulator and array simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Assemble a program file and print its hex word.
    Asm {
        file: PathBuf,
        /// Variant the program is checked against.
        #[arg(long, default_value = "id0")]
        variant: String,
    },
    /// Print the assembly for a hex word.
    Disasm { hex: String },
    /// Simulate one lablet.
    Run(RunArgs),
    /// Simulate a scenario file and summarise pairwise divergence.
    Array {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        vcd: bool,
    },
    /// Four id0 lablets with seeded ±1 % clocks, powered on together.
    Ecl {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a trace CSV into a value change dump.
    ExportVcd {
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Preset (id0..id4) or TOML variant file.
    #[arg(long, default_value = "id0")]
    variant: String,
    /// Hex word, assembly text, or a file holding either.
    #[arg(long)]
    program: Option<String>,
    /// CSV of `time_s,mv[,channel]` rows.
    #[arg(long)]
    stimuli: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    ticks: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Clock offset range; 0 keeps ticks on the nominal grid.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, value_enum, default_value_t = Start::Run)]
    start: Start,
    /// Run from the supercap alone.
    #[arg(long)]
    undocked: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    vcd: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Start {
    Idle,
    Run,
}

fn load_variant(arg: &str) -> Result<VariantParams> {
    if let Ok(v) = VariantParams::preset(arg) {
        return Ok(v);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("`{arg}` is neither a preset nor a readable file"))?;
    Ok(VariantParams::from_toml(&text)?)
}

fn load_program(arg: &str) -> Result<lablet::LabletProgram> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    } else {
        arg.to_string()
    };
    parse_program(&text).map_err(|e| anyhow::anyhow!("program: {e}"))
}

fn check_program(prog: &lablet::LabletProgram, v: &VariantParams) -> Result<()> {
    let d = validate(prog, v);
    for w in d.warnings() {
        eprintln!("{w}");
    }
    if d.has_errors() {
        for e in d.errors() {
            eprintln!("{e}");
        }
        bail!("program is not valid for this variant");
    }
    Ok(())
}

fn write_trace(set: &TraceSet, path: &Path) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    set.write_csv(BufWriter::new(f))?;
    Ok(())
}

fn write_vcd_file(set: &TraceSet, path: &Path) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    write_vcd(set, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_asm(file: &Path, variant: &str) -> Result<()> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let prog = assemble(&text)?;
    check_program(&prog, &load_variant(variant)?)?;
    println!("{}", encode(&prog)?);
    Ok(())
}

fn cmd_disasm(hex: &str) -> Result<()> {
    let word: ProgramWord = hex.parse()?;
    print!("{}", disassemble(&word.decode()));
    Ok(())
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    if a.ticks == 0 {
        bail!("--ticks must be positive");
    }
    let v = load_variant(&a.variant)?;
    let eps = draw_offset(a.seed, 0, a.jitter);
    let mut spec = LabletSpec::new(v.clone()).with_offset(eps);
    if let Some(p) = &a.program {
        let prog = load_program(p)?;
        check_program(&prog, &v)?;
        spec = spec.with_program(prog);
    }
    if matches!(a.start, Start::Run) {
        spec = spec.running();
    }
    if a.undocked {
        spec.power.supply_v = None;
    }
    // half a period short of the last tick keeps the count exact
    let duration = (a.ticks as f64 - 0.5) * v.nominal_period_s() / (1.0 + eps);
    let mut sc = Scenario::new(vec![spec], duration, a.seed);
    sc.jitter = a.jitter;
    if let Some(path) = &a.stimuli {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        sc.stimuli = StimulusTrack::from_csv(&text, 0).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    }
    let out = sim::run(&sc)?;
    fs::create_dir_all(&a.out)?;
    write_trace(&out.trace, &a.out.join("trace.csv"))?;
    if a.vcd {
        write_vcd_file(&out.trace, &a.out.join("trace.vcd"))?;
    }
    eprintln!("{} ticks written to {}", out.trace.records.len(), a.out.display());
    Ok(())
}

fn only(set: &TraceSet, lablet: usize) -> TraceSet {
    TraceSet {
        lablets: set.lablets,
        records: set.for_lablet(lablet).cloned().collect(),
    }
}

fn write_divergence(out: &sim::SimOutput, dir: &Path, predict: Option<(f64, u64)>) -> Result<()> {
    let mut csv = String::from(if predict.is_some() { "a,b,tick,predicted\n" } else { "a,b,tick\n" });
    println!("pair  first divergence{}", if predict.is_some() { "  predicted" } else { "" });
    for d in divergence_table(&out.trace) {
        let tick = d.tick.map_or(String::from("none"), |t| t.to_string());
        let pred = predict.map(|(base, start)| {
            let p = |i: usize| base / (1.0 + out.offsets[i]);
            let horizon = (out.trace.for_lablet(d.a).count() as u64).saturating_sub(1);
            predicted_divergence(p(d.a), p(d.b), start, horizon).map_or(String::from("none"), |t| t.to_string())
        });
        match &pred {
            Some(p) => {
                csv.push_str(&format!("{},{},{tick},{p}\n", d.a, d.b));
                println!("{}-{}   {tick:>16}  {p:>9}", d.a, d.b);
            }
            None => {
                csv.push_str(&format!("{},{},{tick}\n", d.a, d.b));
                println!("{}-{}   {tick:>16}", d.a, d.b);
            }
        }
    }
    fs::write(dir.join("divergence.csv"), csv)?;
    Ok(())
}

fn write_outputs(out: &sim::SimOutput, dir: &Path, vcd: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_trace(&out.trace, &dir.join("trace.csv"))?;
    for i in 0..out.trace.lablets {
        write_trace(&only(&out.trace, i), &dir.join(format!("lablet{i}.csv")))?;
    }
    if vcd {
        write_vcd_file(&out.trace, &dir.join("trace.vcd"))?;
    }
    Ok(())
}

fn cmd_array(scenario: &Path, dir: &Path, threads: Option<usize>, sequential: bool, vcd: bool) -> Result<()> {
    let text = fs::read_to_string(scenario).with_context(|| format!("reading {}", scenario.display()))?;
    let sc = Scenario::from_toml(&text)?;
    let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
    let out = with_threads(threads, || sim::run_with(&sc, exec))?;
    write_outputs(&out, dir, vcd)?;
    write_divergence(&out, dir, None)
}

fn cmd_ecl(seed: u64, dir: &Path) -> Result<()> {
    let sc = ecl_experiment(seed);
    let out = sim::run(&sc)?;
    write_outputs(&out, dir, false)?;
    // one row per tick and lablet, one column per electrode, for plotting
    let mut csv = String::from("time_s,lablet,a0,do,a2,di,a1,pwr2\n");
    for r in &out.trace.records {
        let bits: Vec<&str> = r.ecl.iter().map(|&b| if b { "1" } else { "0" }).collect();
        csv.push_str(&format!("{:.9},{},{}\n", r.time_s, r.lablet, bits.join(",")));
    }
    fs::write(dir.join("ecl.csv"), csv)?;
    let v = &sc.lablets[0].variant;
    write_divergence(&out, dir, Some((v.nominal_period_s(), lablet::fsm::AUTORUN_TIMEOUT_TICKS as u64)))
}

fn cmd_export_vcd(trace: &Path, out: Option<&Path>) -> Result<()> {
    let f = File::open(trace).with_context(|| format!("opening {}", trace.display()))?;
    let set = TraceSet::read_csv(f).with_context(|| format!("reading {}", trace.display()))?;
    let path = out.map_or_else(|| trace.with_extension("vcd"), Path::to_path_buf);
    write_vcd_file(&set, &path)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Asm { file, variant } => cmd_asm(file, variant),
        Cmd::Disasm { hex } => cmd_disasm(hex),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Array {
            scenario,
            out,
            threads,
            sequential,
            vcd,
        } => cmd_array(scenario, out, *threads, *sequential, *vcd),
        Cmd::Ecl { seed, out } => cmd_ecl(*seed, out),
        Cmd::ExportVcd { trace, out } => cmd_export_vcd(trace, out.as_deref()),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
