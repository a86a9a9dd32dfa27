use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use reachgame::coalition::{Analysis, Coalition};
use reachgame::geometry::{CanonicalFrame, Point3};
use reachgame::io::config::load_config;
use reachgame::io::fmt_num;
use reachgame::io::mesh::{export_mesh, MeshFrame};
use reachgame::io::sweep::{agrees, sweep, SweepParams};
use reachgame::sim::{run_straight_line_escape_observed, SimStatus};
use reachgame::{escape_margin_supremum, Error, GameConfig, OracleParams};

const EXIT_USAGE: u8 = 1;
const EXIT_DISAGREE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(name = "reachgame")]
#[command(about = "Winner prediction and barrier surfaces for 3D reach-avoid pursuit games")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Decide which team wins from the initial positions
    Classify {
        #[arg(long)]
        config: PathBuf,
        /// Absolute band around the barrier reported as on_barrier
        #[arg(long, default_value_t = reachgame::DEFAULT_BAND)]
        band: f64,
        /// Cross-check against the numeric oracle (exit 2 on disagreement)
        #[arg(long)]
        oracle: bool,
    },
    /// Export the barrier as a JSON mesh (and optionally OBJ)
    Barrier {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        obj: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
        /// Coordinate frame of the exported vertices: raw or canonical
        #[arg(long, default_value = "raw")]
        frame: MeshFrame,
    },
    /// Numeric supremum of the escape margin over the target plane
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Half-width of the searched square (default: automatic)
        #[arg(long)]
        extent: Option<f64>,
    },
    /// Simulate a straight-line escape and dump the trajectories as CSV
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dt: f64,
        /// Target on the plane as canonical `x,y` (default: oracle witness)
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        target: Option<(f64, f64)>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomized verdict/oracle/simulation cross-check
    Sweep {
        #[arg(long)]
        n: usize,
        /// Inclusive pursuer count range `A..B`
        #[arg(long, value_parser = parse_range)]
        pursuers: (usize, usize),
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Oracle dead band for agreement
        #[arg(long, default_value_t = 1e-3)]
        band: f64,
        /// Straight-line trials per pursuer-win configuration (0 skips simulation)
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
    },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected x,y")?;
    let x = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((x, y))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let lo = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let hi = b
        .trim()
        .trim_start_matches('=')
        .parse::<usize>()
        .map_err(|e| e.to_string())?;
    if lo == 0 || lo > hi {
        return Err(format!("need 1 <= A <= B, got {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn fmt_point(p: Point3) -> String {
    format!("{} {} {}", fmt_num(p.x), fmt_num(p.y), fmt_num(p.z))
}

fn coalition_label(c: Option<Coalition>) -> String {
    match c {
        None => "none".into(),
        Some(Coalition::Single(i)) => format!("single {i}"),
        Some(Coalition::Pair(i, j)) => format!("pair {i} {j}"),
        Some(Coalition::Triple(i, j, k)) => format!("triple {i} {j} {k}"),
    }
}

fn evader_of(cfg: &GameConfig) -> anyhow::Result<Point3> {
    cfg.evader.context("config has no evader")
}

fn classify(config: PathBuf, band: f64, oracle: bool) -> anyhow::Result<u8> {
    let (cfg, frame) = load_config(&config)?;
    let evader = evader_of(&cfg)?;
    let analysis = Analysis::new(&cfg.pursuers)?;
    let verdict = analysis.verdict(evader, band)?;
    let active: Vec<String> = analysis
        .coalitions()
        .active
        .iter()
        .map(|i| i.to_string())
        .collect();
    println!("verdict: {}", verdict.kind);
    println!("margin: {}", fmt_num(verdict.margin));
    println!("coalition: {}", coalition_label(verdict.source));
    println!("active: {}", active.join(" "));
    if !oracle {
        return Ok(0);
    }
    let report = escape_margin_supremum(evader, &cfg.pursuers, &OracleParams::default())?;
    let agree = agrees(&verdict, &report, 1e-3);
    println!("oracle_supremum: {}", fmt_num(report.supremum));
    println!(
        "oracle_witness: {}",
        fmt_point(frame.from_canonical(report.witness))
    );
    println!("oracle_resolved: {}", report.resolved);
    println!("agree: {agree}");
    Ok(if agree { 0 } else { EXIT_DISAGREE })
}

fn barrier(
    config: PathBuf,
    out: PathBuf,
    obj: Option<PathBuf>,
    resolution: usize,
    frame: MeshFrame,
) -> anyhow::Result<u8> {
    let (cfg, to_raw) = load_config(&config)?;
    let pieces = Analysis::new(&cfg.pursuers)?.pieces()?;
    let mesh = export_mesh(&pieces, resolution, frame, &to_raw)?;
    fs::write(&out, mesh.to_json()).with_context(|| format!("writing {}", out.display()))?;
    if let Some(path) = obj {
        fs::write(&path, mesh.to_obj()).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("pieces: {}", pieces.len());
    println!("vertices: {}", mesh.vertices.len());
    println!("faces: {}", mesh.faces.len());
    Ok(0)
}

fn oracle(config: PathBuf, grid: usize, extent: Option<f64>) -> anyhow::Result<u8> {
    let (cfg, frame) = load_config(&config)?;
    let params = OracleParams {
        grid,
        extent,
        ..OracleParams::default()
    };
    let report = escape_margin_supremum(evader_of(&cfg)?, &cfg.pursuers, &params)?;
    println!("supremum: {}", fmt_num(report.supremum));
    println!(
        "witness: {}",
        fmt_point(frame.from_canonical(report.witness))
    );
    println!("witness_canonical: {}", fmt_point(report.witness));
    println!("resolved: {}", report.resolved);
    println!("extent: {}", fmt_num(report.extent));
    Ok(0)
}

fn write_rows(
    out: &mut impl Write,
    frame: &CanonicalFrame,
    s: &reachgame::SimState,
) -> std::io::Result<()> {
    let t = fmt_num(s.time);
    let e = frame.from_canonical(s.evader);
    writeln!(
        out,
        "{t},E,{},{},{}",
        fmt_num(e.x),
        fmt_num(e.y),
        fmt_num(e.z)
    )?;
    for (i, p) in s.pursuers.iter().enumerate() {
        let p = frame.from_canonical(*p);
        writeln!(
            out,
            "{t},P{},{},{},{}",
            i + 1,
            fmt_num(p.x),
            fmt_num(p.y),
            fmt_num(p.z)
        )?;
    }
    Ok(())
}

fn simulate(
    config: PathBuf,
    dt: f64,
    target: Option<(f64, f64)>,
    out: PathBuf,
) -> anyhow::Result<u8> {
    let (cfg, frame) = load_config(&config)?;
    let target = match target {
        Some((x, y)) => Point3::new(x, y, 0.0),
        None => {
            escape_margin_supremum(evader_of(&cfg)?, &cfg.pursuers, &OracleParams::default())?
                .witness
        }
    };
    let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "time,player,x,y,z")?;
    let mut io_err = None;
    let end = run_straight_line_escape_observed(&cfg, target, dt, |s| {
        if io_err.is_none() {
            io_err = write_rows(&mut w, &frame, s).err();
        }
    })?;
    if let Some(e) = io_err {
        return Err(e).context("writing trajectory");
    }
    w.flush()?;
    match end.status {
        SimStatus::Captured { time, pursuer } => {
            println!("status: captured");
            println!("time: {}", fmt_num(time));
            println!("pursuer: {pursuer}");
        }
        SimStatus::Escaped { time, crossing } => {
            println!("status: escaped");
            println!("time: {}", fmt_num(time));
            println!("crossing: {}", fmt_point(frame.from_canonical(crossing)));
            println!("clearance: {}", fmt_num(end.clearance()));
        }
        SimStatus::Running => println!("status: timeout"),
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    n: usize,
    pursuers: (usize, usize),
    seed: u64,
    out: PathBuf,
    band: f64,
    trials: usize,
    dt: f64,
) -> anyhow::Result<u8> {
    if dt.is_nan() || dt <= 0.0 {
        bail!("--dt must be positive");
    }
    let params = SweepParams {
        n_configs: n,
        pursuers: pursuers.0..=pursuers.1,
        seed,
        band,
        trials,
        dt,
        ..SweepParams::default()
    };
    let report = sweep(&params)?;
    fs::write(&out, report.to_csv()).with_context(|| format!("writing {}", out.display()))?;
    let bad = report.disagreements();
    let failed = report.sim_failures();
    println!("configs: {}", report.rows.len());
    println!("disagreements: {bad}");
    println!("sim_failures: {failed}");
    Ok(if bad + failed > 0 { EXIT_DISAGREE } else { 0 })
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Commands::Classify {
            config,
            band,
            oracle,
        } => classify(config, band, oracle),
        Commands::Barrier {
            config,
            out,
            obj,
            resolution,
            frame,
        } => barrier(config, out, obj, resolution, frame),
        Commands::Oracle {
            config,
            grid,
            extent,
        } => oracle(config, grid, extent),
        Commands::Simulate {
            config,
            dt,
            target,
            out,
        } => simulate(config, dt, target, out),
        Commands::Sweep {
            n,
            pursuers,
            seed,
            out,
            band,
            trials,
            dt,
        } => run_sweep(n, pursuers, seed, out, band, trials, dt),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let degenerate = matches!(
                e.downcast_ref::<Error>(),
                Some(Error::DegenerateConfiguration(_))
            );
            ExitCode::from(if degenerate {
                EXIT_DEGENERATE
            } else {
                EXIT_USAGE
            })
        }
    }
}
