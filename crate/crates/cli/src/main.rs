//! `brainsteer`: batch runs, comparisons, control-surface dumps and the
//! interactive session server.

mod overrides;
mod serve;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use brainsteer::experiment::{
    compare, export, render_table, rows_csv, run_with_driver, sweep_seeds, write_atomic,
    DriverSource, ExportPaths, Mode, RunResult, Schedule,
};
use brainsteer::{LookupTable, RunConfig};
use clap::{Args, Parser, Subcommand};

use overrides::ConfigArgs;

#[derive(Parser)]
#[command(
    name = "brainsteer",
    version,
    about = "Shared steering control for a BCI-driven vehicle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one lap and export trajectory, commands, metrics and plot.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Replay a recorded command schedule instead of the driver model.
        #[arg(long, value_name = "CSV")]
        schedule: Option<PathBuf>,
    },
    /// Run two modes under the same driver and seed and tabulate the metrics.
    Compare {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "brain-only")]
        a: Mode,
        #[arg(long, default_value = "shared-threshold")]
        b: Mode,
        /// Also sweep these seeds for both modes, e.g. `0..20` or `1,5,9`.
        #[arg(long, value_parser = parse_seeds)]
        seeds: Option<Seeds>,
    },
    /// Dump the fuzzy control surface u(e, de) as CSV.
    Surface {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Write the track centreline and edges as CSV.
    Track {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Arc-length spacing of the points, metres.
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the effective configuration as TOML.
    Config {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Serve interactive sessions over WebSocket, or one session over stdio.
    Serve(serve::ServeArgs),
}

#[derive(Args)]
struct SurfaceArgs {
    /// Grid points per axis.
    #[arg(long, default_value_t = 41)]
    size: usize,
    /// Evaluate the controller itself rather than the interpolated table.
    #[arg(long)]
    exact: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|e| format!("bad range start: {e}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|e| format!("bad range end: {e}"))?;
        (a..b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|e| format!("bad seed {x:?}: {e}")))
            .collect::<Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err("no seeds".into());
    }
    Ok(Seeds(seeds))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { cfg, schedule } => run(&cfg.resolve()?, schedule.as_deref()),
        Command::Compare { cfg, a, b, seeds } => run_compare(&cfg.resolve()?, a, b, seeds),
        Command::Surface { cfg, surface } => run_surface(&cfg.resolve()?, &surface),
        Command::Track {
            cfg,
            spacing,
            output,
        } => {
            let cfg = cfg.resolve()?;
            if !(spacing > 0.0) {
                bail!("--spacing must be positive");
            }
            let mut buf = Vec::new();
            cfg.track.write_polyline(spacing, &mut buf)?;
            emit(output.as_deref(), &buf)
        }
        Command::Config { cfg } => {
            print!("{}", cfg.resolve()?.to_toml_string());
            Ok(())
        }
        Command::Serve(args) => serve::serve(args),
    }
}

fn paths(cfg: &RunConfig, name: &str) -> ExportPaths {
    ExportPaths::new(&cfg.output.dir, name)
}

fn summary(r: &RunResult) -> String {
    let m = &r.metrics;
    format!(
        "{:?} after {:.2} s: max|e| {:.4} m, rms {:.4} m, regulations {}, switches {}",
        r.outcome, m.duration, m.max_abs_e, m.rms_e, m.regulations, m.switches
    )
}

fn run(cfg: &RunConfig, schedule: Option<&Path>) -> Result<()> {
    let driver = match schedule {
        Some(p) => DriverSource::Scripted(Schedule::load(p)?),
        None => DriverSource::Model,
    };
    let r = run_with_driver(cfg, driver)?;
    let p = paths(cfg, &cfg.output.name);
    export(&r, cfg, &p)?;
    println!("{}: {}", cfg.mode, summary(&r));
    println!("wrote {}", p.trajectory.display());
    println!("wrote {}", p.commands.display());
    println!("wrote {}", p.metrics.display());
    println!("wrote {}", p.plot.display());
    Ok(())
}

fn run_compare(cfg: &RunConfig, a: Mode, b: Mode, seeds: Option<Seeds>) -> Result<()> {
    let (ca, cb) = (
        RunConfig {
            mode: a,
            ..cfg.clone()
        },
        RunConfig {
            mode: b,
            ..cfg.clone()
        },
    );
    let c = compare(&ca, &cb)?;
    print!("{}", render_table(&c.rows));
    let name = &cfg.output.name;
    // same mode twice would collide on file names
    let suffix = |i: usize, m: Mode| {
        if a == b {
            format!("{name}-{m}-{}", i + 1)
        } else {
            format!("{name}-{m}")
        }
    };
    for (i, (r, c)) in c.results.iter().zip([&ca, &cb]).enumerate() {
        export(r, c, &paths(cfg, &suffix(i, c.mode)))?;
    }
    let table = cfg.output.dir.join(format!("{name}.comparison.csv"));
    write_atomic(&table, &rows_csv(&c.rows)?)?;
    println!("wrote {}", table.display());

    if let Some(Seeds(seeds)) = seeds {
        let sweeps = [sweep_seeds(&ca, &seeds)?, sweep_seeds(&cb, &seeds)?];
        for s in &sweeps {
            println!(
                "{} over {} seeds: {} laps, mean max|e| {:.4} m, worst {:.4} m, mean regulations {:.2}",
                s.mode,
                s.runs.len(),
                s.completed,
                s.mean_max_abs_e,
                s.worst_max_abs_e,
                s.mean_regulations
            );
        }
        let path = cfg.output.dir.join(format!("{name}.sweep.json"));
        write_atomic(&path, &serde_json::to_vec_pretty(&sweeps)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_surface(cfg: &RunConfig, args: &SurfaceArgs) -> Result<()> {
    if args.size < 2 {
        bail!("--size must be at least 2");
    }
    let controller = cfg.fuzzy.build()?;
    let table = (!args.exact)
        .then(|| LookupTable::build(&controller, cfg.fuzzy.lookup_size))
        .transpose()?;
    let (e_max, de_max) = (cfg.fuzzy.e.gain, cfg.fuzzy.de.gain);
    let mut out = String::from("e,de,u\n");
    let n = args.size - 1;
    // (2k - n) / n keeps the grid exactly symmetric about zero
    let frac = |k: usize| (2.0 * k as f64 - n as f64) / n as f64;
    for i in 0..=n {
        let e = e_max * frac(i);
        for j in 0..=n {
            let de = de_max * frac(j);
            let u = match &table {
                Some(t) => t.eval(e, de),
                None => controller.eval(e, de),
            };
            out.push_str(&format!("{e},{de},{u}\n"));
        }
    }
    emit(args.output.as_deref(), out.as_bytes())
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .context("writing to stdout"),
    }
}
