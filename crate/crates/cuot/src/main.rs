use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cuot::export::{export_run, RunDir};
use cuot::{presets, run, ConfigDoc, Error, Files, Scenario};
use cuot_core::{FeasibilityVerdict, Progress};

/// Constrained Wasserstein–Fisher–Rao geodesics on space-time grids.
#[derive(Parser)]
#[command(name = "cuot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a configuration file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Solve a built-in scenario.
    Scenario {
        /// Preset name; omit with --list.
        name: Option<String>,
        #[arg(long, required_unless_present_any = ["list", "print_config"])]
        out: Option<PathBuf>,
        /// List the presets and exit.
        #[arg(long)]
        list: bool,
        /// Print the preset document (after overrides) and exit.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Run the heuristic feasibility probe.
    Feasibility {
        #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Refit the convergence rate of an exported run.
    Rate {
        #[arg(long)]
        run: PathBuf,
    },
}

#[derive(Args)]
struct SolveOpts {
    /// Iteration count.
    #[arg(long)]
    iters: Option<usize>,
    /// Diagnostics record stride.
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Document override `key.path=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Suppress progress output.
    #[arg(long, short)]
    quiet: bool,
}

impl SolveOpts {
    fn overrides(&self) -> Vec<String> {
        let mut v = self.sets.clone();
        if let Some(n) = self.iters {
            v.push(format!("solver.iterations={n}"));
        }
        if let Some(k) = self.snapshot_every {
            v.push(format!("solver.snapshot_stride={k}"));
        }
        if let Some(t) = self.threads {
            v.push(format!("solver.threads={t}"));
        }
        v
    }
}

fn load(doc: ConfigDoc, opts: &SolveOpts, files: &Files) -> Result<Scenario, Error> {
    cuot::build(doc.with_overrides(&opts.overrides())?, files)
}

fn from_config(path: &Path, opts: &SolveOpts) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load(ConfigDoc::parse(&text)?, opts, &Files::beside(path))
}

fn solve_and_export(scn: &Scenario, out: &Path, quiet: bool) -> Result<(), Error> {
    let total = scn.solver.iterations;
    let mut next = 0usize;
    let mut report = |p: &Progress| {
        if p.iteration >= next {
            eprintln!(
                "iter {:>7}/{total}  energy {:.6e}  max violation {:.3e}  ce residual {:.3e}",
                p.iteration, p.energy, p.max_violation, p.ce_residual
            );
            next = p.iteration + total.div_ceil(10).max(1);
        }
    };
    let progress: Option<&mut dyn FnMut(&Progress)> = if quiet { None } else { Some(&mut report) };
    let r = run::solve(scn, progress)?;
    export_run(out, scn, &r.result, r.threads, r.wall_clock_seconds)?;
    let res = &r.result;
    println!("energy           {:.10e}", res.energy);
    println!("ce residual      {:.3e}", res.ce_residual);
    println!("max violation    {:.3e}", res.report.max_violation);
    if let Some(f) = res.diagnostics.rate {
        println!("rate q           {:.6} (R² {:.4})", f.q, f.r_squared);
    }
    println!("wall clock       {:.2} s on {} threads", r.wall_clock_seconds, r.threads);
    println!("written to       {}", out.display());
    if !res.converged {
        eprintln!(
            "warning: continuity residual {:.3e} above tolerance {:.1e}",
            res.ce_residual, scn.solver.ce_tolerance
        );
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Solve { config, out, opts } => {
            let scn = from_config(&config, &opts)?;
            solve_and_export(&scn, &out, opts.quiet)?;
            Ok(0)
        }
        Command::Scenario {
            name,
            out,
            list,
            print_config,
            opts,
        } => {
            if list {
                for n in presets::names() {
                    let doc = presets::doc(n)?;
                    println!("{n:<22} {}", doc.description.unwrap_or_default());
                }
                return Ok(0);
            }
            let name = name.ok_or_else(|| Error::config("<preset>", "missing preset name"))?;
            let doc = presets::doc(&name)?.with_overrides(&opts.overrides())?;
            if print_config {
                print!("{}", doc.to_toml()?);
                return Ok(0);
            }
            let scn = cuot::build(doc, &Files::default())?;
            let out = out.expect("clap requires --out");
            solve_and_export(&scn, &out, opts.quiet)?;
            Ok(0)
        }
        Command::Feasibility { config, scenario, opts } => {
            let scn = match (config, scenario) {
                (Some(c), _) => from_config(&c, &opts)?,
                (None, Some(s)) => load(presets::doc(&s)?, &opts, &Files::default())?,
                (None, None) => unreachable!("clap requires one source"),
            };
            let r = run::probe(&scn)?;
            println!("verdict          {:?}", r.verdict);
            println!("max violation    {:.3e}", r.max_violation);
            println!("ce residual      {:.3e}", r.ce_residual);
            println!("iterations       {}", r.iterations);
            Ok(match r.verdict {
                FeasibilityVerdict::LikelyInfeasible => 3,
                _ => 0,
            })
        }
        Command::Rate { run } => {
            let dir = RunDir::open(&run)?;
            match dir.diagnostics.refit() {
                Some(f) => {
                    println!("q                {:.6}", f.q);
                    println!("R²               {:.6}", f.r_squared);
                    println!("points           {}", f.points);
                    Ok(0)
                }
                None => Err(Error::format(
                    run.join(cuot::export::DIAGNOSTICS),
                    "fewer than two positive relative-error records",
                )),
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
