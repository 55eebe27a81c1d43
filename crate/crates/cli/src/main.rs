use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use udcolor::coloring::{
    self, check_high_degree_set, color_4omega, color_568, color_fractional, color_greedy_baseline,
    list_round_cap, validate, validate_fractional, FractionalMode,
};
use udcolor::fourier::{self, FourierConfig, Profile};
use udcolor::instances;
use udcolor::io::{self as uio, ColoringFile};
use udcolor::lpbounds;
use udcolor::udg::{build_graph, check_structure, UnitDiskGraph, WeightedPointSet};

/// Unit-disk graph coloring experiments.
#[derive(Parser)]
#[command(name = "udcolor", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug)]
enum Omega {
    Auto,
    Fixed(u32),
}

impl FromStr for Omega {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Omega::Auto);
        }
        match s.parse::<u32>() {
            Ok(k) if k > 0 => Ok(Omega::Fixed(k)),
            _ => Err(format!("expected `auto` or a positive integer, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    #[value(name = "4omega")]
    FourOmega,
    Fractional,
    #[value(name = "568")]
    FiveSixEight,
    Baseline,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Uniform,
    Grid,
    Strip,
    Sinusoidal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FracMode {
    Central,
    Simulate,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a point file.
    Gen {
        #[arg(long, value_enum, default_value = "uniform")]
        kind: GenKind,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 10.0)]
        width: f64,
        #[arg(long, default_value_t = 10.0)]
        height: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        k_periods: usize,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 2.0)]
        weight: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Color a point set and write the coloring.
    Color {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long, default_value = "auto")]
        omega: Omega,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20000)]
        r: usize,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, value_enum, default_value = "central")]
        mode: FracMode,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-node trace (`id output finish_round`).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Validate a coloring and the structural invariants of the instance.
    Check {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long, default_value = "auto")]
        omega: Omega,
    },
    /// Print the exact clique number and disk clique number.
    Omega {
        #[arg(long)]
        points: PathBuf,
    },
    /// Write lp5.dat and lp4.dat.
    LpCurves {
        #[arg(long, default_value = "")]
        out: PathBuf,
    },
    /// Measure the sinusoidal construction.
    Fourier {
        #[arg(long, default_value_t = 16)]
        k_periods: usize,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long, default_value_t = 50.0)]
        weight: f64,
        /// Constant profile instead of the sinusoid.
        #[arg(long)]
        uniform: bool,
        /// Number of refinement levels (grid doubled, step halved per level).
        #[arg(long)]
        sweep: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run an algorithm over seeded uniform instances and tabulate.
    Bench {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        runs: u64,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 15.0)]
        width: f64,
        #[arg(long, default_value_t = 100)]
        r: usize,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
    },
}

/// Failure with its exit status.
struct Fail(u8, String);

fn usage(e: impl ToString) -> Fail {
    Fail(2, e.to_string())
}

fn load(path: &Path) -> Result<UnitDiskGraph, Fail> {
    Ok(build_graph(&uio::read_points(path).map_err(usage)?))
}

fn resolve(omega: Omega, g: &UnitDiskGraph) -> u32 {
    match omega {
        Omega::Auto => coloring::exact_omega(g).max(1) as u32,
        Omega::Fixed(k) => k,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text).map_err(usage),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct RunSummary {
    text: String,
    colors_used: usize,
    bound: u32,
    rounds: Option<usize>,
    trace: Option<String>,
}

fn run_algo(
    g: &UnitDiskGraph,
    algo: Algo,
    omega: u32,
    seed: u64,
    r: usize,
    eps: f64,
    mode: FracMode,
) -> Result<RunSummary, Fail> {
    let fail = |e: coloring::ColoringError| Fail(1, e.to_string());
    Ok(match algo {
        Algo::FourOmega => {
            let (c, t) = color_4omega(g, omega, seed).map_err(fail)?;
            RunSummary {
                text: uio::format_coloring(&c),
                colors_used: c.colors_used(),
                bound: c.palette_size,
                rounds: Some(t.rounds_executed),
                trace: Some(t.export()),
            }
        }
        Algo::FiveSixEight => {
            let (c, t) = color_568(g, omega, seed).map_err(fail)?;
            RunSummary {
                text: uio::format_coloring(&c),
                colors_used: c.colors_used(),
                bound: c.palette_size,
                rounds: Some(t.rounds_executed),
                trace: Some(t.export()),
            }
        }
        Algo::Baseline => {
            let (c, t) = color_greedy_baseline(g, seed).map_err(fail)?;
            RunSummary {
                text: uio::format_coloring(&c),
                colors_used: c.colors_used(),
                bound: c.palette_size,
                rounds: Some(t.rounds_executed),
                trace: Some(t.export()),
            }
        }
        Algo::Fractional => {
            let m = match mode {
                FracMode::Central => FractionalMode::Central,
                FracMode::Simulate => FractionalMode::Simulate,
            };
            let res = color_fractional(g, omega, r, eps, m, seed).map_err(fail)?;
            let c = &res.coloring;
            RunSummary {
                text: uio::format_fractional(c),
                colors_used: c.sets.iter().flatten().collect::<std::collections::BTreeSet<_>>().len(),
                bound: c.p,
                rounds: res.rounds,
                trace: None,
            }
        }
    })
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Gen {
            kind,
            n,
            width,
            height,
            step,
            seed,
            k_periods,
            grid,
            weight,
            out,
        } => {
            let (ps, note): (WeightedPointSet, String) = match kind {
                GenKind::Uniform => (
                    instances::uniform_box(n, width, height, seed).map_err(usage)?,
                    format!("uniform n={n} box={width}x{height} seed={seed}"),
                ),
                GenKind::Grid => (
                    instances::grid(step, width, height).map_err(usage)?,
                    format!("grid step={step} box={width}x{height}"),
                ),
                GenKind::Strip => (
                    instances::strip(n, width, seed).map_err(usage)?,
                    format!("strip n={n} length={width} seed={seed}"),
                ),
                GenKind::Sinusoidal => {
                    let cfg = FourierConfig {
                        k_periods,
                        grid,
                        weight_scale: weight,
                        profile: Profile::Sinusoidal,
                    };
                    (
                        fourier::build_construction(&cfg).map_err(usage)?,
                        format!("sinusoidal k={k_periods} grid={grid} weight={weight}"),
                    )
                }
            };
            uio::write_points(&out, &ps, Some(&note)).map_err(usage)?;
            eprintln!("wrote {} sites ({} vertices) to {}", ps.len(), ps.total_weight(), out.display());
        }
        Cmd::Color {
            points,
            algo,
            omega,
            seed,
            r,
            eps,
            mode,
            out,
            trace,
        } => {
            let g = load(&points)?;
            let omega = resolve(omega, &g);
            let s = run_algo(&g, algo, omega, seed, r, eps, mode)?;
            emit(&out, &s.text)?;
            if let (Some(path), Some(t)) = (trace, s.trace) {
                fs::write(path, t).map_err(usage)?;
            }
            eprintln!(
                "omega {omega}, colors used {}, palette {}, rounds {}",
                s.colors_used,
                s.bound,
                s.rounds.map_or("-".into(), |r| r.to_string())
            );
        }
        Cmd::Check {
            points,
            coloring,
            omega,
        } => {
            let g = load(&points)?;
            let omega = resolve(omega, &g);
            let report = match uio::read_coloring(&coloring).map_err(usage)? {
                ColoringFile::Plain(c) => validate(&g, &c),
                ColoringFile::Fractional(c) => validate_fractional(&g, &c),
            };
            println!("coloring {report}");
            let structure = check_structure(&g, omega as usize);
            println!("structure {}", if structure.passed() { "pass" } else { "fail" });
            println!("{structure}");
            let high = check_high_degree_set(&g, omega);
            println!(
                "high-degree set {} ({} vertices)",
                if high.passed() { "pass" } else { "fail" },
                high.high.len()
            );
            if !report.passed() {
                return Err(Fail(1, format!("validation failed: {report}")));
            }
        }
        Cmd::Omega { points } => {
            let g = load(&points)?;
            println!("omega {}", g.clique_number());
            println!("omega_D {}", g.disk_clique_number());
        }
        Cmd::LpCurves { out } => {
            let (p5, p4) = lpbounds::emit_curves(&out).map_err(usage)?;
            let b = lpbounds::pairwise_degree_bound();
            println!("wrote {} and {}", p5.display(), p4.display());
            println!("pairwise bound {:.4} at delta {:.3}", b.value, b.argmax);
        }
        Cmd::Fourier {
            k_periods,
            grid,
            weight,
            uniform,
            sweep,
            csv,
        } => {
            let cfg = FourierConfig {
                k_periods,
                grid,
                weight_scale: weight,
                profile: if uniform { Profile::Uniform } else { Profile::Sinusoidal },
            };
            match sweep {
                None => println!("{}", fourier::measure_ratio(&cfg).map_err(usage)?),
                Some(levels) => {
                    let rows = fourier::refinement_sweep(&cfg, levels).map_err(usage)?;
                    let text = fourier::sweep_csv(&rows);
                    print!("{text}");
                    if let Some(p) = csv {
                        fs::write(p, text).map_err(usage)?;
                    }
                }
            }
        }
        Cmd::Bench {
            algo,
            seed,
            runs,
            n,
            width,
            r,
            eps,
        } => {
            let rows: Vec<Result<String, Fail>> = (seed..seed + runs)
                .into_par_iter()
                .map(|s| {
                    let ps = instances::uniform_box(n, width, width, s).map_err(usage)?;
                    let g = build_graph(&ps);
                    let omega = resolve(Omega::Auto, &g);
                    let res = run_algo(&g, algo, omega, s, r, eps, FracMode::Central)?;
                    let text = &res.text;
                    let ok = match uio::parse_coloring(text).map_err(usage)? {
                        ColoringFile::Plain(c) => validate(&g, &c).passed(),
                        ColoringFile::Fractional(c) => validate_fractional(&g, &c).passed(),
                    };
                    let cap = match algo {
                        Algo::FourOmega => 30.to_string(),
                        Algo::FiveSixEight | Algo::Baseline => list_round_cap(g.n()).to_string(),
                        Algo::Fractional => "-".into(),
                    };
                    Ok(format!(
                        "{s:>6} {:>6} {omega:>5} {:>6} {:>6} {:>6} {cap:>5} {}",
                        g.n(),
                        res.colors_used,
                        res.bound,
                        res.rounds.map_or("-".into(), |r| r.to_string()),
                        if ok { "pass" } else { "FAIL" }
                    ))
                })
                .collect();
            println!("  seed      n omega  used  bound rounds   cap valid");
            let mut failed = false;
            for row in rows {
                match row {
                    Ok(line) => {
                        failed |= line.ends_with("FAIL");
                        println!("{line}");
                    }
                    Err(Fail(_, msg)) => {
                        failed = true;
                        println!("error: {msg}");
                    }
                }
            }
            if failed {
                return Err(Fail(1, "some runs failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
