//! Command-line front end: evaluation, verification suites, simulation,
//! extremal runs, envelopes, the critical-constant search, and chord
//! dumps, with deterministic scriptable output.
//!
//! Results go to stdout (or `--out`), diagnostics to stderr. Exit codes:
//! 0 success, 1 verification failure, 2 invalid input. JSON documents are
//! tagged `"schema": "bellman-mt/1"` and render numbers with 17
//! significant digits; CSV uses 12 (headers are fixed strings).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bellman_mt::envelope::{
    greatest_zigzag_minorant, least_zigzag_majorant, u_p_scaled, SWEEP_TOL,
};
use bellman_mt::extremal::extremal_sequence;
use bellman_mt::martingale::{random_step_function, random_transform};
use bellman_mt::report;
use bellman_mt::rng::stream_rng;
use bellman_mt::solver::{
    bellman_max, bellman_min, sharp_constant_scan_in, OmegaPoint, ScanRegion, Which,
};
use bellman_mt::special::{phi_max, phi_min, ExponentParams, PlanePoint};
use bellman_mt::trajectories::{chord, to_omega, to_xi, CaseId, XiPoint};
use bellman_mt::verify::run_suites;

#[derive(Parser)]
#[command(
    name = "bellman-mt",
    about = "Bellman functions of the dyadic martingale transform",
    long_about = "Bellman functions of the dyadic martingale transform.\n\n\
        Results go to stdout (or --out); diagnostics go to stderr. Exit \
        codes: 0 success, 1 verification failure, 2 invalid input.\n\n\
        Output formats are fixed: JSON documents carry a \
        \"schema\": \"bellman-mt/1\" field and render numbers with 17 \
        significant digits; CSV renders 12. CSV headers are the fixed \
        strings \"segment_start,segment_length,f_value,g_value\" (pair \
        dumps), \"x1,x2,value\" (grids) and \"t,y1,y2,y3,value\" (chords). \
        Identical invocations (including --seed) produce byte-identical \
        output.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Max,
    Min,
}

impl WhichArg {
    fn which(self) -> Which {
        match self {
            WhichArg::Max => Which::Max,
            WhichArg::Min => Which::Min,
        }
    }
    fn as_str(self) -> &'static str {
        match self {
            WhichArg::Max => "max",
            WhichArg::Min => "min",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PinArg {
    /// Pin the boundary ring to the scaled Burkholder majorant.
    #[value(name = "u-p")]
    UP,
    /// Pin to the closed-form envelope (validation mode).
    ClosedForm,
    /// Keep the boundary at the sampled obstacle values.
    Samples,
}

#[derive(Args)]
struct OutArg {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate B_max or B_min at one point.
    Eval {
        #[arg(long)]
        p: f64,
        /// Point as x1,x2,x3.
        #[arg(long, value_parser = parse_triple)]
        point: (f64, f64, f64),
        #[arg(long, value_enum)]
        which: WhichArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sharp-constant scan of B/x3 (reports both regions for min).
    Scan {
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum)]
        which: WhichArg,
        /// Nodes per scan axis.
        #[arg(long, default_value_t = 200)]
        grid_n: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run named verification suites; exit 1 on any failure.
    Verify {
        #[arg(long)]
        p: f64,
        /// One of: all, special-functions, solver-residual, zigzag,
        /// simulation, envelope, hessian.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Simulate one seeded random martingale transform pair.
    Simulate {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output format: json summary or csv dump of the pair.
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Build the truncated extremal pair at (0, x2, x3) (p >= 2) or
    /// (x2, 0, x3) with roles exchanged (p < 2).
    Extremal {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        x2: f64,
        #[arg(long, default_value_t = 1.0)]
        x3: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Cap on the number of unrolled levels.
        #[arg(long, default_value_t = 2_000_000)]
        depth: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Zigzag envelope of h_c on a box (csv grid or json metadata).
    Envelope {
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum)]
        which: WhichArg,
        /// Obstacle constant; defaults to beta (max) or 1/beta (min).
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 4.0)]
        box_l: f64,
        /// Nodes per axis (odd, >= 33).
        #[arg(long, default_value_t = 129)]
        grid_n: usize,
        #[arg(long, value_enum, default_value = "closed-form")]
        pin: PinArg,
        #[arg(long, default_value_t = SWEEP_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Bisect for the smallest c admitting a zigzag-concave majorant of h_c.
    CriticalC {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 4.0)]
        box_l: f64,
        #[arg(long, default_value_t = 129)]
        grid_n: usize,
        /// Bisection width on c.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Dump the extremal chord through a point as CSV samples.
    Chords {
        #[arg(long)]
        p: f64,
        /// Point as x1,x2,x3.
        #[arg(long, value_parser = parse_triple)]
        point: (f64, f64, f64),
        #[arg(long, value_enum)]
        which: WhichArg,
        /// Samples along the chord.
        #[arg(long, default_value_t = 9)]
        grid_n: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

fn parse_triple(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x1,x2,x3, got '{s}'"));
    }
    let mut vals = [0.0f64; 3];
    for (v, part) in vals.iter_mut().zip(parts.iter()) {
        *v = part
            .trim()
            .parse()
            .map_err(|e| format!("bad number '{part}': {e}"))?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

fn emit(out: &OutArg, text: &str) -> Result<(), String> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("write {path:?}: {e}")),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Eval {
            p,
            point,
            which,
            out,
        } => {
            let params = ExponentParams::new(p).map_err(|e| e.to_string())?;
            let x = OmegaPoint::new(point.0, point.1, point.2);
            let sol = match which.which() {
                Which::Max => bellman_max(&x, &params),
                Which::Min => bellman_min(&x, &params),
            }
            .map_err(|e| e.to_string())?;
            emit(&out, &report::eval_json(p, &x, which.as_str(), &sol))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            p,
            which,
            grid_n,
            out,
        } => {
            let params = ExponentParams::new(p).map_err(|e| e.to_string())?;
            let (region, target) = match which.which() {
                Which::Max => (ScanRegion::AbsX2LeAbsX1, params.beta()),
                Which::Min => (ScanRegion::AbsX2GeAbsX1, 1.0 / params.beta()),
            };
            let value = sharp_constant_scan_in(&params, which.which(), region, grid_n)
                .map_err(|e| e.to_string())?;
            // for min, also report the printed hypothesis region
            let literal = match which.which() {
                Which::Min => Some(
                    sharp_constant_scan_in(&params, Which::Min, ScanRegion::AbsX2LeAbsX1, grid_n)
                        .map_err(|e| e.to_string())?,
                ),
                Which::Max => None,
            };
            emit(
                &out,
                &report::scan_json(p, which.as_str(), grid_n, value, target, literal),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { p, suite, seed } => {
            let results = run_suites(&suite, p, seed).map_err(|e| e.to_string())?;
            let mut all_ok = true;
            for r in &results {
                println!(
                    "{:<18} {}  {}",
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.detail
                );
                all_ok &= r.passed;
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Simulate {
            p,
            depth,
            seed,
            format,
            out,
        } => {
            let params = ExponentParams::new(p).map_err(|e| e.to_string())?;
            if !(1..=24).contains(&depth) {
                return Err(format!("depth must lie in 1..=24, got {depth}"));
            }
            let mut rng = stream_rng(seed, 0);
            let f = random_step_function(depth, 0.0, &mut rng);
            let pair = random_transform(&f, seed);
            let x = pair.point(&params);
            let g_p_mean = pair.g.abs_p_mean(p);
            let bmax = bellman_max(&x, &params).map_err(|e| e.to_string())?.value;
            let bmin = bellman_min(&x, &params).map_err(|e| e.to_string())?.value;
            match format {
                FormatArg::Json => emit(
                    &out,
                    &report::simulate_json(seed, depth, &x, g_p_mean, bmax, bmin),
                )?,
                FormatArg::Csv => {
                    // dyadic cells as segments
                    let n = 1usize << depth;
                    let len = 1.0 / n as f64;
                    let segments = bellman_mt::extremal::SegmentPair {
                        segments: (0..n)
                            .map(|i| bellman_mt::extremal::Segment {
                                start: i as f64 * len,
                                len,
                                f: pair.f.values()[i],
                                g: pair.g.values()[i],
                            })
                            .collect(),
                    };
                    emit(&out, &report::segment_pair_csv(&segments))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Extremal {
            p,
            x2,
            x3,
            eps,
            depth,
            format,
            out,
        } => {
            let params = ExponentParams::new(p).map_err(|e| e.to_string())?;
            let run = extremal_sequence(x2, x3, eps, &params, depth).map_err(|e| e.to_string())?;
            match format {
                FormatArg::Json => emit(
                    &out,
                    &report::extremal_json(
                        p,
                        &run.point,
                        eps,
                        run.params.levels,
                        run.params.c0,
                        run.predicted_limit,
                        run.achieved,
                        run.params.trunc_error_bound,
                    ),
                )?,
                FormatArg::Csv => emit(&out, &report::segment_pair_csv(&run.pair))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Envelope {
            p,
            which,
            c,
            box_l,
            grid_n,
            pin,
            tol,
            format,
            out,
        } => {
            let params = ExponentParams::new(p).map_err(|e| e.to_string())?;
            let pe = params.p();
            let beta = params.beta();
            let cval = c.unwrap_or(match which.which() {
                Which::Max => beta,
                Which::Min => 1.0 / beta,
            });
            if cval <= 0.0 {
                return Err(format!("c must be positive, got {cval}"));
            }
            let sampler = move |x1: f64, x2: f64| x2.abs().powf(pe) - cval * x1.abs().powf(pe);
            // minorant counterpart of the u_p pin: -c u_{1/c}(x2, x1) is a
            // zigzag-convex minorant of h_c (swap the roles, flip the sign)
            let pin_up: Box<dyn Fn(f64, f64) -> f64> = match which.which() {
                Which::Max => Box::new(u_p_scaled(cval, &params)),
                Which::Min => {
                    let mirrored = u_p_scaled(1.0 / cval, &params);
                    Box::new(move |x1: f64, x2: f64| -cval * mirrored(x2, x1))
                }
            };
            let pin_closed: Box<dyn Fn(f64, f64) -> f64> = match which.which() {
                Which::Max => Box::new(move |x1, x2| phi_max(PlanePoint::new(x1, x2), &params)),
                Which::Min => Box::new(move |x1, x2| phi_min(PlanePoint::new(x1, x2), &params)),
            };
            let pin_fn: Option<&dyn Fn(f64, f64) -> f64> = match pin {
                PinArg::UP => Some(pin_up.as_ref()),
                PinArg::ClosedForm => Some(pin_closed.as_ref()),
                PinArg::Samples => None,
            };
            let result = match which.which() {
                Which::Max => least_zigzag_majorant(&sampler, pin_fn, box_l, grid_n, 100_000, tol),
                Which::Min => {
                    greatest_zigzag_minorant(&sampler, pin_fn, box_l, grid_n, 100_000, tol)
                }
            }
            .map_err(|e| e.to_string())?;
            match format {
                FormatArg::Csv => emit(&out, &report::grid_field_csv(&result.field))?,
                FormatArg::Json => emit(&out, &report::envelope_meta_json(&result))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CriticalC {
            p,
            box_l,
            grid_n,
            tol,
            out,
        } => {
            let params = ExponentParams::new(p).map_err(|e| e.to_string())?;
            let ladder = [(box_l, grid_n), (2.0 * box_l, grid_n)];
            let c_star = bellman_mt::envelope::critical_constant(
                &params,
                &ladder,
                PlanePoint::new(0.0, 1.0),
                tol,
            )
            .map_err(|e| e.to_string())?;
            emit(&out, &report::critical_json(p, c_star, params.beta()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Chords {
            p,
            point,
            which,
            grid_n,
            out,
        } => {
            let params = ExponentParams::new(p).map_err(|e| e.to_string())?;
            let x = OmegaPoint::new(point.0.abs(), point.1.abs(), point.2);
            let y = to_xi(&x);
            let case = match which.which() {
                Which::Max => {
                    if params.p() >= 2.0 {
                        CaseId::C32
                    } else {
                        CaseId::C42
                    }
                }
                Which::Min => {
                    if params.p() >= 2.0 {
                        CaseId::C42
                    } else {
                        CaseId::C32
                    }
                }
            };
            let ch = chord(&y, &params, case).map_err(|e| e.to_string())?;
            let u = ch.u.ok_or("vertical chord: no samples")?;
            let u3 = (y.y1 - u).abs().powf(params.p());
            let plane = if case == CaseId::C32 { y.y1 } else { -y.y1 };
            let w = ch.w.ok_or("vertical chord: no samples")?;
            let m = grid_n.max(2);
            let mut samples = Vec::with_capacity(m);
            for k in 0..m {
                let t = k as f64 / (m - 1) as f64;
                let y2 = u + t * (plane - u);
                let y3 = u3 + t * (w - u3);
                let pt = to_omega(&XiPoint::new(y.y1, y2, y3));
                let v = match which.which() {
                    Which::Max => bellman_max(&pt, &params),
                    Which::Min => bellman_min(&pt, &params),
                }
                .map_err(|e| e.to_string())?
                .value;
                samples.push((t, y.y1, y2, y3, v));
            }
            emit(&out, &report::chord_csv(&samples))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
