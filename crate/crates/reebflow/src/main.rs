//! `reebflow` command line interface.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reebflow::config::{parse_config, RunConfig};
use reebflow::entropy::{best_fit_a, entropy_volume_bound, w_link, EntropyDatum};
use reebflow::error::Result;
use reebflow::flow::{minimize_volume_with_guard, run_flow};
use reebflow::reeb::{normalize_to_slice, HyperplaneSlice, ReebVector, TangentVector};
use reebflow::report::run_report;
use reebflow::soliton::{attach_metric, soliton_residual, solve_soliton, transverse_curvature};
use reebflow::svg::{render, Panel, Series};
use reebflow::volume::{futaki, volume, volume_report};

#[derive(Parser)]
#[command(
    name = "reebflow",
    about = "Volume minimization, Futaki invariants, Reeb flow, solitons and \
             entropy on weighted Sasaki spheres",
    version
)]
struct Cli {
    /// Plain-text key=value config file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Emit JSON-lines instead of human-readable summaries.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the volume functional at one Reeb vector.
    Volume(VolumeArgs),
    /// Evaluate the Futaki invariant against a tangent direction.
    Futaki(FutakiArgs),
    /// Integrate the negative volume-gradient flow on the slice.
    Flow(FlowArgs),
    /// Damped-Newton volume minimization on the slice.
    Minimize(MinimizeArgs),
    /// Solve the n=1 soliton profile (optionally a weight-ratio sweep).
    Soliton(SolitonArgs),
    /// Entropy report {V, W, mu, A, bound_ok} for one weight pair.
    Entropy(EntropyArgs),
    /// Run the full desk-scale suite and write CSV/SVG/summary artifacts.
    Report(ReportArgs),
}

#[derive(Args)]
struct VolumeArgs {
    /// Reeb vector as a comma-separated list, e.g. 0.5,1.5
    #[arg(long, allow_hyphen_values = true)]
    reeb: String,
    /// Report the volume relative to the round sphere only.
    #[arg(long)]
    relative: bool,
}

#[derive(Args)]
struct FutakiArgs {
    #[arg(long, allow_hyphen_values = true)]
    reeb: String,
    /// Tangent direction (components summing to zero).
    #[arg(long, allow_hyphen_values = true)]
    y: String,
}

#[derive(Args)]
struct FlowArgs {
    /// Starting Reeb vector; normalized onto the slice before flowing.
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    /// Trajectory CSV path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Optional SVG figure path.
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct MinimizeArgs {
    #[arg(long, allow_hyphen_values = true)]
    start: String,
}

#[derive(Args)]
struct SolitonArgs {
    /// Weight pair a0,a1
    #[arg(long, allow_hyphen_values = true)]
    weights: String,
    /// Sweep the weight ratio: min:max:steps (e.g. 1:4:20).
    #[arg(long, value_name = "RMIN:RMAX:STEPS")]
    sweep: Option<String>,
    /// Profile (or sweep) CSV path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    /// Weight pair a0,a1
    #[arg(long, allow_hyphen_values = true)]
    weights: String,
}

#[derive(Args)]
struct ReportArgs {
    /// Output directory (overrides the config's out.dir).
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Ok(seed) = std::env::var("REEBFLOW_SEED") {
        cfg.quad_mc_seed = seed.parse().map_err(|_| reebflow::error::Error::Flag {
            flag: "REEBFLOW_SEED",
            message: format!("malformed number `{seed}`"),
        })?;
    }
    Ok(cfg)
}

fn parse_vector(flag: &'static str, text: &str) -> Result<ReebVector> {
    let v = ReebVector::parse(text).map_err(|e| reebflow::error::Error::Flag {
        flag,
        message: e.to_string(),
    })?;
    if v.n() > 3 {
        return Err(reebflow::error::Error::Flag {
            flag,
            message: format!(
                "supports n in 1..=3, i.e. 2..=4 coefficients, got {}",
                v.n() + 1
            ),
        });
    }
    Ok(v)
}

fn parse_weights(flag: &'static str, text: &str) -> Result<(f64, f64)> {
    let v = parse_vector(flag, text)?;
    if v.n() != 1 {
        return Err(reebflow::error::Error::Flag {
            flag,
            message: format!("expected exactly 2 weights, got {}", v.n() + 1),
        });
    }
    Ok((v.coeffs()[0], v.coeffs()[1]))
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Volume(args) => {
            let xi = parse_vector("--reeb", &args.reeb)?;
            let mut cfg = cfg;
            cfg.n = xi.n().clamp(1, 3);
            let link = cfg.link();
            let report = volume_report(&link, &xi)?;
            if args.relative {
                println!(
                    "{}",
                    serde_json::json!({ "relative_volume": report.relative_volume })
                );
            } else {
                println!("{}", serde_json::to_string(&report)?);
            }
        }
        Command::Futaki(args) => {
            let xi = parse_vector("--reeb", &args.reeb)?;
            let y_raw = parse_vector("--y", &args.y)?;
            let y = TangentVector::new(y_raw.coeffs().to_vec(), 1e-10).map_err(|e| {
                reebflow::error::Error::Flag {
                    flag: "--y",
                    message: e.to_string(),
                }
            })?;
            let mut cfg = cfg;
            cfg.n = xi.n().clamp(1, 3);
            let link = cfg.link();
            let fut = futaki(&link, &xi, &y)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({ "reeb": xi.coeffs(), "y": y.coeffs(), "futaki": fut })
                );
            } else {
                println!("Fut(JY) at ({}) along ({}) = {fut}", xi, args.y);
            }
        }
        Command::Flow(args) => {
            let raw = parse_vector("--start", &args.start)?;
            let slice = HyperplaneSlice::standard(raw.n());
            let start = normalize_to_slice(&raw, &slice)?;
            let mut cfg = cfg;
            cfg.n = start.n().clamp(1, 3);
            let link = cfg.link();
            let opts = cfg.flow_options();
            let traj = run_flow(&link, &start, &opts)?;
            let n = start.n();
            let coords: Vec<String> = (0..=n).map(|i| format!("a{i}")).collect();
            let mut csv = format!("t,{},volume,grad_norm,mu\n", coords.join(","));
            for s in &traj.states {
                let reeb: Vec<String> = s.reeb.iter().map(|a| a.to_string()).collect();
                let mu = s.mu.map(|m| m.to_string()).unwrap_or_default();
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    s.t,
                    reeb.join(","),
                    s.volume,
                    s.grad_norm,
                    mu
                ));
            }
            std::fs::write(&args.out, csv)?;
            if let Some(svg_path) = &args.svg {
                let mut panels = vec![Panel {
                    title: "volume along the flow".into(),
                    x_label: "t".into(),
                    y_label: "volume".into(),
                    series: vec![Series {
                        label: "volume".into(),
                        points: traj.states.iter().map(|s| (s.t, s.volume)).collect(),
                    }],
                }];
                if traj.states.iter().any(|s| s.mu.is_some()) {
                    panels.push(Panel {
                        title: "entropy along the flow".into(),
                        x_label: "t".into(),
                        y_label: "mu".into(),
                        series: vec![Series {
                            label: "mu".into(),
                            points: traj
                                .states
                                .iter()
                                .filter_map(|s| s.mu.map(|m| (s.t, m)))
                                .collect(),
                        }],
                    });
                }
                std::fs::write(svg_path, render(&panels))?;
            }
            let last = traj.states.last().expect("non-empty trajectory");
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "states": traj.states.len(),
                        "terminated_by": traj.terminated_by,
                        "final": last.reeb,
                        "volume": last.volume,
                        "grad_norm": last.grad_norm,
                    })
                );
            } else {
                println!(
                    "flow: {} states, terminated by {:?}, final ({}) volume {} |grad| {:.3e}",
                    traj.states.len(),
                    traj.terminated_by,
                    traj.final_reeb(),
                    last.volume,
                    last.grad_norm
                );
            }
        }
        Command::Minimize(args) => {
            let raw = parse_vector("--start", &args.start)?;
            let slice = HyperplaneSlice::standard(raw.n());
            let start = normalize_to_slice(&raw, &slice)?;
            let mut cfg = cfg;
            cfg.n = start.n().clamp(1, 3);
            let link = cfg.link();
            let min = minimize_volume_with_guard(&link, &start, cfg.flow_boundary_guard)?;
            let vol = volume(&link, &min)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({ "minimizer": min.coeffs(), "volume": vol })
                );
            } else {
                println!("minimizer ({}) with volume {vol}", min);
            }
        }
        Command::Soliton(args) => {
            let (a0, a1) = parse_weights("--weights", &args.weights)?;
            if let Some(sweep) = &args.sweep {
                let parts: Vec<&str> = sweep.split(':').collect();
                let sweep_err = |message: String| reebflow::error::Error::Flag {
                    flag: "--sweep",
                    message,
                };
                if parts.len() != 3 {
                    return Err(sweep_err(format!(
                        "expected RMIN:RMAX:STEPS, got `{sweep}`"
                    )));
                }
                let rmin: f64 = parts[0]
                    .parse()
                    .map_err(|_| sweep_err(format!("malformed number `{}`", parts[0])))?;
                let rmax: f64 = parts[1]
                    .parse()
                    .map_err(|_| sweep_err(format!("malformed number `{}`", parts[1])))?;
                let steps: usize = parts[2]
                    .parse()
                    .map_err(|_| sweep_err(format!("malformed number `{}`", parts[2])))?;
                if !(rmin > 0.0 && rmax >= rmin && steps >= 2) {
                    return Err(sweep_err(
                        "need 0 < RMIN <= RMAX and STEPS >= 2".to_string(),
                    ));
                }
                let mut csv = String::from("ratio,w0,w1,b,k_min,residual,mu\n");
                for i in 0..steps {
                    let r = rmin + (rmax - rmin) * i as f64 / (steps - 1) as f64;
                    let p = solve_soliton(a0, a0 * r)?;
                    let k_min = transverse_curvature(&p)
                        .into_iter()
                        .fold(f64::INFINITY, f64::min);
                    let (w0, w1) = p.slice_weights();
                    let mu = reebflow::entropy::mu_of_soliton(&p)?;
                    csv.push_str(&format!(
                        "{r},{w0},{w1},{},{k_min},{},{mu}\n",
                        p.b(),
                        soliton_residual(&p)
                    ));
                }
                std::fs::write(&args.out, csv)?;
                if !cli.json {
                    println!("sweep written to {}", args.out.display());
                }
            } else {
                let p = solve_soliton(a0, a1)?;
                let xi = ReebVector::new(vec![a0, a1])?;
                let metric = attach_metric(&p, &xi)?;
                let mut csv = String::from("x,phi,K_T,f\n");
                for (&x, &phi) in p.grid().iter().zip(p.phi()) {
                    csv.push_str(&format!(
                        "{x},{phi},{},{}\n",
                        p.curvature_at(x),
                        metric.f_at(x)
                    ));
                }
                std::fs::write(&args.out, csv)?;
                if let Some(svg_path) = &args.svg {
                    let grid: Vec<f64> = p.grid().to_vec();
                    let panels = vec![
                        Panel {
                            title: format!("momentum profile, weights {a0}:{a1}"),
                            x_label: "x".into(),
                            y_label: "phi".into(),
                            series: vec![Series {
                                label: "phi".into(),
                                points: grid.iter().map(|&x| (x, p.phi_at(x))).collect(),
                            }],
                        },
                        Panel {
                            title: "transverse curvature and potential".into(),
                            x_label: "x".into(),
                            y_label: "value".into(),
                            series: vec![
                                Series {
                                    label: "K_T".into(),
                                    points: grid.iter().map(|&x| (x, p.curvature_at(x))).collect(),
                                },
                                Series {
                                    label: "f".into(),
                                    points: grid.iter().map(|&x| (x, metric.f_at(x))).collect(),
                                },
                            ],
                        },
                    ];
                    std::fs::write(svg_path, render(&panels))?;
                }
                if cli.json {
                    println!(
                        "{}",
                        serde_json::json!({
                            "weights": [a0, a1],
                            "b": p.b(),
                            "x_max": p.x_max(),
                            "lambda": p.lambda(),
                            "slice_weights": [p.slice_weights().0, p.slice_weights().1],
                            "residual": soliton_residual(&p),
                        })
                    );
                } else {
                    println!(
                        "soliton ({a0},{a1}): b = {}, x_max = {}, residual = {:.2e}",
                        p.b(),
                        p.x_max(),
                        soliton_residual(&p)
                    );
                }
            }
        }
        Command::Entropy(args) => {
            let (a0, a1) = parse_weights("--weights", &args.weights)?;
            let mut cfg = cfg;
            cfg.n = 1;
            let link = cfg.link();
            let metric = reebflow::soliton::soliton_metric(a0, a1)?;
            let (w0, w1) = metric.profile().slice_weights();
            let v = volume(&link, &ReebVector::new(vec![w0, w1])?)?;
            let datum = EntropyDatum::soliton(metric);
            let w = w_link(&datum)?;
            let mu = w; // the soliton potential is the W-minimizer
            let a = best_fit_a(&datum)?;
            let bound_ok = entropy_volume_bound(v, mu, 1);
            println!(
                "{}",
                serde_json::json!({ "V": v, "W": w, "mu": mu, "A": a, "bound_ok": bound_ok })
            );
        }
        Command::Report(args) => {
            let mut cfg = cfg;
            if let Some(dir) = &args.out_dir {
                cfg.out_dir = dir.display().to_string();
            }
            let outcome = run_report(&cfg)?;
            if cfg.verbosity > 0 {
                print!("{}", outcome.summary);
            }
            if !outcome.passed {
                for failure in &outcome.failures {
                    eprintln!("report assertion failed: {failure}");
                }
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
