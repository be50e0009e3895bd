//! The `report` subcommand: runs the desk-scale suite (minimizer location,
//! properness table, soliton sweep with curvature minima, entropy table,
//! oracle agreement) and writes CSV + SVG + a summary file.  Every embedded
//! assertion must pass for the run to succeed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::entropy::{
    best_fit_a, cone_link_ratio, entropy_volume_bound, gaussian_moment, radial_moment_numeric,
    w_cone, w_link, EntropyDatum,
};
use crate::error::Result;
use crate::flow::{minimize_volume_with_guard, run_flow, TerminationReason};
use crate::quad::{integrate_basic, mc_integrate, round_sphere_volume, WeightedSphereLink};
use crate::reeb::{normalize_to_slice, HyperplaneSlice, ReebVector, TangentVector};
use crate::soliton::{soliton_metric, soliton_residual, solve_soliton, transverse_curvature};
use crate::svg::{Panel, Series};
use crate::volume::{futaki, volume};

pub struct ReportOutcome {
    pub passed: bool,
    pub summary: String,
    pub failures: Vec<String>,
    pub files: Vec<PathBuf>,
}

struct Checks {
    lines: Vec<String>,
    failures: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            lines: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            self.lines.push(format!("ok   {name}: {detail}"));
        } else {
            self.lines.push(format!("FAIL {name}: {detail}"));
            self.failures.push(format!("{name}: {detail}"));
        }
    }
}

fn write_file(files: &mut Vec<PathBuf>, path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    files.push(path.to_path_buf());
    Ok(())
}

fn csv_text(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Run the full suite under `cfg`, writing artifacts into `cfg.out_dir`.
pub fn run_report(cfg: &RunConfig) -> Result<ReportOutcome> {
    let out_dir = Path::new(&cfg.out_dir);
    std::fs::create_dir_all(out_dir)?;
    let mut checks = Checks::new();
    let mut files = Vec::new();
    let link = cfg.link();
    let n = cfg.n;
    let level = n as f64 + 1.0;
    let slice = HyperplaneSlice::standard(n);

    // --- minimizer location: damped Newton and gradient flow must agree ---
    let raw: Vec<f64> = (0..=n).map(|i| 0.55 + 0.9 * i as f64 / n as f64).collect();
    let start = normalize_to_slice(&ReebVector::new(raw)?, &slice)?;
    let newton = minimize_volume_with_guard(&link, &start, cfg.flow_boundary_guard)?;
    let opts = cfg.flow_options();
    let traj = run_flow(&link, &start, &opts)?;
    let flow_end = traj.final_reeb();
    let target = ReebVector::new(vec![1.0; n + 1])?;
    let dev = |v: &ReebVector| -> f64 {
        v.coeffs()
            .iter()
            .zip(target.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    checks.check(
        "minimizer.newton",
        dev(&newton) < 1e-6,
        format!(
            "Newton minimizer {newton}, max deviation {:.2e}",
            dev(&newton)
        ),
    );
    checks.check(
        "minimizer.flow",
        dev(&flow_end) < 1e-6 && traj.terminated_by == TerminationReason::GradientTolerance,
        format!(
            "flow limit {flow_end} ({:?}), max deviation {:.2e}",
            traj.terminated_by,
            dev(&flow_end)
        ),
    );
    {
        let mut rows = Vec::new();
        for (name, point) in [("newton", &newton), ("flow", &flow_end)] {
            let mut row = vec![name.to_string()];
            row.extend(point.coeffs().iter().map(|a| a.to_string()));
            row.push(volume(&link, point)?.to_string());
            rows.push(row);
        }
        let coords: Vec<String> = (0..=n).map(|i| format!("a{i}")).collect();
        let header = format!("method,{},volume", coords.join(","));
        write_file(
            &mut files,
            &out_dir.join("minimizer.csv"),
            &csv_text(&header, &rows),
        )?;
    }

    // --- properness along the boundary ray ---
    {
        let eps_list = [0.3, 0.1, 0.03, 0.01];
        let mut rows = Vec::new();
        let mut prev_vol = 0.0;
        let mut monotone = true;
        let round = round_sphere_volume(n);
        for (i, &eps) in eps_list.iter().enumerate() {
            let mut coeffs = vec![(level - eps) / n as f64; n + 1];
            coeffs[0] = eps;
            let point = ReebVector::new(coeffs)?;
            let vol = volume(&link, &point)?;
            let rel = vol / round;
            let oracle = 1.0 / (eps * ((level - eps) / n as f64).powi(n as i32));
            checks.check(
                &format!("properness.oracle[eps={eps}]"),
                (rel - oracle).abs() < 1e-6 * oracle,
                format!("relative volume {rel:.6} vs closed form {oracle:.6}"),
            );
            if i > 0 && vol <= prev_vol {
                monotone = false;
            }
            prev_vol = vol;
            rows.push(vec![
                eps.to_string(),
                vol.to_string(),
                rel.to_string(),
                oracle.to_string(),
            ]);
        }
        checks.check(
            "properness.monotone",
            monotone,
            "volume strictly increases toward the cone boundary".to_string(),
        );
        if n == 1 {
            let rel = rows[3][2].parse::<f64>().unwrap();
            checks.check(
                "properness.value[eps=0.01]",
                (rel - 50.251).abs() <= 1e-3,
                format!("relative volume {rel:.6} vs 50.251 +- 0.001"),
            );
        }
        write_file(
            &mut files,
            &out_dir.join("properness.csv"),
            &csv_text("eps,volume,relative_volume,oracle", &rows),
        )?;
    }

    // --- flow trajectory with entropy attached at n = 1 ---
    {
        let start = match n {
            1 => vec![0.5, 1.5],
            2 => vec![0.5, 1.0, 1.5],
            _ => vec![0.4, 0.8, 1.2, 1.6],
        };
        let traj = run_flow(&link, &ReebVector::new(start)?, &opts)?;
        let mut vol_down = true;
        let mut mu_up = true;
        for pair in traj.states.windows(2) {
            if pair[1].volume >= pair[0].volume + 1e-8 {
                vol_down = false;
            }
            if let (Some(a), Some(b)) = (pair[0].mu, pair[1].mu) {
                if b < a - 1e-8 {
                    mu_up = false;
                }
            }
        }
        checks.check(
            "flow.volume_monotone",
            vol_down,
            format!("{} states, volume strictly decreasing", traj.states.len()),
        );
        if n == 1 {
            checks.check(
                "flow.mu_monotone",
                mu_up,
                "mu non-decreasing along the trajectory".to_string(),
            );
        }
        let coords: Vec<String> = (0..=n).map(|i| format!("a{i}")).collect();
        let header = format!("t,{},volume,grad_norm,mu", coords.join(","));
        let rows: Vec<Vec<String>> = traj
            .states
            .iter()
            .map(|s| {
                let mut row = vec![s.t.to_string()];
                row.extend(s.reeb.iter().map(|a| a.to_string()));
                row.push(s.volume.to_string());
                row.push(s.grad_norm.to_string());
                row.push(fmt_opt(s.mu));
                row
            })
            .collect();
        write_file(
            &mut files,
            &out_dir.join("flow_trajectory.csv"),
            &csv_text(&header, &rows),
        )?;
        let mut panels = vec![Panel {
            title: "volume along the flow".into(),
            x_label: "t".into(),
            y_label: "volume".into(),
            series: vec![Series {
                label: "volume".into(),
                points: traj.states.iter().map(|s| (s.t, s.volume)).collect(),
            }],
        }];
        if n == 1 {
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
        write_file(
            &mut files,
            &out_dir.join("flow.svg"),
            &crate::svg::render(&panels),
        )?;
    }

    // --- soliton sweep (n = 1 machinery regardless of cfg.n) ---
    let link1 = if n == 1 {
        link.clone()
    } else {
        WeightedSphereLink::new(1)
    };
    {
        let y = TangentVector::new(vec![1.0, -1.0], 1e-12).unwrap();
        let mut rows = Vec::new();
        let mut all_ok = true;
        let mut min_curv_global = f64::INFINITY;
        let mut max_residual: f64 = 0.0;
        for i in 0..20 {
            let ratio = 1.0 + 3.0 * i as f64 / 19.0;
            let profile = solve_soliton(1.0, ratio)?;
            let residual = soliton_residual(&profile);
            let curvature = transverse_curvature(&profile);
            let k_min = curvature.iter().copied().fold(f64::INFINITY, f64::min);
            let (w0, w1) = profile.slice_weights();
            let mu = crate::entropy::mu_of_soliton(&profile)?;
            let mut ok = residual < 1e-10 && k_min > 0.0;
            if ratio > 1.0 {
                let fut = futaki(&link1, &ReebVector::new(vec![w0, w1])?, &y)?;
                ok &= profile.b().signum() == fut.signum();
            }
            all_ok &= ok;
            min_curv_global = min_curv_global.min(k_min);
            max_residual = max_residual.max(residual);
            rows.push(vec![
                ratio.to_string(),
                w0.to_string(),
                w1.to_string(),
                profile.b().to_string(),
                k_min.to_string(),
                residual.to_string(),
                mu.to_string(),
            ]);
        }
        checks.check(
            "soliton.sweep",
            all_ok,
            format!(
                "20 points, max residual {max_residual:.2e}, min transverse curvature \
                 {min_curv_global:.4}, Futaki signs consistent"
            ),
        );
        write_file(
            &mut files,
            &out_dir.join("soliton_sweep.csv"),
            &csv_text("ratio,w0,w1,b,k_min,residual,mu", &rows),
        )?;

        // one profile in full, at weight ratio 2
        let profile = solve_soliton(1.0, 2.0)?;
        let metric = soliton_metric(1.0, 2.0)?;
        let rows: Vec<Vec<String>> = profile
            .grid()
            .iter()
            .zip(profile.phi())
            .map(|(&x, &phi)| {
                vec![
                    x.to_string(),
                    phi.to_string(),
                    profile.curvature_at(x).to_string(),
                    metric.f_at(x).to_string(),
                ]
            })
            .collect();
        write_file(
            &mut files,
            &out_dir.join("soliton_profile.csv"),
            &csv_text("x,phi,K_T,f", &rows),
        )?;
        let grid: Vec<f64> = profile.grid().to_vec();
        let panels = vec![
            Panel {
                title: "momentum profile (weights 1:2)".into(),
                x_label: "x".into(),
                y_label: "phi".into(),
                series: vec![Series {
                    label: "phi".into(),
                    points: grid.iter().map(|&x| (x, profile.phi_at(x))).collect(),
                }],
            },
            Panel {
                title: "transverse curvature and potential".into(),
                x_label: "x".into(),
                y_label: "value".into(),
                series: vec![
                    Series {
                        label: "K_T".into(),
                        points: grid.iter().map(|&x| (x, profile.curvature_at(x))).collect(),
                    },
                    Series {
                        label: "f".into(),
                        points: grid.iter().map(|&x| (x, metric.f_at(x))).collect(),
                    },
                ],
            },
        ];
        write_file(
            &mut files,
            &out_dir.join("soliton_profile.svg"),
            &crate::svg::render(&panels),
        )?;
    }

    // --- entropy table ---
    {
        let mut rows = Vec::new();
        let mut run_case = |checks: &mut Checks,
                            name: String,
                            datum: EntropyDatum,
                            vol: f64,
                            mu: f64|
         -> Result<()> {
            let w = w_link(&datum)?;
            let wc = w_cone(&datum)?;
            let ratio = wc / w;
            let expect = cone_link_ratio(datum.n());
            let bound = entropy_volume_bound(vol, mu, datum.n());
            checks.check(
                &format!("entropy.cone_ratio[{name}]"),
                (ratio - expect).abs() < 1e-8 * expect.abs(),
                format!("cone/link {ratio:.12} vs {expect}"),
            );
            checks.check(
                &format!("entropy.volume_bound[{name}]"),
                bound,
                format!("V = {vol:.6}, mu = {mu:.6}"),
            );
            rows.push(vec![
                name,
                vol.to_string(),
                w.to_string(),
                mu.to_string(),
                ratio.to_string(),
                bound.to_string(),
            ]);
            Ok(())
        };
        for nn in 1..=2usize {
            let datum = EntropyDatum::round(nn);
            let vol = round_sphere_volume(nn);
            let mu = w_link(&datum)?;
            run_case(
                &mut checks,
                format!("round S{}", 2 * nn + 1),
                datum,
                vol,
                mu,
            )?;
        }
        for ratio in [1.5, 2.0, 3.0, 4.0] {
            let metric = soliton_metric(1.0, ratio)?;
            let (w0, w1) = metric.profile().slice_weights();
            let vol = volume(&link1, &ReebVector::new(vec![w0, w1])?)?;
            let datum = EntropyDatum::soliton(metric);
            let mu = w_link(&datum)?;
            let a = best_fit_a(&datum)?;
            checks.check(
                &format!("entropy.minimizer_constant[ratio={ratio}]"),
                (a - mu).abs() < 1e-6 * mu.abs(),
                format!("best-fit A {a:.9} vs mu {mu:.9}"),
            );
            run_case(&mut checks, format!("soliton 1:{ratio}"), datum, vol, mu)?;
        }
        write_file(
            &mut files,
            &out_dir.join("entropy.csv"),
            &csv_text("case,V,W,mu,cone_ratio,bound_ok", &rows),
        )?;
    }

    // --- Gaussian radial moments ---
    {
        let mut worst = 0.0f64;
        for k in 0..=8u32 {
            let exact = gaussian_moment(k);
            let numeric = radial_moment_numeric(2 * k + 1);
            worst = worst.max((numeric - exact).abs() / exact.max(1.0));
        }
        checks.check(
            "entropy.gaussian_moments",
            worst < 1e-10,
            format!("k <= 8, worst relative deviation {worst:.2e}"),
        );
    }

    // --- quadrature rule vs Monte Carlo oracle ---
    {
        let mut coeffs = vec![(level - 0.1) / n as f64; n + 1];
        coeffs[0] = 0.1;
        let near_boundary = coeffs;
        type Probe = (String, Box<dyn Fn(&[f64]) -> f64>);
        let probes: Vec<Probe> = vec![
            (
                "volume integrand near the boundary".to_string(),
                Box::new(move |u: &[f64]| {
                    near_boundary
                        .iter()
                        .zip(u)
                        .map(|(a, ui)| a * ui)
                        .sum::<f64>()
                        .powi(-(1 + n as i32))
                }),
            ),
            (
                "smooth quartic".to_string(),
                Box::new(|u: &[f64]| {
                    let s: f64 = u.iter().map(|ui| ui * ui).sum();
                    1.0 + s * s
                }),
            ),
        ];
        for (name, f) in probes {
            let rule = integrate_basic(&link, &f)?;
            let (mc, se) = mc_integrate(&link, &f, cfg.quad_mc_samples, cfg.quad_mc_seed)?;
            let ok = (rule - mc).abs() <= (4.0 * se).max(1e-9 * rule.abs());
            checks.check(
                &format!("quadrature.oracle[{name}]"),
                ok,
                format!("rule {rule:.9} vs mc {mc:.9} +- {se:.2e}"),
            );
        }
    }

    let passed = checks.failures.is_empty();
    let mut summary = String::new();
    let _ = writeln!(summary, "reebflow report (n = {n})");
    let _ = writeln!(summary, "config:");
    for line in cfg.serialize().lines() {
        let _ = writeln!(summary, "  {line}");
    }
    let _ = writeln!(summary);
    for line in &checks.lines {
        let _ = writeln!(summary, "{line}");
    }
    let _ = writeln!(
        summary,
        "{}",
        if passed {
            "PASS: all report assertions hold"
        } else {
            "FAIL: see lines above"
        }
    );
    write_file(&mut files, &out_dir.join("summary.txt"), &summary)?;
    Ok(ReportOutcome {
        passed,
        summary,
        failures: checks.failures,
        files,
    })
}
