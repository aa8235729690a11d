use std::f64::consts::FRAC_PI_3;
use std::path::Path;

use serde::Serialize;

use levycap::casebook::{self, CaseReport};
use levycap::criterion::{condition_e_check, criterion_integral, fubini_check};
use levycap::equilibrium::{capacity_estimate, min_energy, CapacityControls, SolverControls};
use levycap::gauge::{g_gamma, g_gamma_trace, GaugeQuery, RingTrace};
use levycap::measure::{
    chi_energy_with, energy, gauge_kernel, riesz_kernel, signed_chi_energies_with, DiscreteMeasure, KernelMatrix,
};
use levycap::montecarlo::{mc_chi_check, mc_chi_energy, mc_image_riesz_energy, sample_path, McConfig, McEstimate};
use levycap::{DiagonalPolicy, ExponentValue, GaugeControls, GaugeValue, MeasureFile, SetGrid, SignPart, Triplet};

use crate::output::{cell, CliError, Output};
use crate::{CaseArg, CheckArg, Command, PolicyArg, SimMode};

type Res<T> = Result<T, CliError>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: levycap::Result<T>) -> Res<T> {
    r.map_err(|e| match e {
        levycap::Error::Config { field, message } => CliError::Lib(levycap::Error::Config {
            field,
            message: format!("{} ({message})", path.display()),
        }),
        other => CliError::Lib(other),
    })
}

fn load_spec(path: &Path) -> Res<Triplet> {
    in_file(path, Triplet::parse(&read(path)?))
}

fn load_measure(path: &Path) -> Res<DiscreteMeasure<f64>> {
    in_file(path, MeasureFile::<f64>::parse(&read(path)?))
}

fn seed(flag: u64) -> Res<u64> {
    match std::env::var("LEVYCAP_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("LEVYCAP_SEED: `{v}` is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn parse_sign(s: &str) -> Res<SignPart> {
    Ok(s.parse::<SignPart>()?)
}

/// `a:b:step`, inclusive of `b` up to rounding.
pub fn parse_range(s: &str) -> Res<Vec<f64>> {
    let bad = || CliError::usage(format!("range `{s}`: expected a:b:step with step > 0 and a ≤ b"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [a, b, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0 && a <= b && a.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(CliError::usage(format!("range `{s}` has more than 10^6 points")));
    }
    Ok((0..=n).map(|k| a + k as f64 * step).collect())
}

/// Mutually exclusive kernel selectors: `riesz:β` or `gauge:sign:γ`.
pub enum KernelChoice {
    Riesz(f64),
    Gauge(SignPart, f64),
}

pub fn parse_kernel(s: &str) -> Res<KernelChoice> {
    let bad = || CliError::usage(format!("kernel `{s}`: expected riesz:β or gauge:sign:γ"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        ["riesz", beta] => Ok(KernelChoice::Riesz(beta.parse().map_err(|_| bad())?)),
        ["gauge", sign, gamma] => Ok(KernelChoice::Gauge(parse_sign(sign)?, gamma.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn build_kernel(
    choice: &KernelChoice,
    spec: Option<&Triplet>,
    mu: &DiscreteMeasure<f64>,
    policy: DiagonalPolicy<f64>,
    controls: &GaugeControls,
) -> levycap::Result<KernelMatrix<f64>> {
    match *choice {
        KernelChoice::Riesz(beta) => riesz_kernel(beta, mu.atoms(), policy),
        KernelChoice::Gauge(sign, gamma) => {
            let spec = spec.ok_or_else(|| levycap::Error::config("spec", "gauge kernels need --spec"))?;
            gauge_kernel(spec, gamma, sign, mu.atoms(), policy, controls)
        }
    }
}

fn policy_for(p: PolicyArg, mu: &DiscreteMeasure<f64>) -> DiagonalPolicy<f64> {
    match p {
        PolicyArg::Natural => mu.natural_policy(),
        PolicyArg::Raw => DiagonalPolicy::Raw,
    }
}

#[derive(Serialize)]
struct ExponentPoint {
    xi: Vec<f64>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct GaugePoint {
    x: f64,
    value: GaugeValue,
}

#[derive(Serialize)]
struct RingDoc {
    x: f64,
    trace: RingTrace,
    partial_sums: Vec<f64>,
}

#[derive(Serialize)]
struct EnergyDoc {
    #[serde(with = "levycap::json::extended")]
    energy: f64,
}

#[derive(Serialize)]
struct ChiEnergyDoc {
    xi: Vec<f64>,
    chi: f64,
    plus: f64,
    minus: f64,
}

#[derive(Serialize)]
struct PathDoc {
    seed: u64,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

fn batch_rows(e: &McEstimate) -> Vec<Vec<String>> {
    e.batch_means
        .iter()
        .enumerate()
        .map(|(i, m)| vec![i.to_string(), cell(*m)])
        .collect()
}

fn partial_sum_rows(sums: &[f64]) -> Vec<Vec<String>> {
    sums.iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), cell(*s)])
        .collect()
}

/// Runs one subcommand; returns the process exit status.
pub fn run(command: Command, out: &Output) -> Res<u8> {
    match command {
        Command::Exponent { spec, xi } => {
            let spec = load_spec(&spec)?;
            let d = spec.dim();
            if xi.len() % d != 0 {
                return Err(CliError::usage(format!("--xi: {} values do not split into {d}-vectors", xi.len())));
            }
            let points: Vec<ExponentPoint> = xi
                .chunks(d)
                .map(|v| {
                    let ExponentValue { re, im } = spec.exponent(v)?;
                    Ok(ExponentPoint { xi: v.to_vec(), re, im })
                })
                .collect::<levycap::Result<_>>()?;
            let rows = points
                .iter()
                .map(|p| vec![cell(p.xi[0]), cell(p.re), cell(p.im)])
                .collect();
            if let [p] = &points[..] {
                out.emit(&ExponentValue { re: p.re, im: p.im }, &["xi", "re", "im"], rows)?;
            } else {
                out.emit(&points, &["xi", "re", "im"], rows)?;
            }
        }
        Command::Gauge {
            spec,
            gamma,
            sign,
            x,
            x_range,
            rings,
            ring,
        } => {
            let spec = load_spec(&spec)?;
            let sign = parse_sign(&sign)?;
            let controls = ring.controls();
            let query = |x: f64| GaugeQuery::new(&spec, gamma, x, sign).with_controls(controls.clone());
            match (x, x_range) {
                (Some(x), _) if rings => {
                    let trace = g_gamma_trace(&query(x))?;
                    let partial_sums = trace.partial_sums();
                    let rows = partial_sum_rows(&partial_sums);
                    out.emit(&RingDoc { x, trace, partial_sums }, &["ring", "partial_sum"], rows)?;
                }
                (Some(x), _) => {
                    let v = g_gamma(&query(x))?;
                    let rows = vec![vec![cell(x), cell(v.extended())]];
                    out.emit(&v, &["x", "value"], rows)?;
                }
                (None, Some(r)) => {
                    let points: Vec<GaugePoint> = parse_range(&r)?
                        .into_iter()
                        .map(|x| Ok(GaugePoint { x, value: g_gamma(&query(x))? }))
                        .collect::<levycap::Result<_>>()?;
                    let rows = points
                        .iter()
                        .map(|p| vec![cell(p.x), cell(p.value.extended())])
                        .collect();
                    out.emit(&points, &["x", "value"], rows)?;
                }
                (None, None) => return Err(CliError::usage("one of --x or --x-range is required")),
            }
        }
        Command::Energy {
            measure,
            kernel,
            xi,
            spec,
            policy,
            ring,
        } => {
            let mu = load_measure(&measure)?;
            let spec = spec.as_deref().map(load_spec).transpose()?;
            let policy = policy_for(policy, &mu);
            if let Some(xi) = xi {
                let spec = spec.ok_or_else(|| CliError::usage("--xi needs --spec"))?;
                let chi = chi_energy_with(&spec, &xi, &mu, policy)?;
                let (plus, minus) = signed_chi_energies_with(&spec, &xi, &mu, policy)?;
                let rows = vec![
                    vec!["chi".into(), cell(chi)],
                    vec!["plus".into(), cell(plus)],
                    vec!["minus".into(), cell(minus)],
                ];
                out.emit(&ChiEnergyDoc { xi, chi, plus, minus }, &["quantity", "value"], rows)?;
            } else {
                let choice = parse_kernel(kernel.as_deref().unwrap_or_default())?;
                let k = build_kernel(&choice, spec.as_ref(), &mu, policy, &ring.controls())?;
                let e = energy(&k, &mu)?;
                out.emit(&EnergyDoc { energy: e }, &["quantity", "value"], vec![vec!["energy".into(), cell(e)]])?;
            }
        }
        Command::Capacity {
            kernel,
            spec,
            grid,
            schedule,
            measure,
            gap_tol,
            max_iter,
            restarts,
            seed: seed_flag,
            ring,
        } => {
            let choice = parse_kernel(&kernel)?;
            let spec = spec.as_deref().map(load_spec).transpose()?;
            let controls = ring.controls();
            let solver = SolverControls {
                max_iterations: max_iter,
                gap_tolerance: gap_tol,
                restarts,
                seed: seed(seed_flag)?,
            };
            let family = |mu: &DiscreteMeasure<f64>| build_kernel(&choice, spec.as_ref(), mu, mu.natural_policy(), &controls);
            if let Some(path) = measure {
                let mu = load_measure(&path)?;
                let r = min_energy(&family(&mu)?, &solver)?;
                let rows = vec![vec![mu.len().to_string(), cell(r.min_energy)]];
                out.emit(&r, &["n", "min_energy"], rows)?;
            } else {
                let grids = parse_schedule(&grid, &schedule)?;
                let report = capacity_estimate(
                    family,
                    &grids,
                    &CapacityControls {
                        solver,
                        ..Default::default()
                    },
                )?;
                let rows = report
                    .trace
                    .iter()
                    .map(|s| vec![s.n.to_string(), cell(s.min_energy)])
                    .collect();
                out.emit(&report, &["n", "min_energy"], rows)?;
            }
        }
        Command::Criterion {
            spec,
            measure,
            beta,
            check,
            gamma,
            sign,
            ring,
        } => {
            let spec = load_spec(&spec)?;
            let mu = load_measure(&measure)?;
            let controls = ring.controls();
            match check {
                CheckArg::Integral => {
                    let r = criterion_integral(&spec, &mu, beta, &controls)?;
                    let rows = partial_sum_rows(&r.partial_sums);
                    out.emit(&r, &["ring", "partial_sum"], rows)?;
                }
                CheckArg::Fubini => {
                    let gamma = gamma.unwrap_or(spec.dim() as f64 - beta);
                    let r = fubini_check(&spec, &mu, gamma, parse_sign(&sign)?, &controls)?;
                    let rows = vec![
                        vec!["iterated".into(), cell(r.iterated.extended())],
                        vec!["energy_of_gauge".into(), cell(r.energy_of_gauge)],
                    ];
                    out.emit(&r, &["side", "value"], rows)?;
                }
                CheckArg::ConditionE => {
                    let r = condition_e_check(&spec, &mu, beta, &controls)?;
                    let rows = vec![
                        vec!["minus_integral".into(), cell(r.minus_integral.extended())],
                        vec!["plus_energy".into(), cell(r.plus_energy)],
                    ];
                    out.emit(&r, &["quantity", "value"], rows)?;
                }
            }
        }
        Command::Simulate {
            spec,
            mode,
            measure,
            xi,
            t,
            s,
            beta,
            times,
            paths,
            batch_size,
            seed: seed_flag,
            antithetic,
        } => {
            let spec = load_spec(&spec)?;
            let config = McConfig {
                paths,
                seed: seed(seed_flag)?,
                antithetic,
                batch_size,
            };
            let need = |what: &str| CliError::usage(format!("--mode needs --{what}"));
            let mu = measure.as_deref().map(load_measure).transpose()?;
            match mode {
                SimMode::Energy => {
                    let r = mc_chi_energy(&spec, &xi.ok_or_else(|| need("xi"))?, &mu.ok_or_else(|| need("measure"))?, &config)?;
                    let rows = batch_rows(&r.estimate);
                    out.emit(&r, &["batch", "mean"], rows)?;
                }
                SimMode::Chi => {
                    let r = mc_chi_check(&spec, &xi.ok_or_else(|| need("xi"))?, t, s, &config)?;
                    let rows = r
                        .real
                        .batch_means
                        .iter()
                        .zip(&r.imag.batch_means)
                        .enumerate()
                        .map(|(i, (a, b))| vec![i.to_string(), cell(*a), cell(*b)])
                        .collect();
                    out.emit(&r, &["batch", "mean_re", "mean_im"], rows)?;
                }
                SimMode::Image => {
                    let r = mc_image_riesz_energy(
                        &spec,
                        &mu.ok_or_else(|| need("measure"))?,
                        beta.ok_or_else(|| need("beta"))?,
                        &config,
                    )?;
                    let rows = batch_rows(&r.estimate);
                    out.emit(&r, &["batch", "mean"], rows)?;
                }
                SimMode::Path => {
                    let times = times.ok_or_else(|| need("times"))?;
                    let values = sample_path(&spec, &times, config.seed, 0)?;
                    let rows = times
                        .iter()
                        .zip(&values)
                        .map(|(t, v)| vec![cell(*t), cell(v[0])])
                        .collect();
                    out.emit(
                        &PathDoc {
                            seed: config.seed,
                            times,
                            values,
                        },
                        &["t", "x"],
                        rows,
                    )?;
                }
            }
        }
        Command::Casebook {
            case,
            beta,
            k_terms,
            x,
            samples,
            spec,
            gamma,
            measure,
            ring,
        } => {
            let controls = ring.controls();
            let spec = match spec {
                Some(p) => load_spec(&p)?,
                None => Triplet::brownian(),
            };
            let mu = match measure {
                Some(p) => load_measure(&p)?,
                None => SetGrid::interval(0.0, 1.0, 8).measure()?,
            };
            let cases: Vec<CaseArg> = match case {
                CaseArg::All => vec![CaseArg::Audit, CaseArg::Drift, CaseArg::Poisson, CaseArg::Symmetric],
                c => vec![c],
            };
            let mut reports: Vec<CaseReport> = Vec::new();
            for c in cases {
                reports.push(match c {
                    CaseArg::Drift => casebook::drift_counterexample(beta, k_terms, &controls)?,
                    CaseArg::Poisson => {
                        let xs = x.clone().unwrap_or_else(|| vec![0.1, 0.5, FRAC_PI_3]);
                        casebook::poisson_example(beta, &xs, samples, &controls)?
                    }
                    CaseArg::Symmetric => {
                        let xs = x.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
                        casebook::symmetric_reduction_check(&spec, gamma, &xs, &controls)?
                    }
                    CaseArg::Audit => casebook::implication_audit(&spec, &mu, beta, &controls)?,
                    CaseArg::All => unreachable!(),
                });
            }
            let rows = reports
                .iter()
                .flat_map(|r| {
                    r.assertions.iter().map(move |a| {
                        vec![
                            r.case.clone(),
                            cell(r.beta),
                            a.id.clone(),
                            if a.passed { "pass" } else { "fail" }.to_string(),
                        ]
                    })
                })
                .collect();
            let header = ["case", "beta", "assertion", "status"];
            if let [r] = &reports[..] {
                out.emit(r, &header, rows)?;
            } else {
                out.emit(&reports, &header, rows)?;
            }
            if reports.iter().any(|r| !r.passed()) {
                for r in reports.iter().filter(|r| !r.passed()) {
                    eprintln!("casebook {}: {}", r.case, r.summary);
                }
                return Ok(4);
            }
        }
    }
    Ok(0)
}

fn parse_schedule(grid: &str, schedule: &[usize]) -> Res<Vec<SetGrid>> {
    let parts: Vec<&str> = grid.split(':').collect();
    let grids: Vec<SetGrid> = match parts[..] {
        ["cantor"] => schedule.iter().map(|&d| SetGrid::cantor(d as u32)).collect(),
        ["interval", a, b] => {
            let bad = || CliError::usage(format!("grid `{grid}`: bad endpoint"));
            let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            schedule.iter().map(|&n| SetGrid::interval(a, b, n)).collect()
        }
        _ => return Err(CliError::usage(format!("grid `{grid}`: expected interval:a:b or cantor"))),
    };
    for g in &grids {
        g.validate()?;
    }
    Ok(grids)
}
