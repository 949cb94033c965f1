use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use projhardy::chart::{ChartKind, Resolution};
use projhardy::domain::PwsDomain;
use projhardy::invariants::{contact_margin, eta};
use projhardy::measures::{reproduce, PolySection};
use projhardy::spec::DomainSpec;
use projhardy::{Error, C};

mod selftest;

const REPORT_VERSION: u32 = 1;

/// Column order of `eta --format csv`.
pub const ETA_CSV_HEADER: &str =
    "p1,p2,z1_re,z1_im,z2_re,z2_im,kappa,eta_weight,b1,b2,contact_margin,fit_residual";

#[derive(Parser)]
#[command(
    name = "projhardy",
    version,
    about = "Boundary kernels, edge invariants and Hardy norms on piecewise-smooth domains in CP^2"
)]
struct Cli {
    /// Nodes per periodic axis and Gauss order per bounded axis.
    #[arg(long, global = true, default_value_t = 32)]
    resolution: usize,
    /// Overrides the pass threshold of the command.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a domain description.
    CheckDomain {
        #[arg(value_name = "DOMAIN")]
        spec: PathBuf,
        /// Random points per local intersection check.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Ball radius for the local checks around edge points.
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
    },
    /// Integrate f against the boundary kernels and compare with f(tau).
    Reproduce {
        #[arg(value_name = "DOMAIN")]
        spec: PathBuf,
        /// Interior point, e.g. "0.2+0.1i,-0.3".
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        /// Holomorphic polynomial in z1, z2.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        f: String,
    },
    /// Edge invariants on a grid of edge chart parameters.
    Eta {
        #[arg(value_name = "DOMAIN")]
        spec: PathBuf,
        /// Edge index or member labels joined by '+'.
        #[arg(long, default_value = "0")]
        edge: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Built-in consistency suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = selftest::Suite::All)]
        suite: selftest::Suite,
        /// Deliberately break a component; the run must then fail.
        #[arg(long, value_enum)]
        inject: Option<selftest::Fault>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Report {
    version: u32,
    command: &'static str,
    spec_hash: Option<String>,
    resolution: Resolution,
    results: Vec<Value>,
    tolerances: Value,
    pass: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::NotHermitian { .. }
            | Error::Spec(_)
            | Error::InvalidParameter(_)
            | Error::InvalidChart(_) => 2,
            Error::Pole(_)
            | Error::NotInterior(_)
            | Error::PoleHyperplane { .. }
            | Error::NegativeEta(_)
            | Error::NotStronglyConvex { .. }
            | Error::DegenerateGradient { .. }
            | Error::NotTransverse(_)
            | Error::LeviNotPositive(_)
            | Error::RadiusTooLarge { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

enum Output {
    Report(Report),
    Csv(String, bool),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = Resolution::uniform(cli.resolution);
    let outcome = if cli.resolution == 0 {
        Err(input_error("--resolution must be positive"))
    } else {
        run(&cli, res)
    };
    let (text, pass) = match outcome {
        Ok(Output::Report(r)) => {
            let pass = r.pass;
            (
                serde_json::to_string_pretty(&r).expect("report serializes") + "\n",
                pass,
            )
        }
        Ok(Output::Csv(text, pass)) => (text, pass),
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: &Cli, res: Resolution) -> Result<Output, Failure> {
    match &cli.command {
        Command::CheckDomain {
            spec,
            samples,
            radius,
        } => check_domain(cli, res, spec, *samples, *radius),
        Command::Reproduce { spec, tau, f } => cmd_reproduce(cli, res, spec, tau, f),
        Command::Eta {
            spec,
            edge,
            grid,
            format,
        } => cmd_eta(cli, res, spec, edge, *grid, *format),
        Command::Selftest { suite, inject } => {
            let (results, tolerances, pass) =
                selftest::run(*suite, *inject, cli.seed, cli.tolerance)?;
            Ok(Output::Report(Report {
                version: REPORT_VERSION,
                command: "selftest",
                spec_hash: None,
                resolution: res,
                results,
                tolerances,
                pass,
            }))
        }
    }
}

fn load_spec(path: &Path) -> Result<(DomainSpec, PwsDomain, String), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let spec = DomainSpec::from_json(&text)?;
    let canonical = spec.to_canonical_json()?;
    let hash = hex::encode(Sha256::digest(canonical.as_bytes()));
    let domain = spec.build()?;
    Ok((spec, domain, hash))
}

fn complex(c: C) -> [f64; 2] {
    [c.re, c.im]
}

/// A few parameter points per edge chart.
fn edge_samples(d: &PwsDomain, edge: usize) -> Vec<Vec<f64>> {
    let chart = &d.edges[edge].chart;
    match chart.kind() {
        ChartKind::Torus2 { .. } => (0..4)
            .map(|k| {
                let a = std::f64::consts::FRAC_PI_2 * k as f64 + 0.3;
                vec![a, 2.0 * a + 0.1]
            })
            .collect(),
        _ => PwsDomain::chart_nodes(chart, Resolution::uniform(2))
            .into_iter()
            .map(|(p, _)| p)
            .chain(std::iter::once(vec![0.0; chart.dim()]))
            .collect(),
    }
}

fn check_domain(
    cli: &Cli,
    res: Resolution,
    path: &Path,
    samples: usize,
    radius: f64,
) -> Result<Output, Failure> {
    if samples == 0 || radius <= 0.0 {
        return Err(input_error("--samples and --radius must be positive"));
    }
    let (_, d, hash) = load_spec(path)?;
    let margin_tol = cli.tolerance.unwrap_or(0.0);
    let validation = d.validate(res);
    let mut results: Vec<Value> = validation
        .checks
        .iter()
        .map(|c| json!({"check": c.name, "pass": c.pass, "detail": c.detail}))
        .collect();
    let mut pass = validation.pass;
    for (ei, edge) in d.edges.iter().enumerate() {
        for p in edge_samples(&d, ei) {
            let z = match edge.chart.eval(&p) {
                Ok(pt) => pt.z,
                Err(e) => {
                    pass = false;
                    results.push(json!({"check": format!("edge:{ei}:sample"), "pass": false, "params": p, "detail": e.to_string()}));
                    continue;
                }
            };
            let local = d.check_local_intersection(&edge.members, &z, radius, samples, cli.seed);
            let (ok, detail) = match &local {
                Ok(r) => (
                    r.pass,
                    format!(
                        "{} of {} samples disagree with the local model",
                        r.mismatches, r.samples
                    ),
                ),
                Err(e) => (false, e.to_string()),
            };
            pass &= ok;
            results.push(json!({
                "check": format!("edge:{ei}:local_intersection"),
                "pass": ok,
                "params": p,
                "z": [complex(z[0]), complex(z[1])],
                "detail": detail,
            }));
            let (ok, margin, detail) =
                match d.check_strict_convexity(&edge.members, &z, 16, 24, Some(radius)) {
                    Ok(r) => (r.margin > margin_tol, Some(r.margin), String::new()),
                    Err(e) => (false, None, e.to_string()),
                };
            pass &= ok;
            results.push(json!({
                "check": format!("edge:{ei}:strict_convexity"),
                "pass": ok,
                "params": p,
                "margin": margin,
                "detail": detail,
            }));
        }
    }
    Ok(Output::Report(Report {
        version: REPORT_VERSION,
        command: "check-domain",
        spec_hash: Some(hash),
        resolution: res,
        results,
        tolerances: json!({"strictness_margin": margin_tol, "samples": samples, "radius": radius}),
        pass,
    }))
}

fn parse_tau(text: &str) -> Result<[C; 2], Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(input_error(format!(
            "--tau needs two comma-separated complex numbers, got `{text}`"
        )));
    }
    let one = |s: &str| {
        s.replace(' ', "")
            .parse::<C>()
            .map_err(|_| input_error(format!("cannot parse complex number `{s}`")))
    };
    Ok([one(parts[0])?, one(parts[1])?])
}

fn cmd_reproduce(
    cli: &Cli,
    res: Resolution,
    path: &Path,
    tau: &str,
    f: &str,
) -> Result<Output, Failure> {
    let (_, d, hash) = load_spec(path)?;
    let tau = parse_tau(tau)?;
    let f = PolySection::parse(f)?;
    let tol = cli.tolerance.unwrap_or(1e-4);
    let r = reproduce(&f, &tau, &d, res).map_err(|e| {
        let mut fail = Failure::from(e);
        if fail.code == 3 {
            fail.message.push_str(
                "; the boundary kernels have poles at tau whenever tau is not interior (it then lies on a tangent hyperplane of the boundary)",
            );
        }
        fail
    })?;
    let piece = |p: &projhardy::measures::PieceContribution| json!({"name": p.name, "value": complex(p.value), "error_estimate": p.error_estimate, "nodes": p.nodes});
    let pass = r.rel_err <= tol;
    Ok(Output::Report(Report {
        version: REPORT_VERSION,
        command: "reproduce",
        spec_hash: Some(hash),
        resolution: res,
        results: vec![json!({
            "f": f.poly().to_string(),
            "tau": [complex(tau[0]), complex(tau[1])],
            "value": complex(r.value),
            "expected": complex(r.expected),
            "per_piece": {
                "faces": r.faces.iter().map(piece).collect::<Vec<_>>(),
                "edges": r.edges.iter().map(piece).collect::<Vec<_>>(),
            },
            "abs_err": r.abs_err,
            "rel_err": r.rel_err,
            "pass": pass,
        })],
        tolerances: json!({"rel_err": tol}),
        pass,
    }))
}

fn select_edge(d: &PwsDomain, key: &str) -> Result<usize, Failure> {
    if let Ok(i) = key.parse::<usize>() {
        return if i < d.edges.len() {
            Ok(i)
        } else {
            Err(input_error(format!(
                "edge index {i} out of range ({} edges)",
                d.edges.len()
            )))
        };
    }
    let wanted: Vec<&str> = key.split('+').map(str::trim).collect();
    d.edges
        .iter()
        .position(|e| {
            e.members.len() == wanted.len()
                && e.members
                    .iter()
                    .all(|&m| wanted.contains(&d.hypersurfaces[m].label.as_str()))
        })
        .ok_or_else(|| input_error(format!("no edge with members `{key}`")))
}

struct EtaRow {
    params: Vec<f64>,
    z: [C; 2],
    kappa: f64,
    eta_weight: f64,
    b1: f64,
    b2: f64,
    margin: f64,
    residual: f64,
}

fn eta_grid_params(d: &PwsDomain, edge: usize, grid: usize) -> Vec<Vec<f64>> {
    let chart = &d.edges[edge].chart;
    match chart.kind() {
        ChartKind::Torus2 { .. } => {
            let step = 2.0 * std::f64::consts::PI / grid as f64;
            (0..grid * grid)
                .map(|k| vec![(k / grid) as f64 * step, (k % grid) as f64 * step])
                .collect()
        }
        _ => PwsDomain::chart_nodes(chart, Resolution::uniform(grid))
            .into_iter()
            .map(|(p, _)| p)
            .collect(),
    }
}

fn cmd_eta(
    cli: &Cli,
    res: Resolution,
    path: &Path,
    edge: &str,
    grid: usize,
    format: Format,
) -> Result<Output, Failure> {
    if grid == 0 {
        return Err(input_error("--grid must be positive"));
    }
    let (_, d, hash) = load_spec(path)?;
    let ei = select_edge(&d, edge)?;
    if d.edges[ei].chart.dim() != 2 {
        return Err(input_error("eta needs a two-parameter edge chart"));
    }
    let members = d.edges[ei].members.clone();
    let tol = cli.tolerance.unwrap_or(1e-8);
    let mut rows = Vec::new();
    for p in eta_grid_params(&d, ei, grid) {
        let z = d.edges[ei].chart.eval(&p)?.z;
        let e = eta(&d, &members, &z)?;
        rows.push(EtaRow {
            params: p,
            z,
            kappa: e.kappa,
            eta_weight: e.eta_weight,
            b1: e.b1,
            b2: e.b2,
            margin: contact_margin(e.b1, e.b2, 400),
            residual: e.fit.residual,
        });
    }
    let min_eta = rows
        .iter()
        .map(|r| r.eta_weight)
        .fold(f64::INFINITY, f64::min);
    let pass = min_eta > tol;
    match format {
        Format::Csv => {
            let mut out = String::from(ETA_CSV_HEADER);
            out.push('\n');
            for r in &rows {
                let fields = [
                    r.params[0],
                    r.params[1],
                    r.z[0].re,
                    r.z[0].im,
                    r.z[1].re,
                    r.z[1].im,
                    r.kappa,
                    r.eta_weight,
                    r.b1,
                    r.b2,
                    r.margin,
                    r.residual,
                ];
                let line: Vec<String> = fields.iter().map(|x| format!("{x:e}")).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            Ok(Output::Csv(out, pass))
        }
        Format::Json => Ok(Output::Report(Report {
            version: REPORT_VERSION,
            command: "eta",
            spec_hash: Some(hash),
            resolution: res,
            results: rows
                .iter()
                .map(|r| {
                    json!({
                        "params": r.params,
                        "z": [complex(r.z[0]), complex(r.z[1])],
                        "kappa": r.kappa,
                        "eta_weight": r.eta_weight,
                        "b1": r.b1,
                        "b2": r.b2,
                        "contact_margin": r.margin,
                        "fit_residual": r.residual,
                    })
                })
                .collect(),
            tolerances: json!({"eta_positive": tol, "grid": grid}),
            pass,
        })),
    }
}
