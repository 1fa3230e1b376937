//! ccheis: Carnot-Caratheodory distances, ball volumes, doubling ratios,
//! moments and Poisson kernels on generalized Heisenberg-type groups,
//! driven by flat TOML spec files.
//!
//! Exit codes: 0 success, 1 parse/validation failure, 2 numerical failure,
//! 3 verification failure.

mod point;
mod specfile;
mod sweep;

use ccheis_core::{distance, poisson, verify, volume, Error, GroupSpec, QuadConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ccheis",
    about = "Carnot-Caratheodory geometry on generalized Heisenberg-type groups",
    long_about = "Computes distances, ball volumes, doubling ratios, moment integrals and \
                  Poisson/heat kernels for groups described by flat TOML spec files with keys \
                  `blocks = [[a, k], ...]`, `m`, `b = [...]` and optional `u = \"standard-m1\"`.\n\n\
                  Point syntax: x blocks separated by `|`, components within a block separated \
                  by `,`, then `;` and the t components. Example (l = 2, m = 1): \"1,0|0.5,0.5;0.39\"."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML group spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Relative tolerance for quadrature.
    #[arg(long, default_value_t = 1e-7)]
    rel_tol: f64,
    /// Absolute tolerance floor for quadrature.
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Evaluation budget per integral.
    #[arg(long, default_value_t = 20_000_000)]
    max_evals: usize,
    /// Monte Carlo sample budget (>= 1000).
    #[arg(long, default_value_t = 100_000)]
    mc_samples: usize,
    /// RNG seed; all sampling is deterministic in (inputs, seed).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    out: OutFormat,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Carnot-Caratheodory distance d_B(g, o).
    Distance {
        #[command(flatten)]
        common: CommonArgs,
        /// The point g (see --help for the syntax).
        #[arg(long)]
        point: String,
        /// geodesic (coordinate map when available), sup (force the sup
        /// formula), or auto.
        #[arg(long, default_value = "auto")]
        method: String,
    },
    /// Ball volume |B(o, r)| with the closed-form comparison.
    Volume {
        #[command(flatten)]
        common: CommonArgs,
        /// Ball radius (ignored when --sweep is given).
        #[arg(long)]
        r: Option<f64>,
        /// theta (quadrature), mc (Monte Carlo), or both.
        #[arg(long, default_value = "theta")]
        method: String,
        /// Sweep "r=start:stop:count:lin|log".
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Doubling ratio |B(o, 2r)|/|B(o, r)|.
    Doubling {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Poisson kernel P_h(g) by the saddle asymptotic and/or quadrature.
    Poisson {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        point: String,
        /// Subordination parameter h (ignored when --sweep is given).
        #[arg(long)]
        h: Option<f64>,
        /// saddle, direct, shifted, or both (= all three).
        #[arg(long, default_value = "both")]
        method: String,
        /// Sweep "h=start:stop:count:lin|log".
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Moments D_nu of |Wx| over the unit ball.
    Moments {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        nu: Option<f64>,
        /// Sweep "nu=start:stop:count:lin|log".
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Run the acceptance sweep; exits 3 on any band violation.
    Verify {
        /// "all" or a comma-separated list of criterion ids (1-10).
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::QuadratureFailure(_)
            | Error::NoConvergence(_)
            | Error::BudgetExceeded(_) => CliError::Numerical(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Distance {
            common,
            point,
            method,
        } => {
            let (spec, cfg) = setup(&common)?;
            let g = point::parse(&spec, &point).map_err(CliError::Usage)?;
            let result = match method.as_str() {
                "auto" | "geodesic" => distance::distance(&spec, &g),
                "sup" => distance::DistanceResult {
                    d: distance::distance_sup(&spec, &g, &cfg),
                    theta: None,
                    method: distance::DistanceMethod::SupFormula,
                },
                other => {
                    return Err(CliError::Usage(format!(
                        "distance method {other:?} must be auto, geodesic or sup"
                    )))
                }
            };
            let hash = specfile::spec_hash(&spec);
            match common.out {
                OutFormat::Json => {
                    let theta = result.theta.as_ref().map(|t| t.0.clone());
                    emit_json(json!({
                        "schema": 1,
                        "command": "distance",
                        "spec_hash": hash,
                        "d": result.d,
                        "method": result.method.as_str(),
                        "theta": theta,
                        "d_homogeneous": distance::homogeneous_norm(&spec, &g),
                    }));
                }
                OutFormat::Csv => {
                    println!("spec_hash,command,d,method");
                    println!("{hash},distance,{:.17e},{}", result.d, result.method.as_str());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Volume {
            common,
            r,
            method,
            sweep,
        } => {
            let (spec, cfg) = setup(&common)?;
            let radii = sweep_values("r", r, &sweep)?;
            let hash = specfile::spec_hash(&spec);
            let mut rows = Vec::new();
            for &radius in &radii {
                let mut results: Vec<volume::VolumeResult> = Vec::new();
                if method == "theta" || method == "both" {
                    results.push(volume::ball_volume(&spec, radius, &cfg)?);
                }
                if method == "mc" || method == "both" {
                    results.push(volume::ball_volume_mc(&spec, radius, &cfg)?);
                }
                if results.is_empty() {
                    return Err(CliError::Usage(format!(
                        "volume method {method:?} must be theta, mc or both"
                    )));
                }
                let closed = volume::closed_form_estimate(&spec, radius);
                for v in results {
                    rows.push(json!({
                        "r": radius,
                        "method": v.method.as_str(),
                        "value": v.value,
                        "abs_error": v.abs_error,
                        "closed_form": closed,
                        "ratio": v.value / closed,
                    }));
                }
            }
            emit_rows(
                &common,
                "volume",
                &hash,
                "spec_hash,command,r,method,value,abs_error,closed_form,ratio",
                &rows,
                &["r", "method", "value", "abs_error", "closed_form", "ratio"],
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Doubling { common, r, sweep } => {
            let (spec, cfg) = setup(&common)?;
            let radii = sweep_values("r", r, &sweep)?;
            let hash = specfile::spec_hash(&spec);
            let reference = 4f64.powi((spec.n() + spec.m()) as i32);
            let mut rows = Vec::new();
            for &radius in &radii {
                let d = volume::doubling_ratio(&spec, radius, &cfg)?;
                rows.push(json!({
                    "r": radius,
                    "method": "theta-quadrature",
                    "value": d.ratio,
                    "abs_error": d.abs_error,
                    "closed_form": reference,
                    "ratio": d.ratio / reference,
                }));
            }
            emit_rows(
                &common,
                "doubling",
                &hash,
                "spec_hash,command,r,method,value,abs_error,closed_form,ratio",
                &rows,
                &["r", "method", "value", "abs_error", "closed_form", "ratio"],
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Poisson {
            common,
            point,
            h,
            method,
            sweep,
        } => {
            let (spec, cfg) = setup(&common)?;
            let g = point::parse(&spec, &point).map_err(CliError::Usage)?;
            let hs = sweep_values("h", h, &sweep)?;
            let hash = specfile::spec_hash(&spec);
            let mut rows = Vec::new();
            for &hv in &hs {
                let mut kernels: Vec<poisson::KernelValue> = Vec::new();
                match method.as_str() {
                    "saddle" => kernels.push(poisson::poisson_saddle(&spec, &g, hv)?),
                    "direct" => kernels.push(poisson::poisson_direct(&spec, &g, hv, &cfg)?),
                    "shifted" => {
                        let sad = poisson::saddle_solve(&spec, &g, hv)?;
                        kernels.push(poisson::poisson_shifted(&spec, &g, hv, &sad)?);
                    }
                    "both" => {
                        kernels.push(poisson::poisson_saddle(&spec, &g, hv)?);
                        kernels.push(poisson::poisson_direct(&spec, &g, hv, &cfg)?);
                        let sad = poisson::saddle_solve(&spec, &g, hv)?;
                        kernels.push(poisson::poisson_shifted(&spec, &g, hv, &sad)?);
                    }
                    other => {
                        return Err(CliError::Usage(format!(
                            "poisson method {other:?} must be saddle, direct, shifted or both"
                        )))
                    }
                }
                for k in kernels {
                    rows.push(json!({
                        "h": hv,
                        "method": k.method.as_str(),
                        "value": k.value,
                        "est_error": k.est_error,
                        "n_evals": k.n_evals,
                        "regime_warning": k.regime_warning,
                    }));
                }
            }
            emit_rows(
                &common,
                "poisson",
                &hash,
                "spec_hash,command,h,method,value,est_error,n_evals,regime_warning",
                &rows,
                &["h", "method", "value", "est_error", "n_evals", "regime_warning"],
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Moments { common, nu, sweep } => {
            let (spec, _) = setup(&common)?;
            let nus = sweep_values("nu", nu, &sweep)?;
            let hash = specfile::spec_hash(&spec);
            let mut rows = Vec::new();
            for &nv in &nus {
                let v = volume::moment_dnu(&spec, nv)?;
                rows.push(json!({
                    "nu": nv,
                    "value": v,
                    "ch_power": spec.c_h().powf(nv / 2.0),
                    "ratio": v / spec.c_h().powf(nv / 2.0),
                }));
            }
            emit_rows(
                &common,
                "moments",
                &hash,
                "spec_hash,command,nu,value,ch_power,ratio",
                &rows,
                &["nu", "value", "ch_power", "ratio"],
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed } => {
            let ids: Vec<usize> = if suite == "all" {
                (1..=10).collect()
            } else {
                suite
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|e| CliError::Usage(format!("bad criterion id {s:?}: {e}")))
                    })
                    .collect::<Result<_, _>>()?
            };
            let reports = verify::run_selected(&ids, seed)?;
            let mut all_ok = true;
            for rep in &reports {
                println!("{}", rep.line());
                all_ok &= rep.passed;
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}

fn setup(common: &CommonArgs) -> Result<(GroupSpec, QuadConfig), CliError> {
    if !(common.rel_tol > 0.0) || !(common.abs_tol > 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    if common.mc_samples < 1000 {
        return Err(CliError::Usage("mc_samples must be >= 1000".into()));
    }
    let spec = specfile::load(&common.spec).map_err(CliError::Usage)?;
    let cfg = QuadConfig {
        rel_tol: common.rel_tol,
        abs_tol: common.abs_tol,
        max_evals: common.max_evals,
        mc_samples: common.mc_samples,
        seed: common.seed,
    };
    Ok((spec, cfg))
}

fn sweep_values(
    param: &str,
    single: Option<f64>,
    sweep: &Option<String>,
) -> Result<Vec<f64>, CliError> {
    match (single, sweep) {
        (_, Some(text)) => {
            let s = sweep::parse(text).map_err(CliError::Usage)?;
            if s.param != param {
                return Err(CliError::Usage(format!(
                    "sweep parameter {:?} does not apply here (expected {param:?})",
                    s.param
                )));
            }
            Ok(s.values)
        }
        (Some(v), None) => Ok(vec![v]),
        (None, None) => Err(CliError::Usage(format!(
            "either --{param} or --sweep \"{param}=start:stop:count:scale\" is required"
        ))),
    }
}

fn emit_json(value: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("json"));
}

fn emit_rows(
    common: &CommonArgs,
    command: &str,
    hash: &str,
    csv_header: &str,
    rows: &[serde_json::Value],
    csv_fields: &[&str],
) {
    match common.out {
        OutFormat::Json => emit_json(json!({
            "schema": 1,
            "command": command,
            "spec_hash": hash,
            "results": rows,
        })),
        OutFormat::Csv => {
            println!("{csv_header}");
            for row in rows {
                let mut line = format!("{hash},{command}");
                for field in csv_fields {
                    let cell = match &row[field] {
                        serde_json::Value::Number(n) => {
                            // full precision so identical runs are bit-identical
                            if let Some(f) = n.as_f64() {
                                if n.is_u64() || n.is_i64() {
                                    format!("{n}")
                                } else {
                                    format!("{f:.17e}")
                                }
                            } else {
                                format!("{n}")
                            }
                        }
                        serde_json::Value::String(s) => s.clone(),
                        serde_json::Value::Bool(b) => b.to_string(),
                        other => other.to_string(),
                    };
                    line.push(',');
                    line.push_str(&cell);
                }
                println!("{line}");
            }
        }
    }
}
