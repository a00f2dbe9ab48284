//! fracvel: fractional velocities, local fractional derivatives, and
//! self-affine curve data from the command line.
//!
//! Every subcommand emits JSON by default (`--format csv` for tabular data,
//! `--out PATH` to write a file). `verify` runs the built-in criterion suite
//! and prints a pass/fail table. Exit codes: 0 success, 1 computation or
//! domain error, 2 usage error, 3 verification failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use fracvel::acceptance;
use fracvel::dyadic::DyadicRational;
use fracvel::expr::{parse_function, FunctionExpr};
use fracvel::ifs;
use fracvel::langevin::{self, Oscillation, PathSpec};
use fracvel::lfd::{self, QuadScheme, QuadratureConfig};
use fracvel::velocity::{self, EstimatorSchedule, Side};
use fracvel::{Error, SwapParity};

const DEFAULT_MAX_DEPTH: u32 = 64;

#[derive(Parser)]
#[command(
    name = "fracvel",
    version,
    about = "Fractional velocity estimation, local fractional derivatives, and singular curve data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; data commands default to json, verify to a plain table
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Forward,
    Backward,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Forward => Side::Forward,
            SideArg::Backward => Side::Backward,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Substitution,
    JacobiWeight,
}

impl From<SchemeArg> for QuadScheme {
    fn from(s: SchemeArg) -> QuadScheme {
        match s {
            SchemeArg::Substitution => QuadScheme::Substitution,
            SchemeArg::JacobiWeight => QuadScheme::JacobiWeight,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Derham,
    DerhamReparam,
    Neidinger,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Curve,
    Velocity,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for SwapParity {
    fn from(p: ParityArg) -> SwapParity {
        match p {
            ParityArg::Even => SwapParity::Even,
            ParityArg::Odd => SwapParity::Odd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OscArg {
    Alternating,
    RandomSign,
    Constant,
}

impl From<OscArg> for Oscillation {
    fn from(o: OscArg) -> Oscillation {
        match o {
            OscArg::Alternating => Oscillation::Alternating,
            OscArg::RandomSign => Oscillation::RandomSign,
            OscArg::Constant => Oscillation::Constant,
        }
    }
}

#[derive(clap::Args)]
struct ScheduleArgs {
    /// Largest scale of the geometric schedule
    #[arg(long, default_value_t = EstimatorSchedule::default().eps0)]
    eps0: f64,
    /// Scale shrink factor per level
    #[arg(long, default_value_t = EstimatorSchedule::default().ratio)]
    ratio: f64,
    /// Number of levels sampled
    #[arg(long, default_value_t = EstimatorSchedule::default().levels)]
    levels: u32,
    /// Half-width of the slope band classified as the target order
    #[arg(long, default_value_t = EstimatorSchedule::default().zero_band)]
    zero_band: f64,
    /// Residual below which accelerated quotients count as converged
    #[arg(long, default_value_t = EstimatorSchedule::default().value_tol)]
    value_tol: f64,
}

impl ScheduleArgs {
    fn build(&self) -> EstimatorSchedule {
        EstimatorSchedule {
            eps0: self.eps0,
            ratio: self.ratio,
            levels: self.levels,
            zero_band: self.zero_band,
            value_tol: self.value_tol,
        }
    }
}

#[derive(clap::Args)]
struct QuadArgs {
    /// Starting node count for the adaptive quadrature
    #[arg(long, default_value_t = QuadratureConfig::default().nodes)]
    nodes: usize,
    /// Endpoint-weight handling
    #[arg(long, value_enum, default_value_t = SchemeArg::Substitution)]
    scheme: SchemeArg,
}

impl QuadArgs {
    fn build(&self) -> QuadratureConfig {
        QuadratureConfig {
            nodes: self.nodes,
            scheme: self.scheme.into(),
            ..QuadratureConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a function expression at a point or on a uniform grid
    Eval {
        /// Function expression, e.g. "powser:0;1,0,0.5" or "derham(0.70710678)"
        #[arg(long = "fn", value_name = "EXPR")]
        func: String,
        /// Single evaluation point
        #[arg(long, conflicts_with = "grid")]
        x: Option<f64>,
        /// Number of grid cells on [from, to]; emits grid+1 rows
        #[arg(long)]
        grid: Option<u32>,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        /// Evaluate a derham(a) expression through exact dyadic arithmetic
        #[arg(long)]
        exact: bool,
    },
    /// Estimate the one-sided fractional velocity at a point
    Velocity {
        #[arg(long = "fn", value_name = "EXPR")]
        func: String,
        #[arg(long)]
        x: f64,
        /// Fractional order of the difference quotient
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Forward)]
        side: SideArg,
        #[command(flatten)]
        sched: ScheduleArgs,
    },
    /// Sweep the scale velocity of order 1-beta along the schedule
    ScaleVelocity {
        #[arg(long = "fn", value_name = "EXPR")]
        func: String,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Forward)]
        side: SideArg,
        /// Central-difference step as a fraction of each scale
        #[arg(long, default_value_t = 1.0 / 64.0)]
        deriv_step_frac: f64,
        #[command(flatten)]
        sched: ScheduleArgs,
    },
    /// Local fractional derivative at a point, with the velocity comparison
    Lfd {
        #[arg(long = "fn", value_name = "EXPR")]
        func: String,
        /// Base point
        #[arg(long)]
        a: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Forward)]
        side: SideArg,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Riemann-Liouville integral or derivative of fractional order
    Rl {
        /// Which operator to apply
        #[arg(long, value_enum)]
        op: RlOp,
        #[arg(long = "fn", value_name = "EXPR")]
        func: String,
        /// Terminal of the integration
        #[arg(long)]
        a: f64,
        /// Evaluation point
        #[arg(long)]
        x: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Forward)]
        side: SideArg,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Curve or velocity values of a self-affine family on a uniform grid
    Ifs {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Family parameter
        #[arg(long)]
        a: f64,
        /// Iteration depth for the level-n families
        #[arg(long)]
        depth: u32,
        /// Number of grid cells on [0, 1]; emits grid+1 rows
        #[arg(long)]
        grid: u32,
        #[arg(long, value_enum, default_value_t = QuantityArg::Curve)]
        quantity: QuantityArg,
        /// Velocity order; defaults to the family's critical order -log2(a)
        #[arg(long)]
        beta: Option<f64>,
        /// Which recursion levels use the swapped parameter (neidinger only)
        #[arg(long, value_enum, default_value_t = ParityArg::Even)]
        swap_parity: ParityArg,
        /// Emit each grid point's exact dyadic decomposition x_num / 2^x_exp
        #[arg(long)]
        dyadic_cols: bool,
    },
    /// Generate a fractional-order driven path and its scaling checks
    Langevin {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        steps: u32,
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value_t = 1.0)]
        noise_amp: f64,
        /// Constant drift coefficient
        #[arg(long, default_value_t = 0.0)]
        drift: f64,
        #[arg(long, value_enum, default_value_t = OscArg::Alternating)]
        oscillation: OscArg,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// Probe count for the path exponent fit
        #[arg(long, default_value_t = 9)]
        probes: u32,
    },
    /// Run the verification suite and print its pass/fail table
    Verify {
        /// Run only these criterion ids (repeatable)
        #[arg(long, value_name = "ID")]
        only: Vec<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RlOp {
    Integral,
    Derivative,
}

enum CliError {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Lib(Error::Parse { .. }) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn max_depth() -> Result<u32, CliError> {
    match std::env::var("FRACVEL_MAX_DEPTH") {
        Ok(s) => s.trim().parse::<u32>().map_err(|_| {
            CliError::Usage(format!(
                "FRACVEL_MAX_DEPTH must be an unsigned integer, got {s:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_DEPTH),
        Err(e) => Err(CliError::Usage(format!("FRACVEL_MAX_DEPTH: {e}"))),
    }
}

/// 17 significant digits: enough to round trip any f64 through text.
fn sig(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: &Option<PathBuf>, content: String) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut body = String::from(header);
    body.push('\n');
    for row in rows {
        body.push_str(&row);
        body.push('\n');
    }
    body
}

fn grid_points(grid: u32, from: f64, to: f64) -> Result<Vec<f64>, CliError> {
    if grid == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    if !(from < to) {
        return Err(CliError::Usage(format!(
            "--from {from} must be less than --to {to}"
        )));
    }
    Ok((0..=grid)
        .map(|i| from + (to - from) * i as f64 / grid as f64)
        .collect())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let format = cli.format;
    let out = cli.out;
    match cli.command {
        Command::Eval {
            func,
            x,
            grid,
            from,
            to,
            exact,
        } => {
            let expr = parse_function(&func)?;
            let points = match (x, grid) {
                (Some(x), None) => vec![x],
                (None, Some(n)) => grid_points(n, from, to)?,
                (None, None) => {
                    return Err(CliError::Usage("pass either --x or --grid".into()))
                }
                (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
            };
            let rows = if exact {
                let FunctionExpr::DeRham { a } = expr else {
                    return Err(CliError::Usage(
                        "--exact applies to derham(a) expressions only".into(),
                    ));
                };
                points
                    .iter()
                    .map(|&x| {
                        let xd = DyadicRational::from_f64(x)?;
                        Ok((x, ifs::derham_eval_exact(a, &xd)?))
                    })
                    .collect::<Result<Vec<_>, Error>>()?
            } else {
                let f = expr.to_real_function(max_depth()?)?;
                points
                    .iter()
                    .map(|&x| Ok((x, f.eval(x)?)))
                    .collect::<Result<Vec<_>, Error>>()?
            };
            let content = match format.unwrap_or(Format::Json) {
                Format::Csv => csv(
                    "x,value",
                    rows.iter().map(|(x, v)| format!("{},{}", sig(*x), sig(*v))),
                ),
                Format::Json => {
                    let rows: Vec<_> =
                        rows.iter().map(|(x, v)| json!({"x": x, "value": v})).collect();
                    format!(
                        "{}\n",
                        json!({"schema": 1, "op": "eval", "fn": expr.to_string(), "exact": exact, "rows": rows})
                    )
                }
            };
            emit(&out, content)?;
            Ok(0)
        }
        Command::Velocity {
            func,
            x,
            beta,
            side,
            sched,
        } => {
            let f = parse_function(&func)?.to_real_function(max_depth()?)?;
            let est =
                velocity::estimate_velocity(&f, x, beta, side.into(), &sched.build())?;
            let content = match format.unwrap_or(Format::Json) {
                Format::Csv => csv(
                    "eps,quotient",
                    est.samples
                        .iter()
                        .map(|(e, q)| format!("{},{}", sig(*e), sig(*q))),
                ),
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "schema": 1,
                        "op": "velocity",
                        "classification": est.classification.to_string(),
                        "value": est.value,
                        "fitted_slope": est.fitted_slope,
                        "residual": est.residual,
                        "side": est.side.to_string(),
                        "beta": beta,
                        "x": x,
                        "samples": est.samples,
                    })
                ),
            };
            emit(&out, content)?;
            Ok(0)
        }
        Command::ScaleVelocity {
            func,
            x,
            beta,
            side,
            deriv_step_frac,
            sched,
        } => {
            let f = parse_function(&func)?.to_real_function(max_depth()?)?;
            let schedule = sched.build();
            schedule.validate()?;
            let order = 1.0 - beta;
            let mut rows = Vec::with_capacity(schedule.levels as usize);
            for n in 0..schedule.levels {
                let eps = schedule.eps(n);
                let sigma = velocity::scale_velocity(
                    &f,
                    x,
                    eps,
                    order,
                    side.into(),
                    deriv_step_frac * eps,
                )?;
                rows.push((eps, sigma));
            }
            let content = match format.unwrap_or(Format::Json) {
                Format::Csv => csv(
                    "eps,sigma",
                    rows.iter().map(|(e, s)| format!("{},{}", sig(*e), sig(*s))),
                ),
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "schema": 1,
                        "op": "scale-velocity",
                        "beta": beta,
                        "order": order,
                        "x": x,
                        "rows": rows.iter().map(|(e, s)| json!({"eps": e, "sigma": s})).collect::<Vec<_>>(),
                    })
                ),
            };
            emit(&out, content)?;
            Ok(0)
        }
        Command::Lfd {
            func,
            a,
            beta,
            side,
            quad,
        } => {
            let f = parse_function(&func)?.to_real_function(max_depth()?)?;
            let q = quad.build();
            let result = lfd::kg_lfd(&f, a, beta, side.into(), &q)?;
            let equivalence = match lfd::equivalence_report(
                &f,
                a,
                beta,
                side.into(),
                &EstimatorSchedule::default(),
                &q,
            ) {
                Ok(r) => json!({
                    "velocity": r.velocity.value,
                    "lfd": r.lfd.value,
                    "gamma_ratio": r.gamma_ratio,
                }),
                Err(Error::RatioUndefined(reason)) => json!({"undefined": reason}),
                Err(e) => return Err(e.into()),
            };
            let content = match format.unwrap_or(Format::Json) {
                Format::Csv => csv(
                    "h,average",
                    result
                        .m_samples
                        .iter()
                        .map(|(h, m)| format!("{},{}", sig(*h), sig(*m))),
                ),
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "schema": 1,
                        "op": "lfd",
                        "classification": result.classification.to_string(),
                        "value": result.value,
                        "residual": result.residual,
                        "beta": beta,
                        "a": a,
                        "side": result.side.to_string(),
                        "m_samples": result.m_samples,
                        "equivalence": equivalence,
                    })
                ),
            };
            emit(&out, content)?;
            Ok(0)
        }
        Command::Rl {
            op,
            func,
            a,
            x,
            beta,
            side,
            quad,
        } => {
            let f = parse_function(&func)?.to_real_function(max_depth()?)?;
            let q = quad.build();
            let (name, value) = match op {
                RlOp::Integral => {
                    ("rl-integral", lfd::rl_integral(&f, a, x, beta, side.into(), &q)?)
                }
                RlOp::Derivative => (
                    "rl-derivative",
                    lfd::rl_derivative(&f, a, x, beta, side.into(), &q)?,
                ),
            };
            let content = match format.unwrap_or(Format::Json) {
                Format::Csv => csv("x,value", [format!("{},{}", sig(x), sig(value))]),
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "schema": 1,
                        "op": name,
                        "value": value,
                        "a": a,
                        "x": x,
                        "beta": beta,
                    })
                ),
            };
            emit(&out, content)?;
            Ok(0)
        }
        Command::Ifs {
            family,
            a,
            depth,
            grid,
            quantity,
            beta,
            swap_parity,
            dyadic_cols,
        } => {
            let cap = max_depth()?;
            if depth > cap {
                return Err(Error::Depth {
                    requested: depth,
                    max: cap,
                }
                .into());
            }
            let points = grid_points(grid, 0.0, 1.0)?;
            let parity: SwapParity = swap_parity.into();
            let beta_val = beta.unwrap_or_else(|| -a.log2());
            let mut rows = Vec::with_capacity(points.len());
            for &x in &points {
                let v = match (quantity, family) {
                    (QuantityArg::Curve, FamilyArg::Derham) => ifs::derham_eval_exact_f64(a, x)?,
                    (QuantityArg::Curve, FamilyArg::DerhamReparam) => {
                        ifs::derham_reparam_iterate(a, depth, x)?
                    }
                    (QuantityArg::Curve, FamilyArg::Neidinger) => {
                        ifs::neidinger_iterate_with(a, depth, x, parity)?
                    }
                    (QuantityArg::Velocity, FamilyArg::Derham) => {
                        ifs::derham_velocity_closed_form_real(a, x, beta_val)?.value
                    }
                    (QuantityArg::Velocity, FamilyArg::Neidinger) => {
                        ifs::neidinger_velocity_iterate_with(a, beta_val, depth, x, parity)?
                    }
                    (QuantityArg::Velocity, FamilyArg::DerhamReparam) => {
                        return Err(CliError::Usage(
                            "velocity grids cover the derham and neidinger families; use scale-velocity for iterates".into(),
                        ))
                    }
                };
                rows.push((x, v));
            }
            let family_name = match family {
                FamilyArg::Derham => "derham",
                FamilyArg::DerhamReparam => "derham_reparam",
                FamilyArg::Neidinger => "neidinger",
            };
            // Every grid point is an exact dyadic rational as an f64.
            let decompose = |x: f64| -> Result<(String, u32), CliError> {
                let d = DyadicRational::from_f64(x)?;
                Ok((d.numerator().to_string(), d.exponent()))
            };
            let num_json = |s: String| match s.parse::<u64>() {
                Ok(n) => json!(n),
                Err(_) => json!(s),
            };
            let content = match format.unwrap_or(Format::Json) {
                Format::Csv if dyadic_cols => {
                    let mut body = Vec::with_capacity(rows.len());
                    for (x, v) in &rows {
                        let (num, exp) = decompose(*x)?;
                        body.push(format!("{num},{exp},{},{}", sig(*x), sig(*v)));
                    }
                    csv("x_num,x_exp,x_real,value", body)
                }
                Format::Csv => csv(
                    "x,value",
                    rows.iter().map(|(x, v)| format!("{},{}", sig(*x), sig(*v))),
                ),
                Format::Json => {
                    let rows = rows
                        .iter()
                        .map(|(x, v)| {
                            if dyadic_cols {
                                let (num, exp) = decompose(*x)?;
                                Ok(json!({"x_num": num_json(num), "x_exp": exp, "x_real": x, "value": v}))
                            } else {
                                Ok(json!({"x": x, "value": v}))
                            }
                        })
                        .collect::<Result<Vec<_>, CliError>>()?;
                    format!(
                        "{}\n",
                        json!({
                            "schema": 1,
                            "op": "ifs",
                            "family": family_name,
                            "a": a,
                            "depth": depth,
                            "quantity": match quantity { QuantityArg::Curve => "curve", QuantityArg::Velocity => "velocity" },
                            "rows": rows,
                        })
                    )
                }
            };
            emit(&out, content)?;
            Ok(0)
        }
        Command::Langevin {
            beta,
            steps,
            dt,
            noise_amp,
            drift,
            oscillation,
            seed,
            x0,
            probes,
        } => {
            let spec = PathSpec {
                beta,
                steps,
                dt,
                drift: std::sync::Arc::new(move |_, _| drift),
                noise_amp,
                oscillation: oscillation.into(),
                seed,
                x0,
            };
            let path = langevin::generate_path(&spec)?;
            let exponent = match langevin::path_holder_exponent(&path, probes) {
                Ok(e) => json!(e),
                Err(Error::InsufficientData(reason)) => json!({ "undefined": reason }),
                Err(e) => return Err(e.into()),
            };
            let checks = [4u32, 16, 64]
                .iter()
                .map(|&n| {
                    let c = langevin::partition_scaling_check(noise_amp, beta, n)?;
                    Ok(json!({
                        "n": n,
                        "lhs": c.lhs,
                        "rhs": c.rhs,
                        "ratio": c.ratio,
                        "zero_input": c.zero_input,
                    }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let content = match format.unwrap_or(Format::Json) {
                Format::Csv => csv(
                    "t,x",
                    path.iter().map(|(t, x)| format!("{},{}", sig(*t), sig(*x))),
                ),
                Format::Json => format!(
                    "{}\n",
                    json!({
                        "schema": 1,
                        "op": "langevin",
                        "beta": beta,
                        "steps": steps,
                        "dt": dt,
                        "exponent": exponent,
                        "partition_checks": checks,
                        "path": path,
                    })
                ),
            };
            emit(&out, content)?;
            Ok(0)
        }
        Command::Verify { only } => {
            let ids: Vec<u32> = if only.is_empty() {
                (1..=12).collect()
            } else {
                for &id in &only {
                    if !(1..=12).contains(&id) {
                        return Err(CliError::Usage(format!(
                            "--only takes criterion ids 1..=12, got {id}"
                        )));
                    }
                }
                only
            };
            let results: Vec<_> = ids
                .iter()
                .map(|&id| acceptance::run_criterion(id).expect("ids validated above"))
                .collect();
            let all_pass = results.iter().all(|r| r.pass);
            let content = match format {
                None => {
                    let mut table = String::new();
                    for r in &results {
                        table.push_str(&r.to_string());
                        table.push('\n');
                    }
                    let passed = results.iter().filter(|r| r.pass).count();
                    table.push_str(&format!("{passed}/{} criteria pass\n", results.len()));
                    table
                }
                Some(Format::Csv) => csv(
                    "id,name,pass,runtime_ms",
                    results.iter().map(|r| {
                        format!(
                            "{:02},{},{},{:.3}",
                            r.id,
                            r.name,
                            r.pass,
                            r.runtime.as_secs_f64() * 1e3
                        )
                    }),
                ),
                Some(Format::Json) => {
                    let criteria: Vec<_> = results
                        .iter()
                        .map(|r| {
                            json!({
                                "id": r.id,
                                "name": r.name,
                                "pass": r.pass,
                                "detail": r.detail,
                                "runtime_ms": r.runtime.as_secs_f64() * 1e3,
                            })
                        })
                        .collect();
                    format!(
                        "{}\n",
                        json!({"schema": 1, "op": "verify", "criteria": criteria, "all_pass": all_pass})
                    )
                }
            };
            emit(&out, content)?;
            Ok(if all_pass { 0 } else { 3 })
        }
    }
}
