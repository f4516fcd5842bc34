use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use bregman_lab::functions::parse_function;
use bregman_lab::kernels::{parse_kernel, Kernel};
use bregman_lab::left::{left_prox, prox_bound_threshold, HullOpts, LeftHull, ProxBoundReport};
use bregman_lab::numerics::{ExtReal, ObjectiveFn, Point, Side, SolverOpts};
use bregman_lab::right::{right_env, right_prox_bound_threshold};
use bregman_lab::verify::run_suite;
use bregman_lab::Error;

#[derive(Parser)]
#[command(name = "bregman-lab", version, about = "Bregman proximal operators, envelopes and hulls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Envelopes, left hull and left prox on a grid, as CSV.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long = "fn", value_name = "NAME[:PARAMS]")]
        function: String,
        #[arg(long)]
        lambda: f64,
        /// `lo:hi:n` per axis, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Runs a verification suite: identities, counterexamples, phi, setvalued, smoothness or all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Bisects for the prox-boundedness threshold at a probe point.
    ScanThreshold {
        #[command(flatten)]
        common: Common,
        #[arg(long = "fn", value_name = "NAME[:PARAMS]")]
        function: String,
        /// Largest stepsize tried.
        #[arg(long, default_value_t = 10.0)]
        lambda: f64,
        /// Probe point, comma separated; defaults to a representative interior point.
        #[arg(long, allow_hyphen_values = true)]
        probe: Option<String>,
        #[arg(long, value_enum, default_value_t = Which::Left)]
        side: Which,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "NAME[:PARAMS]")]
    kernel: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
    /// Solver tolerance override, e.g. `tol_1d=1e-10`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VAL")]
    tol: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Left,
    Right,
}

enum Fail {
    Usage(String),
    Run(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::UnknownKernel(_)
            | Error::UnknownFunction(_)
            | Error::DimensionMismatch { .. } => Fail::Usage(e.to_string()),
            _ => Fail::Run(e.to_string()),
        }
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Run(e.to_string())
    }
}

impl From<csv::Error> for Fail {
    fn from(e: csv::Error) -> Self {
        Fail::Run(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Eval { common, function, lambda, grid } => eval(&common, &function, lambda, &grid),
        Command::Verify { suite, seed, out } => verify(&suite, seed, out.as_deref()),
        Command::ScanThreshold { common, function, lambda, probe, side } => {
            scan_threshold(&common, &function, lambda, probe.as_deref(), side)
        }
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn output(path: Option<&str>) -> Result<Box<dyn Write>, Fail> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| Fail::Run(format!("{p}: {e}")))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn solver_opts(common: &Common) -> Result<SolverOpts, Fail> {
    let mut o = SolverOpts { seed: common.seed, ..SolverOpts::default() };
    for kv in &common.tol {
        let (key, val) = kv.split_once('=').ok_or_else(|| Fail::Usage(format!("--tol expects key=val, got `{kv}`")))?;
        let bad = || Fail::Usage(format!("bad value in --tol {kv}"));
        let real = || -> Result<f64, Fail> {
            let v: f64 = val.parse().map_err(|_| bad())?;
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        match key {
            "tol_1d" => o.tol_1d = real()?,
            "tol_nd" => o.tol_nd = real()?,
            "cluster_tol" => o.cluster_tol = real()?,
            "escape" => o.escape = real()?,
            "margin_floor" => o.margin_floor = real()?,
            "n_starts" => o.n_starts = val.parse().map_err(|_| bad())?,
            "scan_points" => o.scan_points = val.parse().map_err(|_| bad())?,
            _ => return Err(Fail::Usage(format!("unknown tolerance key `{key}`"))),
        }
    }
    Ok(o)
}

fn check_lambda(lambda: f64) -> Result<(), Fail> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Fail::Usage(format!("lambda must be finite and positive, got {lambda}")))
    }
}

fn parse_grid(spec: &str, dim: usize) -> Result<Vec<Point>, Fail> {
    let mut axes = Vec::new();
    for part in spec.split(',') {
        let bad = || Fail::Usage(format!("grid axis `{part}` is not lo:hi:n"));
        let fields: Vec<&str> = part.split(':').collect();
        let [lo, hi, n] = fields.as_slice() else { return Err(bad()) };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        axes.push((0..n).map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect::<Vec<_>>());
    }
    if axes.len() != dim {
        return Err(Fail::Usage(format!("grid has {} axes, kernel dimension is {dim}", axes.len())));
    }
    let mut pts: Vec<Point> = vec![Vec::new()];
    for axis in &axes {
        pts = pts.into_iter().flat_map(|p| axis.iter().map(move |&t| [p.clone(), vec![t]].concat())).collect();
    }
    Ok(pts)
}

fn thread_pool() -> Result<rayon::ThreadPool, Fail> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("BREGMAN_LAB_THREADS") {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| Fail::Usage(format!("BREGMAN_LAB_THREADS={v}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Fail::Run(e.to_string()))
}

fn fmt_point(p: &[f64]) -> String {
    p.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

struct Row {
    env_left: String,
    env_right: String,
    hull_left: String,
    prox_set: String,
    status: String,
}

fn eval_row(k: &Kernel, f: &ObjectiveFn, g: Option<&ObjectiveFn>, hull: Option<&LeftHull>, lambda: f64, p: &[f64], o: &SolverOpts) -> Row {
    let (env_left, prox_set, status) = if k.domain.contains_interior(p) {
        match left_prox(k, f, lambda, p, o) {
            Ok(r) => (
                r.inf_value.to_string(),
                r.minimizers.iter().map(|m| fmt_point(m)).collect::<Vec<_>>().join(";"),
                r.status.to_string(),
            ),
            Err(e) => (String::new(), String::new(), format!("error: {e}")),
        }
    } else {
        (String::new(), String::new(), "prox_undefined".to_string())
    };
    let env_right = match g {
        Some(g) if k.domain.contains(p) => right_env(k, g, lambda, p, o).map(|v| v.to_string()).unwrap_or_default(),
        _ => String::new(),
    };
    let hull_left = match hull {
        Some(_) if !k.domain.contains(p) => ExtReal::POS_INF.to_string(),
        Some(h) => h.eval(p).map(|v| v.to_string()).unwrap_or_default(),
        None => String::new(),
    };
    Row { env_left, env_right, hull_left, prox_set, status }
}

fn eval(common: &Common, function: &str, lambda: f64, grid: &str) -> Result<bool, Fail> {
    check_lambda(lambda)?;
    let k = parse_kernel(&common.kernel)?;
    let f = parse_function(function, &k, Side::Left)?;
    let o = solver_opts(common)?;
    let pts = parse_grid(grid, k.dim())?;
    // not every function makes sense on both sides; missing columns stay empty
    let g = parse_function(function, &k, Side::Right).ok();
    let pool = thread_pool()?;
    let hull = LeftHull::new(&k, &f, lambda, HullOpts::default(), &o).ok();
    let rows: Vec<Row> = pool.install(|| pts.par_iter().map(|p| eval_row(&k, &f, g.as_ref(), hull.as_ref(), lambda, p, &o)).collect());

    let mut w = csv::Writer::from_writer(output(common.out.as_deref())?);
    let mut header: Vec<String> = (1..=k.dim()).map(|i| format!("x{i}")).collect();
    header.extend(["env_left", "env_right", "hull_left", "prox_set", "status"].map(String::from));
    w.write_record(&header)?;
    for (p, r) in pts.iter().zip(rows) {
        let mut rec: Vec<String> = p.iter().map(|t| t.to_string()).collect();
        rec.extend([r.env_left, r.env_right, r.hull_left, r.prox_set, r.status]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(true)
}

fn verify(suite: &str, seed: u64, out: Option<&str>) -> Result<bool, Fail> {
    let report = run_suite(suite, seed)?;
    let mut w = output(out)?;
    w.write_all(report.render().as_bytes())?;
    w.flush()?;
    Ok(report.passed())
}

fn summary(t: &ProxBoundReport, lambda_max: f64) -> String {
    if t.flagged {
        format!("unbounded already at lambda = {:e}: {}", t.threshold_high, t.certificate)
    } else if t.threshold_low == lambda_max {
        format!("no upper bound found <= lambda_max = {lambda_max}")
    } else {
        format!("threshold in [{}, {}]", t.threshold_low, t.threshold_high)
    }
}

fn scan_threshold(common: &Common, function: &str, lambda_max: f64, probe: Option<&str>, side: Which) -> Result<bool, Fail> {
    check_lambda(lambda_max)?;
    let k = parse_kernel(&common.kernel)?;
    let o = solver_opts(common)?;
    let probe: Point = match probe {
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Fail::Usage(format!("bad probe coordinate `{t}`"))))
            .collect::<Result<_, _>>()?,
        None => k
            .domain
            .representative_interior_point()
            .ok_or_else(|| Fail::Usage(format!("{k} has no interior point; pass --probe")))?,
    };
    let t = match side {
        Which::Left => prox_bound_threshold(&k, &parse_function(function, &k, Side::Left)?, &probe, lambda_max, &o)?,
        Which::Right => right_prox_bound_threshold(&k, &parse_function(function, &k, Side::Right)?, &probe, lambda_max, &o)?,
    };
    let mut w = csv::Writer::from_writer(output(common.out.as_deref())?);
    w.write_record(["lambda", "finite"])?;
    for (l, ok) in &t.trace {
        w.write_record([l.to_string(), ok.to_string()])?;
    }
    w.flush()?;
    eprintln!("{}", summary(&t, lambda_max));
    Ok(true)
}
