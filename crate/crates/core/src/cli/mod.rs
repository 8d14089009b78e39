//! Command-line front end: `zoo`, `dim`, `entropy` and `verify`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 computation
//! error, `10 + k` when `k` verdicts failed or passed unexpectedly.

pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::dimension::{self, Grid};
use crate::entropy::{self, CountMode, EntropyScan};
use crate::error::{Error, Result};
use crate::geometry::{self, snap_depth, Point, SystemSpec, ZOO_NAMES};
use crate::measures::MeasureModel;
use crate::verify::{self, Expectation, VerdictReport};

pub use config::{CountKind, EntropyKind, Format, Masses, Mode, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_FAILURES: i32 = 10;

/// CLI names and the verdict ids they produce.
pub const CHECKS: [(&str, &str); 11] = [
    ("monotone", "monotone_in_q"),
    ("sandwich", "local_dimension_sandwich"),
    ("entropy_bounds", "entropy_lipschitz_bounds"),
    ("combined", "combined_chain"),
    ("lyapunov", "lyapunov_dimension_formula"),
    ("expansive", "expansive_upper_bound"),
    ("expansive_q1", "expansive_upper_bound_q1"),
    ("max_entropy", "max_entropy_lower_bound"),
    ("homogeneity", "homogeneity"),
    ("hyperbolic", "hyperbolic_metric"),
    ("convergence", "correlation_convergence"),
];

/// Accepts either the short name or the verdict id.
pub fn check_id(name: &str) -> Option<&'static str> {
    CHECKS
        .iter()
        .find(|(short, id)| *short == name || *id == name)
        .map(|(_, id)| *id)
}

#[derive(Parser, Debug)]
#[command(name = "gfdim", version, about = "Generalized dimensions and entropies of zoo systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the zoo systems with their known constants.
    Zoo(Overrides),
    /// Scaling scans and dimension estimates for each q.
    Dim(Overrides),
    /// Metric (Bowen-ball) or topological entropy estimates.
    Entropy(Overrides),
    /// Run inequality checks, one JSON line per verdict.
    Verify(Overrides),
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    system: Option<String>,
    /// System parameters as a JSON object.
    #[arg(long)]
    params: Option<String>,
    /// JSON object or shorthand, e.g. `bernoulli:0.7,0.3`.
    #[arg(long)]
    measure: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    q: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    eps_factor: Option<f64>,
    #[arg(long)]
    eps_count: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_enum)]
    masses: Option<Masses>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    centers: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    theorems: Option<Vec<String>>,
    #[arg(long, value_enum)]
    entropy: Option<EntropyKind>,
    #[arg(long, value_enum)]
    count_mode: Option<CountKind>,
    #[arg(long, value_delimiter = ',')]
    orbit_lengths: Option<Vec<usize>>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    expect_fail: Option<Vec<String>>,
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

impl Overrides {
    fn resolve(self) -> std::result::Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| usage(format!("bad config: {e}")))?
            }
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        set!(system, q, s, eps0, eps_factor, eps_count, nmax, samples, mode, masses, format);
        set!(centers, theorems, entropy, count_mode, orbit_lengths, c);
        if let Some(p) = self.params {
            cfg.params = serde_json::from_str(&p).map_err(|e| usage(format!("bad --params: {e}")))?;
        }
        if let Some(m) = self.measure {
            cfg.measure = if m.trim_start().starts_with('{') {
                serde_json::from_str(&m).map_err(|e| usage(format!("bad --measure: {e}")))?
            } else {
                Value::String(m)
            };
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.tol.is_some() {
            cfg.tol = self.tol;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.expect_fail.is_some() {
            cfg.expect_fail = self.expect_fail;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        Ok(cfg)
    }
}

/// Validated inputs shared by the computing subcommands.
struct Prepared {
    sys: SystemSpec,
    mu: MeasureModel,
    grid: Grid,
}

fn prepare(cfg: &RunConfig) -> std::result::Result<Prepared, Failure> {
    let sys = cfg.system_spec().map_err(usage)?;
    let mu = cfg.measure_model(&sys).map_err(usage)?;
    let grid = cfg.grid().map_err(usage)?;
    cfg.eval_mode().map_err(usage)?;
    if cfg.mode == Mode::Mc && cfg.samples < 100 {
        return Err(usage("Monte-Carlo runs need --samples >= 100"));
    }
    if let Some(t) = cfg.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(usage("--tol must be a nonnegative number"));
        }
    }
    for name in cfg.theorems.iter().chain(cfg.expect_fail.iter().flatten()) {
        if check_id(name).is_none() {
            return Err(usage(format!("unknown check `{name}`")));
        }
    }
    Ok(Prepared { sys, mu, grid })
}

/// Symbolic window wide enough for the finest radius and `nmax` shifts.
fn sample_window(cfg: &RunConfig, grid: &Grid) -> usize {
    snap_depth(grid.finest()).max(0) as usize + cfg.nmax + 2
}

fn sample(cfg: &RunConfig, p: &Prepared, n: usize, stream: u64) -> Result<Vec<Point>> {
    let seed = cfg.seed()?.wrapping_add(stream);
    p.mu.sample(n, seed, sample_window(cfg, &p.grid))
}

const CENTER_STREAM: u64 = 0x9e37_79b9;
const CLOUD_STREAM: u64 = 0x85eb_ca6b;
const PAIR_STREAM: u64 = 0xc2b2_ae35;

fn run_zoo(cfg: &RunConfig) -> std::result::Result<String, Failure> {
    let systems: Vec<SystemSpec> = ZOO_NAMES
        .iter()
        .map(|n| geometry::zoo_system(n, &Value::Null))
        .collect::<Result<_>>()?;
    Ok(output::json_document(cfg, json!({ "systems": systems })))
}

fn run_dim(cfg: &RunConfig) -> std::result::Result<String, Failure> {
    let p = prepare(cfg)?;
    let mode = cfg.eval_mode()?;
    let scans = dimension::scan_many(&p.mu, &cfg.q, &p.grid, mode)?;
    let reports = scans
        .iter()
        .map(dimension::dimension_estimate)
        .collect::<Result<Vec<_>>>()?;
    Ok(match cfg.format {
        Format::Csv => {
            let mut s = output::csv_header(cfg);
            for r in &reports {
                let _ = writeln!(
                    s,
                    "# q={} d_lower={} d_upper={} d_ls={} residual={}",
                    r.q, r.d_lower, r.d_upper, r.d_ls, r.diagnostics.residual
                );
            }
            s.push_str("q,eps,value,kind\n");
            for scan in &scans {
                for line in scan.to_csv().lines().skip(1) {
                    s.push_str(line);
                    s.push('\n');
                }
            }
            s
        }
        Format::Json => output::json_document(cfg, json!({ "reports": reports, "scans": scans })),
    })
}

fn run_entropy(cfg: &RunConfig) -> std::result::Result<String, Failure> {
    let p = prepare(cfg)?;
    let eps = p.grid.values();
    let (report, scans): (_, Vec<EntropyScan>) = match cfg.entropy {
        EntropyKind::Metric => {
            let centers = sample(cfg, &p, cfg.centers.max(1), CENTER_STREAM)?;
            let cloud = match cfg.mode {
                Mode::Exact => None,
                Mode::Mc => Some(sample(cfg, &p, cfg.samples, CLOUD_STREAM)?),
            };
            let cloud = cloud.as_deref();
            let report = entropy::metric_entropy_estimate(&p.mu, &eps, cfg.nmax, &centers, cloud)?;
            let mut scans = Vec::new();
            for &e in &eps {
                for x in &centers {
                    scans.push(entropy::brin_katok_scan(&p.mu, x, e, cfg.nmax, cloud)?);
                }
            }
            (report, scans)
        }
        EntropyKind::Topological => {
            let cloud;
            let mode = match cfg.count_mode {
                CountKind::ExactShift => CountMode::ExactShift,
                CountKind::Greedy => {
                    cloud = sample(cfg, &p, cfg.samples, CLOUD_STREAM)?;
                    CountMode::Greedy(&cloud)
                }
            };
            let report = entropy::topological_entropy_estimate(&p.sys, &eps, cfg.nmax, mode)?;
            let scans = eps
                .iter()
                .map(|&e| entropy::generating_scan(&p.sys, e, cfg.nmax, mode))
                .collect::<Result<Vec<_>>>()?;
            (report, scans)
        }
    };
    Ok(match cfg.format {
        Format::Csv => {
            let mut s = output::csv_header(cfg);
            let _ = writeln!(
                s,
                "# h_lower={} h_upper={} h_ls={} center_spread={} eps_spread={}",
                report.h_lower, report.h_upper, report.h_ls, report.center_spread, report.eps_spread
            );
            s.push_str("eps,n,value,kind,censored\n");
            for scan in &scans {
                scan.write_rows(&mut s);
            }
            s
        }
        Format::Json => output::json_document(cfg, json!({ "report": report, "scans": scans })),
    })
}

fn first_q_above_one(cfg: &RunConfig) -> f64 {
    cfg.q.iter().copied().find(|&q| q > 1.0).unwrap_or(2.0)
}

fn pairs(points: Vec<Point>) -> Vec<(Point, Point)> {
    let mut it = points.into_iter();
    let mut out = Vec::new();
    while let (Some(a), Some(b)) = (it.next(), it.next()) {
        out.push((a, b));
    }
    out
}

fn run_check(cfg: &RunConfig, p: &Prepared, id: &str) -> Result<Vec<VerdictReport>> {
    let mode = cfg.eval_mode()?;
    let (mu, sys, grid, tol) = (&p.mu, &p.sys, &p.grid, cfg.tol);
    let q = first_q_above_one(cfg);
    let s = cfg.s;
    Ok(match id {
        "monotone_in_q" => vec![verify::verify_monotone_chain(mu, q, s, grid, mode, tol)?],
        "local_dimension_sandwich" => {
            let centers = sample(cfg, p, cfg.centers.max(1), CENTER_STREAM)?;
            let (alpha, beta) = verify::local_dimension_bounds(mu, &centers, grid, mode)?;
            vec![verify::verify_local_sandwich(mu, alpha, beta, q, s, grid, mode, tol)?]
        }
        "entropy_lipschitz_bounds" => vec![verify::verify_bk_bounds(mu, sys, q, s, grid, mode, None, tol)?],
        "combined_chain" => vec![verify::verify_combined_chain(mu, sys, q, s, grid, mode, None, tol)?],
        "lyapunov_dimension_formula" => verify::verify_lyapunov_dimension(sys, mu, &cfg.q, grid, mode, tol)?,
        "expansive_upper_bound" => {
            let mut qs: Vec<f64> = cfg.q.iter().copied().filter(|q| (0.0..1.0).contains(q)).collect();
            if qs.is_empty() {
                qs.push(s);
            }
            verify::verify_expansive_upper(mu, sys, &qs, grid, mode, None, tol)?
        }
        "expansive_upper_bound_q1" => {
            let q = cfg.q.iter().copied().find(|&q| q >= 1.0).unwrap_or(1.0);
            vec![verify::verify_expansive_upper_q1(mu, sys, q, grid, mode, None, tol)?]
        }
        "max_entropy_lower_bound" => vec![verify::verify_max_entropy_lower(mu, sys, q, grid, mode, tol)?],
        "homogeneity" => {
            let pts = pairs(sample(cfg, p, 2 * cfg.centers.max(1), PAIR_STREAM)?);
            vec![verify::verify_homogeneity(mu, grid, cfg.nmax, &pts, cfg.c)?]
        }
        "hyperbolic_metric" => {
            let pts = pairs(sample(cfg, p, 2 * cfg.centers.max(1), PAIR_STREAM)?);
            vec![geometry::check_hyperbolic_metric(sys, &pts)?]
        }
        "correlation_convergence" => {
            let x0 = sample(cfg, p, 1, CENTER_STREAM)?.remove(0);
            let tol = tol.unwrap_or(0.01);
            vec![dimension::correlation_convergence_test(sys, mu, &x0, grid, &cfg.orbit_lengths, tol)?]
        }
        other => return Err(Error::InvalidArgument(format!("unknown check `{other}`"))),
    })
}

fn run_verify(cfg: &RunConfig) -> std::result::Result<(String, usize), Failure> {
    if cfg.theorems.is_empty() {
        return Ok((String::new(), 0));
    }
    let p = prepare(cfg)?;
    let expected: Option<Vec<&str>> = cfg
        .expect_fail
        .as_ref()
        .map(|names| names.iter().filter_map(|n| check_id(n)).collect());
    let mut out = String::new();
    let _ = writeln!(out, "{}", json!({ "version": output::VERSION, "config": output::config_value(cfg) }));
    let mut failures = 0;
    for name in &cfg.theorems {
        let id = check_id(name).expect("validated in prepare");
        for mut v in run_check(cfg, &p, id)? {
            if let Some(list) = &expected {
                v.expectation = if list.contains(&v.theorem.as_str()) {
                    Expectation::ExpectedFail
                } else {
                    Expectation::Pass
                };
            }
            let outcome = v.outcome();
            failures += outcome.is_failure() as usize;
            let mut line = serde_json::to_value(&v).expect("verdict serializes");
            line["outcome"] = serde_json::to_value(outcome).expect("outcome serializes");
            let _ = writeln!(out, "{line}");
        }
    }
    Ok((out, failures))
}

fn execute(command: &str, cfg: &RunConfig) -> std::result::Result<i32, Failure> {
    let (text, failures) = match command {
        "zoo" => (run_zoo(cfg)?, 0),
        "dim" => (run_dim(cfg)?, 0),
        "entropy" => (run_entropy(cfg)?, 0),
        _ => run_verify(cfg)?,
    };
    if !text.is_empty() {
        output::emit(cfg, &text).map_err(|e| Failure::Compute(Error::InvalidArgument(e.to_string())))?;
    }
    Ok(if failures > 0 { EXIT_FAILURES + failures as i32 } else { EXIT_OK })
}

/// Parses `args` (including the program name), runs and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (name, overrides) = match cli.command {
        Command::Zoo(o) => ("zoo", o),
        Command::Dim(o) => ("dim", o),
        Command::Entropy(o) => ("entropy", o),
        Command::Verify(o) => ("verify", o),
    };
    let result = overrides.resolve().and_then(|cfg| match cfg.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(usage)?
            .install(|| execute(name, &cfg)),
        None => execute(name, &cfg),
    });
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            EXIT_COMPUTE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_resolve() {
        assert_eq!(check_id("lyapunov"), Some("lyapunov_dimension_formula"));
        assert_eq!(check_id("homogeneity"), Some("homogeneity"));
        assert_eq!(check_id("nope"), None);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["gfdim", "dim", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["gfdim", "dim", "--system", "nowhere"]), EXIT_USAGE);
        assert_eq!(run(["gfdim", "dim", "--mode", "mc"]), EXIT_USAGE);
        assert_eq!(run(["gfdim", "verify"]), EXIT_OK);
    }
}
