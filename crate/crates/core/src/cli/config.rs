//! Run configuration: one flat JSON document, overridable by flags.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dimension::{EvalMode, Grid, MassSource};
use crate::error::{Error, Result};
use crate::geometry::{zoo_system, Point, SystemSpec};
use crate::measures::MeasureModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Masses {
    Empirical,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    Metric,
    Topological,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    ExactShift,
    Greedy,
}

fn default_system() -> String {
    "full_shift_2sided".into()
}
fn default_measure() -> Value {
    Value::String("uniform".into())
}
fn default_q() -> Vec<f64> {
    vec![2.0]
}
fn default_half() -> f64 {
    0.5
}
fn default_count() -> usize {
    10
}
fn default_nmax() -> usize {
    20
}
fn default_samples() -> usize {
    100_000
}
fn default_centers() -> usize {
    8
}
fn default_orbit_lengths() -> Vec<usize> {
    vec![1_000, 10_000, 100_000]
}
fn default_c() -> f64 {
    1.0
}

/// Every field has a default, so `{}` is a valid configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_system")]
    pub system: String,
    #[serde(default)]
    pub params: Value,
    /// JSON object (`{"kind": "bernoulli", "p": [..]}`) or shorthand string.
    #[serde(default = "default_measure")]
    pub measure: Value,
    #[serde(default = "default_q")]
    pub q: Vec<f64>,
    #[serde(default = "default_half")]
    pub s: f64,
    #[serde(default = "default_half")]
    pub eps0: f64,
    #[serde(default = "default_half")]
    pub eps_factor: f64,
    #[serde(default = "default_count")]
    pub eps_count: usize,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "Mode::default_value")]
    pub mode: Mode,
    #[serde(default = "Masses::default_value")]
    pub masses: Masses,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing)]
    pub out: Option<String>,
    #[serde(default = "Format::default_value")]
    pub format: Format,
    #[serde(default = "default_centers")]
    pub centers: usize,
    #[serde(default)]
    pub theorems: Vec<String>,
    #[serde(default = "EntropyKind::default_value")]
    pub entropy: EntropyKind,
    #[serde(default = "CountKind::default_value")]
    pub count_mode: CountKind,
    #[serde(default = "default_orbit_lengths")]
    pub orbit_lengths: Vec<usize>,
    /// Homogeneity constant.
    #[serde(default = "default_c")]
    pub c: f64,
    /// Overrides which verdicts are expected to fail.
    #[serde(default)]
    pub expect_fail: Option<Vec<String>>,
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
}

impl Mode {
    fn default_value() -> Self {
        Mode::Exact
    }
}
impl Masses {
    fn default_value() -> Self {
        Masses::Empirical
    }
}
impl Format {
    fn default_value() -> Self {
        Format::Json
    }
}
impl EntropyKind {
    fn default_value() -> Self {
        EntropyKind::Metric
    }
}
impl CountKind {
    fn default_value() -> Self {
        CountKind::ExactShift
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config deserializes")
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.eps0, self.eps_factor, self.eps_count)
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidArgument("this run samples points and needs --seed".into()))
    }

    pub fn eval_mode(&self) -> Result<EvalMode> {
        match self.mode {
            Mode::Exact => Ok(EvalMode::Exact),
            Mode::Mc => Ok(EvalMode::MonteCarlo {
                samples: self.samples,
                seed: self.seed()?,
                masses: match self.masses {
                    Masses::Empirical => MassSource::Empirical,
                    Masses::Exact => MassSource::Exact,
                },
            }),
        }
    }

    pub fn system_spec(&self) -> Result<SystemSpec> {
        zoo_system(&self.system, &self.params)
    }

    pub fn measure_model(&self, sys: &SystemSpec) -> Result<MeasureModel> {
        parse_measure(sys, &self.measure)
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParams(format!("`{t}` is not a number")))
        })
        .collect()
}

/// Torus point from `"a/b"` or decimal coordinates separated by commas.
fn parse_point(sys: &SystemSpec, s: &str) -> Result<Point> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.iter().all(|p| p.contains('/')) {
        let mut nums = Vec::new();
        let mut den = None;
        for p in &parts {
            let (a, b) = p.split_once('/').unwrap();
            let a: i64 = a.parse().map_err(|_| Error::InvalidParams(format!("bad numerator in `{p}`")))?;
            let b: i64 = b.parse().map_err(|_| Error::InvalidParams(format!("bad denominator in `{p}`")))?;
            if den.map_or(false, |d| d != b) {
                return Err(Error::InvalidParams("rational coordinates need a common denominator".into()));
            }
            den = Some(b);
            nums.push(a);
        }
        Point::rational(&nums, den.unwrap())
    } else {
        let x = parse_numbers(s)?;
        let p = Point::torus(&x)?;
        sys.check_point(&p)?;
        Ok(p)
    }
}

fn orbit_start(sys: &SystemSpec, v: Option<&Value>) -> Result<Point> {
    let d = sys.torus_dim().ok_or_else(|| {
        Error::InvalidParams("periodic measures from a start point need a torus system".into())
    })?;
    match v {
        None | Some(Value::Null) => Point::torus(&vec![0.0; d]),
        Some(Value::String(s)) => parse_point(sys, s),
        Some(v) => {
            let x: Vec<f64> = serde_json::from_value(v.clone())
                .map_err(|e| Error::InvalidParams(format!("bad point: {e}")))?;
            Point::torus(&x)
        }
    }
}

const MAX_PERIOD: usize = 1_000_000;

/// Builds a measure from a JSON object or a shorthand such as
/// `uniform`, `bernoulli:0.7,0.3`, `markov:0.9,0.1;0.4,0.6`, `lebesgue`,
/// `periodic:1/3` or `dirac:0,0`.
pub fn parse_measure(sys: &SystemSpec, v: &Value) -> Result<MeasureModel> {
    match v {
        Value::String(s) => {
            let (kind, arg) = match s.split_once(':') {
                Some((k, a)) => (k.trim(), Some(a.trim())),
                None => (s.trim(), None),
            };
            match (kind, arg) {
                ("uniform", None) => {
                    let m = sys.alphabet().ok_or_else(|| {
                        Error::InvalidParams("uniform measures live on full shifts".into())
                    })?;
                    MeasureModel::bernoulli(sys, vec![1.0 / m as f64; m as usize])
                }
                ("bernoulli", Some(a)) => MeasureModel::bernoulli(sys, parse_numbers(a)?),
                ("markov", Some(a)) => {
                    let rows = a.split(';').map(parse_numbers).collect::<Result<Vec<_>>>()?;
                    MeasureModel::markov(sys, rows)
                }
                ("lebesgue", None) => MeasureModel::lebesgue(sys),
                ("periodic", a) => {
                    let x0 = orbit_start(sys, a.map(|s| Value::String(s.into())).as_ref())?;
                    MeasureModel::periodic_from_point(sys, &x0, MAX_PERIOD)
                }
                ("dirac", a) => {
                    let x0 = orbit_start(sys, a.map(|s| Value::String(s.into())).as_ref())?;
                    MeasureModel::dirac(sys, x0)
                }
                _ => Err(Error::InvalidParams(format!("unknown measure shorthand `{s}`"))),
            }
        }
        Value::Object(o) => {
            let kind = o
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::InvalidParams("measure object needs a `kind`".into()))?;
            let field = |name: &str| {
                o.get(name)
                    .cloned()
                    .ok_or_else(|| Error::InvalidParams(format!("{kind} measure needs `{name}`")))
            };
            let de = |e: serde_json::Error| Error::InvalidParams(e.to_string());
            match kind {
                "uniform" | "lebesgue" => parse_measure(sys, &Value::String(kind.into())),
                "bernoulli" => MeasureModel::bernoulli(sys, serde_json::from_value(field("p")?).map_err(de)?),
                "markov" => MeasureModel::markov(sys, serde_json::from_value(field("transition")?).map_err(de)?),
                "periodic" => {
                    let x0 = orbit_start(sys, o.get("x0"))?;
                    MeasureModel::periodic_from_point(sys, &x0, MAX_PERIOD)
                }
                "dirac" => {
                    let x0 = orbit_start(sys, o.get("x0"))?;
                    MeasureModel::dirac(sys, x0)
                }
                other => Err(Error::InvalidParams(format!("unknown measure kind `{other}`"))),
            }
        }
        _ => Err(Error::InvalidParams("measure must be a string or an object".into())),
    }
}
