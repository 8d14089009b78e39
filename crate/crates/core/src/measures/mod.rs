//! Invariant measures with exact ball-mass oracles, plus empirical measures.
//!
//! Exact kinds are Bernoulli and Markov measures on full shifts, Lebesgue
//! measure on the circle and the 2-torus, and uniform measures on periodic
//! orbits. Balls follow the system's membership rule (closed on the torus,
//! cylinders on shifts), so a point always lies in its own ball.

pub mod polygon;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, SymbolicPoint, SystemKind, SystemSpec, TorusPoint, POINT_TOL};

/// Denominator for sampled torus points: a safe prime with 2 as a primitive
/// root, so rational doubling-map orbits do not close up early.
pub const SAMPLE_DENOMINATOR: i64 = 4_611_686_018_427_377_339;

/// Which iterates a ball query constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Span {
    Ball,
    /// Bowen ball `B(x, n, eps)`: iterates `0..=n`.
    Bowen(usize),
    /// Bilateral Bowen ball `B(x, n1, n2, eps)`: iterates `-n2..=n1`.
    Bilateral(usize, usize),
}

impl Span {
    /// `(forward, backward)` iterate counts beyond time 0.
    pub fn iterates(self) -> (usize, usize) {
        match self {
            Span::Ball => (0, 0),
            Span::Bowen(n) => (n, 0),
            Span::Bilateral(n1, n2) => (n1, n2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallQuery {
    pub center: Point,
    pub radius: f64,
    pub span: Span,
}

impl BallQuery {
    pub fn ball(center: Point, radius: f64) -> Self {
        Self { center, radius, span: Span::Ball }
    }

    pub fn bowen(center: Point, n: usize, radius: f64) -> Self {
        Self { center, radius, span: Span::Bowen(n) }
    }

    pub fn bilateral(center: Point, n1: usize, n2: usize, radius: f64) -> Self {
        Self { center, radius, span: Span::Bilateral(n1, n2) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    Bernoulli { p: Vec<f64> },
    Markov { transition: Vec<Vec<f64>>, stationary: Vec<f64> },
    Lebesgue,
    Periodic { orbit: Vec<Point> },
    Empirical { points: Vec<Point> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureModel {
    pub kind: MeasureKind,
    pub system: SystemSpec,
    pub known_metric_entropy: Option<f64>,
    pub homogeneous: bool,
}

fn xlogx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

fn check_probability_vector(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidParams(format!("{what} has entries outside [0, 1]")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

/// Stationary vector of a stochastic matrix: solve `π (P - I) = 0`, `Σ π = 1`.
fn stationary_vector(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = p.len();
    // rows of the system A π = b, with A = (P - I)^T and the last row replaced by ones
    let mut a = vec![vec![0.0; m + 1]; m];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().take(m).enumerate() {
            *v = p[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for v in a[m - 1].iter_mut() {
        *v = 1.0;
    }
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-14 {
            return Err(Error::InvalidParams(
                "transition matrix has no unique stationary vector".into(),
            ));
        }
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=m {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Ok((0..m).map(|i| (a[i][m] / a[i][i]).max(0.0)).collect())
}

impl MeasureModel {
    /// Bernoulli measure on a full shift; the alphabet must match `p`.
    pub fn bernoulli(system: &SystemSpec, p: Vec<f64>) -> Result<Self> {
        let m = system
            .alphabet()
            .ok_or_else(|| Error::InvalidParams("bernoulli measures live on full shifts".into()))?;
        if p.len() != m as usize {
            return Err(Error::InvalidParams(format!(
                "probability vector has {} entries for alphabet {m}",
                p.len()
            )));
        }
        check_probability_vector(&p, "probability vector")?;
        let h = -p.iter().map(|&v| xlogx(v)).sum::<f64>();
        let uniform = p.iter().all(|&v| (v - 1.0 / m as f64).abs() < 1e-15);
        Ok(Self {
            kind: MeasureKind::Bernoulli { p },
            system: system.clone(),
            known_metric_entropy: Some(h),
            homogeneous: uniform,
        })
    }

    pub fn markov(system: &SystemSpec, transition: Vec<Vec<f64>>) -> Result<Self> {
        let m = system
            .alphabet()
            .ok_or_else(|| Error::InvalidParams("markov measures live on full shifts".into()))?
            as usize;
        if transition.len() != m || transition.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidParams(format!("transition matrix must be {m}x{m}")));
        }
        for (i, row) in transition.iter().enumerate() {
            check_probability_vector(row, &format!("transition row {i}"))?;
        }
        let pi = stationary_vector(&transition)?;
        for j in 0..m {
            let v: f64 = (0..m).map(|i| pi[i] * transition[i][j]).sum();
            if (v - pi[j]).abs() > 1e-10 {
                return Err(Error::InvalidParams("stationary vector did not converge".into()));
            }
        }
        let h = -(0..m)
            .map(|i| pi[i] * transition[i].iter().map(|&v| xlogx(v)).sum::<f64>())
            .sum::<f64>();
        let uniform = transition
            .iter()
            .flatten()
            .all(|&v| (v - 1.0 / m as f64).abs() < 1e-15);
        Ok(Self {
            kind: MeasureKind::Markov { transition, stationary: pi },
            system: system.clone(),
            known_metric_entropy: Some(h),
            homogeneous: uniform,
        })
    }

    /// Lebesgue measure on the circle (doubling map) or the 2-torus
    /// (toral automorphisms).
    pub fn lebesgue(system: &SystemSpec) -> Result<Self> {
        let h = match &system.kind {
            SystemKind::DoublingMap => std::f64::consts::LN_2,
            SystemKind::ToralAutomorphism { .. } => system.require_top_entropy()?,
            _ => {
                return Err(Error::InvalidParams(format!(
                    "Lebesgue measure is not invariant for {}",
                    system.name
                )))
            }
        };
        Ok(Self {
            kind: MeasureKind::Lebesgue,
            system: system.clone(),
            known_metric_entropy: Some(h),
            homogeneous: true,
        })
    }

    /// Uniform measure on a periodic orbit `[x, f x, ..., f^{p-1} x]`.
    pub fn periodic(system: &SystemSpec, orbit: Vec<Point>) -> Result<Self> {
        if orbit.is_empty() {
            return Err(Error::InvalidParams("periodic orbit is empty".into()));
        }
        for (i, x) in orbit.iter().enumerate() {
            system.check_point(x)?;
            let next = &orbit[(i + 1) % orbit.len()];
            if !maps_to(system, x, next)? {
                return Err(Error::InvalidParams(format!(
                    "orbit point {i} does not map to point {}",
                    (i + 1) % orbit.len()
                )));
            }
        }
        Ok(Self {
            kind: MeasureKind::Periodic { orbit },
            system: system.clone(),
            known_metric_entropy: Some(0.0),
            homogeneous: false,
        })
    }

    /// Follows the orbit of `x0` until it returns (torus systems only).
    pub fn periodic_from_point(system: &SystemSpec, x0: &Point, max_period: usize) -> Result<Self> {
        if x0.as_torus().is_none() {
            return Err(Error::Unsupported(
                "periodic orbits are detected on torus systems only; pass the orbit".into(),
            ));
        }
        let mut orbit = vec![x0.clone()];
        let mut x = system.apply(x0)?;
        while system.dist(&x, x0)? > POINT_TOL {
            if orbit.len() >= max_period {
                return Err(Error::InvalidParams(format!(
                    "no return within {max_period} steps"
                )));
            }
            orbit.push(x.clone());
            x = system.apply(&x)?;
        }
        Self::periodic(system, orbit)
    }

    /// Point mass at a fixed point.
    pub fn dirac(system: &SystemSpec, x: Point) -> Result<Self> {
        Self::periodic(system, vec![x])
    }

    pub fn empirical(system: &SystemSpec, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("empirical measure needs points".into()));
        }
        for x in &points {
            system.check_point(x)?;
        }
        Ok(Self {
            kind: MeasureKind::Empirical { points },
            system: system.clone(),
            known_metric_entropy: None,
            homogeneous: false,
        })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, MeasureKind::Empirical { .. })
    }

    pub fn describe(&self) -> String {
        let kind = match &self.kind {
            MeasureKind::Bernoulli { p } => format!("bernoulli{p:?}"),
            MeasureKind::Markov { transition, .. } => format!("markov{transition:?}"),
            MeasureKind::Lebesgue => "lebesgue".to_string(),
            MeasureKind::Periodic { orbit } => format!("periodic(p={})", orbit.len()),
            MeasureKind::Empirical { points } => format!("empirical(n={})", points.len()),
        };
        format!("{kind} on {}", self.system.describe())
    }

    /// Natural log of the exact mass of a (Bowen) ball; `-inf` for mass 0.
    pub fn log_ball_mass(&self, q: &BallQuery) -> Result<f64> {
        if !(q.radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius {} must be positive", q.radius)));
        }
        let sys = &self.system;
        sys.check_point(&q.center)?;
        let (fwd, bwd) = q.span.iterates();
        if bwd > 0 && !sys.is_invertible() {
            return Err(Error::Unsupported(format!(
                "bilateral Bowen balls need an invertible system, {} is not",
                sys.name
            )));
        }
        match &self.kind {
            MeasureKind::Bernoulli { p } => {
                let Some((lo, hi)) = sys.cylinder_range(q.radius, fwd, bwd)? else {
                    return Ok(0.0);
                };
                let word = symbolic(&q.center)?.range(lo, hi)?;
                Ok(word.iter().map(|&s| p[s as usize].ln()).sum())
            }
            MeasureKind::Markov { transition, stationary } => {
                let Some((lo, hi)) = sys.cylinder_range(q.radius, fwd, bwd)? else {
                    return Ok(0.0);
                };
                let word = symbolic(&q.center)?.range(lo, hi)?;
                let mut acc = stationary[word[0] as usize].ln();
                for w in word.windows(2) {
                    acc += transition[w[0] as usize][w[1] as usize].ln();
                }
                Ok(acc)
            }
            MeasureKind::Lebesgue => self.lebesgue_log_mass(q.radius, fwd, bwd),
            MeasureKind::Periodic { orbit } => {
                let mut hits = 0usize;
                for a in orbit {
                    if sys.within_bowen(&q.center, a, fwd, bwd, q.radius)? {
                        hits += 1;
                    }
                }
                Ok((hits as f64 / orbit.len() as f64).ln())
            }
            MeasureKind::Empirical { .. } => Err(Error::Unsupported(
                "empirical measures have no exact oracle; use empirical_ball_mass".into(),
            )),
        }
    }

    pub fn ball_mass(&self, q: &BallQuery) -> Result<f64> {
        self.log_ball_mass(q).map(f64::exp)
    }

    fn lebesgue_log_mass(&self, eps: f64, fwd: usize, bwd: usize) -> Result<f64> {
        let arc = (2.0 * eps).min(1.0).ln();
        match &self.system.kind {
            SystemKind::DoublingMap => {
                if fwd == 0 {
                    return Ok(arc);
                }
                if eps > 0.25 {
                    return Err(Error::Unsupported(format!(
                        "doubling-map Bowen balls need eps <= 1/4, got {eps}"
                    )));
                }
                Ok(arc - fwd as f64 * std::f64::consts::LN_2)
            }
            SystemKind::ToralAutomorphism { matrix } => {
                if fwd == 0 && bwd == 0 {
                    return Ok(2.0 * arc);
                }
                polygon::log_bowen_area(matrix, eps, fwd, bwd)
            }
            _ => unreachable!("lebesgue constructor restricts the system"),
        }
    }

    /// `n` independent draws, deterministic in `seed`. Symbolic samples
    /// carry windows of radius `window`.
    pub fn sample(&self, n: usize, seed: u64, window: usize) -> Result<Vec<Point>> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample size must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.system.alphabet().unwrap_or(0);
        match &self.kind {
            MeasureKind::Bernoulli { p } => {
                let cdf = cumulative(p);
                (0..n)
                    .map(|_| {
                        SymbolicPoint::from_fn(window, m, |_| draw(&cdf, rng.gen::<f64>()))
                            .map(Point::Symbolic)
                    })
                    .collect()
            }
            MeasureKind::Markov { transition, stationary } => {
                let start = cumulative(stationary);
                let rows: Vec<Vec<f64>> = transition.iter().map(|r| cumulative(r)).collect();
                (0..n)
                    .map(|_| {
                        let mut prev: Option<u8> = None;
                        SymbolicPoint::from_fn(window, m, |_| {
                            let cdf = match prev {
                                None => &start,
                                Some(s) => &rows[s as usize],
                            };
                            let s = draw(cdf, rng.gen::<f64>());
                            prev = Some(s);
                            s
                        })
                        .map(Point::Symbolic)
                    })
                    .collect()
            }
            MeasureKind::Lebesgue => {
                let d = self.system.torus_dim().unwrap_or(1);
                (0..n)
                    .map(|_| {
                        let num: Vec<i64> = (0..d)
                            .map(|_| rng.gen_range(0..SAMPLE_DENOMINATOR))
                            .collect();
                        TorusPoint::rational(&num, SAMPLE_DENOMINATOR).map(Point::Torus)
                    })
                    .collect()
            }
            MeasureKind::Periodic { orbit } => Ok((0..n)
                .map(|_| orbit[rng.gen_range(0..orbit.len())].clone())
                .collect()),
            MeasureKind::Empirical { .. } => Err(Error::Unsupported(
                "sampling needs an exact measure".into(),
            )),
        }
    }
}

fn symbolic(x: &Point) -> Result<&SymbolicPoint> {
    x.as_symbolic()
        .ok_or_else(|| Error::IncompatiblePoints("expected a symbolic point".into()))
}

fn maps_to(sys: &SystemSpec, x: &Point, y: &Point) -> Result<bool> {
    let fx = sys.apply(x)?;
    match (&fx, y) {
        (Point::Symbolic(a), Point::Symbolic(b)) => {
            let r = a.radius().min(b.radius()) as isize;
            Ok(a.range(-r, r)? == b.range(-r, r)?)
        }
        _ => Ok(sys.dist(&fx, y)? <= POINT_TOL),
    }
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> u8 {
    // last symbol with positive mass absorbs rounding in the cumulative sum
    let idx = cdf.iter().position(|&c| u < c).unwrap_or_else(|| {
        let last = cdf.last().copied().unwrap_or(0.0);
        cdf.iter().position(|&c| c >= last).unwrap_or(0)
    });
    idx as u8
}

/// `[x0, f x0, ..., f^{n-1} x0]`.
pub fn orbit(sys: &SystemSpec, x0: &Point, n: usize) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::InvalidArgument("orbit length must be >= 1".into()));
    }
    sys.check_point(x0)?;
    let mut out = Vec::with_capacity(n);
    out.push(x0.clone());
    for _ in 1..n {
        let next = sys.apply(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// Fraction of `points` inside the queried closed (Bowen) ball, counting
/// the center itself when it is one of the points.
pub fn empirical_ball_mass(points: &[Point], q: &BallQuery, sys: &SystemSpec) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empirical mass needs points".into()));
    }
    let (fwd, bwd) = q.span.iterates();
    let mut hits = 0usize;
    for y in points {
        if sys.within_bowen(&q.center, y, fwd, bwd, q.radius)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / points.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_shift() -> (SystemSpec, MeasureModel) {
        let sys = SystemSpec::full_shift(2).unwrap();
        let mu = MeasureModel::bernoulli(&sys, vec![0.5, 0.5]).unwrap();
        (sys, mu)
    }

    /// Brute force: sum the masses of all words of the given length that
    /// agree with `x` on the central coordinates.
    fn brute_cylinder_mass(p: &[f64], x: &SymbolicPoint, lo: isize, hi: isize) -> f64 {
        let len = (hi - lo + 1) as u32;
        let m = p.len() as u32;
        let mut total = 0.0;
        for code in 0..m.pow(len) {
            let mut c = code;
            let mut mass = 1.0;
            let mut agrees = true;
            for i in lo..=hi {
                let s = (c % m) as u8;
                c /= m;
                mass *= p[s as usize];
                agrees &= s == x.get(i).unwrap();
            }
            if agrees {
                total += mass;
            }
        }
        total
    }

    #[test]
    fn bernoulli_ball_examples() {
        let (_, mu) = uniform_shift();
        let x = Point::symbolic(vec![0, 1, 1, 0, 1, 0, 0], 2).unwrap();
        let m = mu.ball_mass(&BallQuery::ball(x.clone(), 0.5)).unwrap();
        assert!((m - 0.125).abs() < 1e-15);
        let s = x.as_symbolic().unwrap();
        assert!((brute_cylinder_mass(&[0.5, 0.5], s, -1, 1) - 0.125).abs() < 1e-15);
        let b = mu.ball_mass(&BallQuery::bowen(x, 2, 0.5)).unwrap();
        assert!((b - 0.03125).abs() < 1e-15);
    }

    #[test]
    fn bowen_factorization() {
        let sys = SystemSpec::full_shift(2).unwrap();
        let p = vec![0.7, 0.3];
        let mu = MeasureModel::bernoulli(&sys, p.clone()).unwrap();
        let x = mu.sample(1, 3, 12).unwrap().pop().unwrap();
        let s = x.as_symbolic().unwrap();
        for j in 0..4i32 {
            let eps = 2f64.powi(-j);
            let base = mu.ball_mass(&BallQuery::ball(x.clone(), eps)).unwrap();
            for n in 0..6usize {
                let bowen = mu.ball_mass(&BallQuery::bowen(x.clone(), n, eps)).unwrap();
                let extra: f64 = (j as isize + 1..=n as isize + j as isize)
                    .map(|i| p[s.get(i).unwrap() as usize])
                    .product();
                assert!((bowen - base * extra).abs() <= 1e-15 * bowen.max(1e-300) * 10.0);
                let brute = brute_cylinder_mass(&p, s, -(j as isize), n as isize + j as isize);
                assert!((bowen - brute).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lebesgue_and_periodic_examples() {
        let circle = SystemSpec::doubling_map();
        let leb = MeasureModel::lebesgue(&circle).unwrap();
        let x = Point::torus(&[0.3]).unwrap();
        assert!((leb.ball_mass(&BallQuery::ball(x.clone(), 0.1)).unwrap() - 0.2).abs() < 1e-15);
        let b = leb.ball_mass(&BallQuery::bowen(x.clone(), 3, 0.1)).unwrap();
        assert!((b - 0.2 / 8.0).abs() < 1e-15);
        assert!(leb.ball_mass(&BallQuery::bowen(x.clone(), 3, 0.3)).is_err());

        let rot = SystemSpec::periodic_orbit(4).unwrap();
        let orbit: Vec<Point> = (0..4).map(|k| Point::rational(&[k], 4).unwrap()).collect();
        let per = MeasureModel::periodic(&rot, orbit).unwrap();
        let m = per.ball_mass(&BallQuery::ball(Point::torus(&[0.25]).unwrap(), 0.1)).unwrap();
        assert_eq!(m, 0.25);
        assert_eq!(per.known_metric_entropy, Some(0.0));
    }

    #[test]
    fn periodic_from_rational_point() {
        let sys = SystemSpec::doubling_map();
        let mu = MeasureModel::periodic_from_point(&sys, &Point::rational(&[1], 3).unwrap(), 10).unwrap();
        match &mu.kind {
            MeasureKind::Periodic { orbit } => assert_eq!(orbit.len(), 2),
            _ => unreachable!(),
        }
        let bad = MeasureModel::periodic(&sys, vec![Point::torus(&[0.3]).unwrap()]);
        assert!(bad.is_err());
    }

    #[test]
    fn markov_constants() {
        let sys = SystemSpec::full_shift(2).unwrap();
        let mu = MeasureModel::markov(&sys, vec![vec![0.9, 0.1], vec![0.4, 0.6]]).unwrap();
        let MeasureKind::Markov { stationary, .. } = &mu.kind else { unreachable!() };
        assert!((stationary[0] - 0.8).abs() < 1e-12);
        let h = -(0.8 * (0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln())
            + 0.2 * (0.4f64 * 0.4f64.ln() + 0.6 * 0.6f64.ln()));
        assert!((mu.known_metric_entropy.unwrap() - h).abs() < 1e-12);
        let parry = MeasureModel::markov(&sys, vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(parry.homogeneous);
        assert!((parry.known_metric_entropy.unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(MeasureModel::markov(&sys, vec![vec![0.9, 0.2], vec![0.4, 0.6]]).is_err());
    }

    #[test]
    fn invalid_vectors() {
        let sys = SystemSpec::full_shift(2).unwrap();
        assert!(MeasureModel::bernoulli(&sys, vec![0.5, 0.6]).is_err());
        assert!(MeasureModel::bernoulli(&sys, vec![1.0]).is_err());
        assert!(MeasureModel::lebesgue(&sys).is_err());
    }

    #[test]
    fn degenerate_bernoulli_samples_zeros() {
        let sys = SystemSpec::full_shift(2).unwrap();
        let mu = MeasureModel::bernoulli(&sys, vec![1.0, 0.0]).unwrap();
        for x in mu.sample(100, 9, 5).unwrap() {
            assert!(x.as_symbolic().unwrap().symbols().iter().all(|&s| s == 0));
        }
    }

    #[test]
    fn lebesgue_sample_mean() {
        let mu = MeasureModel::lebesgue(&SystemSpec::doubling_map()).unwrap();
        let pts = mu.sample(100_000, 17, 0).unwrap();
        let mean: f64 = pts.iter().map(|p| p.as_torus().unwrap().coords()[0]).sum::<f64>() / 1e5;
        assert!((mean - 0.5).abs() < 0.005);
        assert_eq!(pts, mu.sample(100_000, 17, 0).unwrap());
    }

    #[test]
    fn periodic_sample_frequencies() {
        let sys = SystemSpec::doubling_map();
        let mu = MeasureModel::periodic_from_point(&sys, &Point::rational(&[1], 3).unwrap(), 10).unwrap();
        let pts = mu.sample(10_000, 5, 0).unwrap();
        let ones = pts.iter().filter(|p| p.as_torus().unwrap().coords()[0] < 0.5).count();
        assert!((ones as f64 / 1e4 - 0.5).abs() < 0.02);
    }

    #[test]
    fn orbit_examples() {
        let sys = SystemSpec::doubling_map();
        let o = orbit(&sys, &Point::rational(&[1], 3).unwrap(), 5).unwrap();
        let xs: Vec<f64> = o.iter().map(|p| p.as_torus().unwrap().coords()[0]).collect();
        assert_eq!(xs[0], xs[2]);
        assert_eq!(xs[1], xs[3]);
        assert!((xs[1] - 2.0 / 3.0).abs() < 1e-15);
        let cat = SystemSpec::toral_automorphism([[2, 1], [1, 1]]).unwrap();
        let zero = Point::torus(&[0.0, 0.0]).unwrap();
        assert!(orbit(&cat, &zero, 10).unwrap().iter().all(|p| *p == zero));
        let shift = SystemSpec::full_shift(2).unwrap();
        let x = Point::symbolic(vec![0, 1, 0], 2).unwrap();
        assert!(orbit(&shift, &x, 3).is_err());
    }

    #[test]
    fn empirical_examples() {
        let sys = SystemSpec::doubling_map();
        let pts: Vec<Point> = (0..10).map(|i| Point::torus(&[i as f64 / 10.0]).unwrap()).collect();
        let q = BallQuery::ball(pts[3].clone(), 0.01);
        assert_eq!(empirical_ball_mass(&pts, &q, &sys).unwrap(), 0.1);
        let q = BallQuery::ball(pts[3].clone(), 0.5);
        assert_eq!(empirical_ball_mass(&pts, &q, &sys).unwrap(), 1.0);

        let leb = MeasureModel::lebesgue(&sys).unwrap();
        let cloud = leb.sample(100_000, 1, 0).unwrap();
        let m = empirical_ball_mass(&cloud, &BallQuery::ball(Point::torus(&[0.42]).unwrap(), 0.1), &sys)
            .unwrap();
        assert!((m - 0.2).abs() < 0.006);
    }
}
