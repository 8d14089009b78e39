//! Phase spaces, metrics and the model systems.
//!
//! Two kinds of phase space are supported: the circle / 2-torus with the
//! wrap-around max-norm metric, and full shifts over a finite alphabet with
//! the base-2 metric `d(x, y) = 2^-min{|i| : x_i != y_i}`.
//!
//! Symbolic points store a finite window `x_{-W}..=x_W`. Anything that needs
//! a coordinate outside that window fails with
//! [`Error::InsufficientWindow`] instead of extending the sequence.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::verify::{Provenance, Relation, VerdictReport};

/// Tolerance for floating-point comparisons between points.
pub const POINT_TOL: f64 = 1e-12;

/// Rational torus coordinates `num[k] / den`, with `0 <= num[k] < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: [i64; 2],
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    dim: usize,
    coords: [f64; 2],
    exact: Option<Rational>,
}

fn wrap01(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Wrap-around distance between two circle coordinates in `[0, 1)`.
#[inline]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

impl TorusPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > 2 {
            return Err(Error::InvalidParams(format!(
                "torus points have 1 or 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("non-finite torus coordinate".into()));
        }
        let mut c = [0.0; 2];
        for (dst, src) in c.iter_mut().zip(coords) {
            *dst = wrap01(*src);
        }
        Ok(Self {
            dim: coords.len(),
            coords: c,
            exact: None,
        })
    }

    /// Exact point `num / den`; numerators are reduced mod `den`.
    pub fn rational(num: &[i64], den: i64) -> Result<Self> {
        if num.is_empty() || num.len() > 2 {
            return Err(Error::InvalidParams(format!(
                "torus points have 1 or 2 coordinates, got {}",
                num.len()
            )));
        }
        if den < 1 || den > (1 << 62) {
            return Err(Error::InvalidParams(format!(
                "rational denominator {den} outside 1..=2^62"
            )));
        }
        let mut n = [0i64; 2];
        for (dst, src) in n.iter_mut().zip(num) {
            *dst = src.rem_euclid(den);
        }
        Ok(Self::from_rational(num.len(), Rational { num: n, den }))
    }

    fn from_rational(dim: usize, r: Rational) -> Self {
        let mut coords = [0.0; 2];
        for k in 0..dim {
            coords[k] = wrap01(r.num[k] as f64 / r.den as f64);
        }
        Self {
            dim,
            coords,
            exact: Some(r),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }
}

/// A window `x_{-W}..=x_W` of a bi-infinite sequence over `{0..m-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolicPoint {
    symbols: Vec<u8>,
    radius: usize,
    alphabet: u8,
}

impl SymbolicPoint {
    /// `symbols[k]` holds `x_{k - W}`; the length must be odd.
    pub fn new(symbols: Vec<u8>, alphabet: u8) -> Result<Self> {
        if symbols.len() % 2 == 0 {
            return Err(Error::InvalidParams(format!(
                "symbolic window length must be 2W+1, got {}",
                symbols.len()
            )));
        }
        if alphabet < 2 {
            return Err(Error::InvalidParams(format!("alphabet size {alphabet} < 2")));
        }
        if let Some(s) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::InvalidParams(format!(
                "symbol {s} outside alphabet of size {alphabet}"
            )));
        }
        let radius = symbols.len() / 2;
        Ok(Self {
            symbols,
            radius,
            alphabet,
        })
    }

    pub fn from_fn(radius: usize, alphabet: u8, mut f: impl FnMut(isize) -> u8) -> Result<Self> {
        let r = radius as isize;
        Self::new((-r..=r).map(&mut f).collect(), alphabet)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Coordinate `x_i`.
    pub fn get(&self, i: isize) -> Result<u8> {
        if i.unsigned_abs() > self.radius {
            return Err(Error::InsufficientWindow {
                needed: i.unsigned_abs(),
                available: self.radius,
            });
        }
        Ok(self.symbols[(i + self.radius as isize) as usize])
    }

    /// Slice of coordinates `lo..=hi`.
    pub fn range(&self, lo: isize, hi: isize) -> Result<&[u8]> {
        let needed = lo.unsigned_abs().max(hi.unsigned_abs());
        if needed > self.radius {
            return Err(Error::InsufficientWindow {
                needed,
                available: self.radius,
            });
        }
        let off = self.radius as isize;
        Ok(&self.symbols[(lo + off) as usize..=(hi + off) as usize])
    }

    /// `(sigma x)_i = x_{i+1}`; the window radius drops by one.
    fn shifted(&self, forward: bool) -> Result<Self> {
        if self.radius == 0 {
            return Err(Error::InsufficientWindow {
                needed: 1,
                available: 0,
            });
        }
        let symbols = if forward {
            self.symbols[2..].to_vec()
        } else {
            self.symbols[..self.symbols.len() - 2].to_vec()
        };
        Ok(Self {
            symbols,
            radius: self.radius - 1,
            alphabet: self.alphabet,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Torus(TorusPoint),
    Symbolic(SymbolicPoint),
}

impl Point {
    pub fn torus(coords: &[f64]) -> Result<Self> {
        TorusPoint::new(coords).map(Point::Torus)
    }

    pub fn rational(num: &[i64], den: i64) -> Result<Self> {
        TorusPoint::rational(num, den).map(Point::Torus)
    }

    pub fn symbolic(symbols: Vec<u8>, alphabet: u8) -> Result<Self> {
        SymbolicPoint::new(symbols, alphabet).map(Point::Symbolic)
    }

    pub fn as_torus(&self) -> Option<&TorusPoint> {
        match self {
            Point::Torus(t) => Some(t),
            Point::Symbolic(_) => None,
        }
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicPoint> {
        match self {
            Point::Symbolic(s) => Some(s),
            Point::Torus(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SystemKind {
    FullShift { alphabet: u8, two_sided: bool },
    ToralAutomorphism { matrix: [[i64; 2]; 2] },
    DoublingMap,
    PeriodicOrbit { period: u64 },
}

/// A zoo dynamical system with its analytically known constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub name: String,
    pub kind: SystemKind,
    /// Upper Lipschitz constant Λ, valid below `bilip_radius`.
    pub lip_upper: Option<f64>,
    /// Lower expansion constant λ, valid below `bilip_radius`.
    pub lip_lower: Option<f64>,
    pub bilip_radius: Option<f64>,
    pub hyperbolic_k: Option<f64>,
    pub hyperbolic_eps: Option<f64>,
    pub known_top_entropy: Option<f64>,
    pub lyapunov: Option<(f64, f64)>,
}

/// Cylinder depth of a symbolic radius: `ceil(log2(1/eps))`, so radii
/// between grid values `2^-j` round down. Negative when `eps > 1`.
pub fn snap_depth(eps: f64) -> i64 {
    ((1.0 / eps).log2() - 1e-9).ceil() as i64
}

fn row_sum_norm(m: &[[i64; 2]; 2]) -> f64 {
    m.iter()
        .map(|r| (r[0].abs() + r[1].abs()) as f64)
        .fold(0.0, f64::max)
}

fn inverse_matrix(m: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // det is ±1, so det^-1 = det
    [
        [det * m[1][1], -det * m[0][1]],
        [-det * m[1][0], det * m[0][0]],
    ]
}

/// Smallest expansion `min_{|v|=1} max(|Mv|, |M^-1 v|)` in the max-norm.
///
/// On each side of the unit square the objective is a maximum of four
/// `|a + b t|` terms, so the minimum sits at an endpoint, a zero, or a
/// crossing of two terms.
fn max_norm_hyperbolic_constant(m: &[[i64; 2]; 2]) -> f64 {
    let inv = inverse_matrix(m);
    let mut best = f64::INFINITY;
    for side in 0..2 {
        // v = (1, t) or (t, 1)
        let mut lines: Vec<(f64, f64)> = Vec::with_capacity(4);
        for mat in [m, &inv] {
            for row in mat.iter() {
                let (a, b) = if side == 0 {
                    (row[0] as f64, row[1] as f64)
                } else {
                    (row[1] as f64, row[0] as f64)
                };
                lines.push((a, b));
            }
        }
        let eval = |t: f64| lines.iter().map(|(a, b)| (a + b * t).abs()).fold(0.0, f64::max);
        let mut candidates = vec![-1.0, 1.0];
        for (i, &(ai, bi)) in lines.iter().enumerate() {
            if bi != 0.0 {
                candidates.push(-ai / bi);
            }
            for &(aj, bj) in &lines[i + 1..] {
                if bi != bj {
                    candidates.push((aj - ai) / (bi - bj));
                }
                if bi + bj != 0.0 {
                    candidates.push(-(ai + aj) / (bi + bj));
                }
            }
        }
        for t in candidates {
            if (-1.0..=1.0).contains(&t) {
                best = best.min(eval(t));
            }
        }
    }
    best
}

impl SystemSpec {
    /// Two-sided full shift on `m` symbols.
    pub fn full_shift(m: u8) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParams(format!("alphabet size {m} < 2")));
        }
        Ok(Self {
            name: "full_shift_2sided".into(),
            kind: SystemKind::FullShift {
                alphabet: m,
                two_sided: true,
            },
            lip_upper: Some(2.0),
            lip_lower: None,
            bilip_radius: None,
            hyperbolic_k: Some(2.0),
            hyperbolic_eps: Some(0.5),
            known_top_entropy: Some((m as f64).ln()),
            lyapunov: None,
        })
    }

    /// One-sided full shift: only coordinates `0..` enter the metric.
    pub fn full_shift_one_sided(m: u8) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParams(format!("alphabet size {m} < 2")));
        }
        Ok(Self {
            name: "full_shift_1sided".into(),
            kind: SystemKind::FullShift {
                alphabet: m,
                two_sided: false,
            },
            lip_upper: Some(2.0),
            lip_lower: Some(2.0),
            bilip_radius: Some(1.0),
            hyperbolic_k: None,
            hyperbolic_eps: None,
            known_top_entropy: Some((m as f64).ln()),
            lyapunov: None,
        })
    }

    pub fn toral_automorphism(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(Error::InvalidParams(format!(
                "toral automorphism needs |det| = 1, got {det}"
            )));
        }
        let lam1 = spectral_radius(&matrix)?;
        let inv = inverse_matrix(&matrix);
        let norm = row_sum_norm(&matrix);
        let inv_norm = row_sum_norm(&inv);
        let big = norm.max(inv_norm);
        Ok(Self {
            name: "toral_automorphism".into(),
            kind: SystemKind::ToralAutomorphism { matrix },
            lip_upper: Some(norm),
            lip_lower: None,
            bilip_radius: Some(1.0 / (2.0 * norm)),
            hyperbolic_k: Some(max_norm_hyperbolic_constant(&matrix)),
            hyperbolic_eps: Some(1.0 / (2.0 * big * big)),
            known_top_entropy: Some(lam1.ln()),
            lyapunov: Some((lam1.ln(), -lam1.ln())),
        })
    }

    pub fn doubling_map() -> Self {
        Self {
            name: "doubling_map".into(),
            kind: SystemKind::DoublingMap,
            lip_upper: Some(2.0),
            lip_lower: Some(2.0),
            bilip_radius: Some(0.25),
            hyperbolic_k: None,
            hyperbolic_eps: None,
            known_top_entropy: Some(std::f64::consts::LN_2),
            lyapunov: None,
        }
    }

    /// A single periodic orbit `{k/p}` on the circle, moved by rotation.
    pub fn periodic_orbit(p: u64) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParams("period must be >= 1".into()));
        }
        // Distinct orbit points are at least 1/p apart and rotation is an
        // isometry, so any k works once eps <= 1/p.
        Ok(Self {
            name: "periodic_orbit".into(),
            kind: SystemKind::PeriodicOrbit { period: p },
            lip_upper: None,
            lip_lower: None,
            bilip_radius: None,
            hyperbolic_k: Some(2.0),
            hyperbolic_eps: Some((1.0 / p as f64).min(0.5)),
            known_top_entropy: Some(0.0),
            lyapunov: None,
        })
    }

    pub fn is_invertible(&self) -> bool {
        match self.kind {
            SystemKind::FullShift { two_sided, .. } => two_sided,
            SystemKind::ToralAutomorphism { .. } | SystemKind::PeriodicOrbit { .. } => true,
            SystemKind::DoublingMap => false,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.kind, SystemKind::FullShift { .. })
    }

    /// Torus dimension, or `None` for symbolic systems.
    pub fn torus_dim(&self) -> Option<usize> {
        match self.kind {
            SystemKind::FullShift { .. } => None,
            SystemKind::ToralAutomorphism { .. } => Some(2),
            SystemKind::DoublingMap | SystemKind::PeriodicOrbit { .. } => Some(1),
        }
    }

    pub fn alphabet(&self) -> Option<u8> {
        match self.kind {
            SystemKind::FullShift { alphabet, .. } => Some(alphabet),
            _ => None,
        }
    }

    fn constant(&self, value: Option<f64>, constant: &'static str) -> Result<f64> {
        value.ok_or_else(|| Error::MissingConstant {
            system: self.name.clone(),
            constant,
        })
    }

    pub fn require_lip_upper(&self) -> Result<f64> {
        self.constant(self.lip_upper, "upper Lipschitz constant")
    }

    pub fn require_lip_lower(&self) -> Result<f64> {
        self.constant(self.lip_lower, "lower expansion constant")
    }

    pub fn require_hyperbolic_k(&self) -> Result<f64> {
        self.constant(self.hyperbolic_k, "hyperbolic constant k")
    }

    pub fn require_top_entropy(&self) -> Result<f64> {
        self.constant(self.known_top_entropy, "known topological entropy")
    }

    /// Checks that `x` belongs to this system's phase space.
    pub fn check_point(&self, x: &Point) -> Result<()> {
        match (&self.kind, x) {
            (SystemKind::FullShift { alphabet, .. }, Point::Symbolic(s)) => {
                if s.alphabet != *alphabet {
                    return Err(Error::IncompatiblePoints(format!(
                        "alphabet {} vs system alphabet {alphabet}",
                        s.alphabet
                    )));
                }
                Ok(())
            }
            (SystemKind::PeriodicOrbit { period }, Point::Torus(t)) => {
                if t.dim != 1 {
                    return Err(Error::IncompatiblePoints("periodic orbit lives on the circle".into()));
                }
                periodic_index(t, *period).map(|_| ())
            }
            (_, Point::Torus(t)) if Some(t.dim) == self.torus_dim() => Ok(()),
            _ => Err(Error::IncompatiblePoints(format!(
                "point {x:?} does not belong to {}",
                self.name
            ))),
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.step(x, true)
    }

    pub fn apply_inverse(&self, x: &Point) -> Result<Point> {
        if !self.is_invertible() {
            return Err(Error::Unsupported(format!("{} has no inverse", self.name)));
        }
        self.step(x, false)
    }

    fn step(&self, x: &Point, forward: bool) -> Result<Point> {
        self.check_point(x)?;
        match (&self.kind, x) {
            (SystemKind::FullShift { .. }, Point::Symbolic(s)) => {
                s.shifted(forward).map(Point::Symbolic)
            }
            (SystemKind::ToralAutomorphism { matrix }, Point::Torus(t)) => {
                let m = if forward { *matrix } else { inverse_matrix(matrix) };
                Ok(Point::Torus(match t.exact {
                    Some(r) => {
                        let den = r.den as i128;
                        let mut num = [0i64; 2];
                        for (k, row) in m.iter().enumerate() {
                            let v = row[0] as i128 * r.num[0] as i128
                                + row[1] as i128 * r.num[1] as i128;
                            num[k] = v.rem_euclid(den) as i64;
                        }
                        TorusPoint::from_rational(2, Rational { num, den: r.den })
                    }
                    None => {
                        let [x0, x1] = t.coords;
                        TorusPoint {
                            dim: 2,
                            coords: [
                                wrap01(m[0][0] as f64 * x0 + m[0][1] as f64 * x1),
                                wrap01(m[1][0] as f64 * x0 + m[1][1] as f64 * x1),
                            ],
                            exact: None,
                        }
                    }
                }))
            }
            (SystemKind::DoublingMap, Point::Torus(t)) => Ok(Point::Torus(match t.exact {
                Some(r) => {
                    let num = ((r.num[0] as i128 * 2).rem_euclid(r.den as i128)) as i64;
                    TorusPoint::from_rational(1, Rational { num: [num, 0], den: r.den })
                }
                None => TorusPoint {
                    dim: 1,
                    coords: [wrap01(2.0 * t.coords[0]), 0.0],
                    exact: None,
                },
            })),
            (SystemKind::PeriodicOrbit { period }, Point::Torus(t)) => {
                let p = *period as i64;
                let k = periodic_index(t, *period)? as i64;
                let next = if forward { k + 1 } else { k - 1 }.rem_euclid(p);
                Ok(Point::Torus(TorusPoint::from_rational(
                    1,
                    Rational { num: [next, 0], den: p },
                )))
            }
            _ => unreachable!("check_point accepted an incompatible point"),
        }
    }

    /// Iterate `x` forward `n` times.
    pub fn iterate(&self, x: &Point, n: usize) -> Result<Point> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.apply(&y)?;
        }
        Ok(y)
    }

    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        match (x, y) {
            (Point::Torus(a), Point::Torus(b)) => Ok(torus_dist(a, b)),
            (Point::Symbolic(a), Point::Symbolic(b)) => {
                let two_sided = self.two_sided();
                // first disagreement within the common window
                let common = a.radius.min(b.radius) as isize;
                for r in 0..=common {
                    let differs = a.get(r)? != b.get(r)? || (two_sided && a.get(-r)? != b.get(-r)?);
                    if differs {
                        return Ok((-r as f64).exp2());
                    }
                }
                self.resolve_equal(a, b)
            }
            _ => Err(Error::IncompatiblePoints("mixed point variants".into())),
        }
    }

    fn two_sided(&self) -> bool {
        matches!(self.kind, SystemKind::FullShift { two_sided: true, .. })
    }

    /// Windows agreed everywhere they overlap: equal only if they are the
    /// same stored window, otherwise the distance is unresolved.
    fn resolve_equal(&self, a: &SymbolicPoint, b: &SymbolicPoint) -> Result<f64> {
        if a.radius == b.radius {
            Ok(0.0)
        } else {
            Err(Error::InsufficientWindow {
                needed: a.radius.max(b.radius),
                available: a.radius.min(b.radius),
            })
        }
    }

    /// `d_n(x, y) = max{ d(f^k x, f^k y) : k = 0..n-1 }`.
    pub fn dn_dist(&self, x: &Point, y: &Point, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("d_n needs n >= 1".into()));
        }
        self.check_point(x)?;
        self.check_point(y)?;
        match (x, y) {
            (Point::Symbolic(a), Point::Symbolic(b)) => {
                if a == b {
                    return Ok(0.0);
                }
                let last = n as isize - 1;
                let common = a.radius.min(b.radius) as isize;
                let two_sided = self.two_sided();
                // distance r from the index interval [0, n-1]
                for r in 0..=common {
                    let mut idx: Vec<isize> = if r == 0 {
                        (0..=last).collect()
                    } else {
                        vec![last + r]
                    };
                    if two_sided && r > 0 {
                        idx.push(-r);
                    }
                    let (inside, outside): (Vec<isize>, Vec<isize>) = idx
                        .into_iter()
                        .partition(|i| i.unsigned_abs() <= common as usize);
                    for i in inside {
                        if a.get(i)? != b.get(i)? {
                            return Ok((-r as f64).exp2());
                        }
                    }
                    if let Some(i) = outside.first() {
                        return Err(Error::InsufficientWindow {
                            needed: i.unsigned_abs(),
                            available: common as usize,
                        });
                    }
                }
                self.resolve_equal(a, b)
            }
            _ => {
                let mut xs = x.clone();
                let mut ys = y.clone();
                let mut best = self.dist(&xs, &ys)?;
                for _ in 1..n {
                    xs = self.apply(&xs)?;
                    ys = self.apply(&ys)?;
                    best = best.max(self.dist(&xs, &ys)?);
                }
                Ok(best)
            }
        }
    }

    /// Coordinates fixed by a symbolic (Bowen) ball of radius `eps` with
    /// `forward` forward and `backward` backward iterates beyond time 0.
    ///
    /// Symbolic balls are cylinders: radius `eps` snaps to depth
    /// `j = snap_depth(eps)` and the ball is `{y : d(x, y) < 2^-j}`.
    /// Returns `None` when the ball is the whole space (`eps > 1`).
    pub fn cylinder_range(
        &self,
        eps: f64,
        forward: usize,
        backward: usize,
    ) -> Result<Option<(isize, isize)>> {
        let two_sided = match self.kind {
            SystemKind::FullShift { two_sided, .. } => two_sided,
            _ => {
                return Err(Error::Unsupported(format!(
                    "cylinder balls need a shift system, not {}",
                    self.name
                )))
            }
        };
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("radius {eps} must be positive")));
        }
        let j = snap_depth(eps);
        if j < 0 {
            return Ok(None);
        }
        let j = j as isize;
        if two_sided {
            Ok(Some((-(backward as isize + j), forward as isize + j)))
        } else if backward > 0 {
            Err(Error::Unsupported("one-sided shift has no backward iterates".into()))
        } else {
            Ok(Some((0, forward as isize + j)))
        }
    }

    /// Ball membership `y ∈ B(x, eps)`: closed on the torus, cylinder on shifts.
    pub fn within(&self, x: &Point, y: &Point, eps: f64) -> Result<bool> {
        self.within_bowen(x, y, 0, 0, eps)
    }

    /// Membership in the (bilateral) Bowen ball with iterates
    /// `-backward..=forward`.
    pub fn within_bowen(
        &self,
        x: &Point,
        y: &Point,
        forward: usize,
        backward: usize,
        eps: f64,
    ) -> Result<bool> {
        match (x, y) {
            (Point::Symbolic(a), Point::Symbolic(b)) => {
                self.check_point(x)?;
                self.check_point(y)?;
                match self.cylinder_range(eps, forward, backward)? {
                    None => Ok(true),
                    Some((lo, hi)) => Ok(a.range(lo, hi)? == b.range(lo, hi)?),
                }
            }
            (Point::Torus(a), Point::Torus(b)) => {
                if torus_dist(a, b) > eps {
                    return Ok(false);
                }
                let (mut xs, mut ys) = (x.clone(), y.clone());
                for _ in 0..forward {
                    xs = self.apply(&xs)?;
                    ys = self.apply(&ys)?;
                    if self.dist(&xs, &ys)? > eps {
                        return Ok(false);
                    }
                }
                let (mut xs, mut ys) = (x.clone(), y.clone());
                for _ in 0..backward {
                    xs = self.apply_inverse(&xs)?;
                    ys = self.apply_inverse(&ys)?;
                    if self.dist(&xs, &ys)? > eps {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(Error::IncompatiblePoints("mixed point variants".into())),
        }
    }

    /// Checks `apply ∘ inverse = id` on the given samples.
    pub fn check_inverse(&self, samples: &[Point]) -> Result<bool> {
        for x in samples {
            let back = self.apply(&self.apply_inverse(x)?)?;
            let d = match (x, &back) {
                (Point::Symbolic(a), Point::Symbolic(b)) => {
                    let r = b.radius as isize;
                    if a.range(-r, r)? == b.range(-r, r)? {
                        0.0
                    } else {
                        1.0
                    }
                }
                _ => self.dist(x, &back)?,
            };
            if d > POINT_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            SystemKind::FullShift { alphabet, .. } => format!("{}(m={alphabet})", self.name),
            SystemKind::ToralAutomorphism { matrix } => format!(
                "{}([[{},{}],[{},{}]])",
                self.name, matrix[0][0], matrix[0][1], matrix[1][0], matrix[1][1]
            ),
            SystemKind::DoublingMap => self.name.clone(),
            SystemKind::PeriodicOrbit { period } => format!("{}(p={period})", self.name),
        }
    }
}

fn periodic_index(t: &TorusPoint, period: u64) -> Result<u64> {
    if let Some(r) = t.exact {
        if (r.num[0] as i128 * period as i128) % r.den as i128 == 0 {
            return Ok((r.num[0] as i128 * period as i128 / r.den as i128) as u64);
        }
    } else {
        let scaled = t.coords[0] * period as f64;
        let k = scaled.round();
        if (scaled - k).abs() <= POINT_TOL * period as f64 {
            return Ok((k as u64) % period);
        }
    }
    Err(Error::NotInPhaseSpace(format!(
        "{:?} is not on the orbit {{k/{period}}}",
        t.coords()
    )))
}

pub fn torus_dist(a: &TorusPoint, b: &TorusPoint) -> f64 {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| circle_dist(*x, *y))
        .fold(0.0, f64::max)
}

/// Eigenvalue of largest modulus of an integer 2x2 matrix, errors when
/// some eigenvalue has modulus one.
pub fn spectral_radius(m: &[[i64; 2]; 2]) -> Result<f64> {
    let (l1, l2) = eigenvalues(m)?;
    Ok(l1.abs().max(l2.abs()))
}

/// Real eigenvalues `(μ_u, μ_s)` with `|μ_u| > 1 > |μ_s|`.
pub fn eigenvalues(m: &[[i64; 2]; 2]) -> Result<(f64, f64)> {
    let tr = (m[0][0] + m[1][1]) as f64;
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) as f64;
    let disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        return Err(Error::NonHyperbolic(det.abs().sqrt()));
    }
    let s = disc.sqrt();
    // avoid cancellation: larger root directly, smaller from det
    let big = if tr >= 0.0 { (tr + s) / 2.0 } else { (tr - s) / 2.0 };
    if big == 0.0 || (big.abs() - 1.0).abs() < 1e-12 {
        return Err(Error::NonHyperbolic(big.abs()));
    }
    let small = det / big;
    if (small.abs() - 1.0).abs() < 1e-12 {
        return Err(Error::NonHyperbolic(small.abs()));
    }
    Ok((big, small))
}

fn param_u64(params: &Value, key: &str, default: u64) -> Result<u64> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_u64()
            .ok_or_else(|| Error::InvalidParams(format!("`{key}` must be a nonnegative integer"))),
    }
}

/// Instantiate a zoo system by name. `params` is a JSON object; missing
/// fields take defaults (m = 2, the cat matrix, p = 1).
pub fn zoo_system(name: &str, params: &Value) -> Result<SystemSpec> {
    if !(params.is_object() || params.is_null()) {
        return Err(Error::InvalidParams("system params must be an object".into()));
    }
    let alphabet = || -> Result<u8> {
        let m = param_u64(params, "alphabet", 2)?;
        u8::try_from(m)
            .ok()
            .filter(|m| *m >= 2)
            .ok_or_else(|| Error::InvalidParams(format!("invalid alphabet size {m}")))
    };
    match name {
        "full_shift_2sided" => SystemSpec::full_shift(alphabet()?),
        "full_shift_1sided" => SystemSpec::full_shift_one_sided(alphabet()?),
        "toral_automorphism" => {
            let matrix = match params.get("matrix") {
                None | Some(Value::Null) => [[2, 1], [1, 1]],
                Some(v) => serde_json::from_value::<[[i64; 2]; 2]>(v.clone()).map_err(|e| {
                    Error::InvalidParams(format!("`matrix` must be a 2x2 integer array: {e}"))
                })?,
            };
            SystemSpec::toral_automorphism(matrix)
        }
        "doubling_map" => Ok(SystemSpec::doubling_map()),
        "periodic_orbit" => SystemSpec::periodic_orbit(param_u64(params, "period", 1)?),
        other => Err(Error::UnknownSystem(other.to_string())),
    }
}

pub const ZOO_NAMES: [&str; 5] = [
    "full_shift_2sided",
    "full_shift_1sided",
    "toral_automorphism",
    "doubling_map",
    "periodic_orbit",
];

/// Checks `max{d(fx,fy), d(f⁻¹x,f⁻¹y)} >= min{k d(x,y), eps}` on every pair.
///
/// The verdict reports the pair with the smallest margin as
/// `lhs = min{k d, eps}` and `rhs = max{...}`.
pub fn check_hyperbolic_metric(sys: &SystemSpec, pairs: &[(Point, Point)]) -> Result<VerdictReport> {
    if !sys.is_invertible() {
        return Err(Error::MissingConstant {
            system: sys.name.clone(),
            constant: "inverse",
        });
    }
    let k = sys.require_hyperbolic_k()?;
    let eps = sys.constant(sys.hyperbolic_eps, "hyperbolic epsilon")?;
    let mut worst: Option<(f64, f64, f64)> = None;
    for (x, y) in pairs {
        let d = sys.dist(x, y)?;
        let fwd = sys.dist(&sys.apply(x)?, &sys.apply(y)?)?;
        let bwd = sys.dist(&sys.apply_inverse(x)?, &sys.apply_inverse(y)?)?;
        let lhs = (k * d).min(eps);
        let rhs = fwd.max(bwd);
        let margin = rhs - lhs;
        if worst.map_or(true, |(m, _, _)| margin < m) {
            worst = Some((margin, lhs, rhs));
        }
    }
    let (_, lhs, rhs) = worst.unwrap_or((0.0, 0.0, 0.0));
    let mut inputs = Provenance::new(&sys.describe(), "exact");
    inputs.params.insert("k".into(), k);
    inputs.params.insert("eps".into(), eps);
    inputs.params.insert("pairs".into(), pairs.len() as f64);
    Ok(VerdictReport::relation(
        "hyperbolic_metric",
        Relation::Le,
        lhs,
        rhs,
        "min{k d(x,y), eps}",
        "max{d(f x, f y), d(f^-1 x, f^-1 y)}",
        POINT_TOL,
        inputs,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift_point(f: impl Fn(isize) -> u8, w: usize) -> Point {
        Point::Symbolic(SymbolicPoint::from_fn(w, 2, f).unwrap())
    }

    #[test]
    fn cat_map_constants() {
        let sys = zoo_system("toral_automorphism", &serde_json::json!({})).unwrap();
        let lam = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((spectral_radius(&[[2, 1], [1, 1]]).unwrap() - 2.6180340).abs() < 1e-7);
        let (l1, l2) = sys.lyapunov.unwrap();
        assert!((l1 - 0.9624237).abs() < 1e-7);
        assert!((l1 - lam.ln()).abs() < 1e-14);
        assert_eq!(l2, -l1);
        assert!((sys.hyperbolic_k.unwrap() - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(sys.lip_upper, Some(3.0));
        assert_eq!(sys.hyperbolic_eps, Some(1.0 / 18.0));
    }

    #[test]
    fn zoo_errors() {
        let e = zoo_system("tent_map", &Value::Null).unwrap_err();
        assert!(matches!(e, Error::UnknownSystem(_)));
        let e = zoo_system("toral_automorphism", &serde_json::json!({"matrix": [[1, 1], [0, 1]]}))
            .unwrap_err();
        assert!(matches!(e, Error::NonHyperbolic(_)));
        let e = zoo_system("toral_automorphism", &serde_json::json!({"matrix": [[0, 1], [-1, 0]]}))
            .unwrap_err();
        assert!(matches!(e, Error::NonHyperbolic(_)));
        let e = zoo_system("full_shift_2sided", &serde_json::json!({"alphabet": 1})).unwrap_err();
        assert!(matches!(e, Error::InvalidParams(_)));
    }

    #[test]
    fn shift_constants() {
        let sys = zoo_system("full_shift_2sided", &serde_json::json!({"alphabet": 2})).unwrap();
        assert_eq!(sys.known_top_entropy, Some(2f64.ln()));
        assert_eq!(sys.hyperbolic_k, Some(2.0));
        assert_eq!(sys.lip_upper, Some(2.0));
    }

    #[test]
    fn periodic_fixed_point_is_identity() {
        let sys = SystemSpec::periodic_orbit(1).unwrap();
        let x = Point::rational(&[0], 1).unwrap();
        assert_eq!(sys.apply(&x).unwrap(), x);
        let sys4 = SystemSpec::periodic_orbit(4).unwrap();
        let y = Point::torus(&[0.25]).unwrap();
        let z = sys4.apply(&y).unwrap();
        assert!((z.as_torus().unwrap().coords()[0] - 0.5).abs() < 1e-15);
        assert!(sys4.apply(&Point::torus(&[0.3]).unwrap()).is_err());
    }

    #[test]
    fn torus_distance_wraps() {
        let sys = SystemSpec::doubling_map();
        let x = Point::torus(&[0.1]).unwrap();
        let y = Point::torus(&[0.9]).unwrap();
        assert!((sys.dist(&x, &y).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(sys.dist(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn shift_distance_first_disagreement() {
        let sys = SystemSpec::full_shift(2).unwrap();
        let x = shift_point(|_| 0, 4);
        let y = shift_point(|i| u8::from(i == 2), 4);
        let z = shift_point(|i| u8::from(i == -2), 4);
        assert_eq!(sys.dist(&x, &y).unwrap(), 0.25);
        assert_eq!(sys.dist(&x, &z).unwrap(), 0.25);
        assert_eq!(sys.dist(&x, &x).unwrap(), 0.0);
        // agreeing windows of different radius cannot be resolved
        let short = shift_point(|_| 0, 2);
        assert!(matches!(
            sys.dist(&x, &short),
            Err(Error::InsufficientWindow { .. })
        ));
        let t = Point::torus(&[0.5]).unwrap();
        assert!(matches!(sys.dist(&x, &t), Err(Error::IncompatiblePoints(_))));
    }

    #[test]
    fn dn_examples() {
        let sys = SystemSpec::doubling_map();
        let x = Point::torus(&[0.0]).unwrap();
        let y = Point::torus(&[0.01]).unwrap();
        assert!((sys.dn_dist(&x, &y, 3).unwrap() - 0.04).abs() < 1e-15);
        assert_eq!(sys.dn_dist(&x, &y, 1).unwrap(), sys.dist(&x, &y).unwrap());
        assert_eq!(sys.dn_dist(&y, &y, 5).unwrap(), 0.0);
        assert!(sys.dn_dist(&x, &y, 0).is_err());
    }

    #[test]
    fn shift_dn_matches_iterated_distance() {
        let sys = SystemSpec::full_shift(2).unwrap();
        let x = shift_point(|i| ((i * 7 + 3).rem_euclid(5) % 2) as u8, 12);
        let y = shift_point(|i| if i == 5 || i == -4 { 1 - ((i * 7 + 3).rem_euclid(5) % 2) as u8 } else { ((i * 7 + 3).rem_euclid(5) % 2) as u8 }, 12);
        for n in 1..6 {
            let mut best: f64 = 0.0;
            let (mut a, mut b) = (x.clone(), y.clone());
            for _ in 0..n {
                best = best.max(sys.dist(&a, &b).unwrap());
                a = sys.apply(&a).unwrap();
                b = sys.apply(&b).unwrap();
            }
            assert_eq!(sys.dn_dist(&x, &y, n).unwrap(), best, "n = {n}");
        }
    }

    #[test]
    fn shift_window_exhaustion() {
        let sys = SystemSpec::full_shift(2).unwrap();
        let x = shift_point(|_| 1, 0);
        assert!(matches!(
            sys.apply(&x),
            Err(Error::InsufficientWindow { .. })
        ));
    }

    #[test]
    fn rational_doubling_orbit() {
        let sys = SystemSpec::doubling_map();
        let x = Point::rational(&[1], 3).unwrap();
        let y = sys.apply(&x).unwrap();
        assert_eq!(y.as_torus().unwrap().exact().unwrap().num[0], 2);
        assert_eq!(sys.apply(&y).unwrap(), x);
    }

    #[test]
    fn toral_inverse_roundtrip() {
        let sys = SystemSpec::toral_automorphism([[2, 1], [1, 1]]).unwrap();
        let pts: Vec<Point> = (0..50)
            .map(|i| Point::torus(&[(i as f64 * 0.137).fract(), (i as f64 * 0.291).fract()]).unwrap())
            .collect();
        assert!(sys.check_inverse(&pts).unwrap());
        let r = Point::rational(&[3, 5], 17).unwrap();
        assert_eq!(sys.apply(&sys.apply_inverse(&r).unwrap()).unwrap(), r);
        let shift = SystemSpec::full_shift(3).unwrap();
        let s = Point::symbolic(vec![0, 1, 2, 1, 0], 3).unwrap();
        assert!(shift.check_inverse(&[s]).unwrap());
    }

    #[test]
    fn cylinder_ranges() {
        let sys = SystemSpec::full_shift(2).unwrap();
        assert_eq!(sys.cylinder_range(0.5, 0, 0).unwrap(), Some((-1, 1)));
        assert_eq!(sys.cylinder_range(0.3, 0, 0).unwrap(), Some((-2, 2)));
        assert_eq!(sys.cylinder_range(0.5, 2, 0).unwrap(), Some((-1, 3)));
        assert_eq!(sys.cylinder_range(0.5, 2, 3).unwrap(), Some((-4, 3)));
        assert_eq!(sys.cylinder_range(2.0, 0, 0).unwrap(), None);
        let one = SystemSpec::full_shift_one_sided(2).unwrap();
        assert_eq!(one.cylinder_range(0.25, 3, 0).unwrap(), Some((0, 5)));
        assert!(one.cylinder_range(0.25, 3, 1).is_err());
    }

    #[test]
    fn shift_hyperbolic_check_passes() {
        let sys = SystemSpec::full_shift(2).unwrap();
        let pairs: Vec<(Point, Point)> = (0..64)
            .map(|s| {
                let x = shift_point(|i| (((i + 40) as u32).wrapping_mul(2654435761) >> 7) as u8 & 1, 10);
                let y = shift_point(
                    |i| {
                        let base = (((i + 40) as u32).wrapping_mul(2654435761) >> 7) as u8 & 1;
                        if i.unsigned_abs() as u32 == s % 9 { 1 - base } else { base }
                    },
                    10,
                );
                (x, y)
            })
            .collect();
        let v = check_hyperbolic_metric(&sys, &pairs).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn cat_map_max_norm_constant_is_sharp() {
        let sys = SystemSpec::toral_automorphism([[2, 1], [1, 1]]).unwrap();
        // v = (1, -1/3) realizes the minimum 5/3 in the max-norm
        let h = 1e-4;
        let x = Point::torus(&[0.3, 0.4]).unwrap();
        let y = Point::torus(&[0.3 + h, 0.4 - h / 3.0]).unwrap();
        let v = check_hyperbolic_metric(&sys, &[(x.clone(), y.clone())]).unwrap();
        assert!(v.pass);
        assert!((v.rhs / sys.dist(&x, &y).unwrap() - 5.0 / 3.0).abs() < 1e-6);
        // the unstable eigenvalue is not a valid constant for this metric
        let mut strict = sys.clone();
        strict.hyperbolic_k = Some((3.0 + 5f64.sqrt()) / 2.0);
        assert!(!check_hyperbolic_metric(&strict, &[(x, y)]).unwrap().pass);
    }

    #[test]
    fn hyperbolic_check_needs_inverse() {
        let sys = SystemSpec::doubling_map();
        assert!(check_hyperbolic_metric(&sys, &[]).is_err());
    }
}
