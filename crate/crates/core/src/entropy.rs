//! Bowen-ball decay rates, generating-set counts and entropy estimates.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::line_fit;
use crate::error::{Error, Result};
use crate::geometry::{snap_depth, Point, SystemKind, SystemSpec};
use crate::measures::{BallQuery, MeasureModel};

/// Largest fraction of censored entries a fit accepts.
pub const MAX_CENSORED: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyScanKind {
    BrinKatokAtPoint,
    BilateralAtPoint,
    GeneratingCount,
}

impl EntropyScanKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntropyScanKind::BrinKatokAtPoint => "brin_katok_at_point",
            EntropyScanKind::BilateralAtPoint => "bilateral_at_point",
            EntropyScanKind::GeneratingCount => "generating_count",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEntry {
    pub n: usize,
    pub value: f64,
    /// Empirical ball came out empty; the value is `+inf` and unfitted.
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyScan {
    pub eps: f64,
    pub kind: EntropyScanKind,
    pub entries: Vec<EntropyEntry>,
}

impl EntropyScan {
    pub fn censored(&self) -> usize {
        self.entries.iter().filter(|e| e.censored).count()
    }

    /// CSV rows `eps,n,value,kind,censored`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,n,value,kind,censored\n");
        self.write_rows(&mut s);
        s
    }

    pub fn write_rows(&self, s: &mut String) {
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                self.eps,
                e.n,
                e.value,
                self.kind.as_str(),
                e.censored
            );
        }
    }
}

/// Rate proxies of one scan: min/max anchored slopes over the tail half
/// and the least-squares slope over all fitted entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub lower: f64,
    pub upper: f64,
    pub ls: f64,
}

pub fn fit_rate(scan: &EntropyScan) -> Result<Rate> {
    let total = scan.entries.len();
    let censored = scan.censored();
    if total > 0 && censored as f64 > MAX_CENSORED * total as f64 {
        return Err(Error::FitRejected(format!(
            "{censored} of {total} entries censored at eps = {}",
            scan.eps
        )));
    }
    let kept: Vec<&EntropyEntry> = scan.entries.iter().filter(|e| !e.censored).collect();
    if kept.len() < 3 {
        return Err(Error::FitRejected(format!(
            "need 3 uncensored entries, have {}",
            kept.len()
        )));
    }
    let x: Vec<f64> = kept.iter().map(|e| e.n as f64).collect();
    let y: Vec<f64> = kept.iter().map(|e| e.value).collect();
    let ls = line_fit(&x, &y).ls;
    let tail = &kept[kept.len() / 2..];
    let anchor = tail[0];
    let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
    for e in &tail[1..] {
        let s = (e.value - anchor.value) / (e.n - anchor.n) as f64;
        lower = lower.min(s);
        upper = upper.max(s);
    }
    Ok(Rate { lower, upper, ls })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsRate {
    pub eps: f64,
    pub h_lower: f64,
    pub h_upper: f64,
    pub h_ls: f64,
    /// Spread of the least-squares rate across centers.
    pub center_spread: f64,
    pub censored: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// Rates at the finest radius.
    pub h_lower: f64,
    pub h_upper: f64,
    pub h_ls: f64,
    /// Largest across-center spread over the radii.
    pub center_spread: f64,
    /// Spread of `h_ls` across the radii.
    pub eps_spread: f64,
    pub per_eps: Vec<EpsRate>,
    /// Greedy counts bound the minimal cover from above.
    pub upper_bound: bool,
}

fn report(per_eps: Vec<EpsRate>, upper_bound: bool) -> Result<EntropyReport> {
    let finest = per_eps
        .iter()
        .min_by(|a, b| a.eps.total_cmp(&b.eps))
        .ok_or_else(|| Error::InvalidArgument("need at least one radius".into()))?;
    let (lo, hi) = per_eps
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r.h_ls), h.max(r.h_ls)));
    Ok(EntropyReport {
        h_lower: finest.h_lower,
        h_upper: finest.h_upper,
        h_ls: finest.h_ls,
        center_spread: per_eps.iter().map(|r| r.center_spread).fold(0.0, f64::max),
        eps_spread: hi - lo,
        per_eps: per_eps.clone(),
        upper_bound,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius {eps} must be positive")))
    }
}

/// Largest `n <= n_max` with `y ∈ B(x, n, eps)` (iterates `0..=n`), or
/// `None` if `y` is not even in `B(x, eps)`.
fn exit_time(sys: &SystemSpec, x: &Point, y: &Point, eps: f64, n_max: usize, bilateral: bool) -> Result<Option<usize>> {
    let inside = |n: usize| {
        let b = if bilateral { n } else { 0 };
        sys.within_bowen(x, y, n, b, eps)
    };
    if !inside(0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0usize, n_max);
    if inside(hi)? {
        return Ok(Some(hi));
    }
    // inside(lo) holds, inside(hi) fails
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

fn bowen_scan(
    mu: &MeasureModel,
    x: &Point,
    eps: f64,
    n_max: usize,
    cloud: Option<&[Point]>,
    bilateral: bool,
) -> Result<EntropyScan> {
    check_eps(eps)?;
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let sys = &mu.system;
    let kind = if bilateral {
        EntropyScanKind::BilateralAtPoint
    } else {
        EntropyScanKind::BrinKatokAtPoint
    };
    let time = |n: usize| if bilateral { 2 * n } else { n };
    let entries = match cloud {
        None => (1..=n_max)
            .map(|n| {
                let q = if bilateral {
                    BallQuery::bilateral(x.clone(), n, n, eps)
                } else {
                    BallQuery::bowen(x.clone(), n, eps)
                };
                let l = mu.log_ball_mass(&q)?;
                Ok(EntropyEntry { n: time(n), value: -l, censored: l == f64::NEG_INFINITY })
            })
            .collect::<Result<Vec<_>>>()?,
        Some(points) => {
            if points.is_empty() {
                return Err(Error::InvalidArgument("empty point cloud".into()));
            }
            let exits: Vec<Option<usize>> = points
                .par_iter()
                .map(|y| exit_time(sys, x, y, eps, n_max, bilateral))
                .collect::<Result<_>>()?;
            let total = points.len() as f64;
            (1..=n_max)
                .map(|n| {
                    let c = exits.iter().filter(|t| t.map_or(false, |t| t >= n)).count();
                    let censored = c == 0;
                    let value = if censored { f64::INFINITY } else { total.ln() - (c as f64).ln() };
                    EntropyEntry { n: time(n), value, censored }
                })
                .collect()
        }
    };
    Ok(EntropyScan { eps, kind, entries })
}

/// `-log μ(B(x, n, ε))` for `n = 1..=n_max`, from the exact oracle or, when
/// `cloud` is given, from the fraction of cloud points in the Bowen ball.
pub fn brin_katok_scan(
    mu: &MeasureModel,
    x: &Point,
    eps: f64,
    n_max: usize,
    cloud: Option<&[Point]>,
) -> Result<EntropyScan> {
    bowen_scan(mu, x, eps, n_max, cloud, false)
}

/// `-log μ(B(x, n, n, ε))` against `2n` for `n = 1..=n_max`.
pub fn bilateral_bk_scan(
    mu: &MeasureModel,
    x: &Point,
    eps: f64,
    n_max: usize,
    cloud: Option<&[Point]>,
) -> Result<EntropyScan> {
    if !mu.system.is_invertible() {
        return Err(Error::Unsupported(format!("{} is not invertible", mu.system.name)));
    }
    bowen_scan(mu, x, eps, n_max, cloud, true)
}

/// Per-center rates at each radius, averaged in center order.
pub fn metric_entropy_estimate(
    mu: &MeasureModel,
    eps_list: &[f64],
    n_max: usize,
    centers: &[Point],
    cloud: Option<&[Point]>,
) -> Result<EntropyReport> {
    if centers.is_empty() {
        return Err(Error::InvalidArgument("need at least one center".into()));
    }
    let per_eps = eps_list
        .iter()
        .map(|&eps| {
            let rates: Vec<(Rate, usize)> = centers
                .par_iter()
                .map(|x| {
                    let s = brin_katok_scan(mu, x, eps, n_max, cloud)?;
                    Ok((fit_rate(&s)?, s.censored()))
                })
                .collect::<Result<_>>()?;
            let k = rates.len() as f64;
            let mean = |f: fn(&Rate) -> f64| rates.iter().map(|(r, _)| f(r)).sum::<f64>() / k;
            let (lo, hi) = rates
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (r, _)| (l.min(r.ls), h.max(r.ls)));
            Ok(EpsRate {
                eps,
                h_lower: mean(|r| r.lower),
                h_upper: mean(|r| r.upper),
                h_ls: mean(|r| r.ls),
                center_spread: hi - lo,
                censored: rates.iter().map(|(_, c)| c).sum(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report(per_eps, false)
}

#[derive(Clone, Copy, Debug)]
pub enum CountMode<'a> {
    /// Closed-form cylinder count on a full shift, `ε` on the dyadic grid.
    ExactShift,
    /// Greedy cover of a point cloud under `d_n`, in input order.
    Greedy(&'a [Point]),
}

/// Cylinder index range fixed by a `d_n`-ball (iterates `0..n`).
fn dn_cylinder(sys: &SystemSpec, n: usize, eps: f64) -> Result<Option<(isize, isize)>> {
    sys.cylinder_range(eps, n - 1, 0)
}

fn log_exact_shift_count(sys: &SystemSpec, n: usize, eps: f64) -> Result<f64> {
    let m = match sys.kind {
        SystemKind::FullShift { alphabet, .. } => alphabet,
        _ => {
            return Err(Error::Unsupported(format!(
                "exact counts need a full shift, not {}",
                sys.name
            )))
        }
    };
    let j = snap_depth(eps);
    if j >= 0 && (eps - (-(j as f64)).exp2()).abs() > 1e-12 * eps {
        return Err(Error::InvalidArgument(format!("eps = {eps} is not on the grid 2^-j")));
    }
    Ok(match dn_cylinder(sys, n, eps)? {
        None => 0.0,
        Some((lo, hi)) => (hi - lo + 1) as f64 * (m as f64).ln(),
    })
}

/// Indices of the greedy centers: each point not covered by an earlier
/// center's `d_n`-ball becomes a center.
pub fn greedy_cover(points: &[Point], sys: &SystemSpec, n: usize, eps: f64) -> Result<Vec<usize>> {
    check_eps(eps)?;
    if n < 1 {
        return Err(Error::InvalidArgument("d_n needs n >= 1".into()));
    }
    if points.first().map_or(false, |p| p.as_symbolic().is_some()) {
        // cylinder balls partition the cloud: one center per distinct word
        let range = dn_cylinder(sys, n, eps)?;
        let mut seen = HashSet::new();
        let mut centers = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let s = p
                .as_symbolic()
                .ok_or_else(|| Error::IncompatiblePoints("mixed point variants".into()))?;
            let word: &[u8] = match range {
                None => &[],
                Some((lo, hi)) => s.range(lo, hi)?,
            };
            if seen.insert(word) {
                centers.push(i);
            }
        }
        return Ok(centers);
    }
    let mut centers: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let mut covered = false;
        for &c in &centers {
            if sys.within_bowen(&points[c], p, n - 1, 0, eps)? {
                covered = true;
                break;
            }
        }
        if !covered {
            centers.push(i);
        }
    }
    Ok(centers)
}

/// `R(n, ε)`: exact on full shifts, or the greedy-cover size of a cloud.
pub fn generating_count(sys: &SystemSpec, n: usize, eps: f64, mode: CountMode) -> Result<u64> {
    check_eps(eps)?;
    if n < 1 {
        return Err(Error::InvalidArgument("generating counts need n >= 1".into()));
    }
    match mode {
        CountMode::ExactShift => {
            let m = sys.alphabet().unwrap_or(0) as u64;
            let len = (log_exact_shift_count(sys, n, eps)? / (m as f64).ln()).round() as u32;
            m.checked_pow(len)
                .ok_or_else(|| Error::Unsupported(format!("{m}^{len} overflows u64")))
        }
        CountMode::Greedy(points) => Ok(greedy_cover(points, sys, n, eps)?.len() as u64),
    }
}

/// `log R(n, ε)` against `n = 1..=n_max` for one radius.
pub fn generating_scan(sys: &SystemSpec, eps: f64, n_max: usize, mode: CountMode) -> Result<EntropyScan> {
    check_eps(eps)?;
    let entries = (1..=n_max)
        .map(|n| {
            let value = match mode {
                CountMode::ExactShift => log_exact_shift_count(sys, n, eps)?,
                CountMode::Greedy(_) => (generating_count(sys, n, eps, mode)? as f64).ln(),
            };
            Ok(EntropyEntry { n, value, censored: false })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyScan { eps, kind: EntropyScanKind::GeneratingCount, entries })
}

/// Growth rate of `R(n, ε)` per radius, reported at the finest radius.
pub fn topological_entropy_estimate(
    sys: &SystemSpec,
    eps_list: &[f64],
    n_max: usize,
    mode: CountMode,
) -> Result<EntropyReport> {
    let per_eps = eps_list
        .iter()
        .map(|&eps| {
            let s = generating_scan(sys, eps, n_max, mode)?;
            let r = fit_rate(&s)?;
            Ok(EpsRate {
                eps,
                h_lower: r.lower,
                h_upper: r.upper,
                h_ls: r.ls,
                center_spread: 0.0,
                censored: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report(per_eps, matches!(mode, CountMode::Greedy(_)))
}
