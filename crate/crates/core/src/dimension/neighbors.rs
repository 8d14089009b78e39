//! Closed-ball neighbor counts for point clouds, with a naive reference.
//!
//! Counts include the point itself. The fast kernels are exact: points
//! whose offset from the query box boundary is below `MARGIN` are checked
//! with the same predicate as the naive path, so both agree on every count.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{circle_dist, Point, SystemSpec};

const MARGIN: f64 = 1e-9;

enum Cloud {
    Circle(Vec<f64>),
    Torus(Vec<[f64; 2]>),
    Symbolic,
}

fn classify(points: &[Point]) -> Result<Cloud> {
    match points.first() {
        None => Ok(Cloud::Circle(Vec::new())),
        Some(Point::Symbolic(_)) => {
            if points.iter().any(|p| p.as_symbolic().is_none()) {
                return Err(Error::IncompatiblePoints("mixed point variants".into()));
            }
            Ok(Cloud::Symbolic)
        }
        Some(Point::Torus(t)) => {
            let d = t.dim();
            let mut flat = Vec::with_capacity(points.len());
            for p in points {
                match p.as_torus() {
                    Some(t) if t.dim() == d => flat.push(t.coords()),
                    _ => return Err(Error::IncompatiblePoints("mixed torus dimensions".into())),
                }
            }
            if d == 1 {
                Ok(Cloud::Circle(flat.iter().map(|c| c[0]).collect()))
            } else {
                Ok(Cloud::Torus(flat.iter().map(|c| [c[0], c[1]]).collect()))
            }
        }
    }
}

fn check_radius(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius {eps} must be positive and finite")))
    }
}

/// Reference counts: `sys.within` over all ordered pairs.
pub fn neighbor_counts_naive(points: &[Point], sys: &SystemSpec, eps: f64) -> Result<Vec<u64>> {
    check_radius(eps)?;
    points
        .par_iter()
        .map(|x| {
            let mut c = 0u64;
            for y in points {
                if sys.within(x, y, eps)? {
                    c += 1;
                }
            }
            Ok(c)
        })
        .collect()
}

/// Fast closed-ball counts `N_i = #{j : y_j ∈ B(x_i, eps)}`.
pub fn neighbor_counts(points: &[Point], sys: &SystemSpec, eps: f64) -> Result<Vec<u64>> {
    check_radius(eps)?;
    for p in points {
        sys.check_point(p)?;
    }
    match classify(points)? {
        Cloud::Circle(xs) => Ok(circle_counts(&xs, eps)),
        Cloud::Torus(xs) => Ok(torus_counts(&xs, eps)),
        Cloud::Symbolic => {
            let keys = symbolic_keys(points, sys, eps)?;
            let classes = class_sizes(&keys);
            Ok(keys
                .iter()
                .map(|k| k.map_or(points.len() as u64, |k| classes[k]))
                .collect())
        }
    }
}

/// Symbolic balls are cylinders, so membership is an equivalence relation.
/// Each point gets the index of its class, or `None` when the ball is the
/// whole space.
fn symbolic_keys(points: &[Point], sys: &SystemSpec, eps: f64) -> Result<Vec<Option<usize>>> {
    let Some((lo, hi)) = sys.cylinder_range(eps, 0, 0)? else {
        return Ok(vec![None; points.len()]);
    };
    let mut ids: HashMap<&[u8], usize> = HashMap::new();
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let word = p.as_symbolic().unwrap().range(lo, hi)?;
        let next = ids.len();
        out.push(Some(*ids.entry(word).or_insert(next)));
    }
    Ok(out)
}

fn class_sizes(keys: &[Option<usize>]) -> Vec<u64> {
    let n = keys.iter().flatten().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0u64; n];
    for k in keys.iter().flatten() {
        sizes[*k] += 1;
    }
    sizes
}

/// Indices of sorted values in the circular arc `[lo, hi]` (`lo` may be
/// negative, `hi` may exceed 1, width below 1).
fn arc_ranges(sorted: &[f64], lo: f64, hi: f64) -> [(usize, usize); 2] {
    let range = |a: f64, b: f64| {
        if a > b {
            (0, 0)
        } else {
            (sorted.partition_point(|&v| v < a), sorted.partition_point(|&v| v <= b))
        }
    };
    if lo < 0.0 {
        [range(0.0, hi), range(lo + 1.0, 1.0)]
    } else if hi >= 1.0 {
        [range(lo, 1.0), range(0.0, hi - 1.0)]
    } else {
        [range(lo, hi), (0, 0)]
    }
}

fn arc_count(sorted: &[f64], lo: f64, hi: f64) -> usize {
    arc_ranges(sorted, lo, hi).iter().map(|(a, b)| b - a).sum()
}

fn circle_counts(xs: &[f64], eps: f64) -> Vec<u64> {
    let n = xs.len();
    if eps >= 0.5 {
        return vec![n as u64; n];
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    xs.par_iter()
        .map(|&c| {
            if eps + MARGIN >= 0.5 {
                return xs.iter().filter(|&&y| circle_dist(c, y) <= eps).count() as u64;
            }
            let inner = eps - MARGIN;
            let sure = if inner >= 0.0 {
                arc_count(&sorted, c - inner, c + inner)
            } else {
                0
            };
            // boundary bands, checked exactly
            let mut band = 0usize;
            let bands = if inner >= 0.0 {
                [(c - eps - MARGIN, c - inner), (c + inner, c + eps + MARGIN)]
            } else {
                [(c - eps - MARGIN, c + eps + MARGIN), (1.0, 0.0)]
            };
            for (lo, hi) in bands {
                if lo > hi {
                    continue;
                }
                for (a, b) in arc_ranges(&sorted, lo, hi) {
                    for &y in &sorted[a..b] {
                        let off = circle_dist(c, y);
                        let in_sure = inner >= 0.0 && off <= inner && is_sure(c, y, inner);
                        if !in_sure && off <= eps {
                            band += 1;
                        }
                    }
                }
            }
            (sure + band) as u64
        })
        .collect()
}

/// Whether `y` was counted by the sure-arc query around `c`. Arc queries
/// compare raw coordinates, so this mirrors them rather than `circle_dist`.
fn is_sure(c: f64, y: f64, inner: f64) -> bool {
    let (lo, hi) = (c - inner, c + inner);
    if lo < 0.0 {
        (y >= 0.0 && y <= hi) || (y >= lo + 1.0 && y <= 1.0)
    } else if hi >= 1.0 {
        (y >= lo && y <= 1.0) || (y >= 0.0 && y <= hi - 1.0)
    } else {
        y >= lo && y <= hi
    }
}

struct CellGrid {
    g: usize,
    /// points sorted by cell, row-major (row = second coordinate)
    start: Vec<usize>,
    pts: Vec<[f64; 2]>,
    /// per-row prefix sums of cell occupancy, `g + 1` entries per row
    prefix: Vec<u64>,
}

impl CellGrid {
    fn new(xs: &[[f64; 2]], g: usize) -> Self {
        let cell = |v: f64| ((v * g as f64) as usize).min(g - 1);
        let mut counts = vec![0usize; g * g];
        for p in xs {
            counts[cell(p[1]) * g + cell(p[0])] += 1;
        }
        let mut start = vec![0usize; g * g + 1];
        for i in 0..g * g {
            start[i + 1] = start[i] + counts[i];
        }
        let mut fill = start.clone();
        let mut pts = vec![[0.0; 2]; xs.len()];
        for p in xs {
            let k = cell(p[1]) * g + cell(p[0]);
            pts[fill[k]] = *p;
            fill[k] += 1;
        }
        let mut prefix = vec![0u64; g * (g + 1)];
        for row in 0..g {
            for col in 0..g {
                prefix[row * (g + 1) + col + 1] =
                    prefix[row * (g + 1) + col] + counts[row * g + col] as u64;
            }
        }
        Self { g, start, pts, prefix }
    }

    fn cell_points(&self, row: usize, col: usize) -> &[[f64; 2]] {
        let k = row * self.g + col;
        &self.pts[self.start[k]..self.start[k + 1]]
    }

    /// Occupancy of cells `lo..=hi` (unwrapped, possibly negative) in a row.
    fn row_sum(&self, row: usize, lo: i64, hi: i64) -> u64 {
        let g = self.g as i64;
        let p = &self.prefix[row * (self.g + 1)..(row + 1) * (self.g + 1)];
        let mut total = 0u64;
        let mut a = lo;
        while a <= hi {
            let base = a.rem_euclid(g);
            let len = (hi - a + 1).min(g - base);
            total += p[(base + len) as usize] - p[base as usize];
            a += len;
        }
        total
    }
}

/// Cell ranges along one axis: `(candidate_lo, candidate_hi)` covers every
/// cell that can hold a point within `eps + MARGIN`, `(sure_lo, sure_hi)`
/// the cells lying entirely within `eps - MARGIN`.
struct AxisCells {
    cand: (i64, i64),
    sure: (i64, i64),
}

fn axis_cells(c: f64, eps: f64, g: usize) -> AxisCells {
    let gf = g as f64;
    let cand = (
        ((c - eps - MARGIN) * gf).floor() as i64,
        ((c + eps + MARGIN) * gf).floor() as i64,
    );
    let inner = eps - MARGIN;
    let sure = if inner <= 0.0 {
        (1, 0)
    } else {
        (
            ((c - inner) * gf).ceil() as i64,
            ((c + inner) * gf).floor() as i64 - 1,
        )
    };
    AxisCells { cand, sure }
}

fn torus_counts(xs: &[[f64; 2]], eps: f64) -> Vec<u64> {
    let n = xs.len();
    if eps >= 0.5 {
        return vec![n as u64; n];
    }
    let g = (((n as f64) / 2.0).sqrt() as usize).clamp(1, 4096);
    let grid = CellGrid::new(xs, g);
    let gi = g as i64;
    let within = |a: &[f64; 2], b: &[f64; 2]| {
        circle_dist(a[0], b[0]).max(circle_dist(a[1], b[1])) <= eps
    };
    xs.par_iter()
        .map(|c| {
            let ax = axis_cells(c[0], eps, g);
            let ay = axis_cells(c[1], eps, g);
            let too_wide = |a: &AxisCells| a.cand.1 - a.cand.0 + 1 > gi;
            if too_wide(&ax) || too_wide(&ay) {
                return xs.iter().filter(|y| within(c, y)).count() as u64;
            }
            let mut total = 0u64;
            for ry in ay.cand.0..=ay.cand.1 {
                let row = ry.rem_euclid(gi) as usize;
                let row_sure = ry >= ay.sure.0 && ry <= ay.sure.1;
                let (slo, shi) = if row_sure { ax.sure } else { (1, 0) };
                if slo <= shi {
                    total += grid.row_sum(row, slo, shi);
                }
                for rx in ax.cand.0..=ax.cand.1 {
                    if rx >= slo && rx <= shi {
                        continue;
                    }
                    let col = rx.rem_euclid(gi) as usize;
                    total += grid
                        .cell_points(row, col)
                        .iter()
                        .filter(|y| within(c, y))
                        .count() as u64;
                }
            }
            total
        })
        .collect()
}

/// Ordered pairs `(i, j)` with `y_j ∈ B(x_i, eps)`, diagonal included.
pub fn pair_count(points: &[Point], sys: &SystemSpec, eps: f64) -> Result<u64> {
    Ok(neighbor_counts(points, sys, eps)?.iter().sum())
}

/// Ordered triples whose three points are pairwise within `eps`.
pub fn triple_count(points: &[Point], sys: &SystemSpec, eps: f64) -> Result<u64> {
    check_radius(eps)?;
    if let Cloud::Symbolic = classify(points)? {
        let keys = symbolic_keys(points, sys, eps)?;
        if keys.first().map_or(false, |k| k.is_none()) {
            return Ok((points.len() as u64).pow(3));
        }
        return Ok(class_sizes(&keys).iter().map(|c| c * c * c).sum());
    }
    let lists = neighbor_lists(points, sys, eps)?;
    lists
        .par_iter()
        .map(|nb| {
            let mut t = 0u64;
            for &j in nb {
                for &k in nb {
                    if sys.within(&points[j], &points[k], eps)? {
                        t += 1;
                    }
                }
            }
            Ok(t)
        })
        .collect::<Result<Vec<u64>>>()
        .map(|v| v.iter().sum())
}

fn neighbor_lists(points: &[Point], sys: &SystemSpec, eps: f64) -> Result<Vec<Vec<usize>>> {
    points
        .par_iter()
        .map(|x| {
            let mut nb = Vec::new();
            for (j, y) in points.iter().enumerate() {
                if sys.within(x, y, eps)? {
                    nb.push(j);
                }
            }
            Ok(nb)
        })
        .collect()
}

/// Brute-force triple count over all `n^3` index triples.
pub fn triple_count_naive(points: &[Point], sys: &SystemSpec, eps: f64) -> Result<u64> {
    check_radius(eps)?;
    let n = points.len();
    let mut t = 0u64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if sys.within(&points[i], &points[j], eps)?
                    && sys.within(&points[i], &points[k], eps)?
                    && sys.within(&points[j], &points[k], eps)?
                {
                    t += 1;
                }
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::MeasureModel;

    #[test]
    fn circle_fast_matches_naive() {
        let sys = SystemSpec::doubling_map();
        let mu = MeasureModel::lebesgue(&sys).unwrap();
        let pts = mu.sample(2000, 4, 0).unwrap();
        for eps in [1e-4, 0.01, 0.1, 0.25, 0.4999999999, 0.5, 0.7] {
            assert_eq!(
                neighbor_counts(&pts, &sys, eps).unwrap(),
                neighbor_counts_naive(&pts, &sys, eps).unwrap(),
                "eps = {eps}"
            );
        }
    }

    #[test]
    fn circle_boundary_ties() {
        let sys = SystemSpec::doubling_map();
        let pts: Vec<Point> = (0..64).map(|k| Point::torus(&[k as f64 / 64.0]).unwrap()).collect();
        for eps in [1.0 / 64.0, 2.0 / 64.0, 0.25, 31.0 / 64.0] {
            assert_eq!(
                neighbor_counts(&pts, &sys, eps).unwrap(),
                neighbor_counts_naive(&pts, &sys, eps).unwrap()
            );
        }
    }

    #[test]
    fn torus_fast_matches_naive() {
        let sys = SystemSpec::toral_automorphism([[2, 1], [1, 1]]).unwrap();
        let mu = MeasureModel::lebesgue(&sys).unwrap();
        let pts = mu.sample(1500, 8, 0).unwrap();
        for eps in [0.003, 0.02, 0.125, 0.3, 0.49, 0.5] {
            assert_eq!(
                neighbor_counts(&pts, &sys, eps).unwrap(),
                neighbor_counts_naive(&pts, &sys, eps).unwrap(),
                "eps = {eps}"
            );
        }
        let lattice: Vec<Point> = (0..400)
            .map(|k| Point::torus(&[(k % 20) as f64 / 20.0, (k / 20) as f64 / 20.0]).unwrap())
            .collect();
        for eps in [0.05, 0.1, 0.25] {
            assert_eq!(
                neighbor_counts(&lattice, &sys, eps).unwrap(),
                neighbor_counts_naive(&lattice, &sys, eps).unwrap()
            );
        }
    }

    #[test]
    fn symbolic_counts_and_triples() {
        let sys = SystemSpec::full_shift(2).unwrap();
        let mu = MeasureModel::bernoulli(&sys, vec![0.6, 0.4]).unwrap();
        let pts = mu.sample(120, 2, 4).unwrap();
        for eps in [2.0, 1.0, 0.5, 0.25, 0.0625] {
            assert_eq!(
                neighbor_counts(&pts, &sys, eps).unwrap(),
                neighbor_counts_naive(&pts, &sys, eps).unwrap()
            );
            assert_eq!(
                triple_count(&pts, &sys, eps).unwrap(),
                triple_count_naive(&pts, &sys, eps).unwrap()
            );
        }
    }

    #[test]
    fn torus_triples_match_brute_force() {
        let sys = SystemSpec::toral_automorphism([[2, 1], [1, 1]]).unwrap();
        let mu = MeasureModel::lebesgue(&sys).unwrap();
        let pts = mu.sample(150, 21, 0).unwrap();
        for eps in [0.05, 0.2] {
            assert_eq!(
                triple_count(&pts, &sys, eps).unwrap(),
                triple_count_naive(&pts, &sys, eps).unwrap()
            );
        }
    }

    #[test]
    fn mixed_points_rejected() {
        let sys = SystemSpec::doubling_map();
        let pts = vec![Point::torus(&[0.1]).unwrap(), Point::torus(&[0.1, 0.2]).unwrap()];
        assert!(neighbor_counts(&pts, &sys, 0.1).is_err());
    }
}
