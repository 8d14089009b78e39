//! Lebesgue mass of Bowen balls for hyperbolic toral automorphisms.
//!
//! For `eps` below the linearization radius, the Bowen ball around any point
//! is the translate of the convex polygon `{v : |M^i v|_inf <= eps}` for `i`
//! in `-backward..=forward`. The polygon is clipped in eigen-coordinates,
//! rescaled so that every constraint has coefficients of order one.

use crate::error::{Error, Result};
use crate::geometry::eigenvalues;

type Pt = (f64, f64);

/// Keep the part of a convex polygon with `a.x + b.y <= c`.
fn clip(poly: &[Pt], a: f64, b: f64, c: f64) -> Vec<Pt> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    if poly.is_empty() {
        return out;
    }
    let side = |p: &Pt| a * p.0 + b * p.1 - c;
    for i in 0..poly.len() {
        let cur = poly[i];
        let next = poly[(i + 1) % poly.len()];
        let (sc, sn) = (side(&cur), side(&next));
        if sc <= 0.0 {
            out.push(cur);
        }
        if (sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0) {
            let t = sc / (sc - sn);
            out.push((cur.0 + t * (next.0 - cur.0), cur.1 + t * (next.1 - cur.1)));
        }
    }
    out
}

fn area(poly: &[Pt]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % n];
        s += x0 * y1 - x1 * y0;
    }
    0.5 * s.abs()
}

fn eigenvector(m: &[[i64; 2]; 2], mu: f64) -> Pt {
    let (a, b, c, d) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
    let v = if b != 0.0 { (b, mu - a) } else { (mu - d, c) };
    let n = v.0.hypot(v.1);
    (v.0 / n, v.1 / n)
}

/// Largest radius for which torus Bowen balls equal their linear model.
pub fn linear_radius(m: &[[i64; 2]; 2], forward: usize, backward: usize) -> f64 {
    let norm = |m: &[[i64; 2]; 2]| {
        m.iter()
            .map(|r| (r[0].abs() + r[1].abs()) as f64)
            .fold(0.0, f64::max)
    };
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let inv = [[det * m[1][1], -det * m[0][1]], [-det * m[1][0], det * m[0][0]]];
    let mut r: f64 = 0.5;
    if forward > 0 {
        r = r.min(0.5 / norm(m));
    }
    if backward > 0 {
        r = r.min(0.5 / norm(&inv));
    }
    r
}

/// Natural log of the Lebesgue area of `{v : |M^i v| <= eps, -backward <= i <= forward}`.
pub fn log_bowen_area(m: &[[i64; 2]; 2], eps: f64, forward: usize, backward: usize) -> Result<f64> {
    let limit = linear_radius(m, forward, backward);
    if eps > limit {
        return Err(Error::Unsupported(format!(
            "toral Bowen ball needs eps <= {limit}, got {eps}"
        )));
    }
    let (mu_u, mu_s) = eigenvalues(m)?;
    let u = eigenvector(m, mu_u);
    let s = eigenvector(m, mu_s);
    let det_us = (u.0 * s.1 - u.1 * s.0).abs();
    let lu = mu_u.abs().ln();

    // v = a u + b s with a = a' |mu_u|^-forward, b = b' |mu_u|^-backward
    let r = eps * (1.0 + 1e-9) * (s.0.abs() + s.1.abs()).max(u.0.abs() + u.1.abs()) / det_us;
    let mut poly = vec![(-r, -r), (r, -r), (r, r), (-r, r)];
    let (sign_u, sign_s) = (mu_u.signum(), mu_s.signum());
    for i in -(backward as i64)..=(forward as i64) {
        let cu = sign_u.powi(i as i32) * ((i - forward as i64) as f64 * lu).exp();
        let cs = sign_s.powi(i as i32) * ((-i - backward as i64) as f64 * lu).exp();
        for k in 0..2 {
            let (uk, sk) = if k == 0 { (u.0, s.0) } else { (u.1, s.1) };
            let (a, b) = (cu * uk, cs * sk);
            poly = clip(&poly, a, b, eps);
            poly = clip(&poly, -a, -b, eps);
        }
    }
    let scaled = area(&poly);
    if !(scaled > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(scaled.ln() - (forward + backward) as f64 * lu + det_us.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAT: [[i64; 2]; 2] = [[2, 1], [1, 1]];

    #[test]
    fn plain_ball_is_square() {
        let a = log_bowen_area(&CAT, 0.1, 0, 0).unwrap().exp();
        assert!((a - 0.04).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_of_degree_two() {
        for n in 0..12 {
            let big = log_bowen_area(&CAT, 0.1, n, 0).unwrap();
            let small = log_bowen_area(&CAT, 0.05, n, 0).unwrap();
            assert!((big - small - 4f64.ln()).abs() < 1e-9, "n = {n}");
        }
    }

    /// Grid-count estimate of the one-step Bowen ball area.
    #[test]
    fn one_step_matches_pixel_count() {
        let eps = 0.1;
        let res = 2000;
        let h = 2.0 * eps / res as f64;
        let mut inside = 0usize;
        for i in 0..res {
            for j in 0..res {
                let x = -eps + (i as f64 + 0.5) * h;
                let y = -eps + (j as f64 + 0.5) * h;
                let fx = 2.0 * x + y;
                let fy = x + y;
                if fx.abs() <= eps && fy.abs() <= eps {
                    inside += 1;
                }
            }
        }
        let est = inside as f64 * h * h;
        let exact = log_bowen_area(&CAT, eps, 1, 0).unwrap().exp();
        assert!((est - exact).abs() < 2e-4 * eps * eps * 100.0, "{est} vs {exact}");
    }

    #[test]
    fn decay_rate_is_log_lambda() {
        let lam = (3.0 + 5f64.sqrt()) / 2.0;
        let a20 = log_bowen_area(&CAT, 0.1, 20, 0).unwrap();
        let a40 = log_bowen_area(&CAT, 0.1, 40, 0).unwrap();
        assert!(((a20 - a40) / 20.0 - lam.ln()).abs() < 1e-9);
        let b = log_bowen_area(&CAT, 0.1, 10, 10).unwrap();
        assert!(b.is_finite());
    }

    #[test]
    fn rejects_large_radius() {
        assert!(log_bowen_area(&CAT, 0.2, 1, 0).is_err());
    }
}
