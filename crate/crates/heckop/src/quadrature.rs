//! Quadrature on the torus `[0, 2π)^n`.
//!
//! `Uniform` is the periodic trapezoid rule. `Alcove` splits the torus along
//! the root walls `α(Y) ∈ πZ` and uses Gauss–Legendre on each cell, so the
//! weights `|sin α(Y)|^{m_α}` are analytic on every closed cell and odd or
//! negative multiplicities do not spoil spectral convergence.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Rule {
    Uniform { per_axis: usize },
    /// `order` Gauss nodes per cell edge; `breaks` are extra radial cut points
    /// (rank one only), mirrored to `2π - r`.
    Alcove { order: usize, breaks: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub rank: usize,
    pub rule: Rule,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    for i in 0..q.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=q {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if q == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = q as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[q - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wt;
        w[q - 1 - i] = 0.5 * wt;
    }
    (x, w)
}

impl TorusGrid {
    pub fn uniform(rank: usize, per_axis: usize) -> Self {
        let h = 2.0 * PI / per_axis as f64;
        let axis: Vec<f64> = (0..per_axis).map(|k| k as f64 * h).collect();
        let mut points = vec![vec![]];
        for _ in 0..rank {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    })
                })
                .collect();
        }
        let weights = vec![h.powi(rank as i32); points.len()];
        TorusGrid { rank, rule: Rule::Uniform { per_axis }, points, weights }
    }

    pub fn alcove(rank: usize, order: usize) -> Result<Self> {
        Self::alcove_with_breaks(rank, order, &[])
    }

    pub fn alcove_with_breaks(rank: usize, order: usize, breaks: &[f64]) -> Result<Self> {
        let (x, w) = gauss_legendre(order);
        let rule = Rule::Alcove { order, breaks: breaks.to_vec() };
        match rank {
            1 => {
                let mut cuts: Vec<f64> = (0..=4).map(|k| k as f64 * FRAC_PI_2).collect();
                for &r in breaks {
                    if !(r > 0.0 && r < FRAC_PI_2) {
                        return Err(Error::Domain(format!("break {r} must lie in (0, π/2)")));
                    }
                    cuts.push(r);
                    cuts.push(2.0 * PI - r);
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for c in cuts.windows(2) {
                    let len = c[1] - c[0];
                    for (xi, wi) in x.iter().zip(&w) {
                        points.push(vec![c[0] + len * xi]);
                        weights.push(len * wi);
                    }
                }
                Ok(TorusGrid { rank, rule, points, weights })
            }
            2 => {
                if !breaks.is_empty() {
                    return Err(Error::Domain("radial breaks are supported at rank one only".into()));
                }
                let h = FRAC_PI_2;
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for a in 0..4 {
                    for b in 0..4 {
                        let (x0, y0) = (a as f64 * h, b as f64 * h);
                        let p = |dx: f64, dy: f64| [x0 + dx * h, y0 + dy * h];
                        // the walls y2 - y1 ∈ πZ run along the main diagonal when a - b is
                        // even, the walls y2 + y1 ∈ πZ along the anti-diagonal otherwise
                        let tris = if (a + b) % 2 == 0 {
                            [[p(0., 0.), p(1., 0.), p(1., 1.)], [p(0., 0.), p(0., 1.), p(1., 1.)]]
                        } else {
                            [[p(0., 0.), p(1., 0.), p(0., 1.)], [p(1., 1.), p(1., 0.), p(0., 1.)]]
                        };
                        for t in tris {
                            triangle_rule(&t, &x, &w, &mut points, &mut weights);
                        }
                    }
                }
                Ok(TorusGrid { rank, rule, points, weights })
            }
            _ => Err(Error::Domain(format!("alcove quadrature is implemented for rank 1 and 2, got {rank}"))),
        }
    }

    pub fn from_rule(rank: usize, rule: &Rule) -> Result<Self> {
        match rule {
            Rule::Uniform { per_axis } => Ok(Self::uniform(rank, *per_axis)),
            Rule::Alcove { order, breaks } => Self::alcove_with_breaks(rank, *order, breaks),
        }
    }

    /// Grid with `n` points per axis: the trapezoid rule for `uniform`, or an
    /// alcove rule with `n / 4` nodes per cell edge.
    pub fn with_resolution(rank: usize, n: usize, uniform: bool) -> Result<Self> {
        if uniform {
            Ok(Self::uniform(rank, n))
        } else {
            Self::alcove(rank, (n / 4).max(2))
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Same rule with roughly twice the resolution.
    pub fn refined(&self) -> Result<Self> {
        let rule = match &self.rule {
            Rule::Uniform { per_axis } => Rule::Uniform { per_axis: 2 * per_axis },
            Rule::Alcove { order, breaks } => Rule::Alcove { order: 2 * order, breaks: breaks.clone() },
        };
        Self::from_rule(self.rank, &rule)
    }

    pub fn same_rule(&self, other: &TorusGrid) -> bool {
        self.rank == other.rank && self.rule == other.rule
    }
}

/// Collapsed (Duffy) product rule on the triangle `v0 v1 v2`:
/// `P(u, s) = v0 + u (v1 - v0) + u s (v2 - v1)`, Jacobian `u |det|`.
fn triangle_rule(v: &[[f64; 2]; 3], x: &[f64], w: &[f64], points: &mut Vec<Vec<f64>>, weights: &mut Vec<f64>) {
    let e1 = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
    let e2 = [v[2][0] - v[1][0], v[2][1] - v[1][1]];
    let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
    for (u, wu) in x.iter().zip(w) {
        for (s, ws) in x.iter().zip(w) {
            points.push(vec![v[0][0] + u * e1[0] + u * s * e2[0], v[0][1] + u * e1[1] + u * s * e2[1]]);
            weights.push(wu * ws * u * det);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exactness() {
        for q in [1, 2, 5, 12, 40] {
            let (x, w) = gauss_legendre(q);
            for deg in 0..2 * q {
                let s: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32)).sum();
                assert!((s - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "q={q} deg={deg}");
            }
        }
    }

    #[test]
    fn total_measure() {
        for g in [
            TorusGrid::uniform(1, 64),
            TorusGrid::alcove(1, 8).unwrap(),
            TorusGrid::alcove_with_breaks(1, 8, &[0.3]).unwrap(),
            TorusGrid::uniform(2, 16),
            TorusGrid::alcove(2, 6).unwrap(),
        ] {
            let ones = vec![1.0; g.len()];
            let expect = (2.0 * PI).powi(g.rank as i32);
            assert!((g.integrate(&ones) - expect).abs() < 1e-11);
        }
    }

    #[test]
    fn kinked_weight_converges_spectrally() {
        // ∫ |sin y| cos² y dy = 4/3 over a period
        let f = |y: f64| y.sin().abs() * y.cos().powi(2);
        let exact = 4.0 / 3.0;
        let err = |g: &TorusGrid| {
            let v: Vec<f64> = g.points.iter().map(|p| f(p[0])).collect();
            (g.integrate(&v) - exact).abs()
        };
        assert!(err(&TorusGrid::alcove(1, 16).unwrap()) < 1e-14);
        let coarse = err(&TorusGrid::uniform(1, 256));
        let fine = err(&TorusGrid::uniform(1, 512));
        assert!(coarse > 1e-6 && (coarse / fine - 4.0).abs() < 0.1, "{coarse} {fine}");
    }

    #[test]
    fn rank2_wall_weight() {
        // ∫∫ |sin(y2 - y1) sin(y2 + y1)| over the torus = 4π²·(2/π)² = 16
        let g = TorusGrid::alcove(2, 12).unwrap();
        let v: Vec<f64> = g.points.iter().map(|p| ((p[1] - p[0]).sin() * (p[1] + p[0]).sin()).abs()).collect();
        assert!((g.integrate(&v) - 16.0).abs() < 1e-12, "{}", g.integrate(&v));
    }
}
