//! Mean curvature of a vertical graph `z = u(r, θ)` on a polar grid, with the
//! upward normal: `H(u) = −½ div(∇u / W)`, `W = √(1 + |∇u|²)`. The upper unit
//! hemisphere has `H = 1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest accepted grid in either direction.
pub const MIN_GRID: usize = 32;

/// Radii `r_0 < … < r_{n−1}` (uniform) times `n_theta` equally spaced angles.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl PolarGrid {
    pub fn new(r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::InvalidGrid(format!(
                "annulus needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n_r < MIN_GRID || n_theta < MIN_GRID {
            return Err(Error::GridTooCoarse(format!(
                "{n_r} x {n_theta}, need at least {MIN_GRID} x {MIN_GRID}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            n_r,
            n_theta,
        })
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_r - 1) as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.dr()
    }

    pub fn theta(&self, k: usize) -> f64 {
        k as f64 * self.dtheta()
    }

    /// Row-major samples `u[i * n_theta + k] = f(r_i, θ_k)`.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_r * self.n_theta);
        for i in 0..self.n_r {
            for k in 0..self.n_theta {
                out.push(f(self.r(i), self.theta(k)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphCurvature {
    /// `H` at interior rows `1..n_r−1`, row-major (`(n_r − 2) × n_theta`).
    pub h: Vec<f64>,
    /// Same from `−2W³H = Δu (1 + |∇u|²) − ∇²u(∇u, ∇u)`.
    pub h_expanded: Vec<f64>,
    /// `max |h − h_expanded|`.
    pub identity_defect: f64,
}

impl GraphCurvature {
    pub fn max_error(&self, target: f64) -> f64 {
        self.h
            .iter()
            .map(|h| (h - target).abs())
            .fold(0.0, f64::max)
    }
}

/// Second-order differences: a conservative flux form for the divergence and
/// the expanded second-derivative form for the identity check.
pub fn graph_mean_curvature(grid: &PolarGrid, u: &[f64]) -> Result<GraphCurvature> {
    let (nr, nt) = (grid.n_r, grid.n_theta);
    if nr < MIN_GRID || nt < MIN_GRID {
        return Err(Error::GridTooCoarse(format!("{nr} x {nt}")));
    }
    if u.len() != nr * nt {
        return Err(Error::InvalidGrid(format!(
            "{} samples for a {nr} x {nt} grid",
            u.len()
        )));
    }
    let (dr, dt) = (grid.dr(), grid.dtheta());
    let at = |i: usize, k: usize| u[i * nt + (k % nt)];
    let kp = |k: usize| (k + 1) % nt;
    let km = |k: usize| (k + nt - 1) % nt;
    let ut_node = |i: usize, k: usize| (at(i, kp(k)) - at(i, km(k))) / (2.0 * dt);
    let ur_node = |i: usize, k: usize| (at(i + 1, k) - at(i - 1, k)) / (2.0 * dr);

    // radial flux r u_r / W at (i + ½, k)
    let flux_r = |i: usize, k: usize| {
        let r = grid.r(i) + 0.5 * dr;
        let ur = (at(i + 1, k) - at(i, k)) / dr;
        let ut = 0.5 * (ut_node(i, k) + ut_node(i + 1, k));
        let w = (1.0 + ur * ur + ut * ut / (r * r)).sqrt();
        r * ur / w
    };
    // angular flux u_θ / (r W) at (i, k + ½)
    let flux_t = |i: usize, k: usize| {
        let r = grid.r(i);
        let ut = (at(i, k + 1) - at(i, k)) / dt;
        let ur = 0.5 * (ur_node(i, k) + ur_node(i, kp(k)));
        let w = (1.0 + ur * ur + ut * ut / (r * r)).sqrt();
        ut / (r * w)
    };

    let mut h = Vec::with_capacity((nr - 2) * nt);
    let mut h_expanded = Vec::with_capacity((nr - 2) * nt);
    let mut defect = 0.0f64;
    for i in 1..nr - 1 {
        let r = grid.r(i);
        for k in 0..nt {
            let div = (flux_r(i, k) - flux_r(i - 1, k)) / (r * dr)
                + (flux_t(i, k) - flux_t(i, km(k))) / (r * dt);
            let hd = -0.5 * div;

            let c = at(i, k);
            let ur = ur_node(i, k);
            let ut = ut_node(i, k);
            let urr = (at(i + 1, k) - 2.0 * c + at(i - 1, k)) / (dr * dr);
            let utt = (at(i, kp(k)) - 2.0 * c + at(i, km(k))) / (dt * dt);
            let urt = (at(i + 1, kp(k)) - at(i + 1, km(k)) - at(i - 1, kp(k)) + at(i - 1, km(k)))
                / (4.0 * dr * dt);
            // orthonormal frame (e_r, e_θ)
            let (gr, gt) = (ur, ut / r);
            let hrr = urr;
            let hrt = urt / r - ut / (r * r);
            let htt = utt / (r * r) + ur / r;
            let grad2 = gr * gr + gt * gt;
            let lap = hrr + htt;
            let hess = hrr * gr * gr + 2.0 * hrt * gr * gt + htt * gt * gt;
            let w = (1.0 + grad2).sqrt();
            let he = -(lap * (1.0 + grad2) - hess) / (2.0 * w * w * w);

            defect = defect.max((hd - he).abs());
            h.push(hd);
            h_expanded.push(he);
        }
    }
    Ok(GraphCurvature {
        h,
        h_expanded,
        identity_defect: defect,
    })
}
