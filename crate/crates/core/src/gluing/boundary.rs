use serde::{Deserialize, Serialize};

use super::matching::MatchState;
use super::mp;
use crate::error::{Error, Result};
use crate::harmonic::{exterior_extension, CircleFourier};
use crate::profile::DelaunayProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Delaunay,
    Surface,
}

/// Dirichlet data and `r ∂_r` data on the matching circle, both as Fourier
/// series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyPair {
    pub dirichlet: CircleFourier,
    pub neumann: CircleFourier,
}

impl CauchyPair {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            dirichlet: CircleFourier::zeros(n_max),
            neumann: CircleFourier::zeros(n_max),
        }
    }

    pub fn n_max(&self) -> Result<usize> {
        self.dirichlet.check_same(&self.neumann)?;
        Ok(self.dirichlet.n_max())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            dirichlet: self.dirichlet.add(&other.dirichlet)?,
            neumann: self.neumann.add(&other.neumann)?,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            dirichlet: self.dirichlet.scale(a),
            neumann: self.neumann.scale(a),
        }
    }
}

/// `u(r, θ) = log_coeff · log r + constant + Σ c_n(r) e^{inθ}` sampled on the
/// circle `r = radius`, with its `r ∂_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusGraphData {
    pub radius: f64,
    pub side: Side,
    pub dirichlet_log: f64,
    pub dirichlet_const: f64,
    pub dirichlet: CircleFourier,
    pub neumann_log: f64,
    pub neumann: CircleFourier,
}

impl AnnulusGraphData {
    pub fn dirichlet_at(&self, theta: f64) -> f64 {
        self.dirichlet_log * self.radius.ln() + self.dirichlet_const + self.dirichlet.eval(theta)
    }

    pub fn neumann_at(&self, theta: f64) -> f64 {
        self.neumann_log + self.neumann.eval(theta)
    }

    /// Data relative to the common term `∓(τ²/4) log r`: the constant folds
    /// into mode 0, and any excess log coefficient shows up in mode 0 of both
    /// traces.
    pub fn relative_to_common(&self, tau: f64) -> CauchyPair {
        let common = mp(tau) * 0.25 * tau * tau;
        let dl = self.dirichlet_log - common;
        let nl = self.neumann_log - common;
        let mut d = self.dirichlet.clone();
        d.set(0, d.get(0) + dl * self.radius.ln() + self.dirichlet_const);
        let mut n = self.neumann.clone();
        n.set(0, n.get(0) + nl);
        CauchyPair {
            dirichlet: d,
            neumann: n,
        }
    }

    /// Just the explicit log-and-constant part, `relative_to_common` without
    /// the Fourier remainder.
    pub fn leading_order(&self, tau: f64) -> CauchyPair {
        let mut lead = self.clone();
        lead.dirichlet = CircleFourier::zeros(self.dirichlet.n_max());
        lead.neumann = CircleFourier::zeros(self.neumann.n_max());
        lead.relative_to_common(tau)
    }
}

/// Root of `|r(s)| = r` on `s ∈ [−4 s_τ, 0]`, where `|r|` decreases from the
/// bulb to the neck.
fn solve_s_of_r(profile: &DelaunayProfile, r: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-4.0 * profile.s_tau(), 0.0);
    let f = |s: f64| profile.radius(s).abs() - r;
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo >= 0.0 && fhi <= 0.0) {
        return Err(Error::RootFindFailure(format!(
            "radius {r} outside the monotone range [{}, {}]",
            fhi + r,
            flo + r
        )));
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let p = profile.evaluate(s);
        let val = f(s);
        if val.abs() <= 4.0 * f64::EPSILON * r {
            return Ok(s);
        }
        if val > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + s.abs()) {
            return Ok(s);
        }
        // d|r|/ds = |r| σ'
        let slope = (val + r) * p.dsigma;
        let newton = s - val / slope;
        s = if slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::RootFindFailure(format!("no convergence at r = {r}")))
}

/// Height `U = κ/2 + translation` of the end graph over the circle of radius
/// `r`, and `r ∂_r U`.
pub fn delaunay_graph(profile: &DelaunayProfile, r: f64) -> Result<(f64, f64)> {
    if profile.param().is_cylinder() {
        return Err(Error::ParameterOutOfRange(
            "the cylinder is not a graph over the plane".into(),
        ));
    }
    let s = solve_s_of_r(profile, r)?;
    let p = profile.evaluate(s);
    let u = 0.5 * p.kappa + profile.neck_geometry().translation;
    Ok((u, 0.5 * p.dkappa / p.dsigma))
}

/// `∓(τ²/4) log(2r)`, the explicit part of the end graph.
pub fn delaunay_leading(tau: f64, r: f64) -> f64 {
    mp(tau) * 0.25 * tau * tau * (2.0 * r).ln()
}

/// Boundary data of the end graph on `r = r_τ`: log coefficient `∓τ²/4`,
/// constant `∓(τ²/4) log 2`, and the remainder in mode 0.
pub fn delaunay_boundary_data(profile: &DelaunayProfile, n_max: usize) -> Result<AnnulusGraphData> {
    let tau = profile.tau();
    let r_tau = profile.neck_geometry().r_tau.abs();
    let (u, rdu) = delaunay_graph(profile, r_tau)?;
    let log_c = mp(tau) * 0.25 * tau * tau;
    let mut dirichlet = CircleFourier::zeros(n_max);
    dirichlet.set(0, (u - delaunay_leading(tau, r_tau)).into());
    let mut neumann = CircleFourier::zeros(n_max);
    neumann.set(0, (rdu - log_c).into());
    Ok(AnnulusGraphData {
        radius: r_tau,
        side: Side::Delaunay,
        dirichlet_log: log_c,
        dirichlet_const: log_c * 2f64.ln(),
        dirichlet,
        neumann_log: log_c,
        neumann,
    })
}

/// `sup |U − ∓(τ²/4) log(2r)|` over `n` radii spread over `[r_τ/2, r_τ]`.
pub fn delaunay_remainder_sup(profile: &DelaunayProfile, n: usize) -> Result<f64> {
    let tau = profile.tau();
    let r_tau = profile.neck_geometry().r_tau.abs();
    let n = n.max(2);
    let mut sup = 0.0f64;
    for i in 0..n {
        let r = r_tau * (0.5 + 0.5 * i as f64 / (n - 1) as f64);
        let (u, _) = delaunay_graph(profile, r)?;
        sup = sup.max((u - delaunay_leading(tau, r)).abs());
    }
    Ok(sup)
}

/// Surface side on `r = radius`: `∓(τ̃²/4) log r + a₀ + a₁ x + a₋₁ y − Ŵ_g`
/// plus the supplied corrections (relative to the common log term).
pub fn surface_boundary_data(
    state: &MatchState,
    corrections: &CauchyPair,
    tau: f64,
    radius: f64,
) -> Result<AnnulusGraphData> {
    let n_max = corrections.n_max()?;
    state.g.check_same(&corrections.dirichlet)?;
    let w = exterior_extension(&state.g, radius, radius)?;
    let lin = state.linear_modes(n_max, radius);
    let dirichlet = lin.sub(&w.value)?.add(&corrections.dirichlet)?;
    let neumann = lin.sub(&w.r_dr)?.add(&corrections.neumann)?;
    let log_c = mp(tau) * 0.25 * state.tilde_tau_sq(tau);
    Ok(AnnulusGraphData {
        radius,
        side: Side::Surface,
        dirichlet_log: log_c,
        dirichlet_const: state.a0,
        dirichlet,
        neumann_log: log_c,
        neumann,
    })
}
