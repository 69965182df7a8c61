//! Mode operators `L_j = ∂_s² + τ² cosh 2σ - j²` and the geometric Jacobi
//! fields obtained from Killing fields and from varying `τ`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::normal_from;
use crate::error::{Error, Result};
use crate::profile::{solve_profile, DelaunayParam, DelaunayProfile};

/// Relative `τ` step for the Delaunay-parameter field.
pub const DELTA_TAU_REL: f64 = 1e-4;

/// Samples per period used when no grid is given.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct ModePotential<'a> {
    profile: &'a DelaunayProfile,
    j: u32,
}

pub fn mode_potential(profile: &DelaunayProfile, j: u32) -> ModePotential<'_> {
    ModePotential { profile, j }
}

impl ModePotential<'_> {
    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn value(&self, s: f64) -> f64 {
        let tau = self.profile.tau();
        let sigma = self.profile.evaluate(s).sigma;
        tau * tau * (2.0 * sigma).cosh() - (self.j * self.j) as f64
    }

    /// Period of the potential, `4 s_τ` (zero for the cylinder).
    pub fn period(&self) -> f64 {
        4.0 * self.profile.s_tau()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobiKind {
    TransAxis,
    TransX,
    TransY,
    RotX,
    RotY,
    DelaunayParam,
}

impl JacobiKind {
    pub const ALL: [JacobiKind; 6] = [
        Self::TransAxis,
        Self::TransX,
        Self::TransY,
        Self::RotX,
        Self::RotY,
        Self::DelaunayParam,
    ];

    /// Fourier index of the field: `Φ = φ(s)·{1, cos θ, sin θ}` for `j = 0, 1, -1`.
    pub fn j(&self) -> i32 {
        match self {
            Self::TransAxis | Self::DelaunayParam => 0,
            Self::TransX | Self::RotX => 1,
            Self::TransY | Self::RotY => -1,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::TransAxis => "trans_axis",
            Self::TransX => "trans_x",
            Self::TransY => "trans_y",
            Self::RotX => "rot_x",
            Self::RotY => "rot_y",
            Self::DelaunayParam => "delaunay_param",
        }
    }
}

impl FromStr for JacobiKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown Jacobi field '{s}'")))
    }
}

/// Sampled θ-profile of a geometric Jacobi field on a uniform grid.
#[derive(Debug, Clone)]
pub struct JacobiField {
    pub kind: JacobiKind,
    pub j: i32,
    pub s: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Radial and axial components of `N` stripped of their θ factor, together
/// with the radius and height of the point.
fn frame(tau: f64, profile: &DelaunayProfile, s: f64) -> (f64, f64, f64, f64) {
    let p = profile.evaluate(s);
    let n = normal_from(tau, &p, 0.0);
    (n.x, n.z, 0.5 * tau * p.sigma.exp(), 0.5 * p.kappa)
}

/// Value of a Killing-projection field. For the cylinder the axial
/// translation projects to zero exactly.
pub fn killing_projection(profile: &DelaunayProfile, kind: JacobiKind, s: f64) -> f64 {
    let tau = profile.tau();
    let (n_r, n_z, r, z) = frame(tau, profile, s);
    match kind {
        JacobiKind::TransAxis => n_z,
        JacobiKind::TransX | JacobiKind::TransY => n_r,
        // (z, 0, -x) · N and (0, z, -y) · N
        JacobiKind::RotX | JacobiKind::RotY => z * n_r - r * n_z,
        JacobiKind::DelaunayParam => f64::NAN,
    }
}

/// Uniform grid of `n` points over `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Geometric Jacobi field sampled on one period `[0, 8 s_τ]` (for the
/// cylinder, on `[0, 2π]`).
pub fn geometric_jacobi(profile: &DelaunayProfile, kind: JacobiKind) -> Result<JacobiField> {
    let len = if profile.param().is_cylinder() {
        std::f64::consts::TAU
    } else {
        profile.period()
    };
    geometric_jacobi_on(
        profile,
        kind,
        &uniform_grid(0.0, len, DEFAULT_SAMPLES_PER_PERIOD + 1),
        DELTA_TAU_REL,
    )
}

/// Geometric Jacobi field on a caller-supplied grid. `delta_rel` is the
/// relative `τ` step of the Delaunay-parameter field (ignored otherwise).
pub fn geometric_jacobi_on(
    profile: &DelaunayProfile,
    kind: JacobiKind,
    grid: &[f64],
    delta_rel: f64,
) -> Result<JacobiField> {
    let phi = match kind {
        JacobiKind::DelaunayParam => delaunay_param_field(profile, grid, delta_rel)?,
        JacobiKind::TransAxis if profile.param().is_cylinder() => vec![0.0; grid.len()],
        _ => grid
            .iter()
            .map(|&s| killing_projection(profile, kind, s))
            .collect(),
    };
    Ok(JacobiField {
        kind,
        j: kind.j(),
        s: grid.to_vec(),
        phi,
    })
}

/// `(∂_τ X_τ) · N_τ` at fixed `(s, θ)` by centered differences over profiles
/// at `τ ± δτ`. The position is `(r cos θ, r sin θ, κ/2)`, so the projection
/// is θ-independent.
fn delaunay_param_field(
    profile: &DelaunayProfile,
    grid: &[f64],
    delta_rel: f64,
) -> Result<Vec<f64>> {
    let tau = profile.tau();
    let d = delta_rel * tau.abs();
    if tau + d > 1.0 {
        return Err(Error::ParameterOutOfRange(format!(
            "tau = {tau} too close to 1 for a centered tau difference"
        )));
    }
    let tol = 1e-12;
    let plus = solve_profile(DelaunayParam::new(tau + d)?, tol)?;
    let minus = solve_profile(DelaunayParam::new(tau - d)?, tol)?;
    Ok(grid
        .iter()
        .map(|&s| {
            let (n_r, n_z, _, _) = frame(tau, profile, s);
            let (_, _, rp, zp) = frame(tau + d, &plus, s);
            let (_, _, rm, zm) = frame(tau - d, &minus, s);
            ((rp - rm) * n_r + (zp - zm) * n_z) / (2.0 * d)
        })
        .collect())
}

/// `φ'' + (τ² cosh 2σ - j²) φ` on the interior of a uniform grid, with a
/// fourth-order second difference; the two points at each end are left at 0.
pub fn mode_residual(
    profile: &DelaunayProfile,
    j: u32,
    s: &[f64],
    phi: &[f64],
) -> Result<Vec<f64>> {
    let n = s.len();
    if n != phi.len() || n < 5 {
        return Err(Error::InvalidGrid(format!(
            "need at least 5 matching samples, got {} and {}",
            n,
            phi.len()
        )));
    }
    let h = (s[n - 1] - s[0]) / (n - 1) as f64;
    let q = mode_potential(profile, j);
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        let d2 = (-phi[i - 2] + 16.0 * phi[i - 1] - 30.0 * phi[i] + 16.0 * phi[i + 1] - phi[i + 2])
            / (12.0 * h * h);
        out[i] = d2 + q.value(s[i]) * phi[i];
    }
    Ok(out)
}

impl JacobiField {
    pub fn residual(&self, profile: &DelaunayProfile) -> Result<Vec<f64>> {
        mode_residual(profile, self.j.unsigned_abs(), &self.s, &self.phi)
    }

    pub fn max_residual(&self, profile: &DelaunayProfile) -> Result<f64> {
        Ok(self
            .residual(profile)?
            .iter()
            .fold(0.0f64, |m, r| m.max(r.abs())))
    }

    pub fn sup(&self) -> f64 {
        self.phi.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// `max |φ|` over `[0, n · 8 s_τ]` for `n = 1..=periods`.
pub fn growth_profile(profile: &DelaunayProfile, kind: JacobiKind, periods: usize) -> Vec<f64> {
    let p = profile.period();
    let per = 1024;
    let mut running = 0.0f64;
    let mut out = Vec::with_capacity(periods);
    for n in 0..periods {
        for i in 0..=per {
            let s = p * (n as f64 + i as f64 / per as f64);
            running = running.max(killing_projection(profile, kind, s).abs());
        }
        out.push(running);
    }
    out
}
