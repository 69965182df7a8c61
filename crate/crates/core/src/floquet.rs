//! Period maps of the mode equations `w'' + (τ² cosh 2σ - j²) w = 0`.
//!
//! The potential is even and `4 s_τ`-periodic. With `h = 2 s_τ`, let `c` and
//! `z` be the even and odd solutions (`c(0) = 1, c'(0) = 0`, `z(0) = 0,
//! z'(0) = 1`) and `W = c z' - z c'` their Wronskian. The period map over `[0, 2h]` is then
//!
//! ```text
//! T = 1/W [[c z' + z c', 2 z z'], [2 c c', c z' + z c']]
//! ```
//!
//! so `tr T - 2 = 4 z c' / W` and `tr T + 2 = 4 c z' / W`. Both are products,
//! which keeps the discriminant accurate when `|tr T|` is close to 2 and when
//! the entries are huge.
//!
//! `σ` is integrated alongside the mode equation so the potential never goes
//! through interpolation. Long spans are split into segments of length at
//! most [`SEGMENT`], each started from the identity; `det T` is the product of
//! the segment determinants.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::profile::{DelaunayParam, DelaunayProfile};

/// Band on `||tr T| - 2|` inside which a mode is called parabolic.
pub const EPS_CLASSIFY: f64 = 1e-6;

/// Maximum segment length for the fundamental-matrix products.
pub const SEGMENT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Hyperbolic => "hyperbolic",
            Self::Elliptic => "elliptic",
            Self::Parabolic => "parabolic",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub j: u32,
    pub t: [[f64; 2]; 2],
    pub det_t: f64,
    pub trace_t: f64,
    /// `tr T - 2` and `tr T + 2` from the half-period factorization.
    pub trace_minus_2: f64,
    pub trace_plus_2: f64,
    /// `λ⁺` (modulus ≥ 1) first.
    pub eigenvalues: [Complex64; 2],
    /// `λ⁺ = exp(4 ζ s_τ)` with `Re ζ ≥ 0`.
    pub zeta: Complex64,
    pub gamma: f64,
    pub classification: Classification,
    /// Half-period data `(c, c', z, z')` at `s = 2 s_τ`.
    pub half: [f64; 4],
}

type Mat2 = [[f64; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn mode_rhs(param: DelaunayParam, j: u32) -> impl Fn(f64, &[f64; 6]) -> [f64; 6] {
    let t2 = param.tau() * param.tau();
    let j2 = (j * j) as f64;
    move |_, y| {
        let q = t2 * (2.0 * y[0]).cosh() - j2;
        [
            y[1],
            -0.5 * t2 * (2.0 * y[0]).sinh(),
            y[3],
            -q * y[2],
            y[5],
            -q * y[4],
        ]
    }
}

/// Fundamental matrix over `[a, b]`, starting from `(σ, σ')` at `a`.
/// Returns the matrix, its determinant as a product of segment determinants,
/// and `(σ, σ')` at `b`.
fn propagate(
    param: DelaunayParam,
    j: u32,
    ode: &Dopri5,
    a: f64,
    b: f64,
    sig: [f64; 2],
) -> Result<(Mat2, f64, [f64; 2])> {
    let n = ((b - a).abs() / SEGMENT).ceil().max(1.0) as usize;
    let step = (b - a) / n as f64;
    let rhs = mode_rhs(param, j);
    let mut m: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut d = 1.0;
    let mut state = sig;
    for k in 0..n {
        let s0 = a + k as f64 * step;
        let s1 = if k + 1 == n { b } else { s0 + step };
        let y = ode.integrate(
            &rhs,
            s0,
            [state[0], state[1], 1.0, 0.0, 0.0, 1.0],
            s1,
            |_, _, _| {},
        )?;
        let seg = [[y[2], y[4]], [y[3], y[5]]];
        d *= det(&seg);
        m = mul(&seg, &m);
        state = [y[0], y[1]];
    }
    Ok((m, d, state))
}

pub fn monodromy(profile: &DelaunayProfile, j: u32, tol: f64) -> Result<MonodromyResult> {
    let param = profile.param();
    if param.is_cylinder() || profile.s_tau() <= 0.0 {
        return Err(Error::DegeneratePeriod);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    let ode = Dopri5::new(0.01 * tol);
    let h = 2.0 * profile.s_tau();
    let (m1, d1, mid) = propagate(param, j, &ode, 0.0, h, [param.sigma0(), 0.0])?;
    let (m2, d2, _) = propagate(param, j, &ode, h, 2.0 * h, mid)?;
    let t = mul(&m2, &m1);
    let (c, dc, z, dz) = (m1[0][0], m1[1][0], m1[0][1], m1[1][1]);
    // c z' and z c' are both ~λ/4 for large modes; their difference loses
    // everything, the segment-determinant product does not.
    let w = d1;
    let tm2 = 4.0 * z * dc / w;
    let tp2 = 4.0 * c * dz / w;
    let trace = 0.5 * (tm2 + tp2);
    let gap = if trace >= 0.0 { tm2 } else { -tp2 };
    let classification = if gap > EPS_CLASSIFY {
        Classification::Hyperbolic
    } else if gap < -EPS_CLASSIFY {
        Classification::Elliptic
    } else {
        Classification::Parabolic
    };
    let disc = tm2 * tp2;
    let period = 2.0 * h;
    let (eigenvalues, zeta) = if disc > 0.0 {
        let big = 0.5 * (trace + trace.signum() * disc.sqrt());
        let small = 1.0 / big;
        let arg = if big < 0.0 { std::f64::consts::PI } else { 0.0 };
        (
            [Complex64::new(big, 0.0), Complex64::new(small, 0.0)],
            Complex64::new(big.abs().ln() / period, arg / period),
        )
    } else {
        let im = 0.5 * (-disc).sqrt();
        let re = 0.5 * trace;
        let phi = im.atan2(re);
        (
            [Complex64::new(re, im), Complex64::new(re, -im)],
            Complex64::new(0.0, phi / period),
        )
    };
    Ok(MonodromyResult {
        j,
        t,
        det_t: d1 * d2,
        trace_t: trace,
        trace_minus_2: tm2,
        trace_plus_2: tp2,
        eigenvalues,
        gamma: zeta.re,
        zeta,
        classification,
        half: [c, dc, z, dz],
    })
}

/// Monodromy data for `j = 0..=j_max`, in order of `j`.
pub fn indicial_spectrum(
    profile: &DelaunayProfile,
    j_max: u32,
    tol: f64,
) -> Result<Vec<MonodromyResult>> {
    (0..=j_max)
        .into_par_iter()
        .map(|j| monodromy(profile, j, tol))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Growing,
    Decaying,
}

/// Sampled Floquet solution `Ψ^{j,±}` on a uniform grid over `[0, 8 s_τ]`.
#[derive(Debug, Clone)]
pub struct ExponentialSolution {
    pub j: u32,
    pub branch: Branch,
    pub lambda: f64,
    pub gamma: f64,
    pub s: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
}

/// `Ψ(0) = 1`, initial slope from the eigenvector of `T`. The decaying branch
/// is integrated backwards from `8 s_τ`, where it equals `λ⁻²` times its
/// initial data, so that the integration direction is the stable one.
pub fn exponential_solution(
    profile: &DelaunayProfile,
    j: u32,
    branch: Branch,
    samples: usize,
    tol: f64,
) -> Result<ExponentialSolution> {
    let mono = monodromy(profile, j, tol)?;
    if mono.classification != Classification::Hyperbolic {
        return Err(Error::NotHyperbolic {
            j,
            classification: mono.classification.as_str().into(),
        });
    }
    let [c, dc, z, dz] = mono.half;
    // T = [[a, b], [d, a]] with b = 2 z z'/W, d = 2 c c'/W; eigenvectors (1, ±k), k = sqrt(d/b)
    let w = mono.det_t.sqrt();
    let a = (c * dz + z * dc) / w;
    let b = 2.0 * z * dz / w;
    let k = ((c * dc) / (z * dz)).sqrt();
    let (mu_p, mu_m) = (a + b * k, a - b * k);
    let (lambda, slope) = match (branch, mu_p.abs() >= mu_m.abs()) {
        (Branch::Growing, true) | (Branch::Decaying, false) => (mu_p, k),
        _ => (mu_m, -k),
    };
    let n = samples.max(3);
    let period = 8.0 * profile.s_tau();
    let s: Vec<f64> = (0..n).map(|i| period * i as f64 / (n - 1) as f64).collect();
    let param = profile.param();
    let ode = Dopri5::new(0.01 * tol).with_h_max(SEGMENT);
    let rhs = {
        let t2 = param.tau() * param.tau();
        let j2 = (j * j) as f64;
        move |_: f64, y: &[f64; 4]| {
            let q = t2 * (2.0 * y[0]).cosh() - j2;
            [y[1], -0.5 * t2 * (2.0 * y[0]).sinh(), y[3], -q * y[2]]
        }
    };
    let mut psi = vec![0.0; n];
    let mut dpsi = vec![0.0; n];
    let sig0 = param.sigma0();
    match branch {
        Branch::Growing => {
            let mut y = [sig0, 0.0, 1.0, slope];
            psi[0] = 1.0;
            dpsi[0] = slope;
            for i in 1..n {
                y = ode.integrate(rhs, s[i - 1], y, s[i], |_, _, _| {})?;
                psi[i] = y[2];
                dpsi[i] = y[3];
            }
        }
        Branch::Decaying => {
            let l2 = lambda * lambda;
            let mut y = [sig0, 0.0, l2, l2 * slope];
            psi[n - 1] = y[2];
            dpsi[n - 1] = y[3];
            for i in (0..n - 1).rev() {
                y = ode.integrate(rhs, s[i + 1], y, s[i], |_, _, _| {})?;
                psi[i] = y[2];
                dpsi[i] = y[3];
            }
        }
    }
    Ok(ExponentialSolution {
        j,
        branch,
        lambda,
        gamma: mono.gamma,
        s,
        psi,
        dpsi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::solve_profile;

    fn profile(tau: f64) -> DelaunayProfile {
        solve_profile(DelaunayParam::new(tau).unwrap(), 1e-10).unwrap()
    }

    #[test]
    fn cylinder_has_no_period_map() {
        assert!(matches!(
            monodromy(&profile(1.0), 2, 1e-10),
            Err(Error::DegeneratePeriod)
        ));
    }

    #[test]
    fn low_modes_have_zero_exponent() {
        let p = profile(0.6);
        for j in [0, 1] {
            let m = monodromy(&p, j, 1e-10).unwrap();
            assert!(m.gamma <= 1e-6, "j {j}: {}", m.gamma);
            assert!((m.det_t - 1.0).abs() < 1e-9);
        }
        let m1 = monodromy(&p, 1, 1e-10).unwrap();
        assert_eq!(m1.classification, Classification::Parabolic);
    }

    #[test]
    fn mode_two_is_hyperbolic() {
        for tau in [0.6, -0.3] {
            let m = monodromy(&profile(tau), 2, 1e-10).unwrap();
            assert_eq!(m.classification, Classification::Hyperbolic);
            assert!(m.gamma > 0.0);
            assert!((m.det_t - 1.0).abs() < 1e-9);
            let prod = m.eigenvalues[0] * m.eigenvalues[1];
            assert!((prod.re - 1.0).abs() < 1e-9 && prod.im.abs() < 1e-12);
        }
    }

    #[test]
    fn factorized_trace_matches_product() {
        let m = monodromy(&profile(0.6), 2, 1e-10).unwrap();
        let tr = m.t[0][0] + m.t[1][1];
        assert!((tr - m.trace_t).abs() < 1e-9 * tr.abs());
    }

    #[test]
    fn spectrum_is_sorted_by_j() {
        let spec = indicial_spectrum(&profile(0.3), 4, 1e-10).unwrap();
        assert_eq!(
            spec.iter().map(|m| m.j).collect::<Vec<_>>(),
            [0, 1, 2, 3, 4]
        );
        assert!(spec[3].gamma > spec[2].gamma);
    }

    #[test]
    fn exponential_solutions_are_floquet() {
        let p = profile(0.3);
        let up = exponential_solution(&p, 2, Branch::Growing, 801, 1e-10).unwrap();
        let dn = exponential_solution(&p, 2, Branch::Decaying, 801, 1e-10).unwrap();
        let half = 400;
        let rate = (up.psi[half] / up.psi[0]).ln() / (4.0 * p.s_tau());
        assert!((rate - up.gamma).abs() < 1e-4);
        for i in 0..=half {
            assert!(
                (up.psi[i + half] - up.lambda * up.psi[i]).abs()
                    < 1e-8 * up.psi[i + half].abs().max(1.0)
            );
            assert!((dn.psi[i + half] - dn.lambda * dn.psi[i]).abs() < 1e-8);
        }
        assert!(dn.lambda.abs() < 1.0);
        let w0 = up.psi[0] * dn.dpsi[0] - up.dpsi[0] * dn.psi[0];
        for i in 0..801 {
            let w = up.psi[i] * dn.dpsi[i] - up.dpsi[i] * dn.psi[i];
            assert!((w - w0).abs() < 1e-8);
        }
    }

    #[test]
    fn low_modes_have_no_exponential_splitting() {
        assert!(matches!(
            exponential_solution(&profile(0.6), 1, Branch::Growing, 100, 1e-10),
            Err(Error::NotHyperbolic { j: 1, .. })
        ));
    }
}
