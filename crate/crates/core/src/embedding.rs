//! The isothermal embedding `X(s, θ) = ½(τ e^σ cos θ, τ e^σ sin θ, κ)`.
//!
//! [`embed`] returns the normal `N` in its standard form for each sign of `τ`.
//! Curvature is measured against `ν = X_s × X_θ / |X_s × X_θ|`, which is `N`
//! for unduloids and `-N` for nodoids; with respect to `ν` every Delaunay
//! surface has mean curvature `+1` (average of principal curvatures).

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::mesh::{periodic_grid, RegionTag, SurfaceMesh, Vec3};
use crate::ode::Dopri5;
use crate::profile::{DelaunayProfile, ProfilePoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub position: Vec3,
    pub normal: Vec3,
    pub s: f64,
    pub theta: f64,
}

/// Coefficients of the first and second fundamental forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl FundamentalForms {
    pub fn mean_curvature(&self) -> f64 {
        (self.e * self.n - 2.0 * self.f * self.m + self.g * self.l)
            / (2.0 * (self.e * self.g - self.f * self.f))
    }
}

pub(crate) fn position_from(tau: f64, p: &ProfilePoint, theta: f64) -> Vec3 {
    let a = 0.5 * tau * p.sigma.exp();
    Vec3::new(a * theta.cos(), a * theta.sin(), 0.5 * p.kappa)
}

pub(crate) fn normal_from(tau: f64, p: &ProfilePoint, theta: f64) -> Vec3 {
    if tau > 0.0 {
        let c = -tau * p.sigma.cosh();
        Vec3::new(c * theta.cos(), c * theta.sin(), p.dsigma)
    } else {
        let c = tau * p.sigma.sinh();
        Vec3::new(c * theta.cos(), c * theta.sin(), -p.dsigma)
    }
}

/// `ν = sign(τ) N`, the orientation with `H = +1`.
pub(crate) fn curvature_normal_from(tau: f64, p: &ProfilePoint, theta: f64) -> Vec3 {
    tau.signum() * normal_from(tau, p, theta)
}

pub fn embed(profile: &DelaunayProfile, s: f64, theta: f64) -> SurfacePoint {
    let p = profile.evaluate(s);
    let tau = profile.tau();
    SurfacePoint {
        position: position_from(tau, &p, theta),
        normal: normal_from(tau, &p, theta),
        s,
        theta: theta.rem_euclid(TAU),
    }
}

/// Fundamental forms at `(s, θ = 0)` from analytic derivatives of the
/// embedding, second form taken against `ν`; both are independent of `θ`.
pub fn fundamental_forms(profile: &DelaunayProfile, s: f64) -> FundamentalForms {
    let tau = profile.tau();
    let p = profile.evaluate(s);
    let a = 0.5 * tau * p.sigma.exp();
    let ddkappa = tau * tau * p.dsigma * (2.0 * p.sigma).exp();
    let xs = Vec3::new(a * p.dsigma, 0.0, 0.5 * p.dkappa);
    let xt = Vec3::new(0.0, a, 0.0);
    let xss = Vec3::new(a * (p.ddsigma + p.dsigma * p.dsigma), 0.0, 0.5 * ddkappa);
    let xst = Vec3::new(0.0, a * p.dsigma, 0.0);
    let xtt = Vec3::new(-a, 0.0, 0.0);
    let nrm = curvature_normal_from(tau, &p, 0.0);
    FundamentalForms {
        e: xs.dot(&xs),
        f: xs.dot(&xt),
        g: xt.dot(&xt),
        l: xss.dot(&nrm),
        m: xst.dot(&nrm),
        n: xtt.dot(&nrm),
    }
}

/// Mean curvature from the analytic fundamental forms.
pub fn mean_curvature(profile: &DelaunayProfile, s: f64) -> Result<f64> {
    let ff = fundamental_forms(profile, s);
    let det = ff.e * ff.g - ff.f * ff.f;
    if !(det > 1e-300) || !det.is_finite() {
        return Err(Error::DegenerateMetric { s, det });
    }
    Ok(ff.mean_curvature())
}

/// Default step of [`finite_difference_mean_curvature`].
pub const FD_STEP: f64 = 3e-3;

/// Mean curvature without fundamental forms: neighbouring states come from a
/// tight local integration of the generating ODE started at `s` (with the
/// height reset to zero, which only translates the surface), then
/// `H = -½ (ν_s·X_s/E + ν_θ·X_θ/G)` by 6th-order central differences.
///
/// At a thin neck the principal curvatures are about `±1/r(0)` and cancel,
/// so low-order stencils lose everything to roundoff.
pub fn finite_difference_mean_curvature(p: &DelaunayProfile, s: f64, h: f64) -> Result<f64> {
    const W: [f64; 3] = [45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0];
    let tau = p.tau();
    let e0 = p.evaluate(s);
    let ode = Dopri5::new(1e-15);
    let state = |ds: f64| -> Result<ProfilePoint> {
        let y = ode.integrate(
            |_, y: &[f64; 3]| {
                let k = if tau > 0.0 { 1.0 } else { -1.0 };
                [
                    y[1],
                    -0.5 * tau * tau * (2.0 * y[0]).sinh(),
                    0.5 * tau * tau * ((2.0 * y[0]).exp() + k),
                ]
            },
            0.0,
            [e0.sigma, e0.dsigma, 0.0],
            ds,
            |_, _, _| {},
        )?;
        Ok(ProfilePoint {
            sigma: y[0],
            dsigma: y[1],
            ddsigma: 0.0,
            kappa: y[2],
            dkappa: 0.0,
        })
    };
    let nu = |p: &ProfilePoint, th: f64| tau.signum() * normal_from(tau, p, th);
    let (mut xs, mut ns, mut xt, mut nt) =
        (Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
    for (k, &w) in W.iter().enumerate() {
        let d = (k + 1) as f64 * h;
        let (pp, pm) = (state(d)?, state(-d)?);
        xs += w * (position_from(tau, &pp, 0.0) - position_from(tau, &pm, 0.0)) / h;
        ns += w * (nu(&pp, 0.0) - nu(&pm, 0.0)) / h;
        xt += w * (position_from(tau, &e0, d) - position_from(tau, &e0, -d)) / h;
        nt += w * (nu(&e0, d) - nu(&e0, -d)) / h;
    }
    Ok(-0.5 * (ns.dot(&xs) / xs.norm_squared() + nt.dot(&xt) / xt.norm_squared()))
}

/// Uniform `(s, θ)` grid of `n_s` rows and `n_theta` columns, periodic in θ.
/// Vertex normals are `-ν`; faces wind counterclockwise around them.
pub fn mesh_delaunay(
    profile: &DelaunayProfile,
    s_min: f64,
    s_max: f64,
    n_s: usize,
    n_theta: usize,
) -> Result<SurfaceMesh> {
    if !(s_min < s_max) || n_s < 2 || n_theta < 8 {
        return Err(Error::InvalidGrid(format!(
            "need s_min < s_max, n_s >= 2, n_theta >= 8 (got [{s_min}, {s_max}], {n_s}, {n_theta})"
        )));
    }
    let tau = profile.tau();
    let ds = (s_max - s_min) / (n_s - 1) as f64;
    let dt = TAU / n_theta as f64;
    Ok(periodic_grid(
        n_s,
        n_theta,
        false,
        RegionTag::Delaunay,
        |i, j| {
            let s = if i + 1 == n_s {
                s_max
            } else {
                s_min + i as f64 * ds
            };
            let pt = embed(profile, s, j as f64 * dt);
            (pt.position, -tau.signum() * pt.normal)
        },
    ))
}

/// Distance from `x` to the union of unit spheres centered at `(0, 0, 2k+1)`.
pub fn distance_to_sphere_chain(x: &Vec3) -> f64 {
    let k = ((x.z - 1.0) / 2.0).round();
    let c = Vec3::new(0.0, 0.0, 2.0 * k + 1.0);
    ((x - c).norm() - 1.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{solve_profile, DelaunayParam};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn profile(tau: f64) -> DelaunayProfile {
        solve_profile(DelaunayParam::new(tau).unwrap(), 1e-10).unwrap()
    }

    #[test]
    fn cylinder_point() {
        let pt = embed(&profile(1.0), 0.0, 0.0);
        assert!((pt.position - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
        assert!((pt.normal - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unduloid_waist_point() {
        let pt = embed(&profile(0.6), 0.0, FRAC_PI_2);
        assert!((pt.position - Vec3::new(0.0, 0.1, 0.0)).norm() < 1e-14);
        assert!((pt.normal - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn nodoid_waist_normal() {
        let pt = embed(&profile(-0.5), 0.0, 0.0);
        assert!((pt.normal - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn normal_unit_and_metric_isothermal() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for tau in [1.0, 0.6, 0.1, -0.5] {
            let p = profile(tau);
            for _ in 0..100 {
                let s = rng.gen_range(-10.0..10.0);
                let th = rng.gen_range(0.0..TAU);
                assert!((embed(&p, s, th).normal.norm() - 1.0).abs() < 1e-10);
                let ff = fundamental_forms(&p, s);
                assert!((ff.e - ff.g).abs() <= 1e-8 * ff.e);
                assert!(ff.f.abs() <= 1e-8 * ff.e);
            }
        }
    }

    #[test]
    fn analytic_mean_curvature_is_one_and_matches_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for tau in [1.0, 0.6, 0.1, 0.01, -0.5] {
            let p = profile(tau);
            for _ in 0..100 {
                let s = rng.gen_range(-30.0..30.0);
                let h = mean_curvature(&p, s).unwrap();
                assert!((h - 1.0).abs() <= 1e-8, "tau {tau} s {s}: {h}");
                let fd = finite_difference_mean_curvature(&p, s, FD_STEP).unwrap();
                assert!((fd - h).abs() <= 1e-6, "tau {tau} s {s}: fd {fd}");
            }
        }
    }

    #[test]
    fn mesh_rejects_bad_grid() {
        let p = profile(0.5);
        assert!(mesh_delaunay(&p, 1.0, 0.0, 10, 10).is_err());
        assert!(mesh_delaunay(&p, 0.0, 1.0, 1, 10).is_err());
        assert!(mesh_delaunay(&p, 0.0, 1.0, 10, 4).is_err());
    }

    #[test]
    fn cylinder_mesh_radius_and_curvature() {
        let p = profile(1.0);
        let m = mesh_delaunay(&p, 0.0, TAU, 64, 64).unwrap();
        for v in &m.vertices {
            assert!(((v.x * v.x + v.y * v.y).sqrt() - 0.5).abs() < 1e-15);
        }
        let dc = crate::mesh::discrete_mean_curvature(&m).unwrap();
        assert!(dc.max_interior_error(1.0, |_| true) < 0.02);
    }

    #[test]
    fn mesh_winding_follows_outward_normal() {
        for tau in [0.4, -0.4] {
            let p = profile(tau);
            let m = mesh_delaunay(&p, -1.0, 1.0, 16, 16).unwrap();
            for f in &m.faces {
                let [a, b, c] = *f;
                let fnrm = (m.vertices[b] - m.vertices[a]).cross(&(m.vertices[c] - m.vertices[a]));
                assert!(fnrm.dot(&m.vertex_normals[a]) > 0.0, "tau {tau}");
            }
        }
    }

    #[test]
    fn discrete_curvature_on_unduloid() {
        let p = profile(0.6);
        let m = mesh_delaunay(&p, 0.0, p.period(), 128, 128).unwrap();
        let dc = crate::mesh::discrete_mean_curvature(&m).unwrap();
        assert!(dc.max_interior_error(1.0, |_| true) < 0.02);
    }
}
