//! Composite meshes: a base surface with a small disk removed at `p`, a collar
//! annulus, and a half-Delaunay piece whose axis is the normal ray at `p`.
//!
//! In the local frame (`p = 0`, outward normal `+z`):
//!
//! * the Delaunay piece is the embedding over `s ∈ [−s_τ, 7s_τ]`, lifted so
//!   its end graph is `U_τ − P₀`;
//! * the base near `p` is lifted by `η(ρ)(P − P₀)`, where `P` is the matched
//!   surface-side harmonic part and `P₀` its mean at the cutoff radius `ρ_c`;
//! * the collar on `ρ ∈ [r_τ, 2r_τ]` blends the leading-order Delaunay-side
//!   graph `∓(τ²/4) log(2ρ) − W_h − P₀` into the base with a quintic in
//!   `log ρ`.
//!
//! The matching uses the explicit log-and-constant data of the end graph; the
//! τ³ remainder is left unmatched and shows up as the interface mismatch.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3};
use serde::{Deserialize, Serialize};

use super::boundary::{delaunay_boundary_data, CauchyPair};
use super::matching::{match_cauchy_data, MatchState};
use super::mp;
use crate::embedding::{curvature_normal_from, mesh_delaunay, position_from};
use crate::error::{Error, Result};
use crate::harmonic::CircleFourier;
use crate::mesh::{discrete_mean_curvature, RegionTag, SurfaceMesh, Vec3};
use crate::profile::{solve_profile, DelaunayParam, DelaunayProfile};

/// Largest `|τ|` accepted for the glued end.
pub const MAX_GLUE_TAU: f64 = 0.25;

/// Fourier truncation used for the matching.
const MATCH_MODES: usize = 8;

/// Angle of the first vertex on every ring; puts the corners of the
/// Delaunay-base square on ring vertices.
const ANGLE0: f64 = -0.25 * PI;

/// Vertices closer than this many `r_τ` to the gluing circle are left out of
/// the interior curvature statistic.
pub const H_EXCLUSION: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Base {
    /// Unit sphere centered at the origin; `p` is a unit vector.
    Sphere,
    /// Delaunay surface `D_{tau}` along the `z` axis; `p = X(s, 0)`.
    Delaunay { tau: f64, s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueOptions {
    /// Angular samples around every ring; rows follow from square cells.
    pub resolution: usize,
    /// For the sphere: direction of `p`. Ignored for a Delaunay base.
    pub point: [f64; 3],
    pub profile_tol: f64,
}

impl Default for GlueOptions {
    fn default() -> Self {
        Self {
            resolution: 128,
            point: [0.0, 0.0, 1.0],
            profile_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueReport {
    pub base: Base,
    pub tau: f64,
    pub r_tau: f64,
    pub resolution: usize,
    /// Largest Hausdorff distance between adjacent boundary polylines.
    pub interface_mismatch: f64,
    /// `max |H − 1|` away from boundaries and from the gluing circle.
    pub interior_h_error: f64,
    pub excluded_radius: f64,
    pub vertices: usize,
    pub faces: usize,
    pub t: f64,
    pub a0: f64,
}

#[derive(Debug, Clone)]
pub struct GluedMesh {
    pub mesh: SurfaceMesh,
    pub report: GlueReport,
    pub state: MatchState,
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
}

/// Surface-side harmonic part `∓(τ̃²/4) log ρ + a₀ + a₁x + a₋₁y − Ŵ_g`.
struct SurfaceHarmonic<'a> {
    tau: f64,
    radius: f64,
    state: &'a MatchState,
}

impl SurfaceHarmonic<'_> {
    fn eval(&self, rho: f64, theta: f64) -> f64 {
        let st = self.state;
        let q = self.radius / rho;
        let w: f64 = st.g.map_diagonal(|n| q.powi(n as i32)).eval(theta);
        mp(self.tau) * 0.25 * st.tilde_tau_sq(self.tau) * rho.ln()
            + st.a0
            + rho * (st.a1 * theta.cos() + st.a_neg1 * theta.sin())
            - w
    }
}

/// Interpolated Delaunay-side model `∓(τ²/4) log ρ + c − W_h`, with `W_h`
/// continued past the matching circle.
fn delaunay_side(tau: f64, radius: f64, c: f64, h: &CircleFourier, rho: f64, theta: f64) -> f64 {
    let q = rho / radius;
    mp(tau) * 0.25 * tau * tau * rho.ln() + c - h.map_diagonal(|n| q.powi(n as i32)).eval(theta)
}

/// Structured ring mesh: `rings[i][k]` with `n` points per ring; faces wound
/// so that they agree with `normals`.
fn ring_mesh(rings: &[Vec<Vec3>], normals: &[Vec<Vec3>], tag: RegionTag) -> SurfaceMesh {
    let n = rings[0].len();
    let mut mesh = SurfaceMesh::default();
    for (ring, nr) in rings.iter().zip(normals) {
        mesh.vertices.extend_from_slice(ring);
        mesh.vertex_normals.extend_from_slice(nr);
    }
    mesh.region_tags = vec![tag; mesh.vertices.len()];
    let idx = |i: usize, k: usize| i * n + k % n;
    for i in 0..rings.len() - 1 {
        for k in 0..n {
            let (a, b, c, d) = (idx(i, k), idx(i, k + 1), idx(i + 1, k + 1), idx(i + 1, k));
            push_oriented(&mut mesh, [a, b, c]);
            push_oriented(&mut mesh, [a, c, d]);
        }
    }
    mesh
}

/// Adds a face, reversing it if its normal disagrees with the vertex normals.
fn push_oriented(mesh: &mut SurfaceMesh, f: [usize; 3]) {
    let [a, b, c] = f;
    let v = &mesh.vertices;
    let fnorm = (v[b] - v[a]).cross(&(v[c] - v[a]));
    let vn = mesh.vertex_normals[a] + mesh.vertex_normals[b] + mesh.vertex_normals[c];
    if fnorm.dot(&vn) >= 0.0 {
        mesh.faces.push([a, b, c]);
    } else {
        mesh.faces.push([a, c, b]);
    }
}

fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

/// Symmetric Hausdorff distance between two closed polylines (vertex to
/// segment).
pub fn polyline_hausdorff(a: &[Vec3], b: &[Vec3]) -> f64 {
    let one_way = |x: &[Vec3], y: &[Vec3]| {
        x.iter()
            .map(|p| {
                (0..y.len())
                    .map(|k| point_segment_distance(p, &y[k], &y[(k + 1) % y.len()]))
                    .fold(f64::MAX, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Local picture of the base around `p`: its points on (nominal) tangent
/// radius `ρ`, and the remaining mesh.
trait BaseSurface {
    /// Unperturbed base point with tangent-plane direction `θ`, and its
    /// outward normal, both in the local frame.
    fn ring_point(&self, rho: f64, theta: f64) -> (Vec3, Vec3);
    /// Radius around which the lift is cut off.
    fn cutoff_radius(&self) -> f64;
    /// Rings from `rho_in` outward, already lifted by `lift`, plus whatever
    /// closes the surface. The first ring is at exactly `rho_in`.
    fn mesh(&self, rho_in: f64, n: usize, lift: &dyn Fn(&Vec3) -> f64) -> Result<SurfaceMesh>;
    /// Local-to-world rigid motion.
    fn frame(&self) -> (Rotation3<f64>, Vec3);
}

struct SphereBase {
    point: Vec3,
}

impl BaseSurface for SphereBase {
    fn ring_point(&self, rho: f64, theta: f64) -> (Vec3, Vec3) {
        let c = (1.0 - rho * rho).sqrt();
        let out = Vec3::new(rho * theta.cos(), rho * theta.sin(), c);
        (out - Vec3::z(), out)
    }

    fn cutoff_radius(&self) -> f64 {
        0.5
    }

    fn mesh(&self, rho_in: f64, n: usize, lift: &dyn Fn(&Vec3) -> f64) -> Result<SurfaceMesh> {
        // Mercator rows: square cells, conformal
        let dt = 2.0 * PI / n as f64;
        let phi0 = rho_in.asin();
        let u0 = (0.5 * phi0).tan().ln();
        let rows = ((-2.0 * u0) / dt).ceil() as usize;
        let du = -2.0 * u0 / rows as f64;
        let mut rings = Vec::with_capacity(rows);
        let mut normals = Vec::with_capacity(rows);
        for i in 0..rows {
            let phi = 2.0 * (u0 + i as f64 * du).exp().atan();
            let (sp, cp) = if i == 0 {
                (rho_in, phi0.cos())
            } else {
                phi.sin_cos()
            };
            let mut ring = Vec::with_capacity(n);
            let mut nr = Vec::with_capacity(n);
            for k in 0..n {
                let th = ANGLE0 + k as f64 * dt;
                let out = Vec3::new(sp * th.cos(), sp * th.sin(), cp);
                let mut x = out - Vec3::z();
                x.z += lift(&x);
                ring.push(x);
                nr.push(out);
            }
            rings.push(ring);
            normals.push(nr);
        }
        let mut mesh = ring_mesh(&rings, &normals, RegionTag::Base);
        // the last ring sits at φ = π − φ0; close it with a fan at the south pole
        let pole = mesh.vertices.len();
        mesh.vertices.push(Vec3::new(0.0, 0.0, -2.0));
        mesh.vertex_normals.push(-Vec3::z());
        mesh.region_tags.push(RegionTag::Base);
        let last = (rows - 1) * n;
        for k in 0..n {
            push_oriented(&mut mesh, [last + k, last + (k + 1) % n, pole]);
        }
        Ok(mesh)
    }

    fn frame(&self) -> (Rotation3<f64>, Vec3) {
        let rot = Rotation3::rotation_between(&Vec3::z(), &self.point)
            .unwrap_or_else(|| Rotation3::from_axis_angle(&Vec3::x_axis(), PI));
        (rot, self.point)
    }
}

/// Delaunay base. The parameter plane `(s, θ)` is conformal to the surface
/// with factor `λ = |X_s|`, so a disk of parameter radius `ρ/λ_p` around
/// `(s_p, 0)` has tangent radius close to `ρ`.
struct DelaunayBase {
    profile: DelaunayProfile,
    s_p: f64,
    /// Columns of the local frame in world coordinates: `e₁ ∥ X_s`,
    /// `e₂ ∥ ±X_θ`, `e₃` outward.
    axes: Matrix3<f64>,
    origin: Vec3,
    lambda: f64,
    /// `+1` if `e₂ ∥ X_θ`, `−1` otherwise.
    orient: f64,
    patch: f64,
}

impl DelaunayBase {
    fn new(tau: f64, s_p: f64, tol: f64) -> Result<Self> {
        if tau == 1.0 || !s_p.is_finite() {
            return Err(Error::ParameterOutOfRange(format!(
                "Delaunay base needs tau != 1 and finite s (got tau = {tau}, s = {s_p})"
            )));
        }
        let profile = solve_profile(DelaunayParam::new(tau)?, tol)?;
        let p = profile.evaluate(s_p);
        let origin = position_from(tau, &p, 0.0);
        let outward = -curvature_normal_from(tau, &p, 0.0);
        let a = 0.5 * tau * p.sigma.exp();
        let xs = Vec3::new(a * p.dsigma, 0.0, 0.5 * p.dkappa);
        let xt = Vec3::new(0.0, a, 0.0);
        let lambda = xs.norm();
        let e1 = xs / lambda;
        let mut e2 = xt / xt.norm();
        let orient = if e1.cross(&e2).dot(&outward) > 0.0 {
            1.0
        } else {
            e2 = -e2;
            -1.0
        };
        let patch = 0.25 * a.abs().min(1.0);
        Ok(Self {
            profile,
            s_p,
            axes: Matrix3::from_columns(&[e1, e2, e1.cross(&e2)]),
            origin,
            lambda,
            orient,
            patch,
        })
    }

    fn world(&self, s: f64, theta: f64) -> (Vec3, Vec3) {
        let tau = self.profile.tau();
        let p = self.profile.evaluate(s);
        (
            position_from(tau, &p, theta),
            -curvature_normal_from(tau, &p, theta),
        )
    }

    fn to_local(&self, x: &Vec3) -> Vec3 {
        self.axes.transpose() * (x - self.origin)
    }

    /// Parameter point at parameter radius `q`, tangent direction `θ`.
    fn param(&self, q: f64, theta: f64) -> (f64, f64) {
        (self.s_p + q * theta.cos(), self.orient * q * theta.sin())
    }
}

impl BaseSurface for DelaunayBase {
    fn ring_point(&self, rho: f64, theta: f64) -> (Vec3, Vec3) {
        let (s, t) = self.param(rho / self.lambda, theta);
        let (x, n) = self.world(s, t);
        (self.to_local(&x), self.axes.transpose() * n)
    }

    fn cutoff_radius(&self) -> f64 {
        0.5 * self.patch
    }

    fn mesh(&self, rho_in: f64, n: usize, lift: &dyn Fn(&Vec3) -> f64) -> Result<SurfaceMesh> {
        if !n.is_multiple_of(8) {
            return Err(Error::InvalidGrid(format!(
                "a Delaunay base needs a resolution divisible by 8, got {n}"
            )));
        }
        let dt = 2.0 * PI / n as f64;
        let q_in = rho_in / self.lambda;
        let q_patch = self.patch / self.lambda;
        let big = PI;
        let half = big.min(2.0 * self.profile.s_tau());
        if q_patch > 0.5 * half || 4.0 * q_in > q_patch {
            return Err(Error::ParameterOutOfRange(format!(
                "gluing disk {rho_in} does not fit the base patch {}",
                self.patch
            )));
        }
        // Rings around p (coordinates (a, b) with θ = orient·b) that turn
        // into the rectangle |a| ≤ half, |b| ≤ π; its edges b = ±π are the
        // same curve.
        let side = n / 4;
        let square = |k: usize| {
            let f = (k % side) as f64 / side as f64;
            match k / side {
                0 => (half, big * (2.0 * f - 1.0)),
                1 => (half * (1.0 - 2.0 * f), big),
                2 => (-half, big * (1.0 - 2.0 * f)),
                _ => (half * (2.0 * f - 1.0), -big),
            }
        };
        let rows = ((half / q_in).ln() / dt).ceil() as usize + 1;
        let mut mesh = SurfaceMesh::default();
        for i in 0..rows {
            let x = i as f64 / (rows - 1) as f64;
            let q = q_in * (half / q_in).powf(x);
            let t = smoothstep((q - q_patch) / (half - q_patch));
            for k in 0..n {
                let (sa, sb) = square(k);
                let uniform = ANGLE0 + k as f64 * dt;
                // unwrap the rectangle's direction next to the uniform angle
                let mut phi = sb.atan2(sa);
                phi += 2.0 * PI * ((uniform - phi) / (2.0 * PI)).round();
                let ang = uniform + t * (phi - uniform);
                // the ring shape morphs while its size stays geometric
                let (a, b) = (
                    q * ((1.0 - t) * ang.cos() + t * sa / half),
                    q * ((1.0 - t) * ang.sin() + t * sb / half),
                );
                let (x, nn) = self.world(self.s_p + a, self.orient * b);
                let mut y = self.to_local(&x);
                if t == 0.0 {
                    y.z += lift(&y);
                }
                mesh.vertices.push(y);
                mesh.vertex_normals.push(self.axes.transpose() * nn);
            }
        }
        let last = (rows - 1) * n;
        // identify b = −π with b = +π on the outer ring
        let remap = |v: usize| -> usize {
            if v < last {
                return v;
            }
            let k = v - last;
            let k = if k == 0 {
                side
            } else if k >= 3 * side {
                2 * side - (k - 3 * side)
            } else {
                k
            };
            last + k
        };
        for i in 0..rows - 1 {
            for k in 0..n {
                let id = |r: usize, c: usize| remap((i + r) * n + (k + c) % n);
                push_oriented(&mut mesh, [id(0, 0), id(0, 1), id(1, 1)]);
                push_oriented(&mut mesh, [id(0, 0), id(1, 1), id(1, 0)]);
            }
        }
        // the edges a = ±π continue as plain grids out to half a period
        let period = 8.0 * self.profile.s_tau();
        let h = 2.0 * big / side as f64;
        // graded rows: geometric like the rings, capped at the column width
        let mut offsets = vec![half];
        while *offsets.last().expect("nonempty") < 0.5 * period || offsets.len() < 3 {
            let a = *offsets.last().expect("nonempty");
            offsets.push(a + (a * dt.exp_m1()).min(h));
        }
        let extra = offsets.len() - 1;
        for dir in [1.0, -1.0] {
            let edge: Vec<usize> = (0..side)
                .map(|c| {
                    let k = if dir > 0.0 {
                        if c == 0 {
                            side
                        } else {
                            c
                        }
                    } else if c == 0 {
                        2 * side
                    } else {
                        3 * side - c
                    };
                    last + k
                })
                .collect();
            let start = mesh.vertices.len();
            for &off in &offsets[1..=extra] {
                for c in 0..side {
                    let a = dir * off;
                    let b = -big + c as f64 * h;
                    let (x, nn) = self.world(self.s_p + a, self.orient * b);
                    mesh.vertices.push(self.to_local(&x));
                    mesh.vertex_normals.push(self.axes.transpose() * nn);
                }
            }
            let id = |r: usize, c: usize| {
                if r == 0 {
                    edge[c % side]
                } else {
                    start + (r - 1) * side + c % side
                }
            };
            for r in 0..extra {
                for c in 0..side {
                    push_oriented(&mut mesh, [id(r, c), id(r, c + 1), id(r + 1, c + 1)]);
                    push_oriented(&mut mesh, [id(r, c), id(r + 1, c + 1), id(r + 1, c)]);
                }
            }
        }
        mesh.region_tags = vec![RegionTag::Base; mesh.vertices.len()];
        Ok(compact(mesh))
    }
    fn frame(&self) -> (Rotation3<f64>, Vec3) {
        (Rotation3::from_matrix_unchecked(self.axes), self.origin)
    }
}

/// Removes unreferenced vertices.
fn compact(mesh: SurfaceMesh) -> SurfaceMesh {
    let mut used = vec![false; mesh.vertices.len()];
    for f in &mesh.faces {
        for &v in f {
            used[v] = true;
        }
    }
    let mut map = vec![usize::MAX; used.len()];
    let mut out = SurfaceMesh::default();
    for (v, &u) in used.iter().enumerate() {
        if u {
            map[v] = out.vertices.len();
            out.vertices.push(mesh.vertices[v]);
            out.vertex_normals.push(mesh.vertex_normals[v]);
            out.region_tags.push(mesh.region_tags[v]);
        }
    }
    out.faces = mesh.faces.iter().map(|f| f.map(|v| map[v])).collect();
    out
}

/// Glues a half-Delaunay end of parameter `tau` onto `base` at its point `p`.
pub fn assemble_glued_mesh(base: &Base, tau: f64, opts: &GlueOptions) -> Result<GluedMesh> {
    if !(tau != 0.0 && tau.abs() <= MAX_GLUE_TAU) {
        return Err(Error::ParameterOutOfRange(format!(
            "glued end needs 0 < |tau| <= {MAX_GLUE_TAU}, got {tau}"
        )));
    }
    let n = opts.resolution;
    if n < 16 {
        return Err(Error::InvalidGrid(format!("resolution {n} < 16")));
    }
    let profile = solve_profile(DelaunayParam::new(tau)?, opts.profile_tol)?;
    let radius = profile.neck_geometry().r_tau.abs();

    let surface: Box<dyn BaseSurface> = match *base {
        Base::Sphere => {
            let p = Vec3::from(opts.point);
            if !(p.norm() > 0.0) {
                return Err(Error::InvalidParameter("point must be nonzero".into()));
            }
            Box::new(SphereBase {
                point: p.normalize(),
            })
        }
        Base::Delaunay { tau: tb, s } => Box::new(DelaunayBase::new(tb, s, opts.profile_tol)?),
    };
    if 4.0 * radius > surface.cutoff_radius() {
        return Err(Error::ParameterOutOfRange(format!(
            "r_tau = {radius} too large for the base"
        )));
    }

    // leading-order matching: the explicit log-and-constant part of the end
    let data = delaunay_boundary_data(&profile, MATCH_MODES)?;
    let matched = match_cauchy_data(
        &data.leading_order(tau),
        &CauchyPair::zeros(MATCH_MODES),
        tau,
        radius,
    )?;
    let state = matched.state;
    let harmonic = SurfaceHarmonic {
        tau,
        radius,
        state: &state,
    };
    let rho_c = surface.cutoff_radius();
    // mean of P on the cutoff circle; the linear and Ŵ_g parts average out
    let p0 = mp(tau) * 0.25 * state.tilde_tau_sq(tau) * rho_c.ln() + state.a0;
    let lift = |x: &Vec3| {
        let rho = x.x.hypot(x.y);
        // only the sheet through p
        if x.z < -1.0 {
            return 0.0;
        }
        let eta = 1.0 - smoothstep(rho / rho_c - 0.5);
        if eta == 0.0 {
            return 0.0;
        }
        eta * (harmonic.eval(rho, x.y.atan2(x.x)) - p0)
    };

    // Delaunay piece
    let s_tau = profile.s_tau();
    let dt = 2.0 * PI / n as f64;
    let n_s = (8.0 * s_tau / dt).ceil() as usize + 1;
    let mut end = mesh_delaunay(&profile, -s_tau, 7.0 * s_tau, n_s, n)?;
    let lift_end = profile.neck_geometry().translation - p0;
    end.rigid_motion(
        &Rotation3::from_axis_angle(&Vec3::z_axis(), ANGLE0),
        &Vec3::new(0.0, 0.0, lift_end),
    );
    let end_ring: Vec<Vec3> = end.vertices[..n].to_vec();

    // collar
    let m = ((2f64.ln() / dt).ceil() as usize).max(2);
    let d_const = data.dirichlet_const - p0;
    let mut rings = Vec::with_capacity(m + 1);
    let mut normals = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let x = i as f64 / m as f64;
        let rho = radius * 2f64.powf(x);
        let chi = smoothstep(x);
        let mut ring = Vec::with_capacity(n);
        let mut nr = Vec::with_capacity(n);
        for k in 0..n {
            let th = ANGLE0 + k as f64 * dt;
            let (bp, bn) = surface.ring_point(rho, th);
            let mut b = bp;
            b.z += lift(&b);
            let dz = delaunay_side(tau, radius, d_const, &state.h, rho, th);
            let a = Vec3::new(rho * th.cos(), rho * th.sin(), dz);
            let y = if i == 0 {
                a
            } else if i == m {
                b
            } else {
                (1.0 - chi) * a + chi * b
            };
            ring.push(y);
            nr.push(bn);
        }
        rings.push(ring);
        normals.push(nr);
    }
    let collar = ring_mesh(&rings, &normals, RegionTag::Collar);

    let base_mesh = surface.mesh(2.0 * radius, n, &lift)?;
    let base_ring: Vec<Vec3> = base_mesh.vertices[..n].to_vec();

    let mismatch =
        polyline_hausdorff(&end_ring, &rings[0]).max(polyline_hausdorff(&rings[m], &base_ring));

    let mut mesh = base_mesh;
    mesh.append(&collar);
    mesh.append(&end);
    mesh.validate()?;

    let curv = discrete_mean_curvature(&mesh)?;
    let z_int = rings[0][0].z;
    let excluded = H_EXCLUSION * radius;
    let interior_h_error = curv.max_interior_error(1.0, |i| {
        let v = &mesh.vertices[i];
        let d = (v.x.hypot(v.y) - radius).hypot(v.z - z_int);
        d > excluded
    });

    let (rot, shift) = surface.frame();
    mesh.rigid_motion(&rot, &shift);

    let report = GlueReport {
        base: *base,
        tau,
        r_tau: radius,
        resolution: n,
        interface_mismatch: mismatch,
        interior_h_error,
        excluded_radius: excluded,
        vertices: mesh.vertex_count(),
        faces: mesh.face_count(),
        t: state.t,
        a0: state.a0,
    };
    Ok(GluedMesh {
        mesh,
        report,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::distance_to_sphere_chain;

    fn glue(base: Base, tau: f64, n: usize) -> GluedMesh {
        let opts = GlueOptions {
            resolution: n,
            ..Default::default()
        };
        assemble_glued_mesh(&base, tau, &opts).unwrap()
    }

    fn faces_agree_with_normals(mesh: &SurfaceMesh) -> bool {
        mesh.faces.iter().all(|&[a, b, c]| {
            let v = &mesh.vertices;
            let f = (v[b] - v[a]).cross(&(v[c] - v[a]));
            let n = mesh.vertex_normals[a] + mesh.vertex_normals[b] + mesh.vertex_normals[c];
            f.dot(&n) > 0.0
        })
    }

    #[test]
    fn hausdorff_of_concentric_polygons() {
        let ring = |r: f64| -> Vec<Vec3> {
            (0..64)
                .map(|k| {
                    let t = k as f64 * 2.0 * PI / 64.0;
                    Vec3::new(r * t.cos(), r * t.sin(), 0.0)
                })
                .collect()
        };
        assert_eq!(polyline_hausdorff(&ring(1.0), &ring(1.0)), 0.0);
        let d = polyline_hausdorff(&ring(1.0), &ring(1.1));
        assert!((d - 0.1).abs() < 1e-3, "{d}");
    }

    #[test]
    fn sphere_composite_is_consistently_oriented() {
        let g = glue(Base::Sphere, 0.1, 64);
        g.mesh.check_manifold().unwrap();
        assert!(faces_agree_with_normals(&g.mesh));
        for tag in [RegionTag::Base, RegionTag::Collar, RegionTag::Delaunay] {
            assert!(g.mesh.region_tags.contains(&tag));
        }
        // leading-order matching: no log correction, constant ∓(τ²/4) log 2
        assert_eq!(g.state.t, 0.0);
        assert!((g.state.a0 + 0.0025 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn mismatch_scales_like_tau_cubed() {
        let m1 = glue(Base::Sphere, 0.1, 64).report.interface_mismatch;
        let m2 = glue(Base::Sphere, 0.05, 64).report.interface_mismatch;
        assert!(m1 < 1e-3 && (4.0..=16.0).contains(&(m1 / m2)), "{m1} {m2}");
    }

    #[test]
    fn nodoid_end_flips_the_log() {
        let g = glue(Base::Sphere, -0.1, 64);
        g.mesh.check_manifold().unwrap();
        assert!(faces_agree_with_normals(&g.mesh));
        assert!(g.state.a0 > 0.0);
        assert!(
            g.report.interior_h_error < 0.1,
            "{}",
            g.report.interior_h_error
        );
    }

    #[test]
    fn point_on_sphere_is_a_rigid_motion() {
        let north = glue(Base::Sphere, 0.1, 32);
        let p = Vec3::new(1.0, 2.0, -0.5).normalize();
        let opts = GlueOptions {
            resolution: 32,
            point: [p.x, p.y, p.z],
            ..Default::default()
        };
        let moved = assemble_glued_mesh(&Base::Sphere, 0.1, &opts).unwrap();
        let rot = Rotation3::rotation_between(&Vec3::z(), &p).unwrap();
        let err = north
            .mesh
            .vertices
            .iter()
            .zip(&moved.mesh.vertices)
            .map(|(a, b)| (rot * a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert_eq!(north.report.interior_h_error, moved.report.interior_h_error);
    }

    #[test]
    fn composite_approaches_sphere_and_chain() {
        // north pole: the chain of unit spheres sits on top of the base
        let dist = |tau: f64| {
            let g = glue(Base::Sphere, tau, 32);
            g.mesh
                .vertices
                .iter()
                .map(|x| {
                    let chain = distance_to_sphere_chain(&(x - Vec3::z()));
                    (x.norm() - 1.0).abs().min(chain)
                })
                .fold(0.0, f64::max)
        };
        let d: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&t| dist(t)).collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    }

    #[test]
    fn delaunay_base_builds() {
        let prof = solve_profile(DelaunayParam::new(0.5).unwrap(), 1e-10).unwrap();
        let base = Base::Delaunay {
            tau: 0.5,
            s: 4.0 * prof.s_tau(),
        };
        let g = glue(base, 0.05, 64);
        g.mesh.check_manifold().unwrap();
        assert!(faces_agree_with_normals(&g.mesh));
        assert!(g.report.interface_mismatch < 1e-5);
        assert!(matches!(
            assemble_glued_mesh(
                &base,
                0.05,
                &GlueOptions {
                    resolution: 60,
                    ..Default::default()
                }
            ),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn bad_parameters_rejected() {
        let opts = GlueOptions::default();
        for tau in [0.0, 0.3, f64::NAN] {
            assert!(matches!(
                assemble_glued_mesh(&Base::Sphere, tau, &opts),
                Err(Error::ParameterOutOfRange(_))
            ));
        }
        let coarse = GlueOptions {
            resolution: 8,
            ..Default::default()
        };
        assert!(matches!(
            assemble_glued_mesh(&Base::Sphere, 0.1, &coarse),
            Err(Error::InvalidGrid(_))
        ));
    }
}
