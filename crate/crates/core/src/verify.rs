//! Executable invariant suites. Every check records what was measured, the
//! bound it was held to and the verdict; failures are report content, never
//! errors.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{
    distance_to_sphere_chain, embed, finite_difference_mean_curvature, fundamental_forms,
    mean_curvature, mesh_delaunay, FD_STEP,
};
use crate::error::{Error, Result};
use crate::floquet::{indicial_spectrum, monodromy, Classification};
use crate::gluing::{
    assemble_glued_mesh, delaunay_graph, delaunay_remainder_sup, graph_mean_curvature,
    match_cauchy_data, Base, CauchyPair, GlueOptions, PolarGrid,
};
use crate::harmonic::{
    dtn_matching, dtn_matching_inverse, exterior_extension, halfcylinder_extension,
    interior_extension, polar_laplacian_residual, CircleFourier,
};
use crate::jacobi::{
    geometric_jacobi, geometric_jacobi_on, growth_profile, uniform_grid, JacobiKind, DELTA_TAU_REL,
};
use crate::profile::{half_period, measure_period, solve_profile, DelaunayParam, DelaunayProfile};

/// Bumped whenever the report layout changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_TAU_GRID: [f64; 8] = [1.0, 0.6, 0.3, 0.1, 0.01, -0.1, -0.5, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Delaunay,
    Jacobi,
    Harmonic,
    Matching,
    Gluing,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Delaunay,
        Suite::Jacobi,
        Suite::Harmonic,
        Suite::Matching,
        Suite::Gluing,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Delaunay => "delaunay",
            Suite::Jacobi => "jacobi",
            Suite::Harmonic => "harmonic",
            Suite::Matching => "matching",
            Suite::Gluing => "gluing",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub tau_grid: Vec<f64>,
    pub seed: u64,
    pub profile_tol: f64,
    pub glue_resolution: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            tau_grid: DEFAULT_TAU_GRID.to_vec(),
            seed: 0,
            profile_tol: 1e-10,
            glue_resolution: 128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub measured: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config: VerifyConfig,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Collects checks for one suite.
struct Sink {
    suite: Suite,
    checks: Vec<Check>,
}

impl Sink {
    fn new(suite: Suite) -> Self {
        Self {
            suite,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, tau: Option<f64>, measured: f64, bound: Bound, tol: f64) {
        let pass = match bound {
            Bound::AtMost => measured <= tol,
            Bound::AtLeast => measured >= tol,
            Bound::Above => measured > tol,
        };
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            tau,
            measured,
            bound,
            tolerance: tol,
            pass,
            detail: None,
        });
    }

    fn at_most(&mut self, name: &str, tau: Option<f64>, measured: f64, tol: f64) {
        self.push(name, tau, measured, Bound::AtMost, tol);
    }

    fn above(&mut self, name: &str, tau: Option<f64>, measured: f64, tol: f64) {
        self.push(name, tau, measured, Bound::Above, tol);
    }

    /// A boolean property; `measured` is 1 for true.
    fn holds(&mut self, name: &str, tau: Option<f64>, ok: bool) {
        self.push(name, tau, if ok { 1.0 } else { 0.0 }, Bound::AtLeast, 1.0);
    }

    fn unwrap<T>(&mut self, name: &str, tau: Option<f64>, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks.push(Check {
                    suite: self.suite,
                    name: name.into(),
                    tau,
                    measured: f64::NAN,
                    bound: Bound::AtMost,
                    tolerance: 0.0,
                    pass: false,
                    detail: Some(format!("{}: {e}", e.kind())),
                });
                None
            }
        }
    }

    fn extend(&mut self, other: Sink) {
        self.checks.extend(other.checks);
    }
}

/// Runs the configured suite(s). Grid points are processed in parallel but the
/// report is assembled in grid order.
pub fn run_suite(config: &VerifyConfig) -> VerifyReport {
    let suites: Vec<Suite> = match config.suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in suites {
        let sink = match s {
            Suite::Delaunay => delaunay_suite(config),
            Suite::Jacobi => jacobi_suite(config),
            Suite::Harmonic => harmonic_suite(config),
            Suite::Matching => matching_suite(config),
            Suite::Gluing => gluing_suite(config),
            Suite::All => unreachable!(),
        };
        checks.extend(sink.checks);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    VerifyReport {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        passed: checks.len() - failed,
        failed,
        checks,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn profile(tau: f64, tol: f64) -> Result<DelaunayProfile> {
    solve_profile(DelaunayParam::new(tau)?, tol)
}

/// `hi / lo` of a list of positive constants.
fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    hi / lo
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

// ---------------------------------------------------------------- delaunay

/// Largest distance from the `τ⁻²`-rescaled meridian over `|s| ≤ s_τ/2` to the
/// catenoid `ρ = ¼ cosh 4z`.
pub fn catenoid_distance(p: &DelaunayProfile, samples: usize) -> f64 {
    let tau = p.tau();
    let scale = 1.0 / (tau * tau);
    let cat = |z: f64| 0.25 * (4.0 * z).cosh();
    let mut worst = 0.0f64;
    for i in 0..=samples {
        let s = 0.5 * p.s_tau() * i as f64 / samples as f64;
        let e = p.evaluate(s);
        let (r, z) = (p.radius(s).abs() * scale, 0.5 * e.kappa.abs() * scale);
        // nearest point lies between the horizontal and vertical projections
        let zv = 0.25 * (4.0 * r).max(1.0).acosh();
        let (mut a, mut b) = (z.min(zv), z.max(zv));
        let d = |t: f64| (cat(t) - r).hypot(t - z);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let (c, e) = (b - g * (b - a), a + g * (b - a));
            if d(c) < d(e) {
                b = e;
            } else {
                a = c;
            }
        }
        worst = worst.max(d(0.5 * (a + b)));
    }
    worst
}

fn delaunay_point(cfg: &VerifyConfig, tau: f64) -> Sink {
    let mut k = Sink::new(Suite::Delaunay);
    let t = Some(tau);
    let Some(p) = k.unwrap("solve_profile", t, profile(tau, cfg.profile_tol)) else {
        return k;
    };
    k.at_most(
        "first_integral",
        t,
        p.max_first_integral_residual(),
        10.0 * cfg.profile_tol,
    );
    let mut rng = rng_for(cfg.seed, 1 + (tau.to_bits() % 1000));
    let period = p.period();
    // sampling window; the cylinder has no finite period
    let win = if period.is_finite() && period > 0.0 {
        period.min(20.0)
    } else {
        10.0
    };
    let (mut per, mut even_s, mut even_k) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let s = rng.gen_range(-3.0 * win..3.0 * win);
        let a = p.evaluate(s);
        let b = p.evaluate(-s);
        if period.is_finite() {
            per = per.max((p.evaluate(s + period).sigma - a.sigma).abs());
        }
        even_s = even_s.max((b.sigma - a.sigma).abs());
        even_k = even_k.max((b.kappa + a.kappa).abs());
    }
    k.at_most("periodicity", t, per, 1e-8);
    k.at_most("evenness_sigma", t, even_s, 1e-8);
    k.at_most("oddness_kappa", t, even_k, 1e-8);
    if tau > 0.0 {
        let min_dk = (0..=2000)
            .map(|i| p.evaluate(win * i as f64 / 2000.0).dkappa)
            .fold(f64::MAX, f64::min);
        k.above("kappa_increasing", t, min_dk, 0.0);
    }
    if tau != 1.0 {
        let measured = measure_period(p.param(), cfg.profile_tol);
        if let Some(m) = k.unwrap("period_consistency", t, measured) {
            k.at_most(
                "period_consistency",
                t,
                (m / 8.0 - p.s_tau()).abs() / p.s_tau(),
                1e-6,
            );
        }
    }

    // embedding
    let (mut unit, mut iso, mut cmc, mut fd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut fd_err = None;
    for _ in 0..100 {
        let s = rng.gen_range(-2.0 * win..2.0 * win);
        let th = rng.gen_range(0.0..2.0 * PI);
        unit = unit.max((embed(&p, s, th).normal.norm() - 1.0).abs());
        let ff = fundamental_forms(&p, s);
        iso = iso.max(((ff.e - ff.g).abs().max(ff.f.abs())) / ff.e);
        match mean_curvature(&p, s) {
            Ok(h) => {
                cmc = cmc.max((h - 1.0).abs());
                match finite_difference_mean_curvature(&p, s, FD_STEP) {
                    Ok(f) => fd = fd.max((f - h).abs()),
                    Err(e) => fd_err = Some(e),
                }
            }
            Err(e) => fd_err = Some(e),
        }
    }
    k.at_most("unit_normal", t, unit, 1e-10);
    k.at_most("isothermal", t, iso, 1e-8);
    k.at_most("exact_cmc", t, cmc, 1e-8);
    if let Some(e) = fd_err {
        k.unwrap::<()>("fd_mean_curvature", t, Err(e));
    } else {
        k.at_most("fd_mean_curvature", t, fd, 1e-6);
    }
    k
}

fn delaunay_suite(cfg: &VerifyConfig) -> Sink {
    let parts: Vec<Sink> = cfg
        .tau_grid
        .par_iter()
        .map(|&tau| delaunay_point(cfg, tau))
        .collect();
    let mut k = Sink::new(Suite::Delaunay);
    for p in parts {
        k.extend(p);
    }

    // small-τ asymptotics on a fixed ladder
    let ladder = [0.2, 0.1, 0.05];
    let profiles: Vec<Option<DelaunayProfile>> = ladder
        .iter()
        .map(|&t| k.unwrap("solve_profile", Some(t), profile(t, cfg.profile_tol)))
        .collect();
    if profiles.iter().all(Option::is_some) {
        let ps: Vec<&DelaunayProfile> = profiles.iter().flatten().collect();
        let waist: Vec<f64> = ps
            .iter()
            .map(|p| {
                let t = p.tau();
                (p.neck_geometry().r0 - 0.25 * t * t).abs() / t.powi(4)
            })
            .collect();
        k.at_most(
            "waist_tau4_constant",
            None,
            waist.iter().fold(0.0, |a: f64, &b| a.max(b)),
            0.1,
        );
        let rt: Vec<f64> = ps
            .iter()
            .map(|p| p.neck_geometry().r_tau.abs() / p.tau().abs().powf(1.5))
            .collect();
        k.at_most("r_tau_scaling_spread", None, spread(&rt), 1.2);
        let w: Vec<f64> = ps.iter().map(|p| w_expansion_constant(p)).collect();
        k.at_most(
            "w_expansion_constant",
            None,
            w.iter().fold(0.0, |a: f64, &b| a.max(b)),
            0.1,
        );
        k.at_most("w_expansion_spread", None, spread(&w), 2.0);
        let cat: Vec<f64> = ps.iter().map(|p| catenoid_distance(p, 200)).collect();
        k.holds("catenoid_limit_decreasing", None, strictly_decreasing(&cat));
    }
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for e in [-3.0f64, -2.5, -2.0, -1.5, -1.0, (0.3f64).log10()] {
        let tau = 10f64.powf(e);
        if let Some((_, s)) = k.unwrap(
            "half_period",
            Some(tau),
            half_period(DelaunayParam::new(tau).unwrap(), cfg.profile_tol),
        ) {
            let v = s + 0.5 * tau.ln();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    k.at_most("s_tau_log_spread", None, hi - lo, 2.0);
    k
}

/// `max |w − (1 ∓ τ²/2)^{1/2} s| / (τ⁴ cosh² s)` over `0 < s ≤ 2 s_τ`, where
/// `r = r(0) cosh w`.
pub fn w_expansion_constant(p: &DelaunayProfile) -> f64 {
    let tau = p.tau();
    let r0 = p.neck_geometry().r0;
    let c = (1.0 + tau.signum() * -0.5 * tau * tau).sqrt();
    (1..=400)
        .map(|i| {
            let s = 2.0 * p.s_tau() * i as f64 / 400.0;
            let w = (p.radius(s) / r0).acosh();
            (w - c * s).abs() / (tau.powi(4) * s.cosh().powi(2))
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------- jacobi

fn jacobi_point(cfg: &VerifyConfig, tau: f64) -> Sink {
    let mut k = Sink::new(Suite::Jacobi);
    let t = Some(tau);
    let Some(p) = k.unwrap("solve_profile", t, profile(tau, cfg.profile_tol)) else {
        return k;
    };
    if tau != 1.0 {
        if let Some(spec) = k.unwrap("monodromy", t, indicial_spectrum(&p, 4, cfg.profile_tol)) {
            let det = spec
                .iter()
                .map(|m| (m.det_t - 1.0).abs())
                .fold(0.0, f64::max);
            k.at_most("det_T", t, det, 1e-9);
            k.at_most("gamma_0", t, spec[0].gamma.abs(), 1e-6);
            k.at_most("gamma_1", t, spec[1].gamma.abs(), 1e-6);
            for m in &spec[2..] {
                let j = m.j as f64;
                if tau > -(j * j - 2.0).sqrt() {
                    k.holds(
                        &format!("hyperbolic_j{}", m.j),
                        t,
                        m.classification == Classification::Hyperbolic,
                    );
                    k.above(&format!("gamma_{}_positive", m.j), t, m.gamma, 0.0);
                }
            }
        }
    }
    for kind in &JacobiKind::ALL[..5] {
        if let Some(f) = k.unwrap(kind.as_str(), t, geometric_jacobi(&p, *kind)) {
            if let Some(r) = k.unwrap(kind.as_str(), t, f.max_residual(&p)) {
                k.at_most(&format!("residual_{}", kind.as_str()), t, r, 1e-6);
            }
        }
    }
    if tau == 1.0 {
        if let Some(f) = k.unwrap("trans_axis", t, geometric_jacobi(&p, JacobiKind::TransAxis)) {
            k.at_most("cylinder_axis_field_zero", t, f.sup(), 0.0);
        }
    } else if tau + 2e-3 * tau.abs() < 1.0 {
        let grid = uniform_grid(0.0, p.period(), 2049);
        let res = |d: f64| {
            geometric_jacobi_on(&p, JacobiKind::DelaunayParam, &grid, d)
                .and_then(|f| f.max_residual(&p))
        };
        if let Some(r) = k.unwrap("residual_delaunay_param", t, res(DELTA_TAU_REL)) {
            k.at_most("residual_delaunay_param", t, r, 1e-3);
        }
        let pair = res(2e-3).and_then(|a| res(1e-3).map(|b| b / a));
        if let Some(ratio) = k.unwrap("delaunay_param_step_halving", t, pair) {
            k.at_most("delaunay_param_step_halving", t, ratio, 0.5);
        }
    }
    // periods are measured in units of 8 s_τ, which the cylinder lacks
    if tau != 1.0 {
        let g = growth_profile(&p, JacobiKind::RotX, 4);
        let inc: Vec<f64> = g.windows(2).map(|w| w[1] - w[0]).collect();
        k.at_most("rotation_linear_growth", t, spread(&inc), 1.2);
    }
    k
}

fn jacobi_suite(cfg: &VerifyConfig) -> Sink {
    let parts: Vec<Sink> = cfg
        .tau_grid
        .par_iter()
        .map(|&tau| jacobi_point(cfg, tau))
        .collect();
    let mut k = Sink::new(Suite::Jacobi);
    for p in parts {
        k.extend(p);
    }
    // γ₂ → 2 as the necks pinch
    let ladder = [0.3, 0.1, 0.03, 0.01];
    let gaps: Vec<Option<f64>> = ladder
        .iter()
        .map(|&tau| {
            let m = profile(tau, cfg.profile_tol).and_then(|p| monodromy(&p, 2, cfg.profile_tol));
            k.unwrap("gamma_2_limit", Some(tau), m)
                .map(|m| (m.gamma - 2.0).abs())
        })
        .collect();
    if gaps.iter().all(Option::is_some) {
        let g: Vec<f64> = gaps.into_iter().flatten().collect();
        k.at_most("gamma_2_limit", Some(0.01), g[3], 0.1);
        k.holds("gamma_2_gap_decreasing", None, strictly_decreasing(&g));
    }
    for tau in [-0.5, -1.3] {
        let m = profile(tau, cfg.profile_tol).and_then(|p| monodromy(&p, 2, cfg.profile_tol));
        if let Some(m) = k.unwrap("gamma_2_positive_nodoid", Some(tau), m) {
            k.above("gamma_2_positive_nodoid", Some(tau), m.gamma, 0.0);
        }
    }
    k
}

// ---------------------------------------------------------------- harmonic

fn harmonic_suite(cfg: &VerifyConfig) -> Sink {
    let mut k = Sink::new(Suite::Harmonic);
    let mut rng = rng_for(cfg.seed, 101);
    let n_max = 16;
    let (mut inv, mut semi, mut comp, mut pos, mut adj, mut real) =
        (0.0f64, 0.0f64, 0.0f64, f64::MAX, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let h = CircleFourier::random_real(&mut rng, n_max, 1, 16, 1.0);
        let hi = CircleFourier::random_real(&mut rng, n_max, 2, 16, 1.0);
        let g = CircleFourier::random_real(&mut rng, n_max, 1, 16, 1.0);
        let (s1, s2) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let (a, b) = (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0));
        let r: Result<()> = (|| {
            inv = inv.max(dtn_matching_inverse(&dtn_matching(&h)?)?.max_abs_diff(&h)?);
            let two = halfcylinder_extension(&halfcylinder_extension(&hi, s1)?, s2)?;
            semi = semi.max(two.max_abs_diff(&halfcylinder_extension(&hi, s1 + s2)?)?);
            let disk = interior_extension(&interior_extension(&h, 1.0, a)?.value, a, a * b)?.value;
            comp = comp.max(disk.max_abs_diff(&interior_extension(&h, 1.0, a * b)?.value)?);
            let out = exterior_extension(
                &exterior_extension(&h, 1.0, 1.0 / a)?.value,
                1.0 / a,
                1.0 / (a * b),
            )?
            .value;
            comp = comp.max(out.max_abs_diff(&exterior_extension(&h, 1.0, 1.0 / (a * b))?.value)?);
            let ph = dtn_matching(&h)?;
            let q = ph.inner(&h)?;
            pos = pos.min(q.re / h.l2_norm().powi(2));
            let (x, y) = (ph.inner(&g)?, h.inner(&dtn_matching(&g)?)?);
            adj = adj.max((x - y).norm() / (1.0 + x.norm()));
            real = real
                .max(interior_extension(&hi, 1.0, a)?.value.reality_defect())
                .max(exterior_extension(&hi, 1.0, 1.0 / a)?.r_dr.reality_defect())
                .max(halfcylinder_extension(&hi, s1)?.reality_defect())
                .max(ph.reality_defect());
            Ok(())
        })();
        if k.unwrap("random_operator_checks", None, r).is_none() {
            break;
        }
    }
    k.at_most("dtn_inverse_round_trip", None, inv, 1e-12);
    k.at_most("halfcylinder_semigroup", None, semi, 1e-12);
    k.at_most("extension_composition", None, comp, 1e-12);
    k.push(
        "dtn_positivity_ratio",
        None,
        pos,
        Bound::AtLeast,
        2.0 - 1e-12,
    );
    k.at_most("dtn_self_adjoint", None, adj, 1e-12);
    k.at_most("reality_preservation", None, real, 1e-13);

    // exact multiplier on basis modes
    let mut mult = 0.0f64;
    for n in 1..=32i32 {
        for m in [n, -n] {
            let e = CircleFourier::mode(32, m, Complex64::new(1.0, 0.0));
            if let Some(p) = k.unwrap("dtn_multiplier", None, dtn_matching(&e)) {
                mult = mult.max((p.get(m) - Complex64::new(2.0 * n as f64, 0.0)).norm());
            }
        }
    }
    k.at_most("dtn_multiplier_exact", None, mult, 0.0);

    // low-mode preconditions
    let c = CircleFourier::constant(8, 1.0);
    let one = CircleFourier::real_mode(8, 1, Complex64::new(1.0, 0.0));
    k.holds(
        "halfcylinder_rejects_low_modes",
        None,
        matches!(
            halfcylinder_extension(&c, 1.0),
            Err(Error::LowModePresent(0))
        ) && matches!(
            halfcylinder_extension(&one, 1.0),
            Err(Error::LowModePresent(_))
        ),
    );
    k.holds(
        "exterior_rejects_mean",
        None,
        matches!(exterior_extension(&c, 1.0, 2.0), Err(Error::NonzeroMean(_))),
    );
    k.holds(
        "dtn_rejects_mean",
        None,
        matches!(dtn_matching(&c), Err(Error::NonzeroMean(_)))
            && matches!(dtn_matching_inverse(&c), Err(Error::NonzeroMean(_))),
    );

    // harmonicity under refinement
    let mut worst_ratio = 0.0f64;
    for _ in 0..10 {
        let h = CircleFourier::random_real(&mut rng, 6, 0, 6, 1.0);
        let r = polar_laplacian_residual(&h, 1.0, 32, 32)
            .and_then(|a| polar_laplacian_residual(&h, 1.0, 64, 64).map(|b| b / a));
        if let Some(x) = k.unwrap("harmonicity_refinement", None, r) {
            worst_ratio = worst_ratio.max(x);
        }
    }
    k.at_most("harmonicity_refinement", None, worst_ratio, 0.5);
    k
}

// ---------------------------------------------------------------- matching

fn random_pair<R: Rng>(rng: &mut R, n_max: usize, amp: f64) -> CauchyPair {
    CauchyPair {
        dirichlet: CircleFourier::random_real(rng, n_max, 0, n_max as u32, amp),
        neumann: CircleFourier::random_real(rng, n_max, 0, n_max as u32, amp),
    }
}

fn matching_suite(cfg: &VerifyConfig) -> Sink {
    let mut k = Sink::new(Suite::Matching);
    let n_max = 16;
    let mut rng = rng_for(cfg.seed, 202);
    let (tau, radius) = (0.1, 0.0085);
    let zero = CauchyPair::zeros(n_max);
    if let Some(m) = k.unwrap(
        "zero_correction",
        None,
        match_cauchy_data(&zero, &zero, tau, radius),
    ) {
        k.holds("zero_correction_zero_state", None, m.state.is_zero());
    }
    let (mut dir, mut neu, mut sup, mut logc, mut logb) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let tau = if i % 2 == 0 { tau } else { -tau };
        let (d1, s1) = (
            random_pair(&mut rng, n_max, 1e-3),
            random_pair(&mut rng, n_max, 1e-3),
        );
        let (d2, s2) = (
            random_pair(&mut rng, n_max, 1e-3),
            random_pair(&mut rng, n_max, 1e-3),
        );
        let r: Result<()> = (|| {
            let a = match_cauchy_data(&d1, &s1, tau, radius)?;
            let b = match_cauchy_data(&d2, &s2, tau, radius)?;
            let c = match_cauchy_data(&d1.add(&d2)?, &s1.add(&s2)?, tau, radius)?;
            dir = dir.max(a.residual.dirichlet);
            neu = neu.max(a.residual.neumann);
            logb = logb.max(a.residual.log_balance);
            logc = logc.max(a.residual.log_consistency);
            let (x, y) = (&a.state, &b.state);
            let z = &c.state;
            sup = sup
                .max((x.t + y.t - z.t).abs())
                .max((x.a0 + y.a0 - z.a0).abs())
                .max((x.a1 + y.a1 - z.a1).abs())
                .max((x.a_neg1 + y.a_neg1 - z.a_neg1).abs())
                .max(x.g.add(&y.g)?.max_abs_diff(&z.g)?)
                .max(x.h.add(&y.h)?.max_abs_diff(&z.h)?);
            Ok(())
        })();
        if k.unwrap("random_pairs", None, r).is_none() {
            break;
        }
    }
    k.at_most("dirichlet_residual", None, dir, 1e-10);
    k.at_most("neumann_residual", None, neu, 1e-10);
    k.at_most("superposition", None, sup, 1e-12);
    k.at_most("log_balance", None, logb, 1e-12);
    k.at_most("log_consistency", None, logc, 1e-12);
    k
}

// ---------------------------------------------------------------- gluing

/// Max distance of the `D_τ` mesh over `|s| ≤ 4 s_τ`, lifted by the neck
/// translation, to the unit spheres centered at `(0, 0, 2k + 1)`.
pub fn sphere_chain_distance(p: &DelaunayProfile, n_theta: usize) -> Result<f64> {
    let s = 4.0 * p.s_tau();
    let n_s = ((2.0 * s) / (2.0 * PI / n_theta as f64)).ceil() as usize + 1;
    let m = mesh_delaunay(p, -s, s, n_s, n_theta)?;
    // the bulb at s = 4 s_τ lands on z = 1 after the lift
    let lift = 1.0 - 0.5 * p.evaluate(s).kappa;
    Ok(m.vertices
        .iter()
        .map(|v| distance_to_sphere_chain(&(v + crate::mesh::Vec3::new(0.0, 0.0, lift))))
        .fold(0.0, f64::max))
}

fn gluing_suite(cfg: &VerifyConfig) -> Sink {
    let mut k = Sink::new(Suite::Gluing);
    let opts = GlueOptions {
        resolution: cfg.glue_resolution,
        profile_tol: cfg.profile_tol,
        ..Default::default()
    };
    let taus = [0.1, 0.05];
    let glued: Vec<Result<_>> = taus
        .par_iter()
        .map(|&t| assemble_glued_mesh(&Base::Sphere, t, &opts))
        .collect();
    let mut mism = Vec::new();
    for (g, &tau) in glued.into_iter().zip(&taus) {
        if let Some(g) = k.unwrap("sphere_composite", Some(tau), g) {
            k.at_most(
                "interior_h_error",
                Some(tau),
                g.report.interior_h_error,
                0.05,
            );
            k.at_most(
                "mismatch_over_tau3",
                Some(tau),
                g.report.interface_mismatch / tau.powi(3),
                1.0,
            );
            mism.push(g.report.interface_mismatch);
        }
    }
    if mism.len() == 2 {
        let ratio = mism[0] / mism[1];
        k.at_most("mismatch_ratio_upper", None, ratio, 16.0);
        k.push("mismatch_ratio_lower", None, ratio, Bound::AtLeast, 4.0);
    }
    if let Some(g) = k.unwrap(
        "nodoid_composite",
        Some(-0.1),
        assemble_glued_mesh(&Base::Sphere, -0.1, &opts),
    ) {
        k.above("nodoid_log_sign", Some(-0.1), g.state.a0, 0.0);
        k.at_most(
            "interior_h_error",
            Some(-0.1),
            g.report.interior_h_error,
            0.05,
        );
    }

    // the exact end graph is CMC up to discretization
    for tau in taus {
        let r = profile(tau, cfg.profile_tol).and_then(|p| {
            let r_tau = p.neck_geometry().r_tau.abs();
            let grid = PolarGrid::new(0.5 * r_tau, r_tau, 64, 64)?;
            let radial = (0..grid.n_r)
                .map(|i| delaunay_graph(&p, grid.r(i)).map(|x| x.0))
                .collect::<Result<Vec<f64>>>()?;
            let u: Vec<f64> = radial
                .iter()
                .flat_map(|&v| std::iter::repeat_n(v, grid.n_theta))
                .collect();
            Ok(graph_mean_curvature(&grid, &u)?.max_error(1.0))
        });
        if let Some(e) = k.unwrap("end_graph_cmc", Some(tau), r) {
            k.at_most("end_graph_cmc", Some(tau), e, tau);
        }
    }

    // remainder of the explicit end graph is O(τ³)
    let rem: Vec<Option<f64>> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&t| {
            let r = profile(t, cfg.profile_tol)
                .and_then(|p| delaunay_remainder_sup(&p, 64))
                .map(|x| x / (t * t * t));
            k.unwrap("end_remainder", Some(t), r)
        })
        .collect();
    if rem.iter().all(Option::is_some) {
        let c: Vec<f64> = rem.into_iter().flatten().collect();
        k.at_most("end_remainder_spread", None, spread(&c), 1.5);
    }

    let chain: Vec<Option<f64>> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&t| {
            let r = profile(t, cfg.profile_tol).and_then(|p| sphere_chain_distance(&p, 64));
            k.unwrap("sphere_chain", Some(t), r)
        })
        .collect();
    if chain.iter().all(Option::is_some) {
        let d: Vec<f64> = chain.into_iter().flatten().collect();
        k.holds("sphere_chain_decreasing", None, strictly_decreasing(&d));
    }
    k
}
