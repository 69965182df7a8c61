//! Generating data of the Delaunay surfaces.
//!
//! A Delaunay surface `D_τ` is described in isothermal coordinates by two
//! functions of `s`: the conformal exponent `σ`, solving
//! `σ'² + τ² cosh² σ = 1` (unduloids, `τ ∈ (0, 1]`) or
//! `σ'² + τ² sinh² σ = 1` (nodoids, `τ < 0`), and the height function `κ`
//! with `κ' = τ² e^σ cosh σ` resp. `κ' = τ² e^σ sinh σ`.
//!
//! Both second-order forms reduce to `σ'' = -τ² cosh σ sinh σ`, which is what
//! gets integrated; the first integral is only monitored. The profile stores
//! samples over one period `[0, 8 s_τ]` and evaluates anywhere on the line
//! through evenness, periodicity of `σ` and quasi-periodicity of `κ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::quadrature;

/// Lower end of the admissible nodoid range.
pub const DEFAULT_TAU_STAR: f64 = -std::f64::consts::SQRT_2;

/// Minimum number of samples per half period `[0, 4 s_τ]`.
pub const MIN_HALF_PERIOD_SAMPLES: usize = 512;

const PROFILE_DOC_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaunayParam {
    tau: f64,
}

impl DelaunayParam {
    pub fn new(tau: f64) -> Result<Self> {
        Self::with_tau_star(tau, DEFAULT_TAU_STAR)
    }

    pub fn with_tau_star(tau: f64, tau_star: f64) -> Result<Self> {
        if !tau.is_finite() || tau == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tau must be finite and nonzero, got {tau}"
            )));
        }
        if tau > 1.0 || tau <= tau_star {
            return Err(Error::InvalidParameter(format!(
                "tau = {tau} outside ({tau_star}, 0) ∪ (0, 1]"
            )));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_unduloid(&self) -> bool {
        self.tau > 0.0
    }

    pub fn is_cylinder(&self) -> bool {
        self.tau == 1.0
    }

    /// `±1`: the sign that selects between the unduloid and nodoid formulas.
    pub fn sign(&self) -> f64 {
        self.tau.signum()
    }

    /// `t_τ`: `τ cosh t_τ = 1` for unduloids, `τ sinh t_τ = -1` for nodoids.
    pub fn t_tau(&self) -> f64 {
        if self.tau > 0.0 {
            (1.0 / self.tau).acosh()
        } else {
            (-1.0 / self.tau).asinh()
        }
    }

    /// Initial value `σ(0)`: the minimum of `σ`, equal to `-t_τ` for both signs.
    pub fn sigma0(&self) -> f64 {
        if self.tau > 0.0 {
            -(1.0 / self.tau).acosh()
        } else {
            (1.0 / self.tau).asinh()
        }
    }

    /// Right-hand side of the first integral: `τ² cosh² σ` or `τ² sinh² σ`.
    pub fn first_integral_potential(&self, sigma: f64) -> f64 {
        let t2 = self.tau * self.tau;
        if self.tau > 0.0 {
            t2 * sigma.cosh().powi(2)
        } else {
            t2 * sigma.sinh().powi(2)
        }
    }

    pub fn first_integral_residual(&self, sigma: f64, dsigma: f64) -> f64 {
        dsigma * dsigma + self.first_integral_potential(sigma) - 1.0
    }

    pub(crate) fn dd_sigma(&self, sigma: f64) -> f64 {
        -0.5 * self.tau * self.tau * (2.0 * sigma).sinh()
    }

    pub(crate) fn ddd_sigma(&self, sigma: f64, dsigma: f64) -> f64 {
        -self.tau * self.tau * (2.0 * sigma).cosh() * dsigma
    }

    pub(crate) fn d_kappa(&self, sigma: f64) -> f64 {
        let t2 = self.tau * self.tau;
        if self.tau > 0.0 {
            0.5 * t2 * ((2.0 * sigma).exp() + 1.0)
        } else {
            0.5 * t2 * ((2.0 * sigma).exp() - 1.0)
        }
    }

    pub(crate) fn dd_kappa(&self, sigma: f64, dsigma: f64) -> f64 {
        self.tau * self.tau * dsigma * (2.0 * sigma).exp()
    }
}

/// One stored sample of the generating curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub s: f64,
    pub sigma: f64,
    pub dsigma: f64,
    pub kappa: f64,
}

/// Values returned by [`DelaunayProfile::evaluate`]. `ddsigma` and `dkappa`
/// come from closed forms in `σ`, never from differentiating samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub sigma: f64,
    pub dsigma: f64,
    pub ddsigma: f64,
    pub kappa: f64,
    pub dkappa: f64,
}

#[derive(Debug, Clone)]
pub struct DelaunayProfile {
    param: DelaunayParam,
    t_tau: f64,
    s_tau: f64,
    samples: Vec<ProfileSample>,
    /// Samples `0..half_len` cover `[0, 4 s_τ]`.
    half_len: usize,
    /// `κ(8 s_τ)`, the quasi-period shift.
    kappa_shift: f64,
    interpolation_order: u32,
}

/// Waist and matching-circle data of a Delaunay neck.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeckGeometry {
    /// Signed waist radius `r(0) = (τ/2) e^{σ(0)}`.
    pub r0: f64,
    /// Signed radius `r_τ = (τ/2) e^{σ(-s_τ)}` of the matching circle.
    pub r_tau: f64,
    /// Vertical shift that reduces the end graph to `∓(τ²/4) log(2r)` at leading order.
    pub translation: f64,
}

/// `(t_τ, s_τ)`, with `s_τ = ½ ∫_0^{t_τ} dt / sqrt(1 - τ² cosh² t)` (sinh for nodoids).
///
/// The inverse square root at `t = t_τ` is removed by `t = t_τ - u²`; the
/// factor `1 - τ cosh(t_τ - v)` is rewritten as a product of sinh's so the
/// integrand keeps full relative precision near `u = 0`.
pub fn half_period(param: DelaunayParam, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    if param.is_cylinder() {
        return Ok((0.0, 0.0));
    }
    let tau = param.tau();
    let t_tau = param.t_tau();
    let integrand = |u: f64| -> f64 {
        let v = u * u;
        let d = if tau > 0.0 {
            let near = 2.0 * tau * (t_tau - 0.5 * v).sinh() * (0.5 * v).sinh();
            near * (1.0 + tau * (t_tau - v).cosh())
        } else {
            let a = -tau;
            let near = 2.0 * a * (t_tau - 0.5 * v).cosh() * (0.5 * v).sinh();
            near * (1.0 + a * (t_tau - v).sinh())
        };
        if u == 0.0 {
            // limit of 2u / sqrt(d) as u -> 0
            let lim = if tau > 0.0 {
                tau * t_tau.sinh() * (1.0 + tau * t_tau.cosh())
            } else {
                -tau * t_tau.cosh() * (1.0 - tau * t_tau.sinh())
            };
            return 2.0 / lim.sqrt();
        }
        2.0 * u / d.sqrt()
    };
    let q_tol = (tol * 1e-3).max(1e-15);
    let full = quadrature::integrate(integrand, 0.0, t_tau.sqrt(), q_tol, q_tol)?;
    Ok((t_tau, 0.5 * full))
}

fn rhs(param: DelaunayParam) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] {
    move |_, y| [y[1], param.dd_sigma(y[0]), param.d_kappa(y[0])]
}

/// Solves the generating ODEs over one period.
pub fn solve_profile(param: DelaunayParam, tol: f64) -> Result<DelaunayProfile> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    if param.is_cylinder() {
        return Ok(DelaunayProfile {
            param,
            t_tau: 0.0,
            s_tau: 0.0,
            samples: vec![ProfileSample {
                s: 0.0,
                sigma: 0.0,
                dsigma: 0.0,
                kappa: 0.0,
            }],
            half_len: 1,
            kappa_shift: 0.0,
            interpolation_order: 5,
        });
    }
    let (t_tau, s_tau) = half_period(param, tol)?;
    let half = 4.0 * s_tau;
    let ode = Dopri5::new(0.01 * tol).with_h_max(half / MIN_HALF_PERIOD_SAMPLES as f64);
    let mut samples = Vec::with_capacity(4 * MIN_HALF_PERIOD_SAMPLES);
    ode.integrate(
        rhs(param),
        0.0,
        [param.sigma0(), 0.0, 0.0],
        half,
        |s, y, _| {
            samples.push(ProfileSample {
                s,
                sigma: y[0],
                dsigma: y[1],
                kappa: y[2],
            })
        },
    )?;
    let half_len = samples.len();
    let kappa_half = samples[half_len - 1].kappa;
    let kappa_shift = 2.0 * kappa_half;
    let period = 2.0 * half;
    for i in (0..half_len - 1).rev() {
        let m = samples[i];
        samples.push(ProfileSample {
            s: period - m.s,
            sigma: m.sigma,
            dsigma: -m.dsigma,
            kappa: kappa_shift - m.kappa,
        });
    }
    Ok(DelaunayProfile {
        param,
        t_tau,
        s_tau,
        samples,
        half_len,
        kappa_shift,
        interpolation_order: 5,
    })
}

/// Period of `σ` measured directly from the ODE: the distance between the
/// minimum at `s = 0` and the next minimum (sign change of `σ'` from − to +).
pub fn measure_period(param: DelaunayParam, tol: f64) -> Result<f64> {
    if param.is_cylinder() {
        return Ok(0.0);
    }
    let (_, s_tau) = half_period(param, tol)?;
    let guess = 8.0 * s_tau;
    let ode = Dopri5::new(0.01 * tol).with_h_max(guess / (4 * MIN_HALF_PERIOD_SAMPLES) as f64);
    let mut pts: Vec<(f64, f64, f64, f64)> = Vec::new();
    ode.integrate(
        rhs(param),
        0.0,
        [param.sigma0(), 0.0, 0.0],
        1.25 * guess,
        |s, y, _| pts.push((s, y[1], param.dd_sigma(y[0]), param.ddd_sigma(y[0], y[1]))),
    )?;
    let start = pts.iter().position(|p| p.0 > 0.5 * guess).unwrap_or(0);
    for w in pts[start..].windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.1 < 0.0 && b.1 >= 0.0 {
            let h = b.0 - a.0;
            let f = |x: f64| hermite5(x, h, [a.1, a.2, a.3], [b.1, b.2, b.3]);
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(a.0 + 0.5 * (lo + hi) * h);
        }
    }
    Err(Error::IntegrationFailure(
        "no second minimum of sigma within 1.25 periods".into(),
    ))
}

/// Quintic Hermite interpolation on one interval, `t ∈ [0, 1]`, step `h`.
/// `a` and `b` hold value, first and second derivative at the two ends.
fn hermite5(t: f64, h: f64, a: [f64; 3], b: [f64; 3]) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    h0 * a[0] + h * h1 * a[1] + h * h * h2 * a[2] + h * h * h3 * b[2] + h * h4 * b[1] + h5 * b[0]
}

impl DelaunayProfile {
    pub fn param(&self) -> DelaunayParam {
        self.param
    }

    pub fn tau(&self) -> f64 {
        self.param.tau()
    }

    pub fn t_tau(&self) -> f64 {
        self.t_tau
    }

    pub fn s_tau(&self) -> f64 {
        self.s_tau
    }

    /// Period `8 s_τ` of `σ` (zero for the cylinder).
    pub fn period(&self) -> f64 {
        8.0 * self.s_tau
    }

    pub fn kappa_shift(&self) -> f64 {
        self.kappa_shift
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn interpolation_order(&self) -> u32 {
        self.interpolation_order
    }

    /// Evaluates `(σ, σ', σ'', κ, κ')` at any real `s`.
    pub fn evaluate(&self, s: f64) -> ProfilePoint {
        let p = self.param;
        if p.is_cylinder() {
            return ProfilePoint {
                sigma: 0.0,
                dsigma: 0.0,
                ddsigma: 0.0,
                kappa: s,
                dkappa: 1.0,
            };
        }
        let period = self.period();
        let n = (s / period).floor();
        let mut u = s - n * period;
        if u >= period {
            u -= period;
        }
        let (mirror, m) = if u > 0.5 * period {
            (true, period - u)
        } else {
            (false, u)
        };
        let (sigma, dsigma, kappa) = self.interpolate_half(m);
        let (dsigma, kappa) = if mirror {
            (-dsigma, self.kappa_shift - kappa)
        } else {
            (dsigma, kappa)
        };
        ProfilePoint {
            sigma,
            dsigma,
            ddsigma: p.dd_sigma(sigma),
            kappa: kappa + n * self.kappa_shift,
            dkappa: p.d_kappa(sigma),
        }
    }

    fn interpolate_half(&self, m: f64) -> (f64, f64, f64) {
        let half = &self.samples[..self.half_len];
        let i = half.partition_point(|x| x.s <= m).clamp(1, half.len() - 1) - 1;
        let (a, b) = (half[i], half[i + 1]);
        let h = b.s - a.s;
        let t = ((m - a.s) / h).clamp(0.0, 1.0);
        let p = self.param;
        let (dda, ddb) = (p.dd_sigma(a.sigma), p.dd_sigma(b.sigma));
        let sigma = hermite5(t, h, [a.sigma, a.dsigma, dda], [b.sigma, b.dsigma, ddb]);
        let dsigma = hermite5(
            t,
            h,
            [a.dsigma, dda, p.ddd_sigma(a.sigma, a.dsigma)],
            [b.dsigma, ddb, p.ddd_sigma(b.sigma, b.dsigma)],
        );
        let kappa = hermite5(
            t,
            h,
            [a.kappa, p.d_kappa(a.sigma), p.dd_kappa(a.sigma, a.dsigma)],
            [b.kappa, p.d_kappa(b.sigma), p.dd_kappa(b.sigma, b.dsigma)],
        );
        (sigma, dsigma, kappa)
    }

    /// Signed radius `r(s) = (τ/2) e^{σ(s)}`.
    pub fn radius(&self, s: f64) -> f64 {
        0.5 * self.tau() * self.evaluate(s).sigma.exp()
    }

    /// Largest first-integral residual over the stored samples.
    pub fn max_first_integral_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|x| self.param.first_integral_residual(x.sigma, x.dsigma).abs())
            .fold(0.0, f64::max)
    }

    pub fn neck_geometry(&self) -> NeckGeometry {
        let tau = self.tau();
        let r0 = 0.5 * tau * self.evaluate(0.0).sigma.exp();
        let r_tau = 0.5 * tau * self.evaluate(-self.s_tau).sigma.exp();
        let t2 = tau * tau;
        NeckGeometry {
            r0,
            r_tau,
            translation: tau.signum() * 0.25 * t2 * (4.0 / t2).ln(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ProfileDocument {
            version: PROFILE_DOC_VERSION,
            tau: self.tau(),
            t_tau: self.t_tau,
            s_tau: self.s_tau,
            grid: self
                .samples
                .iter()
                .map(|x| [x.s, x.sigma, x.dsigma, x.kappa])
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProfileDocument = serde_json::from_str(text)?;
        if doc.version != PROFILE_DOC_VERSION {
            return Err(Error::Parse(format!(
                "unsupported profile document version {}",
                doc.version
            )));
        }
        let param = DelaunayParam::new(doc.tau)?;
        if doc.grid.is_empty() {
            return Err(Error::Parse("empty profile grid".into()));
        }
        let samples: Vec<ProfileSample> = doc
            .grid
            .iter()
            .map(|g| ProfileSample {
                s: g[0],
                sigma: g[1],
                dsigma: g[2],
                kappa: g[3],
            })
            .collect();
        if param.is_cylinder() {
            return solve_profile(param, 1e-10);
        }
        let half = 4.0 * doc.s_tau;
        let half_len = samples.partition_point(|x| x.s <= half * (1.0 + 1e-12));
        if half_len < 2 || samples.windows(2).any(|w| w[1].s <= w[0].s) {
            return Err(Error::Parse(
                "profile grid must be strictly increasing".into(),
            ));
        }
        let kappa_shift = 2.0 * samples[half_len - 1].kappa;
        Ok(Self {
            param,
            t_tau: doc.t_tau,
            s_tau: doc.s_tau,
            samples,
            half_len,
            kappa_shift,
            interpolation_order: 5,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileDocument {
    version: u32,
    tau: f64,
    t_tau: f64,
    s_tau: f64,
    grid: Vec<[f64; 4]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(tau: f64) -> DelaunayProfile {
        solve_profile(DelaunayParam::new(tau).unwrap(), 1e-10).unwrap()
    }

    #[test]
    fn rejects_out_of_range_tau() {
        for bad in [0.0, 2.0, -1.5, f64::NAN, 1.0000001] {
            assert!(matches!(
                DelaunayParam::new(bad),
                Err(Error::InvalidParameter(_))
            ));
        }
        assert!(DelaunayParam::with_tau_star(-1.5, -2.0).is_ok());
    }

    #[test]
    fn cylinder_is_closed_form() {
        let p = profile(1.0);
        let e = p.evaluate(7.3);
        assert_eq!((e.sigma, e.dsigma, e.kappa, e.dkappa), (0.0, 0.0, 7.3, 1.0));
        assert_eq!(half_period(p.param(), 1e-10).unwrap(), (0.0, 0.0));
        let g = p.neck_geometry();
        assert_eq!((g.r0, g.r_tau), (0.5, 0.5));
    }

    #[test]
    fn initial_values_match_closed_forms() {
        let p = profile(0.6);
        assert!((p.evaluate(0.0).sigma + 3.0f64.ln()).abs() < 1e-14);
        let n = profile(-0.5);
        let expect = -(2.0 + 5.0f64.sqrt()).ln();
        assert!((n.evaluate(0.0).sigma - expect).abs() < 1e-14);
        assert!((n.evaluate(0.0).sigma + 1.443_635_475_178_81).abs() < 1e-12);
    }

    #[test]
    fn t_tau_for_0_6() {
        let (t, _) = half_period(DelaunayParam::new(0.6).unwrap(), 1e-12).unwrap();
        assert!((t - (5.0f64 / 3.0).acosh()).abs() < 1e-15);
        assert!((t - 1.098_612_288_668_11).abs() < 1e-12);
    }

    #[test]
    fn periodic_end_matches_start() {
        let p = profile(0.6);
        let a = p.evaluate(0.0);
        let b = p.evaluate(p.period());
        assert!((a.sigma - b.sigma).abs() < 1e-14);
        assert!(b.dsigma.abs() < 1e-14);
    }

    #[test]
    fn first_integral_holds_on_samples() {
        for tau in [0.6, 0.1, -0.5] {
            let p = profile(tau);
            assert!(p.max_first_integral_residual() < 1e-9, "tau {tau}");
        }
    }

    #[test]
    fn waist_radius_closed_form() {
        let g = profile(0.6).neck_geometry();
        assert!((g.r0 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_preserves_evaluation() {
        let p = profile(0.3);
        let q = DelaunayProfile::from_json(&p.to_json().unwrap()).unwrap();
        for s in [-3.1, 0.0, 0.77, 5.5, 40.0] {
            let (a, b) = (p.evaluate(s), q.evaluate(s));
            assert!((a.sigma - b.sigma).abs() < 1e-14);
            assert!((a.kappa - b.kappa).abs() < 1e-12);
        }
    }

    #[test]
    fn json_rejects_wrong_version() {
        let text = r#"{"version":9,"tau":0.5,"t_tau":1,"s_tau":1,"grid":[[0,0,0,0]]}"#;
        assert!(matches!(
            DelaunayProfile::from_json(text),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn quadrature_period_matches_measured_period() {
        for tau in [0.6, 0.1, -0.5] {
            let param = DelaunayParam::new(tau).unwrap();
            let (_, s_tau) = half_period(param, 1e-10).unwrap();
            let measured = measure_period(param, 1e-10).unwrap();
            assert!((measured - 8.0 * s_tau).abs() < 100.0 * 1e-10, "tau {tau}");
        }
    }

    #[test]
    fn kappa_quasi_periodic_and_increasing() {
        let p = profile(0.6);
        let shift = p.evaluate(0.0).kappa - p.evaluate(-p.period()).kappa;
        for i in 0..100 {
            let s = -20.0 + 0.41 * i as f64;
            let d = p.evaluate(s + p.period()).kappa - p.evaluate(s).kappa;
            assert!((d - shift).abs() < 1e-10);
            assert!(p.evaluate(s).dkappa > 0.0);
        }
    }

    #[test]
    fn radius_satisfies_its_ode() {
        for tau in [0.3f64, -0.5] {
            let p = profile(tau);
            let (t2, t4) = (tau * tau, tau.powi(4));
            let pm = tau.signum();
            for i in 0..50 {
                let s = 0.173 * i as f64;
                let e = p.evaluate(s);
                let r = 0.5 * tau * e.sigma.exp();
                let dr = r * e.dsigma;
                let rhs = r * r - (t4 / 16.0 + pm * 0.5 * t2 * r * r + r.powi(4));
                assert!((dr * dr - rhs).abs() < 1e-12, "tau {tau} s {s}");
            }
        }
    }

    #[test]
    fn s_tau_grows_like_minus_half_log_tau() {
        let vals: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&t| {
                half_period(DelaunayParam::new(t).unwrap(), 1e-10)
                    .unwrap()
                    .1
                    + 0.5 * t.ln()
            })
            .collect();
        for v in &vals {
            assert!(v.abs() < 1.0);
        }
    }

    #[test]
    fn neck_radii_scale() {
        let mut r0_consts = Vec::new();
        for tau in [0.2f64, 0.1, 0.05] {
            let g = profile(tau).neck_geometry();
            r0_consts.push((g.r0 - tau * tau / 4.0).abs() / tau.powi(4));
            let k = g.r_tau / tau.powf(1.5);
            assert!(k > 0.2 && k < 0.35, "r_tau constant {k}");
        }
        assert!(r0_consts.iter().all(|c| *c < 0.1));
        assert!((profile(0.1).neck_geometry().r0 - 0.0025).abs() <= 1e-4);
    }

    #[test]
    fn w_expansion_constant_is_stable() {
        let mut consts = Vec::new();
        for tau in [0.2f64, 0.1, 0.05] {
            let p = profile(tau);
            let r0 = p.neck_geometry().r0;
            let c = (1.0 - 0.5 * tau * tau).sqrt();
            let mut worst = 0.0f64;
            for i in 1..=400 {
                let s = 2.0 * p.s_tau() * i as f64 / 400.0;
                let w = (p.radius(s) / r0).acosh();
                worst = worst.max((w - c * s).abs() / (tau.powi(4) * s.cosh().powi(2)));
            }
            consts.push(worst);
        }
        let (lo, hi) = consts
            .iter()
            .fold((f64::MAX, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
        assert!(hi < 0.1 && hi / lo < 2.0, "{consts:?}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::sync::OnceLock;

        fn shared() -> &'static [DelaunayProfile; 3] {
            static P: OnceLock<[DelaunayProfile; 3]> = OnceLock::new();
            P.get_or_init(|| [profile(0.6), profile(0.1), profile(-0.5)])
        }

        proptest! {
            #[test]
            fn periodic_and_even(s in -60.0f64..60.0, k in 0usize..3) {
                let p = &shared()[k];
                let a = p.evaluate(s);
                prop_assert!((p.evaluate(s + p.period()).sigma - a.sigma).abs() <= 1e-8);
                prop_assert!((p.evaluate(-s).sigma - a.sigma).abs() <= 1e-8);
                prop_assert!((p.evaluate(-s).kappa + a.kappa).abs() <= 1e-8);
            }
        }
    }
}
