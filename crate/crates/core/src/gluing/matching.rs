//! Leading-order Cauchy-data matching on the gluing circle.
//!
//! Both sides are written relative to the common term `∓(τ²/4) log r`:
//!
//! * surface: `∓t log r + a₀ + a₁ x + a₋₁ y − Ŵ_g + V_S`
//! * Delaunay end: `−W_h + V_D`
//!
//! With `(d, m) = V_D − V_S` (Dirichlet, `r∂_r`) the matching conditions
//! decouple by mode:
//!
//! | mode     | Dirichlet              | Neumann                |
//! |----------|------------------------|------------------------|
//! | 0        | `∓t log r_τ + a₀ = d₀` | `∓t = m₀`              |
//! | ±1       | `A_{±1} r_τ − g = d`   | `A_{±1} r_τ + g = m`   |
//! | `|n|≥2`  | `h − g = d`            | `|n|(h + g) = m`       |
//!
//! where `A_{±1} = (a₁ ∓ i a₋₁)/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::boundary::CauchyPair;
use super::mp;
use crate::error::{Error, Result};
use crate::harmonic::{interior_extension, CircleFourier};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchState {
    pub t: f64,
    pub a0: f64,
    pub a1: f64,
    pub a_neg1: f64,
    /// Mean-zero.
    pub g: CircleFourier,
    /// Modes 0 and ±1 vanish.
    pub h: CircleFourier,
}

impl MatchState {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            t: 0.0,
            a0: 0.0,
            a1: 0.0,
            a_neg1: 0.0,
            g: CircleFourier::zeros(n_max),
            h: CircleFourier::zeros(n_max),
        }
    }

    /// `τ̃² = τ² + 4t`.
    pub fn tilde_tau_sq(&self, tau: f64) -> f64 {
        tau * tau + 4.0 * self.t
    }

    /// `a₁ x + a₋₁ y` on the circle of radius `r`, as modes ±1.
    pub fn linear_modes(&self, n_max: usize, r: f64) -> CircleFourier {
        let mut f = CircleFourier::zeros(n_max);
        if n_max >= 1 {
            let c = Complex64::new(self.a1, -self.a_neg1) * (0.5 * r);
            f.set(1, c);
            f.set(-1, c.conj());
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.t == 0.0
            && self.a0 == 0.0
            && self.a1 == 0.0
            && self.a_neg1 == 0.0
            && self.g.l2_norm() == 0.0
            && self.h.l2_norm() == 0.0
    }
}

/// Re-evaluation of both sides with the solved state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResidual {
    /// `max_n |Dirichlet_S − Dirichlet_D|` including mode 0.
    pub dirichlet: f64,
    pub neumann: f64,
    /// `|t − ∓m₀|`: the log balance of the Neumann data against the returned `t`.
    pub log_balance: f64,
    /// `|∓τ̃²/4 − (∓τ²/4 ∓ t)|`, Dirichlet and Neumann log coefficients.
    pub log_consistency: f64,
    pub tilde_tau_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub state: MatchState,
    pub residual: MatchResidual,
}

/// Cauchy data of `∓t log r + a₀ + a₁x + a₋₁y − Ŵ_g` on `r = radius`, relative
/// to the common log term.
fn surface_part(state: &MatchState, tau: f64, radius: f64, n_max: usize) -> CauchyPair {
    let mut d = state.linear_modes(n_max, radius);
    let mut n = d.clone();
    let s = mp(tau);
    d.set(0, (s * state.t * radius.ln() + state.a0).into());
    n.set(0, (s * state.t).into());
    // exterior extension at its own circle: value g, r∂_r −|n| g
    let gd = state.g.clone();
    let gn = state.g.map_diagonal(|k| -(k as f64));
    CauchyPair {
        dirichlet: d.sub(&gd).expect("same truncation"),
        neumann: n.sub(&gn).expect("same truncation"),
    }
}

fn delaunay_part(state: &MatchState, radius: f64) -> Result<CauchyPair> {
    let w = interior_extension(&state.h, radius, radius)?;
    Ok(CauchyPair {
        dirichlet: w.value.scale(-1.0),
        neumann: w.r_dr.scale(-1.0),
    })
}

/// Solves the matching conditions mode by mode and re-evaluates both sides.
pub fn match_cauchy_data(
    delaunay_corr: &CauchyPair,
    surface_corr: &CauchyPair,
    tau: f64,
    radius: f64,
) -> Result<MatchResult> {
    if !(tau != 0.0 && tau.is_finite() && radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "matching needs tau != 0 and radius > 0, got tau = {tau}, radius = {radius}"
        )));
    }
    let n_max = delaunay_corr.n_max()?;
    let other = surface_corr.n_max()?;
    if other != n_max {
        return Err(Error::TruncationMismatch(n_max, other));
    }
    let d = delaunay_corr.dirichlet.sub(&surface_corr.dirichlet)?;
    let m = delaunay_corr.neumann.sub(&surface_corr.neumann)?;
    let s = mp(tau);

    let m0 = m.get(0).re;
    let t = s * m0;
    let a0 = d.get(0).re - m0 * radius.ln();

    let mut g = CircleFourier::zeros(n_max);
    let mut h = CircleFourier::zeros(n_max);
    let (mut a1, mut a_neg1) = (0.0, 0.0);
    if n_max >= 1 {
        let (d1, m1) = (d.get(1), m.get(1));
        let ar = 0.5 * (d1 + m1);
        let a = ar / radius;
        a1 = 2.0 * a.re;
        a_neg1 = -2.0 * a.im;
        g.set(1, 0.5 * (m1 - d1));
        g.set(-1, 0.5 * (m.get(-1) - d.get(-1)));
    }
    for n in 2..=n_max as i32 {
        let k = n as f64;
        for n in [n, -n] {
            let (dn, mn) = (d.get(n), m.get(n));
            h.set(n, 0.5 * (dn + mn / k));
            g.set(n, 0.5 * (mn / k - dn));
        }
    }
    let state = MatchState {
        t,
        a0,
        a1,
        a_neg1,
        g,
        h,
    };
    let residual = evaluate_residual(&state, delaunay_corr, surface_corr, tau, radius)?;
    Ok(MatchResult { state, residual })
}

/// Plugs `state` into both sides and compares.
pub fn evaluate_residual(
    state: &MatchState,
    delaunay_corr: &CauchyPair,
    surface_corr: &CauchyPair,
    tau: f64,
    radius: f64,
) -> Result<MatchResidual> {
    let n_max = delaunay_corr.n_max()?;
    let surf = surface_part(state, tau, radius, n_max).add(surface_corr)?;
    let del = delaunay_part(state, radius)?.add(delaunay_corr)?;
    let s = mp(tau);
    let m0 = delaunay_corr.neumann.get(0).re - surface_corr.neumann.get(0).re;
    let common = s * 0.25 * tau * tau;
    let tilde = state.tilde_tau_sq(tau);
    Ok(MatchResidual {
        dirichlet: surf.dirichlet.max_abs_diff(&del.dirichlet)?,
        neumann: surf.neumann.max_abs_diff(&del.neumann)?,
        log_balance: (state.t - s * m0).abs(),
        log_consistency: (s * 0.25 * tilde - (common + s * state.t)).abs(),
        tilde_tau_sq: tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::{exterior_extension, CircleFourier};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const R: f64 = 0.01;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_pair(rng: &mut ChaCha8Rng, n_max: usize) -> CauchyPair {
        CauchyPair {
            dirichlet: CircleFourier::random_real(rng, n_max, 0, 16, 1e-3),
            neumann: CircleFourier::random_real(rng, n_max, 0, 16, 1e-3),
        }
    }

    #[test]
    fn zero_corrections_give_zero_state() {
        let z = CauchyPair::zeros(16);
        let r = match_cauchy_data(&z, &z, 0.1, R).unwrap();
        assert!(r.state.is_zero());
        assert_eq!(r.residual.dirichlet, 0.0);
    }

    #[test]
    fn dirichlet_mode_three_on_the_delaunay_side() {
        let eps = 1e-3;
        let mut dc = CauchyPair::zeros(8);
        dc.dirichlet = CircleFourier::mode(8, 3, c(eps));
        let r = match_cauchy_data(&dc, &CauchyPair::zeros(8), 0.1, R).unwrap();
        // hand solution of h − g = ε, 3(h + g) = 0
        assert!((r.state.h.get(3) - c(0.5 * eps)).norm() < 1e-18);
        assert!((r.state.g.get(3) - c(-0.5 * eps)).norm() < 1e-18);
        let mut rest = r.state.clone();
        rest.h.set(3, c(0.0));
        rest.g.set(3, c(0.0));
        assert!(rest.is_zero());
        assert!(r.residual.dirichlet < 1e-18 && r.residual.neumann < 1e-18);
    }

    #[test]
    fn constant_on_the_surface_side() {
        let mut sc = CauchyPair::zeros(8);
        sc.dirichlet = CircleFourier::constant(8, 0.25);
        let r = match_cauchy_data(&CauchyPair::zeros(8), &sc, 0.1, R).unwrap();
        assert_eq!(r.state.a0, -0.25);
        let mut rest = r.state.clone();
        rest.a0 = 0.0;
        assert!(rest.is_zero());
    }

    #[test]
    fn log_term_from_mode_zero_neumann() {
        for tau in [0.1, -0.1] {
            let mut dc = CauchyPair::zeros(4);
            dc.neumann = CircleFourier::constant(4, 2e-4);
            let r = match_cauchy_data(&dc, &CauchyPair::zeros(4), tau, R).unwrap();
            // ∓t = m₀
            assert!((mp(tau) * r.state.t - 2e-4).abs() < 1e-18);
            assert!(r.residual.log_balance < 1e-18);
            assert!(r.residual.log_consistency < 1e-15);
            assert!(r.residual.dirichlet < 1e-15);
        }
    }

    #[test]
    fn linear_modes_recover_a_plane() {
        // surface correction −(b₁x + b₋₁y) is undone by a = (b₁, b₋₁)
        let (b1, bm1) = (0.3, -0.7);
        let plane = MatchState {
            a1: b1,
            a_neg1: bm1,
            ..MatchState::zeros(4)
        }
        .linear_modes(4, R);
        let sc = CauchyPair {
            dirichlet: plane.scale(-1.0),
            neumann: plane.scale(-1.0),
        };
        let r = match_cauchy_data(&CauchyPair::zeros(4), &sc, 0.1, R).unwrap();
        assert!((r.state.a1 - b1).abs() < 1e-14);
        assert!((r.state.a_neg1 - bm1).abs() < 1e-14);
        assert!(r.state.g.l2_norm() < 1e-18);
    }

    #[test]
    fn exterior_sign_in_surface_neumann() {
        let eps = 1e-3;
        let mut st = MatchState::zeros(8);
        st.g = CircleFourier::mode(8, 3, c(eps));
        let p = surface_part(&st, 0.1, R, 8);
        let direct = exterior_extension(&st.g, R, R).unwrap();
        assert_eq!(p.neumann.get(3), -direct.r_dr.get(3));
        assert!((p.neumann.get(3) - c(3.0 * eps)).norm() < 1e-18);
    }

    #[test]
    fn random_pairs_match_and_superpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let (d1, s1) = (random_pair(&mut rng, 16), random_pair(&mut rng, 16));
            let (d2, s2) = (random_pair(&mut rng, 16), random_pair(&mut rng, 16));
            let r1 = match_cauchy_data(&d1, &s1, 0.05, R).unwrap();
            let r2 = match_cauchy_data(&d2, &s2, 0.05, R).unwrap();
            assert!(r1.residual.dirichlet <= 1e-10 && r1.residual.neumann <= 1e-10);
            let r12 =
                match_cauchy_data(&d1.add(&d2).unwrap(), &s1.add(&s2).unwrap(), 0.05, R).unwrap();
            let (a, b, s) = (&r1.state, &r2.state, &r12.state);
            assert!((a.t + b.t - s.t).abs() <= 1e-12);
            assert!((a.a0 + b.a0 - s.a0).abs() <= 1e-12);
            assert!((a.a1 + b.a1 - s.a1).abs() <= 1e-12);
            assert!((a.a_neg1 + b.a_neg1 - s.a_neg1).abs() <= 1e-12);
            assert!(a.g.add(&b.g).unwrap().max_abs_diff(&s.g).unwrap() <= 1e-12);
            assert!(a.h.add(&b.h).unwrap().max_abs_diff(&s.h).unwrap() <= 1e-12);
            assert!(s.g.is_real(1e-15) && s.h.is_real(1e-15));
        }
    }

    #[test]
    fn truncation_mismatch() {
        let r = match_cauchy_data(&CauchyPair::zeros(4), &CauchyPair::zeros(5), 0.1, R);
        assert!(matches!(r, Err(Error::TruncationMismatch(4, 5))));
    }
}
