//! Fourier-side harmonic extensions on the disk, the exterior of a disk and
//! the half-cylinder, and the Dirichlet-to-Neumann matching operator.
//!
//! Every operator is diagonal on `e^{inθ}`, so the truncated space is
//! invariant and all of them are exact there.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION: usize = 64;

/// Mode 0 (and ±1 where forbidden) must be below this, relative to `1 + ‖h‖`.
pub const MODE_TOL: f64 = 1e-14;

/// Coefficients `c_n`, `n ∈ [−N, N]`, of `h(θ) = Σ c_n e^{inθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFourier {
    n_max: usize,
    coeffs: Vec<Complex64>,
}

impl CircleFourier {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * n_max + 1],
        }
    }

    /// Single mode `c·e^{inθ}` (not real unless `n = 0` and `c` real).
    pub fn mode(n_max: usize, n: i32, c: Complex64) -> Self {
        let mut f = Self::zeros(n_max);
        f.set(n, c);
        f
    }

    /// Real data `c·e^{inθ} + conj(c)·e^{−inθ}`; for `n = 0` just `Re c`.
    pub fn real_mode(n_max: usize, n: i32, c: Complex64) -> Self {
        let mut f = Self::zeros(n_max);
        if n == 0 {
            f.set(0, Complex64::new(c.re, 0.0));
        } else {
            f.set(n, c);
            f.set(-n, c.conj());
        }
        f
    }

    pub fn constant(n_max: usize, c: f64) -> Self {
        Self::real_mode(n_max, 0, Complex64::new(c, 0.0))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: i32) -> Complex64 {
        if n.unsigned_abs() as usize > self.n_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(n + self.n_max as i32) as usize]
    }

    /// Panics if `|n| > N`.
    pub fn set(&mut self, n: i32, c: Complex64) {
        assert!(
            n.unsigned_abs() as usize <= self.n_max,
            "mode {n} beyond truncation {}",
            self.n_max
        );
        let k = (n + self.n_max as i32) as usize;
        self.coeffs[k] = c;
    }

    pub fn modes(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        let off = self.n_max as i32;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (k as i32 - off, c))
    }

    /// Multiplies mode `n` by `m(|n|)`.
    pub fn map_diagonal(&self, m: impl Fn(u32) -> f64) -> Self {
        let mut out = self.clone();
        let off = self.n_max as i32;
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            *c *= m((k as i32 - off).unsigned_abs());
        }
        out
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_diagonal(|_| a)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_max != other.n_max {
            return Err(Error::TruncationMismatch(self.n_max, other.n_max));
        }
        Ok(())
    }

    /// `max_n |c_n − conj(c_{−n})|`.
    pub fn reality_defect(&self) -> f64 {
        (0..=self.n_max as i32)
            .map(|n| (self.get(n) - self.get(-n).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.reality_defect() <= tol
    }

    /// L² norm for the measure dθ/2π, `(Σ|c_n|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ c_n conj(d_n)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Complex value at `θ`.
    pub fn eval_complex(&self, theta: f64) -> Complex64 {
        self.modes()
            .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * theta))
            .sum()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_complex(theta).re
    }

    /// Values at `θ_k = 2πk/m`.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        (0..m)
            .map(|k| self.eval(2.0 * PI * k as f64 / m as f64))
            .collect()
    }

    /// Trigonometric interpolant of real samples at `θ_k = 2πk/m`, truncated
    /// at `N`. Needs `m > 2N` to be exact on degree-`N` data.
    pub fn from_samples(values: &[f64], n_max: usize) -> Self {
        let m = values.len() as f64;
        let mut f = Self::zeros(n_max);
        for n in -(n_max as i32)..=n_max as i32 {
            let c: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    v * Complex64::from_polar(1.0, -2.0 * PI * (n as f64) * k as f64 / m)
                })
                .sum();
            f.set(n, c / m);
        }
        f
    }

    /// Random real data with modes `min_mode ≤ |n| ≤ max_mode`, each complex
    /// coefficient uniform in the square of half-width `amplitude`.
    pub fn random_real<R: Rng>(
        rng: &mut R,
        n_max: usize,
        min_mode: u32,
        max_mode: u32,
        amplitude: f64,
    ) -> Self {
        let mut f = Self::zeros(n_max);
        for n in min_mode..=max_mode.min(n_max as u32) {
            let c = Complex64::new(
                rng.gen_range(-amplitude..=amplitude),
                rng.gen_range(-amplitude..=amplitude),
            );
            let r = if n == 0 { Complex64::new(c.re, 0.0) } else { c };
            f.set(n as i32, r);
            f.set(-(n as i32), r.conj());
        }
        f
    }

    pub fn to_triples(&self) -> Vec<(i32, f64, f64)> {
        self.modes().map(|(n, c)| (n, c.re, c.im)).collect()
    }

    /// Accepts any subset of modes; `N` is the largest `|n|` present unless a
    /// larger `n_max` is requested.
    pub fn from_triples(t: &[(i32, f64, f64)], n_max: Option<usize>) -> Result<Self> {
        let top = t
            .iter()
            .map(|x| x.0.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let n_max = n_max.unwrap_or(top);
        if top > n_max {
            return Err(Error::TruncationMismatch(top, n_max));
        }
        let mut f = Self::zeros(n_max);
        for &(n, re, im) in t {
            f.set(n, Complex64::new(re, im));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coefficients serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Serialize for CircleFourier {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_triples().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircleFourier {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let t = Vec::<(i32, f64, f64)>::deserialize(d)?;
        Self::from_triples(&t, None).map_err(serde::de::Error::custom)
    }
}

/// Dirichlet trace on a circle together with `r ∂_r` there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extension {
    pub value: CircleFourier,
    pub r_dr: CircleFourier,
}

fn scale_of(h: &CircleFourier) -> f64 {
    MODE_TOL * (1.0 + h.l2_norm())
}

fn require_mean_zero(h: &CircleFourier) -> Result<()> {
    let c0 = h.get(0).norm();
    if c0 > scale_of(h) {
        return Err(Error::NonzeroMean(c0));
    }
    Ok(())
}

/// Harmonic extension of `h` (given on `|x| = rho`) into the disk, read off
/// on the circle of radius `r ≤ rho`.
pub fn interior_extension(h: &CircleFourier, rho: f64, r: f64) -> Result<Extension> {
    if !(rho > 0.0 && r > 0.0 && r <= rho) {
        return Err(Error::InvalidParameter(format!(
            "interior extension needs 0 < r <= rho, got r = {r}, rho = {rho}"
        )));
    }
    let q = r / rho;
    Ok(Extension {
        value: h.map_diagonal(|n| q.powi(n as i32)),
        r_dr: h.map_diagonal(|n| n as f64 * q.powi(n as i32)),
    })
}

/// Decaying harmonic extension of mean-zero `g` outside the disk of radius
/// `rho`, read off at `r ≥ rho`.
pub fn exterior_extension(g: &CircleFourier, rho: f64, r: f64) -> Result<Extension> {
    if !(rho > 0.0 && r >= rho && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "exterior extension needs r >= rho > 0, got r = {r}, rho = {rho}"
        )));
    }
    require_mean_zero(g)?;
    let q = rho / r;
    Ok(Extension {
        value: g.map_diagonal(|n| q.powi(n as i32)),
        r_dr: g.map_diagonal(|n| -(n as f64) * q.powi(n as i32)),
    })
}

/// Bounded harmonic extension on `[0, ∞) × S¹` of data without modes 0, ±1,
/// read off at `s`.
pub fn halfcylinder_extension(h: &CircleFourier, s: f64) -> Result<CircleFourier> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "half-cylinder extension needs s >= 0, got {s}"
        )));
    }
    let tol = scale_of(h);
    for n in [0, 1, -1] {
        if h.get(n).norm() > tol {
            return Err(Error::LowModePresent(n));
        }
    }
    Ok(h.map_diagonal(|n| (-(n as f64) * s).exp()))
}

/// `sup_θ |w(s, θ)|` of the half-cylinder extension on a grid in `s`, sampled
/// at `m` equally spaced angles.
pub fn halfcylinder_sup_profile(h: &CircleFourier, s: &[f64], m: usize) -> Result<Vec<f64>> {
    s.iter()
        .map(|&x| {
            let w = halfcylinder_extension(h, x)?;
            Ok(w.sample(m).into_iter().fold(0.0f64, |a, v| a.max(v.abs())))
        })
        .collect()
}

/// Interior minus exterior `r ∂_r` on the matching circle: multiplier `2|n|`.
pub fn dtn_matching(h: &CircleFourier) -> Result<CircleFourier> {
    require_mean_zero(h)?;
    Ok(h.map_diagonal(|n| 2.0 * n as f64))
}

pub fn dtn_matching_inverse(f: &CircleFourier) -> Result<CircleFourier> {
    require_mean_zero(f)?;
    Ok(f.map_diagonal(|n| if n == 0 { 0.0 } else { 0.5 / n as f64 }))
}

/// Max of the 5-point polar Laplacian `u_rr + u_r/r + u_θθ/r²` of the interior
/// extension of `h`, over interior nodes of the annulus `[rho/4, rho]` with
/// `n_r` radial and `n_theta` angular intervals. Scaled by `rho²` so the
/// result is dimensionless.
pub fn polar_laplacian_residual(
    h: &CircleFourier,
    rho: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<f64> {
    if n_r < 4 || n_theta < 8 {
        return Err(Error::InvalidGrid(format!("{n_r} x {n_theta} polar grid")));
    }
    let r0 = 0.25 * rho;
    let dr = (rho - r0) / n_r as f64;
    let dt = 2.0 * PI / n_theta as f64;
    let rings: Vec<Vec<f64>> = (0..=n_r)
        .map(|i| {
            let r = r0 + i as f64 * dr;
            interior_extension(h, rho, r).map(|e| e.value.sample(n_theta))
        })
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 1..n_r {
        let r = r0 + i as f64 * dr;
        for k in 0..n_theta {
            let (kp, km) = ((k + 1) % n_theta, (k + n_theta - 1) % n_theta);
            let u = rings[i][k];
            let urr = (rings[i + 1][k] - 2.0 * u + rings[i - 1][k]) / (dr * dr);
            let ur = (rings[i + 1][k] - rings[i - 1][k]) / (2.0 * dr);
            let utt = (rings[i][kp] - 2.0 * u + rings[i][km]) / (dt * dt);
            worst = worst.max((urr + ur / r + utt / (r * r)).abs());
        }
    }
    Ok(worst * rho * rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn interior_examples() {
        let h = CircleFourier::mode(8, 1, c(1.0, 0.0));
        let e = interior_extension(&h, 2.0, 2.0).unwrap();
        assert_eq!(e.value, h);
        assert_eq!(e.r_dr, h);

        let k = CircleFourier::constant(8, 3.0);
        let e = interior_extension(&k, 1.0, 0.3).unwrap();
        assert_eq!(e.value.get(0), c(3.0, 0.0));
        assert_eq!(e.r_dr.l2_norm(), 0.0);

        let h = CircleFourier::mode(8, 3, c(1.0, 0.0));
        let e = interior_extension(&h, 1.0, 0.5).unwrap();
        assert!((e.value.get(3).re - 0.125).abs() < 1e-15);
        assert!(interior_extension(&h, 1.0, 1.5).is_err());
    }

    #[test]
    fn exterior_examples() {
        let g = CircleFourier::mode(8, 1, c(1.0, 0.0));
        let e = exterior_extension(&g, 1.0, 2.0).unwrap();
        assert!((e.value.get(1).re - 0.5).abs() < 1e-15);
        let e = exterior_extension(&g, 1.0, 1.0).unwrap();
        assert_eq!(e.r_dr.get(1), c(-1.0, 0.0));

        let k = CircleFourier::constant(8, 0.5);
        assert!(matches!(
            exterior_extension(&k, 1.0, 2.0),
            Err(Error::NonzeroMean(_))
        ));

        // a mode-2 extension times r stays bounded and tends to zero
        let g2 = CircleFourier::mode(8, 2, c(1.0, 0.0));
        let weighted: Vec<f64> = [1.0, 2.0, 10.0, 100.0]
            .iter()
            .map(|&r| r * exterior_extension(&g2, 1.0, r).unwrap().value.get(2).norm())
            .collect();
        assert!(weighted.windows(2).all(|w| w[1] < w[0]));
        assert!(weighted[3] <= 0.01 + 1e-15);
    }

    #[test]
    fn halfcylinder_examples() {
        let h = CircleFourier::mode(8, 2, c(1.0, 0.0));
        let w = halfcylinder_extension(&h, 2f64.ln()).unwrap();
        assert!((w.get(2).re - 0.25).abs() < 1e-15);

        let low = CircleFourier::real_mode(8, 1, c(0.1, 0.0));
        assert!(matches!(
            halfcylinder_extension(&low, 0.5),
            Err(Error::LowModePresent(_))
        ));
        assert!(matches!(
            halfcylinder_extension(&CircleFourier::constant(8, 1.0), 0.5),
            Err(Error::LowModePresent(0))
        ));
    }

    #[test]
    fn halfcylinder_decay_rate_in_weighted_norm() {
        use crate::weighted::weighted_norm;
        let h = CircleFourier::real_mode(8, 5, c(0.5, 0.0));
        let norm = |len: f64, mu: f64| {
            let s: Vec<f64> = (0..=200).map(|i| len * i as f64 / 200.0).collect();
            let v = halfcylinder_sup_profile(&h, &s, 64).unwrap();
            weighted_norm(&s, &v, mu).unwrap()
        };
        // bounded at μ = −2 (and ≤ ‖h‖_sup), growing like e^{0.1 s} at μ = −5.1
        assert!(norm(8.0, -2.0) <= 1.0 + 1e-12);
        assert!((norm(8.0, -2.0) - norm(4.0, -2.0)).abs() < 1e-12);
        let (a, b) = (norm(4.0, -5.1), norm(8.0, -5.1));
        assert!(b > 1.3 * a);
    }

    #[test]
    fn dtn_examples() {
        let h = CircleFourier::mode(8, 1, c(1.0, 0.0));
        assert_eq!(dtn_matching(&h).unwrap().get(1), c(2.0, 0.0));
        let h = CircleFourier::mode(8, -4, c(1.0, 0.0));
        assert_eq!(dtn_matching(&h).unwrap().get(-4), c(8.0, 0.0));
        assert!(dtn_matching(&CircleFourier::constant(8, 1.0)).is_err());
    }

    #[test]
    fn dtn_is_interior_minus_exterior() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = CircleFourier::random_real(&mut rng, 16, 1, 16, 1.0);
        let i = interior_extension(&h, 0.3, 0.3).unwrap().r_dr;
        let e = exterior_extension(&h, 0.3, 0.3).unwrap().r_dr;
        let p = dtn_matching(&h).unwrap();
        assert!(i.sub(&e).unwrap().max_abs_diff(&p).unwrap() < 1e-13);
    }

    #[test]
    fn sampling_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = CircleFourier::random_real(&mut rng, 12, 0, 12, 1.0);
        let back = CircleFourier::from_samples(&h.sample(64), 12);
        assert!(back.max_abs_diff(&h).unwrap() < 1e-13);
    }

    #[test]
    fn json_triples() {
        let h = CircleFourier::real_mode(2, 1, c(0.5, -0.25));
        let text = h.to_json();
        assert!(text.starts_with("[[-2,0.0,0.0],[-1,0.5,0.25]"));
        assert_eq!(CircleFourier::from_json(&text).unwrap(), h);
        let sparse = CircleFourier::from_json("[[3, 1.0, 0.0]]").unwrap();
        assert_eq!(sparse.n_max(), 3);
        assert!(matches!(
            h.add(&sparse),
            Err(Error::TruncationMismatch(2, 3))
        ));
    }

    #[test]
    fn harmonicity_oracle_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let h = CircleFourier::random_real(&mut rng, 6, 0, 6, 1.0);
            let coarse = polar_laplacian_residual(&h, 1.0, 16, 64).unwrap();
            let fine = polar_laplacian_residual(&h, 1.0, 32, 128).unwrap();
            assert!(fine < 0.35 * coarse, "{coarse} -> {fine}");
        }
    }

    fn arb_mean_zero() -> impl Strategy<Value = CircleFourier> {
        any::<u64>().prop_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            CircleFourier::random_real(&mut rng, DEFAULT_TRUNCATION, 1, 64, 1.0)
        })
    }

    fn arb_high() -> impl Strategy<Value = CircleFourier> {
        any::<u64>().prop_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            CircleFourier::random_real(&mut rng, DEFAULT_TRUNCATION, 2, 64, 1.0)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dtn_inverse_round_trip(h in arb_mean_zero()) {
            let back = dtn_matching_inverse(&dtn_matching(&h).unwrap()).unwrap();
            prop_assert!(back.max_abs_diff(&h).unwrap() < 1e-12);
        }

        #[test]
        fn dtn_positive_and_self_adjoint(h in arb_mean_zero(), k in arb_mean_zero()) {
            let ph = dtn_matching(&h).unwrap();
            let q = ph.inner(&h).unwrap();
            prop_assert!(q.im.abs() < 1e-10);
            prop_assert!(q.re >= 2.0 * h.l2_norm().powi(2) - 1e-10);
            let a = ph.inner(&k).unwrap();
            let b = h.inner(&dtn_matching(&k).unwrap()).unwrap();
            prop_assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
        }

        #[test]
        fn halfcylinder_semigroup(h in arb_high(), s1 in 0.0..3.0f64, s2 in 0.0..3.0f64) {
            let two = halfcylinder_extension(&halfcylinder_extension(&h, s1).unwrap(), s2).unwrap();
            let one = halfcylinder_extension(&h, s1 + s2).unwrap();
            prop_assert!(two.max_abs_diff(&one).unwrap() < 1e-12);
        }

        #[test]
        fn disk_and_exterior_compose(h in arb_mean_zero(), a in 0.1..1.0f64, b in 0.1..1.0f64) {
            let one = interior_extension(&h, 1.0, a * b).unwrap().value;
            let mid = interior_extension(&h, 1.0, a).unwrap().value;
            let two = interior_extension(&mid, a, a * b).unwrap().value;
            prop_assert!(two.max_abs_diff(&one).unwrap() < 1e-12);
            let out = exterior_extension(&h, 1.0, 1.0 / a).unwrap().value;
            let back = out.map_diagonal(|n| a.powi(-(n as i32)));
            prop_assert!(back.max_abs_diff(&h).unwrap() < 1e-12);
        }

        #[test]
        fn operators_preserve_reality(h in arb_high(), s in 0.0..2.0f64) {
            prop_assert!(interior_extension(&h, 1.0, 0.5).unwrap().value.is_real(1e-15));
            prop_assert!(exterior_extension(&h, 1.0, 2.0).unwrap().r_dr.is_real(1e-15));
            prop_assert!(halfcylinder_extension(&h, s).unwrap().is_real(1e-15));
            prop_assert!(dtn_matching(&h).unwrap().is_real(1e-13));
        }
    }
}
