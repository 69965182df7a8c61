//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! The controller works in either direction of `s`. Every accepted step is
//! reported to an observer together with the state and its derivative, which
//! is what the profile sampler and the period finder need for Hermite
//! interpolation.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; also the sampling density guarantee for observers.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Integrates `y' = f(s, y)` from `s0` to `s1` (either direction).
    ///
    /// `observe(s, y, dy)` is called at `s0` and after every accepted step,
    /// the last call being exactly at `s1`.
    pub fn integrate<const N: usize, F, O>(
        &self,
        f: F,
        s0: f64,
        y0: [f64; N],
        s1: f64,
        mut observe: O,
    ) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N], &[f64; N]),
    {
        let span = s1 - s0;
        let mut y = y0;
        let mut k1 = f(s0, &y);
        observe(s0, &y, &k1);
        if span == 0.0 {
            return Ok(y);
        }
        let dir = span.signum();
        let mut s = s0;
        let mut h = self.initial_step(&f, s0, &y, &k1, span.abs());
        let h_min = 1e-14 * (s0.abs().max(s1.abs()).max(1.0));
        let mut steps = 0usize;

        loop {
            let remaining = (s1 - s) * dir;
            if remaining <= 0.0 {
                break;
            }
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let hs = dir * step;

            let (y_new, k7, err) = self.trial(&f, s, &y, &k1, hs);
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::IntegrationFailure(format!(
                    "exceeded {} steps at s = {s}",
                    self.max_steps
                )));
            }
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                h = step * 0.2;
                if h < h_min {
                    return Err(Error::IntegrationFailure(format!(
                        "non-finite state near s = {s}"
                    )));
                }
                continue;
            }

            if err <= 1.0 {
                s = if last { s1 } else { s + hs };
                y = y_new;
                k1 = k7;
                observe(s, &y, &k1);
                if last {
                    break;
                }
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            let fac = if err > 1.0 { fac.min(1.0) } else { fac };
            h = (step * fac).min(self.h_max);
            if h < h_min {
                return Err(Error::IntegrationFailure(format!(
                    "step size underflow at s = {s} (tolerance {:e} unreachable)",
                    self.rtol
                )));
            }
        }
        Ok(y)
    }

    fn initial_step<const N: usize, F>(
        &self,
        f: &F,
        s0: f64,
        y0: &[f64; N],
        k1: &[f64; N],
        span: f64,
    ) -> f64
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut d0 = 0.0f64;
        let mut d1 = 0.0f64;
        for i in 0..N {
            let sc = self.atol + self.rtol * y0[i].abs();
            d0 = d0.max((y0[i] / sc).abs());
            d1 = d1.max((k1[i] / sc).abs());
        }
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        // one Euler probe for the second derivative scale
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y0[i] + h0 * k1[i];
        }
        let k2 = f(s0 + h0, &y1);
        let mut d2 = 0.0f64;
        for i in 0..N {
            let sc = self.atol + self.rtol * y0[i].abs();
            d2 = d2.max(((k2[i] - k1[i]) / sc).abs() / h0);
        }
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span).min(self.h_max)
    }

    #[allow(clippy::needless_range_loop)]
    fn trial<const N: usize, F>(
        &self,
        f: &F,
        s: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N], f64)
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut tmp = [0.0; N];
        for i in 0..N {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = f(s + C2 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = f(s + C3 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = f(s + C4 * h, &tmp);
        for i in 0..N {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = f(s + C5 * h, &tmp);
        for i in 0..N {
            tmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = f(s + h, &tmp);
        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let k7 = f(s + h, &y_new);
        let mut err = 0.0f64;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        (y_new, k7, err)
    }
}
