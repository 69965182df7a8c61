//! Grid version of the exponentially weighted sup norm on a half-cylinder.

use crate::error::{Error, Result};

/// Shortest window accepted by [`weighted_norm`], in units of `s`.
pub const MIN_WINDOW: f64 = 2.0;

/// `max_k e^{-μ s_k} sup_{[s_k, s_k + 1)} |f|` over unit subintervals starting
/// at the first sample `s_0`. Samples must be sorted in `s`.
pub fn weighted_norm(s: &[f64], values: &[f64], mu: f64) -> Result<f64> {
    if s.len() != values.len() || s.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{} abscissae for {} values",
            s.len(),
            values.len()
        )));
    }
    let (s0, s1) = (s[0], s[s.len() - 1]);
    if s1 - s0 < MIN_WINDOW {
        return Err(Error::WindowTooShort {
            length: s1 - s0,
            required: MIN_WINDOW,
        });
    }
    let n_int = (s1 - s0).ceil() as usize;
    let mut local = vec![0.0f64; n_int.max(1)];
    for (x, v) in s.iter().zip(values) {
        let k = (((x - s0).floor()) as usize).min(local.len() - 1);
        local[k] = local[k].max(v.abs());
    }
    Ok(local
        .iter()
        .enumerate()
        .map(|(k, m)| (-mu * (s0 + k as f64)).exp() * m)
        .fold(0.0, f64::max))
}
