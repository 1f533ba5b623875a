//! Log-logistic and standard logistic distribution functions.
//!
//! With `Y = log T`, a log-logistic lifetime `T ~ LL(alpha, beta)` is the
//! logistic location-scale variable `Y = mu + s Z` where `mu = log(beta)`,
//! `s = 1/alpha` and `Z` is standard logistic. Everything here is evaluated
//! through the standardized log-time `u = alpha * log(t / beta)` so that the
//! powers `(t/beta)^alpha` never have to be formed explicitly.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape/scale parameterization of the log-logistic distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogisticParams {
    alpha: f64,
    beta: f64,
}

impl LogLogisticParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParams(format!("shape must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParams(format!("scale must be positive, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn to_loc_scale(&self) -> LocScaleParams {
        LocScaleParams {
            mu: self.beta.ln(),
            s: 1.0 / self.alpha,
        }
    }

    /// Standardized log-time `alpha * log(t / beta)`.
    #[inline]
    fn standardize(&self, t: f64) -> f64 {
        self.alpha * (t.ln() - self.beta.ln())
    }
}

/// Location-scale parameterization of the log-time `Y = log T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocScaleParams {
    mu: f64,
    s: f64,
}

impl LocScaleParams {
    pub fn new(mu: f64, s: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParams(format!("location must be finite, got {mu}")));
        }
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParams(format!("scale must be positive, got {s}")));
        }
        Ok(Self { mu, s })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn to_log_logistic(&self) -> Result<LogLogisticParams> {
        LogLogisticParams::new(1.0 / self.s, self.mu.exp())
    }
}

/// Seed for every stochastic routine in the crate.
///
/// Streams are ChaCha20 keyed from the 64-bit value. Child seeds are derived
/// with the SplitMix64 finalizer applied to `value ^ golden * (tag + 1)`, so a
/// `(parent, tag)` pair always names the same independent stream no matter
/// which worker consumes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    pub fn value(&self) -> u64 {
        self.0
    }

    pub fn derive(&self, tag: u64) -> Seed {
        Seed(splitmix64(self.0 ^ GOLDEN_GAMMA.wrapping_mul(tag.wrapping_add(1))))
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

/// `log(1 + e^x)` without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Standard logistic CDF `1 / (1 + e^{-z})`.
#[inline]
pub fn logistic_cdf(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Log-odds `log(p / (1 - p))`, the standard logistic quantile.
pub fn logit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("logit requires 0 < p < 1, got {p}")));
    }
    Ok(logit_unchecked(p))
}

#[inline]
pub(crate) fn logit_unchecked(p: f64) -> f64 {
    // ln(p) - ln1p(-p) keeps precision for p near 1
    p.ln() - (-p).ln_1p()
}

/// Log-logistic density, computed in log space.
pub fn ll_pdf(t: f64, p: &LogLogisticParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("density requires t > 0, got {t}")));
    }
    Ok(ll_log_pdf(t, p).exp())
}

#[inline]
pub(crate) fn ll_log_pdf(t: f64, p: &LogLogisticParams) -> f64 {
    let u = p.standardize(t);
    p.alpha.ln() - t.ln() + u - 2.0 * softplus(u)
}

/// Log-logistic CDF. Returns 0 for `t <= 0`.
pub fn ll_cdf(t: f64, p: &LogLogisticParams) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    logistic_cdf(p.standardize(t))
}

/// Reliability (survival) function `1 / (1 + (t/beta)^alpha)`. Returns 1 for `t <= 0`.
pub fn ll_reliability(t: f64, p: &LogLogisticParams) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    logistic_cdf(-p.standardize(t))
}

#[inline]
pub(crate) fn ll_log_reliability(t: f64, p: &LogLogisticParams) -> f64 {
    -softplus(p.standardize(t))
}

pub fn ll_quantile(prob: f64, params: &LogLogisticParams) -> Result<f64> {
    let z = logit(prob)?;
    Ok(params.beta * (z / params.alpha).exp())
}

/// Uniform on the open interval (0, 1) mapped through the logistic quantile.
#[inline]
pub(crate) fn draw_std_logistic<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    logit_unchecked(u)
}

/// `n` i.i.d. log-logistic lifetimes by inverse transform, in draw order.
pub fn sample_loglogistic(n: usize, p: &LogLogisticParams, seed: Seed) -> Vec<f64> {
    let mut rng = seed.rng();
    sample_loglogistic_with(&mut rng, n, p)
}

pub(crate) fn sample_loglogistic_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: &LogLogisticParams,
) -> Vec<f64> {
    let s = 1.0 / p.alpha;
    (0..n)
        .map(|_| p.beta * (s * draw_std_logistic(rng)).exp())
        .collect()
}

/// `n` i.i.d. standard logistic values, in draw order.
pub fn sample_std_logistic(n: usize, seed: Seed) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..n).map(|_| draw_std_logistic(&mut rng)).collect()
}
