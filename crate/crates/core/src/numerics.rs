// SPDX-License-Identifier: Apache-2.0

//! Normal and Student-t distribution functions, the extended-real ratio
//! convention used by the one-tailed p-values, and seeded random streams.
//!
//! The complementary error function comes from `libm`; its inverse and the
//! regularized incomplete beta function come from `statrs`. Upper-tail
//! probabilities never go through `1 - cdf`.

use std::f64::consts::{PI, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::{beta::beta_reg, erf};

use crate::error::{Error, Result};

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::Domain(format!("{value} is not a probability")))
        }
    }

    #[inline]
    pub const fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function Φ(x).
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Upper tail 1 − Φ(x), computed without cancellation.
#[inline]
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal quantile Φ⁻¹(p) on the extended reals:
/// Φ⁻¹(0) = −∞ and Φ⁻¹(1) = +∞.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "normal quantile needs p in [0, 1], got {p}"
        )));
    }
    Ok(if p <= 0.5 {
        lower_quantile(p)
    } else {
        // 1 - p is exact for p >= 0.5.
        -lower_quantile(1.0 - p)
    })
}

/// Φ⁻¹(q) for q in [0, 0.5], polished by one Halley step.
fn lower_quantile(q: f64) -> f64 {
    if q == 0.0 {
        return f64::NEG_INFINITY;
    }
    if q == 0.5 {
        return 0.0;
    }
    let x = -SQRT_2 * erf::erfc_inv(2.0 * q);
    let density = std_normal_pdf(x);
    if !x.is_finite() || density < 1e-300 {
        return x;
    }
    let u = (std_normal_cdf(x) - q) / density;
    x - u / (1.0 + 0.5 * x * u)
}

fn check_df(df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::Domain("Student-t needs df >= 1".into()));
    }
    Ok(df as f64)
}

/// P(T ≤ −|t|) for T ~ t(df), always on the small side.
fn t_lower_tail(abs_t: f64, df: f64) -> f64 {
    if abs_t.is_infinite() {
        return 0.0;
    }
    let t2 = abs_t * abs_t;
    // I_x(ν/2, 1/2) with x = ν/(ν + t²) is the tail itself, so no
    // complement is taken for any t.
    0.5 * beta_reg(0.5 * df, 0.5, df / (df + t2))
}

/// Student-t distribution function with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: u32) -> Result<f64> {
    let nu = check_df(df)?;
    if t.is_nan() {
        return Err(Error::Domain("Student-t cdf of NaN".into()));
    }
    let tail = t_lower_tail(t.abs(), nu);
    Ok(if t <= 0.0 { tail } else { 1.0 - tail })
}

/// Student-t upper tail P(T > t).
pub fn student_t_sf(t: f64, df: u32) -> Result<f64> {
    student_t_cdf(-t, df)
}

/// `a / b` under the convention a/0 = +∞ for a > 0.
///
/// 0/0 has no value at this layer and is reported as a domain error.
pub fn extended_ratio(numerator: f64, denominator: f64) -> Result<f64> {
    if denominator == 0.0 {
        if numerator > 0.0 {
            Ok(f64::INFINITY)
        } else {
            Err(Error::Domain(format!("{numerator}/0 is undefined")))
        }
    } else {
        Ok(numerator / denominator)
    }
}

/// Immutable descriptor of a reproducible random stream.
///
/// Two descriptors with the same `(seed, replicate, substream)` always
/// produce the same draws. Descriptors differing in any coordinate map to
/// distinct ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub replicate: u64,
    pub substream: u16,
}

impl RngStream {
    const MAX_REPLICATE: u64 = 1 << 48;

    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            replicate: 0,
            substream: 0,
        }
    }

    pub fn at(self, replicate: u64, substream: u16) -> Self {
        assert!(
            replicate < Self::MAX_REPLICATE,
            "replicate index {replicate} out of range"
        );
        RngStream {
            replicate,
            substream,
            ..self
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((self.replicate << 16) | u64::from(self.substream));
        rng
    }
}

/// `count` draws from N(mean, sd²), read from the start of `stream`.
pub fn draw_normal(stream: &RngStream, mean: f64, sd: f64, count: usize) -> Result<Vec<f64>> {
    if !(sd >= 0.0) {
        return Err(Error::Domain(format!("standard deviation {sd} < 0")));
    }
    let mut rng = stream.rng();
    Ok((0..count)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            mean + sd * z
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_fixed_points() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(40.0) - 1.0).abs() <= 1e-15);
        assert_eq!(std_normal_sf(40.0), std_normal_cdf(-40.0));
    }

    #[test]
    fn quantile_boundaries() {
        assert_eq!(std_normal_quantile(0.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(std_normal_quantile(1.0).unwrap(), f64::INFINITY);
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_quantile(0.05).unwrap() + 1.6449).abs() < 1e-4);
        assert!(std_normal_quantile(-0.1).is_err());
        assert!(std_normal_quantile(1.5).is_err());
        assert!(std_normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_deep_tail_is_finite() {
        let x = std_normal_quantile(f64::MIN_POSITIVE).unwrap();
        assert!(x.is_finite() && x < -37.0);
    }

    #[test]
    fn student_t_basics() {
        for df in [1, 2, 5, 30, 1000] {
            assert_eq!(student_t_cdf(0.0, df).unwrap(), 0.5);
            assert!((student_t_cdf(1e12, df).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(student_t_cdf(1.0, 0).is_err());
        // Cauchy: F(1) = 3/4.
        assert!((student_t_cdf(1.0, 1).unwrap() - 0.75).abs() < 1e-14);
        // df = 2 has the closed form 1/2 + t / (2 sqrt(2 + t²)).
        let t = 1.3_f64;
        let exact = 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
        assert!((student_t_cdf(t, 2).unwrap() - exact).abs() < 1e-14);
    }

    #[test]
    fn ratio_convention() {
        assert_eq!(extended_ratio(0.3, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(extended_ratio(0.3, 0.5).unwrap(), 0.6);
        assert!(extended_ratio(0.0, 0.0).is_err());
    }

    #[test]
    fn probability_newtype() {
        assert!(Probability::new(1.01).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert_eq!(Probability::new(0.25).unwrap().value(), 0.25);
    }

    #[test]
    fn draws_are_reproducible() {
        let s = RngStream::new(7).at(3, 1);
        let a = draw_normal(&s, 0.0, 1.0, 100).unwrap();
        let b = draw_normal(&s, 0.0, 1.0, 100).unwrap();
        assert_eq!(a, b);
        let c = draw_normal(&s.at(3, 0), 0.0, 1.0, 100).unwrap();
        assert_ne!(a, c);
        assert_eq!(draw_normal(&s, 3.0, 0.0, 2).unwrap(), vec![3.0, 3.0]);
        assert!(draw_normal(&s, 0.0, -1.0, 2).is_err());
    }
}
