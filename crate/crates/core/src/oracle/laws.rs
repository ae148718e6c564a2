//! Distribution tests against exact laws and between two samples.

use std::f64::consts::FRAC_2_PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{McReport, P_THRESHOLD};
use crate::error::{Error, Result};
use crate::filters::normal_cdf;
use crate::rng::Seed;
use crate::stats::{ks_one_sample, ks_two_sample, KsResult};

/// Minimum sample size for the asymptotic KS p-value. Smaller samples are
/// still tested but the report fails with a warning.
pub const MIN_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Normal(f64),
    HalfNormal(f64),
    /// Law of the last zero before `t` of a Brownian motion.
    Arcsine(f64),
}

impl Law {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Law::Normal(s) => normal_cdf(x / s),
            Law::HalfNormal(_) if x <= 0.0 => 0.0,
            Law::HalfNormal(s) => 2.0 * normal_cdf(x / s) - 1.0,
            Law::Arcsine(t) => FRAC_2_PI * (x / t).clamp(0.0, 1.0).sqrt().asin(),
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Law::Normal(s) => write!(f, "normal({s})"),
            Law::HalfNormal(s) => write!(f, "half_normal({s})"),
            Law::Arcsine(t) => write!(f, "arcsine({t})"),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("KS test needs samples".into()));
    }
    Ok(())
}

fn ks_report(name: String, ks: KsResult, seed: Seed, n: usize, dt: f64) -> McReport {
    let r = McReport::new(name, seed, n, dt)
        .with_estimate(ks.statistic, 0.0)
        .with_statistic(ks.statistic)
        .with_p_value(ks.p_value);
    if n < MIN_SAMPLES {
        return r.with_pass(false).param("warning", format!("insufficient N: {n} < {MIN_SAMPLES}"));
    }
    r.with_pass(ks.p_value > P_THRESHOLD)
}

/// One-sample KS test of `samples` against `law`; pass iff `p > 0.01` and
/// there are at least [`MIN_SAMPLES`] samples.
pub fn test_distribution(samples: &[f64], law: Law, seed: Seed, dt: f64) -> Result<McReport> {
    check_size(samples.len())?;
    let ks = ks_one_sample(samples, |x| law.cdf(x));
    Ok(ks_report(format!("law/{law}"), ks, seed, samples.len(), dt).param("law", law.to_string()))
}

/// Two-sample KS test; pass iff `p > 0.01`.
pub fn test_two_sample(a: &[f64], b: &[f64], seed: Seed, dt: f64) -> Result<McReport> {
    check_size(a.len())?;
    check_size(b.len())?;
    let ks = ks_two_sample(a, b);
    Ok(ks_report("two_sample".into(), ks, seed, a.len().min(b.len()), dt).param("n_a", a.len()).param("n_b", b.len()))
}
