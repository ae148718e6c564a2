//! Closed-form filters and conditional laws.
//!
//! First kind: `E[W_t | F^Y_t] = sqrt(2 g_t / pi) tanh(alpha Y_t)`, with the
//! conditional density of `W_t` and its moments. Second kind:
//! `nu_t = sgn(W_{g_t}) c_nu sqrt(g_t)` and the conditional law of `W_t`.
//!
//! The meander constant `c_A` in `E[|W_t| | t - gamma_t = u] = c_A sqrt(u)`
//! has two candidate values, carried by [`MeanderConstant`]: the printed
//! `pi / 2` and the Rayleigh mean `sqrt(pi / 2)`. The default is the one
//! selected by [`crate::oracle::calibrate_meander_constant`].

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};
use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use libm::{erf, erfc};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::functionals::sgn;
use crate::paths::{fmt_time, SamplePath, TimeGrid};
use crate::quadrature::{integrate_adaptive, integrate_doubling, QuadratureParams};
use crate::solvers::{CoupledScenario, ScenarioKind};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    if x < 0.0 {
        0.5 * erfc(-x / SQRT_2)
    } else {
        1.0 - 0.5 * erfc(x / SQRT_2)
    }
}

/// Heat kernel `p(t, x) = (2 pi t)^{-1/2} exp(-x^2 / (2t))`.
pub fn heat_kernel(t: f64, x: f64) -> f64 {
    (-x * x / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanderMode {
    PaperVerbatim,
    OracleDerived,
}

impl FromStr for MeanderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-verbatim" | "paper" => Ok(MeanderMode::PaperVerbatim),
            "oracle-derived" | "oracle" => Ok(MeanderMode::OracleDerived),
            other => Err(Error::InvalidArgument(format!("unknown meander constant mode `{other}`"))),
        }
    }
}

impl fmt::Display for MeanderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeanderMode::PaperVerbatim => "paper-verbatim",
            MeanderMode::OracleDerived => "oracle-derived",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanderConstant {
    c_a: f64,
    mode: MeanderMode,
}

impl MeanderConstant {
    pub const PRINTED: f64 = PI / 2.0;
    /// Mean of a Rayleigh variable, `sqrt(pi / 2)`.
    pub const RAYLEIGH: f64 = 1.253_314_137_315_500_3;

    pub fn paper_verbatim() -> Self {
        MeanderConstant { c_a: Self::PRINTED, mode: MeanderMode::PaperVerbatim }
    }

    /// Constant chosen by calibration against simulated Brownian paths.
    pub fn oracle_derived(c_a: f64) -> Self {
        MeanderConstant { c_a, mode: MeanderMode::OracleDerived }
    }

    pub fn for_mode(mode: MeanderMode) -> Self {
        match mode {
            MeanderMode::PaperVerbatim => Self::paper_verbatim(),
            MeanderMode::OracleDerived => Self::default(),
        }
    }

    pub fn c_a(&self) -> f64 {
        self.c_a
    }

    pub fn mode(&self) -> MeanderMode {
        self.mode
    }

    /// Constant of the second-kind filter, `c_A * 2 / pi`.
    pub fn c_nu(&self) -> f64 {
        self.c_a * FRAC_2_PI
    }

    /// Scale applied to the Rayleigh variable in the second-kind conditional
    /// law, `c_A * sqrt(2 / pi)`; equals 1 at the Rayleigh mean.
    pub fn rayleigh_scale(&self) -> f64 {
        self.c_a * FRAC_2_PI.sqrt()
    }
}

impl Default for MeanderConstant {
    /// The candidate selected by calibration: `sqrt(pi / 2)`.
    fn default() -> Self {
        Self::oracle_derived(Self::RAYLEIGH)
    }
}

/// `sgn(W_t) c_A sqrt(t - gamma_t)`.
pub fn azema_classical(w: &SamplePath, t: f64, c: &MeanderConstant) -> Result<f64> {
    let wt = w.value_at(t)?;
    let gamma = crate::functionals::last_zero(w, t)?;
    Ok(sgn(wt) * c.c_a() * (t - gamma).max(0.0).sqrt())
}

/// `E[sgn(W_{g_t}) | F^Y_t] = tanh(alpha y)`.
pub fn sign_posterior(y: f64, alpha: f64) -> f64 {
    (alpha * y).tanh()
}

/// `sqrt(2 g / pi) tanh(alpha y)`.
pub fn first_kind_value(g: f64, y: f64, alpha: f64) -> f64 {
    (2.0 * g / PI).sqrt() * sign_posterior(y, alpha)
}

fn require_first_kind(sc: &CoupledScenario) -> Result<()> {
    sc.require_kind(&[ScenarioKind::FirstKindEuler, ScenarioKind::FirstKindExact])
}

/// `E[W_t | F^Y_t]` for a first-kind scenario.
pub fn filter_first_kind(sc: &CoupledScenario, t: f64) -> Result<f64> {
    require_first_kind(sc)?;
    let i = sc.grid().index_of(t)?;
    let g = sc.y_zeros().last_at_or_before(sc.grid().time(i));
    Ok(first_kind_value(g, sc.y.values()[i], sc.alpha))
}

/// `nu_t = sgn(W_{g_t}) c_nu sqrt(g_t)` for a second-kind scenario.
pub fn filter_second_kind(sc: &CoupledScenario, t: f64, c: &MeanderConstant) -> Result<f64> {
    sc.require_kind(&[ScenarioKind::SecondKind])?;
    let i = sc.grid().index_of(t)?;
    let g = sc.y_zeros().last_at_or_before(sc.grid().time(i));
    Ok(second_kind_value(g, sc.sign_at_last_zero[i], c))
}

pub fn second_kind_value(g: f64, sign: f64, c: &MeanderConstant) -> f64 {
    sign * c.c_nu() * g.sqrt()
}

fn check_times(t: f64, g: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    if !(0.0..=t).contains(&g) {
        return Err(Error::InvalidArgument(format!("g must lie in [0, t] = [0, {t}], got {g}")));
    }
    Ok(())
}

/// Conditional density of `W_t` given `F^Y_t`, first kind:
/// `p(t, x) (1 + tanh(alpha y) erf(a x / sqrt 2))` with
/// `a = sqrt(g / (t (t - g)))`, which equals
/// `p(t, x) [Phi(a x) e^{alpha y} + Phi(-a x) e^{-alpha y}] / cosh(alpha y)`.
pub fn conditional_density_first_kind(t: f64, x: f64, y: f64, g: f64, alpha: f64) -> Result<f64> {
    check_times(t, g)?;
    let tau = sign_posterior(y, alpha);
    let e = if g == 0.0 {
        0.0
    } else if g == t {
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        }
    } else {
        erf((g / (t * (t - g))).sqrt() * x / SQRT_2)
    };
    Ok(heat_kernel(t, x) * (1.0 + tau * e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMode {
    /// Moments of the conditional density.
    DensityExact,
    /// The printed even/odd formula.
    PaperVerbatim,
}

impl FromStr for MomentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "density-exact" | "exact" => Ok(MomentMode::DensityExact),
            "paper-verbatim" | "paper" => Ok(MomentMode::PaperVerbatim),
            other => Err(Error::InvalidArgument(format!("unknown moment mode `{other}`"))),
        }
    }
}

pub const MAX_MOMENT: u32 = 12;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `E|N(0,1)|^k`.
fn abs_normal_moment(k: u32) -> f64 {
    2f64.powf(k as f64 / 2.0) * gamma((k as f64 + 1.0) / 2.0) / PI.sqrt()
}

/// `E[N(0,1)^k]`.
fn normal_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        (1..k).step_by(2).map(f64::from).product()
    }
}

/// `E[W_t^n | F^Y_t]`, first kind.
///
/// `DensityExact` writes `W_t = V + N` with `N ~ N(0, t - g)` independent of
/// `V`, where `V` is half-normal with scale `sqrt g` and positive with
/// probability `(1 + tanh(alpha y)) / 2`.
pub fn conditional_moment_first_kind(n: u32, t: f64, g: f64, y: f64, alpha: f64, mode: MomentMode) -> Result<f64> {
    check_times(t, g)?;
    if n > MAX_MOMENT {
        return Err(Error::InvalidArgument(format!("moment order {n} exceeds {MAX_MOMENT}")));
    }
    let tau = sign_posterior(y, alpha);
    match mode {
        MomentMode::DensityExact => {
            let mut acc = 0.0;
            for k in 0..=n {
                let m = n - k;
                if m % 2 == 1 {
                    continue;
                }
                let v = g.powf(k as f64 / 2.0) * abs_normal_moment(k) * if k % 2 == 1 { tau } else { 1.0 };
                let r = (t - g).powf(m as f64 / 2.0) * normal_moment(m);
                acc += binomial(n, k) * v * r;
            }
            Ok(acc)
        }
        MomentMode::PaperVerbatim => {
            let k = n / 2;
            if n.is_multiple_of(2) {
                Ok(factorial(2 * k) / (PI.sqrt() * factorial(k)) * (g / 2.0).powi(k as i32))
            } else {
                Ok(factorial(k) / PI.sqrt() * (2.0 * g).powf(k as f64 + 0.5) * tau)
            }
        }
    }
}

/// `E[F(W_t) | F^Y_t]` for the second kind, given `g = g_t(Y)` and the
/// sign of `W` at `g`.
///
/// With `f(s, x) = E F(x + sqrt(t - s) N)` and
/// `h(s, x) = (2 / pi) int_0^{pi/2} f(s, x sqrt(s) cos theta) d theta`
/// (the arcsine weight after `r = s sin^2 theta`), the result is
/// `int_0^10 h(g, sign * kappa * y) y e^{-y^2/2} dy` with
/// `kappa = c.rayleigh_scale()`.
pub fn conditional_law_second_kind<F>(
    f: F,
    t: f64,
    g: f64,
    sign: f64,
    c: &MeanderConstant,
    quad: &QuadratureParams,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_times(t, g)?;
    if g == 0.0 {
        return Err(Error::InvalidArgument("g must be positive".into()));
    }
    let tau = t - g;
    let smooth = |x: f64| -> Result<f64> {
        if tau <= 0.0 {
            let v = f(x);
            return if v.is_finite() { Ok(v) } else { Err(Error::NonFinite(x)) };
        }
        // Panels sit on a fixed grid in u, so a jump of F falls at the same
        // place relative to the panels for every x.
        let w = 3.0 * tau.sqrt();
        let lo = (x / w).floor() as i64 - 3;
        let mut total = 0.0;
        for k in lo..lo + 7 {
            let (a, b) = (k as f64 * w, (k + 1) as f64 * w);
            total += integrate_adaptive(|u| f(u) * heat_kernel(tau, u - x), a, b, 1e-13)?;
        }
        Ok(total)
    };
    let kappa = sign * c.rayleigh_scale();
    let sg = g.sqrt();
    let mut failure = None;
    let inner = |x: f64, failure: &mut Option<Error>| -> f64 {
        let r = integrate_doubling(
            |theta| match smooth(x * sg * theta.cos()) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            PI / 2.0,
            quad,
        );
        match r {
            Ok((v, _)) => v * FRAC_2_PI,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let (v, _) = integrate_doubling(|y| inner(kappa * y, &mut failure) * y * (-y * y / 2.0).exp(), 0.0, 10.0, quad)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// A filter evaluated along a scenario.
#[derive(Clone, Debug)]
pub struct FilterSeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub g_values: Vec<f64>,
    /// `sgn(W_{g_t})`, second kind only.
    pub sign_state: Option<Vec<f64>>,
}

impl FilterSeries {
    /// CSV `t,g,value`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "g", "value"])?;
        for i in 0..self.values.len() {
            w.write_record([fmt_time(self.grid.time(i)), fmt_time(self.g_values[i]), self.values[i].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn first_kind_series(sc: &CoupledScenario) -> Result<FilterSeries> {
    require_first_kind(sc)?;
    let g_values = sc.last_zero_series();
    let values = g_values.iter().zip(sc.y.values()).map(|(&g, &y)| first_kind_value(g, y, sc.alpha)).collect();
    Ok(FilterSeries { grid: *sc.grid(), values, g_values, sign_state: None })
}

pub fn second_kind_series(sc: &CoupledScenario, c: &MeanderConstant) -> Result<FilterSeries> {
    sc.require_kind(&[ScenarioKind::SecondKind])?;
    let g_values = sc.last_zero_series();
    let values = g_values.iter().zip(&sc.sign_at_last_zero).map(|(&g, &s)| second_kind_value(g, s, c)).collect();
    Ok(FilterSeries { grid: *sc.grid(), values, g_values, sign_state: Some(sc.sign_at_last_zero.clone()) })
}

/// CSV `x,density` of the first-kind conditional density on `xs`.
pub fn write_density_csv<W: io::Write>(out: W, xs: &[f64], t: f64, y: f64, g: f64, alpha: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "density"])?;
    for &x in xs {
        w.write_record([x.to_string(), conditional_density_first_kind(t, x, y, g, alpha)?.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV `n,density_exact,paper_verbatim` for `n = 0..=n_max`.
pub fn write_moment_csv<W: io::Write>(out: W, n_max: u32, t: f64, g: f64, y: f64, alpha: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "density_exact", "paper_verbatim"])?;
    for n in 0..=n_max {
        let a = conditional_moment_first_kind(n, t, g, y, alpha, MomentMode::DensityExact)?;
        let b = conditional_moment_first_kind(n, t, g, y, alpha, MomentMode::PaperVerbatim)?;
        w.write_record([n.to_string(), a.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use crate::solvers::{solve_first_kind_exact, solve_second_kind};
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_abs_diff_eq!(normal_cdf(1.959964), 0.975, epsilon = 1e-6);
        assert!(normal_cdf(-8.0) < 1e-15);
        for i in 0..=160 {
            let x = -8.0 + 0.1 * i as f64;
            assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn normal_cdf_matches_quadrature() {
        let p = QuadratureParams { tolerance: 1e-14, ..Default::default() };
        for x in [-3.0, -1.0, 0.5, 2.0] {
            let (v, _) = integrate_doubling(|z| heat_kernel(1.0, z), -40.0, x, &p).unwrap();
            assert_abs_diff_eq!(normal_cdf(x), v, epsilon = 1e-12);
        }
    }

    #[test]
    fn meander_constants() {
        let p = MeanderConstant::paper_verbatim();
        assert_abs_diff_eq!(p.c_a(), PI / 2.0);
        assert_abs_diff_eq!(p.c_nu(), 1.0, epsilon = 1e-15);
        let o = MeanderConstant::default();
        assert_abs_diff_eq!(o.c_a(), (PI / 2.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(o.c_nu(), FRAC_2_PI.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(o.rayleigh_scale(), 1.0, epsilon = 1e-15);
        assert_eq!("paper".parse::<MeanderMode>().unwrap(), MeanderMode::PaperVerbatim);
    }

    #[test]
    fn azema_examples() {
        let g = TimeGrid::new(2.0, 2).unwrap();
        let w = SamplePath::new(g, vec![0.0, 0.0, 0.3]).unwrap();
        // t - gamma_t = 1
        assert_abs_diff_eq!(azema_classical(&w, 2.0, &MeanderConstant::default()).unwrap(), 1.2533141373155003);
        assert_abs_diff_eq!(azema_classical(&w, 2.0, &MeanderConstant::paper_verbatim()).unwrap(), PI / 2.0);
        assert_eq!(azema_classical(&w, 1.0, &MeanderConstant::default()).unwrap(), 0.0);
    }

    #[test]
    fn sign_posterior_examples() {
        assert_eq!(sign_posterior(0.0, 3.0), 0.0);
        assert_abs_diff_eq!(sign_posterior(2.0, 0.5), 0.76159, epsilon = 1e-5);
        assert_eq!(sign_posterior(1e6, 1.0), 1.0);
    }

    #[test]
    fn first_kind_value_examples() {
        assert_eq!(first_kind_value(0.3, 0.0, 1.0), 0.0);
        assert_abs_diff_eq!(first_kind_value(PI / 2.0, 0.4, 1.5), (0.6f64).tanh(), epsilon = 1e-15);
        assert_eq!(first_kind_value(0.3, 1.0, 0.0), 0.0);
    }

    #[test]
    fn filters_reject_wrong_kind() {
        let g = TimeGrid::with_step(1.0, 1e-2).unwrap();
        let first = solve_first_kind_exact(&g, Seed::new(1, 1), 1.0);
        let second = solve_second_kind(&g, Seed::new(1, 1), 0.5).unwrap();
        assert!(filter_first_kind(&second, 1.0).is_err());
        assert!(filter_second_kind(&first, 1.0, &MeanderConstant::default()).is_err());
        let v = filter_first_kind(&first, 1.0).unwrap();
        assert!(v.abs() <= (2.0 / PI).sqrt());
    }

    #[test]
    fn second_kind_filter_examples() {
        assert_eq!(second_kind_value(0.0, -1.0, &MeanderConstant::default()), 0.0);
        assert_abs_diff_eq!(second_kind_value(0.25, -1.0, &MeanderConstant::paper_verbatim()), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(second_kind_value(0.25, -1.0, &MeanderConstant::default()), -0.39894, epsilon = 1e-5);
    }

    #[test]
    fn density_reduces_to_heat_kernel_without_information() {
        for x in [-2.0, 0.0, 0.7] {
            assert_eq!(conditional_density_first_kind(1.5, x, 0.3, 0.6, 0.0).unwrap(), heat_kernel(1.5, x));
            assert_eq!(conditional_density_first_kind(1.5, x, 0.3, 0.0, 2.0).unwrap(), heat_kernel(1.5, x));
        }
        assert!(conditional_density_first_kind(1.0, 0.1, 0.3, 1.2, 1.0).is_err());
        assert!(conditional_density_first_kind(-1.0, 0.1, 0.3, 0.2, 1.0).is_err());
        // g = t: the sign of W_t is the sign of W_g
        let d = conditional_density_first_kind(1.0, 0.5, 100.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(d, 2.0 * heat_kernel(1.0, 0.5), epsilon = 1e-15);
        assert_eq!(conditional_density_first_kind(1.0, -0.5, 100.0, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn density_matches_printed_bracket() {
        let (t, g, y, a): (f64, f64, f64, f64) = (1.0, 0.4, 0.7, 1.3);
        let k = (g / (t * (t - g))).sqrt();
        for x in [-1.5, -0.2, 0.0, 0.9, 2.5] {
            let printed = heat_kernel(t, x)
                * (normal_cdf(k * x) * (a * y).exp() + normal_cdf(-k * x) * (-a * y).exp())
                / (a * y).cosh();
            assert_abs_diff_eq!(conditional_density_first_kind(t, x, y, g, a).unwrap(), printed, epsilon = 1e-14);
        }
    }

    #[test]
    fn density_normalization_and_first_moment() {
        let (t, g, y, a): (f64, f64, f64, f64) = (1.0, 0.4, 0.7, 1.3);
        let p = QuadratureParams::default();
        let lim = 10.0 * t.sqrt();
        let (m0, _) = integrate_doubling(|x| conditional_density_first_kind(t, x, y, g, a).unwrap(), -lim, lim, &p).unwrap();
        let (m1, _) = integrate_doubling(|x| x * conditional_density_first_kind(t, x, y, g, a).unwrap(), -lim, lim, &p).unwrap();
        let (m2, _) = integrate_doubling(|x| x * x * conditional_density_first_kind(t, x, y, g, a).unwrap(), -lim, lim, &p).unwrap();
        assert_abs_diff_eq!(m0, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m1, (0.8 / PI).sqrt() * 0.91f64.tanh(), epsilon = 1e-6);
        assert_abs_diff_eq!(m2, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn moments_by_mode() {
        let (t, g, y, a): (f64, f64, f64, f64) = (1.0, 0.4, 0.7, 1.3);
        let ex = |n| conditional_moment_first_kind(n, t, g, y, a, MomentMode::DensityExact).unwrap();
        let pv = |n| conditional_moment_first_kind(n, t, g, y, a, MomentMode::PaperVerbatim).unwrap();
        assert_abs_diff_eq!(ex(0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ex(1), (0.8 / PI).sqrt() * 0.91f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(pv(1), ex(1), epsilon = 1e-15);
        assert_abs_diff_eq!(ex(2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pv(2), 0.4 / PI.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(pv(0), 1.0 / PI.sqrt(), epsilon = 1e-15);
        assert!(conditional_moment_first_kind(13, t, g, y, a, MomentMode::DensityExact).is_err());
        assert!("bogus".parse::<MomentMode>().is_err());
    }

    #[test]
    fn moments_match_density_quadrature() {
        let (t, g, y, a) = (2.0, 0.5, -0.4, 0.9);
        let p = QuadratureParams { tolerance: 1e-10, ..Default::default() };
        for n in 0..=6 {
            let (q, _) = integrate_doubling(
                |x| x.powi(n as i32) * conditional_density_first_kind(t, x, y, g, a).unwrap(),
                -20.0,
                20.0,
                &p,
            )
            .unwrap();
            let m = conditional_moment_first_kind(n, t, g, y, a, MomentMode::DensityExact).unwrap();
            assert_abs_diff_eq!(q, m, epsilon = 1e-8 * m.abs().max(1.0));
        }
    }

    #[test]
    fn second_kind_law_mass_and_mean() {
        let q = QuadratureParams::default();
        for c in [MeanderConstant::default(), MeanderConstant::paper_verbatim()] {
            for (t, g, s) in [(1.0, 0.3, 1.0), (2.0, 2.0, -1.0)] {
                let one = conditional_law_second_kind(|_| 1.0, t, g, s, &c, &q).unwrap();
                assert_abs_diff_eq!(one, 1.0, epsilon = 1e-6);
                let mean = conditional_law_second_kind(|x| x, t, g, s, &c, &q).unwrap();
                assert_abs_diff_eq!(mean, second_kind_value(g, s, &c), epsilon = 1e-5);
            }
        }
        let up = conditional_law_second_kind(|x| if x > 0.0 { 1.0 } else { 0.0 }, 1.0, 1.0, 1.0, &MeanderConstant::default(), &q)
            .unwrap();
        assert!(up > 0.5);
        assert!(conditional_law_second_kind(|_| f64::NAN, 1.0, 0.5, 1.0, &MeanderConstant::default(), &q).is_err());
    }

    #[test]
    fn series_and_csv() {
        let g = TimeGrid::with_step(1.0, 1e-2).unwrap();
        let sc = solve_second_kind(&g, Seed::new(2, 3), 0.5).unwrap();
        let s = second_kind_series(&sc, &MeanderConstant::default()).unwrap();
        for i in 1..s.values.len() {
            if s.values[i] != s.values[i - 1] {
                assert!(sc.y_zeros().has_zero_in_step(i));
            }
        }
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,g,value\n0,0,"));
        let mut buf = Vec::new();
        write_moment_csv(&mut buf, 2, 1.0, 0.4, 0.7, 1.3).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,density_exact,paper_verbatim\n0,1,"));
        let mut buf = Vec::new();
        write_density_csv(&mut buf, &[0.0, 1.0], 1.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }
}
