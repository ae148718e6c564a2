//! Calibration of the meander constant `c_A` in
//! `E[|W_t| | t - gamma_t = u] = c_A sqrt(u)`.

use std::f64::consts::FRAC_2_PI;

use super::{column, par_paths, McReport};
use crate::error::Result;
use crate::filters::MeanderConstant;
use crate::functionals::ZeroSet;
use crate::paths::{simulate_bm, TimeGrid};
use crate::rng::Seed;
use crate::solvers::{ScenarioKind, ScenarioSource};
use crate::stats::{NeumaierSum, Summary};

/// Outcome of the regression of `|W_t|` on `sqrt(t - gamma_t)`.
#[derive(Clone, Debug)]
pub struct Calibration {
    pub slope: f64,
    pub stderr: f64,
    /// `(slope - pi/2) / stderr`.
    pub z_printed: f64,
    /// `(slope - sqrt(pi/2)) / stderr`.
    pub z_rayleigh: f64,
    /// The candidate within 3 standard errors, if exactly one is.
    pub selected: Option<MeanderConstant>,
    pub reports: Vec<McReport>,
}

/// Through-origin least squares `|W| = b sqrt(u)`, with a heteroskedasticity
/// robust standard error.
fn through_origin(absw: &[f64], u: &[f64]) -> (f64, f64) {
    let suu: f64 = u.iter().copied().collect::<NeumaierSum>().value();
    let sxy: f64 = absw.iter().zip(u).map(|(a, u)| a * u.sqrt()).collect::<NeumaierSum>().value();
    let b = sxy / suu;
    let meat: f64 = absw.iter().zip(u).map(|(a, u)| u * (a - b * u.sqrt()).powi(2)).collect::<NeumaierSum>().value();
    (b, meat.sqrt() / suu)
}

pub fn calibrate_meander_constant(grid: &TimeGrid, root: u64, n_paths: usize, t: f64) -> Result<Calibration> {
    let i = grid.index_of(t)?;
    let rows: Vec<[f64; 2]> = par_paths(n_paths, |p| {
        let w = simulate_bm(grid, Seed::new(root, p as u64));
        let gamma = ZeroSet::detect(grid, w.values()).last_at_or_before(grid.time(i));
        [w.values()[i].abs(), (t - gamma).max(0.0)]
    });
    let absw = column(&rows, 0);
    let u = column(&rows, 1);
    let (slope, stderr) = through_origin(&absw, &u);
    let z_printed = (slope - MeanderConstant::PRINTED) / stderr;
    let z_rayleigh = (slope - MeanderConstant::RAYLEIGH) / stderr;
    let near_printed = z_printed.abs() < 3.0;
    let near_rayleigh = z_rayleigh.abs() < 3.0;
    let selected = match (near_printed, near_rayleigh) {
        (true, false) => Some(MeanderConstant::paper_verbatim()),
        (false, true) => Some(MeanderConstant::oracle_derived(MeanderConstant::RAYLEIGH)),
        _ => None,
    };
    let seed = Seed::new(root, 0);
    let main = McReport::new("calibrate/slope", seed, n_paths, grid.dt())
        .with_estimate(slope, stderr)
        .with_statistic(z_rayleigh.abs().min(z_printed.abs()))
        .with_pass(selected.is_some())
        .param("t", t)
        .param("candidate_printed", MeanderConstant::PRINTED)
        .param("candidate_rayleigh", MeanderConstant::RAYLEIGH)
        .param("z_printed", z_printed)
        .param("z_rayleigh", z_rayleigh)
        .param("selected", selected.map_or(serde_json::Value::Null, |c| c.c_a().into()));

    // Drop the bottom 1% of t - gamma_t.
    let mut sorted = u.clone();
    sorted.sort_by(f64::total_cmp);
    let cut = sorted[n_paths / 100];
    let (a2, u2): (Vec<f64>, Vec<f64>) = absw.iter().zip(&u).filter(|(_, &u)| u > cut).map(|(a, u)| (*a, *u)).unzip();
    let (trimmed, trimmed_se) = through_origin(&a2, &u2);
    let trim = McReport::new("calibrate/trimmed_slope", seed, a2.len(), grid.dt())
        .with_estimate(trimmed, trimmed_se)
        .with_statistic((trimmed - slope) / stderr)
        .with_pass((trimmed - slope).abs() < stderr)
        .param("cut", cut)
        .param("full_slope", slope);

    Ok(Calibration { slope, stderr, z_printed, z_rayleigh, selected, reports: vec![main, trim] })
}

/// Cross-check on second-kind scenarios: `E[sgn(W_{g_t}) W_t]` against
/// `slope * (2 / pi) * E[sqrt(g_t)]`, which is `E|W_{g_t}|` if the slope is
/// the meander constant.
pub fn meander_cross_check(source: &ScenarioSource, t: f64, slope: f64, slope_se: f64) -> Result<McReport> {
    let i = source.grid.index_of(t)?;
    source.scenario(0).require_kind(&[ScenarioKind::SecondKind])?;
    let rows: Vec<[f64; 2]> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        let g = sc.y_zeros().last_at_or_before(source.grid.time(i));
        [sc.sign_at_last_zero[i] * sc.w.values()[i], g.sqrt()]
    });
    let k = slope * FRAC_2_PI;
    let diff: Vec<f64> = rows.iter().map(|r| r[0] - k * r[1]).collect();
    let s = Summary::of(&diff);
    let mean_sqrt_g = Summary::of(&column(&rows, 1)).mean;
    let se = (s.stderr.powi(2) + (slope_se * FRAC_2_PI * mean_sqrt_g).powi(2)).sqrt();
    let z = s.mean / se;
    Ok(McReport::new("calibrate/second_kind_cross_check", source.seed(0), source.n_paths, source.grid.dt())
        .with_estimate(s.mean, se)
        .with_statistic(z)
        .with_p_value(crate::stats::two_sided_p(z))
        .with_pass(z.abs() < 3.0)
        .param("alpha", source.alpha)
        .param("mean_sqrt_g", mean_sqrt_g)
        .param("slope", slope)
        .param("z_threshold", 3.0))
}
