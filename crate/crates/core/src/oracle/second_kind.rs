//! Oracles for the second-kind model: local-time relation, structure of the
//! filter, and recovery of excursion signs from `Y` alone.

use serde::{Deserialize, Serialize};

use super::{par_paths, McReport};
use crate::error::{Error, Result};
use crate::filters::{second_kind_series, MeanderConstant};
use crate::functionals::sgn;
use crate::solvers::{signal_index, CoupledScenario, ScenarioKind, ScenarioSource};
use crate::stats::{NeumaierSum, Summary};

fn require_second_kind(source: &ScenarioSource) -> Result<()> {
    if source.kind == ScenarioKind::SecondKind {
        Ok(())
    } else {
        Err(Error::KindMismatch { expected: "second".into(), found: source.kind.to_string() })
    }
}

/// Ratio estimator `sum a / sum b` with a stderr clustered by path.
fn ratio(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len() as f64;
    let sa: f64 = a.iter().copied().collect::<NeumaierSum>().value();
    let sb: f64 = b.iter().copied().collect::<NeumaierSum>().value();
    let r = sa / sb;
    let resid: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - r * y).collect();
    let s = Summary::of(&resid);
    (r, s.sd * n.sqrt() / sb)
}

/// Compares the Stieltjes sum `sum (1 + alpha sgn W_i) dL_i` of the symmetric
/// occupation estimator with the right occupation estimator `ell_t`, both with
/// `eps = sqrt(dt)`. Pass iff the relative error of the path averages is
/// below `tolerance`.
pub fn test_local_time_relation(source: &ScenarioSource, t: f64, tolerance: f64) -> Result<McReport> {
    require_second_kind(source)?;
    let n = source.grid.index_of(t)?;
    let dt = source.grid.dt();
    let eps = dt.sqrt();
    let alpha = source.alpha;
    let rows: Vec<[f64; 2]> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        let (y, w) = (sc.y.values(), sc.w.values());
        let (mut stieltjes, mut right) = (0.0, 0.0);
        for j in 0..n {
            if y[j].abs() < eps {
                stieltjes += (1.0 + alpha * sgn(w[signal_index(j)])) * dt / (2.0 * eps);
                if y[j] >= 0.0 {
                    right += dt / eps;
                }
            }
        }
        [stieltjes, right]
    });
    let st: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let rt: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let (r, se) = ratio(&st, &rt);
    let rel = (r - 1.0).abs();
    let per_path: Vec<f64> = rows.iter().filter(|r| r[1] > 0.0).map(|r| (r[0] - r[1]).abs() / r[1]).collect();
    Ok(McReport::new("local_time_relation", source.seed(0), source.n_paths, dt)
        .with_estimate(rel, se)
        .with_statistic(rel)
        .with_pass(rel < tolerance)
        .param("alpha", alpha)
        .param("t", t)
        .param("tolerance", tolerance)
        .param("mean_stieltjes", Summary::of(&st).mean)
        .param("mean_right", Summary::of(&rt).mean)
        .param("per_path_mean_relative_error", Summary::of(&per_path).mean))
}

/// Counts grid steps where the second-kind filter series changes without a
/// zero of `Y` in the step. Pass iff there are none.
pub fn test_piecewise_constancy(source: &ScenarioSource, c: &MeanderConstant) -> Result<McReport> {
    require_second_kind(source)?;
    let rows: Vec<[f64; 2]> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        let s = second_kind_series(&sc, c).expect("kind checked");
        let z = sc.y_zeros();
        let mut bad = 0usize;
        let mut changes = 0usize;
        for i in 1..s.values.len() {
            if s.values[i] != s.values[i - 1] {
                changes += 1;
                if !z.has_zero_in_step(i) {
                    bad += 1;
                }
            }
        }
        [bad as f64, changes as f64]
    });
    let bad: f64 = rows.iter().map(|r| r[0]).sum();
    let changes: f64 = rows.iter().map(|r| r[1]).sum();
    Ok(McReport::new("piecewise_constancy", source.seed(0), source.n_paths, source.grid.dt())
        .with_estimate(bad, 0.0)
        .with_statistic(bad)
        .with_pass(bad == 0.0)
        .param("alpha", source.alpha)
        .param("changes", changes))
}

/// Sign of `W` revealed at zero `k` of `Y`.
fn revealed_sign(sc: &CoupledScenario, k: usize) -> f64 {
    sgn(sc.w.values()[signal_index(sc.y_zeros().left_index(k))])
}

/// Fraction of completed excursions of `Y` whose end flips the revealed sign.
///
/// Diagnostics in `params`: the mean of `(1 - sqrt(g/d)) / 2`, the flip rate
/// that makes `sgn(W_g) sqrt(g)` a martingale, and of `arccos(sqrt(g/d)) / pi`,
/// the probability that a Brownian motion has opposite signs at `g` and `d`.
pub fn test_jump_fairness(source: &ScenarioSource) -> Result<McReport> {
    require_second_kind(source)?;
    let rows: Vec<[f64; 4]> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        let z = sc.y_zeros().times();
        let (mut flips, mut count, mut mart, mut arc) = (0.0, 0.0, 0.0, 0.0);
        // Excursion (z[k-1], z[k]) for k >= 2; the one from time 0 has no
        // revealed sign before it.
        for k in 2..z.len() {
            let (g, d) = (z[k - 1], z[k]);
            count += 1.0;
            if revealed_sign(&sc, k) != revealed_sign(&sc, k - 1) {
                flips += 1.0;
            }
            let r = (g / d).sqrt();
            mart += (1.0 - r) / 2.0;
            arc += r.acos() / std::f64::consts::PI;
        }
        [flips, count, mart, arc]
    });
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let (flips, count) = (col(0), col(1));
    let (rate, se) = ratio(&flips, &count);
    let total: f64 = count.iter().sum();
    let (mart, _) = ratio(&col(2), &count);
    let (arc, _) = ratio(&col(3), &count);
    let z = (rate - 0.5) / se;
    Ok(McReport::new("jump_fairness", source.seed(0), source.n_paths, source.grid.dt())
        .with_estimate(rate, se)
        .with_statistic(z)
        .with_p_value(crate::stats::two_sided_p(z))
        .with_pass(z.abs() < 3.0 && total >= 1e5)
        .param("alpha", source.alpha)
        .param("excursions", total)
        .param("target", 0.5)
        .param("martingale_prediction", mart)
        .param("arccos_prediction", arc))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignRecoveryParams {
    /// Minimum excursion length.
    pub delta: f64,
    /// Number of excursions of `Y` read, ending with the current one.
    pub window: usize,
}

impl Default for SignRecoveryParams {
    fn default() -> Self {
        SignRecoveryParams { delta: 0.01, window: 5 }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SignRecovery {
    /// `(excursion start, estimated sign, true sign)`.
    pub estimates: Vec<(f64, f64, f64)>,
    /// Long excursions starting at time 0, whose sign is not revealed.
    pub skipped: usize,
}

impl SignRecovery {
    pub fn correct(&self) -> usize {
        self.estimates.iter().filter(|e| e.1 == e.2).count()
    }
}

/// Estimates the sign of `W` revealed at the start of each excursion of `Y`
/// of length at least `delta`, reading only `Y` up to a time inside that
/// excursion.
///
/// The ratio of right to symmetric local time over the last `window`
/// excursions, the current one included, is estimated by excursion counts,
/// `2 #{positive} / #{all}`, and approximates `1 + alpha sgn(W)`; the sign
/// is `sgn((ratio - 1) / alpha)`. Counting excursions rather than near-zero
/// grid points keeps the samples independent: points of one excursion all
/// share its sign.
pub fn recover_signs_from_y(sc: &CoupledScenario, params: &SignRecoveryParams) -> Result<SignRecovery> {
    sc.require_kind(&[ScenarioKind::SecondKind])?;
    if sc.alpha == 0.0 {
        return Err(Error::Unidentifiable);
    }
    if params.window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let y = sc.y.values();
    let t_max = sc.grid().t_max();
    let zeros = sc.y_zeros();
    let z = zeros.times();
    let mut out = SignRecovery::default();
    for k in 0..z.len() {
        let end = z.get(k + 1).copied().unwrap_or(t_max);
        if end - z[k] < params.delta {
            continue;
        }
        // Excursion j starts at zero j; its first grid point is left_index(j) + 1.
        let first = (k + 1).saturating_sub(params.window);
        if k == 0 {
            out.skipped += 1;
            continue;
        }
        let signs: Vec<f64> = (first..=k).filter_map(|j| y.get(zeros.left_index(j) + 1).map(|&v| sgn(v))).collect();
        let positive = signs.iter().filter(|&&s| s > 0.0).count();
        let ratio = 2.0 * positive as f64 / signs.len() as f64;
        let estimate = sgn((ratio - 1.0) / sc.alpha);
        out.estimates.push((z[k], estimate, revealed_sign(sc, k)));
    }
    Ok(out)
}

/// Accuracy of [`recover_signs_from_y`] over a family of scenarios; pass iff
/// accuracy `>= threshold`.
pub fn test_sign_recovery(source: &ScenarioSource, params: &SignRecoveryParams, threshold: f64) -> Result<McReport> {
    require_second_kind(source)?;
    if source.alpha == 0.0 {
        return Err(Error::Unidentifiable);
    }
    let rows: Vec<[f64; 3]> = par_paths(source.n_paths, |p| {
        let r = recover_signs_from_y(&source.scenario(p), params).expect("checked");
        [r.correct() as f64, r.estimates.len() as f64, r.skipped as f64]
    });
    let c: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let n: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let (acc, se) = ratio(&c, &n);
    let total: f64 = n.iter().sum();
    let skipped: f64 = rows.iter().map(|r| r[2]).sum();
    Ok(McReport::new(format!("sign_recovery/dt={}", source.grid.dt()), source.seed(0), source.n_paths, source.grid.dt())
        .with_estimate(acc, se)
        .with_statistic(acc)
        .with_pass(acc >= threshold)
        .param("alpha", source.alpha)
        .param("delta", params.delta)
        .param("window", params.window)
        .param("excursions", total)
        .param("skipped", skipped)
        .param("threshold", threshold))
}
