//! Oracles for the first-kind model: sign posterior, innovations,
//! independence of `gamma_1`, weak uniqueness, transience, balayage.

use serde_json::json;

use super::{column, par_paths, McReport, P_THRESHOLD, Z_THRESHOLD};
use crate::error::{Error, Result};
use crate::filters::normal_cdf;
use crate::functionals::{balayage_residual, sgn, ZeroSet};
use crate::paths::TimeGrid;
use crate::rng::Seed;
use crate::solvers::{ScenarioKind, ScenarioSource};
use crate::stats::{chi_square_independence, correlation_z, ks_one_sample, ks_two_sample, quantile_table, Summary};

fn require_first_kind(source: &ScenarioSource) -> Result<()> {
    if source.kind.is_first_kind() {
        Ok(())
    } else {
        Err(Error::KindMismatch { expected: "first-euler or first-exact".into(), found: source.kind.to_string() })
    }
}

/// Minimum bin size for the binned posterior regression.
pub const MIN_BIN: usize = 500;

/// Bins paths by `Y_t` (equal width on `[-range, range]`) and compares the
/// bin mean of `sgn(W_{g_t})` with `tanh(alpha * midpoint)`.
pub fn test_sign_posterior(source: &ScenarioSource, t: f64, n_bins: usize, range: f64) -> Result<McReport> {
    require_first_kind(source)?;
    if n_bins < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 bins, got {n_bins}")));
    }
    let i = source.grid.index_of(t)?;
    let rows: Vec<[f64; 2]> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        [sc.y.values()[i], sc.sign_at_last_zero[i]]
    });
    let width = 2.0 * range / n_bins as f64;
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); n_bins];
    for r in &rows {
        let b = ((r[0] + range) / width).floor();
        if b >= 0.0 && (b as usize) < n_bins {
            bins[b as usize].push(r[1]);
        }
    }
    let mut table = Vec::new();
    let mut worst: f64 = 0.0;
    let mut qualifying = 0;
    let mut sparse = 0;
    for (b, v) in bins.iter().enumerate() {
        let mid = -range + (b as f64 + 0.5) * width;
        let target = (source.alpha * mid).tanh();
        if v.len() < MIN_BIN {
            sparse += 1;
            continue;
        }
        qualifying += 1;
        let s = Summary::of(v);
        let z = if s.stderr > 0.0 { (s.mean - target) / s.stderr } else { (s.mean - target) / (1.0 / (v.len() as f64).sqrt()) };
        worst = worst.max(z.abs());
        table.push(json!({"midpoint": mid, "n": v.len(), "mean": s.mean, "stderr": s.stderr, "target": target, "z": z}));
    }
    Ok(McReport::new("sign_posterior", source.seed(0), source.n_paths, source.grid.dt())
        .with_estimate(worst, 0.0)
        .with_statistic(worst)
        .with_pass(qualifying > 0 && worst < Z_THRESHOLD)
        .param("alpha", source.alpha)
        .param("t", t)
        .param("qualifying_bins", qualifying)
        .param("sparse_bins", sparse)
        .param("bins", table))
}

/// Innovation process `B^Y = Y - alpha int tanh(gain * alpha Y) ds`; `gain = 1`
/// is the true compensator.
///
/// Reports (a) the mean quadratic variation against `t`, after removing the
/// `alpha^2 dt^2 sum (1 - tanh^2)` bias of the grid; (b) KS normality of
/// `B^Y_t / sqrt t`; (c) orthogonality of `B^Y_t - B^Y_{t/2}` to functionals
/// of `Y` up to `t/2`.
pub fn test_innovation(source: &ScenarioSource, t: f64, gain: f64) -> Result<Vec<McReport>> {
    require_first_kind(source)?;
    let n = source.grid.index_of(t)?;
    let h = source.grid.index_floor(t / 2.0);
    let alpha = source.alpha;
    let dt = source.grid.dt();
    const K: usize = 8;
    let rows: Vec<[f64; K]> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        let y = sc.y.values();
        let mut by = 0.0;
        let mut by_half = 0.0;
        let mut qv = 0.0;
        let mut bias = 0.0;
        let mut max_abs: f64 = 0.0;
        for j in 0..n {
            if j == h {
                by_half = by;
            }
            let tau = (gain * alpha * y[j]).tanh();
            let d = y[j + 1] - y[j] - alpha * tau * dt;
            by += d;
            qv += d * d;
            let tt = (alpha * y[j]).tanh();
            bias += alpha * alpha * dt * dt * (1.0 - tt * tt);
            if j <= h {
                max_abs = max_abs.max(y[j].abs());
            }
        }
        if h == n {
            by_half = by;
        }
        let inc = by - by_half;
        let ys = y[h];
        let g = sc.y_zeros().last_at_or_before(source.grid.time(h));
        [qv - bias, by, inc, inc * ys, inc * ys * ys, inc * (alpha * ys).tanh(), inc * g, inc * max_abs]
    });
    let seed = source.seed(0);
    let label = if gain == 1.0 { "innovation".to_string() } else { format!("innovation_gain{gain}") };
    let mut out = Vec::new();
    let qv = Summary::of(&column(&rows, 0));
    out.push(
        McReport::new(format!("{label}/quadratic_variation"), seed, source.n_paths, dt)
            .z_test(&qv, t, Z_THRESHOLD)
            .param("alpha", alpha),
    );
    let scaled: Vec<f64> = column(&rows, 1).iter().map(|b| b / t.sqrt()).collect();
    let ks = ks_one_sample(&scaled, normal_cdf);
    out.push(
        McReport::new(format!("{label}/normality"), seed, source.n_paths, dt)
            .with_estimate(Summary::of(&scaled).mean, Summary::of(&scaled).stderr)
            .with_statistic(ks.statistic)
            .with_p_value(ks.p_value)
            .with_pass(ks.p_value > P_THRESHOLD)
            .param("alpha", alpha),
    );
    for (j, name) in [(2, "1"), (3, "Y_s"), (4, "Y_s^2"), (5, "tanh(alpha Y_s)"), (6, "g_s"), (7, "max|Y|_s")] {
        let s = Summary::of(&column(&rows, j));
        out.push(
            McReport::new(format!("{label}/orthogonality/{name}"), seed, source.n_paths, dt)
                .z_test(&s, 0.0, Z_THRESHOLD)
                .param("alpha", alpha)
                .param("s", source.grid.time(h)),
        );
    }
    Ok(out)
}

/// Chi-square (quartile bins) and correlation tests between `gamma_1(W)` and
/// functionals of `Y`, Bonferroni over the battery. Two reports follow: a
/// contrast `sgn(W_1) |Y_t|`, independent of `gamma_1` by the reflection
/// symmetry of `W`, which must pass at the same level; and a power twin
/// against `t - gamma_t(W)`, which passes when dependence is detected.
pub fn test_gamma_independence(source: &ScenarioSource, t: f64) -> Result<Vec<McReport>> {
    require_first_kind(source)?;
    if t <= 1.0 {
        return Err(Error::InvalidArgument(format!("t must exceed 1, got {t}")));
    }
    let grid = source.grid;
    let i1 = grid.index_of(1.0)?;
    let it = grid.index_of(t)?;
    let rows: Vec<[f64; 7]> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        let w = sc.w.values();
        let wz = ZeroSet::detect(&grid, w);
        let y = sc.y.values();
        let gamma1 = wz.last_at_or_before(1.0);
        let g_t = sc.y_zeros().last_at_or_before(t);
        let max_abs = y[..=it].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let w_age = t - wz.last_at_or_before(t);
        [gamma1, y[i1], y[it], g_t, max_abs, w_age, sgn(w[i1]) * y[it].abs()]
    });
    let gamma = column(&rows, 0);
    let battery = [(1, "Y_1"), (2, "Y_t"), (3, "g_t(Y)"), (4, "max|Y|")];
    let level = P_THRESHOLD / battery.len() as f64;
    let seed = source.seed(0);
    let mut out = Vec::new();
    for (j, name) in battery.into_iter().chain([(6, "contrast/sgn(W_1)*|Y_t|")]) {
        let col = column(&rows, j);
        let chi = chi_square_independence(&quantile_table(&gamma, &col, 4));
        let (r, z) = correlation_z(&gamma, &col);
        out.push(
            McReport::new(format!("gamma_independence/{name}"), seed, source.n_paths, grid.dt())
                .with_estimate(r, 1.0 / (source.n_paths as f64).sqrt())
                .with_statistic(chi.statistic)
                .with_p_value(chi.p_value)
                .with_pass(chi.p_value > level && z.abs() < Z_THRESHOLD)
                .param("alpha", source.alpha)
                .param("t", t)
                .param("dof", chi.dof)
                .param("level", level)
                .param("correlation_z", z),
        );
    }
    let col = column(&rows, 5);
    let chi = chi_square_independence(&quantile_table(&gamma, &col, 4));
    out.push(
        McReport::new("gamma_independence/power/t-gamma_t(W)", seed, source.n_paths, grid.dt())
            .with_estimate(correlation_z(&gamma, &col).0, 1.0 / (source.n_paths as f64).sqrt())
            .with_statistic(chi.statistic)
            .with_p_value(chi.p_value)
            .with_pass(chi.p_value < level)
            .param("role", "power twin: must detect dependence"),
    );
    Ok(out)
}

/// Two-sample KS between Euler and exact first-kind `Y` at each time, with
/// Bonferroni. The exact construction uses the root `root ^ EXACT_ROOT_SALT` so
/// the two samples are independent.
pub fn test_weak_uniqueness(grid: &TimeGrid, alpha: f64, root: u64, n_paths: usize, times: &[f64]) -> Result<Vec<McReport>> {
    let euler = ScenarioSource::new(ScenarioKind::FirstKindEuler, alpha, *grid, root, n_paths)?;
    let exact = ScenarioSource::new(ScenarioKind::FirstKindExact, alpha, *grid, root ^ EXACT_ROOT_SALT, n_paths)?;
    let idx: Vec<usize> = times.iter().map(|&t| grid.index_of(t)).collect::<Result<_>>()?;
    let pick = |src: &ScenarioSource| -> Vec<Vec<f64>> {
        par_paths(src.n_paths, |p| {
            let sc = src.scenario(p);
            idx.iter().map(|&i| sc.y.values()[i]).collect::<Vec<f64>>()
        })
    };
    let a = pick(&euler);
    let b = pick(&exact);
    let level = P_THRESHOLD / times.len() as f64;
    Ok(times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let xa: Vec<f64> = a.iter().map(|r| r[j]).collect();
            let xb: Vec<f64> = b.iter().map(|r| r[j]).collect();
            let ks = ks_two_sample(&xa, &xb);
            McReport::new(format!("weak_uniqueness/Y_{t}"), euler.seed(0), n_paths, grid.dt())
                .with_estimate(ks.statistic, 0.0)
                .with_statistic(ks.statistic)
                .with_p_value(ks.p_value)
                .with_pass(ks.p_value > level)
                .param("alpha", alpha)
                .param("level", level)
                .param("exact_root", root ^ EXACT_ROOT_SALT)
        })
        .collect())
}

pub const EXACT_ROOT_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// `P(no zero of Y in [t/2, t]) >= 0.95` and `P(Y_t > 0) = 1/2`.
pub fn test_transience(source: &ScenarioSource) -> Result<Vec<McReport>> {
    require_first_kind(source)?;
    let t = source.grid.t_max();
    let rows: Vec<[f64; 2]> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        let last = sc.y_zeros().last_at_or_before(t);
        [f64::from(u8::from(last < t / 2.0)), f64::from(u8::from(sc.y.terminal() > 0.0))]
    });
    let escape = Summary::of(&column(&rows, 0));
    let positive = Summary::of(&column(&rows, 1));
    let seed = source.seed(0);
    Ok(vec![
        McReport::new("transience/no_late_zero", seed, source.n_paths, source.grid.dt())
            .with_estimate(escape.mean, escape.stderr)
            .with_statistic(escape.mean)
            .with_pass(escape.mean >= 0.95)
            .param("alpha", source.alpha)
            .param("window", json!([t / 2.0, t]))
            .param("threshold", 0.95),
        McReport::new("transience/terminal_sign", seed, source.n_paths, source.grid.dt())
            .z_test(&positive, 0.5, 3.0)
            .param("alpha", source.alpha),
    ])
}

#[derive(Clone, Copy, Debug)]
pub struct BalayageParams {
    pub kind: ScenarioKind,
    pub alpha: f64,
    pub t: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub root: u64,
    /// Frozen bound on the mean residual at `dt`, in units of `sqrt(dt)`.
    pub bound: f64,
}

/// Calibrated once on first-kind scenarios (alpha = 1, dt = 1e-3) and frozen.
pub const BALAYAGE_BOUND: f64 = 1.5;

/// Mean of `|K_{g_t} Y_t - sum K_{g_{t_i}} dY_i|` with `K = sgn(W)` frozen at
/// the last zero, at `dt` and `dt / 4`.
pub fn test_balayage(p: &BalayageParams) -> Result<Vec<McReport>> {
    let run = |dt: f64, root: u64| -> Result<(Summary, Summary)> {
        let grid = TimeGrid::with_step(p.t, dt)?;
        let src = ScenarioSource::new(p.kind, p.alpha, grid, root, p.n_paths)?;
        let rows: Vec<[f64; 2]> = par_paths(p.n_paths, |i| {
            let sc = src.scenario(i);
            let y = sc.y.values();
            let ones = vec![1.0; y.len()];
            [balayage_residual(y, &sc.sign_at_last_zero), balayage_residual(y, &ones)]
        });
        Ok((Summary::of(&column(&rows, 0)), Summary::of(&column(&rows, 1))))
    };
    let (coarse, coarse_one) = run(p.dt, p.root)?;
    let (fine, _) = run(p.dt / 4.0, p.root.wrapping_add(1))?;
    let shrink = coarse.mean / fine.mean;
    let bound = p.bound * p.dt.sqrt();
    let seed = Seed::new(p.root, 0);
    Ok(vec![
        McReport::new("balayage/shrink", seed, p.n_paths, p.dt)
            .with_estimate(shrink, shrink * ((coarse.stderr / coarse.mean).powi(2) + (fine.stderr / fine.mean).powi(2)).sqrt())
            .with_statistic(shrink)
            .with_pass(shrink >= 1.6 && coarse.mean <= bound)
            .param("kind", p.kind.name())
            .param("alpha", p.alpha)
            .param("residual_dt", coarse.mean)
            .param("residual_dt_over_4", fine.mean)
            .param("bound", bound),
        McReport::new("balayage/constant_k", seed, p.n_paths, p.dt)
            .with_estimate(coarse_one.mean, coarse_one.stderr)
            .with_statistic(coarse_one.mean)
            .with_pass(coarse_one.mean < 1e-12),
    ])
}
