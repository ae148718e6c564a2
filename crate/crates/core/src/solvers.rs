//! Observation processes coupled with the signal `W`.
//!
//! Every constructor returns a [`CoupledScenario`] holding `W`, the driving
//! noise `B`, the observation `Y` (and the skew Brownian motion `X` for the
//! second kind), all on one grid from one [`Seed`]. `W` always comes from its
//! own lane so it is independent of everything that drives `Y`.
//!
//! `W` "at the last zero of `Y`" is read at the last grid index at or before
//! the interpolated zero. The zero at time `0` is read at index `1`, since
//! `W_0 = 0` carries no sign.

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{sgn, ZeroSet};
use crate::paths::{brownian_values, fmt_time, flip_excursions, SamplePath, SkewParam, TimeGrid};
use crate::rng::{lane_rng, Lane, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    FirstKindEuler,
    FirstKindExact,
    SecondKind,
    DriftlessZ,
}

impl ScenarioKind {
    pub fn is_first_kind(self) -> bool {
        matches!(self, ScenarioKind::FirstKindEuler | ScenarioKind::FirstKindExact)
    }

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::FirstKindEuler => "first-euler",
            ScenarioKind::FirstKindExact => "first-exact",
            ScenarioKind::SecondKind => "second",
            ScenarioKind::DriftlessZ => "z",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "first-euler" => ScenarioKind::FirstKindEuler,
            "first-exact" => ScenarioKind::FirstKindExact,
            "second" => ScenarioKind::SecondKind,
            "z" => ScenarioKind::DriftlessZ,
            other => return Err(Error::InvalidArgument(format!("unknown scenario kind `{other}`"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CoupledScenario {
    pub kind: ScenarioKind,
    pub alpha: f64,
    pub seed: Seed,
    pub w: SamplePath,
    pub b: SamplePath,
    pub y: SamplePath,
    /// Skew Brownian motion, second kind only.
    pub x: Option<SamplePath>,
    /// `sgn(W_{g_{t_i}(Y)})` per grid point.
    pub sign_at_last_zero: Vec<f64>,
    y_zeros: ZeroSet,
}

impl CoupledScenario {
    pub fn grid(&self) -> &TimeGrid {
        self.y.grid()
    }

    pub fn y_zeros(&self) -> &ZeroSet {
        &self.y_zeros
    }

    /// `g_{t_i}(Y)` for every grid point.
    pub fn last_zero_series(&self) -> Vec<f64> {
        self.y_zeros.last_zero_series(self.grid().len())
    }

    pub fn require_kind(&self, accepted: &[ScenarioKind]) -> Result<()> {
        if accepted.contains(&self.kind) {
            return Ok(());
        }
        let expected = accepted.iter().map(|k| k.name()).collect::<Vec<_>>().join(" or ");
        Err(Error::KindMismatch { expected, found: self.kind.to_string() })
    }

    /// Multi-column CSV `t,W,B,Y[,X],sign_state`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t", "W", "B", "Y"];
        if self.x.is_some() {
            header.push("X");
        }
        header.push("sign_state");
        w.write_record(&header)?;
        let grid = self.grid();
        for i in 0..grid.len() {
            let mut row = vec![
                fmt_time(grid.time(i)),
                self.w.values()[i].to_string(),
                self.b.values()[i].to_string(),
                self.y.values()[i].to_string(),
            ];
            if let Some(x) = &self.x {
                row.push(x.values()[i].to_string());
            }
            row.push((self.sign_at_last_zero[i] as i32).to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[inline]
pub(crate) fn signal_index(left: usize) -> usize {
    left.max(1)
}

fn signal(grid: &TimeGrid, seed: Seed) -> Vec<f64> {
    brownian_values(grid, &mut lane_rng(seed, Lane::Signal))
}

/// Sign of `W` at the last zero, per grid point.
fn sign_series(w: &[f64], zeros: &ZeroSet) -> Vec<f64> {
    zeros
        .last_position_series(w.len())
        .into_iter()
        .map(|k| sgn(w[signal_index(zeros.left_index(k))]))
        .collect()
}

/// Flip `base` by the sign of `W` at its last zero.
fn sign_by_signal(grid: &TimeGrid, w: &[f64], base: &[f64], zeros: &ZeroSet) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(base.len(), grid.len());
    let signs = sign_series(w, zeros);
    let values = base.iter().zip(&signs).map(|(b, s)| s * b).collect();
    (values, signs)
}

/// `B_t = int s dbase` with `s` the sign state on each step; on a step that
/// contains a zero the state after the zero is used.
fn driving_noise(base: &[f64], signs: &[f64], zeros: &ZeroSet) -> Vec<f64> {
    let mut out = Vec::with_capacity(base.len());
    let mut acc = 0.0;
    out.push(acc);
    for j in 0..base.len() - 1 {
        let s = if zeros.has_zero_in_step(j + 1) { signs[j + 1] } else { signs[j] };
        acc += s * (base[j + 1] - base[j]);
        out.push(acc);
    }
    out
}

/// Explicit Euler scheme for `Y = B + alpha * int sgn(W_{g_s(Y)}) ds`, with
/// the last zero of `Y` tracked online and the drift on step `i` using the
/// sign state at `t_i`.
pub fn solve_first_kind_euler(grid: &TimeGrid, seed: Seed, alpha: f64) -> CoupledScenario {
    let w = signal(grid, seed);
    let mut rng = lane_rng(seed, Lane::Increments);
    let dt = grid.dt();
    let sd = dt.sqrt();
    let n = grid.n_steps();
    let mut b = Vec::with_capacity(n + 1);
    let mut y = Vec::with_capacity(n + 1);
    let mut signs = Vec::with_capacity(n + 1);
    let (mut bv, mut yv) = (0.0_f64, 0.0_f64);
    let mut state = sgn(w[signal_index(0)]);
    b.push(bv);
    y.push(yv);
    signs.push(state);
    for i in 0..n {
        let db = sd * rng.sample::<f64, _>(StandardNormal);
        bv += db;
        let next = yv + db + alpha * state * dt;
        if yv * next < 0.0 {
            state = sgn(w[signal_index(i)]);
        } else if next == 0.0 {
            state = sgn(w[i + 1]);
        }
        yv = next;
        b.push(bv);
        y.push(yv);
        signs.push(state);
    }
    let y_zeros = ZeroSet::detect(grid, &y);
    CoupledScenario {
        kind: ScenarioKind::FirstKindEuler,
        alpha,
        seed,
        w: SamplePath::from_parts(*grid, w, None),
        b: SamplePath::from_parts(*grid, b, None),
        y: SamplePath::from_parts(*grid, y, None),
        x: None,
        sign_at_last_zero: signs,
        y_zeros,
    }
}

/// `Y = sgn(W_{g(B^alpha)}) B^alpha` with `B^alpha_t = B_t + alpha t`.
pub fn solve_first_kind_exact(grid: &TimeGrid, seed: Seed, alpha: f64) -> CoupledScenario {
    let w = signal(grid, seed);
    let base = brownian_values(grid, &mut lane_rng(seed, Lane::Increments));
    let drifted: Vec<f64> = base.iter().enumerate().map(|(i, v)| v + alpha * grid.time(i)).collect();
    let zeros = ZeroSet::detect(grid, &drifted);
    let (y, signs) = sign_by_signal(grid, &w, &drifted, &zeros);
    let b = driving_noise(&base, &signs, &zeros);
    CoupledScenario {
        kind: ScenarioKind::FirstKindExact,
        alpha,
        seed,
        w: SamplePath::from_parts(*grid, w, None),
        b: SamplePath::from_parts(*grid, b, None),
        y: SamplePath::from_parts(*grid, y, Some(zeros.clone())),
        x: None,
        sign_at_last_zero: signs,
        y_zeros: zeros,
    }
}

/// Strong solution of `Z = int sgn(W_{g_s(Z)}) dB_s`, i.e.
/// `Z = sgn(W_{g(B)}) B`. Stored in the `y` slot.
pub fn solve_driftless_z(grid: &TimeGrid, seed: Seed) -> CoupledScenario {
    let mut sc = solve_first_kind_exact(grid, seed, 0.0);
    sc.kind = ScenarioKind::DriftlessZ;
    sc
}

/// Second kind: `X` is a skew Brownian motion independent of `W` and
/// `Y = sgn(W_{g(X)}) X`.
///
/// `B` is the Brownian motion driving `Y`, `B = int sgn(Y) sgn(beta) d beta`
/// where `beta` is the Brownian motion whose excursions are flipped into `X`.
pub fn solve_second_kind(grid: &TimeGrid, seed: Seed, alpha: f64) -> Result<CoupledScenario> {
    let skew = SkewParam::new(alpha)?;
    let w = signal(grid, seed);
    let beta = brownian_values(grid, &mut lane_rng(seed, Lane::Increments));
    let (x, zeros) = flip_excursions(grid, &beta, skew.p_positive(), &mut lane_rng(seed, Lane::ExcursionSigns));
    let (y, signs) = sign_by_signal(grid, &w, &x, &zeros);
    let n = grid.n_steps();
    let mut b = Vec::with_capacity(n + 1);
    let mut bv = 0.0;
    b.push(bv);
    for j in 0..n {
        let at = if y[j] == 0.0 { j + 1 } else { j };
        let eps = sgn(y[at]) * sgn(beta[at]);
        bv += eps * (beta[j + 1] - beta[j]);
        b.push(bv);
    }
    Ok(CoupledScenario {
        kind: ScenarioKind::SecondKind,
        alpha,
        seed,
        w: SamplePath::from_parts(*grid, w, None),
        b: SamplePath::from_parts(*grid, b, None),
        y: SamplePath::from_parts(*grid, y, Some(zeros.clone())),
        x: Some(SamplePath::from_parts(*grid, x, Some(zeros.clone()))),
        sign_at_last_zero: signs,
        y_zeros: zeros,
    })
}

pub fn solve(kind: ScenarioKind, grid: &TimeGrid, seed: Seed, alpha: f64) -> Result<CoupledScenario> {
    Ok(match kind {
        ScenarioKind::FirstKindEuler => solve_first_kind_euler(grid, seed, alpha),
        ScenarioKind::FirstKindExact => solve_first_kind_exact(grid, seed, alpha),
        ScenarioKind::SecondKind => solve_second_kind(grid, seed, alpha)?,
        ScenarioKind::DriftlessZ => solve_driftless_z(grid, seed),
    })
}

/// A reproducible family of scenarios sharing kind, grid, alpha and root
/// seed; path `i` uses stream `i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSource {
    pub kind: ScenarioKind,
    pub alpha: f64,
    pub grid: TimeGrid,
    pub root: u64,
    pub n_paths: usize,
}

impl ScenarioSource {
    pub fn new(kind: ScenarioKind, alpha: f64, grid: TimeGrid, root: u64, n_paths: usize) -> Result<Self> {
        if kind == ScenarioKind::SecondKind {
            SkewParam::new(alpha)?;
        }
        Ok(ScenarioSource { kind, alpha, grid, root, n_paths })
    }

    pub fn seed(&self, i: usize) -> Seed {
        Seed::new(self.root, i as u64)
    }

    pub fn scenario(&self, i: usize) -> CoupledScenario {
        solve(self.kind, &self.grid, self.seed(i), self.alpha).expect("alpha validated at construction")
    }
}
