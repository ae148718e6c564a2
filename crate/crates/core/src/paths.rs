//! Seeded generation of the primitive processes on uniform time grids:
//! Brownian motion, Brownian motion with drift, and skew Brownian motion
//! (exact-in-law excursion flipping, plus an Euler cross-check).

use std::io;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{sgn_sym, ZeroSet};
use crate::rng::{lane_rng, Lane, Seed};

/// Relative slack when mapping a time onto a grid index.
const GRID_SNAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidGrid("n_steps must be at least 1".into()));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidGrid(format!("t_max must be positive and finite, got {t_max}")));
        }
        Ok(TimeGrid { t_max, n_steps })
    }

    /// Grid on `[0, t_max]` whose step is `dt` rounded to divide `t_max`.
    pub fn with_step(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be positive and finite, got {dt}")));
        }
        let n = (t_max / dt).round().max(1.0);
        TimeGrid::new(t_max, n as usize)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    /// Number of grid points, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.n_steps {
            self.t_max
        } else {
            self.t_max * i as f64 / self.n_steps as f64
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.time(i))
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 || t > self.t_max * (1.0 + GRID_SNAP) {
            return Err(Error::TimeOutOfRange { t, t_max: self.t_max });
        }
        Ok(())
    }

    /// Largest grid index `i` with `t_i <= t`.
    pub fn index_floor(&self, t: f64) -> usize {
        let x = t / self.dt();
        let snapped = (x + GRID_SNAP * x.abs().max(1.0)).floor();
        (snapped.max(0.0) as usize).min(self.n_steps)
    }

    /// Index of `t`, which must be a grid point.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        let i = self.index_floor(t);
        if (self.time(i) - t).abs() > GRID_SNAP * self.dt().max(t) {
            return Err(Error::InvalidArgument(format!("time {t} is not a grid point (dt = {})", self.dt())));
        }
        Ok(i)
    }
}

/// One real-valued trajectory on a [`TimeGrid`], starting at the origin.
///
/// Paths built by sign-flipping excursions of another path carry the zero set
/// of that construction, since a flip can hide a crossing between two grid
/// points that the values alone would no longer reveal.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePath {
    grid: TimeGrid,
    values: Vec<f64>,
    zeros: Option<ZeroSet>,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "path has {} values but the grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidArgument(format!("paths start at 0, got {}", values[0])));
        }
        Ok(SamplePath { grid, values, zeros: None })
    }

    pub(crate) fn from_parts(grid: TimeGrid, values: Vec<f64>, zeros: Option<ZeroSet>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        SamplePath { grid, values, zeros }
    }

    /// Attach a zero set known from the construction of this path.
    pub fn with_zero_set(mut self, zeros: ZeroSet) -> Self {
        self.zeros = Some(zeros);
        self
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn carried_zeros(&self) -> Option<&ZeroSet> {
        self.zeros.as_ref()
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.grid.index_of(t)?])
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.grid.n_steps()]
    }

    /// CSV with header `t,value`, shortest round-trip decimal formatting.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([fmt_time(self.grid.time(i)), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for row in r.records() {
            let row = row?;
            let parse = |k: usize| -> Result<f64> {
                row.get(k)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("malformed CSV row {:?}", row)))
            };
            times.push(parse(0)?);
            values.push(parse(1)?);
        }
        if times.len() < 2 {
            return Err(Error::InvalidGrid("a path CSV needs at least two rows".into()));
        }
        let grid = TimeGrid::new(*times.last().unwrap(), times.len() - 1)?;
        SamplePath::new(grid, values)
    }
}

/// Skewness parameter of a skew Brownian motion, `|alpha| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewParam(f64);

impl SkewParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.abs() <= 1.0) {
            return Err(Error::SkewOutOfRange(alpha));
        }
        Ok(SkewParam(alpha))
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    /// Probability that an excursion is positive, `(1 + alpha) / 2`.
    pub fn p_positive(self) -> f64 {
        0.5 * (1.0 + self.0)
    }
}

impl TryFrom<f64> for SkewParam {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        SkewParam::new(alpha)
    }
}

/// Time stamps are written rounded to 12 decimals so grid arithmetic noise
/// does not leak into files.
pub(crate) fn fmt_time(t: f64) -> String {
    ((t * 1e12).round() / 1e12).to_string()
}

pub(crate) fn brownian_values<R: Rng>(grid: &TimeGrid, rng: &mut R) -> Vec<f64> {
    let sd = grid.dt().sqrt();
    let mut values = Vec::with_capacity(grid.len());
    let mut x = 0.0;
    values.push(x);
    for _ in 0..grid.n_steps() {
        let z: f64 = rng.sample(StandardNormal);
        x += sd * z;
        values.push(x);
    }
    values
}

/// Multiply every discrete excursion of `base` by an independent sign that is
/// `+1` with probability `p_positive`. Returns the flipped values and the zero
/// set of `base`, which is the zero set of the result.
pub(crate) fn flip_excursions<R: Rng>(
    grid: &TimeGrid,
    base: &[f64],
    p_positive: f64,
    rng: &mut R,
) -> (Vec<f64>, ZeroSet) {
    let zeros = ZeroSet::detect(grid, base);
    let draw = |rng: &mut R| if rng.random::<f64>() < p_positive { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(base.len());
    out.push(0.0);
    let mut sign = 1.0;
    for i in 1..base.len() {
        let (prev, cur) = (base[i - 1], base[i]);
        if prev == 0.0 || prev * cur < 0.0 {
            sign = draw(rng);
        }
        out.push(if cur == 0.0 { 0.0 } else { sign * cur.abs() });
    }
    (out, zeros)
}

pub fn simulate_bm(grid: &TimeGrid, seed: Seed) -> SamplePath {
    let mut rng = lane_rng(seed, Lane::Increments);
    SamplePath::from_parts(*grid, brownian_values(grid, &mut rng), None)
}

/// Brownian motion with drift, `B_t + alpha t`.
pub fn simulate_bm_drift(grid: &TimeGrid, seed: Seed, alpha: f64) -> SamplePath {
    let mut path = simulate_bm(grid, seed);
    if alpha != 0.0 {
        for (i, v) in path.values.iter_mut().enumerate() {
            *v += alpha * grid.time(i);
        }
    }
    path
}

/// Skew Brownian motion by excursion flipping: the excursions of a Brownian
/// motion get independent signs, positive with probability `(1 + alpha) / 2`.
/// The returned path carries the zero set of the underlying Brownian motion.
pub fn simulate_skew_bm(grid: &TimeGrid, seed: Seed, alpha: f64) -> Result<SamplePath> {
    let skew = SkewParam::new(alpha)?;
    let mut inc = lane_rng(seed, Lane::Increments);
    let mut signs = lane_rng(seed, Lane::ExcursionSigns);
    let base = brownian_values(grid, &mut inc);
    let (values, zeros) = flip_excursions(grid, &base, skew.p_positive(), &mut signs);
    Ok(SamplePath::from_parts(*grid, values, Some(zeros)))
}

/// Euler scheme for `X = B + alpha L(X)`, used to cross-check
/// [`simulate_skew_bm`].
///
/// The local time increment is that of the discrete Tanaka local time in
/// Skorokhod form: with `beta = sum sgn(X_i) dB_i`, `|X|` is reflected
/// `beta` and `L_i = max_{j <= i} (-beta_j)^+`. An occupation-window push
/// `alpha * 1{|X| < eps} dt / (2 eps)` is not used because it converges to
/// a skew Brownian motion with parameter `tanh(alpha)` instead of `alpha`.
pub fn simulate_skew_bm_euler(grid: &TimeGrid, seed: Seed, alpha: f64) -> Result<SamplePath> {
    SkewParam::new(alpha)?;
    let mut rng = lane_rng(seed, Lane::Increments);
    let sd = grid.dt().sqrt();
    let mut values = Vec::with_capacity(grid.len());
    let (mut x, mut beta, mut lt) = (0.0_f64, 0.0_f64, 0.0_f64);
    values.push(x);
    for _ in 0..grid.n_steps() {
        let db = sd * rng.sample::<f64, _>(StandardNormal);
        beta += sgn_sym(x) * db;
        let lt_next = lt.max(-beta);
        x += db + alpha * (lt_next - lt);
        lt = lt_next;
        values.push(x);
    }
    Ok(SamplePath::from_parts(*grid, values, None))
}
