//! Pathwise functionals: the sign convention, discrete zero sets, last and
//! next zeroes, excursion decomposition and local time estimators.
//!
//! A discrete zero is either a grid point where the path is exactly `0` or a
//! sign change between adjacent grid points, located by linear interpolation.

use std::io;

use rand::Rng;

use crate::error::{Error, Result};
use crate::paths::{fmt_time, SamplePath, TimeGrid};

/// `1` for `x > 0`, `-1` for `x <= 0`.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Symmetric sign, `sgn_sym(0) = 0`. Used by Tanaka-type sums.
#[inline]
pub fn sgn_sym(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Ordered zero times of a path. Time `0` is always the first element.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSet {
    times: Vec<f64>,
    /// Last grid index `<=` the zero time.
    left: Vec<usize>,
    /// First grid index `>=` the zero time.
    visible: Vec<usize>,
}

impl ZeroSet {
    /// Detect the zero set of grid values.
    pub fn detect(grid: &TimeGrid, values: &[f64]) -> ZeroSet {
        let n = values.len();
        let dt = grid.dt();
        let mut zs = ZeroSet { times: Vec::new(), left: Vec::new(), visible: Vec::new() };
        zs.push(0.0, 0, 0);
        for i in 1..n {
            let (a, b) = (values[i - 1], values[i]);
            if a * b < 0.0 {
                let frac = a.abs() / (a.abs() + b.abs());
                let t = grid.time(i - 1) + dt * frac;
                zs.push(t, i - 1, i);
            } else if b == 0.0 {
                zs.push(grid.time(i), i, i);
            }
        }
        zs
    }

    /// Zero set of a path: the carried one if the path has one, else detected.
    pub fn of(path: &SamplePath) -> ZeroSet {
        match path.carried_zeros() {
            Some(z) => z.clone(),
            None => ZeroSet::detect(path.grid(), path.values()),
        }
    }

    fn push(&mut self, t: f64, left: usize, visible: usize) {
        // Interpolated crossings can round onto the previous zero.
        if let Some(&last) = self.times.last() {
            if t <= last {
                return;
            }
        }
        self.times.push(t);
        self.left.push(left);
        self.visible.push(visible);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Last grid index at or before the `k`-th zero.
    pub fn left_index(&self, k: usize) -> usize {
        self.left[k]
    }

    /// Position of the last zero `<= t`.
    pub fn last_position(&self, t: f64) -> usize {
        let tol = 1e-12 * t.abs().max(1.0);
        self.times.partition_point(|&z| z <= t + tol).saturating_sub(1)
    }

    pub fn last_at_or_before(&self, t: f64) -> f64 {
        self.times[self.last_position(t)]
    }

    pub fn next_after(&self, t: f64) -> Option<f64> {
        let tol = 1e-12 * t.abs().max(1.0);
        let k = self.times.partition_point(|&z| z <= t + tol);
        self.times.get(k).copied()
    }

    /// For every grid index `i`, the position of the last zero `<= t_i`.
    pub fn last_position_series(&self, n_points: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n_points);
        let mut k = 0;
        for i in 0..n_points {
            while k + 1 < self.times.len() && self.visible[k + 1] <= i {
                k += 1;
            }
            out.push(k);
        }
        out
    }

    /// `g_{t_i}` for every grid index.
    pub fn last_zero_series(&self, n_points: usize) -> Vec<f64> {
        self.last_position_series(n_points).into_iter().map(|k| self.times[k]).collect()
    }

    /// True if some zero lies in `(t_{i-1}, t_i]`.
    pub fn has_zero_in_step(&self, i: usize) -> bool {
        i > 0 && self.visible.binary_search(&i).is_ok()
    }
}

pub fn zero_set(path: &SamplePath) -> ZeroSet {
    ZeroSet::of(path)
}

/// Last zero of the path at or before `t` (`gamma_t` for `W`, `g_t` for `Y`).
pub fn last_zero(path: &SamplePath, t: f64) -> Result<f64> {
    path.grid().check_time(t)?;
    Ok(ZeroSet::of(path).last_at_or_before(t))
}

/// Last zero at or before grid time `t` of a Brownian path through the grid
/// values. Steps after the discrete last zero are checked for a zero of the
/// Brownian bridge between their endpoints `a`, `b`, which happens with
/// probability `exp(-2 |a| |b| / dt)`; a hit is placed uniformly in the step.
/// Removes the `O(sqrt dt)` lag of [`last_zero`] caused by crossings that
/// return within one step.
pub fn last_zero_bridge<R: Rng + ?Sized>(path: &SamplePath, t: f64, rng: &mut R) -> Result<f64> {
    let grid = path.grid();
    let n = grid.index_of(t)?;
    let g0 = ZeroSet::of(path).last_at_or_before(t);
    let v = path.values();
    let dt = grid.dt();
    for i in (1..=n).rev() {
        let start = grid.time(i - 1);
        if start < g0 {
            break;
        }
        let p = (-2.0 * v[i - 1].abs() * v[i].abs() / dt).exp();
        if rng.random::<f64>() < p {
            return Ok(start + rng.random::<f64>() * dt);
        }
    }
    Ok(g0)
}

/// First zero strictly after `t`, `None` if there is none within the horizon.
pub fn next_zero(path: &SamplePath, t: f64) -> Result<Option<f64>> {
    path.grid().check_time(t)?;
    Ok(ZeroSet::of(path).next_after(t))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Excursion {
    pub start: f64,
    pub end: f64,
    pub sign: f64,
    /// `false` for a final excursion cut off at `t_max`.
    pub complete: bool,
}

impl Excursion {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExcursionDecomposition {
    pub intervals: Vec<Excursion>,
}

impl ExcursionDecomposition {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn completed(&self) -> impl Iterator<Item = &Excursion> {
        self.intervals.iter().filter(|e| e.complete)
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["start", "end", "sign"])?;
        for e in &self.intervals {
            w.write_record([fmt_time(e.start), fmt_time(e.end), (e.sign as i32).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn excursions(path: &SamplePath) -> ExcursionDecomposition {
    excursions_with(path, &ZeroSet::of(path))
}

/// Excursions of `path` between consecutive elements of `zeros`.
pub fn excursions_with(path: &SamplePath, zeros: &ZeroSet) -> ExcursionDecomposition {
    let grid = path.grid();
    let v = path.values();
    let n = grid.n_steps();
    let mut intervals = Vec::new();
    // First interior grid index after zero k, and the bound on interior indices before zero k+1.
    let interior_sign = |from: usize, to_incl: usize| -> Option<f64> {
        (from..=to_incl).map(|i| v[i]).find(|&x| x != 0.0).map(sgn)
    };
    for k in 0..zeros.len() {
        let from = zeros.left[k] + 1;
        let (end, to_incl, complete) = match zeros.times.get(k + 1) {
            Some(&next) => {
                let last_inside = if zeros.left[k + 1] == zeros.visible[k + 1] {
                    // exact grid zero
                    zeros.left[k + 1].wrapping_sub(1)
                } else {
                    zeros.left[k + 1]
                };
                (next, last_inside, true)
            }
            None => (grid.t_max(), n, false),
        };
        if to_incl == usize::MAX || from > to_incl {
            continue;
        }
        if let Some(sign) = interior_sign(from, to_incl) {
            intervals.push(Excursion { start: zeros.times[k], end, sign, complete });
        }
    }
    ExcursionDecomposition { intervals }
}

/// Cumulative local time estimates at every grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTimeSeries {
    pub grid: TimeGrid,
    /// Symmetric local time `L`.
    pub symmetric: Vec<f64>,
    /// Right local time `ell`.
    pub right: Vec<f64>,
    /// Window half-width for occupation estimators; `None` for Tanaka sums.
    pub epsilon: Option<f64>,
}

impl LocalTimeSeries {
    pub fn symmetric_at(&self, t: f64) -> Result<f64> {
        Ok(self.symmetric[self.grid.index_of(t)?])
    }

    pub fn right_at(&self, t: f64) -> Result<f64> {
        Ok(self.right[self.grid.index_of(t)?])
    }
}

/// Occupation-time estimators with window `epsilon`:
/// `L_t = (1/2eps) sum_{t_i < t} 1{|x_i| < eps} dt` and
/// `ell_t = (1/eps) sum_{t_i < t} 1{0 <= x_i < eps} dt`.
pub fn local_time(path: &SamplePath, epsilon: f64) -> Result<LocalTimeSeries> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("local time window must be positive, got {epsilon}")));
    }
    let grid = *path.grid();
    let dt = grid.dt();
    let (ws, wr) = (dt / (2.0 * epsilon), dt / epsilon);
    let v = path.values();
    let mut symmetric = Vec::with_capacity(v.len());
    let mut right = Vec::with_capacity(v.len());
    let (mut ls, mut lr) = (0.0, 0.0);
    symmetric.push(0.0);
    right.push(0.0);
    for &x in &v[..v.len() - 1] {
        if x.abs() < epsilon {
            ls += ws;
            if x >= 0.0 {
                lr += wr;
            }
        }
        symmetric.push(ls);
        right.push(lr);
    }
    Ok(LocalTimeSeries { grid, symmetric, right, epsilon: Some(epsilon) })
}

/// [`local_time`] with the default window `sqrt(dt)`.
pub fn local_time_default(path: &SamplePath) -> LocalTimeSeries {
    local_time(path, path.grid().dt().sqrt()).expect("sqrt(dt) is a valid window")
}

/// Discrete Tanaka residuals: `L_t = |x_t| - sum sgn_sym(x_i) dx_i` and
/// `ell_t = 2 (x_t^+ - sum 1{x_i > 0} dx_i)`.
pub fn local_time_tanaka(path: &SamplePath) -> LocalTimeSeries {
    let grid = *path.grid();
    let v = path.values();
    let mut symmetric = Vec::with_capacity(v.len());
    let mut right = Vec::with_capacity(v.len());
    let (mut ls, mut lr) = (0.0_f64, 0.0_f64);
    symmetric.push(0.0);
    right.push(0.0);
    for w in v.windows(2) {
        let (a, b) = (w[0], w[1]);
        // Per-step increments are nonnegative by construction.
        ls += b.abs() - a.abs() - sgn_sym(a) * (b - a);
        lr += 2.0 * (b.max(0.0) - a.max(0.0) - if a > 0.0 { b - a } else { 0.0 });
        symmetric.push(ls);
        right.push(lr);
    }
    LocalTimeSeries { grid, symmetric, right, epsilon: None }
}

/// `|k_n y_n - sum_{i<n} k_i (y_{i+1} - y_i)|`, the discrete residual of the
/// balayage identity for a process `k` frozen at the last zero of `y`.
pub fn balayage_residual(y: &[f64], k: &[f64]) -> f64 {
    assert_eq!(y.len(), k.len());
    let n = y.len() - 1;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 0..n {
        let term = k[i] * (y[i + 1] - y[i]);
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    (k[n] * y[n] - (sum + comp)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(dt: f64, v: &[f64]) -> SamplePath {
        let g = TimeGrid::new(dt * (v.len() - 1) as f64, v.len() - 1).unwrap();
        SamplePath::new(g, v.to_vec()).unwrap()
    }

    #[test]
    fn sign_convention() {
        assert_eq!(sgn(0.0), -1.0);
        assert_eq!(sgn(3.2), 1.0);
        assert_eq!(sgn(-1e-300), -1.0);
        assert_eq!(sgn(-0.0), -1.0);
        assert_eq!(sgn_sym(0.0), 0.0);
    }

    #[test]
    fn last_zero_interpolates() {
        let p = path(0.1, &[0.0, 0.5, -0.3, 0.2]);
        assert!((last_zero(&p, 0.3).unwrap() - 0.26).abs() < 1e-12);
        assert!((last_zero(&p, 0.2).unwrap() - 0.1625).abs() < 1e-12);
        assert_eq!(last_zero(&p, 0.1).unwrap(), 0.0);
        assert!(last_zero(&p, 0.31).is_err());
    }

    #[test]
    fn positive_path_has_only_the_origin() {
        let p = path(0.1, &[0.0, 0.5, 1.0, 0.7, 2.0]);
        assert_eq!(last_zero(&p, 0.4).unwrap(), 0.0);
        assert_eq!(next_zero(&p, 0.05).unwrap(), None);
    }

    #[test]
    fn exact_grid_zero() {
        let p = path(0.1, &[0.0, 0.5, 0.2, 0.1, 0.0, 0.3]);
        assert!((last_zero(&p, 0.4).unwrap() - 0.4).abs() < 1e-12);
        assert!((next_zero(&p, 0.25).unwrap().unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn bridge_last_zero_refines_after_discrete_zero() {
        use rand::SeedableRng;
        let p = path(0.1, &[0.0, 0.5, -0.3, 0.01, 0.02]);
        let g0 = last_zero(&p, 0.4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut later = 0;
        for _ in 0..2000 {
            let g = last_zero_bridge(&p, 0.4, &mut rng).unwrap();
            assert!(g >= g0 && g <= 0.4);
            if g > 0.3 {
                later += 1;
            }
        }
        let q = (-2.0f64 * 0.01 * 0.02 / 0.1).exp();
        assert!((later as f64 / 2000.0 - q).abs() < 0.03);
        // A step starting at a zero always contains a later zero.
        let far = path(0.1, &[0.0, 5.0, 6.0]);
        let g = last_zero_bridge(&far, 0.2, &mut rng).unwrap();
        assert!(g > 0.0 && g < 0.1);
    }

    #[test]
    fn next_zero_interpolates() {
        let p = path(0.1, &[0.0, 0.5, -0.3]);
        assert!((next_zero(&p, 0.0).unwrap().unwrap() - 0.1625).abs() < 1e-12);
    }

    #[test]
    fn excursion_examples() {
        let e = excursions(&path(0.1, &[0.0, 1.0, 2.0, 1.0, 0.0]));
        assert_eq!(e.len(), 1);
        let x = e.intervals[0];
        assert_eq!((x.start, x.sign, x.complete), (0.0, 1.0, true));
        assert!((x.end - 0.4).abs() < 1e-12);

        let e = excursions(&path(0.1, &[0.0, -1.0, 1.0]));
        assert_eq!(e.len(), 2);
        assert_eq!(e.intervals[0].sign, -1.0);
        assert_eq!(e.intervals[1].sign, 1.0);
        assert!((e.intervals[0].end - 0.15).abs() < 1e-12);
        assert!((e.intervals[1].start - 0.15).abs() < 1e-12);
        assert!(!e.intervals[1].complete);

        assert!(excursions(&path(0.1, &[0.0, 0.0, 0.0, 0.0])).is_empty());
    }

    #[test]
    fn excursion_csv() {
        let e = excursions(&path(0.1, &[0.0, -1.0, 1.0]));
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "start,end,sign\n0,0.15,-1\n0.15,0.2,1\n");
    }

    #[test]
    fn series_track_last_zero() {
        let p = path(0.1, &[0.0, 0.5, -0.3, 0.2, 0.0, 1.0]);
        let z = ZeroSet::of(&p);
        let g = z.last_zero_series(p.values().len());
        let expect = [0.0, 0.0, 0.1625, 0.26, 0.4, 0.4];
        for (a, b) in g.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{g:?}");
        }
        assert!(z.has_zero_in_step(2) && z.has_zero_in_step(4) && !z.has_zero_in_step(5));
    }

    #[test]
    fn occupation_local_time_counts_the_window() {
        let p = path(0.01, &[0.0, 0.05, 0.5, 0.6, 0.7]);
        let lt = local_time(&p, 0.1).unwrap();
        // two points inside the window, each worth dt / (2 eps) = 0.05
        for (a, b) in lt.symmetric.iter().zip([0.0, 0.05, 0.1, 0.1, 0.1]) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in lt.right.iter().zip([0.0, 0.1, 0.2, 0.2, 0.2]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(local_time(&p, 0.0).is_err());
        assert!(local_time(&p, -1.0).is_err());
    }

    #[test]
    fn tanaka_is_flat_on_monotone_positive_paths() {
        // Only the first step, leaving the origin where sgn_sym = 0, contributes.
        let p = path(0.1, &[0.0, 0.1, 0.3, 0.35, 1.0]);
        let lt = local_time_tanaka(&p);
        assert_eq!(lt.symmetric[0], 0.0);
        assert!(lt.symmetric[1..].iter().all(|&v| (v - 0.1).abs() < 1e-15));
        assert!(lt.right[1..].iter().all(|&v| (v - 0.2).abs() < 1e-15));
    }

    #[test]
    fn tanaka_increments_at_crossings() {
        let p = path(0.1, &[0.0, 0.5, -0.3]);
        let lt = local_time_tanaka(&p);
        // 0.5 leaving the origin, then 2 |x_2| at the crossing
        assert!((lt.symmetric[2] - 1.1).abs() < 1e-12);
        assert!((lt.right[2] - 1.6).abs() < 1e-12);
    }

    #[test]
    fn balayage_fixture() {
        // K constant: telescoping, exact zero residual.
        let y = [0.0, 0.4, -0.2, 0.7];
        assert!(balayage_residual(&y, &[1.0; 4]) < 1e-15);
        // Linear Y crossing zero once between t_1 and t_2, K flips at the crossing:
        // residual = |(K_2 - K_1) Y_2| = 2 * 1.
        let y = [0.0, -1.0, 1.0, 3.0];
        let k = [1.0, 1.0, -1.0, -1.0];
        assert!((balayage_residual(&y, &k) - 2.0).abs() < 1e-15);
    }
}
