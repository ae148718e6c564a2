//! Deterministic checks of the closed forms over parameter lattices.

use super::McReport;
use crate::error::Result;
use crate::filters::{
    conditional_density_first_kind, conditional_law_second_kind, conditional_moment_first_kind, first_kind_value,
    second_kind_value, MeanderConstant, MomentMode,
};
use crate::quadrature::{integrate_adaptive, QuadratureParams};
use crate::rng::Seed;

pub const LATTICE_T: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
pub const LATTICE_G_FRACTION: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const LATTICE_Y: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
pub const LATTICE_ALPHA: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

/// `(t, g, y, alpha)` over the 5^4 lattice.
pub fn lattice() -> impl Iterator<Item = (f64, f64, f64, f64)> {
    LATTICE_T.into_iter().flat_map(|t| {
        LATTICE_G_FRACTION.into_iter().flat_map(move |q| {
            LATTICE_Y
                .into_iter()
                .flat_map(move |y| LATTICE_ALPHA.into_iter().map(move |a| (t, q * t, y, a)))
        })
    })
}

const NO_SEED: Seed = Seed { root: 0, stream: 0 };

/// Largest deviation of the density's mass from 1 and of its first moment
/// from the filter, integrating over `[-10 sqrt t, 10 sqrt t]`.
pub fn test_density_lattice(tolerance: f64) -> Result<Vec<McReport>> {
    let mut mass_err: f64 = 0.0;
    let mut mean_err: f64 = 0.0;
    let mut n = 0usize;
    for (t, g, y, alpha) in lattice() {
        let h = 10.0 * t.sqrt();
        let density = |x: f64| conditional_density_first_kind(t, x, y, g, alpha).unwrap_or(f64::NAN);
        let mass = integrate_adaptive(density, -h, h, 1e-12)?;
        let mean = integrate_adaptive(|x| x * density(x), -h, h, 1e-12)?;
        mass_err = mass_err.max((mass - 1.0).abs());
        mean_err = mean_err.max((mean - first_kind_value(g, y, alpha)).abs());
        n += 1;
    }
    let report = |name: &str, err: f64| {
        McReport::new(name, NO_SEED, n, 0.0)
            .with_estimate(err, 0.0)
            .with_statistic(err)
            .with_pass(err < tolerance)
            .param("tolerance", tolerance)
            .param("lattice_points", n)
    };
    Ok(vec![report("density/normalization", mass_err), report("density/first_moment", mean_err)])
}

/// Checks `n = 1` moments against the filter within `tolerance` and reports
/// the largest gap between the two moment modes for `n = 0, 2`.
pub fn test_moment_lattice(tolerance: f64) -> Result<Vec<McReport>> {
    let mut first: f64 = 0.0;
    let mut gap0: f64 = 0.0;
    let mut gap2: f64 = 0.0;
    let mut second: f64 = 0.0;
    let mut n = 0usize;
    for (t, g, y, alpha) in lattice() {
        let m = |k, mode| conditional_moment_first_kind(k, t, g, y, alpha, mode);
        first = first.max((m(1, MomentMode::DensityExact)? - first_kind_value(g, y, alpha)).abs());
        first = first.max((m(1, MomentMode::PaperVerbatim)? - first_kind_value(g, y, alpha)).abs());
        second = second.max((m(2, MomentMode::DensityExact)? - t).abs());
        gap0 = gap0.max((m(0, MomentMode::DensityExact)? - m(0, MomentMode::PaperVerbatim)?).abs());
        gap2 = gap2.max((m(2, MomentMode::DensityExact)? - m(2, MomentMode::PaperVerbatim)?).abs());
        n += 1;
    }
    Ok(vec![
        McReport::new("moments/first_matches_filter", NO_SEED, n, 0.0)
            .with_estimate(first, 0.0)
            .with_statistic(first)
            .with_pass(first < tolerance)
            .param("tolerance", tolerance),
        McReport::new("moments/second_equals_t", NO_SEED, n, 0.0)
            .with_estimate(second, 0.0)
            .with_statistic(second)
            .with_pass(second < tolerance)
            .param("tolerance", tolerance)
            .param("max_mode_gap_n0", gap0)
            .param("max_mode_gap_n2", gap2),
    ])
}

/// `(t, g, sign)` triples for the second-kind quadrature checks.
pub const QUADRATURE_CASES: [(f64, f64, f64); 6] =
    [(1.0, 0.25, -1.0), (1.0, 0.4, 1.0), (1.0, 1.0, 1.0), (2.0, 0.5, -1.0), (4.0, 3.0, 1.0), (0.5, 0.1, 1.0)];

/// Total mass within `mass_tol` and mean within `mean_tol` of the filter.
pub fn test_conditional_law_quadrature(c: &MeanderConstant, mass_tol: f64, mean_tol: f64) -> Result<Vec<McReport>> {
    let quad = QuadratureParams::default();
    let mut mass_err: f64 = 0.0;
    let mut mean_err: f64 = 0.0;
    for (t, g, sign) in QUADRATURE_CASES {
        let mass = conditional_law_second_kind(|_| 1.0, t, g, sign, c, &quad)?;
        let mean = conditional_law_second_kind(|y| y, t, g, sign, c, &quad)?;
        mass_err = mass_err.max((mass - 1.0).abs());
        mean_err = mean_err.max((mean - second_kind_value(g, sign, c)).abs());
    }
    let n = QUADRATURE_CASES.len();
    Ok(vec![
        McReport::new("quadrature/mass", NO_SEED, n, 0.0)
            .with_estimate(mass_err, 0.0)
            .with_statistic(mass_err)
            .with_pass(mass_err < mass_tol)
            .param("tolerance", mass_tol)
            .param("c_a", c.c_a()),
        McReport::new("quadrature/mean_matches_filter", NO_SEED, n, 0.0)
            .with_estimate(mean_err, 0.0)
            .with_statistic(mean_err)
            .with_pass(mean_err < mean_tol)
            .param("tolerance", mean_tol)
            .param("c_a", c.c_a()),
    ])
}
