//! Orthogonality batteries: `E[(W_t - m_t) phi] = 0` for functionals `phi`
//! of the observed path.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{par_paths, McReport, Z_THRESHOLD};
use crate::error::Result;
use crate::filters::{first_kind_value, second_kind_value, MeanderConstant};
use crate::functionals::sgn;
use crate::solvers::{CoupledScenario, ScenarioKind, ScenarioSource};
use crate::stats::Summary;

/// A functional of the observation path up to time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Constant,
    /// `Y_t^k`.
    YPower(u32),
    /// `g_t^k`.
    GPower(u32),
    /// `1{lo <= Y_t < hi}`.
    YBin { lo: f64, hi: f64 },
    /// `max_{s <= t} |Y_s|`.
    RunningMaxAbsY,
    /// Occupation estimate of the symmetric local time at `t`, `eps = sqrt(dt)`.
    LocalTime,
    /// `Y` at `fraction * t`.
    YAt(f64),
    /// `sqrt(g_t) tanh(alpha Y_t)` (first kind) or `sgn(W_{g_t}) sqrt(g_t)`
    /// (second kind).
    FilterShape,
    /// Second kind: sign state at `fraction * t`.
    SignAt(f64),
    /// Second kind: `s_t s_{fraction * t}`.
    SignProduct(f64),
    /// Second kind: `s_t` times the sign revealed at the zero before `g_t`.
    PreviousZeroSign,
    /// Second kind: `s_t` times the number of observed sign changes up to `t`.
    SignFlips,
    /// Second kind: `s_t 1{no sign change observed up to t}`.
    NoFlipIndicator,
}

impl Functional {
    pub fn needs_second_kind(&self) -> bool {
        matches!(
            self,
            Functional::SignAt(_)
                | Functional::SignProduct(_)
                | Functional::PreviousZeroSign
                | Functional::SignFlips
                | Functional::NoFlipIndicator
        )
    }

    pub fn name(&self) -> String {
        match self {
            Functional::Constant => "1".into(),
            Functional::YPower(k) => format!("Y_t^{k}"),
            Functional::GPower(k) => format!("g_t^{k}"),
            Functional::YBin { lo, hi } => format!("1[{lo}<=Y_t<{hi}]"),
            Functional::RunningMaxAbsY => "max|Y|".into(),
            Functional::LocalTime => "L_t".into(),
            Functional::YAt(f) => format!("Y_({f}t)"),
            Functional::FilterShape => "filter_shape".into(),
            Functional::SignAt(f) => format!("s_({f}t)"),
            Functional::SignProduct(f) => format!("s_t*s_({f}t)"),
            Functional::PreviousZeroSign => "s_t*s_prev".into(),
            Functional::SignFlips => "s_t*flips".into(),
            Functional::NoFlipIndicator => "s_t*1[no_flip]".into(),
        }
    }

    /// Value on a scenario at grid index `i`.
    pub fn eval(&self, sc: &CoupledScenario, i: usize) -> Result<f64> {
        if self.needs_second_kind() {
            sc.require_kind(&[ScenarioKind::SecondKind])?;
        }
        let grid = sc.grid();
        let y = sc.y.values();
        let zeros = sc.y_zeros();
        let t = grid.time(i);
        let g = zeros.last_at_or_before(t);
        let s = &sc.sign_at_last_zero;
        let at = |f: f64| grid.index_floor(f * t);
        Ok(match *self {
            Functional::Constant => 1.0,
            Functional::YPower(k) => y[i].powi(k as i32),
            Functional::GPower(k) => g.powi(k as i32),
            Functional::YBin { lo, hi } => f64::from(u8::from(lo <= y[i] && y[i] < hi)),
            Functional::RunningMaxAbsY => y[..=i].iter().fold(0.0, |m, v| m.max(v.abs())),
            Functional::LocalTime => {
                let eps = grid.dt().sqrt();
                let n = y[..i].iter().filter(|v| v.abs() < eps).count();
                n as f64 * grid.dt() / (2.0 * eps)
            }
            Functional::YAt(f) => y[at(f)],
            Functional::FilterShape => match sc.kind {
                ScenarioKind::SecondKind => s[i] * g.sqrt(),
                _ => g.sqrt() * (sc.alpha * y[i]).tanh(),
            },
            Functional::SignAt(f) => s[at(f)],
            Functional::SignProduct(f) => s[i] * s[at(f)],
            Functional::PreviousZeroSign => {
                let k = zeros.last_position(t);
                let prev = if k == 0 {
                    s[i]
                } else {
                    sgn(sc.w.values()[crate::solvers::signal_index(zeros.left_index(k - 1))])
                };
                s[i] * prev
            }
            Functional::SignFlips => s[i] * flips(&s[..=i]) as f64,
            Functional::NoFlipIndicator => s[i] * f64::from(u8::from(flips(&s[..=i]) == 0)),
        })
    }
}

fn flips(s: &[f64]) -> usize {
    s.windows(2).filter(|w| w[0] != w[1]).count()
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionalFamily {
    pub functionals: Vec<Functional>,
}

impl TestFunctionalFamily {
    fn observable_core() -> Vec<Functional> {
        vec![
            Functional::Constant,
            Functional::YPower(1),
            Functional::YPower(2),
            Functional::YPower(3),
            Functional::GPower(1),
            Functional::GPower(2),
            Functional::YBin { lo: f64::NEG_INFINITY, hi: -1.0 },
            Functional::YBin { lo: -1.0, hi: 0.0 },
            Functional::YBin { lo: 0.0, hi: 1.0 },
            Functional::YBin { lo: 1.0, hi: f64::INFINITY },
            Functional::RunningMaxAbsY,
            Functional::LocalTime,
            Functional::YAt(0.25),
            Functional::YAt(0.5),
            Functional::FilterShape,
        ]
    }

    pub fn first_kind() -> Self {
        TestFunctionalFamily { functionals: Self::observable_core() }
    }

    /// Adds sign-history functionals, which are observable in the second kind.
    pub fn second_kind() -> Self {
        let mut functionals = Self::observable_core();
        functionals.extend([
            Functional::SignAt(0.5),
            Functional::SignProduct(0.25),
            Functional::SignProduct(0.5),
            Functional::SignProduct(0.9),
            Functional::PreviousZeroSign,
            Functional::SignFlips,
            Functional::NoFlipIndicator,
        ]);
        TestFunctionalFamily { functionals }
    }
}

/// The filter whose orthogonality is tested.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    /// The constant 0.
    Zero,
    /// `scale * sqrt(2 g / pi) tanh(alpha Y)`; `scale = 1` is the filter.
    FirstKind { scale: f64 },
    /// `sgn(W_g) c_nu sqrt(g)`.
    SecondKind(MeanderConstant),
}

impl Filter {
    pub fn label(&self) -> String {
        match self {
            Filter::Zero => "zero".into(),
            Filter::FirstKind { scale } if *scale == 1.0 => "first_kind".into(),
            Filter::FirstKind { scale } => format!("first_kind_x{scale}"),
            Filter::SecondKind(c) => format!("second_kind_c{:.5}", c.c_nu()),
        }
    }

    pub fn eval(&self, sc: &CoupledScenario, i: usize) -> Result<f64> {
        let t = sc.grid().time(i);
        let g = sc.y_zeros().last_at_or_before(t);
        match self {
            Filter::Zero => Ok(0.0),
            Filter::FirstKind { scale } => {
                sc.require_kind(&[ScenarioKind::FirstKindEuler, ScenarioKind::FirstKindExact])?;
                Ok(scale * first_kind_value(g, sc.y.values()[i], sc.alpha))
            }
            Filter::SecondKind(c) => {
                sc.require_kind(&[ScenarioKind::SecondKind])?;
                Ok(second_kind_value(g, sc.sign_at_last_zero[i], c))
            }
        }
    }
}

/// For each functional, a z-test of `E[(W_t - m_t) phi] = 0`, pass iff `|z| < 4`.
pub fn test_projection(
    source: &ScenarioSource,
    filter: Filter,
    t: f64,
    family: &TestFunctionalFamily,
) -> Result<Vec<McReport>> {
    let i = source.grid.index_of(t)?;
    let probe = source.scenario(0);
    filter.eval(&probe, i)?;
    for f in &family.functionals {
        f.eval(&probe, i)?;
    }
    let k = family.functionals.len();
    let rows: Vec<Vec<f64>> = par_paths(source.n_paths, |p| {
        let sc = source.scenario(p);
        let resid = sc.w.values()[i] - filter.eval(&sc, i).expect("checked on probe");
        family.functionals.iter().map(|f| resid * f.eval(&sc, i).expect("checked on probe")).collect()
    });
    let mut out = Vec::with_capacity(k);
    for (j, f) in family.functionals.iter().enumerate() {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let s = Summary::of(&col);
        out.push(
            McReport::new(format!("projection/{}/{}", filter.label(), f.name()), source.seed(0), source.n_paths, source.grid.dt())
                .z_test(&s, 0.0, Z_THRESHOLD)
                .param("kind", source.kind.name())
                .param("alpha", source.alpha)
                .param("t", t),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::TimeGrid;
    use crate::rng::Seed;
    use crate::solvers::{solve_first_kind_exact, solve_second_kind};

    #[test]
    fn sign_functionals_need_the_second_kind() {
        let g = TimeGrid::with_step(1.0, 1e-2).unwrap();
        let first = solve_first_kind_exact(&g, Seed::new(1, 1), 1.0);
        assert!(Functional::SignAt(0.5).eval(&first, 100).is_err());
        assert!(Functional::YPower(2).eval(&first, 100).is_ok());
        let second = solve_second_kind(&g, Seed::new(1, 1), 0.5).unwrap();
        let s = Functional::SignProduct(0.5).eval(&second, 100).unwrap();
        assert_eq!(s.abs(), 1.0);
        assert!(Filter::FirstKind { scale: 1.0 }.eval(&second, 100).is_err());
    }

    #[test]
    fn functional_values_on_a_fixture() {
        let g = TimeGrid::with_step(1.0, 1e-2).unwrap();
        let sc = solve_first_kind_exact(&g, Seed::new(3, 3), 1.0);
        let y = sc.y.values();
        assert_eq!(Functional::YPower(3).eval(&sc, 100).unwrap(), y[100].powi(3));
        assert_eq!(Functional::YAt(0.5).eval(&sc, 100).unwrap(), y[50]);
        let m = Functional::RunningMaxAbsY.eval(&sc, 100).unwrap();
        assert!(y.iter().all(|v| v.abs() <= m));
        assert!(Functional::LocalTime.eval(&sc, 100).unwrap() >= 0.0);
    }

    #[test]
    fn zero_filter_is_orthogonal_without_information() {
        let src = ScenarioSource::new(ScenarioKind::FirstKindExact, 0.0, TimeGrid::with_step(1.0, 1e-2).unwrap(), 5, 2000)
            .unwrap();
        let r = test_projection(&src, Filter::FirstKind { scale: 1.0 }, 1.0, &TestFunctionalFamily::first_kind()).unwrap();
        assert!(r.iter().all(|r| r.pass), "{:?}", r.iter().map(McReport::line).collect::<Vec<_>>());
    }
}
