//! Monte Carlo oracles.
//!
//! Every check produces an [`McReport`]: an estimate with its standard error,
//! a test statistic, and the provenance needed to reproduce it. Paths are
//! generated in parallel but collected in stream order and reduced with
//! compensated sums, so a report does not depend on the thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::rng::Seed;
use crate::stats::Summary;

mod calibration;
mod first_kind;
mod lattice;
mod laws;
mod projection;
mod second_kind;
mod suites;

pub use calibration::{calibrate_meander_constant, meander_cross_check, Calibration};
pub use first_kind::{
    test_balayage, test_gamma_independence, test_innovation, test_sign_posterior, test_transience,
    test_weak_uniqueness, BalayageParams,
};
pub use lattice::{test_conditional_law_quadrature, test_density_lattice, test_moment_lattice};
pub use laws::{test_distribution, test_two_sample, Law, MIN_SAMPLES};
pub use projection::{test_projection, Filter, Functional, TestFunctionalFamily};
pub use second_kind::{
    recover_signs_from_y, test_jump_fairness, test_local_time_relation, test_piecewise_constancy,
    test_sign_recovery, SignRecovery, SignRecoveryParams,
};
pub use suites::{run_experiment, Experiment, SuiteConfig};

/// Two-sided z threshold for mean-zero checks.
pub const Z_THRESHOLD: f64 = 4.0;
/// Significance level for KS and chi-square tests, before Bonferroni.
pub const P_THRESHOLD: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub name: String,
    pub n_paths: usize,
    pub dt: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub pass: bool,
    pub seed: Seed,
    pub params: BTreeMap<String, Value>,
}

impl McReport {
    pub fn new(name: impl Into<String>, seed: Seed, n_paths: usize, dt: f64) -> Self {
        McReport {
            name: name.into(),
            n_paths,
            dt,
            estimate: f64::NAN,
            stderr: 0.0,
            ci95: (f64::NAN, f64::NAN),
            statistic: f64::NAN,
            p_value: None,
            pass: false,
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with_estimate(mut self, estimate: f64, stderr: f64) -> Self {
        self.estimate = estimate;
        self.stderr = stderr;
        self.ci95 = (estimate - 1.96 * stderr, estimate + 1.96 * stderr);
        self
    }

    pub fn with_statistic(mut self, statistic: f64) -> Self {
        self.statistic = statistic;
        self
    }

    pub fn with_p_value(mut self, p: f64) -> Self {
        self.p_value = Some(p);
        self
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// z-test of a sample mean against `target`, pass iff `|z| < threshold`.
    pub fn z_test(self, s: &Summary, target: f64, threshold: f64) -> Self {
        let z = s.z(target);
        self.with_estimate(s.mean, s.stderr)
            .with_statistic(z)
            .with_p_value(crate::stats::two_sided_p(z))
            .with_pass(z.abs() < threshold)
            .param("target", target)
    }

    /// One line for logs: `PASS name: estimate ...`.
    pub fn line(&self) -> String {
        let p = self.p_value.map_or(String::new(), |p| format!(" p={p:.3e}"));
        format!(
            "{} {}: estimate={} stderr={:.2e} statistic={}{} n={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            num(self.estimate),
            self.stderr,
            num(self.statistic),
            p,
            self.n_paths
        )
    }
}

fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

/// `PASS k/n`.
pub fn summary_line(reports: &[McReport]) -> String {
    let k = reports.iter().filter(|r| r.pass).count();
    format!("PASS {k}/{}", reports.len())
}

pub fn all_pass(reports: &[McReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

/// Evaluate `f` on streams `0..n` in parallel, results in stream order.
pub(crate) fn par_paths<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Column `j` of row-major per-path records.
pub(crate) fn column<const K: usize>(rows: &[[f64; K]], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}
