//! Gauss–Legendre quadrature: a node-doubling rule for smooth integrands and
//! an adaptive bisection rule for integrands with kinks or jumps.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, nodes found by Newton iteration on the three-term
    /// recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const MAX_DOUBLINGS: usize = 6;

fn cached_rule(n: usize) -> Arc<GaussLegendre> {
    static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let mut map = RULES.get_or_init(Default::default).lock().expect("rule cache poisoned");
    map.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureParams {
    /// Nodes of the first rule; doubled until two successive estimates agree.
    pub base_nodes: usize,
    pub tolerance: f64,
    pub max_doublings: usize,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        QuadratureParams { base_nodes: 128, tolerance: 1e-8, max_doublings: MAX_DOUBLINGS }
    }
}

/// Gauss–Legendre with node doubling; returns `(estimate, last change)`.
pub fn integrate_doubling<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, params: &QuadratureParams) -> Result<(f64, f64)> {
    let levels = params.max_doublings.min(MAX_DOUBLINGS);
    let mut prev = cached_rule(params.base_nodes).integrate(&mut f, a, b);
    check_finite(prev)?;
    let mut change = f64::INFINITY;
    for level in 1..=levels {
        let next = cached_rule(params.base_nodes << level).integrate(&mut f, a, b);
        check_finite(next)?;
        change = (next - prev).abs();
        prev = next;
        if change < params.tolerance {
            return Ok((prev, change));
        }
    }
    Err(Error::Quadrature { estimate: prev, error_estimate: change })
}

/// Adaptive bisection with a 16-point rule on each panel. A panel is accepted
/// when the rule over the whole panel, over its halves and over its thirds
/// agree; the thirds catch a jump hidden next to the midpoint, which the
/// whole and the halves can miss in the same way. Suited to piecewise-smooth
/// integrands with finitely many bounded jumps.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tolerance: f64) -> Result<f64> {
    let rule = cached_rule(16);
    let whole = rule.integrate(&mut f, a, b);
    check_finite(whole)?;
    adapt(&mut f, &rule, a, b, whole, tolerance, 0)
}

/// Panels narrower than `2^-MIN_WIDTH_DEPTH` of the interval are accepted:
/// at a jump the panel error shrinks only linearly with the width and would
/// never meet the halved tolerance.
const MIN_WIDTH_DEPTH: u32 = 36;

fn adapt<F: FnMut(f64) -> f64>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule.integrate(&mut *f, a, m);
    let right = rule.integrate(&mut *f, m, b);
    check_finite(left + right)?;
    let w3 = (b - a) / 3.0;
    let thirds = rule.integrate(&mut *f, a, a + w3) + rule.integrate(&mut *f, a + w3, b - w3) + rule.integrate(&mut *f, b - w3, b);
    let diff = (left + right - whole).abs().max((left + right - thirds).abs());
    if diff <= tol || diff <= 8.0 * f64::EPSILON * (left + right).abs() || depth >= MIN_WIDTH_DEPTH {
        return Ok(left + right);
    }
    let l = adapt(f, rule, a, m, left, 0.5 * tol, depth + 1)?;
    let r = adapt(f, rule, m, b, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

fn check_finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(v))
    }
}
