//! Summation, moments and the hypothesis tests used by the oracles.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::filters::normal_cdf;

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<NeumaierSum>().value()
}

/// Sample mean and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub stderr: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Summary { n, mean: f64::NAN, sd: f64::NAN, stderr: f64::NAN };
        }
        let mean = sum(xs) / n as f64;
        let ss = xs.iter().map(|x| (x - mean).powi(2)).collect::<NeumaierSum>().value();
        let var = if n > 1 { ss / (n - 1) as f64 } else { 0.0 };
        let sd = var.sqrt();
        Summary { n, mean, sd, stderr: sd / (n as f64).sqrt() }
    }

    /// `mean / stderr`, or 0 when both vanish.
    pub fn z(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if self.stderr == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                d.signum() * f64::INFINITY
            }
        } else {
            d / self.stderr
        }
    }
}

pub fn two_sided_p(z: f64) -> f64 {
    if !z.is_finite() {
        return if z.is_nan() { f64::NAN } else { 0.0 };
    }
    (2.0 * normal_cdf(-z.abs())).min(1.0)
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        let a = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for k in 1..=50 {
            let j = (2 * k - 1) as f64;
            s += (a * j * j).exp();
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        s += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_effective: f64,
}

fn ks_p(d: f64, ne: f64) -> f64 {
    let s = ne.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// One-sample Kolmogorov–Smirnov test against `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsResult {
    let mut x: Vec<f64> = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, v) in x.iter().enumerate() {
        let f = cdf(*v);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    KsResult { statistic: d, p_value: ks_p(d, n), n_effective: n }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    KsResult { statistic: d, p_value: ks_p(d, ne), n_effective: ne }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of independence on a contingency table.
pub fn chi_square_independence(table: &[Vec<u64>]) -> ChiSquareResult {
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let ncol = table.first().map_or(0, |r| r.len());
    let cols: Vec<f64> = (0..ncol).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let total: f64 = rows.iter().sum();
    let mut stat = NeumaierSum::new();
    for (i, r) in table.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            let e = rows[i] * cols[j] / total;
            if e > 0.0 {
                stat.add((o as f64 - e).powi(2) / e);
            }
        }
    }
    let live_rows = rows.iter().filter(|&&r| r > 0.0).count();
    let live_cols = cols.iter().filter(|&&c| c > 0.0).count();
    let dof = live_rows.saturating_sub(1) * live_cols.saturating_sub(1);
    let statistic = stat.value();
    let p_value = if dof == 0 {
        1.0
    } else {
        let law = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        law.sf(statistic)
    };
    ChiSquareResult { statistic, dof, p_value }
}

/// Interior cut points splitting `xs` into `k` groups of (nearly) equal size.
pub fn quantile_edges(xs: &[f64], k: usize) -> Vec<f64> {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    (1..k).map(|q| s[(q * s.len() / k).min(s.len() - 1)]).collect()
}

pub fn bin_of(edges: &[f64], x: f64) -> usize {
    edges.partition_point(|&e| e <= x)
}

/// Contingency table of two samples cut at their own quantiles.
pub fn quantile_table(a: &[f64], b: &[f64], k: usize) -> Vec<Vec<u64>> {
    let ea = quantile_edges(a, k);
    let eb = quantile_edges(b, k);
    let mut t = vec![vec![0u64; k]; k];
    for (x, y) in a.iter().zip(b) {
        t[bin_of(&ea, *x)][bin_of(&eb, *y)] += 1;
    }
    t
}

/// Pearson correlation and its z-score `r sqrt(n)` under independence.
pub fn correlation_z(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sx = Summary::of(x);
    let sy = Summary::of(y);
    let cov = x.iter().zip(y).map(|(a, b)| (a - sx.mean) * (b - sy.mean)).collect::<NeumaierSum>().value()
        / (x.len() as f64 - 1.0);
    let r = cov / (sx.sd * sy.sd);
    (r, r * (x.len() as f64).sqrt())
}
