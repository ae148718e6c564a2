//! Monte Carlo values for the path generators, local time estimators and
//! oracles at moderate sizes.

use azema::filters::{conditional_law_second_kind, MeanderConstant};
use azema::functionals::{local_time_default, local_time_tanaka};
use azema::oracle::{
    all_pass, test_distribution, test_gamma_independence, test_innovation, test_sign_posterior, test_two_sample, Law,
};
use azema::paths::{simulate_bm, simulate_bm_drift, simulate_skew_bm, simulate_skew_bm_euler, TimeGrid};
use azema::quadrature::QuadratureParams;
use azema::rng::Seed;
use azema::solvers::{ScenarioKind, ScenarioSource};
use azema::stats::Summary;

fn terminal_values(n: usize, f: impl Fn(Seed) -> f64) -> Vec<f64> {
    (0..n as u64).map(|p| f(Seed::new(99, p))).collect()
}

fn within(s: &Summary, target: f64, k: f64) -> bool {
    (s.mean - target).abs() < k * s.stderr
}

#[test]
fn bm_marginals() {
    let g1 = TimeGrid::new(1.0, 1).unwrap();
    let x = terminal_values(100_000, |s| simulate_bm(&g1, s).terminal());
    assert!(Summary::of(&x).mean.abs() < 10f64.powf(-2.5) * 4.0);

    let g2 = TimeGrid::new(2.0, 8).unwrap();
    let sq: Vec<f64> = terminal_values(100_000, |s| simulate_bm(&g2, s).terminal().powi(2));
    assert!(within(&Summary::of(&sq), 2.0, 3.0));
}

#[test]
fn drifted_bm_mean_and_variance() {
    let g = TimeGrid::new(4.0, 16).unwrap();
    let x = terminal_values(100_000, |s| simulate_bm_drift(&g, s, 1.0).terminal());
    assert!(within(&Summary::of(&x), 4.0, 3.0));
    let centred: Vec<f64> = x.iter().map(|v| (v - 4.0).powi(2)).collect();
    assert!(within(&Summary::of(&centred), 4.0, 3.0));
}

#[test]
fn skew_bm_occupation_and_symmetric_case() {
    let g = TimeGrid::new(1.0, 200).unwrap();
    let pos = terminal_values(100_000, |s| f64::from(u8::from(simulate_skew_bm(&g, s, 0.5).unwrap().terminal() > 0.0)));
    assert!(within(&Summary::of(&pos), 0.75, 3.0));

    let skew = terminal_values(20_000, |s| simulate_skew_bm(&g, s, 0.0).unwrap().terminal());
    let bm: Vec<f64> = (0..20_000u64).map(|p| simulate_bm(&g, Seed::new(7, p)).terminal()).collect();
    assert!(test_two_sample(&skew, &bm, Seed::new(99, 0), g.dt()).unwrap().pass);
}

#[test]
fn skew_euler_leakage_at_alpha_one() {
    let g = TimeGrid::with_step(1.0, 1e-4).unwrap();
    let eps = g.dt().sqrt();
    let (mut below, mut total) = (0usize, 0usize);
    for p in 0..2000 {
        let x = simulate_skew_bm_euler(&g, Seed::new(3, p), 1.0).unwrap();
        below += x.values().iter().filter(|&&v| v < -eps).count();
        total += x.values().len();
    }
    assert!((below as f64) / (total as f64) <= 0.01);
}

#[test]
fn local_time_estimators_have_mean_sqrt_two_over_pi() {
    let g = TimeGrid::with_step(1.0, 1e-4).unwrap();
    let target = (2.0 / std::f64::consts::PI).sqrt();
    let (mut occ, mut tan) = (Vec::new(), Vec::new());
    for p in 0..10_000 {
        let w = simulate_bm(&g, Seed::new(5, p));
        occ.push(local_time_default(&w).symmetric_at(1.0).unwrap());
        tan.push(local_time_tanaka(&w).symmetric_at(1.0).unwrap());
    }
    assert!((Summary::of(&occ).mean / target - 1.0).abs() < 0.05);
    assert!((Summary::of(&tan).mean / target - 1.0).abs() < 0.05);
}

#[test]
fn laws_accept_the_right_law_and_reject_others() {
    let g = TimeGrid::new(1.0, 50).unwrap();
    let bm = terminal_values(20_000, |s| simulate_bm(&g, s).terminal());
    let drift: Vec<f64> = (0..20_000u64).map(|p| simulate_bm_drift(&g, Seed::new(8, p), 1.0).terminal()).collect();
    let seed = Seed::new(99, 0);
    assert!(test_distribution(&bm, Law::Normal(1.0), seed, g.dt()).unwrap().pass);
    assert!(test_distribution(&bm, Law::HalfNormal(1.0), seed, g.dt()).unwrap().p_value.unwrap() < 1e-6);
    assert!(!test_two_sample(&bm, &drift, seed, g.dt()).unwrap().pass);
}

#[test]
fn first_kind_oracles_without_information() {
    let grid = TimeGrid::with_step(2.0, 1e-2).unwrap();
    let src = ScenarioSource::new(ScenarioKind::FirstKindEuler, 0.0, grid, 12, 5_000).unwrap();
    assert!(test_sign_posterior(&src, 1.0, 20, 3.0).unwrap().pass);
    assert!(all_pass(&test_innovation(&src, 1.0, 1.0).unwrap()));
    let exact = ScenarioSource::new(ScenarioKind::FirstKindExact, 0.0, grid, 12, 5_000).unwrap();
    let reports = test_gamma_independence(&exact, 2.0).unwrap();
    assert!(reports.iter().filter(|r| !r.name.contains("/power/")).all(|r| r.pass));
}

#[test]
fn sign_information_tilts_the_second_kind_law() {
    let c = MeanderConstant::default();
    let p = conditional_law_second_kind(|y| f64::from(y > 0.0), 1.0, 1.0, 1.0, &c, &QuadratureParams::default()).unwrap();
    assert!(p > 0.5, "{p}");
}
