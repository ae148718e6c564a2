//! Reads the signs of `W` at excursion starts from `Y` alone, using the
//! asymmetry of the skew Brownian motion near zero.
//!
//! cargo run --release --example sign_recovery

use azema::oracle::{recover_signs_from_y, test_sign_recovery, SignRecoveryParams};
use azema::paths::TimeGrid;
use azema::rng::Seed;
use azema::solvers::{solve_second_kind, ScenarioKind, ScenarioSource};

fn main() -> azema::Result<()> {
    let params = SignRecoveryParams::default();
    let grid = TimeGrid::with_step(1.0, 1e-4)?;
    let sc = solve_second_kind(&grid, Seed::new(5, 0), 0.8)?;
    let r = recover_signs_from_y(&sc, &params)?;
    println!("one path: {}/{} long excursions recovered", r.correct(), r.estimates.len());
    for (start, est, truth) in r.estimates.iter().take(8) {
        println!("  start {start:.4}  estimate {est:+}  truth {truth:+}");
    }

    for dt in [1e-3, 1e-4] {
        let source = ScenarioSource::new(ScenarioKind::SecondKind, 0.8, TimeGrid::with_step(1.0, dt)?, 5, 300)?;
        println!("{}", test_sign_recovery(&source, &params, 0.0)?.line());
    }
    Ok(())
}
