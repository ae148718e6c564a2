//! Simulates one coupled scenario of each kind and prints a few grid points.
//!
//! cargo run --release --example simulate_scenarios

use azema::functionals::{excursions_with, last_zero};
use azema::paths::TimeGrid;
use azema::rng::Seed;
use azema::solvers::{solve, ScenarioKind};

fn main() -> azema::Result<()> {
    let grid = TimeGrid::with_step(1.0, 1e-3)?;
    let seed = Seed::new(7, 0);
    for kind in [ScenarioKind::FirstKindEuler, ScenarioKind::FirstKindExact, ScenarioKind::SecondKind, ScenarioKind::DriftlessZ] {
        let sc = solve(kind, &grid, seed, 0.5)?;
        let exc = excursions_with(&sc.y, sc.y_zeros());
        println!(
            "{kind:<12} W_1 = {:+.4}  Y_1 = {:+.4}  g_1(Y) = {:.4}  gamma_1(W) = {:.4}  excursions = {}",
            sc.w.terminal(),
            sc.y.terminal(),
            sc.y_zeros().last_at_or_before(1.0),
            last_zero(&sc.w, 1.0)?,
            exc.len(),
        );
    }

    let sc = solve(ScenarioKind::SecondKind, &grid, seed, 0.5)?;
    let mut out = Vec::new();
    sc.write_csv(&mut out)?;
    let text = String::from_utf8(out).expect("csv is utf-8");
    println!("\nsecond-kind scenario, first rows:");
    for line in text.lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
