//! Tracks `W` along one first-kind path with the closed-form filter and
//! checks the filter against brute force over many paths.
//!
//! cargo run --release --example first_kind_filter

use azema::filters::{first_kind_series, sign_posterior};
use azema::oracle::{test_projection, Filter, TestFunctionalFamily};
use azema::oracle::summary_line;
use azema::paths::TimeGrid;
use azema::solvers::{ScenarioKind, ScenarioSource};

fn main() -> azema::Result<()> {
    let alpha = 1.0;
    let grid = TimeGrid::with_step(1.0, 1e-3)?;
    let source = ScenarioSource::new(ScenarioKind::FirstKindExact, alpha, grid, 11, 20_000)?;

    let sc = source.scenario(0);
    let series = first_kind_series(&sc)?;
    println!("{:>6} {:>9} {:>9} {:>9} {:>9}", "t", "W", "Y", "filter", "P(W>0)");
    for i in (0..grid.len()).step_by(100) {
        let y = sc.y.values()[i];
        println!(
            "{:>6.3} {:>+9.4} {:>+9.4} {:>+9.4} {:>9.4}",
            grid.time(i),
            sc.w.values()[i],
            y,
            series.values[i],
            sign_posterior(y, alpha),
        );
    }

    let reports = test_projection(&source, Filter::FirstKind { scale: 1.0 }, 1.0, &TestFunctionalFamily::first_kind())?;
    println!();
    for r in &reports {
        println!("{}", r.line());
    }
    println!("{}", summary_line(&reports));
    Ok(())
}
