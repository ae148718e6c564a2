//! The second-kind filter along one path, and its conditional law computed
//! by quadrature for both meander constants.
//!
//! cargo run --release --example second_kind_filter

use azema::filters::{conditional_law_second_kind, second_kind_series, second_kind_value, MeanderConstant};
use azema::paths::TimeGrid;
use azema::quadrature::QuadratureParams;
use azema::rng::Seed;
use azema::solvers::solve_second_kind;

fn main() -> azema::Result<()> {
    let c = MeanderConstant::default();
    let grid = TimeGrid::with_step(1.0, 1e-3)?;
    let sc = solve_second_kind(&grid, Seed::new(3, 0), 0.5)?;
    let series = second_kind_series(&sc, &c)?;
    let jumps = series.values.windows(2).filter(|w| w[0] != w[1]).count();
    println!("c_nu = {:.6}, {jumps} filter changes over {} zeroes of Y", c.c_nu(), sc.y_zeros().len());
    for i in (0..grid.len()).step_by(125) {
        println!("t = {:.3}  W = {:+.4}  g = {:.4}  filter = {:+.4}", grid.time(i), sc.w.values()[i], series.g_values[i], series.values[i]);
    }

    let quad = QuadratureParams::default();
    let (t, g) = (1.0, 0.4);
    println!();
    for c in [MeanderConstant::default(), MeanderConstant::paper_verbatim()] {
        let mass = conditional_law_second_kind(|_| 1.0, t, g, 1.0, &c, &quad)?;
        let mean = conditional_law_second_kind(|x| x, t, g, 1.0, &c, &quad)?;
        let positive = conditional_law_second_kind(|x| f64::from(x > 0.0), t, g, 1.0, &c, &quad)?;
        println!(
            "c_A = {:.5}: mass {mass:.10}  mean {mean:.6} (filter {:.6})  P(W > 0) {positive:.6}",
            c.c_a(),
            second_kind_value(g, 1.0, &c),
        );
    }
    Ok(())
}
