//! Regresses `|W_t|` on `sqrt(t - gamma_t)` to decide between the two
//! candidate meander constants.
//!
//! cargo run --release --example calibrate_meander [n_paths]

use azema::filters::MeanderConstant;
use azema::oracle::calibrate_meander_constant;
use azema::paths::TimeGrid;

fn main() -> azema::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let grid = TimeGrid::with_step(1.0, 1e-3)?;
    let cal = calibrate_meander_constant(&grid, 2024, n, 1.0)?;
    println!("slope {:.4} +- {:.4} over {n} paths", cal.slope, cal.stderr);
    println!("pi/2        = {:.4}  z = {:+.1}", MeanderConstant::PRINTED, cal.z_printed);
    println!("sqrt(pi/2)  = {:.4}  z = {:+.1}", MeanderConstant::RAYLEIGH, cal.z_rayleigh);
    match cal.selected {
        Some(c) => println!("selected c_A = {:.4} ({})", c.c_a(), c.mode()),
        None => println!("no unique candidate within 3 standard errors"),
    }
    Ok(())
}
