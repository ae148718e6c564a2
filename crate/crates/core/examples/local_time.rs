//! Compares the occupation and Tanaka local time estimators on Brownian
//! motion and on a skew Brownian motion, whose right local time is
//! `1 + alpha` times the symmetric one.
//!
//! cargo run --release --example local_time

use azema::functionals::{local_time_default, local_time_tanaka};
use azema::paths::{simulate_bm, simulate_skew_bm, TimeGrid};
use azema::rng::Seed;
use azema::stats::Summary;

fn main() -> azema::Result<()> {
    let grid = TimeGrid::with_step(1.0, 1e-4)?;
    let alpha = 0.6;
    let n = 400;
    let (mut occ, mut tan, mut ratio_num, mut ratio_den) = (vec![], vec![], 0.0, 0.0);
    for p in 0..n {
        let w = simulate_bm(&grid, Seed::new(9, p));
        occ.push(local_time_default(&w).symmetric_at(1.0)?);
        tan.push(local_time_tanaka(&w).symmetric_at(1.0)?);
        let x = simulate_skew_bm(&grid, Seed::new(9, p), alpha)?;
        let lt = local_time_default(&x);
        ratio_num += lt.right_at(1.0)?;
        ratio_den += lt.symmetric_at(1.0)?;
    }
    let (o, t) = (Summary::of(&occ), Summary::of(&tan));
    println!("E L_1, occupation {:.4} +- {:.4}", o.mean, o.stderr);
    println!("E L_1, Tanaka     {:.4} +- {:.4}", t.mean, t.stderr);
    println!("sqrt(2/pi)        {:.4}", (2.0 / std::f64::consts::PI).sqrt());
    println!("skew BM alpha = {alpha}: right / symmetric = {:.4} (1 + alpha = {})", ratio_num / ratio_den, 1.0 + alpha);
    Ok(())
}
