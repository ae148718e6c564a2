//! Tabulates the first-kind conditional density of `W_t` given `F^Y_t` and
//! its moments, and checks mass and mean by quadrature.
//!
//! cargo run --release --example conditional_density

use azema::filters::{conditional_density_first_kind, conditional_moment_first_kind, first_kind_value, MomentMode};
use azema::quadrature::integrate_adaptive;

fn main() -> azema::Result<()> {
    let (t, g, y, alpha) = (1.0, 0.4, 0.8, 1.3);
    println!("t = {t}, g = {g}, y = {y}, alpha = {alpha}\n");
    println!("{:>6} {:>10}", "x", "density");
    for k in -8..=8 {
        let x = k as f64 * 0.5;
        println!("{x:>6.2} {:>10.6}", conditional_density_first_kind(t, x, y, g, alpha)?);
    }

    let h = 10.0 * t.sqrt();
    let density = |x: f64| conditional_density_first_kind(t, x, y, g, alpha).unwrap_or(f64::NAN);
    let mass = integrate_adaptive(density, -h, h, 1e-12)?;
    let mean = integrate_adaptive(|x| x * density(x), -h, h, 1e-12)?;
    println!("\nmass {mass:.15}");
    println!("mean {mean:.15}  filter {:.15}", first_kind_value(g, y, alpha));

    println!("\n{:>3} {:>14} {:>14}", "n", "density-exact", "verbatim");
    for n in 0..=4 {
        println!(
            "{n:>3} {:>14.8} {:>14.8}",
            conditional_moment_first_kind(n, t, g, y, alpha, MomentMode::DensityExact)?,
            conditional_moment_first_kind(n, t, g, y, alpha, MomentMode::PaperVerbatim)?,
        );
    }
    Ok(())
}
