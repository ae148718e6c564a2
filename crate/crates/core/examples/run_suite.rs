//! Runs one oracle experiment at reduced size and prints its report lines.
//!
//! cargo run --release --example run_suite -- arcsine 20000

use azema::oracle::{run_experiment, Experiment, SuiteConfig};
use azema::oracle::summary_line;

fn main() -> azema::Result<()> {
    let mut args = std::env::args().skip(1);
    let experiment: Experiment = args.next().as_deref().unwrap_or("moments").parse()?;
    let cfg = SuiteConfig { n_paths: args.next().and_then(|s| s.parse().ok()), ..SuiteConfig::default() };
    let reports = run_experiment(experiment, &cfg)?;
    for r in &reports {
        println!("{}", r.line());
    }
    println!("{}", summary_line(&reports));
    Ok(())
}
