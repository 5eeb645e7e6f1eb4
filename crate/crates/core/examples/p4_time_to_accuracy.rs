// Time to chemical accuracy for the P4 rectangle at d = 0.8 angstrom,
// for both the navigator and the plain anneal. Takes a few minutes in
// release mode.
//
// ```bash
// cargo run --release --example p4_time_to_accuracy [d]
// ```

use vanqver::vanqver::{time_to_chemical_accuracy, Bracket, Mode, OptimizeConfig, Problem};
use vanqver::{fixtures, Result};

pub fn run_example() -> Result<()> {
    let d = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.8);
    let problem = Problem::from_fixture(&fixtures::p4(d)?)?;
    let config = OptimizeConfig::default();

    let fast =
        time_to_chemical_accuracy(&problem, Mode::Vanqver, &config, Bracket::new(0.03, 0.15))?;
    let slow =
        time_to_chemical_accuracy(&problem, Mode::Standard, &config, Bracket::new(4.0, 16.0))?;
    for report in [&fast, &slow] {
        println!("{}: T_CA = {:.4}", report.mode, report.t_ca);
        for s in &report.samples {
            println!(
                "    T = {:<8.4} dE = {:.2e} {}",
                s.total_time,
                s.delta_e,
                if s.success { "ok" } else { "" }
            );
        }
        if report.non_monotonic {
            println!("    (accuracy was not monotone in T)");
        }
    }
    println!("ratio standard / vanqver = {:.0}", slow.t_ca / fast.t_ca);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
