// What the navigator does to the spectrum and the state along an H2
// anneal at T = 0.1: instantaneous gap, overlap with the instantaneous
// ground state, and the adiabatic-condition ratio, with and without the
// optimised navigator.
//
// ```bash
// cargo run --release --example navigator_diagnostics
// ```

use vanqver::diagnostics::{adiabatic_bound, gap_trace, overlap_trace};
use vanqver::schedule::Schedule;
use vanqver::vanqver::{optimize, OptimizeConfig, Problem};
use vanqver::{fixtures, Result};

pub fn run_example() -> Result<()> {
    let problem = Problem::from_fixture(&fixtures::load("h2")?)?;
    let t = 0.1;
    let record = optimize(&problem, t, &OptimizeConfig::default())?;
    let params = record.final_params.expect("vanqver run");
    let mut bare = params.clone();
    bare.theta.values_mut().fill(0.0);

    let schedule = Schedule::new(t)?;
    let with = problem.anneal_spec(&params, schedule, None)?;
    let without = problem.anneal_spec(&bare, schedule, None)?;
    let psi0 = problem.reference_state()?;
    let n = 11;

    let gap = gap_trace(&with, n, problem.sector())?;
    let gap0 = gap_trace(&without, n, problem.sector())?;
    let ov = overlap_trace(&with, &psi0, n)?;
    let ov0 = overlap_trace(&without, &psi0, n)?;
    let bound = adiabatic_bound(&with, n, problem.sector())?;

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "t", "gap", "gap(0)", "overlap", "overlap(0)", "bound"
    );
    for k in 0..n {
        println!(
            "{:6.3} {:10.4} {:10.4} {:10.6} {:10.6} {:10.2e}",
            gap.samples[k].0,
            gap.samples[k].1,
            gap0.samples[k].1,
            ov.samples[k].1,
            ov0.samples[k].1,
            bound[k].value
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
