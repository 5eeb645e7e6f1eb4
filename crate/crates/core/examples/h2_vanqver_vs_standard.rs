// The headline comparison on H2: at T = 0.1 the optimised navigator
// anneal reaches chemical accuracy while the plain Moller-Plesset anneal
// does not; the plain anneal needs T of order 13.
//
// ```bash
// cargo run --release --example h2_vanqver_vs_standard
// ```

use vanqver::vanqver::{optimize, standard_aqc, OptimizeConfig, Problem, CHEMICAL_ACCURACY};
use vanqver::{fixtures, Result};

pub fn run_example() -> Result<()> {
    let problem = Problem::from_fixture(&fixtures::load("h2")?)?;
    println!("E_HF {:.8}  E_FCI {:.8}", problem.e_hf(), problem.e_fci());

    let record = optimize(&problem, 0.1, &OptimizeConfig::with_tolerance(1e-3))?;
    for point in &record.trajectory {
        println!("  iter {:2}  E = {:.10}", point.iteration, point.energy);
    }
    println!(
        "vanqver  T = 0.1: dE = {:.2e} after {} iterations ({} anneals)",
        record.delta_e(),
        record.n_iterations,
        record.n_evaluations
    );

    for t in [0.1, 13.0] {
        let e = standard_aqc(&problem, t)?;
        let de = e - problem.e_fci();
        let ok = if de <= CHEMICAL_ACCURACY {
            "within"
        } else {
            "outside"
        };
        println!("standard T = {t}: dE = {de:.2e} ({ok} chemical accuracy)");
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
