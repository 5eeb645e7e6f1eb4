// Partition the P4 Hamiltonian into qubit-wise commuting groups and
// check that the grouped estimate of the Hartree-Fock energy matches the
// direct one.
//
// ```bash
// cargo run --example measurement_grouping
// ```

use vanqver::diagnostics::group_commuting;
use vanqver::dynamics::expectation;
use vanqver::pauli::CommuteMode;
use vanqver::vanqver::Problem;
use vanqver::{fixtures, Result};

pub fn run_example() -> Result<()> {
    let problem = Problem::from_fixture(&fixtures::p4(2.0)?)?;
    let h = problem.h_fin();
    let psi = problem.reference_state()?;
    for mode in [CommuteMode::QubitWise, CommuteMode::Full] {
        let grouping = group_commuting(h, mode);
        println!(
            "{mode:?}: {} terms in {} groups",
            grouping.n_terms(),
            grouping.groups.len()
        );
        let largest = grouping
            .groups
            .iter()
            .map(|g| g.terms.len())
            .max()
            .unwrap_or(0);
        println!("  largest group has {largest} terms");
        if mode == CommuteMode::QubitWise {
            let grouped = grouping.expectation(&psi)?;
            let direct = expectation(&psi, h)?;
            println!("  <HF|H|HF> grouped {grouped:.12}, direct {direct:.12}");
        }
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
