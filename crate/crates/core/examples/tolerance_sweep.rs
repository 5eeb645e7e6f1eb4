// How the optimiser tolerance trades iterations for energy on P4 at
// d = 2.0, printed as the same CSV the `sweep` command writes.
//
// ```bash
// cargo run --release --example tolerance_sweep
// ```

use vanqver::vanqver::{sweep, Mode, OptimizeConfig, Problem, SweepVariable, SWEEP_CSV_HEADER};
use vanqver::{fixtures, Result};

pub fn run_example() -> Result<()> {
    let problem = Problem::from_fixture(&fixtures::p4(2.0)?)?;
    let variable = SweepVariable::Tolerance {
        tolerances: vec![1e-3, 5e-4, 1e-4],
        total_time: 0.04,
    };
    let rows = sweep(
        Some(&problem),
        &mut |d| Problem::from_fixture(&fixtures::p4(d)?),
        &variable,
        Mode::Vanqver,
        &OptimizeConfig::default(),
    )?;
    println!("{SWEEP_CSV_HEADER}");
    for row in &rows {
        println!("{}", row.csv_line());
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
