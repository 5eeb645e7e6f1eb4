macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(pauli_algebra, "pauli_algebra.rs");
example!(h2_hamiltonians, "h2_hamiltonians.rs");
example!(h2_vanqver_vs_standard, "h2_vanqver_vs_standard.rs");
example!(navigator_diagnostics, "navigator_diagnostics.rs");
example!(measurement_grouping, "measurement_grouping.rs");

#[test]
fn pauli_algebra_runs() {
    pauli_algebra::run_example().expect("pauli example should run");
}

#[test]
fn h2_hamiltonians_runs() {
    h2_hamiltonians::run_example().expect("hamiltonian example should run");
}

#[test]
fn h2_comparison_runs() {
    h2_vanqver_vs_standard::run_example().expect("comparison example should run");
}

#[test]
fn navigator_diagnostics_runs() {
    navigator_diagnostics::run_example().expect("diagnostics example should run");
}

#[test]
fn measurement_grouping_runs() {
    measurement_grouping::run_example().expect("grouping example should run");
}
