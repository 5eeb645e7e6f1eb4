mod common;

#[test]
fn jordan_wigner_anticommutation() {
    common::jordan_wigner_anticommutation().unwrap();
}

#[test]
fn unitarity_drift() {
    common::unitarity().unwrap();
}

#[test]
fn midpoint_second_order() {
    common::second_order_convergence().unwrap();
}

#[test]
fn schedule_endpoints() {
    common::schedule_endpoints().unwrap();
}

#[test]
fn grouping_partitions_and_reconstructs() {
    common::grouping().unwrap();
}

#[test]
fn variational_bound_on_random_parameters() {
    common::variational_bound().unwrap();
}

#[test]
fn particle_number_conserved_along_trace() {
    common::particle_number().unwrap();
}
