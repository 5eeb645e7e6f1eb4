// From a bundled FCIDUMP to qubit Hamiltonians for H2: the molecular
// Hamiltonian, the Moller-Plesset starting Hamiltonian, their ground
// energies and the Hartree-Fock reference.
//
// ```bash
// cargo run --example h2_hamiltonians
// ```

use vanqver::dynamics::{expectation, full_spectrum};
use vanqver::fermion::{build_final_hamiltonian, build_mp_hamiltonian, hartree_fock_eta};
use vanqver::{fixtures, Result};

pub fn run_example() -> Result<()> {
    let fixture = fixtures::load("h2")?;
    let map = fixture.orbital_map()?;
    println!(
        "{}: {} spin-orbitals, occupied {:?}",
        fixture.name(),
        map.n_spin_orbitals(),
        map.occupied()
    );

    let h_fin = build_final_hamiltonian(&fixture.integrals, &map)?;
    let h_mp = build_mp_hamiltonian(&fixture.integrals, &map)?;
    println!("H_fin: {} Pauli terms\n{}", h_fin.len(), h_fin.to_text());
    println!("H_MP:\n{}", h_mp.to_text());
    println!("eta_HF = {:?}", hartree_fock_eta(&fixture.integrals, &map)?);

    let spectrum = full_spectrum(&h_fin, Some(1))?;
    let reference =
        vanqver::dynamics::StateVector::basis(map.n_spin_orbitals(), map.reference_state())?;
    println!(
        "E_FCI = {:.10} (sidecar {:.10})",
        spectrum.ground_energy(),
        fixture.metadata.fci_energy
    );
    println!(
        "E_HF  = {:.10} (sidecar {:.10})",
        expectation(&reference, &h_fin)?,
        fixture.metadata.hf_energy
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
