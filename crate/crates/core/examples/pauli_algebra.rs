// Pauli-string arithmetic: products with phases, commutation, and the
// sparse action of a Hamiltonian on a state.
//
// ```bash
// cargo run --example pauli_algebra
// ```

use vanqver::pauli::{CommuteMode, PauliString, PauliSum};
use vanqver::Result;

pub fn run_example() -> Result<()> {
    let xy = PauliSum::from_real(&[("XY", 1.0)])?;
    let yx = PauliSum::from_real(&[("YX", 1.0)])?;
    let (a, _) = xy.terms().next().unwrap();
    let (b, _) = yx.terms().next().unwrap();
    let (phase, product) = a.multiply(b)?;
    println!("XY * YX = ({phase}) {}", letters(&product));
    println!(
        "XY and YX commute fully: {}, qubit-wise: {}",
        a.commutes(b, CommuteMode::Full)?,
        a.commutes(b, CommuteMode::QubitWise)?
    );

    let h = PauliSum::from_real(&[("ZZ", 0.5), ("XI", 0.3), ("IX", 0.3), ("II", -1.0)])?;
    println!("H =\n{}", h.to_text());
    println!("[H, XY] has {} terms", h.commutator(&xy)?.len());

    // Apply H to |00> without building the 4x4 matrix.
    let mut psi = vec![num_complex::Complex64::new(0.0, 0.0); 4];
    psi[0] = 1.0.into();
    let h_psi = h.apply(&psi)?;
    for (k, amp) in h_psi.iter().enumerate() {
        if amp.norm() > 0.0 {
            println!("  <{k:02b}|H|00> = {:+.2}", amp.re);
        }
    }
    let dense = h.to_matrix()?;
    println!("dense trace = {:.2}", dense.trace().re);
    Ok(())
}

fn letters(s: &PauliString) -> String {
    s.letters().map(|p| p.as_char()).collect()
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
