//! Second-quantized operators and the molecular Hamiltonians built from them.
//!
//! Spin-orbital `p` maps to qubit `p`. A qubit in `|1>` is an occupied
//! spin-orbital, and the Jordan-Wigner Z-chain runs over qubits `< p`:
//!
//! ```text
//! a_p  -> (X_p + iY_p)/2 * Z_0 ... Z_{p-1}
//! a+_p -> (X_p - iY_p)/2 * Z_0 ... Z_{p-1}
//! ```

mod fcidump;

pub use fcidump::{parse_fcidump, IntegralSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Imaginary parts above this are a construction bug, not round-off.
const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

/// How spatial orbitals and spins are laid out on qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// `0up, 0down, 1up, 1down, ...`
    #[default]
    Interleaved,
    /// All spin-up orbitals, then all spin-down.
    Blocked,
}

impl std::str::FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "interleaved" => Ok(Ordering::Interleaved),
            "blocked" => Ok(Ordering::Blocked),
            other => Err(Error::OrbitalMap(format!("unknown ordering {other:?}"))),
        }
    }
}

/// Closed-shell aufbau partition of spin-orbitals into occupied and virtual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinOrbitalMap {
    ordering: Ordering,
    n_spatial: usize,
    occupied: Vec<usize>,
    virtual_: Vec<usize>,
}

impl SpinOrbitalMap {
    /// Fills the lowest spatial orbitals, spin-up first for an odd electron.
    pub fn aufbau(ordering: Ordering, n_spatial: usize, n_electrons: usize) -> Result<Self> {
        if n_spatial == 0 || n_electrons > 2 * n_spatial {
            return Err(Error::OrbitalMap(format!(
                "{n_electrons} electrons in {n_spatial} spatial orbitals"
            )));
        }
        let mut occupied = Vec::with_capacity(n_electrons);
        for k in 0..n_electrons {
            let spin = if k % 2 == 0 { Spin::Up } else { Spin::Down };
            occupied.push(spin_orbital(ordering, n_spatial, k / 2, spin));
        }
        Self::new(ordering, n_spatial, occupied)
    }

    pub fn new(ordering: Ordering, n_spatial: usize, mut occupied: Vec<usize>) -> Result<Self> {
        let n = 2 * n_spatial;
        occupied.sort_unstable();
        occupied.dedup();
        if let Some(&bad) = occupied.iter().find(|&&p| p >= n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                limit: n,
            });
        }
        let virtual_ = (0..n)
            .filter(|p| occupied.binary_search(p).is_err())
            .collect();
        Ok(SpinOrbitalMap {
            ordering,
            n_spatial,
            occupied,
            virtual_,
        })
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.occupied.len()
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn virtual_orbitals(&self) -> &[usize] {
        &self.virtual_
    }

    pub fn is_occupied(&self, p: usize) -> bool {
        self.occupied.binary_search(&p).is_ok()
    }

    pub fn index(&self, spatial: usize, spin: Spin) -> usize {
        spin_orbital(self.ordering, self.n_spatial, spatial, spin)
    }

    pub fn spatial(&self, p: usize) -> usize {
        match self.ordering {
            Ordering::Interleaved => p / 2,
            Ordering::Blocked => p % self.n_spatial,
        }
    }

    pub fn spin(&self, p: usize) -> Spin {
        let up = match self.ordering {
            Ordering::Interleaved => p % 2 == 0,
            Ordering::Blocked => p < self.n_spatial,
        };
        if up {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    /// Computational-basis index of the reference determinant.
    pub fn reference_state(&self) -> usize {
        let n = self.n_spin_orbitals();
        self.occupied.iter().map(|p| 1usize << (n - 1 - p)).sum()
    }

    /// `+1` on occupied qubits, `-1` on virtual ones: the sign pattern of
    /// `eta` whose `sum eta_p Z_p` ground state is the reference determinant.
    pub fn sign_mask(&self) -> Vec<f64> {
        (0..self.n_spin_orbitals())
            .map(|p| if self.is_occupied(p) { 1.0 } else { -1.0 })
            .collect()
    }
}

fn spin_orbital(ordering: Ordering, n_spatial: usize, spatial: usize, spin: Spin) -> usize {
    match (ordering, spin) {
        (Ordering::Interleaved, Spin::Up) => 2 * spatial,
        (Ordering::Interleaved, Spin::Down) => 2 * spatial + 1,
        (Ordering::Blocked, Spin::Up) => spatial,
        (Ordering::Blocked, Spin::Down) => n_spatial + spatial,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub index: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(index: usize) -> Self {
        Ladder {
            index,
            dagger: true,
        }
    }

    pub fn annihilate(index: usize) -> Self {
        Ladder {
            index,
            dagger: false,
        }
    }
}

/// A linear combination of ladder-operator products, in written order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionOperator {
    terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl FermionOperator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(coeff: f64, ladders: impl Into<Vec<Ladder>>) -> Self {
        FermionOperator {
            terms: vec![(Complex64::new(coeff, 0.0), ladders.into())],
        }
    }

    pub fn push(&mut self, coeff: Complex64, ladders: impl Into<Vec<Ladder>>) {
        self.terms.push((coeff, ladders.into()));
    }

    pub fn terms(&self) -> &[(Complex64, Vec<Ladder>)] {
        &self.terms
    }

    pub fn extend(&mut self, other: FermionOperator) {
        self.terms.extend(other.terms);
    }

    /// Reverses each product, daggers each factor and conjugates the weight.
    pub fn hermitian_conjugate(&self) -> FermionOperator {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|(c, ladders)| {
                    let flipped = ladders
                        .iter()
                        .rev()
                        .map(|l| Ladder {
                            index: l.index,
                            dagger: !l.dagger,
                        })
                        .collect();
                    (c.conj(), flipped)
                })
                .collect(),
        }
    }
}

/// Precomputed Jordan-Wigner images of every ladder operator on a register.
pub struct JordanWigner {
    n: usize,
    lowering: Vec<[(PauliString, Complex64); 2]>,
    raising: Vec<[(PauliString, Complex64); 2]>,
}

impl JordanWigner {
    pub fn new(n_spin_orbitals: usize) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let half_i = Complex64::new(0.0, 0.5);
        let mut lowering = Vec::with_capacity(n_spin_orbitals);
        let mut raising = Vec::with_capacity(n_spin_orbitals);
        for p in 0..n_spin_orbitals {
            let mut x = PauliString::identity(n_spin_orbitals);
            for q in 0..p {
                x.set(q, Pauli::Z);
            }
            let mut y = x;
            x.set(p, Pauli::X);
            y.set(p, Pauli::Y);
            lowering.push([(x, half), (y, half_i)]);
            raising.push([(x, half), (y, -half_i)]);
        }
        JordanWigner {
            n: n_spin_orbitals,
            lowering,
            raising,
        }
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.n
    }

    fn image(&self, l: Ladder) -> &[(PauliString, Complex64); 2] {
        if l.dagger {
            &self.raising[l.index]
        } else {
            &self.lowering[l.index]
        }
    }

    /// Adds `coeff * product(ladders)` into `out` without pruning.
    pub(crate) fn accumulate_product(
        &self,
        out: &mut PauliSum,
        coeff: Complex64,
        ladders: &[Ladder],
    ) -> Result<()> {
        if let Some(bad) = ladders.iter().find(|l| l.index >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: bad.index,
                limit: self.n,
            });
        }
        let mut partial = vec![(PauliString::identity(self.n), coeff)];
        for &l in ladders {
            let image = self.image(l);
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (s, c) in &partial {
                for (t, d) in image {
                    let (phase, p) = s.multiply_unchecked(t);
                    next.push((p, c * d * phase));
                }
            }
            partial = next;
        }
        for (s, c) in partial {
            out.accumulate(s, c);
        }
        Ok(())
    }

    pub fn transform(&self, op: &FermionOperator) -> Result<PauliSum> {
        let mut out = PauliSum::zero(self.n);
        for (c, ladders) in op.terms() {
            self.accumulate_product(&mut out, *c, ladders)?;
        }
        out.prune();
        Ok(out)
    }
}

/// Jordan-Wigner image of `op` on `n_spin_orbitals` qubits.
pub fn jordan_wigner(op: &FermionOperator, n_spin_orbitals: usize) -> Result<PauliSum> {
    JordanWigner::new(n_spin_orbitals).transform(op)
}

fn check_map(ints: &IntegralSet, map: &SpinOrbitalMap) -> Result<()> {
    if ints.n_spatial() != map.n_spatial() {
        return Err(Error::OrbitalMap(format!(
            "integrals have {} spatial orbitals, map has {}",
            ints.n_spatial(),
            map.n_spatial()
        )));
    }
    if ints.n_electrons() != map.n_electrons() {
        return Err(Error::OrbitalMap(format!(
            "integrals have {} electrons, map occupies {}",
            ints.n_electrons(),
            map.n_electrons()
        )));
    }
    Ok(())
}

/// Qubit form of the electronic Hamiltonian plus nuclear repulsion.
///
/// Spatial integrals are expanded spin-conservingly. With chemists'
/// `(ps|qr)` the two-body part is `1/2 sum (ps|qr) a+_p a+_q a_r a_s`,
/// nonzero only when spin(p) = spin(s) and spin(q) = spin(r).
pub fn build_final_hamiltonian(ints: &IntegralSet, map: &SpinOrbitalMap) -> Result<PauliSum> {
    check_map(ints, map)?;
    ints.validate()?;
    let n = map.n_spin_orbitals();
    let jw = JordanWigner::new(n);
    let mut out = PauliSum::identity(n, ints.e_nuclear());
    let spatial = |p: usize| map.spatial(p);
    let spin = |p: usize| map.spin(p);

    for p in 0..n {
        for q in 0..n {
            if spin(p) != spin(q) {
                continue;
            }
            let h = ints.one_body(spatial(p), spatial(q));
            if h != 0.0 {
                jw.accumulate_product(
                    &mut out,
                    Complex64::new(h, 0.0),
                    &[Ladder::create(p), Ladder::annihilate(q)],
                )?;
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            for r in 0..n {
                if spin(q) != spin(r) {
                    continue;
                }
                for s in 0..n {
                    if r == s || spin(p) != spin(s) {
                        continue;
                    }
                    let v = ints.two_body(spatial(p), spatial(s), spatial(q), spatial(r));
                    if v != 0.0 {
                        jw.accumulate_product(
                            &mut out,
                            Complex64::new(0.5 * v, 0.0),
                            &[
                                Ladder::create(p),
                                Ladder::create(q),
                                Ladder::annihilate(r),
                                Ladder::annihilate(s),
                            ],
                        )?;
                    }
                }
            }
        }
    }
    out.prune();
    out.into_real(HERMITIAN_TOLERANCE)
}

/// Diagonal Fock elements `f_pp = h_pp + sum_i ((pp|ii) - delta_spin (pi|ip))`
/// over occupied spin-orbitals `i`.
pub fn fock_diagonal(ints: &IntegralSet, map: &SpinOrbitalMap) -> Result<Vec<f64>> {
    check_map(ints, map)?;
    let n = map.n_spin_orbitals();
    Ok((0..n)
        .map(|p| {
            let sp = map.spatial(p);
            let mut f = ints.one_body(sp, sp);
            for &i in map.occupied() {
                let si = map.spatial(i);
                f += ints.two_body(sp, sp, si, si);
                if map.spin(i) == map.spin(p) {
                    f -= ints.two_body(sp, si, si, sp);
                }
            }
            f
        })
        .collect())
}

/// Canonical restricted Hartree-Fock Hamiltonian `sum_p f_pp a+_p a_p`.
///
/// The identity coefficient carries the nuclear repulsion, matching the
/// published H2 coefficients.
pub fn build_mp_hamiltonian(ints: &IntegralSet, map: &SpinOrbitalMap) -> Result<PauliSum> {
    let fock = fock_diagonal(ints, map)?;
    let n = map.n_spin_orbitals();
    let mut out = PauliSum::identity(n, ints.e_nuclear());
    for (p, f) in fock.iter().enumerate() {
        out.accumulate(PauliString::identity(n), Complex64::new(0.5 * f, 0.0));
        out.accumulate(
            PauliString::single(n, p, Pauli::Z),
            Complex64::new(-0.5 * f, 0.0),
        );
    }
    out.prune();
    Ok(out)
}

/// Z-coefficients of the Hartree-Fock Hamiltonian, `-f_pp / 2`.
pub fn hartree_fock_eta(ints: &IntegralSet, map: &SpinOrbitalMap) -> Result<Vec<f64>> {
    Ok(fock_diagonal(ints, map)?.iter().map(|f| -0.5 * f).collect())
}

/// `sum_p eta_p Z_p`, with `eta_p > 0` on occupied and `< 0` on virtual qubits.
pub fn build_initial_hamiltonian(eta: &[f64], map: &SpinOrbitalMap) -> Result<PauliSum> {
    let n = map.n_spin_orbitals();
    if eta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: eta.len(),
        });
    }
    let mut out = PauliSum::zero(n);
    for (p, (&e, &sign)) in eta.iter().zip(&map.sign_mask()).enumerate() {
        if !(e * sign > 0.0) {
            return Err(Error::SignConstraint { qubit: p, value: e });
        }
        out.accumulate(PauliString::single(n, p, Pauli::Z), Complex64::new(e, 0.0));
    }
    out.prune();
    Ok(out)
}

/// An occupied-to-virtual index pair or quadruple of the cluster operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Excitation {
    Single {
        occ: usize,
        vir: usize,
    },
    Double {
        occ: (usize, usize),
        vir: (usize, usize),
    },
}

impl Excitation {
    fn operator(&self) -> FermionOperator {
        match *self {
            Excitation::Single { occ, vir } => {
                FermionOperator::term(1.0, [Ladder::create(occ), Ladder::annihilate(vir)])
            }
            Excitation::Double {
                occ: (i, j),
                vir: (a, b),
            } => FermionOperator::term(
                1.0,
                [
                    Ladder::create(i),
                    Ladder::create(j),
                    Ladder::annihilate(a),
                    Ladder::annihilate(b),
                ],
            ),
        }
    }

    fn validate(&self, map: &SpinOrbitalMap) -> Result<()> {
        let (occ, vir): (Vec<usize>, Vec<usize>) = match *self {
            Excitation::Single { occ, vir } => (vec![occ], vec![vir]),
            Excitation::Double {
                occ: (i, j),
                vir: (a, b),
            } => {
                if i >= j || a >= b {
                    return Err(Error::Excitation(format!("{self:?} is not index-ordered")));
                }
                (vec![i, j], vec![a, b])
            }
        };
        let n = map.n_spin_orbitals();
        if occ.iter().chain(&vir).any(|&p| p >= n)
            || !occ.iter().all(|&p| map.is_occupied(p))
            || vir.iter().any(|&p| map.is_occupied(p))
        {
            return Err(Error::Excitation(format!("{self:?}")));
        }
        Ok(())
    }

    /// Hermitian generator `E + E^dagger` as a qubit operator.
    pub fn generator(&self, jw: &JordanWigner) -> Result<PauliSum> {
        let op = self.operator();
        let mut both = op.clone();
        both.extend(op.hermitian_conjugate());
        jw.transform(&both)?.into_real(HERMITIAN_TOLERANCE)
    }
}

/// Spin-conserving singles and index-ordered doubles for a partition.
///
/// Doubles keep `i < j`, `a < b`, and require the spin multiset of the
/// occupied pair to equal that of the virtual pair, so both same-spin and
/// opposite-spin blocks appear once each.
pub fn excitations(map: &SpinOrbitalMap) -> Vec<Excitation> {
    let occ = map.occupied();
    let vir = map.virtual_orbitals();
    let mut out = Vec::new();
    for &i in occ {
        for &a in vir {
            if map.spin(i) == map.spin(a) {
                out.push(Excitation::Single { occ: i, vir: a });
            }
        }
    }
    let spins = |p: usize, q: usize| {
        let mut s = [map.spin(p) as u8, map.spin(q) as u8];
        s.sort_unstable();
        s
    };
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in vir.iter().enumerate() {
                for &b in &vir[y + 1..] {
                    if spins(i, j) == spins(a, b) {
                        out.push(Excitation::Double {
                            occ: (i, j),
                            vir: (a, b),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Real amplitudes over a set of excitations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAmplitudes {
    excitations: Vec<Excitation>,
    values: Vec<f64>,
}

impl ClusterAmplitudes {
    /// All amplitudes zero over the default excitation set of `map`.
    pub fn zeros(map: &SpinOrbitalMap) -> Self {
        let excitations = excitations(map);
        let values = vec![0.0; excitations.len()];
        ClusterAmplitudes {
            excitations,
            values,
        }
    }

    pub fn new(excitations: Vec<Excitation>, values: Vec<f64>) -> Result<Self> {
        if excitations.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: excitations.len(),
                got: values.len(),
            });
        }
        Ok(ClusterAmplitudes {
            excitations,
            values,
        })
    }

    pub fn excitations(&self) -> &[Excitation] {
        &self.excitations
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Qubit image of `sum theta (E + E^dagger)` over the given amplitudes.
pub fn build_navigator(theta: &ClusterAmplitudes, map: &SpinOrbitalMap) -> Result<PauliSum> {
    let n = map.n_spin_orbitals();
    let jw = JordanWigner::new(n);
    let mut op = FermionOperator::new();
    for (exc, &t) in theta.excitations.iter().zip(&theta.values) {
        exc.validate(map)?;
        if t == 0.0 {
            continue;
        }
        let mut e = exc.operator();
        e.terms[0].0 = Complex64::new(t, 0.0);
        op.extend(e.hermitian_conjugate());
        op.extend(e);
    }
    jw.transform(&op)?.into_real(HERMITIAN_TOLERANCE)
}

/// Electron-number operators `(N, N_up, N_down)`.
pub fn number_operators(map: &SpinOrbitalMap) -> (PauliSum, PauliSum, PauliSum) {
    let n = map.n_spin_orbitals();
    let count = |keep: &dyn Fn(usize) -> bool| {
        let mut out = PauliSum::zero(n);
        for p in (0..n).filter(|&p| keep(p)) {
            out.accumulate(PauliString::identity(n), Complex64::new(0.5, 0.0));
            out.accumulate(
                PauliString::single(n, p, Pauli::Z),
                Complex64::new(-0.5, 0.0),
            );
        }
        out.prune();
        out
    };
    (
        count(&|_| true),
        count(&|p| map.spin(p) == Spin::Up),
        count(&|p| map.spin(p) == Spin::Down),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(terms: &[(&str, f64)]) -> PauliSum {
        PauliSum::from_real(terms).unwrap()
    }

    #[test]
    fn number_operator_image() {
        let op = FermionOperator::term(1.0, [Ladder::create(0), Ladder::annihilate(0)]);
        let h = jordan_wigner(&op, 1).unwrap();
        assert!(h.max_abs_diff(&sum(&[("I", 0.5), ("Z", -0.5)])).unwrap() < 1e-15);
    }

    #[test]
    fn hopping_image() {
        let mut op = FermionOperator::term(1.0, [Ladder::create(1), Ladder::annihilate(0)]);
        op.extend(FermionOperator::term(
            1.0,
            [Ladder::create(0), Ladder::annihilate(1)],
        ));
        let h = jordan_wigner(&op, 2).unwrap();
        assert!(h.max_abs_diff(&sum(&[("XX", 0.5), ("YY", 0.5)])).unwrap() < 1e-15);
    }

    #[test]
    fn anticommutator_is_identity() {
        let mut op = FermionOperator::term(1.0, [Ladder::annihilate(0), Ladder::create(0)]);
        op.extend(FermionOperator::term(
            1.0,
            [Ladder::create(0), Ladder::annihilate(0)],
        ));
        let h = jordan_wigner(&op, 1).unwrap();
        assert!(h.max_abs_diff(&sum(&[("I", 1.0)])).unwrap() < 1e-15);
    }

    #[test]
    fn jordan_wigner_index_check() {
        let op = FermionOperator::term(1.0, [Ladder::create(3)]);
        assert!(matches!(
            jordan_wigner(&op, 2),
            Err(Error::IndexOutOfRange { index: 3, limit: 2 })
        ));
    }

    #[test]
    fn orderings() {
        let inter = SpinOrbitalMap::aufbau(Ordering::Interleaved, 2, 2).unwrap();
        assert_eq!(inter.occupied(), &[0, 1]);
        assert_eq!(inter.virtual_orbitals(), &[2, 3]);
        assert_eq!(inter.reference_state(), 0b1100);
        assert_eq!(inter.sign_mask(), vec![1.0, 1.0, -1.0, -1.0]);

        let blocked = SpinOrbitalMap::aufbau(Ordering::Blocked, 2, 2).unwrap();
        assert_eq!(blocked.occupied(), &[0, 2]);
        assert_eq!(blocked.spin(2), Spin::Down);
        assert_eq!(blocked.spatial(3), 1);
        assert_eq!(blocked.reference_state(), 0b1010);
    }

    #[test]
    fn zero_integrals_give_constant() {
        let mut ints = IntegralSet::zeros(2, 2).unwrap();
        ints.set_e_nuclear(0.3);
        let map = SpinOrbitalMap::aufbau(Ordering::Interleaved, 2, 2).unwrap();
        let h = build_final_hamiltonian(&ints, &map).unwrap();
        assert_eq!(h, PauliSum::identity(4, 0.3));
    }

    #[test]
    fn single_orbital_mp() {
        // One spatial orbital, one electron: only the spin-up orbital is
        // occupied, f_00 = h_00 = 1 for both spin-orbitals.
        let mut ints = IntegralSet::zeros(1, 1).unwrap();
        ints.set_one_body(0, 0, 1.0);
        let map = SpinOrbitalMap::aufbau(Ordering::Interleaved, 1, 1).unwrap();
        let h = build_mp_hamiltonian(&ints, &map).unwrap();
        let expected = sum(&[("II", 1.0), ("ZI", -0.5), ("IZ", -0.5)]);
        assert!(h.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn initial_hamiltonian_signs() {
        let map = SpinOrbitalMap::aufbau(Ordering::Interleaved, 2, 2).unwrap();
        let h = build_initial_hamiltonian(&[1.0, 1.0, -1.0, -1.0], &map).unwrap();
        let diag: Vec<f64> = {
            let m = h.to_matrix().unwrap();
            (0..16).map(|i| m[(i, i)].re).collect()
        };
        let argmin = (0..16)
            .min_by(|&a, &b| diag[a].total_cmp(&diag[b]))
            .unwrap();
        assert_eq!(argmin, 0b1100);

        assert!(matches!(
            build_initial_hamiltonian(&[1.0, 0.0, -1.0, -1.0], &map),
            Err(Error::SignConstraint { qubit: 1, .. })
        ));
        assert!(matches!(
            build_initial_hamiltonian(&[-1.0, 1.0, -1.0, -1.0], &map),
            Err(Error::SignConstraint { qubit: 0, .. })
        ));
        assert!(build_initial_hamiltonian(&[1.0, 1.0], &map).is_err());
    }

    #[test]
    fn excitation_sets() {
        let map = SpinOrbitalMap::aufbau(Ordering::Interleaved, 2, 2).unwrap();
        let ex = excitations(&map);
        assert_eq!(
            ex,
            vec![
                Excitation::Single { occ: 0, vir: 2 },
                Excitation::Single { occ: 1, vir: 3 },
                Excitation::Double {
                    occ: (0, 1),
                    vir: (2, 3)
                },
            ]
        );
        let p4 = SpinOrbitalMap::aufbau(Ordering::Interleaved, 4, 4).unwrap();
        assert_eq!(excitations(&p4).len(), 8 + 18);
    }

    #[test]
    fn navigator_validation() {
        let map = SpinOrbitalMap::aufbau(Ordering::Interleaved, 2, 2).unwrap();
        assert!(build_navigator(&ClusterAmplitudes::zeros(&map), &map)
            .unwrap()
            .is_empty());
        let bad =
            ClusterAmplitudes::new(vec![Excitation::Single { occ: 2, vir: 0 }], vec![1.0]).unwrap();
        assert!(matches!(
            build_navigator(&bad, &map),
            Err(Error::Excitation(_))
        ));
    }

    #[test]
    fn number_operator_examples() {
        let map = SpinOrbitalMap::aufbau(Ordering::Interleaved, 1, 1).unwrap();
        let (n, up, down) = number_operators(&map);
        assert!(
            n.max_abs_diff(&sum(&[("II", 1.0), ("ZI", -0.5), ("IZ", -0.5)]))
                .unwrap()
                < 1e-15
        );
        assert!(up.add(&down).unwrap().max_abs_diff(&n).unwrap() < 1e-15);
    }
}
