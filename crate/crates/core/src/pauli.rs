//! Weighted sums of n-qubit Pauli strings.
//!
//! Qubit 0 is the leftmost tensor factor and the most significant bit of a
//! computational-basis index. Strings are stored as X/Z bitmasks laid out in
//! basis-index bit order, so applying a string to `|b>` is a XOR and a parity.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped on simplification.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Default qubit cap for dense matrix realization.
pub const DEFAULT_DENSE_CAP: usize = 14;

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 64;

const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommuteMode {
    /// Operator commutation `ab == ba`.
    Full,
    /// Every per-qubit letter pair commutes; sufficient for `Full`.
    QubitWise,
}

/// A tensor product of single-qubit Paulis, without phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(
            (1..=MAX_QUBITS).contains(&n_qubits),
            "PauliString supports 1..={MAX_QUBITS} qubits"
        );
        PauliString {
            n_qubits,
            x: 0,
            z: 0,
        }
    }

    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.set(qubit, letter);
        s
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (q, &p) in letters.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Builds a string from raw masks in basis-index bit order.
    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Self {
        let s = Self::identity(n_qubits);
        let valid = s.full_mask();
        PauliString {
            n_qubits,
            x: x & valid,
            z: z & valid,
        }
    }

    fn full_mask(&self) -> u64 {
        if self.n_qubits == 64 {
            u64::MAX
        } else {
            (1u64 << self.n_qubits) - 1
        }
    }

    #[inline]
    fn bit(&self, qubit: usize) -> u64 {
        1u64 << (self.n_qubits - 1 - qubit)
    }

    pub fn set(&mut self, qubit: usize, letter: Pauli) {
        assert!(qubit < self.n_qubits, "qubit {qubit} out of range");
        let b = self.bit(qubit);
        let (x, z) = letter.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        let b = self.bit(qubit);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n_qubits).map(move |q| self.letter(q))
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// True when the string is built only from `I` and `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    fn check(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Returns `(phase, product)` with `phase * product == self * other`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        self.check(other)?;
        Ok(self.multiply_unchecked(other))
    }

    pub(crate) fn multiply_unchecked(&self, other: &PauliString) -> (Complex64, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // sigma(x, z) = i^{|x&z|} X^x Z^z and Z^a X^b = (-1)^{|a&b|} X^b Z^a.
        let exp = (self.x & self.z).count_ones() as i64
            + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x & z).count_ones() as i64;
        let product = PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
        };
        (i_pow(exp), product)
    }

    pub fn commutes(&self, other: &PauliString, mode: CommuteMode) -> Result<bool> {
        self.check(other)?;
        Ok(match mode {
            CommuteMode::Full => {
                ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
            }
            CommuteMode::QubitWise => {
                let overlap = (self.x | self.z) & (other.x | other.z);
                ((self.x ^ other.x) | (self.z ^ other.z)) & overlap == 0
            }
        })
    }

    /// Action on a basis state: `P|b> = phase |target>`.
    #[inline]
    pub fn apply_basis(&self, b: usize) -> (Complex64, usize) {
        let b64 = b as u64;
        let exp = (self.x & self.z).count_ones() as i64 + 2 * (b64 & self.z).count_ones() as i64;
        (i_pow(exp), (b64 ^ self.x) as usize)
    }

    /// `<psi|P|psi>` for a normalized state.
    pub fn expectation(&self, state: &[Complex64]) -> Result<f64> {
        let dim = 1usize << self.n_qubits;
        if state.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: state.len(),
            });
        }
        let norm = state.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Unnormalized { norm });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in state.iter().enumerate() {
            let (phase, target) = self.apply_basis(b);
            acc += state[target].conj() * phase * amp;
        }
        Ok(acc.re)
    }
}

#[inline]
fn i_pow(exp: i64) -> Complex64 {
    match exp.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidPauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return Err(Error::InvalidPauli(s.to_string()));
        }
        Ok(PauliString::from_letters(&letters))
    }
}

/// A complex-weighted sum of Pauli strings on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        // Validates the register size.
        let _ = PauliString::identity(n_qubits);
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        Self::from_terms(
            n_qubits,
            [(PauliString::identity(n_qubits), Complex64::new(coeff, 0.0))],
        )
        .expect("identity term matches register")
    }

    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliString, Complex64)>,
    ) -> Result<Self> {
        let mut sum = Self::zero(n_qubits);
        for (s, c) in terms {
            if s.n_qubits != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: s.n_qubits,
                });
            }
            sum.accumulate(s, c);
        }
        sum.prune();
        Ok(sum)
    }

    /// Convenience constructor from `(letters, real coefficient)` pairs.
    pub fn from_real(terms: &[(&str, f64)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|(s, c)| Ok((s.parse::<PauliString>()?, Complex64::new(*c, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed
            .first()
            .map(|(s, _)| s.n_qubits)
            .ok_or_else(|| Error::InvalidPauli(String::new()))?;
        Self::from_terms(n, parsed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Adds without pruning; call [`PauliSum::prune`] when done.
    pub(crate) fn accumulate(&mut self, s: PauliString, c: Complex64) {
        *self.terms.entry(s).or_default() += c;
    }

    pub(crate) fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    fn check(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.accumulate(*s, *c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        for (s, c) in &self.terms {
            out.accumulate(*s, c * factor);
        }
        out.prune();
        out
    }

    pub fn scale_real(&self, factor: f64) -> PauliSum {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (phase, p) = a.multiply_unchecked(b);
                out.accumulate(p, phase * ca * cb);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if !a.commutes(b, CommuteMode::Full)? {
                    let (phase, p) = a.multiply_unchecked(b);
                    out.accumulate(p, 2.0 * phase * ca * cb);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
        }
    }

    /// All coefficients real to within `tol`, i.e. the operator is Hermitian.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Drops imaginary parts, failing if any exceeds `tol`.
    pub fn into_real(self, tol: f64) -> Result<PauliSum> {
        if let Some((s, c)) = self.terms.iter().find(|(_, c)| c.im.abs() > tol) {
            return Err(Error::NotHermitian(format!("term {s} has coefficient {c}")));
        }
        let mut out = PauliSum::zero(self.n_qubits);
        for (s, c) in self.terms {
            out.accumulate(s, Complex64::new(c.re, 0.0));
        }
        out.prune();
        Ok(out)
    }

    /// Sum of coefficient magnitudes, optionally skipping the identity.
    pub fn coefficient_norm(&self, include_identity: bool) -> f64 {
        self.terms
            .iter()
            .filter(|(s, _)| include_identity || !s.is_identity())
            .map(|(_, c)| c.norm())
            .sum()
    }

    /// Largest coefficient difference between two sums on the same register.
    pub fn max_abs_diff(&self, other: &PauliSum) -> Result<f64> {
        self.check(other)?;
        let diff = self.sub(other)?;
        Ok(diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max))
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > cap {
            return Err(Error::DimensionCap {
                n_qubits: self.n_qubits,
                cap,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (s, c) in &self.terms {
            for b in 0..dim {
                let (phase, target) = s.apply_basis(b);
                m[(target, b)] += c * phase;
            }
        }
        Ok(m)
    }

    /// Matrix-free `H|psi>` on the full register.
    pub fn apply(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        if state.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: state.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (s, c) in &self.terms {
            for (b, amp) in state.iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let (phase, target) = s.apply_basis(b);
                out[target] += c * phase * amp;
            }
        }
        Ok(out)
    }

    /// Line-oriented text form: `<re> <im> <letters>` per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            out.push_str(&format!("{:?} {:?} {}\n", c.re, c.im, s));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut terms = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [re, im, letters] = fields[..] else {
                return Err(Error::InvalidPauli(line.to_string()));
            };
            let re: f64 = re
                .parse()
                .map_err(|_| Error::InvalidPauli(line.to_string()))?;
            let im: f64 = im
                .parse()
                .map_err(|_| Error::InvalidPauli(line.to_string()))?;
            terms.push((letters.parse::<PauliString>()?, Complex64::new(re, im)));
        }
        let n = terms
            .first()
            .map(|(s, _)| s.n_qubits)
            .ok_or_else(|| Error::InvalidPauli("empty Pauli sum text".into()))?;
        PauliSum::from_terms(n, terms)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(ps("X").multiply(&ps("Y")).unwrap(), (c(0.0, 1.0), ps("Z")));
        assert_eq!(ps("Z").multiply(&ps("Z")).unwrap(), (c(1.0, 0.0), ps("I")));
        assert_eq!(ps("Y").multiply(&ps("X")).unwrap(), (c(0.0, -1.0), ps("Z")));
        assert_eq!(
            ps("XI").multiply(&ps("IZ")).unwrap(),
            (c(1.0, 0.0), ps("XZ"))
        );
    }

    #[test]
    fn multiply_rejects_mismatch() {
        assert!(matches!(
            ps("X").multiply(&ps("XX")),
            Err(Error::QubitMismatch { .. })
        ));
    }

    #[test]
    fn add_examples() {
        let x = PauliSum::from_real(&[("X", 1.0)]).unwrap();
        let two = x.add(&x).unwrap();
        assert_eq!(two.coefficient(&ps("X")), c(2.0, 0.0));

        let neg = PauliSum::from_real(&[("X", -1.0)]).unwrap();
        assert!(x.add(&neg).unwrap().is_empty());

        let z = PauliSum::from_real(&[("Z", 0.5)]).unwrap();
        let x4 = PauliSum::from_real(&[("X", 0.25)]).unwrap();
        let s = z.add(&x4).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.coefficient(&ps("Z")), c(0.5, 0.0));
        assert_eq!(s.coefficient(&ps("X")), c(0.25, 0.0));
    }

    #[test]
    fn commutation_examples() {
        let full = CommuteMode::Full;
        assert!(!ps("X").commutes(&ps("Y"), full).unwrap());
        assert!(ps("ZI").commutes(&ps("IX"), full).unwrap());
        assert!(ps("IIXX").commutes(&ps("IXXI"), full).unwrap());
        // Fully commuting but not qubit-wise.
        assert!(ps("XX").commutes(&ps("YY"), full).unwrap());
        assert!(!ps("XX")
            .commutes(&ps("YY"), CommuteMode::QubitWise)
            .unwrap());
        assert!(ps("IIXX")
            .commutes(&ps("IXXI"), CommuteMode::QubitWise)
            .unwrap());
    }

    #[test]
    fn matrix_examples() {
        let z = PauliSum::from_real(&[("Z", 1.0)])
            .unwrap()
            .to_matrix()
            .unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
        assert_eq!(z[(0, 1)], c(0.0, 0.0));

        let id = PauliSum::identity(3, 0.7).to_matrix().unwrap();
        assert_eq!(id, DMatrix::identity(8, 8) * c(0.7, 0.0));

        // X (x) X by hand: anti-diagonal ones.
        let xx = PauliSum::from_real(&[("XX", 1.0)])
            .unwrap()
            .to_matrix()
            .unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let expected = if r + col == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(r, col)], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // Z on qubit 0 of two qubits is diag(1, 1, -1, -1).
        let m = PauliSum::from_real(&[("ZI", 1.0)])
            .unwrap()
            .to_matrix()
            .unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn y_matrix() {
        let y = PauliSum::from_real(&[("Y", 1.0)])
            .unwrap()
            .to_matrix()
            .unwrap();
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
    }

    #[test]
    fn dense_cap_enforced() {
        let h = PauliSum::identity(5, 1.0);
        assert!(matches!(
            h.to_matrix_capped(4),
            Err(Error::DimensionCap {
                n_qubits: 5,
                cap: 4
            })
        ));
    }

    #[test]
    fn string_expectations() {
        let zero = [c(1.0, 0.0), c(0.0, 0.0)];
        let one = [c(0.0, 0.0), c(1.0, 0.0)];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(h, 0.0), c(h, 0.0)];
        assert_eq!(ps("Z").expectation(&zero).unwrap(), 1.0);
        assert_eq!(ps("Z").expectation(&one).unwrap(), -1.0);
        assert!((ps("X").expectation(&plus).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_errors() {
        let bad = [c(1.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(
            ps("Z").expectation(&bad),
            Err(Error::Unnormalized { .. })
        ));
        assert!(matches!(
            ps("ZZ").expectation(&[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn text_form() {
        let h = PauliSum::from_real(&[("ZIII", 0.2422208402), ("XXYY", -0.5)]).unwrap();
        let text = h.to_text();
        assert!(text.contains("0.2422208402 0.0 ZIII"));
        assert_eq!(PauliSum::from_text(&text).unwrap(), h);
        assert!(PauliSum::from_text("1.0 ZZ").is_err());
    }

    #[test]
    fn commutator_matches_products() {
        let a = PauliSum::from_real(&[("XZ", 0.3), ("YI", -1.2)]).unwrap();
        let b = PauliSum::from_real(&[("ZZ", 0.7), ("XY", 0.1)]).unwrap();
        let direct = a.mul(&b).unwrap().sub(&b.mul(&a).unwrap()).unwrap();
        assert!(direct.max_abs_diff(&a.commutator(&b).unwrap()).unwrap() < 1e-14);
    }
}
