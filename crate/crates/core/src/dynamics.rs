//! Time-dependent Schrodinger propagation and exact diagonalisation.
//!
//! Each sub-step applies `exp(-i H(t_mid) dt)`. Propagation runs inside the
//! subspace reachable from the initial state under the three Hamiltonian
//! pieces, so particle-number and spin sectors are never materialised in
//! full. Small subspaces use a dense exponential; larger ones use Lanczos.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, KrylovOptions};
use crate::pauli::{PauliSum, DEFAULT_DENSE_CAP};
use crate::schedule::{AnnealSpec, Schedule};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Allowed deviation of the norm from one at an exposed boundary.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-8;
/// Largest restricted dimension that uses the dense exponential.
pub const DENSE_PROPAGATION_DIM: usize = 16;

/// Truncation threshold for Taylor steps, relative to the state norm.
const TAYLOR_TOLERANCE: f64 = 1e-15;
/// Matrix elements below this are treated as structural zeros.
const ELEMENT_THRESHOLD: f64 = 1e-13;
/// Allowed imaginary part of an expectation value.
const IMAGINARY_RESIDUAL: f64 = 1e-10;

/// A normalized pure state on the full `2^n` register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, limit: dim });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes, requiring a power-of-two length and unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(1),
                got: dim,
            });
        }
        let norm = linalg::norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_DRIFT_TOLERANCE {
            return Err(Error::Unnormalized { norm });
        }
        Ok(StateVector {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Unnormalized { norm });
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: other.amplitudes.len(),
            });
        }
        Ok(linalg::dot(&self.amplitudes, &other.amplitudes))
    }

    /// Basis indices with nonzero amplitude.
    pub fn support(&self) -> Vec<usize> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// `<psi|H|psi>`, rejecting a non-negligible imaginary part.
pub fn expectation(state: &StateVector, h: &PauliSum) -> Result<f64> {
    if h.n_qubits() != state.n_qubits {
        return Err(Error::QubitMismatch {
            left: state.n_qubits,
            right: h.n_qubits(),
        });
    }
    let hpsi = h.apply(&state.amplitudes)?;
    real_part(linalg::dot(&state.amplitudes, &hpsi))
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_RESIDUAL * (1.0 + z.re.abs()) {
        return Err(Error::NotHermitian(format!(
            "expectation has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Ascending eigenvalues with optional eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<Complex64>>,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `E_1 - E_0`, or zero for a one-dimensional space.
    pub fn gap(&self) -> f64 {
        match self.eigenvalues.as_slice() {
            [e0, e1, ..] => e1 - e0,
            _ => 0.0,
        }
    }

    /// The `k`-th eigenvector, if kept.
    pub fn state(&self, k: usize) -> Option<Vec<Complex64>> {
        self.eigenvectors
            .as_ref()
            .filter(|v| k < v.ncols())
            .map(|v| v.column(k).iter().copied().collect())
    }

    fn truncate(mut self, k: Option<usize>) -> Self {
        if let Some(k) = k {
            self.eigenvalues.truncate(k);
            if let Some(v) = self.eigenvectors.as_mut() {
                let keep = k.min(v.ncols());
                *v = v.columns(0, keep).into_owned();
            }
        }
        self
    }
}

/// Lowest `k` eigenpairs (all if `None`) of the dense matrix of `h`.
pub fn full_spectrum(h: &PauliSum, k: Option<usize>) -> Result<Spectrum> {
    let m = h.to_matrix_capped(DEFAULT_DENSE_CAP)?;
    let (eigenvalues, vectors) = linalg::hermitian_eigen(m);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(vectors),
    }
    .truncate(k))
}

/// A set of computational basis states closed under some operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    n_qubits: usize,
    basis: Vec<usize>,
    lookup: HashMap<usize, usize>,
}

impl Subspace {
    /// The whole register.
    pub fn full(n_qubits: usize) -> Self {
        Self::from_basis(n_qubits, (0..1usize << n_qubits).collect())
    }

    fn from_basis(n_qubits: usize, mut basis: Vec<usize>) -> Self {
        basis.sort_unstable();
        basis.dedup();
        let lookup = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        Subspace {
            n_qubits,
            basis,
            lookup,
        }
    }

    /// States reachable from `seeds` by repeated application of any of
    /// `operators`. Terms are grouped by their bit-flip pattern so that
    /// cancelling contributions (such as `XX + YY` on `|00>`) add no edge.
    pub fn reachable(n_qubits: usize, seeds: &[usize], operators: &[&PauliSum]) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut groups: Vec<Vec<(u64, Vec<(u64, u64, Complex64)>)>> = Vec::new();
        for op in operators {
            if op.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: op.n_qubits(),
                });
            }
            let mut by_flip: BTreeMap<u64, Vec<(u64, u64, Complex64)>> = BTreeMap::new();
            for (s, c) in op.terms() {
                if s.x_mask() != 0 {
                    by_flip
                        .entry(s.x_mask())
                        .or_default()
                        .push((s.x_mask(), s.z_mask(), *c));
                }
            }
            groups.push(by_flip.into_iter().collect());
        }
        let mut seen: HashMap<usize, ()> = HashMap::new();
        let mut frontier = Vec::new();
        for &s in seeds {
            if s >= dim {
                return Err(Error::IndexOutOfRange {
                    index: s,
                    limit: dim,
                });
            }
            if seen.insert(s, ()).is_none() {
                frontier.push(s);
            }
        }
        while let Some(b) = frontier.pop() {
            for op in &groups {
                for (flip, terms) in op {
                    let target = b ^ *flip as usize;
                    if seen.contains_key(&target) {
                        continue;
                    }
                    let amp: Complex64 = terms
                        .iter()
                        .map(|&(x, z, c)| {
                            let (phase, _) = crate::pauli::PauliString::from_masks(n_qubits, x, z)
                                .apply_basis(b);
                            c * phase
                        })
                        .sum();
                    if amp.norm() > ELEMENT_THRESHOLD {
                        seen.insert(target, ());
                        frontier.push(target);
                    }
                }
            }
        }
        Ok(Self::from_basis(n_qubits, seen.into_keys().collect()))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn position(&self, full_index: usize) -> Option<usize> {
        self.lookup.get(&full_index).copied()
    }

    /// Projects a full-register vector onto the subspace, failing if any
    /// weight would be lost.
    pub fn restrict(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        let amps = state.amplitudes();
        if amps.len() != 1usize << self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1usize << self.n_qubits,
                got: amps.len(),
            });
        }
        for (i, a) in amps.iter().enumerate() {
            if a.norm() > ELEMENT_THRESHOLD && self.position(i).is_none() {
                return Err(Error::SubspaceLeak { index: i });
            }
        }
        Ok(self.basis.iter().map(|&b| amps[b]).collect())
    }

    /// Embeds a subspace vector into the full register.
    pub fn embed(&self, local: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; 1usize << self.n_qubits];
        for (&b, &a) in self.basis.iter().zip(local) {
            out[b] = a;
        }
        out
    }

    /// Nonzero matrix elements `(row, col, value)` of `h` in this subspace.
    pub fn restrict_operator(&self, h: &PauliSum) -> Result<Vec<(usize, usize, Complex64)>> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: h.n_qubits(),
            });
        }
        let terms: Vec<_> = h.terms().map(|(s, c)| (*s, *c)).collect();
        let mut out = Vec::new();
        let mut column: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (col, &b) in self.basis.iter().enumerate() {
            column.clear();
            for (s, c) in &terms {
                let (phase, target) = s.apply_basis(b);
                *column.entry(target).or_insert(ZERO) += c * phase;
            }
            for (&target, &v) in &column {
                if v.norm() <= ELEMENT_THRESHOLD {
                    continue;
                }
                match self.position(target) {
                    Some(row) => out.push((row, col, v)),
                    None => return Err(Error::SubspaceLeak { index: target }),
                }
            }
        }
        Ok(out)
    }

    /// Dense matrix of `h` restricted to this subspace.
    pub fn dense_operator(&self, h: &PauliSum) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (r, c, v) in self.restrict_operator(h)? {
            m[(r, c)] += v;
        }
        Ok(m)
    }

    /// Eigenpairs of `h` inside this subspace, eigenvectors embedded in the
    /// full register.
    pub fn spectrum(&self, h: &PauliSum, k: Option<usize>) -> Result<Spectrum> {
        let (eigenvalues, local) = linalg::hermitian_eigen(self.dense_operator(h)?);
        let dim = 1usize << self.n_qubits;
        let mut vectors = DMatrix::<Complex64>::zeros(dim, local.ncols());
        for (i, &b) in self.basis.iter().enumerate() {
            for j in 0..local.ncols() {
                vectors[(b, j)] = local[(i, j)];
            }
        }
        Ok(Spectrum {
            eigenvalues,
            eigenvectors: Some(vectors),
        }
        .truncate(k))
    }
}

/// Compressed-row sparsity pattern shared by several operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePattern {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
}

impl SparsePattern {
    /// Union pattern of the given `(row, col)` positions; diagonal included.
    pub fn from_positions(dim: usize, positions: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rows: Vec<Vec<usize>> = (0..dim).map(|i| vec![i]).collect();
        for (r, c) in positions {
            rows[r].push(c);
        }
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            indices.extend(row);
            indptr.push(indices.len());
        }
        SparsePattern {
            dim,
            indptr,
            indices,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Slot of `(row, col)` in the value arrays.
    pub fn slot(&self, row: usize, col: usize) -> Option<usize> {
        let lo = self.indptr[row];
        let hi = self.indptr[row + 1];
        self.indices[lo..hi]
            .binary_search(&col)
            .ok()
            .map(|k| lo + k)
    }

    /// Scatters triplets into a value array aligned with this pattern.
    pub fn values(&self, triplets: &[(usize, usize, Complex64)]) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; self.nnz()];
        for &(r, c, v) in triplets {
            let k = self.slot(r, c).ok_or(Error::SubspaceLeak { index: r })?;
            out[k] += v;
        }
        Ok(out)
    }
}

/// `A(t) ini + B(t) fin + C(t) nav` as three value arrays on one pattern.
#[derive(Debug, Clone)]
pub struct PathOperator {
    pattern: SparsePattern,
    ini: Vec<Complex64>,
    fin: Vec<Complex64>,
    nav: Vec<Complex64>,
}

impl PathOperator {
    pub fn new(
        pattern: SparsePattern,
        ini: Vec<Complex64>,
        fin: Vec<Complex64>,
        nav: Vec<Complex64>,
    ) -> Result<Self> {
        for v in [&ini, &fin, &nav] {
            if v.len() != pattern.nnz() {
                return Err(Error::DimensionMismatch {
                    expected: pattern.nnz(),
                    got: v.len(),
                });
            }
        }
        Ok(PathOperator {
            pattern,
            ini,
            fin,
            nav,
        })
    }

    /// Restricts an [`AnnealSpec`]'s three pieces to `subspace`.
    pub fn from_spec(spec: &AnnealSpec, subspace: &Subspace) -> Result<Self> {
        let ini = subspace.restrict_operator(spec.h_ini())?;
        let fin = subspace.restrict_operator(spec.h_fin())?;
        let nav = subspace.restrict_operator(spec.h_nav())?;
        let pattern = SparsePattern::from_positions(
            subspace.dim(),
            ini.iter().chain(&fin).chain(&nav).map(|&(r, c, _)| (r, c)),
        );
        let ini = pattern.values(&ini)?;
        let fin = pattern.values(&fin)?;
        let nav = pattern.values(&nav)?;
        Self::new(pattern, ini, fin, nav)
    }

    pub fn pattern(&self) -> &SparsePattern {
        &self.pattern
    }

    pub fn dim(&self) -> usize {
        self.pattern.dim
    }

    fn is_real(&self) -> bool {
        self.ini
            .iter()
            .chain(&self.fin)
            .chain(&self.nav)
            .all(|v| v.im == 0.0)
    }

    /// `<v|fin|v>` for a subspace vector.
    pub fn final_expectation(&self, v: &[Complex64]) -> Result<f64> {
        let mut w = vec![ZERO; v.len()];
        csr_matvec(&self.pattern, &self.fin, v, &mut w);
        real_part(linalg::dot(v, &w))
    }
}

fn csr_matvec(p: &SparsePattern, vals: &[Complex64], x: &[Complex64], y: &mut [Complex64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        let mut acc = ZERO;
        for k in p.indptr[i]..p.indptr[i + 1] {
            acc += vals[k] * x[p.indices[k]];
        }
        *yi = acc;
    }
}

fn csr_matvec_real(p: &SparsePattern, vals: &[f64], x: &[Complex64], y: &mut [Complex64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        let (mut re, mut im) = (0.0, 0.0);
        for k in p.indptr[i]..p.indptr[i + 1] {
            let v = vals[k];
            let xj = x[p.indices[k]];
            re += v * xj.re;
            im += v * xj.im;
        }
        *yi = Complex64::new(re, im);
    }
}

/// Midpoint-exponential propagator for one [`PathOperator`] and schedule.
pub struct Propagator<'a> {
    op: &'a PathOperator,
    schedule: Schedule,
    n_steps: usize,
    real: bool,
    krylov: KrylovOptions,
    /// Max absolute row sums of the initial, final and navigator parts.
    row_norms: [f64; 3],
}

impl<'a> Propagator<'a> {
    pub fn new(op: &'a PathOperator, schedule: Schedule, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::Config("n_time_steps must be positive".into()));
        }
        Ok(Propagator {
            op,
            schedule,
            n_steps,
            real: op.is_real(),
            krylov: KrylovOptions::default(),
            row_norms: [&op.ini, &op.fin, &op.nav].map(|v| max_row_sum(&op.pattern, v)),
        })
    }

    /// Advances `psi` from `t0` to `t1` with `steps` equal sub-steps.
    fn advance(&self, psi: &mut Vec<Complex64>, t0: f64, t1: f64, steps: usize) -> Result<()> {
        let dt = (t1 - t0) / steps as f64;
        let nnz = self.op.pattern.nnz();
        let mut vals = vec![ZERO; nnz];
        let mut vals_re = vec![0.0; if self.real { nnz } else { 0 }];
        for k in 0..steps {
            let t_mid = (t0 + (k as f64 + 0.5) * dt).min(self.schedule.total_time());
            let (a, b, c) = self.schedule.evaluate(t_mid)?;
            if self.real {
                for (j, v) in vals_re.iter_mut().enumerate() {
                    *v = a * self.op.ini[j].re + b * self.op.fin[j].re + c * self.op.nav[j].re;
                }
            } else {
                for (j, v) in vals.iter_mut().enumerate() {
                    *v = self.op.ini[j] * a + self.op.fin[j] * b + self.op.nav[j] * c;
                }
            }
            if self.op.dim() <= DENSE_PROPAGATION_DIM {
                let n = self.op.dim();
                let p = &self.op.pattern;
                let mut m = DMatrix::<Complex64>::zeros(n, n);
                for i in 0..n {
                    for s in p.indptr[i]..p.indptr[i + 1] {
                        let v = if self.real {
                            Complex64::new(vals_re[s], 0.0)
                        } else {
                            vals[s]
                        };
                        m[(i, p.indices[s])] = v * Complex64::new(0.0, -dt);
                    }
                }
                let u = linalg::expm(&m);
                let next: Vec<Complex64> = (0..n)
                    .map(|i| (0..n).map(|j| u[(i, j)] * psi[j]).sum())
                    .collect();
                *psi = next;
            } else {
                let bound = a.abs() * self.row_norms[0]
                    + b.abs() * self.row_norms[1]
                    + c.abs() * self.row_norms[2];
                let taylor = dt * bound <= linalg::TAYLOR_MAX_NORM;
                let step = |mv: &mut dyn FnMut(&[Complex64], &mut [Complex64])| {
                    if taylor {
                        linalg::taylor_expm_multiply(mv, psi, dt, TAYLOR_TOLERANCE)
                    } else {
                        linalg::expm_multiply(mv, psi, dt, self.krylov)
                    }
                };
                let next = if self.real {
                    step(&mut |x, y| csr_matvec_real(&self.op.pattern, &vals_re, x, y))
                } else {
                    step(&mut |x, y| csr_matvec(&self.op.pattern, &vals, x, y))
                };
                *psi = next;
            }
        }
        Ok(())
    }

    /// Propagates a subspace vector over `[0, T]`, returning it
    /// renormalized after checking the drift.
    pub fn run(&self, psi0: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(psi0)?;
        let mut psi = psi0.to_vec();
        self.advance(&mut psi, 0.0, self.schedule.total_time(), self.n_steps)?;
        checked_normalize(psi)
    }

    /// Samples at `n_samples` uniform times including both endpoints.
    pub fn trace(
        &self,
        psi0: &[Complex64],
        n_samples: usize,
    ) -> Result<Vec<(f64, Vec<Complex64>)>> {
        self.check_len(psi0)?;
        if n_samples < 2 {
            return Err(Error::Config("a trace needs at least two samples".into()));
        }
        let segments = n_samples - 1;
        let per_segment = self.n_steps.div_ceil(segments);
        let total = self.schedule.total_time();
        let mut psi = psi0.to_vec();
        let mut out = Vec::with_capacity(n_samples);
        out.push((0.0, checked_normalize(psi.clone())?));
        for k in 0..segments {
            let t0 = total * k as f64 / segments as f64;
            let t1 = if k + 1 == segments {
                total
            } else {
                total * (k + 1) as f64 / segments as f64
            };
            self.advance(&mut psi, t0, t1, per_segment)?;
            out.push((t1, checked_normalize(psi.clone())?));
        }
        Ok(out)
    }

    fn check_len(&self, psi0: &[Complex64]) -> Result<()> {
        if psi0.len() != self.op.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.op.dim(),
                got: psi0.len(),
            });
        }
        Ok(())
    }
}

fn max_row_sum(p: &SparsePattern, vals: &[Complex64]) -> f64 {
    (0..p.dim)
        .map(|i| {
            (p.indptr[i]..p.indptr[i + 1])
                .map(|k| vals[k].norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn checked_normalize(mut psi: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let norm = linalg::norm(&psi);
    let drift = (norm - 1.0).abs();
    if !(drift <= NORM_DRIFT_TOLERANCE) {
        return Err(Error::NormDrift { drift });
    }
    psi.iter_mut().for_each(|a| *a /= norm);
    Ok(psi)
}

fn prepare(
    spec: &AnnealSpec,
    psi0: &StateVector,
) -> Result<(Subspace, PathOperator, Vec<Complex64>)> {
    if psi0.n_qubits() != spec.n_qubits() {
        return Err(Error::QubitMismatch {
            left: spec.n_qubits(),
            right: psi0.n_qubits(),
        });
    }
    let subspace = Subspace::reachable(
        spec.n_qubits(),
        &psi0.support(),
        &[spec.h_ini(), spec.h_fin(), spec.h_nav()],
    )?;
    let op = PathOperator::from_spec(spec, &subspace)?;
    let local = subspace.restrict(psi0)?;
    Ok((subspace, op, local))
}

/// `psi(T)` under the spec's time-dependent Hamiltonian.
pub fn evolve(spec: &AnnealSpec, psi0: &StateVector) -> Result<StateVector> {
    let (subspace, op, local) = prepare(spec, psi0)?;
    let out = Propagator::new(&op, *spec.schedule(), spec.n_time_steps())?.run(&local)?;
    StateVector::new(subspace.embed(&out))
}

/// `psi(t)` at `n_samples` uniform times from `0` to `T`.
pub fn evolve_trace(
    spec: &AnnealSpec,
    psi0: &StateVector,
    n_samples: usize,
) -> Result<Vec<(f64, StateVector)>> {
    let (subspace, op, local) = prepare(spec, psi0)?;
    Propagator::new(&op, *spec.schedule(), spec.n_time_steps())?
        .trace(&local, n_samples)?
        .into_iter()
        .map(|(t, v)| Ok((t, StateVector::new(subspace.embed(&v))?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn constant_spec(h: &str, total: f64) -> AnnealSpec {
        let h = PauliSum::from_real(&[(h, 1.0)]).unwrap();
        let n = h.n_qubits();
        AnnealSpec::new(
            h.clone(),
            h,
            PauliSum::zero(n),
            Schedule::new(total).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn eigenstate_only_gains_phase() {
        let spec = constant_spec("Z", 3.7);
        let psi0 = StateVector::basis(1, 0).unwrap();
        let out = evolve(&spec, &psi0).unwrap();
        assert!((out.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_rotation_flips() {
        let spec = constant_spec("X", FRAC_PI_2);
        let out = evolve(&spec, &StateVector::basis(1, 0).unwrap()).unwrap();
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_endpoints_match_evolve() {
        let h_ini = PauliSum::from_real(&[("ZI", 1.0), ("IZ", 0.5)]).unwrap();
        let h_fin = PauliSum::from_real(&[("XX", 0.7), ("ZZ", 0.2), ("XI", 0.3)]).unwrap();
        let spec =
            AnnealSpec::new(h_ini, h_fin, PauliSum::zero(2), Schedule::new(2.0).unwrap()).unwrap();
        let psi0 = StateVector::basis(2, 3).unwrap();
        let trace = evolve_trace(&spec, &psi0, 2).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0].1, psi0);
        let end = evolve(&spec, &psi0).unwrap();
        for (a, b) in trace[1].1.amplitudes().iter().zip(end.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn spectrum_examples() {
        let s = full_spectrum(&PauliSum::from_real(&[("Z", 1.0)]).unwrap(), None).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
        assert_eq!(s.gap(), 2.0);
        let capped = PauliSum::identity(DEFAULT_DENSE_CAP + 1, 1.0);
        assert!(matches!(
            full_spectrum(&capped, Some(1)),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn expectation_examples() {
        let psi = StateVector::normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)])
            .unwrap();
        let c = PauliSum::identity(1, 2.5);
        assert!((expectation(&psi, &c).unwrap() - 2.5).abs() < 1e-15);
        let y = PauliSum::from_real(&[("Y", 1.0)]).unwrap();
        assert!((expectation(&psi, &y).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            expectation(&psi, &PauliSum::zero(2)),
            Err(Error::QubitMismatch { .. })
        ));
    }

    #[test]
    fn reachable_skips_cancelling_terms() {
        // XX + YY annihilates |00> and |11>, so |00> is isolated.
        let hop = PauliSum::from_real(&[("XX", 0.5), ("YY", 0.5)]).unwrap();
        let s = Subspace::reachable(2, &[0], &[&hop]).unwrap();
        assert_eq!(s.basis(), &[0]);
        let s = Subspace::reachable(2, &[1], &[&hop]).unwrap();
        assert_eq!(s.basis(), &[1, 2]);
        assert!(matches!(
            s.restrict_operator(&PauliSum::from_real(&[("XI", 1.0)]).unwrap()),
            Err(Error::SubspaceLeak { .. })
        ));
    }

    #[test]
    fn subspace_spectrum_embeds() {
        let hop = PauliSum::from_real(&[("XX", 0.5), ("YY", 0.5), ("ZI", 0.1)]).unwrap();
        let s = Subspace::reachable(2, &[1], &[&hop]).unwrap();
        let spec = s.spectrum(&hop, Some(1)).unwrap();
        let v = StateVector::new(spec.state(0).unwrap()).unwrap();
        assert!((expectation(&v, &hop).unwrap() - spec.ground_energy()).abs() < 1e-12);
    }

    #[test]
    fn krylov_path_agrees_with_dense() {
        // Five qubits with a full-register subspace exceeds the dense limit.
        let h_ini = PauliSum::from_real(&[
            ("ZIIII", 1.0),
            ("IZIII", 0.8),
            ("IIZII", 0.6),
            ("IIIZI", 0.4),
            ("IIIIZ", 0.2),
        ])
        .unwrap();
        let h_fin = PauliSum::from_real(&[
            ("XXIII", 0.3),
            ("IYYII", 0.4),
            ("IIXXI", 0.5),
            ("IIIZX", 0.6),
            ("XIIIX", 0.2),
            ("ZZZZZ", 0.1),
        ])
        .unwrap();
        let nav = PauliSum::from_real(&[("YXIII", 0.3), ("IIIXY", -0.2)]).unwrap();
        let spec = AnnealSpec::with_steps(
            h_ini.clone(),
            h_fin.clone(),
            nav.clone(),
            Schedule::new(1.5).unwrap(),
            400,
        )
        .unwrap();
        let psi0 = StateVector::basis(5, 0).unwrap();
        let krylov = evolve(&spec, &psi0).unwrap();
        let subspace = Subspace::reachable(5, &[0], &[&h_ini, &h_fin, &nav]).unwrap();
        assert!(subspace.dim() > DENSE_PROPAGATION_DIM);

        // Independent dense reference: explicit midpoint exponentials.
        let dt = 1.5 / 400.0;
        let mut psi = nalgebra::DVector::from_column_slice(psi0.amplitudes());
        for k in 0..400 {
            let h = spec.hamiltonian_at((k as f64 + 0.5) * dt).unwrap();
            let u = linalg::expm(&(h.to_matrix().unwrap() * Complex64::new(0.0, -dt)));
            psi = u * psi;
        }
        for (a, b) in krylov.amplitudes().iter().zip(psi.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn drift_guard_trips() {
        let op = PathOperator::new(
            SparsePattern::from_positions(1, []),
            vec![ZERO],
            vec![ZERO],
            vec![ZERO],
        )
        .unwrap();
        let prop = Propagator::new(&op, Schedule::new(1.0).unwrap(), 1).unwrap();
        assert!(matches!(
            prop.run(&[Complex64::new(1.1, 0.0)]),
            Err(Error::NormDrift { .. })
        ));
    }
}
