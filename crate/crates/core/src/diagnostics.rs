//! Instantaneous spectra along an anneal, the adiabatic condition, and
//! qubit-wise commuting measurement groups.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, Spectrum, StateVector, Subspace};
use crate::error::{Error, Result};
use crate::pauli::{CommuteMode, Pauli, PauliString, PauliSum};
use crate::schedule::AnnealSpec;

/// Gaps below this make the ground space degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;
/// Gaps below this make the adiabatic ratio unbounded.
pub const BOUND_GAP_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTrace {
    /// `(t, E_1(t) - E_0(t))`.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTrace {
    /// `(t, |<phi_0(t)|psi(t)>|)`.
    pub samples: Vec<(f64, f64)>,
    /// Sample indices where the instantaneous ground space was degenerate.
    pub degenerate: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub s: f64,
    pub value: f64,
    /// The gap fell below the floor; `value` is infinite.
    pub singular: bool,
}

fn sample_times(spec: &AnnealSpec, n_samples: usize) -> Result<Vec<f64>> {
    if n_samples < 2 {
        return Err(Error::Config("need at least two samples".into()));
    }
    let total = spec.schedule().total_time();
    Ok((0..n_samples)
        .map(|k| {
            if k + 1 == n_samples {
                total
            } else {
                total * k as f64 / (n_samples - 1) as f64
            }
        })
        .collect())
}

fn check_sector(spec: &AnnealSpec, sector: &Subspace) -> Result<()> {
    if sector.n_qubits() != spec.n_qubits() {
        return Err(Error::QubitMismatch {
            left: spec.n_qubits(),
            right: sector.n_qubits(),
        });
    }
    if sector.n_qubits() > crate::pauli::DEFAULT_DENSE_CAP {
        return Err(Error::DimensionCap {
            n_qubits: sector.n_qubits(),
            cap: crate::pauli::DEFAULT_DENSE_CAP,
        });
    }
    Ok(())
}

/// The sector the dynamics of `psi0` under `spec` can reach.
pub fn dynamical_sector(spec: &AnnealSpec, psi0: &StateVector) -> Result<Subspace> {
    Subspace::reachable(
        spec.n_qubits(),
        &psi0.support(),
        &[spec.h_ini(), spec.h_fin(), spec.h_nav()],
    )
}

/// Instantaneous gap at `n_samples` uniform times, diagonalising inside
/// `sector` (use [`Subspace::full`] for the whole register).
pub fn gap_trace(spec: &AnnealSpec, n_samples: usize, sector: &Subspace) -> Result<GapTrace> {
    check_sector(spec, sector)?;
    let samples = sample_times(spec, n_samples)?
        .into_iter()
        .map(|t| {
            let spectrum = sector.spectrum(&spec.hamiltonian_at(t)?, Some(2))?;
            Ok((t, spectrum.gap().max(0.0)))
        })
        .collect::<Result<_>>()?;
    Ok(GapTrace { samples })
}

/// Norm of the projection of `psi` onto the (possibly degenerate)
/// ground space of `spectrum`.
fn ground_overlap(spectrum: &Spectrum, psi: &StateVector) -> Result<(f64, bool)> {
    let e0 = spectrum.ground_energy();
    let mut weight = 0.0;
    let mut count = 0;
    for (k, &e) in spectrum.eigenvalues.iter().enumerate() {
        if e - e0 >= DEGENERACY_TOLERANCE {
            break;
        }
        let phi = StateVector::new(spectrum.state(k).expect("eigenvectors kept"))?;
        weight += phi.inner(psi)?.norm_sqr();
        count += 1;
    }
    Ok((weight.sqrt().min(1.0), count > 1))
}

/// Overlap of `psi(t)` with the instantaneous ground space, with both
/// taken inside the sector reachable from `psi0`.
pub fn overlap_trace(
    spec: &AnnealSpec,
    psi0: &StateVector,
    n_samples: usize,
) -> Result<OverlapTrace> {
    let sector = dynamical_sector(spec, psi0)?;
    check_sector(spec, &sector)?;
    let trace = dynamics::evolve_trace(spec, psi0, n_samples)?;
    let mut samples = Vec::with_capacity(trace.len());
    let mut degenerate = Vec::new();
    for (k, (t, psi)) in trace.iter().enumerate() {
        let spectrum = sector.spectrum(&spec.hamiltonian_at(*t)?, None)?;
        let (overlap, degen) = ground_overlap(&spectrum, psi)?;
        if degen {
            degenerate.push(k);
        }
        samples.push((*t, overlap));
    }
    Ok(OverlapTrace {
        samples,
        degenerate,
    })
}

/// `|<phi_1(s)| dH/ds |phi_0(s)>| / (E_1 - E_0)^2` at uniform `s`.
pub fn adiabatic_bound(
    spec: &AnnealSpec,
    n_samples: usize,
    sector: &Subspace,
) -> Result<Vec<BoundSample>> {
    check_sector(spec, sector)?;
    let total = spec.schedule().total_time();
    sample_times(spec, n_samples)?
        .into_iter()
        .map(|t| {
            let s = if t == total { 1.0 } else { t / total };
            let spectrum = sector.spectrum(&spec.hamiltonian_at(t)?, Some(2))?;
            let gap = spectrum.gap();
            if spectrum.eigenvalues.len() < 2 || gap < BOUND_GAP_FLOOR {
                return Ok(BoundSample {
                    s,
                    value: f64::INFINITY,
                    singular: true,
                });
            }
            let phi0 = StateVector::new(spectrum.state(0).expect("kept"))?;
            let phi1 = StateVector::new(spectrum.state(1).expect("kept"))?;
            let dh = spec.derivative_at(s)?.apply(phi0.amplitudes())?;
            let element: Complex64 = phi1
                .amplitudes()
                .iter()
                .zip(&dh)
                .map(|(a, b)| a.conj() * b)
                .sum();
            Ok(BoundSample {
                s,
                value: element.norm() / (gap * gap),
                singular: false,
            })
        })
        .collect()
}

/// Single-qubit change of basis applied before a Z-basis measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rotation {
    None,
    /// Hadamard.
    XToZ,
    /// Hadamard after `S^dagger`.
    YToZ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGroup {
    pub terms: Vec<(PauliString, Complex64)>,
    /// One entry per qubit.
    pub rotations: Vec<Rotation>,
}

impl MeasurementGroup {
    /// `sum c <psi|P|psi>` over the group, measured in the rotated basis.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let n = self.rotations.len();
        if state.n_qubits() != n {
            return Err(Error::QubitMismatch {
                left: n,
                right: state.n_qubits(),
            });
        }
        let rotated = rotate(state.amplitudes(), &self.rotations);
        let mut acc = 0.0;
        for (s, c) in &self.terms {
            let zmask = (s.x_mask() | s.z_mask()) as usize;
            let parity_sum: f64 = rotated
                .iter()
                .enumerate()
                .map(|(b, a)| {
                    let sign = if (b & zmask).count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    sign * a.norm_sqr()
                })
                .sum();
            acc += c.re * parity_sum;
        }
        Ok(acc)
    }
}

fn rotate(amps: &[Complex64], rotations: &[Rotation]) -> Vec<Complex64> {
    let n = rotations.len();
    let mut out = amps.to_vec();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (q, rot) in rotations.iter().enumerate() {
        if *rot == Rotation::None {
            continue;
        }
        let bit = 1usize << (n - 1 - q);
        for b in 0..out.len() {
            if b & bit != 0 {
                continue;
            }
            let (mut a0, mut a1) = (out[b], out[b | bit]);
            if *rot == Rotation::YToZ {
                a1 *= Complex64::new(0.0, -1.0);
            }
            a0 *= h;
            a1 *= h;
            out[b] = a0 + a1;
            out[b | bit] = a0 - a1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGrouping {
    pub groups: Vec<MeasurementGroup>,
}

impl MeasurementGrouping {
    pub fn n_terms(&self) -> usize {
        self.groups.iter().map(|g| g.terms.len()).sum()
    }

    /// Sum of per-group rotated-basis expectations.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        self.groups.iter().map(|g| g.expectation(state)).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, g) in self.groups.iter().enumerate() {
            let plan: String = g
                .rotations
                .iter()
                .map(|r| match r {
                    Rotation::None => '-',
                    Rotation::XToZ => 'X',
                    Rotation::YToZ => 'Y',
                })
                .collect();
            out.push_str(&format!(
                "group {k} rotate {plan} ({} terms)\n",
                g.terms.len()
            ));
            for (s, c) in &g.terms {
                out.push_str(&format!("  {s} {:+.10}\n", c.re));
            }
        }
        out
    }
}

/// Greedy first-fit partition of `h` into mutually commuting groups,
/// taking terms in order of decreasing coefficient magnitude.
pub fn group_commuting(h: &PauliSum, mode: CommuteMode) -> MeasurementGrouping {
    let mut terms: Vec<(PauliString, Complex64)> = h.terms().map(|(s, c)| (*s, *c)).collect();
    terms.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()).then(a.0.cmp(&b.0)));
    let mut groups: Vec<Vec<(PauliString, Complex64)>> = Vec::new();
    for (s, c) in terms {
        let slot = groups.iter_mut().find(|g| {
            g.iter()
                .all(|(t, _)| s.commutes(t, mode).expect("same register"))
        });
        match slot {
            Some(g) => g.push((s, c)),
            None => groups.push(vec![(s, c)]),
        }
    }
    let n = h.n_qubits();
    MeasurementGrouping {
        groups: groups
            .into_iter()
            .map(|terms| {
                let rotations = (0..n)
                    .map(|q| {
                        let letter = terms
                            .iter()
                            .map(|(s, _)| s.letter(q))
                            .find(|l| matches!(l, Pauli::X | Pauli::Y));
                        match letter {
                            Some(Pauli::X) => Rotation::XToZ,
                            Some(Pauli::Y) => Rotation::YToZ,
                            _ => Rotation::None,
                        }
                    })
                    .collect();
                MeasurementGroup { terms, rotations }
            })
            .collect(),
    }
}

/// `t,value` rows preceded by a provenance comment.
pub fn trace_csv(samples: &[(f64, f64)], config_hash: &str) -> String {
    let mut out = format!("# config_hash={config_hash}\nt,value\n");
    for (t, v) in samples {
        out.push_str(&format!("{t:.6},{v:.10e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Schedule;

    fn qubit_spec(total: f64) -> AnnealSpec {
        AnnealSpec::new(
            PauliSum::from_real(&[("Z", 1.0)]).unwrap(),
            PauliSum::from_real(&[("X", 1.0)]).unwrap(),
            PauliSum::zero(1),
            Schedule::new(total).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn single_qubit_gap_closed_form() {
        let spec = qubit_spec(2.0);
        let trace = gap_trace(&spec, 11, &Subspace::full(1)).unwrap();
        for (t, gap) in trace.samples {
            let (a, b, _) = spec.schedule().evaluate(t).unwrap();
            assert!((gap - 2.0 * (a * a + b * b).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_bound_closed_form() {
        // H = A Z + B X has eigenvectors at angle phi = atan2(B, A); the
        // matrix element of dH/ds = A' Z + B' X between them is
        // A' sin(phi) - B' cos(phi) up to sign.
        let spec = qubit_spec(1.0);
        for sample in adiabatic_bound(&spec, 9, &Subspace::full(1)).unwrap() {
            let s = sample.s;
            let (a, b) = (1.0 - s * s, s * s);
            let (da, db) = (-2.0 * s, 2.0 * s);
            let r = (a * a + b * b).sqrt();
            let expected = (da * b - db * a).abs() / r / (2.0 * r).powi(2);
            assert!((sample.value - expected).abs() < 1e-10, "s {s}");
        }
    }

    #[test]
    fn symmetric_spec_bound_vanishes() {
        let z = PauliSum::from_real(&[("ZI", 1.0), ("IZ", 0.3)]).unwrap();
        let spec =
            AnnealSpec::new(z.clone(), z, PauliSum::zero(2), Schedule::new(1.0).unwrap()).unwrap();
        for sample in adiabatic_bound(&spec, 5, &Subspace::full(2)).unwrap() {
            assert!(sample.value.abs() < 1e-14);
        }
    }

    #[test]
    fn overlap_starts_at_one() {
        let spec = qubit_spec(3.0);
        let psi0 = StateVector::basis(1, 1).unwrap();
        let trace = overlap_trace(&spec, &psi0, 6).unwrap();
        assert!((trace.samples[0].1 - 1.0).abs() < 1e-12);
        assert!(trace
            .samples
            .iter()
            .all(|(_, o)| *o <= 1.0 + 1e-10 && *o >= 0.0));
    }

    #[test]
    fn degenerate_ground_space_uses_projection() {
        let h = PauliSum::from_real(&[("ZI", 1.0)]).unwrap();
        let spectrum = dynamics::full_spectrum(&h, None).unwrap();
        let psi = StateVector::normalized(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ])
        .unwrap();
        let (overlap, degen) = ground_overlap(&spectrum, &psi).unwrap();
        assert!(degen);
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grouping_examples() {
        let h = PauliSum::from_real(&[("IIXX", 1.0), ("IXXI", 0.5)]).unwrap();
        let g = group_commuting(&h, CommuteMode::QubitWise);
        assert_eq!(g.groups.len(), 1);
        assert_eq!(
            g.groups[0].rotations,
            vec![
                Rotation::None,
                Rotation::XToZ,
                Rotation::XToZ,
                Rotation::XToZ
            ]
        );

        let diag = PauliSum::from_real(&[("ZI", 0.2), ("IZ", 0.3), ("II", 1.0)]).unwrap();
        let g = group_commuting(&diag, CommuteMode::QubitWise);
        assert_eq!(g.groups.len(), 1);
        assert!(g.groups[0].rotations.iter().all(|r| *r == Rotation::None));

        let xy = PauliSum::from_real(&[("XX", 1.0), ("YY", 1.0)]).unwrap();
        assert_eq!(group_commuting(&xy, CommuteMode::QubitWise).groups.len(), 2);
        assert_eq!(group_commuting(&xy, CommuteMode::Full).groups.len(), 1);
    }

    #[test]
    fn grouped_expectation_matches() {
        let h = PauliSum::from_real(&[
            ("XY", 0.4),
            ("YI", -0.7),
            ("ZZ", 0.25),
            ("IX", 1.1),
            ("II", 0.3),
        ])
        .unwrap();
        let psi = StateVector::normalized(vec![
            Complex64::new(0.1, 0.4),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.5, -0.1),
            Complex64::new(0.2, 0.6),
        ])
        .unwrap();
        let g = group_commuting(&h, CommuteMode::QubitWise);
        let direct = dynamics::expectation(&psi, &h).unwrap();
        assert!((g.expectation(&psi).unwrap() - direct).abs() < 1e-12);
    }
}
