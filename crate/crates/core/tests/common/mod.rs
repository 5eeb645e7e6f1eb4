//! Invariant checks shared by the property tests and the acceptance run.
//! Each returns `Err` with a description of the first counterexample.

#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use vanqver::diagnostics::group_commuting;
use vanqver::dynamics::{evolve, evolve_trace, expectation, StateVector};
use vanqver::fermion::{
    jordan_wigner, number_operators, ClusterAmplitudes, FermionOperator, Ladder,
};
use vanqver::fixtures;
use vanqver::pauli::{CommuteMode, Pauli, PauliString, PauliSum};
use vanqver::schedule::{AnnealSpec, Profile, Schedule};
use vanqver::vanqver::{Problem, VariationalParams};

pub type Check = std::result::Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn report<T: std::fmt::Debug>(
    result: std::result::Result<(), proptest::test_runner::TestError<T>>,
) -> Check {
    result.map_err(|e| e.to_string())
}

fn ladder(p: usize, dagger: bool, n: usize) -> PauliSum {
    let l = if dagger {
        Ladder::create(p)
    } else {
        Ladder::annihilate(p)
    };
    jordan_wigner(&FermionOperator::term(1.0, [l]), n).unwrap()
}

fn anticommutator(a: &PauliSum, b: &PauliSum) -> PauliSum {
    a.mul(b).unwrap().add(&b.mul(a).unwrap()).unwrap()
}

/// Canonical anticommutation relations for every register of 1 to 4 modes.
pub fn jordan_wigner_anticommutation() -> Check {
    for n in 1..=4 {
        let identity = PauliSum::identity(n, 1.0);
        let zero = PauliSum::zero(n);
        for p in 0..n {
            for q in 0..n {
                let (ap, aq) = (ladder(p, false, n), ladder(q, false, n));
                let (cp, cq) = (ladder(p, true, n), ladder(q, true, n));
                let expected = if p == q { &identity } else { &zero };
                let errors = [
                    anticommutator(&ap, &cq).max_abs_diff(expected).unwrap(),
                    anticommutator(&ap, &aq).max_abs_diff(&zero).unwrap(),
                    anticommutator(&cp, &cq).max_abs_diff(&zero).unwrap(),
                ];
                if errors.iter().any(|&e| e > 1e-12) {
                    return Err(format!("n = {n}, p = {p}, q = {q}: {errors:?}"));
                }
            }
        }
    }
    Ok(())
}

fn letter() -> impl Strategy<Value = Pauli> {
    prop_oneof![
        Just(Pauli::I),
        Just(Pauli::X),
        Just(Pauli::Y),
        Just(Pauli::Z)
    ]
}

pub fn pauli_sum(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec(
        (prop::collection::vec(letter(), n), -1.0..1.0f64),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        let terms: Vec<_> = terms
            .into_iter()
            .map(|(l, c)| (PauliString::from_letters(&l), Complex64::new(c, 0.0)))
            .collect();
        PauliSum::from_terms(n, terms).unwrap()
    })
}

pub fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_filter_map(
        "zero vector",
        |v| {
            let amps: Vec<Complex64> = v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
            if amps.iter().map(|a| a.norm_sqr()).sum::<f64>() < 1e-3 {
                None
            } else {
                StateVector::normalized(amps).ok()
            }
        },
    )
}

fn spec_with_steps(
    ini: &PauliSum,
    fin: &PauliSum,
    nav: &PauliSum,
    t: f64,
    steps: usize,
) -> AnnealSpec {
    AnnealSpec::with_steps(
        ini.clone(),
        fin.clone(),
        nav.clone(),
        Schedule::new(t).unwrap(),
        steps,
    )
    .unwrap()
}

fn distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Norm stays within 1e-8 of one along random three-qubit anneals.
pub fn unitarity() -> Check {
    let strategy = (
        pauli_sum(3, 5),
        pauli_sum(3, 5),
        pauli_sum(3, 5),
        random_state(3),
        0.1..5.0f64,
    );
    report(runner(32).run(&strategy, |(ini, fin, nav, psi, t)| {
        let spec = AnnealSpec::new(ini, fin, nav, Schedule::new(t).unwrap()).unwrap();
        for (_, state) in evolve_trace(&spec, &psi, 9).unwrap() {
            prop_assert!((state.norm() - 1.0).abs() <= 1e-8, "norm {}", state.norm());
        }
        Ok(())
    }))
}

/// Halving the step doubles accuracy twice: error ratio 4 within 15%.
pub fn second_order_convergence() -> Check {
    let strategy = (
        pauli_sum(3, 4),
        pauli_sum(3, 4),
        pauli_sum(3, 4),
        random_state(3),
    );
    report(runner(24).run(&strategy, |(ini, fin, nav, psi)| {
        let t = 2.0;
        let reference = evolve(&spec_with_steps(&ini, &fin, &nav, t, 4096), &psi).unwrap();
        let coarse = evolve(&spec_with_steps(&ini, &fin, &nav, t, 64), &psi).unwrap();
        let fine = evolve(&spec_with_steps(&ini, &fin, &nav, t, 128), &psi).unwrap();
        let (e1, e2) = (distance(&coarse, &reference), distance(&fine, &reference));
        // A commuting path is integrated exactly; there is no rate to see.
        prop_assume!(e1 > 1e-9);
        let ratio = e1 / e2;
        prop_assert!((ratio - 4.0).abs() <= 0.6, "ratio {ratio}");
        Ok(())
    }))
}

pub fn schedule_endpoints() -> Check {
    report(
        runner(256).run(&(1e-3..1e3f64, 1e-3..10.0f64), |(t, alpha)| {
            let s = Schedule::with_alpha(t, alpha, Profile::Quadratic).unwrap();
            prop_assert_eq!(s.evaluate(0.0).unwrap(), (1.0, 0.0, 0.0));
            prop_assert_eq!(s.evaluate(t).unwrap(), (0.0, 1.0, 0.0));
            prop_assert_eq!(s.evaluate_fraction(1.0).unwrap(), (0.0, 1.0, 0.0));
            Ok(())
        }),
    )
}

/// Groups partition the terms, commute qubit-wise internally, regroup to
/// the same partition, and reproduce the expectation value.
pub fn grouping() -> Check {
    report(
        runner(64).run(&(pauli_sum(4, 24), random_state(4)), |(h, psi)| {
            let grouping = group_commuting(&h, CommuteMode::QubitWise);
            prop_assert!(grouping.groups.len() <= h.len());
            let mut seen = Vec::new();
            for group in &grouping.groups {
                for (a, _) in &group.terms {
                    for (b, _) in &group.terms {
                        prop_assert!(a.commutes(b, CommuteMode::QubitWise).unwrap());
                    }
                    seen.push(*a);
                }
            }
            seen.sort();
            let mut original: Vec<_> = h.terms().map(|(s, _)| *s).collect();
            original.sort();
            prop_assert_eq!(&seen, &original);

            let concatenated: Vec<_> = grouping
                .groups
                .iter()
                .flat_map(|g| g.terms.iter().cloned())
                .collect();
            let regrouped = group_commuting(
                &PauliSum::from_terms(4, concatenated).unwrap(),
                CommuteMode::QubitWise,
            );
            prop_assert_eq!(&regrouped, &grouping);

            let direct = expectation(&psi, &h).unwrap();
            let grouped = grouping.expectation(&psi).unwrap();
            prop_assert!((grouped - direct).abs() <= 1e-10, "{grouped} vs {direct}");
            Ok(())
        }),
    )
}

fn random_params(problem: &Problem, eta: &[f64], theta: &[f64]) -> VariationalParams {
    let mask = problem.orbital_map().sign_mask();
    let n = problem.excitations().len();
    VariationalParams {
        eta: mask.iter().zip(eta).map(|(m, e)| m * e).collect(),
        theta: ClusterAmplitudes::new(problem.excitations().to_vec(), theta[..n].to_vec()).unwrap(),
    }
}

fn params_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (
        prop::collection::vec(1e-3..3.0f64, 12),
        prop::collection::vec(-1.0..1.0f64, 92),
        0.01..2.0f64,
    )
}

/// No anneal from any parameters ends below the exact ground energy.
pub fn variational_bound() -> Check {
    for name in fixtures::list() {
        let problem = Problem::from_fixture(&fixtures::load(name).unwrap()).unwrap();
        report(runner(200).run(&params_strategy(), |(eta, theta, t)| {
            let params = random_params(&problem, &eta[..problem.n_qubits()], &theta);
            let e = problem
                .energy(&params, Schedule::new(t).unwrap(), Some(60))
                .unwrap();
            prop_assert!(
                e >= problem.e_fci() - 1e-9,
                "{name}: E = {e} below E_FCI = {}",
                problem.e_fci()
            );
            Ok(())
        }))?;
    }
    Ok(())
}

/// Total and per-spin electron counts stay fixed along anneal traces.
pub fn particle_number() -> Check {
    for name in ["h2", "p4_d0.8", "lih"] {
        let problem = Problem::from_fixture(&fixtures::load(name).unwrap()).unwrap();
        let (n_op, n_up, n_down) = number_operators(problem.orbital_map());
        let n_e = problem.orbital_map().n_electrons() as f64;
        let psi0 = problem.reference_state().unwrap();
        let cases = if problem.n_qubits() > 8 { 2 } else { 8 };
        report(runner(cases).run(&params_strategy(), |(eta, theta, t)| {
            let params = random_params(&problem, &eta[..problem.n_qubits()], &theta);
            let spec = problem
                .anneal_spec(&params, Schedule::new(t).unwrap(), Some(200))
                .unwrap();
            for (s, psi) in evolve_trace(&spec, &psi0, 6).unwrap() {
                for (op, expected) in [(&n_op, n_e), (&n_up, n_e / 2.0), (&n_down, n_e / 2.0)] {
                    let got = expectation(&psi, op).unwrap();
                    prop_assert!(
                        (got - expected).abs() <= 1e-7,
                        "{name} t = {s}: {got} vs {expected}"
                    );
                }
            }
            Ok(())
        }))?;
    }
    Ok(())
}
