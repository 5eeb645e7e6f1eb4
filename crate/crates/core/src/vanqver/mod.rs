//! The variational outer loop: optimise the initial and navigator
//! Hamiltonian parameters against the final energy, plus the standard
//! AQC baseline and the time-to-chemical-accuracy search.
//!
//! The optimiser works in action variables: `|eta_p| = floor + |v_p| / T`
//! and `theta_k = phi_k / T`. An anneal of duration `T` responds to the
//! products `eta T` and `theta T`, so these coordinates keep the energy
//! landscape well scaled at short times, where the raw gradients shrink
//! like `T^2`.

pub mod bfgs;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, PathOperator, Propagator, SparsePattern, StateVector, Subspace};
use crate::error::{Error, Result};
use crate::fermion::{
    self, ClusterAmplitudes, Excitation, IntegralSet, JordanWigner, SpinOrbitalMap,
};
use crate::fixtures::Fixture;
use crate::pauli::PauliSum;
use crate::schedule::{default_time_steps, AnnealSpec, Profile, Schedule};

use bfgs::{BfgsOptions, Objective, StopReason};

/// Energy window around FCI that counts as chemically accurate, in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 0.0015;

/// A molecule prepared for annealing: Hamiltonians, excitation generators
/// and their restriction to the reachable symmetry sector.
#[derive(Debug, Clone)]
pub struct Problem {
    name: String,
    map: SpinOrbitalMap,
    h_fin: PauliSum,
    h_mp: PauliSum,
    eta_hf: Vec<f64>,
    excitations: Vec<Excitation>,
    generators: Vec<PauliSum>,
    e_fci: f64,
    e_hf: f64,
    compiled: Compiled,
}

#[derive(Debug, Clone)]
struct Compiled {
    subspace: Subspace,
    pattern: SparsePattern,
    fin: Vec<Complex64>,
    mp: Vec<Complex64>,
    diag_slots: Vec<usize>,
    /// `z[p][i]`: eigenvalue of `Z_p` on the `i`-th sector basis state.
    z: Vec<Vec<f64>>,
    generators: Vec<Vec<(usize, Complex64)>>,
    reference: usize,
}

impl Problem {
    pub fn from_fixture(fixture: &Fixture) -> Result<Self> {
        Self::new(fixture.name(), &fixture.integrals, fixture.orbital_map()?)
    }

    pub fn new(name: &str, ints: &IntegralSet, map: SpinOrbitalMap) -> Result<Self> {
        let n = map.n_spin_orbitals();
        let h_fin = fermion::build_final_hamiltonian(ints, &map)?;
        let h_mp = fermion::build_mp_hamiltonian(ints, &map)?;
        let eta_hf = fermion::hartree_fock_eta(ints, &map)?;
        for (p, (&e, &m)) in eta_hf.iter().zip(&map.sign_mask()).enumerate() {
            if e * m <= 0.0 {
                return Err(Error::SignConstraint { qubit: p, value: e });
            }
        }
        let excitations = fermion::excitations(&map);
        let jw = JordanWigner::new(n);
        let generators = excitations
            .iter()
            .map(|e| e.generator(&jw))
            .collect::<Result<Vec<_>>>()?;

        let mut ops: Vec<&PauliSum> = vec![&h_fin, &h_mp];
        ops.extend(generators.iter());
        let subspace = Subspace::reachable(n, &[map.reference_state()], &ops)?;
        let fin_t = subspace.restrict_operator(&h_fin)?;
        let mp_t = subspace.restrict_operator(&h_mp)?;
        let gen_t = generators
            .iter()
            .map(|g| subspace.restrict_operator(g))
            .collect::<Result<Vec<_>>>()?;
        let pattern = SparsePattern::from_positions(
            subspace.dim(),
            fin_t
                .iter()
                .chain(&mp_t)
                .chain(gen_t.iter().flatten())
                .map(|&(r, c, _)| (r, c)),
        );
        let diag_slots = (0..subspace.dim())
            .map(|i| pattern.slot(i, i).expect("pattern includes the diagonal"))
            .collect();
        let z = (0..n)
            .map(|p| {
                let bit = 1usize << (n - 1 - p);
                subspace
                    .basis()
                    .iter()
                    .map(|&b| if b & bit == 0 { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect();
        let compiled_generators = gen_t
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&(r, c, v)| (pattern.slot(r, c).expect("generator in pattern"), v))
                    .collect()
            })
            .collect();
        let compiled = Compiled {
            fin: pattern.values(&fin_t)?,
            mp: pattern.values(&mp_t)?,
            reference: subspace
                .position(map.reference_state())
                .expect("reference seeds the sector"),
            subspace,
            pattern,
            diag_slots,
            z,
            generators: compiled_generators,
        };

        let fci = compiled.subspace.spectrum(&h_fin, Some(1))?;
        let reference = StateVector::basis(n, map.reference_state())?;
        let e_hf = dynamics::expectation(&reference, &h_fin)?;
        Ok(Problem {
            name: name.to_string(),
            map,
            h_fin,
            h_mp,
            eta_hf,
            excitations,
            generators,
            e_fci: fci.ground_energy(),
            e_hf,
            compiled,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn orbital_map(&self) -> &SpinOrbitalMap {
        &self.map
    }

    pub fn n_qubits(&self) -> usize {
        self.map.n_spin_orbitals()
    }

    pub fn h_fin(&self) -> &PauliSum {
        &self.h_fin
    }

    pub fn h_mp(&self) -> &PauliSum {
        &self.h_mp
    }

    /// Hartree-Fock `eta`: `-f_pp / 2`.
    pub fn eta_hf(&self) -> &[f64] {
        &self.eta_hf
    }

    pub fn excitations(&self) -> &[Excitation] {
        &self.excitations
    }

    /// Ground energy of `h_fin` in the reference determinant's sector.
    pub fn e_fci(&self) -> f64 {
        self.e_fci
    }

    /// `<ref|h_fin|ref>`.
    pub fn e_hf(&self) -> f64 {
        self.e_hf
    }

    /// The symmetry sector the dynamics live in.
    pub fn sector(&self) -> &Subspace {
        &self.compiled.subspace
    }

    pub fn reference_state(&self) -> Result<StateVector> {
        StateVector::basis(self.n_qubits(), self.map.reference_state())
    }

    /// `eta = sign(eta_HF)`, `theta = 0`.
    pub fn initial_params(&self) -> VariationalParams {
        VariationalParams {
            eta: self.map.sign_mask(),
            theta: ClusterAmplitudes::new(
                self.excitations.clone(),
                vec![0.0; self.excitations.len()],
            )
            .expect("lengths agree"),
        }
    }

    pub fn initial_hamiltonian(&self, params: &VariationalParams) -> Result<PauliSum> {
        fermion::build_initial_hamiltonian(&params.eta, &self.map)
    }

    /// `sum theta_k G_k` from the cached generators.
    pub fn navigator(&self, params: &VariationalParams) -> Result<PauliSum> {
        self.check_theta(params)?;
        let mut out = PauliSum::zero(self.n_qubits());
        for (g, &t) in self.generators.iter().zip(params.theta.values()) {
            if t == 0.0 {
                continue;
            }
            for (s, c) in g.terms() {
                out.accumulate(*s, c * t);
            }
        }
        out.prune();
        Ok(out)
    }

    fn check_theta(&self, params: &VariationalParams) -> Result<()> {
        if params.theta.excitations() != self.excitations.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: self.excitations.len(),
                got: params.theta.len(),
            });
        }
        Ok(())
    }

    /// The full anneal for `params`, with the default step count unless
    /// `steps` is given.
    pub fn anneal_spec(
        &self,
        params: &VariationalParams,
        schedule: Schedule,
        steps: Option<usize>,
    ) -> Result<AnnealSpec> {
        let h_ini = self.initial_hamiltonian(params)?;
        let h_nav = self.navigator(params)?;
        match steps {
            Some(s) => AnnealSpec::with_steps(h_ini, self.h_fin.clone(), h_nav, schedule, s),
            None => AnnealSpec::new(h_ini, self.h_fin.clone(), h_nav, schedule),
        }
    }

    /// The standard AQC anneal from `H_MP`.
    pub fn standard_spec(&self, schedule: Schedule, steps: Option<usize>) -> Result<AnnealSpec> {
        let n = self.n_qubits();
        match steps {
            Some(s) => AnnealSpec::with_steps(
                self.h_mp.clone(),
                self.h_fin.clone(),
                PauliSum::zero(n),
                schedule,
                s,
            ),
            None => AnnealSpec::new(
                self.h_mp.clone(),
                self.h_fin.clone(),
                PauliSum::zero(n),
                schedule,
            ),
        }
    }

    /// Default step count for `params`, as [`AnnealSpec::new`] would choose.
    pub fn default_steps(&self, params: &VariationalParams, schedule: &Schedule) -> Result<usize> {
        Ok(default_time_steps(
            &self.initial_hamiltonian(params)?,
            &self.h_fin,
            &self.navigator(params)?,
            schedule,
        ))
    }

    fn path_operator(&self, params: &VariationalParams) -> Result<PathOperator> {
        params.validate(&self.map, 0.0)?;
        self.check_theta(params)?;
        let c = &self.compiled;
        let nnz = c.pattern.nnz();
        let mut ini = vec![Complex64::new(0.0, 0.0); nnz];
        for (i, &slot) in c.diag_slots.iter().enumerate() {
            let d: f64 = params.eta.iter().zip(&c.z).map(|(e, z)| e * z[i]).sum();
            ini[slot] = Complex64::new(d, 0.0);
        }
        let mut nav = vec![Complex64::new(0.0, 0.0); nnz];
        for (entries, &t) in c.generators.iter().zip(params.theta.values()) {
            if t == 0.0 {
                continue;
            }
            for &(slot, v) in entries {
                nav[slot] += v * t;
            }
        }
        PathOperator::new(c.pattern.clone(), ini, c.fin.clone(), nav)
    }

    fn propagate(
        &self,
        op: &PathOperator,
        schedule: Schedule,
        steps: usize,
    ) -> Result<Vec<Complex64>> {
        let mut psi0 = vec![Complex64::new(0.0, 0.0); self.compiled.subspace.dim()];
        psi0[self.compiled.reference] = Complex64::new(1.0, 0.0);
        Propagator::new(op, schedule, steps)?.run(&psi0)
    }

    /// Final energy of one VanQver anneal, evolving only inside the sector.
    pub fn energy(
        &self,
        params: &VariationalParams,
        schedule: Schedule,
        steps: Option<usize>,
    ) -> Result<f64> {
        let steps = match steps {
            Some(s) => s,
            None => self.default_steps(params, &schedule)?,
        };
        let op = self.path_operator(params)?;
        let psi = self.propagate(&op, schedule, steps)?;
        op.final_expectation(&psi)
    }

    /// Final energy of the standard AQC anneal from `H_MP`.
    pub fn standard_energy(&self, schedule: Schedule, steps: Option<usize>) -> Result<f64> {
        let steps = match steps {
            Some(s) => s,
            None => default_time_steps(
                &self.h_mp,
                &self.h_fin,
                &PauliSum::zero(self.n_qubits()),
                &schedule,
            ),
        };
        let c = &self.compiled;
        let op = PathOperator::new(
            c.pattern.clone(),
            c.mp.clone(),
            c.fin.clone(),
            vec![Complex64::new(0.0, 0.0); c.pattern.nnz()],
        )?;
        let psi = self.propagate(&op, schedule, steps)?;
        op.final_expectation(&psi)
    }
}

/// `eta` (sign-constrained) and navigator amplitudes `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalParams {
    pub eta: Vec<f64>,
    pub theta: ClusterAmplitudes,
}

impl VariationalParams {
    /// Checks the sign mask and `|eta_p| >= floor`.
    pub fn validate(&self, map: &SpinOrbitalMap, floor: f64) -> Result<()> {
        let mask = map.sign_mask();
        if self.eta.len() != mask.len() {
            return Err(Error::DimensionMismatch {
                expected: mask.len(),
                got: self.eta.len(),
            });
        }
        for (p, (&e, &m)) in self.eta.iter().zip(&mask).enumerate() {
            if !(e * m > 0.0 && e.abs() >= floor) {
                return Err(Error::SignConstraint { qubit: p, value: e });
            }
        }
        Ok(())
    }
}

/// `(E, psi(T))` for one VanQver anneal on the full register.
pub fn run_anneal(
    problem: &Problem,
    params: &VariationalParams,
    schedule: Schedule,
) -> Result<(f64, StateVector)> {
    let spec = problem.anneal_spec(params, schedule, None)?;
    let psi = dynamics::evolve(&spec, &problem.reference_state()?)?;
    Ok((dynamics::expectation(&psi, problem.h_fin())?, psi))
}

/// Single standard AQC anneal from `H_MP` with no navigator.
pub fn standard_aqc(problem: &Problem, total_time: f64) -> Result<f64> {
    if total_time == 0.0 {
        return Ok(problem.e_hf());
    }
    problem.standard_energy(Schedule::new(total_time)?, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Stop once the gradient infinity-norm falls to `epsilon_tol`.
    #[default]
    GradientNorm,
    /// Stop once an accepted step changes the energy by at most `epsilon_tol`.
    EnergyDelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub epsilon_tol: f64,
    pub max_iterations: usize,
    /// Central finite-difference step in the action variables.
    pub gradient_step: f64,
    pub eta_floor: f64,
    /// Navigator amplitude scale of the schedule.
    pub alpha: f64,
    pub termination: Termination,
    /// Fixed step count; the default rule applies when absent.
    pub steps: Option<usize>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            epsilon_tol: 1e-3,
            max_iterations: 200,
            gradient_step: 1e-4,
            eta_floor: 1e-3,
            alpha: 1.0,
            termination: Termination::GradientNorm,
            steps: None,
        }
    }
}

impl OptimizeConfig {
    pub fn with_tolerance(epsilon_tol: f64) -> Self {
        OptimizeConfig {
            epsilon_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_tol > 0.0) {
            return Err(Error::Config("epsilon_tol must be positive".into()));
        }
        if !(self.gradient_step > 0.0) {
            return Err(Error::Config("gradient_step must be positive".into()));
        }
        if !(self.eta_floor > 0.0) {
            return Err(Error::Config("eta_floor must be positive".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::Config("alpha must be positive".into()));
        }
        if self.steps == Some(0) {
            return Err(Error::Config("steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub eta: Vec<f64>,
    pub theta: Vec<f64>,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Vanqver,
    Standard,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vanqver" => Ok(Mode::Vanqver),
            "standard" => Ok(Mode::Standard),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Vanqver => "vanqver",
            Mode::Standard => "standard",
        })
    }
}

/// Outcome of one optimisation (or one standard anneal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub fixture: String,
    pub mode: Mode,
    pub total_time: f64,
    pub epsilon_tol: f64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub final_energy: f64,
    pub final_params: Option<VariationalParams>,
    pub e_fci: f64,
    pub n_iterations: usize,
    pub n_evaluations: usize,
    pub converged: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn delta_e(&self) -> f64 {
        self.final_energy - self.e_fci
    }

    pub fn chemically_accurate(&self) -> bool {
        self.delta_e().abs() <= CHEMICAL_ACCURACY
    }
}

/// Maps optimiser coordinates to physical parameters.
struct ActionMap<'a> {
    problem: &'a Problem,
    total_time: f64,
    floor: f64,
    mask: Vec<f64>,
}

impl ActionMap<'_> {
    fn initial(&self) -> Vec<f64> {
        let mut x = vec![self.total_time * (1.0 - self.floor); self.mask.len()];
        x.extend(std::iter::repeat_n(0.0, self.problem.excitations.len()));
        x
    }

    fn params(&self, x: &[f64]) -> VariationalParams {
        let n = self.mask.len();
        let eta = x[..n]
            .iter()
            .zip(&self.mask)
            .map(|(v, m)| m * (self.floor + v.abs() / self.total_time))
            .collect();
        let theta = x[n..].iter().map(|p| p / self.total_time).collect();
        VariationalParams {
            eta,
            theta: ClusterAmplitudes::new(self.problem.excitations.clone(), theta)
                .expect("lengths agree"),
        }
    }
}

struct EnergyObjective<'a> {
    map: ActionMap<'a>,
    schedule: Schedule,
    fixed_steps: Option<usize>,
    step: f64,
    evaluations: usize,
}

impl EnergyObjective<'_> {
    fn steps_at(&self, params: &VariationalParams) -> Result<usize> {
        match self.fixed_steps {
            Some(s) => Ok(s),
            None => self.map.problem.default_steps(params, &self.schedule),
        }
    }

    fn energy_with(&mut self, x: &[f64], steps: usize) -> Result<f64> {
        self.evaluations += 1;
        let params = self.map.params(x);
        self.map.problem.energy(&params, self.schedule, Some(steps))
    }
}

impl Objective for EnergyObjective<'_> {
    fn value(&mut self, x: &[f64]) -> Result<f64> {
        let steps = self.steps_at(&self.map.params(x))?;
        self.energy_with(x, steps)
    }

    fn gradient(&mut self, x: &[f64], _fx: f64) -> Result<Vec<f64>> {
        // All probes share the base point's step count so that the
        // discrete step rule cannot leak into the difference quotient.
        let steps = self.steps_at(&self.map.params(x))?;
        let mut probe = x.to_vec();
        let mut g = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            probe[i] = x[i] + self.step;
            let up = self.energy_with(&probe, steps)?;
            probe[i] = x[i] - self.step;
            let down = self.energy_with(&probe, steps)?;
            probe[i] = x[i];
            g.push((up - down) / (2.0 * self.step));
        }
        Ok(g)
    }

    fn directional_derivative(&mut self, x: &[f64], p: &[f64], _fx: f64) -> Result<f64> {
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let steps = self.steps_at(&self.map.params(x))?;
        let h = self.step / norm;
        let shifted = |sign: f64| -> Vec<f64> {
            x.iter().zip(p).map(|(xi, pi)| xi + sign * h * pi).collect()
        };
        let up = self.energy_with(&shifted(1.0), steps)?;
        let down = self.energy_with(&shifted(-1.0), steps)?;
        Ok((up - down) / (2.0 * h))
    }
}

/// Minimises the VanQver energy at annealing time `total_time`, starting
/// from `eta = sign(eta_HF)` and `theta = 0`.
pub fn optimize(problem: &Problem, total_time: f64, config: &OptimizeConfig) -> Result<RunRecord> {
    config.validate()?;
    let start = Instant::now();
    let initial = problem.initial_params();
    let mut record = RunRecord {
        fixture: problem.name().to_string(),
        mode: Mode::Vanqver,
        total_time,
        epsilon_tol: config.epsilon_tol,
        trajectory: Vec::new(),
        final_energy: problem.e_hf(),
        final_params: Some(initial.clone()),
        e_fci: problem.e_fci(),
        n_iterations: 0,
        n_evaluations: 0,
        converged: true,
        wall_time: Duration::ZERO,
    };
    if total_time == 0.0 {
        record.trajectory.push(TrajectoryPoint {
            iteration: 0,
            eta: initial.eta,
            theta: initial.theta.values().to_vec(),
            energy: problem.e_hf(),
        });
        record.wall_time = start.elapsed();
        return Ok(record);
    }
    let schedule = Schedule::with_alpha(total_time, config.alpha, Profile::Quadratic)?;
    let map = ActionMap {
        problem,
        total_time,
        floor: config.eta_floor,
        mask: problem.orbital_map().sign_mask(),
    };
    let x0 = map.initial();
    let mut objective = EnergyObjective {
        map,
        schedule,
        fixed_steps: config.steps,
        step: config.gradient_step,
        evaluations: 0,
    };
    let (gtol, max_iterations) = match config.termination {
        Termination::GradientNorm => (config.epsilon_tol, config.max_iterations),
        Termination::EnergyDelta => (0.0, config.max_iterations),
    };
    let opts = BfgsOptions {
        gtol,
        max_iterations,
        ..Default::default()
    };
    let mut iterates: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let energy_delta = config.termination == Termination::EnergyDelta;
    let outcome = bfgs::minimize(&mut objective, x0, opts, |k, x, f| {
        iterates.push((k, x.to_vec(), f));
    });
    // Energy-delta termination is applied by truncating the iterate list at
    // the first small change, so the trajectory itself never depends on
    // the tolerance.
    let outcome = outcome?;
    let mut converged = outcome.reason == StopReason::GradientTolerance;
    if energy_delta {
        converged = false;
        if let Some(cut) = iterates
            .windows(2)
            .position(|w| (w[0].2 - w[1].2).abs() <= config.epsilon_tol)
        {
            iterates.truncate(cut + 2);
            converged = true;
        }
    }
    let map = &objective.map;
    record.trajectory = iterates
        .iter()
        .map(|(k, x, f)| {
            let p = map.params(x);
            TrajectoryPoint {
                iteration: *k,
                eta: p.eta,
                theta: p.theta.values().to_vec(),
                energy: *f,
            }
        })
        .collect();
    let best = iterates
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .expect("start point is recorded");
    record.final_energy = best.2;
    record.final_params = Some(map.params(&best.1));
    record.n_iterations = iterates.last().map_or(0, |it| it.0);
    record.n_evaluations = objective.evaluations;
    record.converged = converged;
    record.wall_time = start.elapsed();
    Ok(record)
}

/// A [`RunRecord`] for a single standard AQC anneal.
pub fn standard_record(
    problem: &Problem,
    total_time: f64,
    steps: Option<usize>,
) -> Result<RunRecord> {
    let start = Instant::now();
    let energy = if total_time == 0.0 {
        problem.e_hf()
    } else {
        problem.standard_energy(Schedule::new(total_time)?, steps)?
    };
    Ok(RunRecord {
        fixture: problem.name().to_string(),
        mode: Mode::Standard,
        total_time,
        epsilon_tol: 0.0,
        trajectory: vec![TrajectoryPoint {
            iteration: 0,
            eta: Vec::new(),
            theta: Vec::new(),
            energy,
        }],
        final_energy: energy,
        final_params: None,
        e_fci: problem.e_fci(),
        n_iterations: 0,
        n_evaluations: 1,
        converged: true,
        wall_time: start.elapsed(),
    })
}

/// One evaluation of either mode at annealing time `t`.
pub fn run_mode(
    problem: &Problem,
    mode: Mode,
    t: f64,
    config: &OptimizeConfig,
) -> Result<RunRecord> {
    match mode {
        Mode::Vanqver => optimize(problem, t, config),
        Mode::Standard => standard_record(problem, t, config.steps),
    }
}

/// Search bracket and resolution for [`time_to_chemical_accuracy`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    /// Stop once `hi / lo` is at most this.
    pub ratio: f64,
    pub max_expansions: usize,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Self {
        Bracket {
            lo,
            hi,
            ratio: 1.05,
            max_expansions: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcaSample {
    pub total_time: f64,
    pub energy: f64,
    pub delta_e: f64,
    pub success: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcaReport {
    pub fixture: String,
    pub mode: Mode,
    pub t_ca: f64,
    /// Largest annealing time known to fail, the lower end of the final bracket.
    pub t_fail: f64,
    pub samples: Vec<TcaSample>,
    /// A success was seen at a shorter time than some failure.
    pub non_monotonic: bool,
    pub shrunk: bool,
    pub expanded: bool,
}

/// Smallest annealing time on a geometric bisection grid that reaches
/// chemical accuracy, starting from `bracket`.
///
/// The bracket is first repaired: halved downward while its lower end
/// succeeds and doubled upward while its upper end fails.
pub fn time_to_chemical_accuracy(
    problem: &Problem,
    mode: Mode,
    config: &OptimizeConfig,
    bracket: Bracket,
) -> Result<TcaReport> {
    if !(bracket.lo > 0.0 && bracket.hi > bracket.lo && bracket.ratio > 1.0) {
        return Err(Error::Config(format!(
            "invalid bracket [{}, {}] with ratio {}",
            bracket.lo, bracket.hi, bracket.ratio
        )));
    }
    let mut samples: BTreeMap<u64, TcaSample> = BTreeMap::new();
    let mut eval = |t: f64| -> Result<bool> {
        if let Some(s) = samples.get(&t.to_bits()) {
            return Ok(s.success);
        }
        let rec = run_mode(problem, mode, t, config)?;
        let success = rec.chemically_accurate();
        samples.insert(
            t.to_bits(),
            TcaSample {
                total_time: t,
                energy: rec.final_energy,
                delta_e: rec.delta_e(),
                success,
                iterations: rec.n_iterations,
            },
        );
        Ok(success)
    };

    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut shrunk = false;
    let mut expanded = false;
    let mut steps = 0;
    while eval(lo)? {
        shrunk = true;
        steps += 1;
        if steps > bracket.max_expansions {
            return Err(Error::BracketExhausted { steps, last_t: lo });
        }
        hi = lo;
        lo *= 0.5;
    }
    steps = 0;
    while !eval(hi)? {
        expanded = true;
        steps += 1;
        if steps > bracket.max_expansions {
            return Err(Error::BracketExhausted { steps, last_t: hi });
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi / lo > bracket.ratio {
        let mid = (lo * hi).sqrt();
        if eval(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let samples: Vec<TcaSample> = samples.into_values().collect();
    let mut sorted = samples.clone();
    sorted.sort_by(|a, b| a.total_time.total_cmp(&b.total_time));
    let non_monotonic = sorted
        .iter()
        .enumerate()
        .any(|(i, a)| a.success && sorted[i + 1..].iter().any(|b| !b.success));
    Ok(TcaReport {
        fixture: problem.name().to_string(),
        mode,
        t_ca: hi,
        t_fail: lo,
        samples: sorted,
        non_monotonic,
        shrunk,
        expanded,
    })
}

/// The quantity varied across a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    /// Annealing times for one problem.
    Time(Vec<f64>),
    /// P4 separations at a fixed annealing time.
    Distance {
        distances: Vec<f64>,
        total_time: f64,
    },
    /// Optimiser tolerances at a fixed annealing time.
    Tolerance {
        tolerances: Vec<f64>,
        total_time: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub molecule: String,
    pub distance: Option<f64>,
    pub total_time: f64,
    pub epsilon_tol: f64,
    pub final_energy: Option<f64>,
    pub e_fci: Option<f64>,
    pub delta_e: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_result(
        molecule: &str,
        distance: Option<f64>,
        total_time: f64,
        epsilon_tol: f64,
        result: Result<RunRecord>,
    ) -> Self {
        let mut row = SweepRow {
            molecule: molecule.to_string(),
            distance,
            total_time,
            epsilon_tol,
            final_energy: None,
            e_fci: None,
            delta_e: None,
            iterations: None,
            converged: None,
            error: None,
        };
        match result {
            Ok(r) => {
                row.final_energy = Some(r.final_energy);
                row.e_fci = Some(r.e_fci);
                row.delta_e = Some(r.delta_e());
                row.iterations = Some(r.n_iterations);
                row.converged = Some(r.converged);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    }
}

pub const SWEEP_CSV_HEADER: &str =
    "molecule,d,T,epsilon_tol,E_final,E_FCI,delta_E,iterations,converged,error";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(ToString::to_string).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.molecule,
            opt(&self.distance),
            self.total_time,
            self.epsilon_tol,
            opt(&self.final_energy),
            opt(&self.e_fci),
            opt(&self.delta_e),
            opt(&self.iterations),
            opt(&self.converged),
            self.error.as_deref().unwrap_or("").replace(',', ";"),
        )
    }
}

/// Runs one optimisation (or standard anneal) per grid point. Failures at
/// individual points are recorded in their rows; the sweep continues.
///
/// `load_distance` supplies the problem for each P4 separation.
pub fn sweep(
    problem: Option<&Problem>,
    load_distance: &mut dyn FnMut(f64) -> Result<Problem>,
    variable: &SweepVariable,
    mode: Mode,
    config: &OptimizeConfig,
) -> Result<Vec<SweepRow>> {
    let need = || problem.ok_or_else(|| Error::Config("this sweep needs a fixture".into()));
    let mut rows = Vec::new();
    match variable {
        SweepVariable::Time(times) => {
            let p = if times.is_empty() {
                None
            } else {
                Some(need()?)
            };
            for &t in times {
                let p = p.expect("nonempty grid");
                let r = run_mode(p, mode, t, config);
                rows.push(SweepRow::from_result(
                    p.name(),
                    None,
                    t,
                    config.epsilon_tol,
                    r,
                ));
            }
        }
        SweepVariable::Distance {
            distances,
            total_time,
        } => {
            for &d in distances {
                let row = match load_distance(d) {
                    Ok(p) => {
                        let r = run_mode(&p, mode, *total_time, config);
                        SweepRow::from_result(p.name(), Some(d), *total_time, config.epsilon_tol, r)
                    }
                    Err(e) => SweepRow::from_result(
                        &format!("p4_d{d:.2}"),
                        Some(d),
                        *total_time,
                        config.epsilon_tol,
                        Err(e),
                    ),
                };
                rows.push(row);
            }
        }
        SweepVariable::Tolerance {
            tolerances,
            total_time,
        } => {
            let p = if tolerances.is_empty() {
                None
            } else {
                Some(need()?)
            };
            for &tol in tolerances {
                let p = p.expect("nonempty grid");
                let cfg = OptimizeConfig {
                    epsilon_tol: tol,
                    ..*config
                };
                let r = run_mode(p, mode, *total_time, &cfg);
                rows.push(SweepRow::from_result(p.name(), None, *total_time, tol, r));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn h2() -> Problem {
        Problem::from_fixture(&fixtures::load("h2").unwrap()).unwrap()
    }

    #[test]
    fn problem_sizes() {
        let p = h2();
        assert_eq!(p.excitations().len(), 3);
        assert_eq!(p.sector().dim(), 4);
        assert!((p.e_fci() + 1.101150330233).abs() < 1e-9);
        assert!((p.e_hf() + 1.066108649318).abs() < 1e-9);
    }

    #[test]
    fn fast_path_matches_reference_evolution() {
        let p = h2();
        let mut params = p.initial_params();
        params.eta = vec![0.7, 1.3, -0.4, -0.9];
        params.theta.values_mut().copy_from_slice(&[0.3, -0.2, 1.1]);
        let schedule = Schedule::new(0.8).unwrap();
        let (e_ref, _) = run_anneal(&p, &params, schedule).unwrap();
        let e_fast = p.energy(&params, schedule, None).unwrap();
        assert!((e_ref - e_fast).abs() < 1e-12);
        let nav = fermion::build_navigator(&params.theta, p.orbital_map()).unwrap();
        assert!(nav.max_abs_diff(&p.navigator(&params).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn zero_time_and_zero_iterations() {
        let p = h2();
        let rec = optimize(&p, 0.0, &OptimizeConfig::default()).unwrap();
        assert_eq!(rec.final_energy, p.e_hf());
        assert_eq!(rec.n_iterations, 0);

        let cfg = OptimizeConfig {
            max_iterations: 0,
            ..Default::default()
        };
        let rec = optimize(&p, 0.2, &cfg).unwrap();
        let e0 = p
            .energy(&p.initial_params(), Schedule::new(0.2).unwrap(), None)
            .unwrap();
        assert_eq!(rec.final_energy, e0);
        assert_eq!(standard_aqc(&p, 0.0).unwrap(), p.e_hf());
    }

    #[test]
    fn params_validation() {
        let p = h2();
        let mut params = p.initial_params();
        params.eta[2] = 0.5;
        assert!(matches!(
            p.energy(&params, Schedule::new(1.0).unwrap(), None),
            Err(Error::SignConstraint { qubit: 2, .. })
        ));
    }

    #[test]
    fn bad_bracket() {
        let p = h2();
        assert!(time_to_chemical_accuracy(
            &p,
            Mode::Standard,
            &OptimizeConfig::default(),
            Bracket::new(2.0, 1.0)
        )
        .is_err());
    }

    #[test]
    fn empty_sweep() {
        let rows = sweep(
            None,
            &mut |_| Err(Error::UnknownFixture("none".into())),
            &SweepVariable::Time(vec![]),
            Mode::Vanqver,
            &OptimizeConfig::default(),
        )
        .unwrap();
        assert!(rows.is_empty());
    }
}
