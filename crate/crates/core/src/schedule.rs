//! Annealing profiles and the instantaneous Hamiltonian
//! `H(t) = A(t) H_ini + B(t) H_fin + C(t) H_nav`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Shape of `A`, `B`, `C` as functions of `s = t / T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `A = 1 - s^2`, `B = s^2`, `C = alpha s (1 - s)`.
    #[default]
    Quadratic,
}

impl Profile {
    fn at(self, s: f64, alpha: f64) -> (f64, f64, f64) {
        match self {
            Profile::Quadratic => {
                // Pin the endpoints so they hold bit-for-bit.
                if s == 0.0 {
                    (1.0, 0.0, 0.0)
                } else if s == 1.0 {
                    (0.0, 1.0, 0.0)
                } else {
                    let b = s * s;
                    (1.0 - b, b, alpha * s * (1.0 - s))
                }
            }
        }
    }

    fn slope(self, s: f64, alpha: f64) -> (f64, f64, f64) {
        match self {
            Profile::Quadratic => (-2.0 * s, 2.0 * s, alpha * (1.0 - 2.0 * s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    total_time: f64,
    alpha: f64,
    profile: Profile,
}

impl Schedule {
    /// A quadratic schedule of duration `total_time` with `alpha = 1`.
    pub fn new(total_time: f64) -> Result<Self> {
        Self::with_alpha(total_time, 1.0, Profile::Quadratic)
    }

    pub fn with_alpha(total_time: f64, alpha: f64, profile: Profile) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::Config(format!(
                "annealing time must be positive, got {total_time}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Config(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(Schedule {
            total_time,
            alpha,
            profile,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    fn fraction(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.total_time).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                total: self.total_time,
            });
        }
        Ok(if t == self.total_time {
            1.0
        } else {
            t / self.total_time
        })
    }

    /// `(A, B, C)` at time `t`.
    pub fn evaluate(&self, t: f64) -> Result<(f64, f64, f64)> {
        Ok(self.profile.at(self.fraction(t)?, self.alpha))
    }

    /// `(A, B, C)` at fractional time `s` in `[0, 1]`.
    pub fn evaluate_fraction(&self, s: f64) -> Result<(f64, f64, f64)> {
        self.evaluate(s * self.total_time)
    }

    /// `(dA/ds, dB/ds, dC/ds)` at fractional time `s`.
    pub fn derivatives(&self, s: f64) -> Result<(f64, f64, f64)> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::TimeOutOfRange { t: s, total: 1.0 });
        }
        Ok(self.profile.slope(s, self.alpha))
    }
}

/// Everything that defines one anneal.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSpec {
    h_ini: PauliSum,
    h_fin: PauliSum,
    h_nav: PauliSum,
    schedule: Schedule,
    n_time_steps: usize,
}

/// Floor on the default number of midpoint steps.
pub const MIN_TIME_STEPS: usize = 200;

impl AnnealSpec {
    /// Builds a spec with the default step count.
    pub fn new(
        h_ini: PauliSum,
        h_fin: PauliSum,
        h_nav: PauliSum,
        schedule: Schedule,
    ) -> Result<Self> {
        let steps = default_time_steps(&h_ini, &h_fin, &h_nav, &schedule);
        Self::with_steps(h_ini, h_fin, h_nav, schedule, steps)
    }

    pub fn with_steps(
        h_ini: PauliSum,
        h_fin: PauliSum,
        h_nav: PauliSum,
        schedule: Schedule,
        n_time_steps: usize,
    ) -> Result<Self> {
        let n = h_ini.n_qubits();
        for other in [&h_fin, &h_nav] {
            if other.n_qubits() != n {
                return Err(Error::QubitMismatch {
                    left: n,
                    right: other.n_qubits(),
                });
            }
        }
        if n_time_steps == 0 {
            return Err(Error::Config("n_time_steps must be positive".into()));
        }
        Ok(AnnealSpec {
            h_ini,
            h_fin,
            h_nav,
            schedule,
            n_time_steps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.h_ini.n_qubits()
    }

    pub fn h_ini(&self) -> &PauliSum {
        &self.h_ini
    }

    pub fn h_fin(&self) -> &PauliSum {
        &self.h_fin
    }

    pub fn h_nav(&self) -> &PauliSum {
        &self.h_nav
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn n_time_steps(&self) -> usize {
        self.n_time_steps
    }

    pub fn set_time_steps(&mut self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Config("n_time_steps must be positive".into()));
        }
        self.n_time_steps = n;
        Ok(())
    }

    /// `A h_ini + B h_fin + C h_nav` at time `t`.
    pub fn hamiltonian_at(&self, t: f64) -> Result<PauliSum> {
        let (a, b, c) = self.schedule.evaluate(t)?;
        self.combine(a, b, c)
    }

    /// `dH/ds` at fractional time `s`.
    pub fn derivative_at(&self, s: f64) -> Result<PauliSum> {
        let (a, b, c) = self.schedule.derivatives(s)?;
        self.combine(a, b, c)
    }

    fn combine(&self, a: f64, b: f64, c: f64) -> Result<PauliSum> {
        self.h_ini
            .scale_real(a)
            .add(&self.h_fin.scale_real(b))?
            .add(&self.h_nav.scale_real(c))
    }
}

/// `max(200, ceil(100 T ||H||))`, where `||H||` bounds the instantaneous
/// coefficient sum (identity terms only shift the phase).
pub fn default_time_steps(
    h_ini: &PauliSum,
    h_fin: &PauliSum,
    h_nav: &PauliSum,
    schedule: &Schedule,
) -> usize {
    let norm = h_ini.coefficient_norm(false)
        + h_fin.coefficient_norm(false)
        + 0.25 * schedule.alpha() * h_nav.coefficient_norm(false);
    let raw = (100.0 * schedule.total_time() * norm).ceil();
    if raw.is_finite() && raw > MIN_TIME_STEPS as f64 {
        raw as usize
    } else {
        MIN_TIME_STEPS
    }
}
