//! Quasi-Newton minimisation with a strong-Wolfe line search.

use crate::error::Result;

/// A differentiable scalar objective.
pub trait Objective {
    fn value(&mut self, x: &[f64]) -> Result<f64>;

    /// Gradient at `x`, where `fx` is the already-known value there.
    fn gradient(&mut self, x: &[f64], fx: f64) -> Result<Vec<f64>>;

    /// Slope of the objective at `x` along `p`. The line search only needs
    /// this; objectives with expensive gradients can supply a cheaper form.
    fn directional_derivative(&mut self, x: &[f64], p: &[f64], fx: f64) -> Result<f64> {
        Ok(dot(&self.gradient(x, fx)?, p))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    /// Stop once the gradient infinity-norm is at or below this.
    pub gtol: f64,
    pub max_iterations: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            gtol: 1e-5,
            max_iterations: 200,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradientTolerance,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub gradient: Option<Vec<f64>>,
    pub iterations: usize,
    pub reason: StopReason,
}

fn inf_norm(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `obj` from `x0`. `on_iterate(k, x, f)` sees the start point
/// (`k = 0`) and every accepted iterate.
pub fn minimize<O: Objective>(
    obj: &mut O,
    x0: Vec<f64>,
    opts: BfgsOptions,
    mut on_iterate: impl FnMut(usize, &[f64], f64),
) -> Result<BfgsOutcome> {
    let n = x0.len();
    let mut x = x0;
    let mut f = obj.value(&x)?;
    on_iterate(0, &x, f);
    if opts.max_iterations == 0 {
        return Ok(BfgsOutcome {
            x,
            f,
            gradient: None,
            iterations: 0,
            reason: StopReason::MaxIterations,
        });
    }
    let mut g = obj.gradient(&x, f)?;
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    let mut old_f = f + 0.5 * dot(&g, &g).sqrt();
    let mut k = 0;
    let mut reason = StopReason::MaxIterations;
    if inf_norm(&g) <= opts.gtol {
        reason = StopReason::GradientTolerance;
    }
    while reason != StopReason::GradientTolerance && k < opts.max_iterations {
        let p: Vec<f64> = (0..n)
            .map(|i| -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>())
            .collect();
        let Some(step) = line_search(obj, &x, &p, f, &g, old_f, opts)? else {
            reason = StopReason::LineSearchFailed;
            break;
        };
        let s: Vec<f64> = p.iter().map(|pi| step.alpha * pi).collect();
        let y: Vec<f64> = step.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += si;
        }
        old_f = f;
        f = step.f;
        g = step.g;
        k += 1;
        on_iterate(k, &x, f);
        if inf_norm(&g) <= opts.gtol {
            reason = StopReason::GradientTolerance;
            break;
        }
        let ys = dot(&y, &s);
        let rho = if ys == 0.0 { 1000.0 } else { 1.0 / ys };
        // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
        let hy: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum())
            .collect();
        let yhy = dot(&y, &hy);
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] +=
                    -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
            }
        }
    }
    if reason == StopReason::MaxIterations && inf_norm(&g) <= opts.gtol {
        reason = StopReason::GradientTolerance;
    }
    Ok(BfgsOutcome {
        x,
        f,
        gradient: Some(g),
        iterations: k,
        reason,
    })
}

struct Accepted {
    alpha: f64,
    f: f64,
    g: Vec<f64>,
}

struct Line<'a, O: Objective> {
    obj: &'a mut O,
    x: &'a [f64],
    p: &'a [f64],
}

impl<O: Objective> Line<'_, O> {
    fn point(&self, alpha: f64) -> Vec<f64> {
        self.x
            .iter()
            .zip(self.p)
            .map(|(x, p)| x + alpha * p)
            .collect()
    }

    fn phi(&mut self, alpha: f64) -> Result<f64> {
        let pt = self.point(alpha);
        self.obj.value(&pt)
    }

    fn derphi(&mut self, alpha: f64, phi: f64) -> Result<f64> {
        let pt = self.point(alpha);
        self.obj.directional_derivative(&pt, self.p, phi)
    }

    fn accept(self, alpha: f64, f: f64) -> Result<Option<Accepted>> {
        let pt = self.point(alpha);
        let g = self.obj.gradient(&pt, f)?;
        Ok(Some(Accepted { alpha, f, g }))
    }
}

fn line_search<O: Objective>(
    obj: &mut O,
    x: &[f64],
    p: &[f64],
    phi0: f64,
    g0: &[f64],
    old_phi0: f64,
    opts: BfgsOptions,
) -> Result<Option<Accepted>> {
    let derphi0 = dot(g0, p);
    if !(derphi0 < 0.0) {
        return Ok(None);
    }
    let mut line = Line { obj, x, p };
    let mut alpha1 = (1.01 * 2.0 * (phi0 - old_phi0) / derphi0).min(1.0);
    if !(alpha1 > 0.0) {
        alpha1 = 1.0;
    }
    let mut phi_a1 = line.phi(alpha1)?;
    let (mut alpha0, mut phi_a0, mut derphi_a0) = (0.0, phi0, derphi0);
    const MAX_BRACKET: usize = 24;
    for i in 0..MAX_BRACKET {
        if phi_a1 > phi0 + opts.c1 * alpha1 * derphi0 || (phi_a1 >= phi_a0 && i > 0) {
            return zoom(
                line, alpha0, alpha1, phi_a0, phi_a1, derphi_a0, phi0, derphi0, opts,
            );
        }
        let derphi_a1 = line.derphi(alpha1, phi_a1)?;
        if derphi_a1.abs() <= -opts.c2 * derphi0 {
            return line.accept(alpha1, phi_a1);
        }
        if derphi_a1 >= 0.0 {
            return zoom(
                line, alpha1, alpha0, phi_a1, phi_a0, derphi_a1, phi0, derphi0, opts,
            );
        }
        alpha0 = alpha1;
        phi_a0 = phi_a1;
        derphi_a0 = derphi_a1;
        alpha1 *= 2.0;
        phi_a1 = line.phi(alpha1)?;
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn zoom<O: Objective>(
    mut line: Line<'_, O>,
    mut a_lo: f64,
    mut a_hi: f64,
    mut phi_lo: f64,
    mut phi_hi: f64,
    mut derphi_lo: f64,
    phi0: f64,
    derphi0: f64,
    opts: BfgsOptions,
) -> Result<Option<Accepted>> {
    const MAX_ZOOM: usize = 10;
    const CUBIC_MARGIN: f64 = 0.2;
    const QUAD_MARGIN: f64 = 0.1;
    let (mut a_rec, mut phi_rec) = (0.0, phi0);
    for i in 0..=MAX_ZOOM {
        let d = a_hi - a_lo;
        let (a, b) = if d < 0.0 { (a_hi, a_lo) } else { (a_lo, a_hi) };
        let mut a_j = None;
        if i > 0 {
            let margin = CUBIC_MARGIN * d.abs();
            a_j = cubic_min(a_lo, phi_lo, derphi_lo, a_hi, phi_hi, a_rec, phi_rec)
                .filter(|&v| v >= a + margin && v <= b - margin);
        }
        let a_j = match a_j {
            Some(v) => v,
            None => {
                let margin = QUAD_MARGIN * d.abs();
                quad_min(a_lo, phi_lo, derphi_lo, a_hi, phi_hi)
                    .filter(|&v| v >= a + margin && v <= b - margin)
                    .unwrap_or(a_lo + 0.5 * d)
            }
        };
        let phi_j = line.phi(a_j)?;
        if phi_j > phi0 + opts.c1 * a_j * derphi0 || phi_j >= phi_lo {
            a_rec = a_hi;
            phi_rec = phi_hi;
            a_hi = a_j;
            phi_hi = phi_j;
        } else {
            let derphi_j = line.derphi(a_j, phi_j)?;
            if derphi_j.abs() <= -opts.c2 * derphi0 {
                return line.accept(a_j, phi_j);
            }
            if derphi_j * (a_hi - a_lo) >= 0.0 {
                a_rec = a_hi;
                phi_rec = phi_hi;
                a_hi = a_lo;
                phi_hi = phi_lo;
            } else {
                a_rec = a_lo;
                phi_rec = phi_lo;
            }
            a_lo = a_j;
            phi_lo = phi_j;
            derphi_lo = derphi_j;
        }
    }
    Ok(None)
}

/// Minimizer of the cubic through `(a, fa)` with slope `fpa`, `(b, fb)`
/// and `(c, fc)`.
fn cubic_min(a: f64, fa: f64, fpa: f64, b: f64, fb: f64, c: f64, fc: f64) -> Option<f64> {
    let db = b - a;
    let dc = c - a;
    let denom = (db * dc).powi(2) * (db - dc);
    if denom == 0.0 {
        return None;
    }
    let r1 = fb - fa - fpa * db;
    let r2 = fc - fa - fpa * dc;
    let aa = (dc * dc * r1 - db * db * r2) / denom;
    let bb = (-dc.powi(3) * r1 + db.powi(3) * r2) / denom;
    if aa == 0.0 {
        return None;
    }
    let radical = bb * bb - 3.0 * aa * fpa;
    if radical < 0.0 {
        return None;
    }
    let x = a + (-bb + radical.sqrt()) / (3.0 * aa);
    x.is_finite().then_some(x)
}

/// Minimizer of the quadratic through `(a, fa)` with slope `fpa` and `(b, fb)`.
fn quad_min(a: f64, fa: f64, fpa: f64, b: f64, fb: f64) -> Option<f64> {
    let db = b - a;
    if db == 0.0 {
        return None;
    }
    let curvature = (fb - fa - fpa * db) / (db * db);
    if curvature <= 0.0 {
        return None;
    }
    let x = a - fpa / (2.0 * curvature);
    x.is_finite().then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rosenbrock {
        evals: usize,
    }

    impl Objective for Rosenbrock {
        fn value(&mut self, x: &[f64]) -> Result<f64> {
            self.evals += 1;
            Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2))
        }

        fn gradient(&mut self, x: &[f64], _fx: f64) -> Result<Vec<f64>> {
            Ok(vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ])
        }
    }

    #[test]
    fn solves_rosenbrock() {
        let mut obj = Rosenbrock { evals: 0 };
        let mut seen = Vec::new();
        let out = minimize(
            &mut obj,
            vec![-1.2, 1.0],
            BfgsOptions::default(),
            |k, _, f| seen.push((k, f)),
        )
        .unwrap();
        assert_eq!(out.reason, StopReason::GradientTolerance);
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4);
        assert!(seen.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(seen.len(), out.iterations + 1);
    }

    #[test]
    fn quadratic_in_few_steps() {
        struct Bowl;
        impl Objective for Bowl {
            fn value(&mut self, x: &[f64]) -> Result<f64> {
                Ok(x[0] * x[0] + 10.0 * x[1] * x[1])
            }
            fn gradient(&mut self, x: &[f64], _: f64) -> Result<Vec<f64>> {
                Ok(vec![2.0 * x[0], 20.0 * x[1]])
            }
        }
        let out = minimize(
            &mut Bowl,
            vec![3.0, -2.0],
            BfgsOptions::default(),
            |_, _, _| {},
        )
        .unwrap();
        assert_eq!(out.reason, StopReason::GradientTolerance);
        assert!(out.iterations < 15);
    }

    #[test]
    fn zero_iterations() {
        let mut obj = Rosenbrock { evals: 0 };
        let opts = BfgsOptions {
            max_iterations: 0,
            ..Default::default()
        };
        let out = minimize(&mut obj, vec![0.0, 0.0], opts, |_, _, _| {}).unwrap();
        assert_eq!(out.f, 1.0);
        assert_eq!(out.iterations, 0);
        assert_eq!(obj.evals, 1);
    }

    #[test]
    fn interpolants() {
        // f = (x - 2)^2: slope -4 at 0, value 4; f(3) = 1.
        assert!((quad_min(0.0, 4.0, -4.0, 3.0, 1.0).unwrap() - 2.0).abs() < 1e-12);
        // f = x^3 - 3x: local min at 1.
        let f = |x: f64| x.powi(3) - 3.0 * x;
        let m = cubic_min(0.0, f(0.0), -3.0, 2.0, f(2.0), 3.0, f(3.0)).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }
}
