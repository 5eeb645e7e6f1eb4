//! Dense and Krylov kernels for Hermitian matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `exp(m)` by Taylor series with scaling and squaring.
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m * Complex64::new(scale, 0.0);
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    // 0.5^18 / 18! is far below double precision.
    for k in 1..=18 {
        term = &term * &a * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Each eigenvector is rotated so its largest-magnitude component is real
/// and positive.
pub fn hermitian_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let pivot = (0..n)
            .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
            .map(|i| v[i])
            .unwrap_or(ONE);
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            ONE
        };
        for i in 0..n {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    (values, vectors)
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Krylov settings for [`expm_multiply`].
#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    pub max_dim: usize,
    pub tolerance: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            max_dim: 30,
            tolerance: 1e-13,
        }
    }
}

/// `exp(-i tau H) v` by its Taylor series, for steps with
/// `tau ||H|| <= TAYLOR_MAX_NORM`. Terms are added until one falls below
/// `tolerance ||v||`.
pub fn taylor_expm_multiply<F>(
    matvec: &mut F,
    v: &[Complex64],
    tau: f64,
    tolerance: f64,
) -> Vec<Complex64>
where
    F: FnMut(&[Complex64], &mut [Complex64]) + ?Sized,
{
    const MAX_TERMS: usize = 40;
    let scale = norm(v);
    let mut out = v.to_vec();
    let mut term = v.to_vec();
    let mut next = vec![ZERO; v.len()];
    for k in 1..=MAX_TERMS {
        matvec(&term, &mut next);
        let factor = Complex64::new(0.0, -tau / k as f64);
        let mut size = 0.0;
        for ((t, n), o) in term.iter_mut().zip(&next).zip(out.iter_mut()) {
            *t = n * factor;
            *o += *t;
            size += t.norm_sqr();
        }
        if size.sqrt() <= tolerance * scale {
            break;
        }
    }
    out
}

/// Largest `tau ||H||` for which [`taylor_expm_multiply`] is used.
pub const TAYLOR_MAX_NORM: f64 = 0.5;

const PREDICTOR_SLACK: f64 = 1e4;

/// `exp(-i tau H) v` for Hermitian `H` given as a matrix-vector product,
/// using a Lanczos basis with full reorthogonalisation.
///
/// The Krylov dimension grows until the residual estimate
/// `beta_m |[exp(-i tau T_m) e_1]_m|` drops below the tolerance; if the
/// dimension cap is reached first, the step is split in half.
pub fn expm_multiply<F>(
    matvec: &mut F,
    v: &[Complex64],
    tau: f64,
    opts: KrylovOptions,
) -> Vec<Complex64>
where
    F: FnMut(&[Complex64], &mut [Complex64]) + ?Sized,
{
    let n = v.len();
    let beta0 = norm(v);
    if beta0 == 0.0 || tau == 0.0 {
        return v.to_vec();
    }
    let max_dim = opts.max_dim.min(n).max(1);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_dim + 1);
    basis.push(v.iter().map(|z| z / beta0).collect());
    let mut alpha: Vec<f64> = Vec::with_capacity(max_dim);
    let mut beta: Vec<f64> = Vec::with_capacity(max_dim);
    let mut w = vec![ZERO; n];
    let mut leading = 1.0;

    loop {
        let j = alpha.len();
        matvec(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for q in &basis {
            let c = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
        let b = norm(&w);
        let m = alpha.len();
        // `leading` is the lowest-order term of the last coefficient; the
        // small exponential is only worth forming once the residual it
        // predicts is near the tolerance.
        let breakdown = b <= 1e-14 * (1.0 + a.abs());
        if breakdown || b * leading <= PREDICTOR_SLACK * opts.tolerance || m == n || m == max_dim {
            let small = tridiagonal_expm_e1(&alpha, &beta, tau);
            let estimate = b * small[m - 1].norm();
            if breakdown || estimate <= opts.tolerance || m == n {
                return combine(&basis, &small, beta0, n);
            }
        }
        if m == max_dim {
            let half = expm_multiply(matvec, v, 0.5 * tau, opts);
            return expm_multiply(matvec, &half, 0.5 * tau, opts);
        }
        leading *= tau * b / m as f64;
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
}

fn combine(basis: &[Vec<Complex64>], coeffs: &[Complex64], beta0: f64, n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n];
    for (q, c) in basis.iter().zip(coeffs) {
        let c = c * beta0;
        for (o, qi) in out.iter_mut().zip(q) {
            *o += c * qi;
        }
    }
    out
}

/// `exp(-i tau T) e_1` for the real symmetric tridiagonal `T`.
fn tridiagonal_expm_e1(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<Complex64> {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let weights: DVector<Complex64> = DVector::from_fn(m, |k, _| {
        let phase = Complex64::new(0.0, -tau * eig.eigenvalues[k]).exp();
        phase * eig.eigenvectors[(0, k)]
    });
    (0..m)
        .map(|i| (0..m).map(|k| weights[k] * eig.eigenvectors[(i, k)]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn exact_expm(h: &DMatrix<Complex64>, tau: f64) -> DMatrix<Complex64> {
        let (vals, vecs) = hermitian_eigen(h.clone());
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&l| Complex64::new(0.0, -tau * l).exp()),
        ));
        &vecs * d * vecs.adjoint()
    }

    #[test]
    fn expm_matches_spectral() {
        let h = random_hermitian(6, 7) * Complex64::new(3.0, 0.0);
        let m = &h * Complex64::new(0.0, -1.3);
        let diff = expm(&m) - exact_expm(&h, 1.3);
        assert!(diff.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn expm_pauli_x() {
        let x = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let u = expm(&(&x * Complex64::new(0.0, -std::f64::consts::FRAC_PI_2)));
        assert!((u[(1, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(u[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn eigen_sorted_and_phase_fixed() {
        let h = random_hermitian(5, 3);
        let (vals, vecs) = hermitian_eigen(h.clone());
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..5 {
            let col = vecs.column(k);
            let pivot = col
                .iter()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            assert!(pivot.im.abs() < 1e-14 && pivot.re > 0.0);
            let r = &h * col - col * Complex64::new(vals[k], 0.0);
            assert!(r.norm() < 1e-10);
        }
    }

    #[test]
    fn krylov_matches_dense() {
        let h = random_hermitian(40, 11) * Complex64::new(4.0, 0.0);
        let v: Vec<Complex64> = (0..40)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let nv = norm(&v);
        let v: Vec<Complex64> = v.iter().map(|z| z / nv).collect();
        for tau in [1e-3, 0.1, 2.5] {
            let mut mv = |x: &[Complex64], y: &mut [Complex64]| {
                let r = &h * DVector::from_column_slice(x);
                y.copy_from_slice(r.as_slice());
            };
            let got = expm_multiply(&mut mv, &v, tau, KrylovOptions::default());
            let want = exact_expm(&h, tau) * DVector::from_column_slice(&v);
            let err = got
                .iter()
                .zip(want.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "tau {tau}: {err}");
            assert!((norm(&got) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn krylov_breakdown_on_eigenvector() {
        let mut mv = |x: &[Complex64], y: &mut [Complex64]| {
            y[0] = x[0] * 2.0;
            y[1] = -x[1];
        };
        let out = expm_multiply(&mut mv, &[ONE, ZERO], 0.5, KrylovOptions::default());
        assert!((out[0] - Complex64::new(0.0, -1.0).exp()).norm() < 1e-14);
        assert!(out[1].norm() < 1e-14);
    }
}
