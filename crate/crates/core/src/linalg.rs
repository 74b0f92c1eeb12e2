//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, Complex, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{CMatrix, CVector, Real};

/// Relative tolerance for eigenvalues that are treated as numerically zero.
const PSD_TOLERANCE: f64 = 1e-10;

/// Solves `a * x = b` for Hermitian positive definite `a` by Cholesky
/// factorization.
pub fn hermitian_solve<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let chol = Cholesky::new(a.clone())
        .ok_or_else(|| Error::Degenerate("matrix not positive definite; cannot factor".into()))?;
    Ok(chol.solve(b))
}

/// Hermitian square root of a PSD matrix. Eigenvalues below zero by less
/// than `1e-10 * trace` are clamped; anything more negative is rejected.
pub fn psd_sqrt<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(a.clone());
    }
    let eig = SymmetricEigen::new(hermitize(a));
    let scale = eig.eigenvalues.iter().fold(T::zero(), |acc, v| acc + v.abs());
    let floor = -(T::lit(PSD_TOLERANCE) * scale);
    let min = eig.eigenvalues.iter().copied().fold(T::max_value().unwrap(), T::min);
    if min < floor {
        return Err(Error::NotPsd(min.as_f64()));
    }
    let roots = eig.eigenvalues.map(|v| Complex::from(v.max(T::zero()).sqrt()));
    let v = &eig.eigenvectors;
    let scaled = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * roots[j]);
    Ok(hermitize(&(scaled * v.adjoint())))
}

/// Low-rank factor of a PSD matrix: `a ~ F F^H` with `F = U_k diag(sqrt(l_k))`
/// over the eigenpairs above `rel_tol` times the trace. Returns `F` and the
/// kept eigenvalues, so `F^H F = diag(l_k)`.
pub fn psd_factor<T: Real>(a: &CMatrix<T>, rel_tol: f64) -> Result<(CMatrix<T>, Vec<T>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), Vec::new()));
    }
    let eig = SymmetricEigen::new(hermitize(a));
    let scale = eig.eigenvalues.iter().fold(T::zero(), |acc, v| acc + v.abs());
    let min = eig.eigenvalues.iter().copied().fold(T::max_value().unwrap(), T::min);
    if min < -(T::lit(PSD_TOLERANCE) * scale) {
        return Err(Error::NotPsd(min.as_f64()));
    }
    let cut = T::lit(rel_tol) * scale;
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > cut).collect();
    let f = CMatrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])] * Complex::from(eig.eigenvalues[keep[j]].sqrt()));
    Ok((f, keep.iter().map(|&i| eig.eigenvalues[i]).collect()))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Real>(a: &CMatrix<T>) -> T {
    let eig = SymmetricEigen::new(hermitize(a));
    eig.eigenvalues.iter().copied().fold(T::max_value().unwrap(), T::min)
}

/// `(a + a^H) / 2`.
pub fn hermitize<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let half = Complex::from(T::lit(0.5));
    (a + a.adjoint()) * half
}

pub fn trace_real<T: Real>(a: &CMatrix<T>) -> T {
    (0..a.nrows().min(a.ncols())).fold(T::zero(), |acc, i| acc + a[(i, i)].re)
}

/// Real part of `tr(a * b)` without forming the product.
pub fn trace_of_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let mut acc = Complex::from(T::zero());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    debug_assert_real(acc, "trace of product");
    acc.re
}

/// `x^H a x` for Hermitian `a`.
pub fn quad_form<T: Real>(x: &CVector<T>, a: &CMatrix<T>) -> T {
    let n = x.len();
    let mut acc = Complex::from(T::zero());
    for i in 0..n {
        let mut row = Complex::from(T::zero());
        for j in 0..n {
            row += a[(i, j)] * x[j];
        }
        acc += x[i].conj() * row;
    }
    debug_assert_real(acc, "quadratic form");
    acc.re
}

pub fn norm_sqr<T: Real>(x: &CVector<T>) -> T {
    x.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr())
}

/// Frobenius norm of `a - b` relative to that of `b`.
pub fn relative_frobenius<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let diff = (a - b).norm();
    let base = b.norm();
    if base == T::zero() {
        diff
    } else {
        diff / base
    }
}

#[inline]
fn debug_assert_real<T: Real>(z: Complex<T>, what: &str) {
    if cfg!(debug_assertions) {
        let rel = T::lit(1e-10).max(T::default_epsilon() * T::lit(1e4));
        assert!(
            z.im.abs() <= rel * (z.re * z.re + z.im * z.im).sqrt(),
            "{what} has imaginary residue {:e} (value {:e})",
            z.im.as_f64(),
            z.re.as_f64()
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_normal_vector, substream};

    fn random_psd(n: usize, seed: u64) -> CMatrix<f64> {
        let mut rng = substream(seed, 0);
        let cols: Vec<CVector<f64>> = (0..n).map(|_| complex_normal_vector(&mut rng, n)).collect();
        let a = CMatrix::from_columns(&cols);
        &a * a.adjoint()
    }

    #[test]
    fn sqrt_squares_back() {
        let a = random_psd(4, 11);
        let s = psd_sqrt(&a).unwrap();
        assert!(relative_frobenius(&(&s * &s), &a) < 1e-10);
    }

    #[test]
    fn sqrt_of_rank_one_is_clamped() {
        let v = CVector::<f64>::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)]);
        let a = &v * v.adjoint();
        let s = psd_sqrt(&a).unwrap();
        assert!(relative_frobenius(&(&s * &s), &a) < 1e-10);
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let a = CMatrix::<f64>::from_diagonal(&CVector::from_vec(vec![
            Complex::new(1.0, 0.0),
            Complex::new(-0.5, 0.0),
        ]));
        assert!(matches!(psd_sqrt(&a), Err(Error::NotPsd(_))));
    }

    #[test]
    fn solve_matches_multiplication() {
        let a = random_psd(3, 5) + CMatrix::identity(3, 3);
        let b = random_psd(3, 6);
        let x = hermitian_solve(&a, &b).unwrap();
        assert!(relative_frobenius(&(&a * &x), &b) < 1e-10);
    }

    #[test]
    fn trace_helpers_agree_with_products() {
        let a = random_psd(3, 1);
        let b = random_psd(3, 2);
        let direct = (&a * &b).trace().re;
        assert!((trace_of_product(&a, &b) - direct).abs() < 1e-10 * direct.abs());
        let x = complex_normal_vector::<f64, _>(&mut substream(3, 0), 3);
        let q = (x.adjoint() * &a * &x)[(0, 0)].re;
        assert!((quad_form(&x, &a) - q).abs() < 1e-10 * q.abs());
    }
}
