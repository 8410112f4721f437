//! Dense complex matrices and the few operations the validators need.

use ndarray::Array2;
use num_traits::{One, Zero};

pub type Complex = num_complex::Complex64;
pub type CMatrix = Array2<Complex>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::from_diag_elem(n, Complex::one())
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::from_elem((n, n), Complex::zero())
}

pub fn diag(entries: &[Complex]) -> CMatrix {
    let n = entries.len();
    let mut m = zeros(n);
    for (i, z) in entries.iter().enumerate() {
        m[[i, i]] = *z;
    }
    m
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b)
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Scales every column `j` of `a` by `d[j]`, i.e. `a · diag(d)`.
pub fn mul_diag_right(a: &CMatrix, d: &[Complex]) -> CMatrix {
    let mut out = a.clone();
    for ((_, j), z) in out.indexed_iter_mut() {
        *z *= d[j];
    }
    out
}

/// Least-squares scalar `z` minimising `|a - z·b|`, or `None` if `b` vanishes.
pub fn best_scalar(a: &CMatrix, b: &CMatrix) -> Option<Complex> {
    let num: Complex = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let den: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    (den > 0.0).then(|| num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dagger_and_diag() {
        let mut m = zeros(2);
        m[[0, 1]] = Complex::new(1.0, 2.0);
        let d = dagger(&m);
        assert_eq!(d[[1, 0]], Complex::new(1.0, -2.0));
        let dm = mul_diag_right(&identity(2), &[Complex::new(2.0, 0.0), Complex::i()]);
        assert_eq!(dm, diag(&[Complex::new(2.0, 0.0), Complex::i()]));
    }

    #[test]
    fn best_scalar_recovers_phase() {
        let b = identity(3);
        let a = b.mapv(|z| z * Complex::i());
        let z = best_scalar(&a, &b).unwrap();
        assert!((z - Complex::i()).norm() < 1e-15);
        assert!(best_scalar(&a, &zeros(3)).is_none());
    }
}
