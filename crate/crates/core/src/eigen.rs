//! Dense Hermitian eigensolver for the small matrices that appear in
//! Gram-basis computations (at most a few hundred rows).

use num_complex::Complex;

use crate::scalar::Scalar;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> HermitianMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::new(T::zero(), T::zero()); n * n],
        }
    }

    /// Builds the matrix from an entry function. Only the upper triangle is
    /// read; the lower one is filled by conjugation.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(f(i, i).re, T::zero());
            for j in i + 1..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn off_diagonal_norm_sq(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s = s + self[(i, j)].norm_sqr();
                }
            }
        }
        s
    }

    fn frobenius_norm_sq(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl<T> std::ops::Index<(usize, usize)> for HermitianMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for HermitianMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors, stored
/// as columns: `vectors[k]` is the eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<Complex<T>>>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi iteration.
pub fn hermitian_eigen<T: Scalar>(matrix: &HermitianMatrix<T>) -> Eigen<T> {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = HermitianMatrix::<T>::zeros(n);
    for i in 0..n {
        v[(i, i)] = Complex::new(T::one(), T::zero());
    }
    let total = a.frobenius_norm_sq();
    let eps = T::epsilon();
    let target = eps * eps * total;

    for _ in 0..MAX_SWEEPS {
        if a.off_diagonal_norm_sq() <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    Eigen { values, vectors }
}

// Zeroes a[p][q] with J = P·R, where P rephases column q so the pivot is real
// and R is the usual real Jacobi rotation. A <- J^H A J, V <- V J.
fn rotate<T: Scalar>(a: &mut HermitianMatrix<T>, v: &mut HermitianMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip pivots already negligible against the diagonal
    let tiny = T::epsilon() * T::epsilon() * (app.abs() + aqq.abs());
    if abs <= tiny {
        a[(p, q)] = Complex::new(T::zero(), T::zero());
        a[(q, p)] = Complex::new(T::zero(), T::zero());
        return;
    }
    let phase = apq / abs; // e^{i phi}
    let phase_c = phase.conj();
    let two = T::one() + T::one();
    let theta = (aqq - app) / (two * abs);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let n = a.dim();

    // columns: X = A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_c * s;
        a[(k, q)] = akp * s + akq * phase_c * c;
    }
    // rows: J^H X
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase_c * s;
        v[(k, q)] = vkp * s + vkq * phase_c * c;
    }
}
