//! Dense symmetric eigensolver.
//!
//! Householder reduction to tridiagonal form followed by implicit QL with
//! Wilkinson-type shifts. Storage is row-major and the eigenvector
//! accumulator is kept transposed (one eigenvector per row) so every
//! update touches contiguous memory.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense symmetric matrix, row-major with both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    /// Builds the matrix from the lower triangle of `f(i, j)`, `j <= i`.
    pub fn from_lower<F: FnMut(usize, usize) -> T>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Takes ownership of row-major data; the caller guarantees symmetry.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(SymMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Eigenvalues in descending order; `vectors[m]` belongs to `values[m]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Option<Vec<Vec<T>>>,
}

/// Full eigendecomposition (values and orthonormal vectors).
pub fn eigh<T: Real>(m: &SymMatrix<T>) -> Result<SymmetricEigen<T>> {
    decompose(m, true)
}

/// Eigenvalues only; skips the `O(n³)` vector accumulation.
pub fn eigvalsh<T: Real>(m: &SymMatrix<T>) -> Result<Vec<T>> {
    decompose(m, false).map(|e| e.values)
}

fn decompose<T: Real>(m: &SymMatrix<T>, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    let n = m.n;
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: want_vectors.then(Vec::new),
        });
    }
    let mut a = m.data.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let mut reflectors: Vec<(usize, Vec<T>, T)> = Vec::new();

    for i in (1..n).rev() {
        let l = i - 1;
        let row = i * n;
        if l == 0 {
            e[i] = a[row];
            continue;
        }
        let scale: T = a[row..row + i].iter().map(|x| x.abs()).sum();
        if scale == T::zero() {
            e[i] = a[row + l];
            continue;
        }
        let mut u: Vec<T> = a[row..row + i].iter().map(|&x| x / scale).collect();
        let mut h = dot(&u, &u);
        let f = u[l];
        let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h = h - f * g;
        u[l] = f - g;

        let p: Vec<T> = (0..i).map(|j| dot(&a[j * n..j * n + i], &u) / h).collect();
        let k = dot(&u, &p) / (h + h);
        let q: Vec<T> = p.iter().zip(&u).map(|(&pj, &uj)| pj - k * uj).collect();
        for j in 0..i {
            let (uj, qj) = (u[j], q[j]);
            let r = &mut a[j * n..j * n + i];
            for c in 0..i {
                r[c] = r[c] - (uj * q[c] + qj * u[c]);
            }
        }
        if want_vectors {
            reflectors.push((i, u, h));
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }

    // W = Qᵀ = P_1 P_2 … P_{n-1}; reflectors were recorded from i = n-1 down.
    let mut w: Option<Vec<T>> = want_vectors.then(|| {
        let mut w = vec![T::zero(); n * n];
        for i in 0..n {
            w[i * n + i] = T::one();
        }
        for (i, u, h) in &reflectors {
            let mut s = vec![T::zero(); n];
            for (kk, &uk) in u.iter().enumerate() {
                if uk != T::zero() {
                    let wr = &w[kk * n..(kk + 1) * n];
                    for c in 0..n {
                        s[c] = s[c] + uk * wr[c];
                    }
                }
            }
            for (kk, &uk) in u.iter().enumerate().take(*i) {
                let f = uk / *h;
                let wr = &mut w[kk * n..(kk + 1) * n];
                for c in 0..n {
                    wr[c] = wr[c] - f * s[c];
                }
            }
        }
        w
    });

    implicit_ql(&mut d, &mut e, w.as_deref_mut(), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = w.map(|w| order.iter().map(|&i| w[i * n..(i + 1) * n].to_vec()).collect());
    Ok(SymmetricEigen { values, vectors })
}

fn implicit_ql<T: Real>(d: &mut [T], e: &mut [T], mut w: Option<&mut [T]>, n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence(format!(
                    "implicit QL did not converge for eigenvalue {l} of {n} (|e| = {}, |d| = {})",
                    e[l].abs(),
                    d[l].abs()
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(w) = w.as_deref_mut() {
                    let (lo, hi) = w.split_at_mut((i + 1) * n);
                    let ri = &mut lo[i * n..];
                    let rj = &mut hi[..n];
                    for k in 0..n {
                        let f = rj[k];
                        rj[k] = s * ri[k] + c * f;
                        ri[k] = c * ri[k] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Eigenvalues (descending) of the Hermitian matrix `re + i·im`, via the
/// real symmetric embedding `[[re, −im], [im, re]]` whose spectrum is the
/// Hermitian spectrum with every eigenvalue doubled.
pub fn hermitian_eigvalsh<T: Real>(n: usize, re: &[T], im: &[T]) -> Result<Vec<T>> {
    let big = SymMatrix::from_lower(2 * n, |i, j| {
        let (bi, ri) = (i / n, i % n);
        let (bj, rj) = (j / n, j % n);
        match (bi, bj) {
            (0, 0) | (1, 1) => re[ri * n + rj],
            (1, 0) => im[ri * n + rj],
            (0, 1) => -im[ri * n + rj],
            _ => unreachable!(),
        }
    });
    let vals = eigvalsh(&big)?;
    Ok(vals.into_iter().step_by(2).collect())
}
