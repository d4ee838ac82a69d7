//! Symmetrised Nyström discretisation of `P_F B_S P_F` and the spectral
//! statistics computed from it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{Domain, Shape};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::{eigh, eigvalsh, SymMatrix};
use crate::quadrature::tensor_nodes;
use crate::scalar::{plancherel_factor, Real};

pub const DEFAULT_SIZE_CAP: usize = 5000;

/// Plunge thresholds reported by [`spectrum`].
pub const DEFAULT_PLUNGE_EPS: [f64; 3] = [0.001, 0.01, 0.1];

/// Eigenvalues below this are reported as numerically zero in counts.
pub const NULL_EIGENVALUE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct DiscretizedOperator<T> {
    f: Domain<T>,
    s: Domain<T>,
    kernel: KernelSpec<T>,
    n_per_axis: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
    sqrt_w: Vec<T>,
    matrix: SymMatrix<T>,
}

impl<T: Real> DiscretizedOperator<T> {
    pub fn spatial(&self) -> &Domain<T> {
        &self.f
    }

    pub fn frequency(&self) -> &Domain<T> {
        &self.s
    }

    pub fn kernel(&self) -> &KernelSpec<T> {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// Number of retained quadrature nodes (the matrix order).
    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    pub fn node(&self, i: usize) -> &[T] {
        let d = self.dim();
        &self.nodes[i * d..(i + 1) * d]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.matrix
    }

    /// `(√w_i f(x_i))_i`: the coordinates in which the Euclidean inner
    /// product is the quadrature inner product on `F`.
    pub fn weighted_samples<G: Fn(&[T]) -> T>(&self, f: G) -> Vec<T> {
        (0..self.size()).map(|i| self.sqrt_w[i] * f(self.node(i))).collect()
    }

    /// Nyström extension of a weighted vector `v`:
    /// `Σ_j √w_j K_S(x − x_j) v_j`, i.e. `B_S` applied to the function `v`
    /// represents on `F`.
    pub fn extend(&self, v: &[T], x: &[T]) -> Result<T> {
        let d = self.dim();
        let mut t = vec![T::zero(); d];
        let mut acc = T::zero();
        for j in 0..self.size() {
            for (a, tv) in t.iter_mut().enumerate() {
                *tv = x[a] - self.nodes[j * d + a];
            }
            acc = acc + self.sqrt_w[j] * self.kernel.value_unchecked(&t)? * v[j];
        }
        Ok(acc)
    }
}

/// Tensor Gauss–Legendre nodes on the bounding box of `F`, masked to `F`.
fn masked_nodes<T: Real>(f: &Domain<T>, n_per_axis: usize) -> (Vec<T>, Vec<T>) {
    let (points, weights) = tensor_nodes(&f.bounding_box(), n_per_axis);
    if !matches!(f.shape(), Shape::Ball { .. }) {
        return (points, weights);
    }
    let d = f.dim();
    let mut kept_p = Vec::with_capacity(points.len());
    let mut kept_w = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        let x = &points[i * d..(i + 1) * d];
        if f.contains_unchecked(x) {
            kept_p.extend_from_slice(x);
            kept_w.push(w);
        }
    }
    (kept_p, kept_w)
}

/// Kernel of `B_S`. Closed-form regions are recentred at the origin: a
/// frequency translation is a modulation, which is a unitary similarity
/// and leaves the spectrum unchanged.
fn band_kernel<T: Real>(s: &Domain<T>) -> Result<KernelSpec<T>> {
    match s.shape() {
        Shape::Generic(_) => KernelSpec::quadrature(s.clone(), 16),
        _ => KernelSpec::closed_form(s.centered()),
    }
}

pub fn discretize<T: Real>(f: &Domain<T>, s: &Domain<T>, n_per_axis: usize) -> Result<DiscretizedOperator<T>> {
    discretize_with_cap(f, s, n_per_axis, DEFAULT_SIZE_CAP)
}

pub fn discretize_with_cap<T: Real>(
    f: &Domain<T>,
    s: &Domain<T>,
    n_per_axis: usize,
    size_cap: usize,
) -> Result<DiscretizedOperator<T>> {
    if f.is_generic() {
        return Err(Error::Unsupported("spatial domain must be an interval, box or ball".into()));
    }
    if f.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: s.dim(),
        });
    }
    if n_per_axis < 8 {
        return Err(Error::invalid(format!("n_per_axis must be at least 8, got {n_per_axis}")));
    }
    let d = f.dim();
    let size = n_per_axis.checked_pow(d as u32).unwrap_or(usize::MAX);
    if size > size_cap {
        return Err(Error::SizeCap { size, cap: size_cap });
    }
    let kernel = band_kernel(s)?;
    let (nodes, weights) = masked_nodes(f, n_per_axis);
    let sqrt_w: Vec<T> = weights.iter().map(|w| w.sqrt()).collect();
    let n = weights.len();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = &nodes[i * d..(i + 1) * d];
            let mut t = vec![T::zero(); d];
            (0..=i)
                .map(|j| {
                    for (a, tv) in t.iter_mut().enumerate() {
                        *tv = xi[a] - nodes[j * d + a];
                    }
                    Ok(sqrt_w[i] * kernel.value_unchecked(&t)? * sqrt_w[j])
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    let matrix = SymMatrix::from_lower(n, |i, j| rows[i][j]);
    Ok(DiscretizedOperator {
        f: f.clone(),
        s: s.clone(),
        kernel,
        n_per_axis,
        nodes,
        weights,
        sqrt_w,
        matrix,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport<T> {
    /// Descending, raw (not clipped).
    pub eigenvalues: Vec<T>,
    /// `eigenvectors[k]` is the unit eigenvector of `eigenvalues[k]`.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<T>>,
    /// 1-based; `None` when no eigenvalue is below 1/2.
    pub crossing_index: Option<usize>,
    pub plunge: BTreeMap<String, usize>,
    /// Bandwidth product `|F|·|S|` (one dimension only).
    pub c: Option<T>,
    pub n: usize,
    pub converged: bool,
}

impl<T: Real> SpectrumReport<T> {
    fn build(values: Vec<T>, vectors: Vec<Vec<T>>, op: &DiscretizedOperator<T>, converged: bool) -> Result<Self> {
        let c = if op.dim() == 1 {
            Some(op.f.measure()? * op.s.measure()?)
        } else {
            None
        };
        let mut rep = SpectrumReport {
            crossing_index: None,
            plunge: BTreeMap::new(),
            n: values.len(),
            eigenvalues: values,
            eigenvectors: vectors,
            c,
            converged,
        };
        rep.crossing_index = crossing_index(&rep);
        rep.set_plunge(&DEFAULT_PLUNGE_EPS.map(T::lit))?;
        Ok(rep)
    }

    /// Replaces the plunge table with counts at the given thresholds.
    pub fn set_plunge(&mut self, eps: &[T]) -> Result<()> {
        self.plunge.clear();
        for &e in eps {
            let count = plunge_count(self, e)?;
            self.plunge.insert(format!("{e}"), count);
        }
        Ok(())
    }

    /// `#{k : λ_k ≥ threshold}`.
    pub fn count_at_least(&self, threshold: T) -> usize {
        self.eigenvalues.iter().filter(|&&l| l >= threshold).count()
    }

    pub fn trace(&self) -> T {
        self.eigenvalues.iter().copied().sum()
    }

    /// `λ_k`, 1-based.
    pub fn lambda(&self, k: usize) -> Option<T> {
        k.checked_sub(1).and_then(|i| self.eigenvalues.get(i).copied())
    }
}

/// Full dense eigendecomposition of the Nyström matrix.
pub fn spectrum<T: Real>(op: &DiscretizedOperator<T>) -> Result<SpectrumReport<T>> {
    let eig = eigh(&op.matrix).map_err(|e| match e {
        Error::NonConvergence(msg) => Error::NonConvergence(format!(
            "{msg} (order {}, trace {}, asymmetry {})",
            op.size(),
            op.matrix.trace(),
            op.matrix.asymmetry()
        )),
        other => other,
    })?;
    SpectrumReport::build(eig.values, eig.vectors.unwrap_or_default(), op, true)
}

/// Number of eigenvalues strictly inside `(ε, 1 − ε)`.
pub fn plunge_count<T: Real>(rep: &SpectrumReport<T>, eps: T) -> Result<usize> {
    if !(eps > T::zero() && eps < T::lit(0.5)) {
        return Err(Error::invalid(format!("plunge threshold must lie in (0, 1/2), got {eps}")));
    }
    Ok(rep.eigenvalues.iter().filter(|&&l| l > eps && l < T::one() - eps).count())
}

/// Smallest 1-based `k` with `λ_k < 1/2`.
pub fn crossing_index<T: Real>(rep: &SpectrumReport<T>) -> Option<usize> {
    rep.eigenvalues.iter().position(|&l| l < T::lit(0.5)).map(|i| i + 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleOrthogonality<T> {
    /// `max_{j≠k} |G_jk| / √(G_jj G_kk)` of the `F`-restricted Gram matrix.
    pub defect: T,
    /// `G_kk = ‖P_F Ψ_k‖²`, expected to equal `λ_k`.
    pub diagonal: Vec<T>,
    pub eigenvalues: Vec<T>,
}

impl<T: Real> DoubleOrthogonality<T> {
    pub fn diagonal_error(&self) -> T {
        self.diagonal
            .iter()
            .zip(&self.eigenvalues)
            .map(|(&g, &l)| (g - l).abs())
            .fold(T::zero(), T::max)
    }
}

/// Builds the unit-norm band-limited eigenfunctions
/// `Ψ_k = B_S f_k / √λ_k` by Nyström extension and integrates their
/// products over `F` on an independent Gauss–Legendre grid.
pub fn double_orthogonality_defect<T: Real>(
    rep: &SpectrumReport<T>,
    op: &DiscretizedOperator<T>,
    top_k: usize,
) -> Result<DoubleOrthogonality<T>> {
    if top_k == 0 || top_k > rep.eigenvalues.len() || top_k > rep.eigenvectors.len() {
        return Err(Error::invalid(format!("top_k = {top_k} outside 1..={}", rep.eigenvectors.len())));
    }
    let lambdas = rep.eigenvalues[..top_k].to_vec();
    if let Some(k) = lambdas.iter().position(|&l| l <= T::lit(1e-6)) {
        return Err(Error::invalid(format!("λ_{} = {} is numerically null", k + 1, lambdas[k])));
    }
    let (grid, gw) = masked_nodes(&op.f, op.n_per_axis + 7);
    let d = op.dim();
    let samples: Vec<Vec<T>> = (0..gw.len())
        .into_par_iter()
        .map(|p| {
            let x = &grid[p * d..(p + 1) * d];
            (0..top_k)
                .map(|k| Ok(op.extend(&rep.eigenvectors[k], x)? / lambdas[k].sqrt()))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    let mut gram = vec![T::zero(); top_k * top_k];
    for (row, &w) in samples.iter().zip(&gw) {
        for a in 0..top_k {
            for b in 0..top_k {
                gram[a * top_k + b] = gram[a * top_k + b] + w * row[a] * row[b];
            }
        }
    }
    let diagonal: Vec<T> = (0..top_k).map(|k| gram[k * top_k + k]).collect();
    let mut defect = T::zero();
    for a in 0..top_k {
        for b in 0..top_k {
            if a != b {
                let r = gram[a * top_k + b].abs() / (diagonal[a] * diagonal[b]).sqrt();
                defect = defect.max(r);
            }
        }
    }
    Ok(DoubleOrthogonality {
        defect,
        diagonal,
        eigenvalues: lambdas,
    })
}

/// Eigenvalues of `B_S P_F B_S` discretised on the frequency side. The
/// kernel there is `(2π)^{-d} K_F(ξ − η)` with
/// `K_F(u) = ∫_F e^{−ix·u} dx = e^{−i c·u} K_{F−c}(u)·(2π)^d`,
/// so after dropping the unitary phase it is the band kernel of the
/// recentred `F`, and the frequency side is `discretize(S, F − c)`.
pub fn frequency_side<T: Real>(f: &Domain<T>, s: &Domain<T>, n_per_axis: usize) -> Result<DiscretizedOperator<T>> {
    if f.is_generic() {
        return Err(Error::Unsupported("frequency-side kernel needs a closed-form spatial domain".into()));
    }
    if s.is_generic() {
        return Err(Error::Unsupported("frequency-side nodes need an interval, box or ball S".into()));
    }
    discretize(s, &f.centered(), n_per_axis)
}

/// `max_{k ≤ top_k} |λ_k(spatial) − λ_k(frequency)|`.
pub fn spectra_identity_defect<T: Real>(f: &Domain<T>, s: &Domain<T>, n_per_axis: usize, top_k: usize) -> Result<T> {
    let spatial = eigvalsh(discretize(f, s, n_per_axis)?.matrix())?;
    let freq = eigvalsh(frequency_side(f, s, n_per_axis)?.matrix())?;
    let k = top_k.min(spatial.len()).min(freq.len());
    Ok((0..k).map(|i| (spatial[i] - freq[i]).abs()).fold(T::zero(), T::max))
}

/// Condition-number ceiling for the span Gram matrix.
pub const SPAN_CONDITION_LIMIT: f64 = 1e8;

/// `min_{ψ ∈ span} ‖Aψ‖ / ‖ψ‖` for the Nyström matrix `A`, with `ψ` given
/// in weighted coordinates (see [`DiscretizedOperator::weighted_samples`]).
/// Since `A` is positive semidefinite this is a lower bound for `λ_m`,
/// `m = dim span`, by the max-min principle applied to `A²`.
pub fn rayleigh_min_over_span<T: Real>(op: &DiscretizedOperator<T>, vectors: &[Vec<T>]) -> Result<T> {
    let n = op.size();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: vectors.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0),
        });
    }
    min_gain_over_span(vectors, |v| op.matrix.mul_vec(v))
}

/// Complex span `{a_k + i b_k}`: the real operator acts on real and
/// imaginary parts separately, so the complex span is the real span of
/// `(a_k, b_k)` and `(−b_k, a_k)` in the doubled space.
pub fn rayleigh_min_over_complex_span<T: Real>(op: &DiscretizedOperator<T>, re: &[Vec<T>], im: &[Vec<T>]) -> Result<T> {
    let n = op.size();
    if re.len() != im.len() || re.iter().chain(im).any(|v| v.len() != n) {
        return Err(Error::invalid("real and imaginary parts must be paired vectors of the operator size"));
    }
    let mut embedded = Vec::with_capacity(2 * re.len());
    for (a, b) in re.iter().zip(im) {
        embedded.push(a.iter().chain(b).copied().collect::<Vec<T>>());
        embedded.push(b.iter().map(|&v| -v).chain(a.iter().copied()).collect::<Vec<T>>());
    }
    min_gain_over_span(&embedded, |v| {
        let mut out = op.matrix.mul_vec(&v[..n]);
        out.extend(op.matrix.mul_vec(&v[n..]));
        out
    })
}

fn min_gain_over_span<T: Real, A: Fn(&[T]) -> Vec<T>>(vectors: &[Vec<T>], apply: A) -> Result<T> {
    let m = vectors.len();
    if m == 0 {
        return Err(Error::invalid("span needs at least one vector"));
    }
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>();
    let gram = SymMatrix::from_lower(m, |i, j| dot(&vectors[i], &vectors[j]));
    let g = eigh(&gram)?;
    let (gmax, gmin) = (g.values[0], g.values[m - 1]);
    if !(gmin > T::zero()) || gmax / gmin > T::lit(SPAN_CONDITION_LIMIT) {
        return Err(Error::RankDeficient(format!(
            "span Gram condition {} exceeds {SPAN_CONDITION_LIMIT:e}",
            gmax / gmin
        )));
    }
    // Q = V G^{-1/2} has orthonormal columns spanning the same space.
    let gv = g.vectors.expect("eigenvectors requested");
    let len = vectors[0].len();
    let q: Vec<Vec<T>> = (0..m)
        .map(|c| {
            let mut col = vec![T::zero(); len];
            for (e, ev) in gv.iter().enumerate() {
                let s = ev[c] / g.values[e].sqrt();
                for (k, ek) in ev.iter().enumerate() {
                    let coef = s * *ek;
                    for (o, &v) in col.iter_mut().zip(&vectors[k]) {
                        *o = *o + coef * v;
                    }
                }
            }
            col
        })
        .collect();
    let aq: Vec<Vec<T>> = q.iter().map(|c| apply(c)).collect();
    let compressed = SymMatrix::from_lower(m, |i, j| dot(&aq[i], &aq[j]));
    let smallest = *eigvalsh(&compressed)?.last().expect("nonempty");
    Ok(smallest.max(T::zero()).sqrt())
}

#[derive(Debug, Clone)]
pub struct Refined<T> {
    pub op: DiscretizedOperator<T>,
    pub report: SpectrumReport<T>,
    /// `false` when the size cap stopped the refinement first.
    pub converged: bool,
    /// `(n_per_axis, max change of the top eigenvalues)` per level.
    pub history: Vec<(usize, T)>,
}

/// Doubles `n_per_axis` from 32 until the top `top_k` eigenvalues move by
/// less than `tol`, or until the next level would exceed the size cap.
pub fn refine_until<T: Real>(f: &Domain<T>, s: &Domain<T>, tol: T, top_k: usize) -> Result<Refined<T>> {
    refine_until_with_cap(f, s, tol, top_k, 32, DEFAULT_SIZE_CAP)
}

pub fn refine_until_with_cap<T: Real>(
    f: &Domain<T>,
    s: &Domain<T>,
    tol: T,
    top_k: usize,
    start: usize,
    size_cap: usize,
) -> Result<Refined<T>> {
    if !(tol > T::zero()) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let d = f.dim() as u32;
    let mut n = start.max(8);
    let mut op = discretize_with_cap(f, s, n, size_cap)?;
    let mut prev = eigvalsh(op.matrix())?;
    let mut history = vec![(n, T::infinity())];
    let mut converged = false;
    loop {
        let next = 2 * n;
        if next.checked_pow(d).is_none_or(|sz| sz > size_cap) {
            break;
        }
        let next_op = discretize_with_cap(f, s, next, size_cap)?;
        let values = eigvalsh(next_op.matrix())?;
        let k = top_k.min(values.len()).min(prev.len());
        let change = (0..k).map(|i| (values[i] - prev[i]).abs()).fold(T::zero(), T::max);
        history.push((next, change));
        n = next;
        op = next_op;
        prev = values;
        if change < tol {
            converged = true;
            break;
        }
    }
    let eig = eigh(op.matrix())?;
    let report = SpectrumReport::build(eig.values, eig.vectors.unwrap_or_default(), &op, converged)?;
    Ok(Refined {
        op,
        report,
        converged,
        history,
    })
}

/// `|F|·|S| / (2π)^d`, the trace of `P_F B_S P_F`.
pub fn expected_trace<T: Real>(f: &Domain<T>, s: &Domain<T>) -> Result<T> {
    Ok(f.measure()? * s.measure()? * plancherel_factor::<T>(f.dim()))
}
