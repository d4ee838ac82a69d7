//! Wave packets, Hermite–Gaussian packings of a phase-space rectangle and
//! the eigenvalue lower bound for well-separated concentrated families.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limiting::{rayleigh_min_over_complex_span, spectrum, DiscretizedOperator};
use crate::linalg::hermitian_eigvalsh;
use crate::quadrature::GaussLegendre;
use crate::special::{hermite_function, MAX_HERMITE_ORDER};

/// A window `θ` on `ℝ^d` with `‖θ‖ = 1`.
#[derive(Clone)]
pub enum Window {
    /// `π^{−d/4} exp(−|u|²/2)`.
    Gaussian,
    /// Arbitrary rule; `reach` bounds the region `|u| ≤ reach` holding
    /// essentially all of its mass.
    Custom {
        rule: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        reach: f64,
    },
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Gaussian => f.write_str("Gaussian"),
            Window::Custom { reach, .. } => write!(f, "Custom {{ reach: {reach} }}"),
        }
    }
}

impl Window {
    pub fn eval(&self, u: &[f64]) -> f64 {
        match self {
            Window::Gaussian => {
                let r2: f64 = u.iter().map(|v| v * v).sum();
                PI.powf(-(u.len() as f64) / 4.0) * (-0.5 * r2).exp()
            }
            Window::Custom { rule, .. } => rule(u),
        }
    }

    pub fn reach(&self) -> f64 {
        match self {
            Window::Gaussian => 12.0,
            Window::Custom { reach, .. } => *reach,
        }
    }
}

/// `g(x) = |det A|^{1/2} e^{i T(x)·ξ} θ(T(x))` with `T(x) = A(x − x₀)`.
#[derive(Debug, Clone)]
pub struct WavePacketAtom {
    window: Window,
    /// Row-major `d × d`.
    a: Vec<f64>,
    x0: Vec<f64>,
    xi: Vec<f64>,
    c: f64,
}

fn determinant(a: &[f64], d: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| m[i * d + col].abs().total_cmp(&m[j * d + col].abs()))
            .expect("nonempty range");
        if m[pivot * d + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..d {
                m.swap(col * d + k, pivot * d + k);
            }
            det = -det;
        }
        let p = m[col * d + col];
        det *= p;
        for row in col + 1..d {
            let f = m[row * d + col] / p;
            for k in col..d {
                m[row * d + k] -= f * m[col * d + k];
            }
        }
    }
    det
}

impl WavePacketAtom {
    pub fn new(window: Window, a: Vec<f64>, x0: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        let d = x0.len();
        if d == 0 {
            return Err(Error::invalid("wave packet needs dimension at least 1"));
        }
        if a.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: a.len() });
        }
        if xi.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: xi.len() });
        }
        let det = determinant(&a, d);
        if det == 0.0 || !det.is_finite() {
            return Err(Error::invalid("affine map must be invertible"));
        }
        Ok(WavePacketAtom {
            window,
            a,
            x0,
            xi,
            c: det.abs().sqrt(),
        })
    }

    /// `e^{i(x − x₀)·ξ} θ(x − x₀)`.
    pub fn gabor(window: Window, x0: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        let d = x0.len();
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            a[i * d + i] = 1.0;
        }
        Self::new(window, a, x0, xi)
    }

    /// `2^{−jd/2} θ(2^{−j}x − k)`.
    pub fn wavelet(window: Window, j: i32, k: &[i64]) -> Result<Self> {
        let d = k.len();
        let s = 2f64.powi(-j);
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            a[i * d + i] = s;
        }
        let x0 = k.iter().map(|&ki| ki as f64 / s).collect();
        Self::new(window, a, x0, vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// `|det A|^{1/2}`.
    pub fn normalization(&self) -> f64 {
        self.c
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn translation(&self) -> &[f64] {
        &self.x0
    }

    pub fn modulation(&self) -> &[f64] {
        &self.xi
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn apply_map(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.a[i * d + j] * (x[j] - self.x0[j])).sum())
            .collect()
    }

    pub fn eval_at(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let u = self.apply_map(x);
        let phase: f64 = u.iter().zip(&self.xi).map(|(a, b)| a * b).sum();
        Ok(Complex64::from_polar(self.c * self.window.eval(&u), phase))
    }
}

/// A unit-norm function on the line used as a member of a packing.
pub trait PackingAtom: Send + Sync + fmt::Debug {
    fn eval(&self, x: f64) -> Complex64;

    /// Interval outside which the atom carries no measurable mass.
    fn support_hint(&self) -> (f64, f64);

    /// Bound on `|ξ|` beyond which `ψ̂` carries no measurable mass; sets the
    /// quadrature resolution.
    fn frequency_reach(&self) -> f64;

    /// Closed-form `ψ̂(ξ) = ∫ ψ(x) e^{−ixξ} dx`, when available.
    fn transform(&self, _xi: f64) -> Option<Complex64> {
        None
    }

    /// `‖ψ‖²_{L²(ℝ∖[a,b])}`.
    fn spatial_tail(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.support_hint();
        let mut total = 0.0;
        if lo < a {
            total += line_integral(self, lo, a.min(hi), |v| v.norm_sqr());
        }
        if hi > b {
            total += line_integral(self, b.max(lo), hi, |v| v.norm_sqr());
        }
        total
    }

    /// `(2π)^{−1} ‖ψ̂‖²_{L²(ℝ∖[a,b])}`.
    fn frequency_tail(&self, _a: f64, _b: f64) -> Result<f64> {
        Err(Error::Unsupported("no closed-form transform for this atom".into()))
    }
}

fn panels_for(len: f64, freq: f64) -> usize {
    ((len * freq / 4.0).ceil() as usize).max(32)
}

fn line_integral<A: PackingAtom + ?Sized, G: Fn(Complex64) -> f64>(atom: &A, a: f64, b: f64, g: G) -> f64 {
    if b <= a {
        return 0.0;
    }
    let rule = GaussLegendre::<f64>::new(16);
    rule.composite(a, b, panels_for(b - a, atom.frequency_reach()))
        .into_iter()
        .map(|(x, w)| w * g(atom.eval(x)))
        .sum()
}

/// `∫ ψ(x) e^{−ixξ} dx` by quadrature over the support hint.
pub fn numeric_transform(atom: &dyn PackingAtom, xi: f64) -> Complex64 {
    let (lo, hi) = atom.support_hint();
    let rule = GaussLegendre::<f64>::new(16);
    let panels = panels_for(hi - lo, atom.frequency_reach() + xi.abs());
    rule.composite(lo, hi, panels)
        .into_iter()
        .map(|(x, w)| atom.eval(x) * Complex64::from_polar(w, -x * xi))
        .sum()
}

impl PackingAtom for WavePacketAtom {
    fn eval(&self, x: f64) -> Complex64 {
        let u = self.a[0] * (x - self.x0[0]);
        Complex64::from_polar(self.c * self.window.eval(&[u]), u * self.xi[0])
    }

    fn support_hint(&self) -> (f64, f64) {
        let half = self.window.reach() / self.a[0].abs();
        (self.x0[0] - half, self.x0[0] + half)
    }

    fn frequency_reach(&self) -> f64 {
        self.a[0].abs() * (self.xi[0].abs() + self.window.reach())
    }

    fn transform(&self, eta: f64) -> Option<Complex64> {
        match self.window {
            Window::Gaussian if self.dim() == 1 => {
                let a = self.a[0];
                let z = eta / a - self.xi[0];
                let mag = self.c / a.abs() * (2.0 * PI).sqrt() * self.window.eval(&[z]);
                Some(Complex64::from_polar(mag, -self.x0[0] * eta))
            }
            _ => None,
        }
    }

    fn frequency_tail(&self, lo: f64, hi: f64) -> Result<f64> {
        match self.window {
            Window::Gaussian if self.dim() == 1 => {
                // (2π)^{-1}|ĝ(η)|² dη = θ(v)² dv with v = η/a − ξ
                let a = self.a[0];
                let (p, q) = (lo / a - self.xi[0], hi / a - self.xi[0]);
                let (v0, v1) = if p <= q { (p, q) } else { (q, p) };
                Ok(0.5 * libm::erfc(v1) + 0.5 * libm::erfc(-v0))
            }
            _ => Err(Error::Unsupported("no closed-form transform for this window".into())),
        }
    }
}

/// `h_n((x − x₀)/w) e^{ixξ₀} / √w`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HermiteAtom {
    pub n: usize,
    pub x0: f64,
    pub xi0: f64,
    pub width: f64,
}

/// `∫_U^∞ h_n(u)² du`.
fn hermite_upper_tail(n: usize, u: f64) -> f64 {
    if u < 0.0 {
        return 1.0 - hermite_upper_tail(n, -u);
    }
    let end = u.max((2.0 * n as f64 + 1.0).sqrt()) + 40.0;
    let rule = GaussLegendre::<f64>::new(16);
    rule.composite(u, end, ((end - u) * 4.0).ceil() as usize)
        .into_iter()
        .map(|(x, w)| w * hermite_function(n, x).expect("order validated").powi(2))
        .sum()
}

/// Mass of `h_n²` outside `[a, b]`.
fn hermite_outside(n: usize, a: f64, b: f64) -> f64 {
    hermite_upper_tail(n, b) + hermite_upper_tail(n, -a)
}

pub fn hermite_atom(n: usize, x0: f64, xi0: f64, width: f64) -> Result<HermiteAtom> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::invalid(format!(
            "Hermite order {n} exceeds the supported maximum {MAX_HERMITE_ORDER}"
        )));
    }
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::invalid(format!("Hermite width must be positive, got {width}")));
    }
    Ok(HermiteAtom { n, x0, xi0, width })
}

impl HermiteAtom {
    fn spread(&self) -> f64 {
        (2.0 * self.n as f64 + 1.0).sqrt() + 10.0
    }
}

impl PackingAtom for HermiteAtom {
    fn eval(&self, x: f64) -> Complex64 {
        let u = (x - self.x0) / self.width;
        let h = hermite_function(self.n, u).expect("order validated") / self.width.sqrt();
        Complex64::from_polar(h, x * self.xi0)
    }

    fn support_hint(&self) -> (f64, f64) {
        let half = self.width * self.spread();
        (self.x0 - half, self.x0 + half)
    }

    fn frequency_reach(&self) -> f64 {
        self.xi0.abs() + self.spread() / self.width
    }

    fn transform(&self, xi: f64) -> Option<Complex64> {
        let z = self.width * (xi - self.xi0);
        let mag = (self.width * 2.0 * PI).sqrt() * hermite_function(self.n, z).expect("order validated");
        // (−i)^n
        let quarter = match self.n % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
        Some(quarter * Complex64::from_polar(mag, -self.x0 * (xi - self.xi0)))
    }

    fn spatial_tail(&self, a: f64, b: f64) -> f64 {
        hermite_outside(self.n, (a - self.x0) / self.width, (b - self.x0) / self.width)
    }

    fn frequency_tail(&self, a: f64, b: f64) -> Result<f64> {
        Ok(hermite_outside(self.n, self.width * (a - self.xi0), self.width * (b - self.xi0)))
    }
}

/// `P_F f_k` for a discretised eigenvector: the Nyström extension
/// `(1/λ_k) Σ_j √w_j K_S(x − x_j) v_j` on `F = [a, b]`, zero outside. Its
/// frequency tail outside `S` is `1 − λ_k`.
#[derive(Debug, Clone)]
pub struct EigenAtom {
    op: Arc<DiscretizedOperator<f64>>,
    vector: Vec<f64>,
    lambda: f64,
    support: (f64, f64),
    band: f64,
}

impl EigenAtom {
    pub fn new(op: Arc<DiscretizedOperator<f64>>, vector: Vec<f64>, lambda: f64) -> Result<Self> {
        if op.dim() != 1 {
            return Err(Error::Unsupported("eigen atoms are one-dimensional".into()));
        }
        if vector.len() != op.size() {
            return Err(Error::DimensionMismatch {
                expected: op.size(),
                got: vector.len(),
            });
        }
        if !(lambda > 0.0) {
            return Err(Error::invalid("eigenvalue must be positive"));
        }
        let bb = op.spatial().bounding_box()[0];
        let band = op
            .frequency()
            .bounding_box()
            .iter()
            .map(|&(lo, hi)| lo.abs().max(hi.abs()))
            .fold(0.0, f64::max);
        Ok(EigenAtom {
            op,
            vector,
            lambda,
            support: bb,
            band,
        })
    }
}

impl PackingAtom for EigenAtom {
    fn eval(&self, x: f64) -> Complex64 {
        if x < self.support.0 || x > self.support.1 {
            return Complex64::new(0.0, 0.0);
        }
        let v = self.op.extend(&self.vector, &[x]).expect("dimension checked") / self.lambda;
        Complex64::new(v, 0.0)
    }

    fn support_hint(&self) -> (f64, f64) {
        self.support
    }

    fn frequency_reach(&self) -> f64 {
        self.band.max(8.0)
    }

    fn spatial_tail(&self, a: f64, b: f64) -> f64 {
        if a <= self.support.0 && b >= self.support.1 {
            0.0
        } else {
            let (lo, hi) = self.support;
            line_integral(self, lo, a.clamp(lo, hi), |v| v.norm_sqr()) + line_integral(self, b.clamp(lo, hi), hi, |v| v.norm_sqr())
        }
    }

    fn frequency_tail(&self, _a: f64, _b: f64) -> Result<f64> {
        Ok((1.0 - self.lambda).max(0.0))
    }
}

/// Hermitian Gram matrix `G_{νν'} = ⟨ψ_ν, ψ_ν'⟩`, row-major.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub n: usize,
    pub entries: Vec<Complex64>,
}

impl GramMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    worst = worst.max(self.get(i, j).norm());
                }
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let re: Vec<f64> = self.entries.iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.entries.iter().map(|z| z.im).collect();
        hermitian_eigvalsh(self.n, &re, &im)
    }

    /// `a^H G a`.
    pub fn quadratic_form(&self, a: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                acc += a[i].conj() * self.get(i, j) * a[j];
            }
        }
        acc.re
    }
}

/// Shared quadrature grid over the union of the atoms' support hints.
fn joint_grid(atoms: &[Arc<dyn PackingAtom>]) -> Vec<(f64, f64)> {
    let lo = atoms.iter().map(|a| a.support_hint().0).fold(f64::INFINITY, f64::min);
    let hi = atoms.iter().map(|a| a.support_hint().1).fold(f64::NEG_INFINITY, f64::max);
    let freq = atoms.iter().map(|a| a.frequency_reach()).fold(0.0, f64::max);
    let narrow = atoms
        .iter()
        .map(|a| {
            let (l, h) = a.support_hint();
            h - l
        })
        .fold(f64::INFINITY, f64::min);
    let panels = panels_for(hi - lo, freq).max((32.0 * (hi - lo) / narrow).ceil() as usize);
    GaussLegendre::<f64>::new(16).composite(lo, hi, panels)
}

/// Atom values on the joint grid, one row per atom.
fn sample_atoms(atoms: &[Arc<dyn PackingAtom>], grid: &[(f64, f64)]) -> Vec<Vec<Complex64>> {
    atoms
        .par_iter()
        .map(|a| grid.iter().map(|&(x, _)| a.eval(x)).collect())
        .collect()
}

pub fn gram_matrix(atoms: &[Arc<dyn PackingAtom>]) -> Result<GramMatrix> {
    if atoms.is_empty() {
        return Err(Error::invalid("Gram matrix needs at least one atom"));
    }
    let grid = joint_grid(atoms);
    let samples = sample_atoms(atoms, &grid);
    let n = atoms.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let v: Complex64 = grid
                .iter()
                .zip(samples[i].iter().zip(&samples[j]))
                .map(|(&(_, w), (a, b))| a * b.conj() * w)
                .sum();
            entries[i * n + j] = v;
            entries[j * n + i] = v.conj();
        }
    }
    Ok(GramMatrix { n, entries })
}

/// `‖I − G‖_F`; the family is linearly independent when this is below 1/2.
pub fn gram_frobenius_gap(g: &GramMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..g.n {
        for j in 0..g.n {
            let id = if i == j { 1.0 } else { 0.0 };
            acc += (Complex64::new(id, 0.0) - g.get(i, j)).norm_sqr();
        }
    }
    acc.sqrt()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    /// Set when `upper/lower` exceeds `1e8` (or `lower ≤ 0`).
    pub rank_deficient: bool,
}

/// Extreme eigenvalues of the Gram matrix, which are the frame bounds of the
/// finite family on its span.
pub fn frame_bounds_estimate(atoms: &[Arc<dyn PackingAtom>]) -> Result<FrameBounds> {
    frame_bounds_from_gram(&gram_matrix(atoms)?)
}

pub fn frame_bounds_from_gram(g: &GramMatrix) -> Result<FrameBounds> {
    let vals = g.eigenvalues()?;
    let upper = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw_lower = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let rank_deficient = !(raw_lower > 0.0) || upper / raw_lower > crate::limiting::SPAN_CONDITION_LIMIT;
    let lower = if rank_deficient && raw_lower.abs() <= 1e-12 * upper.max(1.0) {
        0.0
    } else {
        raw_lower
    };
    Ok(FrameBounds {
        lower,
        upper,
        rank_deficient,
    })
}

/// A finite family of unit-norm atoms with its target rectangle `F × S`.
#[derive(Debug, Clone)]
pub struct PackingFamily {
    pub atoms: Vec<Arc<dyn PackingAtom>>,
    pub f: (f64, f64),
    pub s: (f64, f64),
    pub epsilon: f64,
    pub coherence: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AtomTails {
    pub spatial: f64,
    pub frequency: f64,
}

impl AtomTails {
    /// `√(spatial + frequency)`.
    pub fn defect(&self) -> f64 {
        (self.spatial + self.frequency).sqrt()
    }
}

fn check_interval(name: &str, iv: (f64, f64)) -> Result<()> {
    if !(iv.0 < iv.1) {
        return Err(Error::invalid(format!("{name} must be a nonempty interval, got [{}, {}]", iv.0, iv.1)));
    }
    Ok(())
}

pub fn atom_tails(atom: &dyn PackingAtom, f: (f64, f64), s: (f64, f64)) -> Result<AtomTails> {
    Ok(AtomTails {
        spatial: atom.spatial_tail(f.0, f.1),
        frequency: atom.frequency_tail(s.0, s.1)?,
    })
}

/// `√(Σ_ν ‖ψ_ν‖²_{ℝ∖F} + Σ_ν (2π)^{−1}‖ψ̂_ν‖²_{ℝ∖S})`.
pub fn concentration_defect(atoms: &[Arc<dyn PackingAtom>], f: (f64, f64), s: (f64, f64)) -> Result<f64> {
    let tails = atoms
        .par_iter()
        .map(|a| atom_tails(a.as_ref(), f, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(tails.iter().map(|t| t.spatial + t.frequency).sum::<f64>().sqrt())
}

impl PackingFamily {
    pub fn new(atoms: Vec<Arc<dyn PackingAtom>>, f: (f64, f64), s: (f64, f64)) -> Result<Self> {
        check_interval("F", f)?;
        check_interval("S", s)?;
        if atoms.is_empty() {
            return Err(Error::invalid("packing family is empty"));
        }
        let epsilon = concentration_defect(&atoms, f, s)?;
        let coherence = gram_matrix(&atoms)?.max_off_diagonal();
        Ok(PackingFamily {
            atoms,
            f,
            s,
            epsilon,
            coherence,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn tails(&self) -> Result<Vec<AtomTails>> {
        self.atoms.iter().map(|a| atom_tails(a.as_ref(), self.f, self.s)).collect()
    }

    pub fn gram(&self) -> Result<GramMatrix> {
        gram_matrix(&self.atoms)
    }
}

#[derive(Debug, Clone)]
pub struct HermitePacking {
    pub family: PackingFamily,
    /// `⌊(1−δ)c/2π⌋`, the size before trimming.
    pub initial: usize,
    /// Hermite orders removed by the trimming pass, in removal order.
    pub dropped: Vec<usize>,
    pub width: f64,
}

pub fn build_hermite_packing(i: (f64, f64), j: (f64, f64), delta: f64) -> Result<HermitePacking> {
    build_hermite_packing_with_width(i, j, delta, None)
}

/// Hermite functions `n = 0..N−1` centred at the centres of `I` and `J`
/// with width `√(|I|/|J|)` unless given. The atom with the largest tail is
/// dropped while the measured `ε ≥ 1/(2n)`.
pub fn build_hermite_packing_with_width(i: (f64, f64), j: (f64, f64), delta: f64, width: Option<f64>) -> Result<HermitePacking> {
    check_interval("I", i)?;
    check_interval("J", j)?;
    let c = (i.1 - i.0) * (j.1 - j.0);
    if c < 4.0 * PI {
        return Err(Error::invalid(format!("phase-space area c = {c} is below 4π")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("δ must lie in (0, 1), got {delta}")));
    }
    let w = width.unwrap_or(((i.1 - i.0) / (j.1 - j.0)).sqrt());
    let initial = ((1.0 - delta) * c / (2.0 * PI)).floor() as usize;
    let (x0, xi0) = (0.5 * (i.0 + i.1), 0.5 * (j.0 + j.1));
    let mut atoms: Vec<HermiteAtom> = (0..initial).map(|n| hermite_atom(n, x0, xi0, w)).collect::<Result<_>>()?;
    let mut tails: Vec<f64> = atoms
        .iter()
        .map(|a| Ok(a.spatial_tail(i.0, i.1) + a.frequency_tail(j.0, j.1)?))
        .collect::<Result<_>>()?;
    let mut dropped = Vec::new();
    while !atoms.is_empty() && tails.iter().sum::<f64>().sqrt() >= 1.0 / (2.0 * atoms.len() as f64) {
        let worst = (0..atoms.len())
            .max_by(|&p, &q| tails[p].total_cmp(&tails[q]).then(p.cmp(&q)))
            .expect("nonempty");
        dropped.push(atoms.remove(worst).n);
        tails.remove(worst);
    }
    if atoms.is_empty() {
        return Err(Error::invalid(format!(
            "no Hermite atoms survive trimming for c = {c}; the rectangle is too small"
        )));
    }
    let dyn_atoms: Vec<Arc<dyn PackingAtom>> = atoms.into_iter().map(|a| Arc::new(a) as Arc<dyn PackingAtom>).collect();
    Ok(HermitePacking {
        family: PackingFamily::new(dyn_atoms, i, j)?,
        initial,
        dropped,
        width: w,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Report {
    pub n: usize,
    pub epsilon: f64,
    pub coherence: f64,
    /// `1 − 5εn^{1/2}`.
    pub bound: f64,
    pub lambda_n: f64,
    pub rayleigh: f64,
    /// `ε < 1/(2n)`.
    pub applicable: bool,
    pub pass: bool,
}

fn check_same_rectangle(family: &PackingFamily, op: &DiscretizedOperator<f64>) -> Result<()> {
    if op.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: op.dim() });
    }
    let f = op.spatial().bounding_box()[0];
    let s = op.frequency().bounding_box()[0];
    let close = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).abs() <= 1e-12 * (1.0 + q.0.abs()) && (p.1 - q.1).abs() <= 1e-12 * (1.0 + q.1.abs());
    if !close(f, family.f) || !close(s, family.s) {
        return Err(Error::invalid(format!(
            "operator rectangle [{}, {}] × [{}, {}] differs from the family's [{}, {}] × [{}, {}]",
            f.0, f.1, s.0, s.1, family.f.0, family.f.1, family.s.0, family.s.1
        )));
    }
    Ok(())
}

/// `(√w_i Re ψ(x_i), √w_i Im ψ(x_i))` on the operator's nodes.
pub fn discretize_atoms(family: &PackingFamily, op: &DiscretizedOperator<f64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let sw: Vec<f64> = op.weights().iter().map(|w| w.sqrt()).collect();
    let mut re = Vec::with_capacity(family.len());
    let mut im = Vec::with_capacity(family.len());
    for atom in &family.atoms {
        let vals: Vec<Complex64> = (0..op.size()).map(|i| atom.eval(op.node(i)[0])).collect();
        re.push(vals.iter().zip(&sw).map(|(v, s)| v.re * s).collect());
        im.push(vals.iter().zip(&sw).map(|(v, s)| v.im * s).collect());
    }
    (re, im)
}

pub fn verify_lemma1(family: &PackingFamily, op: &DiscretizedOperator<f64>) -> Result<Lemma1Report> {
    check_same_rectangle(family, op)?;
    let n = family.len();
    let eps = family.epsilon;
    let bound = 1.0 - 5.0 * eps * (n as f64).sqrt();
    let applicable = eps < 1.0 / (2.0 * n as f64);
    let rep = spectrum(op)?;
    let lambda_n = rep
        .lambda(n)
        .ok_or_else(|| Error::invalid(format!("operator has fewer than {n} eigenvalues")))?;
    let (re, im) = discretize_atoms(family, op);
    let rayleigh = rayleigh_min_over_complex_span(op, &re, &im)?;
    Ok(Lemma1Report {
        n,
        epsilon: eps,
        coherence: family.coherence,
        bound,
        lambda_n,
        rayleigh,
        applicable,
        pass: applicable && lambda_n > bound && rayleigh >= bound,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AtomResidual {
    /// `‖(Id − P_F B_S P_F)ψ‖`.
    pub residual: f64,
    /// Per-atom concentration defect.
    pub defect: f64,
}

/// `‖(Id − P_F B_S P_F)ψ‖² = ‖ψ‖²_{ℝ∖F} + ‖P_Fψ − P_F B_S P_F ψ‖²`, the
/// second term on the operator's nodes.
pub fn atom_residuals(family: &PackingFamily, op: &DiscretizedOperator<f64>) -> Result<Vec<AtomResidual>> {
    check_same_rectangle(family, op)?;
    let (re, im) = discretize_atoms(family, op);
    let tails = family.tails()?;
    Ok(tails
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let ar = op.matrix().mul_vec(&re[k]);
            let ai = op.matrix().mul_vec(&im[k]);
            let inside: f64 = re[k]
                .iter()
                .zip(&ar)
                .chain(im[k].iter().zip(&ai))
                .map(|(v, a)| (v - a).powi(2))
                .sum();
            AtomResidual {
                residual: (t.spatial + inside).sqrt(),
                defect: t.defect(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormBoundCheck {
    pub vectors: usize,
    /// `min_a (‖Σ a_ν ψ_ν‖² − (1 − n·coherence)Σ|a_ν|²) / Σ|a_ν|²`.
    pub worst_slack: f64,
}

/// Draws `count` complex coefficient vectors (seeded ChaCha8, uniform
/// real and imaginary parts in `[−1, 1]`) and compares `‖Σ a_ν ψ_ν‖²`,
/// integrated on a joint grid, with `(1 − n·coherence)Σ|a_ν|²`.
pub fn norm_lower_bound_check(family: &PackingFamily, count: usize, seed: u64) -> Result<NormBoundCheck> {
    if count == 0 {
        return Err(Error::invalid("need at least one coefficient vector"));
    }
    let grid = joint_grid(&family.atoms);
    let samples = sample_atoms(&family.atoms, &grid);
    let n = family.len();
    let factor = 1.0 - n as f64 * family.coherence;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..count {
        let a: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect();
        let mass: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let lhs: f64 = grid
            .iter()
            .enumerate()
            .map(|(p, &(_, w))| {
                let s: Complex64 = a.iter().zip(&samples).map(|(c, row)| c * row[p]).sum();
                w * s.norm_sqr()
            })
            .sum();
        worst = worst.min((lhs - factor * mass) / mass);
    }
    Ok(NormBoundCheck {
        vectors: count,
        worst_slack: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Domain;
    use crate::limiting::discretize;

    fn arc<A: PackingAtom + 'static>(a: A) -> Arc<dyn PackingAtom> {
        Arc::new(a)
    }

    #[test]
    fn hermite_examples() {
        let g = hermite_atom(0, 0.0, 0.0, 1.0).unwrap();
        for &x in &[0.0f64, 0.7, -2.0] {
            let expect = PI.powf(-0.25) * (-x * x / 2.0f64).exp();
            assert!((g.eval(x).re - expect).abs() < 1e-15);
        }
        let h1 = hermite_atom(1, 0.0, 0.0, 1.0).unwrap();
        let gram = gram_matrix(&[arc(g), arc(h1)]).unwrap();
        assert!((gram.get(0, 0).re - 1.0).abs() < 1e-12);
        assert!(gram.get(0, 1).norm() < 1e-14);
        assert!(hermite_atom(61, 0.0, 0.0, 1.0).is_err());
        assert!(hermite_atom(2, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn hermite_transform_closed_form() {
        for n in [0, 1, 4, 7] {
            let atom = hermite_atom(n, 0.0, 0.0, 1.0).unwrap();
            for i in 0..=24 {
                let xi = -6.0 + 0.5 * i as f64;
                let numeric = numeric_transform(&atom, xi);
                let closed = atom.transform(xi).unwrap();
                assert!((numeric - closed).norm() < 1e-8, "n = {n}, ξ = {xi}");
                let h = hermite_function(n, xi).unwrap().abs();
                assert!((closed.norm() - (2.0 * PI).sqrt() * h).abs() < 1e-12);
            }
        }
        let shifted = hermite_atom(3, 0.4, 12.0, 0.3).unwrap();
        for &xi in &[5.0, 12.0, 17.5] {
            assert!((numeric_transform(&shifted, xi) - shifted.transform(xi).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn hermite_tails_against_erfc() {
        // h_0² = π^{-1/2} e^{−u²}
        let g = hermite_atom(0, 0.0, 0.0, 1.0).unwrap();
        for &t in &[0.5, 2.0, 3.0, 5.0] {
            let tail = g.spatial_tail(-t, t);
            assert!((tail - libm::erfc(t)).abs() < 1e-14, "T = {t}");
        }
        let d = concentration_defect(&[arc(g)], (-3.0, 3.0), (-3.0, 3.0)).unwrap();
        assert!(d > 0.0 && d < 0.01);
        assert!((d - (2.0 * libm::erfc(3.0)).sqrt()).abs() < 1e-12);
        let mut prev = 1.0;
        for t in 1..8 {
            let v = g.spatial_tail(-(t as f64), t as f64);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn frame_bound_examples() {
        let a = hermite_atom(0, 0.0, 0.0, 1.0).unwrap();
        let b = hermite_atom(1, 0.0, 0.0, 1.0).unwrap();
        let fb = frame_bounds_estimate(&[arc(a), arc(b)]).unwrap();
        assert!((fb.lower - 1.0).abs() < 1e-8 && (fb.upper - 1.0).abs() < 1e-8);
        assert!(!fb.rank_deficient);
        let dup = frame_bounds_estimate(&[arc(a), arc(a)]).unwrap();
        assert!(dup.rank_deficient);
        assert_eq!(dup.lower, 0.0);
        assert!((dup.upper - 2.0).abs() < 1e-10);
        let gabor: Vec<Arc<dyn PackingAtom>> = [(0.0, 0.0), (1.5, 0.0), (0.0, 2.0)]
            .iter()
            .map(|&(x, xi)| arc(WavePacketAtom::gabor(Window::Gaussian, vec![x], vec![xi]).unwrap()))
            .collect();
        let fb = frame_bounds_estimate(&gabor).unwrap();
        assert!(fb.lower > 0.0 && fb.lower <= fb.upper && fb.upper <= 3.0);
    }

    #[test]
    fn gap_arithmetic() {
        let n = 4;
        let eps = 0.01;
        let entries = (0..n * n)
            .map(|k| Complex64::new(if k / n == k % n { 1.0 } else { eps }, 0.0))
            .collect();
        let g = GramMatrix { n, entries };
        assert!((gram_frobenius_gap(&g) - eps * ((n * n - n) as f64).sqrt()).abs() < 1e-15);
        let id = GramMatrix {
            n: 2,
            entries: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        assert_eq!(gram_frobenius_gap(&id), 0.0);
    }

    #[test]
    fn wave_packet_special_cases() {
        let theta = Window::Gaussian;
        let g = WavePacketAtom::gabor(theta.clone(), vec![0.3, -1.0], vec![2.0, 0.5]).unwrap();
        let x = [0.9, -0.2];
        let u = [x[0] - 0.3, x[1] + 1.0];
        let direct = Complex64::from_polar(theta.eval(&u), u[0] * 2.0 + u[1] * 0.5);
        assert!((g.eval_at(&x).unwrap() - direct).norm() < 1e-12);
        let w = WavePacketAtom::wavelet(theta.clone(), 2, &[3, -1]).unwrap();
        let direct = 0.25 * theta.eval(&[x[0] / 4.0 - 3.0, x[1] / 4.0 + 1.0]);
        assert!((w.eval_at(&x).unwrap() - Complex64::new(direct, 0.0)).norm() < 1e-12);
        assert!(WavePacketAtom::new(theta, vec![1.0, 2.0, 2.0, 4.0], vec![0.0; 2], vec![0.0; 2]).is_err());
    }

    #[test]
    fn gaussian_packet_transform() {
        let g = WavePacketAtom::new(Window::Gaussian, vec![-1.7], vec![0.4], vec![3.0]).unwrap();
        for &eta in &[-8.0, -5.1, 0.0, 2.0] {
            assert!((numeric_transform(&g, eta) - g.transform(eta).unwrap()).norm() < 1e-9);
        }
        let gl = GaussLegendre::<f64>::new(16);
        let (lo, hi) = (-9.0, -2.0);
        let inside: f64 = gl
            .composite(lo, hi, 200)
            .into_iter()
            .map(|(x, w)| w * g.transform(x).unwrap().norm_sqr())
            .sum::<f64>()
            / (2.0 * PI);
        assert!((1.0 - inside - g.frequency_tail(lo, hi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hermite_packing_example() {
        let p = build_hermite_packing((0.0, 1.0), (-10.0 * PI, 10.0 * PI), 0.5).unwrap();
        assert_eq!(p.initial, 5);
        assert_eq!(p.family.len(), 5);
        assert!(p.dropped.is_empty());
        assert!(p.family.epsilon < 0.1);
        assert!(p.family.coherence <= 1e-8);
        assert!(gram_frobenius_gap(&p.family.gram().unwrap()) < 0.5);
        assert!(build_hermite_packing((0.0, 1.0), (0.0, 2.0), 0.5).is_err());
    }

    #[test]
    fn eigenvector_family() {
        let f = Domain::interval(0.0, 1.0).unwrap();
        let s = Domain::interval(-10.0 * PI, 10.0 * PI).unwrap();
        let op = Arc::new(discretize(&f, &s, 96).unwrap());
        let rep = spectrum(&op).unwrap();
        let atoms: Vec<Arc<dyn PackingAtom>> = (0..4)
            .map(|k| arc(EigenAtom::new(op.clone(), rep.eigenvectors[k].clone(), rep.eigenvalues[k]).unwrap()))
            .collect();
        let family = PackingFamily::new(atoms, (0.0, 1.0), (-10.0 * PI, 10.0 * PI)).unwrap();
        let report = verify_lemma1(&family, &op).unwrap();
        assert!(report.applicable && report.pass);
        assert!((report.lambda_n - report.rayleigh).abs() < 1e-8);
    }

    #[test]
    fn hypothesis_gate() {
        let mut p = build_hermite_packing((0.0, 1.0), (-10.0 * PI, 10.0 * PI), 0.5).unwrap().family;
        p.epsilon = 0.2;
        let op = discretize(&Domain::interval(0.0, 1.0).unwrap(), &Domain::interval(-10.0 * PI, 10.0 * PI).unwrap(), 64).unwrap();
        let report = verify_lemma1(&p, &op).unwrap();
        assert!(!report.applicable && !report.pass);
        let other = discretize(&Domain::interval(0.0, 2.0).unwrap(), &Domain::interval(-10.0 * PI, 10.0 * PI).unwrap(), 64).unwrap();
        assert!(verify_lemma1(&p, &other).is_err());
    }
}
