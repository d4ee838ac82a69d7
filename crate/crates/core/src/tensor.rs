//! Tensor local sine packets on `(0,1)^d`, their low/res/hi classification
//! against a dilated band `S(r)`, the leakage estimate and the residual
//! count chain.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{Domain, Shape};
use crate::error::{Error, Result};
use crate::limiting::{discretize, plunge_count, spectrum, SpectrumReport};
use crate::local_sine::{band_energy, FourierSampler, LocalSineAtom, LocalSineBasis, WhitneyInterval};
use crate::quadrature::GaussLegendre;

pub const DEFAULT_KAPPA: f64 = 16.0;
/// Smallest envelope exponent fitted over the interior atoms `j ≤ 4, k ≤ 8`.
pub const FITTED_ENVELOPE_A: f64 = 0.8;
pub const DEFAULT_INDEX_CAP: usize = 1_000_000;
/// Classification streams indices, so it allows larger sets than materialised lists.
pub const DEFAULT_PARTITION_CAP: usize = 20_000_000;
/// Atoms per class whose leakage is integrated exactly.
pub const EXACT_ATOMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Low,
    Res,
    Hi,
}

impl Class {
    pub fn as_str(self) -> &'static str {
        match self {
            Class::Low => "low",
            Class::Res => "res",
            Class::Hi => "hi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyConfig {
    pub kappa: f64,
    pub a: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            kappa: DEFAULT_KAPPA,
            a: FITTED_ENVELOPE_A,
        }
    }
}

/// One axis of a tensor index: a Whitney interval and a frequency number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisIndex {
    pub interval: WhitneyInterval,
    pub k: u32,
}

impl AxisIndex {
    pub fn frequency(&self) -> f64 {
        PI * (self.k as f64 + 0.5) / self.interval.delta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorIndex {
    pub axes: Vec<AxisIndex>,
}

impl TensorIndex {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }
}

/// Mixed-radix layout of the truncated index set: axis 0 is the most
/// significant digit, and each digit is `interval_position · k_max + k`.
#[derive(Debug, Clone)]
pub struct IndexLayout {
    d: usize,
    k_max: u32,
    intervals: Vec<WhitneyInterval>,
}

impl IndexLayout {
    pub fn new(d: usize, j_max: u32, k_max: u32) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::invalid(format!("tensor dimension must be 1, 2 or 3, got {d}")));
        }
        if k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        Ok(IndexLayout {
            d,
            k_max,
            intervals: crate::local_sine::whitney_intervals(j_max)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `2·j_max·k_max`.
    pub fn per_axis(&self) -> usize {
        self.intervals.len() * self.k_max as usize
    }

    pub fn len(&self) -> usize {
        self.per_axis().pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_digits(&self, i: usize) -> Vec<usize> {
        let n = self.per_axis();
        let mut out = vec![0; self.d];
        let mut rest = i;
        for slot in out.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        out
    }

    pub fn axis(&self, digit: usize) -> AxisIndex {
        let k = self.k_max as usize;
        AxisIndex {
            interval: self.intervals[digit / k],
            k: (digit % k) as u32,
        }
    }

    pub fn index(&self, i: usize) -> TensorIndex {
        TensorIndex {
            axes: self.axis_digits(i).into_iter().map(|g| self.axis(g)).collect(),
        }
    }
}

pub fn tensor_index_set(d: usize, j_max: u32, k_max: u32) -> Result<Vec<TensorIndex>> {
    tensor_index_set_with_cap(d, j_max, k_max, DEFAULT_INDEX_CAP)
}

pub fn tensor_index_set_with_cap(d: usize, j_max: u32, k_max: u32, cap: usize) -> Result<Vec<TensorIndex>> {
    let layout = IndexLayout::new(d, j_max, k_max)?;
    let size = layout.len();
    if size > cap {
        return Err(Error::SizeCap { size, cap });
    }
    Ok((0..size).map(|i| layout.index(i)).collect())
}

/// `m_i = (1/δ_i)·(log(κ r/(ε δ_min))/a)^{3/2}`.
pub fn margins(idx: &TensorIndex, r: f64, eps: f64, cfg: &ClassifyConfig) -> Vec<f64> {
    let delta_min = idx.axes.iter().map(|a| a.interval.delta).fold(f64::INFINITY, f64::min);
    let scaled = ((cfg.kappa * r / (eps * delta_min)).ln().max(0.0) / cfg.a).powf(1.5);
    idx.axes.iter().map(|a| scaled / a.interval.delta).collect()
}

fn check_class_args(s: &Domain<f64>, d: usize, r: f64, eps: f64, cfg: &ClassifyConfig) -> Result<()> {
    if s.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("ε must lie in (0, 1/2), got {eps}")));
    }
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::invalid(format!("r must be at least 1, got {r}")));
    }
    if !(cfg.kappa > 0.0 && cfg.a > 0.0) {
        return Err(Error::invalid("κ and a must be positive"));
    }
    if s.is_coordinate_symmetric() == Some(false) {
        return Err(Error::Unsupported(
            "classification needs S symmetric under every coordinate flip".into(),
        ));
    }
    Ok(())
}

pub fn classify(idx: &TensorIndex, s: &Domain<f64>, r: f64, eps: f64) -> Result<Class> {
    classify_with(idx, s, r, eps, &ClassifyConfig::default())
}

/// Tests the `2^d` corner boxes `±π(k_i+½)/δ_i ± m_i`. For S convex and
/// symmetric under coordinate flips, a box lies inside `S(r)` iff its
/// coordinate-wise farthest point does, and misses `S(r)` iff its nearest
/// point does. Flipping signs maps the corner boxes onto each other, so
/// one box decides for all of them.
pub fn classify_with(idx: &TensorIndex, s: &Domain<f64>, r: f64, eps: f64, cfg: &ClassifyConfig) -> Result<Class> {
    check_class_args(s, idx.dim(), r, eps, cfg)?;
    Ok(classify_unchecked(idx, s, r, eps, cfg))
}

fn classify_unchecked(idx: &TensorIndex, s: &Domain<f64>, r: f64, eps: f64, cfg: &ClassifyConfig) -> Class {
    let m = margins(idx, r, eps, cfg);
    let mut far = Vec::with_capacity(idx.dim());
    let mut near = Vec::with_capacity(idx.dim());
    for (a, &mi) in idx.axes.iter().zip(&m) {
        let f = a.frequency();
        far.push((f + mi) / r);
        near.push((f - mi).max(0.0) / r);
    }
    if s.contains_unchecked(&far) {
        Class::Low
    } else if !s.contains_unchecked(&near) {
        Class::Hi
    } else {
        Class::Res
    }
}

/// Scaled margin `(log(κ r/(ε δ))/a)^{3/2}` at the deepest level `δ = 2^{−j_max−1}`.
fn deepest_margin(r: f64, eps: f64, j_max: u32, cfg: &ClassifyConfig) -> f64 {
    let delta = 0.5f64.powi(j_max as i32 + 1);
    ((cfg.kappa * r / (eps * delta)).ln().max(0.0) / cfg.a).powf(1.5)
}

fn reach(s: &Domain<f64>) -> f64 {
    s.bounding_box().iter().map(|&(lo, hi)| lo.abs().max(hi.abs())).fold(0.0, f64::max)
}

/// Smallest `(j_max, k_max)` with `2^{−j_max} ≤ ε²/r^d` and every atom with
/// some `k_i ≥ k_max` classified `hi`: `π(k_max+½) ≥ M + r·R_S·δ_max` with
/// `M` the deepest scaled margin, `R_S` the reach of S and `δ_max = 1/4`.
/// This also gives `π k_max/δ_max ≥ 4r` whenever `R_S ≥ 1`.
pub fn minimal_truncation(s: &Domain<f64>, r: f64, eps: f64, cfg: &ClassifyConfig) -> Result<(u32, u32)> {
    check_class_args(s, s.dim(), r, eps, cfg)?;
    let d = s.dim();
    let target = eps * eps / r.powi(d as i32);
    let mut j = 1u32;
    while 0.5f64.powi(j as i32) > target {
        j += 1;
    }
    let need = (deepest_margin(r, eps, j, cfg) + 0.25 * r * reach(s)) / PI - 0.5;
    let mut k = need.ceil().max(1.0) as u32;
    while PI * k as f64 / 0.25 < 4.0 * r {
        k += 1;
    }
    Ok((j, k))
}

fn check_truncation(s: &Domain<f64>, r: f64, eps: f64, j_max: u32, k_max: u32, cfg: &ClassifyConfig) -> Result<()> {
    let d = s.dim();
    if 0.5f64.powi(j_max as i32) > eps * eps / r.powi(d as i32) {
        return Err(Error::invalid(format!(
            "truncation insufficient: 2^-{j_max} exceeds ε²/r^d = {:e}",
            eps * eps / r.powi(d as i32)
        )));
    }
    if PI * k_max as f64 / 0.25 < 4.0 * r {
        return Err(Error::invalid(format!(
            "truncation insufficient: π·{k_max}/δ_max is below 4r = {}",
            4.0 * r
        )));
    }
    let need = deepest_margin(r, eps, j_max, cfg) + 0.25 * r * reach(s);
    if PI * (k_max as f64 + 0.5) < need {
        return Err(Error::invalid(format!(
            "truncation insufficient: atoms with k ≥ {k_max} are not all hi (need π(k_max+½) ≥ {need:.3})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    pub d: usize,
    pub r: f64,
    pub eps: f64,
    pub j_max: u32,
    pub k_max: u32,
    pub config: ClassifyConfig,
    pub low: Vec<usize>,
    pub res: Vec<usize>,
    pub hi: Vec<usize>,
    #[serde(skip)]
    layout: Option<IndexLayout>,
}

impl Partition {
    pub fn total(&self) -> usize {
        self.low.len() + self.res.len() + self.hi.len()
    }

    pub fn layout(&self) -> IndexLayout {
        self.layout
            .clone()
            .unwrap_or_else(|| IndexLayout::new(self.d, self.j_max, self.k_max).expect("validated on construction"))
    }

    pub fn index(&self, i: usize) -> TensorIndex {
        self.layout().index(i)
    }

    /// `(flat index, class)` in increasing index order.
    pub fn classes(&self) -> Vec<(usize, Class)> {
        let mut all: Vec<(usize, Class)> = self
            .low
            .iter()
            .map(|&i| (i, Class::Low))
            .chain(self.res.iter().map(|&i| (i, Class::Res)))
            .chain(self.hi.iter().map(|&i| (i, Class::Hi)))
            .collect();
        all.sort_unstable_by_key(|p| p.0);
        all
    }
}

pub fn partition_basis(d: usize, s: &Domain<f64>, r: f64, eps: f64, j_max: u32, k_max: u32) -> Result<Partition> {
    partition_basis_with(d, s, r, eps, j_max, k_max, &ClassifyConfig::default(), DEFAULT_PARTITION_CAP)
}

#[allow(clippy::too_many_arguments)]
pub fn partition_basis_with(
    d: usize,
    s: &Domain<f64>,
    r: f64,
    eps: f64,
    j_max: u32,
    k_max: u32,
    cfg: &ClassifyConfig,
    cap: usize,
) -> Result<Partition> {
    let layout = IndexLayout::new(d, j_max, k_max)?;
    check_class_args(s, d, r, eps, cfg)?;
    check_truncation(s, r, eps, j_max, k_max, cfg)?;
    let size = layout.len();
    if size > cap {
        return Err(Error::SizeCap { size, cap });
    }
    let classes: Vec<Class> = (0..size)
        .into_par_iter()
        .map(|i| classify_unchecked(&layout.index(i), s, r, eps, cfg))
        .collect();
    let (mut low, mut res, mut hi) = (Vec::new(), Vec::new(), Vec::new());
    for (i, c) in classes.into_iter().enumerate() {
        match c {
            Class::Low => low.push(i),
            Class::Res => res.push(i),
            Class::Hi => hi.push(i),
        }
    }
    Ok(Partition {
        d,
        r,
        eps,
        j_max,
        k_max,
        config: *cfg,
        low,
        res,
        hi,
        layout: Some(layout),
    })
}

/// `E_d(ε, r) = max{r^{d−1} log(r/ε)^{5/2}, log(r/ε)^{5d/2}}`.
pub fn bound_e_d(d: usize, eps: f64, r: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(eps > 0.0 && eps < 0.5) || !(r >= 1.0) {
        return Err(Error::invalid(format!("need ε ∈ (0, 1/2) and r ≥ 1, got ε = {eps}, r = {r}")));
    }
    let l = (r / eps).ln();
    Ok((r.powi(d as i32 - 1) * l.powf(2.5)).max(l.powf(2.5 * d as f64)))
}

/// `∫_U^∞ exp(−b u^{2/3}) du` for `U ≥ 0`.
fn stretched_tail(b: f64, u: f64) -> f64 {
    let v = u.max(0.0).cbrt();
    3.0 * (v * (-b * v * v).exp() / (2.0 * b) + PI.sqrt() / (4.0 * b.powf(1.5)) * libm::erfc(b.sqrt() * v))
}

/// Upper bound on `(2π)^{-1} ∫_{|ξ|>ρ} |φ̂(ξ)|² dξ` implied by the envelope
/// `|φ̂(ξ)| ≤ C√δ Σ_σ Ψ_a(δξ − σπ(k+½))`, for an atom with `π(k+½) ≤ δρ`.
pub fn envelope_outside_bound(atom: &LocalSineAtom, a: f64, c: f64, rho: f64) -> Result<f64> {
    let eta = atom.interval().delta * rho;
    let m = PI * (atom.k as f64 + 0.5);
    if eta < m {
        return Err(Error::invalid("band edge lies inside the atom's peak frequency"));
    }
    Ok(2.0 * c * c / PI * (stretched_tail(2.0 * a, eta - m) + stretched_tail(2.0 * a, eta + m)))
}

/// Upper bound on `(2π)^{-1} ∫_{|ξ|≤ρ} |φ̂(ξ)|² dξ` from the envelope, for an
/// atom with `π(k+½) ≥ δρ`.
pub fn envelope_inside_bound(atom: &LocalSineAtom, a: f64, c: f64, rho: f64) -> Result<f64> {
    let eta = atom.interval().delta * rho;
    let m = PI * (atom.k as f64 + 0.5);
    if eta > m {
        return Err(Error::invalid("band edge lies beyond the atom's peak frequency"));
    }
    let b = 2.0 * a;
    Ok(2.0 * c * c / PI * (stretched_tail(b, m - eta) - stretched_tail(b, m + eta)))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Leakage {
    pub hi_leak: f64,
    pub low_leak: f64,
    /// Parts of the two sums covered by bounds instead of quadrature.
    pub hi_tail: f64,
    pub low_tail: f64,
}

impl Leakage {
    pub fn total(&self) -> f64 {
        self.hi_leak + self.low_leak
    }
}

/// Product form of a tensor atom's in-band energy: for a symmetric box the
/// exact energy, for a ball the pair (inscribed box, circumscribing box).
enum BandGeometry {
    Box(Vec<f64>),
    Ball { radius: f64 },
}

fn band_geometry(s: &Domain<f64>, r: f64, d: usize) -> Result<BandGeometry> {
    if s.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
    }
    match s.shape() {
        Shape::Interval { lo, hi } if *lo == -*hi => Ok(BandGeometry::Box(vec![r * hi])),
        Shape::Box { bounds } if s.is_coordinate_symmetric() == Some(true) => {
            Ok(BandGeometry::Box(bounds.iter().map(|&(_, hi)| r * hi).collect()))
        }
        Shape::Ball { radius, .. } if s.is_coordinate_symmetric() == Some(true) => {
            if d == 1 {
                Ok(BandGeometry::Box(vec![r * radius]))
            } else {
                Ok(BandGeometry::Ball { radius: r * radius })
            }
        }
        _ => Err(Error::Unsupported(
            "leakage quadrature supports centred intervals, boxes and balls".into(),
        )),
    }
}

/// `(2π)^{-2} ∫_{|ξ| ≤ ρ} |φ̂_1(ξ_1)|² |φ̂_2(ξ_2)|² dξ` with `ξ_1 = ρ sin θ`.
fn disk_energy(a1: &LocalSineAtom, a2: &LocalSineAtom, rho: f64) -> Result<f64> {
    let s1 = FourierSampler::new(a1, rho)?;
    let s2 = FourierSampler::new(a2, rho)?;
    let rule = GaussLegendre::<f64>::new(16);
    // cumulative ∫_0^h |φ̂_2|² on panels of width ≤ 1/supp
    let (b0, b1) = a2.support();
    let panels2 = (rho * (b1 - b0)).ceil().max(1.0) as usize;
    let h2 = rho / panels2 as f64;
    let mut cumulative = Vec::with_capacity(panels2 + 1);
    cumulative.push(0.0);
    for p in 0..panels2 {
        let lo = p as f64 * h2;
        let v = rule.integrate(lo, lo + h2, |x| s2.abs(x).powi(2));
        cumulative.push(cumulative[p] + v);
    }
    let inner = |h: f64| {
        let p = ((h / h2).floor() as usize).min(panels2);
        let base = p as f64 * h2;
        let part = if h > base { rule.integrate(base, h, |x| s2.abs(x).powi(2)) } else { 0.0 };
        2.0 * (cumulative[p] + part)
    };
    let (c0, c1) = a1.support();
    let panels1 = (2.0 * rho * (c1 - c0)).ceil().max(4.0) as usize;
    let total: f64 = rule
        .composite(-PI / 2.0, PI / 2.0, panels1)
        .par_iter()
        .map(|&(th, w)| {
            let (s, c) = th.sin_cos();
            w * rho * c * s1.abs(rho * s).powi(2) * inner(rho * c)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    Ok(total / (4.0 * PI * PI))
}

/// Hi-class energy inside `S(r)` and low-class energy outside it. One-dimensional
/// band energies are integrated for every factor; tensor energies are their
/// products for box bands. For a disk band the heaviest `EXACT_ATOMS` atoms
/// per class (ranked by the box bounds) are integrated over the disk and the
/// rest are bounded by the circumscribing box (hi) or inscribed box (low).
pub fn energy_estimate(part: &Partition, s: &Domain<f64>, r: f64) -> Result<Leakage> {
    let d = part.d;
    if d > 2 {
        return Err(Error::Unsupported("leakage quadrature is limited to d ≤ 2".into()));
    }
    let geometry = band_geometry(s, r, d)?;
    let layout = part.layout();
    let basis = LocalSineBasis::new(part.j_max)?;
    let atoms = basis.atoms(part.k_max)?;
    let band = |rho: f64| -> Result<Vec<f64>> { atoms.par_iter().map(|a| band_energy(a, -rho, rho)).collect() };
    match geometry {
        BandGeometry::Box(half) => {
            let per_axis = half.iter().map(|&h| band(h)).collect::<Result<Vec<_>>>()?;
            let inside = |i: usize| -> f64 {
                layout
                    .axis_digits(i)
                    .iter()
                    .zip(&per_axis)
                    .map(|(&g, e)| e[g])
                    .product()
            };
            let hi_leak = part.hi.iter().map(|&i| inside(i)).fold(0.0, |acc, v| acc + v);
            let low_leak = part.low.iter().map(|&i| (1.0 - inside(i)).max(0.0)).fold(0.0, |acc, v| acc + v);
            Ok(Leakage {
                hi_leak,
                low_leak,
                hi_tail: 0.0,
                low_tail: 0.0,
            })
        }
        BandGeometry::Ball { radius } => {
            let outer = band(radius)?;
            let inner = band(radius * FRAC_1_SQRT_2)?;
            let prod = |i: usize, e: &[f64]| -> f64 { layout.axis_digits(i).iter().map(|&g| e[g]).product() };
            let exact = |i: usize| -> Result<f64> {
                let g = layout.axis_digits(i);
                disk_energy(&atoms[g[0]], &atoms[g[1]], radius)
            };
            let split = |ids: &[usize], bound: &dyn Fn(usize) -> f64| -> (Vec<usize>, f64) {
                let mut ranked: Vec<(usize, f64)> = ids.iter().map(|&i| (i, bound(i))).collect();
                ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
                let head: Vec<usize> = ranked.iter().take(EXACT_ATOMS).map(|p| p.0).collect();
                let tail = ranked.iter().skip(EXACT_ATOMS).map(|p| p.1).fold(0.0, |acc, v| acc + v);
                (head, tail)
            };
            let (hi_head, hi_tail) = split(&part.hi, &|i| prod(i, &outer));
            let (low_head, low_tail) = split(&part.low, &|i| (1.0 - prod(i, &inner)).max(0.0));
            let hi_exact: f64 = hi_head.iter().map(|&i| exact(i)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, |acc, v| acc + v);
            let low_exact: f64 = low_head
                .iter()
                .map(|&i| exact(i).map(|e| (1.0 - e).max(0.0)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, |acc, v| acc + v);
            Ok(Leakage {
                hi_leak: hi_exact + hi_tail,
                low_leak: low_exact + low_tail,
                hi_tail,
                low_tail,
            })
        }
    }
}

/// `plunge_count(ε) ≤ 2·#res` (orthonormal basis on the unit cube, `A = 1`).
pub fn verify_lemma2(part: &Partition, spec: &SpectrumReport<f64>, eps: f64) -> Result<bool> {
    Ok(plunge_count(spec, eps)? <= 2 * part.res.len())
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub d: usize,
    pub r: f64,
    pub eps: f64,
    pub j_max: u32,
    pub k_max: u32,
    pub n_nystrom: usize,
    pub low: usize,
    pub res: usize,
    pub hi: usize,
    pub plunge: usize,
    pub e_d: f64,
    /// `#res / E_d(ε, r)`.
    pub ratio: f64,
    pub lemma2: bool,
}

/// Nyström points per axis used for the plunge count on `[0,1]^d` against
/// `S(r)` with `S ⊂ B(0, ρ_S)`.
pub fn default_nystrom_points(r: f64, reach: f64) -> usize {
    ((2.0 * r * reach).ceil() as usize + 8).max(24)
}

/// Partition, plunge count on `F = [0,1]^d`, `E_d` and the `plunge <= 2 * res` check for
/// one `(S, r, ε)`.
pub fn theorem1_check(s: &Domain<f64>, r: f64, eps: f64, n_nystrom: Option<usize>) -> Result<Theorem1Report> {
    let d = s.dim();
    let (j_max, k_max) = minimal_truncation(s, r, eps, &ClassifyConfig::default())?;
    let part = partition_basis(d, s, r, eps, j_max, k_max)?;
    let n = n_nystrom.unwrap_or_else(|| default_nystrom_points(r, reach(s)));
    let op = discretize(&Domain::unit_cube(d)?, &s.dilate(r)?, n)?;
    let spec = spectrum(&op)?;
    let plunge = plunge_count(&spec, eps)?;
    let e_d = bound_e_d(d, eps, r)?;
    Ok(Theorem1Report {
        d,
        r,
        eps,
        j_max,
        k_max,
        n_nystrom: n,
        low: part.low.len(),
        res: part.res.len(),
        hi: part.hi.len(),
        plunge,
        e_d,
        ratio: part.res.len() as f64 / e_d,
        lemma2: plunge <= 2 * part.res.len(),
    })
}
