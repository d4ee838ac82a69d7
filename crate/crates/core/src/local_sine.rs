//! Local sine basis on the Whitney decomposition of `(0, 1)`.
//!
//! Atoms are `φ_{L,k}(x) = c_L θ_L(x) sin(π(k+½)(x − x_L)/δ_L)` with bells
//! `θ_L` built from a Gevrey smooth step. Adjacent bells share an overlap
//! radius of one third of the shorter interval; the two outermost edges of
//! a truncated decomposition are cut hard.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gl, Adaptive, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// `[2^{−j−1}, 2^{−j})` on the left side, `[1 − 2^{−j}, 1 − 2^{−j−1})` on
/// the right side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WhitneyInterval {
    pub side: Side,
    pub j: u32,
    pub x_left: f64,
    pub delta: f64,
}

impl WhitneyInterval {
    pub fn new(side: Side, j: u32) -> Result<Self> {
        if j == 0 || j > 60 {
            return Err(Error::invalid(format!("Whitney depth must be in 1..=60, got {j}")));
        }
        let delta = 0.5f64.powi(j as i32 + 1);
        let x_left = match side {
            Side::Left => delta,
            Side::Right => 1.0 - 2.0 * delta,
        };
        Ok(WhitneyInterval { side, j, x_left, delta })
    }

    pub fn x_right(&self) -> f64 {
        self.x_left + self.delta
    }

    pub fn midpoint(&self) -> f64 {
        self.x_left + 0.5 * self.delta
    }
}

/// The `2·j_max` intervals with `j = 1..=j_max`, sorted by left endpoint.
pub fn whitney_intervals(j_max: u32) -> Result<Vec<WhitneyInterval>> {
    if j_max == 0 {
        return Err(Error::invalid("j_max must be at least 1"));
    }
    let mut out = Vec::with_capacity(2 * j_max as usize);
    for j in (1..=j_max).rev() {
        out.push(WhitneyInterval::new(Side::Left, j)?);
    }
    for j in 1..=j_max {
        out.push(WhitneyInterval::new(Side::Right, j)?);
    }
    Ok(out)
}

const STEP_CELLS: usize = 2048;

/// `s(t) = sin(π/2 · H(t))` where `H` is the normalised primitive of the
/// bump `exp(−1/(1−t²)^α)` on `(−1, 1)`. `α = 2` gives a Gevrey-3/2
/// step; `α = 1` the classical `G²` bump.
#[derive(Debug, Clone)]
pub struct SmoothStep {
    alpha: f64,
    // unnormalised primitive at the cell edges of [−1, 0]
    table: Vec<f64>,
    total: f64,
    fine: GaussLegendre<f64>,
}

impl SmoothStep {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("bump exponent must be positive, got {alpha}")));
        }
        let coarse = GaussLegendre::<f64>::new(24);
        let h = 1.0 / STEP_CELLS as f64;
        let mut table = Vec::with_capacity(STEP_CELLS + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for i in 0..STEP_CELLS {
            let a = -1.0 + i as f64 * h;
            acc += coarse.integrate(a, a + h, |t| bump(alpha, t));
            table.push(acc);
        }
        Ok(SmoothStep {
            alpha,
            total: 2.0 * acc,
            table,
            fine: GaussLegendre::new(12),
        })
    }

    /// Shared Gevrey-3/2 step.
    pub fn gevrey() -> Arc<SmoothStep> {
        static CELL: OnceLock<Arc<SmoothStep>> = OnceLock::new();
        CELL.get_or_init(|| Arc::new(SmoothStep::new(2.0).expect("valid exponent"))).clone()
    }

    /// Shared `exp(−1/(1−t²))` step, the weaker regularity used for comparison.
    pub fn classical() -> Arc<SmoothStep> {
        static CELL: OnceLock<Arc<SmoothStep>> = OnceLock::new();
        CELL.get_or_init(|| Arc::new(SmoothStep::new(1.0).expect("valid exponent"))).clone()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `H(t)` for `t ∈ [−1, 0]`.
    fn primitive_left(&self, t: f64) -> f64 {
        if t <= -1.0 {
            return 0.0;
        }
        let pos = (t + 1.0) * STEP_CELLS as f64;
        let i = (pos.floor() as usize).min(STEP_CELLS - 1);
        let a = -1.0 + i as f64 / STEP_CELLS as f64;
        let partial = if t > a {
            self.fine.integrate(a, t, |u| bump(self.alpha, u))
        } else {
            0.0
        };
        (self.table[i] + partial) / self.total
    }

    /// Normalised primitive `H(t)`, `0` below `−1` and `1` above `1`.
    pub fn primitive(&self, t: f64) -> f64 {
        if t <= 0.0 {
            self.primitive_left(t)
        } else {
            1.0 - self.primitive_left(-t)
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= -1.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else if t <= 0.0 {
            (FRAC_PI_2 * self.primitive_left(t)).sin()
        } else {
            // sin(π/2 (1 − H(−t))) = cos(π/2 H(−t)); keeps s(t)² + s(−t)² = 1 exact
            (FRAC_PI_2 * self.primitive_left(-t)).cos()
        }
    }
}

fn bump(alpha: f64, t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        0.0
    } else {
        (-q.powf(-alpha)).exp()
    }
}

/// The Gevrey-3/2 step `s(t)`.
pub fn smooth_step(t: f64) -> f64 {
    SmoothStep::gevrey().eval(t)
}

#[derive(Debug, Clone)]
pub struct BellWindow {
    pub interval: WhitneyInterval,
    pub eps_left: f64,
    pub eps_right: f64,
    step: Arc<SmoothStep>,
}

impl BellWindow {
    pub fn eval(&self, x: f64) -> f64 {
        let xl = self.interval.x_left;
        let xr = self.interval.x_right();
        let rise = if self.eps_left > 0.0 {
            self.step.eval((x - xl) / self.eps_left)
        } else if x >= xl {
            1.0
        } else {
            0.0
        };
        if rise == 0.0 {
            return 0.0;
        }
        let fall = if self.eps_right > 0.0 {
            self.step.eval((xr - x) / self.eps_right)
        } else if x <= xr {
            1.0
        } else {
            0.0
        };
        rise * fall
    }

    pub fn support(&self) -> (f64, f64) {
        (self.interval.x_left - self.eps_left, self.interval.x_right() + self.eps_right)
    }

    /// Edges of the transition regions; the bell is analytic between them.
    pub fn breakpoints(&self) -> [f64; 4] {
        let xl = self.interval.x_left;
        let xr = self.interval.x_right();
        [xl - self.eps_left, xl + self.eps_left, xr - self.eps_right, xr + self.eps_right]
    }

    pub fn step(&self) -> &Arc<SmoothStep> {
        &self.step
    }
}

/// Bell for `interval` with the overlap radius at each shared endpoint set
/// to a third of the shorter of the two intervals meeting there. A missing
/// neighbour gives a hard edge.
pub fn build_bell(
    interval: &WhitneyInterval,
    left: Option<&WhitneyInterval>,
    right: Option<&WhitneyInterval>,
    step: Arc<SmoothStep>,
) -> Result<BellWindow> {
    let tol = 1e-15;
    let eps_left = match left {
        Some(n) => {
            if (n.x_right() - interval.x_left).abs() > tol {
                return Err(Error::invalid(format!(
                    "left neighbour ends at {} but the interval starts at {}",
                    n.x_right(),
                    interval.x_left
                )));
            }
            n.delta.min(interval.delta) / 3.0
        }
        None => 0.0,
    };
    let eps_right = match right {
        Some(n) => {
            if (n.x_left - interval.x_right()).abs() > tol {
                return Err(Error::invalid(format!(
                    "right neighbour starts at {} but the interval ends at {}",
                    n.x_left,
                    interval.x_right()
                )));
            }
            n.delta.min(interval.delta) / 3.0
        }
        None => 0.0,
    };
    Ok(BellWindow {
        interval: *interval,
        eps_left,
        eps_right,
        step,
    })
}

#[derive(Debug, Clone)]
pub struct LocalSineAtom {
    pub bell: BellWindow,
    pub k: u32,
    pub c: f64,
}

impl LocalSineAtom {
    pub fn interval(&self) -> &WhitneyInterval {
        &self.bell.interval
    }

    /// `π(k+½)/δ_L`.
    pub fn frequency(&self) -> f64 {
        PI * (self.k as f64 + 0.5) / self.bell.interval.delta
    }

    pub fn support(&self) -> (f64, f64) {
        self.bell.support()
    }

    /// True when neither edge of the bell is a hard cut.
    pub fn is_smooth(&self) -> bool {
        self.bell.eps_left > 0.0 && self.bell.eps_right > 0.0
    }

    /// `θ_L(x) sin(π(k+½)(x − x_L)/δ_L)` without the normalisation.
    pub fn raw(&self, x: f64) -> f64 {
        let th = self.bell.eval(x);
        if th == 0.0 {
            return 0.0;
        }
        th * (self.frequency() * (x - self.bell.interval.x_left)).sin()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c * self.raw(x)
    }

    /// Breakpoints inside the support where the integrand changes form.
    fn pieces(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.bell.breakpoints().to_vec();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// `1/‖θ_L sin(…)‖` by adaptive Gauss–Legendre over the analytic pieces.
pub fn normalize(bell: &BellWindow, k: u32) -> Result<f64> {
    let probe = LocalSineAtom {
        bell: bell.clone(),
        k,
        c: 1.0,
    };
    let rule = GaussLegendre::<f64>::new(15);
    let mut norm2 = 0.0;
    for w in probe.pieces().windows(2) {
        norm2 += adaptive_gl(&rule, w[0], w[1], Adaptive::new(1e-15), |x| probe.raw(x).powi(2))?;
    }
    Ok(1.0 / norm2.sqrt())
}

/// Truncated local sine system over `j = 1..=j_max`.
#[derive(Debug, Clone)]
pub struct LocalSineBasis {
    j_max: u32,
    bells: Vec<BellWindow>,
}

impl LocalSineBasis {
    pub fn new(j_max: u32) -> Result<Self> {
        Self::with_step(j_max, SmoothStep::gevrey())
    }

    pub fn with_step(j_max: u32, step: Arc<SmoothStep>) -> Result<Self> {
        let ivs = whitney_intervals(j_max)?;
        let bells = (0..ivs.len())
            .map(|i| {
                let left = i.checked_sub(1).map(|p| &ivs[p]);
                build_bell(&ivs[i], left, ivs.get(i + 1), step.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalSineBasis { j_max, bells })
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn bells(&self) -> &[BellWindow] {
        &self.bells
    }

    /// Covered region `(2^{−j_max−1}, 1 − 2^{−j_max−1})`.
    pub fn covered(&self) -> (f64, f64) {
        let e = 0.5f64.powi(self.j_max as i32 + 1);
        (e, 1.0 - e)
    }

    pub fn bell(&self, side: Side, j: u32) -> Option<&BellWindow> {
        self.bells.iter().find(|b| b.interval.side == side && b.interval.j == j)
    }

    pub fn atom(&self, side: Side, j: u32, k: u32) -> Result<LocalSineAtom> {
        let bell = self
            .bell(side, j)
            .ok_or_else(|| Error::invalid(format!("no interval ({}, j = {j}) at depth {}", side.as_str(), self.j_max)))?
            .clone();
        let c = normalize(&bell, k)?;
        Ok(LocalSineAtom { bell, k, c })
    }

    /// All atoms with `k < k_max`, in interval order then by `k`.
    pub fn atoms(&self, k_max: u32) -> Result<Vec<LocalSineAtom>> {
        let pairs: Vec<(usize, u32)> = (0..self.bells.len()).flat_map(|i| (0..k_max).map(move |k| (i, k))).collect();
        pairs
            .par_iter()
            .map(|&(i, k)| {
                let bell = self.bells[i].clone();
                let c = normalize(&bell, k)?;
                Ok(LocalSineAtom { bell, k, c })
            })
            .collect()
    }

    /// `Σ_L θ_L(x)²`.
    pub fn bell_square_sum(&self, x: f64) -> f64 {
        self.bells.iter().map(|b| b.eval(x).powi(2)).sum()
    }
}

/// `⟨φ_a, φ_b⟩` by adaptive quadrature over the common support, split at
/// the transition edges of both bells.
pub fn inner_product(a: &LocalSineAtom, b: &LocalSineAtom) -> Result<f64> {
    let (a0, a1) = a.support();
    let (b0, b1) = b.support();
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if lo >= hi {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = a.pieces().into_iter().chain(b.pieces()).filter(|&x| x > lo && x < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let rule = GaussLegendre::<f64>::new(15);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_gl(&rule, w[0], w[1], Adaptive::new(1e-14), |x| a.eval(x) * b.eval(x))?;
    }
    Ok(total)
}

/// `max_{i,j} |⟨φ_i, φ_j⟩ − δ_ij|`.
pub fn gram_defect(atoms: &[LocalSineAtom]) -> Result<f64> {
    if atoms.is_empty() {
        return Err(Error::invalid("gram_defect needs at least one atom"));
    }
    let pairs: Vec<(usize, usize)> = (0..atoms.len()).flat_map(|i| (i..atoms.len()).map(move |j| (i, j))).collect();
    let defects = pairs
        .par_iter()
        .map(|&(i, j)| {
            let g = inner_product(&atoms[i], &atoms[j])?;
            Ok(if i == j { (g - 1.0).abs() } else { g.abs() })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Largest admissible `|ξ|` is `TRANSFORM_CAP / δ_L`.
pub const TRANSFORM_CAP: f64 = 1e4;

/// Quadrature nodes for `φ̂(ξ) = ∫ φ(x) e^{−ixξ} dx`, valid for `|ξ| ≤ xi_max`:
/// 16-point Gauss–Legendre on panels no longer than `min(δ/8, 1/xi_max)`,
/// aligned with the bell transitions.
#[derive(Debug, Clone)]
pub struct FourierSampler {
    center: f64,
    xi_max: f64,
    // (x − center, w · φ(x))
    nodes: Vec<(f64, f64)>,
}

impl FourierSampler {
    pub fn new(atom: &LocalSineAtom, xi_max: f64) -> Result<Self> {
        let delta = atom.interval().delta;
        let xi_max = xi_max.abs();
        if xi_max > TRANSFORM_CAP / delta {
            return Err(Error::invalid(format!(
                "|ξ| = {xi_max} exceeds the transform cap {}",
                TRANSFORM_CAP / delta
            )));
        }
        let h = (delta / 8.0).min(if xi_max > 0.0 { 1.0 / xi_max } else { f64::INFINITY });
        let rule = GaussLegendre::<f64>::new(16);
        let center = atom.interval().midpoint();
        let mut nodes = Vec::new();
        for w in atom.pieces().windows(2) {
            let panels = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
            for (x, wt) in rule.composite(w[0], w[1], panels) {
                let v = atom.eval(x);
                if v != 0.0 {
                    nodes.push((x - center, wt * v));
                }
            }
        }
        Ok(FourierSampler { center, xi_max, nodes })
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(u, wv) in &self.nodes {
            let (s, c) = (u * xi).sin_cos();
            acc += Complex64::new(wv * c, -wv * s);
        }
        acc * Complex64::from_polar(1.0, -self.center * xi)
    }

    /// `|φ̂(ξ)|`, skipping the outer phase.
    pub fn abs(&self, xi: f64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for &(u, wv) in &self.nodes {
            let (s, c) = (u * xi).sin_cos();
            re += wv * c;
            im -= wv * s;
        }
        re.hypot(im)
    }
}

pub fn phi_hat(atom: &LocalSineAtom, xi: f64) -> Result<Complex64> {
    Ok(FourierSampler::new(atom, xi)?.eval(xi))
}

/// `Ψ_a(η) = exp(−a|η|^{2/3})`.
pub fn envelope(a: f64, eta: f64) -> f64 {
    (-a * eta.abs().powf(2.0 / 3.0)).exp()
}

/// `√δ Σ_σ Ψ_a(δξ − σπ(k+½))`.
pub fn envelope_bound(atom: &LocalSineAtom, a: f64, xi: f64) -> f64 {
    let delta = atom.interval().delta;
    let m = PI * (atom.k as f64 + 0.5);
    let eta = delta * xi;
    delta.sqrt() * (envelope(a, eta - m) + envelope(a, eta + m))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeFit {
    pub a: f64,
    pub c: f64,
    pub satisfied: bool,
}

pub const ENVELOPE_A_MIN: f64 = 0.1;
pub const ENVELOPE_A_MAX: f64 = 5.0;
pub const ENVELOPE_A_STEP: f64 = 0.05;
pub const ENVELOPE_C_MAX: f64 = 100.0;

/// `ξ ≥ 0` samples with `δξ` stepping by `step` from 0 past `π(k+½) + reach`.
pub fn envelope_grid(atom: &LocalSineAtom, reach: f64, step: f64) -> Vec<f64> {
    let delta = atom.interval().delta;
    let top = PI * (atom.k as f64 + 0.5) + reach;
    let n = (top / step).ceil() as usize + 1;
    (0..=n).map(|i| i as f64 * step / delta).collect()
}

/// Largest `a` on the grid `0.1, 0.15, …, 5` with a smallest admissible
/// `C ≤ 100`, where `C(a) = max_ξ |φ̂(ξ)| / (√δ Σ_σ Ψ_a(δξ − σπ(k+½)))`.
pub fn envelope_fit(atom: &LocalSineAtom, xi_grid: &[f64]) -> Result<EnvelopeFit> {
    let delta = atom.interval().delta;
    let m = PI * (atom.k as f64 + 0.5);
    let reach = xi_grid.iter().map(|&xi| (delta * xi).abs() - m).fold(f64::NEG_INFINITY, f64::max);
    if reach < 50.0 {
        return Err(Error::invalid(format!(
            "ξ grid reaches only {reach:.3} past the peak in scaled units (need 50)"
        )));
    }
    let xi_max = xi_grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let sampler = FourierSampler::new(atom, xi_max)?;
    let mags: Vec<f64> = xi_grid.par_iter().map(|&xi| sampler.abs(xi)).collect();
    Ok(fit_magnitudes(atom, xi_grid, &mags))
}

fn fit_magnitudes(atom: &LocalSineAtom, xi_grid: &[f64], mags: &[f64]) -> EnvelopeFit {
    let steps = ((ENVELOPE_A_MAX - ENVELOPE_A_MIN) / ENVELOPE_A_STEP).round() as usize;
    let c_of = |a: f64| {
        xi_grid
            .iter()
            .zip(mags)
            .map(|(&xi, &v)| v / envelope_bound(atom, a, xi))
            .fold(0.0f64, f64::max)
    };
    for i in (0..=steps).rev() {
        let a = ENVELOPE_A_MIN + i as f64 * ENVELOPE_A_STEP;
        let c = c_of(a);
        if c <= ENVELOPE_C_MAX {
            return EnvelopeFit { a, c, satisfied: true };
        }
    }
    EnvelopeFit {
        a: ENVELOPE_A_MIN,
        c: c_of(ENVELOPE_A_MIN),
        satisfied: false,
    }
}

/// `(2π)^{-1} ∫_{lo}^{hi} |φ̂(ξ)|² dξ` by composite Gauss–Legendre in `ξ`
/// on panels no wider than the reciprocal support length.
pub fn band_energy(atom: &LocalSineAtom, lo: f64, hi: f64) -> Result<f64> {
    if hi < lo {
        return Err(Error::invalid(format!("band [{lo}, {hi}] is empty")));
    }
    if hi == lo {
        return Ok(0.0);
    }
    let sampler = FourierSampler::new(atom, hi.abs().max(lo.abs()))?;
    let (a, b) = atom.support();
    let panels = ((hi - lo) * (b - a)).ceil().max(1.0) as usize;
    let rule = GaussLegendre::<f64>::new(16);
    let total: f64 = rule
        .composite(lo, hi, panels)
        .par_iter()
        .map(|&(xi, w)| w * sampler.abs(xi).powi(2))
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    Ok(total / (2.0 * PI))
}
