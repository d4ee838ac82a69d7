//! Gauss–Legendre rules and adaptive 1-D integration.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Nodes are found by Newton iteration on `P_n` in `f64` and then cast.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let (x, w) = legendre_rule_f64(n);
        GaussLegendre {
            nodes: x.into_iter().map(T::lit).collect(),
            weights: w.into_iter().map(T::lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Nodes and weights affinely mapped to `[a, b]`.
    pub fn on(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule: `panels` equal panels on `[a, b]`.
    pub fn composite(&self, a: T, b: T, panels: usize) -> Vec<(T, T)> {
        let panels = panels.max(1);
        let h = (b - a) / T::of(panels);
        let mut out = Vec::with_capacity(panels * self.len());
        for p in 0..panels {
            let lo = a + h * T::of(p);
            let hi = if p + 1 == panels { b } else { lo + h };
            out.extend(self.on(lo, hi));
        }
        out
    }
}

fn legendre_rule_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi initial guess, then Newton.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Budget for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive<T> {
    pub abs_tol: T,
    pub max_depth: usize,
    pub max_panels: usize,
}

impl<T: Real> Adaptive<T> {
    pub fn new(abs_tol: T) -> Self {
        Adaptive {
            abs_tol,
            max_depth: 48,
            max_panels: 200_000,
        }
    }
}

/// Adaptive Gauss–Legendre: a panel is accepted when its `rule` estimate
/// agrees with the sum over its two halves to within the panel's share
/// of the tolerance, and its parent panel agreed as well. The second
/// condition guards against accidental agreement at a kink.
pub fn adaptive_gl<T, F>(rule: &GaussLegendre<T>, a: T, b: T, budget: Adaptive<T>, mut f: F) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a == b {
        return Ok(T::zero());
    }
    let whole = rule.integrate(a, b, &mut f);
    let mut stack = vec![(a, b, whole, budget.abs_tol, 0usize, false)];
    let mut total = T::zero();
    let mut panels = 0usize;
    while let Some((lo, hi, est, tol, depth, parent_ok)) = stack.pop() {
        panels += 1;
        if panels > budget.max_panels {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature exceeded {} panels on [{}, {}]",
                budget.max_panels, a, b
            )));
        }
        let mid = (lo + hi) * T::lit(0.5);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let refined = left + right;
        let ok = (refined - est).abs() <= tol;
        if (ok && parent_ok) || (hi - lo).abs() <= T::epsilon() * (a.abs() + b.abs()) {
            total = total + refined;
        } else if depth >= budget.max_depth {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature hit depth {} near x = {}",
                depth, mid
            )));
        } else {
            let half_tol = tol * T::FRAC_1_SQRT_2();
            stack.push((mid, hi, right, half_tol, depth + 1, ok));
            stack.push((lo, mid, left, half_tol, depth + 1, ok));
        }
    }
    Ok(total)
}

/// Adaptive Simpson with Richardson correction.
pub fn adaptive_simpson<T, F>(a: T, b: T, budget: Adaptive<T>, mut f: F) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let six = T::lit(6.0);
    let fifteen = T::lit(15.0);
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) * T::lit(0.5);
    let fm = f(m);
    let whole = (b - a) / six * (fa + T::lit(4.0) * fm + fb);
    let mut stack = vec![(a, b, fa, fm, fb, whole, budget.abs_tol, 0usize)];
    let mut total = T::zero();
    let mut panels = 0usize;
    while let Some((lo, hi, flo, fmid, fhi, est, tol, depth)) = stack.pop() {
        panels += 1;
        if panels > budget.max_panels {
            return Err(Error::NonConvergence("adaptive Simpson panel budget exhausted".into()));
        }
        let mid = (lo + hi) * T::lit(0.5);
        let lm = (lo + mid) * T::lit(0.5);
        let rm = (mid + hi) * T::lit(0.5);
        let flm = f(lm);
        let frm = f(rm);
        let left = (mid - lo) / six * (flo + T::lit(4.0) * flm + fmid);
        let right = (hi - mid) / six * (fmid + T::lit(4.0) * frm + fhi);
        let delta = left + right - est;
        if delta.abs() <= fifteen * tol {
            total = total + left + right + delta / fifteen;
        } else if depth >= budget.max_depth {
            return Err(Error::NonConvergence(format!("adaptive Simpson hit depth {depth} near x = {mid}")));
        } else {
            let half_tol = tol * T::FRAC_1_SQRT_2();
            stack.push((mid, hi, fmid, frm, fhi, right, half_tol, depth + 1));
            stack.push((lo, mid, flo, flm, fmid, left, half_tol, depth + 1));
        }
    }
    Ok(total)
}

/// Tensor-product Gauss–Legendre nodes on an axis-aligned box, returned as
/// flat row-major points (`d` coordinates each) with product weights.
pub fn tensor_nodes<T: Real>(bounds: &[(T, T)], n_per_axis: usize) -> (Vec<T>, Vec<T>) {
    let rule = GaussLegendre::<T>::new(n_per_axis);
    let axes: Vec<Vec<(T, T)>> = bounds.iter().map(|&(a, b)| rule.on(a, b).collect()).collect();
    let d = bounds.len();
    let count = n_per_axis.pow(d as u32);
    let mut points = Vec::with_capacity(count * d);
    let mut weights = Vec::with_capacity(count);
    let mut idx = vec![0usize; d];
    for _ in 0..count {
        let mut w = T::one();
        for (axis, &i) in idx.iter().enumerate() {
            let (x, wi) = axes[axis][i];
            points.push(x);
            w = w * wi;
        }
        weights.push(w);
        // Last axis varies fastest.
        for axis in (0..d).rev() {
            idx[axis] += 1;
            if idx[axis] < n_per_axis {
                break;
            }
            idx[axis] = 0;
        }
    }
    (points, weights)
}
