//! Reproducing kernel `K_S(t) = (2π)^{-d} ∫_S e^{iξ·t} dξ` of the
//! bandlimiting projection onto frequencies in `S`.
//!
//! The closed forms need `S = −S` (interval, box, or ball centered at the
//! origin). Quadrature mode evaluates `(2π)^{-d} ∫_S cos(ξ·t) dξ`, which is
//! the kernel itself whenever `S = −S` and its real part otherwise.

use crate::domains::{interior_point, Domain, Shape, StarShape};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{plancherel_factor, Real};
use crate::special::bessel_j1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    ClosedForm,
    Quadrature,
}

/// Below this scaled argument `ρ|t|` the closed forms switch to their
/// four-term Taylor expansions.
const TAYLOR_SWITCH: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct KernelSpec<T> {
    domain: Domain<T>,
    mode: KernelMode,
    rule: GaussLegendre<T>,
    origin: Vec<T>,
    at_zero: T,
    rel_tol: T,
}

impl<T: Real> KernelSpec<T> {
    pub fn new(domain: Domain<T>, mode: KernelMode) -> Result<Self> {
        match mode {
            KernelMode::ClosedForm => Self::closed_form(domain),
            KernelMode::Quadrature => Self::quadrature(domain, 16),
        }
    }

    pub fn closed_form(domain: Domain<T>) -> Result<Self> {
        let d = domain.dim();
        match domain.shape() {
            Shape::Generic(_) => {
                return Err(Error::Unsupported("generic regions have no closed-form kernel".into()));
            }
            Shape::Ball { .. } if d > 3 => {
                return Err(Error::Unsupported(format!("closed-form ball kernel in dimension {d}")));
            }
            _ => {}
        }
        if domain.is_coordinate_symmetric() != Some(true) {
            return Err(Error::Unsupported(format!(
                "closed-form kernel needs a region symmetric about the origin, got {domain}"
            )));
        }
        let at_zero = domain.measure()? * plancherel_factor::<T>(d);
        Ok(KernelSpec {
            domain,
            mode: KernelMode::ClosedForm,
            rule: GaussLegendre::new(1),
            origin: vec![T::zero(); d],
            at_zero,
            rel_tol: T::epsilon(),
        })
    }

    /// Adaptive radial quadrature: directions by adaptive Simpson, radial
    /// integrals in closed form or by an `order`-point Gauss–Legendre rule.
    /// Target accuracy is `1e-9` relative to `K(0)`.
    pub fn quadrature(domain: Domain<T>, order: usize) -> Result<Self> {
        let d = domain.dim();
        if d > 3 {
            return Err(Error::Unsupported(format!("quadrature kernel in dimension {d} (limit 3)")));
        }
        if order < 2 {
            return Err(Error::invalid("quadrature order must be at least 2"));
        }
        let measure = domain.measure()?;
        let origin = if measure > T::zero() {
            interior_point(&domain, &domain.bounding_box())?
        } else {
            domain.center()
        };
        Ok(KernelSpec {
            at_zero: measure * plancherel_factor::<T>(d),
            domain,
            mode: KernelMode::Quadrature,
            rule: GaussLegendre::new(order),
            origin,
            rel_tol: T::lit(1e-9),
        })
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `K_S(0) = |S| / (2π)^d`.
    pub fn at_zero(&self) -> T {
        self.at_zero
    }

    pub fn value(&self, t: &[T]) -> Result<T> {
        self.domain.check_dim(t.len())?;
        self.value_unchecked(t)
    }

    pub(crate) fn value_unchecked(&self, t: &[T]) -> Result<T> {
        if self.at_zero == T::zero() {
            return Ok(T::zero());
        }
        match self.mode {
            KernelMode::ClosedForm => Ok(self.closed(t)),
            KernelMode::Quadrature => self.by_quadrature(t),
        }
    }

    fn closed(&self, t: &[T]) -> T {
        match self.domain.shape() {
            Shape::Interval { hi, .. } => sinc_kernel(*hi, t[0]),
            Shape::Box { bounds } => bounds.iter().zip(t).map(|(&(_, hi), &ti)| sinc_kernel(hi, ti)).fold(T::one(), |a, b| a * b),
            Shape::Ball { radius, .. } => {
                let norm = t.iter().map(|&v| v * v).sum::<T>().sqrt();
                match t.len() {
                    1 => sinc_kernel(*radius, norm),
                    2 => disk_kernel(*radius, norm),
                    _ => ball3_kernel(*radius, norm),
                }
            }
            Shape::Generic(_) => unreachable!("rejected at construction"),
        }
    }

    fn by_quadrature(&self, t: &[T]) -> Result<T> {
        // cos(ξ·t) is even in t; fixing the sign makes evenness exact.
        let flip = t.iter().find(|v| **v != T::zero()).is_some_and(|v| *v < T::zero());
        let t: Vec<T> = if flip { t.iter().map(|&v| -v).collect() } else { t.to_vec() };
        let star = StarShape::with_origin(&self.domain, self.origin.clone());
        let d = t.len();
        let tnorm = t.iter().map(|&v| v * v).sum::<T>().sqrt();
        let reach = star.reach();
        let panels = (tnorm * reach * T::lit(0.5)).ceil().to_usize().unwrap_or(1).max(8);
        let phase0: T = self.origin.iter().zip(&t).map(|(&p, &v)| p * v).sum();
        let measure = self.at_zero / plancherel_factor::<T>(d);
        let tol = self.rel_tol * measure;
        let rule = &self.rule;
        let raw = star.integrate(tol, panels, |u, rho| {
            let b: T = u.iter().zip(&t).map(|(&ui, &ti)| ui * ti).sum();
            radial_cos_moment(rule, d - 1, phase0, b, rho)
        })?;
        Ok(raw * plancherel_factor::<T>(d))
    }
}

/// `K_S(t)` for a kernel specification.
pub fn kernel_value<T: Real>(spec: &KernelSpec<T>, t: &[T]) -> Result<T> {
    spec.value(t)
}

/// `sin(W t) / (π t)`, the kernel of `[−W, W]`.
pub fn sinc_kernel<T: Real>(w: T, t: T) -> T {
    let y = w * t;
    if y.abs() < T::lit(TAYLOR_SWITCH) {
        let y2 = y * y;
        w / T::PI() * (T::one() - y2 / T::lit(6.0) + y2 * y2 / T::lit(120.0) - y2 * y2 * y2 / T::lit(5040.0))
    } else {
        y.sin() / (T::PI() * t)
    }
}

/// `ρ J₁(ρ|t|) / (2π|t|)`, the kernel of the disk of radius `ρ`.
pub fn disk_kernel<T: Real>(rho: T, tnorm: T) -> T {
    let x = rho * tnorm;
    let ratio = if x < T::lit(TAYLOR_SWITCH) {
        // J₁(x)/x
        let x2 = x * x;
        T::lit(0.5) - x2 / T::lit(16.0) + x2 * x2 / T::lit(384.0) - x2 * x2 * x2 / T::lit(18432.0)
    } else {
        bessel_j1(x) / x
    };
    rho * rho * ratio / T::TAU()
}

/// `(sin y − y cos y) / (2π²|t|³)` with `y = ρ|t|`, the kernel of the
/// 3-ball of radius `ρ`.
pub fn ball3_kernel<T: Real>(rho: T, tnorm: T) -> T {
    let y = rho * tnorm;
    let ratio = if y < T::lit(TAYLOR_SWITCH) {
        let y2 = y * y;
        T::one() / T::lit(3.0) - y2 / T::lit(30.0) + y2 * y2 / T::lit(840.0) - y2 * y2 * y2 / T::lit(45360.0)
    } else {
        (y.sin() - y * y.cos()) / (y * y * y)
    };
    rho * rho * rho * ratio / (T::lit(2.0) * T::PI() * T::PI())
}

/// `∫_0^ρ cos(α + s b) s^m ds` for `m ∈ {0, 1, 2}`.
fn radial_cos_moment<T: Real>(rule: &GaussLegendre<T>, m: usize, alpha: T, b: T, rho: T) -> T {
    let x = b * rho;
    if x.abs() < T::one() {
        // Smooth and slowly varying: one panel suffices to machine precision.
        return rule.integrate(T::zero(), rho, |s| (alpha + s * b).cos() * s.powi(m as i32));
    }
    let (sin_r, cos_r) = (alpha + x).sin_cos();
    let (sin_0, cos_0) = alpha.sin_cos();
    let b2 = b * b;
    match m {
        0 => (sin_r - sin_0) / b,
        1 => rho * sin_r / b + (cos_r - cos_0) / b2,
        _ => rho * rho * sin_r / b + T::lit(2.0) * rho * cos_r / b2 - T::lit(2.0) * (sin_r - sin_0) / (b2 * b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn interval_examples() {
        let k = KernelSpec::closed_form(Domain::<f64>::symmetric_interval(PI).unwrap()).unwrap();
        assert!((k.value(&[0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(k.value(&[1.0]).unwrap().abs() < 1e-12);
        assert!(matches!(k.value(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn disk_limit() {
        let k = KernelSpec::closed_form(Domain::<f64>::centered_ball(2, 1.0).unwrap()).unwrap();
        assert!((k.value(&[0.0, 0.0]).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn taylor_branches_match_direct_forms() {
        // At the switch the direct forms are still well conditioned.
        for &(rho, t) in &[(1.0f64, 0.0999), (1.0, 0.1001), (1e3, 0.99e-4), (1e-3, 99.0)] {
            let y: f64 = rho * t;
            let direct = y.sin() / (PI * t);
            assert!((sinc_kernel(rho, t) - direct).abs() < 1e-13 * direct.abs());
            let disk = rho * bessel_j1(y) / (2.0 * PI * t);
            assert!((disk_kernel(rho, t) - disk).abs() < 1e-13 * disk.abs());
            let ball = (y.sin() - y * y.cos()) / (2.0 * PI * PI * t.powi(3));
            assert!((ball3_kernel(rho, t) - ball).abs() < 1e-9 * ball.abs());
        }
        let tiny = ball3_kernel(1.5f64, 1e-9);
        assert!((tiny - 1.5f64.powi(3) / (6.0 * PI * PI)).abs() < 1e-15 * tiny);
    }

    #[test]
    fn asymmetric_closed_form_rejected() {
        let unit = Domain::<f64>::unit_cube(2).unwrap();
        assert!(matches!(KernelSpec::closed_form(unit), Err(Error::Unsupported(_))));
        let big = Domain::<f64>::centered_ball(4, 1.0).unwrap();
        assert!(KernelSpec::closed_form(big.clone()).is_err());
        assert!(KernelSpec::quadrature(big, 16).is_err());
    }

    #[test]
    fn quadrature_agrees_with_closed_forms() {
        let domains = vec![
            Domain::<f64>::symmetric_interval(2.5).unwrap(),
            Domain::boxed(vec![(-1.0, 1.0), (-2.0, 2.0)]).unwrap(),
            Domain::centered_ball(2, 1.5).unwrap(),
            Domain::centered_ball(3, 1.0).unwrap(),
        ];
        for s in domains {
            let closed = KernelSpec::closed_form(s.clone()).unwrap();
            let quad = KernelSpec::quadrature(s.clone(), 16).unwrap();
            for i in 0..15 {
                let t: Vec<f64> = (0..s.dim()).map(|a| ((i * 7 + a * 3) % 11) as f64 * 0.9 - 4.5).collect();
                let (c, q) = (closed.value(&t).unwrap(), quad.value(&t).unwrap());
                assert!((c - q).abs() < 1e-7 * closed.at_zero(), "{s} t={t:?}: {c} vs {q}");
            }
        }
    }

    #[test]
    fn generic_kernel_matches_disk() {
        let rule = Arc::new(|x: &[f64]| x[0] * x[0] + x[1] * x[1] <= 1.0);
        let g = Domain::generic(vec![(-1.0, 1.0), (-1.0, 1.0)], rule).unwrap();
        let quad = KernelSpec::quadrature(g, 16).unwrap();
        let disk = KernelSpec::closed_form(Domain::centered_ball(2, 1.0).unwrap()).unwrap();
        for t in [[0.0, 0.0], [0.3, -1.2], [7.0, 2.0]] {
            let (a, b) = (quad.value(&t).unwrap(), disk.value(&t).unwrap());
            assert!((a - b).abs() < 1e-8 * disk.at_zero(), "{t:?}: {a} vs {b}");
        }
    }

    #[test]
    fn zero_bandwidth_kernel_vanishes() {
        let k = KernelSpec::closed_form(Domain::<f64>::interval(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(k.value(&[0.0]).unwrap(), 0.0);
        assert_eq!(k.value(&[0.7]).unwrap(), 0.0);
    }

    #[test]
    fn single_precision_kernel() {
        let k = KernelSpec::closed_form(Domain::<f32>::symmetric_interval(std::f32::consts::PI).unwrap()).unwrap();
        assert!((k.value(&[0.0f32]).unwrap() - 1.0).abs() < 1e-6);
    }
}
