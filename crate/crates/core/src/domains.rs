//! Spatial and frequency domains: intervals, boxes, balls and generic
//! membership regions, with dilation, measure and symmetry probes.
//!
//! All regions are closed. Generic regions are given by a membership rule
//! plus a bounding box; they are assumed convex (in particular star-shaped
//! about an interior point), which is what the radial quadrature relies on.
//! Convexity is not checked.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, Adaptive};
use crate::scalar::Real;

/// Membership rule of a generic region.
pub type Membership<T> = Arc<dyn Fn(&[T]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct GenericRegion<T> {
    pub rule: Membership<T>,
    pub bbox: Vec<(T, T)>,
}

impl<T: fmt::Debug> fmt::Debug for GenericRegion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericRegion").field("bbox", &self.bbox).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Shape<T> {
    Interval { lo: T, hi: T },
    Box { bounds: Vec<(T, T)> },
    Ball { center: Vec<T>, radius: T },
    Generic(GenericRegion<T>),
}

/// A closed, bounded region of `ℝ^d`.
#[derive(Debug, Clone)]
pub struct Domain<T> {
    shape: Shape<T>,
}

impl<T: Real> Domain<T> {
    /// `[lo, hi]`. A degenerate interval (`lo == hi`) is allowed so that a
    /// zero-bandwidth frequency side can be expressed.
    pub fn interval(lo: T, hi: T) -> Result<Self> {
        check_axis(lo, hi, 0)?;
        Ok(Domain {
            shape: Shape::Interval { lo, hi },
        })
    }

    /// Symmetric interval `[−w, w]`.
    pub fn symmetric_interval(w: T) -> Result<Self> {
        Self::interval(-w, w)
    }

    pub fn boxed(bounds: Vec<(T, T)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::invalid("box needs at least one axis"));
        }
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            check_axis(lo, hi, axis)?;
        }
        Ok(Domain {
            shape: Shape::Box { bounds },
        })
    }

    /// The unit cube `[0, 1]^d`.
    pub fn unit_cube(d: usize) -> Result<Self> {
        Self::boxed(vec![(T::zero(), T::one()); d])
    }

    pub fn ball(center: Vec<T>, radius: T) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::invalid("ball needs a center with at least one coordinate"));
        }
        if !(radius >= T::zero()) || !radius.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("ball radius must be finite and >= 0, got {radius}")));
        }
        Ok(Domain {
            shape: Shape::Ball { center, radius },
        })
    }

    pub fn centered_ball(d: usize, radius: T) -> Result<Self> {
        Self::ball(vec![T::zero(); d], radius)
    }

    pub fn generic(bbox: Vec<(T, T)>, rule: Membership<T>) -> Result<Self> {
        if bbox.is_empty() {
            return Err(Error::invalid("generic region needs a bounding box"));
        }
        for (axis, &(lo, hi)) in bbox.iter().enumerate() {
            check_axis(lo, hi, axis)?;
        }
        Ok(Domain {
            shape: Shape::Generic(GenericRegion { rule, bbox }),
        })
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Interval { .. } => 1,
            Shape::Box { bounds } => bounds.len(),
            Shape::Ball { center, .. } => center.len(),
            Shape::Generic(g) => g.bbox.len(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.shape {
            Shape::Interval { .. } => "interval",
            Shape::Box { .. } => "box",
            Shape::Ball { .. } => "ball",
            Shape::Generic(_) => "generic",
        }
    }

    pub fn is_generic(&self) -> bool {
        matches!(self.shape, Shape::Generic(_))
    }

    pub fn bounding_box(&self) -> Vec<(T, T)> {
        match &self.shape {
            Shape::Interval { lo, hi } => vec![(*lo, *hi)],
            Shape::Box { bounds } => bounds.clone(),
            Shape::Ball { center, radius } => center.iter().map(|&c| (c - *radius, c + *radius)).collect(),
            Shape::Generic(g) => g.bbox.clone(),
        }
    }

    /// Closed membership test.
    pub fn contains(&self, x: &[T]) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &[T]) -> bool {
        match &self.shape {
            Shape::Interval { lo, hi } => x[0] >= *lo && x[0] <= *hi,
            Shape::Box { bounds } => x.iter().zip(bounds).all(|(&v, &(lo, hi))| v >= lo && v <= hi),
            Shape::Ball { center, radius } => {
                let r2: T = x.iter().zip(center).map(|(&v, &c)| (v - c) * (v - c)).sum();
                r2 <= *radius * *radius
            }
            Shape::Generic(g) => (g.rule)(x),
        }
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }

    /// Lebesgue measure. Closed form except for generic regions, which use
    /// adaptive radial quadrature to a relative accuracy well below `1e-6`.
    pub fn measure(&self) -> Result<T> {
        match &self.shape {
            Shape::Interval { lo, hi } => Ok(*hi - *lo),
            Shape::Box { bounds } => Ok(bounds.iter().map(|&(lo, hi)| hi - lo).fold(T::one(), |a, b| a * b)),
            Shape::Ball { center, radius } => Ok(unit_ball_volume::<T>(center.len()) * radius.powi(center.len() as i32)),
            Shape::Generic(_) => self.measure_by_quadrature(T::lit(1e-10)),
        }
    }

    /// Radial-quadrature measure, usable for every kind.
    pub fn measure_by_quadrature(&self, rel_tol: T) -> Result<T> {
        let star = StarShape::new(self)?;
        let d = self.dim();
        let dt = T::of(d);
        let scale = bbox_volume(&self.bounding_box());
        if scale == T::zero() {
            return Ok(T::zero());
        }
        star.integrate(rel_tol * scale * T::lit(0.01), 8, |_, rho| rho.powi(d as i32) / dt)
    }

    /// `S(r) = { r x : x ∈ S }` in the same representation.
    pub fn dilate(&self, r: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::invalid(format!("dilation factor must be positive, got {r}")));
        }
        let shape = match &self.shape {
            Shape::Interval { lo, hi } => Shape::Interval { lo: *lo * r, hi: *hi * r },
            Shape::Box { bounds } => Shape::Box {
                bounds: bounds.iter().map(|&(lo, hi)| (lo * r, hi * r)).collect(),
            },
            Shape::Ball { center, radius } => Shape::Ball {
                center: center.iter().map(|&c| c * r).collect(),
                radius: *radius * r,
            },
            Shape::Generic(g) => {
                let base = g.rule.clone();
                let inv = T::one() / r;
                Shape::Generic(GenericRegion {
                    rule: Arc::new(move |x: &[T]| {
                        let y: Vec<T> = x.iter().map(|&v| v * inv).collect();
                        base(&y)
                    }),
                    bbox: g.bbox.iter().map(|&(lo, hi)| (lo * r, hi * r)).collect(),
                })
            }
        };
        Ok(Domain { shape })
    }

    /// Center of the bounding box (the ball center for balls).
    pub fn center(&self) -> Vec<T> {
        match &self.shape {
            Shape::Ball { center, .. } => center.clone(),
            _ => self
                .bounding_box()
                .iter()
                .map(|&(lo, hi)| (lo + hi) * T::lit(0.5))
                .collect(),
        }
    }

    /// Translate so the center sits at the origin. Generic regions are
    /// returned unchanged.
    pub fn centered(&self) -> Self {
        let c = self.center();
        let shape = match &self.shape {
            Shape::Interval { lo, hi } => Shape::Interval {
                lo: *lo - c[0],
                hi: *hi - c[0],
            },
            Shape::Box { bounds } => Shape::Box {
                bounds: bounds.iter().zip(&c).map(|(&(lo, hi), &m)| (lo - m, hi - m)).collect(),
            },
            Shape::Ball { radius, center } => Shape::Ball {
                center: vec![T::zero(); center.len()],
                radius: *radius,
            },
            Shape::Generic(g) => Shape::Generic(g.clone()),
        };
        Domain { shape }
    }

    /// Exact symmetry under every coordinate flip, when decidable from the
    /// closed-form parameters; `None` for generic regions.
    pub fn is_coordinate_symmetric(&self) -> Option<bool> {
        match &self.shape {
            Shape::Interval { lo, hi } => Some(*lo == -*hi),
            Shape::Box { bounds } => Some(bounds.iter().all(|&(lo, hi)| lo == -hi)),
            Shape::Ball { center, .. } => Some(center.iter().all(|&c| c == T::zero())),
            Shape::Generic(_) => None,
        }
    }

    /// Fraction of quasi-random members `x` (Halton points in the bounding
    /// box) for which some coordinate flip `τ_j(x)` leaves the region.
    pub fn symmetry_defect(&self, n_samples: usize) -> Result<T> {
        if n_samples == 0 {
            return Err(Error::invalid("symmetry_defect needs at least one sample"));
        }
        let bbox = self.bounding_box();
        let d = bbox.len();
        let mut members = 0usize;
        let mut broken = 0usize;
        let mut x = vec![T::zero(); d];
        for i in 0..n_samples {
            halton_in_box(i, &bbox, &mut x);
            if !self.contains_unchecked(&x) {
                continue;
            }
            members += 1;
            let mut flipped = x.clone();
            let ok = (0..d).all(|j| {
                flipped[j] = -flipped[j];
                let inside = self.contains_unchecked(&flipped);
                flipped[j] = -flipped[j];
                inside
            });
            if !ok {
                broken += 1;
            }
        }
        if members == 0 {
            return Ok(T::zero());
        }
        Ok(T::of(broken) / T::of(members))
    }

    /// Canonical CLI literal; `None` for generic regions.
    pub fn to_literal(&self) -> Option<String> {
        let fmt_axis = |lo: T, hi: T| format!("{},{}", lo, hi);
        match &self.shape {
            Shape::Interval { lo, hi } => Some(format!("interval:{}", fmt_axis(*lo, *hi))),
            Shape::Box { bounds } => Some(format!(
                "box:{}",
                bounds.iter().map(|&(lo, hi)| fmt_axis(lo, hi)).collect::<Vec<_>>().join(";")
            )),
            Shape::Ball { center, radius } => {
                let c: Vec<String> = center.iter().map(|c| c.to_string()).collect();
                Some(format!("ball:{}@{}", radius, c.join(",")))
            }
            Shape::Generic(_) => None,
        }
    }

    /// Parses `interval:a,b`, `box:a1,b1;a2,b2;...`, `ball:r` (centered at
    /// the origin of `ℝ^default_dim`) or `ball:r@c1,c2,...`.
    pub fn parse(literal: &str, default_dim: usize) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        let (kind, body) = literal.split_once(':').ok_or_else(|| bad("expected `<kind>:<parameters>`"))?;
        let num = |s: &str| -> Result<T> {
            let v: f64 = s.trim().parse().map_err(|_| bad(&format!("`{s}` is not a number")))?;
            if !v.is_finite() {
                return Err(bad("non-finite number"));
            }
            Ok(T::lit(v))
        };
        let pair = |s: &str| -> Result<(T, T)> {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 2 {
                return Err(bad("each axis needs exactly `lo,hi`"));
            }
            Ok((num(parts[0])?, num(parts[1])?))
        };
        let domain = match kind.trim() {
            "interval" => {
                let (lo, hi) = pair(body)?;
                Self::interval(lo, hi)
            }
            "box" => {
                let bounds = body.split(';').map(pair).collect::<Result<Vec<_>>>()?;
                Self::boxed(bounds)
            }
            "ball" => match body.split_once('@') {
                Some((r, c)) => {
                    let center = c.split(',').map(num).collect::<Result<Vec<_>>>()?;
                    Self::ball(center, num(r)?)
                }
                None => {
                    if default_dim == 0 {
                        return Err(bad("ball without center needs a dimension"));
                    }
                    Self::centered_ball(default_dim, num(body)?)
                }
            },
            other => return Err(bad(&format!("unknown kind `{other}`"))),
        };
        domain.map_err(|e| bad(&e.to_string()))
    }
}

fn check_axis<T: Real>(lo: T, hi: T, axis: usize) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::invalid(format!(
            "axis {axis}: need finite lo <= hi, got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

pub(crate) fn bbox_volume<T: Real>(bbox: &[(T, T)]) -> T {
    bbox.iter().map(|&(lo, hi)| hi - lo).fold(T::one(), |a, b| a * b)
}

/// Volume of the unit ball in `ℝ^d`.
pub fn unit_ball_volume<T: Real>(d: usize) -> T {
    // V_d = V_{d-2} · 2π/d with V_0 = 1, V_1 = 2
    let mut v = if d % 2 == 0 { T::one() } else { T::lit(2.0) };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v = v * T::TAU() / T::of(k);
        k += 2;
    }
    v
}

/// The `r`-dilate `S(r)` of a base region, with membership defined through
/// the base: `ξ ∈ S(r) ⇔ ξ/r ∈ S`.
#[derive(Debug, Clone)]
pub struct Dilation<T> {
    base: Domain<T>,
    r: T,
}

impl<T: Real> Dilation<T> {
    pub fn new(base: Domain<T>, r: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::invalid(format!("dilation factor must be positive, got {r}")));
        }
        Ok(Dilation { base, r })
    }

    pub fn base(&self) -> &Domain<T> {
        &self.base
    }

    pub fn factor(&self) -> T {
        self.r
    }

    pub fn contains(&self, xi: &[T]) -> Result<bool> {
        let scaled: Vec<T> = xi.iter().map(|&v| v / self.r).collect();
        self.base.contains(&scaled)
    }

    pub fn measure(&self) -> Result<T> {
        Ok(self.base.measure()? * self.r.powi(self.base.dim() as i32))
    }

    /// Materialise as a standalone domain of the same kind.
    pub fn to_domain(&self) -> Result<Domain<T>> {
        self.base.dilate(self.r)
    }
}

const HALTON_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
/// Fixed offset into the Halton sequence; skips the strongly correlated
/// leading points.
const HALTON_SEED: usize = 20;

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// `i`-th Halton point mapped into `bbox`.
pub fn halton_in_box<T: Real>(i: usize, bbox: &[(T, T)], out: &mut [T]) {
    let idx = (i + HALTON_SEED) as u64;
    for (axis, &(lo, hi)) in bbox.iter().enumerate() {
        let u = radical_inverse(idx, HALTON_PRIMES[axis % HALTON_PRIMES.len()]);
        out[axis] = lo + (hi - lo) * T::lit(u);
    }
}

/// Radial parametrisation of a region about an interior point.
pub(crate) struct StarShape<'a, T> {
    domain: &'a Domain<T>,
    origin: Vec<T>,
    bbox: Vec<(T, T)>,
}

impl<'a, T: Real> StarShape<'a, T> {
    pub(crate) fn new(domain: &'a Domain<T>) -> Result<Self> {
        let bbox = domain.bounding_box();
        let origin = interior_point(domain, &bbox)?;
        Ok(StarShape { domain, origin, bbox })
    }

    pub(crate) fn with_origin(domain: &'a Domain<T>, origin: Vec<T>) -> Self {
        StarShape {
            bbox: domain.bounding_box(),
            domain,
            origin,
        }
    }

    /// Largest distance from the origin to a bounding-box corner.
    pub(crate) fn reach(&self) -> T {
        self.origin
            .iter()
            .zip(&self.bbox)
            .map(|(&p, &(lo, hi))| {
                let m = (p - lo).abs().max((hi - p).abs());
                m * m
            })
            .sum::<T>()
            .sqrt()
    }

    /// Distance from the origin to the boundary along unit direction `u`.
    pub(crate) fn radius(&self, u: &[T]) -> T {
        if let Shape::Ball { center, radius } = &self.domain.shape {
            let mut b = T::zero();
            let mut c = -*radius * *radius;
            for ((&p, &ui), &ci) in self.origin.iter().zip(u).zip(center) {
                b = b + ui * (p - ci);
                c = c + (p - ci) * (p - ci);
            }
            return (b * b - c).max(T::zero()).sqrt() - b;
        }
        let mut t_max = T::infinity();
        for ((&p, &ui), &(lo, hi)) in self.origin.iter().zip(u).zip(&self.bbox) {
            if ui > T::zero() {
                t_max = t_max.min((hi - p) / ui);
            } else if ui < T::zero() {
                t_max = t_max.min((lo - p) / ui);
            }
        }
        if !t_max.is_finite() {
            return T::zero();
        }
        let at = |t: T| -> Vec<T> { self.origin.iter().zip(u).map(|(&p, &ui)| p + t * ui).collect() };
        if self.domain.contains_unchecked(&at(t_max)) {
            return t_max;
        }
        let (mut inside, mut outside) = (T::zero(), t_max);
        for _ in 0..T::bisection_steps() {
            let mid = (inside + outside) * T::lit(0.5);
            if mid <= inside || mid >= outside {
                break;
            }
            if self.domain.contains_unchecked(&at(mid)) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        (inside + outside) * T::lit(0.5)
    }

    /// `∫ over directions of radial(u, ρ(u)) dσ(u)`, where `radial` returns
    /// the radial integral `∫_0^ρ g(origin + s u) s^{d−1} ds`. Directions are
    /// integrated adaptively; `panels` sets the initial angular partition.
    pub(crate) fn integrate<F>(&self, abs_tol: T, panels: usize, mut radial: F) -> Result<T>
    where
        F: FnMut(&[T], T) -> T,
    {
        let d = self.origin.len();
        match d {
            1 => {
                let plus = [T::one()];
                let minus = [-T::one()];
                Ok(radial(&plus, self.radius(&plus)) + radial(&minus, self.radius(&minus)))
            }
            2 => {
                let mut u = [T::zero(); 2];
                adaptive_panels(T::zero(), T::TAU(), panels, abs_tol, |theta| {
                    u[0] = theta.cos();
                    u[1] = theta.sin();
                    let rho = self.radius(&u);
                    radial(&u, rho)
                })
            }
            3 => {
                let mut failure: Option<Error> = None;
                let inner_tol = abs_tol / T::lit(4.0);
                let outer = adaptive_panels(T::zero(), T::PI(), panels.div_ceil(2).max(2), abs_tol * T::lit(0.5), |theta| {
                    let (st, ct) = (theta.sin(), theta.cos());
                    let mut u = [T::zero(); 3];
                    let inner = adaptive_panels(T::zero(), T::TAU(), panels, inner_tol, |phi| {
                        u[0] = st * phi.cos();
                        u[1] = st * phi.sin();
                        u[2] = ct;
                        let rho = self.radius(&u);
                        radial(&u, rho)
                    });
                    match inner {
                        Ok(v) => v * st,
                        Err(e) => {
                            failure.get_or_insert(e);
                            T::zero()
                        }
                    }
                })?;
                match failure {
                    Some(e) => Err(e),
                    None => Ok(outer),
                }
            }
            _ => Err(Error::Unsupported(format!("radial quadrature in dimension {d}"))),
        }
    }
}

/// Adaptive Simpson over `panels` equal initial panels. Simpson samples
/// panel endpoints, so boundary kinks of the radius function next to a
/// panel edge cannot hide between nodes.
pub(crate) fn adaptive_panels<T: Real, F: FnMut(T) -> T>(a: T, b: T, panels: usize, abs_tol: T, mut f: F) -> Result<T> {
    let panels = panels.max(1);
    let h = (b - a) / T::of(panels);
    let tol = abs_tol / T::of(panels);
    let mut total = T::zero();
    for p in 0..panels {
        let lo = a + h * T::of(p);
        let hi = if p + 1 == panels { b } else { lo + h };
        total = total + adaptive_simpson(lo, hi, Adaptive::new(tol), &mut f)?;
    }
    Ok(total)
}

pub(crate) fn interior_point<T: Real>(domain: &Domain<T>, bbox: &[(T, T)]) -> Result<Vec<T>> {
    let center = domain.center();
    if is_interior(domain, &center, bbox) {
        return Ok(center);
    }
    let d = bbox.len();
    let mut x = vec![T::zero(); d];
    let mut mean = vec![T::zero(); d];
    let mut first: Option<Vec<T>> = None;
    let mut hits = 0usize;
    for i in 0..4096 {
        halton_in_box(i, bbox, &mut x);
        if domain.contains_unchecked(&x) {
            hits += 1;
            first.get_or_insert_with(|| x.clone());
            for (m, &v) in mean.iter_mut().zip(&x) {
                *m = *m + v;
            }
        }
    }
    if hits == 0 {
        return Err(Error::invalid("region has no interior point detectable by sampling"));
    }
    for m in mean.iter_mut() {
        *m = *m / T::of(hits);
    }
    if is_interior(domain, &mean, bbox) {
        Ok(mean)
    } else {
        Ok(first.expect("at least one hit"))
    }
}

/// Membership of `x` and of its axis perturbations by `1e-6` of the box width.
fn is_interior<T: Real>(domain: &Domain<T>, x: &[T], bbox: &[(T, T)]) -> bool {
    if !domain.contains_unchecked(x) {
        return false;
    }
    let mut y = x.to_vec();
    for (axis, &(lo, hi)) in bbox.iter().enumerate() {
        let h = (hi - lo) * T::lit(1e-6);
        for step in [h, -h] {
            y[axis] = x[axis] + step;
            if !domain.contains_unchecked(&y) {
                return false;
            }
        }
        y[axis] = x[axis];
    }
    true
}

impl<T: Real> fmt::Display for Domain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_literal() {
            Some(s) => f.write_str(&s),
            None => write!(f, "generic{:?}", self.bounding_box()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk_rule() -> Membership<f64> {
        Arc::new(|x: &[f64]| x[0] * x[0] + x[1] * x[1] <= 1.0)
    }

    #[test]
    fn contains_examples() {
        let ball = Domain::<f64>::centered_ball(2, 1.0).unwrap();
        assert!(ball.contains(&[0.0, 0.0]).unwrap());
        assert!(!ball.contains(&[1.001, 0.0]).unwrap());
        let unit = Domain::<f64>::unit_cube(2).unwrap();
        assert!(unit.contains(&[0.5, 1.0]).unwrap());
        assert!(matches!(
            unit.contains(&[0.5]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn closed_form_measures() {
        let iv = Domain::<f64>::symmetric_interval(PI).unwrap();
        assert!((iv.measure().unwrap() - 2.0 * PI).abs() < 1e-15);
        let disk = Domain::<f64>::centered_ball(2, 1.0).unwrap();
        assert!((disk.measure().unwrap() - PI).abs() < 1e-6);
        let ball3 = Domain::<f64>::centered_ball(3, 2.0).unwrap();
        assert!((ball3.measure().unwrap() - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
    }

    #[test]
    fn generic_disk_measure_matches_closed_form() {
        let g = Domain::generic(vec![(-1.0, 1.0), (-1.0, 1.0)], disk_rule()).unwrap();
        let m = g.measure().unwrap();
        assert!((m - PI).abs() < 1e-6 * PI, "m = {m}");
    }

    #[test]
    fn generic_off_center_triangle() {
        // Triangle with vertices (0,0), (2,0), (0,1): area 1; bbox center (1, 0.5) is on the hypotenuse.
        let rule: Membership<f64> = Arc::new(|x: &[f64]| x[0] >= 0.0 && x[1] >= 0.0 && x[0] / 2.0 + x[1] <= 1.0);
        let g = Domain::generic(vec![(0.0, 2.0), (0.0, 1.0)], rule).unwrap();
        let m = g.measure().unwrap();
        assert!((m - 1.0).abs() < 1e-6, "m = {m}");
    }

    #[test]
    fn generic_ball_in_three_dimensions() {
        let rule: Membership<f64> = Arc::new(|x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() <= 1.0);
        let g = Domain::generic(vec![(-1.0, 1.0); 3], rule).unwrap();
        let m = g.measure().unwrap();
        assert!((m - 4.0 / 3.0 * PI).abs() < 1e-6 * m);
    }

    #[test]
    fn symmetry_defect_examples() {
        let ball = Domain::<f64>::centered_ball(2, 1.0).unwrap();
        assert_eq!(ball.symmetry_defect(1000).unwrap(), 0.0);
        let unit = Domain::<f64>::unit_cube(2).unwrap();
        assert!(unit.symmetry_defect(1000).unwrap() > 0.0);
        let sym = Domain::<f64>::boxed(vec![(-1.0, 1.0); 2]).unwrap();
        assert_eq!(sym.symmetry_defect(1000).unwrap(), 0.0);
        assert!(sym.symmetry_defect(0).is_err());
    }

    #[test]
    fn literal_grammar() {
        let d = Domain::<f64>::parse("box:0,1;-2,2.5", 0).unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.to_literal().unwrap(), "box:0,1;-2,2.5");
        let b = Domain::<f64>::parse("ball:2", 3).unwrap();
        assert_eq!(b.dim(), 3);
        assert_eq!(b.to_literal().unwrap(), "ball:2@0,0,0");
        let c = Domain::<f64>::parse("ball:1.5@1,2", 0).unwrap();
        assert_eq!(c.center(), vec![1.0, 2.0]);
        let i = Domain::<f64>::parse("interval:-31.41592653589793,31.41592653589793", 1).unwrap();
        assert!((i.measure().unwrap() - 20.0 * PI).abs() < 1e-12);
        for bad in ["interval:1", "box:0,1;2", "ball:x", "cone:1", "interval:2,1", "ball:1"] {
            assert!(Domain::<f64>::parse(bad, 0).is_err(), "{bad}");
        }
    }

    #[test]
    fn degenerate_interval_is_measure_zero() {
        let z = Domain::<f64>::interval(0.0, 0.0).unwrap();
        assert_eq!(z.measure().unwrap(), 0.0);
        assert!(Domain::<f64>::interval(1.0, 0.0).is_err());
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume::<f64>(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }
}
