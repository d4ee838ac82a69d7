//! Property checks shared by the property suite and the acceptance runner.
//! Each check runs a deterministic proptest runner and returns the first
//! failure as a message.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};

use tflimit::domains::{Domain, Membership};
use tflimit::kernels::KernelSpec;
use tflimit::limiting::{discretize, expected_trace, spectrum};
use tflimit::linalg::{eigvalsh, SymMatrix};
use tflimit::packings::{WavePacketAtom, Window};
use tflimit::quadrature::GaussLegendre;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn report<T: std::fmt::Debug>(name: &str, r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

pub fn disk_rule() -> Membership<f64> {
    Arc::new(|x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() <= 1.0)
}

/// `|x| + |y|/2 ≤ 1`, a symmetric convex region with no closed form here.
pub fn diamond() -> Domain<f64> {
    let rule: Membership<f64> = Arc::new(|x: &[f64]| x[0].abs() + 0.5 * x[1].abs() <= 1.0);
    Domain::generic(vec![(-1.0, 1.0), (-2.0, 2.0)], rule).unwrap()
}

/// Frequency regions of every closed-form kind, scaled by `w`.
pub fn closed_form_regions(w: f64) -> Vec<Domain<f64>> {
    vec![
        Domain::symmetric_interval(w).unwrap(),
        Domain::boxed(vec![(-w, w), (-0.5 * w, 0.5 * w)]).unwrap(),
        Domain::centered_ball(2, w).unwrap(),
        Domain::centered_ball(3, w).unwrap(),
    ]
}

/// `Σ λ_k = |F||S|/(2π)^d` within `1e−6` relative, and every eigenvalue in
/// `(−1e−8, 1 + 1e−6)`.
pub fn trace_identity(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=2, -2.0f64..2.0, 0.2f64..2.0, 0.5f64..1.0, 0usize..2);
    report(
        "trace identity",
        runner(cases).run(&strategy, |(d, lo, len, frac, kind)| {
            let (f, s, n) = if d == 1 {
                let w = 40.0 * frac;
                (Domain::interval(lo, lo + len).unwrap(), Domain::symmetric_interval(w).unwrap(), 96)
            } else {
                let w = 8.0 * frac;
                let f = Domain::boxed(vec![(lo, lo + len), (0.0, 1.0)]).unwrap();
                let s = if kind == 0 {
                    Domain::boxed(vec![(-w, w), (-0.5 * w, 0.5 * w)]).unwrap()
                } else {
                    Domain::centered_ball(2, w).unwrap()
                };
                (f, s, 20)
            };
            let op = discretize(&f, &s, n).map_err(|e| fail(e.to_string()))?;
            let rep = spectrum(&op).map_err(|e| fail(e.to_string()))?;
            let want = expected_trace(&f, &s).unwrap();
            let rel = (rep.trace() - want).abs() / want;
            prop_assert!(rel <= 1e-6, "trace {} vs {} (rel {:e})", rep.trace(), want, rel);
            for &l in &rep.eigenvalues {
                prop_assert!(l > -1e-8 && l < 1.0 + 1e-6, "eigenvalue {} outside (−1e−8, 1 + 1e−6)", l);
            }
            Ok(())
        }),
    )
}

/// `[K_S(x_i − x_j)]` is numerically positive semidefinite for arbitrary
/// node sets.
pub fn kernel_psd(cases: u32) -> Result<(), String> {
    let strategy = (0usize..4, 0.5f64..10.0, prop::collection::vec(-3.0f64..3.0, 90));
    report(
        "kernel PSD",
        runner(cases).run(&strategy, |(kind, w, coords)| {
            let s = closed_form_regions(w).swap_remove(kind);
            let d = s.dim();
            let spec = KernelSpec::closed_form(s).unwrap();
            let m = coords.len() / d;
            let pts: Vec<&[f64]> = (0..m).map(|i| &coords[i * d..(i + 1) * d]).collect();
            let mat = SymMatrix::from_lower(m, |i, j| {
                let t: Vec<f64> = pts[i].iter().zip(pts[j]).map(|(a, b)| a - b).collect();
                spec.value(&t).unwrap()
            });
            let vals = eigvalsh(&mat).map_err(|e| fail(e.to_string()))?;
            let least = *vals.last().unwrap();
            prop_assert!(least >= -1e-8, "smallest eigenvalue {:e}", least);
            Ok(())
        }),
    )
}

/// Closed forms are exactly even, quadrature mode to `1e−10`, and
/// `K_S(0) = |S|/(2π)^d` to `1e−8` for every kind.
pub fn kernel_evenness_and_convention(cases: u32) -> Result<(), String> {
    let strategy = (0usize..5, 0.5f64..6.0, prop::collection::vec(-4.0f64..4.0, 3));
    report(
        "kernel evenness and convention",
        runner(cases).run(&strategy, |(kind, w, t)| {
            let (closed, quad) = if kind < 4 {
                let s = closed_form_regions(w).swap_remove(kind);
                (Some(KernelSpec::closed_form(s.clone()).unwrap()), KernelSpec::quadrature(s, 16).unwrap())
            } else {
                (None, KernelSpec::quadrature(diamond().dilate(w).unwrap(), 16).unwrap())
            };
            let d = quad.dim();
            let t = &t[..d];
            let neg: Vec<f64> = t.iter().map(|v| -v).collect();
            let measure = quad.domain().measure().unwrap();
            let want = measure / (2.0 * PI).powi(d as i32);
            if let Some(c) = &closed {
                prop_assert_eq!(c.value(t).unwrap(), c.value(&neg).unwrap());
                prop_assert!((c.value(&vec![0.0; d]).unwrap() - want).abs() <= 1e-8);
            }
            let (a, b) = (quad.value(t).unwrap(), quad.value(&neg).unwrap());
            prop_assert!((a - b).abs() <= 1e-10, "quadrature K(t) − K(−t) = {:e}", a - b);
            let at0 = quad.value(&vec![0.0; d]).unwrap();
            prop_assert!((at0 - want).abs() <= 1e-8, "K(0) = {} vs {}", at0, want);
            Ok(())
        }),
    )
}

/// Membership commutes with dilation for `r ∈ {0.5, 1, 2, 10}`; generic
/// measures scale by `r^d` within `1e−5` relative.
pub fn dilation_scaling(cases: u32) -> Result<(), String> {
    let strategy = (
        0usize..5,
        prop::sample::select(vec![0.5f64, 1.0, 2.0, 10.0]),
        prop::collection::vec(prop::collection::vec(-12.0f64..12.0, 3), 40),
    );
    report(
        "dilation and measure scaling",
        runner(cases).run(&strategy, |(kind, r, samples)| {
            let base = match kind {
                0 => Domain::interval(-0.3, 1.1).unwrap(),
                1 => Domain::boxed(vec![(-1.0, 0.5), (0.0, 2.0), (-0.2, 0.2)]).unwrap(),
                2 => Domain::ball(vec![0.2, -0.4], 1.3).unwrap(),
                3 => Domain::generic(vec![(-1.0, 1.0); 2], disk_rule()).unwrap(),
                _ => diamond(),
            };
            let d = base.dim();
            let scaled = base.dilate(r).unwrap();
            for xi in &samples {
                let xi = &xi[..d];
                let shrunk: Vec<f64> = xi.iter().map(|v| v / r).collect();
                prop_assert_eq!(scaled.contains(xi).unwrap(), base.contains(&shrunk).unwrap());
            }
            let (m0, m1) = (base.measure().unwrap(), scaled.measure().unwrap());
            let rel = (m1 - r.powi(d as i32) * m0).abs() / (r.powi(d as i32) * m0);
            let tol = if base.is_generic() { 1e-5 } else { 1e-12 };
            prop_assert!(rel <= tol, "measure ratio off by {:e}", rel);
            Ok(())
        }),
    )
}

fn gaussian_bump() -> Window {
    // (2/π)^{1/4} e^{−u²} in one variable, normalised product in general
    Window::Custom {
        rule: Arc::new(|u: &[f64]| u.iter().map(|v| (2.0 / PI).powf(0.25) * (-v * v).exp()).product()),
        reach: 7.0,
    }
}

/// `A = I` gives `e^{i(x−x₀)·ξ}θ(x−x₀)`; `A = 2^{−j}I`, `ξ = 0` gives
/// `2^{−jd/2}θ(2^{−j}x − k)`; both pointwise to `1e−12`.
pub fn wave_packet_degeneration(cases: u32) -> Result<(), String> {
    let strategy = (
        1usize..=3,
        any::<bool>(),
        prop::collection::vec(-3.0f64..3.0, 9),
        -3i32..=3,
        prop::collection::vec(-4i64..=4, 3),
    );
    report(
        "wave packet degeneration",
        runner(cases).run(&strategy, |(d, custom, v, j, k)| {
            let theta = if custom { gaussian_bump() } else { Window::Gaussian };
            let x0 = v[0..d].to_vec();
            let xi = v[3..3 + d].to_vec();
            let x = &v[6..6 + d];
            let gabor = WavePacketAtom::gabor(theta.clone(), x0.clone(), xi.clone()).unwrap();
            let u: Vec<f64> = x.iter().zip(&x0).map(|(a, b)| a - b).collect();
            let phase: f64 = u.iter().zip(&xi).map(|(a, b)| a * b).sum();
            let direct = Complex64::from_polar(theta.eval(&u), phase);
            let got = gabor.eval_at(x).unwrap();
            prop_assert!((got - direct).norm() <= 1e-12, "Gabor {} vs {}", got, direct);

            let k = &k[..d];
            let wave = WavePacketAtom::wavelet(theta.clone(), j, k).unwrap();
            let s = 2f64.powi(-j);
            let arg: Vec<f64> = x.iter().zip(k).map(|(a, &b)| s * a - b as f64).collect();
            let direct = s.powf(d as f64 / 2.0) * theta.eval(&arg);
            let got = wave.eval_at(x).unwrap();
            prop_assert!((got - Complex64::new(direct, 0.0)).norm() <= 1e-12, "wavelet {} vs {}", got, direct);
            Ok(())
        }),
    )
}

/// `‖g‖ = 1` within `1e−9` for random invertible `A`, `d ≤ 2`.
pub fn wave_packet_unit_norm(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=2, prop::collection::vec(-2.0f64..2.0, 4), prop::collection::vec(-3.0f64..3.0, 4));
    report(
        "wave packet unit norm",
        runner(cases).run(&strategy, |(d, a, shift)| {
            let a = if d == 1 { vec![a[0]] } else { a };
            let det = if d == 1 { a[0] } else { a[0] * a[3] - a[1] * a[2] };
            prop_assume!(det.abs() >= 0.3);
            let g = WavePacketAtom::new(Window::Gaussian, a.clone(), shift[..d].to_vec(), shift[2..2 + d].to_vec()).unwrap();
            let norm2 = integrate_norm(&g, &a, det);
            prop_assert!((norm2 - 1.0).abs() <= 1e-9, "‖g‖² = {}", norm2);
            Ok(())
        }),
    )
}

fn integrate_norm(g: &WavePacketAtom, a: &[f64], det: f64) -> f64 {
    let reach = 9.0;
    let d = g.dim();
    let rule = GaussLegendre::<f64>::new(16);
    // support of θ(A(x − x₀)) sits inside x₀ + A^{-1}(reach ball)
    let inv: Vec<f64> = if d == 1 {
        vec![1.0 / a[0]]
    } else {
        vec![a[3] / det, -a[1] / det, -a[2] / det, a[0] / det]
    };
    let half: Vec<f64> = (0..d)
        .map(|i| reach * (0..d).map(|j| inv[i * d + j].powi(2)).sum::<f64>().sqrt())
        .collect();
    let x0 = g.translation();
    let axes: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|i| rule.composite(x0[i] - half[i], x0[i] + half[i], 48))
        .collect();
    if d == 1 {
        axes[0].iter().map(|&(x, w)| w * g.eval_at(&[x]).unwrap().norm_sqr()).sum()
    } else {
        axes[0]
            .iter()
            .map(|&(x, wx)| {
                axes[1]
                    .iter()
                    .map(|&(y, wy)| wx * wy * g.eval_at(&[x, y]).unwrap().norm_sqr())
                    .sum::<f64>()
            })
            .sum()
    }
}

/// The invariant suite of the acceptance runner.
pub fn invariant_suite() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("trace identity", trace_identity(24)),
        ("kernel PSD", kernel_psd(32)),
        ("kernel evenness/convention", kernel_evenness_and_convention(24)),
        ("dilation/measure scaling", dilation_scaling(16)),
        ("wave packet degeneration", wave_packet_degeneration(256)),
        ("wave packet unit norm", wave_packet_unit_norm(24)),
    ]
}
