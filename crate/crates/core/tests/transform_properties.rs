use oscilla::density::Breakpoint;
use oscilla::{closed_form, eval, Density, TransformKind};
use proptest::prelude::*;

fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn samples() -> Vec<Density> {
    vec![
        Density::beta(0.5, 2.0).unwrap(),
        Density::beta(3.0, 0.5).unwrap(),
        Density::beta(0.2, 0.3).unwrap(),
        Density::kuttner(2.5, 0.7).unwrap(),
        Density::power(0.5).unwrap(),
        Density::gegenbauer(0.0).unwrap(),
        Density::piecewise_constant(&[Breakpoint::Rational(1, 3), Breakpoint::Float(0.71)], &[3.0, 1.0, 2.0]).unwrap(),
    ]
}

#[test]
fn reflected_transforms_obey_the_rotation_identity() {
    let tol = 1e-10;
    for d in samples() {
        for x in log_grid(25, 1e-2, 100.0) {
            let u = eval(&d, TransformKind::Cosine, x, tol).unwrap().value;
            let v = eval(&d, TransformKind::Sine, x, tol).unwrap().value;
            let us = eval(&d, TransformKind::CosineReflected, x, tol).unwrap().value;
            let vs = eval(&d, TransformKind::SineReflected, x, tol).unwrap().value;
            let (s, c) = x.sin_cos();
            assert!((us - (c * u + s * v)).abs() <= 10.0 * tol, "{} at {x}", d.label());
            assert!((vs - (s * u - c * v)).abs() <= 10.0 * tol, "{} at {x}", d.label());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn scaling_is_linear(c in 0.1f64..10.0, x in 0.1f64..60.0) {
        let d = Density::piecewise_constant(&[Breakpoint::Float(0.4)], &[1.0, 2.5]).unwrap();
        let dc = d.scaled(c).unwrap();
        for kind in [TransformKind::Cosine, TransformKind::Sine] {
            let a = eval(&d, kind, x, 1e-12).unwrap().value;
            let b = eval(&dc, kind, x, 1e-12).unwrap().value;
            prop_assert!((b - c * a).abs() <= 1e-13 * c.max(1.0));
        }
    }
}

#[test]
fn quadrature_agrees_with_every_closed_form() {
    let densities = [
        Density::uniform(),
        Density::kuttner(2.0, 1.0).unwrap(),
        Density::beta(1.0, 2.0).unwrap(),
        Density::beta(2.0, 1.0).unwrap(),
        Density::piecewise_constant(&[Breakpoint::Rational(1, 2)], &[1.0, 3.0]).unwrap(),
    ];
    let mut checked = 0;
    for d in &densities {
        for kind in TransformKind::ALL {
            for x in log_grid(40, 1e-3, 100.0) {
                if let Some(exact) = closed_form(d, kind, x) {
                    let q = eval(d, kind, x, 1e-12).unwrap().value;
                    assert!((q - exact.value).abs() <= 1e-10, "{} {kind} at {x}", d.label());
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 500, "only {checked} closed-form points");
}

#[test]
fn small_argument_limits_of_beta() {
    let x = 1e-4;
    for &(a, b) in &[(0.5, 2.0), (3.0, 0.5), (1.5, 1.5), (0.3, 0.8)] {
        let d = Density::beta(a, b).unwrap();
        let u = eval(&d, TransformKind::Cosine, x, 1e-12).unwrap().value;
        let v = eval(&d, TransformKind::Sine, x, 1e-12).unwrap().value;
        assert!((u - 1.0).abs() <= 1e-6, "({a},{b}) U = {u}");
        assert!((v / x - b / (a + b)).abs() <= 1e-6, "({a},{b}) V/x = {}", v / x);
    }
}

/// Midpoint rule after `t = 1 - u²`, which removes the `(1-t)^(-1/2)` factor.
fn beta_half_two_sine_midpoint(x: f64) -> f64 {
    let n = 1_000_000;
    let h = 1.0 / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let u = (i as f64 + 0.5) * h;
        let t = 1.0 - u * u;
        // f(t) dt = (3/4) t (1-t)^(-1/2) · 2u du
        sum += 1.5 * t * (x * t).sin();
    }
    sum * h
}

#[test]
fn beta_half_two_sine_matches_midpoint_oracle() {
    let d = Density::beta(0.5, 2.0).unwrap();
    let v = eval(&d, TransformKind::Sine, 1.0, 1e-12).unwrap().value;
    assert!((v - beta_half_two_sine_midpoint(1.0)).abs() <= 1e-8);
}

#[test]
fn cosine_transform_decays_like_the_endpoint_jump() {
    // f(1-) = 2 for beta(1, 2) = 2t.
    let d = Density::beta(1.0, 2.0).unwrap();
    let mut worst = 0.0f64;
    for x in log_grid(60, 50.0, 500.0) {
        let u = eval(&d, TransformKind::Cosine, x, 1e-12).unwrap().value;
        worst = worst.max((u - 2.0 * x.sin() / x).abs() * x * x);
    }
    assert!(worst <= 4.0, "x² |U - f(1-) sin x / x| reaches {worst}");
}
