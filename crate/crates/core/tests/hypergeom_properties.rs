use num_rational::BigRational;
use oscilla::hypergeom::{hyp_pfq, HypSpec};
use oscilla::{eval, Density, TransformKind};

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

#[test]
fn series_matches_exact_pochhammer_sum() {
    // ₂F₃(1, 2; 3, 4, 5; -1/4): 20 terms as Pochhammer quotients in exact
    // rationals, each term built from scratch rather than by recurrence.
    let (a, b) = ([1.0, 2.0], [3.0, 4.0, 5.0]);
    let z = exact(-0.25);
    let poch = |p: f64, n: usize| (0..n).fold(exact(1.0), |acc, i| acc * exact(p + i as f64));
    let mut sum = exact(0.0);
    let mut zn = exact(1.0);
    for n in 0..20usize {
        let num = a.iter().fold(exact(1.0), |acc, &p| acc * poch(p, n));
        let den = b.iter().fold(poch(1.0, n), |acc, &q| acc * poch(q, n));
        sum += num / den * zn.clone();
        zn *= z.clone();
    }
    let spec = HypSpec::new(&a, &b, -0.25);
    let v = hyp_pfq(&spec, 1e-15).unwrap().value;
    let diff = sum - exact(v);
    let eps = exact(1e-15);
    assert!(diff <= eps && -diff <= eps, "{v}");
}

/// `∫_0^1 t^(-a) sin xt dt` for `1 <= a < 2` via `t = u²`:
/// `2x ∫_0^1 u^(1-2a) · u² sinc(x u²) du`, by composite Simpson.
fn singular_sine_integral(a: f64, x: f64) -> f64 {
    let n = 200_000;
    let h = 1.0 / n as f64;
    let g = |u: f64| {
        if u == 0.0 {
            return if a == 1.5 { 2.0 * x } else { 0.0 };
        }
        let w = x * u * u;
        2.0 * x * u.powf(3.0 - 2.0 * a) * (w.sin() / w)
    };
    let mut s = g(0.0) + g(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn generalized_sine_integral_identity() {
    for &a in &[0.25, 0.5, 0.75, 1.5] {
        for &x in &[0.3, 2.0, 9.5, 25.0, 40.0] {
            let f = hyp_pfq(
                &HypSpec::new(&[(2.0 - a) / 2.0], &[1.5, (4.0 - a) / 2.0], -x * x / 4.0),
                1e-14,
            )
            .unwrap()
            .value;
            let lhs = x.powf(2.0 - a) / (2.0 - a) * f;
            let v = if a < 1.0 {
                eval(&Density::power(a).unwrap(), TransformKind::Sine, x, 1e-12)
                    .unwrap()
                    .value
            } else {
                singular_sine_integral(a, x)
            };
            let rhs = x.powf(1.0 - a) * v;
            assert!((lhs - rhs).abs() <= 1e-8, "a = {a}, x = {x}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn generalized_cosine_integral_identity() {
    for &a in &[1.0 / 3.0, 0.5, 0.75, 0.9] {
        for &x in &[0.3, 2.0, 9.5, 25.0, 40.0] {
            let f = hyp_pfq(
                &HypSpec::new(&[(1.0 - a) / 2.0], &[0.5, (3.0 - a) / 2.0], -x * x / 4.0),
                1e-14,
            )
            .unwrap()
            .value;
            let lhs = x.powf(1.0 - a) / (1.0 - a) * f;
            let u = eval(&Density::power(a).unwrap(), TransformKind::Cosine, x, 1e-12)
                .unwrap()
                .value;
            let rhs = x.powf(1.0 - a) * u;
            assert!((lhs - rhs).abs() <= 1e-8, "a = {a}, x = {x}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn power_transforms_are_positive() {
    for &a in &[1.0 / 3.0, 0.5, 0.9] {
        let d = Density::power(a).unwrap();
        for j in 1..=2000 {
            let x = j as f64 * 0.05;
            assert!(
                eval(&d, TransformKind::Cosine, x, 1e-12).unwrap().value > 0.0,
                "U, a = {a}, x = {x}"
            );
        }
    }
    for &a in &[0.25, 0.5, 0.75] {
        let d = Density::power(a).unwrap();
        for j in 1..=2000 {
            let x = j as f64 * 0.05;
            assert!(
                eval(&d, TransformKind::Sine, x, 1e-12).unwrap().value > 0.0,
                "V, a = {a}, x = {x}"
            );
        }
    }
}
