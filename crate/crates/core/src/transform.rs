//! Evaluation of the finite Fourier transforms of a density.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::quad;

/// Default absolute tolerance of transform evaluations.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Which transform to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// `U(x) = ∫ f(t) cos xt dt`
    Cosine,
    /// `V(x) = ∫ f(t) sin xt dt`
    Sine,
    /// `U'(x) = -∫ t f(t) sin xt dt`
    DCosine,
    /// `V'(x) = ∫ t f(t) cos xt dt`
    DSine,
    /// `U_s(x) = ∫ f(1-t) cos xt dt`
    CosineReflected,
    /// `V_s(x) = ∫ f(1-t) sin xt dt`
    SineReflected,
}

impl TransformKind {
    pub const ALL: [TransformKind; 6] = [
        TransformKind::Cosine,
        TransformKind::Sine,
        TransformKind::DCosine,
        TransformKind::DSine,
        TransformKind::CosineReflected,
        TransformKind::SineReflected,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            TransformKind::Cosine => "cosine",
            TransformKind::Sine => "sine",
            TransformKind::DCosine => "d_cosine",
            TransformKind::DSine => "d_sine",
            TransformKind::CosineReflected => "cosine_reflected",
            TransformKind::SineReflected => "sine_reflected",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformKind::ALL
            .iter()
            .copied()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::Argument(format!("unknown transform kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    ClosedForm,
    Series,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::Series => "series",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: Method,
}

/// Accepted tolerances lie in `[1e-14, 1e-3]`.
pub fn check_tol(tol: f64) -> Result<()> {
    if (1e-14..=1e-3).contains(&tol) {
        Ok(())
    } else {
        Err(Error::ToleranceRange(tol))
    }
}

#[derive(Clone, Copy)]
enum Kernel {
    Cos,
    Sin,
}

/// `∫ w(t) f(t) k(xt) dt` with `w = t` when `weighted`, `f` replaced by
/// `f(1-t)` when `reflected`.
fn integrate(
    d: &Density,
    kernel: Kernel,
    weighted: bool,
    reflected: bool,
    x: f64,
    target: f64,
) -> Result<quad::QuadOutcome> {
    let mut breaks = d.breakpoints();
    if reflected {
        breaks = breaks.iter().rev().map(|b| 1.0 - b).collect();
    }
    let rest = |t: f64| {
        let w = if weighted { t } else { 1.0 };
        let k = match kernel {
            Kernel::Cos => (x * t).cos(),
            Kernel::Sin => (x * t).sin(),
        };
        w * k
    };
    let g = |t: f64, s: f64| {
        let f = if reflected { d.value_at(s, t) } else { d.value_at(t, s) };
        f * rest(t)
    };
    // Singular ends of the integrand in the t variable.
    let (mut e0, mut e1) = d.singular_exponents();
    if reflected {
        std::mem::swap(&mut e0, &mut e1);
    }
    let reg_left = |t: f64, s: f64| {
        let f = if reflected {
            d.regular_part(s, t, false)
        } else {
            d.regular_part(t, s, true)
        };
        f * rest(t)
    };
    let reg_right = |t: f64, s: f64| {
        let f = if reflected {
            d.regular_part(s, t, true)
        } else {
            d.regular_part(t, s, false)
        };
        f * rest(t)
    };
    let left = (e0 < 0.0).then_some(quad::EndpointSingularity {
        exponent: e0,
        regular: &reg_left,
    });
    let right = (e1 < 0.0).then_some(quad::EndpointSingularity {
        exponent: e1,
        regular: &reg_right,
    });
    quad::integrate_unit_with_ends(&g, left, right, x, &breaks, target)
}

fn quadrature(d: &Density, kind: TransformKind, x: f64, tol: f64) -> Result<EvalResult> {
    let target = 0.1 * tol;
    let (out, sign) = match kind {
        TransformKind::Cosine => (integrate(d, Kernel::Cos, false, false, x, target)?, 1.0),
        TransformKind::Sine => (integrate(d, Kernel::Sin, false, false, x, target)?, 1.0),
        TransformKind::DCosine => (integrate(d, Kernel::Sin, true, false, x, target)?, -1.0),
        TransformKind::DSine => (integrate(d, Kernel::Cos, true, false, x, target)?, 1.0),
        TransformKind::CosineReflected => (integrate(d, Kernel::Cos, false, true, x, target)?, 1.0),
        TransformKind::SineReflected => (integrate(d, Kernel::Sin, false, true, x, target)?, 1.0),
    };
    Ok(EvalResult {
        value: sign * out.value,
        abs_error_estimate: out.error,
        method: Method::Quadrature,
    })
}

/// Evaluate a transform of `d` at `x >= 0` to absolute tolerance `tol`.
///
/// Reflected kinds are computed by direct quadrature of `f(1-t)` and
/// cross-checked against `U_s = cos x U + sin x V`, `V_s = sin x U - cos x V`;
/// a discrepancy above `10 tol` is reported as a consistency error.
pub fn eval(d: &Density, kind: TransformKind, x: f64, tol: f64) -> Result<EvalResult> {
    check_tol(tol)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Argument(format!("x = {x} must be finite and nonnegative")));
    }
    if x == 0.0
        && matches!(
            kind,
            TransformKind::Sine | TransformKind::SineReflected | TransformKind::DCosine
        )
    {
        return Ok(EvalResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            method: Method::ClosedForm,
        });
    }
    let direct = quadrature(d, kind, x, tol)?;
    if matches!(kind, TransformKind::CosineReflected | TransformKind::SineReflected) {
        let u = quadrature(d, TransformKind::Cosine, x, tol)?;
        let v = quadrature(d, TransformKind::Sine, x, tol)?;
        let (sin, cos) = x.sin_cos();
        let identity = match kind {
            TransformKind::CosineReflected => cos * u.value + sin * v.value,
            _ => sin * u.value - cos * v.value,
        };
        let discrepancy = (identity - direct.value).abs();
        if discrepancy > 10.0 * tol {
            return Err(Error::Consistency { x, discrepancy });
        }
    }
    Ok(direct)
}

/// `∫_0^1 t^m f(t) dt` by quadrature.
pub fn moment(d: &Density, m: u32, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let g = |t: f64, s: f64| d.value_at(t, s) * t.powi(m as i32);
    Ok(quad::integrate_unit(&g, 0.0, &d.breakpoints(), 0.1 * tol)?.value)
}

const TAYLOR_SWITCH: f64 = 4.0;
const MAX_CLOSED_FORM_DEGREE: usize = 8;

/// `I_j(x) = ∫_0^1 t^j e^{ixt} dt` for `j = 0..=n`.
fn unit_moments(x: f64, n: usize) -> Vec<Complex64> {
    if x.abs() <= TAYLOR_SWITCH {
        (0..=n)
            .map(|j| {
                // sum_m (ix)^m / (m! (m + j + 1))
                let mut term = Complex64::new(1.0, 0.0);
                let mut acc = Complex64::new(1.0 / (j as f64 + 1.0), 0.0);
                for m in 1..200 {
                    term *= Complex64::new(0.0, x / m as f64);
                    let add = term / (m + j + 1) as f64;
                    acc += add;
                    if add.norm() < 1e-18 * acc.norm().max(1e-300) {
                        break;
                    }
                }
                acc
            })
            .collect()
    } else {
        let (sin, cos) = x.sin_cos();
        let e = Complex64::new(cos, sin);
        let ix = Complex64::new(0.0, x);
        let half = 0.5 * x;
        let one_minus_cos = 2.0 * half.sin() * half.sin();
        let mut out = Vec::with_capacity(n + 1);
        out.push(Complex64::new(sin / x, one_minus_cos / x));
        for j in 1..=n {
            let prev = out[j - 1];
            out.push((e - prev * j as f64) / ix);
        }
        out
    }
}

fn combine(kind: TransformKind, z0: Complex64, z1: Complex64) -> f64 {
    match kind {
        TransformKind::Cosine | TransformKind::CosineReflected => z0.re,
        TransformKind::Sine | TransformKind::SineReflected => z0.im,
        TransformKind::DCosine => -z1.im,
        TransformKind::DSine => z1.re,
    }
}

/// Analytic value of a transform when the density is a low-degree
/// polynomial (uniform, linear and integer-parameter beta, integer
/// Kuttner, `a - b t^2`, integer-exponent Gegenbauer) or piecewise constant.
pub fn closed_form(d: &Density, kind: TransformKind, x: f64) -> Option<EvalResult> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let reflected_kind = matches!(kind, TransformKind::CosineReflected | TransformKind::SineReflected);
    if let Some(mut coeffs) = d.polynomial_coefficients() {
        if coeffs.len() > MAX_CLOSED_FORM_DEGREE + 1 {
            return None;
        }
        if reflected_kind {
            coeffs = crate::density::compose_one_minus(&coeffs);
        }
        let moments = unit_moments(x, coeffs.len());
        let mut z0 = Complex64::new(0.0, 0.0);
        let mut z1 = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (j, c) in coeffs.iter().enumerate() {
            z0 += moments[j] * *c;
            z1 += moments[j + 1] * *c;
            scale += c.abs();
        }
        return Some(EvalResult {
            value: combine(kind, z0, z1),
            abs_error_estimate: 16.0 * f64::EPSILON * scale,
            method: Method::ClosedForm,
        });
    }
    if let Some(mut pieces) = d.pieces() {
        if reflected_kind {
            pieces = pieces
                .into_iter()
                .rev()
                .map(|(a, b, l)| (1.0 - b, 1.0 - a, l))
                .collect();
        }
        // ∫_a^b t^m e^{ixt} dt = b^{m+1} I_m(xb) - a^{m+1} I_m(xa)
        let partial = |end: f64| -> (Complex64, Complex64) {
            if end == 0.0 {
                return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            }
            let m = unit_moments(x * end, 1);
            (m[0] * end, m[1] * end * end)
        };
        let mut z0 = Complex64::new(0.0, 0.0);
        let mut z1 = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (a, b, l) in pieces {
            let (pa0, pa1) = partial(a);
            let (pb0, pb1) = partial(b);
            z0 += (pb0 - pa0) * l;
            z1 += (pb1 - pa1) * l;
            scale += l;
        }
        return Some(EvalResult {
            value: combine(kind, z0, z1),
            abs_error_estimate: 16.0 * f64::EPSILON * scale,
            method: Method::ClosedForm,
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Breakpoint, Density};
    use std::f64::consts::PI;

    #[test]
    fn uniform_cosine_vanishes_at_pi() {
        let r = eval(&Density::uniform(), TransformKind::Cosine, PI, 1e-12).unwrap();
        assert!(r.value.abs() < 1e-13, "{}", r.value);
        assert!(r.abs_error_estimate >= 0.0);
    }

    #[test]
    fn uniform_derivative_cosine_at_half_pi() {
        // -∫ t sin(pi t / 2) dt = -4/pi^2
        let r = eval(&Density::uniform(), TransformKind::DCosine, PI / 2.0, 1e-12).unwrap();
        assert!((r.value + 4.0 / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn sine_at_zero_is_exact() {
        let d = Density::beta(0.5, 2.0).unwrap();
        assert_eq!(eval(&d, TransformKind::Sine, 0.0, 1e-10).unwrap().value, 0.0);
        let u0 = eval(&d, TransformKind::Cosine, 0.0, 1e-12).unwrap().value;
        assert!((u0 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn tolerance_and_argument_are_validated() {
        let d = Density::uniform();
        assert!(matches!(
            eval(&d, TransformKind::Cosine, 1.0, 1e-2),
            Err(Error::ToleranceRange(_))
        ));
        assert!(matches!(
            eval(&d, TransformKind::Cosine, 1.0, 1e-15),
            Err(Error::ToleranceRange(_))
        ));
        assert!(matches!(
            eval(&d, TransformKind::Cosine, -1.0, 1e-10),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn closed_form_table() {
        let k = Density::kuttner(2.0, 1.0).unwrap();
        let c = closed_form(&k, TransformKind::Cosine, 2.0).unwrap();
        let expected = (2.0 * 2f64.sin() - 4.0 * 2f64.cos()) / 8.0;
        assert!((c.value - expected).abs() < 1e-15);
        assert_eq!(c.method, Method::ClosedForm);

        let u = closed_form(&Density::uniform(), TransformKind::Sine, 3.0).unwrap();
        assert!((u.value - (1.0 - 3f64.cos()) / 3.0).abs() < 1e-15);

        assert!(closed_form(&Density::beta(0.5, 2.0).unwrap(), TransformKind::Cosine, 1.0).is_none());
    }

    #[test]
    fn closed_form_of_a_minus_b_t_squared() {
        let (a, b) = (3.0, 2.0);
        let d = Density::polynomial(&[a, 0.0, -b]).unwrap();
        for &x in &[0.5, 3.0, 17.0] {
            let exact = (((a - b) * x * x + 2.0 * b) * x.sin() - 2.0 * b * x * x.cos()) / (x * x * x);
            let c = closed_form(&d, TransformKind::Cosine, x).unwrap();
            assert!((c.value - exact).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn reflected_piecewise_closed_form_matches_quadrature() {
        let d = Density::piecewise_constant(&[Breakpoint::Float(0.3)], &[2.0, 1.0]).unwrap();
        for kind in TransformKind::ALL {
            for &x in &[0.7, 5.0, 31.0] {
                let c = closed_form(&d, kind, x).unwrap().value;
                let q = eval(&d, kind, x, 1e-12).unwrap().value;
                assert!((c - q).abs() < 1e-11, "{kind} x={x}: {c} vs {q}");
            }
        }
    }

    #[test]
    fn reflected_kinds_agree_with_identity() {
        let d = Density::beta(0.5, 2.0).unwrap();
        for &x in &[0.3, 4.0, 40.0] {
            let us = eval(&d, TransformKind::CosineReflected, x, 1e-10).unwrap();
            let r = eval(&Density::beta(2.0, 0.5).unwrap(), TransformKind::Cosine, x, 1e-10).unwrap();
            assert!((us.value - r.value).abs() < 1e-9);
        }
    }
}
