//! Kuttner, Lommel, Williamson and Steinerberger tables.

use std::f64::consts::PI;

use serde::Serialize;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::hypergeom::{sine_power_series, SERIES_X_MAX};
use crate::quad::integrate_unit;
use crate::transform::{check_tol, eval, TransformKind};
use crate::zeros::{Endpoint, Expectation, IntervalFamily, Prediction, SignClaim};

fn windows(rule: &str, k_max: u32, lo: (f64, f64), hi: Endpoint) -> Prediction {
    Prediction::new(rule, k_max)
        .with_item(IntervalFamily::new(
            Endpoint::pi(lo.0, lo.1),
            hi,
            Expectation::ExactlyOne,
        ))
        .exclusive()
}

/// Predicted zeros of `Ω(x) = ∫ (1 - t^δ)^λ cos xt dt`.
///
/// Returns `None` outside the parameter ranges with a known answer.
pub fn kuttner_predict(delta: f64, lambda: f64, k_max: u32) -> Option<Prediction> {
    if !(delta > 0.0 && lambda > 0.0) {
        return None;
    }
    let pi = PI;
    if delta <= 1.0 && 1.0 <= lambda {
        let claim = if delta == 1.0 && lambda == 1.0 {
            SignClaim::nonnegative()
        } else {
            SignClaim::positive_everywhere()
        };
        return Some(Prediction::new("convex decreasing density vanishing at 1", k_max).with_sign(claim));
    }
    if lambda == 1.0 && delta > 1.0 {
        let base = Prediction::new("positive on the first half-period", k_max).with_sign(SignClaim::positive_upto(pi));
        let p = if delta < 2.0 {
            windows("decreasing concave density", k_max, (1.0, 0.0), Endpoint::pi(1.0, 1.0))
        } else if delta <= 3.0 {
            let mut p = windows(
                "increasing convex negative derivative with zero slope at 0",
                k_max,
                (1.0, 0.0),
                Endpoint::pi(1.0, 0.5),
            );
            if delta == 2.0 {
                // Ω(x) = 2 (sin x - x cos x) / x³ vanishes exactly at σ_k.
                p = p.merge(
                    Prediction::new("tan-equation lattice", k_max)
                        .with_item(IntervalFamily::exact_zero_at(Endpoint::Sigma)),
                );
            }
            p
        } else {
            windows(
                "integrated increasing convex density",
                k_max,
                (1.0, 0.0),
                Endpoint::Sigma,
            )
        };
        return Some(base.merge(p));
    }
    if lambda <= 1.0 && 1.0 <= delta {
        return Some(
            windows("decreasing concave density", k_max, (1.0, 0.0), Endpoint::pi(1.0, 1.0))
                .with_sign(SignClaim::positive_upto(pi)),
        );
    }
    None
}

/// Lommel function `s_{μ,1/2}(x) = x^(μ+1)/(μ+1/2) ∫ (1-t)^(μ+1/2) cos xt dt`.
pub fn lommel_function(mu: f64, x: f64, tol: f64) -> Result<f64> {
    check_lommel(mu)?;
    let alpha = mu + 1.5;
    let d = Density::beta(alpha, 1.0)?;
    // The beta(α, 1) density is α (1-t)^(α-1).
    let phi = eval(&d, TransformKind::Cosine, x, tol)?.value;
    Ok(x.powf(mu + 1.0) / ((mu + 0.5) * alpha) * phi)
}

fn check_lommel(mu: f64) -> Result<()> {
    if !(mu > -1.5) || mu == -0.5 || mu == 0.5 || !mu.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            bound: "mu > -3/2 and mu != ±1/2",
        });
    }
    Ok(())
}

/// Zero pattern of `s_{μ,1/2}` by the four-case table.
pub fn lommel_predict(mu: f64, k_max: u32) -> Result<Prediction> {
    check_lommel(mu)?;
    let p = if mu <= -5.0 / 6.0 {
        windows(
            "Lommel table, lower half windows",
            k_max,
            (1.0, -0.5),
            Endpoint::pi(1.0, 0.0),
        )
    } else if mu < -0.5 {
        windows(
            "Lommel table, centered windows",
            k_max,
            (1.0, -0.5),
            Endpoint::pi(1.0, 0.5),
        )
    } else if mu <= 1.0 / 6.0 {
        windows(
            "Lommel table, upper half windows",
            k_max,
            (1.0, 0.0),
            Endpoint::pi(1.0, 0.5),
        )
    } else if mu < 0.5 {
        windows("Lommel table, full windows", k_max, (1.0, 0.0), Endpoint::pi(1.0, 1.0))
    } else {
        Prediction::new("Lommel table, positivity", k_max).with_sign(SignClaim::positive_everywhere())
    };
    Ok(p)
}

/// `Ψ_α(x) = ∫ (1-t)^(α-1) t sin xt dt`, the sine transform of beta(α, 2)
/// up to a positive factor.
pub fn williamson_psi(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    let d = Density::beta(alpha, 2.0)?;
    Ok(eval(&d, TransformKind::Sine, x, tol)?.value)
}

/// Williamson's function: zero pattern, sign change, or positivity.
pub fn williamson_predict(alpha: f64, k_max: u32) -> Result<Prediction> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            bound: "alpha > 0",
        });
    }
    Ok(if alpha <= 1.0 {
        windows(
            "Williamson table, upper half windows",
            k_max,
            (1.0, 0.0),
            Endpoint::pi(1.0, 0.5),
        )
    } else if alpha <= 1.5 {
        windows(
            "Williamson table, full windows",
            k_max,
            (1.0, 0.0),
            Endpoint::pi(1.0, 1.0),
        )
    } else if alpha < 3.0 {
        Prediction::new("Williamson table, sign change", k_max).with_sign_change()
    } else {
        Prediction::new("Williamson table, positivity", k_max).with_sign(SignClaim::positive_everywhere())
    })
}

fn check_steinerberger(beta: f64) -> Result<()> {
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            bound: "beta > -1",
        });
    }
    Ok(())
}

/// `S_β(x) = (1+β)/x ∫ t^(β-1) sin xt dt`: series up to the series regime,
/// quadrature beyond.
pub fn steinerberger_value(beta: f64, x: f64, tol: f64) -> Result<f64> {
    check_steinerberger(beta)?;
    check_tol(tol)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Argument(format!("x = {x} must be positive")));
    }
    if x <= SERIES_X_MAX {
        return Ok(sine_power_series(beta, x)?.value);
    }
    let pre = (1.0 + beta) / x;
    let out = integrate_unit(&steinerberger_integrand(beta, x), x, &[], 0.1 * tol / pre)?;
    Ok(pre * out.value)
}

/// `t^(β-1) sin xt` written as `x t^β sinc(xt)`, finite for `β > -1`
/// down to the smallest nodes.
fn steinerberger_integrand(beta: f64, x: f64) -> impl Fn(f64, f64) -> f64 {
    move |t: f64, _s: f64| {
        let u = x * t;
        let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
        x * t.powf(beta) * sinc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignVerdict {
    Positive,
    Negative,
    Indeterminate,
}

impl SignVerdict {
    pub fn symbol(&self) -> char {
        match self {
            SignVerdict::Positive => '+',
            SignVerdict::Negative => '-',
            SignVerdict::Indeterminate => '?',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteinerbergerTerm {
    pub k: u32,
    pub x: f64,
    pub value: f64,
    pub sign: SignVerdict,
}

/// `a_k = S_β((k - 1/2)π)` for `k = 1..=k_max`, with a sign only when
/// `|a_k| >= 10 tol`.
pub fn steinerberger_signs(beta: f64, k_max: u32, tol: f64) -> Result<Vec<SteinerbergerTerm>> {
    check_steinerberger(beta)?;
    if k_max == 0 {
        return Err(Error::Argument("k_max must be at least 1".into()));
    }
    (1..=k_max)
        .map(|k| {
            let x = (k as f64 - 0.5) * PI;
            let value = steinerberger_value(beta, x, tol)?;
            let sign = if value.abs() < 10.0 * tol {
                SignVerdict::Indeterminate
            } else if value > 0.0 {
                SignVerdict::Positive
            } else {
                SignVerdict::Negative
            };
            Ok(SteinerbergerTerm { k, x, value, sign })
        })
        .collect()
}

/// Expected sign of `a_k`; `None` where the answer is open.
pub fn steinerberger_predict(beta: f64, k: u32) -> Result<Option<SignVerdict>> {
    check_steinerberger(beta)?;
    Ok(if beta >= 2.0 {
        Some(if k % 2 == 1 {
            SignVerdict::Positive
        } else {
            SignVerdict::Negative
        })
    } else if beta <= 5.0 / 3.0 {
        Some(SignVerdict::Positive)
    } else {
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steinerberger_two_closed_form() {
        for k in 1..=20u32 {
            let x = (k as f64 - 0.5) * PI;
            let exact = 3.0 * (x.sin() - x * x.cos()) / (x * x * x);
            let v = steinerberger_value(2.0, x, 1e-12).unwrap();
            assert!((v - exact).abs() < 1e-12, "k = {k}: {v} vs {exact}");
        }
    }

    #[test]
    fn steinerberger_regimes_agree_at_the_seam() {
        for &beta in &[-0.5, 0.3, 1.0, 5.0 / 3.0, 3.0] {
            let x = SERIES_X_MAX;
            let series = sine_power_series(beta, x).unwrap().value;
            let pre = (1.0 + beta) / x;
            let quad = pre
                * integrate_unit(&steinerberger_integrand(beta, x), x, &[], 1e-14)
                    .unwrap()
                    .value;
            assert!((series - quad).abs() < 1e-11, "beta = {beta}");
        }
    }

    #[test]
    fn lommel_rejects_half_integers() {
        assert!(lommel_predict(0.5, 5).is_err());
        assert!(lommel_predict(-0.5, 5).is_err());
        assert!(lommel_predict(-1.5, 5).is_err());
    }

    #[test]
    fn kuttner_cases() {
        assert!(kuttner_predict(0.5, 1.0, 5).unwrap().sign_claims[0].strict);
        assert!(!kuttner_predict(1.0, 1.0, 5).unwrap().sign_claims[0].strict);
        assert!(kuttner_predict(0.5, 0.5, 5).is_none());
        let p = kuttner_predict(4.0, 1.0, 5).unwrap();
        assert!(p.items.iter().any(|i| i.hi == Endpoint::Sigma));
    }
}
