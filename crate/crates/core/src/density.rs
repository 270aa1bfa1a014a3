//! Positive densities on (0, 1) with declared analytic shape metadata.
//!
//! Every density is evaluated through [`Density::value_at`], which takes both
//! `t` and its complement `1 - t`; the quadrature layer supplies the
//! complement exactly so that singular factors `(1 - t)^p` stay accurate
//! arbitrarily close to `t = 1`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;

/// Named density families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `(1-t)^(alpha-1) t^(beta-1) / B(alpha, beta)`
    Beta,
    /// `(1 - t^delta)^lambda`
    Kuttner,
    /// `t^(-a)`, `0 < a < 1`
    Power,
    /// `(1 - t^2)^(nu - 1/2)`
    Gegenbauer,
    PiecewiseConstant,
    /// `sum c_j t^j`
    Polynomial,
    Custom,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Beta => "beta",
            Family::Kuttner => "kuttner",
            Family::Power => "power",
            Family::Gegenbauer => "gegenbauer",
            Family::PiecewiseConstant => "piecewise",
            Family::Polynomial => "poly",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    Neither,
}

/// `Linear` covers affine functions, which are both convex and concave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convexity {
    Convex,
    Concave,
    Linear,
    Neither,
}

impl Convexity {
    pub fn is_convex(self) -> bool {
        matches!(self, Convexity::Convex | Convexity::Linear)
    }

    pub fn is_concave(self) -> bool {
        matches!(self, Convexity::Concave | Convexity::Linear)
    }
}

/// Analytic shape of a density (or of its negated derivative).
///
/// Endpoint limits are extended reals: `f64::INFINITY` encodes `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeReport {
    pub monotonicity: Monotonicity,
    pub convexity: Convexity,
    /// False for step functions constant between rational breakpoints.
    pub general_case: bool,
    /// `f(0+)`
    pub f_at_0: f64,
    /// `f(1-)`, the constant `M` in the sharpened one-zero-per-period bounds.
    pub f_at_1: f64,
    /// `-f'(0+)` when it exists as a nonnegative extended real (the constant `L`).
    pub neg_deriv_at_0: Option<f64>,
    /// Shape of `-f'`, when known.
    pub deriv_shape: Option<Box<ShapeReport>>,
    pub numerically_inferred: bool,
    pub low_confidence: bool,
}

impl ShapeReport {
    fn closed_form(monotonicity: Monotonicity, convexity: Convexity, f_at_0: f64, f_at_1: f64) -> Self {
        Self {
            monotonicity,
            convexity,
            general_case: monotonicity != Monotonicity::Constant,
            f_at_0,
            f_at_1,
            neg_deriv_at_0: None,
            deriv_shape: None,
            numerically_inferred: false,
            low_confidence: false,
        }
    }

    fn with_neg_deriv(mut self, l: Option<f64>) -> Self {
        self.neg_deriv_at_0 = l.filter(|v| *v >= 0.0);
        self
    }

    fn with_deriv(mut self, d: ShapeReport) -> Self {
        self.deriv_shape = Some(Box::new(d));
        self
    }

    /// Shape of `f(1 - t)`: monotonicity flips, convexity is preserved,
    /// endpoint values swap. Derivative information at 0 is not carried over.
    pub fn reflected(&self) -> ShapeReport {
        let monotonicity = match self.monotonicity {
            Monotonicity::Increasing => Monotonicity::Decreasing,
            Monotonicity::Decreasing => Monotonicity::Increasing,
            m => m,
        };
        ShapeReport {
            monotonicity,
            convexity: self.convexity,
            general_case: self.general_case,
            f_at_0: self.f_at_1,
            f_at_1: self.f_at_0,
            neg_deriv_at_0: None,
            deriv_shape: None,
            numerically_inferred: self.numerically_inferred,
            low_confidence: self.low_confidence,
        }
    }

    fn scaled(&self, c: f64) -> ShapeReport {
        ShapeReport {
            f_at_0: self.f_at_0 * c,
            f_at_1: self.f_at_1 * c,
            neg_deriv_at_0: self.neg_deriv_at_0.map(|l| l * c),
            deriv_shape: self.deriv_shape.as_ref().map(|d| Box::new(d.scaled(c))),
            ..self.clone()
        }
    }
}

/// Shape of `coef * t^p` on (0, 1), `coef > 0`.
fn power_of_t_shape(coef: f64, p: f64) -> ShapeReport {
    let mono = if p > 0.0 {
        Monotonicity::Increasing
    } else if p < 0.0 {
        Monotonicity::Decreasing
    } else {
        Monotonicity::Constant
    };
    let conv = if p == 0.0 || p == 1.0 {
        Convexity::Linear
    } else if !(0.0..=1.0).contains(&p) {
        Convexity::Convex
    } else {
        Convexity::Concave
    };
    let f0 = if p > 0.0 {
        0.0
    } else if p < 0.0 {
        f64::INFINITY
    } else {
        coef
    };
    ShapeReport::closed_form(mono, conv, f0, coef)
}

/// Shape of `coef * (1-t)^p` on (0, 1), `coef > 0`.
fn power_of_complement_shape(coef: f64, p: f64) -> ShapeReport {
    power_of_t_shape(coef, p).reflected()
}

/// A breakpoint of a piecewise-constant density. Only exact rationals can
/// put a density in the exceptional case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Breakpoint {
    Rational(i64, i64),
    Float(f64),
}

impl Breakpoint {
    pub fn value(&self) -> f64 {
        match *self {
            Breakpoint::Rational(p, q) => p as f64 / q as f64,
            Breakpoint::Float(v) => v,
        }
    }
}

type CustomFn = dyn Fn(f64) -> f64 + Send + Sync;

enum Form {
    Beta { alpha: f64, beta: f64, norm: f64 },
    Kuttner { delta: f64, lambda: f64 },
    Power { a: f64 },
    Gegenbauer { nu: f64 },
    Piecewise { edges: Vec<f64>, levels: Vec<f64> },
    Polynomial { coeffs: Vec<f64> },
    Custom { f: Arc<CustomFn> },
}

impl Form {
    #[inline]
    fn value(&self, t: f64, s: f64) -> f64 {
        match self {
            Form::Beta { alpha, beta, norm } => norm * s.powf(alpha - 1.0) * t.powf(beta - 1.0),
            Form::Kuttner { delta, lambda } => {
                let ln_t = if t < 0.5 { t.ln() } else { (-s).ln_1p() };
                let base = -(delta * ln_t).exp_m1();
                base.powf(*lambda)
            }
            Form::Power { a } => t.powf(-a),
            Form::Gegenbauer { nu } => {
                let e = nu - 0.5;
                s.powf(e) * (1.0 + t).powf(e)
            }
            Form::Piecewise { edges, levels } => {
                // edges[0] = 0 < edges[1] < ... < edges[n] = 1
                let i = edges.partition_point(|&e| e <= t).clamp(1, levels.len());
                levels[i - 1]
            }
            Form::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Form::Custom { f } => f(t),
        }
    }

    /// Exponents `(e0, e1)` with `f ~ t^e0` at 0 and `f ~ (1-t)^e1` at 1,
    /// reported only where they are negative (singular ends).
    fn singular_exponents(&self) -> (f64, f64) {
        let (e0, e1) = match self {
            Form::Beta { alpha, beta, .. } => (beta - 1.0, alpha - 1.0),
            Form::Power { a } => (-a, 0.0),
            Form::Gegenbauer { nu } => (0.0, nu - 0.5),
            _ => (0.0, 0.0),
        };
        (e0.min(0.0), e1.min(0.0))
    }

    /// `f / dist^e` at the left (`t -> 0`) or right (`s -> 0`) end, for the
    /// exponent returned by `singular_exponents`.
    fn regular_part(&self, t: f64, s: f64, left: bool) -> f64 {
        let (e0, e1) = self.singular_exponents();
        match (self, left) {
            (Form::Beta { alpha, norm, .. }, true) if e0 < 0.0 => norm * s.powf(alpha - 1.0),
            (Form::Beta { beta, norm, .. }, false) if e1 < 0.0 => norm * t.powf(beta - 1.0),
            (Form::Power { .. }, true) if e0 < 0.0 => 1.0,
            (Form::Gegenbauer { nu }, false) if e1 < 0.0 => (1.0 + t).powf(nu - 0.5),
            _ => self.value(t, s),
        }
    }
}

/// An immutable positive density on (0, 1).
#[derive(Clone)]
pub struct Density {
    family: Family,
    params: Vec<f64>,
    form: Arc<Form>,
    reflected: bool,
    scale: f64,
    shape: ShapeReport,
    label: String,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("label", &self.label)
            .field("shape", &self.shape)
            .finish()
    }
}

const VALIDATION_GRID: usize = 1000;

fn bound(name: &'static str, value: f64, ok: bool, bound: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, bound })
    }
}

fn expect_params(family: Family, params: &[f64], n: usize) -> Result<()> {
    if params.len() == n {
        Ok(())
    } else {
        Err(Error::MalformedDensity(format!(
            "{family} takes {n} parameter(s), got {}",
            params.len()
        )))
    }
}

fn fmt_params(params: &[f64]) -> String {
    params.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(",")
}

impl Density {
    /// Build a density from a named family and its parameters.
    ///
    /// Piecewise-constant and custom densities have dedicated constructors.
    pub fn new(family: Family, params: &[f64]) -> Result<Self> {
        match family {
            Family::Beta => {
                expect_params(family, params, 2)?;
                Self::beta(params[0], params[1])
            }
            Family::Kuttner => {
                expect_params(family, params, 2)?;
                Self::kuttner(params[0], params[1])
            }
            Family::Power => {
                expect_params(family, params, 1)?;
                Self::power(params[0])
            }
            Family::Gegenbauer => {
                expect_params(family, params, 1)?;
                Self::gegenbauer(params[0])
            }
            Family::Polynomial => Self::polynomial(params),
            Family::PiecewiseConstant | Family::Custom => Err(Error::MalformedDensity(format!(
                "{family} densities need their dedicated constructor"
            ))),
        }
    }

    pub fn uniform() -> Self {
        Self::beta(1.0, 1.0).expect("uniform density")
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        bound("alpha", alpha, alpha > 0.0, "alpha > 0")?;
        bound("beta", beta, beta > 0.0, "beta > 0")?;
        let norm = inverse_beta_function(alpha, beta);
        let shape = beta_shape(alpha, beta, norm);
        Self::finish(Family::Beta, vec![alpha, beta], Form::Beta { alpha, beta, norm }, shape)
    }

    pub fn kuttner(delta: f64, lambda: f64) -> Result<Self> {
        bound("delta", delta, delta > 0.0, "delta > 0")?;
        bound("lambda", lambda, lambda > 0.0, "lambda > 0")?;
        let convexity = if delta <= 1.0 && lambda >= 1.0 {
            if delta == 1.0 && lambda == 1.0 {
                Convexity::Linear
            } else {
                Convexity::Convex
            }
        } else if lambda <= 1.0 && delta >= 1.0 {
            Convexity::Concave
        } else {
            Convexity::Neither
        };
        // -f'(t) = delta lambda (1 - t^delta)^(lambda-1) t^(delta-1)
        let l = if delta > 1.0 {
            0.0
        } else if delta == 1.0 {
            lambda
        } else {
            f64::INFINITY
        };
        let deriv = if lambda == 1.0 {
            power_of_t_shape(delta, delta - 1.0)
        } else {
            derived_shape_from_convexity(convexity, l, 0.0)
        };
        let shape = ShapeReport::closed_form(Monotonicity::Decreasing, convexity, 1.0, 0.0)
            .with_neg_deriv(Some(l))
            .with_deriv(deriv);
        Self::finish(
            Family::Kuttner,
            vec![delta, lambda],
            Form::Kuttner { delta, lambda },
            shape,
        )
    }

    pub fn power(a: f64) -> Result<Self> {
        if a >= 1.0 {
            return Err(Error::NonIntegrable(format!("t^(-{a}) with a >= 1")));
        }
        bound("a", a, a > 0.0, "0 < a < 1")?;
        let shape = ShapeReport::closed_form(Monotonicity::Decreasing, Convexity::Convex, f64::INFINITY, 1.0)
            .with_neg_deriv(Some(f64::INFINITY))
            .with_deriv(power_of_t_shape(a, -a - 1.0));
        Self::finish(Family::Power, vec![a], Form::Power { a }, shape)
    }

    pub fn gegenbauer(nu: f64) -> Result<Self> {
        bound("nu", nu, nu > -0.5, "nu > -1/2")?;
        let e = nu - 0.5;
        let shape = gegenbauer_shape(e);
        Self::finish(Family::Gegenbauer, vec![nu], Form::Gegenbauer { nu }, shape)
    }

    /// Polynomial density `sum coeffs[j] t^j`, required positive on (0, 1).
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedDensity("polynomial needs finite coefficients".into()));
        }
        let mut coeffs = coeffs.to_vec();
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        let shape = polynomial_shape(&coeffs);
        Self::finish(Family::Polynomial, coeffs.clone(), Form::Polynomial { coeffs }, shape)
    }

    /// Step function taking `levels[i]` on `(b_i, b_{i+1})`, where the
    /// interior breakpoints are given in increasing order.
    pub fn piecewise_constant(breakpoints: &[Breakpoint], levels: &[f64]) -> Result<Self> {
        if levels.len() != breakpoints.len() + 1 {
            return Err(Error::MalformedDensity(format!(
                "{} interior breakpoints need {} levels, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                levels.len()
            )));
        }
        for bp in breakpoints {
            if let Breakpoint::Rational(_, q) = bp {
                if *q <= 0 {
                    return Err(Error::MalformedDensity(
                        "rational breakpoint needs a positive denominator".into(),
                    ));
                }
            }
        }
        let mut edges = vec![0.0];
        edges.extend(breakpoints.iter().map(Breakpoint::value));
        edges.push(1.0);
        if let Some(i) = edges.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::MalformedDensity(format!(
                "breakpoints must be strictly increasing inside (0,1) (at position {i})"
            )));
        }
        if let Some(&l) = levels.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "level",
                value: l,
                bound: "levels > 0",
            });
        }
        let general_case = breakpoints.iter().any(|b| matches!(b, Breakpoint::Float(_)));
        let non_increasing = levels.windows(2).all(|w| w[1] <= w[0]);
        let non_decreasing = levels.windows(2).all(|w| w[1] >= w[0]);
        let monotonicity = if non_increasing && non_decreasing {
            Monotonicity::Constant
        } else if !general_case {
            // Weak monotonicity with flat pieces only counts in the general case.
            Monotonicity::Neither
        } else if non_increasing {
            Monotonicity::Decreasing
        } else if non_decreasing {
            Monotonicity::Increasing
        } else {
            Monotonicity::Neither
        };
        let convexity = if monotonicity == Monotonicity::Constant {
            Convexity::Linear
        } else {
            Convexity::Neither
        };
        let shape = ShapeReport {
            monotonicity,
            convexity,
            general_case: general_case && monotonicity != Monotonicity::Constant,
            f_at_0: levels[0],
            f_at_1: *levels.last().expect("non-empty"),
            neg_deriv_at_0: Some(0.0),
            deriv_shape: None,
            numerically_inferred: false,
            low_confidence: false,
        };
        let mut params: Vec<f64> = edges[1..edges.len() - 1].to_vec();
        params.extend_from_slice(levels);
        Self::finish(
            Family::PiecewiseConstant,
            params,
            Form::Piecewise {
                edges,
                levels: levels.to_vec(),
            },
            shape,
        )
    }

    /// A user-supplied density. Its shape is inferred numerically; whether
    /// it is in the general case must be declared by the caller.
    pub fn custom<F>(name: &str, f: F, general_case: bool) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f: Arc<CustomFn> = Arc::new(f);
        let shape = infer_shape(&*f, general_case);
        let mut d = Self::finish(Family::Custom, Vec::new(), Form::Custom { f }, shape)?;
        d.label = format!("custom:{name}");
        let mass = quad::integrate_unit(&|t, s| d.value_at(t, s), 0.0, &[], 1e-10)
            .map_err(|e| Error::NonIntegrable(e.to_string()))?;
        if !mass.value.is_finite() {
            return Err(Error::NonIntegrable(d.label.clone()));
        }
        Ok(d)
    }

    fn finish(family: Family, params: Vec<f64>, form: Form, shape: ShapeReport) -> Result<Self> {
        let label = format!("{}:{}", family.tag(), fmt_params(&params));
        let d = Density {
            family,
            params,
            form: Arc::new(form),
            reflected: false,
            scale: 1.0,
            shape,
            label,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..VALIDATION_GRID {
            let t = (i as f64 + 0.5) / VALIDATION_GRID as f64;
            let v = self.evaluate(t);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::MalformedDensity(format!(
                    "{} is not positive and finite at t = {t} (value {v})",
                    self.label
                )));
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn shape(&self) -> &ShapeReport {
        &self.shape
    }

    pub fn is_reflected(&self) -> bool {
        self.reflected
    }

    /// Text form used in CSV/JSON output.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluate at `t` in (0, 1).
    #[inline]
    pub fn evaluate(&self, t: f64) -> f64 {
        self.value_at(t, 1.0 - t)
    }

    /// Evaluate with an explicitly supplied complement `s = 1 - t`.
    #[inline]
    pub fn value_at(&self, t: f64, s: f64) -> f64 {
        let v = if self.reflected {
            self.form.value(s, t)
        } else {
            self.form.value(t, s)
        };
        self.scale * v
    }

    /// Negative exponents `(e0, e1)` of algebraic blow-up at 0 and at 1
    /// (0 where the density is bounded).
    pub fn singular_exponents(&self) -> (f64, f64) {
        let (e0, e1) = self.form.singular_exponents();
        if self.reflected {
            (e1, e0)
        } else {
            (e0, e1)
        }
    }

    /// `f(t) / t^e0` (`left`) or `f(t) / (1-t)^e1`, evaluated without forming
    /// the singular factor.
    pub fn regular_part(&self, t: f64, s: f64, left: bool) -> f64 {
        let v = if self.reflected {
            self.form.regular_part(s, t, !left)
        } else {
            self.form.regular_part(t, s, left)
        };
        self.scale * v
    }

    /// Interior discontinuities, in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &*self.form {
            Form::Piecewise { edges, .. } => {
                let inner = &edges[1..edges.len() - 1];
                if self.reflected {
                    inner.iter().rev().map(|e| 1.0 - e).collect()
                } else {
                    inner.to_vec()
                }
            }
            _ => Vec::new(),
        }
    }

    /// `c * f` for a positive constant `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        bound("scale", c, c > 0.0, "scale > 0")?;
        let mut d = self.clone();
        d.scale *= c;
        d.shape = self.shape.scaled(c);
        d.label = format!("{c}*{}", self.label);
        Ok(d)
    }

    /// Polynomial coefficients in `t` when the density is a polynomial
    /// (used by the closed-form table).
    pub(crate) fn polynomial_coefficients(&self) -> Option<Vec<f64>> {
        let base = match &*self.form {
            Form::Polynomial { coeffs } => coeffs.clone(),
            Form::Beta { alpha, beta, norm } => {
                let (a, b) = (alpha - 1.0, beta - 1.0);
                if !is_small_nonneg_int(a) || !is_small_nonneg_int(b) {
                    return None;
                }
                // (1-t)^a t^b
                let mut p = binomial_expand_one_minus(a as usize, 1);
                p = shift(&p, b as usize);
                p.iter().map(|c| c * norm).collect()
            }
            Form::Kuttner { delta, lambda } => {
                if !is_small_nonneg_int(*delta) || !is_small_nonneg_int(*lambda) {
                    return None;
                }
                binomial_expand_one_minus(*lambda as usize, *delta as usize)
            }
            Form::Gegenbauer { nu } => {
                let e = nu - 0.5;
                if !is_small_nonneg_int(e) {
                    return None;
                }
                binomial_expand_one_minus(e as usize, 2)
            }
            _ => return None,
        };
        let coeffs = if self.reflected { compose_one_minus(&base) } else { base };
        Some(coeffs.into_iter().map(|c| c * self.scale).collect())
    }

    /// Pieces `(lo, hi, level)` of a piecewise-constant density.
    pub(crate) fn pieces(&self) -> Option<Vec<(f64, f64, f64)>> {
        match &*self.form {
            Form::Piecewise { edges, levels } => {
                let mut out: Vec<(f64, f64, f64)> = edges
                    .windows(2)
                    .zip(levels)
                    .map(|(w, &l)| (w[0], w[1], l * self.scale))
                    .collect();
                if self.reflected {
                    out = out.into_iter().rev().map(|(a, b, l)| (1.0 - b, 1.0 - a, l)).collect();
                }
                Some(out)
            }
            _ => None,
        }
    }
}

fn is_small_nonneg_int(v: f64) -> bool {
    (0.0..=16.0).contains(&v) && v.fract() == 0.0
}

/// Coefficients of `(1 - t^k)^n`.
fn binomial_expand_one_minus(n: usize, k: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * k + 1];
    let mut binom = 1.0;
    for j in 0..=n {
        out[j * k] = if j % 2 == 0 { binom } else { -binom };
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    out
}

fn shift(p: &[f64], by: usize) -> Vec<f64> {
    let mut out = vec![0.0; by];
    out.extend_from_slice(p);
    out
}

/// Coefficients of `p(1 - t)`.
pub(crate) fn compose_one_minus(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    for (j, &c) in p.iter().enumerate() {
        let term = binomial_expand_one_minus(j, 1);
        for (i, v) in term.iter().enumerate() {
            out[i] += c * v;
        }
    }
    out
}

/// Reflect a density: `t -> f(1 - t)`.
///
/// Beta densities map onto the beta family with swapped parameters; all
/// other densities are wrapped. Applying `reflect` twice returns a density
/// with the original arithmetic path.
pub fn reflect(d: &Density) -> Density {
    if d.family == Family::Beta && !d.reflected && d.scale == 1.0 {
        return Density::beta(d.params[1], d.params[0]).expect("reflected beta parameters are valid");
    }
    let mut r = d.clone();
    r.reflected = !d.reflected;
    r.shape = d.shape.reflected();
    r.label = match d.label.strip_prefix("reflect(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) => inner.to_string(),
        None => format!("reflect({})", d.label),
    };
    if !r.reflected {
        // Back to the original orientation: restore the full report.
        r.shape = original_shape(d);
    }
    r
}

fn original_shape(d: &Density) -> ShapeReport {
    // The reflected report drops derivative data; rebuild from the form.
    match &*d.form {
        Form::Beta { alpha, beta, norm } => beta_shape(*alpha, *beta, *norm).scaled(d.scale),
        Form::Gegenbauer { nu } => gegenbauer_shape(nu - 0.5).scaled(d.scale),
        Form::Polynomial { coeffs } => polynomial_shape(coeffs).scaled(d.scale),
        _ => {
            let rebuilt = match &*d.form {
                Form::Kuttner { delta, lambda } => Density::kuttner(*delta, *lambda).map(|k| k.shape),
                Form::Power { a } => Density::power(*a).map(|k| k.shape),
                _ => Ok(d.shape.reflected()),
            };
            rebuilt
                .map(|s| s.scaled(d.scale))
                .unwrap_or_else(|_| d.shape.reflected())
        }
    }
}

/// Shape report of a density, as carried with it.
pub fn shape_report(d: &Density) -> ShapeReport {
    d.shape.clone()
}

fn derived_shape_from_convexity(f_convexity: Convexity, f0: f64, f1: f64) -> ShapeReport {
    // -f' is increasing exactly when f is concave.
    let monotonicity = match f_convexity {
        Convexity::Convex => Monotonicity::Decreasing,
        Convexity::Concave => Monotonicity::Increasing,
        Convexity::Linear => Monotonicity::Constant,
        Convexity::Neither => Monotonicity::Neither,
    };
    ShapeReport::closed_form(monotonicity, Convexity::Neither, f0, f1)
}

/// `1/B(a, b)`, exact for integer parameters.
fn inverse_beta_function(a: f64, b: f64) -> f64 {
    if a.fract() == 0.0 && b.fract() == 0.0 && a + b < 60.0 {
        // 1/B(a, b) = a C(a+b-1, b-1)
        let (a, b) = (a as u64, b as u64);
        let mut c = 1.0f64;
        for i in 1..b {
            c = c * (a + i) as f64 / i as f64;
        }
        return a as f64 * c;
    }
    if a + b < 150.0 {
        use statrs::function::gamma::gamma;
        return gamma(a + b) / (gamma(a) * gamma(b));
    }
    (-statrs::function::beta::ln_beta(a, b)).exp()
}

fn beta_shape(alpha: f64, beta: f64, norm: f64) -> ShapeReport {
    let (a, b) = (alpha - 1.0, beta - 1.0);
    let monotonicity = if a == 0.0 && b == 0.0 {
        Monotonicity::Constant
    } else if b <= 0.0 && a >= 0.0 {
        Monotonicity::Decreasing
    } else if a <= 0.0 && b >= 0.0 {
        Monotonicity::Increasing
    } else {
        Monotonicity::Neither
    };

    // f'' t^2 (1-t)^2 / f = b(b-1)(1-t)^2 - 2ab t(1-t) + a(a-1) t^2.
    let qa = b * (b - 1.0);
    let qb = -2.0 * a * b;
    let qc = a * (a - 1.0);
    let convexity = quadratic_sign_on_unit(qa, qb, qc);

    let f_at_0 = if b < 0.0 {
        f64::INFINITY
    } else if b == 0.0 {
        norm
    } else {
        0.0
    };
    let f_at_1 = if a < 0.0 {
        f64::INFINITY
    } else if a == 0.0 {
        norm
    } else {
        0.0
    };
    // -f'(0+) from f' = norm [b t^(b-1) (1-t)^a - a t^b (1-t)^(a-1)].
    let l = if b < 0.0 {
        Some(f64::INFINITY)
    } else if b == 0.0 {
        Some(a * norm)
    } else if b > 1.0 {
        Some(0.0)
    } else {
        None
    };

    let deriv = if b == 0.0 && a != 0.0 {
        // -f' = norm a (1-t)^(a-1)
        if a > 0.0 {
            power_of_complement_shape(norm * a, a - 1.0)
        } else {
            derived_shape_from_convexity(convexity, f64::NEG_INFINITY, f64::NEG_INFINITY)
        }
    } else if a == 0.0 && b < 0.0 {
        // -f' = -norm b t^(b-1)
        power_of_t_shape(-norm * b, b - 1.0)
    } else {
        derived_shape_from_convexity(convexity, l.unwrap_or(f64::NAN), f64::NAN)
    };

    let mut shape = ShapeReport::closed_form(monotonicity, convexity, f_at_0, f_at_1)
        .with_neg_deriv(l)
        .with_deriv(deriv);
    if let Some(d) = shape.deriv_shape.as_mut() {
        d.general_case = !matches!(convexity, Convexity::Linear);
    }
    shape
}

/// Sign of `A (1-t)^2 + B t (1-t) + C t^2` on (0, 1), as a convexity verdict.
fn quadratic_sign_on_unit(qa: f64, qb: f64, qc: f64) -> Convexity {
    let scale = qa.abs() + qb.abs() + qc.abs();
    if scale == 0.0 {
        return Convexity::Linear;
    }
    // Power basis: qa + (qb - 2qa) t + (qa - qb + qc) t^2.
    let c1 = qb - 2.0 * qa;
    let c2 = qa - qb + qc;
    let eval = |t: f64| qa + c1 * t + c2 * t * t;
    let mut candidates = vec![eval(0.0), eval(1.0)];
    if c2 != 0.0 {
        let v = -c1 / (2.0 * c2);
        if v > 0.0 && v < 1.0 {
            candidates.push(eval(v));
        }
    }
    let eps = 1e-12 * scale;
    let min = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = candidates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min >= -eps {
        Convexity::Convex
    } else if max <= eps {
        Convexity::Concave
    } else {
        Convexity::Neither
    }
}

fn gegenbauer_shape(e: f64) -> ShapeReport {
    // f = (1-t^2)^e, e = nu - 1/2 > -1.
    let (monotonicity, convexity) = if e == 0.0 {
        (Monotonicity::Constant, Convexity::Linear)
    } else if e < 0.0 {
        (Monotonicity::Increasing, Convexity::Convex)
    } else if e <= 1.0 {
        (Monotonicity::Decreasing, Convexity::Concave)
    } else {
        // f'' changes sign at t^2 = 1/(2e-1).
        (Monotonicity::Decreasing, Convexity::Neither)
    };
    let f_at_1 = if e > 0.0 {
        0.0
    } else if e < 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    // -f' = 2e t (1-t^2)^(e-1)
    let deriv = if e == 0.0 {
        let mut d = ShapeReport::closed_form(Monotonicity::Constant, Convexity::Linear, 0.0, 0.0);
        d.general_case = false;
        d
    } else if e > 0.0 && e < 1.0 {
        // t (1-t^2)^(e-1) is a product of nonnegative increasing convex factors.
        ShapeReport::closed_form(Monotonicity::Increasing, Convexity::Convex, 0.0, f64::INFINITY)
    } else if e == 1.0 {
        ShapeReport::closed_form(Monotonicity::Increasing, Convexity::Linear, 0.0, 2.0)
    } else if e > 1.0 {
        ShapeReport::closed_form(Monotonicity::Neither, Convexity::Neither, 0.0, 0.0)
    } else {
        ShapeReport::closed_form(Monotonicity::Decreasing, Convexity::Neither, 0.0, f64::NEG_INFINITY)
    };
    ShapeReport::closed_form(monotonicity, convexity, 1.0, f_at_1)
        .with_neg_deriv(Some(0.0))
        .with_deriv(deriv)
}

fn poly_eval(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(j, v)| j as f64 * v).collect()
}

/// Sign classification of a polynomial on a fine grid of (0, 1).
fn poly_sign(c: &[f64]) -> (bool, bool, bool) {
    const N: usize = 10_000;
    let scale: f64 = c.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let eps = 1e-13 * scale;
    let (mut pos, mut neg) = (false, false);
    for i in 0..=N {
        let v = poly_eval(c, i as f64 / N as f64);
        pos |= v > eps;
        neg |= v < -eps;
    }
    let zero = !pos && !neg;
    (pos, neg, zero)
}

fn polynomial_shape(coeffs: &[f64]) -> ShapeReport {
    let d1 = poly_derivative(coeffs);
    let d2 = poly_derivative(&d1);
    let d3 = poly_derivative(&d2);
    let (p1, n1, z1) = poly_sign(&d1);
    let (p2, n2, z2) = poly_sign(&d2);
    let (p3, n3, z3) = poly_sign(&d3);
    let mono = |p: bool, n: bool, z: bool| {
        if z {
            Monotonicity::Constant
        } else if p && !n {
            Monotonicity::Increasing
        } else if n && !p {
            Monotonicity::Decreasing
        } else {
            Monotonicity::Neither
        }
    };
    let conv = |p: bool, n: bool, z: bool| {
        if z {
            Convexity::Linear
        } else if p && !n {
            Convexity::Convex
        } else if n && !p {
            Convexity::Concave
        } else {
            Convexity::Neither
        }
    };
    let monotonicity = mono(p1, n1, z1);
    let convexity = conv(p2, n2, z2);
    let neg_d1: Vec<f64> = d1.iter().map(|v| -v).collect();
    let mut deriv = ShapeReport::closed_form(
        mono(n2, p2, z2),
        conv(n3, p3, z3),
        poly_eval(&neg_d1, 0.0),
        poly_eval(&neg_d1, 1.0),
    );
    deriv.general_case = !z2;
    deriv.numerically_inferred = true;
    let mut shape = ShapeReport::closed_form(monotonicity, convexity, coeffs[0], poly_eval(coeffs, 1.0))
        .with_neg_deriv(Some(-d1[0]))
        .with_deriv(deriv);
    shape.numerically_inferred = true;
    shape
}

/// Numerical shape inference by sampled finite differences.
///
/// Monotonicity and convexity are claimed only when two interleaved grids
/// of 10^4 points agree and no difference is ambiguous at rounding level;
/// otherwise the fields fall back to `Neither` and `low_confidence` is set.
pub fn infer_shape(f: &dyn Fn(f64) -> f64, general_case: bool) -> ShapeReport {
    const N: usize = 10_000;
    let classify = |offset: f64| -> (Monotonicity, Convexity, bool) {
        let ts: Vec<f64> = (0..N).map(|i| (i as f64 + offset) / N as f64).collect();
        let vs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        let scale = vs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let noise = 1e-12 * scale;
        let d1: Vec<f64> = vs.windows(2).map(|w| w[1] - w[0]).collect();
        let d2: Vec<f64> = d1.windows(2).map(|w| w[1] - w[0]).collect();
        let sign_changes = |d: &[f64]| {
            let signs: Vec<i8> = d
                .iter()
                .filter(|v| v.abs() > noise)
                .map(|v| if *v > 0.0 { 1 } else { -1 })
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let up = d1.iter().any(|v| *v > noise);
        let down = d1.iter().any(|v| *v < -noise);
        let mono = match (up, down) {
            (false, false) => Monotonicity::Constant,
            (true, false) => Monotonicity::Increasing,
            (false, true) => Monotonicity::Decreasing,
            _ => Monotonicity::Neither,
        };
        let cv = d2.iter().any(|v| *v > noise);
        let cc = d2.iter().any(|v| *v < -noise);
        let conv = match (cv, cc) {
            (false, false) => Convexity::Linear,
            (true, false) => Convexity::Convex,
            (false, true) => Convexity::Concave,
            _ => Convexity::Neither,
        };
        let busy = sign_changes(&d1) > N / 100 || sign_changes(&d2) > N / 100;
        (mono, conv, busy)
    };
    let (m1, c1, busy1) = classify(0.25);
    let (m2, c2, busy2) = classify(0.75);
    let low_confidence = busy1 || busy2 || m1 != m2 || c1 != c2;
    let (monotonicity, convexity) = if low_confidence {
        (Monotonicity::Neither, Convexity::Neither)
    } else {
        (m1, c1)
    };

    let limit = |near: &dyn Fn(f64) -> f64| -> f64 {
        let (a, b, c) = (near(1e-6), near(1e-8), near(1e-10));
        if c > 10.0 * a.abs() && c > b {
            f64::INFINITY
        } else {
            c
        }
    };
    let f_at_0 = limit(&|h| f(h));
    let f_at_1 = limit(&|h| f(1.0 - h));
    let h = 1e-7;
    let slope = (f(2.0 * h) - f(h)) / h;
    let neg_deriv_at_0 = if f_at_0.is_infinite() {
        Some(f64::INFINITY)
    } else {
        Some(-slope)
    };

    let mut report = ShapeReport {
        monotonicity,
        convexity,
        general_case,
        f_at_0,
        f_at_1,
        neg_deriv_at_0: None,
        deriv_shape: None,
        numerically_inferred: true,
        low_confidence,
    };
    report = report.with_neg_deriv(neg_deriv_at_0);
    report
}

impl FromStr for Density {
    type Err = Error;

    /// Parse `family:p1,p2,...`, e.g. `beta:0.5,2`, `kuttner:2,1`, `power:0.5`,
    /// `gegenbauer:0.25`, `poly:1,0,-0.5`, `uniform`, or
    /// `piecewise:1/3,0.7|3,2,1` (interior breakpoints, then levels;
    /// `p/q` breakpoints are exact rationals).
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "uniform" {
            return Ok(Density::uniform());
        }
        let (name, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::MalformedDensity(format!("expected family:params, got `{spec}`")))?;
        let parse_list = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::MalformedDensity(format!("bad number `{p}`")))
                })
                .collect()
        };
        let family = match name.trim() {
            "beta" => Family::Beta,
            "kuttner" => Family::Kuttner,
            "power" => Family::Power,
            "gegenbauer" => Family::Gegenbauer,
            "poly" | "polynomial" => Family::Polynomial,
            "piecewise" | "piecewise_constant" => {
                let (bps, levels) = rest.split_once('|').unwrap_or(("", rest));
                let breakpoints = bps
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(parse_breakpoint)
                    .collect::<Result<Vec<_>>>()?;
                return Density::piecewise_constant(&breakpoints, &parse_list(levels)?);
            }
            other => return Err(Error::MalformedDensity(format!("unknown family `{other}`"))),
        };
        Density::new(family, &parse_list(rest)?)
    }
}

fn parse_breakpoint(s: &str) -> Result<Breakpoint> {
    let s = s.trim();
    let bad = || Error::MalformedDensity(format!("bad breakpoint `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => Ok(Breakpoint::Rational(
            p.trim().parse().map_err(|_| bad())?,
            q.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(Breakpoint::Float(s.parse().map_err(|_| bad())?)),
    }
}
