//! Partial-fraction expansions of `U/sin`, `U/(z cos)`, `V/(z sin)` and the
//! Wronskian series derived from them.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;
use crate::transform::{eval, moment, TransformKind, DEFAULT_TOL};

/// Which expansion a coefficient list belongs to.
///
/// * `Pe1`: `U(z)/sin z`, poles at `kπ`, `c_k = U(kπ)`.
/// * `Pe2`: `U(z)/(z cos z)`, poles at `(k-1/2)π`, `c_0 = U(0)`, `c_k = U((k-1/2)π)`.
/// * `Pe3`: `V(z)/(z sin z)`, poles at `kπ`, `c_0 = V'(0)`, `c_k = V(kπ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Pe1,
    Pe2,
    Pe3,
}

impl LatticeKind {
    /// Positive pole `a_k`, `k >= 1`.
    pub fn pole(self, k: usize) -> f64 {
        match self {
            LatticeKind::Pe1 | LatticeKind::Pe3 => k as f64 * PI,
            LatticeKind::Pe2 => (k as f64 - 0.5) * PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeCoefficients {
    pub kind: LatticeKind,
    /// `c_0, ..., c_N`
    pub values: Vec<f64>,
}

impl LatticeCoefficients {
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Residue `A_k` at the pole `a_k`, including the sign and the `1/a_k`
    /// factor of the second and third expansions.
    pub fn residue(&self, k: usize) -> f64 {
        if k == 0 {
            return self.values[0];
        }
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let c = sign * self.values[k];
        match self.kind {
            LatticeKind::Pe1 => c,
            LatticeKind::Pe2 | LatticeKind::Pe3 => c / self.kind.pole(k),
        }
    }
}

/// Sample the transform values that serve as expansion coefficients.
pub fn sample_lattice(d: &Density, kind: LatticeKind, n: usize) -> Result<LatticeCoefficients> {
    sample_lattice_with_tol(d, kind, n, DEFAULT_TOL)
}

pub fn sample_lattice_with_tol(d: &Density, kind: LatticeKind, n: usize, tol: f64) -> Result<LatticeCoefficients> {
    if n == 0 {
        return Err(Error::Argument("lattice size N must be at least 1".into()));
    }
    let c0 = match kind {
        LatticeKind::Pe1 | LatticeKind::Pe2 => eval(d, TransformKind::Cosine, 0.0, tol)?.value,
        LatticeKind::Pe3 => moment(d, 1, tol)?,
    };
    let transform = match kind {
        LatticeKind::Pe1 | LatticeKind::Pe2 => TransformKind::Cosine,
        LatticeKind::Pe3 => TransformKind::Sine,
    };
    let rest: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|k| eval(d, transform, kind.pole(k), tol).map(|r| r.value))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(c0);
    values.extend(rest);
    Ok(LatticeCoefficients { kind, values })
}

/// Distance below which [`pf_partial_sum`] refuses to evaluate.
pub const POLE_GUARD: f64 = 1e-8;

/// Truncated expansion `S_N(z) = A_0/z + Σ A_k (1/(z-a_k) + 1/(z+a_k))`.
pub fn pf_partial_sum(coeffs: &LatticeCoefficients, z: f64) -> Result<f64> {
    if z.abs() <= POLE_GUARD {
        return Err(Error::PoleProximity {
            z,
            pole: 0.0,
            radius: POLE_GUARD,
        });
    }
    let mut acc = CompensatedSum::new();
    acc.add(coeffs.values[0] / z);
    for k in 1..=coeffs.n() {
        let a = coeffs.kind.pole(k);
        if (z.abs() - a).abs() <= POLE_GUARD {
            return Err(Error::PoleProximity {
                z,
                pole: a.copysign(z),
                radius: POLE_GUARD,
            });
        }
        // 1/(z-a) + 1/(z+a) = 2z/(z^2-a^2)
        acc.add(coeffs.residue(k) * 2.0 * z / ((z - a) * (z + a)));
    }
    Ok(acc.value())
}

#[inline]
fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

/// Truncated Wronskian series matching the coefficient kind:
/// `W[U, sin z/z]`, `W[U, cos z]` or `W[V, sin z]`.
///
/// Each term's `sin²z/(z-a_k)²` (or `cos²z/(z-a_k)²`) is evaluated as
/// `sinc²(z-a_k)`, which keeps lattice points regular.
pub fn wronskian_series(coeffs: &LatticeCoefficients, x: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for k in 1..=coeffs.n() {
        let a = coeffs.kind.pole(k);
        let s = sinc(x - a);
        let q = s * s / ((x + a) * (x + a));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * coeffs.values[k];
        acc.add(match coeffs.kind {
            LatticeKind::Pe1 => c * a * a * q,
            LatticeKind::Pe2 | LatticeKind::Pe3 => c * a * q,
        });
    }
    let prefactor = match coeffs.kind {
        LatticeKind::Pe1 => 4.0 / x,
        LatticeKind::Pe2 | LatticeKind::Pe3 => 4.0 * x,
    };
    prefactor * acc.value()
}

/// Function pair of a direct Wronskian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WronskianPair {
    /// `W[U(x), sin x / x]`
    USinc,
    /// `W[U(x), cos x]`
    UCos,
    /// `W[V(x), sin x]`
    VSin,
}

impl WronskianPair {
    /// The expansion whose Wronskian series matches this pair.
    pub fn lattice(self) -> LatticeKind {
        match self {
            WronskianPair::USinc => LatticeKind::Pe1,
            WronskianPair::UCos => LatticeKind::Pe2,
            WronskianPair::VSin => LatticeKind::Pe3,
        }
    }
}

/// `W[f, g] = f g' - f' g` with the transform and its derivative from
/// quadrature.
pub fn wronskian_direct(d: &Density, pair: WronskianPair, x: f64) -> Result<f64> {
    wronskian_direct_with_tol(d, pair, x, DEFAULT_TOL)
}

pub fn wronskian_direct_with_tol(d: &Density, pair: WronskianPair, x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Argument(format!("x = {x} must be positive")));
    }
    let (sin, cos) = x.sin_cos();
    Ok(match pair {
        WronskianPair::USinc => {
            let u = eval(d, TransformKind::Cosine, x, tol)?.value;
            let du = eval(d, TransformKind::DCosine, x, tol)?.value;
            let g = sin / x;
            let dg = (x * cos - sin) / (x * x);
            u * dg - du * g
        }
        WronskianPair::UCos => {
            let u = eval(d, TransformKind::Cosine, x, tol)?.value;
            let du = eval(d, TransformKind::DCosine, x, tol)?.value;
            -u * sin - du * cos
        }
        WronskianPair::VSin => {
            let v = eval(d, TransformKind::Sine, x, tol)?.value;
            let dv = eval(d, TransformKind::DSine, x, tol)?.value;
            v * cos - dv * sin
        }
    })
}
