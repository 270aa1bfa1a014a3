//! Parameter regions of the beta family and their predicted zero patterns.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::{Convexity, Density, Monotonicity, ShapeReport};
use crate::error::{Error, Result};
use crate::zeros::{Endpoint, Expectation, IntervalFamily, Prediction, SignClaim};

/// Primary region tag of a point `(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionTag {
    #[serde(rename = "Pc")]
    Pc,
    #[serde(rename = "Ps_minus_Pc")]
    PsMinusPc,
    #[serde(rename = "Pc_star")]
    PcStar,
    #[serde(rename = "Ps_star_minus_Pc_star")]
    PsStarMinusPcStar,
    #[serde(rename = "mono_C")]
    MonoC,
    #[serde(rename = "mono_D")]
    MonoD,
    #[serde(rename = "mono_C_star")]
    MonoCStar,
    #[serde(rename = "mono_D_star")]
    MonoDStar,
    #[serde(rename = "concave_strip")]
    ConcaveStrip,
    #[serde(rename = "diagonal")]
    Diagonal,
    #[serde(rename = "sign_change_zone")]
    SignChangeZone,
    #[serde(rename = "excluded_point")]
    ExcludedPoint,
    #[serde(rename = "unknown")]
    Unknown,
}

impl RegionTag {
    pub const ALL: [RegionTag; 13] = [
        RegionTag::Pc,
        RegionTag::PsMinusPc,
        RegionTag::PcStar,
        RegionTag::PsStarMinusPcStar,
        RegionTag::MonoC,
        RegionTag::MonoD,
        RegionTag::MonoCStar,
        RegionTag::MonoDStar,
        RegionTag::ConcaveStrip,
        RegionTag::Diagonal,
        RegionTag::SignChangeZone,
        RegionTag::ExcludedPoint,
        RegionTag::Unknown,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            RegionTag::Pc => "Pc",
            RegionTag::PsMinusPc => "Ps_minus_Pc",
            RegionTag::PcStar => "Pc_star",
            RegionTag::PsStarMinusPcStar => "Ps_star_minus_Pc_star",
            RegionTag::MonoC => "mono_C",
            RegionTag::MonoD => "mono_D",
            RegionTag::MonoCStar => "mono_C_star",
            RegionTag::MonoDStar => "mono_D_star",
            RegionTag::ConcaveStrip => "concave_strip",
            RegionTag::Diagonal => "diagonal",
            RegionTag::SignChangeZone => "sign_change_zone",
            RegionTag::ExcludedPoint => "excluded_point",
            RegionTag::Unknown => "unknown",
        }
    }

    /// Name of the rule whose consequences the tag carries.
    pub fn provenance(&self) -> &'static str {
        match self {
            RegionTag::Pc => "2F3 positivity region for both transforms",
            RegionTag::PsMinusPc => "2F3 positivity region for the sine transform",
            RegionTag::PcStar => "reflected positivity of both transforms",
            RegionTag::PsStarMinusPcStar => "reflected positivity of the sine transform",
            RegionTag::MonoC => "decreasing convex density",
            RegionTag::MonoD => "decreasing density",
            RegionTag::MonoCStar => "increasing convex density",
            RegionTag::MonoDStar => "increasing density",
            RegionTag::ConcaveStrip => "decreasing concave density",
            RegionTag::Diagonal => "symmetric density",
            RegionTag::SignChangeZone => "infinitely many sign changes",
            RegionTag::ExcludedPoint => "boundary exclusion",
            RegionTag::Unknown => "no applicable rule",
        }
    }

    /// True for tags that come with a zero or sign prediction.
    pub fn is_definite(&self) -> bool {
        !matches!(self, RegionTag::Unknown)
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RegionTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RegionTag::ALL
            .iter()
            .copied()
            .find(|t| t.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Argument(format!("unknown region tag `{s}`")))
    }
}

/// Classification of one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionLabel {
    pub alpha: f64,
    pub beta: f64,
    pub tag: RegionTag,
    pub provenance: String,
    /// Every region containing the point, in precedence order. Excluded
    /// points keep the memberships the printed set definitions give them.
    pub memberships: Vec<RegionTag>,
}

/// `a <= b` up to a few ulps, so that decimal boundary points such as
/// `β = 2α - 1` at `α = 1.3` land inside the closed set they lie on.
fn le(a: f64, b: f64) -> bool {
    a <= b + 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0)
}

fn ge(a: f64, b: f64) -> bool {
    le(b, a)
}

const FIVE_THIRDS: f64 = 5.0 / 3.0;
const TWO_THIRDS: f64 = 2.0 / 3.0;

pub fn in_pc(a: f64, b: f64) -> bool {
    (ge(a, FIVE_THIRDS) && b > 0.0 && le(b, 1f64.min(a - 1.0)) && (a, b) != (2.0, 1.0))
        || (ge(a, 1.0) && le(a, FIVE_THIRDS) && b > 0.0 && le(b, TWO_THIRDS))
}

pub fn in_ps(a: f64, b: f64) -> bool {
    ge(a, 0.5) && b > 0.0 && le(b, 2f64.min(0.5 * (a + 1.0)).min(2.0 * a - 1.0)) && (a, b) != (1.0, 1.0)
}

pub fn in_pc_star(a: f64, b: f64) -> bool {
    (a > 0.0 && le(a, 1.0) && ge(b, FIVE_THIRDS.max(a + 1.0)) && (a, b) != (1.0, 2.0))
        || (a > 0.0 && le(a, TWO_THIRDS) && ge(b, 1.0) && le(b, FIVE_THIRDS))
}

pub fn in_ps_star(a: f64, b: f64) -> bool {
    a > 0.0 && le(a, 2.0) && ge(b, 0.5f64.max(0.5 * (a + 1.0)).max(2.0 * a - 1.0)) && (a, b) != (1.0, 1.0)
}

/// Decreasing and convex.
pub fn in_c(a: f64, b: f64) -> bool {
    (a >= 2.0 && b > 0.0 && b < 1.0) || (a > 2.0 && b == 1.0) || (a == 1.0 && b > 0.0 && b < 1.0)
}

/// Decreasing.
pub fn in_d(a: f64, b: f64) -> bool {
    (a >= 1.0 && b > 0.0 && b < 1.0) || (a > 1.0 && b == 1.0)
}

pub fn in_c_star(a: f64, b: f64) -> bool {
    in_c(b, a)
}

pub fn in_d_star(a: f64, b: f64) -> bool {
    in_d(b, a)
}

/// The only decreasing concave beta densities.
pub fn in_concave_strip(a: f64, b: f64) -> bool {
    a > 1.0 && a < 2.0 && b == 1.0
}

const EXCLUDED: [(f64, f64); 3] = [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)];

/// Classify `(α, β)` by the printed region definitions.
///
/// Precedence: excluded points, then positivity regions, monotonicity
/// regions, the diagonal, the sign-change zone.
pub fn classify_beta_params(alpha: f64, beta: f64) -> Result<RegionLabel> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                bound: "must be positive and finite",
            });
        }
    }
    let (a, b) = (alpha, beta);
    let mut memberships = Vec::new();
    if in_pc(a, b) {
        memberships.push(RegionTag::Pc);
    } else if in_ps(a, b) {
        memberships.push(RegionTag::PsMinusPc);
    }
    if in_pc_star(a, b) {
        memberships.push(RegionTag::PcStar);
    } else if in_ps_star(a, b) {
        memberships.push(RegionTag::PsStarMinusPcStar);
    }
    if in_c(a, b) {
        memberships.push(RegionTag::MonoC);
    } else if in_d(a, b) {
        memberships.push(RegionTag::MonoD);
    }
    if in_c_star(a, b) {
        memberships.push(RegionTag::MonoCStar);
    } else if in_d_star(a, b) {
        memberships.push(RegionTag::MonoDStar);
    }
    if in_concave_strip(a, b) {
        memberships.push(RegionTag::ConcaveStrip);
    }
    if a == b {
        memberships.push(RegionTag::Diagonal);
    }
    let starred = memberships.iter().any(|t| {
        matches!(
            t,
            RegionTag::PcStar | RegionTag::PsStarMinusPcStar | RegionTag::MonoCStar | RegionTag::MonoDStar
        )
    });
    if b > a && !starred {
        memberships.push(RegionTag::SignChangeZone);
    }

    let tag = if EXCLUDED.contains(&(a, b)) {
        RegionTag::ExcludedPoint
    } else {
        memberships.first().copied().unwrap_or(RegionTag::Unknown)
    };
    Ok(RegionLabel {
        alpha,
        beta,
        tag,
        provenance: tag.provenance().to_string(),
        memberships,
    })
}

fn pi_family(lo: (f64, f64), hi: (f64, f64), e: Expectation) -> IntervalFamily {
    IntervalFamily::new(Endpoint::pi(lo.0, lo.1), Endpoint::pi(hi.0, hi.1), e)
}

use Expectation::ExactlyOne;

/// Pattern with one zero in each `((k-1/2)π, kπ)`.
fn lower_half_windows(rule: &str, k_max: u32) -> Prediction {
    Prediction::new(rule, k_max)
        .with_item(pi_family((1.0, -0.5), (1.0, 0.0), ExactlyOne))
        .exclusive()
}

/// Pattern with one zero in each `(kπ, (k+1/2)π)`.
fn upper_half_windows(rule: &str, k_max: u32) -> Prediction {
    Prediction::new(rule, k_max)
        .with_item(pi_family((1.0, 0.0), (1.0, 0.5), ExactlyOne))
        .exclusive()
}

/// Pattern with one zero in each `((k-1/2)π, (k+1/2)π)`.
fn centered_windows(rule: &str, k_max: u32) -> Prediction {
    Prediction::new(rule, k_max)
        .with_item(pi_family((1.0, -0.5), (1.0, 0.5), ExactlyOne))
        .exclusive()
}

/// Pattern with one zero in each `(kπ, (k+1)π)`.
fn full_windows(rule: &str, k_max: u32) -> Prediction {
    Prediction::new(rule, k_max)
        .with_item(pi_family((1.0, 0.0), (1.0, 1.0), ExactlyOne))
        .exclusive()
}

/// One zero in `(π/2, π)` and in each `((k+1/2)π, (k+3/2)π)`.
fn shifted_windows(rule: &str, k_max: u32) -> Prediction {
    Prediction::new(rule, k_max)
        .with_item(IntervalFamily::single(0.5, 1.0, ExactlyOne))
        .with_item(pi_family((1.0, 0.5), (1.0, 1.5), ExactlyOne))
        .exclusive()
}

/// One zero in each `((2k-1)π, 2kπ)` and `(2kπ, (2k+1/2)π)`.
fn alternating_windows(rule: &str, k_max: u32) -> Prediction {
    Prediction::new(rule, k_max)
        .with_item(pi_family((2.0, -1.0), (2.0, 0.0), ExactlyOne))
        .with_item(pi_family((2.0, 0.0), (2.0, 0.5), ExactlyOne))
        .exclusive()
}

fn positive(rule: &str, k_max: u32) -> Prediction {
    Prediction::new(rule, k_max).with_sign(SignClaim::positive_everywhere())
}

/// Whether the derivative of a density with shape `s` is in the general case.
fn derivative_general(s: &ShapeReport) -> bool {
    match &s.deriv_shape {
        Some(d) => d.general_case,
        None => s.convexity != Convexity::Linear,
    }
}

/// Zero and sign predictions for `(U, V)` implied by the shape of a density.
///
/// Returns empty predictions when no rule applies (for example in the
/// exceptional case).
pub fn predict_from_shape(s: &ShapeReport, k_max: u32) -> (Prediction, Prediction) {
    let mut u = Prediction::new("shape", k_max);
    let mut v = Prediction::new("shape", k_max);
    u.rules.clear();
    v.rules.clear();
    if !s.general_case {
        return (u, v);
    }
    let pi = std::f64::consts::PI;
    match s.monotonicity {
        Monotonicity::Increasing => {
            u = u.merge(
                shifted_windows("increasing density, first zero in (π/2, π)", k_max)
                    .with_sign(SignClaim::positive_upto(0.5 * pi)),
            );
            v = v.merge(
                full_windows("increasing density, sine transform", k_max).with_sign(SignClaim::positive_upto(pi)),
            );
            if s.convexity.is_convex() && derivative_general(s) {
                u = u.merge(lower_half_windows("increasing convex density, cosine transform", k_max));
            }
            if s.convexity.is_convex() {
                if s.f_at_0 == 0.0 {
                    v = v.merge(upper_half_windows("increasing convex density vanishing at 0", k_max));
                } else if s.f_at_0 > 0.0 {
                    v = v.merge(alternating_windows("increasing convex density positive at 0", k_max));
                }
            }
        }
        Monotonicity::Decreasing => {
            v = v.merge(positive("decreasing density, sine transform", k_max));
            u = u.merge(
                Prediction::new("decreasing density, first half-period", k_max).with_sign(SignClaim::positive_upto(pi)),
            );
            if s.convexity.is_concave() && derivative_general(s) {
                u = u.merge(full_windows("decreasing concave density", k_max));
            }
            if let Some(d) = &s.deriv_shape {
                let d_ok = d.monotonicity == Monotonicity::Increasing && d.convexity.is_convex() && d.general_case;
                if d_ok {
                    u = u.merge(alternating_windows("increasing convex negative derivative", k_max));
                    let l = s.neg_deriv_at_0;
                    let m = s.f_at_1;
                    let tight = match l {
                        Some(0.0) => true,
                        Some(l) if l.is_finite() => 0.0 < 2.0 * l && 2.0 * l <= 3.0 * pi * m,
                        _ => false,
                    };
                    if tight {
                        u = u.merge(upper_half_windows(
                            "increasing convex negative derivative with small slope at 0",
                            k_max,
                        ));
                    }
                }
            }
            if s.convexity.is_convex() && s.f_at_1 == 0.0 && derivative_general(s) {
                u = u.merge(positive("decreasing convex density vanishing at 1", k_max));
            }
        }
        Monotonicity::Constant | Monotonicity::Neither => {}
    }
    (u, v)
}

/// Derivative predictions `(U', V')` for an increasing density.
pub fn predict_derivatives_from_shape(s: &ShapeReport, k_max: u32) -> (Prediction, Prediction) {
    let mut du = Prediction::new("increasing density, derivative of the cosine transform", k_max);
    let mut dv = Prediction::new("increasing density, derivative of the sine transform", k_max);
    if s.monotonicity != Monotonicity::Increasing || !s.general_case {
        du.rules.clear();
        dv.rules.clear();
        return (du, dv);
    }
    let pi = std::f64::consts::PI;
    du = du
        .with_sign(SignClaim::negative_upto(pi))
        .with_item(pi_family((1.0, 0.0), (1.0, 1.0), ExactlyOne))
        .exclusive();
    dv = dv
        .with_sign(SignClaim::positive_upto(0.5 * pi))
        .with_item(IntervalFamily::single(0.5, 1.0, ExactlyOne))
        .with_item(pi_family((1.0, 0.5), (1.0, 1.5), ExactlyOne))
        .exclusive();
    if s.convexity.is_convex() {
        du = du.merge(
            Prediction::new("increasing convex density, tan-equation windows", k_max)
                .with_item(IntervalFamily::new(Endpoint::pi(1.0, 0.0), Endpoint::Sigma, ExactlyOne))
                .exclusive(),
        );
        dv = dv.merge(lower_half_windows(
            "increasing convex density, derivative of the sine transform",
            k_max,
        ));
    }
    (du, dv)
}

/// Predictions `(Φ, Ψ)` for a classified beta point.
pub fn predict(label: &RegionLabel, k_max: u32) -> Result<(Prediction, Prediction)> {
    let mut phi = Prediction::new("", k_max);
    let mut psi = Prediction::new("", k_max);
    phi.rules.clear();
    psi.rules.clear();
    let shape = || Density::beta(label.alpha, label.beta).map(|d| d.shape().clone());
    for tag in &label.memberships {
        let (p, q) = match tag {
            RegionTag::Pc => (positive(tag.provenance(), k_max), positive(tag.provenance(), k_max)),
            RegionTag::PsMinusPc => (
                Prediction::new(tag.provenance(), k_max),
                positive(tag.provenance(), k_max),
            ),
            RegionTag::PcStar => (
                lower_half_windows(tag.provenance(), k_max).with_no_common_zeros(),
                upper_half_windows(tag.provenance(), k_max).with_no_common_zeros(),
            ),
            RegionTag::PsStarMinusPcStar => (
                centered_windows(tag.provenance(), k_max).with_no_common_zeros(),
                full_windows(tag.provenance(), k_max).with_no_common_zeros(),
            ),
            RegionTag::MonoC | RegionTag::MonoD | RegionTag::MonoCStar | RegionTag::MonoDStar => {
                predict_from_shape(&shape()?, k_max)
            }
            RegionTag::ConcaveStrip => (
                full_windows(tag.provenance(), k_max),
                Prediction::new(tag.provenance(), k_max),
            ),
            RegionTag::Diagonal => (
                Prediction::new(tag.provenance(), k_max)
                    .with_item(IntervalFamily::exact_zero_at(Endpoint::pi(2.0, -1.0))),
                Prediction::new(tag.provenance(), k_max)
                    .with_item(IntervalFamily::exact_zero_at(Endpoint::pi(2.0, 0.0))),
            ),
            RegionTag::SignChangeZone => (
                Prediction::new(tag.provenance(), k_max).with_sign_change(),
                Prediction::new(tag.provenance(), k_max).with_sign_change(),
            ),
            RegionTag::ExcludedPoint | RegionTag::Unknown => continue,
        };
        phi = phi.merge(p);
        psi = psi.merge(q);
    }
    if phi.is_empty() && psi.is_empty() {
        return Err(Error::NoPrediction(format!(
            "no rule applies at ({}, {})",
            label.alpha, label.beta
        )));
    }
    Ok((phi, psi))
}

/// Predictions for a single tag applied to `(α, β)`, regardless of whether
/// the point lies in that region.
pub fn predict_tag(tag: RegionTag, alpha: f64, beta: f64, k_max: u32) -> Result<(Prediction, Prediction)> {
    let label = RegionLabel {
        alpha,
        beta,
        tag,
        provenance: tag.provenance().to_string(),
        memberships: vec![tag],
    };
    predict(&label, k_max)
}
