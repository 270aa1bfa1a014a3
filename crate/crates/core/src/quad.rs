//! Quadrature primitives for integrals over sub-intervals of [0, 1].
//!
//! Integrands receive both the abscissa `t` and its complement `s = 1 - t`,
//! each computed without cancellation, so that algebraic singularities at
//! `t = 1` can be resolved down to distances far below the spacing of
//! floating-point numbers near one.
//!
//! Interior panels use an adaptive 21-point Gauss-Kronrod rule; the two end
//! panels of [0, 1] use the tanh-sinh (double exponential) rule, which
//! absorbs integrable endpoint singularities without knowing their order.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// A sub-interval `[a, b]` of `[0, 1]` together with the exact complements
/// `1 - a` and `1 - b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub a_c: f64,
    pub b_c: f64,
}

impl Panel {
    pub fn new(a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            a_c: 1.0 - a,
            b_c: 1.0 - b,
        }
    }

    pub fn unit() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            a_c: 1.0,
            b_c: 0.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    fn split(&self) -> (Panel, Panel) {
        let m = 0.5 * (self.a + self.b);
        let m_c = 0.5 * (self.a_c + self.b_c);
        (
            Panel {
                a: self.a,
                b: m,
                a_c: self.a_c,
                b_c: m_c,
            },
            Panel {
                a: m,
                b: self.b,
                a_c: m_c,
                b_c: self.b_c,
            },
        )
    }
}

/// Value and absolute error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    /// Integral of |g|, used to scale rounding-level error floors.
    pub magnitude: f64,
}

// Nodes and weights of the 10-point Gauss / 21-point Kronrod pair (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn checked(v: f64, t: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(t))
    }
}

/// One application of the Gauss-Kronrod pair on `p`.
pub fn gauss_kronrod21<G>(g: &G, p: Panel) -> Result<QuadOutcome>
where
    G: Fn(f64, f64) -> f64,
{
    let half = 0.5 * (p.b - p.a);
    let center = 0.5 * (p.a + p.b);
    let center_c = 0.5 * (p.a_c + p.b_c);

    let fc = checked(g(center, center_c), center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs = fc.abs() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = checked(g(center - dx, center_c + dx), center - dx)?;
        let f2 = checked(g(center + dx, center_c - dx), center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Ok(QuadOutcome {
        value,
        error,
        magnitude: abs * half.abs(),
    })
}

/// Adaptive bisection driven by [`gauss_kronrod21`].
pub fn adaptive_gauss_kronrod<G>(g: &G, p: Panel, target: f64, max_depth: u32) -> Result<QuadOutcome>
where
    G: Fn(f64, f64) -> f64,
{
    let whole = gauss_kronrod21(g, p)?;
    let floor = 50.0 * f64::EPSILON * whole.magnitude;
    if whole.error <= target.max(floor) {
        return Ok(whole);
    }
    if max_depth == 0 {
        return Err(Error::QuadratureNonConvergence {
            estimate: whole.value,
            error: whole.error,
        });
    }
    let (left, right) = p.split();
    let l = adaptive_gauss_kronrod(g, left, 0.5 * target, max_depth - 1)?;
    let r = adaptive_gauss_kronrod(g, right, 0.5 * target, max_depth - 1)?;
    Ok(QuadOutcome {
        value: l.value + r.value,
        error: l.error + r.error,
        magnitude: l.magnitude + r.magnitude,
    })
}

const DE_MAX_LEVEL: u32 = 9;
const DE_TAU_MAX: f64 = 6.5;

/// Tanh-sinh node at `tau >= 0`: distance from the nearer endpoint of
/// [-1, 1] and the transformed weight.
#[inline]
fn de_node(tau: f64) -> (f64, f64) {
    let u = FRAC_PI_2 * tau.sinh();
    let q = (-2.0 * u).exp();
    let dist = 2.0 * q / (1.0 + q);
    let weight = FRAC_PI_2 * tau.cosh() * 4.0 * q / ((1.0 + q) * (1.0 + q));
    (dist, weight)
}

/// Sum of g over the nodes `tau = k h` for `k` in the given stride, on both
/// sides of the centre. Returns (sum, sum of |terms|).
fn de_level_sum<G>(g: &G, p: Panel, h: f64, first: usize, stride: usize) -> Result<(f64, f64)>
where
    G: Fn(f64, f64) -> f64,
{
    let half = 0.5 * (p.b - p.a);
    let mut acc = CompensatedSum::new();
    let mut abs = 0.0;
    let mut k = first;
    loop {
        let tau = k as f64 * h;
        if tau > DE_TAU_MAX {
            break;
        }
        let (unit_dist, w) = de_node(tau);
        let dist = half * unit_dist;
        if dist <= f64::MIN_POSITIVE || w == 0.0 {
            break;
        }
        if k == 0 {
            let t = 0.5 * (p.a + p.b);
            let s = 0.5 * (p.a_c + p.b_c);
            let v = checked(g(t, s), t)? * w;
            acc.add(v);
            abs += v.abs();
        } else {
            // Node near b, then its mirror near a.
            let (t, s) = (p.b - dist, p.b_c + dist);
            let vr = checked(g(t, s), t)? * w;
            let (t, s) = (p.a + dist, p.a_c - dist);
            let vl = checked(g(t, s), t)? * w;
            acc.add(vr);
            acc.add(vl);
            abs += vr.abs() + vl.abs();
        }
        k += stride;
    }
    Ok((acc.value(), abs))
}

/// Tanh-sinh quadrature on `p`, refined by halving the step until two
/// successive levels agree to `target` (or to rounding level).
pub fn double_exponential<G>(g: &G, p: Panel, target: f64) -> Result<QuadOutcome>
where
    G: Fn(f64, f64) -> f64,
{
    let half = 0.5 * (p.b - p.a);
    let mut h = 0.5;
    let (mut sum, mut abs) = de_level_sum(g, p, h, 0, 1)?;
    let mut estimate = half * h * sum;
    let mut last_diff = f64::INFINITY;
    for level in 1..=DE_MAX_LEVEL {
        h *= 0.5;
        let (s, a) = de_level_sum(g, p, h, 1, 2)?;
        sum += s;
        abs += a;
        let refined = half * h * sum;
        let diff = (refined - estimate).abs();
        estimate = refined;
        let magnitude = half * h * abs;
        let floor = 50.0 * f64::EPSILON * magnitude;
        if level >= 3 && diff <= target.max(floor) {
            // Convergence is roughly quadratic per level; once the difference
            // has dropped below the previous one, it bounds the remaining error.
            let error = if diff < last_diff { diff } else { last_diff };
            return Ok(QuadOutcome {
                value: estimate,
                error: error.max(f64::EPSILON * magnitude),
                magnitude,
            });
        }
        last_diff = diff;
    }
    Err(Error::QuadratureNonConvergence {
        estimate,
        error: last_diff,
    })
}

/// Integrate `g` over [0, 1] by splitting at the half-periods `j pi / freq`
/// of an oscillating kernel and at the supplied `breakpoints`.
///
/// The first and last panels go through the double exponential rule; all
/// interior panels through adaptive Gauss-Kronrod. Panel sums are
/// accumulated with compensation.
pub fn integrate_unit<G>(g: &G, freq: f64, breakpoints: &[f64], target: f64) -> Result<QuadOutcome>
where
    G: Fn(f64, f64) -> f64,
{
    integrate_unit_with_ends(g, None, None, freq, breakpoints, target)
}

/// Algebraic endpoint behaviour `g = dist^exponent * regular(t, s)`,
/// `-1 < exponent < 0`, where `dist` is the distance to the end.
pub struct EndpointSingularity<'a> {
    pub exponent: f64,
    pub regular: &'a dyn Fn(f64, f64) -> f64,
}

/// End panel `[0, w]` (`left`) or `[1 - w, 1]` with the singular factor
/// integrated exactly: `dist = w u^(1/q)`, `q = exponent + 1`, turns
/// `∫ dist^(q-1) r d(dist)` into `(w^q / q) ∫_0^1 r du`.
fn algebraic_end_panel(p: Panel, left: bool, sing: &EndpointSingularity, target: f64) -> Result<QuadOutcome> {
    let q = sing.exponent + 1.0;
    let w = p.width();
    let scale = w.powf(q) / q;
    let h = |u: f64, uc: f64| {
        let frac = if u < 0.5 {
            u.powf(1.0 / q)
        } else {
            ((-uc).ln_1p() / q).exp()
        };
        let d = w * frac;
        let (t, s) = if left {
            (p.a + d, p.a_c - d)
        } else {
            (p.b - d, p.b_c + d)
        };
        (sing.regular)(t, s)
    };
    let out = double_exponential(&h, Panel::unit(), target / scale)?;
    Ok(QuadOutcome {
        value: scale * out.value,
        error: scale * out.error,
        magnitude: scale * out.magnitude,
    })
}

/// [`integrate_unit`] with optional exact treatment of algebraic
/// singularities at 0 and 1.
pub fn integrate_unit_with_ends<G>(
    g: &G,
    left: Option<EndpointSingularity>,
    right: Option<EndpointSingularity>,
    freq: f64,
    breakpoints: &[f64],
    target: f64,
) -> Result<QuadOutcome>
where
    G: Fn(f64, f64) -> f64,
{
    let left = left.filter(|e| e.exponent < 0.0 && e.exponent > -1.0);
    let right = right.filter(|e| e.exponent < 0.0 && e.exponent > -1.0);
    let breaks: Vec<f64> = breakpoints.iter().copied().filter(|&c| c > 0.0 && c < 1.0).collect();
    let mut cuts: Vec<f64> = Vec::new();
    if freq > 0.0 {
        let step = std::f64::consts::PI / freq;
        // Kernel cuts never come within a quarter period of the ends or of
        // a breakpoint: a sliver panel would push an endpoint singularity
        // into an interior Gauss-Kronrod panel.
        let clearance = 0.25 * step;
        let n = (1.0 / step).floor() as usize;
        cuts.extend(
            (1..=n)
                .map(|j| j as f64 * step)
                .filter(|&c| c < 1.0 - clearance && breaks.iter().all(|b| (b - c).abs() >= clearance)),
        );
    }
    cuts.extend(breaks);
    if cuts.is_empty() && left.is_some() && right.is_some() {
        // One panel cannot carry both substitutions.
        cuts.push(0.5);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(0.0);
    edges.extend(cuts);
    edges.push(1.0);

    let panels: Vec<Panel> = edges
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let a_c = if i == 0 { 1.0 } else { 1.0 - w[0] };
            let b_c = if w[1] == 1.0 { 0.0 } else { 1.0 - w[1] };
            Panel {
                a: w[0],
                b: w[1],
                a_c,
                b_c,
            }
        })
        .filter(|p| p.width() > 0.0)
        .collect();

    let n = panels.len();
    let per_panel = target / (n as f64).sqrt();
    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    let mut magnitude = 0.0;
    for (i, p) in panels.iter().enumerate() {
        let end = match (&left, &right) {
            (Some(e), _) if i == 0 => Some((e, true)),
            (_, Some(e)) if i + 1 == n => Some((e, false)),
            _ => None,
        };
        let out = if let Some((e, is_left)) = end {
            algebraic_end_panel(*p, is_left, e, per_panel)?
        } else if i == 0 || i + 1 == n {
            double_exponential(g, *p, per_panel)?
        } else {
            adaptive_gauss_kronrod(g, *p, per_panel, 12)?
        };
        value.add(out.value);
        error += out.error;
        magnitude += out.magnitude;
    }
    Ok(QuadOutcome {
        value: value.value(),
        error: error + f64::EPSILON * magnitude,
        magnitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_is_exact_for_polynomials() {
        let out = gauss_kronrod21(&|t: f64, _s: f64| t.powi(7) - 3.0 * t * t, Panel::new(0.0, 1.0)).unwrap();
        assert!((out.value - (1.0 / 8.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn double_exponential_handles_strong_endpoint_singularities() {
        // int_0^1 t^(-0.9) dt = 10 and int_0^1 (1-t)^(-0.9) dt = 10
        let left = double_exponential(&|t: f64, _s: f64| t.powf(-0.9), Panel::unit(), 1e-14).unwrap();
        assert!((left.value - 10.0).abs() < 1e-11, "{}", left.value);
        let right = double_exponential(&|_t: f64, s: f64| s.powf(-0.9), Panel::unit(), 1e-14).unwrap();
        assert!((right.value - 10.0).abs() < 1e-11, "{}", right.value);
    }

    #[test]
    fn no_sliver_panel_at_the_right_end() {
        // 13 * (1/13) rounds below 1; the singular end must stay in a DE panel.
        let x = 13.0 * std::f64::consts::PI;
        let g = |_t: f64, s: f64| s.powf(-0.9) * (x * (1.0 - s)).cos();
        let out = integrate_unit(&g, x, &[], 1e-12).unwrap();
        let fine = integrate_unit(&g, x * (1.0 + 1e-15), &[], 1e-12).unwrap();
        assert!((out.value - fine.value).abs() < 1e-10);
    }

    #[test]
    fn complement_is_tracked_exactly_near_one() {
        // Integrand depends only on s; any cancellation in 1 - t would show up
        // as a wrong value for this strongly singular weight.
        let out = double_exponential(&|_t: f64, s: f64| s.powf(-0.95), Panel::new(0.5, 1.0), 1e-13).unwrap();
        let exact = 0.5f64.powf(0.05) / 0.05;
        assert!((out.value - exact).abs() < 1e-9 * exact, "{} vs {exact}", out.value);
    }

    #[test]
    fn oscillatory_integral_of_cosine() {
        let x = 437.0;
        let out = integrate_unit(&|t: f64, _s: f64| (x * t).cos(), x, &[], 1e-14).unwrap();
        assert!((out.value - x.sin() / x).abs() < 1e-15);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let g = |t: f64, _s: f64| if t < 0.3 { 2.0 } else { 1.0 };
        let out = integrate_unit(&g, 0.0, &[0.3], 1e-14).unwrap();
        assert!((out.value - 1.3).abs() < 1e-14);
    }
}
