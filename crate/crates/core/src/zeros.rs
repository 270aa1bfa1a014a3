//! Zero isolation, refinement and verification of predicted zero patterns.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::transform::{check_tol, eval, TransformKind};

/// Half-width of the sign test used to certify simplicity.
pub const SIMPLICITY_STEP: f64 = 1e-7;
/// Grid points per π-length used for scanning.
pub const GRID_PER_PI: usize = 64;
/// Amount by which predicted open intervals are shrunk at each end.
pub const ENDPOINT_SHRINK: f64 = 1e-9;
/// Relative slope floor of the simplicity certificate.
pub const SLOPE_FLOOR: f64 = 1e-6;

/// An isolated zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroRecord {
    /// Grid bracket with a sign change.
    pub lo: f64,
    pub hi: f64,
    pub abscissa: f64,
    /// `|F(abscissa)|`
    pub residual: f64,
    pub simple: bool,
}

fn checked<F>(f: &F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(x))
    }
}

/// Brent's method on a bracket with `fa * fb < 0`. Returns the abscissa
/// with the smaller residual and that residual.
fn brent<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb == 0.0 {
            return Ok((b, 0.0));
        }
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 {
            return Ok((b, fb.abs()));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = checked(f, b)?;
    }
    Ok((b, fb.abs()))
}

/// Simplicity certificate: sign change across `a ± h` and a finite
/// difference slope above `SLOPE_FLOOR * scale`.
fn is_simple<F>(f: &F, a: f64, scale: f64) -> Result<bool>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = SIMPLICITY_STEP * a.abs().max(1.0);
    let fm = checked(f, a - h)?;
    let fp = checked(f, a + h)?;
    let slope = (fp - fm) / (2.0 * h);
    Ok(fm * fp < 0.0 && slope.abs() > SLOPE_FLOOR * scale)
}

/// Samples of `F` on an increasing grid and the zeros between them.
#[derive(Debug, Clone)]
struct Scan {
    xs: Vec<f64>,
    fs: Vec<f64>,
    records: Vec<ZeroRecord>,
}

fn scan_grid<F>(f: &F, xs: Vec<f64>, tol: f64) -> Result<Scan>
where
    F: Fn(f64) -> Result<f64>,
{
    let fs: Vec<f64> = xs.iter().map(|&x| checked(f, x)).collect::<Result<_>>()?;
    let scale = fs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut records = Vec::new();
    for i in 0..xs.len() {
        if fs[i] == 0.0 {
            let lo = if i > 0 { xs[i - 1] } else { xs[i] };
            let hi = if i + 1 < xs.len() { xs[i + 1] } else { xs[i] };
            records.push(ZeroRecord {
                lo,
                hi,
                abscissa: xs[i],
                residual: 0.0,
                simple: is_simple(f, xs[i], scale)?,
            });
            continue;
        }
        if i + 1 < xs.len() && fs[i + 1] != 0.0 && fs[i] * fs[i + 1] < 0.0 {
            let (root, residual) = brent(f, xs[i], xs[i + 1], fs[i], fs[i + 1], tol)?;
            let abscissa = root.clamp(xs[i].next_up(), xs[i + 1].next_down());
            records.push(ZeroRecord {
                lo: xs[i],
                hi: xs[i + 1],
                abscissa,
                residual,
                simple: is_simple(f, abscissa, scale)?,
            });
        }
    }
    Ok(Scan { xs, fs, records })
}

fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    let step = (hi - lo) / n as f64;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + i as f64 * step })
        .collect()
}

/// Locate every sign change of `F` on a uniform grid of `[lo, hi]` and
/// refine each to a bracket of width `tol`. Records are sorted.
pub fn scan_and_refine<F>(f: &F, lo: f64, hi: f64, grid_points: usize, tol: f64) -> Result<Vec<ZeroRecord>>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::Argument(format!("empty interval ({lo}, {hi})")));
    }
    if grid_points < 8 {
        return Err(Error::Argument("at least 8 grid points are required".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("refinement tolerance {tol} must be positive")));
    }
    Ok(scan_grid(f, uniform_grid(lo, hi, grid_points), tol)?.records)
}

/// `σ_k`, the `k`-th positive root of `tan x = x`, `kπ < σ_k < (k+1/2)π`.
pub fn sigma(k: u32) -> f64 {
    let top = (k as f64 + 0.5) * PI;
    let mut x = top - 1.0 / top;
    for _ in 0..60 {
        let next = top - (1.0 / x).atan();
        if next == x {
            break;
        }
        x = next;
    }
    // Newton on sin x - x cos x, derivative x sin x.
    for _ in 0..2 {
        let (s, c) = x.sin_cos();
        let step = (s - x * c) / (x * s);
        if step.is_finite() {
            x -= step;
        }
    }
    x
}

/// `σ_1, ..., σ_{k_max}`.
pub fn sigma_roots(k_max: u32) -> Vec<f64> {
    (1..=k_max).map(sigma).collect()
}

/// Endpoint of a predicted interval as a function of `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    /// `(per_k * k + offset) * π`
    Pi { per_k: f64, offset: f64 },
    /// `σ_k`
    Sigma,
}

impl Endpoint {
    pub const fn pi(per_k: f64, offset: f64) -> Self {
        Endpoint::Pi { per_k, offset }
    }

    pub fn at(&self, k: u32) -> f64 {
        match *self {
            Endpoint::Pi { per_k, offset } => (per_k * k as f64 + offset) * PI,
            Endpoint::Sigma => sigma(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    ExactlyOne,
    AtLeastOne,
    NoneHere,
    /// `|F(p)| <= 10 tol` at the point `lo(k) = hi(k) = p(k)`.
    ExactZeroAt,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::ExactlyOne => "exactly_one",
            Expectation::AtLeastOne => "at_least_one",
            Expectation::NoneHere => "none_here",
            Expectation::ExactZeroAt => "exact_zero_at",
        })
    }
}

/// A `k`-indexed family of intervals sharing one expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalFamily {
    pub lo: Endpoint,
    pub hi: Endpoint,
    pub expectation: Expectation,
    pub k_first: u32,
    /// Last index, or unbounded (capped by the verification horizon).
    pub k_last: Option<u32>,
}

impl IntervalFamily {
    pub fn new(lo: Endpoint, hi: Endpoint, expectation: Expectation) -> Self {
        Self {
            lo,
            hi,
            expectation,
            k_first: 1,
            k_last: None,
        }
    }

    /// A single interval `(lo, hi)` given in units of π.
    pub fn single(lo: f64, hi: f64, expectation: Expectation) -> Self {
        Self {
            lo: Endpoint::pi(0.0, lo),
            hi: Endpoint::pi(0.0, hi),
            expectation,
            k_first: 1,
            k_last: Some(1),
        }
    }

    pub fn exact_zero_at(point: Endpoint) -> Self {
        Self::new(point, point, Expectation::ExactZeroAt)
    }

    pub fn starting_at(mut self, k: u32) -> Self {
        self.k_first = k;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

/// `F > 0` (or `< 0`; `>= 0` when not strict) on `(0, upto]`, where an
/// absent bound means the whole verification horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignClaim {
    pub sign: Sign,
    pub strict: bool,
    pub upto: Option<f64>,
}

impl SignClaim {
    pub fn positive_everywhere() -> Self {
        Self {
            sign: Sign::Positive,
            strict: true,
            upto: None,
        }
    }

    pub fn positive_upto(c: f64) -> Self {
        Self {
            sign: Sign::Positive,
            strict: true,
            upto: Some(c),
        }
    }

    pub fn negative_upto(c: f64) -> Self {
        Self {
            sign: Sign::Negative,
            strict: true,
            upto: Some(c),
        }
    }

    pub fn nonnegative() -> Self {
        Self {
            sign: Sign::Positive,
            strict: false,
            upto: None,
        }
    }

    fn describe(&self) -> String {
        let rel = match (self.sign, self.strict) {
            (Sign::Positive, true) => "> 0",
            (Sign::Positive, false) => ">= 0",
            (Sign::Negative, true) => "< 0",
            (Sign::Negative, false) => "<= 0",
        };
        match self.upto {
            Some(c) => format!("F {rel} on (0, {c}]"),
            None => format!("F {rel} on (0, horizon]"),
        }
    }
}

/// Predicted zero distribution of one function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub items: Vec<IntervalFamily>,
    pub k_max: u32,
    pub sign_claims: Vec<SignClaim>,
    /// No positive zeros outside the predicted intervals.
    pub exclusive: bool,
    /// At least one sign change on `(0, horizon]`.
    pub sign_change: bool,
    /// Zeros of this function and its partner share no common point.
    pub no_common_zeros: bool,
    /// Override of the default horizon `(k_max + 1)π`.
    pub horizon: Option<f64>,
    /// Names of the rules that produced the prediction.
    pub rules: Vec<String>,
}

impl Prediction {
    pub fn new(rule: &str, k_max: u32) -> Self {
        Self {
            items: Vec::new(),
            k_max,
            sign_claims: Vec::new(),
            exclusive: false,
            sign_change: false,
            no_common_zeros: false,
            horizon: None,
            rules: vec![rule.to_string()],
        }
    }

    pub fn with_item(mut self, item: IntervalFamily) -> Self {
        self.items.push(item);
        self
    }

    pub fn with_sign(mut self, claim: SignClaim) -> Self {
        self.sign_claims.push(claim);
        self
    }

    pub fn exclusive(mut self) -> Self {
        self.exclusive = true;
        self
    }

    pub fn with_sign_change(mut self) -> Self {
        self.sign_change = true;
        self
    }

    pub fn with_no_common_zeros(mut self) -> Self {
        self.no_common_zeros = true;
        self
    }

    pub fn with_horizon(mut self, h: f64) -> Self {
        self.horizon = Some(h);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty() && self.sign_claims.is_empty() && !self.sign_change
    }

    /// Conjunction of two predictions about the same function.
    pub fn merge(mut self, other: Prediction) -> Prediction {
        self.items.extend(other.items);
        self.sign_claims.extend(other.sign_claims);
        self.exclusive |= other.exclusive;
        self.sign_change |= other.sign_change;
        self.no_common_zeros |= other.no_common_zeros;
        self.k_max = self.k_max.max(other.k_max);
        self.horizon = match (self.horizon, other.horizon) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        for r in other.rules {
            if !self.rules.contains(&r) {
                self.rules.push(r);
            }
        }
        self
    }

    pub fn horizon_value(&self) -> f64 {
        self.horizon.unwrap_or((self.k_max as f64 + 1.0) * PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

/// A failed (or undecidable) expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Interval index; 0 for gaps and global claims.
    pub k: u32,
    pub interval: [f64; 2],
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalOutcome {
    pub k: u32,
    pub lo: f64,
    pub hi: f64,
    pub expectation: Expectation,
    pub found: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignOutcome {
    pub claim: SignClaim,
    /// Smallest value of the sign-adjusted function found.
    pub min_value: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub intervals: Vec<IntervalOutcome>,
    pub gaps: Vec<IntervalOutcome>,
    pub sign_claims: Vec<SignOutcome>,
    pub zeros: Vec<ZeroRecord>,
    pub violations: Vec<Violation>,
    pub indeterminate: Vec<Violation>,
    pub horizon: f64,
    /// `min |partner(z)|` over zeros `z`, when a no-common-zeros check ran.
    pub cross_residual: Option<f64>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn status(&self) -> Status {
        if !self.violations.is_empty() {
            Status::Fail
        } else if !self.indeterminate.is_empty() {
            Status::Indeterminate
        } else {
            Status::Pass
        }
    }

    fn finish(&mut self) {
        self.pass = self.violations.is_empty();
    }
}

struct ConcreteInterval {
    k: u32,
    lo: f64,
    hi: f64,
    expectation: Expectation,
    clipped: bool,
}

fn concrete_intervals(pred: &Prediction, horizon: f64) -> (Vec<ConcreteInterval>, Vec<(u32, f64)>) {
    let mut intervals = Vec::new();
    let mut points = Vec::new();
    for fam in &pred.items {
        let last = fam.k_last.unwrap_or(u32::MAX);
        let mut k = fam.k_first;
        while k <= last {
            if fam.expectation == Expectation::ExactZeroAt {
                if k > pred.k_max {
                    break;
                }
                points.push((k, fam.lo.at(k)));
            } else {
                let (lo, hi) = (fam.lo.at(k), fam.hi.at(k));
                if lo >= horizon || k > pred.k_max + 2 {
                    break;
                }
                intervals.push(ConcreteInterval {
                    k,
                    lo: lo + ENDPOINT_SHRINK,
                    hi: hi.min(horizon) - if hi <= horizon { ENDPOINT_SHRINK } else { 0.0 },
                    expectation: fam.expectation,
                    clipped: hi > horizon,
                });
            }
            k += 1;
        }
    }
    (intervals, points)
}

/// Complement of the union of `intervals` inside `(start, horizon]`.
fn gaps(intervals: &[ConcreteInterval], start: f64, horizon: f64) -> Vec<(f64, f64)> {
    let mut spans: Vec<(f64, f64)> = intervals.iter().map(|i| (i.lo, i.hi)).collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut cursor = start;
    for (lo, hi) in spans {
        if lo > cursor {
            out.push((cursor, lo.min(horizon)));
        }
        cursor = cursor.max(hi);
        if cursor >= horizon {
            break;
        }
    }
    if cursor < horizon {
        out.push((cursor, horizon));
    }
    out.into_iter().filter(|(a, b)| b > a).collect()
}

/// Minimum of `|F|` over samples strictly inside `[lo, hi]` that are
/// local minima of `|F|` on the grid.
fn interior_min_abs(scan: &Scan, lo: f64, hi: f64) -> f64 {
    let mut m = f64::INFINITY;
    for i in 1..scan.xs.len().saturating_sub(1) {
        let x = scan.xs[i];
        if x <= lo || x >= hi {
            continue;
        }
        let v = scan.fs[i].abs();
        if v <= scan.fs[i - 1].abs() && v <= scan.fs[i + 1].abs() {
            m = m.min(v);
        }
    }
    m
}

fn golden_min<F>(g: &F, mut a: f64, mut b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = g(c)?;
    let mut fd = g(d)?;
    for _ in 0..60 {
        if (b - a).abs() < 1e-12 * b.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d)?;
        }
    }
    Ok(fc.min(fd))
}

fn fmt_interval(lo: f64, hi: f64) -> [f64; 2] {
    [lo, hi]
}

/// Check a prediction against an arbitrary function, sampling `grid_per_pi`
/// points per π-length up to the horizon.
pub fn verify_function<F>(f: &F, pred: &Prediction, tol: f64, grid_per_pi: usize) -> Result<VerificationReport>
where
    F: Fn(f64) -> Result<f64>,
{
    if pred.k_max > 1000 {
        return Err(Error::Argument("k_max must not exceed 1000".into()));
    }
    let horizon = pred.horizon_value();
    let (intervals, points) = concrete_intervals(pred, horizon);

    let step = PI / grid_per_pi.max(8) as f64;
    let n = (horizon / step).ceil() as usize;
    let mut xs: Vec<f64> = (1..=n).map(|j| (j as f64 * step).min(horizon)).collect();
    for iv in &intervals {
        xs.push(iv.lo);
        xs.push(iv.hi);
    }
    for claim in &pred.sign_claims {
        if let Some(c) = claim.upto {
            if c < horizon {
                xs.push(c);
            }
        }
    }
    xs.retain(|x| *x > 0.0 && *x <= horizon);
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let refine_tol = 1e-12;
    let scan = scan_grid(f, xs, refine_tol)?;
    let zeros = scan.records.clone();
    let near = 100.0 * tol;

    let mut report = VerificationReport {
        intervals: Vec::new(),
        gaps: Vec::new(),
        sign_claims: Vec::new(),
        zeros: zeros.clone(),
        violations: Vec::new(),
        indeterminate: Vec::new(),
        horizon,
        cross_residual: None,
        pass: false,
    };

    let count_in = |lo: f64, hi: f64| -> Vec<&ZeroRecord> {
        zeros.iter().filter(|z| z.abscissa > lo && z.abscissa < hi).collect()
    };

    for iv in &intervals {
        let found = count_in(iv.lo, iv.hi);
        let n_found = found.len();
        let all_simple = found.iter().all(|z| z.simple);
        let tangent = n_found == 0 && interior_min_abs(&scan, iv.lo, iv.hi) < near;
        let status = match iv.expectation {
            Expectation::ExactlyOne if iv.clipped => {
                if n_found <= 1 {
                    Status::Pass
                } else {
                    Status::Fail
                }
            }
            Expectation::ExactlyOne => {
                if n_found == 1 && all_simple {
                    Status::Pass
                } else if tangent {
                    Status::Indeterminate
                } else {
                    Status::Fail
                }
            }
            Expectation::AtLeastOne => {
                if n_found >= 1 || iv.clipped {
                    Status::Pass
                } else if tangent {
                    Status::Indeterminate
                } else {
                    Status::Fail
                }
            }
            Expectation::NoneHere => {
                if n_found > 0 {
                    Status::Fail
                } else if interior_min_abs(&scan, iv.lo, iv.hi) < near {
                    Status::Indeterminate
                } else {
                    Status::Pass
                }
            }
            Expectation::ExactZeroAt => Status::Pass,
        };
        let found_text = if n_found == 1 && !all_simple {
            "1 (not certified simple)".to_string()
        } else {
            format!("{n_found}")
        };
        let v = Violation {
            k: iv.k,
            interval: fmt_interval(iv.lo, iv.hi),
            expected: iv.expectation.to_string(),
            found: found_text,
        };
        match status {
            Status::Fail => report.violations.push(v),
            Status::Indeterminate => report.indeterminate.push(v),
            Status::Pass => {}
        }
        report.intervals.push(IntervalOutcome {
            k: iv.k,
            lo: iv.lo,
            hi: iv.hi,
            expectation: iv.expectation,
            found: n_found,
            status,
        });
    }

    for (k, p) in points {
        let v = f(p)?;
        let status = if v.abs() <= 10.0 * tol {
            Status::Pass
        } else {
            Status::Fail
        };
        if status == Status::Fail {
            report.violations.push(Violation {
                k,
                interval: [p, p],
                expected: Expectation::ExactZeroAt.to_string(),
                found: format!("|F| = {:e}", v.abs()),
            });
        }
        report.intervals.push(IntervalOutcome {
            k,
            lo: p,
            hi: p,
            expectation: Expectation::ExactZeroAt,
            found: usize::from(status == Status::Pass),
            status,
        });
    }

    if pred.exclusive {
        let start = scan.xs.first().copied().unwrap_or(horizon);
        for (lo, hi) in gaps(&intervals, 0.0, horizon) {
            let lo = lo.max(0.0);
            let found = zeros.iter().filter(|z| z.abscissa > lo && z.abscissa <= hi).count();
            let tangent = found == 0 && interior_min_abs(&scan, lo.max(start), hi) < near;
            let status = if found > 0 {
                Status::Fail
            } else if tangent {
                Status::Indeterminate
            } else {
                Status::Pass
            };
            let v = Violation {
                k: 0,
                interval: fmt_interval(lo, hi),
                expected: "no zeros".into(),
                found: format!("{found}"),
            };
            match status {
                Status::Fail => report.violations.push(v),
                Status::Indeterminate => report.indeterminate.push(v),
                Status::Pass => {}
            }
            report.gaps.push(IntervalOutcome {
                k: 0,
                lo,
                hi,
                expectation: Expectation::NoneHere,
                found,
                status,
            });
        }
    }

    for claim in &pred.sign_claims {
        let upto = claim.upto.unwrap_or(horizon).min(horizon);
        let sgn = match claim.sign {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        };
        let mut min_value = f64::INFINITY;
        let mut min_index = None;
        for (i, (&x, &v)) in scan.xs.iter().zip(&scan.fs).enumerate() {
            if x <= upto && sgn * v < min_value {
                min_value = sgn * v;
                min_index = Some(i);
            }
        }
        if let Some(i) = min_index {
            let interior = i > 0 && i + 1 < scan.xs.len() && scan.xs[i] < upto;
            if min_value < near && interior {
                let g = |x: f64| f(x).map(|v| sgn * v);
                let refined = golden_min(&g, scan.xs[i - 1], scan.xs[i + 1].min(upto))?;
                min_value = min_value.min(refined);
            }
        }
        let status = if claim.strict {
            if min_value <= 0.0 {
                Status::Fail
            } else if min_value < 10.0 * tol && min_index.is_some_and(|i| i > 0) {
                Status::Indeterminate
            } else {
                Status::Pass
            }
        } else if min_value < -10.0 * tol {
            Status::Fail
        } else {
            Status::Pass
        };
        let v = Violation {
            k: 0,
            interval: [0.0, upto],
            expected: claim.describe(),
            found: format!("min {:e}", sgn * min_value),
        };
        match status {
            Status::Fail => report.violations.push(v),
            Status::Indeterminate => report.indeterminate.push(v),
            Status::Pass => {}
        }
        report.sign_claims.push(SignOutcome {
            claim: *claim,
            min_value: sgn * min_value,
            status,
        });
    }

    if pred.sign_change && zeros.is_empty() {
        report.violations.push(Violation {
            k: 0,
            interval: [0.0, horizon],
            expected: "at least one sign change".into(),
            found: "0".into(),
        });
    }

    report.finish();
    Ok(report)
}

/// Check a prediction for one transform of `d`.
pub fn verify_pattern(d: &Density, kind: TransformKind, pred: &Prediction, tol: f64) -> Result<VerificationReport> {
    verify_pattern_with_grid(d, kind, pred, tol, GRID_PER_PI)
}

pub fn verify_pattern_with_grid(
    d: &Density,
    kind: TransformKind,
    pred: &Prediction,
    tol: f64,
    grid_per_pi: usize,
) -> Result<VerificationReport> {
    check_tol(tol)?;
    let f = |x: f64| eval(d, kind, x, tol).map(|r| r.value);
    verify_function(&f, pred, tol, grid_per_pi)
}

/// Verify predictions for a function pair (typically `U` and `V`) and, if
/// either prediction asks for it, that they share no zero: `|G(z)| > tol`
/// at every zero `z` of `F`, and vice versa.
pub fn verify_pair<F, G>(
    f: &F,
    pred_f: &Prediction,
    g: &G,
    pred_g: &Prediction,
    tol: f64,
    grid_per_pi: usize,
) -> Result<(VerificationReport, VerificationReport)>
where
    F: Fn(f64) -> Result<f64>,
    G: Fn(f64) -> Result<f64>,
{
    let mut rf = verify_function(f, pred_f, tol, grid_per_pi)?;
    let mut rg = verify_function(g, pred_g, tol, grid_per_pi)?;
    if pred_f.no_common_zeros || pred_g.no_common_zeros {
        let mut cross = f64::INFINITY;
        for z in &rf.zeros {
            cross = cross.min(g(z.abscissa)?.abs());
        }
        for z in &rg.zeros {
            cross = cross.min(f(z.abscissa)?.abs());
        }
        rf.cross_residual = Some(cross);
        rg.cross_residual = Some(cross);
        if cross <= tol {
            let v = Violation {
                k: 0,
                interval: [0.0, rf.horizon.max(rg.horizon)],
                expected: "no common zeros".into(),
                found: format!("min cross residual {cross:e}"),
            };
            rf.violations.push(v.clone());
            rg.violations.push(v);
        }
        rf.finish();
        rg.finish();
    }
    Ok((rf, rg))
}

/// True iff, over the common range of the two lists, their elements
/// strictly alternate.
pub fn interlace_check(a: &[f64], b: &[f64]) -> Result<bool> {
    for list in [a, b] {
        if let Some(i) = list.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::Unsorted(i + 1));
        }
    }
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }
    let lo = a[0].max(b[0]);
    let hi = a[a.len() - 1].min(b[b.len() - 1]);
    let mut merged: Vec<(f64, u8)> = a
        .iter()
        .map(|&x| (x, 0u8))
        .chain(b.iter().map(|&x| (x, 1u8)))
        .filter(|(x, _)| *x >= lo && *x <= hi)
        .collect();
    merged.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(merged.windows(2).all(|w| w[0].1 != w[1].1 && w[0].0 < w[1].0))
}

/// Format a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub const ZERO_CSV_HEADER: &str = "density,kind,k,lo,hi,abscissa,residual,simple";

/// Write zero records as CSV with the mandatory header row.
pub fn write_zero_csv<W: Write>(
    out: &mut W,
    density: &str,
    kind: TransformKind,
    records: &[ZeroRecord],
) -> std::io::Result<()> {
    writeln!(out, "{ZERO_CSV_HEADER}")?;
    for (i, r) in records.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(density),
            kind,
            i + 1,
            fmt17(r.lo),
            fmt17(r.hi),
            fmt17(r.abscissa),
            fmt17(r.residual),
            r.simple
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
