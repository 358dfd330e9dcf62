//! Alternating-series bounds without a cut-off: the polynomial bounds on
//! P(t) built from autocorrelation moments, the cos² lower bound in terms
//! of ΔE alone, and the bounds on the real and imaginary parts of A(t).
//!
//! A partial sum of the cosine series is an upper bound when its last
//! included term is positive (order n ≡ 0 mod 4) and a lower bound when it
//! is negative (n ≡ 2 mod 4); the same pattern drives every bound here.

use crate::error::{Error, Result};
use crate::moments::{CorrelationMoments, MomentVector};
use crate::MAX_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Upper,
    Lower,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Upper => "upper",
            Direction::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Survival probability P(t).
    P,
    /// Amplitude magnitude |A(t)|.
    AbsA,
    /// Real part R(t).
    Re,
    /// Imaginary part I(t).
    Im,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::P => "P",
            Target::AbsA => "absA",
            Target::Re => "Re",
            Target::Im => "Im",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutoffMode {
    None,
    Fixed(f64),
    Envelope,
}

/// One sampled point of a bound curve. `value` is clamped to the physical
/// range of the target; `raw_value` keeps the unclamped polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub t: f64,
    pub value: f64,
    pub raw_value: f64,
    pub valid: bool,
}

/// A sampled bound: order, direction, target and cut-off mode, with
/// samples strictly increasing in t.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub order: usize,
    pub direction: Direction,
    pub target: Target,
    pub cutoff_mode: CutoffMode,
    pub samples: Vec<BoundSample>,
}

impl BoundCurve {
    /// Builds a curve from (t, raw, valid) points, applying the target's
    /// physical-range clamp and keeping the raw values alongside.
    pub fn from_raw_samples(
        order: usize,
        direction: Direction,
        target: Target,
        cutoff_mode: CutoffMode,
        points: impl IntoIterator<Item = (f64, f64, bool)>,
    ) -> Self {
        let (lo, hi) = match target {
            Target::P | Target::AbsA => (0.0, 1.0),
            Target::Re | Target::Im => (-1.0, 1.0),
        };
        let samples = points
            .into_iter()
            .map(|(t, raw, valid)| BoundSample {
                t,
                value: raw.clamp(lo, hi),
                raw_value: raw,
                valid: valid && raw >= lo - 1e-12 && raw <= hi + 1e-12,
            })
            .collect();
        BoundCurve {
            order,
            direction,
            target,
            cutoff_mode,
            samples,
        }
    }
}

/// Bound direction carried by a partial sum of even order n.
pub fn direction_for_order(n: usize) -> Direction {
    debug_assert!(n % 2 == 0);
    if n % 4 == 0 {
        Direction::Upper
    } else {
        Direction::Lower
    }
}

/// Partial sum of the cosine Taylor series through even order n:
/// Σ (−1)^(k/2) xᵏ/k!. Alternately an upper (n ≡ 0 mod 4) and lower
/// (n ≡ 2 mod 4) bound to cos x.
pub fn cos_partial_sum(x: f64, n: usize) -> f64 {
    debug_assert!(n % 2 == 0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in (2..=n).step_by(2) {
        term *= -x * x / ((k - 1) as f64 * k as f64);
        sum += term;
    }
    sum
}

/// The order-n polynomial bound on P(t):
/// pₙ(t) = Σ_{even k ≤ n} (−1)^(k/2) Ēₖ tᵏ, a lower bound for
/// n ≡ 2 mod 4 and an upper bound for n ≡ 0 mod 4.
///
/// Unclamped; clamping happens at curve level. Degenerate moments give
/// the constant 1.
pub fn p_bound(e: &CorrelationMoments, n: usize, t: f64) -> Result<f64> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_ORDER,
        });
    }
    if e.order() < n {
        return Err(Error::InsufficientOrder {
            have: e.order(),
            need: n,
        });
    }
    if e.is_degenerate() {
        return Ok(1.0);
    }
    // Horner in η = t²
    let eta = t * t;
    let mut value = 0.0;
    for j in (0..=n / 2).rev() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        value = value * eta + sign * e.scaled_at(2 * j)?;
    }
    Ok(value)
}

/// The improved ΔE-only lower bound P(t) ≥ cos²(ΔE·t), valid on
/// 0 ≤ ΔE·t ≤ π/2; beyond the window only the trivial 0 remains.
pub fn cos2_bound(delta_e: f64, t: f64) -> (f64, bool) {
    let x = delta_e * t;
    if x <= std::f64::consts::FRAC_PI_2 {
        let c = x.cos();
        (c * c, true)
    } else {
        (0.0, false)
    }
}

/// A bound on R(t) (even order) or I(t) (odd order) from energy moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiBound {
    pub target: Target,
    pub direction: Direction,
    pub value: f64,
}

/// Order-n bound in the chain I ≤ h₁t, R ≥ 1 − h₂t²/2,
/// I ≥ h₁t − h₃t³/6, R ≤ 1 − h₂t²/2 + h₄t⁴/24, ...
///
/// Even n bounds R(t) with the even-power partial sum; odd n bounds I(t)
/// with the odd-power partial sum. Upper for n mod 4 ∈ {0, 1}, lower for
/// n mod 4 ∈ {2, 3}.
pub fn ri_bound(h: &MomentVector, n: usize, t: f64) -> Result<RiBound> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_ORDER,
        });
    }
    if h.order() < n {
        return Err(Error::InsufficientOrder {
            have: h.order(),
            need: n,
        });
    }
    let target = if n % 2 == 0 { Target::Re } else { Target::Im };
    let direction = if n % 4 <= 1 {
        Direction::Upper
    } else {
        Direction::Lower
    };
    let start = if n % 2 == 0 { 0 } else { 1 };
    let mut value = 0.0;
    let mut t_pow = if start == 0 { 1.0 } else { t };
    let mut k = start;
    while k <= n {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        value += sign * h.scaled_at(k)? * t_pow;
        t_pow *= t * t;
        k += 2;
    }
    Ok(RiBound {
        target,
        direction,
        value,
    })
}

/// Bound curve for P(t) from the order-n series over a time grid.
pub fn p_series_curve(e: &CorrelationMoments, n: usize, grid: &[f64]) -> Result<BoundCurve> {
    let direction = direction_for_order(n);
    let mut points = Vec::with_capacity(grid.len());
    for &t in grid {
        let raw = p_bound(e, n, t)?;
        points.push((t, raw, true));
    }
    Ok(BoundCurve::from_raw_samples(
        n,
        direction,
        Target::P,
        CutoffMode::None,
        points,
    ))
}

/// Bound curve for |A(t)| = √P from the order-n series: √max(pₙ, 0) for
/// lower orders (true because P ≥ pₙ and √ is monotone), √pₙ for upper.
pub fn abs_series_curve(e: &CorrelationMoments, n: usize, grid: &[f64]) -> Result<BoundCurve> {
    let direction = direction_for_order(n);
    let mut points = Vec::with_capacity(grid.len());
    for &t in grid {
        let p = p_bound(e, n, t)?;
        // lower orders exhaust their information once pₙ < 0; upper orders
        // cannot go negative mathematically, flag if they do numerically
        let (raw, valid) = if p >= 0.0 { (p.sqrt(), true) } else { (0.0, false) };
        points.push((t, raw, valid));
    }
    Ok(BoundCurve::from_raw_samples(
        n,
        direction,
        Target::AbsA,
        CutoffMode::None,
        points,
    ))
}

/// The cos² lower bound sampled as a curve on P(t).
pub fn cos2_curve(delta_e: f64, grid: &[f64]) -> BoundCurve {
    let points = grid.iter().map(|&t| {
        let (v, valid) = cos2_bound(delta_e, t);
        (t, v, valid)
    });
    BoundCurve::from_raw_samples(2, Direction::Lower, Target::P, CutoffMode::None, points)
}

/// Bound curve for R or I from the order-n moment partial sum.
pub fn ri_curve(h: &MomentVector, n: usize, grid: &[f64]) -> Result<BoundCurve> {
    let mut points = Vec::with_capacity(grid.len());
    let mut target = Target::Re;
    let mut direction = Direction::Upper;
    for &t in grid {
        let b = ri_bound(h, n, t)?;
        target = b.target;
        direction = b.direction;
        points.push((t, b.value, true));
    }
    Ok(BoundCurve::from_raw_samples(
        n, direction, target, CutoffMode::None, points,
    ))
}
