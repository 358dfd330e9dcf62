//! Adaptive quadrature built on the 15-point Gauss–Kronrod rule, with
//! transforms for improper integrals, adaptive Simpson for tabulated data,
//! and oscillatory Fourier integrals evaluated over half-period panels with
//! epsilon-algorithm acceleration of the alternating tail.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and budget for one quadrature call.
#[derive(Debug, Clone, Copy)]
pub struct QuadSettings {
    /// Target absolute tolerance per integral.
    pub abs_tol: f64,
    /// Target relative tolerance (the looser of the two wins).
    pub rel_tol: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_intervals: 4096,
        }
    }
}

impl QuadSettings {
    pub fn with_tol(tol: f64) -> Self {
        QuadSettings {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    fn goal(&self, value_estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_estimate.abs())
    }
}

/// Value and error estimate of a finished quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

// 15-point Kronrod abscissae (positive half), QUADPACK values.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Gauss–Kronrod 7-15 evaluation on [a, b]; returns (value, error).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = WG[3] * f_center;
    let mut res_kronrod = WGK[7] * f_center;
    let mut res_abs = res_kronrod.abs();

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    for j in 0..3 {
        let idx = 2 * j + 1;
        let x = half * XGK[idx];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[idx] = f1;
        fv2[idx] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let idx = 2 * j;
        let x = half * XGK[idx];
        let f1 = f(center - x);
        let f2 = f(center + x);
        if idx < 7 {
            fv1[idx] = f1;
            fv2[idx] = f2;
        }
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    let abs_half = half.abs();
    (value, rescale_error(err, res_abs * abs_half, res_asc * abs_half))
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn refinable(a: f64, b: f64) -> bool {
    let mid = 0.5 * (a + b);
    mid > a && mid < b
}

/// Globally adaptive Gauss–Kronrod integration of `f` over [a, b].
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, s: &QuadSettings) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let (value, err) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { err, a, b, value });
    let mut sum_val = value;
    let mut sum_err = err;
    // contributions from intervals too narrow to split further
    let mut stuck_err = 0.0f64;

    while sum_err + stuck_err > s.goal(sum_val) {
        if heap.len() >= s.max_intervals {
            return Err(Error::QuadratureFailure {
                requested: s.goal(sum_val),
                achieved: sum_err + stuck_err,
            });
        }
        let seg = match heap.pop() {
            Some(seg) => seg,
            None => {
                return Err(Error::QuadratureFailure {
                    requested: s.goal(sum_val),
                    achieved: stuck_err,
                })
            }
        };
        if !refinable(seg.a, seg.b) {
            sum_err -= seg.err;
            stuck_err += seg.err;
            continue;
        }
        let mid = 0.5 * (seg.a + seg.b);
        let (v1, e1) = gk15(f, seg.a, mid);
        let (v2, e2) = gk15(f, mid, seg.b);
        sum_val += v1 + v2 - seg.value;
        sum_err += e1 + e2 - seg.err;
        heap.push(Segment {
            err: e1,
            a: seg.a,
            b: mid,
            value: v1,
        });
        heap.push(Segment {
            err: e2,
            a: mid,
            b: seg.b,
            value: v2,
        });
    }

    // recompute the value with compensation to undo incremental drift
    let mut total = 0.0f64;
    let mut comp = 0.0f64;
    for seg in heap.iter() {
        let t = seg.value;
        let sum = total + t;
        if total.abs() >= t.abs() {
            comp += (total - sum) + t;
        } else {
            comp += (t - sum) + total;
        }
        total = sum;
    }
    Ok(Quadrature {
        value: total + comp,
        abs_error: sum_err + stuck_err,
    })
}

/// ∫ₐ^∞ f(E) dE via E = a + s·u/(1−u), u ∈ [0, 1).
pub fn integrate_to_infinity(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    scale: f64,
    s: &QuadSettings,
) -> Result<Quadrature> {
    debug_assert!(scale > 0.0);
    let g = move |u: f64| {
        let om = 1.0 - u;
        if om <= 0.0 {
            return 0.0;
        }
        let e = a + scale * u / om;
        let w = scale / (om * om);
        let v = f(e) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(&g, 0.0, 1.0, s)
}

/// ∫ₐ^∞ f(E) dE via E = a + s·(u/(1−u))², which flattens power-law tails
/// whose moments sit close to the divergence boundary.
pub fn integrate_to_infinity_sq(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    scale: f64,
    s: &QuadSettings,
) -> Result<Quadrature> {
    debug_assert!(scale > 0.0);
    let g = move |u: f64| {
        let om = 1.0 - u;
        if om <= 0.0 || u <= 0.0 {
            return 0.0;
        }
        let r = u / om;
        let e = a + scale * r * r;
        let w = scale * 2.0 * r / (om * om);
        let v = f(e) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(&g, 0.0, 1.0, s)
}

/// Adaptive Simpson integration (used for tabulated densities).
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || !refinable(a, b) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure {
            requested: tol,
            achieved: delta.abs() / 15.0,
        });
    }
    let lv = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let rv = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(lv + rv)
}

/// ∫ₐᵇ f(E)·e^(−iEt) dE for t ≥ 0 over a finite range.
///
/// Oscillatory ranges are split into half-period panels of width π/t so
/// each panel is quadrature-friendly.
pub fn fourier_finite(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    t: f64,
    s: &QuadSettings,
) -> Result<Complex64> {
    debug_assert!(t >= 0.0 && b >= a);
    if t == 0.0 {
        let q = integrate(f, a, b, s)?;
        return Ok(Complex64::new(q.value, 0.0));
    }
    let half_periods = (b - a) * t / std::f64::consts::PI;
    if half_periods <= 2.0 {
        let re = integrate(&|e| f(e) * (e * t).cos(), a, b, s)?;
        let im = integrate(&|e| f(e) * (e * t).sin(), a, b, s)?;
        return Ok(Complex64::new(re.value, -im.value));
    }
    let n_panels = half_periods.ceil() as usize;
    let width = (b - a) / n_panels as f64;
    let panel_settings = QuadSettings {
        abs_tol: s.abs_tol / n_panels as f64,
        rel_tol: s.rel_tol,
        max_intervals: s.max_intervals,
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for k in 0..n_panels {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == n_panels {
            b
        } else {
            a + (k + 1) as f64 * width
        };
        let re = integrate(&|e| f(e) * (e * t).cos(), lo, hi, &panel_settings)?;
        let im = integrate(&|e| f(e) * (e * t).sin(), lo, hi, &panel_settings)?;
        let term = Complex64::new(re.value, -im.value);
        // Neumaier on both components
        let s1 = sum + term;
        comp += Complex64::new(
            if sum.re.abs() >= term.re.abs() {
                (sum.re - s1.re) + term.re
            } else {
                (term.re - s1.re) + sum.re
            },
            if sum.im.abs() >= term.im.abs() {
                (sum.im - s1.im) + term.im
            } else {
                (term.im - s1.im) + sum.im
            },
        );
        sum = s1;
    }
    Ok(sum + comp)
}

/// ∫ₐ^∞ f(E)·e^(−iEt) dE for t > 0 and an absolutely integrable, decaying f.
///
/// Consecutive half-period panels pick up a phase of π, so their partial
/// sums form an alternating-type sequence; Wynn's epsilon algorithm
/// extrapolates the tail instead of summing it out.
pub fn fourier_semi_infinite(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    t: f64,
    s: &QuadSettings,
) -> Result<Complex64> {
    debug_assert!(t > 0.0);
    let width = std::f64::consts::PI / t;
    let panel_settings = QuadSettings {
        abs_tol: s.abs_tol / 100.0,
        rel_tol: s.rel_tol,
        max_intervals: s.max_intervals,
    };
    let max_panels = 4000usize;
    let mut sums: Vec<Complex64> = Vec::new();
    let mut running = Complex64::new(0.0, 0.0);
    let mut previous_estimate: Option<Complex64> = None;
    for k in 0..max_panels {
        let lo = a + k as f64 * width;
        let hi = lo + width;
        let re = integrate(&|e| f(e) * (e * t).cos(), lo, hi, &panel_settings)?;
        let im = integrate(&|e| f(e) * (e * t).sin(), lo, hi, &panel_settings)?;
        let term = Complex64::new(re.value, -im.value);
        running += term;
        sums.push(running);

        if term.norm() < 0.05 * s.abs_tol && k >= 3 {
            return Ok(running);
        }
        if sums.len() >= 4 {
            let estimate = wynn_limit(&sums);
            if let Some(prev) = previous_estimate {
                if (estimate - prev).norm() < 0.5 * s.abs_tol {
                    return Ok(estimate);
                }
            }
            previous_estimate = Some(estimate);
        }
    }
    Err(Error::QuadratureFailure {
        requested: s.abs_tol,
        achieved: f64::NAN,
    })
}

/// Wynn epsilon extrapolation of a sequence of partial sums; returns the
/// deepest even-column entry.
fn wynn_limit(sums: &[Complex64]) -> Complex64 {
    // cap the table; the most recent sums carry the asymptotic behaviour
    let window = 24usize.min(sums.len());
    let tail = &sums[sums.len() - window..];
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); window + 1];
    let mut cur: Vec<Complex64> = tail.to_vec();
    let mut best = *cur.last().unwrap();
    let mut col = 0usize;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff.norm() < 1e-280 {
                // sequence already converged at this depth
                return cur[j + 1];
            }
            next.push(prev[j + 1] + diff.inv());
        }
        prev = std::mem::replace(&mut cur, next);
        col += 1;
        if col % 2 == 0 {
            best = *cur.last().unwrap();
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: QuadSettings = QuadSettings {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_intervals: 4096,
    };

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(&|x| x * x, 0.0, 1.0, &S).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2; nodes never touch the endpoint
        let q = integrate(&|x| 1.0 / x.sqrt(), 0.0, 1.0, &S).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9, "got {}", q.value);
    }

    #[test]
    fn improper_exponential() {
        let q = integrate_to_infinity(&|x| (-x).exp(), 0.0, 1.0, &S).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn improper_power_tail_sq_transform() {
        // ∫₀^∞ x²(1+x)^{-7/2} dx = 16/15
        let q = integrate_to_infinity_sq(&|x| x * x * (1.0 + x).powf(-3.5), 0.0, 1.0, &S).unwrap();
        assert!((q.value - 16.0 / 15.0).abs() < 1e-11, "got {}", q.value);
    }

    #[test]
    fn simpson_polynomial() {
        let v = adaptive_simpson(&|x| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-11);
    }

    #[test]
    fn fourier_box() {
        // ∫₀¹ e^{-iEt} dE = (1 - e^{-it})/(it)
        for &t in &[0.5, 5.0, 50.0] {
            let got = fourier_finite(&|_| 1.0, 0.0, 1.0, t, &S).unwrap();
            let want = (Complex64::new(1.0, 0.0) - (Complex64::new(0.0, -t)).exp())
                / Complex64::new(0.0, t);
            assert!((got - want).norm() < 1e-10, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn fourier_exponential_tail() {
        // ∫₀^∞ e^{-E} e^{-iEt} dE = 1/(1+it)
        for &t in &[0.3, 3.0, 40.0] {
            let got = fourier_semi_infinite(&|e| (-e).exp(), 0.0, t, &S).unwrap();
            let want = Complex64::new(1.0, t).inv();
            assert!((got - want).norm() < 1e-9, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn fourier_power_tail_accelerated() {
        // ∫₀^∞ (1+E)^{-2} e^{-iEt} dE at t=2 against a brute-force
        // finite-range value with a tiny analytic tail bound
        let t = 2.0;
        let got = fourier_semi_infinite(&|e| (1.0 + e).powi(-2), 0.0, t, &S).unwrap();
        let brute = fourier_finite(&|e| (1.0 + e).powi(-2), 0.0, 4000.0, t, &S).unwrap();
        assert!((got - brute).norm() < 1e-6, "{got} vs {brute}");
    }

    #[test]
    fn failure_reports_achieved_error() {
        let tight = QuadSettings {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            max_intervals: 32,
        };
        let err = integrate(&|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tight).unwrap_err();
        match err {
            Error::QuadratureFailure { achieved, .. } => assert!(achieved > 0.0),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
