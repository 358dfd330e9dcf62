//! Envelope optimization over the cut-off family.
//!
//! Each fixed cut-off c gives a bound y(t, c) that is good only on a
//! limited time range; the best bound the family offers is its envelope,
//! found from ∂c y(t, c) = 0. In scaled moments that condition reads
//!
//! ```text
//! Σ_{even k ≤ n} (−1)^(k/2) Ēₖ tᵏ = ( Σ_{even k ≤ n} (−1)^(k/2) Bₖ tᵏ )²
//! ```
//!
//! whose positive roots t(c) are the envelope times. n = 2 and n = 4 have
//! closed forms; higher orders go through a real-root solve of the
//! residual polynomial in η = t². Finite energy ranges match the envelope
//! to the plain series bound below t(M); purely discrete spectra have no
//! envelope at all and get a piecewise schedule of constant-c bounds.

use crate::cutoff_bounds::{amplitude_curve, CutoffBoundSpec};
use crate::distributions::EnergyDistribution;
use crate::error::{Error, Result};
use crate::grid::{cutoff_grid, time_grid};
use crate::moments::{b_from_h, e_from_h, ebar_from_b, CorrelationMoments, EdgeMoments};
use crate::quad::QuadSettings;
use crate::series_bounds::{
    cos2_bound, direction_for_order, p_bound, BoundCurve, CutoffMode, Direction, Target,
};
use crate::special::inv_factorial;
use crate::MAX_ORDER;

// ---------------------------------------------------------------------------
// polynomial helpers (ascending coefficients)

fn poly_trim(coeffs: &[f64]) -> &[f64] {
    let mut end = coeffs.len();
    while end > 1 && coeffs[end - 1] == 0.0 {
        end -= 1;
    }
    &coeffs[..end]
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    let mut v = 0.0;
    for &c in coeffs.iter().rev() {
        v = v * x + c;
    }
    v
}

/// Value together with Σ|cⱼ||x|ʲ, the scale against which "zero" is judged.
fn poly_eval_mag(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut mag = 0.0;
    for &c in coeffs.iter().rev() {
        v = v * x + c;
        mag = mag * x.abs() + c.abs();
    }
    (v, mag)
}

fn poly_deriv(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| j as f64 * c)
        .collect()
}

fn bisect_root(coeffs: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = poly_eval(coeffs, a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = poly_eval(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fa > 0.0) != (fm > 0.0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        if (b - a) <= 4.0 * f64::EPSILON * b.abs().max(a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// All real roots in (lo, hi], isolated by recursing on the derivative:
/// between consecutive critical points the polynomial is monotone, so a
/// sign change pins down exactly one root.
fn roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = poly_trim(coeffs);
    let degree = c.len() - 1;
    match degree {
        0 => Vec::new(),
        1 => {
            let r = -c[0] / c[1];
            if r > lo && r <= hi && r.is_finite() {
                vec![r]
            } else {
                Vec::new()
            }
        }
        2 => {
            let (a2, a1, a0) = (c[2], c[1], c[0]);
            let disc = a1 * a1 - 4.0 * a2 * a0;
            if disc < 0.0 {
                return Vec::new();
            }
            let sq = disc.sqrt();
            let q = -0.5 * (a1 + a1.signum() * sq);
            let mut out: Vec<f64> = [q / a2, if q != 0.0 { a0 / q } else { -a1 / a2 }]
                .into_iter()
                .filter(|r| r.is_finite() && *r > lo && *r <= hi)
                .collect();
            out.sort_by(|x, y| x.total_cmp(y));
            out.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * x.abs().max(1.0));
            out
        }
        _ => {
            let deriv = poly_deriv(c);
            let mut breaks = vec![lo];
            breaks.extend(roots_in(&deriv, lo, hi));
            breaks.push(hi);
            let mut out = Vec::new();
            for w in breaks.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b <= a {
                    continue;
                }
                let (fa, mag_a) = poly_eval_mag(c, a);
                let (fb, mag_b) = poly_eval_mag(c, b);
                // tangency at a critical point counts as a root
                if a > lo && fa.abs() <= 1e-13 * mag_a.max(1e-300) {
                    out.push(a);
                    continue;
                }
                if (fa > 0.0) != (fb > 0.0) {
                    out.push(bisect_root(c, a, b));
                } else if fb.abs() <= 1e-13 * mag_b.max(1e-300) && b < hi {
                    // handled as the next bracket's left tangency
                }
            }
            // right endpoint tangency
            let (fh, mag_h) = poly_eval_mag(c, hi);
            if fh.abs() <= 1e-13 * mag_h.max(1e-300) {
                out.push(hi);
            }
            out.sort_by(|x, y| x.total_cmp(y));
            out.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * x.abs().max(1e-300));
            out
        }
    }
}

/// All positive real roots, smallest first.
fn positive_roots(coeffs: &[f64]) -> Vec<f64> {
    let c = poly_trim(coeffs);
    if c.len() < 2 {
        return Vec::new();
    }
    let lead = c[c.len() - 1].abs();
    let hi = 1.0
        + c[..c.len() - 1]
            .iter()
            .map(|v| v.abs())
            .fold(0.0f64, f64::max)
            / lead;
    roots_in(c, 0.0, hi)
}

// ---------------------------------------------------------------------------
// envelope equation

/// LHS − RHS of the envelope equation at time t; its positive zeros are
/// the envelope times for this cut-off.
pub fn envelope_equation_residual(
    b: &EdgeMoments,
    ebar: &CorrelationMoments,
    n: usize,
    t: f64,
) -> Result<f64> {
    let lhs = p_bound(ebar, n, t)?;
    let mut g = 0.0;
    let eta = t * t;
    for j in (0..=n / 2).rev() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        g = g * eta + sign * b.scaled_at(2 * j)?;
    }
    Ok(lhs - g * g)
}

/// Coefficients (ascending in η = t²) of the residual polynomial divided
/// by its trivial root at η = 0; degree n − 1.
pub fn residual_polynomial(
    b: &EdgeMoments,
    ebar: &CorrelationMoments,
    n: usize,
) -> Result<Vec<f64>> {
    if n % 2 != 0 || n < 2 || n > MAX_ORDER {
        return Err(Error::InvalidInput(format!(
            "envelope order must be even in 2..={MAX_ORDER}, got {n}"
        )));
    }
    let m = n / 2;
    let mut g = Vec::with_capacity(m + 1);
    let mut f = vec![0.0; 2 * m + 1];
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        g.push(sign * b.scaled_at(2 * j)?);
        f[j] = sign * ebar.scaled_at(2 * j)?;
    }
    let mut gsq = vec![0.0; 2 * m + 1];
    for (a, &ga) in g.iter().enumerate() {
        for (bb, &gb) in g.iter().enumerate() {
            gsq[a + bb] += ga * gb;
        }
    }
    let resid: Vec<f64> = (1..=2 * m).map(|j| f[j] - gsq[j]).collect();
    debug_assert!((f[0] - gsq[0]).abs() < 1e-9, "constant term must vanish");
    Ok(resid)
}

/// Closed-form envelope time for the quadratic bound: t = 2b₁/b₂.
pub fn t_of_c_quadratic(b: &EdgeMoments) -> Result<f64> {
    let b1 = b.scaled_at(1)?;
    let b2 = b.scaled_at(2)?;
    if b2 <= 0.0 || b1 <= 0.0 {
        return Err(Error::DegenerateEdge);
    }
    Ok(b1 / b2)
}

/// Intermediate quantities of the quartic closed form.
#[derive(Debug, Clone, Copy)]
pub struct QuarticParts {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub t: f64,
}

/// Closed-form envelope time for the quartic bound, from the cubic in
/// η = t²; cross-checked against the numeric root of the same cubic.
pub fn t_of_c_quartic(b: &EdgeMoments) -> Result<f64> {
    Ok(t_of_c_quartic_parts(b)?.t)
}

pub fn t_of_c_quartic_parts(b: &EdgeMoments) -> Result<QuarticParts> {
    let b1 = b.raw_at(1)?;
    let b2 = b.raw_at(2)?;
    let b3 = b.raw_at(3)?;
    let b4 = b.raw_at(4)?;
    if b1 <= 0.0 || b2 <= 0.0 || b3 <= 0.0 || b4 <= 0.0 {
        return Err(Error::DegenerateEdge);
    }
    let d1 = b1 * b3 - b2 * b2;
    if d1 <= 0.0 {
        // Schwarz equality: the kept density is a point mass
        return Err(Error::DegenerateEdge);
    }
    let d3 = (16.0 * b2.powi(3) - 24.0 * b1 * b2 * b3 + 9.0 * b1 * b1 * b4) / 16.0;
    // rationalized: ((d1³+d3²)^{1/2} − d3)^{1/3} without cancellation
    let s = (d1.powi(3) + d3 * d3).sqrt();
    let d2 = (d1.powi(3) / (s + d3)).cbrt();
    let eta = 8.0 * (b2 - d2 + d1 / d2) / b4;
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::NoPositiveRoot);
    }
    // numeric root of B₁² − 2B₁B₃η + 2B₂B₄η² − B₄²η³
    let (cb1, cb2, cb3, cb4) = (b1, b2 / 2.0, b3 / 6.0, b4 / 24.0);
    let cubic = [
        cb1 * cb1,
        -2.0 * cb1 * cb3,
        2.0 * cb2 * cb4,
        -cb4 * cb4,
    ];
    let roots = positive_roots(&cubic);
    let closest = roots
        .iter()
        .copied()
        .min_by(|x, y| (x - eta).abs().total_cmp(&(y - eta).abs()));
    match closest {
        Some(r) if (r - eta).abs() <= 1e-8 * eta.abs() => Ok(QuarticParts {
            d1,
            d2,
            d3,
            t: eta.sqrt(),
        }),
        Some(r) => Err(Error::RootMismatch {
            closed: eta.sqrt(),
            numeric: r.sqrt(),
        }),
        None => Err(Error::NoPositiveRoot),
    }
}

/// All positive envelope times for order n, smallest first, from the
/// residual polynomial in η = t².
pub fn t_of_c_numeric(
    b: &EdgeMoments,
    ebar: &CorrelationMoments,
    n: usize,
) -> Result<Vec<f64>> {
    let poly = residual_polynomial(b, ebar, n)?;
    let roots = positive_roots(&poly);
    if roots.is_empty() {
        return Err(Error::NoPositiveRoot);
    }
    Ok(roots.into_iter().map(f64::sqrt).collect())
}

// ---------------------------------------------------------------------------
// envelope sweep

/// One parametric envelope point: at cut-off `cutoff` the bound osculates
/// the envelope at time `t` with value `value`.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopePoint {
    pub cutoff: f64,
    pub t: f64,
    pub value: f64,
    pub n_roots: usize,
}

/// Envelope of the order-n cut-off family, sorted by t, plus the matched
/// no-cut-off tail below t(M) when the support is finite.
#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    pub order: usize,
    pub direction: Direction,
    pub points: Vec<EnvelopePoint>,
    pub tail: Option<BoundCurve>,
    pub multi_root_cutoffs: Vec<f64>,
}

fn is_skippable(err: &Error) -> bool {
    matches!(
        err,
        Error::DegenerateEdge
            | Error::NoPositiveRoot
            | Error::NonPositiveCorrelationMoment { .. }
            | Error::NonPositiveEdgeMoment { .. }
    )
}

/// Builds the per-cut-off ingredients (spec + edge moments) in one pass.
fn cutoff_ingredients(
    dist: &EnergyDistribution,
    c: f64,
    n: usize,
    settings: &QuadSettings,
) -> Result<(CutoffBoundSpec, EdgeMoments)> {
    let view = dist.truncate(c)?;
    let hbar = view.truncated_moments(n, settings)?;
    let b = b_from_h(&hbar, view.edge(), n)?;
    let ebar = ebar_from_b(&b, n)?;
    Ok((CutoffBoundSpec::new(n, c, view.alpha(), ebar), b))
}

/// Sweeps the cut-off grid, solving the envelope equation at each c.
/// Cut-offs that are degenerate or rootless contribute no point; the sweep
/// fails only if none contributes.
pub fn sweep_envelope(
    dist: &EnergyDistribution,
    n: usize,
    c_grid: &[f64],
    settings: &QuadSettings,
) -> Result<EnvelopeResult> {
    if dist.is_discrete() {
        return Err(Error::InvalidInput(
            "discrete spectra have no envelope; use discrete_schedule".into(),
        ));
    }
    let mut points = Vec::new();
    let mut multi_root_cutoffs = Vec::new();
    let mut t_at_upper_edge: Option<f64> = None;
    let (_, upper) = dist.support();
    for &c in c_grid {
        let (spec, b) = match cutoff_ingredients(dist, c, n, settings) {
            Ok(v) => v,
            Err(e) if is_skippable(&e) => continue,
            Err(e) => return Err(e),
        };
        let roots = match t_of_c_numeric(&b, spec.ebar(), n) {
            Ok(r) => r,
            Err(e) if is_skippable(&e) => continue,
            Err(e) => return Err(e),
        };
        let t = roots[0];
        if roots.len() > 1 {
            multi_root_cutoffs.push(c);
        }
        let (value, _) = spec.amplitude_bound(t)?;
        if upper.is_finite() && c == upper {
            t_at_upper_edge = Some(t);
        }
        points.push(EnvelopePoint {
            cutoff: c,
            t,
            value,
            n_roots: roots.len(),
        });
    }
    if points.is_empty() {
        return Err(Error::EmptyEnvelope);
    }
    points.sort_by(|a, b| a.t.total_cmp(&b.t));
    // finite range: below t(M) the family offers nothing new and the
    // no-cut-off bound (c = M, α = 1) takes over, matching continuously
    let tail = match t_at_upper_edge {
        Some(t_m) => {
            let (spec, _) = cutoff_ingredients(dist, upper, n, settings)?;
            let mut grid: Vec<f64> = time_grid(t_m, 129);
            grid.push(t_m);
            grid.dedup();
            Some(amplitude_curve(&spec, &grid)?)
        }
        None => None,
    };
    Ok(EnvelopeResult {
        order: n,
        direction: direction_for_order(n),
        points,
        tail,
        multi_root_cutoffs,
    })
}

// ---------------------------------------------------------------------------
// square distribution closed forms

/// Order selector for [`square_envelope_constants`]: a finite even order
/// or the n → ∞ limit of the upper envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareOrder {
    Finite(usize),
    Infinite,
}

/// The square density is self-similar under cut-offs, so its envelope is
/// τₙ/t-shaped: returns (τₙ, σₙ) with t(c) = τₙ/c and envelope values
/// 1 − (1−σₙ)τₙ/(Mt) (upper) or (1+σₙ)τₙ/(Mt) − 1 (lower).
///
/// The n → ∞ limit of the upper family sums to a trigonometric form with
/// root τ = 2π and σ = 0; it is pinned here rather than re-solved.
pub fn square_envelope_constants(order: SquareOrder) -> Result<(f64, f64)> {
    let n = match order {
        SquareOrder::Infinite => return Ok((2.0 * std::f64::consts::PI, 0.0)),
        SquareOrder::Finite(n) => n,
    };
    if n % 2 != 0 || n < 2 || n > MAX_ORDER {
        return Err(Error::InvalidInput(format!(
            "square envelope order must be even in 2..={MAX_ORDER}, got {n}"
        )));
    }
    // unit cut-off: Bₖ = 1/(k+1)!, Ēₖ = 2/(k+2)!
    let b_scaled: Vec<f64> = (0..=n).map(|k| inv_factorial(k + 1)).collect();
    let e_scaled: Vec<f64> = (0..=n / 2).map(|j| 2.0 * inv_factorial(2 * j + 2)).collect();
    let m = n / 2;
    let mut g = Vec::with_capacity(m + 1);
    let mut f = vec![0.0; 2 * m + 1];
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        g.push(sign * b_scaled[2 * j]);
        f[j] = sign * e_scaled[j];
    }
    let mut gsq = vec![0.0; 2 * m + 1];
    for (a, &ga) in g.iter().enumerate() {
        for (bb, &gb) in g.iter().enumerate() {
            gsq[a + bb] += ga * gb;
        }
    }
    let poly: Vec<f64> = (1..=2 * m).map(|j| f[j] - gsq[j]).collect();
    let roots = positive_roots(&poly);
    let eta = *roots.first().ok_or(Error::NoPositiveRoot)?;
    let tau = eta.sqrt();
    // σ² equals either side of the envelope equation at τ
    let mut sigma_sq = 0.0;
    for j in (0..=m).rev() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sigma_sq = sigma_sq * eta + sign * e_scaled[j];
    }
    Ok((tau, sigma_sq.max(0.0).sqrt()))
}

// ---------------------------------------------------------------------------
// discrete spectra

/// One inter-atom cut-off interval: the bound is constant in c on it and
/// valid on the time window [t_start, t_end).
#[derive(Debug, Clone)]
pub struct ScheduleSegment {
    pub c_lo: f64,
    pub c_hi: f64,
    pub spec: CutoffBoundSpec,
    pub t_start: f64,
    pub t_end: f64,
}

/// Piecewise bound for a discrete spectrum: the no-cut-off series below
/// t(M), then one segment per cut-off interval, windows tiling [t(M), ∞).
#[derive(Debug, Clone)]
pub struct DiscreteSchedule {
    pub order: usize,
    pub direction: Direction,
    pub segments: Vec<ScheduleSegment>,
    pub no_cutoff: CutoffBoundSpec,
    pub t_min: f64,
}

impl DiscreteSchedule {
    /// Bound value at time t with the segment (or no-cut-off fallback)
    /// that owns the window.
    pub fn evaluate(&self, t: f64) -> Result<(f64, bool, String)> {
        if t < self.t_min {
            let (v, valid) = self.no_cutoff.amplitude_bound(t)?;
            return Ok((v, valid, format!("series n={}", self.order)));
        }
        for seg in self.segments.iter().rev() {
            if t >= seg.t_start && t < seg.t_end {
                let (v, valid) = seg.spec.amplitude_bound(t)?;
                return Ok((
                    v,
                    valid,
                    format!("schedule n={} c in ({},{})", self.order, seg.c_lo, seg.c_hi),
                ));
            }
        }
        // windows tile [t_min, ∞); reaching here means fp dust at an edge
        let seg = self.segments.first().expect("schedule has segments");
        let (v, valid) = seg.spec.amplitude_bound(t)?;
        Ok((
            v,
            valid,
            format!("schedule n={} c in ({},{})", self.order, seg.c_lo, seg.c_hi),
        ))
    }
}

/// Envelope time of the atom subset {E₀..Eᵢ} with the edge placed at `c`.
fn discrete_edge_time(
    atoms: &[(f64, f64)],
    upto: usize,
    c: f64,
    n: usize,
) -> Result<f64> {
    let alpha: f64 = atoms[..=upto].iter().map(|&(_, a)| a).sum();
    let mut scaled = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let h: f64 = atoms[..=upto]
            .iter()
            .map(|&(e, a)| a * e.powi(k as i32))
            .sum();
        scaled.push(h / alpha * inv_factorial(k));
    }
    let hbar = crate::moments::MomentVector::from_scaled(scaled, alpha.min(1.0))?;
    let b = b_from_h(&hbar, c, n)?;
    let ebar = ebar_from_b(&b, n)?;
    Ok(t_of_c_numeric(&b, &ebar, n)?[0])
}

/// Builds the piecewise bound schedule for a discrete spectrum of two or
/// more atoms. The bound from Eqs. with cut-off in (Eᵢ, Eᵢ₊₁) is constant
/// in c, valid from t(c at the upper end) up to t(c at the lower end);
/// below the smallest such time the no-cut-off series takes over.
pub fn discrete_schedule(dist: &EnergyDistribution, n: usize) -> Result<DiscreteSchedule> {
    let atoms = match dist {
        EnergyDistribution::Discrete { atoms } => atoms,
        _ => {
            return Err(Error::InvalidInput(
                "discrete_schedule needs a discrete distribution".into(),
            ))
        }
    };
    if atoms.len() < 2 {
        return Err(Error::InvalidDistribution(
            "schedule needs at least two atoms".into(),
        ));
    }
    let m = atoms.len();
    let mut segments = Vec::with_capacity(m - 1);
    for i in 0..m - 1 {
        let c_lo = atoms[i].0;
        let c_hi = atoms[i + 1].0;
        let alpha: f64 = atoms[..=i].iter().map(|&(_, a)| a).sum();
        let mut scaled = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let h: f64 = atoms[..=i]
                .iter()
                .map(|&(e, a)| a * e.powi(k as i32))
                .sum();
            scaled.push(h / alpha * inv_factorial(k));
        }
        let hbar = crate::moments::MomentVector::from_scaled(scaled, alpha.min(1.0))?;
        let ebar = e_from_h(&hbar, n)?;
        let spec = CutoffBoundSpec::new(n, c_hi, alpha.min(1.0), ebar);
        let t_start = discrete_edge_time(atoms, i, c_hi, n)?;
        let t_end = if i == 0 {
            f64::INFINITY
        } else {
            discrete_edge_time(atoms, i, c_lo, n)?
        };
        segments.push(ScheduleSegment {
            c_lo,
            c_hi,
            spec,
            t_start,
            t_end,
        });
    }
    let t_min = segments.last().expect("at least one segment").t_start;
    let h_full = dist.raw_moments(n)?;
    let e_full = e_from_h(&h_full, n)?;
    let no_cutoff = CutoffBoundSpec::new(n, atoms[m - 1].0, 1.0, e_full);
    Ok(DiscreteSchedule {
        order: n,
        direction: direction_for_order(n),
        segments,
        no_cutoff,
        t_min,
    })
}

// ---------------------------------------------------------------------------
// composite assembly

/// One grid point of the assembled best bounds.
#[derive(Debug, Clone)]
pub struct CompositePoint {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_source: String,
    pub upper_source: String,
}

#[derive(Debug, Clone)]
pub struct CompositeBound {
    pub points: Vec<CompositePoint>,
}

impl CompositeBound {
    pub fn lower_curve(&self) -> BoundCurve {
        BoundCurve::from_raw_samples(
            0,
            Direction::Lower,
            Target::AbsA,
            CutoffMode::Envelope,
            self.points.iter().map(|p| (p.t, p.lower, true)),
        )
    }

    pub fn upper_curve(&self) -> BoundCurve {
        BoundCurve::from_raw_samples(
            0,
            Direction::Upper,
            Target::AbsA,
            CutoffMode::Envelope,
            self.points.iter().map(|p| (p.t, p.upper, true)),
        )
    }
}

struct Candidate {
    label: String,
    direction: Direction,
    values: Vec<Option<f64>>,
}

/// Pointwise best |A(t)| bounds over every route the distribution admits:
/// plain series (via √P), the cos² bound, the whole fixed-cut-off family
/// on a logarithmic c-grid (which realizes the envelopes including their
/// matched tails), and the discrete schedule. Lower bounds combine by
/// max, upper bounds by min; both bracket |A|, so they never cross.
pub fn composite_bound(
    dist: &EnergyDistribution,
    orders: &[usize],
    horizon: f64,
    settings: &QuadSettings,
) -> Result<CompositeBound> {
    composite_bound_on_grid(dist, orders, &time_grid(horizon, 512), settings)
}

pub fn composite_bound_on_grid(
    dist: &EnergyDistribution,
    orders: &[usize],
    grid: &[f64],
    settings: &QuadSettings,
) -> Result<CompositeBound> {
    let mut orders: Vec<usize> = orders.to_vec();
    orders.sort_unstable();
    orders.dedup();
    for &n in &orders {
        if n % 2 != 0 || n < 2 || n > MAX_ORDER {
            return Err(Error::InvalidInput(format!(
                "orders must be even in 2..={MAX_ORDER}, got {n}"
            )));
        }
    }
    let mut candidates: Vec<Candidate> = Vec::new();

    // plain series via |A| = √P
    for &n in &orders {
        match dist.raw_moments(n) {
            Ok(h) => {
                let e = e_from_h(&h, n)?;
                let dir = direction_for_order(n);
                let values = grid
                    .iter()
                    .map(|&t| {
                        let p = p_bound(&e, n, t).ok()?;
                        match dir {
                            Direction::Lower => Some(p.max(0.0).sqrt()),
                            Direction::Upper => (p >= 0.0).then(|| p.sqrt()),
                        }
                    })
                    .collect();
                candidates.push(Candidate {
                    label: format!("series n={n}"),
                    direction: dir,
                    values,
                });
            }
            Err(Error::MomentDivergent { .. }) => continue,
            Err(e) => return Err(e),
        }
    }

    // cos² lower bound from ΔE alone
    if let Ok(h) = dist.raw_moments(2) {
        let e = e_from_h(&h, 2)?;
        let delta_e = if e.is_degenerate() { 0.0 } else { e.delta_e()? };
        let values = grid
            .iter()
            .map(|&t| {
                let (p, valid) = cos2_bound(delta_e, t);
                valid.then(|| p.sqrt())
            })
            .collect();
        candidates.push(Candidate {
            label: "cos2".into(),
            direction: Direction::Lower,
            values,
        });
    }

    // the fixed-cut-off family itself: every member is a bound at every t,
    // so the pointwise best over a dense c-grid is the sampled envelope,
    // tail matching included
    if !dist.is_discrete() {
        let c_grid = cutoff_grid(dist, 128)?;
        for &n in &orders {
            for &c in &c_grid {
                let (spec, _) = match cutoff_ingredients(dist, c, n, settings) {
                    Ok(v) => v,
                    Err(e) if is_skippable(&e) => continue,
                    Err(e) => return Err(e),
                };
                let dir = spec.direction();
                let values = grid
                    .iter()
                    .map(|&t| {
                        let (v, valid) = spec.amplitude_bound(t).ok()?;
                        valid.then_some(v)
                    })
                    .collect();
                candidates.push(Candidate {
                    label: format!("cutoff n={n} c={c:.6e}"),
                    direction: dir,
                    values,
                });
            }
        }
    } else {
        for &n in &orders {
            match discrete_schedule(dist, n) {
                Ok(schedule) => {
                    let mut values = Vec::with_capacity(grid.len());
                    for &t in grid {
                        let (v, valid, _) = schedule.evaluate(t)?;
                        values.push(valid.then_some(v));
                    }
                    candidates.push(Candidate {
                        label: format!("schedule n={n}"),
                        direction: schedule.direction,
                        values,
                    });
                }
                Err(Error::InvalidDistribution(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    if candidates.is_empty() {
        return Err(Error::EmptyEnvelope);
    }

    let mut points = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let mut lower = (0.0f64, "trivial".to_string());
        let mut upper = (1.0f64, "trivial".to_string());
        for cand in &candidates {
            if let Some(v) = cand.values[i] {
                match cand.direction {
                    Direction::Lower => {
                        let v = v.clamp(0.0, 1.0);
                        if v > lower.0 {
                            lower = (v, cand.label.clone());
                        }
                    }
                    Direction::Upper => {
                        let v = v.clamp(0.0, 1.0);
                        if v < upper.0 {
                            upper = (v, cand.label.clone());
                        }
                    }
                }
            }
        }
        points.push(CompositePoint {
            t,
            lower: lower.0,
            upper: upper.0,
            lower_source: lower.1,
            upper_source: upper.1,
        });
    }
    Ok(CompositeBound { points })
}
