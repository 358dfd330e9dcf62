//! Fixed-cut-off amplitude bounds. Splitting the state at energy c leaves
//! a kept part with weight α whose survival is bounded by the series
//! polynomials in the truncated moments, while the discarded part can only
//! shift the amplitude by 1−α:
//!
//! ```text
//! y(t, c) = α √pₙ(t, c) ± (1 − α)
//! ```

use crate::distributions::EnergyDistribution;
use crate::error::Result;
use crate::moments::{e_from_h, CorrelationMoments};
use crate::quad::QuadSettings;
use crate::series_bounds::{
    direction_for_order, p_bound, BoundCurve, CutoffMode, Direction, Target,
};

/// Everything needed to evaluate one fixed-cut-off bound: the truncated
/// correlation moments, the weight α, and the order (which fixes the
/// direction: n ≡ 0 mod 4 upper, n ≡ 2 mod 4 lower).
#[derive(Debug, Clone)]
pub struct CutoffBoundSpec {
    order: usize,
    direction: Direction,
    cutoff: f64,
    alpha: f64,
    ebar: CorrelationMoments,
}

impl CutoffBoundSpec {
    pub fn new(order: usize, cutoff: f64, alpha: f64, ebar: CorrelationMoments) -> Self {
        debug_assert!(alpha > 0.0 && alpha <= 1.0 + 1e-12);
        CutoffBoundSpec {
            order,
            direction: direction_for_order(order),
            cutoff,
            alpha,
            ebar,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ebar(&self) -> &CorrelationMoments {
        &self.ebar
    }

    /// The polynomial pₙ(t, c) in the truncated moments.
    pub fn polynomial(&self, t: f64) -> Result<f64> {
        p_bound(&self.ebar, self.order, t)
    }

    /// Raw bound value at time t plus a validity flag. A lower bound whose
    /// polynomial has gone negative carries only the trivial −(1−α) and is
    /// flagged invalid rather than erroring, so sweeps can pass through.
    pub fn amplitude_bound(&self, t: f64) -> Result<(f64, bool)> {
        let p = self.polynomial(t)?;
        let tail = 1.0 - self.alpha;
        Ok(match self.direction {
            Direction::Lower => {
                if p >= 0.0 {
                    (self.alpha * p.sqrt() - tail, true)
                } else {
                    (-tail, false)
                }
            }
            Direction::Upper => {
                if p >= 0.0 {
                    (self.alpha * p.sqrt() + tail, true)
                } else {
                    (tail, false)
                }
            }
        })
    }
}

/// Composes truncation → truncated moments → correlation moments into a
/// ready bound spec; no autocorrelation quadrature anywhere on the path.
pub fn build_cutoff_spec(
    dist: &EnergyDistribution,
    c: f64,
    n: usize,
    settings: &QuadSettings,
) -> Result<CutoffBoundSpec> {
    let view = dist.truncate(c)?;
    let hbar = view.truncated_moments(n, settings)?;
    let ebar = e_from_h(&hbar, n)?;
    Ok(CutoffBoundSpec::new(n, c, view.alpha(), ebar))
}

/// Samples a fixed-cut-off bound curve on |A(t)| over a time grid.
pub fn amplitude_curve(spec: &CutoffBoundSpec, grid: &[f64]) -> Result<BoundCurve> {
    let mut points = Vec::with_capacity(grid.len());
    for &t in grid {
        let (raw, valid) = spec.amplitude_bound(t)?;
        points.push((t, raw, valid));
    }
    Ok(BoundCurve::from_raw_samples(
        spec.order,
        spec.direction,
        Target::AbsA,
        CutoffMode::Fixed(spec.cutoff),
        points,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_survival;

    #[test]
    fn values_at_time_zero() {
        let d = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let s = QuadSettings::default();
        let lower = build_cutoff_spec(&d, 2.0, 2, &s).unwrap();
        let alpha = lower.alpha();
        let (v, valid) = lower.amplitude_bound(0.0).unwrap();
        assert!(valid);
        assert!((v - (2.0 * alpha - 1.0)).abs() < 1e-12);
        let upper = build_cutoff_spec(&d, 2.0, 4, &s).unwrap();
        let (v, valid) = upper.amplitude_bound(0.0).unwrap();
        assert!(valid);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn direction_fixed_by_residue_class() {
        let d = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let s = QuadSettings::default();
        assert_eq!(
            build_cutoff_spec(&d, 1.0, 2, &s).unwrap().direction(),
            Direction::Lower
        );
        assert_eq!(
            build_cutoff_spec(&d, 1.0, 4, &s).unwrap().direction(),
            Direction::Upper
        );
        assert_eq!(
            build_cutoff_spec(&d, 1.0, 6, &s).unwrap().direction(),
            Direction::Lower
        );
        assert_eq!(
            build_cutoff_spec(&d, 1.0, 8, &s).unwrap().direction(),
            Direction::Upper
        );
    }

    #[test]
    fn power_law_alpha_from_spec() {
        let d = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let spec = build_cutoff_spec(&d, 3.0, 2, &QuadSettings::default()).unwrap();
        assert!((spec.alpha() - 31.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_stays_below_oracle() {
        let d = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let s = QuadSettings::default();
        for &c in &[0.5, 2.0, 5.0] {
            let spec = build_cutoff_spec(&d, c, 2, &s).unwrap();
            for i in 0..=40 {
                let t = i as f64 * 0.25;
                let (v, _) = spec.amplitude_bound(t).unwrap();
                let a = exact_survival(&d, t).unwrap().abs;
                assert!(v <= a + 1e-9, "c={c}, t={t}: bound {v} above |A| {a}");
            }
        }
    }

    #[test]
    fn upper_bound_stays_above_oracle() {
        let d = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let s = QuadSettings::default();
        for &c in &[0.5, 2.0, 5.0] {
            let spec = build_cutoff_spec(&d, c, 4, &s).unwrap();
            for i in 0..=40 {
                let t = i as f64 * 0.25;
                let (v, _) = spec.amplitude_bound(t).unwrap();
                let a = exact_survival(&d, t).unwrap().abs;
                assert!(v >= a - 1e-9, "c={c}, t={t}: bound {v} below |A| {a}");
            }
        }
    }

    #[test]
    fn full_support_cutoff_reduces_to_series() {
        // at c = M the spec has α = 1 and the bound is √max(pₙ, 0)
        let d = EnergyDistribution::square(1.0).unwrap();
        let s = QuadSettings::default();
        let spec = build_cutoff_spec(&d, 1.0, 2, &s).unwrap();
        assert!((spec.alpha() - 1.0).abs() < 1e-12);
        let h = d.raw_moments(2).unwrap();
        let e = e_from_h(&h, 2).unwrap();
        for i in 0..=30 {
            let t = i as f64 * 0.2;
            let (v, _) = spec.amplitude_bound(t).unwrap();
            let p = p_bound(&e, 2, t).unwrap();
            let want = p.max(0.0).sqrt();
            assert!((v - want).abs() <= 1e-12, "t={t}: {v} vs {want}");
        }
    }

    #[test]
    fn discrete_below_first_gap_is_constant() {
        // atoms (0.7, 0.2, 0.1): a cut-off inside the first gap keeps only
        // the point mass, so the lower bound is the constant 2α − 1 = 0.4
        let d = EnergyDistribution::discrete(&[(0.0, 0.7), (0.5, 0.2), (1.0, 0.1)]).unwrap();
        let spec = build_cutoff_spec(&d, 0.25, 2, &QuadSettings::default()).unwrap();
        assert!(spec.ebar().is_degenerate());
        for &t in &[0.0, 1.0, 5.0, 20.0] {
            let (v, valid) = spec.amplitude_bound(t).unwrap();
            assert!(valid);
            assert!((v - 0.4).abs() < 1e-12, "t={t}: {v}");
            let a = exact_survival(&d, t).unwrap().abs;
            assert!(v <= a + 1e-12);
        }
    }

    #[test]
    fn monotone_degradation_in_alpha() {
        let d = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let s = QuadSettings::default();
        let mut prev = f64::NEG_INFINITY;
        for &c in &[0.25, 0.5, 1.0, 2.0, 4.0] {
            let spec = build_cutoff_spec(&d, c, 2, &s).unwrap();
            let (v, _) = spec.amplitude_bound(0.0).unwrap();
            assert!(v >= prev, "t=0 bound must not decrease with c");
            prev = v;
        }
    }
}
