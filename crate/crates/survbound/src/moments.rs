//! Moment algebra: energy moments, autocorrelation moments and cut-off-edge
//! moments, all stored in factorial-scaled form so that orders up to
//! [`MAX_ORDER`](crate::MAX_ORDER) stay inside f64 range.
//!
//! Scaled quantities: Hₖ = hₖ/k!, Ēₖ = ēₖ/k!, Bₖ = bₖ/k!. The identities
//! implemented here are
//!
//! ```text
//! Ēₙ = 2 Σ_{j<n/2} (−1)ʲ Hⱼ H_{n−j} + (−1)^{n/2} H_{n/2}²      (even n)
//! Bₙ = Σ_j (cʲ/j!) (−1)^{n−j} H̄_{n−j}
//! Ēₙ = Σ_{k=0}^{n} (−1)ᵏ Bₖ B_{n−k}                             (even n)
//! ```
//!
//! All three are evaluated with compensated summation; a result that lands
//! below −1e−12 times the largest term magnitude is reported as a
//! non-positivity error rather than silently clamped.

use crate::distributions::EnergyDistribution;
use crate::error::{Error, Result};
use crate::quad::QuadSettings;
use crate::special::{compensated_sum, inv_factorial};
use crate::MAX_ORDER;

/// Relative threshold below which a cancelled moment counts as negative.
const CANCEL_TOL: f64 = 1e-12;

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// Energy moments of a (possibly truncated) unit-weight density, stored as
/// Hₖ = hₖ/k! for k = 0..=order, together with the weight α of the
/// underlying truncation (α = 1 for untruncated moments).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    scaled: Vec<f64>,
    alpha: f64,
}

impl MomentVector {
    /// Builds from scaled entries Hₖ. Requires H₀ = 1 (unit weight), finite
    /// entries, and a non-negative variance h₂ − h₁² when order ≥ 2.
    pub fn from_scaled(scaled: Vec<f64>, alpha: f64) -> Result<Self> {
        if scaled.is_empty() {
            return Err(Error::InvalidInput("empty moment vector".into()));
        }
        check_order(scaled.len() - 1)?;
        if scaled.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite moment entry (scale overflow?)".into(),
            ));
        }
        if (scaled[0] - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "moments are not of a unit-weight density (H0 = {})",
                scaled[0]
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!("weight alpha = {alpha}")));
        }
        if scaled.len() > 2 {
            let h1 = scaled[1];
            let h2 = 2.0 * scaled[2];
            if h2 - h1 * h1 < -1e-10 * h2.abs().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "negative variance: h2 = {h2}, h1^2 = {}",
                    h1 * h1
                )));
            }
        }
        Ok(MomentVector { scaled, alpha })
    }

    /// Builds from raw moments hₖ (k = 0..), applying the 1/k! scaling.
    pub fn from_raw(raw: &[f64], alpha: f64) -> Result<Self> {
        let scaled = raw
            .iter()
            .enumerate()
            .map(|(k, h)| h * inv_factorial(k))
            .collect();
        Self::from_scaled(scaled, alpha)
    }

    pub fn order(&self) -> usize {
        self.scaled.len() - 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Scaled entry Hₖ.
    pub fn scaled_at(&self, k: usize) -> Result<f64> {
        self.scaled.get(k).copied().ok_or(Error::InsufficientOrder {
            have: self.order(),
            need: k,
        })
    }

    pub fn scaled(&self) -> &[f64] {
        &self.scaled
    }

    /// Raw moment hₖ = Hₖ·k!.
    pub fn raw_at(&self, k: usize) -> Result<f64> {
        Ok(self.scaled_at(k)? / inv_factorial(k))
    }

    /// Variance h₂ − h₁² of the underlying density.
    pub fn variance(&self) -> Result<f64> {
        let h1 = self.raw_at(1)?;
        let h2 = self.raw_at(2)?;
        Ok(h2 - h1 * h1)
    }
}

/// Autocorrelation moments Ēₖ = ēₖ/k! for even k = 0, 2, ..; entry j holds
/// order k = 2j. A degenerate vector (all Ēₖ = 0 for k ≥ 2) comes from a
/// zero-width density; bounds built on it are the constant |A| = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMoments {
    scaled_even: Vec<f64>,
    degenerate: bool,
}

impl CorrelationMoments {
    pub fn order(&self) -> usize {
        2 * (self.scaled_even.len() - 1)
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Scaled entry Ēₖ for even k.
    pub fn scaled_at(&self, k: usize) -> Result<f64> {
        if k % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "correlation moments exist for even orders only (asked for {k})"
            )));
        }
        self.scaled_even
            .get(k / 2)
            .copied()
            .ok_or(Error::InsufficientOrder {
                have: self.order(),
                need: k,
            })
    }

    /// Raw moment ēₖ.
    pub fn raw_at(&self, k: usize) -> Result<f64> {
        Ok(self.scaled_at(k)? / inv_factorial(k))
    }

    /// Energy width ΔE = √(Ē₂) = √(h₂ − h₁²).
    pub fn delta_e(&self) -> Result<f64> {
        Ok(self.scaled_at(2)?.sqrt())
    }
}

/// Cut-off-edge moments Bₖ = bₖ/k! with bₖ = α⁻¹ ∫ ρ(E)(c−E)ᵏ dE over the
/// truncated range; `edge` is the energy the moments are taken against
/// (the cut-off itself, or the upper window edge for two-sided windows).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMoments {
    edge: f64,
    scaled: Vec<f64>,
}

impl EdgeMoments {
    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn order(&self) -> usize {
        self.scaled.len() - 1
    }

    /// Scaled entry Bₖ.
    pub fn scaled_at(&self, k: usize) -> Result<f64> {
        self.scaled.get(k).copied().ok_or(Error::InsufficientOrder {
            have: self.order(),
            need: k,
        })
    }

    /// Raw moment bₖ = Bₖ·k!.
    pub fn raw_at(&self, k: usize) -> Result<f64> {
        Ok(self.scaled_at(k)? / inv_factorial(k))
    }
}

/// Autocorrelation moments from energy moments (even orders 2..=n).
///
/// A vanishing Ē₂ marks the zero-width (single-point) density; the result
/// is flagged degenerate instead of erroring. Any deeper-order entry that
/// cancels below −1e−12 of its largest term signals inconsistent input.
pub fn e_from_h(h: &MomentVector, n: usize) -> Result<CorrelationMoments> {
    check_order(n)?;
    if n % 2 != 0 || n < 2 {
        return Err(Error::InvalidInput(format!(
            "correlation order must be even and >= 2, got {n}"
        )));
    }
    if h.order() < n {
        return Err(Error::InsufficientOrder {
            have: h.order(),
            need: n,
        });
    }
    let hs = h.scaled();
    let mut scaled_even = Vec::with_capacity(n / 2 + 1);
    scaled_even.push(1.0);
    let mut terms = Vec::new();
    let mut results = Vec::new();
    for m in (2..=n).step_by(2) {
        terms.clear();
        for j in 0..m / 2 {
            let sign = if j % 2 == 0 { 2.0 } else { -2.0 };
            terms.push(sign * hs[j] * hs[m - j]);
        }
        let mid = hs[m / 2];
        let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(sign * mid * mid);
        let (value, max_term) = compensated_sum(&terms);
        results.push((m, value, max_term));
    }
    // zero-width density: variance cancels to (numerically) nothing
    let (_, e2, max2) = results[0];
    if e2 <= CANCEL_TOL * max2 {
        for _ in (2..=n).step_by(2) {
            scaled_even.push(0.0);
        }
        return Ok(CorrelationMoments {
            scaled_even,
            degenerate: true,
        });
    }
    for (m, value, max_term) in results {
        if value < -CANCEL_TOL * max_term {
            return Err(Error::NonPositiveCorrelationMoment { k: m, value });
        }
        scaled_even.push(value.max(0.0));
    }
    Ok(CorrelationMoments {
        scaled_even,
        degenerate: false,
    })
}

/// Edge moments from truncated energy moments via the binomial expansion
/// of (c−E)ⁿ. The expansion is taken from the defining integral, which
/// fixes the sign so that every bₙ > 0.
pub fn b_from_h(hbar: &MomentVector, edge: f64, n: usize) -> Result<EdgeMoments> {
    check_order(n)?;
    if hbar.order() < n {
        return Err(Error::InsufficientOrder {
            have: hbar.order(),
            need: n,
        });
    }
    let hs = hbar.scaled();
    let mut scaled = Vec::with_capacity(n + 1);
    let mut c_pow_scaled = Vec::with_capacity(n + 1); // cʲ/j!
    let mut cp = 1.0;
    for j in 0..=n {
        if j > 0 {
            cp *= edge / j as f64;
        }
        c_pow_scaled.push(cp);
    }
    let mut terms = Vec::new();
    for m in 0..=n {
        terms.clear();
        for j in 0..=m {
            let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
            terms.push(sign * c_pow_scaled[j] * hs[m - j]);
        }
        let (value, max_term) = compensated_sum(&terms);
        if value < -CANCEL_TOL * max_term {
            return Err(Error::NonPositiveEdgeMoment { k: m, value });
        }
        scaled.push(value.max(0.0));
    }
    Ok(EdgeMoments { edge, scaled })
}

/// Autocorrelation moments directly from edge moments:
/// Ēₙ = Σₖ (−1)ᵏ Bₖ B_{n−k}. Agrees identically with
/// [`e_from_h`] applied to the same truncated moments.
pub fn ebar_from_b(b: &EdgeMoments, n: usize) -> Result<CorrelationMoments> {
    check_order(n)?;
    if n % 2 != 0 || n < 2 {
        return Err(Error::InvalidInput(format!(
            "correlation order must be even and >= 2, got {n}"
        )));
    }
    if b.order() < n {
        return Err(Error::InsufficientOrder {
            have: b.order(),
            need: n,
        });
    }
    let bs = &b.scaled;
    let mut scaled_even = vec![1.0];
    let mut results = Vec::new();
    let mut terms = Vec::new();
    for m in (2..=n).step_by(2) {
        terms.clear();
        for k in 0..=m {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            terms.push(sign * bs[k] * bs[m - k]);
        }
        let (value, max_term) = compensated_sum(&terms);
        results.push((m, value, max_term));
    }
    let (_, e2, max2) = results[0];
    if e2 <= CANCEL_TOL * max2 {
        for _ in (2..=n).step_by(2) {
            scaled_even.push(0.0);
        }
        return Ok(CorrelationMoments {
            scaled_even,
            degenerate: true,
        });
    }
    for (m, value, max_term) in results {
        if value < -CANCEL_TOL * max_term {
            return Err(Error::NonPositiveCorrelationMoment { k: m, value });
        }
        scaled_even.push(value.max(0.0));
    }
    Ok(CorrelationMoments {
        scaled_even,
        degenerate: false,
    })
}

/// Brute-force autocorrelation moments by double quadrature of
/// ∬ ρ(E)ρ(E′)(E−E′)ⁿ dE dE′; the independent oracle for [`e_from_h`].
pub fn e_brute_force(
    dist: &EnergyDistribution,
    n: usize,
    settings: &QuadSettings,
) -> Result<CorrelationMoments> {
    check_order(n)?;
    if n % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "correlation order must be even, got {n}"
        )));
    }
    let mut scaled_even = vec![1.0];
    if n == 0 {
        return Ok(CorrelationMoments {
            scaled_even,
            degenerate: false,
        });
    }
    let (lo, hi) = dist.support();
    if let EnergyDistribution::Discrete { atoms } = dist {
        for m in (2..=n).step_by(2) {
            let mut sum = 0.0;
            for (ei, ai) in atoms {
                for (ej, aj) in atoms {
                    sum += ai * aj * (ei - ej).powi(m as i32);
                }
            }
            scaled_even.push(sum * inv_factorial(m));
        }
        let degenerate = scaled_even[1] == 0.0;
        return Ok(CorrelationMoments {
            scaled_even,
            degenerate,
        });
    }
    let inner_settings = *settings;
    let outer_settings = QuadSettings {
        abs_tol: (settings.abs_tol * 100.0).max(1e-9),
        rel_tol: (settings.rel_tol * 100.0).max(1e-9),
        ..*settings
    };
    for m in (2..=n).step_by(2) {
        let outer = dist.integrate_weighted(
            lo,
            hi,
            &|e: f64| {
                dist.integrate_weighted(
                    lo,
                    hi,
                    &|ep: f64| (e - ep).powi(m as i32),
                    &inner_settings,
                )
                .unwrap_or(f64::NAN)
            },
            &outer_settings,
        )?;
        if !outer.is_finite() {
            return Err(Error::QuadratureFailure {
                requested: settings.abs_tol,
                achieved: f64::NAN,
            });
        }
        scaled_even.push(outer * inv_factorial(m));
    }
    Ok(CorrelationMoments {
        scaled_even,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::EnergyDistribution;

    fn gamma_half_moments(n: usize) -> MomentVector {
        EnergyDistribution::gamma_half(1.0)
            .unwrap()
            .raw_moments(n)
            .unwrap()
    }

    #[test]
    fn gamma_half_correlation_recurrence() {
        // eₙ = (n−1)² eₙ₋₂ with e₀ = 1, for γ = 1
        let h = gamma_half_moments(8);
        let e = e_from_h(&h, 8).unwrap();
        let mut expected = 1.0;
        for m in (2..=8usize).step_by(2) {
            expected *= ((m - 1) * (m - 1)) as f64;
            let got = e.raw_at(m).unwrap();
            assert!(
                (got - expected).abs() <= 1e-10 * expected,
                "e_{m}: got {got}, want {expected}"
            );
        }
        assert!((e.scaled_at(2).unwrap() - 0.5).abs() < 1e-14);
        assert!((e.scaled_at(4).unwrap() - 0.375).abs() < 1e-14);
    }

    #[test]
    fn power_law_e2() {
        let dist = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let h = dist.raw_moments(2).unwrap();
        let e = e_from_h(&h, 2).unwrap();
        assert!((e.raw_at(2).unwrap() - 40.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_is_degenerate() {
        let h = MomentVector::from_raw(&[1.0, 2.0, 4.0, 8.0, 16.0], 1.0).unwrap();
        let e = e_from_h(&h, 4).unwrap();
        assert!(e.is_degenerate());
        assert_eq!(e.scaled_at(2).unwrap(), 0.0);
        assert_eq!(e.scaled_at(4).unwrap(), 0.0);
    }

    #[test]
    fn square_edge_moments_closed_form() {
        // bₙ/n! = cⁿ/(n+1)! for the square density truncated at c
        let dist = EnergyDistribution::square(1.0).unwrap();
        let c = 0.7;
        let view = dist.truncate(c).unwrap();
        let hbar = view.truncated_moments(6, &QuadSettings::default()).unwrap();
        let b = b_from_h(&hbar, c, 6).unwrap();
        for k in 0..=6usize {
            let want = c.powi(k as i32) * inv_factorial(k + 1);
            let got = b.scaled_at(k).unwrap();
            assert!(
                (got - want).abs() < 1e-13 * want.max(1e-10),
                "B_{k}: {got} vs {want}"
            );
        }
        // ēₙ/n! = 2cⁿ/(n+2)!
        let ebar = ebar_from_b(&b, 6).unwrap();
        for m in (2..=6usize).step_by(2) {
            let want = 2.0 * c.powi(m as i32) * inv_factorial(m + 2);
            let got = ebar.scaled_at(m).unwrap();
            assert!(
                (got - want).abs() < 1e-13 * want,
                "Ebar_{m}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn point_mass_edge_moments() {
        // single atom at E₀ < c: bₖ = (c−E₀)ᵏ
        let e0 = 0.3;
        let c = 1.1;
        let hbar = MomentVector::from_raw(
            &[1.0, e0, e0 * e0, e0 * e0 * e0, e0 * e0 * e0 * e0],
            0.4,
        )
        .unwrap();
        let b = b_from_h(&hbar, c, 4).unwrap();
        for k in 0..=4usize {
            let want = (c - e0).powi(k as i32);
            let got = b.raw_at(k).unwrap();
            assert!((got - want).abs() < 1e-12, "b_{k}: {got} vs {want}");
        }
    }

    #[test]
    fn ebar_two_routes_agree() {
        let dist = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let view = dist.truncate(3.0).unwrap();
        let hbar = view.truncated_moments(8, &QuadSettings::default()).unwrap();
        let via_h = e_from_h(&hbar, 8).unwrap();
        let b = b_from_h(&hbar, 3.0, 8).unwrap();
        let via_b = ebar_from_b(&b, 8).unwrap();
        for m in (2..=8usize).step_by(2) {
            let a = via_h.scaled_at(m).unwrap();
            let bb = via_b.scaled_at(m).unwrap();
            assert!(
                (a - bb).abs() <= 1e-10 * a.abs().max(1e-12),
                "order {m}: {a} vs {bb}"
            );
        }
    }

    #[test]
    fn brute_force_square() {
        // e₂ = 2(h₂ − h₁²) = 2(1/3 − 1/4) = 1/6
        let dist = EnergyDistribution::square(1.0).unwrap();
        let e = e_brute_force(&dist, 2, &QuadSettings::default()).unwrap();
        assert!((e.raw_at(2).unwrap() - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn brute_force_two_atoms() {
        let dist = EnergyDistribution::discrete(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let e = e_brute_force(&dist, 2, &QuadSettings::default()).unwrap();
        assert!((e.raw_at(2).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn order_cap_enforced() {
        let h = gamma_half_moments(8);
        assert!(matches!(
            e_from_h(&h, 18),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn insufficient_order_reported() {
        let h = gamma_half_moments(4);
        assert!(matches!(
            e_from_h(&h, 8),
            Err(Error::InsufficientOrder { have: 4, need: 8 })
        ));
    }
}
