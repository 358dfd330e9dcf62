//! Energy distributions ρ(E): analytic families, discrete spectra and
//! tabulated densities, with their supports, cut-off weights α, and raw or
//! truncated energy moments.
//!
//! All distributions are normalized to unit weight at construction and are
//! immutable afterwards. Energies are in units of the distribution's own
//! scale (γ or M) and ħ = 1 throughout.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::moments::MomentVector;
use crate::quad::{self, QuadSettings};
use crate::special::{gamma_p, inv_factorial, ln_gamma_half_integer};
use crate::MAX_ORDER;

/// A normalized spectral density ρ(E).
///
/// Supported kinds:
/// - `GammaHalf`: ρ ∝ E^(−1/2) e^(−E/γ), E > 0
/// - `PowerLaw`: ρ ∝ (1 + E/γ)^(−p), E > 0, p > 1
/// - `BreitWigner`: ρ ∝ [(E−E₀)² + γ²]^(−1), full real line
/// - `Square`: ρ = 1/M on [0, M]
/// - `Discrete`: Σ aᵢ δ(E − Eᵢ)
/// - `Tabulated`: linear interpolation of (E, ρ) samples
#[derive(Debug, Clone, PartialEq)]
pub enum EnergyDistribution {
    GammaHalf { gamma: f64 },
    PowerLaw { gamma: f64, exponent: f64 },
    BreitWigner { gamma: f64, e0: f64 },
    Square { m: f64 },
    Discrete { atoms: Vec<(f64, f64)> },
    Tabulated(Tabulated),
}

/// Piecewise-linear density over strictly increasing sample energies,
/// rescaled to unit weight at load time.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    energies: Vec<f64>,
    densities: Vec<f64>,
}

impl Tabulated {
    fn new(samples: Vec<(f64, f64)>, renormalize: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidDistribution(
                "tabulated density needs at least two samples".into(),
            ));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidDistribution(format!(
                    "tabulated energies must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(e, r) in &samples {
            if !e.is_finite() || !r.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "non-finite tabulated sample ({e}, {r})"
                )));
            }
            if r < 0.0 {
                return Err(Error::NegativeDensity {
                    energy: e,
                    value: r,
                });
            }
        }
        // exact weight of the interpolant
        let weight: f64 = samples
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum();
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::NonNormalizable { weight });
        }
        if (weight - 1.0).abs() > 0.5 && !renormalize {
            return Err(Error::InvalidInput(format!(
                "tabulated raw weight {weight} deviates from 1 by more than 50%; \
                 pass --renormalize to rescale"
            )));
        }
        let inv = 1.0 / weight;
        let (energies, densities) = samples.into_iter().map(|(e, r)| (e, r * inv)).unzip();
        Ok(Tabulated {
            energies,
            densities,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    fn density(&self, e: f64) -> f64 {
        let n = self.energies.len();
        if e < self.energies[0] || e > self.energies[n - 1] {
            return 0.0;
        }
        let idx = match self
            .energies
            .binary_search_by(|probe| probe.total_cmp(&e))
        {
            Ok(i) => return self.densities[i],
            Err(i) => i - 1,
        };
        let (e0, e1) = (self.energies[idx], self.energies[idx + 1]);
        let (r0, r1) = (self.densities[idx], self.densities[idx + 1]);
        r0 + (r1 - r0) * (e - e0) / (e1 - e0)
    }

    /// Exact integral of the interpolant from the support start to `c`.
    fn cdf(&self, c: f64) -> f64 {
        let n = self.energies.len();
        if c <= self.energies[0] {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..n - 1 {
            let (e0, e1) = (self.energies[i], self.energies[i + 1]);
            let (r0, r1) = (self.densities[i], self.densities[i + 1]);
            if c >= e1 {
                acc += 0.5 * (r0 + r1) * (e1 - e0);
            } else {
                let dx = c - e0;
                let slope = (r1 - r0) / (e1 - e0);
                acc += r0 * dx + 0.5 * slope * dx * dx;
                break;
            }
        }
        acc
    }

    /// Σ over segments overlapping [lo, hi] of ∫ ρ(E) f(E) dE by adaptive
    /// Simpson per segment.
    fn integrate(
        &self,
        lo: f64,
        hi: f64,
        f: &dyn Fn(f64) -> f64,
        s: &QuadSettings,
    ) -> Result<f64> {
        let n = self.energies.len();
        let lo = lo.max(self.energies[0]);
        let hi = hi.min(self.energies[n - 1]);
        if hi <= lo {
            return Ok(0.0);
        }
        let overlapped = self
            .energies
            .windows(2)
            .filter(|w| w[1] > lo && w[0] < hi)
            .count()
            .max(1);
        let tol = s.abs_tol / overlapped as f64;
        let mut acc = 0.0;
        let mut comp = 0.0;
        for i in 0..n - 1 {
            let a = self.energies[i].max(lo);
            let b = self.energies[i + 1].min(hi);
            if a >= b {
                continue;
            }
            let v = quad::adaptive_simpson(&|e| self.density(e) * f(e), a, b, tol)?;
            let sum = acc + v;
            comp += if acc.abs() >= v.abs() {
                (acc - sum) + v
            } else {
                (v - sum) + acc
            };
            acc = sum;
        }
        Ok(acc + comp)
    }
}

impl EnergyDistribution {
    pub fn gamma_half(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "gamma_half requires γ > 0, got {gamma}"
            )));
        }
        Ok(EnergyDistribution::GammaHalf { gamma })
    }

    pub fn power_law(gamma: f64, exponent: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0 && exponent.is_finite() && exponent > 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "power_law requires γ > 0 and p > 1, got γ = {gamma}, p = {exponent}"
            )));
        }
        Ok(EnergyDistribution::PowerLaw { gamma, exponent })
    }

    pub fn breit_wigner(gamma: f64, e0: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0 && e0.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "breit_wigner requires γ > 0 and finite E₀, got γ = {gamma}, E₀ = {e0}"
            )));
        }
        Ok(EnergyDistribution::BreitWigner { gamma, e0 })
    }

    pub fn square(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "square requires M > 0, got {m}"
            )));
        }
        Ok(EnergyDistribution::Square { m })
    }

    /// Discrete spectrum; weights must already sum to 1 within 1e−9
    /// (use [`normalize`] for raw weights) and energies must be strictly
    /// increasing.
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms given".into()));
        }
        for w in atoms.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidDistribution(format!(
                    "atom energies must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        let mut sum = 0.0;
        for &(e, a) in atoms {
            if !e.is_finite() || !a.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "non-finite atom ({e}, {a})"
                )));
            }
            if a <= 0.0 {
                return Err(Error::NegativeDensity {
                    energy: e,
                    value: a,
                });
            }
            sum += a;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "atom weights sum to {sum}, not 1 (use normalize for raw weights)"
            )));
        }
        let atoms = atoms.iter().map(|&(e, a)| (e, a / sum)).collect();
        Ok(EnergyDistribution::Discrete { atoms })
    }

    /// Tabulated density; rescaled to unit weight at load. A raw weight
    /// deviating from 1 by more than 50% is rejected unless `renormalize`
    /// is set.
    pub fn tabulated(samples: Vec<(f64, f64)>, renormalize: bool) -> Result<Self> {
        Ok(EnergyDistribution::Tabulated(Tabulated::new(
            samples,
            renormalize,
        )?))
    }

    /// Support (L, M); L = −∞ only for Breit-Wigner, M = +∞ for the
    /// heavy-tailed kinds.
    pub fn support(&self) -> (f64, f64) {
        match self {
            EnergyDistribution::GammaHalf { .. } | EnergyDistribution::PowerLaw { .. } => {
                (0.0, f64::INFINITY)
            }
            EnergyDistribution::BreitWigner { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            EnergyDistribution::Square { m } => (0.0, *m),
            EnergyDistribution::Discrete { atoms } => {
                (atoms[0].0, atoms[atoms.len() - 1].0)
            }
            EnergyDistribution::Tabulated(t) => {
                (t.energies[0], t.energies[t.energies.len() - 1])
            }
        }
    }

    /// Characteristic energy scale (γ, M or the support span).
    pub fn scale(&self) -> f64 {
        match self {
            EnergyDistribution::GammaHalf { gamma } => *gamma,
            EnergyDistribution::PowerLaw { gamma, .. } => *gamma,
            EnergyDistribution::BreitWigner { gamma, .. } => *gamma,
            EnergyDistribution::Square { m } => *m,
            EnergyDistribution::Discrete { atoms } => {
                let span = atoms[atoms.len() - 1].0 - atoms[0].0;
                if span > 0.0 {
                    span
                } else {
                    1.0
                }
            }
            EnergyDistribution::Tabulated(t) => {
                t.energies[t.energies.len() - 1] - t.energies[0]
            }
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, EnergyDistribution::Discrete { .. })
    }

    /// Pointwise density for the continuous kinds; zero outside support.
    pub(crate) fn density(&self, e: f64) -> f64 {
        match self {
            EnergyDistribution::GammaHalf { gamma } => {
                if e <= 0.0 {
                    if e == 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else {
                    (std::f64::consts::PI * gamma).sqrt().recip()
                        * e.powf(-0.5)
                        * (-e / gamma).exp()
                }
            }
            EnergyDistribution::PowerLaw { gamma, exponent } => {
                if e < 0.0 {
                    0.0
                } else {
                    (exponent - 1.0) / gamma * (1.0 + e / gamma).powf(-exponent)
                }
            }
            EnergyDistribution::BreitWigner { gamma, e0 } => {
                let d = e - e0;
                gamma / std::f64::consts::PI / (d * d + gamma * gamma)
            }
            EnergyDistribution::Square { m } => {
                if (0.0..=*m).contains(&e) {
                    1.0 / m
                } else {
                    0.0
                }
            }
            EnergyDistribution::Discrete { .. } => {
                unreachable!("discrete spectra have no pointwise density")
            }
            EnergyDistribution::Tabulated(t) => t.density(e),
        }
    }

    /// Cut-off weight α = ∫ ρ dE below the cut-off. For Breit-Wigner, `c`
    /// is the half-width of the symmetric window [E₀−c, E₀+c].
    pub fn alpha_at(&self, c: f64) -> Result<f64> {
        self.validate_cutoff(c)?;
        Ok(match self {
            EnergyDistribution::GammaHalf { gamma } => {
                gamma_p(0.5, c / gamma, ln_gamma_half_integer(0))
            }
            EnergyDistribution::PowerLaw { gamma, exponent } => {
                1.0 - (1.0 + c / gamma).powf(1.0 - exponent)
            }
            EnergyDistribution::BreitWigner { gamma, .. } => {
                2.0 / std::f64::consts::PI * (c / gamma).atan()
            }
            EnergyDistribution::Square { m } => (c / m).min(1.0),
            EnergyDistribution::Discrete { atoms } => atoms
                .iter()
                .filter(|&&(e, _)| e <= c)
                .map(|&(_, a)| a)
                .sum(),
            EnergyDistribution::Tabulated(t) => t.cdf(c).min(1.0),
        })
    }

    fn validate_cutoff(&self, c: f64) -> Result<()> {
        if let EnergyDistribution::BreitWigner { .. } = self {
            // symmetric window half-width
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::CutoffOutOfSupport {
                    cutoff: c,
                    lower: 0.0,
                    upper: f64::INFINITY,
                });
            }
            return Ok(());
        }
        let (lo, hi) = self.support();
        if !(c.is_finite() && c > lo && c <= hi) {
            return Err(Error::CutoffOutOfSupport {
                cutoff: c,
                lower: lo,
                upper: hi,
            });
        }
        Ok(())
    }

    /// View of this distribution truncated at cut-off `c`.
    pub fn truncate(&self, c: f64) -> Result<TruncationView<'_>> {
        let alpha = self.alpha_at(c)?;
        if alpha <= 0.0 {
            return Err(Error::CutoffOutOfSupport {
                cutoff: c,
                lower: self.support().0,
                upper: self.support().1,
            });
        }
        Ok(TruncationView {
            base: self,
            cutoff: c,
            alpha,
        })
    }

    /// Largest k for which the raw moment hₖ exists (capped at MAX_ORDER).
    pub fn max_moment_order(&self) -> usize {
        match self {
            EnergyDistribution::PowerLaw { exponent, .. } => {
                let kmax = (exponent - 1.0).ceil() as usize - 1;
                kmax.min(MAX_ORDER)
            }
            EnergyDistribution::BreitWigner { .. } => 0,
            _ => MAX_ORDER,
        }
    }

    /// Raw energy moments h₀..hₙ in scaled form Hₖ = hₖ/k!; closed forms
    /// for the analytic kinds, adaptive Simpson for tabulated data.
    pub fn raw_moments(&self, n: usize) -> Result<MomentVector> {
        self.raw_moments_with(n, &QuadSettings::default())
    }

    pub fn raw_moments_with(&self, n: usize, s: &QuadSettings) -> Result<MomentVector> {
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: n,
                max: MAX_ORDER,
            });
        }
        let kmax = self.max_moment_order();
        if n > kmax {
            return Err(Error::MomentDivergent { k: kmax + 1 });
        }
        let mut scaled = Vec::with_capacity(n + 1);
        match self {
            EnergyDistribution::GammaHalf { gamma } => {
                let mut h = 1.0;
                scaled.push(h);
                for k in 1..=n {
                    h *= gamma * (k as f64 - 0.5) / k as f64;
                    scaled.push(h);
                }
            }
            EnergyDistribution::PowerLaw { gamma, exponent } => {
                let mut h = 1.0;
                scaled.push(h);
                for k in 1..=n {
                    h *= gamma / (exponent - 1.0 - k as f64);
                    scaled.push(h);
                }
            }
            EnergyDistribution::BreitWigner { .. } => {
                scaled.push(1.0);
            }
            EnergyDistribution::Square { m } => {
                let mut h = 1.0;
                scaled.push(h);
                for k in 1..=n {
                    h *= m / (k + 1) as f64;
                    scaled.push(h);
                }
            }
            EnergyDistribution::Discrete { atoms } => {
                for k in 0..=n {
                    let h: f64 = atoms.iter().map(|&(e, a)| a * e.powi(k as i32)).sum();
                    scaled.push(h * inv_factorial(k));
                }
            }
            EnergyDistribution::Tabulated(t) => {
                for k in 0..=n {
                    let h = t.integrate(
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                        &|e| e.powi(k as i32),
                        s,
                    )?;
                    scaled.push(h * inv_factorial(k));
                }
            }
        }
        MomentVector::from_scaled(scaled, 1.0)
    }

    /// Raw moments through min(n, max existing order), plus the first
    /// divergent order if the request exceeded it.
    pub fn raw_moments_available(&self, n: usize) -> Result<(MomentVector, Option<usize>)> {
        let n = n.min(MAX_ORDER);
        let kmax = self.max_moment_order();
        let take = n.min(kmax);
        let mv = self.raw_moments(take)?;
        let divergent = if n > kmax { Some(kmax + 1) } else { None };
        Ok((mv, divergent))
    }

    /// Independent quadrature route to hₖ, used to cross-check the closed
    /// forms in tests.
    pub fn raw_moment_by_quadrature(&self, k: usize, s: &QuadSettings) -> Result<f64> {
        let (lo, hi) = self.support();
        self.integrate_weighted(lo, hi, &|e| e.powi(k as i32), s)
    }

    /// ∫ f(E) ρ(E) dE over support ∩ [lo, hi], with kind-aware handling of
    /// the E^(−1/2) endpoint singularity and of infinite tails.
    pub fn integrate_weighted(
        &self,
        lo: f64,
        hi: f64,
        f: &dyn Fn(f64) -> f64,
        s: &QuadSettings,
    ) -> Result<f64> {
        match self {
            EnergyDistribution::Discrete { atoms } => Ok(atoms
                .iter()
                .filter(|&&(e, _)| e >= lo && e <= hi)
                .map(|&(e, a)| a * f(e))
                .sum()),
            EnergyDistribution::GammaHalf { gamma } => {
                let lo = lo.max(0.0);
                if hi <= lo {
                    return Ok(0.0);
                }
                let norm = (std::f64::consts::PI * gamma).sqrt().recip();
                let split = gamma.min(hi);
                let mut total = 0.0;
                if lo < split {
                    // E = u² removes the E^(−1/2) singularity
                    let g = |u: f64| 2.0 * norm * (-u * u / gamma).exp() * f(u * u);
                    total += quad::integrate(&g, lo.sqrt(), split.sqrt(), s)?.value;
                }
                let start = lo.max(split);
                if hi > start {
                    let g = |e: f64| self.density(e) * f(e);
                    total += if hi.is_infinite() {
                        quad::integrate_to_infinity(&g, start, *gamma, s)?.value
                    } else {
                        quad::integrate(&g, start, hi, s)?.value
                    };
                }
                Ok(total)
            }
            EnergyDistribution::PowerLaw { gamma, .. } => {
                let lo = lo.max(0.0);
                if hi <= lo {
                    return Ok(0.0);
                }
                let g = |e: f64| self.density(e) * f(e);
                if hi.is_infinite() {
                    Ok(quad::integrate_to_infinity_sq(&g, lo, *gamma, s)?.value)
                } else {
                    Ok(quad::integrate(&g, lo, hi, s)?.value)
                }
            }
            EnergyDistribution::BreitWigner { gamma, e0 } => {
                let g = |e: f64| self.density(e) * f(e);
                match (lo.is_infinite(), hi.is_infinite()) {
                    (false, false) => {
                        if hi <= lo {
                            Ok(0.0)
                        } else {
                            Ok(quad::integrate(&g, lo, hi, s)?.value)
                        }
                    }
                    (false, true) => Ok(quad::integrate_to_infinity(&g, lo, *gamma, s)?.value),
                    (true, false) => {
                        let refl = |x: f64| g(-x);
                        Ok(quad::integrate_to_infinity(&refl, -hi, *gamma, s)?.value)
                    }
                    (true, true) => {
                        let up = quad::integrate_to_infinity(&g, *e0, *gamma, s)?.value;
                        let refl = |x: f64| g(-x);
                        let down = quad::integrate_to_infinity(&refl, -e0, *gamma, s)?.value;
                        Ok(up + down)
                    }
                }
            }
            EnergyDistribution::Square { m } => {
                let a = lo.max(0.0);
                let b = hi.min(*m);
                if b <= a {
                    return Ok(0.0);
                }
                Ok(quad::integrate(&|e| f(e) / m, a, b, s)?.value)
            }
            EnergyDistribution::Tabulated(t) => t.integrate(lo, hi, f, s),
        }
    }
}

/// A distribution truncated at cut-off `c` (for Breit-Wigner, the
/// symmetric window [E₀−c, E₀+c]) carrying the weight α of the kept part.
#[derive(Debug, Clone)]
pub struct TruncationView<'a> {
    base: &'a EnergyDistribution,
    cutoff: f64,
    alpha: f64,
}

impl<'a> TruncationView<'a> {
    pub fn base(&self) -> &'a EnergyDistribution {
        self.base
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Energy window kept by the truncation.
    pub fn window(&self) -> (f64, f64) {
        match self.base {
            EnergyDistribution::BreitWigner { e0, .. } => {
                (e0 - self.cutoff, e0 + self.cutoff)
            }
            _ => (self.base.support().0, self.cutoff),
        }
    }

    /// Upper edge the cut-off-edge moments bₙ are taken against.
    pub fn edge(&self) -> f64 {
        self.window().1
    }

    /// Truncated moments H̄ₖ = h̄ₖ/k! with h̄ₖ = α⁻¹ ∫ ρ Eᵏ over the window.
    /// Finite for any finite cut-off regardless of tail behaviour.
    pub fn truncated_moments(&self, n: usize, s: &QuadSettings) -> Result<MomentVector> {
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: n,
                max: MAX_ORDER,
            });
        }
        let mut scaled = Vec::with_capacity(n + 1);
        match self.base {
            EnergyDistribution::Square { .. } => {
                let mut h = 1.0;
                scaled.push(h);
                for k in 1..=n {
                    h *= self.cutoff / (k + 1) as f64;
                    scaled.push(h);
                }
            }
            EnergyDistribution::Discrete { atoms } => {
                for k in 0..=n {
                    let h: f64 = atoms
                        .iter()
                        .filter(|&&(e, _)| e <= self.cutoff)
                        .map(|&(e, a)| a * e.powi(k as i32))
                        .sum();
                    scaled.push(h / self.alpha * inv_factorial(k));
                }
            }
            EnergyDistribution::GammaHalf { gamma } => {
                // h̄ₖ = hₖ · P(k+1/2, c/γ) / α
                let x = self.cutoff / gamma;
                let mut h = 1.0;
                for k in 0..=n {
                    if k > 0 {
                        h *= gamma * (k as f64 - 0.5) / k as f64;
                    }
                    let p = gamma_p(k as f64 + 0.5, x, ln_gamma_half_integer(k));
                    scaled.push(h * p / self.alpha);
                }
            }
            EnergyDistribution::BreitWigner { gamma, e0 } => {
                // h̄ₖ = α⁻¹ (γ/π) Σⱼ C(k,j) E₀^(k−j) Iⱼ with
                // Iⱼ = ∫_{−c}^{c} xʲ/(x²+γ²) dx
                let iw = lorentzian_window_integrals(*gamma, self.cutoff, n);
                let norm = gamma / std::f64::consts::PI / self.alpha;
                for k in 0..=n {
                    let terms: Vec<f64> = (0..=k)
                        .map(|j| {
                            crate::special::binomial(k, j)
                                * e0.powi((k - j) as i32)
                                * iw[j]
                        })
                        .collect();
                    let (h, _) = crate::special::compensated_sum(&terms);
                    scaled.push(h * norm * inv_factorial(k));
                }
            }
            _ => {
                let (lo, hi) = self.window();
                for k in 0..=n {
                    let h = self.base.integrate_weighted(
                        lo,
                        hi,
                        &|e| e.powi(k as i32),
                        s,
                    )?;
                    scaled.push(h / self.alpha * inv_factorial(k));
                }
            }
        }
        // the α division leaves H̄₀ within quadrature noise of 1; pin it
        debug_assert!((scaled[0] - 1.0).abs() < 1e-8, "H̄₀ = {}", scaled[0]);
        scaled[0] = 1.0;
        MomentVector::from_scaled(scaled, self.alpha)
    }
}

/// Iₖ = ∫_{−w}^{w} xᵏ/(x²+γ²) dx for k = 0..=n; odd entries vanish.
///
/// Even orders use the recurrence Iₖ = 2wᵏ⁻¹/(k−1) − γ²Iₖ₋₂ for windows
/// wider than the Lorentzian scale and the alternating series in (w/γ)²
/// for narrow ones, where the recurrence cancels badly.
fn lorentzian_window_integrals(gamma: f64, w: f64, n: usize) -> Vec<f64> {
    let mut iw = vec![0.0; n + 1];
    iw[0] = 2.0 / gamma * (w / gamma).atan();
    if w > 0.7 * gamma {
        for k in (2..=n).step_by(2) {
            iw[k] = 2.0 * w.powi(k as i32 - 1) / (k as f64 - 1.0) - gamma * gamma * iw[k - 2];
        }
    } else {
        let r = (w / gamma) * (w / gamma);
        for k in (2..=n).step_by(2) {
            // (2/γ²) Σⱼ (−1)ʲ w^(2j+k+1) / (γ^(2j) (2j+k+1))
            let mut term = w.powi(k as i32 + 1) / gamma / gamma;
            let mut sum = term / (k as f64 + 1.0);
            for j in 1..200 {
                term *= -r;
                let add = term / (2 * j + k + 1) as f64;
                sum += add;
                if add.abs() < sum.abs() * 1e-17 {
                    break;
                }
            }
            iw[k] = 2.0 * sum;
        }
    }
    iw
}

/// Raw, possibly unnormalized, user input for [`normalize`].
#[derive(Debug, Clone)]
pub enum RawDistribution {
    /// Constant density on [0, m].
    Square { m: f64, density: f64 },
    /// Atoms with arbitrary positive weights.
    Discrete { atoms: Vec<(f64, f64)> },
    /// Density samples with arbitrary scale.
    Tabulated { samples: Vec<(f64, f64)> },
}

/// Result of [`normalize`]: the unit-weight distribution and the factor
/// the input density was multiplied by.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub dist: EnergyDistribution,
    pub rescale: f64,
}

/// Rescales a raw density to unit total weight.
pub fn normalize(raw: RawDistribution) -> Result<Normalized> {
    match raw {
        RawDistribution::Square { m, density } => {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "square requires M > 0, got {m}"
                )));
            }
            if density < 0.0 {
                return Err(Error::NegativeDensity {
                    energy: 0.0,
                    value: density,
                });
            }
            let weight = density * m;
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::NonNormalizable { weight });
            }
            Ok(Normalized {
                dist: EnergyDistribution::square(m)?,
                rescale: 1.0 / weight,
            })
        }
        RawDistribution::Discrete { atoms } => {
            for &(e, a) in &atoms {
                if a < 0.0 {
                    return Err(Error::NegativeDensity {
                        energy: e,
                        value: a,
                    });
                }
            }
            let weight: f64 = atoms.iter().map(|&(_, a)| a).sum();
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::NonNormalizable { weight });
            }
            let rescaled: Vec<(f64, f64)> =
                atoms.iter().map(|&(e, a)| (e, a / weight)).collect();
            Ok(Normalized {
                dist: EnergyDistribution::discrete(&rescaled)?,
                rescale: 1.0 / weight,
            })
        }
        RawDistribution::Tabulated { samples } => {
            for &(e, r) in &samples {
                if r < 0.0 {
                    return Err(Error::NegativeDensity {
                        energy: e,
                        value: r,
                    });
                }
            }
            let weight: f64 = samples
                .windows(2)
                .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
                .sum();
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::NonNormalizable { weight });
            }
            Ok(Normalized {
                dist: EnergyDistribution::tabulated(samples, true)?,
                rescale: 1.0 / weight,
            })
        }
    }
}

/// On-disk distribution description (JSON).
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    GammaHalf {
        gamma: f64,
    },
    PowerLaw {
        gamma: f64,
        exponent: f64,
    },
    BreitWigner {
        gamma: f64,
        #[serde(default)]
        e0: f64,
    },
    Square {
        m: f64,
    },
    Discrete {
        atoms: Vec<(f64, f64)>,
    },
    Tabulated {
        file: String,
    },
}

impl DistributionSpec {
    /// Resolves the spec into a distribution; `base_dir` anchors relative
    /// tabulated-file paths, `renormalize` widens the unit-weight gate.
    pub fn into_distribution(
        self,
        base_dir: &Path,
        renormalize: bool,
    ) -> Result<EnergyDistribution> {
        match self {
            DistributionSpec::GammaHalf { gamma } => EnergyDistribution::gamma_half(gamma),
            DistributionSpec::PowerLaw { gamma, exponent } => {
                EnergyDistribution::power_law(gamma, exponent)
            }
            DistributionSpec::BreitWigner { gamma, e0 } => {
                EnergyDistribution::breit_wigner(gamma, e0)
            }
            DistributionSpec::Square { m } => EnergyDistribution::square(m),
            DistributionSpec::Discrete { atoms } => {
                let sum: f64 = atoms.iter().map(|&(_, a)| a).sum();
                if !(sum.is_finite() && sum > 0.0) {
                    return Err(Error::NonNormalizable { weight: sum });
                }
                if (sum - 1.0).abs() > 0.5 && !renormalize {
                    return Err(Error::InvalidInput(format!(
                        "discrete weights sum to {sum}; pass --renormalize to rescale"
                    )));
                }
                let rescaled: Vec<(f64, f64)> =
                    atoms.iter().map(|&(e, a)| (e, a / sum)).collect();
                EnergyDistribution::discrete(&rescaled)
            }
            DistributionSpec::Tabulated { file } => {
                let path = base_dir.join(&file);
                let samples = load_tabulated_csv(&path)?;
                EnergyDistribution::tabulated(samples, renormalize)
            }
        }
    }
}

/// Loads a distribution spec file (JSON) and resolves it.
pub fn load_spec_file(path: &Path, renormalize: bool) -> Result<EnergyDistribution> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let spec: DistributionSpec = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    spec.into_distribution(base, renormalize)
}

/// Reads `E,rho` CSV samples with strictly increasing energies.
pub fn load_tabulated_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    {
        let headers = reader
            .headers()
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        if headers.len() < 2 || &headers[0] != "E" || &headers[1] != "rho" {
            return Err(Error::InvalidInput(format!(
                "{}: expected header `E,rho`, got `{}`",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    let mut samples = Vec::new();
    for record in reader.records() {
        let record =
            record.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let e: f64 = record[0]
            .trim()
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad energy value: {e}")))?;
        let r: f64 = record[1]
            .trim()
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad density value: {e}")))?;
        samples.push((e, r));
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> QuadSettings {
        QuadSettings::default()
    }

    #[test]
    fn gamma_half_closed_moments_match_quadrature() {
        let d = EnergyDistribution::gamma_half(1.0).unwrap();
        let h = d.raw_moments(4).unwrap();
        assert!((h.raw_at(1).unwrap() - 0.5).abs() < 1e-14);
        assert!((h.raw_at(2).unwrap() - 0.75).abs() < 1e-14);
        for k in 0..=4 {
            let q = d.raw_moment_by_quadrature(k, &settings()).unwrap();
            let c = h.raw_at(k).unwrap();
            assert!(
                (q - c).abs() <= 1e-8 * c.abs().max(1.0),
                "k={k}: quad {q} vs closed {c}"
            );
        }
    }

    #[test]
    fn power_law_moments_and_divergence() {
        let d = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        let h = d.raw_moments(2).unwrap();
        assert!((h.raw_at(1).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((h.raw_at(2).unwrap() - 8.0 / 3.0).abs() < 1e-13);
        assert!(matches!(
            d.raw_moments(4),
            Err(Error::MomentDivergent { k: 3 })
        ));
        let (partial, divergent) = d.raw_moments_available(4).unwrap();
        assert_eq!(partial.order(), 2);
        assert_eq!(divergent, Some(3));
        for k in 0..=2 {
            let q = d.raw_moment_by_quadrature(k, &settings()).unwrap();
            let c = h.raw_at(k).unwrap();
            assert!(
                (q - c).abs() <= 1e-8 * c.abs().max(1.0),
                "k={k}: quad {q} vs closed {c}"
            );
        }
    }

    #[test]
    fn breit_wigner_moments_diverge_immediately() {
        let d = EnergyDistribution::breit_wigner(1.0, 0.0).unwrap();
        assert!(matches!(
            d.raw_moments(1),
            Err(Error::MomentDivergent { k: 1 })
        ));
        assert_eq!(d.raw_moments(0).unwrap().order(), 0);
    }

    #[test]
    fn square_moments() {
        let d = EnergyDistribution::square(1.0).unwrap();
        let h = d.raw_moments(2).unwrap();
        assert!((h.raw_at(1).unwrap() - 0.5).abs() < 1e-15);
        assert!((h.raw_at(2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_examples() {
        let pl = EnergyDistribution::power_law(1.0, 3.5).unwrap();
        assert!((pl.alpha_at(3.0).unwrap() - 31.0 / 32.0).abs() < 1e-12);

        let sq = EnergyDistribution::square(2.0).unwrap();
        assert!((sq.alpha_at(2.0).unwrap() - 1.0).abs() < 1e-15);

        let disc = EnergyDistribution::discrete(&[(0.0, 0.7), (0.5, 0.2), (1.0, 0.1)]).unwrap();
        assert!((disc.alpha_at(0.75).unwrap() - 0.9).abs() < 1e-15);
        assert!((disc.alpha_at(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_monotone_and_full_at_upper_edge() {
        let d = EnergyDistribution::gamma_half(1.0).unwrap();
        let mut prev = 0.0;
        for i in 1..=40 {
            let c = 0.25 * i as f64;
            let a = d.alpha_at(c).unwrap();
            assert!(a >= prev - 1e-15, "alpha not monotone at c={c}");
            prev = a;
        }
        assert!((d.alpha_at(40.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn alpha_closed_vs_quadrature() {
        let cases: Vec<(EnergyDistribution, f64)> = vec![
            (EnergyDistribution::gamma_half(1.0).unwrap(), 2.0),
            (EnergyDistribution::power_law(1.0, 3.5).unwrap(), 3.0),
            (EnergyDistribution::square(2.0).unwrap(), 1.3),
        ];
        for (d, c) in cases {
            let closed = d.alpha_at(c).unwrap();
            let quad = d
                .integrate_weighted(d.support().0, c, &|_| 1.0, &settings())
                .unwrap();
            assert!(
                (closed - quad).abs() < 1e-9,
                "{d:?} at c={c}: {closed} vs {quad}"
            );
        }
        // Breit-Wigner window: α = (2/π) arctan(c/γ)
        let bw = EnergyDistribution::breit_wigner(1.0, 0.0).unwrap();
        let closed = bw.alpha_at(5.0).unwrap();
        assert!((closed - 2.0 / std::f64::consts::PI * 5.0f64.atan()).abs() < 1e-14);
        let quad = bw
            .integrate_weighted(-5.0, 5.0, &|_| 1.0, &settings())
            .unwrap();
        assert!((closed - quad).abs() < 1e-10);
    }

    #[test]
    fn cutoff_validation() {
        let d = EnergyDistribution::square(1.0).unwrap();
        assert!(matches!(
            d.alpha_at(1.5),
            Err(Error::CutoffOutOfSupport { .. })
        ));
        assert!(matches!(
            d.alpha_at(0.0),
            Err(Error::CutoffOutOfSupport { .. })
        ));
    }

    #[test]
    fn truncated_square() {
        let d = EnergyDistribution::square(1.0).unwrap();
        let view = d.truncate(0.5).unwrap();
        let h = view.truncated_moments(2, &settings()).unwrap();
        assert!((h.raw_at(1).unwrap() - 0.25).abs() < 1e-15);
        assert!((view.alpha() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn truncated_equals_raw_at_full_support() {
        let d = EnergyDistribution::square(2.0).unwrap();
        let view = d.truncate(2.0).unwrap();
        let hbar = view.truncated_moments(6, &settings()).unwrap();
        let h = d.raw_moments(6).unwrap();
        for k in 0..=6 {
            let a = hbar.scaled_at(k).unwrap();
            let b = h.scaled_at(k).unwrap();
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-12), "k={k}");
        }
    }

    #[test]
    fn gamma_half_truncated_closed_vs_quadrature() {
        let d = EnergyDistribution::gamma_half(1.0).unwrap();
        let view = d.truncate(2.5).unwrap();
        let hbar = view.truncated_moments(6, &settings()).unwrap();
        for k in 0..=6usize {
            // independent route: substituted quadrature over the window
            let num = d
                .integrate_weighted(0.0, 2.5, &|e| e.powi(k as i32), &settings())
                .unwrap();
            let want = num / view.alpha();
            let got = hbar.raw_at(k).unwrap();
            assert!(
                (got - want).abs() <= 1e-9 * want.abs().max(1e-10),
                "k={k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn breit_wigner_window_moments() {
        let d = EnergyDistribution::breit_wigner(1.0, 0.0).unwrap();
        let view = d.truncate(5.0).unwrap();
        assert!((view.alpha() - 0.874_334_083_621_997_6).abs() < 1e-12);
        let hbar = view.truncated_moments(2, &settings()).unwrap();
        // odd symmetry forces h̄₁ = 0; h̄₂ frozen from an external quadrature
        assert!(hbar.raw_at(1).unwrap().abs() < 1e-10);
        assert!((hbar.raw_at(2).unwrap() - 2.640_597_937_863_373).abs() < 1e-8);
        assert_eq!(view.edge(), 5.0);
        assert_eq!(view.window(), (-5.0, 5.0));
    }

    #[test]
    fn tabulated_power_law_weight() {
        // ρ(E) = (1+E)^{-7/2} has raw weight 2/5 on [0, ∞)
        let samples: Vec<(f64, f64)> = (0..=6000)
            .map(|i| {
                let e = i as f64 * 0.01;
                (e, (1.0 + e).powf(-3.5))
            })
            .collect();
        let err = EnergyDistribution::tabulated(samples.clone(), false).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        let d = EnergyDistribution::tabulated(samples, true).unwrap();
        // after renormalization the weight is exactly 1
        let h = d.raw_moments(0).unwrap();
        assert!((h.scaled_at(0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tabulated_shift_covariance() {
        let base: Vec<(f64, f64)> = (0..=200)
            .map(|i| {
                let e = i as f64 * 0.01;
                (e, if e <= 1.0 { e } else { 2.0 - e })
            })
            .collect();
        let d0 = EnergyDistribution::tabulated(base.clone(), true).unwrap();
        let s = 0.3;
        let shifted: Vec<(f64, f64)> = base.iter().map(|&(e, r)| (e + s, r)).collect();
        let d1 = EnergyDistribution::tabulated(shifted, true).unwrap();
        let h0 = d0.raw_moments(2).unwrap();
        let h1 = d1.raw_moments(2).unwrap();
        let m0 = h0.raw_at(1).unwrap();
        let m1 = h1.raw_at(1).unwrap();
        assert!((m1 - m0 - s).abs() < 1e-8, "h1 must shift by s");
        let v0 = h0.variance().unwrap();
        let v1 = h1.variance().unwrap();
        assert!((v0 - v1).abs() < 1e-8, "central moment must be invariant");
    }

    #[test]
    fn normalize_examples() {
        let out = normalize(RawDistribution::Square {
            m: 2.0,
            density: 1.0,
        })
        .unwrap();
        assert!((out.rescale - 0.5).abs() < 1e-15);

        let out = normalize(RawDistribution::Discrete {
            atoms: vec![(0.0, 7.0), (0.5, 2.0), (1.0, 1.0)],
        })
        .unwrap();
        assert!((out.rescale - 0.1).abs() < 1e-15);
        if let EnergyDistribution::Discrete { atoms } = &out.dist {
            assert!((atoms[0].1 - 0.7).abs() < 1e-15);
            assert!((atoms[1].1 - 0.2).abs() < 1e-15);
            assert!((atoms[2].1 - 0.1).abs() < 1e-15);
        } else {
            panic!("expected discrete");
        }
    }

    #[test]
    fn normalize_rejects_bad_input() {
        assert!(matches!(
            normalize(RawDistribution::Discrete {
                atoms: vec![(0.0, -1.0), (1.0, 2.0)]
            }),
            Err(Error::NegativeDensity { .. })
        ));
        assert!(matches!(
            normalize(RawDistribution::Square {
                m: 1.0,
                density: 0.0
            }),
            Err(Error::NonNormalizable { .. })
        ));
    }

    #[test]
    fn discrete_requires_order_and_unit_weight() {
        assert!(EnergyDistribution::discrete(&[(1.0, 0.5), (0.0, 0.5)]).is_err());
        assert!(EnergyDistribution::discrete(&[(0.0, 0.5), (1.0, 0.4)]).is_err());
        assert!(EnergyDistribution::discrete(&[(0.0, 0.5), (1.0, 0.5)]).is_ok());
    }

    #[test]
    fn spec_file_round_trip() {
        let json = r#"{"kind": "power_law", "gamma": 1.0, "exponent": 3.5}"#;
        let spec: DistributionSpec = serde_json::from_str(json).unwrap();
        let d = spec.into_distribution(Path::new("."), false).unwrap();
        assert!(matches!(d, EnergyDistribution::PowerLaw { .. }));

        let missing: std::result::Result<DistributionSpec, _> =
            serde_json::from_str(r#"{"kind": "power_law", "gamma": 1.0}"#);
        let msg = missing.unwrap_err().to_string();
        assert!(msg.contains("exponent"), "error should name the field: {msg}");
    }
}
