//! Exact survival amplitude A(t) = ∫ ρ(E) e^(−iEt) dE, by closed form
//! where one exists and by oscillatory quadrature otherwise. This is the
//! ground truth every bound is tested against.

use num_complex::Complex64;

use crate::distributions::EnergyDistribution;
use crate::error::{Error, Result};
use crate::quad::{self, QuadSettings};

/// One sample of the exact evolution: A(t) = R(t) − iI(t), |A| and P = |A|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalSample {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub p: f64,
}

impl SurvivalSample {
    fn from_amplitude(t: f64, a: Complex64) -> Self {
        SurvivalSample {
            t,
            re: a.re,
            im: -a.im,
            abs: a.norm(),
            p: a.norm_sqr(),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "survival amplitude is defined for t >= 0, got {t}"
        )));
    }
    Ok(())
}

/// sin(x)/x with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Exact survival amplitude at time t (ħ = 1).
///
/// Closed forms: GammaHalf A = (1+iγt)^(−1/2); BreitWigner
/// A = e^(−iE₀t) e^(−γt); Square A = e^(−iMt/2) sinc(Mt/2); Discrete
/// A = Σ aⱼ e^(−iEⱼt). PowerLaw and Tabulated go through quadrature.
pub fn exact_survival(dist: &EnergyDistribution, t: f64) -> Result<SurvivalSample> {
    exact_survival_with(dist, t, &QuadSettings { abs_tol: 1e-9, ..QuadSettings::default() })
}

pub fn exact_survival_with(
    dist: &EnergyDistribution,
    t: f64,
    s: &QuadSettings,
) -> Result<SurvivalSample> {
    check_time(t)?;
    let a = match dist {
        EnergyDistribution::GammaHalf { gamma } => {
            Complex64::new(1.0, gamma * t).powf(-0.5)
        }
        EnergyDistribution::BreitWigner { gamma, e0 } => {
            Complex64::from_polar((-gamma * t).exp(), -e0 * t)
        }
        EnergyDistribution::Square { m } => {
            let half = 0.5 * m * t;
            Complex64::from_polar(1.0, -half) * sinc(half)
        }
        EnergyDistribution::Discrete { atoms } => atoms
            .iter()
            .map(|&(e, w)| Complex64::from_polar(w, -e * t))
            .sum(),
        EnergyDistribution::PowerLaw { .. } => {
            if t == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                let f = |e: f64| dist.density(e);
                quad::fourier_semi_infinite(&f, 0.0, t, s)?
            }
        }
        EnergyDistribution::Tabulated(_) => tabulated_amplitude(dist, t)?,
    };
    Ok(SurvivalSample::from_amplitude(t, a))
}

/// Exact amplitude of a piecewise-linear density: each segment
/// ∫ (r₀ + slope·(E−e₀)) e^(−iEt) dE has a closed form; tiny phases fall
/// back to a fixed-rule evaluation to dodge cancellation.
fn tabulated_amplitude(dist: &EnergyDistribution, t: f64) -> Result<Complex64> {
    let tab = match dist {
        EnergyDistribution::Tabulated(t) => t,
        _ => unreachable!(),
    };
    let energies = tab.energies();
    let densities = tab.densities();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..energies.len() - 1 {
        let (e0, e1) = (energies[i], energies[i + 1]);
        let (r0, r1) = (densities[i], densities[i + 1]);
        total += linear_segment_fourier(e0, e1, r0, r1, t);
    }
    Ok(total)
}

/// ∫ ρ e^(−iEt) over one linear segment.
fn linear_segment_fourier(e0: f64, e1: f64, r0: f64, r1: f64, t: f64) -> Complex64 {
    let de = e1 - e0;
    let phase = t * de;
    if phase.abs() < 1e-2 {
        // Simpson on Re/Im: exact enough at this phase (error O(phase⁴))
        let em = 0.5 * (e0 + e1);
        let rm = 0.5 * (r0 + r1);
        let val = |e: f64, r: f64| Complex64::from_polar(r, -e * t);
        return (val(e0, r0) + val(em, rm) * 4.0 + val(e1, r1)) * (de / 6.0);
    }
    let tau = Complex64::new(0.0, -t);
    let slope = (r1 - r0) / de;
    let exp0 = (tau * e0).exp();
    let exp1 = (tau * e1).exp();
    (exp1 * r1 - exp0 * r0) / tau - (exp1 - exp0) * slope / (tau * tau)
}

/// The same amplitude through a quadrature-only route; the independent
/// cross-check for the closed forms.
pub fn survival_by_quadrature(
    dist: &EnergyDistribution,
    t: f64,
    s: &QuadSettings,
) -> Result<SurvivalSample> {
    check_time(t)?;
    let a = match dist {
        EnergyDistribution::GammaHalf { gamma } => {
            // E = u²: A(t) = 2N ∫₀^∞ e^{−u²/γ} e^{−iu²t} du, Gaussian decay
            let norm = (std::f64::consts::PI * gamma).sqrt().recip();
            let upper = (gamma * 37.0f64).sqrt();
            let re = quad::integrate(
                &|u: f64| 2.0 * norm * (-u * u / gamma).exp() * (u * u * t).cos(),
                0.0,
                upper,
                s,
            )?;
            let im = quad::integrate(
                &|u: f64| 2.0 * norm * (-u * u / gamma).exp() * (u * u * t).sin(),
                0.0,
                upper,
                s,
            )?;
            Complex64::new(re.value, -im.value)
        }
        EnergyDistribution::PowerLaw { .. } => {
            if t == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                quad::fourier_semi_infinite(&|e| dist.density(e), 0.0, t, s)?
            }
        }
        EnergyDistribution::BreitWigner { gamma, e0 } => {
            // symmetric density: A = e^{−iE₀t} · 2∫₀^∞ ρ₀(x) cos(xt) dx
            let g = *gamma;
            let rho0 = move |x: f64| g / std::f64::consts::PI / (x * x + g * g);
            let cos_part = if t == 0.0 {
                Complex64::new(
                    2.0 * quad::integrate_to_infinity(&rho0, 0.0, g, s)?.value,
                    0.0,
                )
            } else {
                let f = quad::fourier_semi_infinite(&rho0, 0.0, t, s)?;
                Complex64::new(2.0 * f.re, 0.0)
            };
            Complex64::from_polar(1.0, -e0 * t) * cos_part
        }
        EnergyDistribution::Square { m } => {
            quad::fourier_finite(&|_| 1.0 / m, 0.0, *m, t, s)?
        }
        EnergyDistribution::Tabulated(tab) => {
            let (lo, hi) = (tab.energies()[0], *tab.energies().last().unwrap());
            quad::fourier_finite(&|e| dist.density(e), lo, hi, t, s)?
        }
        EnergyDistribution::Discrete { atoms } => atoms
            .iter()
            .map(|&(e, w)| Complex64::from_polar(w, -e * t))
            .sum(),
    };
    Ok(SurvivalSample::from_amplitude(t, a))
}

/// Samples the exact evolution over a time grid.
pub fn exact_survival_grid(
    dist: &EnergyDistribution,
    grid: &[f64],
) -> Result<Vec<SurvivalSample>> {
    grid.iter().map(|&t| exact_survival(dist, t)).collect()
}

/// Autocorrelation W(ε) = 2 ∫ ρ(E) ρ(E+ε) dE for ε > 0; diagnostic only,
/// the bounds never need it.
pub fn autocorrelation(
    dist: &EnergyDistribution,
    eps: f64,
    s: &QuadSettings,
) -> Result<f64> {
    if dist.is_discrete() {
        return Err(Error::InvalidInput(
            "autocorrelation of a purely discrete spectrum is not a function".into(),
        ));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidInput(format!("invalid correlation shift {eps}")));
    }
    let (lo, hi) = dist.support();
    let upper = if hi.is_finite() { hi - eps } else { hi };
    if upper <= lo {
        return Ok(0.0);
    }
    let val = dist.integrate_weighted(lo, upper, &|e| dist.density(e + eps), s)?;
    Ok(2.0 * val)
}
