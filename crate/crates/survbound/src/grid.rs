//! Default sampling grids: a log-plus-linear composite time grid and a
//! logarithmic cut-off grid.

use crate::distributions::EnergyDistribution;
use crate::error::Result;

/// Composite time grid on [0, t_max]: half the points linear (including the
/// endpoints), half logarithmic down to t_max·1e−3 to resolve the early
/// window where the bounds separate.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    assert!(t_max > 0.0 && n >= 2);
    let n_log = n / 2;
    let n_lin = n - n_log;
    let mut pts = Vec::with_capacity(n);
    for j in 0..n_lin {
        pts.push(t_max * j as f64 / (n_lin - 1) as f64);
    }
    for k in 0..n_log {
        // offset exponents keep log points disjoint from the linear set
        let lambda = (k as f64 + 0.5) / n_log as f64;
        pts.push(t_max * 10f64.powf(-3.0 * (1.0 - lambda)));
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

/// Cut-off grid for envelope sweeps: `n` points logarithmic in (c − L),
/// ending at M for finite support or at the cut-off where α reaches
/// 1 − 1e−6 for infinite support.
pub fn cutoff_grid(dist: &EnergyDistribution, n: usize) -> Result<Vec<f64>> {
    assert!(n >= 2);
    let (lower, upper) = dist.support();
    let c_max = if upper.is_finite() {
        upper
    } else {
        cutoff_for_alpha(dist, 1.0 - 1e-6)?
    };
    let lower = if lower.is_finite() { lower } else { 0.0 }; // Breit-Wigner half-widths
    let span = c_max - lower;
    let min_frac = if upper.is_finite() { 1e-3 } else { 1e-2 * dist.scale() / span };
    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = i as f64 / (n - 1) as f64;
        grid.push(lower + span * min_frac.powf(1.0 - lambda));
    }
    grid.dedup();
    Ok(grid)
}

/// Smallest cut-off whose weight reaches `target`, found by doubling then
/// bisection on the monotone α(c).
pub fn cutoff_for_alpha(dist: &EnergyDistribution, target: f64) -> Result<f64> {
    let scale = dist.scale();
    let mut hi = scale;
    let mut iterations = 0;
    while dist.alpha_at(hi)? < target {
        hi *= 2.0;
        iterations += 1;
        if iterations > 200 {
            break;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist.alpha_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-9 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(hi)
}
