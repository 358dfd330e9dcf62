//! Small numeric helpers: regularized incomplete gamma for half-integer
//! parameters, factorial-scaled coefficients and compensated summation.

/// ln Γ(k + 1/2), exact product form (valid for the orders we support).
///
/// Γ(k + 1/2) = √π · (2k−1)!! / 2ᵏ.
pub fn ln_gamma_half_integer(k: usize) -> f64 {
    let mut ln = 0.5 * std::f64::consts::PI.ln();
    for j in 1..=k {
        ln += ((2 * j - 1) as f64 / 2.0).ln();
    }
    ln
}

/// Regularized lower incomplete gamma P(a, x) = γ(a, x)/Γ(a) for a > 0,
/// x ≥ 0, with ln Γ(a) supplied by the caller.
///
/// Series for x < a + 1, Lentz continued fraction otherwise
/// (Numerical Recipes §6.2 scheme). Relative accuracy ~1e-14.
pub fn gamma_p(a: f64, x: f64, ln_gamma_a: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let prefactor = (a * x.ln() - x - ln_gamma_a).exp();
    if x < a + 1.0 {
        // γ(a,x) series: x^a e^{-x} Σ_n x^n / (a (a+1) ... (a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..500 {
            term *= x / (a + n as f64);
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (prefactor * sum).min(1.0)
    } else {
        // Q(a,x) continued fraction, Lentz's algorithm
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (1.0 - prefactor * h).max(0.0)
    }
}

/// 1/k! for k ≤ 170 (beyond that f64 factorials overflow).
pub fn inv_factorial(k: usize) -> f64 {
    let mut v = 1.0f64;
    for j in 1..=k {
        v /= j as f64;
    }
    v
}

/// Binomial coefficient C(n, k) as f64.
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut v = 1.0f64;
    for j in 0..k {
        v = v * (n - j) as f64 / (j + 1) as f64;
    }
    v
}

/// Neumaier compensated sum of a slice; also returns the largest term
/// magnitude so callers can judge cancellation.
pub fn compensated_sum(terms: &[f64]) -> (f64, f64) {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut max_abs = 0.0f64;
    for &t in terms {
        max_abs = max_abs.max(t.abs());
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    (sum + comp, max_abs)
}
