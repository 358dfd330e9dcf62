//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers (visible with `cargo test -- --nocapture`).

use std::time::Instant;

use survbound::cutoff_bounds::build_cutoff_spec;
use survbound::envelope::{
    composite_bound, discrete_schedule, envelope_equation_residual, sweep_envelope,
    t_of_c_numeric, t_of_c_quadratic, t_of_c_quartic_parts, SquareOrder,
    square_envelope_constants,
};
use survbound::grid::{cutoff_grid, time_grid};
use survbound::moments::{b_from_h, e_brute_force, e_from_h, ebar_from_b};
use survbound::oracle::{exact_survival, survival_by_quadrature};
use survbound::series_bounds::{ri_bound, Direction, Target};
use survbound::{EnergyDistribution, QuadSettings};

fn settings() -> QuadSettings {
    QuadSettings::default()
}

fn hat_density() -> EnergyDistribution {
    let samples: Vec<(f64, f64)> = (0..=400)
        .map(|i| {
            let e = i as f64 * 0.005;
            (e, if e <= 1.0 { e } else { 2.0 - e })
        })
        .collect();
    EnergyDistribution::tabulated(samples, true).unwrap()
}

fn raised_cosine_density() -> EnergyDistribution {
    let samples: Vec<(f64, f64)> = (0..=800)
        .map(|i| {
            let e = i as f64 * 0.0025;
            (e, 0.5 * (1.0 + (std::f64::consts::PI * (e - 1.0)).cos()))
        })
        .collect();
    EnergyDistribution::tabulated(samples, true).unwrap()
}

fn three_atoms() -> EnergyDistribution {
    EnergyDistribution::discrete(&[(0.0, 0.7), (0.5, 0.2), (1.0, 0.1)]).unwrap()
}

#[test]
fn criterion_1_gamma_half_closed_forms() {
    let start = Instant::now();
    let d = EnergyDistribution::gamma_half(1.0).unwrap();
    // oracle vs quadrature path on t ∈ [0, 5]
    let mut worst = 0.0f64;
    for i in 0..=50 {
        let t = 0.1 * i as f64;
        let closed = exact_survival(&d, t).unwrap();
        let quad = survival_by_quadrature(&d, t, &QuadSettings::with_tol(1e-10)).unwrap();
        let want = (1.0 + t * t).powf(-0.5);
        assert!(
            (closed.p - want).abs() < 1e-12,
            "t={t}: closed-form P deviates: {} vs {want}",
            closed.p
        );
        worst = worst.max((closed.p - quad.p).abs());
        assert!(
            (closed.p - quad.p).abs() < 1e-8,
            "t={t}: quadrature path off by {}",
            (closed.p - quad.p).abs()
        );
    }
    // correlation recurrence eₙ = (n−1)² eₙ₋₂, e₀ = 1
    let h = d.raw_moments(8).unwrap();
    let e = e_from_h(&h, 8).unwrap();
    let mut expected = 1.0;
    let mut worst_rel = 0.0f64;
    for n in (2..=8usize).step_by(2) {
        expected *= ((n - 1) * (n - 1)) as f64;
        let got = e.raw_at(n).unwrap();
        let rel = ((got - expected) / expected).abs();
        worst_rel = worst_rel.max(rel);
        assert!(rel < 1e-10, "e_{n}: rel error {rel}");
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "criterion 1 took {dt:?}");
    println!(
        "criterion 1: PASS (oracle-vs-quadrature max |ΔP| = {worst:.2e}, \
         recurrence max rel = {worst_rel:.2e}, {dt:?})"
    );
}

#[test]
fn criterion_2_power_law_moments_and_alpha() {
    let start = Instant::now();
    let d = EnergyDistribution::power_law(1.0, 3.5).unwrap();
    let h = d.raw_moments(2).unwrap();
    let e = e_from_h(&h, 2).unwrap();
    let e2 = e.raw_at(2).unwrap();
    let rel = ((e2 - 40.0 / 9.0) / (40.0 / 9.0)).abs();
    assert!(rel < 1e-10, "e₂ rel error {rel}");
    let mut worst = 0.0f64;
    for &c in &[0.5, 1.0, 2.0, 5.0] {
        let got = d.alpha_at(c).unwrap();
        let want = 1.0 - (1.0 + c).powf(-2.5);
        worst = worst.max((got - want).abs());
        assert!((got - want).abs() < 1e-10, "alpha({c}): {got} vs {want}");
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "criterion 2 took {dt:?}");
    println!("criterion 2: PASS (e₂ rel = {rel:.2e}, max |Δα| = {worst:.2e}, {dt:?})");
}

#[test]
fn criterion_3_sandwich_suite() {
    let start = Instant::now();
    let cases: Vec<(&str, EnergyDistribution, Vec<usize>, f64)> = vec![
        ("gamma_half", EnergyDistribution::gamma_half(1.0).unwrap(), vec![2, 4, 6, 8], 3.0),
        ("power_law", EnergyDistribution::power_law(1.0, 3.5).unwrap(), vec![2, 4, 6, 8], 10.0),
        ("breit_wigner", EnergyDistribution::breit_wigner(1.0, 0.0).unwrap(), vec![2, 4, 6, 8], 5.0),
        ("square", EnergyDistribution::square(1.0).unwrap(), vec![2, 4, 6, 8], 20.0),
        ("discrete3", three_atoms(), vec![2, 4], 8.0),
        ("hat", hat_density(), vec![2, 4, 6, 8], 10.0),
        ("raised_cosine", raised_cosine_density(), vec![2, 4, 6, 8], 10.0),
    ];
    let s = settings();
    let mut worst_slack = f64::INFINITY;
    for (name, dist, orders, horizon) in &cases {
        let comp = composite_bound(dist, orders, *horizon, &s).unwrap();
        assert_eq!(comp.points.len(), 512, "{name}: grid size");
        for p in &comp.points {
            let a = exact_survival(dist, p.t).unwrap().abs;
            let lo_slack = a - p.lower;
            let hi_slack = p.upper - a;
            worst_slack = worst_slack.min(lo_slack.min(hi_slack));
            assert!(
                lo_slack >= -1e-9,
                "{name} t={}: lower {} above |A| = {a} (source {})",
                p.t,
                p.lower,
                p.lower_source
            );
            assert!(
                hi_slack >= -1e-9,
                "{name} t={}: upper {} below |A| = {a} (source {})",
                p.t,
                p.upper,
                p.upper_source
            );
            assert!(p.lower <= p.upper + 1e-12, "{name}: bounds crossed");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "criterion 3 took {dt:?}");
    println!(
        "criterion 3: PASS (7 distributions × 512 points, worst slack = {worst_slack:.2e}, {dt:?})"
    );
}

#[test]
fn criterion_4_appendix_a_closed_forms() {
    let start = Instant::now();
    let s = settings();
    let cases: Vec<(EnergyDistribution, Vec<f64>)> = vec![
        (
            EnergyDistribution::gamma_half(1.0).unwrap(),
            geometric(0.3, 8.0, 16),
        ),
        (
            EnergyDistribution::power_law(1.0, 3.5).unwrap(),
            geometric(0.3, 30.0, 16),
        ),
        (
            EnergyDistribution::square(1.0).unwrap(),
            geometric(0.05, 1.0, 16),
        ),
        (
            EnergyDistribution::breit_wigner(1.0, 0.0).unwrap(),
            geometric(0.5, 1000.0, 16),
        ),
    ];
    let mut pairs = 0usize;
    let mut worst_resid = 0.0f64;
    let mut worst_rel = 0.0f64;
    for (dist, cs) in &cases {
        for &c in cs {
            let view = dist.truncate(c).unwrap();
            let hbar = view.truncated_moments(4, &s).unwrap();
            let b = b_from_h(&hbar, view.edge(), 4).unwrap();
            let ebar = ebar_from_b(&b, 4).unwrap();
            for k in 1..=4 {
                assert!(b.raw_at(k).unwrap() > 0.0, "b_{k} must be positive");
            }
            // quadratic: closed-form time satisfies the envelope equation
            let t2 = t_of_c_quadratic(&b).unwrap();
            let resid = envelope_equation_residual(&b, &ebar, 2, t2)
                .unwrap()
                .abs();
            worst_resid = worst_resid.max(resid);
            assert!(resid < 1e-10, "{dist:?} c={c}: quadratic residual {resid}");
            // quartic: closed form vs numeric cubic root, preconditions
            let parts = t_of_c_quartic_parts(&b).unwrap();
            assert!(parts.d1 > 0.0, "{dist:?} c={c}: d1 = {}", parts.d1);
            assert!(parts.d3 > 0.0, "{dist:?} c={c}: d3 = {}", parts.d3);
            let numeric = t_of_c_numeric(&b, &ebar, 4).unwrap();
            let nearest = numeric
                .iter()
                .copied()
                .min_by(|x, y| (x - parts.t).abs().total_cmp(&(y - parts.t).abs()))
                .unwrap();
            let rel = ((parts.t - nearest) / parts.t).abs();
            worst_rel = worst_rel.max(rel);
            assert!(rel < 1e-8, "{dist:?} c={c}: closed vs numeric rel {rel}");
            pairs += 1;
        }
    }
    assert_eq!(pairs, 64);
    let dt = start.elapsed();
    println!(
        "criterion 4: PASS (64 pairs, quadratic residual ≤ {worst_resid:.2e}, \
         quartic closed-vs-numeric rel ≤ {worst_rel:.2e}, {dt:?})"
    );
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn criterion_5_appendix_b_square_envelopes() {
    let start = Instant::now();
    let (tau2, sigma2) = square_envelope_constants(SquareOrder::Finite(2)).unwrap();
    assert!((tau2 - 3.0).abs() < 1e-12, "τ₂ = {tau2}");
    assert!((sigma2 - 0.5).abs() < 1e-12, "σ₂ = {sigma2}");

    let d = EnergyDistribution::square(1.0).unwrap();
    let grid = cutoff_grid(&d, 512).unwrap();
    let env = sweep_envelope(&d, 2, &grid, &settings()).unwrap();
    let mut checked = 0;
    let mut worst = 0.0f64;
    for p in &env.points {
        if p.t > 3.0 && p.t < 4.5 {
            let want = 9.0 / (2.0 * p.t) - 1.0;
            worst = worst.max((p.value - want).abs());
            assert!(
                (p.value - want).abs() < 1e-8,
                "t={}: envelope {} vs 9/(2t)−1 = {want}",
                p.t,
                p.value
            );
            checked += 1;
        }
    }
    assert!(checked > 10, "only {checked} envelope points in (3, 4.5)");

    // junction to the no-cut-off bound at t(M) = 3
    let tail = env.tail.as_ref().expect("square envelope has a tail");
    let junction = tail.samples.last().unwrap();
    assert!((junction.t - 3.0).abs() < 1e-9);
    let first_env = env.points.first().unwrap();
    let jump = (junction.raw_value - first_env.value).abs();
    assert!(jump < 1e-8, "junction jump {jump}");

    // n = ∞ upper bound 1 − 2π/t against the |sinc| oracle
    let two_pi = 2.0 * std::f64::consts::PI;
    let (tau_inf, sigma_inf) = square_envelope_constants(SquareOrder::Infinite).unwrap();
    assert_eq!((tau_inf, sigma_inf), (two_pi, 0.0));
    for i in 1..=2000 {
        let t = two_pi + 0.02 * i as f64;
        let bound = 1.0 - two_pi / t;
        let a = exact_survival(&d, t).unwrap().abs;
        assert!(bound >= a - 1e-9, "t={t}: 1−2π/t = {bound} below |A| = {a}");
    }
    let dt = start.elapsed();
    println!(
        "criterion 5: PASS (τ₂ = {tau2}, σ₂ = {sigma2}, envelope max dev = {worst:.2e}, \
         junction jump = {jump:.2e}, {dt:?})"
    );
}

#[test]
fn criterion_6_appendix_c_discrete_schedule() {
    let start = Instant::now();
    let d = three_atoms();
    let schedule = discrete_schedule(&d, 2).unwrap();
    let seg_hi = &schedule.segments[1];
    // the printed formula t(M) = (2a₀+a₁)/(a₀+a₁/4) with a₀=0.7, a₁=0.2
    let formula: f64 = (2.0 * 0.7 + 0.2) / (0.7 + 0.25 * 0.2);
    assert!((formula - 32.0 / 15.0).abs() < 1e-15);
    assert!(
        (seg_hi.t_start - formula).abs() < 1e-12,
        "t(M) = {} vs {formula}",
        seg_hi.t_start
    );
    assert!((seg_hi.t_end - 4.0).abs() < 1e-12, "t(M/2) = {}", seg_hi.t_end);

    // continuity at the window junctions and sandwich below |A|
    let mut max_jump = 0.0f64;
    for junction in [seg_hi.t_start, seg_hi.t_end] {
        let (below, _, _) = schedule.evaluate(junction - 1e-12).unwrap();
        let (above, _, _) = schedule.evaluate(junction + 1e-12).unwrap();
        max_jump = max_jump.max((below - above).abs());
        assert!(
            (below - above).abs() < 1e-8,
            "jump {} at t = {junction}",
            (below - above).abs()
        );
    }
    for i in 0..=4000 {
        let t = i as f64 * 0.005;
        let (v, _, _) = schedule.evaluate(t).unwrap();
        let a = exact_survival(&d, t).unwrap().abs;
        assert!(v <= a + 1e-9, "t={t}: schedule {v} above |A| = {a}");
    }
    let dt = start.elapsed();
    println!(
        "criterion 6: PASS (t(M/2) = {}, t(M) = {} = 32/15, max junction jump = {max_jump:.2e}, {dt:?})",
        seg_hi.t_end, seg_hi.t_start
    );
}

#[test]
fn criterion_7_identity_suite() {
    let start = Instant::now();
    let s = settings();

    // ebar_from_b ≡ e_from_h ∘ truncated_moments (pure algebra, 1e-10)
    let mut worst_identity = 0.0f64;
    let idents: Vec<(EnergyDistribution, Vec<f64>)> = vec![
        (EnergyDistribution::gamma_half(1.0).unwrap(), vec![0.5, 2.0, 6.0]),
        (EnergyDistribution::power_law(1.0, 3.5).unwrap(), vec![0.5, 3.0, 10.0]),
        (EnergyDistribution::square(1.0).unwrap(), vec![0.3, 0.8, 1.0]),
        (EnergyDistribution::breit_wigner(1.0, 0.0).unwrap(), vec![1.0, 5.0, 50.0]),
        (three_atoms(), vec![0.3, 0.7, 1.0]),
        (hat_density(), vec![0.6, 1.4, 2.0]),
    ];
    for (dist, cs) in &idents {
        for &c in cs {
            let view = dist.truncate(c).unwrap();
            let hbar = view.truncated_moments(8, &s).unwrap();
            let via_h = e_from_h(&hbar, 8).unwrap();
            let b = b_from_h(&hbar, view.edge(), 8).unwrap();
            let via_b = ebar_from_b(&b, 8).unwrap();
            for m in (2..=8usize).step_by(2) {
                let x = via_h.scaled_at(m).unwrap();
                let y = via_b.scaled_at(m).unwrap();
                let rel = (x - y).abs() / x.abs().max(1e-300);
                worst_identity = worst_identity.max(rel);
                assert!(rel < 1e-10, "{dist:?} c={c} order {m}: rel {rel}");
            }
        }
    }

    // e_from_h ≡ e_brute_force on finite support (1e-6)
    let mut worst_brute = 0.0f64;
    let brutes: Vec<EnergyDistribution> = vec![
        EnergyDistribution::square(1.0).unwrap(),
        three_atoms(),
        hat_density(),
    ];
    for dist in &brutes {
        let h = dist.raw_moments(8).unwrap();
        let via_h = e_from_h(&h, 8).unwrap();
        let brute = e_brute_force(dist, 8, &s).unwrap();
        for m in (2..=8usize).step_by(2) {
            let x = via_h.raw_at(m).unwrap();
            let y = brute.raw_at(m).unwrap();
            let rel = (x - y).abs() / x.abs().max(1e-300);
            worst_brute = worst_brute.max(rel);
            assert!(rel < 1e-6, "{dist:?} order {m}: rel {rel} ({x} vs {y})");
        }
    }

    // shift invariance of eₙ under E → E + s
    let mut worst_shift = 0.0f64;
    let base: Vec<(f64, f64)> = (0..=400)
        .map(|i| {
            let e = i as f64 * 0.005;
            (e, if e <= 1.0 { e } else { 2.0 - e })
        })
        .collect();
    let d0 = EnergyDistribution::tabulated(base.clone(), true).unwrap();
    let e0 = e_from_h(&d0.raw_moments(8).unwrap(), 8).unwrap();
    for shift in [-1.0, 0.3, 10.0] {
        let moved: Vec<(f64, f64)> = base.iter().map(|&(e, r)| (e + shift, r)).collect();
        let d1 = EnergyDistribution::tabulated(moved, true).unwrap();
        let e1 = e_from_h(&d1.raw_moments(8).unwrap(), 8).unwrap();
        for m in (2..=8usize).step_by(2) {
            let x = e0.raw_at(m).unwrap();
            let y = e1.raw_at(m).unwrap();
            let rel = (x - y).abs() / x.abs().max(1e-300);
            worst_shift = worst_shift.max(rel);
            assert!(rel < 1e-8, "shift {shift}, order {m}: rel {rel}");
        }
    }
    let dt = start.elapsed();
    println!(
        "criterion 7: PASS (identity ≤ {worst_identity:.2e}, brute force ≤ {worst_brute:.2e}, \
         shift ≤ {worst_shift:.2e}, {dt:?})"
    );
}

#[test]
fn criterion_8_real_imaginary_bounds() {
    let start = Instant::now();
    let d = EnergyDistribution::gamma_half(1.0).unwrap();
    let h = d.raw_moments(4).unwrap();
    let grid = time_grid(4.0, 512);
    let mut worst = f64::INFINITY;
    for &t in &grid {
        let exact = exact_survival(&d, t).unwrap();
        for n in 1..=4usize {
            let b = ri_bound(&h, n, t).unwrap();
            let target = match b.target {
                Target::Re => exact.re,
                Target::Im => exact.im,
                _ => unreachable!(),
            };
            let slack = match b.direction {
                Direction::Upper => b.value - target,
                Direction::Lower => target - b.value,
            };
            worst = worst.min(slack);
            assert!(
                slack >= -1e-9,
                "order {n} at t={t}: bound {} vs exact {target}",
                b.value
            );
        }
    }
    let dt = start.elapsed();
    println!("criterion 8: PASS (four chains over t ∈ [0,4], worst slack = {worst:.2e}, {dt:?})");
}

/// Not a numbered criterion: the envelope machinery must also hold up as
/// a plain fixed-cut-off bound family against the oracle (spec sandwich
/// property for cutoff-bounds).
#[test]
fn fixed_cutoff_bounds_sandwich() {
    let s = settings();
    let d = EnergyDistribution::breit_wigner(1.0, 0.0).unwrap();
    for &c in &[2.0, 10.0, 100.0] {
        for n in [2usize, 4, 6, 8] {
            let spec = build_cutoff_spec(&d, c, n, &s).unwrap();
            for i in 0..=100 {
                let t = 0.05 * i as f64;
                let (v, _) = spec.amplitude_bound(t).unwrap();
                let a = (-t).exp();
                match spec.direction() {
                    Direction::Lower => assert!(v <= a + 1e-9, "c={c} n={n} t={t}"),
                    Direction::Upper => assert!(v >= a - 1e-9, "c={c} n={n} t={t}"),
                }
            }
        }
    }
}
