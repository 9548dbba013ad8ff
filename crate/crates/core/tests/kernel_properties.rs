use std::f64::consts::PI;

use heatgrad::quadrature::{
    integrate_kernel_profile, lp_norm, truncation_radius, NormSpec, RadialProfile, TailBound,
};
use heatgrad::special_kernels::{
    erfc, gaussian_1d_dx, half_line_dirichlet_kernel, half_line_dirichlet_kernel_dr,
    DirichletKernel, KernelPoint,
};
use heatgrad::Exponent;
use proptest::prelude::*;

fn point(t: f64, r: f64, s: f64) -> KernelPoint {
    KernelPoint::new(t, r, s).unwrap()
}

/// `e^{-(r-s)²/4t} - e^{-(r+s)²/4t}` through the public kernel.
fn image_difference(t: f64, r: f64, s: f64) -> f64 {
    half_line_dirichlet_kernel(point(t, r, s)) * (4.0 * PI * t).sqrt()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn gradient_envelope_ratio(t: f64, x: f64) -> f64 {
    gaussian_1d_dx(t, x).unwrap().abs() * (t + x * x)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

proptest! {
    #[test]
    fn kernel_vanishes_on_the_boundary(t in log_uniform(1e-3, 1e6), s in 0.0..1e3f64) {
        prop_assert_eq!(half_line_dirichlet_kernel(point(t, 0.0, s)), 0.0);
    }

    #[test]
    fn kernel_is_positive_inside(t in log_uniform(1e-2, 1e4), r in log_uniform(1e-3, 1e2), s in log_uniform(1e-3, 1e2)) {
        // keep the direct Gaussian above the underflow threshold
        prop_assume!((r - s).powi(2) / (4.0 * t) < 700.0);
        prop_assert!(half_line_dirichlet_kernel(point(t, r, s)) > 0.0);
    }

    #[test]
    fn image_difference_decreases_past_its_peak(
        t in log_uniform(1e-2, 1e4),
        s in 0.0..50.0f64,
        offset in 0.0..20.0f64,
        h_frac in 1e-4..1e-1f64,
    ) {
        let start = (2.0 * t).sqrt() + s;
        let r = start + offset * t.sqrt();
        let h = h_frac * t.sqrt();
        let step = image_difference(t, r + h, s) - image_difference(t, r, s);
        prop_assert!(step <= 1e-12, "increase {step:e} at t = {t}, r = {r}, s = {s}");
    }

    #[test]
    fn derivative_matches_central_differences(
        t in log_uniform(1e-2, 1e4),
        r_frac in 0.05..4.0f64,
        s_frac in 0.0..4.0f64,
    ) {
        let (r, s) = (r_frac * t.sqrt(), s_frac * t.sqrt());
        let h = 1e-5 * t.sqrt();
        let exact = half_line_dirichlet_kernel_dr(point(t, r, s));
        let fd = (half_line_dirichlet_kernel(point(t, r + h, s))
            - half_line_dirichlet_kernel(point(t, r - h, s)))
            / (2.0 * h);
        let scale = half_line_dirichlet_kernel(point(t, r, s)).abs() / t.sqrt()
            + (4.0 * PI * t).sqrt().recip() / t.sqrt();
        prop_assert!((exact - fd).abs() <= 1e-7 * scale, "{exact:e} vs {fd:e}");
    }

    #[test]
    fn gaussian_gradient_stays_under_the_fitted_envelope(t in log_uniform(1e-2, 1e4), x in 0.0..1e3f64) {
        let fitted = log_grid(1e-2, 1e4, 61)
            .into_iter()
            .flat_map(|t| {
                std::iter::once(0.0)
                    .chain(log_grid(1e-3, 1e3, 241))
                    .map(move |x| gradient_envelope_ratio(t, x))
            })
            .fold(0.0, f64::max);
        prop_assert!(gradient_envelope_ratio(t, x) <= 1.01 * fitted);
    }

    #[test]
    fn indicator_evolution_is_deterministic(
        t in log_uniform(1e-2, 1e6),
        r in 0.0..100.0f64,
        a in 0.0..10.0f64,
        width in 0.01..10.0f64,
    ) {
        let g = RadialProfile::indicator(a, a + width, 1.0).unwrap();
        let first = integrate_kernel_profile(&DirichletKernel, t, r, &g).unwrap();
        let second = integrate_kernel_profile(&DirichletKernel, t, r, &g).unwrap();
        prop_assert_eq!(first.to_bits(), second.to_bits());
    }

    #[test]
    fn enlarging_the_domain_never_decreases_the_norm(
        p in 1.0..8.0f64,
        a in 0.0..5.0f64,
        width in 0.1..10.0f64,
        left in 0.0..2.0f64,
        right in 0.0..5.0f64,
        rate in 0.1..3.0f64,
    ) {
        let f = |x: f64| (-rate * x).exp() * (1.0 + (3.0 * x).sin().powi(2));
        let p = Exponent::new(p).unwrap();
        let inner = lp_norm(f, &NormSpec::new(p, a, a + width).unwrap()).unwrap();
        let outer = lp_norm(f, &NormSpec::new(p, (a - left).max(0.0), a + width + right).unwrap()).unwrap();
        prop_assert!(outer >= inner * (1.0 - 1e-13), "{outer:e} < {inner:e}");
    }

    #[test]
    fn truncation_radius_leaves_less_than_eps_of_the_kernel(
        t in log_uniform(1e-3, 1e6),
        center in 0.0..100.0f64,
        eps_exp in 1.0..40.0f64,
    ) {
        let eps = 10f64.powf(-eps_exp);
        let radius = truncation_radius(t, center, eps).unwrap();
        let tail_mass = 0.5 * erfc((radius - center) / (4.0 * t).sqrt());
        prop_assert!(radius > center);
        prop_assert!(tail_mass < eps, "tail {tail_mass:e} >= {eps:e}");
    }
}

#[test]
fn fitted_envelope_constant_is_scale_free() {
    // with x = y√t the envelope ratio is (1 + y²) y e^{-y²/4} / (4√π), independent of t
    let analytic = log_grid(1e-4, 1e2, 20_001)
        .into_iter()
        .map(|y| (1.0 + y * y) * y * (-y * y / 4.0).exp() / (4.0 * PI.sqrt()))
        .fold(0.0, f64::max);
    for t in [1e-2, 1.0, 1e4] {
        let fitted = std::iter::once(0.0)
            .chain(log_grid(1e-3, 1e3, 24_001))
            .map(|x| gradient_envelope_ratio(t, x))
            .fold(0.0, f64::max);
        assert!((fitted / analytic - 1.0).abs() < 1e-6, "t = {t}: {fitted} vs {analytic}");
    }
}

#[test]
fn infinite_domains_use_the_tail_bound() {
    let spec = NormSpec::new(Exponent::TWO, 0.0, f64::INFINITY)
        .unwrap()
        .with_tail(TailBound::Gaussian { center: 0.0, time: 1.0 });
    // ∫_0^∞ e^{-x²/2} dx = √(π/2)
    let got = lp_norm(|x| (-x * x / 4.0).exp(), &spec).unwrap();
    assert!((got * got / (PI / 2.0).sqrt() - 1.0).abs() < 1e-13);
}
