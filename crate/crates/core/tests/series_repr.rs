use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use zstrip_core::integral::{h_r_integral, kernel, QuadratureConfig};
use zstrip_core::series::*;

/// Calibrated maxima of t^{3/2}|H_r(t)| on the grid: 40.1, 117.6, 333.7, 1383, 10030.
const DECAY_BOUNDS: [f64; 5] = [60.0, 180.0, 500.0, 2000.0, 15000.0];

#[test]
fn generating_identity_at_one_half() {
    let x = 0.5f64;
    for n in 0..=6 {
        let partial: f64 = (0..200).map(|j| x.powi(j) * f64::from(2 * j + 1).powi(n)).sum();
        let closed = eulerian_b(n as usize).unwrap().eval(x) / (1.0 - x).powi(n + 1);
        assert!(
            (partial - closed).abs() <= 1e-12 * closed,
            "n = {n}: {partial} vs {closed}"
        );
    }
    assert_eq!(eulerian_b(1).unwrap().eval(0.5) / 0.25, 6.0);
}

#[test]
fn palindromic_with_factorial_sum() {
    let mut factorial = BigUint::from(1u32);
    for n in 0..=10usize {
        if n > 0 {
            factorial *= n;
        }
        let b = eulerian_b(n).unwrap();
        let c = b.coeffs();
        assert_eq!(c[0], BigUint::from(1u32));
        for k in 0..=n {
            assert_eq!(c[k], c[n - k], "n = {n}");
        }
        assert_eq!(b.sum_coeffs(), (BigUint::from(1u32) << n) * &factorial);
    }
}

#[test]
fn rows_to_degree_five() {
    let rows: [&[u64]; 6] = [
        &[1],
        &[1, 1],
        &[1, 6, 1],
        &[1, 23, 23, 1],
        &[1, 76, 230, 76, 1],
        &[1, 237, 1682, 1682, 237, 1],
    ];
    for (n, row) in rows.iter().enumerate() {
        let got: Vec<u64> = eulerian_b(n)
            .unwrap()
            .coeffs()
            .iter()
            .map(|c| c.to_u64().unwrap())
            .collect();
        assert_eq!(&got, row);
    }
}

/// Trapezoid rule for ∫ x^n e^{iαx} / (7 cosh(πx/7)) dx.
fn moment_by_quadrature(n: i32, alpha: f64) -> Complex64 {
    let step = 0.05;
    let half = 4000;
    (-half..=half)
        .map(|j| {
            let x = j as f64 * step;
            Complex64::from_polar(x.powi(n) * kernel(x, 7.0), alpha * x)
        })
        .sum::<Complex64>()
        * step
}

#[test]
fn moments_match_quadrature() {
    for n in 0..=5 {
        for alpha in [0.0, 0.3, -0.3, 1.7, -1.7] {
            let closed = fourier_cosh_moment(n as usize, alpha).unwrap();
            let quad = moment_by_quadrature(n, alpha);
            assert!(
                (closed - quad).norm() <= 1e-9,
                "n = {n}, α = {alpha}: {closed} vs {quad}"
            );
        }
    }
}

fn sech(y: f64) -> f64 {
    1.0 / y.cosh()
}

/// Fourth-order central differences of sech at spacing `h`.
fn sech_differences(y: f64, h: f64) -> [f64; 3] {
    let f = |k: f64| sech(y + k * h);
    [
        (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h),
        (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0)) / (12.0 * h * h),
        (f(-3.0) - 8.0 * f(-2.0) + 13.0 * f(-1.0) - 13.0 * f(1.0) + 8.0 * f(2.0) - f(3.0)) / (8.0 * h.powi(3)),
    ]
}

#[test]
fn sech_derivatives_match_differences() {
    for y in [0.5, 2.0] {
        for (n, fd) in (1..=3).zip(sech_differences(y, 1e-3)) {
            let closed = sech_derivative(n, y).unwrap();
            assert!((closed - fd).abs() <= 1e-6, "n = {n}, y = {y}: {closed} vs {fd}");
        }
    }
}

#[test]
fn series_decay_like_t_to_minus_three_halves() {
    let tol = SeriesTolerance::default();
    for (r, bound) in DECAY_BOUNDS.iter().enumerate() {
        let worst = (0..=40)
            .map(|k| {
                let t = 10f64.powf(2.0 + k as f64 / 10.0);
                t.powf(1.5) * h_r_series(t, r, &tol).unwrap().value.norm()
            })
            .fold(0.0, f64::max);
        assert!(worst <= *bound, "r = {r}: {worst}");
    }
    // at 1e5 the scaled modulus is 11.37; the table value Z(1e5) = 5.8795925
    // alone forces it above 8.4
    let scaled = 1e5f64.powf(1.5) * h_series(1e5, &tol).unwrap().value.norm();
    assert!((scaled - 11.368359).abs() < 1e-5, "{scaled}");
    assert!(scaled >= 5.8795925 * 1e5f64.powf(1.5) / (1e5 / (2.0 * std::f64::consts::PI)).powf(1.75));
}

#[test]
fn tail_bound_covers_truncation() {
    for t in [1e3, 1e6] {
        let loose = SeriesTolerance {
            eps: 1e-8,
            ..Default::default()
        };
        let tight = SeriesTolerance {
            eps: 5e-9,
            ..Default::default()
        };
        let a = h_series(t, &loose).unwrap();
        let b = h_series(t, &tight).unwrap();
        assert!(b.terms >= a.terms);
        assert!((a.value - b.value).norm() <= a.tail_bound, "t = {t}");
    }
}

#[test]
fn leading_series_matches_quadrature() {
    let t = 1e4;
    let tol = SeriesTolerance {
        eps: 1e-12,
        ..Default::default()
    };
    let series = h_series(t, &tol).unwrap().value;
    let quad = h_r_integral(t, 0, &QuadratureConfig::default()).unwrap();
    assert!((series - quad).norm() <= 1e-9, "{series} vs {quad}");
}

#[test]
fn table_approximations() {
    let tol = SeriesTolerance::default();
    assert!((z_approx(1e8, &tol).unwrap().value - 3.6454066).abs() <= 5e-6);
}
