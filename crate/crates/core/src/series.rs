//! Type-B Eulerian polynomials, Fourier moments of the cosh kernel, and the
//! Dirichlet-type series H_r(t), H(t) and G(t) built from them.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::dd::{self, ComplexSum};
use crate::error::{Error, Result};
use crate::phase::{rho0_unchecked, theta_dd};
use crate::special::LN_2PI;

/// Largest supported Eulerian-B degree.
pub const EULERIAN_MAX_DEGREE: usize = 64;

/// Largest moment order accepted by [`fourier_cosh_moment`].
pub const MOMENT_MAX_ORDER: usize = 16;

/// Largest order accepted by [`h_r_series`].
pub const SERIES_MAX_ORDER: usize = 8;

/// The type-B Eulerian polynomial B_n with exact integer coefficients
/// (ascending powers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerianB {
    n: usize,
    coeffs: Vec<BigUint>,
}

impl EulerianB {
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    }

    /// B_n(1) as an exact integer.
    pub fn sum_coeffs(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs_f64(), x)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// B_n from B_0 = 1 and B_n(x) = 2x(1−x)B'_{n−1}(x) + (1 + (2n−1)x)B_{n−1}(x).
pub fn eulerian_b(n: usize) -> Result<EulerianB> {
    if n > EULERIAN_MAX_DEGREE {
        return Err(Error::domain(
            "eulerian_b",
            format!("degree {n} exceeds the cap {EULERIAN_MAX_DEGREE}"),
        ));
    }
    let mut coeffs = vec![BigUint::one()];
    for m in 1..=n {
        let mut next = vec![BigUint::zero(); m + 1];
        for (k, slot) in next.iter_mut().enumerate() {
            if k < m {
                *slot += &coeffs[k] * (2 * k as u64 + 1);
            }
            if k > 0 {
                *slot += &coeffs[k - 1] * (2 * (m - k) as u64 + 1);
            }
        }
        coeffs = next;
    }
    Ok(EulerianB { n, coeffs })
}

fn moment_polys() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        (0..=MOMENT_MAX_ORDER)
            .map(|n| eulerian_b(n).expect("within cap").coeffs_f64())
            .collect()
    })
}

/// `2e^{-y} B_n(−e^{-2y}) / (1 + e^{-2y})^{n+1}`, which equals `(−1)^n` times
/// the n-th derivative of sech at y. Evaluated from the side where the
/// exponentials are at most 1.
fn sech_moment_factor(n: usize, y: f64) -> f64 {
    let poly = &moment_polys()[n];
    let e = (-y.abs()).exp();
    let u = e * e;
    let v = 2.0 * e * horner(poly, -u) / (1.0 + u).powi(n as i32 + 1);
    if y < 0.0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// The n-th derivative of sech at `y`, from the Eulerian-B closed form.
pub fn sech_derivative(n: usize, y: f64) -> Result<f64> {
    if n > MOMENT_MAX_ORDER {
        return Err(Error::domain(
            "sech_derivative",
            format!("order {n} exceeds {MOMENT_MAX_ORDER}"),
        ));
    }
    let v = sech_moment_factor(n, y);
    Ok(if n % 2 == 1 { -v } else { v })
}

/// `(7i/2)^n`
fn seven_i_half_pow(n: usize) -> Complex64 {
    Complex64::new(0.0, 3.5).powu(n as u32)
}

/// ∫ x^n e^{iαx} / (7 cosh(πx/7)) dx in closed form.
pub fn fourier_cosh_moment(n: usize, alpha: f64) -> Result<Complex64> {
    if n > MOMENT_MAX_ORDER {
        return Err(Error::domain(
            "fourier_cosh_moment",
            format!("order {n} exceeds {MOMENT_MAX_ORDER}"),
        ));
    }
    Ok(seven_i_half_pow(n) * sech_moment_factor(n, 3.5 * alpha))
}

/// Truncation control for the H-type series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    /// Absolute target for the discarded tail.
    pub eps: f64,
    /// Hard cap on the number of terms.
    pub n_cap: u64,
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        SeriesTolerance {
            eps: 1e-12,
            n_cap: 10_000_000,
        }
    }
}

impl SeriesTolerance {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "eps must lie in (0, 1e-3], got {}",
                self.eps
            )));
        }
        if self.n_cap < 16 {
            return Err(Error::InvalidConfig(format!("n_cap must be >= 16, got {}", self.n_cap)));
        }
        Ok(())
    }

    fn with_eps(&self, eps: f64) -> SeriesTolerance {
        SeriesTolerance { eps, n_cap: self.n_cap }
    }
}

/// A truncated series value with its term count and tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms: u64,
    pub tail_bound: f64,
    /// Σ|term|, which scales the rounding error.
    pub abs_sum: f64,
}

/// max over u ∈ [0, 1] of |B_r(−u)| / (1 + u)^r, sampled finely with a
/// small safety margin.
fn moment_bound(r: usize) -> f64 {
    static BOUNDS: OnceLock<Vec<f64>> = OnceLock::new();
    BOUNDS.get_or_init(|| {
        (0..=SERIES_MAX_ORDER)
            .map(|r| {
                let poly = &moment_polys()[r];
                let max = (0..=4000)
                    .map(|k| {
                        let u = k as f64 / 4000.0;
                        horner(poly, -u).abs() / (1.0 + u).powi(r as i32)
                    })
                    .fold(0.0, f64::max);
                max * 1.01
            })
            .collect()
    })[r]
}

/// Terms needed so that `2C_r(7/2)^r (t/2π)^{7/4} Σ_{n>N} n^{-15/2} < eps`,
/// never fewer than √(t/2π) (beyond which every y_n is negative).
fn series_length(t: f64, r: usize, eps: f64) -> (u64, f64) {
    let ratio = t / (2.0 * PI);
    let amp = 2.0 * moment_bound(r) * 3.5f64.powi(r as i32) * ratio.powf(1.75);
    let from_tail = (amp / (6.5 * eps)).powf(1.0 / 6.5).ceil();
    let n = from_tail.max(ratio.sqrt().ceil()).max(1.0);
    let tail = amp * n.powf(-6.5) / 6.5;
    (n as u64, tail)
}

fn check_t(op: &'static str, t: f64, floor: f64, strict: bool) -> Result<()> {
    let ok = if strict { t > floor } else { t >= floor };
    if !ok || !t.is_finite() {
        let rel = if strict { ">" } else { ">=" };
        return Err(Error::domain(op, format!("needs t {rel} {floor}, got {t}")));
    }
    Ok(())
}

/// H_r(t) = Σ_n n^{-4-it} (7i/2)^r g_r(y_n), y_n = (7/4)(ln t − ln 2π − 2 ln n).
pub fn h_r_series(t: f64, r: usize, tol: &SeriesTolerance) -> Result<SeriesValue> {
    tol.validate()?;
    check_t("h_r_series", t, 0.0, true)?;
    if r > SERIES_MAX_ORDER {
        return Err(Error::domain(
            "h_r_series",
            format!("order {r} exceeds {SERIES_MAX_ORDER}"),
        ));
    }
    h_r_unchecked(t, r, tol.eps, tol.n_cap)
}

fn h_r_unchecked(t: f64, r: usize, eps: f64, n_cap: u64) -> Result<SeriesValue> {
    let (n_terms, tail) = series_length(t, r, eps);
    if n_terms > n_cap {
        return Err(Error::TermCap {
            needed: n_terms,
            cap: n_cap,
        });
    }
    let log_ratio = t.ln() - LN_2PI;
    let ratio_pow = (1.75 * log_ratio).exp();
    let mut acc = ComplexSum::new();
    let mut abs_sum = 0.0;
    for n in 1..=n_terms {
        let ln_n = dd::ln_int(n);
        let nf = n as f64;
        let inv_sq = 1.0 / (nf * nf);
        let n_pow = inv_sq * inv_sq;
        let g = if r == 0 {
            // sech y in the two-power form 2 / (q + 1/q), q = e^y = (t/2π)^{7/4} n^{-7/2}
            let q = ratio_pow * n_pow * nf.sqrt();
            2.0 / (q + 1.0 / q)
        } else {
            sech_moment_factor(r, 1.75 * (log_ratio - 2.0 * ln_n.hi))
        };
        let modulus = g * n_pow;
        let phase = ln_n.mul_f64(-t).rem_two_pi();
        acc.add(Complex64::from_polar(modulus, phase));
        abs_sum += modulus.abs();
    }
    let factor = seven_i_half_pow(r);
    Ok(SeriesValue {
        value: acc.value() * factor,
        terms: n_terms,
        tail_bound: tail,
        abs_sum: abs_sum * factor.norm(),
    })
}

/// H(t) = H₀(t) = Σ_n n^{-4-it}·2 / ((t/2πn²)^{7/4} + (t/2πn²)^{-7/4}).
pub fn h_series(t: f64, tol: &SeriesTolerance) -> Result<SeriesValue> {
    h_r_series(t, 0, tol)
}

/// H(t) with the tolerance read relative to the Z scale: the absolute target
/// is `eps·(t/2π)^{-7/4}`, and no less strict than `eps` itself.
pub(crate) fn h_series_z_scaled(t: f64, tol: &SeriesTolerance) -> Result<SeriesValue> {
    let scale = (t / (2.0 * PI)).powf(1.75);
    h_r_unchecked(t, 0, tol.eps / scale.max(1.0), tol.n_cap)
}

/// An approximate Z value with its estimated numerical error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxValue {
    pub value: f64,
    pub est_error: f64,
    pub terms: u64,
}

/// Z(t) ≈ (t/2π)^{7/4}·Re{e^{iθ(t)} H(t)}. `tol.eps` bounds the series
/// truncation at the scale of Z.
pub fn z_approx(t: f64, tol: &SeriesTolerance) -> Result<ApproxValue> {
    tol.validate()?;
    check_t("z_approx", t, 10.0, false)?;
    let scale = (t / (2.0 * PI)).powf(1.75);
    let h = h_r_unchecked(t, 0, tol.eps / scale, tol.n_cap)?;
    let rotated = Complex64::from_polar(1.0, theta_dd(t).rem_two_pi()) * h.value;
    let rounding = 8.0 * f64::EPSILON * (h.terms as f64).sqrt() * h.abs_sum;
    Ok(ApproxValue {
        value: scale * rotated.re,
        est_error: scale * (h.tail_bound + rounding),
        terms: h.terms,
    })
}

/// G(t) = e^{iθ(t)}ρ₀(t)[H₀ + 15H₁/4t + iH₂/4t + 165H₂/32t² + 241iH₁/24t²
/// + 41iH₃/48t² − H₄/32t²].
pub fn g_series(t: f64, tol: &SeriesTolerance) -> Result<Complex64> {
    tol.validate()?;
    check_t("g_series", t, 20.0, false)?;
    let scale = (t / (2.0 * PI)).powf(1.75);
    let scaled = tol.with_eps(tol.eps / scale);
    let h: Vec<Complex64> = (0..=4)
        .map(|r| Ok(h_r_unchecked(t, r, scaled.eps, scaled.n_cap)?.value))
        .collect::<Result<_>>()?;
    let i = Complex64::i();
    let (it, it2) = (1.0 / t, 1.0 / (t * t));
    let bracket = h[0]
        + h[1] * (15.0 * it / 4.0)
        + i * h[2] * (it / 4.0)
        + h[2] * (165.0 * it2 / 32.0)
        + i * h[1] * (241.0 * it2 / 24.0)
        + i * h[3] * (41.0 * it2 / 48.0)
        - h[4] * (it2 / 32.0);
    let prefactor = Complex64::from_polar(rho0_unchecked(t), theta_dd(t).rem_two_pi());
    Ok(prefactor * bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ints(b: &EulerianB) -> Vec<u64> {
        b.coeffs().iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn first_rows() {
        assert_eq!(ints(&eulerian_b(0).unwrap()), vec![1]);
        assert_eq!(ints(&eulerian_b(1).unwrap()), vec![1, 1]);
        assert_eq!(ints(&eulerian_b(2).unwrap()), vec![1, 6, 1]);
        assert_eq!(ints(&eulerian_b(3).unwrap()), vec![1, 23, 23, 1]);
        assert_eq!(ints(&eulerian_b(4).unwrap()), vec![1, 76, 230, 76, 1]);
        assert_eq!(ints(&eulerian_b(5).unwrap()), vec![1, 237, 1682, 1682, 237, 1]);
    }

    #[test]
    fn degree_cap() {
        let b = eulerian_b(64).unwrap();
        assert_eq!(b.degree(), 64);
        assert_eq!(b.coeffs().len(), 65);
        assert!(eulerian_b(65).is_err());
    }

    #[test]
    fn moment_closed_forms() {
        assert_relative_eq!(fourier_cosh_moment(0, 0.0).unwrap().re, 1.0, max_relative = 1e-15);
        assert!(fourier_cosh_moment(1, 0.0).unwrap().norm() < 1e-15);
        let v = fourier_cosh_moment(0, 0.4).unwrap();
        assert_relative_eq!(v.re, 1.0 / 1.4f64.cosh(), max_relative = 1e-14);
        assert!(fourier_cosh_moment(17, 0.0).is_err());
        // odd/even symmetry in α
        for n in 0..6 {
            let a = fourier_cosh_moment(n, 0.3).unwrap();
            let b = fourier_cosh_moment(n, -0.3).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - b * sign).norm() < 1e-15);
        }
        // large |α| underflows cleanly
        assert_eq!(fourier_cosh_moment(3, 400.0).unwrap().norm(), 0.0);
    }

    #[test]
    fn h_series_at_two_pi() {
        let t = 2.0 * PI;
        let tol = SeriesTolerance::default();
        // n = 1 gives exactly 1 for r = 0 and 0 for r = 1
        assert_eq!(sech_moment_factor(0, 0.0), 1.0);
        assert_eq!(sech_moment_factor(1, 0.0), 0.0);
        let h = h_series(t, &tol).unwrap();
        let second = Complex64::from_polar(sech_moment_factor(0, 1.75 * (0.25f64).ln()) / 16.0, -t * 2f64.ln());
        assert!((second.norm() - 0.01096).abs() < 1e-5, "{second}");
        // everything past n = 2 is small
        assert!((h.value - 1.0 - second).norm() < 1e-3);
        let h1 = h_r_series(t, 1, &tol).unwrap();
        assert!(h1.value.norm() < 0.1);
    }

    #[test]
    fn h_series_rescaled_form() {
        let t = 100.0;
        let h = h_series(t, &SeriesTolerance::default()).unwrap();
        let ratio = t / (2.0 * PI);
        let mut acc = ComplexSum::new();
        for n in 1..=2000u64 {
            let nf = n as f64;
            let w = 2.0 / (1.0 + (ratio / (nf * nf)).powf(-3.5));
            acc.add(Complex64::from_polar(nf.powf(-0.5) * w, -t * nf.ln()));
        }
        let other = acc.value() * ratio.powf(-1.75);
        assert!((h.value - other).norm() < 1e-12, "{} vs {}", h.value, other);
    }

    #[test]
    fn term_cap_is_reported() {
        let tol = SeriesTolerance { eps: 1e-12, n_cap: 16 };
        assert!(matches!(h_series(1e6, &tol), Err(Error::TermCap { .. })));
        assert!(SeriesTolerance { eps: 0.0, n_cap: 100 }.validate().is_err());
        assert!(h_r_series(100.0, 9, &SeriesTolerance::default()).is_err());
    }

    #[test]
    fn z_approx_table_values() {
        let tol = SeriesTolerance::default();
        for (t, want) in [(10.0, -0.9983260), (100.0, 2.6269297), (1e6, -2.8061012)] {
            let got = z_approx(t, &tol).unwrap();
            assert!((got.value - want).abs() < 5e-7, "t = {t}: {}", got.value);
            assert!(got.est_error < 1e-10);
        }
        assert!(z_approx(9.0, &tol).is_err());
    }
}
