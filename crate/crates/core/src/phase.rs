//! The phase factor h(x) with f(4 + ix) = h(x)·ζ(4 + ix), its asymptotic
//! expansions, and the truncated functions θ, ρ₀ and L₁ built from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::special::{ln_gamma, stirling_tail, LN_2PI};

/// Modulus and continuous phase of a non-vanishing sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePolar {
    pub rho: f64,
    pub alpha: f64,
}

/// h(x) in rectangular and polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFactor {
    pub value: Complex64,
    pub polar: PhasePolar,
}

/// Inverse-power coefficients of log ρ(x), at x^-2, x^-4, x^-6, x^-8.
pub const LOG_RHO_COEFFS: [f64; 4] = [19.0, -433.0 / 2.0, 13069.0 / 3.0, -439633.0 / 4.0];

/// Inverse-power coefficients of α(x), at x^-1, x^-3, x^-5.
pub const ALPHA_COEFFS: [f64; 3] = [-241.0 / 24.0, 41279.0 / 720.0, -2348641.0 / 2520.0];

/// Above this |x| [`h_auto`] switches to the asymptotic expansions.
pub const ASYMPTOTIC_CROSSOVER: f64 = 1e4;

/// `ln(√2 / (2π)²)`
const LOG_H_CONST: f64 = 0.5 * std::f64::consts::LN_2 - 2.0 * LN_2PI;

/// `log h(x)` as a sum of principal logarithms; the imaginary part is the
/// continuous phase α(x) with α(0) = 0.
pub fn log_h(x: f64) -> Complex64 {
    let ax = x.abs();
    Complex64::new(log_rho_exact(ax), alpha_dd(ax).to_f64().copysign(x))
}

fn log_rho_exact(ax: f64) -> f64 {
    let modulus = LINEAR_FACTORS
        .iter()
        .map(|&(c, m)| m * 0.5 * (c * c + ax * ax).ln())
        .sum::<f64>();
    // log cosh(πx/2) = πx/2 + ln(1 + e^{-πx}) − ln 2
    let cosh_rest = (-PI * ax).exp().ln_1p() - std::f64::consts::LN_2;
    let w = Complex64::new(1.0, ax);
    let gamma_plus_linear = if ax * ax + 1.0 < 225.0 {
        ln_gamma(w).expect("Re = 1 is in the domain").re + 0.5 * PI * ax
    } else {
        // Re log Γ(1 + ix) = ½ ln|w| − x·arg w − 1 + ½ ln 2π + Re(tail), and
        // −x·arg w + πx/2 = x·atan(1/x), so the two O(x) terms cancel exactly
        0.25 * (ax * ax).ln_1p() + ax * ax.recip().atan() - 1.0 + 0.5 * LN_2PI + stirling_tail(w).re
    };
    LOG_H_CONST + 0.5 * (modulus + gamma_plus_linear + cosh_rest)
}

/// The factors `(c + ix)^m` of h², as `(c, m)`.
const LINEAR_FACTORS: [(f64, f64); 5] = [(6.0, 1.0), (4.0, 1.0), (3.0, 2.0), (2.0, 1.0), (1.0, 2.0)];

/// α′(x) for x ≥ 0, accurate to about 1e-4, enough to carry the low word
/// of a double-double abscissa into the phase.
fn alpha_slope(ax: f64) -> f64 {
    let x2 = ax * ax;
    let linear = LINEAR_FACTORS.iter().map(|&(c, m)| m * c / (c * c + x2)).sum::<f64>();
    // Re ψ(1 + ix) ≈ ½ ln(1 + x²) − 1/(2(1 + x²))
    let digamma = 0.5 * x2.ln_1p() - 0.5 / (1.0 + x2);
    0.5 * (linear - LN_2PI + digamma)
}

/// h at an abscissa given in double-double.
pub(crate) fn h_value_dd(x: Dd) -> Complex64 {
    let ax = x.hi.abs();
    let lo = if x.hi < 0.0 { -x.lo } else { x.lo };
    let phase = (alpha_dd(ax) + Dd::from_f64(alpha_slope(ax) * lo)).rem_two_pi();
    Complex64::from_polar(log_rho_exact(ax).exp(), if x.hi < 0.0 { -phase } else { phase })
}

/// e^{iθ(x)} at an abscissa given in double-double.
pub(crate) fn theta_cis_dd(x: Dd) -> Complex64 {
    let slope = 0.5 * (x.hi.ln() - LN_2PI) - ALPHA_COEFFS[0] / (x.hi * x.hi);
    let phase = (theta_dd(x.hi) + Dd::from_f64(slope * x.lo)).rem_two_pi();
    Complex64::from_polar(1.0, phase)
}

/// α(x) for x ≥ 0 in double-double. Past |1 + ix| = 15 the large part of
/// Im log Γ(1 + ix), x·ln|1 + ix| − x, is combined with −x·ln 2π before
/// rounding, so the phase keeps its absolute accuracy at large x.
fn alpha_dd(ax: f64) -> Dd {
    let small = LINEAR_FACTORS.iter().map(|&(c, m)| m * (ax / c).atan()).sum::<f64>();
    if ax * ax + 1.0 < 225.0 {
        let gamma = ln_gamma(Complex64::new(1.0, ax)).expect("Re = 1 is in the domain");
        return Dd::from_f64(0.5 * (small + gamma.im - ax * LN_2PI));
    }
    let w = Complex64::new(1.0, ax);
    let big = (dd::ln(ax) - dd::LN_2PI - Dd::from_f64(1.0)).mul_f64(ax);
    let rest = small + 0.5 * ax * (ax * ax).recip().ln_1p() + 0.5 * ax.atan() + stirling_tail(w).im;
    (big + Dd::from_f64(rest)).mul_f64(0.5)
}

/// h(x) on the whole real line.
pub fn h_exact(x: f64) -> PhaseFactor {
    let ax = x.abs();
    let l = log_h(x);
    let rho = l.re.exp();
    let reduced = alpha_dd(ax).rem_two_pi();
    PhaseFactor {
        value: Complex64::from_polar(rho, if x < 0.0 { -reduced } else { reduced }),
        polar: PhasePolar { rho, alpha: l.im },
    }
}

/// h(x) from the exact formula for |x| ≤ [`ASYMPTOTIC_CROSSOVER`] and from
/// the full asymptotic expansions beyond.
pub fn h_auto(x: f64) -> PhaseFactor {
    let ax = x.abs();
    if ax <= ASYMPTOTIC_CROSSOVER {
        return h_exact(x);
    }
    let rho = log_rho_asymptotic(ax, 4).expect("domain checked").exp();
    let alpha = alpha_asymptotic(ax, 3).expect("domain checked").copysign(x);
    PhaseFactor {
        value: Complex64::from_polar(rho, alpha),
        polar: PhasePolar { rho, alpha },
    }
}

fn check_asymptotic_domain(op: &'static str, x: f64) -> Result<()> {
    if !(x >= 10.0) || !x.is_finite() {
        return Err(Error::domain(op, format!("needs x >= 10, got {x}")));
    }
    Ok(())
}

/// log ρ(x) truncated after `order` inverse-power terms (order ≤ 4).
pub fn log_rho_asymptotic(x: f64, order: usize) -> Result<f64> {
    check_asymptotic_domain("log_rho_asymptotic", x)?;
    if order > LOG_RHO_COEFFS.len() {
        return Err(Error::domain("log_rho_asymptotic", format!("order {order} > 4")));
    }
    let inv2 = 1.0 / (x * x);
    let mut power = 1.0;
    let mut tail = 0.0;
    for c in &LOG_RHO_COEFFS[..order] {
        power *= inv2;
        tail += c * power;
    }
    Ok(-1.75 * LN_2PI + 3.75 * x.ln() + tail)
}

/// α(x) truncated after `order` inverse-power terms (order ≤ 3).
pub fn alpha_asymptotic(x: f64, order: usize) -> Result<f64> {
    check_asymptotic_domain("alpha_asymptotic", x)?;
    if order > ALPHA_COEFFS.len() {
        return Err(Error::domain("alpha_asymptotic", format!("order {order} > 3")));
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut power = inv;
    let mut tail = 0.0;
    for c in &ALPHA_COEFFS[..order] {
        tail += c * power;
        power *= inv2;
    }
    Ok(alpha_leading(x).to_f64() + tail)
}

/// `x/2·log(x/2π) − x/2 + 15π/8` in double-double.
fn alpha_leading(x: f64) -> Dd {
    (dd::ln(x) - dd::LN_2PI).mul_f64(0.5 * x) - Dd::from_f64(0.5 * x) + dd::PI.mul_f64(15.0 / 8.0)
}

/// θ(t) in double-double, without the domain check.
pub(crate) fn theta_dd(t: f64) -> Dd {
    alpha_leading(t) + Dd::from_f64(ALPHA_COEFFS[0] / t)
}

/// θ(t) = t/2·log(t/2π) − t/2 + 15π/8 − 241/(24t), for t ≥ 10.
pub fn theta(t: f64) -> Result<f64> {
    if !(t >= 10.0) || !t.is_finite() {
        return Err(Error::domain("theta", format!("needs t >= 10, got {t}")));
    }
    Ok(theta_dd(t).to_f64())
}

/// ρ₀(t) = (2π)^{-7/4}·t^{7/4}·(19 + t²).
pub fn rho0(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("rho0", format!("needs t > 0, got {t}")));
    }
    Ok(rho0_unchecked(t))
}

pub(crate) fn rho0_unchecked(t: f64) -> f64 {
    (1.75 * (t.ln() - LN_2PI)).exp() * (19.0 + t * t)
}

/// The seven-term correction polynomial L₁(x, t).
pub fn l1(x: f64, t: f64) -> Result<Complex64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain("l1", format!("needs t > 0, got {t}")));
    }
    Ok(l1_unchecked(x, t))
}

pub(crate) fn l1_unchecked(x: f64, t: f64) -> Complex64 {
    let it = 1.0 / t;
    let it2 = it * it;
    let x2 = x * x;
    let re = 1.0 + 15.0 * x * it / 4.0 + 165.0 * x2 * it2 / 32.0 - x2 * x2 * it2 / 32.0;
    let im = x2 * it / 4.0 + 241.0 * x * it2 / 24.0 + 41.0 * x2 * x * it2 / 48.0;
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::rs_theta;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn h_at_zero_is_closed_form() {
        let h = h_exact(0.0);
        assert_relative_eq!(h.value.re, 3.0 * 6f64.sqrt() / (PI * PI), max_relative = 1e-14);
        assert_eq!(h.value.im, 0.0);
        assert_eq!(h.polar.alpha, 0.0);
        assert!((h.value.re - 0.7445556).abs() < 5e-8);
    }

    #[test]
    fn h_large_x_against_reference() {
        // 40-digit references
        let cases = [
            (
                10000.125,
                31.322538593396592796,
                37661615745627.212452,
                13786467376139.619179,
            ),
            (
                12345.5,
                32.112641145396411232,
                -71261561584178.106318,
                52272490176180.260665,
            ),
            (20.5, 8.1543491666737326924, 1894.0706477684858203, 2917.581616475601909),
        ];
        for (x, log_rho, re, im) in cases {
            let h = h_exact(x);
            assert!((h.polar.rho.ln() - log_rho).abs() < 1e-14, "x = {x}");
            let want = Complex64::new(re, im);
            assert!((h.value - want).norm() < 1e-14 * want.norm(), "x = {x}: {}", h.value);
        }
    }

    #[test]
    fn h_conjugate_symmetry() {
        for x in [0.3, 5.0, 17.0, 250.0, 700.0] {
            assert_eq!(h_exact(-x).value, h_exact(x).value.conj());
        }
    }

    #[test]
    fn h_does_not_overflow() {
        for x in [700.0, 1e4, 1e6, 1e8] {
            let h = h_exact(x);
            assert!(h.value.re.is_finite() && h.value.im.is_finite() && h.polar.rho > 0.0);
        }
    }

    #[test]
    fn h_matches_asymptotics_at_fifty() {
        let h = h_exact(50.0);
        let lr = log_rho_asymptotic(50.0, 4).unwrap();
        assert_relative_eq!(h.polar.rho, lr.exp(), max_relative = 1e-6);
        assert!((h.polar.rho.ln() - lr).abs() < 1e-7);
        assert!((h.polar.alpha - alpha_asymptotic(50.0, 3).unwrap()).abs() < 1e-7);
        let a = alpha_asymptotic(1e4, 1).unwrap();
        assert!((h_exact(1e4).polar.alpha - a).abs() < 1e-10);
    }

    #[test]
    fn asymptotic_closed_forms() {
        let x: f64 = 1e6;
        let want = -1.75 * (2.0 * PI).ln() + 3.75 * x.ln();
        assert!((log_rho_asymptotic(x, 0).unwrap() - want).abs() < 1e-12);
        let x: f64 = 100.0;
        let want = -1.75 * (2.0 * PI).ln() + 3.75 * x.ln() + 19e-4 - 433.0 / 2e8;
        assert!((log_rho_asymptotic(x, 2).unwrap() - want).abs() < 1e-13);
        let x = 2.0 * PI * E;
        let want = 15.0 * PI / 8.0 - 241.0 / (48.0 * PI * E);
        assert!((alpha_asymptotic(x, 1).unwrap() - want).abs() < 1e-13);
        assert!((theta(x).unwrap() - want).abs() < 1e-13);
        let x = 20.0 * PI;
        assert_eq!(theta(x).unwrap(), alpha_asymptotic(x, 1).unwrap());
        assert!(log_rho_asymptotic(9.0, 1).is_err());
        assert!(alpha_asymptotic(50.0, 4).is_err());
    }

    #[test]
    fn theta_is_rs_theta_plus_two_pi() {
        let t = 100.0;
        let band = rs_theta(t).unwrap() + 2.0 * PI - (241.0 / 24.0 + 1.0 / 48.0) / t;
        assert!((theta(t).unwrap() - band).abs() < 1e-3);
        assert!(theta(9.0).is_err());
    }

    #[test]
    fn rho0_values() {
        assert_relative_eq!(rho0(2.0 * PI).unwrap(), 19.0 + 4.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(rho0(1.0).unwrap(), 20.0 * (2.0 * PI).powf(-1.75), max_relative = 1e-14);
        let gap = (rho0(50.0).unwrap() / h_exact(50.0).polar.rho - 1.0).abs();
        assert!(gap <= 5e-5, "{gap}");
        assert!(rho0(0.0).is_err());
    }

    #[test]
    fn l1_values() {
        assert_eq!(l1(0.0, 3.0).unwrap(), Complex64::new(1.0, 0.0));
        let v = l1(1.0, 1.0).unwrap();
        assert!((v - Complex64::new(79.0 / 8.0, 535.0 / 48.0)).norm() < 1e-14);
        let v = l1(2.0, 1e6).unwrap() - Complex64::new(1.0 + 7.5e-6, 1e-6);
        assert!(v.norm() < 1e-10);
        assert!(l1(1.0, 0.0).is_err());
    }

    #[test]
    fn h_auto_switches_smoothly() {
        let x = ASYMPTOTIC_CROSSOVER;
        let a = h_exact(x * 1.0000001);
        let b = h_auto(x * 1.0000001);
        assert!((a.polar.alpha - b.polar.alpha).abs() < 1e-9);
        assert_relative_eq!(a.polar.rho, b.polar.rho, max_relative = 1e-12);
        assert_eq!(h_auto(-3.0).value, h_exact(-3.0).value);
    }
}
