//! Log-gamma, zeta near and right of the critical line, the Riemann–Siegel
//! theta and Z functions, and the upper incomplete gamma function.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::dd::{self, CompensatedSum, ComplexSum, Dd};
use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k)!` for k = 1..=9.
const BERNOULLI_OVER_FACTORIAL: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
];

/// `B_{2k} / (2k(2k-1))` for the Stirling series, k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Principal branch of `log Γ(z)` for `Re z > 0`, continuous on the half-plane.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::domain("ln_gamma", format!("needs Re z > 0, got {z}")));
    }
    // Shift right until |z| >= 15, then apply Stirling.
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    Ok((w - 0.5) * w.ln() - w + HALF_LN_2PI + stirling_tail(w) - shift)
}

/// `Σ B_{2k} / (2k(2k-1) w^{2k-1})`, the Stirling correction for `|w| ≥ 15`.
pub(crate) fn stirling_tail(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    series
}

/// `n^{-s}` for `Im s = s.im + im_lo`, with `im_lo` a low-order correction.
/// The oscillating phase is formed and reduced in double-double.
#[inline]
fn n_pow_neg_split(n: u64, s: Complex64, im_lo: f64) -> Complex64 {
    let ln_n = dd::ln_int(n);
    let modulus = (-s.re * ln_n.hi).exp();
    let phase = (ln_n.mul_f64(-s.im) - Dd::from_f64(ln_n.hi * im_lo)).rem_two_pi();
    Complex64::from_polar(modulus, phase)
}

/// Euler–Maclaurin for ζ(s): `n_terms - 1` explicit terms, then the integral,
/// the half-term and `k_terms` Bernoulli corrections at `n_terms`.
fn zeta_euler_maclaurin(s: Complex64, n_terms: u64, k_terms: usize) -> Complex64 {
    zeta_euler_maclaurin_split(s, 0.0, n_terms, k_terms)
}

fn zeta_euler_maclaurin_split(s: Complex64, im_lo: f64, n_terms: u64, k_terms: usize) -> Complex64 {
    let mut acc = ComplexSum::new();
    for n in 1..n_terms {
        acc.add(n_pow_neg_split(n, s, im_lo));
    }
    let nf = n_terms as f64;
    let n_neg_s = n_pow_neg_split(n_terms, s, im_lo);
    acc.add(n_neg_s * nf / (s - 1.0));
    acc.add(n_neg_s * 0.5);
    // T_k = B_2k/(2k)! · s(s+1)…(s+2k-2) · N^{-s-2k+1}
    let mut rising = s;
    let mut power = n_neg_s / nf;
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().take(k_terms).enumerate() {
        if k > 0 {
            let j = (2 * k - 1) as f64;
            rising = rising * (s + j) * (s + j + 1.0);
            power /= nf * nf;
        }
        acc.add(rising * power * *coeff);
    }
    acc.value()
}

/// ζ(s) for `Re s ≥ 2`, with the cut-off chosen so that the first omitted
/// Euler–Maclaurin term is below 1e-17.
pub fn zeta_right(s: Complex64) -> Result<Complex64> {
    Ok(zeta_euler_maclaurin(s, right_cutoff(s)?, RIGHT_K))
}

/// ζ(σ + i·im) for `σ ≥ 2` with the ordinate given in double-double, so an
/// ordinate formed as a sum `t + x` is not rounded before the phases.
pub(crate) fn zeta_right_dd(sigma: f64, im: Dd) -> Result<Complex64> {
    let s = Complex64::new(sigma, im.hi);
    Ok(zeta_euler_maclaurin_split(s, im.lo, right_cutoff(s)?, RIGHT_K))
}

const RIGHT_K: usize = 8;

fn right_cutoff(s: Complex64) -> Result<u64> {
    if !(s.re >= 2.0) || !s.im.is_finite() || !s.re.is_finite() {
        return Err(Error::domain("zeta_right", format!("needs Re s >= 2, got {s}")));
    }
    let mut log_bound = BERNOULLI_OVER_FACTORIAL[RIGHT_K].abs().ln();
    for j in 0..=2 * RIGHT_K {
        log_bound += (s + j as f64).norm().ln();
    }
    let log_n = (log_bound - (1e-17f64).ln()) / (s.re + (2 * RIGHT_K + 1) as f64);
    Ok(log_n.exp().ceil().max(10.0) as u64)
}

/// How many explicit terms the Euler–Maclaurin ζ uses: `max(min_terms, terms_per_im·|Im s|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmTerms {
    pub min_terms: u64,
    pub terms_per_im: f64,
}

impl Default for EmTerms {
    fn default() -> Self {
        EmTerms {
            min_terms: 50,
            terms_per_im: 2.0,
        }
    }
}

impl EmTerms {
    fn count(&self, im: f64) -> u64 {
        (self.terms_per_im * im.abs()).ceil().max(self.min_terms as f64) as u64
    }
}

/// Default cap on `|Im s|` for [`zeta_em`].
pub const ZETA_EM_IM_CAP: f64 = 1e6;

/// ζ(s) by Euler–Maclaurin with corrections through B₈. Meant for
/// `0 < Re s ≤ 2`; larger real parts are accepted so the result can be
/// checked against [`zeta_right`].
pub fn zeta_em(s: Complex64) -> Result<Complex64> {
    zeta_em_with(s, EmTerms::default(), ZETA_EM_IM_CAP)
}

/// [`zeta_em`] with an explicit term rule and cap on `|Im s|`.
pub fn zeta_em_with(s: Complex64, terms: EmTerms, im_cap: f64) -> Result<Complex64> {
    if !(s.re > 0.0) || !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::domain("zeta_em", format!("needs Re s > 0, got {s}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if s.im.abs() > im_cap {
        return Err(Error::ImaginaryCap {
            im: s.im.abs(),
            cap: im_cap,
        });
    }
    Ok(zeta_euler_maclaurin(s, terms.count(s.im), 4))
}

/// ζ(s) for any `Re s > 0` (except the pole), dispatching on `Re s`.
pub(crate) fn zeta(s: Complex64) -> Result<Complex64> {
    if s.re >= 2.0 {
        zeta_right(s)
    } else {
        zeta_em(s)
    }
}

fn check_theta_domain(op: &'static str, t: f64) -> Result<()> {
    if !(t >= 10.0) || !t.is_finite() {
        return Err(Error::domain(op, format!("needs t >= 10, got {t}")));
    }
    Ok(())
}

/// Asymptotic Riemann–Siegel theta in double-double.
fn rs_theta_dd(t: f64) -> Dd {
    let main = (dd::ln(t) - dd::LN_2PI).mul_f64(0.5 * t) - Dd::from_f64(0.5 * t);
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let tail = inv * (1.0 / 48.0 + inv2 * (7.0 / 5760.0 + inv2 * (31.0 / 80640.0 + inv2 * 127.0 / 430080.0)));
    main - dd::PI.mul_f64(0.125) + Dd::from_f64(tail)
}

/// Riemann–Siegel theta by its Stirling expansion, `t ≥ 10`.
pub fn rs_theta(t: f64) -> Result<f64> {
    check_theta_domain("rs_theta", t)?;
    Ok(rs_theta_dd(t).to_f64())
}

/// Riemann–Siegel theta from log-gamma: `Im ln Γ(1/4 + it/2) − (t/2) ln π`.
pub fn rs_theta_gamma(t: f64) -> Result<f64> {
    let lg = ln_gamma(Complex64::new(0.25, 0.5 * t))?;
    Ok(lg.im - 0.5 * t * dd::LN_PI.hi)
}

/// Tuning for [`z_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZOracleConfig {
    /// Above this `|t|` the Riemann–Siegel formula replaces Euler–Maclaurin.
    pub em_switch: f64,
    /// Number of Riemann–Siegel correction terms beyond C₀ (0, 1 or 2).
    pub rs_correction_order: u8,
    pub em_terms: EmTerms,
}

impl Default for ZOracleConfig {
    fn default() -> Self {
        ZOracleConfig {
            em_switch: 500.0,
            rs_correction_order: 2,
            em_terms: EmTerms::default(),
        }
    }
}

impl ZOracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.em_switch >= 10.0) {
            return Err(Error::InvalidConfig(format!(
                "em_switch must be >= 10, got {}",
                self.em_switch
            )));
        }
        if self.rs_correction_order > 2 {
            return Err(Error::InvalidConfig(format!(
                "rs_correction_order must be <= 2, got {}",
                self.rs_correction_order
            )));
        }
        if self.em_terms.min_terms < 10 || !(self.em_terms.terms_per_im >= 1.0) {
            return Err(Error::InvalidConfig("em_terms too small".into()));
        }
        Ok(())
    }
}

/// A value of Z(t) with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZOracleValue {
    pub value: f64,
    pub est_error: f64,
}

impl ZOracleValue {
    /// Estimated error threshold above which a value is flagged.
    pub const WARN_LEVEL: f64 = 1e-6;

    pub fn accuracy_warning(&self) -> bool {
        self.est_error > Self::WARN_LEVEL
    }
}

/// The Riemann–Siegel Z function.
pub fn z_oracle(t: f64, cfg: &ZOracleConfig) -> Result<ZOracleValue> {
    cfg.validate()?;
    if !t.is_finite() {
        return Err(Error::domain("z_oracle", "t must be finite"));
    }
    let t = t.abs();
    if t <= cfg.em_switch {
        let theta = if t >= 10.0 { rs_theta(t)? } else { rs_theta_gamma(t)? };
        let zeta = zeta_em_with(Complex64::new(0.5, t), cfg.em_terms, f64::INFINITY)?;
        let value = (Complex64::from_polar(1.0, theta) * zeta).re;
        return Ok(ZOracleValue {
            value,
            est_error: 1e-10,
        });
    }
    Ok(riemann_siegel(t, cfg.rs_correction_order))
}

fn riemann_siegel(t: f64, order: u8) -> ZOracleValue {
    let a = (t / (2.0 * PI)).sqrt();
    let n_main = a.floor() as u64;
    let p = a - n_main as f64;
    let theta = rs_theta_dd(t);
    let mut main = CompensatedSum::new();
    for n in 1..=n_main {
        let phase = (theta - dd::ln_int(n).mul_f64(t)).rem_two_pi();
        main.add(2.0 * phase.cos() / (n as f64).sqrt());
    }
    let coeffs = rs_coefficients(p);
    let mut correction = 0.0;
    let mut scale = 1.0;
    for c in coeffs.iter().take(order as usize + 1) {
        correction += c * scale;
        scale /= a;
    }
    let sign = if n_main % 2 == 1 { 1.0 } else { -1.0 };
    let prefactor = a.powf(-0.5);
    let value = main.value() + sign * prefactor * correction;
    let next = coeffs[order as usize + 1].abs() * scale;
    let after = 1e-3 * scale / a;
    let rounding = 1e-15 * (n_main as f64).sqrt() * 4.0;
    ZOracleValue {
        value,
        est_error: prefactor * (next + after) + rounding,
    }
}

/// Taylor coefficients of Ψ(½ + u) = cos(2π(u² − 5/16)) / (−cos 2πu), which
/// is entire; they come from a discrete Cauchy integral on |u| = 1.
fn psi_taylor() -> &'static [f64; PSI_TERMS] {
    static COEFFS: OnceLock<[f64; PSI_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        const M: usize = 256;
        let samples: Vec<Complex64> = (0..M)
            .map(|j| {
                let u = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / M as f64);
                let num = (2.0 * PI * (u * u - 5.0 / 16.0)).cos();
                let den = -(2.0 * PI * u).cos();
                num / den
            })
            .collect();
        let mut c = [0.0; PSI_TERMS];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut acc = CompensatedSum::new();
            for (j, v) in samples.iter().enumerate() {
                let ang = -2.0 * PI * (j * k % M) as f64 / M as f64;
                acc.add((v * Complex64::from_polar(1.0, ang)).re);
            }
            *ck = acc.value() / M as f64;
        }
        c
    })
}

const PSI_TERMS: usize = 64;

/// m-th derivative of Ψ at p = ½ + u.
fn psi_derivative(u: f64, m: usize) -> f64 {
    let c = psi_taylor();
    let mut acc = 0.0;
    for k in (m..PSI_TERMS).rev() {
        let mut falling = 1.0;
        for j in 0..m {
            falling *= (k - j) as f64;
        }
        acc = acc * u + c[k] * falling;
    }
    acc
}

/// Riemann–Siegel correction coefficients C₀..C₃ at fractional part `p`.
fn rs_coefficients(p: f64) -> [f64; 4] {
    let u = p - 0.5;
    let d = |m| psi_derivative(u, m);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    [
        d(0),
        -d(3) / (96.0 * pi2),
        d(2) / (64.0 * pi2) + d(6) / (18432.0 * pi4),
        -d(1) / (64.0 * pi2) - d(5) / (3840.0 * pi4) - d(9) / (5308416.0 * pi6),
    ]
}

/// Upper incomplete gamma Γ(a, x) for `x > a ≥ 1`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a >= 1.0) || !(x > a) || !x.is_finite() {
        return Err(Error::domain(
            "upper_incomplete_gamma",
            format!("needs x > a >= 1, got a = {a}, x = {x}"),
        ));
    }
    if a == 1.0 {
        return Ok((-x).exp());
    }
    if a.fract() == 0.0 && a <= 30.0 {
        // (a-1)! e^{-x} Σ_{k<a} x^k / k!
        let n = a as u32;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..n {
            term *= x / k as f64;
            sum += term;
        }
        let fact: f64 = (1..n).map(f64::from).product();
        return Ok(fact * (-x).exp() * sum);
    }
    // Modified Lentz on the continued fraction for e^{x} x^{-a} Γ(a, x).
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
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
            return Ok((a * x.ln() - x).exp() * h);
        }
    }
    Err(Error::NonConvergence {
        op: "upper_incomplete_gamma",
        detail: format!("continued fraction at a = {a}, x = {x}"),
    })
}

/// The Gabcke-type bound `a e^{-x} x^{a-1}` on Γ(a, x).
pub fn gabcke_bound(a: f64, x: f64) -> f64 {
    a * (-x).exp() * x.powf(a - 1.0)
}

pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;
