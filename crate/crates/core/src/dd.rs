//! Double-double arithmetic, just enough of it to form phases like `t·ln n`
//! for `t` up to ~1e8 and reduce them modulo 2π without losing the digits
//! that matter after reduction.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// An unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const TWO_PI: Dd = Dd::new(std::f64::consts::TAU, 2.4492935982947064e-16);
pub const PI: Dd = Dd::new(std::f64::consts::PI, 1.2246467991473532e-16);
pub const LN_2: Dd = Dd::new(std::f64::consts::LN_2, 2.3190468138462996e-17);
pub const LN_PI: Dd = Dd::new(1.1447298858494002, 1.0265951162707826e-17);
pub const LN_2PI: Dd = Dd::new(1.8378770664093456, -7.756588316134483e-17);

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: err }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// The exact product `a · b`.
    pub fn prod(a: f64, b: f64) -> Self {
        two_prod(a, b)
    }

    /// The exact sum `a + b`.
    pub fn sum(a: f64, b: f64) -> Self {
        two_sum(a, b)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let p = two_prod(self.hi, b);
        quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    /// Reduces `self` to the interval `[-π, π]` and returns the result as an
    /// ordinary float.
    pub fn rem_two_pi(self) -> f64 {
        let k = (self.hi / TWO_PI.hi).round();
        (self - TWO_PI.mul_f64(k)).to_f64()
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let s = two_sum(self.hi, b.hi);
        let t = two_sum(self.lo, b.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let q = quick_two_sum(q1, q2);
        q + Dd::from_f64(q3)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let p = two_prod(self.hi, b.hi);
        let lo = p.lo + (self.hi * b.lo + self.lo * b.hi);
        quick_two_sum(p.hi, lo)
    }
}

/// Natural logarithm of a positive float, to roughly 32 significant digits.
pub fn ln(x: f64) -> Dd {
    assert!(x > 0.0 && x.is_finite(), "dd::ln needs a positive finite argument");
    // x = m·2^e with m in [√½, √2), then ln m = 2·atanh((m-1)/(m+1)).
    let bits = x.to_bits();
    let mut e = ((bits >> 52) & 0x7ff) as i64;
    let mut m = if e == 0 {
        // Subnormal: scale into the normal range first.
        let y = x * 2f64.powi(64);
        let b = y.to_bits();
        e = ((b >> 52) & 0x7ff) as i64 - 64;
        f64::from_bits((b & !(0x7ffu64 << 52)) | (1023u64 << 52))
    } else {
        f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52))
    };
    e -= 1023;
    if m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        e += 1;
    }
    let num = Dd::from_f64(m - 1.0);
    let den = two_sum(m, 1.0);
    let z = num / den;
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 3.0;
    loop {
        term = term * z2;
        let add = term / Dd::from_f64(k);
        sum = sum + add;
        if add.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) || add.hi == 0.0 {
            break;
        }
        k += 2.0;
    }
    sum.mul_f64(2.0) + LN_2.mul_f64(e as f64)
}

const LN_TABLE_LEN: usize = 1 << 16;

fn ln_table() -> &'static [Dd] {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=LN_TABLE_LEN).map(|n| ln(n.max(1) as f64)).collect())
}

/// `ln n` in double-double, table-backed for small `n`.
pub fn ln_int(n: u64) -> Dd {
    if (n as usize) <= LN_TABLE_LEN {
        ln_table()[n as usize]
    } else {
        ln(n as f64)
    }
}

/// `(cos, sin)` of `t·ln n`, with the phase formed and reduced in
/// double-double so that it stays accurate for large `t`.
#[inline]
pub fn cis_t_ln_n(t: f64, n: u64) -> (f64, f64) {
    let r = ln_int(n).mul_f64(t).rem_two_pi();
    (r.cos(), r.sin())
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator (component-wise Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: num_complex::Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_consistent() {
        assert_eq!((PI.mul_f64(2.0) - TWO_PI).to_f64(), 0.0);
        let d = (LN_2 + LN_PI - LN_2PI).to_f64();
        assert!(d.abs() < 1e-31, "{d}");
        assert!((ln(2.0) - LN_2).to_f64().abs() < 1e-31);
        assert!((ln(std::f64::consts::PI) - LN_PI).to_f64().abs() < 1e-15);
    }

    #[test]
    fn ln_matches_f64_and_is_additive() {
        for &x in &[1e-300, 0.3, 1.0, 1.5, 7.0, 1234.5678, 1e8, 1e300] {
            let l = ln(x);
            assert!((l.to_f64() - x.ln()).abs() <= 1e-15 * x.ln().abs().max(1.0));
        }
        // ln 6 = ln 2 + ln 3 to double-double accuracy
        let d = ln(6.0) - ln(2.0) - ln(3.0);
        assert!(d.to_f64().abs() < 1e-30);
        let d = ln_int(65537) - ln(65537.0);
        assert_eq!(d.to_f64(), 0.0);
        let d = ln_int(1000) - ln(8.0) - ln(125.0);
        assert!(d.to_f64().abs() < 1e-30);
    }

    #[test]
    fn rem_two_pi_large_phase() {
        // 1e8·ln 3 reduced mod 2π; reference from a 40-digit evaluation.
        let r = ln_int(3).mul_f64(1e8).rem_two_pi();
        let reference = -2.335441198866882;
        assert!((r - reference).abs() < 1e-12, "{r}");
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::new();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
