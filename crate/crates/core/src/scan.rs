//! Continuous-argument tracking, sign-change zero counting, the phase-count
//! inequality, the perturbation-phase check, the c-statistic of arg H(t),
//! and the sign grid ("x-ray") of H(z) over a rectangle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dd::{self, ComplexSum};
use crate::error::{Error, Result};
use crate::integral::{z_scale, LineIntegrator, QuadratureConfig};
use crate::series::{h_series_z_scaled, SeriesTolerance};
use crate::special::{z_oracle, ZOracleConfig, LN_2PI};

/// Largest accepted magnitude of a wrapped phase step.
const MAX_STEP_JUMP: f64 = 0.5 * PI;

/// Pieces each rejected interval is split into per refinement round.
const REFINE_SPLIT: usize = 16;

/// Refinement rounds before the tracker gives up.
pub const REFINE_ROUNDS: u32 = 6;

/// Bisection width for refined zeros.
pub const ZERO_WIDTH: f64 = 1e-9;

/// An unwrapped, continuous argument sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTrack {
    pub grid: Vec<f64>,
    pub phase: Vec<f64>,
    pub source: String,
}

impl PhaseTrack {
    /// Phase change from the first to the last grid point.
    pub fn increment(&self) -> f64 {
        match (self.phase.first(), self.phase.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

fn wrap(d: f64) -> f64 {
    d - 2.0 * PI * (d / (2.0 * PI)).round()
}

fn check_ascending(grid: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for (index, t) in grid.enumerate() {
        if !(t > prev) {
            return Err(Error::NotAscending { index });
        }
        prev = t;
    }
    Ok(())
}

/// Unwraps the argument of `samples`, starting from the principal argument
/// of the first one. Steps whose wrapped jump reaches π/2 are rejected as
/// under-resolved.
pub fn continuous_arg(samples: &[(f64, Complex64)], source: impl Into<String>) -> Result<PhaseTrack> {
    check_ascending(samples.iter().map(|s| s.0))?;
    let mut phase = Vec::with_capacity(samples.len());
    for (index, &(t, z)) in samples.iter().enumerate() {
        if z.norm() == 0.0 {
            return Err(Error::ZeroSample { index, t });
        }
        let arg = match phase.last() {
            None => z.arg(),
            Some(&prev) => {
                let jump = wrap(z.arg() - prev);
                if jump.abs() >= MAX_STEP_JUMP {
                    return Err(Error::UnderResolved { index, t, jump });
                }
                prev + jump
            }
        };
        phase.push(arg);
    }
    Ok(PhaseTrack {
        grid: samples.iter().map(|s| s.0).collect(),
        phase,
        source: source.into(),
    })
}

/// Like [`continuous_arg`], but evaluates `f` itself and splits any
/// under-resolved step into finer pieces, for up to [`REFINE_ROUNDS`] rounds.
/// The returned track lives on the original grid.
pub fn track_adaptive<F>(f: F, grid: &[f64], source: impl Into<String>) -> Result<PhaseTrack>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    check_ascending(grid.iter().copied())?;
    let values: Vec<Complex64> = grid.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let mut phase = Vec::with_capacity(grid.len());
    for (index, (&t, &z)) in grid.iter().zip(&values).enumerate() {
        if z.norm() == 0.0 {
            return Err(Error::ZeroSample { index, t });
        }
        let arg = match phase.last() {
            None => z.arg(),
            Some(&prev) => {
                let jump = wrap(z.arg() - prev);
                if jump.abs() < MAX_STEP_JUMP {
                    prev + jump
                } else {
                    let (t0, z0) = (grid[index - 1], values[index - 1]);
                    prev + refined_increment(&f, (t0, z0), (t, z), 1).map_err(|e| match e {
                        Error::UnderResolved { jump, .. } => Error::UnderResolved { index, t, jump },
                        other => other,
                    })?
                }
            }
        };
        phase.push(arg);
    }
    Ok(PhaseTrack {
        grid: grid.to_vec(),
        phase,
        source: source.into(),
    })
}

/// Phase increment of `f` from `a` to `b`, found by splitting the interval.
fn refined_increment<F>(f: &F, a: (f64, Complex64), b: (f64, Complex64), round: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if round > REFINE_ROUNDS {
        return Err(Error::UnderResolved {
            index: 0,
            t: b.0,
            jump: wrap(b.1.arg() - a.1.arg()),
        });
    }
    let h = (b.0 - a.0) / REFINE_SPLIT as f64;
    let mut points = Vec::with_capacity(REFINE_SPLIT + 1);
    points.push(a);
    for k in 1..REFINE_SPLIT {
        let t = a.0 + k as f64 * h;
        let z = f(t)?;
        if z.norm() == 0.0 {
            return Err(Error::ZeroSample { index: 0, t });
        }
        points.push((t, z));
    }
    points.push(b);
    let mut total = 0.0;
    for w in points.windows(2) {
        let jump = wrap(w[1].1.arg() - w[0].1.arg());
        total += if jump.abs() < MAX_STEP_JUMP {
            jump
        } else {
            refined_increment(f, w[0], w[1], round + 1)?
        };
    }
    Ok(total)
}

/// Sign-change zeros of a real function on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCount {
    pub a: f64,
    pub b: f64,
    pub zeros: Vec<f64>,
    pub count: usize,
}

/// Equally spaced grid from `a` to `b` (both included) with spacing ≤ `step`.
pub fn uniform_grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..=n).map(|k| if k == n { b } else { a + k as f64 * h }).collect()
}

fn check_interval(op: &'static str, a: f64, b: f64, step: f64) -> Result<()> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(op, format!("needs a < b, got [{a}, {b}]")));
    }
    if !(step > 0.0 && step <= 0.25) {
        return Err(Error::domain(op, format!("step must lie in (0, 0.25], got {step}")));
    }
    Ok(())
}

/// Scans `[a, b]` for sign changes of `f` and bisects each bracket down to
/// `refine_width`. Exact zeros on the grid are counted once. Zeros of even
/// order are invisible to sign changes.
pub fn count_zeros<F>(f: F, a: f64, b: f64, step: f64, refine_width: f64) -> Result<ZeroCount>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    check_interval("count_zeros", a, b, step)?;
    if !(refine_width > 0.0) {
        return Err(Error::domain("count_zeros", "refine_width must be positive"));
    }
    let grid = uniform_grid(a, b, step);
    let values: Vec<f64> = grid.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    enum Hit {
        Exact(f64),
        Bracket(f64, f64, f64),
    }
    let mut hits = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&t, &v) in grid.iter().zip(&values) {
        if v == 0.0 {
            hits.push(Hit::Exact(t));
            last = None;
            continue;
        }
        if let Some((t0, v0)) = last {
            if v0.signum() != v.signum() {
                hits.push(Hit::Bracket(t0, t, v0));
            }
        }
        last = Some((t, v));
    }
    let zeros = hits
        .into_par_iter()
        .map(|hit| match hit {
            Hit::Exact(t) => Ok(t),
            Hit::Bracket(mut lo, mut hi, v_lo) => {
                while hi - lo > refine_width {
                    let mid = 0.5 * (lo + hi);
                    let v = f(mid)?;
                    if v == 0.0 {
                        return Ok(mid);
                    }
                    if v.signum() == v_lo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ZeroCount {
        a,
        b,
        count: zeros.len(),
        zeros,
    })
}

/// Zero count of Z on `[a, b]` set against the phase increment of F(t).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroScanReport {
    pub a: f64,
    pub b: f64,
    pub zeros: Vec<f64>,
    pub count: usize,
    /// Unwrapped phase increment of F over `[a, b]`.
    pub delta_phi: f64,
    pub dphi_over_pi: f64,
    /// Error bound on `dphi_over_pi` from the endpoint errors of F.
    pub dphi_over_pi_error: f64,
    /// Whether `|Δφ|/π < N + 1`.
    pub verdict: bool,
}

/// Absolute error of F(t)/z_scale(t) assumed when bounding phase errors,
/// matching the tested accuracy of the integral representation.
const F_ERROR_AT_Z_SCALE: f64 = 1e-8;

/// Counts zeros of Z on `[a, b]` and checks `|Δφ|/π < N + 1`, with φ the
/// continuous argument of F(t), whose real part is Z(t) times a positive
/// factor.
pub fn phase_count_check(a: f64, b: f64, step: f64) -> Result<ZeroScanReport> {
    check_interval("phase_count_check", a, b, step)?;
    if !(a >= 10.0) {
        return Err(Error::domain("phase_count_check", format!("needs a >= 10, got {a}")));
    }
    let oracle = ZOracleConfig::default();
    let zeros = count_zeros(|t| Ok(z_oracle(t, &oracle)?.value), a, b, step, ZERO_WIDTH)?;
    let line = LineIntegrator::new(4.0, a, b, &QuadratureConfig::default())?;
    let track = track_adaptive(|t| line.eval(t), &uniform_grid(a, b, step), "F")?;
    let delta_phi = track.increment();
    let dphi_over_pi = delta_phi.abs() / PI;
    // the unwrapped increment is only as uncertain as the two end phases
    let end_error = |t: f64| -> Result<f64> { Ok(F_ERROR_AT_Z_SCALE * z_scale(t) / line.eval(t)?.norm()) };
    let dphi_over_pi_error = (end_error(a)? + end_error(b)?) / PI;
    Ok(ZeroScanReport {
        a,
        b,
        dphi_over_pi_error,
        verdict: dphi_over_pi < (zeros.count + 1) as f64,
        zeros: zeros.zeros,
        count: zeros.count,
        delta_phi,
        dphi_over_pi,
    })
}

/// Outcome of [`perturbation_phase_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PerturbationVerdict {
    /// One 2π shift of g's phase stays within π of f's phase everywhere.
    Holds,
    /// The hypothesis holds but the phases drift apart.
    Fails,
    /// The hypothesis |f − g| < |f| fails somewhere, so nothing is claimed.
    Vacuous,
}

/// Given `|f − g| < |f|` at every grid point, checks that the continuous
/// phases α of f and β of g satisfy `|α − β − 2πk| < π` for one integer k,
/// and `|Δα − Δβ| < 2π`.
pub fn perturbation_phase_check(
    f_track: &PhaseTrack,
    g_track: &PhaseTrack,
    f_minus_g_ok: &[bool],
) -> Result<PerturbationVerdict> {
    if f_track.grid != g_track.grid || f_minus_g_ok.len() != f_track.grid.len() {
        return Err(Error::GridMismatch);
    }
    if f_track.grid.is_empty() {
        return Ok(PerturbationVerdict::Holds);
    }
    if f_minus_g_ok.iter().any(|ok| !ok) {
        return Ok(PerturbationVerdict::Vacuous);
    }
    let shift = 2.0 * PI * ((f_track.phase[0] - g_track.phase[0]) / (2.0 * PI)).round();
    let close = f_track
        .phase
        .iter()
        .zip(&g_track.phase)
        .all(|(a, b)| (a - b - shift).abs() < PI);
    let drift = (f_track.increment() - g_track.increment()).abs();
    Ok(if close && drift < 2.0 * PI {
        PerturbationVerdict::Holds
    } else {
        PerturbationVerdict::Fails
    })
}

/// The statistic c(t) = −arg H(t) / (t/2·log(t/2π) − t/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CStatistic {
    pub t: f64,
    pub c: f64,
    pub c_error: f64,
    /// Continuous arg H(t), tracked from t = 1.
    pub end_phase: f64,
    pub end_phase_error: f64,
    pub samples: usize,
}

/// Relative accuracy of the H values fed to the tracker.
const C_STAT_EPS: f64 = 1e-8;

/// Tracks arg H from t = 1 (principal argument there) up to `t` and
/// returns c(t).
pub fn c_statistic(t: f64, step: f64) -> Result<CStatistic> {
    Ok(c_statistics(&[t], step)?.remove(0))
}

/// c(t) at each of the ascending points `ts`, from a single track of arg H
/// whose grid has spacing ≤ `step` and passes through every point.
pub fn c_statistics(ts: &[f64], step: f64) -> Result<Vec<CStatistic>> {
    if ts.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(&t) = ts.iter().find(|t| !(**t >= 100.0) || !t.is_finite()) {
        return Err(Error::domain("c_statistic", format!("needs t >= 100, got {t}")));
    }
    check_ascending(ts.iter().copied())?;
    if !(step > 0.0 && step <= 0.25) {
        return Err(Error::domain(
            "c_statistic",
            format!("step must lie in (0, 0.25], got {step}"),
        ));
    }
    let tol = SeriesTolerance {
        eps: C_STAT_EPS,
        ..Default::default()
    };
    let mut grid = Vec::new();
    let mut marks = Vec::with_capacity(ts.len());
    let mut start = 1.0;
    for &t in ts {
        let piece = uniform_grid(start, t, step);
        grid.extend_from_slice(&piece[usize::from(!grid.is_empty())..]);
        marks.push(grid.len() - 1);
        start = t;
    }
    let track = track_adaptive(|tau| Ok(h_series_z_scaled(tau, &tol)?.value), &grid, "H")?;
    // a value with absolute error δ has its argument off by at most δ/|H|
    let phase_error = |tau: f64| -> Result<f64> {
        let h = h_series_z_scaled(tau, &tol)?;
        let scale = (tau / (2.0 * PI)).powf(1.75).max(1.0);
        let rounding = 8.0 * f64::EPSILON * (h.terms as f64).sqrt() * h.abs_sum;
        Ok((C_STAT_EPS / scale + rounding) / h.value.norm())
    };
    let start_error = phase_error(1.0)?;
    ts.iter()
        .zip(marks)
        .map(|(&t, k)| {
            let end_phase = track.phase[k];
            let end_phase_error = start_error + phase_error(t)?;
            let denominator = 0.5 * t * (t.ln() - LN_2PI) - 0.5 * t;
            Ok(CStatistic {
                t,
                c: -end_phase / denominator,
                c_error: end_phase_error / denominator,
                end_phase,
                end_phase_error,
                samples: k + 1,
            })
        })
        .collect()
}

/// Sign of Re H and Im H at one cell centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XrayCell {
    pub re: f64,
    pub im: f64,
    pub sgn_re: i8,
    pub sgn_im: i8,
}

/// Admissible imaginary range for [`xray_grid`].
pub const XRAY_IM_RANGE: (f64, f64) = (-3.0, 4.0);

/// H(z) for complex z with Re z > 0: a direct sum to N and, past N, the
/// expansion 2/(q + 1/q) = 2Σ_k (−1)^k q^{2k+1} summed in closed form with
/// Hurwitz-type tails.
pub fn h_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !(z.im > XRAY_IM_RANGE.0 && z.im < XRAY_IM_RANGE.1) {
        return Err(Error::domain(
            "h_complex",
            format!("needs Re z > 0 and Im z in (-3, 4), got {z}"),
        ));
    }
    let n_direct = (z.norm() / 2.0).ceil().max(64.0) as u64;
    let log_ratio = z.ln() - LN_2PI;
    let mut acc = ComplexSum::new();
    for n in 1..=n_direct {
        let ln_n = dd::ln_int(n);
        let w = 1.75 * (log_ratio - 2.0 * ln_n.hi);
        let sech = if w.re >= 0.0 {
            let e = (-w).exp();
            2.0 * e / (1.0 + e * e)
        } else {
            let e = w.exp();
            2.0 * e / (1.0 + e * e)
        };
        // n^{-4-iz} = n^{Im z - 4} e^{-i Re z ln n}
        let modulus = ((z.im - 4.0) * ln_n.hi).exp();
        let phase = ln_n.mul_f64(-z.re).rem_two_pi();
        acc.add(Complex64::from_polar(modulus, phase) * sech);
    }
    // Tail: 2 Σ_k (−1)^k (z/2π)^{7(2k+1)/4} Σ_{n>N} n^{-(15/2 + 7k + iz)}
    let i = Complex64::i();
    let ratio_pow = (1.75 * log_ratio).exp();
    let mut tail = Complex64::new(0.0, 0.0);
    let mut q_pow = ratio_pow;
    for k in 0..4 {
        let w = 7.5 + 7.0 * k as f64 + i * z;
        let term = 2.0 * q_pow * hurwitz_tail(w, n_direct + 1);
        tail += if k % 2 == 0 { term } else { -term };
        q_pow *= ratio_pow * ratio_pow;
    }
    Ok(acc.value() + tail)
}

/// Σ_{n ≥ a} n^{-w} by Euler–Maclaurin at `a` (Re w > 1).
fn hurwitz_tail(w: Complex64, a: u64) -> Complex64 {
    const B_OVER_FACT: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    ];
    let af = a as f64;
    let ln_a = dd::ln_int(a);
    let a_neg_w = Complex64::from_polar((-w.re * ln_a.hi).exp(), ln_a.mul_f64(-w.im).rem_two_pi());
    let mut sum = a_neg_w * af / (w - 1.0) + a_neg_w * 0.5;
    let mut rising = w;
    let mut power = a_neg_w / af;
    for (k, c) in B_OVER_FACT.iter().enumerate() {
        if k > 0 {
            let j = (2 * k - 1) as f64;
            rising = rising * (w + j) * (w + j + 1.0);
            power /= af * af;
        }
        sum += rising * power * *c;
    }
    sum
}

/// Signs of Re H and Im H at the centres of an `n_re × n_im` cell grid over
/// `(re0, re1) × (im0, im1)`, row-major with `re` varying fastest.
pub fn xray_grid(re0: f64, re1: f64, im0: f64, im1: f64, n_re: usize, n_im: usize) -> Result<Vec<XrayCell>> {
    if !(re0 > 0.0 && re1 > re0 && re1.is_finite()) {
        return Err(Error::domain(
            "xray_grid",
            format!("needs 0 < re0 < re1, got {re0}, {re1}"),
        ));
    }
    if !(im0 >= XRAY_IM_RANGE.0 && im1 <= XRAY_IM_RANGE.1 && im0 < im1) {
        return Err(Error::domain(
            "xray_grid",
            format!("needs -3 <= im0 < im1 <= 4, got {im0}, {im1}"),
        ));
    }
    if n_re == 0 || n_im == 0 {
        return Err(Error::domain("xray_grid", "grid dimensions must be positive"));
    }
    let d_re = (re1 - re0) / n_re as f64;
    let d_im = (im1 - im0) / n_im as f64;
    (0..n_re * n_im)
        .into_par_iter()
        .map(|k| {
            let re = re0 + ((k % n_re) as f64 + 0.5) * d_re;
            let im = im0 + ((k / n_re) as f64 + 0.5) * d_im;
            let h = h_complex(Complex64::new(re, im))?;
            Ok(XrayCell {
                re,
                im,
                sgn_re: sign(h.re),
                sgn_im: sign(h.im),
            })
        })
        .collect()
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}
