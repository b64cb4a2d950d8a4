//! Exact results at the factorizing field that depend only on the
//! anisotropy `χ`, the size `n`, and (for blocks) the block size `L`.
//!
//! Powers of `χ` are evaluated as `exp(m ln χ)` and `1 - χ^m` as
//! `-expm1(m ln χ)`, so the formulas stay accurate both for large `n`
//! and for `χ → 1`.

use serde::{Deserialize, Serialize};

use crate::concurrence::{ConcurrenceKind, ConcurrenceValue, PairCorrelators, MAX_VECTOR_SITES};
use crate::error::{Error, Result};
use crate::spec::{ChainSpec, Parity};

/// `χ^e`, with `χ^0 = 1` also at `χ = 0`.
pub(crate) fn chi_pow(chi: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if chi == 0.0 {
        0.0
    } else {
        (e * chi.ln()).exp()
    }
}

/// `1 - χ^e`.
pub(crate) fn one_minus_chi_pow(chi: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else if chi == 0.0 {
        1.0
    } else {
        -(e * chi.ln()).exp_m1()
    }
}

fn check_chi(chi: f64) -> Result<()> {
    if (0.0..1.0).contains(&chi) {
        Ok(())
    } else {
        Err(Error::ChiOutOfRange { chi })
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidSpec(format!("n = {n} < 2")))
    } else {
        Ok(())
    }
}

/// Derived quantities at the factorizing field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorizationPoint {
    /// `χ = (v_y - v_z)/(v_x - v_z)`.
    pub chi: f64,
    /// `θ = arccos √χ ∈ (0, π/2]`.
    pub theta: f64,
    /// Half-sum of the range weights.
    pub r: f64,
    pub b_s: f64,
    /// Energy of the degenerate separable eigenstates at `b_s`.
    pub e_s: f64,
}

pub fn factorization_point(spec: &ChainSpec) -> Result<FactorizationPoint> {
    let c = spec.couplings();
    if c.vx == c.vz {
        return Err(Error::DegenerateCoupling);
    }
    let chi = (c.vy - c.vz) / (c.vx - c.vz);
    check_chi(chi)?;
    let r = spec.half_range_sum();
    let n = spec.n() as f64;
    Ok(FactorizationPoint {
        chi,
        theta: chi.sqrt().acos(),
        r,
        b_s: r * (c.vx - c.vz) * chi.sqrt(),
        e_s: -0.25 * n * r * (c.vx + c.vy - c.vz),
    })
}

/// Amplitudes of `|θ⟩ = Π_i (cos(θ/2)|↓⟩ + sin(θ/2)|↑⟩)`; bit `i` of the
/// index is site `i`, set meaning up.
pub fn separable_state_amplitudes(theta: f64, n: usize) -> Result<Vec<f64>> {
    if n > MAX_VECTOR_SITES {
        return Err(Error::SizeTooLarge { n, max: MAX_VECTOR_SITES });
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let by_count: Vec<f64> = (0..=n).map(|k| s.powi(k as i32) * c.powi((n - k) as i32)).collect();
    Ok((0..1usize << n).map(|x| by_count[x.count_ones() as usize]).collect())
}

/// `|θ_±⟩ ∝ |θ⟩ ± |-θ⟩`, built directly from the two product states.
pub fn parity_projected_state(theta: f64, n: usize, parity: Parity) -> Result<Vec<f64>> {
    let plus = separable_state_amplitudes(theta, n)?;
    let minus = separable_state_amplitudes(-theta, n)?;
    let sign = parity.sign();
    let mut v: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| a + sign * b).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::ChiOutOfRange { chi: theta.cos().powi(2) });
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

/// `ln C(n, k)` for all `k = 0..=n`.
pub(crate) fn ln_binomials(n: usize) -> Vec<f64> {
    let mut ln_fact = vec![0.0; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    (0..=n).map(|k| ln_fact[n] - ln_fact[k] - ln_fact[n - k]).collect()
}

/// Coefficients of `|θ_±⟩` over the normalized symmetric states
/// `|k⟩ ∝ S_+^k|0⟩`, from the binomial expansion of the parity projection.
/// Valid for any `n` (log-space binomials).
pub fn parity_projected_dicke(chi: f64, n: usize, parity: Parity) -> Result<Vec<f64>> {
    check_chi(chi)?;
    check_n(n)?;
    let theta = chi.sqrt().acos();
    let (ln_s, ln_c) = ((0.5 * theta).sin().ln(), (0.5 * theta).cos().ln());
    let denom = match parity {
        Parity::Even => 1.0 + chi_pow(chi, 0.5 * n as f64),
        Parity::Odd => one_minus_chi_pow(chi, 0.5 * n as f64),
    };
    let ln_binom = ln_binomials(n);
    let wanted = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    Ok((0..=n)
        .map(|k| {
            if k % 2 != wanted {
                return 0.0;
            }
            let ln_amp = 0.5 * ln_binom[k] + k as f64 * ln_s + (n - k) as f64 * ln_c;
            std::f64::consts::SQRT_2 * ln_amp.exp() / denom.sqrt()
        })
        .collect())
}

/// Pair correlators in `|θ_±⟩`, identical for every separation.
pub fn parity_state_correlators(chi: f64, n: usize, parity: Parity) -> Result<PairCorrelators> {
    check_chi(chi)?;
    check_n(n)?;
    let nf = n as f64;
    // γ^ν = (1 ± ν c^{n-2})/(1 ± c^n) with c = √χ.
    let (g_plus, g_minus) = match parity {
        Parity::Even => {
            let d = 1.0 + chi_pow(chi, 0.5 * nf);
            ((1.0 + chi_pow(chi, 0.5 * nf - 1.0)) / d, one_minus_chi_pow(chi, 0.5 * nf - 1.0) / d)
        }
        Parity::Odd => {
            let d = one_minus_chi_pow(chi, 0.5 * nf);
            (one_minus_chi_pow(chi, 0.5 * nf - 1.0) / d, (1.0 + chi_pow(chi, 0.5 * nf - 1.0)) / d)
        }
    };
    let sin2 = 1.0 - chi;
    let alpha_plus = 0.25 * sin2 * g_plus;
    let alpha_minus = 0.25 * sin2 * g_minus;
    let sz = -0.5 * chi.sqrt() * g_plus;
    Ok(PairCorrelators::symmetric(alpha_plus, alpha_minus, 0.25 - alpha_minus, sz))
}

/// Side limits of the ground-state concurrence at `b_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideLimitSet {
    /// `C_+`, reached from above `b_s` (parallel).
    pub plus: f64,
    /// `C_-`, reached from below `b_s` (antiparallel).
    pub minus: f64,
    /// Concurrence of the equal mixture of the two ground states.
    pub zero: f64,
    pub scaled_plus: f64,
    pub scaled_minus: f64,
    pub scaled_zero: f64,
    /// `δ = n(1 - χ)`.
    pub delta: f64,
    /// Magnetization jump `⟨S_z⟩_- - ⟨S_z⟩_+`.
    pub magnetization_jump: f64,
}

/// `C_± = (1-χ) χ^{n/2-1}/(1 ± χ^{n/2})` and the quantities derived from it.
///
/// `χ = 0` is accepted: the concurrences vanish for `n > 2`.
pub fn side_limits(chi: f64, n: usize) -> Result<SideLimitSet> {
    check_chi(chi)?;
    check_n(n)?;
    let nf = n as f64;
    let one_minus = 1.0 - chi;
    let num = one_minus * chi_pow(chi, 0.5 * nf - 1.0);
    let plus = num / (1.0 + chi_pow(chi, 0.5 * nf));
    let minus = num / one_minus_chi_pow(chi, 0.5 * nf);
    let zero = one_minus * chi_pow(chi, nf - 1.0) / one_minus_chi_pow(chi, nf);
    let magnetization_jump = nf * one_minus * chi_pow(chi, 0.5 * (nf - 1.0)) / one_minus_chi_pow(chi, nf);
    Ok(SideLimitSet {
        plus,
        minus,
        zero,
        scaled_plus: nf * plus,
        scaled_minus: nf * minus,
        scaled_zero: nf * zero,
        delta: nf * one_minus,
        magnetization_jump,
    })
}

/// Large-`n` limits at fixed `δ = n(1-χ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledLimits {
    pub delta: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub c_zero: f64,
    pub magnetization_jump: f64,
}

pub fn rescaled_asymptotics(delta: f64) -> Result<RescaledLimits> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::NonPositiveDelta { delta });
    }
    // δ e^{-δ/2}/(1 ± e^{-δ/2}) = δ/(e^{δ/2} ± 1), etc.
    Ok(RescaledLimits {
        delta,
        c_plus: c_plus_limit(delta),
        c_minus: delta / (0.5 * delta).exp_m1(),
        c_zero: delta / delta.exp_m1(),
        magnetization_jump: delta / (2.0 * (0.5 * delta).sinh()),
    })
}

fn c_plus_limit(delta: f64) -> f64 {
    delta / ((0.5 * delta).exp() + 1.0)
}

/// Principal branch of the product logarithm, `w e^w = x`, by Newton
/// iteration. Requires `x ≥ 0`.
pub fn productlog(x: f64) -> f64 {
    assert!(x >= 0.0, "productlog implemented for x >= 0 only");
    let mut w = if x < 1.0 { x } else { x.ln() };
    for _ in 0..200 {
        let ew = w.exp();
        let step = (w * ew - x) / (ew * (w + 1.0));
        w -= step;
        if step.abs() <= 1e-14 * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// Location and height of the maximum of `c_+(δ)`.
///
/// `dc_+/dδ = 0` reduces to `e^{δ/2}(1 - δ/2) + 1 = 0`, solved by bisection
/// on `[2, 4]` where the left side changes sign.
pub fn cplus_maximum() -> (f64, f64) {
    let h = |d: f64| (0.5 * d).exp() * (1.0 - 0.5 * d) + 1.0;
    let (mut lo, mut hi) = (2.0f64, 4.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = 0.5 * (lo + hi);
    (delta, c_plus_limit(delta))
}

/// Concurrence of `q|θ_+⟩⟨θ_+| + (1-q)|θ_-⟩⟨θ_-|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub q: f64,
    /// Weight at which the mixture is separable, `½(1 + χ^{n/2})`.
    pub q_c: f64,
    pub concurrence: ConcurrenceValue,
}

pub fn mixture_concurrence(q: f64, chi: f64, n: usize) -> Result<MixtureSpec> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::WeightOutOfRange { q });
    }
    let limits = side_limits(chi, n)?;
    let q_c = 0.5 * (1.0 + chi_pow(chi, 0.5 * n as f64));
    let value = (1.0 - q / q_c).abs() * limits.minus;
    let kind = if q < q_c { ConcurrenceKind::Antiparallel } else { ConcurrenceKind::Parallel };
    let concurrence = if value < crate::concurrence::ZERO_TOL {
        ConcurrenceValue::ZERO
    } else {
        ConcurrenceValue { value, kind }
    };
    Ok(MixtureSpec { q, q_c, concurrence })
}

/// Schmidt spectrum of `|θ_±⟩` across the cut `(L, n-L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSpectrum {
    pub block: usize,
    pub parity: Parity,
    /// `[p^+, p^-]`.
    pub probabilities: [f64; 2],
    /// Entropy in bits.
    pub entropy: f64,
    /// `2√(p^+ p^-)`.
    pub concurrence: f64,
}

pub fn block_entanglement(chi: f64, n: usize, block: usize, parity: Parity) -> Result<BlockSpectrum> {
    check_chi(chi)?;
    check_n(n)?;
    if block == 0 || block >= n {
        return Err(Error::BlockOutOfRange { l: block, max: n - 1 });
    }
    let (lf, rf, nf) = (block as f64, (n - block) as f64, n as f64);
    let up = |e: f64| 1.0 + chi_pow(chi, 0.5 * e);
    let down = |e: f64| one_minus_chi_pow(chi, 0.5 * e);
    // p^ν = (1 + ν c^L)(1 ± ν c^{n-L}) / (2(1 ± c^n)), c = √χ.
    let probabilities = match parity {
        Parity::Even => {
            let d = 2.0 * up(nf);
            [up(lf) * up(rf) / d, down(lf) * down(rf) / d]
        }
        Parity::Odd => {
            let d = 2.0 * down(nf);
            [up(lf) * down(rf) / d, down(lf) * up(rf) / d]
        }
    };
    let entropy = probabilities.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    let denom = match parity {
        Parity::Even => up(nf),
        Parity::Odd => down(nf),
    };
    let concurrence = (one_minus_chi_pow(chi, lf) * one_minus_chi_pow(chi, rf)).sqrt() / denom;
    Ok(BlockSpectrum { block, parity, probabilities, entropy, concurrence })
}
