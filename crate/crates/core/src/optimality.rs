//! The extremal family `f_m = C_m |x|^{-1}` on `m + 1 < |x| <= 2m + 1`, probed at
//! `t_m = m²`, and the pointwise facts behind its lower bound.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::quadrature::{Form, RadialProfile, Segment};
use crate::solver::{data_norm, gradient_norm, lift_initial_data, ExteriorData, SolutionField};
use crate::special_kernels::optimality_kernel_unchecked;
use crate::{Error, Exponent, Result};

/// Allowed deviation of the quadrature norm of `f_m` from 1.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// `c₀ = 2 + √2`: at `t = m²` the sign region starts at `c₀ m`.
pub const SIGN_REGION_CONSTANT: f64 = 2.0 + SQRT_2;

/// Points per axis of the `(r, s)` grid in [`check_kernel_lower_bound`].
pub const KERNEL_GRID: usize = 32;

/// Smallest `m` for which `[10, m^{1/4}]` is a nondegenerate interval.
pub const KERNEL_MIN_M: u64 = 10_001;

/// Decay exponent `μ(p)`: `1/2` for `p <= 3`, `3/(2p)` above, `0` at `p = ∞`.
pub fn mu_exponent(p: f64) -> Result<f64> {
    Ok(mu(Exponent::new(p)?))
}

pub fn mu(p: Exponent) -> f64 {
    let p = p.value();
    if p <= 3.0 {
        0.5
    } else if p.is_infinite() {
        0.0
    } else {
        3.0 / (2.0 * p)
    }
}

fn require_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::Precondition("family index m must be at least 1".into()));
    }
    Ok(())
}

/// `C_m` with `‖C_m |x|^{-1} 1_{m+1<|x|<=2m+1}‖_p = 1`.
pub fn compute_cm(m: u64, p: Exponent) -> Result<f64> {
    require_m(m)?;
    let m = m as f64;
    if p.is_infinite() {
        return Ok(m + 1.0);
    }
    let q = p.value();
    // ln((2m+1)/(m+1)) without cancellation
    let log_ratio = (m / (m + 1.0)).ln_1p();
    let a = 3.0 - q;
    let integral = if a.abs() < 1e-9 {
        log_ratio
    } else {
        (m + 1.0).powf(a) * (a * log_ratio).exp_m1() / a
    };
    Ok((4.0 * PI * integral).powf(-1.0 / q))
}

/// `C_m m^{3/p - 1}`, which tends to a positive limit.
pub fn scaled_cm(m: u64, p: Exponent) -> Result<f64> {
    Ok(compute_cm(m, p)? * (m as f64).powf(3.0 * p.reciprocal() - 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyMember {
    pub m: u64,
    pub t_m: f64,
    pub c_m: f64,
    pub p: Exponent,
    pub data: ExteriorData,
    pub g: RadialProfile,
    /// `‖f_m‖_p` recomputed by quadrature.
    pub quadrature_norm: f64,
}

pub fn build_family_member(m: u64, p: Exponent) -> Result<FamilyMember> {
    let c_m = compute_cm(m, p)?;
    let mf = m as f64;
    let f = RadialProfile::new(vec![Segment::new(mf + 1.0, 2.0 * mf + 1.0, Form::power(c_m, -1.0))])?;
    let data = ExteriorData::new(f, p)?;
    let quadrature_norm = data_norm(&data)?;
    if (quadrature_norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Consistency(format!(
            "‖f_m‖_p = {quadrature_norm:.17e} for m = {m}, p = {p}; expected 1"
        )));
    }
    let g = lift_initial_data(&data);
    Ok(FamilyMember {
        m,
        t_m: mf * mf,
        c_m,
        p,
        data,
        g,
        quadrature_norm,
    })
}

/// One row of an optimality sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalityRecord {
    pub m: u64,
    pub p: Exponent,
    pub t_m: f64,
    pub c_m: f64,
    pub mu: f64,
    pub grad_norm: f64,
    pub q_m: f64,
}

/// `Q_m = t_m^μ ‖∇u_m(t_m)‖_p`.
pub fn certify_qm(member: &FamilyMember) -> Result<OptimalityRecord> {
    if member.data.profile().is_zero() || member.c_m == 0.0 {
        return Err(Error::Precondition(format!("family member m = {} has zero data", member.m)));
    }
    let mu = mu(member.p);
    let grad_norm = gradient_norm(&member.data, member.t_m)?;
    Ok(OptimalityRecord {
        m: member.m,
        p: member.p,
        t_m: member.t_m,
        c_m: member.c_m,
        mu,
        grad_norm,
        q_m: member.t_m.powf(mu) * grad_norm,
    })
}

/// Builds and certifies every `m` in parallel; rows keep the order of `ms`.
pub fn optimality_sweep(p: Exponent, ms: &[u64]) -> Result<Vec<OptimalityRecord>> {
    ms.par_iter()
        .map(|&m| build_family_member(m, p).and_then(|member| certify_qm(&member)))
        .collect()
}

/// `(m, Q_{2m}/Q_m)` for consecutive rows with `m_{k+1} = 2 m_k` and `m_k >= from`.
pub fn stabilization_ratios(records: &[OptimalityRecord], from: u64) -> Vec<(u64, f64)> {
    records
        .windows(2)
        .filter(|w| w[0].m >= from && w[1].m == 2 * w[0].m)
        .map(|w| (w[0].m, w[1].q_m / w[0].q_m))
        .collect()
}

/// First radius of the region where `v_m >= 0` and `∂_r v_m <= 0`: `√(2t) + 2m`.
pub fn sign_region_start(m: u64, t: f64) -> f64 {
    (2.0 * t).sqrt() + 2.0 * m as f64
}

/// Checks `v_m >= -1e-12 C_m` and `∂_r v_m <= 1e-12 C_m` at each sample.
pub fn check_sign_region(member: &FamilyMember, t: f64, samples: &[f64]) -> Result<bool> {
    let start = sign_region_start(member.m, t);
    if let Some(&bad) = samples.iter().find(|&&r| !(r >= start * (1.0 - 1e-15)) || !r.is_finite()) {
        return Err(Error::Precondition(format!(
            "sample r = {bad} lies outside the sign region [{start}, ∞)"
        )));
    }
    let field = SolutionField::new(&member.g, t)?;
    let tol = 1e-12 * member.c_m;
    Ok(samples.par_iter().all(|&r| {
        let (v, dv) = field.pair(r);
        v >= -tol && dv <= tol
    }))
}

/// `n` samples from the start of the sign region out to `start + 8√t`, geometric in the offset.
pub fn sign_region_samples(m: u64, t: f64, n: usize) -> Vec<f64> {
    let start = sign_region_start(m, t);
    let reach = 8.0 * t.sqrt();
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1) as f64;
            start + reach * (64f64.powf(x) - 1.0) / 63.0
        })
        .collect()
}

/// One grid point of the kernel lower-bound check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSample {
    pub r: f64,
    pub s: f64,
    /// `m K(m², r, s)`
    pub scaled: f64,
    /// `e^{-s²/4m²}(s/m² - r/((r+1)m) - r²/(2m³))`
    pub leading_term: f64,
    /// `|K - leading_term| / |K|` divided by the allowance `10 r²/m`.
    pub expansion_ratio: f64,
    /// Same ratio for `e^{-s²/4m²}(s/m² - rs/((r+1)m²) - r²s/(2m⁴))`, the
    /// expansion to first order in `rs/m²`.
    pub consistent_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelBoundRecord {
    pub m: u64,
    pub r_range: (f64, f64),
    pub s_range: (f64, f64),
    pub grid: (usize, usize),
    pub min_scaled: f64,
    pub argmin: (f64, f64),
    pub max_expansion_ratio: f64,
    pub max_consistent_ratio: f64,
    pub samples: Vec<KernelSample>,
}

impl KernelBoundRecord {
    pub fn expansion_within_allowance(&self) -> bool {
        self.max_expansion_ratio <= 1.0
    }
}

/// Evaluates `m K(m², r, s)` on a uniform `32 × 32` grid of
/// `10 <= r <= m^{1/4}`, `m <= s <= 2m`, and compares `K` with its
/// large-`m` expansion.
pub fn check_kernel_lower_bound(m: u64) -> Result<KernelBoundRecord> {
    if m < KERNEL_MIN_M {
        return Err(Error::Precondition(format!(
            "m = {m} is too small: the region 10 <= r <= m^(1/4) needs m >= {KERNEL_MIN_M} (m^(1/4) = {:.4})",
            (m as f64).powf(0.25)
        )));
    }
    let mf = m as f64;
    let t = mf * mf;
    let r_hi = mf.powf(0.25);
    let n = KERNEL_GRID;
    let node = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;

    let samples: Vec<KernelSample> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let r = node(10.0, r_hi, k / n);
            let s = node(mf, 2.0 * mf, k % n);
            let kernel = optimality_kernel_unchecked(t, r, s);
            let damping = (-s * s / (4.0 * t)).exp();
            let leading = damping * (s / t - r / ((r + 1.0) * mf) - r * r / (2.0 * mf * t));
            let consistent = damping * (s / t - r * s / ((r + 1.0) * t) - r * r * s / (2.0 * t * t));
            let allowance = 10.0 * r * r / mf;
            KernelSample {
                r,
                s,
                scaled: mf * kernel,
                leading_term: leading,
                expansion_ratio: ((kernel - leading) / kernel).abs() / allowance,
                consistent_ratio: ((kernel - consistent) / kernel).abs() / allowance,
            }
        })
        .collect();

    let argmin = samples
        .iter()
        .min_by(|a, b| a.scaled.total_cmp(&b.scaled))
        .expect("grid is nonempty");
    let max_of = |f: fn(&KernelSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    Ok(KernelBoundRecord {
        m,
        r_range: (10.0, r_hi),
        s_range: (mf, 2.0 * mf),
        grid: (n, n),
        min_scaled: argmin.scaled,
        argmin: (argmin.r, argmin.s),
        max_expansion_ratio: max_of(|k| k.expansion_ratio),
        max_consistent_ratio: max_of(|k| k.consistent_ratio),
        samples,
    })
}
