//! `∫₀^∞ k(t, r, s) g(s) ds` for Gaussian-type kernels and analytic profiles.
//!
//! Each profile segment is clipped to the window where `e^{-(r-s)²/4t}` has
//! not underflowed, covered by panels no wider than `√t/4` (and finer where
//! the profile or the image factor vary faster), and panels whose log-envelope
//! lies more than [`PRUNE_LOG_MARGIN`] below the segment peak are dropped.
//! Panel sums are combined by pairwise summation, so results are bit-for-bit
//! reproducible.

use super::gauss_legendre::inner_rule;
use super::profile::{RadialProfile, Segment};
use super::sum::pairwise_sum;
use crate::error::require_positive_time;
use crate::special_kernels::{heat_prefactor, DirichletKernelDr, ImageParts, RadialKernel};
use crate::Result;

/// `-ln` of the smallest positive binary64.
const LN_UNDERFLOW: f64 = 745.0;

/// Panels whose envelope is below `e^{-PRUNE_LOG_MARGIN}` times the peak are skipped.
pub const PRUNE_LOG_MARGIN: f64 = 42.0;

/// Panels per `√t`.
const PANELS_PER_SQRT_T: f64 = 4.0;

/// `∫₀^∞ kernel(t, r, s) g(s) ds`.
pub fn integrate_kernel_profile<K: RadialKernel + ?Sized>(
    kernel: &K,
    t: f64,
    r: f64,
    g: &RadialProfile,
) -> Result<f64> {
    require_positive_time(t)?;
    if !(r >= 0.0) {
        return Err(crate::Error::Domain(format!("observation radius must be nonnegative, got {r}")));
    }
    Ok(integrate_unchecked(kernel, t, r, g))
}

pub(crate) fn integrate_unchecked<K: RadialKernel + ?Sized>(
    kernel: &K,
    t: f64,
    r: f64,
    g: &RadialProfile,
) -> f64 {
    let rule = inner_rule();
    let per_segment: Vec<f64> = g
        .segments()
        .iter()
        .map(|seg| {
            let panels = plan_panels(t, r, seg, |s| kernel.log_envelope(t, r, s));
            let sums: Vec<f64> = panels
                .iter()
                .map(|&(a, b)| rule.integrate(a, b, |s| kernel.eval(t, r, s) * seg.form.eval(s)))
                .collect();
            pairwise_sum(&sums)
        })
        .collect();
    pairwise_sum(&per_segment)
}

/// `(v(t, r), ∂_r v(t, r))` for the half-line Dirichlet problem with data `g`,
/// sharing one panel plan and one pair of exponentials per node.
pub(crate) fn dirichlet_pair(t: f64, r: f64, g: &RadialProfile) -> (f64, f64) {
    let rule = inner_rule();
    let envelope = DirichletKernelDr;
    let mut v_segments = Vec::with_capacity(g.segments().len());
    let mut dv_segments = Vec::with_capacity(g.segments().len());
    for seg in g.segments() {
        let panels = plan_panels(t, r, seg, |s| envelope.log_envelope(t, r, s));
        let mut v_panels = Vec::with_capacity(panels.len());
        let mut dv_panels = Vec::with_capacity(panels.len());
        for &(a, b) in &panels {
            let (mut v, mut dv) = (0.0, 0.0);
            for (s, w) in rule.mapped(a, b) {
                let parts = ImageParts::at(t, r, s);
                let gs = seg.form.eval(s) * w;
                v += parts.difference() * gs;
                dv += parts.derivative_numerator(r, s) * gs;
            }
            v_panels.push(v);
            dv_panels.push(dv);
        }
        v_segments.push(pairwise_sum(&v_panels));
        dv_segments.push(pairwise_sum(&dv_panels));
    }
    let c = heat_prefactor(t);
    (
        c * pairwise_sum(&v_segments),
        c * pairwise_sum(&dv_segments) / (2.0 * t),
    )
}

/// Panels covering the part of `seg` where `kernel × form` is not negligible.
///
/// A coarse pass on a `√t/4` grid (plus `r` and the Gaussian centre) finds the
/// runs within [`PRUNE_LOG_MARGIN`] of the peak; only those runs are refined
/// to the local scale of the profile and the image factor, then pruned again.
fn plan_panels(t: f64, r: f64, seg: &Segment, log_envelope: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    if seg.form.is_zero() {
        return Vec::new();
    }
    let reach = 2.0 * (t * LN_UNDERFLOW).sqrt();
    let lo = seg.lo.max(r - reach).max(0.0);
    let hi = seg.hi.min(r + reach);
    if !(lo < hi) {
        return Vec::new();
    }
    let envelope = |s: f64| log_envelope(s) + seg.form.ln_abs(s);
    let base = t.sqrt() / PANELS_PER_SQRT_T;

    let mut coarse = uniform_edges(lo, hi, base);
    let mut special = vec![r];
    if let Some(g) = seg.form.gauss {
        special.push(g.center);
    }
    for x in special {
        if x > lo && x < hi {
            coarse.push(x);
        }
    }
    coarse.sort_by(f64::total_cmp);
    coarse.dedup();

    let image_scale = if r > 0.0 { t / r } else { f64::INFINITY };
    let min_step = (hi - lo) * 1e-9;
    let step = |s: f64| -> f64 {
        let profile = 2.0 * seg.form.local_scale(s);
        let image = 0.5 * (image_scale + s);
        base.min(profile).min(image).max(min_step)
    };

    let mut panels = Vec::new();
    for (a, b) in significant_runs(&coarse, &envelope) {
        let edges = graded_edges(a, b, &step);
        panels.extend(significant_runs(&edges, &envelope).into_iter().flat_map(|(a, b)| {
            edges
                .windows(2)
                .filter(move |w| w[0] >= a && w[1] <= b)
                .map(|w| (w[0], w[1]))
                .collect::<Vec<_>>()
        }));
    }
    panels
}

fn uniform_edges(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
        .collect()
}

fn graded_edges(lo: f64, hi: f64, step: &impl Fn(f64) -> f64) -> Vec<f64> {
    let mut edges = vec![lo];
    let mut s = lo;
    while s < hi {
        let h = step(s);
        let h = h.min(step((s + h).min(hi)));
        let mut next = s + h;
        if next >= hi || hi - next < 0.25 * h {
            next = hi;
        }
        edges.push(next);
        s = next;
    }
    edges
}

/// Maximal runs of consecutive intervals of `edges` whose envelope reaches
/// within [`PRUNE_LOG_MARGIN`] of the peak, each widened by one interval per side.
fn significant_runs(edges: &[f64], envelope: &impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let env: Vec<f64> = edges.iter().map(|&s| envelope(s)).collect();
    let peak = env.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY || edges.len() < 2 {
        return Vec::new();
    }
    let floor = peak - PRUNE_LOG_MARGIN;
    let n = edges.len() - 1;
    let significant: Vec<bool> = (0..n).map(|i| env[i].max(env[i + 1]) >= floor).collect();
    let keep = |i: usize| significant[i] || (i > 0 && significant[i - 1]) || (i + 1 < n && significant[i + 1]);
    let mut runs: Vec<(f64, f64)> = Vec::new();
    for i in (0..n).filter(|&i| keep(i)) {
        match runs.last_mut() {
            Some(last) if last.1 == edges[i] => last.1 = edges[i + 1],
            _ => runs.push((edges[i], edges[i + 1])),
        }
    }
    runs
}
