//! Radial Dirichlet problem outside the unit ball in R³.
//!
//! For `f(x) = F(|x|)` the function `v(t, r) = (r + 1) U(t, r + 1)` solves the
//! half-line heat equation with `v(t, 0) = 0` and `v(0, r) = g(r) = (r + 1) F(r + 1)`,
//! so `v` and `∂_r v` are image-kernel integrals of `g`. Since
//! `u(t, x) = r^{-1} v(t, r - 1)`,
//!
//! `‖∇u(t)‖_{L^p(Ω)} = (4π)^{1/p} ‖-(r+1)^{-2+2/p} v(t) + (r+1)^{-1+2/p} ∂_r v(t)‖_{L^p(0,∞)}`,
//!
//! which is the production path; [`gradient_norm_direct`] integrates
//! `|∂_ρ U|^p ρ²` over `ρ > 1` instead and serves as a cross-check.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::require_positive_time;
use crate::quadrature::{
    dirichlet_pair, graded_mesh, lp_norm, truncation_radius, Form, NormSpec, RadialProfile, Segment,
    TailBound, Weight, PRUNE_LOG_MARGIN,
};
use crate::{Error, Exponent, Result};

/// Tail mass allowed when truncating the outer integral of a field with a Gaussian tail.
const FIELD_TAIL_EPS: f64 = 1e-40;

/// Radial initial data `f(x) = F(|x|)` on `|x| > 1` together with the norm exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExteriorData {
    profile: RadialProfile,
    p: Exponent,
}

impl ExteriorData {
    pub fn new(profile: RadialProfile, p: Exponent) -> Result<Self> {
        if profile.support_min() < 1.0 && !profile.segments().is_empty() {
            return Err(Error::Precondition(format!(
                "exterior data must be supported in (1, ∞), got support starting at {}",
                profile.support_min()
            )));
        }
        Ok(ExteriorData { profile, p })
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn with_p(&self, p: Exponent) -> Self {
        ExteriorData {
            profile: self.profile.clone(),
            p,
        }
    }

    /// The same data scaled so that `‖f‖_{L^p(Ω)} = 1` (zero data is returned unchanged).
    pub fn normalized(&self) -> Result<Self> {
        let norm = data_norm(self)?;
        if norm == 0.0 {
            return Ok(self.clone());
        }
        Ok(ExteriorData {
            profile: self.profile.scaled(1.0 / norm),
            p: self.p,
        })
    }
}

/// `g(r) = (r + 1) F(r + 1)`: every piece moves one unit towards the origin.
pub fn lift_initial_data(data: &ExteriorData) -> RadialProfile {
    data.profile
        .map_segments(|seg| {
            Segment::new(
                seg.lo - 1.0,
                seg.hi - 1.0,
                seg.form.clone().shifted(1.0).times_power(1.0, 1.0),
            )
        })
        .expect("lifting preserves the segment invariants")
}

/// Inverse of [`lift_initial_data`]: `F(r) = g(r - 1) / r` on `(1, ∞)`.
pub fn pull_back(g: &RadialProfile, p: Exponent) -> Result<ExteriorData> {
    let profile = g.map_segments(|seg| {
        Segment::new(
            seg.lo + 1.0,
            seg.hi + 1.0,
            seg.form.clone().shifted(-1.0).times_power(0.0, -1.0),
        )
    })?;
    ExteriorData::new(profile, p)
}

/// `v(t, ·)` and `∂_r v(t, ·)` for fixed `t`, evaluated lazily by quadrature.
#[derive(Debug, Clone)]
pub struct SolutionField {
    t: f64,
    g: RadialProfile,
    tail: TailBound,
}

impl SolutionField {
    pub fn new(g: &RadialProfile, t: f64) -> Result<Self> {
        require_positive_time(t)?;
        Ok(SolutionField {
            t,
            g: g.clone(),
            tail: field_tail(g, t),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn data(&self) -> &RadialProfile {
        &self.g
    }

    /// How `v(t, ·)` decays at infinity; carried into every outer norm.
    pub fn tail(&self) -> TailBound {
        self.tail
    }

    pub fn v(&self, r: f64) -> f64 {
        self.pair(r).0
    }

    pub fn dv(&self, r: f64) -> f64 {
        self.pair(r).1
    }

    /// `(v(t, r), ∂_r v(t, r))`
    pub fn pair(&self, r: f64) -> (f64, f64) {
        dirichlet_pair(self.t, r.max(0.0), &self.g)
    }

    /// `∂_ρ U(t, ρ)` at `ρ = r + 1`, i.e. `-(r+1)^{-2} v + (r+1)^{-1} ∂_r v`.
    pub fn radial_gradient(&self, r: f64) -> f64 {
        let (v, dv) = self.pair(r);
        let rho = r + 1.0;
        (-v / rho + dv) / rho
    }

    /// Integrand of the `L^p(0, ∞)` norm in the rewritten gradient identity:
    /// `-(r+1)^{-2+2/p} v + (r+1)^{-1+2/p} ∂_r v`.
    pub fn gradient_density(&self, r: f64, p: Exponent) -> f64 {
        let (v, dv) = self.pair(r);
        let rho = r + 1.0;
        let q = 2.0 * p.reciprocal();
        -rho.powf(-2.0 + q) * v + rho.powf(-1.0 + q) * dv
    }

    /// Right end of the meshed part of `(0, ∞)`.
    fn mesh_end(&self) -> f64 {
        match self.tail {
            TailBound::Gaussian { center, time } => {
                truncation_radius(time, center, FIELD_TAIL_EPS).expect("positive time")
            }
            TailBound::Algebraic { from } => from,
        }
    }

    /// Evaluation grid for outer norms. Panels are at most `(r + 1)/4` wide
    /// and `√t/4` within `2√(42 t)` of `r = 0` and of every breakpoint of `g`,
    /// where the boundary layer and the smoothed jumps live. Elsewhere `v(t, ·)`
    /// is at least as smooth as `g`, so the local scale of `g` is enough.
    pub fn mesh(&self) -> Vec<f64> {
        let h = self.t.sqrt() / 4.0;
        let layer = 2.0 * (PRUNE_LOG_MARGIN * self.t).sqrt();
        let mut features = vec![0.0];
        for seg in self.g.segments() {
            features.push(seg.lo);
            if !seg.is_unbounded() {
                features.push(seg.hi);
            }
        }
        let segments = self.g.segments();
        let width = |r: f64| {
            let near_feature = features.iter().any(|&e| (r - e).abs() <= layer);
            let smooth = if near_feature {
                h
            } else {
                match segments.iter().find(|seg| r > seg.lo && r <= seg.hi) {
                    Some(seg) => h.max(seg.form.local_scale(r)),
                    None => h.max(layer / 4.0),
                }
            };
            smooth.min(0.25 * (r + 1.0))
        };
        graded_mesh(0.0, self.mesh_end(), width)
    }

    fn outer_spec(&self, p: Exponent) -> Result<NormSpec> {
        Ok(NormSpec::new(p, 0.0, f64::INFINITY)?
            .with_tail(self.tail)
            .with_mesh(self.mesh()))
    }
}

fn field_tail(g: &RadialProfile, t: f64) -> TailBound {
    let Some(last) = g.segments().last() else {
        return TailBound::Gaussian { center: 0.0, time: t };
    };
    if !last.is_unbounded() {
        return TailBound::Gaussian {
            center: last.hi,
            time: t,
        };
    }
    match last.form.gauss {
        Some(gf) if gf.rate > 0.0 => {
            let polynomial_degree: f64 = last.form.powers.iter().map(|f| f.exponent.max(0.0)).sum();
            let spread = t + 1.0 / (4.0 * gf.rate);
            TailBound::Gaussian {
                center: gf.center.max(last.lo) + polynomial_degree * spread.sqrt(),
                time: spread,
            }
        }
        _ => TailBound::Algebraic {
            from: last.lo.max(1.0) + 2.0 * (t * (1.0 / FIELD_TAIL_EPS).ln()).sqrt() + 10.0,
        },
    }
}

/// `v(t, r)` for half-line data `g`.
pub fn evaluate_v(g: &RadialProfile, t: f64, r: f64) -> Result<f64> {
    require_positive_time(t)?;
    check_radius(r)?;
    Ok(dirichlet_pair(t, r, g).0)
}

/// `∂_r v(t, r)` for half-line data `g`.
pub fn evaluate_dv(g: &RadialProfile, t: f64, r: f64) -> Result<f64> {
    require_positive_time(t)?;
    check_radius(r)?;
    Ok(dirichlet_pair(t, r, g).1)
}

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be finite and nonnegative, got {r}")))
    }
}

fn four_pi_factor(p: Exponent) -> f64 {
    (4.0 * PI).powf(p.reciprocal())
}

/// `‖∇u(t)‖_{L^p(Ω)}` through the rewritten half-line identity.
pub fn gradient_norm(data: &ExteriorData, t: f64) -> Result<f64> {
    let field = SolutionField::new(&lift_initial_data(data), t)?;
    gradient_norm_of_field(&field, data.p)
}

pub(crate) fn gradient_norm_of_field(field: &SolutionField, p: Exponent) -> Result<f64> {
    if field.data().is_zero() {
        return Ok(0.0);
    }
    let spec = field.outer_spec(p)?;
    Ok(four_pi_factor(p) * lp_norm(|r| field.gradient_density(r, p), &spec)?)
}

/// `‖∇u(t)‖_{L^p(Ω)} = (4π)^{1/p} (∫_1^∞ |∂_ρ U|^p ρ² dρ)^{1/p}` evaluated in the
/// original radial variable, on a finer mesh than the production path.
pub fn gradient_norm_direct(data: &ExteriorData, t: f64) -> Result<f64> {
    let field = SolutionField::new(&lift_initial_data(data), t)?;
    if field.data().is_zero() {
        return Ok(0.0);
    }
    let p = data.p;
    let tail = match field.tail {
        TailBound::Gaussian { center, time } => TailBound::Gaussian {
            center: center + 1.0,
            time,
        },
        TailBound::Algebraic { from } => TailBound::Algebraic { from: from + 1.0 },
    };
    let mesh: Vec<f64> = field.mesh().iter().map(|r| r + 1.0).collect();
    let spec = NormSpec::new(p, 1.0, f64::INFINITY)?
        .with_weight(Weight::VolumePower(2.0))
        .with_tail(tail)
        .with_mesh(mesh)
        .with_max_panel(field.t.sqrt() / 5.0);
    let du = |rho: f64| {
        let (v, dv) = field.pair(rho - 1.0);
        -v / (rho * rho) + dv / rho
    };
    Ok(four_pi_factor(p) * lp_norm(du, &spec)?)
}

/// `‖u(t)‖_{L^∞(Ω)} = sup_{ρ>1} |v(t, ρ-1)/ρ|`.
pub fn solution_sup_norm(data: &ExteriorData, t: f64) -> Result<f64> {
    let field = SolutionField::new(&lift_initial_data(data), t)?;
    if field.data().is_zero() {
        return Ok(0.0);
    }
    let spec = field.outer_spec(Exponent::INFINITY)?;
    lp_norm(|r| field.v(r) / (r + 1.0), &spec)
}

/// `‖v(t)‖_{L^p(0, ∞)}` for half-line data.
pub fn half_line_norm(g: &RadialProfile, t: f64, p: Exponent) -> Result<f64> {
    let field = SolutionField::new(g, t)?;
    if g.is_zero() {
        return Ok(0.0);
    }
    lp_norm(|r| field.v(r), &field.outer_spec(p)?)
}

/// `‖f‖_{L^p(Ω)} = (4π ∫_1^∞ |F|^p r² dr)^{1/p}`, or `sup |F|` for `p = ∞`.
pub fn data_norm(data: &ExteriorData) -> Result<f64> {
    let p = data.p;
    let mut pieces = Vec::with_capacity(data.profile.segments().len());
    for seg in data.profile.segments() {
        if seg.form.is_zero() {
            continue;
        }
        let mut spec = NormSpec::new(p, seg.lo, seg.hi)?
            .with_weight(Weight::VolumePower(2.0))
            .with_max_panel(segment_panel(seg));
        if seg.is_unbounded() {
            spec = spec.with_tail(segment_tail(seg));
        }
        let form: &Form = &seg.form;
        pieces.push(lp_norm(|r| form.eval(r), &spec)?);
    }
    if p.is_infinite() {
        return Ok(pieces.into_iter().fold(0.0, f64::max));
    }
    let q = p.value();
    let total: f64 = pieces.iter().map(|n| n.powf(q)).sum();
    Ok((4.0 * PI * total).powf(1.0 / q))
}

fn segment_panel(seg: &Segment) -> f64 {
    let width = if seg.is_unbounded() { seg.lo.max(1.0) } else { seg.hi - seg.lo };
    let gauss = seg
        .form
        .gauss
        .filter(|g| g.rate > 0.0)
        .map_or(f64::INFINITY, |g| 0.25 / g.rate.sqrt());
    (width / 16.0).min(gauss)
}

fn segment_tail(seg: &Segment) -> TailBound {
    match seg.form.gauss {
        Some(g) if g.rate > 0.0 => {
            let time = 1.0 / (4.0 * g.rate);
            let degree: f64 = seg.form.powers.iter().map(|f| f.exponent.max(0.0)).sum();
            TailBound::Gaussian {
                center: g.center.max(seg.lo) + degree * time.sqrt(),
                time,
            }
        }
        _ => TailBound::Algebraic { from: seg.lo },
    }
}
