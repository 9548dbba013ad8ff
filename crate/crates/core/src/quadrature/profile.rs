use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A factor `(r + shift)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFactor {
    pub shift: f64,
    pub exponent: f64,
}

/// A factor `e^{-rate (r - center)²}` with `rate >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussFactor {
    pub rate: f64,
    #[serde(default)]
    pub center: f64,
}

/// An analytic piece `coeff · Π (r + σ_i)^{α_i} · e^{-γ (r - c)²}`.
///
/// Constants, powers `c r^α` and Gaussian-type terms `c r^β e^{-γ r²}` are the
/// special cases; shifts make the pull-back `r ↦ (r + 1) F(r + 1)` closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Form {
    pub coeff: f64,
    #[serde(default)]
    pub powers: Vec<PowerFactor>,
    #[serde(default)]
    pub gauss: Option<GaussFactor>,
}

impl Form {
    pub fn constant(c: f64) -> Self {
        Form {
            coeff: c,
            powers: Vec::new(),
            gauss: None,
        }
    }

    /// `c · r^α`
    pub fn power(c: f64, alpha: f64) -> Self {
        Form::constant(c).times_power(0.0, alpha)
    }

    /// `c · r^β · e^{-γ r²}`
    pub fn gaussian(c: f64, beta: f64, gamma: f64) -> Self {
        let mut form = Form::power(c, beta);
        form.gauss = Some(GaussFactor {
            rate: gamma,
            center: 0.0,
        });
        form
    }

    /// Multiplies by `(r + shift)^exponent`, merging factors with equal shift.
    pub fn times_power(mut self, shift: f64, exponent: f64) -> Self {
        match self.powers.iter_mut().find(|f| f.shift == shift) {
            Some(f) => f.exponent += exponent,
            None => self.powers.push(PowerFactor { shift, exponent }),
        }
        self.powers.retain(|f| f.exponent != 0.0);
        self.powers
            .sort_by(|a, b| a.shift.partial_cmp(&b.shift).expect("finite shifts"));
        self
    }

    /// The form `r ↦ self(r + by)`.
    pub fn shifted(mut self, by: f64) -> Self {
        for f in &mut self.powers {
            f.shift += by;
        }
        if let Some(g) = &mut self.gauss {
            g.center -= by;
        }
        self
    }

    pub fn scaled(mut self, k: f64) -> Self {
        self.coeff *= k;
        self
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let mut value = self.coeff;
        for f in &self.powers {
            value *= power(r + f.shift, f.exponent);
        }
        if let Some(g) = &self.gauss {
            let d = r - g.center;
            value *= (-g.rate * d * d).exp();
        }
        value
    }

    /// `ln |self(r)|`, `-∞` at zeros.
    pub fn ln_abs(&self, r: f64) -> f64 {
        if self.coeff == 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut value = self.coeff.abs().ln();
        for f in &self.powers {
            value += f.exponent * (r + f.shift).ln();
        }
        if let Some(g) = &self.gauss {
            let d = r - g.center;
            value -= g.rate * d * d;
        }
        if value.is_nan() {
            f64::NEG_INFINITY
        } else {
            value
        }
    }

    /// Length over which the form is well approximated by a low-degree
    /// polynomial near `r`; `∞` when the form is itself a polynomial.
    pub fn local_scale(&self, r: f64) -> f64 {
        let mut scale = f64::INFINITY;
        for f in &self.powers {
            let polynomial = f.exponent >= 0.0 && f.exponent.fract() == 0.0 && f.exponent <= 8.0;
            if !polynomial {
                scale = scale.min((r + f.shift).max(0.0) / f.exponent.abs().max(1.0));
            }
        }
        if let Some(g) = &self.gauss {
            if g.rate > 0.0 {
                let slope = 2.0 * g.rate * (r - g.center).abs();
                scale = scale.min(1.0 / slope.max((2.0 * g.rate).sqrt()));
            }
        }
        scale
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0.0
    }

    fn decays_integrably(&self) -> bool {
        let gaussian = self.gauss.is_some_and(|g| g.rate > 0.0);
        let total_power: f64 = self.powers.iter().map(|f| f.exponent).sum();
        gaussian || total_power < -1.0 || self.is_zero()
    }
}

#[inline]
fn power(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

/// One piece of a profile, supported on the half-open interval `(lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    #[serde(flatten)]
    pub form: Form,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, form: Form) -> Self {
        Segment { lo, hi, form }
    }

    pub fn is_unbounded(&self) -> bool {
        self.hi.is_infinite()
    }
}

/// A radial function on a half-line given by ordered, disjoint analytic pieces;
/// zero outside the union of the pieces.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RadialProfile {
    segments: Vec<Segment>,
}

impl RadialProfile {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for (i, seg) in segments.iter().enumerate() {
            if !seg.lo.is_finite() || !(seg.lo < seg.hi) {
                return Err(Error::Precondition(format!(
                    "segment {i} has an invalid interval ({}, {}]",
                    seg.lo, seg.hi
                )));
            }
            if !seg.form.coeff.is_finite() {
                return Err(Error::Precondition(format!("segment {i} has a non-finite coefficient")));
            }
            if seg.form.gauss.is_some_and(|g| !(g.rate >= 0.0)) {
                return Err(Error::Precondition(format!("segment {i} has a negative Gaussian rate")));
            }
            for f in &seg.form.powers {
                let base = seg.lo + f.shift;
                if base < 0.0 || (base == 0.0 && f.exponent <= -1.0) {
                    return Err(Error::Precondition(format!(
                        "segment {i}: factor (r + {})^{} is not integrable on ({}, {}]",
                        f.shift, f.exponent, seg.lo, seg.hi
                    )));
                }
            }
            if let Some(next) = segments.get(i + 1) {
                if seg.hi > next.lo {
                    return Err(Error::Precondition(format!(
                        "segments {i} and {} overlap or are out of order",
                        i + 1
                    )));
                }
            }
            if seg.is_unbounded() && !seg.form.decays_integrably() {
                return Err(Error::Precondition(format!(
                    "segment {i} extends to infinity without Gaussian or r^(<-1) decay"
                )));
            }
        }
        Ok(RadialProfile { segments })
    }

    /// The zero profile.
    pub fn zero() -> Self {
        RadialProfile::default()
    }

    /// `value` on `(lo, hi]`.
    pub fn indicator(lo: f64, hi: f64, value: f64) -> Result<Self> {
        RadialProfile::new(vec![Segment::new(lo, hi, Form::constant(value))])
    }

    /// Piecewise constant: `values[i]` on `(edges[i], edges[i + 1]]`.
    pub fn piecewise_constant(edges: &[f64], values: &[f64]) -> Result<Self> {
        if edges.len() != values.len() + 1 {
            return Err(Error::Precondition(format!(
                "{} edges cannot bound {} cells",
                edges.len(),
                values.len()
            )));
        }
        let segments = edges
            .windows(2)
            .zip(values)
            .map(|(w, &v)| Segment::new(w[0], w[1], Form::constant(v)))
            .collect();
        RadialProfile::new(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|s| s.form.is_zero())
    }

    pub fn support_min(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.lo)
    }

    pub fn support_max(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.hi)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let idx = self.segments.partition_point(|s| s.hi < r);
        match self.segments.get(idx) {
            Some(seg) if seg.lo < r => seg.form.eval(r),
            _ => 0.0,
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        RadialProfile {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(s.lo, s.hi, s.form.clone().scaled(k)))
                .collect(),
        }
    }

    /// Applies `f` to every segment; the caller guarantees the result is valid.
    pub(crate) fn map_segments(&self, f: impl Fn(&Segment) -> Segment) -> Result<Self> {
        RadialProfile::new(self.segments.iter().map(f).collect())
    }

    /// `sup |g|` over the support, segment endpoints included (the supremum of
    /// a half-open piece is attained in the limit).
    pub fn sup_abs(&self) -> f64 {
        self.segments
            .iter()
            .map(super::norm::segment_sup_abs)
            .fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for RadialProfile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            segments: Vec<Segment>,
        }
        let raw = Raw::deserialize(deserializer)?;
        RadialProfile::new(raw.segments).map_err(serde::de::Error::custom)
    }
}
