//! Weighted `L^p` norms on `(a, b)`, `b` possibly infinite.

use rayon::prelude::*;

use super::gauss_legendre::outer_rule;
use super::profile::Segment;
use super::sum::pairwise_sum;
use crate::{Error, Exponent, Result};

/// Tail mass neglected when truncating a Gaussian-bounded integrand.
const GAUSSIAN_TAIL_EPS: f64 = 1e-40;

/// Relative agreement of successive sup estimates.
const SUP_REL_TOL: f64 = 1e-8;
const SUP_MAX_ROUNDS: usize = 8;

/// Geometric panels used for algebraic tails, each doubling the radius.
const ALGEBRAIC_TAIL_MAX_PANELS: usize = 200;

/// Integration weight `w(r)` in `∫ |f|^p w dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    None,
    /// `(r + 1)^k`
    ShiftedPower(f64),
    /// `r^k`
    VolumePower(f64),
}

impl Weight {
    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        match *self {
            Weight::None => 1.0,
            Weight::ShiftedPower(k) => (r + 1.0).powf(k),
            Weight::VolumePower(k) => r.powf(k),
        }
    }

    fn local_scale(&self, r: f64) -> f64 {
        let polynomial = |k: f64| k >= 0.0 && k.fract() == 0.0;
        match *self {
            Weight::None => f64::INFINITY,
            Weight::ShiftedPower(k) if polynomial(k) => f64::INFINITY,
            Weight::VolumePower(k) if polynomial(k) => f64::INFINITY,
            Weight::ShiftedPower(k) => (r + 1.0) / k.abs().max(1.0),
            Weight::VolumePower(k) => r / k.abs().max(1.0),
        }
    }
}

/// How an integrand behaves beyond the finite part of an infinite domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBound {
    /// `|f(r)| ≲ e^{-(r - center)²/4 time}` for `r > center`.
    Gaussian { center: f64, time: f64 },
    /// Beyond `from` the integrand decays monotonically and at least like `r^{-1-δ}`.
    Algebraic { from: f64 },
}

/// An `L^p` norm request: exponent, weight and domain, plus the tail bound
/// required when the domain is unbounded and an optional evaluation mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec {
    pub p: Exponent,
    pub weight: Weight,
    pub domain: (f64, f64),
    pub tail: Option<TailBound>,
    /// Breakpoints for the finite part; a graded mesh is built when empty.
    pub mesh: Vec<f64>,
    /// Upper bound on panel width for the automatic mesh.
    pub max_panel: Option<f64>,
}

impl NormSpec {
    pub fn new(p: Exponent, a: f64, b: f64) -> Result<Self> {
        if !(a < b) || a.is_nan() || a.is_infinite() {
            return Err(Error::Precondition(format!("norm domain ({a}, {b}) is empty or unbounded below")));
        }
        Ok(NormSpec {
            p,
            weight: Weight::None,
            domain: (a, b),
            tail: None,
            mesh: Vec::new(),
            max_panel: None,
        })
    }

    pub fn with_weight(mut self, weight: Weight) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_tail(mut self, tail: TailBound) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn with_mesh(mut self, mesh: Vec<f64>) -> Self {
        self.mesh = mesh;
        self
    }

    pub fn with_max_panel(mut self, h: f64) -> Self {
        self.max_panel = Some(h);
        self
    }

    /// Right end of the part integrated on the mesh, and whether an
    /// algebraic tail follows it.
    fn finite_end(&self) -> Result<(f64, bool)> {
        let (a, b) = self.domain;
        if b.is_finite() {
            return Ok((b, false));
        }
        match self.tail {
            None => Err(Error::Precondition(
                "an infinite norm domain needs a tail bound".to_string(),
            )),
            Some(TailBound::Gaussian { center, time }) => {
                let r = truncation_radius(time, center.max(a), GAUSSIAN_TAIL_EPS)?;
                Ok((r.max(a + f64::EPSILON.max(a.abs() * 1e-12)), false))
            }
            Some(TailBound::Algebraic { from }) => Ok((from.max(a) + 1.0, true)),
        }
    }
}

/// Radius beyond which a heat kernel at time `t` centred at `center` carries
/// tail mass below `eps`: `center + 2√(t ln(1/eps)) + 2√t`.
pub fn truncation_radius(t: f64, center: f64, eps: f64) -> Result<f64> {
    crate::error::require_positive_time(t)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("tail mass must lie in (0, 1), got {eps}")));
    }
    Ok(center + 2.0 * (t * (1.0 / eps).ln()).sqrt() + 2.0 * t.sqrt())
}

/// `(∫_a^b |f|^p w)^{1/p}`, or the supremum of `|f|` when `p = ∞`.
pub fn lp_norm<F>(f: F, spec: &NormSpec) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let (a, _) = spec.domain;
    let (end, algebraic) = spec.finite_end()?;
    let mesh = build_mesh(spec, a, end);

    if spec.p.is_infinite() {
        return Ok(sup_abs_on_grid(&f, &mesh));
    }
    let p = spec.p.value();

    let mut values: Vec<f64> = mesh.par_iter().map(|&x| f(x)).collect();
    let mut mesh = mesh;
    if !spec.p.is_even_integer() {
        split_at_sign_changes(&f, &mut mesh, &mut values);
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let rule = outer_rule();
    let integrand = |x: f64| (f(x).abs() / scale).powf(p) * spec.weight.at(x);
    let panels: Vec<f64> = mesh
        .par_windows(2)
        .map(|w| rule.integrate(w[0], w[1], &integrand))
        .collect();
    let mut total = pairwise_sum(&panels);

    if algebraic {
        total += algebraic_tail(&integrand, end);
    }
    if !total.is_finite() {
        return Err(Error::Consistency(format!("L^{p} integral is not finite")));
    }
    Ok(scale * total.powf(1.0 / p))
}

/// `∫_{from}^∞` over panels `[from 2^j, from 2^{j+1}]`, stopping once the
/// contributions are negligible and shrinking.
fn algebraic_tail(integrand: &(impl Fn(f64) -> f64 + Sync), from: f64) -> f64 {
    let rule = outer_rule();
    let from = from.max(1.0);
    let mut contributions = Vec::new();
    let mut quiet = 0;
    for j in 0..ALGEBRAIC_TAIL_MAX_PANELS {
        let lo = from * 2f64.powi(j as i32);
        let hi = 2.0 * lo;
        let c = rule.integrate(lo, hi, integrand);
        let running = pairwise_sum(&contributions);
        let shrinking = contributions.last().is_some_and(|&last: &f64| c.abs() <= last.abs());
        contributions.push(c);
        if shrinking && c.abs() <= 1e-18 * running.abs().max(f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    pairwise_sum(&contributions)
}

fn build_mesh(spec: &NormSpec, a: f64, b: f64) -> Vec<f64> {
    let mut mesh: Vec<f64> = if spec.mesh.is_empty() {
        let max_panel = spec.max_panel.unwrap_or((b - a) / 32.0);
        graded_mesh(a, b, |x| max_panel.min(0.25 * spec.weight.local_scale(x)))
    } else {
        let mut m: Vec<f64> = spec.mesh.iter().copied().filter(|&x| x > a && x < b).collect();
        m.push(a);
        m.push(b);
        m
    };
    mesh.sort_by(|x, y| x.partial_cmp(y).expect("finite mesh"));
    mesh.dedup();
    if let Some(h) = spec.max_panel {
        mesh = subdivide(&mesh, h);
    }
    mesh
}

/// Breakpoints from `a` to `b` with local width at most `width(x)`.
pub(crate) fn graded_mesh(a: f64, b: f64, width: impl Fn(f64) -> f64) -> Vec<f64> {
    let floor = (b - a) * 1e-9;
    let mut mesh = vec![a];
    let mut x = a;
    while x < b {
        let h = width(x).max(floor);
        let h = h.min(width((x + h).min(b)).max(floor));
        let mut next = x + h;
        if next >= b || b - next < 0.25 * h {
            next = b;
        }
        mesh.push(next);
        x = next;
    }
    mesh
}

fn subdivide(mesh: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![mesh[0]];
    for w in mesh.windows(2) {
        let pieces = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            out.push(if k == pieces {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * k as f64 / pieces as f64
            });
        }
    }
    out
}

/// Inserts the zeros of `f` found between consecutive mesh values of opposite sign.
fn split_at_sign_changes<F: Fn(f64) -> f64 + Sync>(f: &F, mesh: &mut Vec<f64>, values: &mut Vec<f64>) {
    let brackets: Vec<usize> = (0..mesh.len() - 1)
        .filter(|&i| values[i] * values[i + 1] < 0.0)
        .collect();
    if brackets.is_empty() {
        return;
    }
    let roots: Vec<(usize, f64)> = brackets
        .par_iter()
        .map(|&i| (i, bracketed_root(f, mesh[i], mesh[i + 1], values[i], values[i + 1])))
        .collect();
    for (shift, (i, root)) in roots.into_iter().enumerate() {
        let at = i + 1 + shift;
        mesh.insert(at, root);
        values.insert(at, 0.0);
    }
}

/// Illinois false position on a sign-changing bracket.
fn bracketed_root<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
    }
    0.5 * (a + b)
}

/// `sup |f|` over `[mesh[0], mesh[last]]`: the grid maximum is polished by a
/// golden-section search in its neighbourhood, then the grid is halved until
/// two successive estimates agree to [`SUP_REL_TOL`].
pub(crate) fn sup_abs_on_grid<F: Fn(f64) -> f64 + Sync>(f: &F, mesh: &[f64]) -> f64 {
    let mut grid = mesh.to_vec();
    let mut values: Vec<f64> = grid.par_iter().map(|&x| f(x).abs()).collect();
    let mut estimate = polish_max(f, &grid, &values);
    for _ in 0..SUP_MAX_ROUNDS {
        let mids: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let mid_values: Vec<f64> = mids.par_iter().map(|&x| f(x).abs()).collect();
        let mut next_grid = Vec::with_capacity(grid.len() + mids.len());
        let mut next_values = Vec::with_capacity(grid.len() + mids.len());
        for i in 0..mids.len() {
            next_grid.push(grid[i]);
            next_values.push(values[i]);
            next_grid.push(mids[i]);
            next_values.push(mid_values[i]);
        }
        next_grid.push(grid[grid.len() - 1]);
        next_values.push(values[values.len() - 1]);
        grid = next_grid;
        values = next_values;
        let refined = polish_max(f, &grid, &values);
        let converged = (refined - estimate).abs() <= SUP_REL_TOL * refined.abs();
        estimate = refined;
        if converged {
            break;
        }
    }
    estimate
}

fn polish_max<F: Fn(f64) -> f64>(f: &F, grid: &[f64], values: &[f64]) -> f64 {
    let (best, &best_value) = values
        .iter()
        .enumerate()
        .fold((0, &values[0]), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    if best_value == 0.0 {
        return 0.0;
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    golden_max(|x| f(x).abs(), lo, hi).max(best_value)
}

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..100 {
        if (b - a).abs() <= 1e-13 * (a.abs() + b.abs()).max(1e-12) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    gc.max(gd)
}

/// `sup |form|` over the closed segment (the tail of an unbounded segment is
/// scanned until its Gaussian or algebraic decay has set in).
pub(crate) fn segment_sup_abs(seg: &Segment) -> f64 {
    if seg.form.is_zero() {
        return 0.0;
    }
    let hi = if seg.is_unbounded() {
        let mut reach = seg.lo.abs().max(1.0) * 64.0;
        if let Some(g) = seg.form.gauss {
            if g.rate > 0.0 {
                reach = reach.max(g.center + 40.0 / g.rate.sqrt());
            }
        }
        seg.lo + reach
    } else {
        seg.hi
    };
    let mesh = graded_mesh(seg.lo, hi, |x| {
        ((hi - seg.lo) / 256.0).min(0.25 * seg.form.local_scale(x))
    });
    sup_abs_on_grid(&|x| seg.form.eval(x), &mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn trivial_norms() {
        let spec = NormSpec::new(Exponent::TWO, 0.0, 1.0).unwrap();
        assert_eq!(lp_norm(|_| 0.0, &spec).unwrap(), 0.0);
        assert_relative_eq!(lp_norm(|_| 1.0, &spec).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn gaussian_l1_on_half_line() {
        let spec = NormSpec::new(Exponent::ONE, 0.0, f64::INFINITY)
            .unwrap()
            .with_tail(TailBound::Gaussian { center: 0.0, time: 0.25 });
        let got = lp_norm(|r| (-r * r).exp(), &spec).unwrap();
        assert_relative_eq!(got, PI.sqrt() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn infinite_domain_without_tail_is_rejected() {
        let spec = NormSpec::new(Exponent::ONE, 0.0, f64::INFINITY).unwrap();
        assert!(matches!(lp_norm(|r| (-r).exp(), &spec), Err(Error::Precondition(_))));
        assert!(NormSpec::new(Exponent::ONE, 2.0, 1.0).is_err());
    }

    #[test]
    fn algebraic_tail_with_volume_weight() {
        // ∫_1^∞ r^{-4} r² dr = 1
        let spec = NormSpec::new(Exponent::ONE, 1.0, f64::INFINITY)
            .unwrap()
            .with_weight(Weight::VolumePower(2.0))
            .with_tail(TailBound::Algebraic { from: 1.0 });
        assert_relative_eq!(lp_norm(|r| r.powi(-4), &spec).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn kinks_at_zeros_are_integrated_exactly() {
        // ∫_0^{2π} |sin| = 4, and the L^3 norm of sin on (0, 2π) is (8/3)^{1/3}
        let spec = NormSpec::new(Exponent::ONE, 0.0, 2.0 * PI).unwrap();
        assert_relative_eq!(lp_norm(f64::sin, &spec).unwrap(), 4.0, max_relative = 1e-13);
        let spec = NormSpec::new(Exponent::new(3.0).unwrap(), 0.0, 2.0 * PI).unwrap();
        assert_relative_eq!(
            lp_norm(f64::sin, &spec).unwrap(),
            (8.0f64 / 3.0).cbrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn sup_norm() {
        let spec = NormSpec::new(Exponent::INFINITY, 0.0, 10.0).unwrap();
        let got = lp_norm(|r| r * (-r * r / 4.0).exp(), &spec).unwrap();
        assert_relative_eq!(got, 2f64.sqrt() * (-0.5f64).exp(), max_relative = 1e-12);
        // maximum at the left end
        let got = lp_norm(|r| (-r).exp(), &spec).unwrap();
        assert_eq!(got, 1.0);
    }

    #[test]
    fn truncation_radius_examples() {
        let r = truncation_radius(1.0, 0.0, (-25.0f64).exp()).unwrap();
        assert!(r >= 10.0);
        assert!(truncation_radius(1.0, 0.0, 1.0).is_err());
        assert!(truncation_radius(-1.0, 0.0, 0.5).is_err());
    }
}
