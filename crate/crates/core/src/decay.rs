//! Log-log regression of decay sweeps and the upper-bound and smoothing checks.

use rayon::prelude::*;
use serde::Serialize;

use crate::optimality::mu;
use crate::solver::{data_norm, gradient_norm, solution_sup_norm, ExteriorData};
use crate::{Error, Exponent, Result};

/// Default large-time fitting window.
pub const LARGE_T_WINDOW: (f64, f64) = (1e2, 1e4);

/// Largest slope excess over `-μ` accepted by [`check_upper_bound`].
pub const SLOPE_SLACK: f64 = 0.05;

pub const POINTS_PER_DECADE: usize = 16;

/// Geometric grid from `t_lo` to `t_hi` with `per_decade` points per factor of ten;
/// both endpoints are included exactly.
pub fn time_grid(t_lo: f64, t_hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_lo > 0.0 && t_hi > t_lo && t_hi.is_finite()) || per_decade == 0 {
        return Err(Error::Domain(format!(
            "time grid needs 0 < t_lo < t_hi < ∞ and a positive density, got [{t_lo}, {t_hi}], {per_decade}"
        )));
    }
    let decades = (t_hi / t_lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| t_lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect();
    grid[0] = t_lo;
    grid[n] = t_hi;
    Ok(grid)
}

/// Samples `(t, value)` of a decaying quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySweep {
    points: Vec<(f64, f64)>,
    p: Exponent,
    label: String,
}

impl DecaySweep {
    pub fn new(points: Vec<(f64, f64)>, p: Exponent, label: impl Into<String>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::Precondition(format!(
                "a decay sweep needs at least 4 points, got {}",
                points.len()
            )));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Precondition("sweep times must be strictly increasing".into()));
        }
        if let Some(&(t, v)) = points.iter().find(|&&(t, v)| !(t > 0.0 && v > 0.0 && v.is_finite())) {
            return Err(Error::Precondition(format!(
                "sweep points need t > 0 and finite positive values, got ({t}, {v})"
            )));
        }
        Ok(DecaySweep {
            points,
            p,
            label: label.into(),
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// Range of the times actually used.
    pub window: (f64, f64),
    pub points: usize,
}

/// Least-squares line through `(ln t, ln value)` for points with `t` in `window`.
pub fn fit_decay(sweep: &DecaySweep, window: (f64, f64)) -> Result<DecayFit> {
    let slack = 1e-12;
    let inside: Vec<(f64, f64)> = sweep
        .points
        .iter()
        .filter(|(t, _)| *t >= window.0 * (1.0 - slack) && *t <= window.1 * (1.0 + slack))
        .map(|&(t, v)| (t.ln(), v.ln()))
        .collect();
    if inside.len() < 4 {
        return Err(Error::Precondition(format!(
            "need at least 4 points in [{}, {}], found {}",
            window.0,
            window.1,
            inside.len()
        )));
    }
    let n = inside.len() as f64;
    let mx = inside.iter().map(|p| p.0).sum::<f64>() / n;
    let my = inside.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = inside.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = inside.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = inside
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        slope,
        intercept,
        max_residual,
        window: (inside[0].0.exp(), inside[inside.len() - 1].0.exp()),
        points: inside.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBoundCheck {
    /// `max t^{1/2} value` over `t <= 1`.
    pub short_time_ratio: f64,
    /// `max t^μ value` over `t > 1`.
    pub long_time_ratio: f64,
    pub sup_ratio: f64,
    /// Fit on [`LARGE_T_WINDOW`]; absent for zero data or too few large-time points.
    pub fit: Option<DecayFit>,
    /// `slope <= -μ + 0.05`, absent when the fit is.
    pub slope_ok: Option<bool>,
}

/// Upper-bound check on samples of `‖∇u(t)‖_p / ‖f‖_p`.
pub fn check_upper_bound(points: &[(f64, f64)], p: Exponent, mu: f64) -> Result<UpperBoundCheck> {
    let max_scaled = |keep: &dyn Fn(f64) -> bool, power: f64| {
        points
            .iter()
            .filter(|(t, _)| keep(*t))
            .map(|&(t, v)| t.powf(power) * v)
            .fold(0.0, f64::max)
    };
    let short_time_ratio = max_scaled(&|t| t <= 1.0, 0.5);
    let long_time_ratio = max_scaled(&|t| t > 1.0, mu);
    let mut check = UpperBoundCheck {
        short_time_ratio,
        long_time_ratio,
        sup_ratio: short_time_ratio.max(long_time_ratio),
        fit: None,
        slope_ok: None,
    };
    if points.iter().all(|&(_, v)| v == 0.0) {
        return Ok(check);
    }
    let sweep = DecaySweep::new(points.to_vec(), p, "upper bound")?;
    if let Ok(fit) = fit_decay(&sweep, LARGE_T_WINDOW) {
        check.slope_ok = Some(fit.slope <= -mu + SLOPE_SLACK);
        check.fit = Some(fit);
    }
    Ok(check)
}

/// `(t, ‖∇u(t)‖_p / ‖f‖_p)` over `times`, evaluated in parallel.
pub fn gradient_sweep(data: &ExteriorData, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    let norm = data_norm(data)?;
    if norm == 0.0 {
        return Ok(times.iter().map(|&t| (t, 0.0)).collect());
    }
    times
        .par_iter()
        .map(|&t| Ok((t, gradient_norm(data, t)? / norm)))
        .collect()
}

/// Runs [`gradient_sweep`] and [`check_upper_bound`] with `μ = μ(p)`.
pub fn upper_bound_sweep(data: &ExteriorData, times: &[f64]) -> Result<(Vec<(f64, f64)>, UpperBoundCheck)> {
    let rows = gradient_sweep(data, times)?;
    let check = check_upper_bound(&rows, data.p(), mu(data.p()))?;
    Ok((rows, check))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothingCheck {
    pub max_ratio: f64,
    /// `(t, t^{3/(2p)} ‖u(t)‖_∞ / ‖f‖_p)`
    pub rows: Vec<(f64, f64)>,
}

/// `max_t t^{3/(2p)} ‖u(t)‖_∞ / ‖f‖_p` over `times`.
pub fn check_smoothing(data: &ExteriorData, times: &[f64]) -> Result<SmoothingCheck> {
    let norm = data_norm(data)?;
    if norm == 0.0 {
        return Ok(SmoothingCheck {
            max_ratio: 0.0,
            rows: times.iter().map(|&t| (t, 0.0)).collect(),
        });
    }
    let power = 1.5 * data.p().reciprocal();
    let rows: Vec<(f64, f64)> = times
        .par_iter()
        .map(|&t| Ok((t, t.powf(power) * solution_sup_norm(data, t)? / norm)))
        .collect::<Result<_>>()?;
    Ok(SmoothingCheck {
        max_ratio: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn power_law(c: f64, a: f64) -> Vec<(f64, f64)> {
        time_grid(1.0, 1e4, 4).unwrap().into_iter().map(|t| (t, c * t.powf(a))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let sweep = DecaySweep::new(power_law(1.0, -0.5), Exponent::TWO, "t^-1/2").unwrap();
        let fit = fit_decay(&sweep, (1.0, 1e4)).unwrap();
        assert_relative_eq!(fit.slope, -0.5, epsilon = 1e-13);
        assert!(fit.max_residual < 1e-12);

        let sweep = DecaySweep::new(power_law(7.0, -0.25), Exponent::TWO, "7 t^-1/4").unwrap();
        let fit = fit_decay(&sweep, (1.0, 1e4)).unwrap();
        assert_relative_eq!(fit.slope, -0.25, epsilon = 1e-13);
        assert_relative_eq!(fit.intercept, 7f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn sweep_validation() {
        assert!(DecaySweep::new(vec![(1.0, 1.0); 3], Exponent::ONE, "").is_err());
        let flat = vec![(1.0, 1.0), (2.0, 1.0), (2.0, 1.0), (3.0, 1.0)];
        assert!(DecaySweep::new(flat, Exponent::ONE, "").is_err());
        let sweep = DecaySweep::new(power_law(1.0, -1.0), Exponent::ONE, "").unwrap();
        assert!(fit_decay(&sweep, (1e5, 1e6)).is_err());
    }

    #[test]
    fn grid_endpoints_and_density() {
        let g = time_grid(1e-2, 1e4, 16).unwrap();
        assert_eq!(g.len(), 97);
        assert_eq!((g[0], g[96]), (1e-2, 1e4));
        assert!(time_grid(2.0, 1.0, 16).is_err());
    }

    #[test]
    fn zero_data_skips_the_slope() {
        let rows: Vec<(f64, f64)> = time_grid(1e-2, 1e4, 2).unwrap().into_iter().map(|t| (t, 0.0)).collect();
        let check = check_upper_bound(&rows, Exponent::TWO, 0.5).unwrap();
        assert_eq!(check.sup_ratio, 0.0);
        assert_eq!(check.slope_ok, None);
    }

    #[test]
    fn upper_bound_on_synthetic_curve() {
        // t^{-1/2} for t <= 1, t^{-3/4} beyond
        let rows: Vec<(f64, f64)> = time_grid(1e-2, 1e4, 8)
            .unwrap()
            .into_iter()
            .map(|t| (t, if t <= 1.0 { t.powf(-0.5) } else { t.powf(-0.75) }))
            .collect();
        let check = check_upper_bound(&rows, Exponent::TWO, 0.5).unwrap();
        assert_relative_eq!(check.sup_ratio, 1.0, epsilon = 1e-12);
        assert_eq!(check.slope_ok, Some(true));
    }
}
