//! Pointwise kernels of the half-line reduction.
//!
//! All kernels share the Gaussian factor `e^{-(r-s)²/4t}`; the image term is
//! written as that factor times `e^{-rs/t}` so that nearly equal exponentials
//! are never subtracted.

mod erf;

pub use erf::{erf, erfc};

use std::f64::consts::PI;

use crate::error::require_positive_time;
use crate::{Error, Result};

/// Above this value of `rs/t` the plain difference of exponentials is exact enough.
const FACTORIZE_BELOW: f64 = 30.0;

/// Arguments `(t, r, s)` of the half-line kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub r: f64,
    pub s: f64,
}

impl KernelPoint {
    pub fn new(t: f64, r: f64, s: f64) -> Result<Self> {
        require_positive_time(t)?;
        if !(r >= 0.0 && s >= 0.0) {
            return Err(Error::Domain(format!(
                "kernel radii must be nonnegative, got r = {r}, s = {s}"
            )));
        }
        Ok(KernelPoint { t, r, s })
    }
}

/// `(4πt)^{-1/2}`
#[inline]
pub(crate) fn heat_prefactor(t: f64) -> f64 {
    1.0 / (4.0 * PI * t).sqrt()
}

/// The one-dimensional heat kernel `(4πt)^{-1/2} e^{-x²/4t}`.
pub fn gaussian_1d(t: f64, x: f64) -> Result<f64> {
    require_positive_time(t)?;
    Ok(heat_prefactor(t) * (-x * x / (4.0 * t)).exp())
}

/// `∂_x` of [`gaussian_1d`].
pub fn gaussian_1d_dx(t: f64, x: f64) -> Result<f64> {
    Ok(-x / (2.0 * t) * gaussian_1d(t, x)?)
}

/// Unnormalized image pieces at one point: the direct Gaussian `e^{-(r-s)²/4t}`,
/// the image ratio `E = e^{-rs/t}` and `1 - E`, the latter without cancellation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ImageParts {
    pub direct: f64,
    pub ratio: f64,
    pub one_minus_ratio: f64,
}

impl ImageParts {
    #[inline]
    pub(crate) fn at(t: f64, r: f64, s: f64) -> Self {
        let d = r - s;
        let direct = (-d * d / (4.0 * t)).exp();
        let x = r * s / t;
        let (ratio, one_minus_ratio) = if x < FACTORIZE_BELOW {
            ((-x).exp(), -(-x).exp_m1())
        } else {
            let ratio = (-x).exp();
            (ratio, 1.0 - ratio)
        };
        ImageParts {
            direct,
            ratio,
            one_minus_ratio,
        }
    }

    /// `e^{-(r-s)²/4t} - e^{-(r+s)²/4t}`
    #[inline]
    pub(crate) fn difference(&self) -> f64 {
        self.direct * self.one_minus_ratio
    }

    /// `2t · [-(r-s)/(2t) e^{-(r-s)²/4t} + (r+s)/(2t) e^{-(r+s)²/4t}]`
    #[inline]
    pub(crate) fn derivative_numerator(&self, r: f64, s: f64) -> f64 {
        self.direct * (s * (1.0 + self.ratio) - r * self.one_minus_ratio)
    }
}

/// The Dirichlet heat kernel of the half-line,
/// `(4πt)^{-1/2} [e^{-(r-s)²/4t} - e^{-(r+s)²/4t}]`.
pub fn half_line_dirichlet_kernel(pt: KernelPoint) -> f64 {
    heat_prefactor(pt.t) * ImageParts::at(pt.t, pt.r, pt.s).difference()
}

/// `∂_r` of [`half_line_dirichlet_kernel`].
pub fn half_line_dirichlet_kernel_dr(pt: KernelPoint) -> f64 {
    let KernelPoint { t, r, s } = pt;
    heat_prefactor(t) * ImageParts::at(t, r, s).derivative_numerator(r, s) / (2.0 * t)
}

/// The recombined gradient kernel
///
/// `K(t,r,s) = {-(r+1)^{-1} - (r-s)/2t} e^{-(r-s)²/4t} + {(r+1)^{-1} + (r+s)/2t} e^{-(r+s)²/4t}`,
///
/// so that `(4πt)^{-1/2} ∫ K g ds = -(r+1)^{-1} v + ∂_r v`.
pub fn optimality_kernel(t: f64, r: f64, s: f64) -> Result<f64> {
    let pt = KernelPoint::new(t, r, s)?;
    Ok(optimality_kernel_unchecked(pt.t, pt.r, pt.s))
}

#[inline]
pub(crate) fn optimality_kernel_unchecked(t: f64, r: f64, s: f64) -> f64 {
    let parts = ImageParts::at(t, r, s);
    -parts.difference() / (r + 1.0) + parts.derivative_numerator(r, s) / (2.0 * t)
}

/// A kernel `k(t, r, s)` that can be integrated against a radial profile in `s`.
///
/// `log_envelope` bounds `ln |k|` up to factors polynomial in `|r - s|/t`; the
/// integrator uses it to decide where the integrand is negligible.
pub trait RadialKernel: Sync {
    fn eval(&self, t: f64, r: f64, s: f64) -> f64;

    fn log_envelope(&self, t: f64, r: f64, s: f64) -> f64 {
        let d = r - s;
        -d * d / (4.0 * t)
    }
}

/// [`half_line_dirichlet_kernel`] as a [`RadialKernel`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DirichletKernel;

/// [`half_line_dirichlet_kernel_dr`] as a [`RadialKernel`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DirichletKernelDr;

/// [`optimality_kernel`] with the `(4πt)^{-1/2}` prefactor, as a [`RadialKernel`].
#[derive(Debug, Clone, Copy, Default)]
pub struct GradientKernel;

impl RadialKernel for DirichletKernel {
    #[inline]
    fn eval(&self, t: f64, r: f64, s: f64) -> f64 {
        heat_prefactor(t) * ImageParts::at(t, r, s).difference()
    }

    fn log_envelope(&self, t: f64, r: f64, s: f64) -> f64 {
        let d = r - s;
        let x = r * s / t;
        -d * d / (4.0 * t) + (-(-x).exp_m1()).ln()
    }
}

impl RadialKernel for DirichletKernelDr {
    #[inline]
    fn eval(&self, t: f64, r: f64, s: f64) -> f64 {
        heat_prefactor(t) * ImageParts::at(t, r, s).derivative_numerator(r, s) / (2.0 * t)
    }
}

impl RadialKernel for GradientKernel {
    #[inline]
    fn eval(&self, t: f64, r: f64, s: f64) -> f64 {
        heat_prefactor(t) * optimality_kernel_unchecked(t, r, s)
    }
}

impl<F> RadialKernel for F
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    fn eval(&self, t: f64, r: f64, s: f64) -> f64 {
        self(t, r, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(t: f64, r: f64, s: f64) -> KernelPoint {
        KernelPoint::new(t, r, s).unwrap()
    }

    #[test]
    fn gaussian_prefactor_and_symmetry() {
        assert_relative_eq!(gaussian_1d(1.0 / (4.0 * PI), 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(gaussian_1d(3.0, 1.7).unwrap(), gaussian_1d(3.0, -1.7).unwrap());
        // (4π)^{-1/2} e^{-1}, 50 digits from mpmath
        let want = 0.10377687435514867583506706236033434134222675748482;
        assert_relative_eq!(gaussian_1d(1.0, 2.0).unwrap(), want, max_relative = 1e-15);
    }

    #[test]
    fn nonpositive_time_is_a_domain_error() {
        assert!(matches!(gaussian_1d(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(gaussian_1d(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(KernelPoint::new(0.0, 1.0, 1.0).is_err());
        assert!(KernelPoint::new(1.0, -1.0, 1.0).is_err());
        assert!(optimality_kernel(-2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn image_kernel_examples() {
        assert_eq!(half_line_dirichlet_kernel(pt(1.0, 0.0, 3.0)), 0.0);
        assert_eq!(
            half_line_dirichlet_kernel(pt(0.7, 2.0, 5.0)),
            half_line_dirichlet_kernel(pt(0.7, 5.0, 2.0))
        );
        let want = (8.0 * PI).sqrt().recip() * (1.0 - (-0.5f64).exp());
        assert_relative_eq!(
            half_line_dirichlet_kernel(pt(2.0, 1.0, 1.0)),
            want,
            max_relative = 1e-15
        );
    }

    #[test]
    fn image_kernel_keeps_relative_accuracy_for_small_rs_over_t() {
        // e^{-(r-s)²/4t}(1 - e^{-rs/t}) ≈ rs/t when everything is tiny.
        let (t, r, s) = (1e8, 1e-3, 2e-3);
        let got = half_line_dirichlet_kernel(pt(t, r, s)) / heat_prefactor(t);
        let x: f64 = r * s / t;
        let want = (-(r - s) * (r - s) / (4.0 * t)).exp() * (x - x * x / 2.0);
        assert_relative_eq!(got, want, max_relative = 1e-14);
    }

    #[test]
    fn derivative_examples() {
        let s: f64 = 1.3;
        let want = heat_prefactor(1.0) * s * (-s * s).exp();
        assert_relative_eq!(half_line_dirichlet_kernel_dr(pt(1.0, s, s)), want, max_relative = 1e-14);
        let want = heat_prefactor(1.0) * (-0.25f64).exp();
        assert_relative_eq!(half_line_dirichlet_kernel_dr(pt(1.0, 0.0, 1.0)), want, max_relative = 1e-15);
    }

    #[test]
    fn derivative_matches_central_differences() {
        let central = |t: f64, r: f64, s: f64, h: f64| {
            (half_line_dirichlet_kernel(pt(t, r + h, s)) - half_line_dirichlet_kernel(pt(t, r - h, s)))
                / (2.0 * h)
        };
        let exact = half_line_dirichlet_kernel_dr(pt(1.0, 2.0, 1.0));
        assert_relative_eq!(central(1.0, 2.0, 1.0, 1e-5), exact, max_relative = 1e-8);

        for &t in &[0.05, 0.5, 1.0, 4.0, 30.0] {
            for &r in &[0.3, 1.0, 2.5, 6.0] {
                for &s in &[0.2, 1.0, 3.0] {
                    let exact = half_line_dirichlet_kernel_dr(pt(t, r, s));
                    let h = 2e-5 * t.sqrt();
                    if exact.abs() < 1e-8 * heat_prefactor(t) / t.sqrt() {
                        continue;
                    }
                    assert_relative_eq!(central(t, r, s, h), exact, max_relative = 1e-7);
                }
            }
        }
    }

    #[test]
    fn gradient_kernel_at_boundary() {
        for &(t, s) in &[(1.0f64, 0.5f64), (3.0, 2.0), (0.2, 0.1)] {
            let want = s / t * (-s * s / (4.0 * t)).exp();
            assert_relative_eq!(optimality_kernel(t, 0.0, s).unwrap(), want, max_relative = 1e-14);
        }
    }

    #[test]
    fn gradient_kernel_is_the_recombination() {
        for &(t, r, s) in &[(1.0, 3.0, 1.5), (0.3, 0.4, 0.9), (50.0, 7.0, 2.0)] {
            let recombined = -half_line_dirichlet_kernel(pt(t, r, s)) / (r + 1.0)
                + half_line_dirichlet_kernel_dr(pt(t, r, s));
            assert_relative_eq!(GradientKernel.eval(t, r, s), recombined, max_relative = 1e-13);
        }
    }

    #[test]
    fn gradient_kernel_large_m_is_positive_of_order_one_over_m() {
        let m = 2.0e4;
        let k = optimality_kernel(m * m, 10.0, m).unwrap();
        assert!(k > 0.0);
        assert!(k * m > 1e-2 && k * m < 1.0, "m K = {}", k * m);
    }
}
