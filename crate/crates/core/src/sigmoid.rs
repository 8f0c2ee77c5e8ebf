//! Sigmoidal performance functions.
//!
//! A performance function `f` maps the time spent on a binary decision task to
//! the probability that the decision is correct. Two families are supported:
//!
//! - the logistic model `f(t) = p0 / (1 + exp(-(a t - b)))`;
//! - the drift-diffusion model, where evidence drifts at rate `drift` with
//!   diffusion `diffusion` and the decision is correct once it clears
//!   `threshold`: `f(t) = Phi((drift t - threshold) / (diffusion sqrt(t)))`.
//!
//! Both are convex below the inflection point `t_inf` and concave above it, so
//! `f'` is unimodal and every positive level below `f'(t_inf)` is hit twice
//! (once on each branch). [`Sigmoid`] caches the [`DerivativeProfile`] the
//! solvers need for branch inversion.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::numeric::{bisect, expand_right, golden_section_max, TIME_TOLERANCE};

/// Parameters of a sigmoidal performance function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmoidModel {
    /// Logistic accuracy curve `p0 / (1 + exp(-(a t - b)))`.
    Pew { p0: f64, a: f64, b: f64 },
    /// Accuracy of a thresholded Gaussian evidence process.
    DriftDiffusion { drift: f64, diffusion: f64, threshold: f64 },
}

/// Which monotone piece of `f'` to invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `[0, t_inf]`, where `f'` increases.
    Lower,
    /// `[t_inf, inf)`, where `f'` decreases.
    Upper,
}

/// Shape summary of `f'` and `f''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeProfile {
    /// Inflection point, the maximiser of `f'`.
    pub inflection: f64,
    /// `f'(t_inf)`.
    pub max_slope: f64,
    /// Maximum of `f''` over `t >= 0`.
    pub max_curvature: f64,
    /// Where `f''` peaks; lies in `[0, t_inf]`.
    pub max_curvature_at: f64,
    /// `f'(0)`.
    pub slope_at_zero: f64,
    /// `f''(0)` (the right limit for the drift-diffusion model).
    pub curvature_at_zero: f64,
}

impl SigmoidModel {
    pub fn pew(p0: f64, a: f64, b: f64) -> Result<Self> {
        let model = SigmoidModel::Pew { p0, a, b };
        model.validate()?;
        Ok(model)
    }

    pub fn drift_diffusion(drift: f64, diffusion: f64, threshold: f64) -> Result<Self> {
        let model = SigmoidModel::DriftDiffusion { drift, diffusion, threshold };
        model.validate()?;
        Ok(model)
    }

    /// Checks the parameter ranges. `b >= 0` keeps the inflection point on
    /// the non-negative time axis.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SigmoidModel::Pew { p0, a, b } => {
                if !(p0 > 0.0 && p0 <= 1.0) {
                    return Err(Error::domain(format!("pew p0 must lie in (0, 1], got {p0}")));
                }
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::domain(format!("pew a must be positive, got {a}")));
                }
                if !(b >= 0.0 && b.is_finite()) {
                    return Err(Error::domain(format!("pew b must be non-negative, got {b}")));
                }
            }
            SigmoidModel::DriftDiffusion { drift, diffusion, threshold } => {
                for (name, v) in [("drift", drift), ("diffusion", diffusion), ("threshold", threshold)] {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::domain(format!("ddm {name} must be positive, got {v}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Probability of a correct decision after `t` seconds.
    pub fn value(&self, t: f64) -> Result<f64> {
        check_time(t, false)?;
        Ok(self.value_unchecked(t))
    }

    /// First derivative `f'(t)`.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        check_time(t, self.is_ddm())?;
        Ok(self.slope_unchecked(t))
    }

    /// Second derivative `f''(t)`. Analytic for the logistic model, a central
    /// difference of the analytic `f'` for the drift-diffusion model.
    pub fn second_derivative(&self, t: f64) -> Result<f64> {
        check_time(t, self.is_ddm())?;
        Ok(self.curvature_unchecked(t))
    }

    pub fn inflection_point(&self) -> Result<f64> {
        match *self {
            SigmoidModel::Pew { a, b, .. } => Ok(b / a),
            SigmoidModel::DriftDiffusion { .. } => self.ddm_inflection(),
        }
    }

    pub fn profile(&self) -> Result<DerivativeProfile> {
        self.validate()?;
        let inflection = self.inflection_point()?;
        let max_curvature_at = match *self {
            SigmoidModel::Pew { a, b, .. } => {
                // logistic f'' peaks where the logit equals -ln(2 + sqrt 3)
                ((b - (2.0 + 3f64.sqrt()).ln()) / a).max(0.0)
            }
            SigmoidModel::DriftDiffusion { .. } => {
                golden_section_max(|t| self.curvature_unchecked(t), 0.0, inflection, TIME_TOLERANCE)
            }
        };
        Ok(DerivativeProfile {
            inflection,
            max_slope: self.slope_unchecked(inflection),
            max_curvature: self.curvature_unchecked(max_curvature_at),
            max_curvature_at,
            slope_at_zero: self.slope_unchecked(0.0),
            curvature_at_zero: self.curvature_unchecked(0.0),
        })
    }

    /// See [`Sigmoid::derivative_inverse`].
    pub fn derivative_inverse(&self, y: f64, branch: Branch) -> Result<f64> {
        Sigmoid::new(*self)?.derivative_inverse(y, branch)
    }

    /// See [`Sigmoid::curvature_crossings`].
    pub fn curvature_crossings(&self, level: f64) -> Result<(f64, f64)> {
        Sigmoid::new(*self)?.curvature_crossings(level)
    }

    fn is_ddm(&self) -> bool {
        matches!(self, SigmoidModel::DriftDiffusion { .. })
    }

    /// `f(t)` for `t >= 0`, using the limit `f(0) = 0` for the drift-diffusion model.
    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        match *self {
            SigmoidModel::Pew { p0, a, b } => p0 * logistic(a * t - b),
            SigmoidModel::DriftDiffusion { drift, diffusion, threshold } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let z = (drift * t - threshold) / (diffusion * t.sqrt());
                normal_cdf(z)
            }
        }
    }

    pub(crate) fn slope_unchecked(&self, t: f64) -> f64 {
        match *self {
            SigmoidModel::Pew { p0, a, b } => p0 * a * logistic_slope(a * t - b),
            SigmoidModel::DriftDiffusion { drift, diffusion, threshold } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let sqrt_t = t.sqrt();
                let z = (drift * t - threshold) / (diffusion * sqrt_t);
                let dz = (drift * t + threshold) / (2.0 * diffusion * t * sqrt_t);
                normal_pdf(z) * dz
            }
        }
    }

    pub(crate) fn curvature_unchecked(&self, t: f64) -> f64 {
        match *self {
            SigmoidModel::Pew { p0, a, b } => {
                let u = a * t - b;
                -p0 * a * a * logistic_slope(u) * (0.5 * u).tanh()
            }
            SigmoidModel::DriftDiffusion { .. } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let mut h = (1e-6 * t).max(1e-6);
                if h >= t {
                    h = 0.5 * t;
                }
                (self.slope_unchecked(t + h) - self.slope_unchecked(t - h)) / (2.0 * h)
            }
        }
    }

    fn ddm_inflection(&self) -> Result<f64> {
        let SigmoidModel::DriftDiffusion { drift, threshold, .. } = *self else {
            unreachable!("ddm_inflection on a logistic model");
        };
        // grow [lo, hi] around `mid` until f' falls off on both sides
        let slope = |t: f64| self.slope_unchecked(t);
        let mut lo = 0.0;
        let mut mid = threshold / drift;
        let mut hi = 2.0 * mid;
        let mut doublings = 0;
        while slope(hi) >= slope(mid) {
            if doublings == crate::numeric::MAX_DOUBLINGS {
                return Err(Error::numeric("inflection bracket expansion failed after 64 doublings"));
            }
            lo = mid;
            mid = hi;
            hi *= 2.0;
            doublings += 1;
        }
        Ok(golden_section_max(slope, lo, hi, TIME_TOLERANCE))
    }
}

/// A validated model with its derivative profile precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigmoid {
    model: SigmoidModel,
    profile: DerivativeProfile,
}

impl Sigmoid {
    pub fn new(model: SigmoidModel) -> Result<Self> {
        let profile = model.profile()?;
        Ok(Sigmoid { model, profile })
    }

    pub fn model(&self) -> &SigmoidModel {
        &self.model
    }

    pub fn profile(&self) -> &DerivativeProfile {
        &self.profile
    }

    pub fn inflection_point(&self) -> f64 {
        self.profile.inflection
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.model.value(t)
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.model.derivative(t)
    }

    pub fn second_derivative(&self, t: f64) -> Result<f64> {
        self.model.second_derivative(t)
    }

    /// `f(t)` for a known non-negative `t`.
    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        self.model.value_unchecked(t)
    }

    /// `f'(t)` for a known non-negative `t`.
    #[inline]
    pub fn df(&self, t: f64) -> f64 {
        self.model.slope_unchecked(t)
    }

    /// `f''(t)` for a known non-negative `t`.
    #[inline]
    pub fn d2f(&self, t: f64) -> f64 {
        self.model.curvature_unchecked(t)
    }

    /// Time at which `f'` equals `y` on the requested branch.
    ///
    /// The upper branch is defined for every `0 < y <= f'(t_inf)`. The lower
    /// branch additionally needs `y >= f'(0)`.
    pub fn derivative_inverse(&self, y: f64, branch: Branch) -> Result<f64> {
        let p = &self.profile;
        if y.is_nan() || y <= 0.0 {
            return Err(Error::domain(format!("derivative inverse needs a positive level, got {y}")));
        }
        if y > p.max_slope {
            return Err(Error::no_solution(format!("level {y} exceeds the maximum slope {}", p.max_slope)));
        }
        if y == p.max_slope {
            return Ok(p.inflection);
        }
        match branch {
            Branch::Upper => {
                let hi = expand_right(p.inflection, self.time_scale(), |t| self.df(t) < y)?;
                bisect(|t| self.df(t) - y, p.inflection, hi, TIME_TOLERANCE)
            }
            Branch::Lower => {
                if y < p.slope_at_zero {
                    return Err(Error::no_solution(format!(
                        "level {y} is below f'(0) = {}; no crossing before the inflection point",
                        p.slope_at_zero
                    )));
                }
                bisect(|t| self.df(t) - y, 0.0, p.inflection, TIME_TOLERANCE)
            }
        }
    }

    /// The outermost times `(delta1, delta2)` at which `f''` crosses `level`.
    ///
    /// `delta1` is the smallest root when `level` lies in `[f''(0), f''_max]`
    /// and 0 otherwise; `delta2` is the largest root when `level <= f''_max`
    /// and 0 otherwise.
    pub fn curvature_crossings(&self, level: f64) -> Result<(f64, f64)> {
        let p = &self.profile;
        if level.is_nan() || level <= 0.0 {
            return Err(Error::domain(format!("curvature level must be positive, got {level}")));
        }
        if level > p.max_curvature {
            return Ok((0.0, 0.0));
        }
        let peak = p.max_curvature_at;
        if level == p.max_curvature {
            return Ok((peak, peak));
        }
        let g = |t: f64| self.d2f(t) - level;
        let lower = if level >= p.curvature_at_zero { bisect(g, 0.0, peak, TIME_TOLERANCE)? } else { 0.0 };
        let mut hi = p.inflection.max(peak);
        if g(hi) >= 0.0 {
            hi = expand_right(hi, self.time_scale(), |t| g(t) < 0.0)?;
        }
        let upper = bisect(g, peak, hi, TIME_TOLERANCE)?;
        Ok((lower, upper))
    }

    /// Characteristic width used as the first step when expanding brackets.
    fn time_scale(&self) -> f64 {
        match self.model {
            SigmoidModel::Pew { a, .. } => 1.0 / a,
            SigmoidModel::DriftDiffusion { .. } => self.profile.inflection.max(1e-6),
        }
    }
}

fn check_time(t: f64, strictly_positive: bool) -> Result<()> {
    if t.is_nan() || t < 0.0 || (strictly_positive && t == 0.0) {
        let bound = if strictly_positive { "t > 0" } else { "t >= 0" };
        return Err(Error::domain(format!("time must satisfy {bound}, got {t}")));
    }
    Ok(())
}

fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// `sigma(u) * (1 - sigma(u))` without cancellation in either tail.
fn logistic_slope(u: f64) -> f64 {
    let e = (-u.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pew() -> Sigmoid {
        Sigmoid::new(SigmoidModel::pew(1.0, 1.0, 5.0).unwrap()).unwrap()
    }

    fn ddm() -> Sigmoid {
        Sigmoid::new(SigmoidModel::drift_diffusion(1.0, 1.0, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn pew_values() {
        let m = SigmoidModel::pew(1.0, 1.0, 5.0).unwrap();
        assert_eq!(m.value(5.0).unwrap(), 0.5);
        // 1 / (1 + e^5), 40-digit reference
        assert!((m.value(0.0).unwrap() - 0.006_692_850_924_284_855_6).abs() < 1e-15);
        assert_eq!(m.derivative(5.0).unwrap(), 0.25);
        assert!(m.derivative(100.0).unwrap() < 1e-10);
        assert_eq!(m.second_derivative(5.0).unwrap(), 0.0);
        assert!(m.second_derivative(3.0).unwrap() > 0.0);
        assert!(m.second_derivative(7.0).unwrap() < 0.0);
    }

    #[test]
    fn ddm_midpoint() {
        let m = SigmoidModel::drift_diffusion(1.0, 1.0, 2.0).unwrap();
        assert_eq!(m.value(2.0).unwrap(), 0.5);
        assert_eq!(m.value(0.0).unwrap(), 0.0);
        // 1 / (2 sqrt(pi)) from the chain rule at z = 0, dz/dt = 1/sqrt(2)
        assert!((m.derivative(2.0).unwrap() - 0.282_094_791_773_878_14).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        let p = SigmoidModel::pew(1.0, 1.0, 5.0).unwrap();
        let d = SigmoidModel::drift_diffusion(1.0, 1.0, 2.0).unwrap();
        assert!(matches!(p.value(-1.0), Err(Error::Domain(_))));
        assert!(p.derivative(0.0).is_ok());
        assert!(matches!(d.derivative(0.0), Err(Error::Domain(_))));
        assert!(matches!(d.second_derivative(-2.0), Err(Error::Domain(_))));
        assert!(SigmoidModel::pew(1.5, 1.0, 5.0).is_err());
        assert!(SigmoidModel::pew(1.0, 0.0, 5.0).is_err());
        assert!(SigmoidModel::drift_diffusion(1.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn inflection_points() {
        assert_eq!(SigmoidModel::pew(1.0, 1.0, 5.0).unwrap().inflection_point().unwrap(), 5.0);
        assert_eq!(SigmoidModel::pew(0.8, 2.0, 6.0).unwrap().inflection_point().unwrap(), 3.0);
        // root of f'' from a 40-digit reference solve
        assert!((ddm().inflection_point() - 1.166_312_747_397_789).abs() < 1e-6);
    }

    #[test]
    fn pew_curvature_peak_matches_closed_form() {
        let p = pew().profile;
        assert!((p.max_curvature_at - 3.683_042_103_075_183).abs() < 1e-12);
        assert!((p.max_curvature - 0.096_225_044_864_937_63).abs() < 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let s = pew();
        assert_eq!(s.derivative_inverse(0.25, Branch::Upper).unwrap(), 5.0);
        let up = s.derivative_inverse(0.2, Branch::Upper).unwrap();
        assert!((up - 5.962_423_650_119_207).abs() < 1e-8);
        let low = s.derivative_inverse(0.2, Branch::Lower).unwrap();
        assert!((low - 4.037_576_349_880_793).abs() < 1e-8);
        assert!(matches!(s.derivative_inverse(0.3, Branch::Upper), Err(Error::NoSolution(_))));
        assert!(matches!(s.derivative_inverse(0.3, Branch::Lower), Err(Error::NoSolution(_))));
        assert!(matches!(s.derivative_inverse(0.0, Branch::Upper), Err(Error::Domain(_))));
        assert!(matches!(s.derivative_inverse(0.001, Branch::Lower), Err(Error::NoSolution(_))));
    }

    #[test]
    fn curvature_crossing_cases() {
        let s = pew();
        let fmax = s.profile.max_curvature;
        assert_eq!(s.curvature_crossings(fmax * 1.01).unwrap(), (0.0, 0.0));
        let (d1, d2) = s.curvature_crossings(fmax).unwrap();
        assert_eq!(d1, s.profile.max_curvature_at);
        assert_eq!(d2, s.profile.max_curvature_at);
        let (d1, d2) = s.curvature_crossings(0.02).unwrap();
        assert!(0.0 < d1 && d1 < d2 && d2 < 5.0);
        assert!((s.d2f(d1) - 0.02).abs() < 1e-8);
        assert!((s.d2f(d2) - 0.02).abs() < 1e-8);
        // below f''(0) only the outer crossing exists
        let (d1, d2) = s.curvature_crossings(0.001).unwrap();
        assert_eq!(d1, 0.0);
        assert!((s.d2f(d2) - 0.001).abs() < 1e-8);
    }

    #[test]
    fn ddm_crossings_and_inverse() {
        let s = ddm();
        let level = 0.5 * s.profile.max_curvature;
        let (d1, d2) = s.curvature_crossings(level).unwrap();
        assert!(0.0 < d1 && d1 < d2 && d2 < s.inflection_point());
        assert!((s.d2f(d1) - level).abs() < 1e-7);
        let y = 0.5 * s.profile.max_slope;
        let up = s.derivative_inverse(y, Branch::Upper).unwrap();
        let low = s.derivative_inverse(y, Branch::Lower).unwrap();
        assert!((s.df(up) - y).abs() < 1e-8 && (s.df(low) - y).abs() < 1e-8);
        assert!(low < s.inflection_point() && s.inflection_point() < up);
    }
}
