//! One-dimensional geodesic distance d(y, u) = ∫_y^u dζ/σ(ζ), its inverse,
//! and the Doss tail estimates built on it.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::real::{c, Real};
use crate::roots::{brent, expand_bracket};
use crate::volmodel::{VolKind, VolModel};

/// Drift band C₁ ≤ C₂ of the Doss transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DossBounds<T> {
    pub c1: T,
    pub c2: T,
}

impl<T: Real> DossBounds<T> {
    pub fn new(c1: T, c2: T) -> Result<Self> {
        if !(c1 <= c2) {
            return Err(Error::InvalidParameter {
                name: "c1",
                value: c1.to_f64_lossy(),
                reason: "need c1 <= c2",
            });
        }
        Ok(Self { c1, c2 })
    }

    /// For constant σ₀ the Doss drift is exactly −½σ₀².
    pub fn constant(sigma0: T) -> Self {
        let v = -c::<T>(0.5) * sigma0 * sigma0;
        Self { c1: v, c2: v }
    }

    /// Band of b(u)/∂ᵧu(x, y) = −½(σ + σ')(u)·σ(y) for the driftless
    /// log-stock, with the ranges sampled on the model's window at t = 0.
    pub fn from_model(model: &VolModel<T>) -> Result<Self> {
        let (a, b) = model.sampling_window();
        let n = 4001;
        let (mut g_lo, mut g_hi) = (T::infinity(), T::neg_infinity());
        for i in 0..n {
            let x = a + (b - a) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
            let g = -c::<T>(0.5) * (model.sigma(T::zero(), x) + model.sigma_dx(T::zero(), x)?);
            g_lo = g_lo.min(g);
            g_hi = g_hi.max(g);
        }
        let corners = [
            g_lo * model.sigma_lo(),
            g_lo * model.sigma_hi(),
            g_hi * model.sigma_lo(),
            g_hi * model.sigma_hi(),
        ];
        let c1 = corners.iter().fold(T::infinity(), |m, v| m.min(*v));
        let c2 = corners.iter().fold(T::neg_infinity(), |m, v| m.max(*v));
        Self::new(c1, c2)
    }
}

fn check_domain<T: Real>(model: &VolModel<T>, a: T) -> Result<()> {
    if matches!(model.kind(), VolKind::CevLocal { .. }) && !(a > T::zero()) {
        return Err(Error::Domain {
            name: "x",
            value: a.to_f64_lossy(),
            reason: "cev-local geodesic needs positive endpoints",
        });
    }
    Ok(())
}

/// Signed distance ∫_y^u dζ/σ(ζ), absolute error at most 1e−10.
pub fn geodesic_distance<T: Real>(model: &VolModel<T>, y: T, u: T) -> Result<T> {
    if y == u {
        return Ok(T::zero());
    }
    check_domain(model, y.min(u))?;
    if let VolKind::Constant { sigma0 } = model.kind() {
        return Ok((u - y) / *sigma0);
    }
    let tol = c::<T>(1e-11).max(T::tol_floor(T::one()));
    let q = integrate(|z| T::one() / model.sigma(T::zero(), z), y, u, QuadOptions::abs(tol))?;
    Ok(q.value)
}

/// u = d⁻¹(y, ·)(x): the point at geodesic distance `x` from `y`.
pub fn inverse_geodesic<T: Real>(model: &VolModel<T>, y: T, x: T) -> Result<T> {
    if x == T::zero() {
        return Ok(y);
    }
    if let VolKind::Constant { sigma0 } = model.kind() {
        return Ok(y + x * *sigma0);
    }
    let f = |u: T| match geodesic_distance(model, y, u) {
        Ok(d) => d - x,
        Err(_) => T::nan(),
    };
    // The bounds σ_lo ≤ σ ≤ σ_hi pin u between y + xσ_lo and y + xσ_hi.
    let (a, b) = (y + x * model.sigma_lo(), y + x * model.sigma_hi());
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo.is_finite() && fhi.is_finite() && flo.signum() != fhi.signum()) {
        let step = x * model.sigma_lo();
        let br = expand_bracket(f, y, step, 200)?;
        lo = br.0;
        hi = br.1;
    }
    let xtol = c::<T>(1e-12).max(T::tol_floor(T::one().max(y.abs())));
    brent(f, lo, hi, xtol, 200)
}

/// d²(x₀, x)/(2t), the Doss tail rate.
pub fn doss_tail_asymptote<T: Real>(model: &VolModel<T>, x0: T, x: T, t: T) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t.to_f64_lossy(),
            reason: "must be positive",
        });
    }
    let d = geodesic_distance(model, x0, x)?;
    Ok(d * d / (c::<T>(2.0) * t))
}

/// Arithmetic-Brownian sandwich of P(X_t > x):
/// lower = Φᶜ((d + |d(C₁t + x₀, x₀)|)/√t), upper = Φᶜ((d − |d(C₂t + x₀, x₀)|)/√t).
pub fn doss_sandwich_tail<T: Real>(
    model: &VolModel<T>,
    bounds: DossBounds<T>,
    x0: T,
    x: T,
    t: T,
) -> Result<(T, T)> {
    let (lo, hi) = doss_sandwich_log_tail(model, bounds, x0, x, t)?;
    Ok((lo.exp(), hi.exp()))
}

/// Logarithms of the two sandwich bounds; stays finite far in the tail.
pub fn doss_sandwich_log_tail<T: Real>(
    model: &VolModel<T>,
    bounds: DossBounds<T>,
    x0: T,
    x: T,
    t: T,
) -> Result<(T, T)> {
    if !(t > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t.to_f64_lossy(),
            reason: "must be positive",
        });
    }
    let d = geodesic_distance(model, x0, x)?;
    let s1 = geodesic_distance(model, bounds.c1 * t + x0, x0)?.abs();
    let s2 = geodesic_distance(model, bounds.c2 * t + x0, x0)?.abs();
    let rt = t.sqrt();
    let lower = log_norm_sf(((d + s1) / rt).to_f64_lossy());
    let upper = log_norm_sf(((d - s2) / rt).to_f64_lossy());
    Ok((c(lower), c(upper)))
}

/// Standard normal survival function Φᶜ(z).
pub fn norm_sf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(z / std::f64::consts::SQRT_2)
}

/// log Φᶜ(z), using the Mills-ratio series once erfc would underflow.
pub fn log_norm_sf(z: f64) -> f64 {
    if z < 30.0 {
        return norm_sf(z).ln();
    }
    let r = 1.0 / (z * z);
    let series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    -0.5 * z * z - (z * (2.0 * std::f64::consts::PI).sqrt()).ln() + series.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::simpson;

    fn fig1() -> VolModel<f64> {
        VolModel::figure_one()
    }

    #[test]
    fn doss_band_from_model() {
        let m = VolModel::<f64>::constant(0.2).unwrap();
        let b = DossBounds::from_model(&m).unwrap();
        assert!((b.c1 + 0.02).abs() < 1e-15 && (b.c2 + 0.02).abs() < 1e-15);
        let b = DossBounds::from_model(&fig1()).unwrap();
        assert!(b.c1 < b.c2 && b.c2 < 0.0);
    }

    #[test]
    fn constant_distance_and_inverse() {
        let m = VolModel::<f64>::constant(0.2).unwrap();
        assert!((geodesic_distance(&m, 0.0, 1.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((inverse_geodesic(&m, 0.0, 5.0).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(geodesic_distance(&fig1(), 0.7, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn figure_one_distance_matches_simpson() {
        let s = |x: f64| 0.5 - 0.1 * (1.0 - x * x).exp() + 0.4 * (-2.0 * x.exp()).exp();
        let oracle = simpson(|z: f64| 1.0 / s(z), 0.0, 2.0, 1_000_000);
        let d = geodesic_distance(&fig1(), 0.0, 2.0).unwrap();
        assert!((d - oracle).abs() < 1e-8, "{d} vs {oracle}");
        assert!((d - 5.37771).abs() < 1e-4);
    }

    #[test]
    fn figure_one_inverse() {
        let m = fig1();
        let d = geodesic_distance(&m, 0.0, 2.0).unwrap();
        let u = inverse_geodesic(&m, 0.0, d).unwrap();
        assert!((u - 2.0).abs() < 1e-7);
        let back = inverse_geodesic(&m, 0.0, -d).unwrap();
        assert!((geodesic_distance(&m, 0.0, back).unwrap() + d).abs() < 1e-9);
    }

    #[test]
    fn asymptote_values() {
        let m = VolModel::<f64>::constant(0.2).unwrap();
        assert!((doss_tail_asymptote(&m, 0.0, 1.0, 1.0).unwrap() - 12.5).abs() < 1e-12);
        let f = fig1();
        let d = geodesic_distance(&f, 0.0, 3.0).unwrap();
        assert!((doss_tail_asymptote(&f, 0.0, 3.0, 1.0).unwrap() - d * d / 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_band_collapses() {
        let m = fig1();
        let (lo, hi) = doss_sandwich_tail(&m, DossBounds::new(0.0, 0.0).unwrap(), 0.0, 1.0, 1.0).unwrap();
        let d = geodesic_distance(&m, 0.0, 1.0).unwrap();
        assert_eq!(lo, hi);
        assert!((lo - norm_sf(d)).abs() < 1e-15);
    }

    #[test]
    fn constant_band_contains_lognormal_tail() {
        let s0: f64 = 0.3;
        let m = VolModel::<f64>::constant(s0).unwrap();
        let t: f64 = 0.7;
        for i in 0..40 {
            let x = -1.0 + 0.1 * i as f64;
            let exact = norm_sf((x + s0 * s0 * t / 2.0) / (s0 * t.sqrt()));
            let (lo, hi) = doss_sandwich_tail(&m, DossBounds::constant(s0), 0.0, x, t).unwrap();
            assert!(lo <= exact * (1.0 + 1e-12) && exact <= hi * (1.0 + 1e-12), "x={x}");
        }
    }

    #[test]
    fn upper_log_rate_approaches_one() {
        let m = fig1();
        let band = DossBounds::new(-0.405, -0.04).unwrap();
        let mut prev = f64::INFINITY;
        for &g in &[5.0, 10.0, 20.0] {
            let x = inverse_geodesic(&m, 0.0, g).unwrap();
            let (_, log_hi) = doss_sandwich_log_tail(&m, band, 0.0, x, 1.0).unwrap();
            let gap = (-log_hi / (g * g / 2.0) - 1.0).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn log_norm_sf_is_continuous_at_switch() {
        let a = norm_sf(30.0).ln();
        let b = log_norm_sf(30.0);
        assert!((a - b).abs() / b.abs() < 1e-9);
    }
}
