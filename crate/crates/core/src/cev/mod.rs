//! Stopped CEV process dX = δX^{1+β}dW (β < 0), absorbed at zero.

mod bessel;
mod wing;

pub use bessel::{
    bessel_i, crossover as bessel_crossover, log_bessel_i, log_bessel_i_asymptotic, log_bessel_i_scaled,
    log_bessel_i_series,
};
pub use wing::{cev_wing_asymptote, cev_wing_psi_composed, locvol_wing_asymptote, wing_psi, WingPoint};

use crate::error::{Error, Result};
use crate::quad::{integrate_pieces, QuadOptions};
use crate::real::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CevParams<T> {
    pub delta: T,
    pub beta: T,
    pub x0: T,
    pub maturity: T,
}

impl<T: Real> CevParams<T> {
    pub fn new(delta: T, beta: T, x0: T, maturity: T) -> Result<Self> {
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value: v.to_f64_lossy(),
                    reason: "must be positive and finite",
                })
            }
        };
        positive("delta", delta)?;
        positive("x0", x0)?;
        positive("T", maturity)?;
        if !(beta < T::zero()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta.to_f64_lossy(),
                reason: "must be negative",
            });
        }
        Ok(Self {
            delta,
            beta,
            x0,
            maturity,
        })
    }

    /// ν = 1/(2|β|)
    pub fn nu(&self) -> T {
        T::one() / (c::<T>(2.0) * self.beta.abs())
    }

    /// Same process observed at another maturity.
    pub fn at_maturity(&self, maturity: T) -> Result<Self> {
        Self::new(self.delta, self.beta, self.x0, maturity)
    }

    /// 2δ²β²T, the scale of the squared-Bessel variable w = x^{2|β|}/(2δ²β²T).
    pub fn scale(&self) -> T {
        c::<T>(2.0) * self.delta * self.delta * self.beta * self.beta * self.maturity
    }

    /// ζ = x₀^{2|β|}/(2δ²β²T)
    pub fn zeta(&self) -> T {
        self.x0.powf(c::<T>(2.0) * self.beta.abs()) / self.scale()
    }
}

fn check_x<T: Real>(x: T) -> Result<()> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            name: "x",
            value: x.to_f64_lossy(),
            reason: "density is defined for x > 0",
        });
    }
    Ok(())
}

/// log p(T; x₀, x) of the stopped CEV transition density:
/// p = x^{−2β−3/2} x₀^{1/2}/(δ²|β|T) · exp(−(x₀^{−2β} + x^{−2β})/(2δ²β²T))
///     · I_ν(x₀^{−β}x^{−β}/(δ²β²T)).
/// With w = x^{2|β|}/(2δ²β²T) the exponential and Bessel factors combine into
/// e^{−(√w − √ζ)²}·e^{−z}I_ν(z), z = 2√(wζ), which is evaluated instead.
pub fn cev_log_density<T: Real>(p: &CevParams<T>, x: T) -> Result<T> {
    check_x(x)?;
    let lx = x.ln();
    let su = (c::<T>(2.0) * p.beta.abs() * lx - p.scale().ln()).exp().sqrt();
    Ok(log_prefactor(p, lx) + log_kernel(p, su)?)
}

/// log of x^{−2β−3/2} x₀^{1/2}/(δ²|β|T) given log x.
fn log_prefactor<T: Real>(p: &CevParams<T>, lx: T) -> T {
    (c::<T>(-2.0) * p.beta - c::<T>(1.5)) * lx + c::<T>(0.5) * p.x0.ln()
        - (p.delta * p.delta * p.beta.abs() * p.maturity).ln()
}

/// −(u − √ζ)² + log(e^{−z}I_ν(z)) with z = 2u√ζ and u = √w.
fn log_kernel<T: Real>(p: &CevParams<T>, u: T) -> Result<T> {
    let sz = p.zeta().sqrt();
    let gap = u - sz;
    Ok(-gap * gap + log_bessel_i_scaled(p.nu(), c::<T>(2.0) * u * sz)?)
}

pub fn cev_density<T: Real>(p: &CevParams<T>, x: T) -> Result<T> {
    Ok(cev_log_density(p, x)?.exp())
}

/// Survival mass ∫₀^∞ p dx, integrated in u = √w with w = x^{2|β|}/(2δ²β²T),
/// where the mass sits in a window of width O(1) around √ζ.
pub fn cev_survival_mass<T: Real>(p: &CevParams<T>) -> Result<T> {
    let inv = T::one() / (c::<T>(2.0) * p.beta.abs());
    let log_scale = p.scale().ln();
    let log_beta = p.beta.abs().ln();
    // p(x) dx = p(x) · x/(|β|u) du
    let integrand = |u: T| -> T {
        if u <= T::zero() {
            return T::zero();
        }
        let lu = u.ln();
        let lx = inv * (log_scale + c::<T>(2.0) * lu);
        match log_kernel(p, u) {
            Ok(k) => (log_prefactor(p, lx) + k + lx - log_beta - lu).exp(),
            Err(_) => T::nan(),
        }
    };
    let centre = p.zeta().sqrt();
    let upper = centre + c::<T>(50.0) + (c::<T>(10.0) * (p.nu() + T::one())).sqrt();
    let mut breaks = vec![T::zero()];
    for &off in &[-40.0, -10.0, -3.0, 0.0, 3.0, 10.0, 40.0] {
        let b = centre + c::<T>(off);
        if b > T::zero() && b < upper {
            breaks.push(b);
        }
    }
    breaks.push(upper);
    let tol = c::<T>(1e-12).max(T::tol_floor(T::one()));
    Ok(integrate_pieces(integrand, &breaks, QuadOptions::abs(tol))?.value)
}

/// P(absorbed by T) = 1 − ∫₀^∞ p dx, clamped to [0, 1].
pub fn cev_absorption_prob<T: Real>(p: &CevParams<T>) -> Result<T> {
    let mass = cev_survival_mass(p)?;
    Ok((T::one() - mass).max(T::zero()).min(T::one()))
}

/// Closed-form cross-check Γ(ν, ζ)/Γ(ν) (regularised upper incomplete gamma).
pub fn cev_absorption_closed_form<T: Real>(p: &CevParams<T>) -> T {
    c(statrs::function::gamma::gamma_ur(p.nu().to_f64_lossy(), p.zeta().to_f64_lossy()))
}

/// x^{2|β|}/(2δ²β²T), the leading term of −log p(T; x₀, x).
pub fn cev_tail_asymptote<T: Real>(p: &CevParams<T>, x: T) -> Result<T> {
    check_x(x)?;
    Ok(x.powf(c::<T>(2.0) * p.beta.abs()) / p.scale())
}
