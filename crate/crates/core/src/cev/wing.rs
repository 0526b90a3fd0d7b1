//! Right-wing implied-volatility asymptotics.

use crate::cev::CevParams;
use crate::real::{c, Real};

/// A point on the right wing: log-moneyness and the asymptote of I²(k)/k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingPoint<T> {
    pub k: T,
    pub ratio: T,
}

/// ψ(x) = 2 − 4(√(x² + x) − x), evaluated as 2x/(√(x² + x) + x)².
pub fn wing_psi<T: Real>(x: T) -> T {
    if x == T::zero() {
        return c(2.0);
    }
    if x == T::infinity() {
        return T::zero();
    }
    let s = (x * x + x).sqrt();
    c::<T>(2.0) * x / ((s + x) * (s + x))
}

/// k·(x₀eᵏ)^{−2|β|}·δ²β²; maturity does not enter.
pub fn cev_wing_asymptote<T: Real>(p: &CevParams<T>, k: T) -> WingPoint<T> {
    let level = p.x0 * k.exp();
    let ratio = k * level.powf(c::<T>(-2.0) * p.beta.abs()) * p.delta * p.delta * p.beta * p.beta;
    WingPoint { k, ratio }
}

/// ψ(−log f(k)/k − 1)/T with −log f(k) = (x₀eᵏ)^{2|β|}/(2δ²β²T), the return
/// density exponent of the CEV tail. ψ of the decay rate gives the total
/// implied variance slope; dividing by T gives I²(k)/k.
pub fn cev_wing_psi_composed<T: Real>(p: &CevParams<T>, k: T) -> WingPoint<T> {
    let level = p.x0 * k.exp();
    let neg_log_f = level.powf(c::<T>(2.0) * p.beta.abs()) / p.scale();
    let ratio = wing_psi(neg_log_f / k - T::one()) / p.maturity;
    WingPoint { k, ratio }
}

/// k/(2E(t, x₀; u, x₀ + k)) for a local-volatility model.
pub fn locvol_wing_asymptote<T: Real>(k: T, energy: T) -> WingPoint<T> {
    WingPoint {
        k,
        ratio: k / (c::<T>(2.0) * energy),
    }
}
