//! Volatility functions σ(t, x), their derivatives and bounds, and the
//! divergence-form drift μ entering the energy functional.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Expression, Vars};
use crate::real::{c, Real};

/// Which σ the model evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum VolKind<T> {
    Constant { sigma0: T },
    /// σ(x) = ½ − 0.1·e^{1−x²} + 0.4·e^{−2eˣ}
    FigureOne,
    /// σ(x) = δ·x^{1+β}, defined for x > 0.
    CevLocal { delta: T, beta: T },
    /// User expression in `x` (and optionally `t`).
    Expression(Expression),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode<T> {
    Analytic,
    /// Central differences with step `h`; `None` uses 1e−5·max(1, |x|).
    CentralDifference { h: Option<T> },
}

/// A one-dimensional volatility specification with positive bounds on its
/// declared domain. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct VolModel<T> {
    kind: VolKind<T>,
    sigma_lo: T,
    sigma_hi: T,
    derivative_mode: DerivativeMode<T>,
    domain: (T, T),
}

/// Sampling window used to estimate or verify bounds of the bounded kinds.
pub const BOUNDED_DOMAIN: (f64, f64) = (-10.0, 10.0);
/// Declared domain of the CEV local-volatility kind.
pub const CEV_DOMAIN: (f64, f64) = (0.01, 100.0);
const BOUND_SAMPLES: usize = 20_001;
const TIME_SAMPLES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn grid<T: Real>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    let step = (hi - lo) / T::from_usize(n - 1).unwrap();
    (0..n).map(move |i| lo + step * T::from_usize(i).unwrap())
}

fn figure_one<T: Real>(x: T) -> T {
    c::<T>(0.5) - c::<T>(0.1) * (T::one() - x * x).exp() + c::<T>(0.4) * (c::<T>(-2.0) * x.exp()).exp()
}

fn figure_one_dx<T: Real>(x: T) -> T {
    c::<T>(0.2) * x * (T::one() - x * x).exp() - c::<T>(0.8) * (x - c::<T>(2.0) * x.exp()).exp()
}

fn figure_one_dxx<T: Real>(x: T) -> T {
    let g = (T::one() - x * x).exp();
    c::<T>(0.2) * g - c::<T>(0.4) * x * x * g - c::<T>(0.8) * (x - c::<T>(2.0) * x.exp()).exp()
        + c::<T>(1.6) * (c::<T>(2.0) * x - c::<T>(2.0) * x.exp()).exp()
}

impl<T: Real> VolModel<T> {
    pub fn constant(sigma0: T) -> Result<Self> {
        if !(sigma0 > T::zero() && sigma0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma0",
                value: sigma0.to_f64_lossy(),
                reason: "must be positive and finite",
            });
        }
        Ok(Self {
            kind: VolKind::Constant { sigma0 },
            sigma_lo: sigma0,
            sigma_hi: sigma0,
            derivative_mode: DerivativeMode::Analytic,
            domain: (T::neg_infinity(), T::infinity()),
        })
    }

    /// The local volatility ½ − 0.1e^{1−x²} + 0.4e^{−2eˣ}. Its supremum 0.9 is
    /// the x → −∞ limit; the infimum is located by grid search plus golden
    /// section refinement.
    pub fn figure_one() -> Self {
        let (lo, hi) = (c::<T>(BOUNDED_DOMAIN.0), c::<T>(BOUNDED_DOMAIN.1));
        let step = (hi - lo) / T::from_usize(BOUND_SAMPLES - 1).unwrap();
        let (mut arg, mut min) = (lo, T::infinity());
        for x in grid(lo, hi, BOUND_SAMPLES) {
            let s = figure_one(x);
            if s < min {
                min = s;
                arg = x;
            }
        }
        let refined = golden_min(figure_one, arg - step, arg + step);
        Self {
            kind: VolKind::FigureOne,
            sigma_lo: min.min(refined),
            sigma_hi: c(0.9),
            derivative_mode: DerivativeMode::Analytic,
            domain: (T::neg_infinity(), T::infinity()),
        }
    }

    /// σ(x) = δx^{1+β} restricted to the declared domain [0.01, 100] for its
    /// bounds; evaluation is allowed on all of x > 0.
    pub fn cev_local(delta: T, beta: T) -> Result<Self> {
        if !(delta > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta.to_f64_lossy(),
                reason: "must be positive",
            });
        }
        if !(beta < T::zero()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta.to_f64_lossy(),
                reason: "must be negative",
            });
        }
        let domain = (c::<T>(CEV_DOMAIN.0), c::<T>(CEV_DOMAIN.1));
        let a = delta * domain.0.powf(T::one() + beta);
        let b = delta * domain.1.powf(T::one() + beta);
        Ok(Self {
            kind: VolKind::CevLocal { delta, beta },
            sigma_lo: a.min(b),
            sigma_hi: a.max(b),
            derivative_mode: DerivativeMode::Analytic,
            domain,
        })
    }

    /// A user expression with bounds estimated by sampling. The caller must
    /// confirm the estimate (`confirm_bounds`); otherwise the estimate is
    /// returned inside [`Error::BoundsUnconfirmed`].
    pub fn expression(expr: Expression, confirm_bounds: bool) -> Result<Self> {
        let (lo, hi): (T, T) = sample_range(&expr)?;
        if !confirm_bounds {
            return Err(Error::BoundsUnconfirmed {
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        Ok(Self {
            kind: VolKind::Expression(expr),
            sigma_lo: lo,
            sigma_hi: hi,
            derivative_mode: DerivativeMode::CentralDifference { h: None },
            domain: (T::neg_infinity(), T::infinity()),
        })
    }

    /// A user expression with explicitly declared bounds, verified by sampling.
    pub fn expression_with_bounds(expr: Expression, sigma_lo: T, sigma_hi: T) -> Result<Self> {
        if !(sigma_lo > T::zero() && sigma_lo <= sigma_hi) {
            return Err(Error::InvalidParameter {
                name: "sigma_lo",
                value: sigma_lo.to_f64_lossy(),
                reason: "need 0 < sigma_lo <= sigma_hi",
            });
        }
        let model = Self {
            kind: VolKind::Expression(expr),
            sigma_lo,
            sigma_hi,
            derivative_mode: DerivativeMode::CentralDifference { h: None },
            domain: (T::neg_infinity(), T::infinity()),
        };
        model.verify_bounds()?;
        Ok(model)
    }

    pub fn with_derivative_mode(mut self, mode: DerivativeMode<T>) -> Self {
        self.derivative_mode = mode;
        self
    }

    pub fn kind(&self) -> &VolKind<T> {
        &self.kind
    }

    pub fn sigma_lo(&self) -> T {
        self.sigma_lo
    }

    pub fn sigma_hi(&self) -> T {
        self.sigma_hi
    }

    pub fn derivative_mode(&self) -> DerivativeMode<T> {
        self.derivative_mode
    }

    /// Domain on which the bounds hold.
    pub fn domain(&self) -> (T, T) {
        self.domain
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(&self.kind, VolKind::Expression(e) if e.uses_time())
    }

    /// Unchecked σ(t, x); NaN outside the domain of the CEV kind.
    #[inline]
    pub fn sigma(&self, t: T, x: T) -> T {
        match &self.kind {
            VolKind::Constant { sigma0 } => *sigma0,
            VolKind::FigureOne => figure_one(x),
            VolKind::CevLocal { delta, beta } => {
                if x > T::zero() {
                    *delta * x.powf(T::one() + *beta)
                } else {
                    T::nan()
                }
            }
            VolKind::Expression(e) => e.eval(Vars { x, t, s: T::zero() }),
        }
    }

    /// σ(x) (or σ(t, x) when `t` is given), checking the domain.
    pub fn eval_sigma(&self, x: T, t: Option<T>) -> Result<T> {
        if matches!(self.kind, VolKind::CevLocal { .. }) && !(x > T::zero()) {
            return Err(Error::Domain {
                name: "x",
                value: x.to_f64_lossy(),
                reason: "cev-local volatility needs x > 0",
            });
        }
        Ok(self.sigma(t.unwrap_or_else(T::zero), x))
    }

    fn step(&self, x: T, h: Option<T>, order: i32) -> T {
        if let Some(h) = h {
            return h;
        }
        let base = if order == 1 {
            c::<T>(1e-5).max(T::epsilon().cbrt())
        } else {
            c::<T>(1e-4).max(T::epsilon().powf(c(0.25)))
        };
        base * T::one().max(x.abs())
    }

    /// ∂σ/∂x.
    pub fn sigma_dx(&self, t: T, x: T) -> Result<T> {
        match (self.derivative_mode, &self.kind) {
            (DerivativeMode::CentralDifference { h }, _) => {
                let h = self.step(x, h, 1);
                Ok((self.sigma(t, x + h) - self.sigma(t, x - h)) / (c::<T>(2.0) * h))
            }
            (DerivativeMode::Analytic, VolKind::Constant { .. }) => Ok(T::zero()),
            (DerivativeMode::Analytic, VolKind::FigureOne) => Ok(figure_one_dx(x)),
            (DerivativeMode::Analytic, VolKind::CevLocal { delta, beta }) => {
                Ok(*delta * (T::one() + *beta) * x.powf(*beta))
            }
            (DerivativeMode::Analytic, VolKind::Expression(_)) => Err(Error::DerivativeUnavailable),
        }
    }

    /// ∂²σ/∂x².
    pub fn sigma_dxx(&self, t: T, x: T) -> Result<T> {
        match (self.derivative_mode, &self.kind) {
            (DerivativeMode::CentralDifference { h }, _) => {
                let h = self.step(x, h.map(|h| h * c(10.0)), 2);
                Ok((self.sigma(t, x + h) - c::<T>(2.0) * self.sigma(t, x) + self.sigma(t, x - h)) / (h * h))
            }
            (DerivativeMode::Analytic, VolKind::Constant { .. }) => Ok(T::zero()),
            (DerivativeMode::Analytic, VolKind::FigureOne) => Ok(figure_one_dxx(x)),
            (DerivativeMode::Analytic, VolKind::CevLocal { delta, beta }) => {
                Ok(*delta * (T::one() + *beta) * *beta * x.powf(*beta - T::one()))
            }
            (DerivativeMode::Analytic, VolKind::Expression(_)) => Err(Error::DerivativeUnavailable),
        }
    }

    /// ∂σ/∂t; zero for time-homogeneous models.
    pub fn sigma_dt(&self, t: T, x: T) -> T {
        if !self.is_time_dependent() {
            return T::zero();
        }
        let h = self.step(t, None, 1);
        (self.sigma(t + h, x) - self.sigma(t - h, x)) / (c::<T>(2.0) * h)
    }

    /// Re-samples σ on the bound-checking grid and fails if it leaves
    /// `[sigma_lo, sigma_hi]` by more than 1e−9 relative.
    pub fn verify_bounds(&self) -> Result<()> {
        let (a, b) = self.sampling_window();
        let slack = c::<T>(1e-9).max(T::tol_floor(T::one()));
        for &t in &TIME_SAMPLES {
            for x in grid(a, b, 10_000) {
                let s = self.sigma(c(t), x);
                if !(s >= self.sigma_lo * (T::one() - slack) && s <= self.sigma_hi * (T::one() + slack)) {
                    return Err(Error::BoundsViolated {
                        x: x.to_f64_lossy(),
                        sigma: s.to_f64_lossy(),
                        lo: self.sigma_lo.to_f64_lossy(),
                        hi: self.sigma_hi.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Finite window used for sampling: the declared domain, clipped to
    /// [−10, 10] for kinds defined on the whole line.
    pub fn sampling_window(&self) -> (T, T) {
        (
            self.domain.0.max(c(BOUNDED_DOMAIN.0)),
            self.domain.1.min(c(BOUNDED_DOMAIN.1)),
        )
    }
}

fn sample_range<T: Real>(expr: &Expression) -> Result<(T, T)> {
    let (a, b) = (c::<T>(BOUNDED_DOMAIN.0), c::<T>(BOUNDED_DOMAIN.1));
    let times: &[f64] = if expr.uses_time() { &TIME_SAMPLES } else { &TIME_SAMPLES[..1] };
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for &t in times {
        for x in grid(a, b, BOUND_SAMPLES) {
            let s = expr.eval(Vars { x, t: c(t), s: T::zero() });
            if !(s > T::zero() && s.is_finite()) {
                return Err(Error::BoundsViolated {
                    x: x.to_f64_lossy(),
                    sigma: s.to_f64_lossy(),
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    Ok((lo, hi))
}

fn golden_min<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let g = c::<T>(0.618_033_988_749_894_8);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if (b - a).abs() <= T::epsilon() * (T::one() + a.abs()) {
            break;
        }
    }
    f1.min(f2)
}

type DriftFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// An explicit drift μ(t, x).
#[derive(Clone)]
pub enum Drift<T> {
    Zero,
    Constant(T),
    Expression(Expression),
    Custom(DriftFn<T>),
}

impl<T: fmt::Debug> fmt::Debug for Drift<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::Zero => write!(f, "Zero"),
            Drift::Constant(v) => write!(f, "Constant({v:?})"),
            Drift::Expression(e) => write!(f, "{e:?}"),
            Drift::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl<T: Real> Drift<T> {
    pub fn custom(f: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Drift::Custom(Arc::new(f))
    }

    fn eval(&self, t: T, x: T) -> T {
        match self {
            Drift::Zero => T::zero(),
            Drift::Constant(v) => *v,
            Drift::Expression(e) => e.eval(Vars { x, t, s: T::zero() }),
            Drift::Custom(f) => f(t, x),
        }
    }
}

/// How the divergence-form drift μ = a(b − b̂) is obtained.
///
/// `DriftlessLogStock` describes the log of a driftless stock,
/// dX = −½σ²dt + σdW; matching its generator against the divergence form
/// gives μ = −½σ² − σσ'. `Explicit` supplies μ directly (for example μ ≡ 0,
/// the b = b̂ case).
#[derive(Debug, Clone)]
pub enum DriftSpec<T> {
    DriftlessLogStock,
    Explicit(Drift<T>),
}

impl<T: Real> DriftSpec<T> {
    pub fn zero() -> Self {
        DriftSpec::Explicit(Drift::Zero)
    }

    /// μ(t, x) entering the energy functional.
    pub fn mu(&self, model: &VolModel<T>, t: T, x: T) -> Result<T> {
        match self {
            DriftSpec::DriftlessLogStock => {
                let s = model.sigma(t, x);
                Ok(-c::<T>(0.5) * s * s - s * model.sigma_dx(t, x)?)
            }
            DriftSpec::Explicit(d) => Ok(d.eval(t, x)),
        }
    }

    /// ∂μ/∂x.
    pub fn mu_dx(&self, model: &VolModel<T>, t: T, x: T) -> Result<T> {
        match self {
            DriftSpec::DriftlessLogStock => {
                let s = model.sigma(t, x);
                let s1 = model.sigma_dx(t, x)?;
                let s2 = model.sigma_dxx(t, x)?;
                Ok(-s * s1 - s1 * s1 - s * s2)
            }
            DriftSpec::Explicit(Drift::Zero) | DriftSpec::Explicit(Drift::Constant(_)) => Ok(T::zero()),
            DriftSpec::Explicit(d) => {
                let h = c::<T>(1e-5).max(T::epsilon().cbrt()) * T::one().max(x.abs());
                Ok((d.eval(t, x + h) - d.eval(t, x - h)) / (c::<T>(2.0) * h))
            }
        }
    }

    /// ∂μ/∂t by central differences; zero when nothing depends on time.
    pub fn mu_dt(&self, model: &VolModel<T>, t: T, x: T) -> Result<T> {
        let time_dependent = match self {
            DriftSpec::DriftlessLogStock => model.is_time_dependent(),
            DriftSpec::Explicit(Drift::Zero) | DriftSpec::Explicit(Drift::Constant(_)) => false,
            DriftSpec::Explicit(Drift::Expression(e)) => e.uses_time(),
            DriftSpec::Explicit(Drift::Custom(_)) => true,
        };
        if !time_dependent {
            return Ok(T::zero());
        }
        let h = c::<T>(1e-5).max(T::epsilon().cbrt()) * T::one().max(t.abs());
        Ok((self.mu(model, t + h, x)? - self.mu(model, t - h, x)?) / (c::<T>(2.0) * h))
    }

    /// Drift of the simulated SDE: −½σ² for the log-stock, μ otherwise.
    pub fn sde_drift(&self, model: &VolModel<T>, t: T, x: T) -> T {
        match self {
            DriftSpec::DriftlessLogStock => {
                let s = model.sigma(t, x);
                -c::<T>(0.5) * s * s
            }
            DriftSpec::Explicit(d) => d.eval(t, x),
        }
    }
}

/// μ(x) = −½σ²(x) − σ(x)σ'(x) of the driftless log-stock.
pub fn drift_mu<T: Real>(model: &VolModel<T>, x: T) -> Result<T> {
    model.eval_sigma(x, None)?;
    DriftSpec::DriftlessLogStock.mu(model, T::zero(), x)
}

/// Builds a model from `key=value` pairs of a `[vol]` section:
/// `kind` ∈ {constant, figure1, cev-local, expr}, plus `sigma0`, `delta`,
/// `beta`, `expr`, `sigma_lo`/`sigma_hi`, `confirm_bounds` and
/// `derivative` ∈ {analytic, central} with optional `h`.
pub fn vol_from_pairs<'a, I>(pairs: I) -> std::result::Result<VolModel<f64>, String>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut map = std::collections::HashMap::new();
    for (k, v) in pairs {
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let num = |key: &str| -> std::result::Result<Option<f64>, String> {
        map.get(key)
            .map(|v| v.parse::<f64>().map_err(|_| format!("{key}: '{v}' is not a number")))
            .transpose()
    };
    let need = |key: &str| -> std::result::Result<f64, String> {
        num(key)?.ok_or_else(|| format!("missing key '{key}'"))
    };
    let kind = map.get("kind").map(String::as_str).unwrap_or("figure1");
    let model = match kind {
        "constant" => VolModel::constant(need("sigma0")?),
        "figure1" | "paper-figure-1" | "figure-1" => Ok(VolModel::figure_one()),
        "cev-local" | "cev" => VolModel::cev_local(need("delta")?, need("beta")?),
        "expr" | "expression" | "user-expression" => {
            let src = map.get("expr").ok_or("missing key 'expr'")?;
            let e = Expression::parse(src).map_err(|e| e.to_string())?;
            match (num("sigma_lo")?, num("sigma_hi")?) {
                (Some(lo), Some(hi)) => VolModel::expression_with_bounds(e, lo, hi),
                _ => {
                    let confirm = matches!(
                        map.get("confirm_bounds").map(String::as_str),
                        Some("true") | Some("yes") | Some("1")
                    );
                    VolModel::expression(e, confirm)
                }
            }
        }
        other => return Err(format!("unknown vol kind '{other}'")),
    }
    .map_err(|e| e.to_string())?;
    let model = match map.get("derivative").map(String::as_str) {
        None => model,
        Some("analytic") => model.with_derivative_mode(DerivativeMode::Analytic),
        Some("central") | Some("central-difference") => {
            model.with_derivative_mode(DerivativeMode::CentralDifference { h: num("h")? })
        }
        Some(other) => return Err(format!("unknown derivative mode '{other}'")),
    };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_evaluates_everywhere() {
        let m = VolModel::constant(0.2).unwrap();
        assert_eq!(m.eval_sigma(3.7, None).unwrap(), 0.2);
        assert_eq!(m.eval_sigma(-1e6, Some(5.0)).unwrap(), 0.2);
        assert!(VolModel::constant(0.0).is_err());
    }

    #[test]
    fn figure_one_at_origin() {
        // 0.5 − 0.1e + 0.4e^{−2}
        let m = VolModel::<f64>::figure_one();
        let v = m.eval_sigma(0.0, None).unwrap();
        assert!((v - 0.282_305_930_448_740_5).abs() < 1e-15, "{v}");
        assert!(m.sigma_lo() > 0.27 && m.sigma_lo() < v);
        assert_eq!(m.sigma_hi(), 0.9);
    }

    #[test]
    fn cev_local_power_law() {
        let m = VolModel::<f64>::cev_local(0.2, -0.5).unwrap();
        assert!((m.eval_sigma(4.0, None).unwrap() - 0.4).abs() < 1e-15);
        assert!(matches!(m.eval_sigma(0.0, None), Err(Error::Domain { .. })));
        assert!(matches!(m.eval_sigma(-1.0, None), Err(Error::Domain { .. })));
    }

    #[test]
    fn drift_of_constant_model() {
        let m = VolModel::<f64>::constant(0.3).unwrap();
        assert!((drift_mu(&m, 1.0).unwrap() + 0.045).abs() < 1e-15);
        for &x in &[-50.0, 0.0, 12.0] {
            assert_eq!(drift_mu(&m, x).unwrap(), drift_mu(&m, 1.0).unwrap());
        }
    }

    #[test]
    fn figure_one_drift_matches_central_difference() {
        let m = VolModel::<f64>::figure_one();
        let cd = m.clone().with_derivative_mode(DerivativeMode::CentralDifference { h: None });
        // Independent oracle: σ and a hand-rolled symmetric difference.
        let s = |x: f64| 0.5 - 0.1 * (1.0 - x * x).exp() + 0.4 * (-2.0 * x.exp()).exp();
        let h = 1e-5;
        let ds = (s(h) - s(-h)) / (2.0 * h);
        let oracle = -0.5 * s(0.0) * s(0.0) - s(0.0) * ds;
        assert!((drift_mu(&m, 0.0).unwrap() - oracle).abs() < 1e-8);
        assert!((drift_mu(&cd, 0.0).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn expression_requires_confirmation() {
        let e = Expression::parse("0.3 + 0.1*exp(-x^2)").unwrap();
        match VolModel::<f64>::expression(e.clone(), false) {
            Err(Error::BoundsUnconfirmed { lo, hi }) => {
                assert!((lo - 0.3).abs() < 1e-9 && (hi - 0.4).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        let m = VolModel::<f64>::expression(e, true).unwrap();
        assert!(matches!(
            m.clone().with_derivative_mode(DerivativeMode::Analytic).sigma_dx(0.0, 1.0),
            Err(Error::DerivativeUnavailable)
        ));
        assert!(drift_mu(&m, 0.5).is_ok());
    }

    #[test]
    fn expression_bounds_are_checked() {
        let e = Expression::parse("0.3 + 0.1*exp(-x^2)").unwrap();
        assert!(VolModel::<f64>::expression_with_bounds(e.clone(), 0.3, 0.4).is_ok());
        assert!(matches!(
            VolModel::<f64>::expression_with_bounds(e, 0.3, 0.35),
            Err(Error::BoundsViolated { .. })
        ));
        let neg = Expression::parse("x").unwrap();
        assert!(VolModel::<f64>::expression(neg, true).is_err());
    }

    #[test]
    fn config_pairs() {
        let m = vol_from_pairs([("kind", "constant"), ("sigma0", "0.25")]).unwrap();
        assert_eq!(m.sigma(0.0, 1.0), 0.25);
        let m = vol_from_pairs([("kind", "expr"), ("expr", "0.2+0*x"), ("confirm_bounds", "true")]).unwrap();
        assert!((m.sigma(0.0, 1.0) - 0.2).abs() < 1e-15);
        assert!(vol_from_pairs([("kind", "expr"), ("expr", "0.2+0*x")]).is_err());
        assert!(vol_from_pairs([("kind", "bogus")]).is_err());
    }

    #[test]
    fn single_precision_model() {
        let m = VolModel::<f32>::figure_one();
        assert!((m.sigma(0.0, 0.0) - 0.282_305_93).abs() < 1e-6);
    }
}
