//! Eigenfunction contracts for recovering the Laplace transform of an
//! independent clock, static replication of smooth payoffs, and the
//! sub-exponential feasibility test for full recovery of the clock law.

use rayon::prelude::*;

use crate::cev::{log_bessel_i, CevParams};
use crate::error::{Error, Result};
use crate::real::{c, Real};
use crate::timechange::{cev_z, CriticalMoment};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenKind<T> {
    /// ψ_λ = e^{√(2λ)x} with x = log(s/anchor).
    Brownian { anchor: T },
    /// ψ_λ = s^{1/2} I_ν(√(2λ) z(s)), z(s) = s^{−β}/(δ|β|).
    Cev(CevParams<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenContract<T> {
    pub lambda: T,
    pub kind: EigenKind<T>,
}

impl<T: Real> EigenContract<T> {
    pub fn new(lambda: T, kind: EigenKind<T>) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda.to_f64_lossy(),
                reason: "must be positive and finite",
            });
        }
        if let EigenKind::Brownian { anchor } = kind {
            if !(anchor > T::zero()) {
                return Err(Error::InvalidParameter {
                    name: "anchor",
                    value: anchor.to_f64_lossy(),
                    reason: "must be positive",
                });
            }
        }
        Ok(Self { lambda, kind })
    }

    pub fn brownian(lambda: T) -> Result<Self> {
        Self::new(lambda, EigenKind::Brownian { anchor: T::one() })
    }

    pub fn cev(lambda: T, p: CevParams<T>) -> Result<Self> {
        Self::new(lambda, EigenKind::Cev(p))
    }
}

/// log ψ_λ(s); −∞ at s = 0 for the CEV kind (killed paths).
pub fn log_eigenfunction_value<T: Real>(contract: &EigenContract<T>, s: T) -> Result<T> {
    let root = (c::<T>(2.0) * contract.lambda).sqrt();
    match contract.kind {
        EigenKind::Brownian { anchor } => {
            if !(s > T::zero()) {
                return Err(Error::Domain {
                    name: "s",
                    value: s.to_f64_lossy(),
                    reason: "brownian contract needs s > 0",
                });
            }
            Ok(root * (s / anchor).ln())
        }
        EigenKind::Cev(p) => {
            if s == T::zero() {
                return Ok(T::neg_infinity());
            }
            if !(s > T::zero()) {
                return Err(Error::Domain {
                    name: "s",
                    value: s.to_f64_lossy(),
                    reason: "cev contract needs s >= 0",
                });
            }
            Ok(c::<T>(0.5) * s.ln() + log_bessel_i(p.nu(), root * cev_z(&p, s))?)
        }
    }
}

pub fn eigenfunction_value<T: Real>(contract: &EigenContract<T>, s: T) -> Result<T> {
    Ok(log_eigenfunction_value(contract, s)?.exp())
}

/// Terminal law of S_T.
#[derive(Debug, Clone, Copy)]
pub enum TerminalLaw<'a, T> {
    /// Draws of S_T; absorbed CEV paths are 0.
    Samples(&'a [T]),
    /// Density values on an increasing grid, plus the mass of an atom at 0.
    Density { grid: &'a [T], density: &'a [T], atom_at_zero: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate<T> {
    pub value: T,
    /// Zero on the quadrature path.
    pub half_width_95: T,
    pub n_effective: usize,
    /// Largest single term exceeds 10% of the total.
    pub heavy_tail_flag: bool,
}

const CHUNK: usize = 4096;

/// E e^{λτ(T)} = E ψ_λ(S_T)/ψ_λ(s₀). Sample means are summed in fixed chunks
/// and the chunk sums added in order, so the result does not depend on
/// scheduling.
pub fn recover_clock_laplace<T: Real>(
    contract: &EigenContract<T>,
    s0: T,
    law: TerminalLaw<'_, T>,
) -> Result<LaplaceEstimate<T>> {
    let base = log_eigenfunction_value(contract, s0)?;
    let ratio = |s: T| -> Result<T> { Ok((log_eigenfunction_value(contract, s)? - base).exp()) };
    match law {
        TerminalLaw::Samples(samples) => {
            if samples.is_empty() {
                return Err(Error::EmptyInput);
            }
            let parts: Vec<(T, T, T)> = samples
                .par_chunks(CHUNK)
                .map(|chunk| -> Result<(T, T, T)> {
                    let (mut sum, mut sq, mut max) = (T::zero(), T::zero(), T::zero());
                    for &s in chunk {
                        let r = ratio(s)?;
                        sum = sum + r;
                        sq = sq + r * r;
                        max = max.max(r);
                    }
                    Ok((sum, sq, max))
                })
                .collect::<Result<_>>()?;
            let (mut sum, mut sq, mut max) = (T::zero(), T::zero(), T::zero());
            for (a, b, m) in parts {
                sum = sum + a;
                sq = sq + b;
                max = max.max(m);
            }
            let n = T::from_usize(samples.len()).unwrap();
            let mean = sum / n;
            let var = if samples.len() > 1 {
                ((sq - n * mean * mean) / (n - T::one())).max(T::zero())
            } else {
                T::zero()
            };
            Ok(LaplaceEstimate {
                value: mean,
                half_width_95: c::<T>(1.96) * (var / n).sqrt(),
                n_effective: samples.len(),
                heavy_tail_flag: !(max <= c::<T>(0.1) * sum),
            })
        }
        TerminalLaw::Density {
            grid,
            density,
            atom_at_zero,
        } => {
            if grid.len() < 2 || grid.len() != density.len() {
                return Err(Error::EmptyInput);
            }
            let mut total = if atom_at_zero > T::zero() {
                atom_at_zero * ratio(T::zero())?
            } else {
                T::zero()
            };
            let mut max = total;
            let mut prev = ratio(grid[0])? * density[0];
            for i in 1..grid.len() {
                let cur = ratio(grid[i])? * density[i];
                let piece = c::<T>(0.5) * (grid[i] - grid[i - 1]) * (prev + cur);
                total = total + piece;
                max = max.max(piece);
                prev = cur;
            }
            Ok(LaplaceEstimate {
                value: total,
                half_width_95: T::zero(),
                n_effective: grid.len(),
                heavy_tail_flag: !(max <= c::<T>(0.1) * total),
            })
        }
    }
}

/// A payoff with its first two derivatives.
pub trait Payoff<T> {
    fn value(&self, s: T) -> T;
    fn d1(&self, s: T) -> T;
    fn d2(&self, s: T) -> T;
}

/// Payoff from a plain function; derivatives by central differences.
pub struct NumericPayoff<F> {
    pub f: F,
}

impl<T: Real, F: Fn(T) -> T> Payoff<T> for NumericPayoff<F> {
    fn value(&self, s: T) -> T {
        (self.f)(s)
    }

    fn d1(&self, s: T) -> T {
        let h = T::epsilon().cbrt() * T::one().max(s.abs());
        ((self.f)(s + h) - (self.f)(s - h)) / (c::<T>(2.0) * h)
    }

    fn d2(&self, s: T) -> T {
        let h = T::epsilon().powf(c(0.25)) * T::one().max(s.abs());
        ((self.f)(s + h) - c::<T>(2.0) * (self.f)(s) + (self.f)(s - h)) / (h * h)
    }
}

/// Payoff from a function and its exact derivatives.
pub struct AnalyticPayoff<F, G, H> {
    pub f: F,
    pub df: G,
    pub d2f: H,
}

impl<T, F, G, H> Payoff<T> for AnalyticPayoff<F, G, H>
where
    F: Fn(T) -> T,
    G: Fn(T) -> T,
    H: Fn(T) -> T,
{
    fn value(&self, s: T) -> T {
        (self.f)(s)
    }

    fn d1(&self, s: T) -> T {
        (self.df)(s)
    }

    fn d2(&self, s: T) -> T {
        (self.d2f)(s)
    }
}

/// g(S) ≈ g(F) + g'(F)(S − F) + Σ_{K<F} w_K (K − S)⁺ + Σ_{K>F} w_K (S − K)⁺
/// with w_K = g''(K)·ΔK (trapezoid weights). F itself appears on both sides
/// with half weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationWeights<T> {
    pub forward_point: T,
    pub cash: T,
    pub forward: T,
    pub put_strikes: Vec<T>,
    pub put_weights: Vec<T>,
    pub call_strikes: Vec<T>,
    pub call_weights: Vec<T>,
}

impl<T: Real> ReplicationWeights<T> {
    /// Portfolio payoff at terminal level `s`.
    pub fn reconstruct(&self, s: T) -> T {
        let mut v = self.cash + self.forward * (s - self.forward_point);
        for (k, w) in self.put_strikes.iter().zip(&self.put_weights) {
            v = v + *w * (*k - s).max(T::zero());
        }
        for (k, w) in self.call_strikes.iter().zip(&self.call_weights) {
            v = v + *w * (s - *k).max(T::zero());
        }
        v
    }

    /// Largest |reconstruct − g| over `points`.
    pub fn max_error<P: Payoff<T>>(&self, payoff: &P, points: &[T]) -> T {
        points
            .iter()
            .fold(T::zero(), |a, s| a.max((self.reconstruct(*s) - payoff.value(*s)).abs()))
    }

    /// Checks the reconstruction on every interior grid strike.
    pub fn verify<P: Payoff<T>>(&self, payoff: &P, tolerance: T) -> Result<T> {
        let pts: Vec<T> = self
            .put_strikes
            .iter()
            .chain(&self.call_strikes)
            .copied()
            .collect();
        let err = self.max_error(payoff, &pts);
        if err > tolerance {
            return Err(Error::GridTooCoarse {
                error: err.to_f64_lossy(),
                tolerance: tolerance.to_f64_lossy(),
            });
        }
        Ok(err)
    }

    /// E[reconstruct(S)] given the forward E S and option prices.
    pub fn price(&self, forward_price: T, put: impl Fn(T) -> T, call: impl Fn(T) -> T) -> T {
        let mut v = self.cash + self.forward * (forward_price - self.forward_point);
        for (k, w) in self.put_strikes.iter().zip(&self.put_weights) {
            v = v + *w * put(*k);
        }
        for (k, w) in self.call_strikes.iter().zip(&self.call_weights) {
            v = v + *w * call(*k);
        }
        v
    }
}

/// Carr–Madan weights for `payoff` around `forward_point` on an increasing
/// positive strike grid.
pub fn replication_weights<T: Real, P: Payoff<T>>(
    payoff: &P,
    forward_point: T,
    strike_grid: &[T],
) -> Result<ReplicationWeights<T>> {
    if strike_grid.len() < 2 {
        return Err(Error::EmptyInput);
    }
    if strike_grid.windows(2).any(|w| !(w[1] > w[0])) || !(strike_grid[0] > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "strike_grid",
            value: strike_grid[0].to_f64_lossy(),
            reason: "must be positive and strictly increasing",
        });
    }
    let f = forward_point;
    if !(f > strike_grid[0] && f < strike_grid[strike_grid.len() - 1]) {
        return Err(Error::InvalidParameter {
            name: "forward_point",
            value: f.to_f64_lossy(),
            reason: "must lie inside the strike grid",
        });
    }
    let mut puts: Vec<T> = strike_grid.iter().copied().filter(|k| *k < f).collect();
    let mut calls: Vec<T> = strike_grid.iter().copied().filter(|k| *k > f).collect();
    puts.push(f);
    calls.insert(0, f);
    let weights = |ks: &[T]| -> Vec<T> {
        let n = ks.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { ks[i] - ks[i - 1] } else { T::zero() };
                let right = if i + 1 < n { ks[i + 1] - ks[i] } else { T::zero() };
                payoff.d2(ks[i]) * c::<T>(0.5) * (left + right)
            })
            .collect()
    };
    let put_weights = weights(&puts);
    let call_weights = weights(&calls);
    Ok(ReplicationWeights {
        forward_point: f,
        cash: payoff.value(f),
        forward: payoff.d1(f),
        put_strikes: puts,
        put_weights,
        call_strikes: calls,
        call_weights,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible,
    Infeasible { note: String },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Full recovery of the clock law from one smile needs P(τ > x) to decay
/// faster than every exponential, i.e. an infinite tail slope.
pub fn subexponential_feasibility<T: Real>(clock_tail_slope: T) -> Feasibility {
    if clock_tail_slope == T::infinity() {
        Feasibility::Feasible
    } else {
        Feasibility::Infeasible {
            note: format!(
                "clock tail decays at exponential rate {}; E exp(sqrt(theta) z(S_T)) is infinite for large theta, so the transform cannot be evaluated on the whole axis",
                clock_tail_slope.to_f64_lossy()
            ),
        }
    }
}

/// −lim sup log P(τ > x)/x for the clock, which equals λ*(T).
pub fn clock_tail_slope<T: Real>(cm: &CriticalMoment<T>) -> T {
    cm.lambda_star
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_contract() {
        let c = EigenContract::brownian(0.5).unwrap();
        assert_eq!(eigenfunction_value(&c, 1.0).unwrap(), 1.0);
        assert!((eigenfunction_value(&c, 1f64.exp()).unwrap() - 1f64.exp()).abs() < 1e-14);
        assert!(EigenContract::<f64>::brownian(0.0).is_err());
    }

    #[test]
    fn cev_contract_monotone_in_s_and_lambda() {
        let p = CevParams::new(0.2, -0.5, 1.0, 1.0).unwrap();
        let a = EigenContract::cev(0.5, p).unwrap();
        let b = EigenContract::cev(1.0, p).unwrap();
        let mut prev = 0.0;
        for i in 1..200 {
            let s = i as f64 * 0.05;
            let v = eigenfunction_value(&a, s).unwrap();
            assert!(v > prev);
            assert!(eigenfunction_value(&b, s).unwrap() > v);
            prev = v;
        }
        assert_eq!(eigenfunction_value(&a, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn cev_small_lambda_ratio() {
        // I_ν(x) ~ (x/2)^ν/Γ(ν+1), so ψ(s)/ψ(s₀) → √(s/s₀)(z(s)/z(s₀))^ν.
        let p = CevParams::new(0.2, -0.5, 1.0, 1.0).unwrap();
        let c = EigenContract::cev(1e-12, p).unwrap();
        let (s, s0) = (2.5f64, 1.0f64);
        let r = eigenfunction_value(&c, s).unwrap() / eigenfunction_value(&c, s0).unwrap();
        let lead = (s / s0).sqrt() * (cev_z(&p, s) / cev_z(&p, s0)).powf(p.nu());
        assert!((r / lead - 1.0).abs() < 1e-9);
    }

    #[test]
    fn killed_samples_contribute_zero() {
        let p = CevParams::new(0.2, -0.5, 1.0, 1.0).unwrap();
        let c = EigenContract::cev(0.3, p).unwrap();
        let est = recover_clock_laplace(&c, 1.0, TerminalLaw::Samples(&[1.0f64, 0.0])).unwrap();
        assert!((est.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tiny_lambda_recovers_one() {
        let c = EigenContract::brownian(1e-14).unwrap();
        let s: Vec<f64> = (1..100).map(|i| i as f64 * 0.1).collect();
        let est = recover_clock_laplace(&c, 1.0, TerminalLaw::Samples(&s)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn density_path_matches_gaussian_mgf() {
        // S = e^{W_T}, T = 1: density of S is lognormal.
        let c = EigenContract::brownian(0.5).unwrap();
        let n = 200_001;
        let grid: Vec<f64> = (0..n).map(|i| 1e-6 + i as f64 * 200.0 / (n - 1) as f64).collect();
        let dens: Vec<f64> = grid
            .iter()
            .map(|s| (-(s.ln()).powi(2) / 2.0).exp() / (s * (2.0 * std::f64::consts::PI).sqrt()))
            .collect();
        let est = recover_clock_laplace(
            &c,
            1.0,
            TerminalLaw::Density {
                grid: &grid,
                density: &dens,
                atom_at_zero: 0.0,
            },
        )
        .unwrap();
        assert!((est.value - 0.5f64.exp()).abs() < 1e-4, "{}", est.value);
    }

    #[test]
    fn linear_payoff_is_exact() {
        let g = AnalyticPayoff {
            f: |s: f64| s,
            df: |_| 1.0,
            d2f: |_| 0.0,
        };
        let grid: Vec<f64> = (1..100).map(|i| i as f64 * 0.05).collect();
        let w = replication_weights(&g, 1.0, &grid).unwrap();
        assert_eq!((w.cash, w.forward), (1.0, 1.0));
        assert!(w.put_weights.iter().chain(&w.call_weights).all(|x| *x == 0.0));
        assert!(w.max_error(&g, &grid) < 1e-15);
    }

    #[test]
    fn quadratic_payoff_exact_inside_grid() {
        let g = AnalyticPayoff {
            f: |s: f64| 0.7 * s * s - 1.3 * s + 2.0,
            df: |s| 1.4 * s - 1.3,
            d2f: |_| 1.4,
        };
        let grid: Vec<f64> = (1..=80).map(|i| i as f64 * 0.05).collect();
        let w = replication_weights(&g, 1.234, &grid).unwrap();
        assert!(w.verify(&g, 1e-10).is_ok());
        assert!(matches!(w.verify(&g, -1.0), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn smoothed_call_converges_second_order() {
        let (k0, eps) = (1.0f64, 0.1f64);
        let g = NumericPayoff {
            f: move |s: f64| eps * (1.0 + ((s - k0) / eps).exp()).ln(),
        };
        let g = AnalyticPayoff {
            f: move |s: f64| g.value(s),
            df: move |s: f64| 1.0 / (1.0 + (-(s - k0) / eps).exp()),
            d2f: move |s: f64| {
                let e = (-(s - k0) / eps).exp();
                e / (eps * (1.0 + e) * (1.0 + e))
            },
        };
        let test_pts: Vec<f64> = (0..=40).map(|i| 0.6 + i as f64 * 0.02).collect();
        let err = |dk: f64| {
            let n = (3.0 / dk).round() as usize;
            let grid: Vec<f64> = (1..=n).map(|i| i as f64 * dk).collect();
            replication_weights(&g, 1.03, &grid).unwrap().max_error(&g, &test_pts)
        };
        let (e1, e2) = (err(0.04), err(0.02));
        let ratio = e1 / e2;
        assert!(ratio > 3.0 && ratio < 5.0, "{e1} {e2} {ratio}");
    }

    #[test]
    fn feasibility() {
        assert!(subexponential_feasibility(f64::INFINITY).is_feasible());
        assert!(!subexponential_feasibility(41.0).is_feasible());
        assert!(!subexponential_feasibility(0.0).is_feasible());
        assert!(subexponential_feasibility(clock_tail_slope(&CriticalMoment::<f64>::infinite(1.0))).is_feasible());
    }
}
