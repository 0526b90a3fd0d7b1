//! The energy functional E(t, x; u, y) = inf ½∫(γ̇ − μ)²/σ² ds over paths from
//! (t, x) to (u, y), computed by shooting on the Euler–Lagrange equation and,
//! independently, by direct minimisation of the discretised functional.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geodesic::geodesic_distance;
use crate::real::{c, Real};
use crate::roots::brent;
use crate::volmodel::{DriftSpec, VolModel};

/// A boundary-value instance: start (t, x), end (u_time, y).
#[derive(Debug, Clone)]
pub struct EnergyProblem<'a, T> {
    pub t: T,
    pub u_time: T,
    pub x: T,
    pub y: T,
    pub model: &'a VolModel<T>,
    pub drift: &'a DriftSpec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    Shooting,
    DirectMinimization,
}

impl EnergyMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergyMethod::Shooting => "shooting",
            EnergyMethod::DirectMinimization => "direct",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnergySolution<T> {
    pub energy: T,
    /// γ on the uniform grid of `path.len()` points from t to u_time.
    pub path: Vec<T>,
    pub method: EnergyMethod,
    /// |γ(u) − y|.
    pub residual: T,
    /// Number of starting velocities that converged (shooting only).
    pub multistart_count: usize,
    pub iterations: usize,
    /// Energy after each accepted step (direct minimisation only).
    pub energy_history: Vec<T>,
}

/// Norris–Stroock coefficient caps: λ⁻¹ ≤ a ≤ λ with a = ½σ², and Λ bounding
/// μ²/a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsBounds<T> {
    pub lambda_cap: T,
    pub big_lambda_cap: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsCheck<T> {
    pub inside: bool,
    pub lower: T,
    pub upper: T,
    /// energy − lower
    pub lower_margin: T,
    /// upper − energy
    pub upper_margin: T,
}

/// Local coefficients at (s, g).
#[derive(Debug, Clone, Copy)]
struct Coeffs<T> {
    sigma: T,
    sigma_g: T,
    sigma_s: T,
    mu: T,
    mu_g: T,
    mu_s: T,
}

impl<'a, T: Real> EnergyProblem<'a, T> {
    pub fn new(model: &'a VolModel<T>, drift: &'a DriftSpec<T>, t: T, u_time: T, x: T, y: T) -> Result<Self> {
        if !(u_time > t) {
            return Err(Error::InvalidParameter {
                name: "u_time",
                value: u_time.to_f64_lossy(),
                reason: "must exceed t",
            });
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "y",
                value: y.to_f64_lossy(),
                reason: "endpoints must be finite",
            });
        }
        Ok(Self {
            t,
            u_time,
            x,
            y,
            model,
            drift,
        })
    }

    pub fn duration(&self) -> T {
        self.u_time - self.t
    }

    fn coeffs(&self, s: T, g: T) -> Result<Coeffs<T>> {
        Ok(Coeffs {
            sigma: self.model.sigma(s, g),
            sigma_g: self.model.sigma_dx(s, g)?,
            sigma_s: self.model.sigma_dt(s, g),
            mu: self.drift.mu(self.model, s, g)?,
            mu_g: self.drift.mu_dx(self.model, s, g)?,
            mu_s: self.drift.mu_dt(self.model, s, g)?,
        })
    }

    fn lag(&self, s: T, g: T, v: T) -> Result<T> {
        let sigma = self.model.sigma(s, g);
        let d = v - self.drift.mu(self.model, s, g)?;
        Ok(d * d / (c::<T>(2.0) * sigma * sigma))
    }

    /// (L, ∂L/∂g, ∂L/∂v).
    fn lag_grad(&self, s: T, g: T, v: T) -> Result<(T, T, T)> {
        let k = self.coeffs(s, g)?;
        let d = v - k.mu;
        let s2 = k.sigma * k.sigma;
        let l = d * d / (c::<T>(2.0) * s2);
        let lg = -d * k.mu_g / s2 - d * d * k.sigma_g / (s2 * k.sigma);
        Ok((l, lg, d / s2))
    }

    /// γ̈ from the Euler–Lagrange equation of L = (γ̇ − μ)²/(2σ²):
    /// γ̈ = (σ_g/σ)(γ̇² − μ²) + (2σ_s/σ)(γ̇ − μ) + μ_s + μ_g μ.
    fn accel(&self, s: T, g: T, v: T) -> Result<T> {
        let k = self.coeffs(s, g)?;
        Ok(k.sigma_g / k.sigma * (v * v - k.mu * k.mu)
            + c::<T>(2.0) * k.sigma_s / k.sigma * (v - k.mu)
            + k.mu_s
            + k.mu_g * k.mu)
    }

    fn grid_step(&self, n_grid: usize) -> T {
        self.duration() / T::from_usize(n_grid - 1).unwrap()
    }

    fn time(&self, i: usize, h: T) -> T {
        self.t + h * T::from_usize(i).unwrap()
    }
}

/// L(s, g, ġ) = (ġ − μ(s, g))²/(2σ²(s, g)).
pub fn lagrangian<T: Real>(problem: &EnergyProblem<'_, T>, s: T, g: T, gdot: T) -> Result<T> {
    problem.lag(s, g, gdot)
}

/// Trapezoid energy of the piecewise-linear path through `path` (uniform grid).
pub fn path_energy<T: Real>(problem: &EnergyProblem<'_, T>, path: &[T]) -> Result<T> {
    let n = path.len();
    if n < 2 {
        return Err(Error::EmptyInput);
    }
    let h = problem.grid_step(n);
    let half = c::<T>(0.5) * h;
    let mut e = T::zero();
    for i in 0..n - 1 {
        let v = (path[i + 1] - path[i]) / h;
        let (s0, s1) = (problem.time(i, h), problem.time(i + 1, h));
        e = e + half * (problem.lag(s0, path[i], v)? + problem.lag(s1, path[i + 1], v)?);
    }
    Ok(e)
}

/// The straight line from x to y on `n_grid` points.
pub fn straight_path<T: Real>(problem: &EnergyProblem<'_, T>, n_grid: usize) -> Vec<T> {
    let last = T::from_usize(n_grid - 1).unwrap();
    (0..n_grid)
        .map(|i| problem.x + (problem.y - problem.x) * T::from_usize(i).unwrap() / last)
        .collect()
}

struct Shot<T> {
    path: Vec<T>,
    vel: Vec<T>,
}

fn shoot<T: Real>(p: &EnergyProblem<'_, T>, v0: T, n_grid: usize) -> Result<Shot<T>> {
    let h = p.grid_step(n_grid);
    let half = c::<T>(0.5) * h;
    let sixth = h / c(6.0);
    let mut path = Vec::with_capacity(n_grid);
    let mut vel = Vec::with_capacity(n_grid);
    let (mut g, mut v) = (p.x, v0);
    path.push(g);
    vel.push(v);
    for i in 0..n_grid - 1 {
        let s = p.time(i, h);
        let k1g = v;
        let k1v = p.accel(s, g, v)?;
        let k2g = v + half * k1v;
        let k2v = p.accel(s + half, g + half * k1g, k2g)?;
        let k3g = v + half * k2v;
        let k3v = p.accel(s + half, g + half * k2g, k3g)?;
        let k4g = v + h * k3v;
        let k4v = p.accel(s + h, g + h * k3g, k4g)?;
        g = g + sixth * (k1g + c::<T>(2.0) * (k2g + k3g) + k4g);
        v = v + sixth * (k1v + c::<T>(2.0) * (k2v + k3v) + k4v);
        if !(g.is_finite() && v.is_finite()) {
            return Err(Error::Solver("shooting trajectory diverged".into()));
        }
        path.push(g);
        vel.push(v);
    }
    Ok(Shot { path, vel })
}

fn shot_energy<T: Real>(p: &EnergyProblem<'_, T>, shot: &Shot<T>) -> Result<T> {
    let n = shot.path.len();
    let h = p.grid_step(n);
    let mut e = T::zero();
    let mut prev = p.lag(p.t, shot.path[0], shot.vel[0])?;
    for i in 1..n {
        let cur = p.lag(p.time(i, h), shot.path[i], shot.vel[i])?;
        e = e + c::<T>(0.5) * h * (prev + cur);
        prev = cur;
    }
    Ok(e)
}

/// Solves for one initial velocity starting from `v0`. Secant steps until a
/// sign change of the terminal mismatch appears, then Brent on the bracket.
fn solve_from<T: Real>(p: &EnergyProblem<'_, T>, v0: T, n_grid: usize, tol: T) -> Option<T> {
    let miss = |v: T| match shoot(p, v, n_grid) {
        Ok(s) => *s.path.last().unwrap() - p.y,
        Err(_) => T::nan(),
    };
    let scale = T::one().max(v0.abs()).max(((p.y - p.x) / p.duration()).abs());
    let mut a = v0;
    let mut fa = miss(a);
    if !fa.is_finite() {
        return None;
    }
    if fa.abs() <= tol {
        return Some(a);
    }
    let mut b = v0 + c::<T>(0.05) * scale;
    let mut fb = miss(b);
    for _ in 0..60 {
        if !fb.is_finite() {
            b = (a + b) * c(0.5);
            fb = miss(b);
            continue;
        }
        if fb.abs() <= tol {
            return Some(b);
        }
        if fa.signum() != fb.signum() {
            let xtol = c::<T>(1e-15).max(T::tol_floor(T::one())) * scale;
            let root = brent(miss, a.min(b), a.max(b), xtol, 200).ok()?;
            return Some(root);
        }
        let denom = fb - fa;
        let mut next = if denom == T::zero() {
            b + (b - a)
        } else {
            b - fb * (b - a) / denom
        };
        // Keep secant steps from leaping out of the plausible velocity range.
        let cap = c::<T>(10.0) * scale.max((b - a).abs());
        if (next - b).abs() > cap {
            next = b + cap * (next - b).signum();
        }
        a = b;
        fa = fb;
        b = next;
        fb = miss(b);
    }
    None
}

fn seed_velocities<T: Real>(p: &EnergyProblem<'_, T>, multistarts: usize) -> Result<Vec<T>> {
    let slope = (p.y - p.x) / p.duration();
    let mu0 = p.drift.mu(p.model, p.t, p.x)?;
    let mut seeds = vec![slope, mu0];
    for &k in &[0.5, 2.0, 0.25, 4.0] {
        seeds.push(slope * c::<T>(k));
    }
    let mut extra = T::one();
    while seeds.len() < multistarts {
        seeds.push(slope + extra);
        seeds.push(slope - extra);
        extra = extra * c(2.0);
    }
    seeds.truncate(multistarts.max(1));
    Ok(seeds)
}

/// Shooting solution of the Euler–Lagrange equation with RK4 on `n_grid`
/// points. Over the converged starts the lowest energy wins. If no start
/// converges, the direct minimiser is used and the method flagged.
pub fn solve_euler_lagrange<T: Real>(
    problem: &EnergyProblem<'_, T>,
    n_grid: usize,
    multistarts: usize,
) -> Result<EnergySolution<T>> {
    check_grid(n_grid)?;
    let span = T::one().max((problem.y - problem.x).abs());
    let target = c::<T>(1e-10).max(T::tol_floor(c(1e4))) * span;
    let accept = c::<T>(1e-6) * span;
    let mut best: Option<(T, Shot<T>)> = None;
    let mut converged = 0;
    for v0 in seed_velocities(problem, multistarts)? {
        let Some(v) = solve_from(problem, v0, n_grid, target) else {
            continue;
        };
        let Ok(shot) = shoot(problem, v, n_grid) else {
            continue;
        };
        if (*shot.path.last().unwrap() - problem.y).abs() > accept {
            continue;
        }
        let Ok(e) = shot_energy(problem, &shot) else {
            continue;
        };
        converged += 1;
        if best.as_ref().map_or(true, |(b, _)| e < *b) {
            best = Some((e, shot));
        }
    }
    match best {
        Some((energy, shot)) => {
            let residual = (*shot.path.last().unwrap() - problem.y).abs();
            Ok(EnergySolution {
                energy,
                path: shot.path,
                method: EnergyMethod::Shooting,
                residual,
                multistart_count: converged,
                iterations: 0,
                energy_history: Vec::new(),
            })
        }
        None => {
            let sol = direct_minimize_energy(problem, n_grid, 500)
                .map_err(|e| Error::Solver(format!("shooting found no bracket; direct minimisation failed: {e}")))?;
            if !sol.energy.is_finite() {
                return Err(Error::Solver("shooting found no bracket; direct minimisation diverged".into()));
            }
            Ok(sol)
        }
    }
}

fn check_grid(n_grid: usize) -> Result<()> {
    if n_grid < 64 {
        return Err(Error::InvalidParameter {
            name: "n_grid",
            value: n_grid as f64,
            reason: "need at least 64 grid points",
        });
    }
    Ok(())
}

/// Energy and gradient with respect to the interior nodes.
fn energy_and_grad<T: Real>(p: &EnergyProblem<'_, T>, path: &[T], grad: &mut [T]) -> Result<T> {
    let n = path.len();
    let h = p.grid_step(n);
    let half = c::<T>(0.5) * h;
    grad.iter_mut().for_each(|g| *g = T::zero());
    let mut e = T::zero();
    for i in 0..n - 1 {
        let v = (path[i + 1] - path[i]) / h;
        let (l0, g0, v0) = p.lag_grad(p.time(i, h), path[i], v)?;
        let (l1, g1, v1) = p.lag_grad(p.time(i + 1, h), path[i + 1], v)?;
        e = e + half * (l0 + l1);
        // dv/dg_i = −1/h, dv/dg_{i+1} = 1/h
        let dv = c::<T>(0.5) * (v0 + v1);
        grad[i] = grad[i] + half * g0 - dv;
        grad[i + 1] = grad[i + 1] + half * g1 + dv;
    }
    grad[0] = T::zero();
    grad[n - 1] = T::zero();
    Ok(e)
}

/// Solves the tridiagonal system (sub, diag, sup) z = rhs in place; `None` if a
/// pivot is not positive.
fn thomas<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Option<Vec<T>> {
    let m = diag.len();
    let mut cp = vec![T::zero(); m];
    let mut dp = vec![T::zero(); m];
    let mut piv = diag[0];
    if !(piv > T::zero()) {
        return None;
    }
    cp[0] = sup[0] / piv;
    dp[0] = rhs[0] / piv;
    for i in 1..m {
        piv = diag[i] - sub[i] * cp[i - 1];
        if !(piv > T::zero()) || !piv.is_finite() {
            return None;
        }
        cp[i] = sup[i] / piv;
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / piv;
    }
    for i in (0..m - 1).rev() {
        dp[i] = dp[i] - cp[i] * dp[i + 1];
    }
    Some(dp)
}

/// Direct minimisation of the trapezoid functional over piecewise-linear
/// paths with fixed endpoints, started from the straight line. Search
/// directions come from the tridiagonal Hessian (finite differences of the
/// analytic gradient), damped towards steepest descent when it is not
/// positive definite; step lengths use Armijo backtracking with factor 1e−4,
/// so the recorded energy never increases.
pub fn direct_minimize_energy<T: Real>(
    problem: &EnergyProblem<'_, T>,
    n_grid: usize,
    iterations: usize,
) -> Result<EnergySolution<T>> {
    check_grid(n_grid)?;
    let n = n_grid;
    let m = n - 2;
    let mut path = straight_path(problem, n);
    let mut grad = vec![T::zero(); n];
    let mut trial_grad = vec![T::zero(); n];
    let mut energy = energy_and_grad(problem, &path, &mut grad)?;
    if !energy.is_finite() {
        return Err(Error::Solver("non-finite energy on the initial path".into()));
    }
    let mut history = vec![energy];
    let armijo = c::<T>(1e-4);
    let stop = c::<T>(1e-15).max(T::tol_floor(T::one()));
    let mut iters = 0;
    let mut sub = vec![T::zero(); m];
    let mut diag = vec![T::zero(); m];
    let mut sup = vec![T::zero(); m];
    let mut shifted = vec![T::zero(); m];
    let mut work = path.clone();
    for _ in 0..iterations {
        // Tridiagonal Hessian by finite differences, three colours.
        for colour in 0..3 {
            work.copy_from_slice(&path);
            let mut eps_of = vec![T::zero(); n];
            for j in (1 + colour..n - 1).step_by(3) {
                let eps = c::<T>(1e-6).max(T::epsilon().sqrt()) * T::one().max(path[j].abs());
                work[j] = path[j] + eps;
                eps_of[j] = eps;
            }
            energy_and_grad(problem, &work, &mut trial_grad)?;
            for j in (1 + colour..n - 1).step_by(3) {
                let eps = eps_of[j];
                let k = j - 1;
                diag[k] = (trial_grad[j] - grad[j]) / eps;
                if k > 0 {
                    sup[k - 1] = (trial_grad[j - 1] - grad[j - 1]) / eps;
                }
                if k + 1 < m {
                    sub[k + 1] = (trial_grad[j + 1] - grad[j + 1]) / eps;
                }
            }
        }
        for k in 0..m - 1 {
            let avg = c::<T>(0.5) * (sup[k] + sub[k + 1]);
            sup[k] = avg;
            sub[k + 1] = avg;
        }
        let rhs: Vec<T> = grad[1..n - 1].iter().map(|g| -*g).collect();
        let gnorm2: T = rhs.iter().map(|g| *g * *g).sum();
        if gnorm2 == T::zero() {
            break;
        }
        let dscale = diag.iter().fold(T::zero(), |a, d| a.max(d.abs())).max(T::min_positive_value());
        let mut shift = T::zero();
        let mut dir = None;
        for _ in 0..30 {
            for k in 0..m {
                shifted[k] = diag[k] + shift;
            }
            if let Some(d) = thomas(&sub, &shifted, &sup, &rhs) {
                let slope: T = d.iter().zip(&rhs).map(|(a, b)| *a * *b).sum();
                if slope > T::zero() {
                    dir = Some(d);
                    break;
                }
            }
            shift = if shift == T::zero() { dscale * c(1e-8) } else { shift * c(10.0) };
        }
        let dir = dir.unwrap_or_else(|| rhs.iter().map(|g| *g / dscale).collect());
        let slope: T = dir.iter().zip(&rhs).map(|(a, b)| *a * *b).sum();
        if slope <= stop * T::one().max(energy) {
            break;
        }
        let mut step = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            work.copy_from_slice(&path);
            for k in 0..m {
                work[k + 1] = path[k + 1] + step * dir[k];
            }
            let e = energy_and_grad(problem, &work, &mut trial_grad);
            if let Ok(e) = e {
                if e.is_finite() && e <= energy - armijo * step * slope {
                    std::mem::swap(&mut path, &mut work);
                    std::mem::swap(&mut grad, &mut trial_grad);
                    energy = e;
                    accepted = true;
                    break;
                }
            }
            step = step * c(0.5);
        }
        if !accepted {
            break;
        }
        iters += 1;
        history.push(energy);
    }
    Ok(EnergySolution {
        energy,
        path,
        method: EnergyMethod::DirectMinimization,
        residual: T::zero(),
        multistart_count: 0,
        iterations: iters,
        energy_history: history,
    })
}

impl<T: Real> NsBounds<T> {
    pub fn new(lambda_cap: T, big_lambda_cap: T) -> Result<Self> {
        if !(lambda_cap >= T::one() && big_lambda_cap >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "lambda_cap",
                value: lambda_cap.to_f64_lossy(),
                reason: "need lambda >= 1 and Lambda >= 0",
            });
        }
        Ok(Self {
            lambda_cap,
            big_lambda_cap,
        })
    }

    /// λ = max(1, 1/a_lo, a_hi) from the σ range, and Λ = sup μ²/a sampled on
    /// the model's window (times 1.01 for sampling slack).
    pub fn from_model(model: &VolModel<T>, drift: &DriftSpec<T>, times: &[T]) -> Result<Self> {
        let half = c::<T>(0.5);
        let a_lo = half * model.sigma_lo() * model.sigma_lo();
        let a_hi = half * model.sigma_hi() * model.sigma_hi();
        let lambda = T::one().max(T::one() / a_lo).max(a_hi);
        let (lo, hi) = model.sampling_window();
        let n = 20_001;
        let step = (hi - lo) / T::from_usize(n - 1).unwrap();
        let mut sup = T::zero();
        let zero = [T::zero()];
        let times = if times.is_empty() { &zero[..] } else { times };
        for &t in times {
            for i in 0..n {
                let x = lo + step * T::from_usize(i).unwrap();
                let mu = drift.mu(model, t, x)?;
                let s = model.sigma(t, x);
                sup = sup.max(mu * mu / (half * s * s));
            }
        }
        Self::new(lambda, sup * c(1.01))
    }

    /// (lower, upper) for E at separation |y − x| over duration Δ:
    /// |y−x|²/(8λΔ) − ¼ΛΔ and λ|y−x|²/(2Δ) + ½ΛΔ.
    pub fn interval(&self, dist: T, duration: T) -> (T, T) {
        let d2 = dist * dist;
        let lower = d2 / (c::<T>(8.0) * self.lambda_cap * duration) - c::<T>(0.25) * self.big_lambda_cap * duration;
        let upper = self.lambda_cap * d2 / (c::<T>(2.0) * duration) + c::<T>(0.5) * self.big_lambda_cap * duration;
        (lower, upper)
    }
}

/// Whether `energy` lies strictly inside the Norris–Stroock interval.
pub fn ns_bounds_check<T: Real>(problem: &EnergyProblem<'_, T>, bounds: &NsBounds<T>, energy: T) -> NsCheck<T> {
    let (lower, upper) = bounds.interval((problem.y - problem.x).abs(), problem.duration());
    NsCheck {
        inside: energy > lower && energy < upper,
        lower,
        upper,
        lower_margin: energy - lower,
        upper_margin: upper - energy,
    }
}

#[derive(Debug, Clone)]
pub struct CurveOptions {
    pub n_grid: usize,
    pub multistarts: usize,
    /// Also run the direct minimiser on every row.
    pub cross_check: bool,
    pub direct_iterations: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            n_grid: 1001,
            multistarts: 6,
            cross_check: true,
            direct_iterations: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnergyRow<T> {
    pub y: T,
    pub energy: T,
    /// d²(x, y)/(2Δ)
    pub half_d2: T,
    pub method: EnergyMethod,
    pub residual: T,
    pub energy_direct: Option<T>,
    pub error: Option<String>,
}

impl<T: Real> EnergyRow<T> {
    /// |E_shooting − E_direct| / max(1, E).
    pub fn cross_gap(&self) -> Option<T> {
        self.energy_direct
            .map(|d| (self.energy - d).abs() / T::one().max(self.energy))
    }
}

/// E(t, x; u, y) and d²(x, y)/(2Δ) for every y, rows solved in parallel and
/// returned in input order. Failed rows carry `error` and NaN values.
pub fn energy_curve<T: Real>(
    model: &VolModel<T>,
    drift: &DriftSpec<T>,
    t: T,
    u_time: T,
    x: T,
    y_grid: &[T],
    opts: &CurveOptions,
) -> Vec<EnergyRow<T>> {
    y_grid
        .par_iter()
        .map(|&y| {
            let row = || -> Result<EnergyRow<T>> {
                let p = EnergyProblem::new(model, drift, t, u_time, x, y)?;
                let sol = solve_euler_lagrange(&p, opts.n_grid, opts.multistarts)?;
                let d = geodesic_distance(model, x, y)?;
                let energy_direct = if opts.cross_check {
                    Some(direct_minimize_energy(&p, opts.n_grid, opts.direct_iterations)?.energy)
                } else {
                    None
                };
                Ok(EnergyRow {
                    y,
                    energy: sol.energy,
                    half_d2: d * d / (c::<T>(2.0) * p.duration()),
                    method: sol.method,
                    residual: sol.residual,
                    energy_direct,
                    error: None,
                })
            };
            row().unwrap_or_else(|e| EnergyRow {
                y,
                energy: T::nan(),
                half_d2: T::nan(),
                method: EnergyMethod::Shooting,
                residual: T::nan(),
                energy_direct: None,
                error: Some(e.to_string()),
            })
        })
        .collect()
}
