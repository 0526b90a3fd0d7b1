//! Seeded Monte Carlo oracles (double precision only).
//!
//! Every path draws from its own ChaCha8 stream: the key is derived from the
//! user seed and a per-process tag by splitmix64, and the stream number is the
//! path index. Results are therefore identical however paths are scheduled
//! across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::cev::CevParams;
use crate::error::{Error, Result};
use crate::timechange::CirParams;
use crate::volmodel::{DriftSpec, VolModel};

/// Substream tags; distinct processes never share a key.
pub mod stream {
    pub const LOG_STOCK: u64 = 1;
    pub const CEV: u64 = 2;
    pub const CIR: u64 = 3;
    pub const COMPOSE: u64 = 4;
    pub const EXP_FUNCTIONAL: u64 = 5;
    pub const BROWNIAN: u64 = 6;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CevScheme {
    /// Euler steps, absorbed at the first nonpositive iterate.
    Euler,
    /// Exact draw from the stopped transition law (gamma–Poisson–gamma mixture).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub cev_scheme: CevScheme,
}

impl McConfig {
    pub fn new(n_paths: usize, n_steps: usize, seed: u64) -> Result<Self> {
        if n_paths == 0 || n_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "n_paths",
                value: n_paths.min(n_steps) as f64,
                reason: "paths and steps must be at least 1",
            });
        }
        Ok(Self {
            n_paths,
            n_steps,
            seed,
            cev_scheme: CevScheme::Euler,
        })
    }

    pub fn with_scheme(mut self, scheme: CevScheme) -> Self {
        self.cev_scheme = scheme;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub half_width_95: f64,
    pub n_effective: usize,
    /// Largest single contribution exceeds 10% of Σ|values|.
    pub heavy_tail_flag: bool,
}

impl McEstimate {
    pub fn standard_error(&self) -> f64 {
        self.half_width_95 / Z95
    }

    /// |value − target| within `k` standard errors.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.standard_error()
    }
}

const Z95: f64 = 1.96;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for path `index` of process `tag` under `seed`.
pub fn path_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(tag));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

fn par_paths<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Euler–Maruyama terminal values of dX = b dt + σ(t, X) dW on [0, t], where b
/// is −½σ² for the driftless log-stock and the explicit drift otherwise.
pub fn simulate_log_stock(
    model: &VolModel<f64>,
    drift: &DriftSpec<f64>,
    x0: f64,
    t: f64,
    cfg: &McConfig,
) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must be positive",
        });
    }
    let h = t / cfg.n_steps as f64;
    let sh = h.sqrt();
    Ok(par_paths(cfg.n_paths, |i| {
        let mut rng = path_rng(cfg.seed, stream::LOG_STOCK, i as u64);
        let mut x = x0;
        for k in 0..cfg.n_steps {
            let s = k as f64 * h;
            let z: f64 = rng.sample(StandardNormal);
            x += drift.sde_drift(model, s, x) * h + model.sigma(s, x) * sh * z;
        }
        x
    }))
}

#[derive(Debug, Clone)]
pub struct CevSamples {
    /// Terminal values; absorbed paths are 0.
    pub values: Vec<f64>,
    pub absorbed_fraction: f64,
}

impl CevSamples {
    fn from_values(values: Vec<f64>) -> Self {
        let absorbed = values.iter().filter(|v| **v <= 0.0).count();
        let absorbed_fraction = absorbed as f64 / values.len().max(1) as f64;
        Self {
            values,
            absorbed_fraction,
        }
    }

    /// Absorbed fraction as an estimate with its binomial half-width.
    pub fn absorption_estimate(&self) -> McEstimate {
        tail_prob_below(&self.values, 0.0)
    }
}

fn cev_euler_path(p: &CevParams<f64>, x0: f64, horizon: f64, steps: usize, rng: &mut ChaCha8Rng) -> f64 {
    let h = horizon / steps as f64;
    let sh = h.sqrt();
    let expo = 1.0 + p.beta;
    let mut s = x0;
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        s += p.delta * s.powf(expo) * sh * z;
        if s <= 0.0 {
            return 0.0;
        }
    }
    s
}

/// One exact draw of the stopped CEV at `horizon`. With ζ = x₀^{2|β|}/(2δ²β²τ):
/// G ~ Gamma(ν, 1) and the path is absorbed iff G ≥ ζ; otherwise
/// K ~ Poisson(ζ − G), W ~ Gamma(K + 1, 1) and S = (2δ²β²τ W)^{1/(2|β|)}.
pub fn cev_exact_draw(p: &CevParams<f64>, x0: f64, horizon: f64, rng: &mut ChaCha8Rng) -> f64 {
    if horizon <= 0.0 {
        return x0;
    }
    let b = p.beta.abs();
    let scale = 2.0 * p.delta * p.delta * b * b * horizon;
    let zeta = x0.powf(2.0 * b) / scale;
    let g = Gamma::new(p.nu(), 1.0).expect("nu > 0").sample(rng);
    if g >= zeta {
        return 0.0;
    }
    let rate = zeta - g;
    let k = if rate > 0.0 {
        Poisson::new(rate).expect("rate > 0").sample(rng)
    } else {
        0.0
    };
    let w = Gamma::new(k + 1.0, 1.0).expect("shape > 0").sample(rng);
    (scale * w).powf(1.0 / (2.0 * b))
}

/// Terminal values of the stopped CEV at `p.maturity`.
pub fn simulate_cev(p: &CevParams<f64>, cfg: &McConfig) -> CevSamples {
    let values = par_paths(cfg.n_paths, |i| {
        let mut rng = path_rng(cfg.seed, stream::CEV, i as u64);
        match cfg.cev_scheme {
            CevScheme::Euler => cev_euler_path(p, p.x0, p.maturity, cfg.n_steps, &mut rng),
            CevScheme::Exact => cev_exact_draw(p, p.x0, p.maturity, &mut rng),
        }
    });
    CevSamples::from_values(values)
}

/// (v_T, ∫₀ᵀ v ds) by full-truncation Euler with the trapezoid rule on v⁺.
pub fn simulate_cir_and_integral(p: &CirParams<f64>, maturity: f64, cfg: &McConfig) -> Vec<(f64, f64)> {
    let h = maturity / cfg.n_steps as f64;
    let sh = h.sqrt();
    par_paths(cfg.n_paths, |i| {
        let mut rng = path_rng(cfg.seed, stream::CIR, i as u64);
        let mut v = p.v0;
        let mut integral = 0.0;
        for _ in 0..cfg.n_steps {
            let vp = v.max(0.0);
            let z: f64 = rng.sample(StandardNormal);
            let next = v + p.kappa * (p.theta - vp) * h + p.sigma_v * vp.sqrt() * sh * z;
            integral += 0.5 * h * (vp + next.max(0.0));
            v = next;
        }
        (v.max(0.0), integral)
    })
}

/// Minimum number of Euler steps per composed path.
pub const MIN_COMPOSE_STEPS: usize = 8;

/// S_T = X_{τ(T)}: for clock draw τᵢ an independent CEV path run over [0, τᵢ].
/// Euler paths use round(n_steps·τᵢ/T) steps (at least 8), with T the CEV
/// maturity. Diffusion noise comes from its own stream, disjoint from the
/// clock's.
pub fn compose_time_change(cev: &CevParams<f64>, clock_samples: &[f64], cfg: &McConfig) -> Result<CevSamples> {
    if clock_samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = clock_samples.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: *bad,
            reason: "clock samples must be nonnegative",
        });
    }
    let values = par_paths(clock_samples.len(), |i| {
        let tau = clock_samples[i];
        let mut rng = path_rng(cfg.seed, stream::COMPOSE, i as u64);
        if tau == 0.0 {
            return cev.x0;
        }
        match cfg.cev_scheme {
            CevScheme::Euler => {
                let steps = ((cfg.n_steps as f64 * tau / cev.maturity).round() as usize).max(MIN_COMPOSE_STEPS);
                cev_euler_path(cev, cev.x0, tau, steps, &mut rng)
            }
            CevScheme::Exact => cev_exact_draw(cev, cev.x0, tau, &mut rng),
        }
    });
    Ok(CevSamples::from_values(values))
}

/// A_t^{(μ)} = ∫₀ᵗ e^{2(B_s + μs)} ds by the trapezoid rule on a fine grid.
pub fn simulate_exponential_functional(mu: f64, t: f64, cfg: &McConfig) -> Vec<f64> {
    let h = t / cfg.n_steps as f64;
    let sh = h.sqrt();
    par_paths(cfg.n_paths, |i| {
        let mut rng = path_rng(cfg.seed, stream::EXP_FUNCTIONAL, i as u64);
        let mut b = 0.0;
        let mut prev = 1.0;
        let mut acc = 0.0;
        for k in 1..=cfg.n_steps {
            let z: f64 = rng.sample(StandardNormal);
            b += sh * z;
            let cur = (2.0 * (b + mu * k as f64 * h)).exp();
            acc += 0.5 * h * (prev + cur);
            prev = cur;
        }
        acc
    })
}

/// Brownian terminal values x₀ + W_t (exact, no stepping).
pub fn simulate_brownian(x0: f64, t: f64, cfg: &McConfig) -> Vec<f64> {
    let st = t.sqrt();
    par_paths(cfg.n_paths, |i| {
        let mut rng = path_rng(cfg.seed, stream::BROWNIAN, i as u64);
        let z: f64 = rng.sample(StandardNormal);
        x0 + st * z
    })
}

fn proportion(hits: usize, n: usize) -> McEstimate {
    let p = hits as f64 / n as f64;
    McEstimate {
        value: p,
        half_width_95: Z95 * (p * (1.0 - p) / n as f64).sqrt(),
        n_effective: n,
        heavy_tail_flag: hits > 0 && 10 > hits,
    }
}

/// Frequency of samples strictly above `threshold`.
pub fn tail_prob(samples: &[f64], threshold: f64) -> Result<McEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(proportion(samples.iter().filter(|s| **s > threshold).count(), samples.len()))
}

fn tail_prob_below(samples: &[f64], threshold: f64) -> McEstimate {
    proportion(
        samples.iter().filter(|s| **s <= threshold).count(),
        samples.len().max(1),
    )
}

/// Sample mean of `transform(s)` with a normal-approximation 95% half-width.
pub fn expectation(samples: &[f64], transform: impl Fn(f64) -> f64) -> Result<McEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let values: Vec<f64> = samples.iter().map(|s| transform(*s)).collect();
    Ok(mean_estimate(&values))
}

/// Mean, 95% half-width and max-term diagnostic of already transformed values.
pub fn mean_estimate(values: &[f64]) -> McEstimate {
    let n = values.len();
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let abs_sum: f64 = values.iter().map(|v| v.abs()).sum();
    let max = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    McEstimate {
        value: mean,
        half_width_95: Z95 * (var / nf).sqrt(),
        n_effective: n,
        heavy_tail_flag: !(max <= 0.1 * abs_sum),
    }
}

/// Two-sample Kolmogorov–Smirnov statistic sup|F₁ − F₂|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Large-sample critical value of the two-sample KS statistic at level 1%.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism_and_streams() {
        let cfg = McConfig::new(1000, 10, 7).unwrap();
        let m = VolModel::figure_one();
        let d = DriftSpec::DriftlessLogStock;
        let a = simulate_log_stock(&m, &d, 0.0, 1.0, &cfg).unwrap();
        let b = simulate_log_stock(&m, &d, 0.0, 1.0, &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_log_stock(&m, &d, 0.0, 1.0, &cfg.with_seed(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn tail_prob_examples() {
        let s = vec![2.0; 50];
        let e = tail_prob(&s, 1.0).unwrap();
        assert_eq!((e.value, e.half_width_95), (1.0, 0.0));
        let bern: Vec<f64> = (0..10_000).map(|i| (i % 2) as f64).collect();
        let e = tail_prob(&bern, 0.5).unwrap();
        assert!((e.half_width_95 - 0.0098).abs() < 1e-4);
        assert!(matches!(tail_prob(&[], 0.0), Err(Error::EmptyInput)));
    }

    #[test]
    fn heavy_tail_flag() {
        let mut v = vec![1.0; 100];
        assert!(!mean_estimate(&v).heavy_tail_flag);
        v[3] = 50.0;
        assert!(mean_estimate(&v).heavy_tail_flag);
    }

    #[test]
    fn ks_identical_and_shifted() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_statistic(&a, &a), 0.0);
        let b: Vec<f64> = a.iter().map(|x| x + 50.0).collect();
        assert!((ks_statistic(&a, &b) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_log_stock_moments() {
        let cfg = McConfig::new(200_000, 4, 11).unwrap();
        let m = VolModel::constant(0.3).unwrap();
        let x = simulate_log_stock(&m, &DriftSpec::DriftlessLogStock, 0.0, 1.0, &cfg).unwrap();
        let mart = expectation(&x, f64::exp).unwrap();
        assert!(mart.agrees_with(1.0, 3.0), "{mart:?}");
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        assert!((var / 0.09 - 1.0).abs() < 0.02);
    }

    #[test]
    fn exact_cev_draw_matches_absorption_and_mean() {
        let p = CevParams::new(0.6, -0.5, 0.3, 1.0).unwrap();
        let cfg = McConfig::new(200_000, 1, 5).unwrap().with_scheme(CevScheme::Exact);
        let s = simulate_cev(&p, &cfg);
        let target = crate::cev::cev_absorption_closed_form(&p);
        assert!(s.absorption_estimate().agrees_with(target, 3.0));
        assert!(expectation(&s.values, |v| v).unwrap().agrees_with(0.3, 3.0));
    }

    #[test]
    fn cir_means() {
        let p = CirParams::new(2.0, 0.04, 0.5, 0.09).unwrap();
        let cfg = McConfig::new(100_000, 100, 3).unwrap();
        let pairs = simulate_cir_and_integral(&p, 1.0, &cfg);
        let vt: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let it: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        assert!(expectation(&vt, |v| v).unwrap().agrees_with(p.mean_v(1.0), 3.0));
        assert!(expectation(&it, |v| v).unwrap().agrees_with(p.mean_integral(1.0), 3.0));
    }

    #[test]
    fn exponential_functional_mean() {
        let cfg = McConfig::new(50_000, 200, 9).unwrap();
        let a = simulate_exponential_functional(-1.0, 1.0, &cfg);
        // μ = −1 makes e^{2(B_s − s)} a martingale, so E A_1 = 1.
        assert!(expectation(&a, |v| v).unwrap().agrees_with(1.0, 3.0));
    }
}
