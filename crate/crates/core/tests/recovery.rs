use voltail::carrlee::{
    eigenfunction_value, recover_clock_laplace, replication_weights, AnalyticPayoff, EigenContract, NumericPayoff,
    Payoff, TerminalLaw,
};
use voltail::cev::{cev_absorption_prob, cev_density, CevParams};
use voltail::montecarlo::{compose_time_change, simulate_cev, ks_critical_1pct, ks_statistic, CevScheme, McConfig};

fn base() -> CevParams<f64> {
    CevParams::new(0.2, -0.5, 1.0, 1.0).unwrap()
}

fn density_grid(p: &CevParams<f64>, n: usize, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let grid: Vec<f64> = (1..=n).map(|i| hi * i as f64 / n as f64).collect();
    let dens = grid.iter().map(|x| cev_density(p, *x).unwrap()).collect();
    (grid, dens)
}

#[test]
fn deterministic_clock_density_recovers_exp_lambda_t() {
    // τ ≡ T: E ψ(S_T)/ψ(x₀) = e^{λT} computed by quadrature of the CEV density.
    let p = base();
    let (grid, dens) = density_grid(&p, 40_000, 4.0);
    let atom = cev_absorption_prob(&p).unwrap();
    for lam in [0.1, 0.5, 1.0] {
        let c = EigenContract::cev(lam, p).unwrap();
        let est = recover_clock_laplace(
            &c,
            p.x0,
            TerminalLaw::Density {
                grid: &grid,
                density: &dens,
                atom_at_zero: atom,
            },
        )
        .unwrap();
        assert!((est.value / f64::exp(lam) - 1.0).abs() < 1e-5, "{lam} {}", est.value);
        assert!(!est.heavy_tail_flag);
    }
}

#[test]
fn replicated_eigen_contract_prices_like_direct_expectation() {
    // g = ψ_λ for small λ, priced through calls and puts on the density.
    let p = base();
    let c = EigenContract::cev(0.05, p).unwrap();
    let g = NumericPayoff {
        f: move |s: f64| if s > 0.0 { eigenfunction_value(&c, s).unwrap() } else { 0.0 },
    };
    let (grid, dens) = density_grid(&p, 8_000, 4.0);
    let integrate = |f: &dyn Fn(f64) -> f64| {
        let mut acc = 0.0;
        for i in 1..grid.len() {
            acc += 0.5 * (grid[i] - grid[i - 1]) * (f(grid[i]) * dens[i] + f(grid[i - 1]) * dens[i - 1]);
        }
        acc
    };
    let strikes: Vec<f64> = (1..=300).map(|i| i as f64 * 0.01).collect();
    let w = replication_weights(&g, 1.0, &strikes).unwrap();
    let direct = integrate(&|s| g.value(s));
    let portfolio = integrate(&|s| w.reconstruct(s));
    assert!((portfolio - direct).abs() < 1e-4 * direct.abs(), "{portfolio} {direct}");
}

#[test]
fn analytic_and_numeric_payoffs_agree() {
    let exact = AnalyticPayoff {
        f: |s: f64| s.powi(3),
        df: |s: f64| 3.0 * s * s,
        d2f: |s: f64| 6.0 * s,
    };
    let numeric = NumericPayoff { f: |s: f64| s.powi(3) };
    for s in [0.5, 1.0, 2.0] {
        assert!((exact.d1(s) - numeric.d1(s)).abs() < 1e-8);
        assert!((exact.d2(s) - numeric.d2(s)).abs() < 1e-5);
    }
}

#[test]
fn degenerate_clock_matches_plain_cev() {
    let p = base();
    let n = 100_000;
    let cfg = McConfig::new(n, 200, 9).unwrap();
    let plain = simulate_cev(&p, &cfg);
    let clock = vec![p.maturity; n];
    let composed = compose_time_change(&p, &clock, &cfg).unwrap();
    let ks = ks_statistic(&plain.values, &composed.values);
    assert!(ks < ks_critical_1pct(n, n), "{ks}");
    let exact = compose_time_change(&p, &clock, &cfg.clone().with_scheme(CevScheme::Exact)).unwrap();
    assert!(ks_statistic(&plain.values, &exact.values) < ks_critical_1pct(n, n));
}
