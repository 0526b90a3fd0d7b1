//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use crate::real::{c, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

/// Integration settings.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: c(1e-10),
            rel_tol: T::zero(),
            max_intervals: 4000,
        }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn abs(abs_tol: T) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) * c(0.5);
    let centre = (a + b) * c(0.5);
    let fc = f(centre);
    let mut res_k = fc * c(WGK[7]);
    let mut res_g = fc * c(WG[3]);
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * c(x);
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        res_k = res_k + (f1 + f2) * c(w);
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * c(WG[j / 2]);
        }
    }
    let value = res_k * half;
    let error = ((res_k - res_g) * half).abs();
    (value, error)
}

/// Integrates `f` over `[a, b]` (either orientation) until the summed error
/// estimate drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<Quadrature<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a == b {
        return Ok(Quadrature {
            value: T::zero(),
            abs_error: T::zero(),
            evaluations: 0,
        });
    }
    if b < a {
        return integrate(f, b, a, opts).map(|q| Quadrature {
            value: -q.value,
            ..q
        });
    }

    let (v, e) = kronrod(&mut f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value: v,
        error: e,
    }];
    let mut evaluations = 15;

    loop {
        let total: T = segments.iter().map(|s| s.value).sum();
        let err: T = segments.iter().map(|s| s.error).sum();
        let target = opts
            .abs_tol
            .max(opts.rel_tol * total.abs())
            .max(T::tol_floor(total));
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Quadrature {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                tolerance: target.to_f64_lossy(),
                estimate: f64::INFINITY,
            });
        }
        if err <= target {
            return Ok(Quadrature {
                value: total,
                abs_error: err,
                evaluations,
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                tolerance: target.to_f64_lossy(),
                estimate: err.to_f64_lossy(),
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let seg = segments.swap_remove(worst);
        let mid = (seg.a + seg.b) * c(0.5);
        if mid <= seg.a || mid >= seg.b {
            // Interval can no longer be split in this precision.
            return Err(Error::Quadrature {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                tolerance: target.to_f64_lossy(),
                estimate: err.to_f64_lossy(),
            });
        }
        let (v1, e1) = kronrod(&mut f, seg.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, seg.b);
        evaluations += 30;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
}

/// Integrates over consecutive pieces delimited by `breaks` (sorted ascending)
/// with the absolute tolerance split evenly between pieces.
pub fn integrate_pieces<T, F>(mut f: F, breaks: &[T], opts: QuadOptions<T>) -> Result<Quadrature<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let pieces = breaks.len().saturating_sub(1).max(1);
    let per = QuadOptions {
        abs_tol: opts.abs_tol / T::from_usize(pieces).unwrap(),
        ..opts
    };
    let mut acc = Quadrature {
        value: T::zero(),
        abs_error: T::zero(),
        evaluations: 0,
    };
    for w in breaks.windows(2) {
        let q = integrate(&mut f, w[0], w[1], per)?;
        acc.value = acc.value + q.value;
        acc.abs_error = acc.abs_error + q.abs_error;
        acc.evaluations += q.evaluations;
    }
    Ok(acc)
}

/// Composite Simpson rule on `panels` (even) uniform panels.
pub fn simpson<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, panels: usize) -> T {
    let n = panels + panels % 2;
    let h = (b - a) / T::from_usize(n).unwrap();
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let x = a + h * T::from_usize(i).unwrap();
        let w: T = if i % 2 == 1 { c(4.0) } else { c(2.0) };
        sum = sum + w * f(x);
    }
    sum * h / c(3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, QuadOptions::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let f = |x: f64| x.exp();
        let a = integrate(f, 0.0, 1.0, QuadOptions::default()).unwrap().value;
        let b = integrate(f, 1.0, 0.0, QuadOptions::default()).unwrap().value;
        assert_eq!(a, -b);
        assert!((a - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_converges() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let q = integrate(f, -1.0, 1.0, QuadOptions::abs(1e-9)).unwrap();
        let exact = 2.0 * (1.0 / 1e-4f64.sqrt()) * (1.0 / 1e-4f64.sqrt()).atan();
        assert!((q.value - exact).abs() < 1e-8, "{} vs {}", q.value, exact);
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let r = integrate(|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, QuadOptions::default());
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn simpson_matches_kronrod() {
        let f = |x: f64| (x * 3.0).sin() * x.exp();
        let s = simpson(f, 0.0, 2.0, 10_000);
        let q = integrate(f, 0.0, 2.0, QuadOptions::default()).unwrap().value;
        assert!((s - q).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let q = integrate(|x: f32| x.cos(), 0.0f32, 1.0, QuadOptions::abs(1e-6)).unwrap();
        assert!((q.value - 1f32.sin()).abs() < 1e-6);
    }
}
