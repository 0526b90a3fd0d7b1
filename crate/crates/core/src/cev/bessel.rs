//! Modified Bessel function of the first kind, I_ν(z), for real ν ≥ 0, z ≥ 0.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::real::{c, Real};

/// Switch point between the power series and the large-z expansion.
pub fn crossover(nu: f64) -> f64 {
    25f64.max(10.0 * nu * nu)
}

fn check<T: Real>(nu: T, z: T) -> Result<()> {
    if !(nu >= T::zero()) {
        return Err(Error::Domain {
            name: "nu",
            value: nu.to_f64_lossy(),
            reason: "order must be nonnegative",
        });
    }
    if !(z >= T::zero()) {
        return Err(Error::Domain {
            name: "z",
            value: z.to_f64_lossy(),
            reason: "argument must be nonnegative",
        });
    }
    Ok(())
}

/// log I_ν(z) from Σ (z/2)^{2k+ν}/(k! Γ(k+ν+1)), rescaled to avoid overflow.
pub fn log_bessel_i_series<T: Real>(nu: T, z: T) -> T {
    let half = c::<T>(0.5) * z;
    let q = half * half;
    let lead = nu * half.ln() - c::<T>(ln_gamma(nu.to_f64_lossy() + 1.0));
    let big = c::<T>(1e250);
    let mut scale = T::zero();
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::zero();
    loop {
        k = k + T::one();
        term = term * q / (k * (k + nu));
        sum = sum + term;
        if sum > big {
            sum = sum / big;
            term = term / big;
            scale = scale + big.ln();
        }
        if term <= sum * T::epsilon() * c(0.5) && k > half {
            break;
        }
    }
    lead + scale + sum.ln()
}

/// log I_ν(z) from e^z/√(2πz) · Σ_k (−1)^k a_k(ν)/z^k, summed until the terms
/// stop decreasing or fall below machine precision.
pub fn log_bessel_i_asymptotic<T: Real>(nu: T, z: T) -> T {
    z + log_scaled_asymptotic(nu, z)
}

fn log_scaled_asymptotic<T: Real>(nu: T, z: T) -> T {
    let mu = c::<T>(4.0) * nu * nu;
    let eight_z = c::<T>(8.0) * z;
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..200 {
        let kk = T::from_usize(k).unwrap();
        let odd = c::<T>(2.0) * kk - T::one();
        let next = -term * (mu - odd * odd) / (kk * eight_z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum = sum + term;
        if term.abs() <= sum.abs() * T::epsilon() * c(0.5) {
            break;
        }
    }
    -c::<T>(0.5) * (c::<T>(2.0) * T::PI() * z).ln() + sum.ln()
}

/// log I_ν(z); finite for z up to the largest representable value.
/// Returns −∞ at z = 0 for ν > 0.
pub fn log_bessel_i<T: Real>(nu: T, z: T) -> Result<T> {
    check(nu, z)?;
    if z == T::zero() {
        return Ok(if nu == T::zero() { T::zero() } else { T::neg_infinity() });
    }
    if z < c(crossover(nu.to_f64_lossy())) {
        Ok(log_bessel_i_series(nu, z))
    } else {
        Ok(log_bessel_i_asymptotic(nu, z))
    }
}

/// log(e^{−z} I_ν(z)); avoids the cancellation in e^{−a}I_ν(z) for large a, z.
pub fn log_bessel_i_scaled<T: Real>(nu: T, z: T) -> Result<T> {
    check(nu, z)?;
    if z == T::zero() {
        return Ok(if nu == T::zero() { T::zero() } else { T::neg_infinity() });
    }
    if z < c(crossover(nu.to_f64_lossy())) {
        Ok(log_bessel_i_series(nu, z) - z)
    } else {
        Ok(log_scaled_asymptotic(nu, z))
    }
}

/// I_ν(z); overflows to +∞ past z ≈ 700, use [`log_bessel_i`] there.
pub fn bessel_i<T: Real>(nu: T, z: T) -> Result<T> {
    Ok(log_bessel_i(nu, z)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_order(z: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * z)).sqrt() * z.sinh()
    }

    #[test]
    fn half_integer_closed_form() {
        for &z in &[0.1, 1.0, 10.0, 24.9, 25.0, 50.0, 300.0] {
            let v = bessel_i::<f64>(0.5, z).unwrap();
            assert!((v / half_order(z) - 1.0).abs() < 1e-12, "z={z}");
        }
        assert!((bessel_i::<f64>(0.5, 1.0).unwrap() - 0.937_674).abs() < 1e-6);
    }

    #[test]
    fn origin() {
        assert_eq!(bessel_i::<f64>(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i::<f64>(1.5, 0.0).unwrap(), 0.0);
        assert!(bessel_i::<f64>(-1.0, 1.0).is_err());
        assert!(bessel_i::<f64>(1.0, -1.0).is_err());
    }

    #[test]
    fn known_values() {
        // Abramowitz & Stegun table 9.8
        assert!((bessel_i::<f64>(0.0, 1.0).unwrap() - 1.266_065_877_752_008).abs() < 1e-14);
        assert!((bessel_i::<f64>(1.0, 1.0).unwrap() - 0.565_159_103_992_485).abs() < 1e-14);
        assert!((bessel_i::<f64>(2.0, 5.0).unwrap() - 17.505_614_966_624_236).abs() < 1e-11);
    }

    #[test]
    fn continuous_at_crossover() {
        for &nu in &[0.0, 0.5, 1.0, 2.0] {
            let z = crossover(nu);
            let a = log_bessel_i_series(nu, z);
            let b = log_bessel_i_asymptotic(nu, z);
            assert!(((a - b) / a).abs() < 1e-9 && (a - b).abs() < 1e-9, "nu={nu} {a} {b}");
        }
    }

    #[test]
    fn large_argument_log() {
        let z = 1e4;
        let lead = z - 0.5 * (2.0 * std::f64::consts::PI * z).ln();
        let v = log_bessel_i::<f64>(1.0, z).unwrap();
        assert!((v - lead).abs() < 1e-4);
        assert!(log_bessel_i::<f64>(3.0, 1e6).unwrap().is_finite());
    }

    #[test]
    fn large_order_series_does_not_overflow() {
        let v = log_bessel_i::<f64>(12.0, 800.0).unwrap();
        let w = log_bessel_i_asymptotic(12.0, 2000.0);
        assert!(v.is_finite() && w > v);
    }

    #[test]
    fn scaled_variant() {
        for &(nu, z) in &[(0.0, 3.0), (1.0, 40.0), (2.5, 1e5)] {
            let a = log_bessel_i_scaled::<f64>(nu, z).unwrap();
            let b = log_bessel_i::<f64>(nu, z).unwrap() - z;
            assert!((a - b).abs() < 1e-10 * z.max(1.0));
        }
    }

    #[test]
    fn single_precision() {
        let v = bessel_i(0.5f32, 1.0f32).unwrap();
        assert!((v - 0.937_674).abs() < 1e-5);
    }
}
