use proptest::prelude::*;

use voltail::geodesic::{doss_sandwich_tail, geodesic_distance, inverse_geodesic, DossBounds};
use voltail::volmodel::VolModel;
use voltail::{VolModelF32, VolModelF64};

fn fig1() -> VolModelF64 {
    VolModel::figure_one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn geodesic_is_antisymmetric(y in -5.0f64..5.0, u in -5.0f64..5.0) {
        let m = fig1();
        let a = geodesic_distance(&m, y, u).unwrap();
        let b = geodesic_distance(&m, u, y).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn geodesic_is_additive(a in -4.0f64..4.0, b in -4.0f64..4.0, c in -4.0f64..4.0) {
        let m = fig1();
        let lhs = geodesic_distance(&m, a, c).unwrap();
        let rhs = geodesic_distance(&m, a, b).unwrap() + geodesic_distance(&m, b, c).unwrap();
        prop_assert!((lhs - rhs).abs() <= 2e-10, "{lhs} {rhs}");
    }

    #[test]
    fn inverse_round_trip(y in -3.0f64..3.0, x in -20.0f64..20.0) {
        let m = fig1();
        let u = inverse_geodesic(&m, y, x).unwrap();
        prop_assert!((geodesic_distance(&m, y, u).unwrap() - x).abs() <= 1e-9);
    }

    #[test]
    fn distance_within_sigma_bounds(y in -5.0f64..5.0, u in -5.0f64..5.0) {
        let m = fig1();
        let d = geodesic_distance(&m, y, u).unwrap().abs();
        let span = (u - y).abs();
        prop_assert!(d >= span / m.sigma_hi() - 1e-12);
        prop_assert!(d <= span / m.sigma_lo() + 1e-12);
    }

    #[test]
    fn sandwich_is_ordered(x in 0.5f64..4.0, t in 0.2f64..2.0) {
        let m = fig1();
        let band = DossBounds::from_model(&m).unwrap();
        let (lo, hi) = doss_sandwich_tail(&m, band, 0.0, x, t).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!(lo >= 0.0 && hi <= 1.0);
    }
}

#[test]
fn single_precision_matches_double() {
    let m32 = VolModelF32::figure_one();
    let m64 = VolModelF64::figure_one();
    let d32 = geodesic_distance(&m32, 0.0f32, 2.0).unwrap();
    let d64 = geodesic_distance(&m64, 0.0, 2.0).unwrap();
    assert!((d32 as f64 - d64).abs() < 1e-4, "{d32} {d64}");
    assert!((d64 - 5.37771).abs() < 1e-5);
}
