use std::time::Instant;

use voltail::energy::{energy_curve, CurveOptions, EnergyMethod, NsBounds};
use voltail::volmodel::{DriftSpec, VolModel};

fn y_grid() -> Vec<f64> {
    (0..121).map(|i| -3.0 + 0.05 * i as f64).collect()
}

#[test]
fn figure_two_rows_agree_and_sit_inside_bounds() {
    let model = VolModel::<f64>::figure_one();
    let drift = DriftSpec::DriftlessLogStock;
    let start = Instant::now();
    let rows = energy_curve(&model, &drift, 0.0, 1.0, 0.0, &y_grid(), &CurveOptions::default());
    let elapsed = start.elapsed().as_secs_f64();
    let bounds = NsBounds::from_model(&model, &drift, &[]).unwrap();
    let mut worst: f64 = 0.0;
    for r in &rows {
        assert!(r.error.is_none(), "y={} {:?}", r.y, r.error);
        assert_eq!(r.method, EnergyMethod::Shooting, "y={}", r.y);
        worst = worst.max(r.cross_gap().unwrap());
        let (lo, hi) = bounds.interval(r.y.abs(), 1.0);
        assert!(r.energy > lo && r.energy < hi, "y={} E={}", r.y, r.energy);
    }
    eprintln!("figure 2: {elapsed:.2}s, worst shooting/direct gap {worst:e}");
    assert!(worst <= 1e-4);
    for w in rows.windows(2).filter(|w| w[0].y > 1.0) {
        assert!(w[1].energy > w[0].energy && w[1].half_d2 > w[0].half_d2);
    }
}
