use qrad_core::mirror::{energy_closed, energy_quadrature, spectrum, Trajectory, WavenumberGrid};
use qrad_core::Temperature;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn gaussian_energy_oracle() {
    let g = Trajectory::gaussian(1.0, 1.0).unwrap();
    for t in [0.0, 0.1, 1.0] {
        let temp = Temperature::new(t).unwrap();
        let grid = WavenumberGrid::for_trajectory(&g, temp).unwrap();
        let q = energy_quadrature(&g, temp, &grid).unwrap();
        let c = energy_closed(&g, temp).unwrap();
        assert!(
            rel(q.total(), c.total()) < 1e-3,
            "T={t}: {} vs {}",
            q.total(),
            c.total()
        );
        assert!(rel(q.vacuum, c.vacuum) < 1e-3);
        if t > 0.0 {
            assert!(
                rel(q.thermal, c.thermal) < 1e-3,
                "T={t}: {} vs {}",
                q.thermal,
                c.thermal
            );
        }
    }
}

#[test]
fn windowed_sine_energy_oracle() {
    let s = Trajectory::windowed_sine(0.5, 3.0, 2.0).unwrap();
    let temp = Temperature::new(0.4).unwrap();
    let grid = WavenumberGrid::for_trajectory(&s, temp).unwrap();
    let q = energy_quadrature(&s, temp, &grid).unwrap();
    let c = energy_closed(&s, temp).unwrap();
    assert!(rel(q.vacuum, c.vacuum) < 1e-3, "{} vs {}", q.vacuum, c.vacuum);
    assert!(rel(q.thermal, c.thermal) < 1e-3, "{} vs {}", q.thermal, c.thermal);
}

#[test]
fn vacuum_spectrum_is_positive() {
    let g = Trajectory::gaussian(0.3, 1.7).unwrap();
    let grid = WavenumberGrid::for_trajectory(&g, Temperature::ZERO).unwrap();
    let spec = spectrum(&g, Temperature::ZERO, &grid).unwrap();
    assert!(spec.vacuum.iter().all(|v| *v >= 0.0));
    assert!(spec.thermal.iter().all(|v| *v == 0.0));
}

#[test]
fn perturbative_diagnostic_flags_large_amplitude() {
    let g = Trajectory::gaussian(5.0, 1.0).unwrap();
    let grid = WavenumberGrid::for_trajectory(&g, Temperature::ZERO).unwrap();
    let spec = spectrum(&g, Temperature::ZERO, &grid).unwrap();
    assert!(spec.perturbative_ratio > 0.1);
    assert!(!spec.warnings.is_empty());

    let small = Trajectory::gaussian(0.01, 1.0).unwrap();
    let spec = spectrum(&small, Temperature::ZERO, &grid).unwrap();
    assert!(spec.warnings.is_empty());
}
