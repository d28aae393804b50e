use std::f64::consts::PI;

use proptest::prelude::*;
use qrad_core::frw::{mode_bogoliubov, sudden_limit, ConformalClock, ScaleFactorProfile};

#[test]
fn approaches_sudden_jump_monotonically() {
    for ratio in [1.2f64, 2.0, 5.0] {
        let jump = sudden_limit(1.0, ratio * ratio);
        let mut prev = f64::INFINITY;
        for tr in [0.05, 0.02, 0.01, 0.005] {
            let p = ScaleFactorProfile::tanh(1.0, ratio, tr).unwrap();
            let dev = (mode_bogoliubov(&p, 1.0).unwrap().beta_sq() / jump - 1.0).abs();
            assert!(dev < prev, "ratio {ratio}, tau_r {tr}: {dev}");
            prev = dev;
        }
        assert!(prev < 0.01, "ratio {ratio}: {prev}");
    }
}

/// For ν²(τ) = ν_in² + (ν_out² − ν_in²)(1 + tanh ρτ)/2 the mode equation is
/// hypergeometric and |β|² = sinh²(π ν₋/ρ) / (sinh(π ν_in/ρ) sinh(π ν_out/ρ)),
/// with ν₋ = (ν_out − ν_in)/2.
#[test]
fn epstein_profile_exact_solution() {
    let (nu_in, nu_out, rho) = (1.0f64, 2.0f64, 2.0f64);
    let n = 6001;
    let taus: Vec<f64> = (0..n).map(|i| -15.0 + 30.0 * i as f64 / (n - 1) as f64).collect();
    let omegas = taus
        .iter()
        .map(|t| {
            let nu2 = nu_in * nu_in + (nu_out * nu_out - nu_in * nu_in) * 0.5 * (1.0 + (rho * t).tanh());
            nu2.powf(0.25)
        })
        .collect();
    let p = ScaleFactorProfile::tabulated(taus, omegas).unwrap();
    let got = mode_bogoliubov(&p, 1.0).unwrap().beta_sq();
    let x = PI / rho;
    let want = (x * 0.5 * (nu_out - nu_in)).sinh().powi(2) / ((x * nu_in).sinh() * (x * nu_out).sinh());
    assert!((got / want - 1.0).abs() < 1e-5, "{got} vs {want}");
}

#[test]
fn unitarity_across_profiles() {
    let profiles = [
        ScaleFactorProfile::tanh(1.0, 5.0, 0.01).unwrap(),
        ScaleFactorProfile::tanh(3.0, 1.0, 2.0).unwrap(),
        ScaleFactorProfile::bump(1.0, 2.0, 0.3).unwrap(),
        ScaleFactorProfile::bump(2.0, -0.5, 1.0).unwrap(),
    ];
    for p in &profiles {
        for w in [0.05, 0.5, 3.0] {
            let b = mode_bogoliubov(p, w).unwrap();
            assert!(b.unitarity_defect().abs() < 1e-8);
        }
    }
}

#[test]
fn symmetric_bump_is_not_conformally_trivial() {
    for h in [0.2, -0.3] {
        let p = ScaleFactorProfile::bump(1.0, h, 0.5).unwrap();
        assert!(mode_bogoliubov(&p, 1.0).unwrap().beta_sq() > 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conformal_round_trip(t in -20.0f64..20.0, lo in 0.3f64..3.0, hi in 0.3f64..3.0, r in 0.1f64..5.0) {
        let p = ScaleFactorProfile::tanh(lo, hi, r).unwrap();
        let c = ConformalClock::new(&p).unwrap();
        let back = c.time(c.tau(t).unwrap()).unwrap();
        prop_assert!((back - t).abs() <= 1e-10 * t.abs().max(1e-3));
    }

    #[test]
    fn time_reversal(lo in 0.5f64..2.0, hi in 0.5f64..2.0, r in 0.05f64..2.0, w in 0.2f64..2.0) {
        let fwd = mode_bogoliubov(&ScaleFactorProfile::tanh(lo, hi, r).unwrap(), w).unwrap();
        let bwd = mode_bogoliubov(&ScaleFactorProfile::tanh(hi, lo, r).unwrap(), w).unwrap();
        prop_assert!((fwd.beta_sq() - bwd.beta_sq()).abs() <= 1e-8 * (1e-6 + fwd.beta_sq()));
    }
}
