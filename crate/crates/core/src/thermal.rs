//! Thermal-equilibrium primitives: Bose–Einstein occupation, the thermal
//! enhancement factor, photon-number variance, Hurwitz-zeta sums and the
//! photon-gas relations between energy, effective temperature and entropy.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Above this value of βω the occupation underflows to the vacuum.
pub const EXP_CUTOFF: f64 = 700.0;

/// Inverse temperature, with T = 0 as a distinguished value rather than a
/// limit so that nothing downstream ever evaluates `exp(∞·ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Temperature {
    temperature: f64,
    beta: f64,
}

impl Temperature {
    pub const ZERO: Temperature = Temperature {
        temperature: 0.0,
        beta: f64::INFINITY,
    };

    /// `t` in natural units; `t = 0` gives [`Temperature::ZERO`].
    pub fn new(t: f64) -> Result<Self> {
        if t == 0.0 {
            return Ok(Self::ZERO);
        }
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("temperature must be finite and >= 0, got {t}"));
        }
        Ok(Self {
            temperature: t,
            beta: 1.0 / t,
        })
    }

    pub fn from_beta(beta: f64) -> Result<Self> {
        if beta == f64::INFINITY {
            return Ok(Self::ZERO);
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return domain(format!("inverse temperature must be > 0, got {beta}"));
        }
        Ok(Self {
            temperature: 1.0 / beta,
            beta,
        })
    }

    pub fn value(&self) -> f64 {
        self.temperature
    }

    /// `None` at T = 0.
    pub fn beta(&self) -> Option<f64> {
        self.beta.is_finite().then_some(self.beta)
    }

    pub fn is_zero(&self) -> bool {
        self.temperature == 0.0
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return domain(format!(
            "mode frequency must be positive and finite, got {omega} (infrared mode needs regularization)"
        ));
    }
    Ok(())
}

/// `1/(exp(βω) − 1)`.
pub fn bose_occupation(omega: f64, temp: Temperature) -> Result<f64> {
    check_omega(omega)?;
    let Some(beta) = temp.beta() else {
        return Ok(0.0);
    };
    let x = beta * omega;
    if x > EXP_CUTOFF {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// `ω·n(ω)`, continuous at ω → 0 where it tends to T. Used inside
/// quadrature integrands that touch the infrared end.
pub fn energy_weighted_occupation(omega: f64, temp: Temperature) -> f64 {
    let Some(beta) = temp.beta() else {
        return 0.0;
    };
    let x = beta * omega;
    if x > EXP_CUTOFF {
        0.0
    } else if x < 1e-8 {
        temp.value() * (1.0 - 0.5 * x)
    } else {
        omega / x.exp_m1()
    }
}

/// `1 + 2 n(ω)`.
pub fn thermal_factor(omega: f64, temp: Temperature) -> Result<f64> {
    Ok(1.0 + 2.0 * bose_occupation(omega, temp)?)
}

/// `⟨N²⟩₀ − ⟨N⟩₀² = n + n²` of the initial thermal state.
pub fn thermal_variance(omega: f64, temp: Temperature) -> Result<f64> {
    let n = bose_occupation(omega, temp)?;
    Ok(n + n * n)
}

const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
    854_513.0 / 138.0,
    -236_364_091.0 / 2730.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` for integer `s ≥ 2` and
/// `Re a > 0`, by Euler–Maclaurin summation with the remainder monitored
/// term by term.
pub fn hurwitz_zeta(s: u32, a: Complex64) -> Result<Complex64> {
    if s < 2 {
        return domain(format!("Hurwitz zeta needs s >= 2, got {s}"));
    }
    if !(a.re > 0.0) || !a.re.is_finite() || !a.im.is_finite() {
        return domain(format!("Hurwitz zeta needs Re(a) > 0, got {a}"));
    }
    let si = s as i32;
    let n_direct = 20 + a.im.abs().ceil() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in (0..n_direct).rev() {
        sum += (a + k as f64).powi(-si);
    }
    let x = a + n_direct as f64;
    let xs = x.powi(-si);
    sum += x * xs / (s as f64 - 1.0) + xs * 0.5;

    // Σ_j B_{2j}/(2j)! · s(s+1)…(s+2j−2) · x^{-s-2j+1}
    let inv_x2 = (x * x).inv();
    let mut pochhammer_over_fact = s as f64 / 2.0; // s / 2!
    let mut power = xs / x; // x^{-s-1}
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = power * (b * pochhammer_over_fact);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
        let j1 = (j + 1) as f64;
        // advance (s)_{2j-1}/(2j)! to (s)_{2j+1}/(2j+2)!
        pochhammer_over_fact *=
            (s as f64 + 2.0 * j1 - 1.0) * (s as f64 + 2.0 * j1) / ((2.0 * j1 + 1.0) * (2.0 * j1 + 2.0));
        power *= inv_x2;
    }
    Ok(sum)
}

/// Riemann zeta at integer `s ≥ 2`.
pub fn riemann_zeta(s: u32) -> Result<f64> {
    Ok(hurwitz_zeta(s, Complex64::new(1.0, 0.0))?.re)
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

/// Thermal wavenumber integral
/// `Σ_{n≥1} ∫₀^∞ dk kᵐ e^{ikΔt − nβk} = Σ_{n≥1} m!/(nβ − iΔt)^{m+1}
///  = (m!/β^{m+1}) ζ(m+1, 1 − iΔt/β)`.
pub fn hurwitz_sum(m: u32, delta_t: f64, temp: Temperature) -> Result<Complex64> {
    if m < 1 {
        return domain("Hurwitz sum needs m >= 1");
    }
    let Some(beta) = temp.beta() else {
        return domain("Hurwitz sum is undefined at T = 0; use the vacuum closed forms");
    };
    if !delta_t.is_finite() {
        return domain("time difference must be finite");
    }
    let a = Complex64::new(1.0, -delta_t / beta);
    let z = hurwitz_zeta(m + 1, a)?;
    Ok(z * (factorial(m) / beta.powi(m as i32 + 1)))
}

/// Which entropy prefactor to use for the effective photon-gas entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyConvention {
    /// `S = ℧ T³ 4π⁴/45`, the prefactor as it appears in the source
    /// relations.
    #[default]
    AsPrinted,
    /// `S = ℧ T³ 4π²/45`, the textbook blackbody entropy.
    Blackbody,
}

impl EntropyConvention {
    pub fn prefactor(self) -> f64 {
        match self {
            EntropyConvention::AsPrinted => 4.0 * PI.powi(4) / 45.0,
            EntropyConvention::Blackbody => 4.0 * PI * PI / 45.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonGas {
    pub temperature: f64,
    pub entropy: f64,
}

/// Effective temperature and entropy of a thermalized photon gas with
/// energy `energy` in volume `volume`, from `E = ℧ T⁴ π²/15`.
pub fn photon_gas_effective(energy: f64, volume: f64, convention: EntropyConvention) -> Result<PhotonGas> {
    if !(energy >= 0.0) || !energy.is_finite() {
        return domain(format!("energy must be >= 0, got {energy}"));
    }
    if !(volume > 0.0) || !volume.is_finite() {
        return domain(format!("volume must be > 0, got {volume}"));
    }
    let t = (15.0 * energy / (volume * PI * PI)).powf(0.25);
    Ok(PhotonGas {
        temperature: t,
        entropy: volume * t.powi(3) * convention.prefactor(),
    })
}

/// Energy of a photon gas at temperature `t`: `℧ T⁴ π²/15`.
pub fn photon_gas_energy(t: f64, volume: f64) -> f64 {
    volume * t.powi(4) * PI * PI / 15.0
}

/// Linearized response to a small relative energy change:
/// `ΔE/(4E) ≈ ΔT_E/T_E ≈ ΔS_E/(3S_E)`. Returns (ΔT/T, ΔS/S).
pub fn linearized_changes(relative_energy_change: f64) -> (f64, f64) {
    let dt = relative_energy_change / 4.0;
    (dt, 3.0 * dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn temperature_round_trip() {
        let t = Temperature::new(0.37).unwrap();
        assert_eq!(t.value(), 0.37);
        let b = Temperature::from_beta(2.5).unwrap();
        assert_eq!(b.beta(), Some(2.5));
        assert!(Temperature::new(0.0).unwrap().is_zero());
        assert!(Temperature::new(-1.0).is_err());
        assert!(Temperature::from_beta(0.0).is_err());
        assert_eq!(Temperature::ZERO.beta(), None);
    }

    #[test]
    fn occupation_examples() {
        assert_eq!(bose_occupation(1.0, Temperature::ZERO).unwrap(), 0.0);
        let t = Temperature::from_beta(2f64.ln()).unwrap();
        assert_relative_eq!(bose_occupation(1.0, t).unwrap(), 1.0, max_relative = 1e-14);
        // 1/(e^{0.01} − 1), evaluated with series 1/x − 1/2 + x/12 − x³/720
        let x: f64 = 0.01;
        let series = 1.0 / x - 0.5 + x / 12.0 - x.powi(3) / 720.0;
        let n = bose_occupation(1.0, Temperature::new(100.0).unwrap()).unwrap();
        assert_relative_eq!(n, series, max_relative = 1e-14);
        assert!((n - 99.500_833).abs() < 1e-6);
    }

    #[test]
    fn occupation_errors_and_overflow() {
        assert!(bose_occupation(0.0, Temperature::new(1.0).unwrap()).is_err());
        assert!(bose_occupation(-1.0, Temperature::ZERO).is_err());
        let cold = Temperature::from_beta(800.0).unwrap();
        assert_eq!(bose_occupation(1.0, cold).unwrap(), 0.0);
    }

    #[test]
    fn factor_and_variance_examples() {
        assert_eq!(thermal_factor(1.0, Temperature::ZERO).unwrap(), 1.0);
        let f = thermal_factor(1.0, Temperature::new(50.0).unwrap()).unwrap();
        let x: f64 = 0.02;
        let series = 1.0 + 2.0 * (1.0 / x - 0.5 + x / 12.0 - x.powi(3) / 720.0);
        assert_relative_eq!(f, series, max_relative = 1e-14);
        // 1 + 2/(e^{0.02} − 1) = 100.003333…
        assert!((f - 100.003_333).abs() < 1e-6, "{f}");

        assert_eq!(thermal_variance(1.0, Temperature::ZERO).unwrap(), 0.0);
        let t = Temperature::from_beta(2f64.ln()).unwrap();
        assert_relative_eq!(thermal_variance(1.0, t).unwrap(), 2.0, max_relative = 1e-14);
        let v = thermal_variance(1.0, Temperature::new(100.0).unwrap()).unwrap();
        assert!((v - 9999.91).abs() < 0.01, "{v}");
    }

    #[test]
    fn high_temperature_expansion_error_is_linear_in_beta() {
        // n − (1/(βω) − 1/2) = βω/12 + O(β³)
        for beta in [1e-1, 1e-2, 1e-3] {
            let n = bose_occupation(1.0, Temperature::from_beta(beta).unwrap()).unwrap();
            let resid = n - (1.0 / beta - 0.5);
            assert!(resid.abs() <= beta / 12.0 * 1.01, "beta={beta} resid={resid}");
        }
    }

    #[test]
    fn weighted_occupation_is_continuous_at_zero() {
        let t = Temperature::new(0.8).unwrap();
        assert_relative_eq!(energy_weighted_occupation(0.0, t), 0.8);
        let small = 1e-7;
        assert_relative_eq!(
            energy_weighted_occupation(small, t),
            small * bose_occupation(small, t).unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn riemann_values() {
        assert_relative_eq!(riemann_zeta(2).unwrap(), PI * PI / 6.0, max_relative = 1e-15);
        assert_relative_eq!(riemann_zeta(4).unwrap(), PI.powi(4) / 90.0, max_relative = 1e-15);
        assert_relative_eq!(riemann_zeta(3).unwrap(), 1.202_056_903_159_594_2, max_relative = 1e-15);
    }

    #[test]
    fn hurwitz_sum_examples() {
        let one = Temperature::from_beta(1.0).unwrap();
        let z = hurwitz_sum(1, 0.0, one).unwrap();
        assert_relative_eq!(z.re, PI * PI / 6.0, max_relative = 1e-13);
        assert!(z.im.abs() < 1e-15);

        let two = Temperature::from_beta(2.0).unwrap();
        let z = hurwitz_sum(3, 0.0, two).unwrap();
        assert_relative_eq!(z.re, 3.0 / 8.0 * PI.powi(4) / 90.0, max_relative = 1e-13);

        assert!(hurwitz_sum(2, 0.1, Temperature::ZERO).is_err());
        assert!(hurwitz_sum(0, 0.1, one).is_err());
    }

    #[test]
    fn photon_gas_examples() {
        let e = photon_gas_energy(1.0, 1.0);
        assert_relative_eq!(e, PI * PI / 15.0);
        let g = photon_gas_effective(e, 1.0, EntropyConvention::AsPrinted).unwrap();
        assert_relative_eq!(g.temperature, 1.0, max_relative = 1e-15);
        assert_relative_eq!(g.entropy, 4.0 * PI.powi(4) / 45.0, max_relative = 1e-15);
        let g = photon_gas_effective(e, 1.0, EntropyConvention::Blackbody).unwrap();
        assert_relative_eq!(g.entropy, 4.0 * PI * PI / 45.0, max_relative = 1e-15);

        let zero = photon_gas_effective(0.0, 2.0, EntropyConvention::AsPrinted).unwrap();
        assert_eq!((zero.temperature, zero.entropy), (0.0, 0.0));
        assert!(photon_gas_effective(-1.0, 1.0, EntropyConvention::AsPrinted).is_err());
        assert!(photon_gas_effective(1.0, 0.0, EntropyConvention::AsPrinted).is_err());
    }

    #[test]
    fn small_perturbation_relations() {
        let (dt, ds) = linearized_changes(0.04);
        assert_relative_eq!(dt, 0.01);
        assert_relative_eq!(ds, 0.03);
        // against the exact inversion, for both conventions the ratio holds
        for conv in [EntropyConvention::AsPrinted, EntropyConvention::Blackbody] {
            let base = photon_gas_effective(1.0, 1.0, conv).unwrap();
            let bumped = photon_gas_effective(1.0 + 1e-6, 1.0, conv).unwrap();
            let rel_t = bumped.temperature / base.temperature - 1.0;
            let rel_s = bumped.entropy / base.entropy - 1.0;
            assert!((rel_t - 0.25e-6).abs() < 1e-12);
            assert!((rel_s - 0.75e-6).abs() < 1e-12);
        }
    }
}
