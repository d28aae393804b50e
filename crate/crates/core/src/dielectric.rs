//! Photon creation by a time-dependent, non-moving dielectric medium.
//!
//! The permittivity deviation is written `θ(t, r)` and photons are plane
//! waves `I = (k, ν)` with `ω_k = |k|/√ε_∞`. Two limits are covered: a
//! small bubble (size R much less than the emitted wavelengths), where only
//! the bubble volume `V(t)` matters, and a large homogeneous region, where
//! momentum conservation pairs `k` with `−k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::quad::{integrate, integrate_breaks, QuadOptions};
use crate::numerics::spectral::SampledSpectrum;
use crate::response::{correlation, CMatrix, FockTruncation, OccupationVector, PerturbationMatrices};
use crate::thermal::{bose_occupation, energy_weighted_occupation, riemann_zeta, thermal_factor, Temperature};

/// Largest share of `ω⁸|Ṽ|²` allowed in the top of a tabulated spectrum.
pub const SMOOTHNESS_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub enum TemporalShape {
    /// Bubble volume `V(t) = V₀ e^{−t²/τ²}`.
    GaussianBubble { v0: f64, tau: f64 },
    /// Uniformly sampled bubble volume.
    TabulatedBubble(Box<SampledSpectrum>),
    /// Homogeneous modulation `θ(t) = θ₀ sin(2Ωt)` on `[0, T_s]`.
    Harmonic { omega: f64, duration: f64 },
}

#[derive(Debug, Clone)]
pub struct PermittivityProfile {
    pub eps_inf: f64,
    pub theta0: f64,
    pub shape: TemporalShape,
}

impl PermittivityProfile {
    fn check(eps_inf: f64, theta0: f64) -> Result<()> {
        if !(eps_inf >= 1.0 && eps_inf.is_finite()) {
            return domain(format!("asymptotic permittivity must be >= 1, got {eps_inf}"));
        }
        if !theta0.is_finite() {
            return domain("theta0 must be finite");
        }
        Ok(())
    }

    pub fn gaussian_bubble(eps_inf: f64, theta0: f64, v0: f64, tau: f64) -> Result<Self> {
        Self::check(eps_inf, theta0)?;
        if !(tau > 0.0) || !v0.is_finite() {
            return domain("bubble needs finite V0 and tau > 0");
        }
        Ok(Self {
            eps_inf,
            theta0,
            shape: TemporalShape::GaussianBubble { v0, tau },
        })
    }

    /// Bubble volume sampled at `t0 + i dt`; fourth derivatives are taken
    /// spectrally, so the series must be smooth and decay at both ends.
    pub fn tabulated_bubble(eps_inf: f64, theta0: f64, t0: f64, dt: f64, volume: &[f64]) -> Result<Self> {
        Self::check(eps_inf, theta0)?;
        let peak = volume.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let edge = volume
            .first()
            .map_or(0.0, |v| v.abs())
            .max(volume.last().map_or(0.0, |v| v.abs()));
        if edge > 1e-10 * peak {
            return domain("bubble volume must decay at both ends of the window");
        }
        let spec = SampledSpectrum::from_samples(t0, dt, volume)?;
        let tail = spec.tail_fraction(4);
        if tail > SMOOTHNESS_LIMIT {
            return domain(format!(
                "bubble volume is not smooth enough for fourth derivatives (spectral tail {tail:e})"
            ));
        }
        Ok(Self {
            eps_inf,
            theta0,
            shape: TemporalShape::TabulatedBubble(Box::new(spec)),
        })
    }

    pub fn harmonic(eps_inf: f64, theta0: f64, omega: f64, duration: f64) -> Result<Self> {
        Self::check(eps_inf, theta0)?;
        if !(omega > 0.0) || !(duration >= 0.0 && duration.is_finite()) {
            return domain("harmonic modulation needs omega > 0 and duration >= 0");
        }
        Ok(Self {
            eps_inf,
            theta0,
            shape: TemporalShape::Harmonic { omega, duration },
        })
    }

    /// `|Ṽ(ω)|²` for bubble shapes.
    pub fn volume_power(&self, w: f64) -> Result<f64> {
        match &self.shape {
            TemporalShape::GaussianBubble { v0, tau } => {
                Ok(PI * v0 * v0 * tau * tau * (-w * w * tau * tau / 2.0).exp())
            }
            TemporalShape::TabulatedBubble(s) => Ok(s.at(w).norm_sqr()),
            TemporalShape::Harmonic { .. } => domain("volume spectrum requires a bubble profile"),
        }
    }

    /// `∫ (dⁿV/dtⁿ)² dt`
    pub fn volume_derivative_energy(&self, order: u32) -> Result<f64> {
        match &self.shape {
            TemporalShape::GaussianBubble { v0, tau } => {
                // ∫(g⁽ⁿ⁾)² = (2n−1)!! √(2π) V₀² / (2τ^{2n−1})
                let dfact: f64 = (1..=order).map(|k| (2 * k - 1) as f64).product();
                Ok(dfact * (2.0 * PI).sqrt() * v0 * v0 / (2.0 * tau.powi(2 * order as i32 - 1)))
            }
            TemporalShape::TabulatedBubble(s) => Ok(s.derivative_energy(order)),
            TemporalShape::Harmonic { .. } => domain("volume derivatives require a bubble profile"),
        }
    }

    fn bandwidth(&self) -> f64 {
        match &self.shape {
            TemporalShape::GaussianBubble { tau, .. } => 12.0 / tau,
            TemporalShape::TabulatedBubble(s) => s.max_omega(),
            TemporalShape::Harmonic { omega, .. } => 4.0 * omega,
        }
    }

    /// `θ̃(ω) = ∫ θ(t) e^{iωt} dt` for the homogeneous modulation.
    pub fn modulation_transform(&self, w: f64) -> Result<Complex64> {
        let TemporalShape::Harmonic { omega, duration } = self.shape else {
            return domain("modulation transform requires a harmonic profile");
        };
        let t = duration;
        let i = Complex64::new(0.0, 1.0);
        // ∫₀ᵀ e^{ixt} dt
        let e = |x: f64| {
            if (x * t).abs() < 1e-8 {
                Complex64::new(t, 0.5 * x * t * t)
            } else {
                ((i * x * t).exp() - 1.0) / (i * x)
            }
        };
        let a = 2.0 * omega;
        Ok(self.theta0 * (e(w + a) - e(w - a)) / (2.0 * i))
    }
}

/// Photon mode `(k, ν)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonMode {
    pub k: [f64; 3],
    /// 1 or 2
    pub polarization: u8,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

fn normalized(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

impl PhotonMode {
    pub fn new(k: [f64; 3], polarization: u8) -> Result<Self> {
        if !(polarization == 1 || polarization == 2) {
            return domain("polarization index must be 1 or 2");
        }
        if !(dot(k, k) > 0.0) || k.iter().any(|x| !x.is_finite()) {
            return domain("wave vector must be finite and non-zero");
        }
        Ok(Self { k, polarization })
    }

    pub fn norm(&self) -> f64 {
        dot(self.k, self.k).sqrt()
    }

    pub fn omega(&self, eps_inf: f64) -> f64 {
        self.norm() / eps_inf.sqrt()
    }

    pub fn reversed(&self) -> Self {
        Self {
            k: [-self.k[0], -self.k[1], -self.k[2]],
            polarization: self.polarization,
        }
    }

    /// Transverse orthonormal pair; `e(−k) = −e(k)` for ν = 1 and
    /// `e(−k) = e(k)` for ν = 2.
    pub fn polarization_vectors(&self) -> [[f64; 3]; 2] {
        let khat = normalized(self.k);
        // Fixed reference axis keeps the basis reproducible.
        let refs = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        let r = if dot(khat, refs[0]).abs() < 0.9 {
            refs[0]
        } else {
            refs[1]
        };
        let e1 = normalized(cross(khat, r));
        let e2 = cross(khat, e1);
        [e1, e2]
    }

    pub fn polarization_vector(&self) -> [f64; 3] {
        self.polarization_vectors()[self.polarization as usize - 1]
    }

    fn antiparallel_to(&self, other: &Self) -> bool {
        let s = self.norm().max(other.norm());
        self.k.iter().zip(&other.k).all(|(a, b)| (a + b).abs() <= 1e-12 * s)
    }
}

/// Coefficient in front of `T⁴ ∫V̈²` in the small-R thermal energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThermalCoefficient {
    /// `ζ(4)·840` relative to `(ε_∞/2π)³θ₀²/105`.
    #[default]
    AsPrinted,
    /// Low-temperature limit of the direct mode sum, four times larger.
    ModeSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DielectricEnergy {
    pub vacuum: f64,
    pub thermal: f64,
}

impl DielectricEnergy {
    pub fn total(&self) -> f64 {
        self.vacuum + self.thermal
    }
}

/// `E = (ε_∞/2π)³ (θ₀²/105) [∫(V⁗)² dt + c ζ(4) T⁴ ∫(V̈)² dt]`, with
/// `c = 840` for [`ThermalCoefficient::AsPrinted`].
pub fn small_r_energy(
    profile: &PermittivityProfile,
    temp: Temperature,
    coefficient: ThermalCoefficient,
) -> Result<DielectricEnergy> {
    let pre = (profile.eps_inf / (2.0 * PI)).powi(3) * profile.theta0 * profile.theta0 / 105.0;
    let vacuum = pre * profile.volume_derivative_energy(4)?;
    let thermal = if temp.is_zero() {
        0.0
    } else {
        let c = match coefficient {
            ThermalCoefficient::AsPrinted => 840.0,
            ThermalCoefficient::ModeSum => 3360.0,
        };
        pre * c * riemann_zeta(4)? * temp.value().powi(4) * profile.volume_derivative_energy(2)?
    };
    Ok(DielectricEnergy { vacuum, thermal })
}

const ORACLE_TOL: f64 = 1e-9;

fn oracle_prefactor(profile: &PermittivityProfile) -> f64 {
    // (4π)²·(4/3)/(2π)⁶ from the angular and polarization sums, and ε_∞³
    // from dk = √ε_∞ dω.
    profile.eps_inf.powi(3) * profile.theta0 * profile.theta0 * (4.0 * PI).powi(2) * (4.0 / 3.0) / (2.0 * PI).powi(6)
}

/// Small-R energy by direct two-dimensional quadrature of the mode sum,
/// `E = C ∫∫ dω dω' ω⁴ω'³ [|Ṽ(ω+ω')|²(1+n+n') + |Ṽ(ω−ω')|²(n'−n)]`.
/// Returns vacuum and thermal parts.
pub fn small_r_oracle(profile: &PermittivityProfile, temp: Temperature) -> Result<DielectricEnergy> {
    let band = profile.bandwidth();
    let upper = band + if temp.is_zero() { 0.0 } else { 40.0 * temp.value() };
    let opts = QuadOptions {
        abs_tol: 1e-300,
        ..QuadOptions::rel(ORACLE_TOL)
    };
    let c = oracle_prefactor(profile);
    let p = |w: f64| profile.volume_power(w).unwrap_or(0.0);

    let vac_inner = |w: f64| -> f64 {
        let hi = band - w;
        if hi <= 0.0 {
            return 0.0;
        }
        integrate(|wp| wp.powi(3) * p(w + wp), 0.0, hi, opts).map_or(f64::NAN, |r| r.value) * w.powi(4)
    };
    let vacuum = c * integrate_breaks(vac_inner, &[0.0, 0.25 * band, band], opts)?.value;

    let thermal = if temp.is_zero() {
        0.0
    } else {
        let th_inner = |w: f64| -> f64 {
            let nw = energy_weighted_occupation(w, temp);
            let f = |wp: f64| {
                let nwp = energy_weighted_occupation(wp, temp) * wp * wp;
                // ω⁴ n = ω³ (ω n), kept finite at ω → 0.
                let pair = p(w + wp) * (nw * w.powi(3) * wp.powi(3) + w.powi(4) * nwp);
                let scat = p(w - wp) * (w.powi(4) * nwp - nw * w.powi(3) * wp.powi(3));
                pair + scat
            };
            let mut breaks = vec![0.0];
            if w > 0.0 && w < upper {
                breaks.push(w);
            }
            breaks.push(upper + w);
            integrate_breaks(f, &breaks, opts).map_or(f64::NAN, |r| r.value)
        };
        c * integrate_breaks(th_inner, &[0.0, 0.25 * upper, upper], opts)?.value
    };
    if !(vacuum.is_finite() && thermal.is_finite()) {
        return Err(crate::error::Error::Quadrature {
            achieved: f64::NAN,
            requested: ORACLE_TOL,
        });
    }
    Ok(DielectricEnergy { vacuum, thermal })
}

/// Spectral energy density `e(ω)` of the small-R emission, so that
/// `∫ e(ω) dω` is the oracle energy. Returns (vacuum, thermal).
pub fn spectral_density(profile: &PermittivityProfile, temp: Temperature, w: f64) -> Result<(f64, f64)> {
    if !(w > 0.0) {
        return domain("spectral density needs omega > 0");
    }
    let band = profile.bandwidth();
    let opts = QuadOptions {
        abs_tol: 1e-300,
        ..QuadOptions::rel(ORACLE_TOL)
    };
    let c = oracle_prefactor(profile);
    let p = |x: f64| profile.volume_power(x).unwrap_or(0.0);
    let vac = if band > w {
        integrate(|wp| wp.powi(3) * p(w + wp), 0.0, band - w, opts)?.value
    } else {
        0.0
    };
    let th = if temp.is_zero() {
        0.0
    } else {
        let n = bose_occupation(w, temp)?;
        let upper = band + w + 40.0 * temp.value();
        let f = |wp: f64| {
            let np = energy_weighted_occupation(wp, temp);
            let w3 = wp.powi(3);
            p(w + wp) * (w3 * n + wp * wp * np) + p(w - wp) * (wp * wp * np - w3 * n)
        };
        integrate_breaks(f, &[0.0, w, upper], opts)?.value
    };
    Ok((c * w.powi(4) * vac, c * w.powi(4) * th))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeRRow {
    pub omega: f64,
    pub k: f64,
    /// `|S_{kν,(−k)ν}|²`
    pub vacuum: f64,
    pub thermal_factor: f64,
    pub delta_n: f64,
}

/// Pair amplitude `S_{kν,k'ν'} = ω_k θ̃(2ω_k) (e_kν·e_k'ν')` for `k' = −k`,
/// zero otherwise.
pub fn large_r_pair_amplitude(profile: &PermittivityProfile, a: &PhotonMode, b: &PhotonMode) -> Result<Complex64> {
    if !a.antiparallel_to(b) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let w = a.omega(profile.eps_inf);
    let pol = dot(a.polarization_vector(), b.polarization_vector());
    Ok(profile.modulation_transform(2.0 * w)? * (w * pol))
}

/// `ΔN_{kν} = |S_{kν,(−k)ν}|² (1 + 2n_k)` for each mode.
pub fn large_r_delta_n(
    profile: &PermittivityProfile,
    temp: Temperature,
    modes: &[PhotonMode],
) -> Result<Vec<LargeRRow>> {
    modes
        .iter()
        .map(|m| {
            let s = large_r_pair_amplitude(profile, m, &m.reversed())?;
            let w = m.omega(profile.eps_inf);
            let f = thermal_factor(w, temp)?;
            Ok(LargeRRow {
                omega: w,
                k: m.norm(),
                vacuum: s.norm_sqr(),
                thermal_factor: f,
                delta_n: s.norm_sqr() * f,
            })
        })
        .collect()
}

/// Same as [`large_r_delta_n`] for modes along a fixed axis at the given
/// frequencies.
pub fn large_r_spectrum(profile: &PermittivityProfile, temp: Temperature, omegas: &[f64]) -> Result<Vec<LargeRRow>> {
    let modes = omegas
        .iter()
        .map(|w| PhotonMode::new([0.0, 0.0, w * profile.eps_inf.sqrt()], 1))
        .collect::<Result<Vec<_>>>()?;
    large_r_delta_n(profile, temp, &modes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCorrelation {
    pub total: f64,
    /// `⟨H₁[N_a N_b, H₁]⟩₀`, the part carried by the pair structure.
    pub back_to_back: f64,
    /// `−n_a ΔN_b − n_b ΔN_a`, negative and direction independent.
    pub isotropic: f64,
}

/// Second-order `⟨N_a N_b⟩ − ⟨N_a⟩⟨N_b⟩` for two distinct modes. The
/// perturbation only couples `k` to `−k`, so modes from different pairs
/// are statistically independent; a genuine pair is evaluated with the
/// truncated Fock oracle on its two-mode reduction.
pub fn pair_correlation(
    profile: &PermittivityProfile,
    temp: Temperature,
    a: &PhotonMode,
    b: &PhotonMode,
    cutoff: FockTruncation,
) -> Result<PairCorrelation> {
    if a == b {
        return domain("pair correlation needs two distinct modes");
    }
    let rows = large_r_delta_n(profile, temp, &[*a, *b])?;
    let n_a = bose_occupation(rows[0].omega, temp)?;
    let n_b = bose_occupation(rows[1].omega, temp)?;
    let isotropic = -n_a * rows[1].delta_n - n_b * rows[0].delta_n;

    if a.antiparallel_to(b) {
        let s = large_r_pair_amplitude(profile, a, b)?;
        let z = Complex64::new(0.0, 0.0);
        let smat = CMatrix::from_row_slice(2, 2, &[z, s, s, z]);
        let mat = PerturbationMatrices::new(smat, CMatrix::zeros(2, 2))?;
        let occ = OccupationVector::new(vec![n_a, n_b])?;
        let c = correlation(&mat, &occ, cutoff)?;
        Ok(PairCorrelation {
            total: c.total[(0, 1)],
            back_to_back: c.commutator[(0, 1)],
            isotropic: c.isotropic[(0, 1)],
        })
    } else {
        Ok(PairCorrelation {
            total: 0.0,
            back_to_back: -isotropic,
            isotropic,
        })
    }
}
