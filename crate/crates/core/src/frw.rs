//! Minimally coupled massless scalar in a spatially flat FRW universe.
//!
//! In conformal time `dτ = Ω⁻² dt` each comoving mode obeys
//! `Q̈ + Ω⁴(τ) ω² Q = 0`, an oscillator with physical frequency
//! `ν(τ) = Ω²(τ) ω`. The in/out Bogoliubov coefficients are obtained by
//! integrating this equation between the asymptotic regions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::magnus::{propagate, MagnusOptions};
use crate::numerics::quad::{integrate, QuadOptions};
use crate::numerics::spline::CubicSpline;
use crate::thermal::{thermal_factor, Temperature};

/// Tolerance on `|α|² − |β|² = 1`.
pub const UNITARITY_TOL: f64 = 1e-8;
/// The asymptotic regions start where `|Ω̇/Ω| < ASYMPTOTIC · ν`.
pub const ASYMPTOTIC: f64 = 1e-8;

#[derive(Debug, Clone)]
pub enum ScaleFactorProfile {
    /// `Ω = Ω_in + (Ω_out − Ω_in)(1 + tanh(τ/τ_r))/2`
    Tanh {
        omega_in: f64,
        omega_out: f64,
        tau_r: f64,
    },
    /// `Ω = Ω₀ (1 + h e^{−τ²/w²})`
    Bump {
        omega0: f64,
        height: f64,
        width: f64,
    },
    Constant(f64),
    /// Spline through `(τ_i, Ω_i)`, held constant outside the knots.
    Tabulated(Box<CubicSpline>),
}

impl ScaleFactorProfile {
    pub fn tanh(omega_in: f64, omega_out: f64, tau_r: f64) -> Result<Self> {
        if !(omega_in > 0.0 && omega_out > 0.0) || !(tau_r > 0.0 && tau_r.is_finite()) {
            return domain("tanh ramp needs positive asymptotic scale factors and tau_r > 0");
        }
        Ok(Self::Tanh {
            omega_in,
            omega_out,
            tau_r,
        })
    }

    pub fn bump(omega0: f64, height: f64, width: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !(height > -1.0 && height.is_finite()) || !(width > 0.0) {
            return domain("bump needs omega0 > 0, height > -1 and width > 0");
        }
        Ok(Self::Bump { omega0, height, width })
    }

    pub fn constant(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return domain("scale factor must be > 0");
        }
        Ok(Self::Constant(omega))
    }

    pub fn tabulated(tau: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if omega.iter().any(|w| !(*w > 0.0)) {
            return domain("scale factor must be > 0 at every knot");
        }
        let s = CubicSpline::new(tau, omega)?;
        Ok(Self::Tabulated(Box::new(s)))
    }

    /// (Ω, dΩ/dτ)
    pub fn eval(&self, tau: f64) -> (f64, f64) {
        match self {
            Self::Tanh {
                omega_in,
                omega_out,
                tau_r,
            } => {
                let x = tau / tau_r;
                let th = x.tanh();
                let sech2 = 1.0 - th * th;
                (
                    omega_in + (omega_out - omega_in) * 0.5 * (1.0 + th),
                    (omega_out - omega_in) * 0.5 * sech2 / tau_r,
                )
            }
            Self::Bump { omega0, height, width } => {
                let g = (-tau * tau / (width * width)).exp();
                (
                    omega0 * (1.0 + height * g),
                    -2.0 * tau / (width * width) * omega0 * height * g,
                )
            }
            Self::Constant(w) => (*w, 0.0),
            Self::Tabulated(s) => {
                let (lo, hi) = s.domain();
                let t = tau.clamp(lo, hi);
                let (v, d, _) = s.eval(t).expect("clamped into domain");
                (v, if tau < lo || tau > hi { 0.0 } else { d })
            }
        }
    }

    pub fn omega(&self, tau: f64) -> f64 {
        self.eval(tau).0
    }

    /// (Ω_in, Ω_out)
    pub fn asymptotes(&self) -> (f64, f64) {
        match self {
            Self::Tanh {
                omega_in, omega_out, ..
            } => (*omega_in, *omega_out),
            Self::Bump { omega0, .. } => (*omega0, *omega0),
            Self::Constant(w) => (*w, *w),
            Self::Tabulated(s) => {
                let v = s.values();
                (v[0], v[v.len() - 1])
            }
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Self::Tanh { tau_r, .. } => *tau_r,
            Self::Bump { width, .. } => *width,
            Self::Constant(_) => 1.0,
            Self::Tabulated(s) => {
                let (lo, hi) = s.domain();
                0.5 * (hi - lo)
            }
        }
    }

    fn centre(&self) -> f64 {
        match self {
            Self::Tabulated(s) => {
                let (lo, hi) = s.domain();
                0.5 * (lo + hi)
            }
            _ => 0.0,
        }
    }

    /// Interval outside which `|Ω̇/Ω| < ASYMPTOTIC · Ω² ω`.
    pub fn window(&self, comoving: f64) -> (f64, f64) {
        if let Self::Tabulated(s) = self {
            return s.domain();
        }
        if let Self::Constant(_) = self {
            return (0.0, 0.0);
        }
        let quiet = |tau: f64| {
            let (w, d) = self.eval(tau);
            (d / w).abs() < ASYMPTOTIC * w * w * comoving
        };
        let c = self.centre();
        let reach = |dir: f64| {
            let mut step = self.scale();
            while !quiet(c + dir * step) {
                step *= 1.25;
            }
            c + dir * step
        };
        (reach(-1.0), reach(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogoliubovPair {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl BogoliubovPair {
    pub fn beta_sq(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// `|α|² − |β|² − 1`
    pub fn unitarity_defect(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr() - 1.0
    }
}

/// In/out Bogoliubov coefficients of the comoving mode `ω`.
pub fn mode_bogoliubov(profile: &ScaleFactorProfile, comoving: f64) -> Result<BogoliubovPair> {
    if !(comoving > 0.0 && comoving.is_finite()) {
        return domain(format!("comoving frequency must be > 0, got {comoving}"));
    }
    let (a, b) = profile.window(comoving);
    let (w_in, w_out) = (profile.omega(a), profile.omega(b));
    let nu_in = w_in * w_in * comoving;
    let nu_out = w_out * w_out * comoving;
    let nu_max = {
        let (oi, oo) = profile.asymptotes();
        let peak = match profile {
            ScaleFactorProfile::Bump { omega0, height, .. } => omega0 * (1.0 + height.max(0.0)),
            ScaleFactorProfile::Tabulated(s) => s.values().iter().cloned().fold(0.0, f64::max),
            _ => oi.max(oo),
        };
        peak * peak * comoving
    };

    // Dimensionless time s = ν_in τ.
    let opts = MagnusOptions {
        rel_tol: 1e-12,
        max_step: 0.25 * nu_in / nu_max,
        ..MagnusOptions::default()
    };
    let prop = propagate(
        |s| {
            let w = profile.omega(s / nu_in);
            let nu = w * w * comoving / nu_in;
            nu * nu
        },
        a * nu_in,
        b * nu_in,
        opts,
    )?;
    let m = prop.matrix;

    // In-mode e^{−iν_in τ}/√(2ν_in) at τ = a, in units of ν_in.
    let i = Complex64::new(0.0, 1.0);
    let u0 = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -a * nu_in);
    let v0 = -i * u0;
    let u = u0 * m[0][0] + v0 * m[0][1];
    let v = u0 * m[1][0] + v0 * m[1][1];
    // Out-modes with frequency r = ν_out/ν_in in scaled units.
    let r = nu_out / nu_in;
    let sb = b * nu_in;
    let k = (r / 2.0).sqrt();
    let pair = BogoliubovPair {
        alpha: Complex64::from_polar(k, r * sb) * (u + i * v / r),
        beta: Complex64::from_polar(k, -r * sb) * (u - i * v / r),
    };
    let defect = pair.unitarity_defect();
    if defect.abs() > UNITARITY_TOL {
        return Err(Error::Unitarity { defect });
    }
    Ok(pair)
}

/// `(ν_out − ν_in)²/(4 ν_in ν_out)` for an instantaneous jump.
pub fn sudden_limit(nu_in: f64, nu_out: f64) -> f64 {
    (nu_out - nu_in).powi(2) / (4.0 * nu_in * nu_out)
}

/// Which frequency sets the initial thermal occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OccupationFrequency {
    /// Physical in-region frequency `ν_in = Ω_in² ω`.
    #[default]
    Physical,
    Comoving,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrwRow {
    pub omega: f64,
    pub nu_in: f64,
    pub nu_out: f64,
    pub beta_sq: f64,
    pub unitarity_defect: f64,
    pub thermal_factor: f64,
    /// `|β|² (1 + 2n)`
    pub delta_n: f64,
}

/// `ΔN_ω^T = |β(ω)|² (1 + 2n)` for every comoving frequency, in parallel.
pub fn thermal_spectrum(
    profile: &ScaleFactorProfile,
    omegas: &[f64],
    temp: Temperature,
    occupation: OccupationFrequency,
) -> Result<Vec<FrwRow>> {
    let (oi, oo) = profile.asymptotes();
    omegas
        .par_iter()
        .map(|&w| {
            let pair = mode_bogoliubov(profile, w)?;
            let nu_in = oi * oi * w;
            let arg = match occupation {
                OccupationFrequency::Physical => nu_in,
                OccupationFrequency::Comoving => w,
            };
            let f = thermal_factor(arg, temp)?;
            Ok(FrwRow {
                omega: w,
                nu_in,
                nu_out: oo * oo * w,
                beta_sq: pair.beta_sq(),
                unitarity_defect: pair.unitarity_defect(),
                thermal_factor: f,
                delta_n: pair.beta_sq() * f,
            })
        })
        .collect()
}

/// Map between coordinate time `t` and conformal time `τ = ∫₀ᵗ Ω⁻² dt'`
/// for a scale factor given as a function of `t`.
pub struct ConformalClock<'a> {
    profile: &'a ScaleFactorProfile,
}

impl<'a> ConformalClock<'a> {
    pub fn new(profile: &'a ScaleFactorProfile) -> Result<Self> {
        if let ScaleFactorProfile::Tabulated(s) = profile {
            if s.values().iter().any(|v| !(*v > 0.0)) {
                return domain("scale factor must be > 0");
            }
        }
        Ok(Self { profile })
    }

    fn inv_sq(&self, t: f64) -> Result<f64> {
        let w = self.profile.omega(t);
        if !(w > 0.0) {
            return domain(format!("scale factor is not positive at t = {t}"));
        }
        Ok(1.0 / (w * w))
    }

    pub fn tau(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        // Non-positive values become NaN and fail the quadrature below.
        let f = |s: f64| self.inv_sq(s).unwrap_or(f64::NAN);
        let r = integrate(f, 0.0f64.min(t), 0.0f64.max(t), QuadOptions::rel(1e-13))?;
        if !r.value.is_finite() {
            return domain("scale factor is not positive on the integration range");
        }
        Ok(r.value.copysign(t))
    }

    /// Newton inversion of `τ(t)`.
    pub fn time(&self, tau: f64) -> Result<f64> {
        let (oi, oo) = self.profile.asymptotes();
        let mut t = tau * 0.5 * (oi * oi + oo * oo);
        for _ in 0..100 {
            let err = self.tau(t)? - tau;
            let step = err / self.inv_sq(t)?;
            t -= step;
            if step.abs() <= 1e-14 * (1.0 + t.abs()) {
                return Ok(t);
            }
        }
        Err(Error::Ode(format!(
            "conformal time inversion did not converge at tau = {tau}"
        )))
    }

    /// Sample `Ω(t(τ))` on `[τ_a, τ_b]` as a tabulated conformal-time profile.
    pub fn reparameterize(&self, tau_a: f64, tau_b: f64, samples: usize) -> Result<ScaleFactorProfile> {
        if !(tau_b > tau_a) || samples < 4 {
            return domain("need tau_b > tau_a and at least four samples");
        }
        let taus: Vec<f64> = (0..samples)
            .map(|i| tau_a + (tau_b - tau_a) * i as f64 / (samples - 1) as f64)
            .collect();
        let omegas = taus
            .iter()
            .map(|&tau| Ok(self.profile.omega(self.time(tau)?)))
            .collect::<Result<Vec<_>>>()?;
        ScaleFactorProfile::tabulated(taus, omegas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile_has_no_mixing() {
        let p = ScaleFactorProfile::constant(1.7).unwrap();
        let b = mode_bogoliubov(&p, 2.0).unwrap();
        assert!(b.beta_sq() < 1e-28);
        assert!((b.alpha.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_profile_shape() {
        let p = ScaleFactorProfile::tanh(1.0, 2.0, 0.5).unwrap();
        assert!((p.omega(0.0) - 1.5).abs() < 1e-15);
        let (a, b) = p.window(1.0);
        assert!(a < 0.0 && b > 0.0);
        let (w, d) = p.eval(b);
        assert!((d / w).abs() < ASYMPTOTIC * w * w);
        assert!(ScaleFactorProfile::tanh(0.0, 1.0, 1.0).is_err());
        assert!(ScaleFactorProfile::bump(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn unitarity_and_time_reversal() {
        for (oi, oo) in [(1.0, 1.2), (1.0, 2.0), (2.0, 1.0)] {
            for tr in [0.1, 1.0] {
                let fwd = ScaleFactorProfile::tanh(oi, oo, tr).unwrap();
                let bwd = ScaleFactorProfile::tanh(oo, oi, tr).unwrap();
                for w in [0.3, 1.0] {
                    let a = mode_bogoliubov(&fwd, w).unwrap();
                    let b = mode_bogoliubov(&bwd, w).unwrap();
                    assert!(a.unitarity_defect().abs() < 1e-8);
                    assert!((a.beta_sq() - b.beta_sq()).abs() < 1e-8 * (1.0 + a.beta_sq()));
                }
            }
        }
    }

    #[test]
    fn bump_creates_particles() {
        let p = ScaleFactorProfile::bump(1.0, 0.5, 1.0).unwrap();
        let b = mode_bogoliubov(&p, 1.0).unwrap();
        assert!(b.beta_sq() > 1e-6);
        assert!(b.unitarity_defect().abs() < 1e-8);
    }

    #[test]
    fn adiabatic_suppression() {
        let p = ScaleFactorProfile::tanh(1.0, 2.0, 25.0).unwrap();
        let b = mode_bogoliubov(&p, 1.0).unwrap();
        assert!(b.beta_sq() < 1e-6, "{}", b.beta_sq());
    }

    #[test]
    fn thermal_spectrum_factorizes() {
        let p = ScaleFactorProfile::tanh(1.0, 1.5, 0.3).unwrap();
        let omegas = [0.2, 0.5, 1.0];
        let temp = Temperature::new(0.7).unwrap();
        let hot = thermal_spectrum(&p, &omegas, temp, OccupationFrequency::Physical).unwrap();
        let cold = thermal_spectrum(&p, &omegas, Temperature::ZERO, OccupationFrequency::Physical).unwrap();
        for (h, c) in hot.iter().zip(&cold) {
            assert_eq!(c.delta_n, c.beta_sq);
            assert_eq!(
                h.delta_n / c.delta_n,
                thermal_factor(h.nu_in, temp).unwrap() * h.beta_sq / c.beta_sq
            );
        }
        let com = thermal_spectrum(&p, &omegas, temp, OccupationFrequency::Comoving).unwrap();
        assert_eq!(com[1].thermal_factor, thermal_factor(0.5, temp).unwrap());
    }

    #[test]
    fn conformal_time_examples() {
        let one = ScaleFactorProfile::constant(1.0).unwrap();
        let c = ConformalClock::new(&one).unwrap();
        assert!((c.tau(3.5).unwrap() - 3.5).abs() < 1e-14);
        let two = ScaleFactorProfile::constant(2.0).unwrap();
        let c = ConformalClock::new(&two).unwrap();
        assert!((c.tau(-3.0).unwrap() + 0.75).abs() < 1e-14);

        let ramp = ScaleFactorProfile::tanh(1.0, 3.0, 0.7).unwrap();
        let c = ConformalClock::new(&ramp).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for t in [-4.0, -1.0, -0.1, 0.3, 2.0, 6.0] {
            let tau = c.tau(t).unwrap();
            assert!(tau > prev);
            prev = tau;
            let back = c.time(tau).unwrap();
            assert!((back - t).abs() <= 1e-10 * t.abs());
        }
        let re = c.reparameterize(-2.0, 1.0, 50).unwrap();
        let tau = -0.4;
        assert!((re.omega(tau) - ramp.omega(c.time(tau).unwrap())).abs() < 1e-3);
    }
}
