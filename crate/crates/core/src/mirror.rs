//! A single perfectly reflecting mirror in 1+1 dimensions, displaced by a
//! small trajectory η(t).
//!
//! Both sides of the mirror are summed over, so the coupling matrices are
//! `S_kk' = √(kk') η̃(k+k')/π` and `U_kk' = √(kk') η̃(k−k')/π` with
//! `η̃(ω) = ∫ η(t) e^{iωt} dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::quad::{gauss_legendre, integrate_breaks, QuadOptions};
use crate::numerics::spectral::SampledSpectrum;
use crate::numerics::spline::CubicSpline;
use crate::thermal::{bose_occupation, energy_weighted_occupation, Temperature};

/// Largest |η| allowed at the edges of a tabulated window, relative to the
/// peak.
pub const DECAY_TOLERANCE: f64 = 1e-10;
/// Threshold on `max ΔN_k/(1+n_k)` above which perturbation theory is
/// flagged as doubtful.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct TabulatedPath {
    spline: CubicSpline,
    spectrum: SampledSpectrum,
    bandwidth: f64,
    scale: f64,
}

#[derive(Debug, Clone)]
pub enum Trajectory {
    /// `η = a e^{−t²/τ²}`
    Gaussian {
        a: f64,
        tau: f64,
    },
    /// `η = a sin(Ωt) e^{−t²/τ²}`
    WindowedSine {
        a: f64,
        omega: f64,
        tau: f64,
    },
    Tabulated(Box<TabulatedPath>),
}

impl Trajectory {
    pub fn gaussian(a: f64, tau: f64) -> Result<Self> {
        if !a.is_finite() || !(tau > 0.0 && tau.is_finite()) {
            return domain("gaussian trajectory needs finite a and tau > 0");
        }
        Ok(Trajectory::Gaussian { a, tau })
    }

    pub fn windowed_sine(a: f64, omega: f64, tau: f64) -> Result<Self> {
        if !a.is_finite() || !(omega >= 0.0 && omega.is_finite()) || !(tau > 0.0 && tau.is_finite()) {
            return domain("windowed sine needs finite a, omega >= 0 and tau > 0");
        }
        Ok(Trajectory::WindowedSine { a, omega, tau })
    }

    /// Uniform samples `η(t0 + i dt)`. The path must have decayed at both ends.
    pub fn tabulated(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 8 {
            return domain("tabulated trajectory needs at least eight samples");
        }
        let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let edge = samples[0].abs().max(samples[samples.len() - 1].abs());
        if edge > DECAY_TOLERANCE * peak {
            return domain(format!(
                "tabulated trajectory must decay below {DECAY_TOLERANCE:e} of its peak at the window ends (edge/peak = {:e})",
                edge / peak
            ));
        }
        let spectrum = SampledSpectrum::from_samples(t0, dt, &samples)?;
        let x: Vec<f64> = (0..samples.len()).map(|i| t0 + i as f64 * dt).collect();
        let spline = CubicSpline::new(x, samples)?;

        // Highest frequency carrying non-negligible power.
        let max_power = (0..)
            .map(|k| k as f64 * spectrum.d_omega())
            .take_while(|w| *w <= spectrum.max_omega())
            .map(|w| spectrum.at(w).norm_sqr())
            .fold(0.0, f64::max);
        let mut bandwidth = spectrum.max_omega();
        while bandwidth > spectrum.d_omega() && spectrum.at(bandwidth).norm_sqr() < 1e-20 * max_power {
            bandwidth -= spectrum.d_omega();
        }
        let scale = 10.0 / bandwidth.max(spectrum.d_omega());
        let bandwidth = (bandwidth + 2.0 * spectrum.d_omega()).min(spectrum.max_omega());
        Ok(Trajectory::Tabulated(Box::new(TabulatedPath {
            spline,
            spectrum,
            bandwidth,
            scale,
        })))
    }

    /// (η, η̇, η̈) at time t.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self {
            Trajectory::Gaussian { a, tau } => {
                let g = a * (-t * t / (tau * tau)).exp();
                let t2 = tau * tau;
                (g, -2.0 * t / t2 * g, (4.0 * t * t / (t2 * t2) - 2.0 / t2) * g)
            }
            Trajectory::WindowedSine { a, omega, tau } => {
                let t2 = tau * tau;
                let g = a * (-t * t / t2).exp();
                let gd = -2.0 * t / t2 * g;
                let gdd = (4.0 * t * t / (t2 * t2) - 2.0 / t2) * g;
                let (s, c) = (omega * t).sin_cos();
                (
                    g * s,
                    gd * s + g * omega * c,
                    gdd * s + 2.0 * gd * omega * c - g * omega * omega * s,
                )
            }
            Trajectory::Tabulated(p) => p.spline.eval(t).unwrap_or((0.0, 0.0, 0.0)),
        }
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    pub fn eta_dot(&self, t: f64) -> f64 {
        self.eval(t).1
    }

    pub fn eta_ddot(&self, t: f64) -> f64 {
        self.eval(t).2
    }

    /// `η̃(ω) = ∫ η(t) e^{iωt} dt`
    pub fn fourier(&self, w: f64) -> Complex64 {
        let gauss = |tau: f64, w: f64| PI.sqrt() * tau * (-w * w * tau * tau / 4.0).exp();
        match self {
            Trajectory::Gaussian { a, tau } => Complex64::new(a * gauss(*tau, w), 0.0),
            Trajectory::WindowedSine { a, omega, tau } => {
                // sin = (e^{iΩt} − e^{−iΩt})/2i
                let d = gauss(*tau, w + omega) - gauss(*tau, w - omega);
                Complex64::new(0.0, -0.5 * a * d)
            }
            Trajectory::Tabulated(p) => p.spectrum.at(w),
        }
    }

    /// `|η̃(ω)|²`
    pub fn power(&self, w: f64) -> f64 {
        self.fourier(w).norm_sqr()
    }

    /// Frequency beyond which `|η̃|²` is negligible (below ~1e−20 of its peak).
    pub fn bandwidth(&self) -> f64 {
        match self {
            Trajectory::Gaussian { tau, .. } => 10.0 / tau,
            Trajectory::WindowedSine { omega, tau, .. } => omega + 10.0 / tau,
            Trajectory::Tabulated(p) => p.bandwidth,
        }
    }

    /// Characteristic duration used for grid construction.
    pub fn time_scale(&self) -> f64 {
        match self {
            Trajectory::Gaussian { tau, .. } | Trajectory::WindowedSine { tau, .. } => *tau,
            Trajectory::Tabulated(p) => p.scale,
        }
    }

    /// `∫ (dⁿη/dtⁿ)² dt` for n = 1, 2.
    pub fn derivative_energy(&self, order: u32) -> Result<f64> {
        let root = (PI / 2.0).sqrt();
        match (self, order) {
            (Trajectory::Gaussian { a, tau }, 1) => Ok(a * a * root / tau),
            (Trajectory::Gaussian { a, tau }, 2) => Ok(3.0 * a * a * root / tau.powi(3)),
            (Trajectory::WindowedSine { tau, .. }, 1 | 2) => {
                let half = 10.0 * tau;
                let breaks: Vec<f64> = (0..=40).map(|i| -half + 2.0 * half * i as f64 / 40.0).collect();
                let f = |t: f64| {
                    let (_, d, dd) = self.eval(t);
                    if order == 1 {
                        d * d
                    } else {
                        dd * dd
                    }
                };
                let r = integrate_breaks(f, &breaks, QuadOptions::rel(1e-12))?;
                Ok(r.value)
            }
            (Trajectory::Tabulated(p), 1 | 2) => Ok(p.spectrum.derivative_energy(order)),
            _ => domain("derivative energy is available for orders 1 and 2"),
        }
    }
}

fn check_positive(k: f64, name: &str) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return domain(format!("{name} must be finite and > 0, got {k}"));
    }
    Ok(())
}

/// `M_kk'(t) = η̇(t) (2/π) k k'/(k² − k'²)`
pub fn coupling_matrix_element(traj: &Trajectory, t: f64, k: f64, kp: f64) -> Result<f64> {
    check_positive(k, "k")?;
    check_positive(kp, "k'")?;
    if k == kp {
        return domain("M_kk' is defined only for k != k'");
    }
    Ok(traj.eta_dot(t) * 2.0 / PI * k * kp / (k * k - kp * kp))
}

/// Pair-creation element; the prefactor
/// `(√(k/k') − √(k'/k)) k k'/(k − k')` equals `√(kk')` identically.
pub fn smatrix(traj: &Trajectory, k: f64, kp: f64) -> Result<Complex64> {
    check_positive(k, "k")?;
    check_positive(kp, "k'")?;
    Ok(traj.fourier(k + kp) * ((k * kp).sqrt() / PI))
}

/// Scattering element `√(kk') η̃(k − k')/π`.
pub fn umatrix(traj: &Trajectory, k: f64, kp: f64) -> Result<Complex64> {
    check_positive(k, "k")?;
    check_positive(kp, "k'")?;
    Ok(traj.fourier(k - kp) * ((k * kp).sqrt() / PI))
}

/// Composite Gauss–Legendre grid in k: one panel on `[0, k_min]` and
/// logarithmically spaced panels up to `k_max`.
#[derive(Debug, Clone, Serialize)]
pub struct WavenumberGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub k_max: f64,
}

impl WavenumberGrid {
    pub fn log_panels(k_min: f64, k_max: f64, panels: usize, order: usize) -> Result<Self> {
        if !(k_min > 0.0 && k_max > k_min) || panels == 0 || order < 2 {
            return domain("grid needs 0 < k_min < k_max, panels >= 1 and order >= 2");
        }
        let (x, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((panels + 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut push = |a: f64, b: f64| {
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(0.5 * (a + b) + 0.5 * (b - a) * xi);
                weights.push(0.5 * (b - a) * wi);
            }
        };
        push(0.0, k_min);
        let ratio = (k_max / k_min).ln() / panels as f64;
        for p in 0..panels {
            push(k_min * (ratio * p as f64).exp(), k_min * (ratio * (p + 1) as f64).exp());
        }
        Ok(Self { nodes, weights, k_max })
    }

    /// Bandwidth rule: `k_max = max(bandwidth, 40 T)`, 50 log panels of 8
    /// nodes down to `1e−5 k_max`.
    pub fn for_trajectory(traj: &Trajectory, temp: Temperature) -> Result<Self> {
        let k_max = traj.bandwidth().max(40.0 * temp.value());
        Self::log_panels(1e-5 * k_max, k_max, 50, 8)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Enforces the bandwidth rule for a given trajectory.
    pub fn check(&self, traj: &Trajectory) -> Result<()> {
        if self.nodes.windows(2).any(|w| !(w[1] > w[0])) || self.weights.iter().any(|w| !(*w > 0.0)) {
            return domain("grid nodes must increase and weights must be positive");
        }
        let need = traj.bandwidth().max(10.0 / traj.time_scale());
        if self.k_max < need * (1.0 - 1e-12) {
            return domain(format!(
                "grid k_max = {} is below the bandwidth rule {need}",
                self.k_max
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MirrorSpectrum {
    pub k: Vec<f64>,
    pub vacuum: Vec<f64>,
    pub thermal: Vec<f64>,
    /// `max_k ΔN_k / (1 + n_k)`
    pub perturbative_ratio: f64,
    pub warnings: Vec<String>,
}

impl MirrorSpectrum {
    pub fn total(&self) -> Vec<f64> {
        self.vacuum.iter().zip(&self.thermal).map(|(a, b)| a + b).collect()
    }
}

const SPECTRUM_TOL: f64 = 1e-9;

/// (vacuum, thermal) parts of ΔN_k at a single wavenumber.
fn spectrum_point(traj: &Trajectory, temp: Temperature, k: f64, n_k: f64) -> Result<(f64, f64)> {
    let band = traj.bandwidth();
    let opts = QuadOptions {
        abs_tol: 1e-300,
        ..QuadOptions::rel(SPECTRUM_TOL)
    };
    let pref = k / (PI * PI);

    // Pair term: |η̃(k+k')|² restricts k' to [0, band − k].
    let upper = band - k;
    let (mut vac, mut th) = (0.0, 0.0);
    if upper > 0.0 {
        let mid = (0.5 * upper).min(1.0 / traj.time_scale());
        let v = integrate_breaks(|kp| kp * traj.power(k + kp), &[0.0, mid, upper], opts)?;
        vac = pref * v.value;
        if !temp.is_zero() {
            let t = integrate_breaks(
                |kp| traj.power(k + kp) * (energy_weighted_occupation(kp, temp) + kp * n_k),
                &[0.0, mid, upper],
                opts,
            )?;
            th += pref * t.value;
        }
    }

    // Scattering term: |η̃(k−k')|² (n_k' − n_k), smooth through k' = k.
    if !temp.is_zero() {
        let lo = (k - band).max(0.0);
        let hi = k + band;
        let f = |kp: f64| traj.power(k - kp) * (energy_weighted_occupation(kp, temp) - kp * n_k);
        let mut breaks = vec![lo];
        if lo == 0.0 && k > 0.0 {
            breaks.push(0.5 * k);
        }
        breaks.extend([k, hi]);
        let u = integrate_breaks(f, &breaks, opts)?;
        th += pref * u.value;
    }
    Ok((vac, th))
}

/// ΔN_k on the grid nodes, split into the vacuum (`1` in `1 + n_k' + n_k`)
/// and temperature-dependent parts.
pub fn spectrum(traj: &Trajectory, temp: Temperature, grid: &WavenumberGrid) -> Result<MirrorSpectrum> {
    grid.check(traj)?;
    let rows = grid
        .nodes
        .par_iter()
        .map(|&k| {
            let n_k = if temp.is_zero() { 0.0 } else { bose_occupation(k, temp)? };
            let (v, t) = spectrum_point(traj, temp, k, n_k)?;
            Ok((v, t, n_k))
        })
        .collect::<Result<Vec<_>>>()?;

    let perturbative_ratio = rows
        .iter()
        .map(|(v, t, n)| (v + t).abs() / (1.0 + n))
        .fold(0.0, f64::max);
    let mut warnings = Vec::new();
    if perturbative_ratio > PERTURBATIVE_LIMIT {
        warnings.push(format!(
            "max dN_k/(1+n_k) = {perturbative_ratio:.3} exceeds {PERTURBATIVE_LIMIT}; quadratic response may be unreliable"
        ));
    }
    Ok(MirrorSpectrum {
        k: grid.nodes.clone(),
        vacuum: rows.iter().map(|r| r.0).collect(),
        thermal: rows.iter().map(|r| r.1).collect(),
        perturbative_ratio,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MirrorEnergy {
    pub vacuum: f64,
    pub thermal: f64,
}

impl MirrorEnergy {
    pub fn total(&self) -> f64 {
        self.vacuum + self.thermal
    }
}

/// `E = (1/12π) ∫η̈² dt + (π/3) T² ∫η̇² dt`
pub fn energy_closed(traj: &Trajectory, temp: Temperature) -> Result<MirrorEnergy> {
    let vacuum = traj.derivative_energy(2)? / (12.0 * PI);
    let t = temp.value();
    let thermal = if temp.is_zero() {
        0.0
    } else {
        PI / 3.0 * t * t * traj.derivative_energy(1)?
    };
    Ok(MirrorEnergy { vacuum, thermal })
}

/// `E = ∫ k ΔN_k dk` on the grid.
pub fn energy_quadrature(traj: &Trajectory, temp: Temperature, grid: &WavenumberGrid) -> Result<MirrorEnergy> {
    let spec = spectrum(traj, temp, grid)?;
    Ok(energy_from_spectrum(&spec, grid))
}

pub fn energy_from_spectrum(spec: &MirrorSpectrum, grid: &WavenumberGrid) -> MirrorEnergy {
    let sum = |v: &[f64]| -> f64 {
        grid.weights
            .iter()
            .zip(&grid.nodes)
            .zip(v)
            .map(|((w, k), dn)| w * k * dn)
            .sum()
    };
    MirrorEnergy {
        vacuum: sum(&spec.vacuum),
        thermal: sum(&spec.thermal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_element_examples() {
        let g = Trajectory::gaussian(1.0, 1.0).unwrap();
        // η̇(−τ/√2) = a√2/τ · e^{−1/2}
        let t = -1.0 / 2f64.sqrt();
        let edot = g.eta_dot(t);
        let m = coupling_matrix_element(&g, t, 1.0, 2.0).unwrap();
        assert!((m - edot * (-4.0 / (3.0 * PI))).abs() < 1e-15);
        let mt = coupling_matrix_element(&g, t, 2.0, 1.0).unwrap();
        assert!((m + mt).abs() < 1e-15);
        assert_eq!(coupling_matrix_element(&g, 0.0, 1.0, 2.0).unwrap(), 0.0);
        assert!(coupling_matrix_element(&g, 0.0, 1.0, 1.0).is_err());
        assert!(coupling_matrix_element(&g, 0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn s_and_u_limits() {
        let g = Trajectory::gaussian(0.7, 1.3).unwrap();
        let k = 0.9;
        // Raw printed form just off the diagonal.
        let raw = |kp: f64| ((k / kp).sqrt() - (kp / k).sqrt()) * (k * kp / (k - kp)) / PI * g.fourier(k + kp).re;
        let diag = smatrix(&g, k, k).unwrap().re;
        assert!((diag - k * g.fourier(2.0 * k).re / PI).abs() < 1e-15);
        for kp in [k * (1.0 + 1e-6), k * (1.0 - 1e-6)] {
            assert!((raw(kp) - smatrix(&g, k, kp).unwrap().re).abs() < 1e-8 * diag.abs());
        }
        let u = umatrix(&g, k, k).unwrap();
        assert!((u.re - k / PI * 0.7 * PI.sqrt() * 1.3).abs() < 1e-14);
    }

    #[test]
    fn fourier_is_hermitian() {
        let s = Trajectory::windowed_sine(0.3, 2.0, 1.5).unwrap();
        for w in [0.2, 1.0, 2.5] {
            assert!((s.fourier(-w) - s.fourier(w).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn windowed_sine_transform_matches_quadrature() {
        let s = Trajectory::windowed_sine(0.3, 2.0, 1.5).unwrap();
        let w = 1.7;
        let re = integrate_breaks(
            |t| s.eta(t) * (w * t).cos(),
            &[-20.0, 0.0, 20.0],
            QuadOptions::rel(1e-12),
        )
        .unwrap();
        let im = integrate_breaks(
            |t| s.eta(t) * (w * t).sin(),
            &[-20.0, 0.0, 20.0],
            QuadOptions::rel(1e-12),
        )
        .unwrap();
        let got = s.fourier(w);
        assert!((got.re - re.value).abs() < 1e-12);
        assert!((got.im - im.value).abs() < 1e-12);
    }

    #[test]
    fn zero_trajectory_gives_nothing() {
        let g = Trajectory::gaussian(0.0, 1.0).unwrap();
        let temp = Temperature::new(0.5).unwrap();
        let grid = WavenumberGrid::for_trajectory(&g, temp).unwrap();
        let spec = spectrum(&g, temp, &grid).unwrap();
        assert!(spec.total().iter().all(|v| *v == 0.0));
        assert_eq!(energy_closed(&g, temp).unwrap().total(), 0.0);
        assert_eq!(smatrix(&g, 1.0, 2.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gaussian_closed_form_moments() {
        let g = Trajectory::gaussian(1.0, 1.0).unwrap();
        let opts = QuadOptions::rel(1e-12);
        let d1 = integrate_breaks(|t| g.eta_dot(t).powi(2), &[-12.0, 0.0, 12.0], opts)
            .unwrap()
            .value;
        let d2 = integrate_breaks(|t| g.eta_ddot(t).powi(2), &[-12.0, 0.0, 12.0], opts)
            .unwrap()
            .value;
        assert!((d1 - g.derivative_energy(1).unwrap()).abs() < 1e-12);
        assert!((d2 - g.derivative_energy(2).unwrap()).abs() < 1e-11);
        let e = energy_closed(&g, Temperature::ZERO).unwrap();
        assert!((e.vacuum - (PI / 2.0).sqrt() / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn thermal_energy_exactly_quadratic() {
        let g = Trajectory::gaussian(0.4, 2.0).unwrap();
        let e0 = energy_closed(&g, Temperature::ZERO).unwrap().total();
        let e1 = energy_closed(&g, Temperature::new(0.3).unwrap()).unwrap().total();
        let e2 = energy_closed(&g, Temperature::new(0.6).unwrap()).unwrap().total();
        assert!(((e2 - e0) - 4.0 * (e1 - e0)).abs() < 1e-14);
    }

    #[test]
    fn scaling_law() {
        let s = 2.5;
        let a = Trajectory::gaussian(1.0, 1.0).unwrap();
        let b = Trajectory::gaussian(1.0, s).unwrap();
        let ea = energy_closed(&a, Temperature::ZERO).unwrap().vacuum;
        let eb = energy_closed(&b, Temperature::ZERO).unwrap().vacuum;
        assert!((eb - ea / s.powi(3)).abs() < 1e-15);
        let ra = a.derivative_energy(1).unwrap();
        let rb = b.derivative_energy(1).unwrap();
        assert!((rb - ra / s).abs() < 1e-15);
    }

    #[test]
    fn scattering_integrand_is_finite_at_diagonal() {
        let g = Trajectory::gaussian(1.0, 1.0).unwrap();
        let temp = Temperature::new(1.0).unwrap();
        let k = 0.8;
        let n_k = bose_occupation(k, temp).unwrap();
        let f = |kp: f64| g.power(k - kp) * (energy_weighted_occupation(kp, temp) - kp * n_k);
        assert!(f(k).abs() < 1e-15);
        assert!(f(k * (1.0 + 1e-9)).is_finite());
    }

    #[test]
    fn infrared_limit_of_thermal_integrand() {
        // k' n_k' → T as k' → 0, so the pair integrand tends to T |η̃(k)|².
        let g = Trajectory::gaussian(1.0, 1.0).unwrap();
        let temp = Temperature::new(0.7).unwrap();
        let k = 1.1;
        let got = g.power(k + 1e-9) * energy_weighted_occupation(1e-9, temp);
        assert!((got - 0.7 * g.power(k)).abs() < 1e-8 * g.power(k));
    }

    #[test]
    fn tabulated_matches_gaussian() {
        let dt = 0.01;
        let t0 = -8.0;
        let samples: Vec<f64> = (0..=1600).map(|i| (-(t0 + i as f64 * dt).powi(2)).exp()).collect();
        let tab = Trajectory::tabulated(t0, dt, samples).unwrap();
        let g = Trajectory::gaussian(1.0, 1.0).unwrap();
        for w in [0.0, 0.5, 2.0, 5.0] {
            assert!((tab.fourier(w) - g.fourier(w)).norm() < 1e-6);
        }
        let et = energy_closed(&tab, Temperature::new(0.2).unwrap()).unwrap();
        let eg = energy_closed(&g, Temperature::new(0.2).unwrap()).unwrap();
        assert!((et.vacuum - eg.vacuum).abs() < 1e-8 * eg.vacuum);
        assert!((et.thermal - eg.thermal).abs() < 1e-8 * eg.thermal);
        assert!(tab.bandwidth() >= 8.0, "{}", tab.bandwidth());
    }

    #[test]
    fn tabulated_rejects_non_decaying() {
        let samples = vec![1.0; 20];
        assert!(Trajectory::tabulated(0.0, 0.1, samples).is_err());
    }

    #[test]
    fn grid_rule_enforced() {
        let g = Trajectory::gaussian(1.0, 1.0).unwrap();
        let grid = WavenumberGrid::log_panels(1e-3, 5.0, 10, 8).unwrap();
        assert!(spectrum(&g, Temperature::ZERO, &grid).is_err());
        let ok = WavenumberGrid::for_trajectory(&g, Temperature::ZERO).unwrap();
        assert!(ok.len() >= 400);
    }
}
