//! Scalar field in a rectangular box with Dirichlet walls whose shape
//! trembles slightly.
//!
//! The wall motion enters through a time-dependent frequency shift
//! `Δω²_I(t)` of each mode (squeezing part) and an antisymmetric coupling
//! `M_IJ(t)` between modes (velocity part). A resonant drive
//! `Δω²(t) = 2ω²ε sin(2ωt)` of the fundamental is treated both in the
//! rotating-wave approximation and by direct integration of the mode
//! equation.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::magnus::{propagate, MagnusOptions};
use crate::response::{CMatrix, PerturbationMatrices};
use crate::thermal::{bose_occupation, thermal_factor, thermal_variance, Temperature};

/// Relative tolerance on `|α|² − |β|² = 1` in the mode-equation oracle.
pub const UNITARITY_TOL: f64 = 1e-8;
/// Wall amplitudes above this are unrealistically large for a real cavity.
pub const EPSILON_ADVISORY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxGeometry {
    pub lengths: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxMode {
    pub indices: [u32; 3],
    pub omega: f64,
    /// Index of the (possibly degenerate) frequency level, starting at 0.
    pub level: usize,
}

impl BoxGeometry {
    pub fn new(lengths: [f64; 3]) -> Result<Self> {
        if lengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return domain(format!("box edge lengths must be finite and > 0, got {lengths:?}"));
        }
        Ok(Self { lengths })
    }

    pub fn cube(edge: f64) -> Result<Self> {
        Self::new([edge; 3])
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// `ω = π √Σ (n_i/L_i)²`
    pub fn frequency(&self, n: [u32; 3]) -> f64 {
        PI * n
            .iter()
            .zip(&self.lengths)
            .map(|(&k, l)| (k as f64 / l).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `f(r) = √(8/V) Π sin(n_i π x_i/L_i)`
    pub fn eigenfunction(&self, n: [u32; 3], r: [f64; 3]) -> f64 {
        let norm = (8.0 / self.volume()).sqrt();
        (0..3)
            .map(|i| (n[i] as f64 * PI * r[i] / self.lengths[i]).sin())
            .product::<f64>()
            * norm
    }

    pub fn gradient(&self, n: [u32; 3], r: [f64; 3]) -> [f64; 3] {
        let norm = (8.0 / self.volume()).sqrt();
        let k: Vec<f64> = (0..3).map(|i| n[i] as f64 * PI / self.lengths[i]).collect();
        let s: Vec<(f64, f64)> = (0..3).map(|i| (k[i] * r[i]).sin_cos()).collect();
        [
            norm * k[0] * s[0].1 * s[1].0 * s[2].0,
            norm * k[1] * s[0].0 * s[1].1 * s[2].0,
            norm * k[2] * s[0].0 * s[1].0 * s[2].1,
        ]
    }
}

/// Lowest `count` modes sorted by frequency, with degenerate levels
/// numbered consecutively.
pub fn box_modes(geom: &BoxGeometry, count: usize) -> Result<Vec<BoxMode>> {
    if count == 0 {
        return domain("mode count must be >= 1");
    }
    let l_max = geom.lengths.iter().cloned().fold(0.0, f64::max);
    let mut cut = geom.frequency([1, 1, 1]) + PI / l_max;
    loop {
        let mut modes = Vec::new();
        let bound: Vec<u32> = geom.lengths.iter().map(|l| (cut * l / PI).floor() as u32).collect();
        for a in 1..=bound[0] {
            for b in 1..=bound[1] {
                for c in 1..=bound[2] {
                    let w = geom.frequency([a, b, c]);
                    if w <= cut {
                        modes.push(BoxMode {
                            indices: [a, b, c],
                            omega: w,
                            level: 0,
                        });
                    }
                }
            }
        }
        // Every mode below the cut has been found, so the first `count`
        // are exact once there are more than `count` of them.
        if modes.len() > count {
            modes.sort_by(|x, y| x.omega.total_cmp(&y.omega).then(x.indices.cmp(&y.indices)));
            let mut level = 0;
            for i in 1..modes.len() {
                if modes[i].omega - modes[i - 1].omega > 1e-12 * modes[i].omega {
                    level += 1;
                }
                modes[i].level = level;
            }
            modes.truncate(count);
            return Ok(modes);
        }
        cut *= 1.5;
    }
}

/// Fundamental mode; an error if it were degenerate.
pub fn fundamental(geom: &BoxGeometry) -> Result<BoxMode> {
    let m = box_modes(geom, 2)?;
    if m[1].level == m[0].level {
        return domain("fundamental mode is degenerate");
    }
    Ok(m[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VibrationProfile {
    pub epsilon: f64,
    /// Mode frequency; the drive is at 2ω.
    pub omega: f64,
    pub duration: f64,
}

impl VibrationProfile {
    pub fn new(epsilon: f64, omega: f64, duration: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon < 1.0) {
            return domain(format!(
                "vibration amplitude must satisfy 0 <= epsilon < 1, got {epsilon}"
            ));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return domain(format!("mode frequency must be > 0, got {omega}"));
        }
        if !(duration >= 0.0 && duration.is_finite()) {
            return domain(format!("duration must be >= 0, got {duration}"));
        }
        Ok(Self {
            epsilon,
            omega,
            duration,
        })
    }

    /// `Ξ = ωεT_s/2`
    pub fn xi(&self) -> f64 {
        0.5 * self.omega * self.epsilon * self.duration
    }

    /// `Δω²(t) = 2ω²ε sin(2ωt)` on `[0, T_s]`.
    pub fn delta_omega_sq(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            0.0
        } else {
            2.0 * self.omega * self.omega * self.epsilon * (2.0 * self.omega * t).sin()
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.epsilon > 1e-2 {
            w.push(format!(
                "epsilon = {} is not small; RWA result is unreliable",
                self.epsilon
            ));
        }
        if self.omega * self.duration < 10.0 {
            w.push(format!(
                "omega*T_s = {} is below 10; RWA result is unreliable",
                self.omega * self.duration
            ));
        }
        if self.epsilon > EPSILON_ADVISORY {
            w.push(format!(
                "epsilon = {} exceeds {EPSILON_ADVISORY:e}, above what a real wall vibration can reach",
                self.epsilon
            ));
        }
        w
    }
}

/// Uniformly sampled `Δω²_I(t)` and `M_IJ(t)`.
#[derive(Debug, Clone)]
pub struct ModeCouplingSeries {
    pub t0: f64,
    pub dt: f64,
    /// `delta_omega_sq[sample][mode]`
    pub delta_omega_sq: Vec<Vec<f64>>,
    pub coupling: Vec<DMatrix<f64>>,
}

impl ModeCouplingSeries {
    pub fn new(t0: f64, dt: f64, delta_omega_sq: Vec<Vec<f64>>, coupling: Vec<DMatrix<f64>>) -> Result<Self> {
        if !(dt > 0.0) {
            return domain("sample spacing must be > 0");
        }
        if delta_omega_sq.len() != coupling.len() || coupling.len() < 2 {
            return domain("need at least two samples, equally many for both series");
        }
        let modes = coupling[0].nrows();
        for (s, m) in coupling.iter().enumerate() {
            if m.nrows() != modes || m.ncols() != modes || delta_omega_sq[s].len() != modes {
                return Err(Error::Dimension {
                    expected: modes,
                    got: m.nrows().max(m.ncols()),
                });
            }
            let scale = 1.0 + m.iter().map(|x| x.abs()).fold(0.0, f64::max);
            for i in 0..modes {
                for j in 0..=i {
                    if (m[(i, j)] + m[(j, i)]).abs() > 1e-12 * scale {
                        return Err(Error::Invariant {
                            row: i,
                            col: j,
                            what: "M must be antisymmetric at every sample",
                        });
                    }
                }
            }
        }
        Ok(Self {
            t0,
            dt,
            delta_omega_sq,
            coupling,
        })
    }

    pub fn modes(&self) -> usize {
        self.coupling[0].nrows()
    }

    fn time(&self, s: usize) -> f64 {
        self.t0 + s as f64 * self.dt
    }

    /// Trapezoidal `∫ f(t) e^{iωt} dt` over the samples.
    fn transform<F: Fn(usize) -> f64>(&self, f: F, omega: f64) -> Complex64 {
        let n = self.coupling.len();
        (0..n)
            .map(|s| {
                let w = if s == 0 || s == n - 1 { 0.5 } else { 1.0 };
                Complex64::from_polar(w * f(s), omega * self.time(s))
            })
            .sum::<Complex64>()
            * self.dt
    }

    /// Diagonal squeezing blocks `S_II = Q_I`, `U_II = (1/2ω_I)∫Δω²_I dt`.
    pub fn squeezing_matrices(&self, freqs: &[f64]) -> Result<PerturbationMatrices> {
        let n = self.check_freqs(freqs)?;
        let mut s = CMatrix::zeros(n, n);
        let mut u = CMatrix::zeros(n, n);
        for i in 0..n {
            let w = freqs[i];
            s[(i, i)] = self.transform(|k| self.delta_omega_sq[k][i], 2.0 * w) / (2.0 * w);
            u[(i, i)] = Complex64::new(self.transform(|k| self.delta_omega_sq[k][i], 0.0).re / (2.0 * w), 0.0);
        }
        PerturbationMatrices::new(s, u)
    }

    fn check_freqs(&self, freqs: &[f64]) -> Result<usize> {
        let n = self.modes();
        if freqs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: freqs.len(),
            });
        }
        if freqs.iter().any(|w| !(*w > 0.0)) {
            return domain("mode frequencies must be > 0");
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingResult {
    pub q_re: f64,
    pub q_im: f64,
    /// `|Q|²`
    pub vacuum: f64,
    pub thermal_factor: f64,
    /// `|Q|² (1 + 2n)`
    pub delta_n: f64,
}

/// `Q = (1/2ω) ∫ Δω²(t) e^{2iωt} dt` by the trapezoidal rule over the
/// samples `Δω²(t0 + i dt)`, and `ΔN = |Q|²(1 + 2n)`.
pub fn squeezing_delta_n(
    t0: f64,
    dt: f64,
    delta_omega_sq: &[f64],
    omega: f64,
    temp: Temperature,
) -> Result<SqueezingResult> {
    if !(omega > 0.0) {
        return domain("mode frequency must be > 0");
    }
    if delta_omega_sq.len() < 3 || !(dt > 0.0) {
        return domain("need at least three samples and dt > 0");
    }
    let peak = delta_omega_sq.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = delta_omega_sq[0]
        .abs()
        .max(delta_omega_sq[delta_omega_sq.len() - 1].abs());
    if edge > 1e-8 * peak {
        return domain(format!(
            "frequency shift does not decay at the window ends (edge/peak = {:e})",
            edge / peak
        ));
    }
    let n = delta_omega_sq.len();
    let q = delta_omega_sq
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            Complex64::from_polar(w * v, 2.0 * omega * (t0 + i as f64 * dt))
        })
        .sum::<Complex64>()
        * (dt / (2.0 * omega));
    let f = thermal_factor(omega, temp)?;
    Ok(SqueezingResult {
        q_re: q.re,
        q_im: q.im,
        vacuum: q.norm_sqr(),
        thermal_factor: f,
        delta_n: q.norm_sqr() * f,
    })
}

/// Velocity blocks from the sampled coupling:
/// `S^V_JK = (i/2)∫M_JK e^{i(ω_J+ω_K)t} (√(ω_J/ω_K) − √(ω_K/ω_J))`,
/// `U^V_JK = (i/2)∫M_JK e^{i(ω_J−ω_K)t} (√(ω_J/ω_K) + √(ω_K/ω_J))`.
pub fn velocity_matrices(series: &ModeCouplingSeries, freqs: &[f64]) -> Result<PerturbationMatrices> {
    let n = series.check_freqs(freqs)?;
    let half_i = Complex64::new(0.0, 0.5);
    let mut s = CMatrix::zeros(n, n);
    let mut u = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..j {
            let (wj, wk) = (freqs[j], freqs[k]);
            let r = (wj / wk).sqrt();
            let sjk = half_i * series.transform(|x| series.coupling[x][(j, k)], wj + wk) * (r - 1.0 / r);
            let ujk = half_i * series.transform(|x| series.coupling[x][(j, k)], wj - wk) * (r + 1.0 / r);
            s[(j, k)] = sjk;
            s[(k, j)] = sjk;
            u[(j, k)] = ujk;
            u[(k, j)] = ujk.conj();
        }
    }
    PerturbationMatrices::new(s, u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RwaResult {
    pub xi: f64,
    /// `sinh² Ξ`
    pub vacuum: f64,
    pub thermal_factor: f64,
    /// `sinh² Ξ (1 + 2n₁)`
    pub delta_n: f64,
    pub warnings: Vec<String>,
}

/// Resonant parametric amplification of the fundamental in the
/// rotating-wave approximation; all other modes are unchanged.
pub fn rwa_photon_number(profile: &VibrationProfile, temp: Temperature) -> Result<RwaResult> {
    let xi = profile.xi();
    let vacuum = xi.sinh().powi(2);
    let f = thermal_factor(profile.omega, temp)?;
    Ok(RwaResult {
        xi,
        vacuum,
        thermal_factor: f,
        delta_n: vacuum * f,
        warnings: profile.warnings(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MathieuResult {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub beta_sq: f64,
    /// `|α|² − |β|² − 1`
    pub unitarity_defect: f64,
    /// Integration end, moved to the nearest zero of the drive phase.
    pub duration: f64,
    pub steps: usize,
}

/// Integrates `q̈ + ω²(1 + 2ε sin 2ωt) q = 0` from the positive-frequency
/// in-mode and projects onto out-modes `e^{∓iωt}` at `T_s = mπ/(2ω)`.
pub fn mathieu_oracle(profile: &VibrationProfile) -> Result<MathieuResult> {
    let eps = profile.epsilon;
    let w = profile.omega;
    // Dimensionless time s = ωt.
    let half_periods = (profile.duration * 2.0 * w / PI).round();
    let s_end = half_periods * PI / 2.0;
    let opts = MagnusOptions {
        rel_tol: 1e-12,
        max_step: PI / 20.0,
        ..MagnusOptions::default()
    };
    let prop = propagate(|s| 1.0 + 2.0 * eps * (2.0 * s).sin(), 0.0, s_end, opts)?;
    let m = prop.matrix;

    // u(0) = 1/√2, u'(0) = −i/√2 in units where ω = 1.
    let u0 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let v0 = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
    let u = u0 * m[0][0] + v0 * m[0][1];
    let v = u0 * m[1][0] + v0 * m[1][1];
    let i = Complex64::new(0.0, 1.0);
    let root = std::f64::consts::FRAC_1_SQRT_2;
    let alpha = Complex64::from_polar(root, s_end) * (u + i * v);
    let beta = Complex64::from_polar(root, -s_end) * (u - i * v);
    let defect = alpha.norm_sqr() - beta.norm_sqr() - 1.0;
    if defect.abs() > UNITARITY_TOL {
        return Err(Error::Unitarity { defect });
    }
    Ok(MathieuResult {
        alpha,
        beta,
        beta_sq: beta.norm_sqr(),
        unitarity_defect: defect,
        duration: s_end / w,
        steps: prop.steps,
    })
}

/// Changes of local observables after the resonant drive.
#[derive(Debug, Clone, Serialize)]
pub struct LocalFieldMaps {
    pub cells: usize,
    /// Cell-centre coordinates, x fastest.
    pub points: Vec<[f64; 3]>,
    /// `Δ⟨Φ(r)Φ(r)⟩`
    pub phi_phi: Vec<f64>,
    /// `Δ⟨Π(r)Π(r)⟩`
    pub pi_pi: Vec<f64>,
    pub energy_density: Vec<f64>,
    /// Midpoint-rule `∫Δ⟨T₀₀⟩ d³r`.
    pub integrated_energy: f64,
    /// `ω₁ ΔN₁`
    pub expected_energy: f64,
    /// Energy flux vanishes identically in the rotating-wave approximation.
    pub energy_flux: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct FieldPrefactors {
    pub squeezed: f64,
    pub anti_squeezed: f64,
    pub thermal_factor: f64,
    pub omega: f64,
    pub mode: [u32; 3],
}

impl FieldPrefactors {
    pub fn new(profile: &VibrationProfile, temp: Temperature, geom: &BoxGeometry) -> Result<Self> {
        let f1 = fundamental(geom)?;
        let xi = profile.xi();
        Ok(Self {
            squeezed: (2.0 * xi).exp_m1(),
            anti_squeezed: (-2.0 * xi).exp_m1(),
            thermal_factor: thermal_factor(f1.omega, temp)?,
            omega: f1.omega,
            mode: f1.indices,
        })
    }

    /// `Δ⟨Φ(r)Φ(r')⟩ = (e^{2Ξ}−1)(1+2n₁) f₁(r)f₁(r')/(2ω₁)`
    pub fn phi_phi(&self, geom: &BoxGeometry, r: [f64; 3], rp: [f64; 3]) -> f64 {
        self.squeezed * self.thermal_factor * geom.eigenfunction(self.mode, r) * geom.eigenfunction(self.mode, rp)
            / (2.0 * self.omega)
    }

    /// `Δ⟨Π(r)Π(r')⟩ = (e^{−2Ξ}−1)(1+2n₁) f₁(r)f₁(r') ω₁/2`
    pub fn pi_pi(&self, geom: &BoxGeometry, r: [f64; 3], rp: [f64; 3]) -> f64 {
        self.anti_squeezed
            * self.thermal_factor
            * geom.eigenfunction(self.mode, r)
            * geom.eigenfunction(self.mode, rp)
            * self.omega
            / 2.0
    }

    /// `Δ⟨T₀₀(r)⟩ = ¼(1+2n₁)[(e^{2Ξ}−1)(∇f₁)²/ω₁ + (e^{−2Ξ}−1) f₁² ω₁]`
    pub fn energy_density(&self, geom: &BoxGeometry, r: [f64; 3]) -> f64 {
        let f = geom.eigenfunction(self.mode, r);
        let g = geom.gradient(self.mode, r);
        let g2 = g.iter().map(|x| x * x).sum::<f64>();
        0.25 * self.thermal_factor * (self.squeezed * g2 / self.omega + self.anti_squeezed * f * f * self.omega)
    }
}

/// Maps on an `n³` grid of cell centres.
pub fn local_field_changes(
    profile: &VibrationProfile,
    temp: Temperature,
    geom: &BoxGeometry,
    n: usize,
) -> Result<LocalFieldMaps> {
    if n == 0 {
        return domain("grid needs at least one cell per edge");
    }
    let pf = FieldPrefactors::new(profile, temp, geom)?;
    let h: Vec<f64> = geom.lengths.iter().map(|l| l / n as f64).collect();
    let points: Vec<[f64; 3]> = (0..n * n * n)
        .map(|idx| {
            let (i, j, k) = (idx % n, (idx / n) % n, idx / (n * n));
            [
                (i as f64 + 0.5) * h[0],
                (j as f64 + 0.5) * h[1],
                (k as f64 + 0.5) * h[2],
            ]
        })
        .collect();
    let rows: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|&r| (pf.phi_phi(geom, r, r), pf.pi_pi(geom, r, r), pf.energy_density(geom, r)))
        .collect();
    let cell = h.iter().product::<f64>();
    let integrated_energy = rows.iter().map(|r| r.2).sum::<f64>() * cell;
    let rwa = rwa_photon_number(profile, temp)?;
    Ok(LocalFieldMaps {
        cells: n,
        phi_phi: rows.iter().map(|r| r.0).collect(),
        pi_pi: rows.iter().map(|r| r.1).collect(),
        energy_density: rows.iter().map(|r| r.2).collect(),
        points,
        integrated_energy,
        expected_energy: pf.omega * rwa.delta_n,
        energy_flux: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    VacuumLimited,
    AboveThermalNoise,
    BelowThermalNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detectability {
    /// `ΔN₁ / √(n₁ + n₁²)`; infinite at zero temperature.
    pub ratio: f64,
    pub verdict: Verdict,
}

pub fn detectability(delta_n1: f64, omega_1: f64, temp: Temperature) -> Result<Detectability> {
    if !(delta_n1 >= 0.0) {
        return domain("photon number change must be >= 0");
    }
    let var = thermal_variance(omega_1, temp)?;
    if var == 0.0 {
        return Ok(Detectability {
            ratio: f64::INFINITY,
            verdict: Verdict::VacuumLimited,
        });
    }
    let ratio = delta_n1 / var.sqrt();
    Ok(Detectability {
        ratio,
        verdict: if ratio >= 1.0 {
            Verdict::AboveThermalNoise
        } else {
            Verdict::BelowThermalNoise
        },
    })
}

/// Initial occupation of the fundamental, for reporting.
pub fn fundamental_occupation(geom: &BoxGeometry, temp: Temperature) -> Result<f64> {
    bose_occupation(fundamental(geom)?.omega, temp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::{integrate_breaks, QuadOptions};
    use crate::response::{delta_n, OccupationVector};

    #[test]
    fn cube_spectrum() {
        let g = BoxGeometry::cube(1.0).unwrap();
        let m = box_modes(&g, 4).unwrap();
        assert!((m[0].omega - 3f64.sqrt() * PI).abs() < 1e-14);
        assert!((m[0].omega - 5.441).abs() < 1e-3);
        let second: Vec<[u32; 3]> = m[1..4].iter().map(|x| x.indices).collect();
        assert_eq!(second, vec![[1, 1, 2], [1, 2, 1], [2, 1, 1]]);
        for x in &m[1..4] {
            assert!((x.omega - 6f64.sqrt() * PI).abs() < 1e-13);
            assert_eq!(x.level, 1);
        }
    }

    #[test]
    fn rectangular_fundamental() {
        let g = BoxGeometry::new([1.0, 2.0, 3.0]).unwrap();
        let f = fundamental(&g).unwrap();
        assert!((f.omega - PI * (1.0f64 + 0.25 + 1.0 / 9.0).sqrt()).abs() < 1e-14);
        assert!(box_modes(&g, 0).is_err());
        assert!(BoxGeometry::new([1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn many_modes_are_sorted_and_complete() {
        let g = BoxGeometry::new([1.0, 1.3, 0.7]).unwrap();
        let m = box_modes(&g, 50).unwrap();
        assert_eq!(m.len(), 50);
        assert!(m.windows(2).all(|w| w[1].omega >= w[0].omega));
        // brute-force check that nothing lower was skipped
        let top = m[49].omega;
        let mut all = 0;
        for a in 1..30 {
            for b in 1..30 {
                for c in 1..30 {
                    if g.frequency([a, b, c]) < top - 1e-12 {
                        all += 1;
                    }
                }
            }
        }
        assert!(all <= 50);
    }

    #[test]
    fn eigenfunctions_are_orthonormal() {
        let g = BoxGeometry::new([1.0, 1.5, 0.8]).unwrap();
        // The integral factorizes; check each axis by quadrature.
        let axis = |i: usize, a: u32, b: u32| {
            let l = g.lengths[i];
            integrate_breaks(
                |x| (a as f64 * PI * x / l).sin() * (b as f64 * PI * x / l).sin(),
                &[0.0, l / 2.0, l],
                QuadOptions::rel(1e-13),
            )
            .unwrap()
            .value
        };
        let overlap =
            |n: [u32; 3], m: [u32; 3]| 8.0 / g.volume() * (0..3).map(|i| axis(i, n[i], m[i])).product::<f64>();
        assert!((overlap([1, 1, 1], [1, 1, 1]) - 1.0).abs() < 1e-8);
        assert!(overlap([1, 1, 1], [2, 1, 1]).abs() < 1e-8);
        assert!((overlap([1, 2, 3], [1, 2, 3]) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rwa_examples() {
        let p = VibrationProfile::new(1e-3, 2.0, 0.0).unwrap();
        assert_eq!(rwa_photon_number(&p, Temperature::ZERO).unwrap().delta_n, 0.0);
        let p = VibrationProfile::new(1e-3, 2.0, 1000.0).unwrap();
        let r = rwa_photon_number(&p, Temperature::ZERO).unwrap();
        assert!((r.xi - 1.0).abs() < 1e-15);
        assert!((r.delta_n - 1.381_097_845_541_816).abs() < 1e-12);
        let t = Temperature::new(3.0).unwrap();
        let rt = rwa_photon_number(&p, t).unwrap();
        assert_eq!(rt.delta_n / r.delta_n, thermal_factor(2.0, t).unwrap());
    }

    #[test]
    fn profile_warnings() {
        assert!(VibrationProfile::new(1.0, 1.0, 1.0).is_err());
        let p = VibrationProfile::new(0.05, 1.0, 5.0).unwrap();
        let w = p.warnings();
        assert_eq!(w.len(), 3);
        let quiet = VibrationProfile::new(1e-9, 1.0, 100.0).unwrap();
        assert!(quiet.warnings().is_empty());
    }

    #[test]
    fn harmonic_squeezing_amplitude() {
        let w = 1.7;
        let eps = 1e-3;
        let p = VibrationProfile::new(eps, w, 200.0 * PI / (2.0 * w)).unwrap();
        let n = 20001;
        let dt = p.duration / (n - 1) as f64;
        let samples: Vec<f64> = (0..n).map(|i| p.delta_omega_sq(i as f64 * dt)).collect();
        let r = squeezing_delta_n(0.0, dt, &samples, w, Temperature::ZERO).unwrap();
        let want = w * eps * p.duration / 2.0;
        assert!((r.vacuum.sqrt() - want).abs() < 1e-9 * want);
        // Small-Ξ limit of the RWA result.
        let rwa = rwa_photon_number(&p, Temperature::ZERO).unwrap();
        // sinh²Ξ/Ξ² = 1 + Ξ²/3 + …
        assert!((r.vacuum / rwa.vacuum - 1.0).abs() < 0.5 * rwa.xi * rwa.xi);

        let bad = vec![1.0; 10];
        assert!(squeezing_delta_n(0.0, 0.1, &bad, w, Temperature::ZERO).is_err());
        let zero = vec![0.0; 10];
        assert_eq!(
            squeezing_delta_n(0.0, 0.1, &zero, w, Temperature::ZERO)
                .unwrap()
                .delta_n,
            0.0
        );
    }

    fn random_series(modes: usize, samples: usize, seed: u64) -> ModeCouplingSeries {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let t0 = -5.0;
        let dt = 10.0 / (samples - 1) as f64;
        let amps: Vec<f64> = (0..modes * modes).map(|_| next()).collect();
        let shifts: Vec<f64> = (0..modes).map(|_| next()).collect();
        let mut coupling = Vec::new();
        let mut dw = Vec::new();
        for s in 0..samples {
            let t: f64 = t0 + s as f64 * dt;
            let env = (-t * t).exp();
            coupling.push(DMatrix::from_fn(modes, modes, |i, j| {
                if i == j {
                    0.0
                } else {
                    let (a, b) = (i.min(j), i.max(j));
                    let v = amps[a * modes + b] * env * 0.1;
                    if i < j {
                        v
                    } else {
                        -v
                    }
                }
            }));
            dw.push(shifts.iter().map(|x| x * env * 0.1).collect());
        }
        ModeCouplingSeries::new(t0, dt, dw, coupling).unwrap()
    }

    #[test]
    fn velocity_matrix_properties() {
        let series = random_series(4, 801, 7);
        let freqs = [1.0, 1.4, 1.4, 2.3];
        let v = velocity_matrices(&series, &freqs).unwrap();
        for i in 0..4 {
            assert_eq!(v.s()[(i, i)], Complex64::new(0.0, 0.0));
        }
        // degenerate pair: bracket vanishes
        assert!(v.s()[(1, 2)].norm() < 1e-15);

        let zero = ModeCouplingSeries::new(0.0, 1.0, vec![vec![0.0; 2]; 3], vec![DMatrix::zeros(2, 2); 3]).unwrap();
        let z = velocity_matrices(&zero, &[1.0, 2.0]).unwrap();
        assert!(z.s().iter().chain(z.u().iter()).all(|x| x.norm() == 0.0));
    }

    #[test]
    fn rejects_non_antisymmetric_coupling() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        let err = ModeCouplingSeries::new(0.0, 1.0, vec![vec![0.0; 2]; 2], vec![m.clone(), m]).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }));
    }

    #[test]
    fn squeezing_and_velocity_decouple() {
        for seed in 1..6 {
            let series = random_series(5, 601, seed);
            let freqs = [1.0, 1.3, 1.9, 2.2, 3.1];
            let sq = series.squeezing_matrices(&freqs).unwrap();
            let ve = velocity_matrices(&series, &freqs).unwrap();
            let occ = OccupationVector::new(vec![0.3, 1.2, 0.0, 2.5, 0.7]).unwrap();
            let both = delta_n(&sq.plus(&ve).unwrap(), &occ).unwrap().total();
            let a = delta_n(&sq, &occ).unwrap().total();
            let b = delta_n(&ve, &occ).unwrap().total();
            for i in 0..5 {
                assert!((both[i] - a[i] - b[i]).abs() < 1e-14 * (1.0 + both[i].abs()));
            }
        }
    }

    #[test]
    fn mathieu_without_drive() {
        let p = VibrationProfile::new(0.0, 3.0, 50.0).unwrap();
        let r = mathieu_oracle(&p).unwrap();
        assert!(r.beta_sq < 1e-20);
        assert!((r.alpha.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mathieu_tracks_rwa_at_small_xi() {
        let eps = 1e-3;
        let w = 2.0;
        let p = VibrationProfile::new(eps, w, 200.0).unwrap();
        let r = mathieu_oracle(&p).unwrap();
        let rwa = rwa_photon_number(&VibrationProfile::new(eps, w, r.duration).unwrap(), Temperature::ZERO).unwrap();
        assert!(
            (r.beta_sq - rwa.vacuum).abs() < 0.02 * rwa.vacuum,
            "{} vs {}",
            r.beta_sq,
            rwa.vacuum
        );
    }

    #[test]
    fn field_maps_integrate_to_global_energy() {
        let g = BoxGeometry::new([1.0, 1.2, 0.9]).unwrap();
        let w1 = fundamental(&g).unwrap().omega;
        let p = VibrationProfile::new(1e-3, w1, 2000.0 / w1).unwrap();
        let maps = local_field_changes(&p, Temperature::new(4.0).unwrap(), &g, 16).unwrap();
        assert!((maps.integrated_energy - maps.expected_energy).abs() < 1e-10 * maps.expected_energy);

        let z = VibrationProfile::new(1e-3, w1, 0.0).unwrap();
        let maps = local_field_changes(&z, Temperature::ZERO, &g, 4).unwrap();
        assert!(maps
            .energy_density
            .iter()
            .chain(&maps.phi_phi)
            .chain(&maps.pi_pi)
            .all(|v| *v == 0.0));
    }

    #[test]
    fn energy_concentrates_at_walls() {
        let g = BoxGeometry::cube(1.0).unwrap();
        let w1 = fundamental(&g).unwrap().omega;
        let p = VibrationProfile::new(1e-3, w1, 6000.0 / w1).unwrap();
        let pf = FieldPrefactors::new(&p, Temperature::ZERO, &g).unwrap();
        let centre = pf.energy_density(&g, [0.5, 0.5, 0.5]);
        let wall = pf.energy_density(&g, [0.0, 0.5, 0.5]);
        assert!(wall > centre);
        assert!(centre < 0.0);
        // uncertainty-product prefactor preserved
        assert!(((1.0 + pf.squeezed) * (1.0 + pf.anti_squeezed) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detectability_examples() {
        let d = detectability(1.0, 1.0, Temperature::ZERO).unwrap();
        assert_eq!(d.verdict, Verdict::VacuumLimited);
        assert!(d.ratio.is_infinite());
        // Large occupation: ratio → 2 sinh²(1).
        let t = Temperature::new(1e4).unwrap();
        let f = thermal_factor(1.0, t).unwrap();
        let s1 = 1f64.sinh().powi(2);
        let d = detectability(s1 * f, 1.0, t).unwrap();
        assert!((d.ratio - 2.0 * s1).abs() < 1e-3);
        assert_eq!(d.verdict, Verdict::AboveThermalNoise);
    }
}
