//! Fourier transforms of uniformly sampled, compactly supported signals.
//!
//! Convention throughout the crate: `F(ω) = ∫ f(t) e^{+iωt} dt`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{domain, Result};

/// Zero-padding factor applied before the FFT.
pub const PADDING: usize = 8;

/// Sampled spectrum of a real signal on the symmetric frequency grid
/// `ω_k = k Δω`, `k ∈ [-N/2, N/2)`.
#[derive(Debug, Clone)]
pub struct SampledSpectrum {
    d_omega: f64,
    /// Centre of the sample window; stored values carry the phase
    /// e^{iω(t − centre)} so they vary slowly between bins.
    centre: f64,
    /// Index 0 corresponds to ω = -N/2 Δω.
    values: Vec<Complex64>,
    half: usize,
}

impl SampledSpectrum {
    /// Transform samples `f(t0 + n dt)`, `n = 0..len`.
    pub fn from_samples(t0: f64, dt: f64, samples: &[f64]) -> Result<Self> {
        if samples.len() < 4 {
            return domain("need at least four samples for a spectrum");
        }
        if !(dt > 0.0) {
            return domain("sample spacing must be positive");
        }
        let n = (samples.len() * PADDING).next_power_of_two();
        let mut buf: Vec<Complex64> = samples
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
            .take(n)
            .collect();
        // Inverse FFT carries the e^{+i...} kernel and no normalization.
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);

        let d_omega = 2.0 * std::f64::consts::PI / (n as f64 * dt);
        let half = n / 2;
        let centre = t0 + 0.5 * dt * (samples.len() - 1) as f64;
        let values = (0..n)
            .map(|idx| {
                let k = idx as isize - half as isize;
                let bin = k.rem_euclid(n as isize) as usize;
                let omega = k as f64 * d_omega;
                buf[bin] * Complex64::from_polar(dt, omega * (t0 - centre))
            })
            .collect();
        Ok(Self {
            d_omega,
            centre,
            values,
            half,
        })
    }

    pub fn d_omega(&self) -> f64 {
        self.d_omega
    }

    pub fn max_omega(&self) -> f64 {
        (self.half as f64 - 1.0) * self.d_omega
    }

    fn bin(&self, k: isize) -> Complex64 {
        let idx = k + self.half as isize;
        if idx < 0 || idx as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[idx as usize]
        }
    }

    /// Cubic (Catmull–Rom) interpolation between bins; zero beyond Nyquist.
    pub fn at(&self, omega: f64) -> Complex64 {
        let x = omega / self.d_omega;
        if x.abs() > self.half as f64 - 2.0 {
            return Complex64::new(0.0, 0.0);
        }
        let k = x.floor() as isize;
        let s = x - k as f64;
        let p0 = self.bin(k - 1);
        let p1 = self.bin(k);
        let p2 = self.bin(k + 1);
        let p3 = self.bin(k + 2);
        let s2 = s * s;
        let s3 = s2 * s;
        let phase = Complex64::from_polar(1.0, omega * self.centre);
        phase
            * (p1 * 2.0
                + (p2 - p0) * s
                + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * s2
                + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * s3)
            * 0.5
    }

    /// `∫ (dⁿf/dtⁿ)² dt` by Parseval, i.e. spectral differentiation.
    pub fn derivative_energy(&self, order: u32) -> f64 {
        let sum: f64 = (0..self.values.len())
            .map(|idx| {
                let omega = (idx as f64 - self.half as f64) * self.d_omega;
                omega.powi(2 * order as i32) * self.values[idx].norm_sqr()
            })
            .sum();
        sum * self.d_omega / (2.0 * std::f64::consts::PI)
    }

    /// Fraction of the weighted spectral power `ω^{2n}|F|²` in the top 10%
    /// of the frequency band. Large values flag under-resolved samples.
    pub fn tail_fraction(&self, order: u32) -> f64 {
        let cut = 0.9 * self.half as f64;
        let (mut tail, mut total) = (0.0, 0.0);
        for idx in 0..self.values.len() {
            let k = idx as f64 - self.half as f64;
            let w = (k * self.d_omega).powi(2 * order as i32) * self.values[idx].norm_sqr();
            total += w;
            if k.abs() >= cut {
                tail += w;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}
