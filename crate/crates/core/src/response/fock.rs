//! Exact evolution in a truncated multi-mode Fock space.
//!
//! The perturbation `H̄ = ½(S a†a† + h.c.) + U a†a` is built as a dense
//! matrix on the product basis `|m_1 … m_M⟩`, `0 ≤ m_I ≤ n_max`, the thermal
//! product state is propagated with `exp(−iλH̄)`, and occupations,
//! correlations and entropy are read off the result. Quadratic coefficients
//! are isolated by Richardson extrapolation in λ.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CMatrix, OccupationVector, PerturbationMatrices};
use crate::error::{Error, Result};
use crate::numerics::expm::expm;

/// Default ceiling on the basis size.
pub const DEFAULT_BUDGET: usize = 4096;
/// Largest acceptable probability in the top Fock layer.
pub const TOP_LAYER_LIMIT: f64 = 1e-8;

const LAMBDAS: [f64; 3] = [0.01, 0.02, 0.04];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockTruncation {
    pub n_max: usize,
    pub budget: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Self {
        Self {
            n_max,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Smallest cutoff whose top-layer thermal weight is below `limit` for
    /// every mode, plus `headroom` extra layers for the perturbation.
    pub fn for_occupations(occ: &OccupationVector, limit: f64, headroom: usize) -> Self {
        let n = occ.as_slice().iter().cloned().fold(0.0, f64::max);
        let mut n_max = 1;
        if n > 0.0 {
            let r = n / (1.0 + n);
            while r.powi(n_max as i32) / (1.0 + n) >= limit && n_max < 10_000 {
                n_max += 1;
            }
        }
        Self::new(n_max + headroom)
    }

    pub fn basis_size(&self, modes: usize) -> Option<usize> {
        (self.n_max + 1).checked_pow(modes as u32)
    }
}

/// Observables of the evolved state.
#[derive(Debug, Clone)]
pub struct FockState {
    pub mean_numbers: Vec<f64>,
    /// `⟨N_J N_K⟩ − ⟨N_J⟩⟨N_K⟩`, including the variances on the diagonal.
    pub covariance: DMatrix<f64>,
    /// Total probability on basis states with some `m_I = n_max`.
    pub top_occupancy: f64,
    /// Von Neumann entropy, when the full density matrix was formed.
    pub entropy: Option<f64>,
}

impl FockState {
    pub fn certify(&self, limit: f64) -> Result<()> {
        if self.top_occupancy > limit {
            Err(Error::Truncation {
                occupancy: self.top_occupancy,
                limit,
            })
        } else {
            Ok(())
        }
    }
}

/// λ² coefficients of the occupation changes and of the off-diagonal
/// covariance.
#[derive(Debug, Clone)]
pub struct QuadraticFit {
    pub delta_n: Vec<f64>,
    /// Zero on the diagonal.
    pub correlation: DMatrix<f64>,
    /// Occupations of the truncated initial state.
    pub initial_occupations: Vec<f64>,
}

pub struct FockOracle {
    modes: usize,
    radix: usize,
    size: usize,
    hamiltonian: CMatrix,
    initial: Vec<f64>,
    initial_numbers: Vec<f64>,
    cutoff: FockTruncation,
}

impl FockOracle {
    pub fn new(mat: &PerturbationMatrices, occ: &OccupationVector, cutoff: FockTruncation) -> Result<Self> {
        let modes = mat.dim();
        if occ.len() != modes {
            return Err(Error::Dimension {
                expected: modes,
                got: occ.len(),
            });
        }
        let radix = cutoff.n_max + 1;
        let size = match cutoff.basis_size(modes) {
            Some(s) if s <= cutoff.budget => s,
            Some(s) => {
                return Err(Error::BasisTooLarge {
                    size: s,
                    budget: cutoff.budget,
                })
            }
            None => {
                return Err(Error::BasisTooLarge {
                    size: usize::MAX,
                    budget: cutoff.budget,
                })
            }
        };

        let mut oracle = Self {
            modes,
            radix,
            size,
            hamiltonian: CMatrix::zeros(size, size),
            initial: Vec::new(),
            initial_numbers: Vec::new(),
            cutoff,
        };
        oracle.hamiltonian = oracle.build_hamiltonian(mat);
        oracle.initial = oracle.thermal_product(occ.as_slice());
        oracle.initial_numbers = oracle.means(&oracle.initial);
        Ok(oracle)
    }

    pub fn basis_size(&self) -> usize {
        self.size
    }

    pub fn initial_occupations(&self) -> &[f64] {
        &self.initial_numbers
    }

    pub fn initial_entropy(&self) -> f64 {
        self.initial.iter().filter(|p| **p > 0.0).map(|p| -p * p.ln()).sum()
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.modes];
        for slot in d.iter_mut() {
            *slot = idx % self.radix;
            idx /= self.radix;
        }
        d
    }

    fn stride(&self, mode: usize) -> usize {
        self.radix.pow(mode as u32)
    }

    fn build_hamiltonian(&self, mat: &PerturbationMatrices) -> CMatrix {
        let (s, u) = (mat.s(), mat.u());
        let n_max = self.cutoff.n_max;
        let mut h = CMatrix::zeros(self.size, self.size);
        for old in 0..self.size {
            let m = self.digits(old);
            for j in 0..self.modes {
                for k in 0..self.modes {
                    // ½ S_jk a†_j a†_k and its conjugate
                    let sjk = s[(j, k)];
                    if sjk != Complex64::new(0.0, 0.0) {
                        let amp = if j == k {
                            (m[j] + 2 <= n_max).then(|| (((m[j] + 1) * (m[j] + 2)) as f64).sqrt())
                        } else {
                            (m[j] < n_max && m[k] < n_max).then(|| (((m[j] + 1) * (m[k] + 1)) as f64).sqrt())
                        };
                        if let Some(a) = amp {
                            let new = old + self.stride(j) + self.stride(k);
                            h[(new, old)] += sjk * (0.5 * a);
                            h[(old, new)] += sjk.conj() * (0.5 * a);
                        }
                    }
                    // U_jk a†_j a_k
                    let ujk = u[(j, k)];
                    if ujk != Complex64::new(0.0, 0.0) {
                        if j == k {
                            h[(old, old)] += ujk * m[j] as f64;
                        } else if m[k] > 0 && m[j] < n_max {
                            let a = ((m[k] * (m[j] + 1)) as f64).sqrt();
                            let new = old + self.stride(j) - self.stride(k);
                            h[(new, old)] += ujk * a;
                        }
                    }
                }
            }
        }
        h
    }

    /// Product of truncated, renormalized geometric distributions.
    fn thermal_product(&self, occ: &[f64]) -> Vec<f64> {
        let per_mode: Vec<Vec<f64>> = occ
            .iter()
            .map(|&n| {
                let mut p: Vec<f64> = (0..self.radix)
                    .map(|k| {
                        if n == 0.0 {
                            if k == 0 {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            (k as f64 * (n / (1.0 + n)).ln()).exp() / (1.0 + n)
                        }
                    })
                    .collect();
                let z: f64 = p.iter().sum();
                p.iter_mut().for_each(|x| *x /= z);
                p
            })
            .collect();
        (0..self.size)
            .map(|idx| {
                self.digits(idx)
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| per_mode[i][k])
                    .product()
            })
            .collect()
    }

    fn means(&self, diag: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.modes];
        for (idx, p) in diag.iter().enumerate() {
            for (i, k) in self.digits(idx).into_iter().enumerate() {
                out[i] += p * k as f64;
            }
        }
        out
    }

    fn observables(&self, diag: &[f64], entropy: Option<f64>) -> FockState {
        let mean = self.means(diag);
        let mut second = DMatrix::<f64>::zeros(self.modes, self.modes);
        let mut top = 0.0;
        for (idx, p) in diag.iter().enumerate() {
            let d = self.digits(idx);
            if d.iter().any(|&k| k == self.cutoff.n_max) {
                top += p;
            }
            for j in 0..self.modes {
                for k in 0..self.modes {
                    second[(j, k)] += p * (d[j] * d[k]) as f64;
                }
            }
        }
        let covariance = DMatrix::from_fn(self.modes, self.modes, |j, k| second[(j, k)] - mean[j] * mean[k]);
        FockState {
            mean_numbers: mean,
            covariance,
            top_occupancy: top,
            entropy,
        }
    }

    /// State after `exp(−iλH̄)`. The full density matrix and its entropy are
    /// only formed when `with_entropy` is set.
    pub fn evolve(&self, lambda: f64, with_entropy: bool) -> Result<FockState> {
        self.state_after(&self.propagator(lambda), with_entropy)
    }

    fn propagator(&self, lambda: f64) -> CMatrix {
        expm(&self.hamiltonian.map(|z| z * Complex64::new(0.0, -lambda)))
    }

    fn state_after(&self, v: &CMatrix, with_entropy: bool) -> Result<FockState> {
        let diag: Vec<f64> = (0..self.size)
            .map(|m| (0..self.size).map(|k| v[(m, k)].norm_sqr() * self.initial[k]).sum())
            .collect();
        let entropy = if with_entropy {
            let mut scaled = v.clone();
            for (k, mut col) in scaled.column_iter_mut().enumerate() {
                col *= Complex64::new(self.initial[k], 0.0);
            }
            let rho = &scaled * v.adjoint();
            let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = rho.symmetric_eigenvalues();
            Some(eig.iter().filter(|p| **p > 1e-300).map(|p| -p * p.ln()).sum())
        } else {
            None
        };
        let initial_top = self.observables(&self.initial, None).top_occupancy;
        let mut state = self.observables(&diag, entropy);
        state.top_occupancy = state.top_occupancy.max(initial_top);
        Ok(state)
    }

    /// λ² coefficients from the three-point Richardson table on
    /// `g(λ) = Δ(λ)/λ²`.
    pub fn quadratic_response(&self) -> Result<QuadraticFit> {
        // The step sizes double, so one exponential serves all three.
        let v1 = self.propagator(LAMBDAS[0]);
        let v2 = &v1 * &v1;
        let v4 = &v2 * &v2;
        let states = [&v1, &v2, &v4]
            .into_iter()
            .map(|v| self.state_after(v, false))
            .collect::<Result<Vec<_>>>()?;
        states[2].certify(TOP_LAYER_LIMIT)?;
        let extrapolate = |g: [f64; 3]| {
            let r1 = 2.0 * g[0] - g[1];
            let r1b = 2.0 * g[1] - g[2];
            (4.0 * r1 - r1b) / 3.0
        };
        let g = |idx: usize, val: f64| val / (LAMBDAS[idx] * LAMBDAS[idx]);

        let delta_n = (0..self.modes)
            .map(|i| extrapolate([0, 1, 2].map(|s| g(s, states[s].mean_numbers[i] - self.initial_numbers[i]))))
            .collect();
        let correlation = DMatrix::from_fn(self.modes, self.modes, |j, k| {
            if j == k {
                0.0
            } else {
                extrapolate([0, 1, 2].map(|s| g(s, states[s].covariance[(j, k)])))
            }
        });
        Ok(QuadraticFit {
            delta_n,
            correlation,
            initial_occupations: self.initial_numbers.clone(),
        })
    }
}

/// Full (all-orders) evolution of the thermal state under `H̄`, with the
/// entropy and truncation certificate.
pub fn fock_brute_force(
    mat: &PerturbationMatrices,
    occ: &OccupationVector,
    cutoff: FockTruncation,
) -> Result<FockState> {
    FockOracle::new(mat, occ, cutoff)?.evolve(1.0, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_mode_squeeze_matches_sinh() {
        // H̄ = ½ r (a†² + a²) is a squeezer with |β|² = sinh² r.
        let r = 0.3;
        let s = CMatrix::from_element(1, 1, c(r, 0.0));
        let m = PerturbationMatrices::new(s, CMatrix::zeros(1, 1)).unwrap();
        let st = fock_brute_force(&m, &OccupationVector::vacuum(1), FockTruncation::new(60)).unwrap();
        let want = r.sinh().powi(2);
        assert!(
            (st.mean_numbers[0] - want).abs() < 1e-10,
            "{} vs {want}",
            st.mean_numbers[0]
        );
        assert!(st.entropy.unwrap().abs() < 1e-8);
        st.certify(TOP_LAYER_LIMIT).unwrap();
    }

    #[test]
    fn basis_budget_enforced() {
        let m = PerturbationMatrices::zeros(4);
        let err = FockOracle::new(&m, &OccupationVector::vacuum(4), FockTruncation::new(9))
            .err()
            .unwrap();
        assert!(matches!(err, Error::BasisTooLarge { size: 10000, .. }));
    }

    #[test]
    fn thermal_initial_state() {
        let occ = OccupationVector::new(vec![0.4]).unwrap();
        let cut = FockTruncation::for_occupations(&occ, 1e-12, 0);
        let o = FockOracle::new(&PerturbationMatrices::zeros(1), &occ, cut).unwrap();
        assert!((o.initial_occupations()[0] - 0.4).abs() < 1e-9);
        let s_exact = 1.4f64 * 1.4f64.ln() - 0.4 * 0.4f64.ln();
        assert!((o.initial_entropy() - s_exact).abs() < 1e-9);
    }

    #[test]
    fn quadratic_fit_of_beam_splitter() {
        let u = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.2), c(0.5, -0.2), c(0.0, 0.0)]);
        let m = PerturbationMatrices::new(CMatrix::zeros(2, 2), u).unwrap();
        let occ = OccupationVector::new(vec![0.2, 0.6]).unwrap();
        let o = FockOracle::new(&m, &occ, FockTruncation::new(24)).unwrap();
        let fit = o.quadratic_response().unwrap();
        let n0 = o.initial_occupations();
        let want = 0.29 * (n0[1] - n0[0]);
        assert!((fit.delta_n[0] - want).abs() < 1e-8, "{} vs {want}", fit.delta_n[0]);
        assert!((fit.delta_n[0] + fit.delta_n[1]).abs() < 1e-8);
    }
}
