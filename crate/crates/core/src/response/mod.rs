//! Quadratic response of particle numbers and two-mode correlations to a
//! bilinear perturbation
//!
//! ```text
//! ∫dt H₁(t) = ½ (S_JK a†_J a†_K + S*_JK a_J a_K) + U_JK a†_J a_K
//! ```
//!
//! over a discrete mode basis. The additive c-number in the perturbation is
//! a pure phase and is dropped. [`fock`] provides an exact
//! truncated-Fock-space evaluation used as an oracle for the closed forms.

pub mod fock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::thermal::{bose_occupation, Temperature};

pub use fock::{fock_brute_force, FockOracle, FockState, FockTruncation, QuadraticFit};

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance for the symmetry/Hermiticity checks.
const MATRIX_TOL: f64 = 1e-10;

/// Pair-creation block `S` (symmetric) and hopping block `U` (Hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationMatrices {
    s: CMatrix,
    u: CMatrix,
}

impl PerturbationMatrices {
    pub fn new(s: CMatrix, u: CMatrix) -> Result<Self> {
        let n = s.nrows();
        if !s.is_square() {
            return Err(Error::Dimension {
                expected: n,
                got: s.ncols(),
            });
        }
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: u.nrows().max(u.ncols()),
            });
        }
        let scale_s = 1.0 + s.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale_u = 1.0 + u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..=i {
                if (s[(i, j)] - s[(j, i)]).norm() > MATRIX_TOL * scale_s {
                    return Err(Error::Invariant {
                        row: i,
                        col: j,
                        what: "S must be symmetric",
                    });
                }
                if (u[(i, j)] - u[(j, i)].conj()).norm() > MATRIX_TOL * scale_u {
                    return Err(Error::Invariant {
                        row: i,
                        col: j,
                        what: "U must be Hermitian",
                    });
                }
            }
        }
        if s.iter().chain(u.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("perturbation matrices must be finite");
        }
        Ok(Self { s, u })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            s: CMatrix::zeros(n, n),
            u: CMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    /// Multiply both blocks by a real factor.
    pub fn scaled(&self, lambda: f64) -> Self {
        let f = Complex64::new(lambda, 0.0);
        Self {
            s: self.s.map(|z| z * f),
            u: self.u.map(|z| z * f),
        }
    }

    /// Element-wise sum; dimensions must agree.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self {
            s: &self.s + &other.s,
            u: &self.u + &other.u,
        })
    }
}

/// Initial per-mode occupations ⟨N_I⟩₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationVector(Vec<f64>);

impl OccupationVector {
    pub fn new(n: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = n.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return domain(format!("occupation of mode {i} must be finite and >= 0, got {v}"));
        }
        Ok(Self(n))
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0.0; modes])
    }

    /// Bose–Einstein occupations of modes with the given frequencies.
    pub fn thermal(frequencies: &[f64], temp: Temperature) -> Result<Self> {
        let n = frequencies
            .iter()
            .map(|&w| bose_occupation(w, temp))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(n))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-mode quadratic response, split into the vacuum term Σ_J |S_IJ|² and
/// everything proportional to the initial occupations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaN {
    pub vacuum: Vec<f64>,
    pub thermal: Vec<f64>,
}

impl DeltaN {
    pub fn total(&self) -> Vec<f64> {
        self.vacuum.iter().zip(&self.thermal).map(|(v, t)| v + t).collect()
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Quadratic response of the number operators:
///
/// ```text
/// ΔN_I = Σ_J |S_IJ|² (1 + n_J + n_I) + Σ_J |U_IJ|² (n_J − n_I)
/// ```
///
/// The hopping term is accumulated as antisymmetric pair flows so that it
/// conserves the total particle number to rounding.
pub fn delta_n(mat: &PerturbationMatrices, occ: &OccupationVector) -> Result<DeltaN> {
    let n = mat.dim();
    if occ.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: occ.len(),
        });
    }
    let occ = occ.as_slice();
    let mut vac = vec![Accumulator::default(); n];
    let mut th = vec![Accumulator::default(); n];
    for i in 0..n {
        for j in 0..n {
            let s2 = mat.s[(i, j)].norm_sqr();
            vac[i].add(s2);
            th[i].add(s2 * (occ[i] + occ[j]));
        }
        for j in 0..i {
            let u2 = 0.5 * (mat.u[(i, j)].norm_sqr() + mat.u[(j, i)].norm_sqr());
            let flow = u2 * (occ[j] - occ[i]);
            th[i].add(flow);
            th[j].add(-flow);
        }
    }
    Ok(DeltaN {
        vacuum: vac.iter().map(Accumulator::value).collect(),
        thermal: th.iter().map(Accumulator::value).collect(),
    })
}

/// Final occupations for a perturbation that is diagonal in the mode basis,
/// `⟨N_I⟩ = n_I + |β_I|² (1 + 2 n_I)`. Exact to all orders, not just the
/// quadratic response.
pub fn diag_thermal_number(beta_sq: &[f64], occ: &OccupationVector) -> Result<Vec<f64>> {
    if beta_sq.len() != occ.len() {
        return Err(Error::Dimension {
            expected: occ.len(),
            got: beta_sq.len(),
        });
    }
    if let Some(b) = beta_sq.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
        return domain(format!("|beta|^2 must be finite and >= 0, got {b}"));
    }
    Ok(beta_sq
        .iter()
        .zip(occ.as_slice())
        .map(|(b, n)| n + b * (1.0 + 2.0 * n))
        .collect())
}

/// Two-mode correlations `C_JK = ⟨N_J N_K⟩ − ⟨N_J⟩⟨N_K⟩` (J ≠ K) to second
/// order, with the decomposition
/// `C_JK = ⟨H₁[N_J N_K, H₁]⟩₀ − n_J ΔN_K − n_K ΔN_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    /// Full second-order correlation; zero on the diagonal.
    pub total: DMatrix<f64>,
    /// `−n_J ΔN_K − n_K ΔN_J`, the part built from single-mode responses.
    pub isotropic: DMatrix<f64>,
    /// `⟨H₁[N_J N_K, H₁]⟩₀ = total − isotropic`.
    pub commutator: DMatrix<f64>,
}

/// Second-order two-mode correlations, extracted from the exact Fock-space
/// evolution by λ-scaling rather than from a hand-derived trace formula.
pub fn correlation(mat: &PerturbationMatrices, occ: &OccupationVector, cutoff: FockTruncation) -> Result<Correlation> {
    let fit = FockOracle::new(mat, occ, cutoff)?.quadratic_response()?;
    let n = mat.dim();
    let occ_used = fit.initial_occupations.clone();
    let dn = &fit.delta_n;
    let mut isotropic = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if j != k {
                isotropic[(j, k)] = -occ_used[j] * dn[k] - occ_used[k] * dn[j];
            }
        }
    }
    let total = fit.correlation;
    let commutator = &total - &isotropic;
    Ok(Correlation {
        total,
        isotropic,
        commutator,
    })
}
