//! Built-in oracle checks, one group per acceptance criterion.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use qrad_core::cavity::{
    fundamental, local_field_changes, mathieu_oracle, squeezing_delta_n, BoxGeometry, VibrationProfile,
};
use qrad_core::dielectric::{
    large_r_spectrum, small_r_energy, small_r_oracle, PermittivityProfile, ThermalCoefficient,
};
use qrad_core::frw::{mode_bogoliubov, sudden_limit, thermal_spectrum, OccupationFrequency, ScaleFactorProfile};
use qrad_core::mirror::{energy_closed, energy_quadrature, Trajectory, WavenumberGrid};
use qrad_core::response::{
    delta_n, fock_brute_force, CMatrix, FockOracle, FockTruncation, OccupationVector, PerturbationMatrices,
};
use qrad_core::thermal::{hurwitz_sum, thermal_factor};
use qrad_core::{units, Temperature};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// Thermal factor of the fundamental of a 1 cm cube at 290 K.
pub const CENTIMETRE_CUBE_FACTOR: f64 = 465.483_810_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bound {
    AtMost { limit: f64 },
    Between { lo: f64, hi: f64 },
}

impl Bound {
    fn holds(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost { limit } => x <= limit,
            Bound::Between { lo, hi } => x >= lo && x <= hi,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost { limit } => write!(f, "<= {limit:e}"),
            Bound::Between { lo, hi } => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn new(criterion: u8, name: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Self {
            criterion,
            name: name.into(),
            measured,
            passed: bound.holds(measured),
            bound,
            error: None,
        }
    }

    fn failed(criterion: u8, name: impl Into<String>, err: impl fmt::Display) -> Self {
        Self {
            criterion,
            name: name.into(),
            measured: f64::NAN,
            bound: Bound::AtMost { limit: 0.0 },
            passed: false,
            error: Some(err.to_string()),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{tag}] {:>2}  {:<60} measured {:<12.4e} bound {}",
            self.criterion, self.name, self.measured, self.bound
        )?;
        if let Some(e) = &self.error {
            write!(f, "  ({e})")?;
        }
        Ok(())
    }
}

fn at_most(limit: f64) -> Bound {
    Bound::AtMost { limit }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

type Out = Vec<Check>;

fn guarded(criterion: u8, name: &str, f: impl FnOnce(&mut Out) -> qrad_core::Result<()>) -> Out {
    let mut out = Vec::new();
    if let Err(e) = f(&mut out) {
        out.push(Check::failed(criterion, name, e));
    }
    out
}

fn mirror_oracle() -> Out {
    guarded(1, "mirror quadrature", |out| {
        let g = Trajectory::gaussian(1.0, 1.0)?;
        for t in [0.0, 0.1, 1.0] {
            let start = Instant::now();
            let temp = Temperature::new(t)?;
            let grid = WavenumberGrid::for_trajectory(&g, temp)?;
            let q = energy_quadrature(&g, temp, &grid)?;
            let c = energy_closed(&g, temp)?;
            let secs = start.elapsed().as_secs_f64();
            out.push(Check::new(
                1,
                format!("mirror energy quadrature vs closed form, T*tau = {t}"),
                rel(q.total(), c.total()),
                at_most(1e-2),
            ));
            out.push(Check::new(
                1,
                format!("mirror runtime [s], T*tau = {t}"),
                secs,
                at_most(30.0),
            ));
        }
        Ok(())
    })
}

fn mirror_scaling() -> Out {
    guarded(2, "mirror thermal scaling", |out| {
        let g = Trajectory::gaussian(1.0, 1.0)?;
        let energy = |t: f64| -> qrad_core::Result<(f64, f64)> {
            let temp = Temperature::new(t)?;
            let grid = WavenumberGrid::for_trajectory(&g, temp)?;
            let q = energy_quadrature(&g, temp, &grid)?;
            Ok((q.vacuum, q.thermal))
        };
        let e0 = energy(0.0)?.0;
        let pts: Vec<(f64, f64)> = (0..=4)
            .map(|i| {
                let t = 0.1 * 10f64.powf(i as f64 / 4.0);
                let (v, th) = energy(t)?;
                Ok((t.ln(), (v + th - e0).ln()))
            })
            .collect::<qrad_core::Result<_>>()?;
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        out.push(Check::new(
            2,
            "exponent of E(T)-E(0) over T*tau in [0.1, 1]",
            slope,
            Bound::Between { lo: 1.99, hi: 2.01 },
        ));
        for t in [0.1, 1.0] {
            let (v, th) = energy(t)?;
            out.push(Check::new(
                2,
                format!("E_T/E_vac vs (4 pi^2/3)(T tau)^2, T*tau = {t}"),
                rel(th / v, 4.0 * PI * PI / 3.0 * t * t),
                at_most(1e-2),
            ));
        }
        Ok(())
    })
}

fn cavity_mathieu() -> Out {
    guarded(3, "cavity Mathieu oracle", |out| {
        let start = Instant::now();
        let (eps, w) = (1e-3, 1.0);
        let mut worst = 0.0f64;
        let mut defect = 0.0f64;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=12 {
            let wt = 1000.0 + 250.0 * i as f64;
            let r = mathieu_oracle(&VibrationProfile::new(eps, w, wt / w)?)?;
            defect = defect.max(r.unitarity_defect.abs());
            let ln = r.beta_sq.ln();
            if let Some((t0, l0)) = prev {
                let slope = (ln - l0) / (r.duration - t0);
                // RWA: ln|β|² = ln sinh²(ωεT/2), whose slope tends to ωε.
                let xi = 0.25 * w * eps * (r.duration + t0);
                worst = worst.max(rel(slope, w * eps / xi.tanh()));
            }
            prev = Some((r.duration, ln));
        }
        out.push(Check::new(
            3,
            "d ln|beta|^2/dT vs RWA omega*eps*coth(Xi), omega*T in [1e3, 4e3]",
            worst,
            at_most(0.05),
        ));
        out.push(Check::new(3, "Mathieu unitarity defect", defect, at_most(1e-8)));
        out.push(Check::new(
            3,
            "Mathieu runtime [s]",
            start.elapsed().as_secs_f64(),
            at_most(10.0),
        ));
        Ok(())
    })
}

fn factorization() -> Out {
    guarded(4, "thermal factorization", |out| {
        let temps = [0.3, 1.0, 4.0].map(|t| Temperature::new(t).expect("positive"));

        let n = 4001;
        let (t0, dt) = (-20.0, 0.01);
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let t = t0 + dt * i as f64;
                1e-3 * (-t * t / 4.0).exp() * (2.0 * t).cos()
            })
            .collect();
        let cold = squeezing_delta_n(t0, dt, &samples, 1.0, Temperature::ZERO)?.delta_n;
        let mut worst = 0.0f64;
        for &temp in &temps {
            let hot = squeezing_delta_n(t0, dt, &samples, 1.0, temp)?.delta_n;
            worst = worst.max(rel(hot / cold, thermal_factor(1.0, temp)?));
        }
        out.push(Check::new(
            4,
            "cavity squeezing ratio vs thermal factor",
            worst,
            at_most(1e-12),
        ));

        let p = PermittivityProfile::harmonic(1.0, 1e-3, 1.0, 40.0)?;
        let omegas = [0.5, 0.9, 1.0, 1.3];
        let cold = large_r_spectrum(&p, Temperature::ZERO, &omegas)?;
        let mut worst = 0.0f64;
        for &temp in &temps {
            for (h, c) in large_r_spectrum(&p, temp, &omegas)?.iter().zip(&cold) {
                worst = worst.max(rel(h.delta_n / c.delta_n, thermal_factor(h.omega, temp)?));
            }
        }
        out.push(Check::new(
            4,
            "large-R dielectric ratio vs thermal factor",
            worst,
            at_most(1e-12),
        ));

        let f = ScaleFactorProfile::tanh(1.0, 1.5, 0.5)?;
        let omegas = [0.2, 0.7, 1.5];
        let cold = thermal_spectrum(&f, &omegas, Temperature::ZERO, OccupationFrequency::Physical)?;
        let mut worst = 0.0f64;
        for &temp in &temps {
            for (h, c) in thermal_spectrum(&f, &omegas, temp, OccupationFrequency::Physical)?
                .iter()
                .zip(&cold)
            {
                worst = worst.max(rel(h.delta_n / c.delta_n, thermal_factor(h.nu_in, temp)?));
            }
        }
        out.push(Check::new(4, "FRW ratio vs thermal factor", worst, at_most(1e-12)));

        // Single-mode squeezer in a truncated Fock space, β = 1, ω = 1.
        let temp = Temperature::from_beta(1.0)?;
        let s = CMatrix::from_element(1, 1, Complex64::new(0.3, 0.0));
        let m = PerturbationMatrices::new(s, CMatrix::zeros(1, 1))?;
        let cut = FockTruncation::new(80);
        let vac = fock_brute_force(&m, &OccupationVector::vacuum(1), cut)?.mean_numbers[0];
        let occ = OccupationVector::thermal(&[1.0], temp)?;
        let oracle = FockOracle::new(&m, &occ, cut)?;
        let n0 = oracle.initial_occupations()[0];
        let state = oracle.evolve(1.0, false)?;
        state.certify(1e-8)?;
        let ratio = (state.mean_numbers[0] - n0) / vac;
        out.push(Check::new(
            4,
            "Fock oracle (n_max = 80) ratio vs thermal factor",
            rel(ratio, thermal_factor(1.0, temp)?),
            at_most(1e-12),
        ));
        Ok(())
    })
}

fn magnitude() -> Out {
    guarded(5, "centimetre cube", |out| {
        let g = BoxGeometry::cube(0.01)?;
        let w1 = fundamental(&g)?.omega;
        let f = thermal_factor(w1, Temperature::new(units::kelvin(290.0))?)?;
        out.push(Check::new(
            5,
            "1 cm cube at 290 K: thermal factor",
            f,
            Bound::Between { lo: 1e2, hi: 1e3 },
        ));
        out.push(Check::new(
            5,
            "1 cm cube at 290 K: regression constant",
            rel(f, CENTIMETRE_CUBE_FACTOR),
            at_most(1e-6),
        ));
        Ok(())
    })
}

fn random_c(rng: &mut StdRng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

fn random_hermitian(rng: &mut StdRng, n: usize, scale: f64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-scale..scale), 0.0);
        for j in 0..i {
            let z = random_c(rng, scale);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn random_symmetric(rng: &mut StdRng, n: usize, scale: f64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let z = random_c(rng, scale);
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    m
}

fn conservation() -> Out {
    guarded(6, "hopping conservation", |out| {
        let mut rng = StdRng::seed_from_u64(6);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let n = rng.gen_range(1..=50);
            let u = random_hermitian(&mut rng, n, 0.1);
            let occ: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
            let m = PerturbationMatrices::new(CMatrix::zeros(n, n), u)?;
            let d = delta_n(&m, &OccupationVector::new(occ)?)?;
            worst = worst.max(d.total().iter().sum::<f64>().abs());
        }
        out.push(Check::new(
            6,
            "|sum of Delta N| for random Hermitian U, S = 0 (100 draws)",
            worst,
            at_most(1e-14),
        ));
        Ok(())
    })
}

fn fock_agreement() -> Out {
    guarded(7, "Fock oracle", |out| {
        let mut rng = StdRng::seed_from_u64(7);
        let temp = Temperature::from_beta(1.0)?;
        let (mut worst, mut drift) = (0.0f64, 0.0f64);
        for _ in 0..4 {
            let m = PerturbationMatrices::new(random_symmetric(&mut rng, 2, 0.5), random_hermitian(&mut rng, 2, 0.5))?;
            let w = [rng.gen_range(1.0..3.0), rng.gen_range(1.0..3.0)];
            let occ = OccupationVector::thermal(&w, temp)?;
            let cut = FockTruncation::for_occupations(&occ, 1e-10, 3);
            let oracle = FockOracle::new(&m, &occ, cut)?;
            let fit = oracle.quadratic_response()?;
            let want = delta_n(&m, &OccupationVector::new(fit.initial_occupations.clone())?)?.total();
            let scale = want.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            for (g, e) in fit.delta_n.iter().zip(&want) {
                worst = worst.max((g - e).abs() / scale);
            }
            let st = fock_brute_force(&m.scaled(0.2), &occ, cut)?;
            drift = drift.max((st.entropy.unwrap_or(f64::NAN) - oracle.initial_entropy()).abs());
        }
        out.push(Check::new(
            7,
            "Fock lambda^2 coefficient vs delta_n, random 2-mode, beta = 1",
            worst,
            at_most(5e-3),
        ));
        out.push(Check::new(7, "Fock oracle entropy drift", drift, at_most(1e-10)));
        Ok(())
    })
}

fn dielectric_small_r() -> Out {
    guarded(8, "dielectric small-R", |out| {
        for eps in [1.0, 1.77] {
            let p = PermittivityProfile::gaussian_bubble(eps, 1e-3, 1.0, 1.0)?;
            let oracle = small_r_oracle(&p, Temperature::ZERO)?.vacuum;
            let closed = small_r_energy(&p, Temperature::ZERO, ThermalCoefficient::AsPrinted)?.vacuum;
            out.push(Check::new(
                8,
                format!("small-R vacuum energy, 2-D oracle vs closed form, eps = {eps}"),
                rel(oracle, closed),
                at_most(1e-2),
            ));
        }
        let p = PermittivityProfile::gaussian_bubble(1.0, 1e-3, 1.0, 1.0)?;
        for t in [0.01, 0.1, 1.0] {
            let e = small_r_energy(&p, Temperature::new(t)?, ThermalCoefficient::AsPrinted)?;
            out.push(Check::new(
                8,
                format!("E_T/E_vac vs (4 pi^4/15)(T tau)^4, T*tau = {t}"),
                rel(e.thermal / e.vacuum, 4.0 * PI.powi(4) / 15.0 * t.powi(4)),
                at_most(1e-6),
            ));
        }
        Ok(())
    })
}

fn frw_limits() -> Out {
    guarded(9, "FRW limits", |out| {
        for ratio in [1.2, 2.0, 5.0] {
            // Ω_in = 1 and ω = 1, so ν_in = 1.
            let p = ScaleFactorProfile::tanh(1.0, ratio, 0.05)?;
            let b = mode_bogoliubov(&p, 1.0)?;
            out.push(Check::new(
                9,
                format!("sudden limit at tau_r*nu_in = 0.05, Omega_out/Omega_in = {ratio}"),
                rel(b.beta_sq(), sudden_limit(1.0, ratio * ratio)),
                at_most(2e-2),
            ));
        }
        for ratio in [1.2, 2.0, 5.0] {
            let p = ScaleFactorProfile::tanh(1.0, ratio, 25.0)?;
            out.push(Check::new(
                9,
                format!("adiabatic |beta|^2 at tau_r*nu_in = 25, Omega_out/Omega_in = {ratio}"),
                mode_bogoliubov(&p, 1.0)?.beta_sq(),
                at_most(1e-6),
            ));
        }
        Ok(())
    })
}

fn local_global() -> Out {
    guarded(10, "local fields", |out| {
        let g = BoxGeometry::cube(0.01)?;
        let w1 = fundamental(&g)?.omega;
        let eps = 1e-3;
        let p = VibrationProfile::new(eps, w1, 2.0 / (w1 * eps))?;
        let maps = local_field_changes(&p, Temperature::new(units::kelvin(290.0))?, &g, 64)?;
        out.push(Check::new(
            10,
            "integral of Delta<T00> on 64^3 vs omega_1 Delta N_1",
            rel(maps.integrated_energy, maps.expected_energy),
            at_most(1e-4),
        ));
        Ok(())
    })
}

fn special_functions() -> Out {
    guarded(11, "special functions", |out| {
        let t = Temperature::new(1.0)?;
        // m!/β^{m+1} ζ(m+1) at Δt = 0, β = 1
        let z2 = hurwitz_sum(1, 0.0, t)?;
        let z4 = hurwitz_sum(3, 0.0, t)? / 6.0;
        out.push(Check::new(
            11,
            "hurwitz_sum reproduces zeta(2) = pi^2/6",
            (z2 - PI * PI / 6.0).norm(),
            at_most(1e-10),
        ));
        out.push(Check::new(
            11,
            "hurwitz_sum reproduces zeta(4) = pi^4/90",
            (z4 - PI.powi(4) / 90.0).norm(),
            at_most(1e-10),
        ));
        Ok(())
    })
}

pub fn criterion(n: u8) -> Vec<Check> {
    match n {
        1 => mirror_oracle(),
        2 => mirror_scaling(),
        3 => cavity_mathieu(),
        4 => factorization(),
        5 => magnitude(),
        6 => conservation(),
        7 => fock_agreement(),
        8 => dielectric_small_r(),
        9 => frw_limits(),
        10 => local_global(),
        11 => special_functions(),
        _ => Vec::new(),
    }
}

pub const SUITES: [(&str, &[u8]); 8] = [
    ("mirror", &[1, 2]),
    ("cavity", &[3, 5, 10]),
    ("thermal", &[4]),
    ("response", &[6, 7]),
    ("dielectric", &[8]),
    ("frw", &[9]),
    ("special", &[11]),
    ("all", &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]),
];

/// Criteria of a named suite, or `None` for an unknown name.
pub fn suite(name: &str) -> Option<&'static [u8]> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

pub fn run(criteria: &[u8]) -> Vec<Check> {
    criteria.iter().flat_map(|&c| criterion(c)).collect()
}
