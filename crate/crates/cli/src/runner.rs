//! Dispatch of validated scenarios onto the physics modules.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use qrad_core::cavity::{detectability, local_field_changes, rwa_photon_number, Verdict};
use qrad_core::dielectric::{large_r_spectrum, small_r_energy, spectral_density};
use qrad_core::frw::thermal_spectrum;
use qrad_core::mirror::{energy_closed, energy_from_spectrum, spectrum, WavenumberGrid};
use qrad_core::thermal::bose_occupation;
use qrad_core::Temperature;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Plan, PlannedModel, ScenarioKind};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub mode: String,
    pub omega: f64,
    pub dn_vacuum: f64,
    pub dn_thermal: f64,
    pub dn_total: f64,
    /// `|α|² − |β|² − 1`, FRW only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitarity: Option<f64>,
}

impl SpectrumRow {
    fn split(mode: String, omega: f64, vacuum: f64, total: f64) -> Self {
        Self {
            mode,
            omega,
            dn_vacuum: vacuum,
            dn_thermal: total - vacuum,
            dn_total: total,
            unitarity: None,
        }
    }

    fn sum(mode: String, omega: f64, vacuum: f64, thermal: f64) -> Self {
        Self {
            mode,
            omega,
            dn_vacuum: vacuum,
            dn_thermal: thermal,
            dn_total: vacuum + thermal,
            unitarity: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_vacuum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_thermal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermal_factor: Option<f64>,
    /// Absent when the result is vacuum limited (zero thermal noise).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detectability_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub extra: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub scenario: &'static str,
    /// As given in the config.
    pub temperature: f64,
    pub temperature_natural: f64,
    pub rows: Vec<SpectrumRow>,
    pub summary: Summary,
    pub warnings: Vec<String>,
    pub version: &'static str,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl ResultRecord {
    /// Every emitted number is finite and each row decomposes exactly.
    pub fn check(&self) -> Result<(), String> {
        let s = &self.summary;
        let scalars = [s.e_vacuum, s.e_thermal, s.xi, s.thermal_factor, s.detectability_ratio];
        if scalars.iter().flatten().chain(s.extra.values()).any(|x| !x.is_finite()) {
            return Err("non-finite summary value".into());
        }
        for r in &self.rows {
            let vals = [r.omega, r.dn_vacuum, r.dn_thermal, r.dn_total];
            if vals.iter().chain(r.unitarity.iter()).any(|x| !x.is_finite()) {
                return Err(format!("non-finite value in row {}", r.mode));
            }
            let sum = r.dn_vacuum + r.dn_thermal;
            if (sum - r.dn_total).abs() > 1e-12 * r.dn_total.abs().max(r.dn_vacuum.abs()) {
                return Err(format!("row {} does not decompose", r.mode));
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct RunError {
    pub scenario: ScenarioKind,
    pub temperature: f64,
    pub message: String,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scenario {} at temperature {:e}: {}",
            self.scenario, self.temperature, self.message
        )
    }
}

impl std::error::Error for RunError {}

fn run_one(plan: &Plan, temp: Temperature) -> qrad_core::Result<(Vec<SpectrumRow>, Summary, Vec<String>)> {
    let mut summary = Summary::default();
    let mut warnings = plan.warnings.clone();
    let rows = match &plan.model {
        PlannedModel::Mirror(traj) => {
            let k_max = traj.bandwidth().max(40.0 * temp.value());
            let grid = WavenumberGrid::log_panels(1e-5 * k_max, k_max, plan.numerics.panels, plan.numerics.order)?;
            let spec = spectrum(traj, temp, &grid)?;
            let closed = energy_closed(traj, temp)?;
            let quad = energy_from_spectrum(&spec, &grid);
            summary.e_vacuum = Some(closed.vacuum);
            summary.e_thermal = Some(closed.thermal);
            summary.extra.insert("e_vacuum_quadrature".into(), quad.vacuum);
            summary.extra.insert("e_thermal_quadrature".into(), quad.thermal);
            summary
                .extra
                .insert("perturbative_ratio".into(), spec.perturbative_ratio);
            warnings.extend(spec.warnings.iter().cloned());
            (0..spec.k.len())
                .map(|i| SpectrumRow::sum(format!("k{i}"), spec.k[i], spec.vacuum[i], spec.thermal[i]))
                .collect()
        }
        PlannedModel::Cavity {
            geometry,
            mode,
            profile,
        } => {
            let rwa = rwa_photon_number(profile, temp)?;
            let det = detectability(rwa.delta_n, mode.omega, temp)?;
            summary.xi = Some(rwa.xi);
            summary.thermal_factor = Some(rwa.thermal_factor);
            summary.detectability_ratio = det.ratio.is_finite().then_some(det.ratio);
            summary.verdict = Some(det.verdict);
            summary.extra.insert("omega_1".into(), mode.omega);
            summary.extra.insert("n_1".into(), bose_occupation(mode.omega, temp)?);
            summary.extra.insert("duration".into(), profile.duration);
            if plan.numerics.local_grid > 0 {
                let maps = local_field_changes(profile, temp, geometry, plan.numerics.local_grid)?;
                summary
                    .extra
                    .insert("local_energy_integral".into(), maps.integrated_energy);
                summary
                    .extra
                    .insert("local_energy_expected".into(), maps.expected_energy);
            }
            let [a, b, c] = mode.indices;
            vec![SpectrumRow::split(
                format!("({a},{b},{c})"),
                mode.omega,
                rwa.vacuum,
                rwa.delta_n,
            )]
        }
        PlannedModel::SmallR { profile, coefficient } => {
            let e = small_r_energy(profile, temp, *coefficient)?;
            summary.e_vacuum = Some(e.vacuum);
            summary.e_thermal = Some(e.thermal);
            // Energy density per unit ω divided by ω: quanta per unit ω.
            plan.omegas
                .par_iter()
                .enumerate()
                .map(|(i, &w)| {
                    let (v, t) = spectral_density(profile, temp, w)?;
                    Ok(SpectrumRow::sum(format!("w{i}"), w, v / w, t / w))
                })
                .collect::<qrad_core::Result<Vec<_>>>()?
        }
        PlannedModel::LargeR(profile) => {
            let rows = large_r_spectrum(profile, temp, &plan.omegas)?;
            summary
                .extra
                .insert("dn_vacuum_sum".into(), rows.iter().map(|r| r.vacuum).sum());
            summary
                .extra
                .insert("dn_total_sum".into(), rows.iter().map(|r| r.delta_n).sum());
            rows.iter()
                .enumerate()
                .map(|(i, r)| SpectrumRow::split(format!("w{i}"), r.omega, r.vacuum, r.delta_n))
                .collect()
        }
        PlannedModel::Frw { profile, occupation } => {
            let rows = thermal_spectrum(profile, &plan.omegas, temp, *occupation)?;
            let worst = rows.iter().map(|r| r.unitarity_defect.abs()).fold(0.0, f64::max);
            summary.extra.insert("max_unitarity_defect".into(), worst);
            rows.iter()
                .enumerate()
                .map(|(i, r)| SpectrumRow {
                    unitarity: Some(r.unitarity_defect),
                    ..SpectrumRow::split(format!("w{i}"), r.omega, r.beta_sq, r.delta_n)
                })
                .collect()
        }
    };
    Ok((rows, summary, warnings))
}

/// Runs every temperature of the plan on a pool of `workers` threads.
/// Records come back in config order regardless of completion order.
pub fn run_scenario(plan: &Plan, workers: usize) -> Result<Vec<ResultRecord>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RunError {
            scenario: plan.kind,
            temperature: f64::NAN,
            message: format!("cannot start worker pool: {e}"),
        })?;
    pool.install(|| {
        plan.temperatures
            .par_iter()
            .map(|&(given, temp)| {
                let fail = |message: String| RunError {
                    scenario: plan.kind,
                    temperature: given,
                    message,
                };
                let start = Instant::now();
                let (rows, summary, warnings) = run_one(plan, temp).map_err(|e| fail(e.to_string()))?;
                let rec = ResultRecord {
                    scenario: plan.kind.as_str(),
                    temperature: given,
                    temperature_natural: temp.value(),
                    rows,
                    summary,
                    warnings,
                    version: VERSION,
                    wall_clock: start.elapsed(),
                };
                rec.check().map_err(fail)?;
                Ok(rec)
            })
            .collect()
    })
}

/// Worker count from the flag, then `QRAD_WORKERS`, then the core count.
pub fn default_workers() -> usize {
    std::env::var("QRAD_WORKERS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|n: &usize| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_scenario, validate};

    fn plan(text: &str) -> Plan {
        validate(&parse_scenario(text).unwrap().config).unwrap()
    }

    #[test]
    fn mirror_energy_is_closed_form() {
        let p = plan("scenario = \"mirror\"\ntemperature = 0\n[mirror]\nfamily = \"gaussian\"\na = 1\ntau = 1\n");
        let r = run_scenario(&p, 2).unwrap();
        let traj = qrad_core::mirror::Trajectory::gaussian(1.0, 1.0).unwrap();
        let e = energy_closed(&traj, Temperature::ZERO).unwrap();
        assert_eq!(r[0].summary.e_vacuum, Some(e.vacuum));
        assert_eq!(r[0].rows.len(), 51 * 8);
    }

    #[test]
    fn sweep_keeps_order() {
        let p = plan(
            "scenario = \"dielectric-largeR\"\ntemperature = [0.0, 2.0, 0.5]\n[dielectric]\neps_inf = 1.0\ntheta0 = 1e-3\nomega = 1.0\nduration = 30.0\n[grid]\nomegas = [0.5, 1.0, 1.5]\n",
        );
        let r = run_scenario(&p, 3).unwrap();
        let ts: Vec<f64> = r.iter().map(|x| x.temperature).collect();
        assert_eq!(ts, vec![0.0, 2.0, 0.5]);
        for rec in &r {
            assert_eq!(rec.rows.len(), 3);
            assert!(rec.check().is_ok());
        }
    }

    #[test]
    fn frw_rows_carry_unitarity() {
        let p = plan(
            "scenario = \"frw\"\ntemperature = 1.0\n[frw]\nfamily = \"tanh\"\nomega_in = 1\nomega_out = 2\ntau_r = 0.5\n[grid]\nmin = 0.1\nmax = 2.0\npoints = 10\nspacing = \"log\"\n",
        );
        let r = run_scenario(&p, 1).unwrap();
        assert_eq!(r[0].rows.len(), 10);
        assert!(r[0].rows.iter().all(|x| x.unitarity.unwrap().abs() < 1e-8));
    }
}
