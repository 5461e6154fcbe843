//! Zero temperature: how the equilibrium states of `beta A` behave as
//! `beta -> infinity`.

mod chapter7;
mod two_state;

pub use chapter7::{
    g_function_chapter7, limit_selection_chapter7, limit_selection_chapter7_with, log_mu_ratio_chapter7,
    mu_ratio_chapter7, nu_ratio_chapter7, reduced_exponent_matrix, rho_chapter7, Chapter7Analysis, Chapter7Params,
    ClassThresholds, LimitClass, Rho, LIMIT_BETAS,
};
pub use two_state::{two_state_closed_forms, TwoStateClosedForms};

use alloc::vec::Vec;

use crate::ergopt::{max_ergodic_value, Subaction};
use crate::error::{input_err, Error, Result};
use crate::thermo::{thermo_state, PotentialMatrix};

/// Largest inverse temperature accepted by [`BetaSchedule`].
pub const MAX_BETA: f64 = 500.0;

/// Strictly increasing positive inverse temperatures, at most [`MAX_BETA`].
#[derive(Clone, Debug, PartialEq)]
pub struct BetaSchedule(Vec<f64>);

impl BetaSchedule {
    pub fn new(values: Vec<f64>) -> Result<BetaSchedule> {
        if values.is_empty() {
            return Err(input_err!("empty beta schedule"));
        }
        if values.iter().any(|&b| !(b > 0.0) || b > MAX_BETA) {
            return Err(input_err!("beta values must lie in (0, {}]", MAX_BETA));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(input_err!("beta values must be strictly increasing"));
        }
        Ok(BetaSchedule(values))
    }

    /// `steps` equally spaced values from `min` to `max`.
    pub fn linear(min: f64, max: f64, steps: usize) -> Result<BetaSchedule> {
        BetaSchedule::new(spaced(min, max, steps, |t| min + t * (max - min))?)
    }

    /// `steps` geometrically spaced values from `min` to `max`.
    pub fn geometric(min: f64, max: f64, steps: usize) -> Result<BetaSchedule> {
        if !(min > 0.0) {
            return Err(input_err!("geometric schedule needs a positive start"));
        }
        let ratio = max / min;
        BetaSchedule::new(spaced(min, max, steps, |t| min * libm::pow(ratio, t))?)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for BetaSchedule {
    /// Geometric, 1 to 300, 40 points.
    fn default() -> BetaSchedule {
        BetaSchedule::geometric(1.0, 300.0, 40).expect("default schedule is valid")
    }
}

fn spaced(min: f64, max: f64, steps: usize, at: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    match steps {
        0 => Err(input_err!("a schedule needs at least one step")),
        1 => Ok(alloc::vec![min]),
        _ => {
            let mut v: Vec<f64> = (0..steps).map(|k| at(k as f64 / (steps - 1) as f64)).collect();
            v[steps - 1] = max;
            Ok(v)
        }
    }
}

/// One inverse temperature of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub beta: f64,
    pub pressure: f64,
    /// `μ_beta[i]`.
    pub mu_cyl: Vec<f64>,
    /// `(1/beta) ln H_i` shifted so the maximum is zero.
    pub log_h_over_beta: Vec<f64>,
    /// `(1/beta) ln(exp(P) - 1)`, when the pressure is positive.
    pub decay: Option<f64>,
}

/// Convergence diagnostics of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepDiagnostics {
    pub m_a: f64,
    /// Pressure slopes between consecutive successful points; they tend to `m(A)`.
    pub slopes: Vec<f64>,
    /// `max_i |Δ (1/beta) ln H_i|` between consecutive successful points.
    pub subaction_steps: Vec<f64>,
    /// Calibration residual of the last `(1/beta) ln H` as a subaction.
    pub final_calibration_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    /// Inverse temperatures at which the Perron solve failed.
    pub failures: Vec<(f64, Error)>,
    pub diagnostics: SweepDiagnostics,
}

/// Thermodynamic data along a schedule. Failures are collected, not fatal.
pub fn beta_sweep(a: &PotentialMatrix, schedule: &BetaSchedule) -> Result<SweepResult> {
    let m_a = max_ergodic_value(a)?;
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &beta in schedule.values() {
        match thermo_state(a, beta) {
            Ok(s) => {
                let mut log_h: Vec<f64> = s.perron.log_l.iter().map(|t| t / beta).collect();
                let top = log_h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                log_h.iter_mut().for_each(|t| *t -= top);
                records.push(SweepRecord {
                    beta,
                    pressure: s.pressure(),
                    mu_cyl: s.pi().as_slice().to_vec(),
                    log_h_over_beta: log_h,
                    decay: s.log_expm1_pressure.map(|t| t / beta),
                });
            }
            Err(e) => failures.push((beta, e)),
        }
    }
    let slopes = records.windows(2).map(|w| (w[1].pressure - w[0].pressure) / (w[1].beta - w[0].beta)).collect();
    let subaction_steps = records
        .windows(2)
        .map(|w| {
            w[0].log_h_over_beta.iter().zip(&w[1].log_h_over_beta).map(|(x, y)| libm::fabs(x - y)).fold(0.0, f64::max)
        })
        .collect();
    let final_calibration_residual =
        records.last().map(|r| Subaction { v: r.log_h_over_beta.clone() }.calibration_residual(a, m_a));
    Ok(SweepResult {
        records,
        failures,
        diagnostics: SweepDiagnostics { m_a, slopes, subaction_steps, final_calibration_residual },
    })
}
