//! JSON and CSV layouts. Symbols are 0-based in every file, so symbol `k`
//! of the library appears as `k - 1`; CSV column names keep the 1-based labels.

use std::fmt::Write as _;

use ergodic_core::ergopt::{AubryData, Subaction};
use ergodic_core::involution::TwistReport;
use ergodic_core::maxplus::{MaxPlusMatrix, MaxPlusScalar};
use ergodic_core::measures::{MarkovMeasure, ProbabilityVector, StochasticMatrix};
use ergodic_core::thermo::ThermoState;
use ergodic_core::zero_temp::{Chapter7Analysis, Chapter7Params, LimitClass, SweepResult};
use ergodic_core::PotentialMatrix;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CliError, CliResult};

/// A real that may be infinite. Infinities are written as `"inf"` and `"-inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            x if x.is_finite() => s.serialize_f64(x),
            x if x == f64::INFINITY => s.serialize_str("inf"),
            x if x == f64::NEG_INFINITY => s.serialize_str("-inf"),
            _ => s.serialize_str("nan"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<ExtReal, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtReal;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                Ok(ExtReal(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v {
                    "inf" | "+inf" => Ok(ExtReal(f64::INFINITY)),
                    "-inf" => Ok(ExtReal(f64::NEG_INFINITY)),
                    "nan" => Ok(ExtReal(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// `{"d": n, "A": rows}`, optionally with the inverse temperature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialFile {
    pub d: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl PotentialFile {
    pub fn from_potential(a: &PotentialMatrix, beta: Option<f64>) -> PotentialFile {
        PotentialFile { d: a.dim(), a: a.to_rows(), beta }
    }

    pub fn potential(&self) -> CliResult<PotentialMatrix> {
        if self.a.len() != self.d || self.a.iter().any(|r| r.len() != self.d) {
            return Err(CliError::Input(format!("\"A\" must be a {0}x{0} matrix", self.d)));
        }
        Ok(PotentialMatrix::from_rows(&self.a)?)
    }
}

/// `{P: rows, pi: vector}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovFile {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
}

impl MarkovFile {
    pub fn from_measure(m: &MarkovMeasure) -> MarkovFile {
        MarkovFile { p: m.transition().matrix().to_rows(), pi: m.stationary().as_slice().to_vec() }
    }

    pub fn measure(&self) -> CliResult<MarkovMeasure> {
        let p = StochasticMatrix::from_rows(&self.p)?;
        Ok(MarkovMeasure::new(p, ProbabilityVector::new(self.pi.clone())?)?)
    }
}

/// Perron data in log coordinates plus the equilibrium state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoFile {
    pub beta: f64,
    pub log_lambda: f64,
    pub log_l: Vec<f64>,
    pub log_r: Vec<f64>,
    pub log_pi: Vec<f64>,
    /// `ln(exp(P) - 1)`, absent when the pressure is not positive.
    pub log_expm1_pressure: Option<f64>,
    pub equilibrium: MarkovFile,
}

impl ThermoFile {
    pub fn from_state(s: &ThermoState) -> ThermoFile {
        ThermoFile {
            beta: s.beta,
            log_lambda: s.perron.log_lambda,
            log_l: s.perron.log_l.clone(),
            log_r: s.perron.log_r.clone(),
            log_pi: s.log_pi.clone(),
            log_expm1_pressure: s.log_expm1_pressure,
            equilibrium: MarkovFile::from_measure(s.equilibrium()),
        }
    }
}

/// Max-plus matrix rows; `-inf` entries are the string `"-inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MaxPlusFile(pub Vec<Vec<ExtReal>>);

impl MaxPlusFile {
    pub fn matrix(&self) -> CliResult<MaxPlusMatrix> {
        let rows: Vec<Vec<f64>> = self.0.iter().map(|r| r.iter().map(|x| x.0).collect()).collect();
        Ok(MaxPlusMatrix::from_f64_rows(&rows)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxPlusReport {
    pub lambda: f64,
    pub eigenvector: Vec<ExtReal>,
    pub holds: bool,
    pub residual: ExtReal,
}

pub fn ext_vec(v: &[MaxPlusScalar]) -> Vec<ExtReal> {
    v.iter().map(|x| ExtReal(x.to_f64())).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentFile {
    pub symbols: Vec<usize>,
    pub entropy: f64,
}

/// `{m_A, cycles, T_aubry, components}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AubryFile {
    #[serde(rename = "m_A")]
    pub m_a: f64,
    pub cycles: Vec<Vec<usize>>,
    #[serde(rename = "T_aubry")]
    pub t_aubry: Vec<Vec<u8>>,
    pub components: Vec<ComponentFile>,
}

impl AubryFile {
    pub fn from_data(a: &AubryData) -> AubryFile {
        AubryFile {
            m_a: a.m_a,
            cycles: a.maximizing_cycles.iter().map(|c| c.symbols().iter().map(|s| s.zero_based()).collect()).collect(),
            t_aubry: a.t_aubry.to_rows(),
            components: a
                .components
                .iter()
                .map(|c| ComponentFile {
                    symbols: c.symbols.iter().map(|s| s.zero_based()).collect(),
                    entropy: c.entropy,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubactionFile {
    #[serde(rename = "m_A")]
    pub m_a: f64,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    pub calibration_residual: f64,
}

impl SubactionFile {
    pub fn new(a: &PotentialMatrix, v: &Subaction, m: f64) -> SubactionFile {
        SubactionFile { m_a: m, v: v.v.clone(), calibration_residual: v.calibration_residual(a, m) }
    }
}

/// `{"eps": 3x3 rows}` with a zero `ε11`, `ε22`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chapter7File {
    pub eps: [[f64; 3]; 3],
}

impl Chapter7File {
    pub fn params(&self) -> CliResult<Chapter7Params> {
        Ok(Chapter7Params::new(self.eps)?)
    }
}

/// `{rho, candidates, classification, alpha, numeric_trace}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chapter7Report {
    pub rho: f64,
    pub candidates: [f64; 6],
    pub classification: String,
    /// Absent when unresolved.
    pub alpha: Option<ExtReal>,
    /// `[beta, ln(μ[1]/μ[2])]` pairs.
    pub numeric_trace: Vec<[f64; 2]>,
}

fn class_label(c: LimitClass) -> String {
    match c {
        LimitClass::Zero => "alpha=0".into(),
        LimitClass::Infinite => "alpha=inf".into(),
        LimitClass::Finite(a) if (a - a.round()).abs() <= 1e-9 * a.max(1.0) => format!("alpha={}", a.round()),
        LimitClass::Finite(a) => format!("alpha={a:.6}"),
    }
}

impl Chapter7Report {
    pub fn from_analysis(an: &Chapter7Analysis) -> Chapter7Report {
        let classification = if an.agree {
            class_label(an.numeric)
        } else {
            format!("unresolved (asymptotic {}, numeric {})", class_label(an.asymptotic), class_label(an.numeric))
        };
        Chapter7Report {
            rho: an.rho,
            candidates: an.candidates,
            classification,
            alpha: an.alpha().map(ExtReal),
            numeric_trace: an.numeric_trace.iter().map(|&(b, r)| [b, r]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdpReport {
    pub word: Vec<usize>,
    /// Rate function of the cylinder.
    pub rate: ExtReal,
    pub unique_maximizer: bool,
    pub beta: f64,
    /// `-(1/beta) ln μ_beta[word]`.
    pub empirical: ExtReal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationFile {
    pub i: usize,
    pub i2: usize,
    pub j: usize,
    pub j2: usize,
    pub tie: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistFile {
    pub holds: bool,
    pub violation: Option<ViolationFile>,
    pub reversed_holds: bool,
    pub beta: f64,
    /// `[ln λ(beta A), ln λ(beta A*)]`.
    pub dual_log_lambda: [f64; 2],
}

impl TwistFile {
    pub fn new(twist: &TwistReport, reversed: &TwistReport, beta: f64, dual: (f64, f64)) -> TwistFile {
        TwistFile {
            holds: twist.holds,
            violation: twist.violation.map(|v| ViolationFile {
                i: v.i.zero_based(),
                i2: v.i2.zero_based(),
                j: v.j.zero_based(),
                j2: v.j2.zero_based(),
                tie: v.tie,
            }),
            reversed_holds: reversed.holds,
            beta,
            dual_log_lambda: [dual.0, dual.1],
        }
    }
}

/// 17 significant digits, `.` as the decimal separator.
pub fn csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        "nan".into()
    }
}

/// `beta,pressure,decay,mu_1..mu_d,logH_1..logH_d`. Points where the Perron
/// solve failed are kept as rows of `nan`.
pub fn sweep_csv(d: usize, sweep: &SweepResult) -> String {
    let mut out = String::from("beta,pressure,decay");
    (1..=d).for_each(|i| write!(out, ",mu_{i}").unwrap());
    (1..=d).for_each(|i| write!(out, ",logH_{i}").unwrap());
    out.push('\n');
    let mut rows: Vec<(f64, String)> = sweep
        .records
        .iter()
        .map(|r| {
            // no decay means e^P - 1 <= 0: -inf at P = 0 exactly
            let decay = r.decay.unwrap_or(if r.pressure == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
            let fields: Vec<String> = [r.beta, r.pressure, decay]
                .into_iter()
                .chain(r.mu_cyl.iter().copied())
                .chain(r.log_h_over_beta.iter().copied())
                .map(csv_number)
                .collect();
            (r.beta, fields.join(","))
        })
        .collect();
    rows.extend(sweep.failures.iter().map(|(beta, _)| {
        let fields: Vec<String> =
            std::iter::once(csv_number(*beta)).chain((0..2 + 2 * d).map(|_| "nan".to_string())).collect();
        (*beta, fields.join(","))
    }));
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, row) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}
