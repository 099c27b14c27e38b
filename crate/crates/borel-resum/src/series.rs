//! Perturbation-series container, the built-in example models, file
//! ingestion, auxiliary-series construction, and naive partial sums.

use serde::{Deserialize, Serialize};

use crate::bernoulli::bernoulli_numbers;
use crate::error::{Error, Result};

/// The five built-in example models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinModel {
    /// f_n = (-1)^n n!, Borel function 1/(1+z).
    Prototype,
    /// f_n = (-1)^n, Borel function e^{-z}.
    Geometric,
    /// f_n = ((-1)^n + 5^{-(n+1)}) n!/6, Borel function 1/((1+z)(5-z)).
    PvModel,
    /// One-loop QED effective-Lagrangian series in a magnetic field.
    EulerHeisenberg,
    /// Seven-loop beta function of the three-dimensional polymer model.
    BetaPolymer,
}

/// Published beta-function coefficients; only these seven loops exist.
const BETA_POLYMER: [f64; 8] = [
    0.0, -1.0, 1.0, -0.439815, 0.389923, -0.447316, 0.633855, -1.03493,
];

impl BuiltinModel {
    pub const ALL: [BuiltinModel; 5] = [
        BuiltinModel::Prototype,
        BuiltinModel::Geometric,
        BuiltinModel::PvModel,
        BuiltinModel::EulerHeisenberg,
        BuiltinModel::BetaPolymer,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BuiltinModel::Prototype => "prototype",
            BuiltinModel::Geometric => "geometric",
            BuiltinModel::PvModel => "pv_model",
            BuiltinModel::EulerHeisenberg => "euler_heisenberg",
            BuiltinModel::BetaPolymer => "beta_polymer",
        }
    }

    /// Reference coupling at which the extremum condition is solved.
    pub fn default_lambda0(self) -> f64 {
        match self {
            BuiltinModel::EulerHeisenberg => 10.0,
            _ => 1.0,
        }
    }

    /// Coupling range used for curve exports.
    pub fn default_lambda_range(self) -> (f64, f64) {
        match self {
            BuiltinModel::EulerHeisenberg => (0.0, 10.0),
            BuiltinModel::BetaPolymer => (0.0, 1.5),
            _ => (0.0, 1.0),
        }
    }
}

impl std::str::FromStr for BuiltinModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinModel::ALL
            .iter()
            .copied()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::Parse {
                field: "model".into(),
                message: format!("unknown builtin model `{s}`"),
            })
    }
}

/// Where a series came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesOrigin {
    File,
    Builtin(BuiltinModel),
    AuxiliaryOf(String),
}

/// Ordered perturbation coefficients `f_0..f_N` with an overall prefactor.
///
/// Immutable after construction; freely shareable across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeries {
    name: String,
    coefficients: Vec<f64>,
    prefactor: f64,
    origin: SeriesOrigin,
}

impl CoefficientSeries {
    pub fn new(
        name: impl Into<String>,
        coefficients: Vec<f64>,
        prefactor: f64,
        origin: SeriesOrigin,
    ) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        for (i, &c) in coefficients.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFiniteCoefficient { index: i, value: c });
            }
        }
        if !prefactor.is_finite() || prefactor == 0.0 {
            return Err(Error::BadPrefactor(prefactor));
        }
        Ok(CoefficientSeries {
            name: name.into(),
            coefficients,
            prefactor,
            origin,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, n: usize) -> f64 {
        self.coefficients[n]
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn origin(&self) -> &SeriesOrigin {
        &self.origin
    }

    /// Highest available order N (the series holds f_0..f_N).
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// prefactor * sum_{n=0}^{N} f_n lambda^n, evaluated by Horner's rule.
    pub fn partial_sum(&self, n: usize, lambda: f64) -> Result<f64> {
        if n > self.order() {
            return Err(Error::OrderOutOfRange {
                requested: n,
                order: self.order(),
            });
        }
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("non-finite lambda {lambda}")));
        }
        let mut acc = 0.0;
        for &f in self.coefficients[..=n].iter().rev() {
            acc = acc * lambda + f;
        }
        Ok(self.prefactor * acc)
    }

    /// Auxiliary series f'_n = f_{n+1}; requires f_0 = 0 so that the
    /// division by lambda leaves a power series regular at the origin.
    pub fn auxiliary(&self) -> Result<CoefficientSeries> {
        if self.coefficients[0] != 0.0 {
            return Err(Error::AuxiliaryUndefined(self.coefficients[0]));
        }
        if self.coefficients.len() < 2 {
            return Err(Error::EmptyCoefficients);
        }
        CoefficientSeries::new(
            format!("{}_aux", self.name),
            self.coefficients[1..].to_vec(),
            self.prefactor,
            SeriesOrigin::AuxiliaryOf(self.name.clone()),
        )
    }
}

/// Generate a built-in model's coefficients out to `max_order`.
pub fn builtin_series(model: BuiltinModel, max_order: usize) -> Result<CoefficientSeries> {
    if max_order < 1 {
        return Err(Error::Domain(format!(
            "max_order must be >= 1, got {max_order}"
        )));
    }
    let (coeffs, prefactor) = match model {
        BuiltinModel::Prototype => {
            let mut f = Vec::with_capacity(max_order + 1);
            let mut fact = 1.0f64;
            f.push(1.0);
            for n in 1..=max_order {
                fact *= n as f64;
                f.push(if n % 2 == 0 { fact } else { -fact });
            }
            (f, 1.0)
        }
        BuiltinModel::Geometric => (
            (0..=max_order)
                .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
                .collect(),
            1.0,
        ),
        BuiltinModel::PvModel => {
            let mut f = Vec::with_capacity(max_order + 1);
            let mut fact = 1.0f64;
            let mut pow5 = 5.0f64;
            f.push((1.0 + 1.0 / pow5) / 6.0);
            for n in 1..=max_order {
                fact *= n as f64;
                pow5 *= 5.0;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                f.push((sign + 1.0 / pow5) * fact / 6.0);
            }
            (f, 1.0)
        }
        BuiltinModel::EulerHeisenberg => {
            let table = bernoulli_numbers(2 * max_order + 2)?;
            let mut f = vec![0.0];
            let mut pow4 = 1.0f64;
            for n in 1..=max_order {
                let b = table.to_f64(2 * n + 2).expect("table covers 2n+2");
                let denom = (2 * n) as f64 * (2 * n + 1) as f64 * (2 * n + 2) as f64;
                f.push(pow4 * b / denom);
                pow4 *= 4.0;
            }
            (f, 1600.0)
        }
        BuiltinModel::BetaPolymer => {
            if max_order > 7 {
                return Err(Error::InsufficientCoefficients {
                    model: model.id().into(),
                    requested: max_order,
                    available: 7,
                });
            }
            (BETA_POLYMER[..=max_order].to_vec(), 1.0)
        }
    };
    CoefficientSeries::new(model.id(), coeffs, prefactor, SeriesOrigin::Builtin(model))
}

#[derive(Deserialize)]
struct SeriesDocument {
    name: String,
    #[serde(default)]
    prefactor: Option<f64>,
    coefficients: Vec<f64>,
}

/// Input format for [`load_series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    Json,
    Csv,
}

/// Parse a series from a byte stream.
///
/// JSON: `{"name": string, "prefactor": number (optional), "coefficients": [..]}`.
/// CSV: one row of comma-separated coefficients; `#`-prefixed lines are comments.
pub fn load_series(source: &[u8], format: SeriesFormat) -> Result<CoefficientSeries> {
    match format {
        SeriesFormat::Json => {
            let doc: SeriesDocument =
                serde_json::from_slice(source).map_err(|e| Error::Parse {
                    field: "document".into(),
                    message: e.to_string(),
                })?;
            if doc.coefficients.is_empty() {
                return Err(Error::EmptyCoefficients);
            }
            CoefficientSeries::new(
                doc.name,
                doc.coefficients,
                doc.prefactor.unwrap_or(1.0),
                SeriesOrigin::File,
            )
        }
        SeriesFormat::Csv => {
            let text = std::str::from_utf8(source).map_err(|e| Error::Parse {
                field: "document".into(),
                message: e.to_string(),
            })?;
            let mut coeffs = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                for (i, tok) in line.split(',').enumerate() {
                    let tok = tok.trim();
                    if tok.is_empty() {
                        continue;
                    }
                    let v: f64 = tok.parse().map_err(|_| Error::Parse {
                        field: format!("coefficients[{}]", coeffs.len() + i),
                        message: format!("`{tok}` is not a number"),
                    })?;
                    coeffs.push(v);
                }
            }
            if coeffs.is_empty() {
                return Err(Error::EmptyCoefficients);
            }
            CoefficientSeries::new("csv_series", coeffs, 1.0, SeriesOrigin::File)
        }
    }
}
