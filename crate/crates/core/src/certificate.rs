use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::operator::{band_profile, SparseOperator};
use crate::spectral::{operator_norm, NormEstimate, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    EdgeAddition,
    ExpanderProjection,
    BipartiteStack,
    RegularComplement,
    TreeTruncation,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::EdgeAddition => "edge-addition",
            Method::ExpanderProjection => "expander-projection",
            Method::BipartiteStack => "bipartite-stack",
            Method::RegularComplement => "regular-complement",
            Method::TreeTruncation => "tree-truncation",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Method::EdgeAddition,
            Method::ExpanderProjection,
            Method::BipartiteStack,
            Method::RegularComplement,
            Method::TreeTruncation,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or_else(|| Error::param("method", format!("unknown method `{s}`")))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An approximant of `target` in `B^(band)` with `||target - approximant|| <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationCertificate {
    pub method: Method,
    pub target: SparseOperator,
    pub approximant: SparseOperator,
    pub band: usize,
    pub bound: f64,
    /// Norm estimate of `target - approximant`, filled by [`Self::measure`].
    pub measured: Option<NormEstimate>,
    pub params: Map<String, Value>,
    pub seed: Option<u64>,
}

/// Serialized form of a certificate, without matrix payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub method: Method,
    pub band: usize,
    pub bound: f64,
    pub measured_lower: Option<f64>,
    pub measured_upper: Option<f64>,
    pub params: Map<String, Value>,
    pub seed: Option<u64>,
}

pub const CSV_HEADER: &str = "method,params,band,bound,measured_lower,measured_upper";

impl ApproximationCertificate {
    pub(crate) fn new(
        method: Method,
        target: SparseOperator,
        approximant: SparseOperator,
        theoretical_band: usize,
        bound: f64,
    ) -> Self {
        let actual = band_profile(&approximant).band();
        ApproximationCertificate {
            method,
            target,
            approximant,
            band: theoretical_band.max(actual),
            bound,
            measured: None,
            params: Map::new(),
            seed: None,
        }
    }

    pub(crate) fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub(crate) fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn error_operator(&self) -> Result<SparseOperator> {
        self.target.sub(&self.approximant)
    }

    /// Estimates `||target - approximant||` and stores it.
    pub fn measure(&mut self, seed: u64) -> Result<&NormEstimate> {
        let err = self.error_operator()?;
        let est = operator_norm(&err, DEFAULT_TOL, DEFAULT_MAX_ITER, seed)?;
        Ok(self.measured.insert(est))
    }

    pub fn with_measurement(mut self, seed: u64) -> Result<Self> {
        self.measure(seed)?;
        Ok(self)
    }

    /// Band profile within the declared band and, when measured, the measured
    /// lower end within `bound + slack`.
    pub fn is_consistent(&self, slack: f64) -> bool {
        band_profile(&self.approximant).fits(self.band)
            && self
                .measured
                .as_ref()
                .is_none_or(|m| m.lower <= self.bound + slack)
    }

    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            method: self.method,
            band: self.band,
            bound: self.bound,
            measured_lower: self.measured.as_ref().map(|m| m.lower),
            measured_upper: self.measured.as_ref().map(|m| m.upper),
            params: self.params.clone(),
            seed: self.seed,
        }
    }
}

impl CertificateRecord {
    /// `key=value` pairs joined by `;`, safe inside a CSV field.
    pub fn params_field(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                format!("{k}={}", v.replace(',', " "))
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.17e}")).unwrap_or_default();
        format!(
            "{},{},{},{:.17e},{},{}",
            self.method,
            self.params_field(),
            self.band,
            self.bound,
            opt(self.measured_lower),
            opt(self.measured_upper)
        )
    }

    /// Parses a [`Self::csv_row`] line. The seed is not part of the row, and
    /// parameter values that were lists come back with their commas restored.
    pub fn from_csv_row(row: &str, line: usize) -> Result<Self> {
        let parse_err = |reason: String| Error::Parse { line, reason };
        let fields: Vec<&str> = row.trim().split(',').collect();
        if fields.len() != 6 {
            return Err(parse_err(format!(
                "expected 6 fields, found {}",
                fields.len()
            )));
        }
        let method = fields[0].parse()?;
        let mut params = Map::new();
        for pair in fields[1].split(';').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| parse_err(format!("parameter `{pair}` lacks `=`")))?;
            let value = serde_json::from_str::<Value>(&v.replace(' ', ","))
                .unwrap_or_else(|_| Value::String(v.to_string()));
            params.insert(k.to_string(), value);
        }
        let float = |s: &str, what: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| parse_err(format!("{what}: `{s}` is not a number")))
        };
        let opt = |s: &str, what: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                float(s, what).map(Some)
            }
        };
        Ok(CertificateRecord {
            method,
            band: fields[2]
                .parse()
                .map_err(|_| parse_err(format!("band: `{}` is not an integer", fields[2])))?,
            bound: float(fields[3], "bound")?,
            measured_lower: opt(fields[4], "measured_lower")?,
            measured_upper: opt(fields[5], "measured_upper")?,
            params,
            seed: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_band_is_at_least_actual() {
        let target = SparseOperator::constant(3, 3, 1.0);
        let cert =
            ApproximationCertificate::new(Method::TreeTruncation, target.clone(), target, 1, 0.0);
        assert_eq!(cert.band, 3);
        let cert = cert.with_measurement(0).unwrap();
        assert!(cert.is_consistent(1e-12));
        let rec = cert.record();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"method\":\"tree-truncation\""));
        let back: CertificateRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn csv_row_shape() {
        let cert = ApproximationCertificate::new(
            Method::EdgeAddition,
            SparseOperator::identity(2),
            SparseOperator::identity(2),
            1,
            0.5,
        )
        .with_param("eps", 0.5)
        .with_param("note", "a,b");
        let row = cert.record().csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("edge-addition,eps=0.5;note=a b,1,"));
        let back = CertificateRecord::from_csv_row(&row, 1).unwrap();
        assert_eq!(back.method, Method::EdgeAddition);
        assert_eq!(back.params["eps"], 0.5);
        assert_eq!(back.bound, 0.5);
        assert_eq!(back.measured_lower, None);
    }

    #[test]
    fn csv_list_params_round_trip() {
        let cert = ApproximationCertificate::new(
            Method::TreeTruncation,
            SparseOperator::identity(2),
            SparseOperator::identity(2),
            1,
            0.0,
        )
        .with_param("kappa", vec![2, 100, 2])
        .with_measurement(0)
        .unwrap();
        let rec = cert.record();
        let back = CertificateRecord::from_csv_row(&rec.csv_row(), 1).unwrap();
        assert_eq!(back.params, rec.params);
        assert_eq!(back.measured_lower, rec.measured_lower);
        assert!(CertificateRecord::from_csv_row("bogus,,1,0,,", 3).is_err());
    }
}
