use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Law of the i.i.d. coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionKind {
    Gaussian,
    /// ±1 with probability ½ each.
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    UniformSym,
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

/// Mean-zero, variance-one coefficient law with a declared moment margin
/// `δ` such that `E|ζ|^{2+δ} < ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDistribution {
    kind: DistributionKind,
    moment_margin: f64,
}

impl CoefficientDistribution {
    pub fn gaussian() -> Self {
        Self::builtin(DistributionKind::Gaussian)
    }

    pub fn rademacher() -> Self {
        Self::builtin(DistributionKind::Rademacher)
    }

    pub fn uniform_sym() -> Self {
        Self::builtin(DistributionKind::UniformSym)
    }

    fn builtin(kind: DistributionKind) -> Self {
        Self { kind, moment_margin: 1.0 }
    }

    /// Finite law; mean 0 and variance 1 are checked to 1e-12.
    pub fn discrete(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        if values.len() != probs.len() || values.is_empty() {
            return bad("values and probabilities must be non-empty and of equal length".into());
        }
        if values.iter().chain(&probs).any(|v| !v.is_finite()) || probs.iter().any(|&p| p < 0.0) {
            return bad("values must be finite and probabilities nonnegative".into());
        }
        let total: f64 = probs.iter().sum();
        let mean: f64 = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
        let second: f64 = values.iter().zip(&probs).map(|(v, p)| v * v * p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("probabilities sum to {total}, not 1"));
        }
        if mean.abs() > 1e-12 {
            return bad(format!("mean is {mean}, not 0"));
        }
        if (second - mean * mean - 1.0).abs() > 1e-12 {
            return bad(format!("variance is {}, not 1", second - mean * mean));
        }
        Ok(Self::builtin(DistributionKind::Discrete { values, probs }))
    }

    pub fn with_moment_margin(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidDistribution(format!("moment margin must be positive, got {delta}")));
        }
        self.moment_margin = delta;
        Ok(self)
    }

    /// `gaussian`, `rademacher`, `uniform` (or `uniform_sym`), or
    /// `discrete:v1@p1,v2@p2,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => return Ok(Self::gaussian()),
            "rademacher" | "bernoulli" => return Ok(Self::rademacher()),
            "uniform" | "uniform_sym" => return Ok(Self::uniform_sym()),
            _ => {}
        }
        let body = s
            .strip_prefix("discrete:")
            .ok_or_else(|| Error::InvalidDistribution(format!("unknown distribution '{spec}'")))?;
        let mut values = Vec::new();
        let mut probs = Vec::new();
        for atom in body.split(',') {
            let (v, p) = atom
                .split_once('@')
                .ok_or_else(|| Error::InvalidDistribution(format!("atom '{atom}' is not value@probability")))?;
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidDistribution(format!("'{t}' is not a number")))
            };
            values.push(num(v)?);
            probs.push(num(p)?);
        }
        Self::discrete(values, probs)
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn moment_margin(&self) -> f64 {
        self.moment_margin
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            DistributionKind::Gaussian => StandardNormal.sample(rng),
            DistributionKind::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            DistributionKind::UniformSym => rng.gen_range(-SQRT3..SQRT3),
            DistributionKind::Discrete { values, probs } => {
                let mut u: f64 = rng.gen();
                for (v, p) in values.iter().zip(probs) {
                    if u < *p {
                        return *v;
                    }
                    u -= p;
                }
                values[values.len() - 1]
            }
        }
    }
}

impl fmt::Display for CoefficientDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DistributionKind::Gaussian => write!(f, "gaussian"),
            DistributionKind::Rademacher => write!(f, "rademacher"),
            DistributionKind::UniformSym => write!(f, "uniform_sym"),
            DistributionKind::Discrete { values, probs } => {
                let atoms: Vec<String> = values.iter().zip(probs).map(|(v, p)| format!("{v}@{p}")).collect();
                write!(f, "discrete:{}", atoms.join(","))
            }
        }
    }
}
