//! Radial weight functions `φ(z) = φ(|z|)` with analytic first derivative and
//! two-dimensional Laplacian.
//!
//! Two families are built in: the Weyl weight `r²/2` and the circular family
//! `−α·log r + r^β` with `β > α ≥ 0`. Anything else is supplied as a triple of
//! closures through [`RadialWeight::custom`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Parameters of the circular family `φ(r) = −α·log r + r^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularWeightParams {
    pub alpha: f64,
    pub beta: f64,
}

impl CircularWeightParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "circular weight needs finite parameters, got alpha={}, beta={}",
                self.alpha, self.beta
            )));
        }
        if self.alpha < 0.0 || self.beta <= self.alpha {
            return Err(Error::InvalidWeight(format!(
                "circular weight requires beta > alpha ≥ 0, got alpha={}, beta={}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }

    /// Inner radius of the equilibrium annulus, `(α/β)^(1/β)`.
    pub fn inner_radius(&self) -> f64 {
        (self.alpha / self.beta).powf(1.0 / self.beta)
    }

    /// Outer radius of the equilibrium annulus, `((1+α)/β)^(1/β)`.
    pub fn outer_radius(&self) -> f64 {
        ((1.0 + self.alpha) / self.beta).powf(1.0 / self.beta)
    }
}

#[derive(Clone)]
pub struct CustomProfile {
    pub phi: RadialFn,
    pub dphi: RadialFn,
    pub laplacian: RadialFn,
}

#[derive(Clone)]
pub enum WeightKind {
    Weyl,
    Circular(CircularWeightParams),
    Custom(CustomProfile),
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Weyl => write!(f, "Weyl"),
            WeightKind::Circular(p) => write!(f, "Circular({p:?})"),
            WeightKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A radial weight together with its declared growth margin.
///
/// The growth metadata states that `φ(r) ≥ (1+ε)·log r` for all
/// `r ≥ growth_radius`; it is checked on a sample grid by [`check_growth`],
/// never assumed blindly by the built-in constructors.
#[derive(Clone, Debug)]
pub struct RadialWeight {
    name: String,
    kind: WeightKind,
    growth_margin: f64,
    growth_radius: f64,
}

impl RadialWeight {
    /// A user-supplied weight. `phi`, `dphi` and `laplacian` must be the
    /// weight, its radial derivative and `φ'' + φ'/r`.
    pub fn custom(
        name: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        laplacian: impl Fn(f64) -> f64 + Send + Sync + 'static,
        growth_margin: f64,
        growth_radius: f64,
    ) -> Result<Self> {
        if !(growth_margin > 0.0 && growth_radius > 0.0) {
            return Err(Error::InvalidWeight(format!(
                "growth margin and radius must be positive, got ε={growth_margin}, R_g={growth_radius}"
            )));
        }
        Ok(Self {
            name: name.into(),
            kind: WeightKind::Custom(CustomProfile {
                phi: Arc::new(phi),
                dphi: Arc::new(dphi),
                laplacian: Arc::new(laplacian),
            }),
            growth_margin,
            growth_radius,
        })
    }

    /// Replaces the declared growth metadata.
    pub fn with_growth(mut self, margin: f64, radius: f64) -> Result<Self> {
        if !(margin > 0.0 && radius > 0.0) {
            return Err(Error::InvalidWeight(format!(
                "growth margin and radius must be positive, got ε={margin}, R_g={radius}"
            )));
        }
        self.growth_margin = margin;
        self.growth_radius = radius;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn circular_params(&self) -> Option<CircularWeightParams> {
        match self.kind {
            WeightKind::Circular(p) => Some(p),
            _ => None,
        }
    }

    pub fn growth_margin(&self) -> f64 {
        self.growth_margin
    }

    pub fn growth_radius(&self) -> f64 {
        self.growth_radius
    }

    pub fn phi(&self, r: f64) -> f64 {
        match &self.kind {
            WeightKind::Weyl => 0.5 * r * r,
            WeightKind::Circular(p) => {
                if p.alpha == 0.0 {
                    r.powf(p.beta)
                } else {
                    -p.alpha * r.ln() + r.powf(p.beta)
                }
            }
            WeightKind::Custom(c) => (c.phi)(r),
        }
    }

    pub fn dphi(&self, r: f64) -> f64 {
        match &self.kind {
            WeightKind::Weyl => r,
            WeightKind::Circular(p) => -p.alpha / r + p.beta * r.powf(p.beta - 1.0),
            WeightKind::Custom(c) => (c.dphi)(r),
        }
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        match &self.kind {
            WeightKind::Weyl => 2.0,
            WeightKind::Circular(p) => p.beta * p.beta * r.powf(p.beta - 2.0),
            WeightKind::Custom(c) => (c.laplacian)(r),
        }
    }

    /// `r·φ'(r)`, the slope of `s ↦ φ(e^s)`. Evaluated without the `1/r`
    /// cancellation for the built-in families.
    pub fn radial_slope(&self, r: f64) -> f64 {
        match &self.kind {
            WeightKind::Weyl => r * r,
            WeightKind::Circular(p) => -p.alpha + p.beta * r.powf(p.beta),
            WeightKind::Custom(c) => r * (c.dphi)(r),
        }
    }

    /// `φ(e^s)`: the weight in logarithmic coordinates.
    pub fn log_profile(&self, s: f64) -> f64 {
        match &self.kind {
            WeightKind::Weyl => 0.5 * (2.0 * s).exp(),
            WeightKind::Circular(p) => -p.alpha * s + (p.beta * s).exp(),
            WeightKind::Custom(c) => (c.phi)(s.exp()),
        }
    }
}

/// The circular weight `φ(r) = −α·log r + r^β`.
///
/// The growth margin defaults to `ε = min(1, β/2)` and the growth radius to
/// the larger of 2 and the last crossing of `r^β = 2(1+ε)(1+α)·log r`.
pub fn make_circular(params: CircularWeightParams) -> Result<RadialWeight> {
    params.validate()?;
    let eps = (0.5 * params.beta).min(1.0);
    let k = 2.0 * (1.0 + eps) * (1.0 + params.alpha);
    let f = |r: f64| r.powf(params.beta) - k * r.ln();
    // f decreases up to r_m and increases afterwards
    let r_m = (k / params.beta).powf(1.0 / params.beta);
    let start = r_m.max(2.0);
    let radius = if f(start) >= 0.0 {
        2.0
    } else {
        let (mut lo, mut hi) = (start, 2.0 * start);
        while f(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.max(2.0)
    };
    let w = RadialWeight {
        name: format!("circular:alpha={},beta={}", params.alpha, params.beta),
        kind: WeightKind::Circular(params),
        growth_margin: eps,
        growth_radius: radius,
    };
    let report = check_growth(&w, 100.0 * radius, 256)?;
    if !report.holds {
        return Err(Error::InvalidWeight(format!(
            "{} violates its growth condition at r={} (margin {})",
            w.name, report.worst_radius, report.min_margin
        )));
    }
    Ok(w)
}

/// The Weyl weight `φ(r) = r²/2`, with `ε = 1` and growth radius 1.
pub fn make_weyl() -> RadialWeight {
    RadialWeight {
        name: "weyl".to_string(),
        kind: WeightKind::Weyl,
        growth_margin: 1.0,
        growth_radius: 1.0,
    }
}

/// Outcome of a sampled growth check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthReport {
    pub holds: bool,
    /// Smallest value of `φ(r) − (1+ε)·log r` over the sample grid.
    pub min_margin: f64,
    pub worst_radius: f64,
}

/// Samples `φ(r) − (1+ε)·log r` on a geometric grid over
/// `[growth_radius, r_max]`.
pub fn check_growth(w: &RadialWeight, r_max: f64, samples: usize) -> Result<GrowthReport> {
    let r_g = w.growth_radius();
    if !(r_max > r_g) || samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "growth check needs r_max > {r_g} and at least 2 samples, got r_max={r_max}, samples={samples}"
        )));
    }
    let ratio = (r_max / r_g).ln() / (samples - 1) as f64;
    let mut report = GrowthReport {
        holds: true,
        min_margin: f64::INFINITY,
        worst_radius: r_g,
    };
    for i in 0..samples {
        let r = if i + 1 == samples {
            r_max
        } else {
            r_g * (ratio * i as f64).exp()
        };
        let margin = w.phi(r) - (1.0 + w.growth_margin()) * r.ln();
        if margin < report.min_margin {
            report.min_margin = margin;
            report.worst_radius = r;
        }
    }
    report.holds = report.min_margin >= 0.0;
    Ok(report)
}

/// Parses `weyl` or `circular:alpha=<f>,beta=<f>` (case-insensitive).
pub fn parse_weight_spec(spec: &str) -> Result<RadialWeight> {
    let lower = spec.trim().to_ascii_lowercase();
    if lower == "weyl" {
        return Ok(make_weyl());
    }
    let Some(rest) = lower.strip_prefix("circular:") else {
        return Err(Error::InvalidWeight(format!(
            "unknown weight spec '{spec}' (expected 'weyl' or 'circular:alpha=<f>,beta=<f>')"
        )));
    };
    let mut alpha = None;
    let mut beta = None;
    for part in rest.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::InvalidWeight(format!("malformed field '{part}' in weight spec '{spec}'"))
        })?;
        let v: f64 = value.trim().parse().map_err(|_| {
            Error::InvalidWeight(format!("field '{}' is not a number in '{spec}'", key.trim()))
        })?;
        match key.trim() {
            "alpha" => alpha = Some(v),
            "beta" => beta = Some(v),
            other => {
                return Err(Error::InvalidWeight(format!(
                    "unknown field '{other}' in weight spec '{spec}'"
                )))
            }
        }
    }
    match (alpha, beta) {
        (Some(alpha), Some(beta)) => make_circular(CircularWeightParams { alpha, beta }),
        _ => Err(Error::InvalidWeight(format!(
            "circular weight spec '{spec}' needs both alpha and beta"
        ))),
    }
}
