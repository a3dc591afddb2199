//! Normalising constants `c_j^n` of the monomials `z^j` in `L²(e^{−2nφ})`.
//!
//! Everything is kept in the log domain: `(c_j^n)^{−2}` spans thousands of
//! orders of magnitude already for moderate `n`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumResult;
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::weights::RadialWeight;

/// Log normalising constants for one degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisScale {
    n: usize,
    log_c: Vec<f64>,
    weight_name: String,
    /// Laplace modes `s*_j = log r*_j` of the norm integrands, empty when the
    /// scale was built from given constants.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    modes: Vec<f64>,
}

impl BasisScale {
    /// Wraps externally supplied constants (`n + 1` finite values).
    pub fn from_log_c(weight_name: impl Into<String>, log_c: Vec<f64>) -> Result<Self> {
        if log_c.is_empty() {
            return Err(Error::InvalidArgument("basis needs at least one constant".into()));
        }
        if let Some(j) = log_c.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("log c_{j} is not finite")));
        }
        Ok(Self {
            n: log_c.len() - 1,
            log_c,
            weight_name: weight_name.into(),
            modes: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_c(&self) -> &[f64] {
        &self.log_c
    }

    pub fn weight_name(&self) -> &str {
        &self.weight_name
    }

    pub fn modes(&self) -> &[f64] {
        &self.modes
    }
}

/// Knobs of the norm quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormQuadrature {
    /// Relative tolerance of the adaptive rule.
    pub rel: f64,
    /// Number of equal panels the window starts with.
    pub pieces: usize,
    /// The window is grown until the integrand has dropped by this many
    /// natural-log units at both ends.
    pub tail_drop: f64,
}

impl Default for NormQuadrature {
    fn default() -> Self {
        Self {
            rel: 1e-13,
            pieces: 8,
            tail_drop: 45.0,
        }
    }
}

/// Log-integrand `(2j+2)s − 2nΦ(s)` of the norm integral in `s = log r`.
fn log_integrand(w: &RadialWeight, n: usize, j: usize, s: f64) -> f64 {
    let v = (2 * j + 2) as f64 * s - 2.0 * n as f64 * w.log_profile(s);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Mode of the norm integrand: the root of `r·φ'(r) = (j+1)/n`.
fn find_mode(w: &RadialWeight, n: usize, j: usize, guess: f64) -> Result<f64> {
    let target = (j + 1) as f64 / n as f64;
    let g = |s: f64| w.radial_slope(s.exp()) - target;
    let (mut lo, mut hi) = (guess - 0.5, guess + 0.5);
    let limit = 60.0;
    let err = |lo: f64, hi: f64| Error::ModeNotFound { n, j, s_lo: lo, s_hi: hi };
    let mut step = 0.5;
    while !(g(lo) < 0.0) {
        step *= 2.0;
        lo -= step;
        if lo < -limit {
            return Err(err(lo, hi));
        }
    }
    step = 0.5;
    while !(g(hi) > 0.0) {
        step *= 2.0;
        hi += step;
        if hi > limit {
            return Err(err(lo, hi));
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            return Ok(mid);
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `log c_j^n = −½·log(2π ∫_0^∞ r^{2j+1} e^{−2nφ(r)} dr)`.
pub fn log_norm_constant(w: &RadialWeight, n: usize, j: usize) -> Result<f64> {
    log_norm_constant_with(w, n, j, 0.0, NormQuadrature::default()).map(|(v, _)| v)
}

/// Like [`log_norm_constant`], with a starting guess for the mode (in
/// `s = log r`) and explicit quadrature settings. Returns the constant and
/// the mode.
pub fn log_norm_constant_with(
    w: &RadialWeight,
    n: usize,
    j: usize,
    mode_guess: f64,
    quad: NormQuadrature,
) -> Result<(f64, f64)> {
    if j > n {
        return Err(Error::InvalidArgument(format!("index {j} exceeds degree {n}")));
    }
    if n == 0 {
        // e^{−2nφ} ≡ 1: the integral of r dr diverges
        return Err(Error::NonIntegrable { n, j });
    }
    let mode = find_mode(w, n, j, mode_guess)?;
    let h = |s: f64| log_integrand(w, n, j, s);
    let peak = h(mode);
    if !peak.is_finite() {
        return Err(Error::NonIntegrable { n, j });
    }
    // Laplace width from h''(s) = −2n·r²·Δφ(r)
    let r = mode.exp();
    let curvature = 2.0 * n as f64 * r * r * w.laplacian(r);
    let sigma = if curvature > 0.0 && curvature.is_finite() {
        (1.0 / curvature).sqrt()
    } else {
        1.0
    };
    let reach = |dir: f64| -> Result<f64> {
        let mut d = 8.0 * sigma;
        loop {
            let v = h(mode + dir * d);
            if v < peak - quad.tail_drop {
                return Ok(mode + dir * d);
            }
            d *= 1.5;
            if d > 200.0 {
                return Err(Error::NonIntegrable { n, j });
            }
        }
    };
    let (a, b) = (reach(-1.0)?, reach(1.0)?);
    // the mode need not be the global max when Φ is not convex
    let samples = 256;
    let top = (0..=samples)
        .map(|i| h(a + (b - a) * i as f64 / samples as f64))
        .fold(peak, f64::max);
    let integral = quadrature::integrate_split(
        |s| (h(s) - top).exp(),
        a,
        b,
        quad.pieces,
        Tolerance::relative(quad.rel),
    )?;
    if !(integral.value > 0.0) {
        return Err(Error::NonIntegrable { n, j });
    }
    Ok((-0.5 * ((2.0 * PI).ln() + top + integral.value.ln()), mode))
}

/// Indices per warm-started block in [`basis_scale`].
const BLOCK: usize = 32;

/// All constants `log c_j^n`, `0 ≤ j ≤ n`.
///
/// Blocks of consecutive indices run in parallel; inside a block each mode
/// search starts from the previous mode. The block layout is fixed, so the
/// output does not depend on scheduling.
pub fn basis_scale(w: &RadialWeight, n: usize) -> Result<BasisScale> {
    basis_scale_with(w, n, NormQuadrature::default())
}

pub fn basis_scale_with(w: &RadialWeight, n: usize, quad: NormQuadrature) -> Result<BasisScale> {
    let blocks: Vec<Result<Vec<(f64, f64)>>> = (0..=n)
        .step_by(BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let end = (start + BLOCK).min(n + 1);
            let mut guess = 0.0;
            let mut out = Vec::with_capacity(end - start);
            for j in start..end {
                let (v, mode) = log_norm_constant_with(w, n, j, guess, quad)
                    .map_err(|e| Error::BasisIndex { j, source: Box::new(e) })?;
                guess = mode;
                out.push((v, mode));
            }
            Ok(out)
        })
        .collect();
    let mut log_c = Vec::with_capacity(n + 1);
    let mut modes = Vec::with_capacity(n + 1);
    for block in blocks {
        for (v, m) in block? {
            log_c.push(v);
            modes.push(m);
        }
    }
    debug_assert!(
        modes.windows(2).all(|m| m[1] >= m[0] - 1e-12),
        "norm integrand modes must not decrease in j"
    );
    Ok(BasisScale {
        n,
        log_c,
        weight_name: w.name().to_string(),
        modes,
    })
}

/// `(n, (1/n)·log c_n^n)` for each degree; tends to the Robin constant.
pub fn coef_limit_check(w: &RadialWeight, degrees: &[usize]) -> Result<Vec<(usize, f64)>> {
    degrees
        .iter()
        .map(|&n| Ok((n, log_norm_constant(w, n, n)? / n as f64)))
        .collect()
}

/// Fraction of indices whose scaled monomial beats `e^{n(U(z) − 3ε)}` at
/// `|z| = z_abs`.
pub fn envelope_fraction(eq: &EquilibriumResult, bs: &BasisScale, z_abs: f64, eps: f64) -> Result<f64> {
    if !(z_abs > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "envelope fraction needs z_abs > 0 and eps > 0, got {z_abs}, {eps}"
        )));
    }
    let n = bs.n() as f64;
    let threshold = n * (eq.potential(z_abs) - 3.0 * eps);
    let lz = z_abs.ln();
    let hits = bs
        .log_c()
        .iter()
        .enumerate()
        .filter(|(j, lc)| *lc + *j as f64 * lz > threshold)
        .count();
    Ok(hits as f64 / (bs.n() + 1) as f64)
}

/// `(1/n)·max_j (log c_j + j·log r)`, which tends to the equilibrium potential.
pub fn scaled_max_term(bs: &BasisScale, r: f64) -> f64 {
    let lr = r.ln();
    let best = bs
        .log_c()
        .iter()
        .enumerate()
        .map(|(j, lc)| lc + j as f64 * lr)
        .fold(f64::NEG_INFINITY, f64::max);
    best / bs.n().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium;
    use crate::weights::{make_circular, make_weyl, CircularWeightParams};
    use statrs::function::gamma::ln_gamma;

    fn circ(alpha: f64, beta: f64) -> RadialWeight {
        make_circular(CircularWeightParams::new(alpha, beta).unwrap()).unwrap()
    }

    fn weyl_closed(n: usize, j: usize) -> f64 {
        let ln_fact: f64 = (2..=j).map(|k| (k as f64).ln()).sum();
        0.5 * ((j + 1) as f64 * (n as f64).ln() - PI.ln() - ln_fact)
    }

    /// Gamma-integral oracle `(c)^{−2} = (2π/β)·Γ(p)/(2n)^p`, `p = (2j+2nα+2)/β`.
    fn circular_closed(alpha: f64, beta: f64, n: usize, j: usize) -> f64 {
        let p = (2.0 * j as f64 + 2.0 * n as f64 * alpha + 2.0) / beta;
        let log_inv_sq = (2.0 * PI / beta).ln() + ln_gamma(p) - p * (2.0 * n as f64).ln();
        -0.5 * log_inv_sq
    }

    #[test]
    fn worked_values() {
        let w = make_weyl();
        let v = log_norm_constant(&w, 4, 2).unwrap();
        assert!((v - 0.5 * (64.0 / (2.0 * PI)).ln()).abs() < 1e-12);
        let v = log_norm_constant(&w, 1, 0).unwrap();
        assert!((v + 0.5 * PI.ln()).abs() < 1e-12);
        let v = log_norm_constant(&circ(1.0, 2.0), 3, 1).unwrap();
        assert!((v + 0.5 * (24.0 * PI / 7776.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn weyl_matches_closed_form() {
        for n in [10, 100, 1000] {
            let bs = basis_scale(&make_weyl(), n).unwrap();
            assert_eq!(bs.log_c().len(), n + 1);
            for (j, lc) in bs.log_c().iter().enumerate() {
                // relative error of c² ≈ |Δ log c²|
                let d = 2.0 * (lc - weyl_closed(n, j)).abs();
                assert!(d < 1e-10, "n={n} j={j}: {d:e}");
            }
        }
    }

    #[test]
    fn circular_matches_gamma_oracle() {
        for (a, b, n) in [(0.0, 2.0, 10), (1.0, 2.0, 50), (0.5, 3.0, 40), (0.0, 4.0, 200), (1.0, 2.0, 1000)] {
            let bs = basis_scale(&circ(a, b), n).unwrap();
            for (j, lc) in bs.log_c().iter().enumerate() {
                let d = 2.0 * (lc - circular_closed(a, b, n, j)).abs();
                assert!(d < 1e-10, "α={a} β={b} n={n} j={j}: {d:e}");
            }
        }
    }

    #[test]
    fn degree_zero_is_not_integrable() {
        for w in [make_weyl(), circ(1.0, 2.0)] {
            let single = log_norm_constant(&w, 0, 0).unwrap_err();
            let all = basis_scale(&w, 0).unwrap_err();
            assert_eq!(single, Error::NonIntegrable { n: 0, j: 0 });
            assert_eq!(all, Error::BasisIndex { j: 0, source: Box::new(single) });
        }
    }

    #[test]
    fn slow_growth_is_reported() {
        // e^{−2n·½log r} = r^{−n}: the index n integrand r^{n+1} is not integrable
        let w = RadialWeight::custom(
            "half log",
            |r: f64| 0.5 * (1.0 + r * r).ln(),
            |r: f64| r / (1.0 + r * r),
            |r: f64| 2.0 / ((1.0 + r * r) * (1.0 + r * r)),
            0.1,
            10.0,
        )
        .unwrap();
        assert!(log_norm_constant(&w, 4, 1).is_ok());
        let err = log_norm_constant(&w, 4, 4).unwrap_err();
        assert!(matches!(err, Error::ModeNotFound { .. } | Error::NonIntegrable { .. }), "{err:?}");
        assert!(matches!(basis_scale(&w, 4).unwrap_err(), Error::BasisIndex { j: 3 | 4, .. }));
    }

    #[test]
    fn modes_are_monotone_and_alpha_bases_avoid_zero() {
        let bs = basis_scale(&circ(1.0, 2.0), 300).unwrap();
        assert!(bs.modes().windows(2).all(|m| m[1] >= m[0]));
        // the j = 0 mode sits at r² = (1 + 1/n)/2
        assert!((bs.modes()[0] - 0.5 * ((1.0 + 1.0 / 300.0) / 2.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn doubling_panels_is_stable() {
        let w = make_weyl();
        let finer = NormQuadrature {
            pieces: 16,
            ..NormQuadrature::default()
        };
        for n in [1, 7, 40, 100] {
            let a = basis_scale(&w, n).unwrap();
            let b = basis_scale_with(&w, n, finer).unwrap();
            for (x, y) in a.log_c().iter().zip(b.log_c()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_entry_matches_scale() {
        let w = circ(1.0, 2.0);
        let bs = basis_scale(&w, 57).unwrap();
        for j in [0, 13, 32, 57] {
            assert!((bs.log_c()[j] - log_norm_constant(&w, 57, j).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn coefficient_limit() {
        let w = make_weyl();
        let seq = coef_limit_check(&w, &[250, 500, 1000]).unwrap();
        let gaps: Vec<f64> = seq.iter().map(|(_, v)| (v - 0.5).abs()).collect();
        assert!(gaps[2] < 0.02);
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);

        let c = circ(1.0, 2.0);
        let eq = equilibrium::solve(&c).unwrap();
        let seq = coef_limit_check(&c, &[1000]).unwrap();
        assert!((seq[0].1 - eq.robin_constant()).abs() < 0.02);
    }

    #[test]
    fn envelope_fractions() {
        let w = circ(1.0, 2.0);
        let eq = equilibrium::solve(&w).unwrap();
        let f100 = envelope_fraction(&eq, &basis_scale(&w, 100).unwrap(), 0.85, 0.05).unwrap();
        let bs400 = basis_scale(&w, 400).unwrap();
        let f400 = envelope_fraction(&eq, &bs400, 0.85, 0.05).unwrap();
        assert!(f400 > 0.0 && f400 >= 0.5 * f100, "{f100} {f400}");
        assert_eq!(envelope_fraction(&eq, &bs400, 0.85, 10.0).unwrap(), 1.0);
        for r in [0.3, 0.8, 0.95, 1.5] {
            assert!(envelope_fraction(&eq, &bs400, r, 1e-3).unwrap() > 0.0, "r={r}");
        }
        assert!(envelope_fraction(&eq, &bs400, 0.0, 0.1).is_err());
    }

    #[test]
    fn max_term_tends_to_potential() {
        let w = circ(1.0, 2.0);
        let eq = equilibrium::solve(&w).unwrap();
        let bs = basis_scale(&w, 800).unwrap();
        for r in [0.8, 0.9] {
            assert!((scaled_max_term(&bs, r) - eq.potential(r)).abs() <= 0.01);
        }
    }

    #[test]
    fn from_log_c_validates() {
        assert!(BasisScale::from_log_c("x", vec![]).is_err());
        assert!(BasisScale::from_log_c("x", vec![0.0, f64::NAN]).is_err());
        let bs = BasisScale::from_log_c("x", vec![0.0, 1.0]).unwrap();
        assert_eq!(bs.n(), 1);
    }
}
