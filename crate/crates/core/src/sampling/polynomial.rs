use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distribution::CoefficientDistribution;
use crate::orthonorm::BasisScale;

/// Per-trial generator: ChaCha8 keyed by the campaign seed (expanded with
/// `seed_from_u64`), on stream number `trial`. Streams never overlap, so a
/// trial's coefficients do not depend on which other trials ran or in what
/// order.
pub fn trial_rng(campaign: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(campaign);
    rng.set_stream(trial);
    rng
}

/// One draw of `Σ a_j c_j z^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPolynomial {
    n: usize,
    signs: Vec<i8>,
    log_abs: Vec<f64>,
    normalized: Vec<f64>,
    seed_path: (u64, u64),
}

impl SampledPolynomial {
    /// Build from raw coefficients (lowest degree first). Used for
    /// constructed inputs; the seed path is `(0, 0)`.
    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        let signs = coeffs
            .iter()
            .map(|&c| if c > 0.0 { 1 } else if c < 0.0 { -1 } else { 0 })
            .collect();
        let log_abs = coeffs.iter().map(|c| c.abs().ln()).collect();
        Self::assemble(signs, log_abs, (0, 0))
    }

    fn assemble(signs: Vec<i8>, log_abs: Vec<f64>, seed_path: (u64, u64)) -> Self {
        let top = log_abs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let normalized = signs
            .iter()
            .zip(&log_abs)
            .map(|(&s, &l)| if s == 0 || !top.is_finite() { 0.0 } else { s as f64 * (l - top).exp() })
            .collect();
        Self {
            n: signs.len().saturating_sub(1),
            signs,
            log_abs,
            normalized,
            seed_path,
        }
    }

    /// Nominal degree (the basis degree; the top coefficient may vanish).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn log_abs(&self) -> &[f64] {
        &self.log_abs
    }

    /// Coefficients divided by the largest magnitude, lowest degree first.
    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    pub fn seed_path(&self) -> (u64, u64) {
        self.seed_path
    }

    /// Index of the largest normalized coefficient.
    pub fn top_index(&self) -> usize {
        self.normalized
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, &v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) })
            .0
    }
}

pub fn sample_polynomial(bs: &BasisScale, dist: &CoefficientDistribution, seed: (u64, u64)) -> SampledPolynomial {
    let mut rng = trial_rng(seed.0, seed.1);
    let mut signs = Vec::with_capacity(bs.n() + 1);
    let mut log_abs = Vec::with_capacity(bs.n() + 1);
    for &lc in bs.log_c() {
        let a = dist.sample(&mut rng);
        signs.push(if a > 0.0 { 1 } else if a < 0.0 { -1 } else { 0 });
        log_abs.push(a.abs().ln() + lc);
    }
    SampledPolynomial::assemble(signs, log_abs, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthonorm::basis_scale;
    use crate::weights::make_weyl;
    use rand::RngCore;

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<u64> = (0..5).map(|t| trial_rng(9, t).next_u64()).collect();
        let b: Vec<u64> = (0..5).rev().map(|t| trial_rng(9, t).next_u64()).collect();
        assert!(a.iter().eq(b.iter().rev()));
        assert_ne!(a[0], a[1]);
        assert_ne!(trial_rng(9, 0).next_u64(), trial_rng(10, 0).next_u64());
    }

    #[test]
    fn rademacher_log_magnitudes_are_log_c() {
        let bs = basis_scale(&make_weyl(), 40).unwrap();
        let p = sample_polynomial(&bs, &CoefficientDistribution::rademacher(), (1, 2));
        assert_eq!(p.log_abs(), bs.log_c());
        assert!(p.signs().iter().all(|s| s.abs() == 1));
        let max = p.normalized().iter().map(|c| c.abs()).fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        assert_eq!(p, sample_polynomial(&bs, &CoefficientDistribution::rademacher(), (1, 2)));
    }

    #[test]
    fn top_coefficient_tracks_the_basis_peak() {
        let n = 200;
        let bs = basis_scale(&make_weyl(), n).unwrap();
        let peak = bs
            .log_c()
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
            .0;
        let band = 3.0 * (n as f64).sqrt();
        let g = CoefficientDistribution::gaussian();
        let inside = (0..1000)
            .filter(|&t| {
                let p = sample_polynomial(&bs, &g, (5, t));
                (p.top_index() as f64 - peak as f64).abs() <= band
            })
            .count();
        assert!(inside >= 990, "{inside}/1000");
    }
}
