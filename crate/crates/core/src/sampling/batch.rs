use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aberth::{conjugate_mismatch, solve};
use super::certify::{count_with_roots, CountMethod};
use super::distribution::CoefficientDistribution;
use super::polynomial::sample_polynomial;
use crate::equilibrium::Interval;
use crate::error::{Error, Result};
use crate::orthonorm::BasisScale;

/// Conjugate pairs must match to this relative distance.
pub const PAIRING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionStat {
    pub lo: f64,
    pub hi: f64,
    pub mean_fraction: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatchReport {
    pub n: usize,
    pub dist: String,
    pub trials: u64,
    pub seed: u64,
    /// One entry per successful trial, in trial order.
    pub real_root_counts: Vec<usize>,
    pub mean_real_roots: f64,
    pub stderr: f64,
    /// `counts_histogram[k]` is the number of trials with `k` real roots.
    pub counts_histogram: Vec<u64>,
    pub regions: Vec<RegionStat>,
    /// Trial indices whose root finding failed; excluded from the statistics.
    pub failures: Vec<u64>,
    pub failure_messages: Vec<TrialFailure>,
    /// Trials whose count came from the Sturm chain rather than inclusion disks.
    pub sturm_fallbacks: u64,
    /// Trials that needed the double-double retry.
    pub extended_precision: u64,
    /// Worst conjugate-pairing mismatch over all trials.
    pub max_pairing_mismatch: f64,
}

struct Outcome {
    count: usize,
    fractions: Vec<f64>,
    sturm: bool,
    extended: bool,
    mismatch: f64,
}

fn run_trial(bs: &BasisScale, dist: &CoefficientDistribution, regions: &[Interval], seed: (u64, u64)) -> Result<Outcome> {
    let p = sample_polynomial(bs, dist, seed);
    let roots = solve(p.normalized())?;
    let (count, how) = count_with_roots(p.normalized(), &roots.roots)?;
    let n = p.n().max(1) as f64;
    let fractions = regions
        .iter()
        .map(|r| roots.roots.iter().filter(|z| r.contains(z.norm())).count() as f64 / n)
        .collect();
    let mismatch = conjugate_mismatch(&roots.roots, 1e-9);
    if mismatch > PAIRING_TOL {
        return Err(Error::RootFinding {
            iterations: 0,
            worst: mismatch,
        });
    }
    Ok(Outcome {
        count,
        fractions,
        sturm: how == CountMethod::Sturm,
        extended: roots.extended,
        mismatch,
    })
}

/// Mean and standard error (sample deviation over `√m`; zero for one value).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

/// Draw `trials` polynomials on streams `(campaign_seed, 0..trials)`, count
/// real roots and the share of complex roots in each annulus `lo ≤ |z| ≤ hi`.
/// Results do not depend on the number of worker threads.
pub fn run_batch(
    bs: &BasisScale,
    dist: &CoefficientDistribution,
    trials: u64,
    regions: &[Interval],
    campaign_seed: u64,
) -> Result<TrialBatchReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if let Some(r) = regions.iter().find(|r| !(r.lo >= 0.0 && r.hi >= r.lo)) {
        return Err(Error::InvalidArgument(format!("region [{}, {}] is not an annulus", r.lo, r.hi)));
    }
    let outcomes: Vec<Result<Outcome>> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(bs, dist, regions, (campaign_seed, t)))
        .collect();

    let mut counts = Vec::new();
    let mut fractions: Vec<Vec<f64>> = vec![Vec::new(); regions.len()];
    let mut failures = Vec::new();
    let mut failure_messages = Vec::new();
    let (mut sturm, mut extended, mut mismatch) = (0, 0, 0.0f64);
    for (t, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(o) => {
                counts.push(o.count);
                for (acc, f) in fractions.iter_mut().zip(o.fractions) {
                    acc.push(f);
                }
                sturm += u64::from(o.sturm);
                extended += u64::from(o.extended);
                mismatch = mismatch.max(o.mismatch);
            }
            Err(e) => {
                failures.push(t as u64);
                failure_messages.push(TrialFailure {
                    trial: t as u64,
                    message: e.to_string(),
                });
            }
        }
    }
    let as_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (mean, stderr) = mean_stderr(&as_f);
    let mut hist = vec![0u64; counts.iter().max().map_or(0, |m| m + 1)];
    for &c in &counts {
        hist[c] += 1;
    }
    let regions = regions
        .iter()
        .zip(&fractions)
        .map(|(r, f)| {
            let (mean_fraction, stderr) = mean_stderr(f);
            RegionStat {
                lo: r.lo,
                hi: r.hi,
                mean_fraction,
                stderr,
            }
        })
        .collect();
    Ok(TrialBatchReport {
        n: bs.n(),
        dist: dist.name(),
        trials,
        seed: campaign_seed,
        real_root_counts: counts,
        mean_real_roots: mean,
        stderr,
        counts_histogram: hist,
        regions,
        failures,
        failure_messages,
        sturm_fallbacks: sturm,
        extended_precision: extended,
        max_pairing_mismatch: mismatch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityComparison {
    pub n: usize,
    pub dists: (String, String),
    pub seeds: (u64, u64),
    pub trials: u64,
    pub means: (f64, f64),
    pub stderrs: (f64, f64),
    pub difference: f64,
    pub combined_stderr: f64,
    pub z_score: f64,
    pub failures: (usize, usize),
}

/// Mean real-root counts under two coefficient laws. The second batch uses
/// campaign seed `seed + 1` so equal laws still get independent draws.
pub fn universality_compare(
    bs: &BasisScale,
    dists: (&CoefficientDistribution, &CoefficientDistribution),
    trials: u64,
    seed: u64,
) -> Result<UniversalityComparison> {
    let seeds = (seed, seed.wrapping_add(1));
    let a = run_batch(bs, dists.0, trials, &[], seeds.0)?;
    let b = run_batch(bs, dists.1, trials, &[], seeds.1)?;
    let difference = a.mean_real_roots - b.mean_real_roots;
    let combined = a.stderr.hypot(b.stderr);
    let z_score = if combined > 0.0 {
        difference / combined
    } else if difference == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(difference)
    };
    Ok(UniversalityComparison {
        n: bs.n(),
        dists: (a.dist, b.dist),
        seeds,
        trials,
        means: (a.mean_real_roots, b.mean_real_roots),
        stderrs: (a.stderr, b.stderr),
        difference,
        combined_stderr: combined,
        z_score,
        failures: (a.failures.len(), b.failures.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthonorm::basis_scale;
    use crate::sampling::{count_real_roots, eigenvalue_real_count, trial_rng};
    use crate::weights::{make_weyl, parse_weight_spec};
    use proptest::prelude::*;

    fn circ() -> crate::weights::RadialWeight {
        parse_weight_spec("circular:alpha=1,beta=2").unwrap()
    }

    #[test]
    fn degree_one_always_has_one_root() {
        let bs = basis_scale(&make_weyl(), 1).unwrap();
        let r = run_batch(&bs, &CoefficientDistribution::uniform_sym(), 50, &[], 4).unwrap();
        assert!(r.real_root_counts.iter().all(|&c| c == 1));
        assert_eq!((r.mean_real_roots, r.stderr), (1.0, 0.0));
        assert_eq!(r.counts_histogram, vec![0, 50]);
    }

    #[test]
    fn odd_degree_parity_and_range() {
        let bs = basis_scale(&circ(), 41).unwrap();
        let r = run_batch(&bs, &CoefficientDistribution::rademacher(), 60, &[], 8).unwrap();
        assert!(r.failures.is_empty());
        assert!(r.real_root_counts.iter().all(|&c| c % 2 == 1 && c <= 41));
        assert!(r.max_pairing_mismatch <= PAIRING_TOL);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let bs = basis_scale(&make_weyl(), 60).unwrap();
        let g = CoefficientDistribution::gaussian();
        let regions = [Interval { lo: 0.5, hi: 0.9 }];
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_batch(&bs, &g, 40, &regions, 99).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&run(2)).unwrap());
    }

    #[test]
    fn bulk_occupancy_on_the_annulus() {
        // limit mass of r ≤ |z| ≤ s is 2(s² − r²) on [1/√2, 1]; the edges
        // blur over O(n^-1/2)
        let bs = basis_scale(&circ(), 120).unwrap();
        let padded = Interval {
            lo: 0.5f64.sqrt() - 0.1,
            hi: 1.1,
        };
        let inner = Interval { lo: 0.8, hi: 0.9 };
        let r = run_batch(&bs, &CoefficientDistribution::gaussian(), 30, &[padded, inner], 12).unwrap();
        assert!(r.regions[0].mean_fraction >= 0.9, "{:?}", r.regions[0]);
        assert!((r.regions[1].mean_fraction - 0.34).abs() < 0.03, "{:?}", r.regions[1]);
    }

    #[test]
    fn sturm_matches_eigenvalue_oracle() {
        let bs = basis_scale(&make_weyl(), 30).unwrap();
        let g = CoefficientDistribution::gaussian();
        let agree = (0..100)
            .filter(|&t| {
                let p = sample_polynomial(&bs, &g, (2024, t));
                count_real_roots(&p).unwrap() == eigenvalue_real_count(p.normalized()).unwrap()
            })
            .count();
        assert!(agree >= 99, "{agree}/100");
    }

    #[test]
    fn same_law_comparison_is_unremarkable() {
        let bs = basis_scale(&make_weyl(), 40).unwrap();
        let g = CoefficientDistribution::gaussian();
        let c = universality_compare(&bs, (&g, &g), 300, 5).unwrap();
        assert!(c.z_score.abs() < 4.0, "{c:?}");
        assert_ne!(c.means.0, c.means.1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scaling_changes_no_count(seed in 0u64..1000, n in 3usize..40) {
            use rand_distr::{Distribution, StandardNormal};
            let mut rng = trial_rng(seed, 0);
            let raw: Vec<f64> = (0..=n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let a = crate::sampling::SampledPolynomial::from_coeffs(&raw).normalized().to_vec();
            let scaled: Vec<f64> = a.iter().map(|c| 7.0 * c).collect();
            let c = count_real_roots_exact(&a);
            prop_assert_eq!(c, count_real_roots_exact(&scaled));
            let z = solve(&a).unwrap().roots;
            let zs = solve(&scaled).unwrap().roots;
            prop_assert_eq!(count_with_roots(&a, &z).unwrap().0, c);
            prop_assert_eq!(count_with_roots(&scaled, &zs).unwrap().0, c);
            for r in &z {
                let near = zs.iter().map(|w| (w - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(near < 1e-9 * (1.0 + r.norm()), "{} moved by {:e}", r, near);
            }
        }
    }

    fn count_real_roots_exact(a: &[f64]) -> usize {
        crate::sampling::count_real_roots_coeffs(a).unwrap()
    }
}
