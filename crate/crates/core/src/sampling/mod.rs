//! Monte Carlo draws of the random polynomial, exact real-root counts and
//! complex root statistics.

mod aberth;
mod batch;
mod certify;
mod distribution;
mod oracle;
mod polynomial;
mod sturm;

pub use aberth::{all_complex_roots, all_complex_roots_coeffs, conjugate_mismatch, solve, RootSet};
pub use batch::{mean_stderr, run_batch, universality_compare, RegionStat, TrialBatchReport, TrialFailure, UniversalityComparison, PAIRING_TOL};
pub use certify::{certified_count, count_with_roots, inclusion_radii, CountMethod};
pub use distribution::{CoefficientDistribution, DistributionKind};
pub use oracle::{companion_eigenvalues, eigenvalue_real_count};
pub use polynomial::{sample_polynomial, trial_rng, SampledPolynomial};
pub use sturm::count_real_roots_coeffs;

use crate::error::Result;

/// Exact number of distinct real roots, by a Sturm chain on the normalized
/// coefficients.
pub fn count_real_roots(p: &SampledPolynomial) -> Result<usize> {
    count_real_roots_coeffs(p.normalized())
}
