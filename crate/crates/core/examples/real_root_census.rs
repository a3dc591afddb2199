//! Draw random polynomials, count real roots exactly, and compare with
//! the quadrature value.

use wrz::kacrice::expected_real_zeros;
use wrz::orthonorm::basis_scale;
use wrz::sampling::{count_real_roots, run_batch, sample_polynomial, CoefficientDistribution};
use wrz::weights::make_weyl;

fn main() -> wrz::Result<()> {
    let n = 100;
    let bs = basis_scale(&make_weyl(), n)?;
    let g = CoefficientDistribution::gaussian();

    let p = sample_polynomial(&bs, &g, (7, 0));
    println!("trial (7, 0): {} real roots by Sturm chain", count_real_roots(&p)?);

    let batch = run_batch(&bs, &g, 1000, &[], 7)?;
    let quad = expected_real_zeros(&bs, f64::NEG_INFINITY, f64::INFINITY)?.value;
    println!(
        "1000 trials: mean {:.3} +- {:.3}, quadrature {quad:.3}; Sturm fallbacks {}",
        batch.mean_real_roots, batch.stderr, batch.sturm_fallbacks
    );
    let hist: Vec<String> = batch.counts_histogram.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, c)| format!("{k}:{c}")).collect();
    println!("histogram {}", hist.join(" "));
    Ok(())
}
