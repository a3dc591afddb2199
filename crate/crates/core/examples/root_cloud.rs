//! All complex roots of one sample, and the share of roots per annulus
//! averaged over a batch.

use wrz::equilibrium::{solve, Interval};
use wrz::orthonorm::basis_scale;
use wrz::sampling::{all_complex_roots, run_batch, sample_polynomial, CoefficientDistribution};
use wrz::weights::parse_weight_spec;

fn main() -> wrz::Result<()> {
    let w = parse_weight_spec("circular:alpha=1,beta=2")?;
    let eq = solve(&w)?;
    let bs = basis_scale(&w, 200)?;
    let g = CoefficientDistribution::gaussian();

    let roots = all_complex_roots(&sample_polynomial(&bs, &g, (1, 0)))?;
    let (lo, hi) = roots.iter().map(|z| z.norm()).fold((f64::MAX, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
    println!("{} roots, |z| from {lo:.3} to {hi:.3}", roots.len());

    let regions = [
        Interval { lo: 0.0, hi: eq.r0() },
        Interval { lo: eq.r0(), hi: eq.outer_radius() },
        Interval { lo: 0.8, hi: 0.9 },
        Interval { lo: eq.outer_radius(), hi: 1e300 },
    ];
    let r = run_batch(&bs, &g, 200, &regions, 1)?;
    for s in &r.regions {
        println!("[{:.4}, {:.4e}]: {:.4} +- {:.4}", s.lo, s.hi, s.mean_fraction, s.stderr);
    }
    Ok(())
}
