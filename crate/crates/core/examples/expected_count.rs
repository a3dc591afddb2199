//! Expected number of real zeros from the Kac–Rice integral, whole line
//! and bulk only, against the large-n limit.

use wrz::equilibrium::solve;
use wrz::kacrice::{expected_real_zeros, limit_comparison_report};
use wrz::orthonorm::basis_scale;
use wrz::weights::parse_weight_spec;

fn main() -> wrz::Result<()> {
    let w = parse_weight_spec("circular:alpha=1,beta=2")?;
    let report = limit_comparison_report(&w, &[100, 400, 1600])?;
    for row in &report.rows {
        println!("n={:<5} E N = {:9.4}  E N/sqrt(n) = {:.4}  limit {:.4}", row.n, row.expected, row.expected_over_sqrt_n, row.limit);
    }

    // the slow approach comes from the hole and the exterior
    let eq = solve(&w)?;
    let n = 400;
    let bs = basis_scale(&w, n)?;
    let bulk = expected_real_zeros(&bs, eq.r0(), eq.outer_radius())?.value * 2.0;
    println!("n={n}: bulk-only E N/sqrt(n) = {:.4}", bulk / (n as f64).sqrt());
    Ok(())
}
