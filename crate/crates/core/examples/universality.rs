//! Mean real-root counts under different coefficient laws.

use wrz::orthonorm::basis_scale;
use wrz::sampling::{universality_compare, CoefficientDistribution};
use wrz::weights::make_weyl;

fn main() -> wrz::Result<()> {
    let bs = basis_scale(&make_weyl(), 150)?;
    let g = CoefficientDistribution::gaussian();
    let three_point = CoefficientDistribution::parse("discrete:-1.224744871391589@0.3333333333333333,0@0.3333333333333334,1.224744871391589@0.3333333333333333")?;
    for other in [CoefficientDistribution::rademacher(), CoefficientDistribution::uniform_sym(), three_point] {
        let c = universality_compare(&bs, (&g, &other), 800, 3)?;
        println!("{:<10} vs {:<30} {:.3} vs {:.3}  z = {:+.2}", c.dists.0, c.dists.1, c.means.0, c.means.1, c.z_score);
    }
    Ok(())
}
