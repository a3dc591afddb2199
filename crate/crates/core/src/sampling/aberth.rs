//! Aberth–Ehrlich simultaneous iteration for all complex roots.
//!
//! The iteration is generic over the float type so the double-precision pass
//! can be retried in double-double (`TwoFloat`) when it stalls.

use num_complex::{Complex, Complex64};
use num_traits::Float;
use twofloat::TwoFloat;

use super::polynomial::SampledPolynomial;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 500;
const STEP_TOL: f64 = 1e-13;

/// Roots plus whether the extended-precision retry was needed.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub extended: bool,
}

pub fn all_complex_roots(p: &SampledPolynomial) -> Result<Vec<Complex64>> {
    all_complex_roots_coeffs(p.normalized())
}

/// All roots of `Σ coeffs[j]·z^j`, with multiplicity.
pub fn all_complex_roots_coeffs(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    solve(coeffs).map(|s| s.roots)
}

pub fn solve(coeffs: &[f64]) -> Result<RootSet> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("coefficients must be finite".into()));
    }
    let top = coeffs.iter().rposition(|&c| c != 0.0).ok_or(Error::ZeroPolynomial)?;
    let low = coeffs.iter().position(|&c| c != 0.0).unwrap_or(0);
    let core = &coeffs[low..=top];
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    if core.len() == 1 {
        return Ok(RootSet { roots, extended: false });
    }
    let start = initial_guesses(core);
    match iterate::<f64>(core, &start) {
        Ok(z) => {
            roots.extend(z);
            Ok(RootSet { roots, extended: false })
        }
        Err((last, _)) => {
            let z = iterate::<TwoFloat>(core, &last).map_err(|(_, worst)| Error::RootFinding {
                iterations: MAX_ITERATIONS,
                worst,
            })?;
            roots.extend(z);
            Ok(RootSet { roots, extended: true })
        }
    }
}

/// Circles from the upper convex hull of `(j, ln|a_j|)`: an edge from `i` to
/// `k` contributes `k − i` points on the radius `(|a_i|/|a_k|)^{1/(k−i)}`.
fn initial_guesses(a: &[f64]) -> Vec<Complex64> {
    let d = a.len() - 1;
    let pts: Vec<(f64, f64)> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (j as f64, c.abs().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (o, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if (q.0 - o.0) * (p.1 - o.1) - (q.1 - o.1) * (p.0 - o.0) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(d);
    for e in hull.windows(2) {
        let m = (e[1].0 - e[0].0) as usize;
        let r = ((e[0].1 - e[1].1) / m as f64).exp();
        let offset = 2.0 * std::f64::consts::PI * e[0].0 / d as f64 + 0.4;
        for l in 0..m {
            let theta = 2.0 * std::f64::consts::PI * l as f64 / m as f64 + offset;
            out.push(Complex64::from_polar(r, theta));
        }
    }
    out
}

/// `p(z)/p'(z)` and whether `|p(z)|` is already at the rounding floor.
/// Outside the unit disk the reversed polynomial is evaluated at `1/z`.
fn newton_ratio<T: Float>(a: &[T], z: Complex<T>) -> (Complex<T>, bool) {
    let d = a.len() - 1;
    let zero = Complex::new(T::zero(), T::zero());
    let (mut p, mut dp, mut scale) = (zero, zero, T::zero());
    let az = z.norm();
    let outside = az > T::one();
    let x = if outside { z.inv() } else { z };
    let ax = x.norm();
    let coeff = |i: usize| if outside { a[i] } else { a[d - i] };
    for i in 0..=d {
        let c = coeff(i);
        dp = dp * x + p;
        p = p * x + Complex::new(c, T::zero());
        scale = scale * ax + c.abs();
    }
    let floor = T::from(8 * (d + 1)).unwrap() * T::epsilon() * scale;
    let small = p.norm() <= floor;
    let ratio = if outside {
        let denom = p * T::from(d).unwrap() - x * dp;
        z * p / denom
    } else {
        p / dp
    };
    (ratio, small)
}

type Stalled = (Vec<Complex64>, f64);

fn iterate<T: Float>(coeffs: &[f64], start: &[Complex64]) -> std::result::Result<Vec<Complex64>, Stalled> {
    let a: Vec<T> = coeffs.iter().map(|&c| T::from(c).unwrap()).collect();
    let lift = |c: Complex64| Complex::new(T::from(c.re).unwrap(), T::from(c.im).unwrap());
    let mut z: Vec<Complex<T>> = start.iter().map(|&c| lift(c)).collect();
    let mut done = vec![false; z.len()];
    let tol = T::from(STEP_TOL).unwrap();
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        worst = 0.0;
        for i in 0..z.len() {
            if done[i] {
                continue;
            }
            let (ratio, small) = newton_ratio(&a, z[i]);
            let mut sum = Complex::new(T::zero(), T::zero());
            for (k, zk) in z.iter().enumerate() {
                if k != i {
                    sum = sum + (z[i] - *zk).inv();
                }
            }
            let mut step = ratio / (Complex::new(T::one(), T::zero()) - ratio * sum);
            if !(step.re.is_finite() && step.im.is_finite()) {
                // derivative or the repulsion term vanished: nudge off the spot
                let nudge = T::from(1e-7).unwrap() * (T::one() + z[i].norm());
                step = Complex::new(nudge, nudge);
            }
            let rel = step.norm() / (T::one() + z[i].norm());
            z[i] = z[i] - step;
            if small || rel < tol {
                done[i] = true;
            } else {
                worst = worst.max(rel.to_f64().unwrap_or(f64::INFINITY));
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    let out: Vec<Complex64> = z
        .iter()
        .map(|c| Complex64::new(c.re.to_f64().unwrap(), c.im.to_f64().unwrap()))
        .collect();
    if done.iter().all(|&d| d) {
        Ok(out)
    } else {
        Err((out, worst))
    }
}

/// Largest distance from a non-real root to the conjugate of its nearest
/// partner; roots within `real_tol·(1+|z|)` of the axis are skipped.
pub fn conjugate_mismatch(roots: &[Complex64], real_tol: f64) -> f64 {
    roots
        .iter()
        .filter(|z| z.im.abs() > real_tol * (1.0 + z.norm()))
        .map(|z| {
            roots
                .iter()
                .map(|w| (w - z.conj()).norm() / (1.0 + z.norm()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthonorm::basis_scale;
    use crate::sampling::{sample_polynomial, CoefficientDistribution};
    use crate::weights::make_weyl;

    fn sorted(mut z: Vec<Complex64>) -> Vec<Complex64> {
        z.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        z
    }

    #[test]
    fn unit_quadratic() {
        let z = sorted(all_complex_roots_coeffs(&[1.0, 0.0, 1.0]).unwrap());
        assert!((z[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((z[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn constructed_factors() {
        // (z − 0.5)(z + 0.5)(z − 2) = z³ − 2z² − 0.25z + 0.5
        let z = sorted(all_complex_roots_coeffs(&[0.5, -0.25, -2.0, 1.0]).unwrap());
        for (r, want) in z.iter().zip([-0.5, 0.5, 2.0]) {
            assert!((r - Complex64::new(want, 0.0)).norm() < 1e-12, "{r} vs {want}");
        }
    }

    #[test]
    fn zeros_at_origin_and_padding() {
        // z²(z − 3), padded with a zero top coefficient
        let z = all_complex_roots_coeffs(&[0.0, 0.0, -3.0, 1.0, 0.0]).unwrap();
        assert_eq!(z.len(), 3);
        assert_eq!(z.iter().filter(|c| c.norm() == 0.0).count(), 2);
        assert!(z.iter().any(|c| (c - 3.0).norm() < 1e-13));
        assert_eq!(all_complex_roots_coeffs(&[0.0; 3]).unwrap_err(), Error::ZeroPolynomial);
        assert!(all_complex_roots_coeffs(&[2.0]).unwrap().is_empty());
    }

    #[test]
    fn double_double_path_agrees() {
        let a = [0.5, -0.25, -2.0, 1.0];
        let start = initial_guesses(&a);
        let z = sorted(iterate::<TwoFloat>(&a, &start).unwrap());
        for (r, want) in z.iter().zip([-0.5, 0.5, 2.0]) {
            assert!((r - Complex64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn weyl_sample_roots_fill_the_unit_disk() {
        let bs = basis_scale(&make_weyl(), 100).unwrap();
        let g = CoefficientDistribution::gaussian();
        // the limit measure is uniform on the unit disk
        let (mut within, mut ring) = (0.0, 0.0);
        for t in 0..20 {
            let p = sample_polynomial(&bs, &g, (17, t));
            let z = all_complex_roots(&p).unwrap();
            assert_eq!(z.len(), 100);
            assert!(conjugate_mismatch(&z, 1e-9) < 1e-10);
            within += z.iter().filter(|c| c.norm() <= 1.1).count() as f64 / 2000.0;
            ring += z.iter().filter(|c| (0.8..=1.1).contains(&c.norm())).count() as f64 / 2000.0;
            let residual = z
                .iter()
                .map(|c| newton_ratio(p.normalized(), *c).0.norm())
                .fold(0.0, f64::max);
            assert!(residual < 1e-10, "trial {t}: Newton step {residual:e}");
        }
        assert!(within >= 0.95, "{within}");
        assert!((ring - 0.36).abs() < 0.05, "{ring}");
    }
}
