//! Real-root counts certified from approximate roots.
//!
//! With approximations `z_i` to the roots of a degree-`d` polynomial `p` and
//! Weierstrass corrections `W_i = p(z_i) / (a_d ∏_{j≠i} (z_i − z_j))`, the
//! roots of `p` are the eigenvalues of `diag(z) − W·1ᵀ`. Gerschgorin's theorem
//! then places exactly one root in each disk `|x − z_i| ≤ d·|W_i|` as long as
//! the disks are pairwise disjoint. Because `p` is real, the root in disk `i`
//! is real when the mirror image of that disk meets no other disk, and
//! non-real when the disk misses the real axis. Anything less clear-cut is
//! left to the exact Sturm count.

use num_complex::Complex64;

use super::sturm::count_real_roots_coeffs;
use crate::error::Result;

const U: f64 = f64::EPSILON / 2.0;

/// Upper bound on `ln|p(z)|`, rounding error included. Outside the unit
/// disk the reversed polynomial is used and `d·ln|z|` added back.
fn log_abs_value_bound(a: &[f64], z: Complex64) -> f64 {
    let d = a.len() - 1;
    let outside = z.norm() > 1.0;
    let x = if outside { z.inv() } else { z };
    let ax = x.norm();
    let (mut p, mut s) = (Complex64::new(0.0, 0.0), 0.0);
    for i in 0..=d {
        let c = if outside { a[i] } else { a[d - i] };
        p = p * x + c;
        s = s * ax + c.abs();
    }
    // Horner plus the rounding of 1/z, with a fourfold margin
    let err = 4.0 * (8.0 * (d + 2) as f64 + 2.0 * d as f64 + 4.0) * U * s;
    let v = (p.norm() + err).ln();
    if outside {
        v + d as f64 * z.norm().ln()
    } else {
        v
    }
}

/// Inclusion radii `d·|W_i|`, slightly inflated to absorb rounding in the
/// product of root differences.
pub fn inclusion_radii(a: &[f64], z: &[Complex64]) -> Vec<f64> {
    let d = a.len() - 1;
    let lead = a[d].abs().ln();
    z.iter()
        .enumerate()
        .map(|(i, &zi)| {
            let mut log_prod = 0.0;
            for (k, &zk) in z.iter().enumerate() {
                if k != i {
                    log_prod += (zi - zk).norm().ln();
                }
            }
            let slack = 8.0 * d as f64 * U + 1e-12 * (1.0 + log_prod.abs());
            let log_w = log_abs_value_bound(a, zi) - lead - log_prod + slack;
            d as f64 * log_w.exp() * (1.0 + 1e-10)
        })
        .collect()
}

/// Number of distinct real roots if the disks settle it, else `None`.
/// `a` must have nonzero first and last coefficients and `z` must hold
/// `a.len() − 1` root approximations.
pub fn certified_count(a: &[f64], z: &[Complex64]) -> Option<usize> {
    let d = a.len() - 1;
    if d == 0 || z.len() != d {
        return None;
    }
    let r = inclusion_radii(a, z);
    if r.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let apart = |c: Complex64, rc: f64, k: usize| (c - z[k]).norm() > rc + r[k];
    let mut count = 0;
    for i in 0..d {
        for k in i + 1..d {
            if !apart(z[i], r[i], k) {
                return None;
            }
        }
    }
    for i in 0..d {
        if z[i].im.abs() > r[i] {
            continue;
        }
        if (0..d).all(|k| k == i || apart(z[i].conj(), r[i], k)) {
            count += 1;
        } else {
            return None;
        }
    }
    Some(count)
}

/// How a count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    Certified,
    Sturm,
}

/// Distinct real roots of `Σ coeffs[j] x^j` given all its roots (as returned
/// by the root finder, zeros at the origin included). Falls back to the Sturm
/// chain when the inclusion disks cannot decide.
pub fn count_with_roots(coeffs: &[f64], roots: &[Complex64]) -> Result<(usize, CountMethod)> {
    let top = coeffs.iter().rposition(|&c| c != 0.0);
    let low = coeffs.iter().position(|&c| c != 0.0);
    if let (Some(top), Some(low)) = (top, low) {
        let core = &coeffs[low..=top];
        let nonzero: Vec<Complex64> = if low > 0 {
            let mut seen = 0;
            roots
                .iter()
                .filter(|c| {
                    if c.norm() == 0.0 && seen < low {
                        seen += 1;
                        false
                    } else {
                        true
                    }
                })
                .cloned()
                .collect()
        } else {
            roots.to_vec()
        };
        if core.len() == 1 {
            return Ok((usize::from(low > 0), CountMethod::Certified));
        }
        if let Some(c) = certified_count(core, &nonzero) {
            return Ok((c + usize::from(low > 0), CountMethod::Certified));
        }
    }
    Ok((count_real_roots_coeffs(coeffs)?, CountMethod::Sturm))
}
