//! Real-zero intensity of the random polynomial and its integrals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{self, limit_density_integral};
use crate::error::{Error, Result};
use crate::kernel::kernel_diagonal;
use crate::orthonorm::{basis_scale, BasisScale};
use crate::quadrature::{self, Tolerance};
use crate::weights::RadialWeight;

/// Intensity samples `g_n(x)` (expected real zeros per unit length).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub n: usize,
    pub xs: Vec<f64>,
    pub gn: Vec<f64>,
}

/// Expected number of real zeros in an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCount {
    pub interval: (f64, f64),
    pub value: f64,
    pub n: usize,
    pub quadrature_error: f64,
}

/// `A = Σ x^{2j}`, `B = Σ j x^{2j−1}`, `C = Σ j² x^{2j−2}` for `0 ≤ j ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KacSums {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// `g_n(x) = (1/π)·√V(x) / K(x)`.
pub fn gn_density(bs: &BasisScale, x: f64) -> f64 {
    if bs.n() == 0 {
        return 0.0;
    }
    let kd = kernel_diagonal(bs, x);
    (0.5 * kd.log_v - kd.log_k).exp() / PI
}

pub fn density_curve(bs: &BasisScale, xs: &[f64]) -> DensityCurve {
    DensityCurve {
        n: bs.n(),
        xs: xs.to_vec(),
        gn: xs.iter().map(|&x| gn_density(bs, x)).collect(),
    }
}

/// Default tolerance of [`expected_real_zeros`].
pub fn default_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-13,
        rel: 1e-12,
        max_panels: 20_000,
    }
}

/// `∫_lo^hi g_n(x) dx`; infinite bounds are allowed.
pub fn expected_real_zeros(bs: &BasisScale, lo: f64, hi: f64) -> Result<ExpectedCount> {
    expected_real_zeros_with(bs, lo, hi, default_tolerance())
}

/// [`expected_real_zeros`] with an explicit tolerance, applied to each of the
/// (at most four) pieces separately.
///
/// The density is even, so the interval is first folded onto `[0, ∞)`; this
/// makes the result for `[a, b]` and `[−b, −a]` bit-identical. Each
/// nonnegative piece is split at `ρ = c_{n−1}/c_n`, where the top two terms of
/// the kernel balance, and the outer part is integrated in `t = ρ/x` on
/// `(0, 1]`, where `g_n(ρ/t)·ρ/t²` stays bounded.
pub fn expected_real_zeros_with(bs: &BasisScale, lo: f64, hi: f64, tol: Tolerance) -> Result<ExpectedCount> {
    if lo.is_nan() || hi.is_nan() || !(lo < hi) {
        return Err(Error::InvalidArgument(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    if hi <= 0.0 {
        pieces.push((-hi, -lo));
    } else if lo >= 0.0 {
        pieces.push((lo, hi));
    } else {
        pieces.push((0.0, -lo));
        pieces.push((0.0, hi));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for (a, b) in pieces {
        let (v, e) = nonnegative_piece(bs, a, b, tol)?;
        value += v;
        error += e;
    }
    Ok(ExpectedCount {
        interval: (lo, hi),
        value,
        n: bs.n(),
        quadrature_error: error,
    })
}

fn nonnegative_piece(bs: &BasisScale, a: f64, b: f64, tol: Tolerance) -> Result<(f64, f64)> {
    if bs.n() == 0 {
        return Ok((0.0, 0.0));
    }
    let lc = bs.log_c();
    let n = bs.n();
    let rho = (lc[n - 1] - lc[n]).exp();
    let mut value = 0.0;
    let mut error = 0.0;
    let inner_hi = b.min(rho);
    if inner_hi > a {
        let r = quadrature::integrate(|x| gn_density(bs, x), a, inner_hi, tol)?;
        value += r.value;
        error += r.error;
    }
    let outer_lo = a.max(rho);
    if b > outer_lo {
        let t_lo = if b.is_infinite() { 0.0 } else { rho / b };
        let t_hi = rho / outer_lo;
        let r = quadrature::integrate(|t| gn_density(bs, rho / t) * rho / (t * t), t_lo, t_hi, tol)?;
        value += r.value;
        error += r.error;
    }
    Ok((value, error))
}

/// `1/sinh²z − 1/z²`, accurate near zero.
fn csch2_minus_pole(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let z2 = z * z;
        -1.0 / 3.0 + z2 * (1.0 / 15.0 + z2 * (-2.0 / 189.0 + z2 * (1.0 / 675.0 + z2 * (-2.0 / 10395.0))))
    } else {
        let s = z.sinh();
        1.0 / (s * s) - 1.0 / (z * z)
    }
}

/// Integrand of the classical count after `x = e^{−u}`:
/// `√(1/sinh²u − m²/sinh²(mu))` with `m = n + 1`.
fn kac_hyperbolic(m: f64, u: f64) -> f64 {
    let f = if m * u < 1.0 {
        csch2_minus_pole(u) - m * m * csch2_minus_pole(m * u)
    } else {
        let (s, sm) = (u.sinh(), (m * u).sinh());
        1.0 / (s * s) - m * m / (sm * sm)
    };
    f.max(0.0).sqrt()
}

/// Expected number of real zeros of `Σ a_j x^j` with i.i.d. standard
/// Gaussian `a_j`, over the whole real line.
///
/// Folding `x ↦ −x` and `x ↦ 1/x` and substituting `x = e^{−u}` turns the
/// classical integral into `(2/π)∫_0^∞ √(1/sinh²u − m²/sinh²(mu)) du`,
/// `m = n + 1`. The integrand is smooth at `u = 0` (limit `√((m²−1)/3)`) and
/// decays like `2e^{−u}`.
pub fn kac_classical(n: usize) -> Result<ExpectedCount> {
    if n == 0 {
        return Err(Error::InvalidArgument("classical count needs degree ≥ 1".into()));
    }
    let m = (n + 1) as f64;
    let tol = Tolerance {
        abs: 1e-15,
        rel: 1e-13,
        max_panels: 4000,
    };
    // ~ 1/u between 1/m and 1: integrate that stretch in log u
    let near = quadrature::integrate(|u| kac_hyperbolic(m, u), 0.0, 1.0 / m, tol)?;
    let far = quadrature::integrate(
        |v| {
            let u = v.exp();
            kac_hyperbolic(m, u) * u
        },
        (1.0 / m).ln(),
        60f64.ln(),
        tol,
    )?;
    // beyond u = 60 the integrand is below 2e^{−60}
    let scale = 2.0 / PI;
    Ok(ExpectedCount {
        interval: (f64::NEG_INFINITY, f64::INFINITY),
        value: scale * (near.value + far.value),
        n,
        quadrature_error: scale * (near.error + far.error),
    })
}

/// The classical sums in closed form, with direct summation where the
/// geometric closed forms lose accuracy (`x²` near one) or overflow.
pub fn kac_sums(n: usize, x: f64) -> KacSums {
    let y = x * x;
    if x == 0.0 {
        return KacSums {
            a: 1.0,
            b: 0.0,
            c: if n >= 1 { 1.0 } else { 0.0 },
        };
    }
    let (nf, m) = (n as f64, (n + 1) as f64);
    let one_minus = 1.0 - y;
    let yn = y.powi(n as i32);
    let closed = if one_minus.abs() >= 0.05 && (yn * y * y).is_finite() {
        let a = (1.0 - yn * y) / one_minus;
        let s1 = y * (1.0 - m * yn + nf * yn * y) / (one_minus * one_minus);
        let s2 = y
            * (1.0 + y - m * m * yn + (2.0 * nf * nf + 2.0 * nf - 1.0) * yn * y - nf * nf * yn * y * y)
            / (one_minus * one_minus * one_minus);
        Some(KacSums {
            a,
            b: s1 / x,
            c: s2 / y,
        })
    } else {
        None
    };
    closed.unwrap_or_else(|| direct_kac_sums(n, x))
}

fn direct_kac_sums(n: usize, x: f64) -> KacSums {
    let y = x * x;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    // Horner in y, highest power first
    for j in (0..=n).rev() {
        let jf = j as f64;
        a = a * y + 1.0;
        b = b * y + jf;
        c = c * y + jf * jf;
    }
    // b and c currently hold Σ j y^j and Σ j² y^j divided by y⁰; rescale
    KacSums { a, b: b / x, c: c / y }
}

/// One row of [`limit_comparison_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub n: usize,
    pub expected: f64,
    pub expected_over_sqrt_n: f64,
    pub limit: f64,
    /// `|E N/√n − limit| / limit`; absent when the limit is zero.
    pub rel_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub weight: String,
    pub rows: Vec<LimitRow>,
    /// True when the weight has an empty bulk and the limit is zero.
    pub degenerate: bool,
}

/// `E N_n` over the real line against the `√n` limit for each degree.
pub fn limit_comparison_report(w: &RadialWeight, degrees: &[usize]) -> Result<LimitReport> {
    if degrees.is_empty() {
        return Err(Error::InvalidArgument("no degrees given".into()));
    }
    let eq = equilibrium::solve(w)?;
    let limit = limit_density_integral(w, &eq)?;
    let degenerate = !(limit > 0.0);
    let mut rows = Vec::with_capacity(degrees.len());
    for &n in degrees {
        let bs = basis_scale(w, n)?;
        let count = expected_real_zeros(&bs, f64::NEG_INFINITY, f64::INFINITY)?;
        let scaled = count.value / (n as f64).sqrt();
        rows.push(LimitRow {
            n,
            expected: count.value,
            expected_over_sqrt_n: scaled,
            limit,
            rel_gap: if degenerate { None } else { Some((scaled - limit).abs() / limit) },
        });
    }
    Ok(LimitReport {
        weight: w.name().to_string(),
        rows,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::kernel_diagonal;
    use crate::weights::{make_circular, make_weyl, CircularWeightParams};
    use proptest::prelude::*;

    fn circ(alpha: f64, beta: f64) -> RadialWeight {
        make_circular(CircularWeightParams::new(alpha, beta).unwrap()).unwrap()
    }

    fn ones(n: usize) -> BasisScale {
        BasisScale::from_log_c("kac", vec![0.0; n + 1]).unwrap()
    }

    /// Classical count by plain term loops and a fine midpoint rule in
    /// `x = tan θ` on `[0, π/2]`.
    fn kac_oracle(n: usize) -> f64 {
        let steps = 400_000;
        let h = 0.5 * PI / steps as f64;
        let mut total = 0.0;
        for i in 0..steps {
            let th = (i as f64 + 0.5) * h;
            let x = th.tan();
            let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
            for j in 0..=n {
                let jf = j as f64;
                let p = x.powi(2 * j as i32);
                a += p;
                if j > 0 {
                    b += jf * p / x;
                    c += jf * jf * p / (x * x);
                }
            }
            total += (a * c - b * b).max(0.0).sqrt() / a / (th.cos() * th.cos());
        }
        2.0 / PI * total * h
    }

    #[test]
    fn degree_one_has_one_real_zero() {
        let bs = BasisScale::from_log_c("t", vec![0.4, -1.1]).unwrap();
        let c = expected_real_zeros(&bs, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!((c.value - 1.0).abs() < 1e-10, "{}", c.value);
        // arctan antiderivative on a finite piece
        let (c0, c1) = (0.4f64.exp(), (-1.1f64).exp());
        let exact = ((c1 / c0 * 2.0).atan() - (c1 / c0 * -0.5).atan()) / PI;
        let c = expected_real_zeros(&bs, -0.5, 2.0).unwrap();
        assert!((c.value - exact).abs() < 1e-12);
        let k = kac_classical(1).unwrap();
        assert!((k.value - 1.0).abs() < 1e-12, "{}", k.value);
    }

    #[test]
    fn origin_value() {
        let bs = basis_scale(&circ(1.0, 2.0), 25).unwrap();
        let lc = bs.log_c();
        let expected = (lc[1] - lc[0]).exp() / PI;
        assert!((gn_density(&bs, 0.0) - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn weyl_bulk_intensity() {
        let bs = basis_scale(&make_weyl(), 400).unwrap();
        for i in 0..=14 {
            let x = -0.7 + 0.1 * i as f64;
            let v = gn_density(&bs, x) / 20.0;
            assert!((v - 1.0 / PI).abs() < 0.05, "x={x}: {v}");
        }
    }

    #[test]
    fn internal_scale_identity() {
        let bs = basis_scale(&circ(0.5, 3.0), 80).unwrap();
        for x in [-1.3, -0.4, 0.0, 0.2, 0.9, 5.0] {
            let kd = kernel_diagonal(&bs, x);
            let lhs = gn_density(&bs, x) * PI * kd.log_k.exp();
            let rhs = (0.5 * kd.log_v).exp();
            assert!((lhs - rhs).abs() <= 1e-13 * rhs);
        }
    }

    /// `g_n(x) = (1/π)·sd(j)/|x|` for `p_j ∝ c_j² x^{2j}`, by a two-pass
    /// mean and variance. Independent of the pair-sum route.
    fn variance_oracle(bs: &BasisScale, x: f64) -> f64 {
        let t: Vec<f64> = bs.log_c().iter().enumerate().map(|(j, c)| 2.0 * c + 2.0 * j as f64 * x.abs().ln()).collect();
        let m = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let p: Vec<f64> = t.iter().map(|v| (v - m).exp()).collect();
        let z: f64 = p.iter().sum();
        let mean = p.iter().enumerate().map(|(j, q)| j as f64 * q).sum::<f64>() / z;
        let var = p.iter().enumerate().map(|(j, q)| (j as f64 - mean).powi(2) * q).sum::<f64>() / z;
        var.sqrt() / x.abs() / PI
    }

    /// Composite Simpson on a fine grid, with the `x = 1/t` tail.
    fn simpson_count(bs: &BasisScale, steps: usize) -> f64 {
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            let h = (b - a) / steps as f64;
            let mut acc = f(a) + f(b);
            for i in 1..steps {
                acc += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        let inner = simpson(&|x| if x == 0.0 { gn_density(bs, 0.0) } else { variance_oracle(bs, x) }, 0.0, 1.0);
        // the t → 0 end has a finite limit; sample it just inside
        let outer = simpson(&|t| { let t = t.max(1e-9); variance_oracle(bs, 1.0 / t) / (t * t) }, 0.0, 1.0);
        2.0 * (inner + outer)
    }

    #[test]
    fn density_matches_variance_oracle() {
        for w in [make_weyl(), circ(1.0, 2.0), circ(0.0, 4.0)] {
            let bs = basis_scale(&w, 300).unwrap();
            for x in [-3.0, -1.0, -0.71, 0.05, 0.5, 0.8, 0.999, 1.001, 1.3, 7.0] {
                let (a, b) = (gn_density(&bs, x), variance_oracle(&bs, x));
                assert!((a - b).abs() <= 1e-9 * b, "{} x={x}: {a} vs {b}", w.name());
            }
        }
    }

    #[test]
    fn counts_against_limits() {
        // whole-line counts carry O(log n) zeros from outside the bulk, so the
        // √n limits are approached slowly and from above
        let weyl = make_weyl();
        let c12 = circ(1.0, 2.0);
        let cases = [(&weyl, 2.0 / PI), (&c12, 2.0 / PI * (2f64.sqrt() - 1.0))];
        for (w, limit) in cases {
            let mut prev = f64::INFINITY;
            for n in [100, 400, 1600] {
                let bs = basis_scale(w, n).unwrap();
                let c = expected_real_zeros(&bs, f64::NEG_INFINITY, f64::INFINITY).unwrap();
                let gap = c.value / (n as f64).sqrt() / limit - 1.0;
                assert!(gap > 0.0 && gap < prev, "{} n={n}: {gap}", w.name());
                prev = gap;
            }
        }
        let bs = basis_scale(&weyl, 400).unwrap();
        let c = expected_real_zeros(&bs, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let oracle = simpson_count(&bs, 20_000);
        assert!((c.value - oracle).abs() < 1e-6, "{} vs {oracle}", c.value);
        let bs = basis_scale(&c12, 400).unwrap();
        let c = expected_real_zeros(&bs, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let oracle = simpson_count(&bs, 20_000);
        assert!((c.value - oracle).abs() < 1e-6, "{} vs {oracle}", c.value);
        // the bulk part alone is close to the limit
        let bulk = expected_real_zeros(&bs, 0.5f64.sqrt(), 1.0).unwrap().value * 2.0;
        assert!((bulk / 20.0 / (2.0 / PI * (2f64.sqrt() - 1.0)) - 1.0).abs() < 0.10);
    }

    #[test]
    fn classical_matches_oracle_and_weighted_machinery() {
        for n in [1, 2, 3, 7, 20, 50] {
            let k = kac_classical(n).unwrap().value;
            let w = expected_real_zeros(&ones(n), f64::NEG_INFINITY, f64::INFINITY).unwrap().value;
            assert!((k - w).abs() < 1e-8, "n={n}: {k} vs {w}");
        }
        for n in [2, 5, 12] {
            let k = kac_classical(n).unwrap().value;
            assert!((k - kac_oracle(n)).abs() < 1e-7, "n={n}");
        }
    }

    #[test]
    fn classical_growth() {
        let mut prev = 0.0;
        for n in 1..=51 {
            let v = kac_classical(n).unwrap().value;
            assert!(v >= prev, "n={n}");
            prev = v;
        }
        let v = kac_classical(10_000).unwrap().value;
        let gap = v - 2.0 / PI * 10_000f64.ln();
        assert!((0.0..=1.5).contains(&gap), "{gap}");
        assert!(kac_classical(0).is_err());
    }

    #[test]
    fn classical_sums() {
        for n in [0, 1, 4, 30] {
            for x in [-2.0, -1.0, -0.99, -0.5, 0.0, 0.3, 0.97, 1.0, 1.02, 1.6] {
                let s = kac_sums(n, x);
                let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
                for j in 0..=n {
                    let jf = j as f64;
                    a += x.powi(2 * j as i32);
                    if j > 0 {
                        b += jf * x.powi(2 * j as i32 - 1);
                        c += jf * jf * x.powi(2 * j as i32 - 2);
                    }
                }
                let close = |p: f64, q: f64| (p - q).abs() <= 1e-11 * (1.0 + q.abs());
                assert!(close(s.a, a) && close(s.b, b) && close(s.c, c), "n={n} x={x}: {s:?}");
                assert!(s.a * s.c - s.b * s.b >= -1e-9 * s.a * s.c);
            }
        }
        let s = kac_sums(1, 0.7);
        assert!((s.a * s.c - s.b * s.b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn limit_reports() {
        let rep = limit_comparison_report(&make_weyl(), &[100, 200, 400]).unwrap();
        let gaps: Vec<f64> = rep.rows.iter().map(|r| r.rel_gap.unwrap()).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        let rep = limit_comparison_report(&circ(1.0, 2.0), &[100, 400]).unwrap();
        assert!(rep.rows[1].rel_gap.unwrap() < rep.rows[0].rel_gap.unwrap());
        assert!((rep.rows[1].limit - 0.263_696_5).abs() < 1e-6);
        assert!(!rep.degenerate);
        assert!(limit_comparison_report(&make_weyl(), &[]).is_err());
    }

    #[test]
    fn bad_intervals() {
        let bs = ones(3);
        assert!(expected_real_zeros(&bs, 1.0, 1.0).is_err());
        assert!(expected_real_zeros(&bs, 2.0, -1.0).is_err());
        assert!(expected_real_zeros(&bs, f64::NAN, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn additive_and_symmetric(
            a in -3.0f64..3.0,
            d1 in 0.01f64..2.0,
            d2 in 0.01f64..2.0,
            n in 1usize..60,
        ) {
            let bs = basis_scale(&circ(1.0, 2.0), n).unwrap();
            let (b, c) = (a + d1, a + d1 + d2);
            let ab = expected_real_zeros(&bs, a, b).unwrap();
            let bc = expected_real_zeros(&bs, b, c).unwrap();
            let ac = expected_real_zeros(&bs, a, c).unwrap();
            let slack = ab.quadrature_error + bc.quadrature_error + ac.quadrature_error + 1e-12;
            prop_assert!((ac.value - ab.value - bc.value).abs() <= slack);
            prop_assert!(ab.value >= 0.0);
            let mirrored = expected_real_zeros(&bs, -b, -a).unwrap();
            prop_assert_eq!(mirrored.value, ab.value);
        }
    }
}
