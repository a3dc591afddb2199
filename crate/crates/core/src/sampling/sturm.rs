//! Exact count of distinct real roots of a polynomial with double
//! coefficients, via a Sturm chain over the integers.
//!
//! Every finite double is a dyadic rational, so after a common power-of-two
//! shift the coefficients are exact integers. The chain is produced by the
//! subresultant pseudo-remainder sequence, whose members are scalar multiples
//! of the Sturm remainders; the scalars' signs are tracked so that the sign
//! variations at ±∞ are those of the true Sturm chain.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Mantissa and binary exponent with `x = m·2^e` exactly.
fn dyadic(x: f64) -> (i64, i64) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
    (if x < 0.0 { -m } else { m }, e)
}

/// Integer coefficients of `p(2^k·y)` up to a positive power of two, with
/// `k` chosen to narrow the spread of binary exponents.
fn integer_coefficients(coeffs: &[f64]) -> Vec<BigInt> {
    let parts: Vec<Option<(i64, i64)>> = coeffs
        .iter()
        .map(|&c| if c == 0.0 { None } else { Some(dyadic(c)) })
        .collect();
    let spread = |k: i64| {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for (j, p) in parts.iter().enumerate() {
            if let Some((_, e)) = p {
                let v = e + k * j as i64;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        hi.saturating_sub(lo)
    };
    let k = (-64..=64).min_by_key(|&k| (spread(k), k.abs())).unwrap_or(0);
    let emin = parts
        .iter()
        .enumerate()
        .filter_map(|(j, p)| p.map(|(_, e)| e + k * j as i64))
        .min()
        .unwrap_or(0);
    parts
        .iter()
        .enumerate()
        .map(|(j, p)| match p {
            None => BigInt::zero(),
            Some((m, e)) => BigInt::from(*m) << (e + k * j as i64 - emin) as usize,
        })
        .collect()
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// `lc(b)^{δ+1}·a mod b`, `δ = deg a − deg b`.
fn pseudo_remainder(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let delta = a.len() - b.len();
    let lb = &b[db];
    let mut r = a.to_vec();
    for k in (0..=delta).rev() {
        let q = r[db + k].clone();
        for x in r.iter_mut().take(db + k + 1) {
            *x *= lb;
        }
        if !q.is_zero() {
            for i in 0..=db {
                r[i + k] -= &q * &b[i];
            }
        }
    }
    r.truncate(db);
    trim(&mut r);
    r
}

fn sign(x: &BigInt) -> i32 {
    if x.is_negative() {
        -1
    } else if x.is_zero() {
        0
    } else {
        1
    }
}

/// Number of distinct real roots of `Σ coeffs[j]·x^j`.
pub fn count_real_roots_coeffs(coeffs: &[f64]) -> Result<usize> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("coefficients must be finite".into()));
    }
    let mut p = integer_coefficients(coeffs);
    trim(&mut p);
    if p.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if p.len() == 1 {
        return Ok(0);
    }
    // (degree, sign of leading coefficient) of each Sturm chain member
    let mut chain: Vec<(usize, i32)> = Vec::with_capacity(p.len());
    let mut a = p;
    let mut b = derivative(&a);
    let (mut sig_prev, mut sig_cur) = (1i32, 1i32);
    chain.push((a.len() - 1, sign(a.last().unwrap())));
    chain.push((b.len() - 1, sign(b.last().unwrap())));
    let (mut g, mut h) = (BigInt::one(), BigInt::one());
    while b.len() > 1 {
        let delta = a.len() - b.len();
        let r = pseudo_remainder(&a, &b);
        if r.is_empty() {
            break;
        }
        let beta = &g * h.pow(delta as u32);
        let r: Vec<BigInt> = r.into_iter().map(|c| c / &beta).collect();
        let lb = sign(b.last().unwrap());
        let lb_pow = if (delta + 1) % 2 == 1 { lb } else { 1 };
        let sig_next = -sig_prev * lb_pow * sign(&beta);
        chain.push((r.len() - 1, sig_next * sign(r.last().unwrap())));
        g = b.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta as u32) / h.pow(delta as u32 - 1)
        };
        sig_prev = sig_cur;
        sig_cur = sig_next;
        a = b;
        b = r;
    }
    let variations = |signs: Vec<i32>| {
        let nz: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
        nz.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let at_minus = variations(
        chain
            .iter()
            .map(|&(d, s)| if d % 2 == 1 { -s } else { s })
            .collect(),
    );
    let at_plus = variations(chain.iter().map(|&(_, s)| s).collect());
    Ok(at_minus - at_plus)
}
