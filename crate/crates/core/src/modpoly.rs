//! Dense polynomial arithmetic over the prime field F_p.
//!
//! Polynomials are `Vec<u64>` in ascending degree order with no trailing
//! zeros; the zero polynomial is the empty vector. Degrees stay tiny
//! (tuple degrees), so the quadratic algorithms here are the right ones.

use crate::sieve::{mul_mod, pow_mod};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub(crate) fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// None for the zero polynomial.
pub(crate) fn degree(v: &[u64]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

/// Reduce an integer polynomial mod p.
pub(crate) fn reduce(f: &crate::polyarith::Polynomial, p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut out: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|c| {
            let r = ((c % &pb) + &pb) % &pb;
            r.to_u64().unwrap()
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn eval(f: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in f.iter().rev() {
        acc = (mul_mod(acc, x, p) + c) % p;
    }
    acc
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(ai, bj, p)) % p;
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] = c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] = (out[i] + p - c) % p;
    }
    trim(&mut out);
    out
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn make_monic(f: &[u64], p: u64) -> Vec<u64> {
    match f.last() {
        None | Some(1) => f.to_vec(),
        Some(&lead) => {
            let inv = inv_mod(lead, p);
            f.iter().map(|&c| mul_mod(c, inv, p)).collect()
        }
    }
}

/// Remainder of a modulo m (m nonzero).
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let md = degree(m).expect("division by the zero polynomial");
    let mut r = a.to_vec();
    let lead_inv = inv_mod(*m.last().unwrap(), p);
    while degree(&r).is_some_and(|d| d >= md) {
        let d = r.len() - 1;
        let q = mul_mod(*r.last().unwrap(), lead_inv, p);
        let off = d - md;
        for (i, &mc) in m.iter().enumerate() {
            r[off + i] = (r[off + i] + p - mul_mod(q, mc, p)) % p;
        }
        trim(&mut r);
    }
    r
}

/// Monic gcd.
pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(&a, p)
}

/// base^exp mod (m, p) by square and multiply.
pub(crate) fn pow_poly_mod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &base, p), m, p);
        }
        base = rem(&mul(&base, &base, p), m, p);
        exp >>= 1;
    }
    acc
}

/// X^(p^e) mod (m, p): e successive Frobenius powers.
fn frobenius_power(e: usize, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = rem(&[0, 1], m, p);
    for _ in 0..e {
        acc = pow_poly_mod(&acc, p, m, p);
    }
    acc
}

/// Rabin irreducibility test over F_p.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let Some(d) = degree(f) else { return false };
    if d == 0 {
        return false;
    }
    let f = make_monic(f, p);
    if d == 1 {
        return true;
    }
    let mut prime_divs = Vec::new();
    let mut n = d;
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            prime_divs.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        prime_divs.push(n);
    }
    for &q in &prime_divs {
        let h = sub(&frobenius_power(d / q, &f, p), &[0, 1], p);
        if degree(&gcd(&h, &f, p)) != Some(0) {
            return false;
        }
    }
    let top = sub(&frobenius_power(d, &f, p), &[0, 1], p);
    top.is_empty()
}

/// The product of (X - r) over the distinct roots of f in F_p.
pub(crate) fn linear_root_part(f: &[u64], p: u64) -> Vec<u64> {
    let f = make_monic(f, p);
    let xp = pow_poly_mod(&[0, 1], p, &f, p);
    gcd(&sub(&xp, &[0, 1], p), &f, p)
}

/// Roots of a product of distinct monic linear factors, by randomized
/// equal-degree splitting with a deterministic internal stream (root sets
/// are fixed mathematical objects and must not vary with user seeds).
pub(crate) fn split_linear_factors(g: &[u64], p: u64) -> Vec<u64> {
    const INTERNAL_SEED: u64 = 0x5eed_cafe_f00d_0001;
    let mut stream = crate::rng::Stream::new(INTERNAL_SEED);
    let mut roots = Vec::new();
    let mut stack = vec![make_monic(g, p)];
    while let Some(h) = stack.pop() {
        match degree(&h) {
            None | Some(0) => continue,
            Some(1) => {
                // monic X + c -> root p - c
                roots.push((p - h[0]) % p);
            }
            Some(_) => {
                let a = stream.next_below(p);
                let shifted = vec![a % p, 1];
                let pw = pow_poly_mod(&shifted, (p - 1) / 2, &h, p);
                let mut minus_one = pw.clone();
                if minus_one.is_empty() {
                    minus_one = vec![p - 1];
                } else {
                    minus_one[0] = (minus_one[0] + p - 1) % p;
                    trim(&mut minus_one);
                }
                let d = gcd(&minus_one, &h, p);
                match degree(&d) {
                    Some(dd) if dd > 0 && dd < h.len() - 1 => {
                        let q = quotient(&h, &d, p);
                        stack.push(d);
                        stack.push(q);
                    }
                    _ => stack.push(h),
                }
            }
        }
    }
    roots.sort_unstable();
    roots
}

/// Exact quotient when d divides h.
fn quotient(h: &[u64], d: &[u64], p: u64) -> Vec<u64> {
    let dd = degree(d).unwrap();
    let mut r = h.to_vec();
    let mut q = vec![0u64; h.len() - dd];
    let lead_inv = inv_mod(*d.last().unwrap(), p);
    while let Some(rd) = degree(&r) {
        if rd < dd {
            break;
        }
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        let off = rd - dd;
        q[off] = c;
        for (i, &mc) in d.iter().enumerate() {
            r[off + i] = (r[off + i] + p - mul_mod(c, mc, p)) % p;
        }
        trim(&mut r);
    }
    debug_assert!(r.is_empty());
    trim(&mut q);
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::Polynomial;

    #[test]
    fn rem_and_gcd() {
        let p = 7;
        // (X^2 - 1) and (X - 1) share the factor X - 1
        let a = vec![6, 0, 1];
        let b = vec![6, 1];
        let g = gcd(&a, &b, p);
        assert_eq!(g, vec![6, 1]);
    }

    #[test]
    fn irreducibility_over_fp() {
        // X^2+1 is irreducible mod 3, reducible mod 2 and mod 5
        assert!(is_irreducible(&[1, 0, 1], 3));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 5));
        // X^2+X+1 irreducible mod 2
        assert!(is_irreducible(&[1, 1, 1], 2));
    }

    #[test]
    fn linear_part_collects_roots() {
        // X^2+1 mod 13: roots 5 and 8
        let f = reduce(&Polynomial::from_i64(&[1, 0, 1]).unwrap(), 13);
        let g = linear_root_part(&f, 13);
        assert_eq!(degree(&g), Some(2));
        let roots = split_linear_factors(&g, 13);
        assert_eq!(roots, vec![5, 8]);
    }

    #[test]
    fn split_handles_many_roots() {
        let p = 10_007u64;
        // product of (X - r) for r in {1, 17, 400, 9000, 9999}
        let mut f = vec![1u64];
        for r in [1u64, 17, 400, 9000, 9999] {
            f = mul(&f, &[(p - r) % p, 1], p);
        }
        let roots = split_linear_factors(&f, p);
        assert_eq!(roots, vec![1, 17, 400, 9000, 9999]);
    }
}
