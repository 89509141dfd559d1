//! Exact integer-polynomial arithmetic and tuple normalization.
//!
//! Tuples are normalized by the least shift `N >= 0` such that every
//! coefficient becomes nonnegative and the values are strictly ordered
//! above the argument; all downstream modules assume that form.

use crate::error::{BhError, Result};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use sha2::{Digest, Sha256};
use std::fmt;

/// Integer polynomial with positive leading coefficient, degree >= 1.
/// Coefficients are stored in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(BhError::ConfigError(
                "polynomial must have degree >= 1".into(),
            ));
        }
        if coeffs.last().unwrap().sign() != Sign::Plus {
            return Err(BhError::ConfigError(
                "polynomial must have a positive leading coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The identity polynomial X.
    pub fn identity() -> Self {
        Self {
            coeffs: vec![BigInt::zero(), BigInt::one()],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.len() == 2 && self.coeffs[0].is_zero() && self.coeffs[1].is_one()
    }

    /// Exact value at a nonnegative integer argument.
    pub fn evaluate(&self, n: u64) -> BigInt {
        self.evaluate_big(&BigInt::from(n))
    }

    pub fn evaluate_big(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    /// Checked evaluation staying inside u64; None on overflow.
    pub fn evaluate_u64(&self, n: u64) -> Option<u64> {
        let mut acc: u64 = 0;
        for c in self.coeffs.iter().rev() {
            let c = c.to_i64()?;
            let wide = (acc as u128) * (n as u128);
            let wide = if c >= 0 {
                wide.checked_add(c as u128)?
            } else {
                wide.checked_sub((-c) as u128)?
            };
            acc = u64::try_from(wide).ok()?;
        }
        Some(acc)
    }

    /// Evaluation in doubles, for quadrature integrands.
    pub fn evaluate_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Taylor shift: the polynomial n -> f(n + shift).
    pub fn shifted(&self, shift: u64) -> Self {
        let n = BigInt::from(shift);
        let mut c = self.coeffs.clone();
        let d = c.len() - 1;
        for k in 0..d {
            for j in (k..d).rev() {
                let add = &n * &c[j + 1];
                c[j] += add;
            }
        }
        Self { coeffs: c }
    }

    pub fn sub(&self, other: &Self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Parse the human string form, e.g. `X^2+1`, `2X^3+X+5`, `X^2-2X+2`.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(BhError::ConfigError("empty polynomial".into()));
        }
        let mut coeffs: Vec<BigInt> = Vec::new();
        let bytes = compact.as_bytes();
        let mut i = 0;
        let mut sign = BigInt::one();
        let err = |msg: &str| BhError::ConfigError(format!("cannot parse `{s}`: {msg}"));
        while i < bytes.len() {
            match bytes[i] {
                b'+' => {
                    sign = BigInt::one();
                    i += 1;
                    continue;
                }
                b'-' => {
                    sign = -BigInt::one();
                    i += 1;
                    continue;
                }
                _ => {}
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coef = if i > start {
                compact[start..i]
                    .parse::<BigInt>()
                    .map_err(|_| err("bad coefficient"))?
            } else {
                BigInt::one()
            };
            let mut exp = 0usize;
            if i < bytes.len() && (bytes[i] == b'X' || bytes[i] == b'x') {
                i += 1;
                exp = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let estart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == estart {
                        return Err(err("missing exponent"));
                    }
                    exp = compact[estart..i].parse().map_err(|_| err("bad exponent"))?;
                }
            } else if i == start {
                return Err(err("unexpected character"));
            }
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, BigInt::zero());
            }
            coeffs[exp] += &sign * coef;
            sign = BigInt::one();
        }
        Self::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (exp, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            match exp {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    write!(f, "X")?;
                    if exp > 1 {
                        write!(f, "^{exp}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Normalized ordered tuple (f_1, ..., f_k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTuple {
    polys: Vec<Polynomial>,
    shift: u64,
}

impl PolyTuple {
    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn k(&self) -> usize {
        self.polys.len()
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn degree_sum(&self) -> usize {
        self.polys.iter().map(|f| f.degree()).sum()
    }

    /// Content hash over the normalized coefficient lists, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for f in &self.polys {
            for c in f.coeffs() {
                hasher.update(c.to_string().as_bytes());
                hasher.update(b",");
            }
            hasher.update(b";");
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Short hash form used in file names and CSV rows.
    pub fn short_hash(&self) -> String {
        self.content_hash()[..16].to_string()
    }
}

impl fmt::Display for PolyTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.polys.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Root-location bound: every real root of d has |x| < cauchy_bound(d).
fn cauchy_bound(d: &[BigInt]) -> u64 {
    let lead = d.last().unwrap().abs();
    let mut best = BigInt::zero();
    for c in &d[..d.len() - 1] {
        let q = (c.abs() + &lead - 1u32) / &lead;
        if q > best {
            best = q;
        }
    }
    (best + 1u32).to_u64().unwrap_or(u64::MAX)
}

/// Is h(n) > g(n) for every integer n >= 1?
///
/// Coefficientwise dominance decides most cases; otherwise the difference is
/// checked pointwise up to max(100, its root bound), beyond which the sign of
/// the (positive) leading coefficient takes over.
fn strictly_above(h: &Polynomial, g: &Polynomial) -> bool {
    let d = h.sub(g);
    if d.is_empty() {
        return false;
    }
    if d.last().unwrap().sign() != Sign::Plus {
        return false;
    }
    if d.iter().all(|c| !c.is_negative()) {
        // sum of coefficients is d(1) > 0
        return true;
    }
    let limit = cauchy_bound(&d).max(100).min(1_000_000);
    (1..=limit).all(|n| {
        let big = BigInt::from(n);
        let mut acc = BigInt::zero();
        for c in d.iter().rev() {
            acc = acc * &big + c;
        }
        acc.sign() == Sign::Plus
    })
}

/// Chain link check: n <= f(n) for all n >= 1, with equality permitted only
/// for the identity polynomial.
fn above_argument(f: &Polynomial) -> bool {
    f.is_identity() || strictly_above(f, &Polynomial::identity())
}

/// Normalize a tuple: find the least shift N >= 0 making every coefficient
/// nonnegative and the evaluations strictly increasing along the tuple, and
/// sort the polynomials into that chain order.
pub fn normalize_tuple(raw: &[Polynomial]) -> Result<PolyTuple> {
    if raw.is_empty() {
        return Err(BhError::ConfigError("tuple must be nonempty".into()));
    }
    for i in 0..raw.len() {
        for j in (i + 1)..raw.len() {
            if raw[i] == raw[j] {
                return Err(BhError::OrderingImpossible);
            }
        }
    }
    const SHIFT_LIMIT: u64 = 100_000;
    for shift in 0..=SHIFT_LIMIT {
        let mut shifted: Vec<Polynomial> =
            raw.iter().map(|f| f.shifted(shift)).collect();
        if shifted
            .iter()
            .any(|f| f.coeffs().iter().any(|c| c.is_negative()))
        {
            continue;
        }
        // Order by value far beyond every pairwise crossing.
        let mut probe: u64 = 101;
        for i in 0..shifted.len() {
            for j in 0..shifted.len() {
                if i != j {
                    let d = shifted[i].sub(&shifted[j]);
                    if !d.is_empty() {
                        probe = probe.max(cauchy_bound(&d).saturating_add(1));
                    }
                }
            }
        }
        shifted.sort_by_cached_key(|f| f.evaluate(probe));
        let ordered = above_argument(&shifted[0])
            && shifted
                .windows(2)
                .all(|w| strictly_above(&w[1], &w[0]));
        if ordered {
            return Ok(PolyTuple {
                polys: shifted,
                shift,
            });
        }
    }
    Err(BhError::ConfigError(
        "no ordering shift found within the search limit".into(),
    ))
}

/// Outcome of the best-effort irreducibility certifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrreducibilityStatus {
    /// Irreducible over Q, witnessed by a prime at which the reduction of the
    /// primitive part stays irreducible.
    Irreducible { witness: u64 },
    /// A nontrivial factorization factor * cofactor == input.
    Reducible {
        factor: Polynomial,
        cofactor: Polynomial,
    },
    /// Neither certificate found within the prime budget.
    Undetermined { primes_tried: Vec<u64> },
}

fn content(f: &Polynomial) -> BigInt {
    let mut g = BigInt::zero();
    for c in f.coeffs() {
        g = g.gcd(c);
    }
    g
}

fn divisors_u64(mut n: u64) -> Option<Vec<u64>> {
    const FACTOR_LIMIT: u64 = 1_000_000_000_000;
    if n == 0 || n > FACTOR_LIMIT {
        return None;
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        factors.push((n, 1));
    }
    let mut divs = vec![1u64];
    for (p, e) in factors {
        let prev = divs.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe = pe.checked_mul(p)?;
            for &q in &prev {
                divs.push(q.checked_mul(pe)?);
            }
        }
    }
    divs.sort_unstable();
    Some(divs)
}

/// Try to peel off a rational root r/s; returns (factor sX - r, cofactor).
fn rational_root_factor(f: &Polynomial) -> Option<(Polynomial, Polynomial)> {
    let a0 = &f.coeffs()[0];
    let lead = f.leading();
    let candidates: Vec<(BigInt, BigInt)> = if a0.is_zero() {
        vec![(BigInt::zero(), BigInt::one())]
    } else {
        let rs = divisors_u64(a0.abs().to_u64()?)?;
        let ss = divisors_u64(lead.to_u64()?)?;
        let mut out = Vec::new();
        for &r in &rs {
            for &s in &ss {
                if r.gcd(&s) != 1 {
                    continue;
                }
                out.push((BigInt::from(r), BigInt::from(s)));
                out.push((-BigInt::from(r), BigInt::from(s)));
            }
        }
        out
    };
    for (r, s) in candidates {
        let root = BigRational::new(r.clone(), s.clone());
        let mut acc = BigRational::zero();
        for c in f.coeffs().iter().rev() {
            acc = acc * &root + BigRational::from_integer(c.clone());
        }
        if !acc.is_zero() {
            continue;
        }
        // factor = sX - r; cofactor by exact synthetic division over Q
        let factor = Polynomial::new(vec![-r, s]).ok()?;
        let mut quo: Vec<BigRational> = vec![BigRational::zero(); f.degree()];
        let mut rem = BigRational::zero();
        let fl = BigRational::from_integer(factor.leading().clone());
        let fc = BigRational::from_integer(factor.coeffs()[0].clone());
        for i in (0..f.coeffs().len()).rev() {
            let cur = BigRational::from_integer(f.coeffs()[i].clone()) + rem;
            if i == 0 {
                rem = cur;
            } else {
                let q = cur / &fl;
                rem = -&q * &fc;
                quo[i - 1] = q;
            }
        }
        if !rem.is_zero() {
            continue;
        }
        let ints: Option<Vec<BigInt>> = quo
            .into_iter()
            .map(|q| q.is_integer().then(|| q.to_integer()))
            .collect();
        let cofactor = Polynomial::new(ints?).ok()?;
        return Some((factor, cofactor));
    }
    None
}

/// Best-effort certification against the first `budget` usable primes.
pub fn irreducibility_status(f: &Polynomial, budget: usize) -> IrreducibilityStatus {
    assert!(f.degree() >= 1);
    if f.degree() == 1 {
        let mut p = 2u64;
        loop {
            if crate::sieve::is_prime(p) && !(f.leading() % BigInt::from(p)).is_zero() {
                return IrreducibilityStatus::Irreducible { witness: p };
            }
            p += 1;
        }
    }
    if let Some((factor, cofactor)) = rational_root_factor(f) {
        debug_assert_eq!(factor.mul(&cofactor), *f);
        return IrreducibilityStatus::Reducible { factor, cofactor };
    }
    let cont = content(f);
    let primitiveg: Vec<BigInt> = f.coeffs().iter().map(|c| c / &cont).collect();
    let primitive = Polynomial::new(primitiveg).expect("primitive part is a valid polynomial");
    let mut tried = Vec::new();
    let mut p = 2u64;
    while tried.len() < budget {
        if crate::sieve::is_prime(p) && !(primitive.leading() % BigInt::from(p)).is_zero() {
            tried.push(p);
            let reduced = crate::modpoly::reduce(&primitive, p);
            if crate::modpoly::degree(&reduced) == Some(primitive.degree())
                && crate::modpoly::is_irreducible(&reduced, p)
            {
                return IrreducibilityStatus::Irreducible { witness: p };
            }
        }
        p += 1;
    }
    IrreducibilityStatus::Undetermined { primes_tried: tried }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_i64(coeffs).unwrap()
    }

    #[test]
    fn evaluate_direct() {
        assert_eq!(poly(&[1, 0, 1]).evaluate(3), BigInt::from(10)); // X^2+1 at 3
        assert_eq!(poly(&[0, 1]).evaluate(7), BigInt::from(7));
        assert_eq!(poly(&[5, 1, 0, 2]).evaluate(10), BigInt::from(2015)); // 2X^3+X+5
    }

    #[test]
    fn evaluate_u64_checked() {
        let f = poly(&[5, 1, 0, 2]);
        assert_eq!(f.evaluate_u64(10), Some(2015));
        assert_eq!(f.evaluate_u64(u64::MAX / 2), None);
    }

    #[test]
    fn parse_and_display() {
        for (s, c) in [
            ("X^2+1", vec![1i64, 0, 1]),
            ("2X^3+X+5", vec![5, 1, 0, 2]),
            ("X^2-2X+2", vec![2, -2, 1]),
            ("X", vec![0, 1]),
            ("x + 2", vec![2, 1]),
        ] {
            assert_eq!(Polynomial::parse(s).unwrap(), poly(&c), "{s}");
        }
        assert_eq!(poly(&[1, 0, 1]).to_string(), "X^2+1");
        assert_eq!(poly(&[5, 1, 0, 2]).to_string(), "2X^3+X+5");
        assert_eq!(poly(&[2, -2, 1]).to_string(), "X^2-2X+2");
        assert!(Polynomial::parse("7").is_err()); // constant
        assert!(Polynomial::parse("-X").is_err()); // negative lead
    }

    #[test]
    fn shift_expansion() {
        // (X+1)^2 - 2(X+1) + 2 = X^2 + 1
        assert_eq!(poly(&[2, -2, 1]).shifted(1), poly(&[1, 0, 1]));
    }

    #[test]
    fn normalize_ordered_pair() {
        let t = normalize_tuple(&[poly(&[0, 1]), poly(&[2, 1])]).unwrap();
        assert_eq!(t.shift(), 0);
        assert_eq!(t.polys()[0], poly(&[0, 1]));
        assert_eq!(t.polys()[1], poly(&[2, 1]));
    }

    #[test]
    fn normalize_sorts() {
        let t = normalize_tuple(&[poly(&[2, 1]), poly(&[0, 1])]).unwrap();
        assert_eq!(t.shift(), 0);
        assert_eq!(t.polys()[0], poly(&[0, 1]));
        assert_eq!(t.polys()[1], poly(&[2, 1]));
    }

    #[test]
    fn normalize_shifts_negative_coeffs() {
        let t = normalize_tuple(&[poly(&[2, -2, 1])]).unwrap();
        assert_eq!(t.shift(), 1);
        assert_eq!(t.polys()[0], poly(&[1, 0, 1]));
    }

    #[test]
    fn normalize_rejects_duplicates() {
        assert!(matches!(
            normalize_tuple(&[poly(&[0, 1]), poly(&[0, 1])]),
            Err(BhError::OrderingImpossible)
        ));
    }

    #[test]
    fn normalize_resolves_crossing() {
        // X^2 and 2X cross at n=2; a shift restores a global order.
        let t = normalize_tuple(&[poly(&[0, 0, 1]), poly(&[0, 2])]).unwrap();
        for n in 1..=10_000u64 {
            let a = t.polys()[0].evaluate(n);
            let b = t.polys()[1].evaluate(n);
            assert!(BigInt::from(n) <= a && a < b, "n={n}");
        }
    }

    #[test]
    fn chain_holds_for_normalized_tuples() {
        let cases: Vec<Vec<Polynomial>> = vec![
            vec![poly(&[0, 1]), poly(&[2, 1])],
            vec![poly(&[1, 0, 1])],
            vec![poly(&[0, 1]), poly(&[1, 0, 1]), poly(&[5, 1, 0, 2])],
            vec![poly(&[2, -2, 1]), poly(&[0, 1])],
        ];
        for raw in cases {
            let t = normalize_tuple(&raw).unwrap();
            for n in 1..=10_000u64 {
                let mut prev = BigInt::from(n);
                for (j, f) in t.polys().iter().enumerate() {
                    let v = f.evaluate(n);
                    if j == 0 && f.is_identity() {
                        assert_eq!(v, prev);
                    } else {
                        assert!(v > prev, "chain broken at n={n}: {t}");
                    }
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn irreducibility_x2_plus_1() {
        let st = irreducibility_status(&poly(&[1, 0, 1]), 10);
        assert_eq!(st, IrreducibilityStatus::Irreducible { witness: 3 });
    }

    #[test]
    fn irreducibility_degree_one() {
        let st = irreducibility_status(&poly(&[2, 1]), 10);
        assert!(matches!(st, IrreducibilityStatus::Irreducible { witness: 2 }));
    }

    #[test]
    fn reducible_with_rational_root() {
        let f = poly(&[-1, 0, 1]); // X^2 - 1... leading positive, constant -1
        match irreducibility_status(&f, 10) {
            IrreducibilityStatus::Reducible { factor, cofactor } => {
                assert_eq!(factor.mul(&cofactor), f);
                assert_eq!(factor, poly(&[-1, 1])); // X - 1
            }
            other => panic!("expected Reducible, got {other:?}"),
        }
    }

    #[test]
    fn reducible_product_reproduces_input() {
        // 2X^2 - 2 = (X - 1)(2X + 2)
        let f = poly(&[-2, 0, 2]);
        match irreducibility_status(&f, 10) {
            IrreducibilityStatus::Reducible { factor, cofactor } => {
                assert_eq!(factor.mul(&cofactor), f);
            }
            other => panic!("expected Reducible, got {other:?}"),
        }
    }

    #[test]
    fn undetermined_x4_x2_1() {
        // X^4+X^2+1 = (X^2+X+1)(X^2-X+1): no rational root, reducible mod
        // every prime, so no budget can certify either way.
        let st = irreducibility_status(&poly(&[1, 0, 1, 0, 1]), 25);
        match st {
            IrreducibilityStatus::Undetermined { primes_tried } => {
                assert_eq!(primes_tried.len(), 25);
                assert_eq!(&primes_tried[..4], &[2, 3, 5, 7]);
            }
            other => panic!("expected Undetermined, got {other:?}"),
        }
    }

    #[test]
    fn content_hash_is_stable() {
        let t1 = normalize_tuple(&[poly(&[0, 1]), poly(&[2, 1])]).unwrap();
        let t2 = normalize_tuple(&[poly(&[2, 1]), poly(&[0, 1])]).unwrap();
        assert_eq!(t1.content_hash(), t2.content_hash());
        assert_eq!(t1.short_hash().len(), 16);
    }
}
