//! Prime generation and segmented residue-class sieving.
//!
//! Everything downstream (singular series, the random-set models, the
//! statistics module) pulls primes and bulk membership bitmaps from here.

use crate::error::{BhError, Result};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Numbers per sieve segment; sized so a segment bitmap stays cache resident.
pub const SEGMENT_SIZE: u64 = 1 << 20;

/// Deterministic Miller-Rabin, valid for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Ascending table of all primes up to a bound.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// All primes `<= bound` via a segmented sieve of Eratosthenes.
    pub fn up_to(bound: u64) -> Self {
        assert!(bound >= 2, "prime table bound must be >= 2");
        let root = (bound as f64).sqrt() as u64 + 2;
        let base = simple_sieve(root.min(bound));
        if bound <= root {
            let primes = base.into_iter().filter(|&p| p <= bound).collect();
            return Self { bound, primes };
        }
        let mut primes = base.clone();
        let mut lo = root + 1;
        let mut mark = vec![false; SEGMENT_SIZE as usize];
        while lo <= bound {
            let hi = (lo + SEGMENT_SIZE - 1).min(bound);
            let len = (hi - lo + 1) as usize;
            mark[..len].fill(false);
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let mut m = lo.div_ceil(p) * p;
                if m < p * p {
                    m = p * p;
                }
                while m <= hi {
                    mark[(m - lo) as usize] = true;
                    m += p;
                }
            }
            for (i, &composite) in mark[..len].iter().enumerate() {
                if !composite {
                    primes.push(lo + i as u64);
                }
            }
            lo = hi + 1;
        }
        Self { bound, primes }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `<= limit` (limit must not exceed the table bound).
    pub fn up_to_limit(&self, limit: f64) -> &[u64] {
        assert!(
            limit <= self.bound as f64,
            "prime table bound {} is below requested limit {limit}",
            self.bound
        );
        &self.primes[..self.count_below(limit)]
    }

    /// Number of table primes `p` with `p as f64 <= limit`.
    pub fn count_below(&self, limit: f64) -> usize {
        self.primes.partition_point(|&p| (p as f64) <= limit)
    }

    /// Write the cache file format: a header line, then one prime per line.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = Vec::with_capacity(self.primes.len() * 8);
        writeln!(out, "# primes<={} v1", self.bound)?;
        for &p in &self.primes {
            writeln!(out, "{p}")?;
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Load a cache file previously written by [`PrimeTable::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| BhError::ConfigError("empty prime cache file".into()))?;
        let bound = header
            .strip_prefix("# primes<=")
            .and_then(|s| s.strip_suffix(" v1"))
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| BhError::ConfigError(format!("bad prime cache header: {header}")))?;
        let mut primes = Vec::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            primes.push(
                line.parse::<u64>()
                    .map_err(|_| BhError::ConfigError(format!("bad prime cache line: {line}")))?,
            );
        }
        Ok(Self { bound, primes })
    }
}

fn simple_sieve(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Packed bitmap over an inclusive integer range `[lo, hi]`.
///
/// This is the exchange format between the sieve kernels and the random-set
/// models: bit `(m - lo)` records membership of `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    lo: u64,
    hi: u64,
    words: Vec<u64>,
}

impl Bitmap {
    pub fn new(lo: u64, hi: u64) -> Self {
        assert!(lo <= hi, "bitmap range is empty");
        let bits = hi - lo + 1;
        Self {
            lo,
            hi,
            words: vec![0; bits.div_ceil(64) as usize],
        }
    }

    pub fn filled(lo: u64, hi: u64) -> Self {
        let mut b = Self::new(lo, hi);
        for w in &mut b.words {
            *w = u64::MAX;
        }
        b.clear_tail();
        b
    }

    fn clear_tail(&mut self) {
        let bits = self.hi - self.lo + 1;
        let rem = (bits % 64) as u32;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn contains_index(&self, m: u64) -> bool {
        m >= self.lo && m <= self.hi
    }

    #[inline]
    pub fn get(&self, m: u64) -> bool {
        debug_assert!(self.contains_index(m));
        let off = m - self.lo;
        self.words[(off / 64) as usize] >> (off % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, m: u64) {
        debug_assert!(self.contains_index(m));
        let off = m - self.lo;
        self.words[(off / 64) as usize] |= 1 << (off % 64);
    }

    #[inline]
    pub fn clear(&mut self, m: u64) {
        debug_assert!(self.contains_index(m));
        let off = m - self.lo;
        self.words[(off / 64) as usize] &= !(1 << (off % 64));
    }

    /// Clear every m in range with `m % p == r`.
    pub fn clear_residue_class(&mut self, p: u64, r: u64, from: u64, to: u64) {
        let from = from.max(self.lo);
        let to = to.min(self.hi);
        if from > to {
            return;
        }
        let mut m = if from % p <= r {
            from - from % p + r
        } else {
            from - from % p + p + r
        };
        while m <= to {
            self.clear(m);
            m += p;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        (self.lo..=self.hi).filter(move |&m| self.get(m))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_raw(lo: u64, hi: u64, words: Vec<u64>) -> Self {
        let bits = hi - lo + 1;
        assert_eq!(words.len() as u64, bits.div_ceil(64));
        Self { lo, hi, words }
    }
}

/// Prime membership bitmap over `[0, bound]`, for oracle-mode hit counting.
pub fn prime_bitmap(table: &PrimeTable, bound: u64) -> Bitmap {
    assert!(bound <= table.bound());
    let mut b = Bitmap::new(0, bound);
    for &p in table.as_slice() {
        if p > bound {
            break;
        }
        b.set(p);
    }
    b
}

/// Sieving family: for each prime `p <= z`, a set of residues to avoid.
#[derive(Debug, Clone)]
pub struct ResidueFamily {
    z: f64,
    /// (p, avoided residues mod p), ascending in p.
    classes: Vec<(u64, Vec<u64>)>,
}

impl ResidueFamily {
    /// Caps class counts at `min(p - 1, cap)`; residues must lie in `[0, p)`.
    pub fn new(z: f64, classes: Vec<(u64, Vec<u64>)>, cap: usize) -> Result<Self> {
        for (p, set) in &classes {
            if !is_prime(*p) {
                return Err(BhError::NotPrime(*p));
            }
            if (*p as f64) > z {
                return Err(BhError::ConfigError(format!("class prime {p} exceeds z={z}")));
            }
            let bound = cap.min(*p as usize - 1);
            if set.len() > bound {
                return Err(BhError::ConfigError(format!(
                    "{} classes mod {p} exceeds the bound {bound}",
                    set.len()
                )));
            }
            if set.iter().any(|&r| r >= *p) {
                return Err(BhError::ConfigError(format!("residue out of range mod {p}")));
            }
        }
        Ok(Self { z, classes })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn classes(&self) -> &[(u64, Vec<u64>)] {
        &self.classes
    }

    /// The single class `{0}` for every prime `p <= z`.
    pub fn zero_classes(table: &PrimeTable, z: f64) -> Self {
        let classes = table
            .up_to_limit(z)
            .iter()
            .map(|&p| (p, vec![0u64]))
            .collect();
        Self { z, classes }
    }
}

/// Survivors of the family over `(v, v+w]`: n with `n mod p` outside every
/// avoided class.
pub fn sieve_avoid(family: &ResidueFamily, v: u64, w: u64) -> Bitmap {
    assert!(w >= 1, "window must be nonempty");
    let lo = v + 1;
    let hi = v + w;
    let mut survivors = Bitmap::filled(lo, hi);
    let mut seg_lo = lo;
    while seg_lo <= hi {
        let seg_hi = (seg_lo + SEGMENT_SIZE - 1).min(hi);
        for (p, residues) in &family.classes {
            for &r in residues {
                survivors.clear_residue_class(*p, r, seg_lo, seg_hi);
            }
        }
        seg_lo = seg_hi + 1;
    }
    survivors
}

/// Sieve count versus the product main term.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SegmentReport {
    pub v: u64,
    pub w: u64,
    pub z: f64,
    pub exact: u64,
    pub predicted: f64,
    pub ratio: f64,
    pub u: f64,
}

/// Exact survivor count over `(v, v+w]` against `w * prod (1 - |I_p|/p)`.
///
/// The predicted term and the ratio are evaluated as exact rationals before
/// conversion, so a full-period window reports ratio 1 exactly.
pub fn lemma22_report(family: &ResidueFamily, v: u64, w: u64) -> SegmentReport {
    use num_bigint::BigUint;
    use num_rational::Ratio;
    use num_traits::ToPrimitive;

    let exact = sieve_avoid(family, v, w).count_ones();
    let mut num = BigUint::from(w);
    let mut den = BigUint::from(1u32);
    for (p, residues) in &family.classes {
        num *= BigUint::from(*p - residues.len() as u64);
        den *= BigUint::from(*p);
    }
    let predicted = Ratio::new(num.clone(), den.clone());
    let ratio = if num == BigUint::from(0u32) {
        f64::NAN
    } else {
        Ratio::new(BigUint::from(exact) * den, num)
            .to_f64()
            .unwrap_or(f64::NAN)
    };
    SegmentReport {
        v,
        w,
        z: family.z,
        exact,
        predicted: predicted.to_f64().unwrap_or(f64::NAN),
        ratio,
        u: (w as f64).ln() / family.z.ln(),
    }
}

/// True iff some prime `p <= t` divides m. By convention 1 has no prime
/// factor; 0 is rejected because it is divisible by everything.
pub fn has_small_factor(table: &PrimeTable, m: u64, t: f64) -> bool {
    assert!(m >= 1, "has_small_factor is undefined at 0");
    for &p in table.up_to_limit(t.min(table.bound() as f64)) {
        if (p as f64) > t {
            break;
        }
        if m % p == 0 {
            return true;
        }
        if p * p > m {
            break;
        }
    }
    false
}

/// Bulk form of [`has_small_factor`] over `[lo, hi]`: bit set iff the value
/// has a prime factor `<= t`.
pub fn small_factor_bitmap(table: &PrimeTable, lo: u64, hi: u64, t: f64) -> Bitmap {
    assert!(lo >= 1);
    let mut marked = Bitmap::new(lo, hi);
    for &p in table.up_to_limit(t) {
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            marked.set(m);
            m += p;
        }
    }
    marked
}
