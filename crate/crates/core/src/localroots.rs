//! Exact root counts mod p: rho_p(f), nu_p for a tuple, and the root sets.
//!
//! Small primes go through exhaustive evaluation; larger primes use
//! gcd(X^p - X, f mod p), whose degree counts the distinct roots because
//! X^p - X is the product of (X - a) over all residues.

use crate::error::{BhError, Result};
use crate::modpoly;
use crate::polyarith::{PolyTuple, Polynomial};
use crate::sieve::is_prime;
use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

/// Point queries below this bound run the exhaustive residue scan.
pub const POINT_CROSSOVER: u64 = 50;
/// Root extraction below this bound runs the exhaustive residue scan.
pub const ROOTS_CROSSOVER: u64 = 10_000;

/// Per-prime local data for a tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub p: u64,
    /// rho_p(f_j) per tuple member.
    pub rho: Vec<u64>,
    /// Residues killing the product f_1 ... f_k.
    pub nu: u64,
    /// Root sets Z_p(f_j), when requested.
    pub roots: Option<Vec<Vec<u64>>>,
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(BhError::NotPrime(p))
    }
}

/// Number of residues n mod p with f(n) = 0 mod p.
pub fn rho_p(f: &Polynomial, p: u64) -> Result<u64> {
    check_prime(p)?;
    let fp = modpoly::reduce(f, p);
    Ok(rho_reduced(&fp, p))
}

fn rho_reduced(fp: &[u64], p: u64) -> u64 {
    match modpoly::degree(fp) {
        None => p,      // f vanishes identically mod p
        Some(0) => 0,   // nonzero constant
        Some(1) => 1,
        Some(_) if p < POINT_CROSSOVER => (0..p).filter(|&n| modpoly::eval(fp, n, p) == 0).count() as u64,
        Some(_) => modpoly::degree(&modpoly::linear_root_part(fp, p)).unwrap_or(0) as u64,
    }
}

/// Number of residues n mod p killing the product over the tuple.
pub fn nu_p(tuple: &PolyTuple, p: u64) -> Result<u64> {
    check_prime(p)?;
    let reduced: Vec<Vec<u64>> = tuple.polys().iter().map(|f| modpoly::reduce(f, p)).collect();
    if reduced.iter().any(|f| f.is_empty()) {
        return Ok(p);
    }
    if p < POINT_CROSSOVER {
        return Ok((0..p)
            .filter(|&n| reduced.iter().any(|f| modpoly::eval(f, n, p) == 0))
            .count() as u64);
    }
    // All reduced parts linear: read the roots off directly.
    if reduced.iter().all(|f| f.len() <= 2) {
        let mut roots: Vec<u64> = reduced
            .iter()
            .filter(|f| f.len() == 2)
            .map(|f| linear_root(f, p))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        return Ok(roots.len() as u64);
    }
    let mut product = vec![1u64];
    for f in &reduced {
        product = modpoly::mul(&product, f, p);
    }
    Ok(rho_reduced(&product, p))
}

fn linear_root(f: &[u64], p: u64) -> u64 {
    debug_assert_eq!(f.len(), 2);
    // a n + b = 0  =>  n = -b / a
    let neg_b = (p - f[0]) % p;
    crate::sieve::mul_mod(neg_b, modpoly::inv_mod(f[1], p), p)
}

/// The exact root set Z_p(f), ascending.
pub fn roots_mod_p(f: &Polynomial, p: u64) -> Result<Vec<u64>> {
    check_prime(p)?;
    let fp = modpoly::reduce(f, p);
    Ok(roots_reduced(&fp, p))
}

fn roots_reduced(fp: &[u64], p: u64) -> Vec<u64> {
    match modpoly::degree(fp) {
        None => (0..p).collect(),
        Some(0) => vec![],
        Some(1) => vec![linear_root(fp, p)],
        Some(_) if p < ROOTS_CROSSOVER => {
            (0..p).filter(|&n| modpoly::eval(fp, n, p) == 0).collect()
        }
        Some(_) => {
            let g = modpoly::linear_root_part(fp, p);
            modpoly::split_linear_factors(&g, p)
        }
    }
}

/// Compute rho, nu, and optionally the root sets at one prime.
pub fn local_data(tuple: &PolyTuple, p: u64, with_roots: bool) -> Result<LocalData> {
    check_prime(p)?;
    let rho: Vec<u64> = tuple
        .polys()
        .iter()
        .map(|f| rho_p(f, p))
        .collect::<Result<_>>()?;
    let nu = nu_p(tuple, p)?;
    let roots = if with_roots {
        let sets: Vec<Vec<u64>> = tuple
            .polys()
            .iter()
            .map(|f| roots_mod_p(f, p))
            .collect::<Result<_>>()?;
        Some(sets)
    } else {
        None
    };
    debug_assert!(rho.iter().all(|&r| r <= p));
    debug_assert!(*rho.iter().max().unwrap() <= nu);
    debug_assert!(nu <= p.min(rho.iter().sum()));
    Ok(LocalData { p, rho, nu, roots })
}

/// Largest prime p <= bound at which the root sets of distinct members
/// overlap, i.e. nu_p < sum rho_p. None when the sets are disjoint
/// throughout (the expected behavior for all but finitely many primes).
pub fn largest_split_violation(
    tuple: &PolyTuple,
    primes: &crate::sieve::PrimeTable,
    bound: u64,
) -> Result<Option<u64>> {
    let mut worst = None;
    for &p in primes.as_slice() {
        if p > bound {
            break;
        }
        let data = local_data(tuple, p, false)?;
        if data.nu < data.rho.iter().sum::<u64>().min(p) {
            worst = Some(p);
        }
    }
    Ok(worst)
}

/// On-disk cache of (rho, nu) rows keyed by the tuple content hash.
///
/// File format: `# bh-lab local v1 <hash>` then `p,rho_1,...,rho_k,nu`
/// lines ascending in p. Only primes up to [`LocalCache::MAX_CACHED_P`]
/// are persisted; correctness never depends on a hit.
#[derive(Debug)]
pub struct LocalCache {
    hash: String,
    k: usize,
    entries: BTreeMap<u64, (Vec<u64>, u64)>,
    dirty: bool,
}

impl LocalCache {
    pub const MAX_CACHED_P: u64 = 1_000_000;

    fn file_name(dir: &Path, hash: &str) -> PathBuf {
        dir.join(format!("local-{}.txt", &hash[..16]))
    }

    /// Open the cache for a tuple, loading any existing rows whose header
    /// hash matches.
    pub fn open(dir: &Path, tuple: &PolyTuple) -> Result<Self> {
        let hash = tuple.content_hash();
        let mut cache = Self {
            hash: hash.clone(),
            k: tuple.k(),
            entries: BTreeMap::new(),
            dirty: false,
        };
        let path = Self::file_name(dir, &hash);
        if !path.exists() {
            return Ok(cache);
        }
        let file = fs::File::open(&path)?;
        let mut lines = BufReader::new(file).lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header != format!("# bh-lab local v1 {hash}") {
            return Ok(cache); // stale or foreign file: recompute
        }
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<u64> = line
                .split(',')
                .map(|s| s.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| BhError::ConfigError(format!("bad cache line: {line}")))?;
            if fields.len() != tuple.k() + 2 {
                return Err(BhError::ConfigError(format!("bad cache line: {line}")));
            }
            let p = fields[0];
            let nu = fields[fields.len() - 1];
            let rho = fields[1..fields.len() - 1].to_vec();
            cache.entries.insert(p, (rho, nu));
        }
        Ok(cache)
    }

    /// Cached (rho, nu) at p, computing and recording on a miss.
    pub fn get_or_compute(&mut self, tuple: &PolyTuple, p: u64) -> Result<(Vec<u64>, u64)> {
        if let Some((rho, nu)) = self.entries.get(&p) {
            return Ok((rho.clone(), *nu));
        }
        let data = local_data(tuple, p, false)?;
        if p <= Self::MAX_CACHED_P {
            self.entries.insert(p, (data.rho.clone(), data.nu));
            self.dirty = true;
        }
        Ok((data.rho, data.nu))
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Persist all rows, ascending in p.
    pub fn flush(&mut self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        writeln!(out, "# bh-lab local v1 {}", self.hash)?;
        for (p, (rho, nu)) in &self.entries {
            let rho_s: Vec<String> = rho.iter().map(|r| r.to_string()).collect();
            writeln!(out, "{p},{},{nu}", rho_s.join(","))?;
        }
        fs::write(Self::file_name(dir, &self.hash), out)?;
        self.dirty = false;
        let _ = self.k;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::normalize_tuple;
    use crate::sieve::PrimeTable;

    fn poly(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_i64(coeffs).unwrap()
    }

    fn tuple(polys: &[&[i64]]) -> PolyTuple {
        let raw: Vec<Polynomial> = polys.iter().map(|c| poly(c)).collect();
        normalize_tuple(&raw).unwrap()
    }

    #[test]
    fn rho_x2_plus_1() {
        let f = poly(&[1, 0, 1]);
        assert_eq!(rho_p(&f, 5).unwrap(), 2);
        assert_eq!(rho_p(&f, 3).unwrap(), 0);
        assert_eq!(rho_p(&f, 13).unwrap(), 2);
    }

    #[test]
    fn rho_rejects_composite() {
        assert!(matches!(rho_p(&poly(&[1, 0, 1]), 6), Err(BhError::NotPrime(6))));
    }

    #[test]
    fn rho_degenerate_reductions() {
        // 2X + 2 mod 2 is the zero polynomial: all residues are roots
        assert_eq!(rho_p(&poly(&[2, 2]), 2).unwrap(), 2);
        // 2X + 1 mod 2 is the nonzero constant 1: no roots
        assert_eq!(rho_p(&poly(&[1, 2]), 2).unwrap(), 0);
    }

    #[test]
    fn nu_small_tuples() {
        assert_eq!(nu_p(&tuple(&[&[0, 1], &[2, 1]]), 2).unwrap(), 1);
        assert_eq!(nu_p(&tuple(&[&[0, 1], &[2, 1]]), 3).unwrap(), 2);
        assert_eq!(nu_p(&tuple(&[&[0, 1], &[1, 1]]), 2).unwrap(), 2);
    }

    #[test]
    fn roots_examples() {
        assert_eq!(roots_mod_p(&poly(&[1, 0, 1]), 13).unwrap(), vec![5, 8]);
        assert_eq!(roots_mod_p(&poly(&[2, 1]), 7).unwrap(), vec![5]);
        assert_eq!(roots_mod_p(&poly(&[1, 0, 1]), 7).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn roots_above_crossover_match_exhaustive() {
        let p = 10_007u64; // first prime above the extraction crossover
        for f in [poly(&[1, 0, 1]), poly(&[3, 1, 0, 1]), poly(&[-4, 0, 0, 0, 1])] {
            let fast = roots_mod_p(&f, p).unwrap();
            let fp = modpoly::reduce(&f, p);
            let slow: Vec<u64> = (0..p).filter(|&n| modpoly::eval(&fp, n, p) == 0).collect();
            assert_eq!(fast, slow, "{f}");
        }
    }

    #[test]
    fn gcd_route_matches_exhaustive_counts() {
        // seeded corpus of 50 random tuples, degree <= 4, k <= 3
        let mut stream = crate::rng::Stream::new(0xC0FFEE);
        let primes = PrimeTable::up_to(200);
        let mut checked = 0;
        while checked < 50 {
            let k = 1 + (stream.next_below(3)) as usize;
            let mut raw = Vec::new();
            for _ in 0..k {
                let deg = 1 + stream.next_below(4) as usize;
                let mut coeffs: Vec<i64> =
                    (0..deg).map(|_| stream.next_below(21) as i64 - 10).collect();
                coeffs.push(1 + stream.next_below(5) as i64);
                raw.push(Polynomial::from_i64(&coeffs).unwrap());
            }
            let Ok(t) = normalize_tuple(&raw) else { continue };
            checked += 1;
            for &p in primes.as_slice() {
                let fast_nu = nu_p(&t, p).unwrap();
                let slow_nu = (0..p)
                    .filter(|&n| {
                        t.polys().iter().any(|f| {
                            let fp = modpoly::reduce(f, p);
                            modpoly::eval(&fp, n, p) == 0
                        })
                    })
                    .count() as u64;
                assert_eq!(fast_nu, slow_nu, "nu mismatch at p={p} for {t}");
                for f in t.polys() {
                    let fp = modpoly::reduce(f, p);
                    let slow_rho =
                        (0..p).filter(|&n| modpoly::eval(&fp, n, p) == 0).count() as u64;
                    assert_eq!(rho_p(f, p).unwrap(), slow_rho, "rho mismatch at p={p}");
                    assert_eq!(
                        roots_mod_p(f, p).unwrap().len() as u64,
                        slow_rho,
                        "|roots| != rho at p={p}"
                    );
                }
                let data = local_data(&t, p, true).unwrap();
                let mut union: Vec<u64> = data.roots.unwrap().concat();
                union.sort_unstable();
                union.dedup();
                assert_eq!(union.len() as u64, data.nu, "nu != |union| at p={p}");
            }
        }
    }

    #[test]
    fn disjointness_trend_for_twin_tuple() {
        let t = tuple(&[&[0, 1], &[2, 1]]);
        let primes = PrimeTable::up_to(200);
        // X and X+2 share the root only at p = 2
        assert_eq!(largest_split_violation(&t, &primes, 200).unwrap(), Some(2));
        for &p in primes.as_slice() {
            if p > 2 {
                let d = local_data(&t, p, false).unwrap();
                assert_eq!(d.nu, d.rho.iter().sum::<u64>());
            }
        }
    }

    #[test]
    fn cache_roundtrip_and_consistency() {
        let dir = tempfile::tempdir().unwrap();
        let t = tuple(&[&[0, 1], &[2, 1]]);
        let mut cache = LocalCache::open(dir.path(), &t).unwrap();
        let cold = cache.get_or_compute(&t, 101).unwrap();
        cache.flush(dir.path()).unwrap();
        let mut warm = LocalCache::open(dir.path(), &t).unwrap();
        assert_eq!(warm.len(), 1);
        assert_eq!(warm.get_or_compute(&t, 101).unwrap(), cold);
        // fresh computation agrees with the cached row
        let fresh = local_data(&t, 101, false).unwrap();
        assert_eq!((fresh.rho, fresh.nu), cold);
    }
}
