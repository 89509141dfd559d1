//! Analytic constants and predictions: the Mertens product, truncated
//! singular series with a two-estimator error spread, the integral main
//! term, and the threshold functions used by the random-set models.

pub mod extprec;
pub mod quad;

use crate::error::{BhError, Result};
use crate::localroots::{self, LocalCache};
use crate::polyarith::{PolyTuple, Polynomial};
use crate::sieve::PrimeTable;
use extprec::BigFixed;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const EXP_GAMMA: f64 = 1.781_072_417_990_198;
/// 1 / e^gamma, the exponent calibrating z(x) so that 1/Theta_z(x) ~ log x.
pub const INV_EXP_GAMMA: f64 = 0.561_459_483_566_885_2;

/// Compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    s: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }

    pub fn value(&self) -> f64 {
        self.s
    }
}

/// Cumulative Mertens products over a prime table: Theta_z for any z up to
/// the table bound, exact over the cached primes.
#[derive(Debug, Clone)]
pub struct ThetaTable {
    primes: Arc<PrimeTable>,
    cum: Vec<f64>,
}

impl ThetaTable {
    pub fn new(primes: Arc<PrimeTable>) -> Self {
        let mut cum = Vec::with_capacity(primes.len() + 1);
        cum.push(1.0);
        for &p in primes.as_slice() {
            let last = *cum.last().unwrap();
            cum.push(last * (1.0 - 1.0 / p as f64));
        }
        Self { primes, cum }
    }

    pub fn primes(&self) -> &PrimeTable {
        &self.primes
    }

    pub fn primes_arc(&self) -> Arc<PrimeTable> {
        Arc::clone(&self.primes)
    }

    /// Theta_z = prod_{p <= z} (1 - 1/p); the empty product is 1.
    pub fn theta(&self, z: f64) -> f64 {
        self.cum[self.primes.count_below(z)]
    }
}

/// V_H(z) = prod_{p <= z} (1 - |H mod p| / p) for a nonempty shift set.
pub fn v_h(table: &ThetaTable, shifts: &[i64], z: f64) -> f64 {
    assert!(!shifts.is_empty(), "shift set must be nonempty");
    let mut product = 1.0;
    for &p in table.primes.up_to_limit(z) {
        let mut classes: Vec<u64> = shifts.iter().map(|&h| h.rem_euclid(p as i64) as u64).collect();
        classes.sort_unstable();
        classes.dedup();
        product *= 1.0 - classes.len() as f64 / p as f64;
    }
    product
}

fn content_prime_factors(tuple: &PolyTuple) -> Result<Vec<u64>> {
    use num_integer::Integer;
    use num_traits::{Signed, ToPrimitive, Zero};
    let mut out = Vec::new();
    for f in tuple.polys() {
        let mut g = num_bigint::BigInt::zero();
        for c in f.coeffs() {
            g = g.gcd(c);
        }
        let mut content = g.abs().to_u64().ok_or_else(|| {
            BhError::ConfigError("coefficient content too large to factor".into())
        })?;
        let mut d = 2u64;
        while d * d <= content {
            if content % d == 0 {
                out.push(d);
                while content % d == 0 {
                    content /= d;
                }
            }
            d += 1;
        }
        if content > 1 {
            out.push(content);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Admissibility: nu_p < p for every prime. Only p <= sum of degrees can
/// fail this through root counts, and only primes dividing a coefficient
/// content can fail it through a vanishing reduction; both sets are checked.
pub fn check_admissible(tuple: &PolyTuple) -> Result<()> {
    let mut candidates: Vec<u64> = PrimeTable::up_to(tuple.degree_sum().max(2) as u64)
        .as_slice()
        .iter()
        .copied()
        .filter(|&p| p <= tuple.degree_sum() as u64)
        .collect();
    candidates.extend(content_prime_factors(tuple)?);
    candidates.sort_unstable();
    candidates.dedup();
    for p in candidates {
        if localroots::nu_p(tuple, p)? == p {
            return Err(BhError::Inadmissible(p));
        }
    }
    Ok(())
}

/// Truncated singular series with both estimators.
#[derive(Debug, Clone, Serialize)]
pub struct SingularSeriesEstimate {
    /// Headline value: the mertens-normalized estimator.
    pub value: f64,
    pub cutoff: u64,
    /// prod_{p <= P} (1 - nu_p/p)(1 - 1/p)^(-k)
    pub direct: f64,
    /// e^(gamma k) (log P)^k prod_{p <= P} (1 - nu_p/p)
    pub mertens: f64,
    /// |direct - mertens|, the reported uncertainty proxy.
    pub spread: f64,
}

/// Both truncated-product estimators of the singular series at the cutoff.
///
/// The per-prime local data comes from the cache when one is supplied;
/// results are identical either way.
pub fn singular_series(
    tuple: &PolyTuple,
    cutoff: u64,
    primes: &PrimeTable,
    mut cache: Option<&mut LocalCache>,
) -> Result<SingularSeriesEstimate> {
    check_admissible(tuple)?;
    assert!(cutoff >= 2 && cutoff <= primes.bound());
    let k = tuple.k() as f64;
    let mut log_direct = KahanSum::default();
    let mut log_sieved = KahanSum::default();
    for &p in primes.as_slice() {
        if p > cutoff {
            break;
        }
        let nu = match cache.as_deref_mut() {
            Some(c) => c.get_or_compute(tuple, p)?.1,
            None => localroots::nu_p(tuple, p)?,
        };
        if nu == p {
            return Err(BhError::Inadmissible(p));
        }
        let pf = p as f64;
        let sieved = (1.0 - nu as f64 / pf).ln();
        log_sieved.add(sieved);
        log_direct.add(sieved - k * (1.0 - 1.0 / pf).ln());
    }
    let direct = log_direct.value().exp();
    let mertens =
        (EULER_GAMMA * k + k * (cutoff as f64).ln().ln() + log_sieved.value()).exp();
    Ok(SingularSeriesEstimate {
        value: mertens,
        cutoff,
        direct,
        mertens,
        spread: (direct - mertens).abs(),
    })
}

/// Extended-precision direct estimator: the exact rational product
/// prod (p - nu) p^(k-1) / (p - 1)^k accumulated in 192-bit fixed point.
pub fn direct_estimator_extended(
    tuple: &PolyTuple,
    cutoff: u64,
    primes: &PrimeTable,
) -> Result<BigFixed> {
    check_admissible(tuple)?;
    let k = tuple.k();
    let mut acc = BigFixed::one();
    for &p in primes.as_slice() {
        if p > cutoff {
            break;
        }
        let nu = localroots::nu_p(tuple, p)?;
        if nu == p {
            return Err(BhError::Inadmissible(p));
        }
        acc.mul_u64(p - nu);
        for _ in 1..k {
            acc.mul_u64(p);
        }
        for _ in 0..k {
            acc.div_u64(p - 1);
        }
    }
    Ok(acc)
}

/// Extended-precision mertens estimator e^(gamma k) (log P)^k prod (p - nu)/p.
pub fn mertens_estimator_extended(
    tuple: &PolyTuple,
    cutoff: u64,
    primes: &PrimeTable,
) -> Result<BigFixed> {
    check_admissible(tuple)?;
    let k = tuple.k() as u32;
    let mut acc = BigFixed::exp_gamma()
        .powi(k)
        .mul(&BigFixed::from_u64(cutoff).ln().powi(k));
    for &p in primes.as_slice() {
        if p > cutoff {
            break;
        }
        let nu = localroots::nu_p(tuple, p)?;
        if nu == p {
            return Err(BhError::Inadmissible(p));
        }
        acc.mul_u64(p - nu);
        acc.div_u64(p);
    }
    Ok(acc)
}

/// M(x) = S * integral_2^x du / prod_j log f_j(u), or M(x, y) over (x, x+y]
/// when `y` is given.
pub fn main_term(tuple: &PolyTuple, s: f64, x: f64, y: Option<f64>) -> Result<f64> {
    if x < 2.0 {
        return Err(BhError::DomainError(format!("x = {x} is below 2")));
    }
    let (lo, hi) = match y {
        None => (2.0, x),
        Some(y) => {
            if y <= 0.0 {
                return Err(BhError::DomainError(format!("window y = {y} must be positive")));
            }
            (x, x + y)
        }
    };
    if hi <= lo {
        return Ok(0.0);
    }
    for u in [lo, hi] {
        for f in tuple.polys() {
            if f.evaluate_f64(u) <= 1.0 {
                return Err(BhError::DomainError(format!(
                    "{f} is not above 1 at u = {u}"
                )));
            }
        }
    }
    let integrand = |u: f64| {
        let mut denom = 1.0;
        for f in tuple.polys() {
            denom *= f.evaluate_f64(u).ln();
        }
        1.0 / denom
    };
    Ok(s * quad::integrate(&integrand, lo, hi, 1e-10, 1e-15))
}

/// Inner-threshold shape t(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TKind {
    /// exp((log x log log x)^(2/3))
    Paper,
    /// exp((log x)^alpha)
    ExpPow { alpha: f64 },
    Fixed { value: f64 },
}

/// Outer-threshold shape z(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZKind {
    /// x^(1/e^gamma)
    Paper,
    /// x^beta
    Pow { beta: f64 },
    Fixed { value: f64 },
}

/// What to do when an inclusion probability exceeds 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampPolicy {
    /// Clamp to 1 and count the event.
    #[default]
    Count,
    /// Treat a clamp as an error.
    Forbid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdProfile {
    pub t: TKind,
    pub z: ZKind,
    #[serde(default)]
    pub clamp: ClampPolicy,
}

impl ThresholdProfile {
    /// Desk-scale default: t(n) = exp((log n)^(2/3)), z(n) = n^(1/e^gamma).
    /// Satisfies t < z and probability <= 1 from n around 300 upward.
    pub fn desk() -> Self {
        Self {
            t: TKind::ExpPow { alpha: 2.0 / 3.0 },
            z: ZKind::Paper,
            clamp: ClampPolicy::Count,
        }
    }

    /// The thresholds as written: t(x) = exp((log x log log x)^(2/3)),
    /// z(x) = x^(1/e^gamma). At desk scales t exceeds z, so the random
    /// window is empty and inclusion probabilities clamp (counted).
    pub fn paper() -> Self {
        Self {
            t: TKind::Paper,
            z: ZKind::Paper,
            clamp: ClampPolicy::Count,
        }
    }

    pub fn t_of(&self, x: f64) -> f64 {
        match self.t {
            TKind::Paper => ((x.ln() * x.ln().ln()).powf(2.0 / 3.0)).exp(),
            TKind::ExpPow { alpha } => (x.ln().powf(alpha)).exp(),
            TKind::Fixed { value } => value,
        }
    }

    pub fn z_of(&self, x: f64) -> f64 {
        match self.z {
            ZKind::Paper => x.powf(INV_EXP_GAMMA),
            ZKind::Pow { beta } => x.powf(beta),
            ZKind::Fixed { value } => value,
        }
    }

    /// Eager validation over a declared range: t and z must be finite,
    /// nondecreasing, and satisfy t(n) < z(n) throughout. The first 10^5
    /// integers are checked densely, the rest geometrically.
    pub fn validate(&self, lo: u64, hi: u64) -> Result<()> {
        if lo < 3 || hi < lo {
            return Err(BhError::ProfileInvalid(format!("bad range [{lo}, {hi}]")));
        }
        if matches!(self.t, TKind::Paper) && (lo as f64) <= std::f64::consts::E {
            return Err(BhError::ProfileInvalid(
                "paper t(x) needs x > e".into(),
            ));
        }
        let mut check = |n: u64| -> Result<()> {
            let (t, z) = (self.t_of(n as f64), self.z_of(n as f64));
            if !t.is_finite() || !z.is_finite() {
                return Err(BhError::ProfileInvalid(format!("thresholds not finite at {n}")));
            }
            if t >= z {
                return Err(BhError::ProfileInvalid(format!(
                    "t({n}) = {t} is not below z({n}) = {z}"
                )));
            }
            Ok(())
        };
        let dense_hi = hi.min(lo.saturating_add(100_000));
        for n in lo..=dense_hi {
            check(n)?;
        }
        let mut n = dense_hi;
        while n < hi {
            n = (n + n / 64 + 1).min(hi);
            check(n)?;
        }
        let mut prev_t = self.t_of(lo as f64);
        let mut prev_z = self.z_of(lo as f64);
        let mut n = lo;
        while n < hi {
            n = (n + (hi - n).div_ceil(256).max(1)).min(hi);
            let (t, z) = (self.t_of(n as f64), self.z_of(n as f64));
            if t < prev_t || z < prev_z {
                return Err(BhError::ProfileInvalid(format!(
                    "thresholds decrease near {n}"
                )));
            }
            prev_t = t;
            prev_z = z;
        }
        Ok(())
    }
}

/// The error scale E(x) = exp(-(log x)^(1/3) (log log x)^(1/6)).
pub fn error_scale(x: f64) -> f64 {
    (-(x.ln().powf(1.0 / 3.0)) * x.ln().ln().powf(1.0 / 6.0)).exp()
}

/// (t(x), z(x), E(x)) for a profile; requires x > e so E is defined.
pub fn thresholds(x: f64, profile: &ThresholdProfile) -> Result<(f64, f64, f64)> {
    if x <= std::f64::consts::E {
        return Err(BhError::DomainError(format!("thresholds need x > e, got {x}")));
    }
    Ok((profile.t_of(x), profile.z_of(x), error_scale(x)))
}

/// Convergence table for the prime-ideal-theorem product: rows
/// (x, e^gamma log x prod_{p <= x} (1 - rho_p/p)) at each checkpoint,
/// plus successive differences as the diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<(u64, f64)>,
    pub diffs: Vec<f64>,
}

pub fn lemma21_convergence(
    f: &Polynomial,
    checkpoints: &[u64],
    primes: &PrimeTable,
) -> Result<ConvergenceTable> {
    let mut points: Vec<u64> = checkpoints.to_vec();
    points.sort_unstable();
    points.dedup();
    assert!(!points.is_empty());
    assert!(*points.last().unwrap() <= primes.bound());
    let mut rows = Vec::with_capacity(points.len());
    let mut log_prod = KahanSum::default();
    let mut iter = primes.as_slice().iter().peekable();
    for &x in &points {
        while let Some(&&p) = iter.peek() {
            if p > x {
                break;
            }
            let rho = localroots::rho_p(f, p)?;
            log_prod.add((1.0 - rho as f64 / p as f64).ln());
            iter.next();
        }
        rows.push((x, (EULER_GAMMA + (x as f64).ln().ln() + log_prod.value()).exp()));
    }
    let diffs = rows.windows(2).map(|w| w[1].1 - w[0].1).collect();
    Ok(ConvergenceTable { rows, diffs })
}
