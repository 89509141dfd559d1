//! Fixed-point arithmetic with 192 fractional bits (about 58 digits),
//! for the oracle-mode singular-series estimators.
//!
//! Values are nonnegative; each truncating operation loses at most one unit
//! in the last place, so millions of product steps still leave well over
//! 50 significant digits.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub const FRAC_BITS: u64 = 192;

const GAMMA_DECIMAL: &str =
    "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495";
const LN2_DECIMAL: &str =
    "0.6931471805599453094172321214581765680755001343602552541206800094933936219696947156058633269964186875";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigFixed(BigUint);

impl BigFixed {
    pub fn zero() -> Self {
        Self(BigUint::zero())
    }

    pub fn one() -> Self {
        Self(BigUint::one() << FRAC_BITS)
    }

    pub fn from_u64(v: u64) -> Self {
        Self(BigUint::from(v) << FRAC_BITS)
    }

    /// Parse a nonnegative decimal literal, truncating beyond 2^-192.
    pub fn from_decimal(s: &str) -> Self {
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let int: BigUint = int_part.parse().expect("bad integer part");
        let mut acc = int << FRAC_BITS;
        if !frac_part.is_empty() {
            let digits: BigUint = frac_part.parse().expect("bad fraction part");
            let scale = BigUint::from(10u32).pow(frac_part.len() as u32);
            acc += (digits << FRAC_BITS) / scale;
        }
        Self(acc)
    }

    pub fn euler_gamma() -> Self {
        Self::from_decimal(GAMMA_DECIMAL)
    }

    pub fn ln_2() -> Self {
        Self::from_decimal(LN2_DECIMAL)
    }

    pub fn mul_u64(&mut self, v: u64) {
        self.0 *= BigUint::from(v);
    }

    pub fn div_u64(&mut self, v: u64) {
        self.0 /= BigUint::from(v);
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self((&self.0 * &other.0) >> FRAC_BITS)
    }

    pub fn div(&self, other: &Self) -> Self {
        Self((&self.0 << FRAC_BITS) / &other.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn powi(&self, mut k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(FRAC_BITS as i32)
    }

    /// Decimal rendering with the given number of fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let int = &self.0 >> FRAC_BITS;
        let mask = (BigUint::one() << FRAC_BITS) - BigUint::one();
        let frac = &self.0 & mask;
        let scaled = (frac * BigUint::from(10u32).pow(digits as u32)) >> FRAC_BITS;
        format!("{int}.{scaled:0>width$}", width = digits)
    }

    /// Natural log for values >= 1: split off the power of two, then the
    /// atanh series on the [1, 2) mantissa.
    pub fn ln(&self) -> Self {
        assert!(self.0 >= BigUint::one() << FRAC_BITS, "ln needs value >= 1");
        let bits = self.0.bits();
        let shift = bits - 1 - FRAC_BITS; // mantissa in [1, 2)
        let m = Self(&self.0 >> shift);
        let num = m.sub(&Self::one());
        let den = m.add(&Self::one());
        let r = num.div(&den);
        let r2 = r.mul(&r);
        let mut term = r.clone();
        let mut sum = Self::zero();
        let mut k = 1u64;
        while !term.0.is_zero() {
            let mut add = term.clone();
            add.div_u64(k);
            sum = sum.add(&add);
            term = term.mul(&r2);
            k += 2;
        }
        sum.mul_u64(2);
        let mut pow2 = Self::ln_2();
        pow2.mul_u64(shift);
        sum.add(&pow2)
    }

    /// exp for arguments in [0, 1), by the Taylor series.
    pub fn exp(&self) -> Self {
        assert!(self.0 < BigUint::one() << FRAC_BITS, "exp argument must be < 1");
        let mut sum = Self::one();
        let mut term = Self::one();
        let mut k = 1u64;
        loop {
            term = term.mul(self);
            term.div_u64(k);
            if term.0.is_zero() {
                break;
            }
            sum = sum.add(&term);
            k += 1;
        }
        sum
    }

    pub fn exp_gamma() -> Self {
        Self::euler_gamma().exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_roundtrip() {
        let x = BigFixed::from_decimal("3.25");
        assert_eq!(x.to_f64(), 3.25);
        assert_eq!(&x.to_decimal(4), "3.2500");
    }

    #[test]
    fn ratio_products() {
        // 210 * (1/2)(2/3)(4/5)(6/7) = 48 exactly
        let mut v = BigFixed::from_u64(210);
        for (num, den) in [(1u64, 2u64), (2, 3), (4, 5), (6, 7)] {
            v.mul_u64(num);
            v.div_u64(den);
        }
        assert_eq!(v.to_f64(), 48.0);
    }

    #[test]
    fn ln_matches_f64() {
        for v in [2u64, 3, 10, 1_000_000, 10_000_000] {
            let got = BigFixed::from_u64(v).ln().to_f64();
            let want = (v as f64).ln();
            assert!((got - want).abs() < 1e-13, "ln({v}): {got} vs {want}");
        }
    }

    #[test]
    fn ln2_constant_consistent() {
        // the series at exactly 2 against the stored constant
        let got = BigFixed::from_u64(2).ln();
        let diff = if got > BigFixed::ln_2() {
            got.sub(&BigFixed::ln_2())
        } else {
            BigFixed::ln_2().sub(&got)
        };
        assert!(diff.to_f64() < 1e-55);
    }

    #[test]
    fn exp_gamma_value() {
        let got = BigFixed::exp_gamma().to_decimal(40);
        // e^gamma, independently evaluated to high precision
        assert_eq!(got, "1.7810724179901979852365041031071795491696");
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = BigFixed::from_decimal("0.37");
        let y = x.exp(); // e^0.37 ~ 1.447
        let back = y.ln().to_f64();
        assert!((back - 0.37).abs() < 1e-15);
    }
}
