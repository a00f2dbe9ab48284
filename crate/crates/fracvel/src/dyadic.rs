//! Exact dyadic rationals in [0, 1].
//!
//! Every finite f64 in the unit interval is one of these, so conversion from
//! f64 is lossless; the arbitrary-precision numerator lets digit walks and
//! ±2^{−k} steps continue exactly past 53 bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// num / 2^exp in [0, 1], reduced: num is odd, or num = 0 with exp = 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: BigUint,
    exp: u32,
}

impl DyadicRational {
    /// Builds num/2^exp, reducing to canonical form.
    pub fn new(num: BigUint, exp: u32) -> Result<Self> {
        if num > BigUint::one() << exp {
            return Err(Error::Param(format!(
                "dyadic rational {num}/2^{exp} exceeds 1"
            )));
        }
        Ok(Self::reduce(num, exp))
    }

    fn reduce(mut num: BigUint, mut exp: u32) -> Self {
        if num.is_zero() {
            return DyadicRational {
                num,
                exp: 0,
            };
        }
        while exp > 0 && !num.bit(0) {
            num >>= 1;
            exp -= 1;
        }
        DyadicRational { num, exp }
    }

    pub fn zero() -> Self {
        DyadicRational {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        DyadicRational {
            num: BigUint::one(),
            exp: 0,
        }
    }

    pub fn half() -> Self {
        DyadicRational {
            num: BigUint::one(),
            exp: 1,
        }
    }

    /// Exact conversion: every f64 in [0, 1] is a dyadic rational (with at
    /// most 1074 fraction bits).
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() || !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                x,
                reason: "dyadic rationals cover [0, 1]".into(),
            });
        }
        if x == 1.0 {
            return Ok(Self::one());
        }
        let mut num = BigUint::zero();
        let mut exp = 0u32;
        let mut rest = x;
        // doubling and subtracting are exact; each step consumes one
        // mantissa bit, so this stops within 1074 iterations
        while rest != 0.0 {
            rest *= 2.0;
            num <<= 1;
            exp += 1;
            if rest >= 1.0 {
                num |= BigUint::one();
                rest -= 1.0;
            }
        }
        Ok(Self::reduce(num, exp))
    }

    /// Nearest f64; exact whenever the numerator fits in 53 bits and the
    /// value is within f64 range.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits();
        if bits <= 900 {
            self.num.to_f64().expect("small numerator") * (-(self.exp as f64)).exp2()
        } else {
            let shift = bits - 64;
            let top: BigUint = &self.num >> shift;
            top.to_f64().expect("64-bit slice") * (shift as f64 - self.exp as f64).exp2()
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0 && self.num.is_one()
    }

    /// Binary fraction digits, most significant first; exactly `exp` of them.
    pub fn digits(&self) -> Vec<u8> {
        (0..self.exp)
            .map(|i| u8::from(self.num.bit((self.exp - 1 - i) as u64)))
            .collect()
    }

    /// Number of 1-digits in the binary expansion.
    pub fn digit_sum(&self) -> u64 {
        self.num.count_ones()
    }

    /// self + 2^{−k}, or None when the sum leaves [0, 1].
    pub fn add_pow2(&self, k: u32) -> Option<Self> {
        let e = self.exp.max(k);
        let num = (&self.num << (e - self.exp)) + (BigUint::one() << (e - k));
        if num > BigUint::one() << e {
            None
        } else {
            Some(Self::reduce(num, e))
        }
    }

    /// self − 2^{−k}, or None when the difference is negative.
    pub fn sub_pow2(&self, k: u32) -> Option<Self> {
        let e = self.exp.max(k);
        let lifted = &self.num << (e - self.exp);
        let step = BigUint::one() << (e - k);
        if lifted < step {
            None
        } else {
            Some(Self::reduce(lifted - step, e))
        }
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        let a = &self.num << (e - self.exp);
        let b = &other.num << (e - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}
