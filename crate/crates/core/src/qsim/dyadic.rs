use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Exact rational `num / 2^log2_den`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    num: i64,
    log2_den: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, log2_den: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, log2_den: 0 };
    pub const HALF: Dyadic = Dyadic { num: 1, log2_den: 1 };

    pub fn new(num: i64, log2_den: u32) -> Self {
        let mut d = Dyadic { num, log2_den };
        d.reduce();
        d
    }

    pub fn integer(num: i64) -> Self {
        Dyadic { num, log2_den: 0 }
    }

    fn reduce(&mut self) {
        if self.num == 0 {
            self.log2_den = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.log2_den);
        self.num >>= tz;
        self.log2_den -= tz;
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn log2_den(self) -> u32 {
        self.log2_den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.log2_den) as f64
    }

    /// `self · 2^k`.
    pub fn scale_pow2(self, k: u32) -> Self {
        if k >= self.log2_den {
            Dyadic::integer(self.num << (k - self.log2_den))
        } else {
            Dyadic::new(self.num, self.log2_den - k)
        }
    }

    /// Integer value if the denominator is 1.
    pub fn as_integer(self) -> Option<i64> {
        (self.log2_den == 0).then_some(self.num)
    }

    fn aligned(a: Dyadic, b: Dyadic) -> (i64, i64, u32) {
        let k = a.log2_den.max(b.log2_den);
        (a.num << (k - a.log2_den), b.num << (k - b.log2_den), k)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, k) = Dyadic::aligned(self, rhs);
        Dyadic::new(a + b, k)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, log2_den: self.log2_den }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.num * rhs.num, self.log2_den + rhs.log2_den)
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::integer(v)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.log2_den)
        }
    }
}
