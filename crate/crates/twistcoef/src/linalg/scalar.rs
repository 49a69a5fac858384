//! Integer scalars used by the elimination routines.
//!
//! Every routine is written once against [`Int`]; the `i64` instance reports
//! overflow by returning `None`, and callers retry with `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

pub trait Int: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Floor division, used to reduce entries against a pivot.
    fn div_floor(&self, o: &Self) -> Self;
    /// Absolute value comparison helper: |self| < |o|.
    fn abs_lt(&self, o: &Self) -> bool;
    fn abs_is_one(&self) -> bool;
    /// Extended gcd: returns (g, s, t) with g = s*a + t*b and g >= 0.
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)>;
    fn bits(&self) -> u64;
}

impl Int for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn abs_lt(&self, o: &Self) -> bool {
        self.unsigned_abs() < o.unsigned_abs()
    }
    fn abs_is_one(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)> {
        let (mut r0, mut r1) = (*a as i128, *b as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0.div_euclid(r1);
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 < 0 {
            r0 = -r0;
            s0 = -s0;
            t0 = -t0;
        }
        Some((
            i64::try_from(r0).ok()?,
            i64::try_from(s0).ok()?,
            i64::try_from(t0).ok()?,
        ))
    }
    fn bits(&self) -> u64 {
        64 - self.unsigned_abs().leading_zeros() as u64
    }
}

impl Int for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn abs_lt(&self, o: &Self) -> bool {
        self.magnitude() < o.magnitude()
    }
    fn abs_is_one(&self) -> bool {
        self.magnitude().is_one()
    }
    fn ext_gcd(a: &Self, b: &Self) -> Option<(Self, Self, Self)> {
        let e = a.extended_gcd(b);
        let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
        if Signed::is_negative(&g) {
            g = -g;
            s = -s;
            t = -t;
        }
        Some((g, s, t))
    }
    fn bits(&self) -> u64 {
        BigInt::bits(self)
    }
}

/// Why an elimination routine stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    Overflow,
    Cancelled,
}

/// Run a routine with machine integers first and retry with `BigInt` on overflow.
pub fn with_fallback<R>(
    small: impl FnOnce() -> Result<R, Halt>,
    big: impl FnOnce() -> Result<R, Halt>,
) -> Result<R, Halt> {
    match small() {
        Err(Halt::Overflow) => big(),
        other => other,
    }
}

/// Turn an overflowed checked operation into `Halt::Overflow`.
#[inline]
pub fn ov<T>(v: Option<T>) -> Result<T, Halt> {
    v.ok_or(Halt::Overflow)
}

/// Cooperative cancellation flag shared between a caller and a long computation.
#[derive(Debug, Clone, Default)]
pub struct Cancel(std::sync::Arc<std::sync::atomic::AtomicBool>);

impl Cancel {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn cancel(&self) {
        self.0.store(true, std::sync::atomic::Ordering::Relaxed);
    }
    pub fn is_cancelled(&self) -> bool {
        self.0.load(std::sync::atomic::Ordering::Relaxed)
    }
    pub(crate) fn check(&self) -> Result<(), Halt> {
        if self.is_cancelled() {
            Err(Halt::Cancelled)
        } else {
            Ok(())
        }
    }
}
