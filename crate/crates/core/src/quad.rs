//! Exact arithmetic in a real quadratic field.
//!
//! A `QuadExt` is `a + b*sqrt(d)` for rationals `a`, `b` and a fixed
//! squarefree `d > 1`. Sign determination (hence ordering, absolute
//! value and floor) is exact, done by comparing squares. Restricting
//! irrational inputs to one quadratic field per instance keeps every
//! question we ask about them decidable.

use crate::error::KernelError;
use crate::rat::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `a + b*sqrt(d)`. Values with different `d` must not be mixed; the
/// constructors enforce this per instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadExt {
    pub d: u64,
    pub a: Rat,
    pub b: Rat,
}

pub fn is_squarefree(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl QuadExt {
    pub fn new(d: u64, a: Rat, b: Rat) -> Result<Self, KernelError> {
        if !is_squarefree(d) {
            return Err(KernelError::Invalid(format!("d = {d} is not squarefree > 1")));
        }
        Ok(QuadExt { d, a, b })
    }

    pub fn from_rat(d: u64, a: Rat) -> Self {
        QuadExt { d, a, b: Rat::zero() }
    }

    pub fn sqrt_d(d: u64) -> Result<Self, KernelError> {
        Self::new(d, Rat::zero(), Rat::one())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn rational_part(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of `a + b*sqrt(d)`.
    pub fn sign(&self) -> Ordering {
        let (sa, sb) = (rat_sign(&self.a), rat_sign(&self.b));
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            _ => {
                // a and b have opposite signs: compare a^2 with b^2 d.
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * Rat::from(Int::from(self.d));
                match a2.cmp(&b2d) {
                    Ordering::Equal => Ordering::Equal, // impossible for squarefree d, b != 0
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn abs(&self) -> QuadExt {
        if self.sign() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<QuadExt, KernelError> {
        // 1/(a+b√d) = (a-b√d)/(a²-b²d)
        let norm = &self.a * &self.a - &self.b * &self.b * Rat::from(Int::from(self.d));
        if norm.is_zero() {
            return Err(KernelError::Invalid("division by zero quadratic number".into()));
        }
        Ok(QuadExt {
            d: self.d,
            a: &self.a / &norm,
            b: -(&self.b / &norm),
        })
    }

    /// Largest integer `n` with `n <= self`, found by exact bisection.
    pub fn floor(&self) -> Int {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        // Rational bracket: a + b√d lies within |b|(1+d) of a.
        let slack = self.b.abs() * Rat::from(Int::from(self.d + 1)) + Rat::one();
        let mut lo = (&self.a - &slack).floor().to_integer();
        let mut hi = (&self.a + &slack).ceil().to_integer();
        // Invariant: lo <= self < hi.
        while &hi - &lo > Int::one() {
            let mid: Int = (&lo + &hi).div_floor(&Int::from(2));
            let diff = self - &QuadExt::from_rat(self.d, Rat::from(mid.clone()));
            if diff.sign() == Ordering::Less {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }
}

fn rat_sign(x: &Rat) -> Ordering {
    if x.is_zero() {
        Ordering::Equal
    } else if x.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        assert_eq!(self.d, other.d, "mixed quadratic fields");
        Some((self - other).sign())
    }
}

macro_rules! forward_ref_binop {
    ($trait:ident, $method:ident) => {
        impl<'a, 'b> $trait<&'b QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &'b QuadExt) -> QuadExt {
                QuadExt::$method(self.clone(), rhs.clone())
            }
        }
    };
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: QuadExt) -> QuadExt {
        assert_eq!(self.d, rhs.d, "mixed quadratic fields");
        QuadExt { d: self.d, a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: QuadExt) -> QuadExt {
        assert_eq!(self.d, rhs.d, "mixed quadratic fields");
        QuadExt { d: self.d, a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: QuadExt) -> QuadExt {
        assert_eq!(self.d, rhs.d, "mixed quadratic fields");
        let dd = Rat::from(Int::from(self.d));
        QuadExt {
            d: self.d,
            a: &self.a * &rhs.a + &self.b * &rhs.b * dd,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Div for QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: QuadExt) -> QuadExt {
        let inv = rhs.recip().expect("division by zero quadratic number");
        self * inv
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { d: self.d, a: -self.a, b: -self.b }
    }
}

forward_ref_binop!(Add, add);
forward_ref_binop!(Sub, sub);
forward_ref_binop!(Mul, mul);
forward_ref_binop!(Div, div);

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", crate::rat::format_rat(&self.a))
        } else {
            write!(
                f,
                "{}+({})*sqrt({})",
                crate::rat::format_rat(&self.a),
                crate::rat::format_rat(&self.b),
                self.d
            )
        }
    }
}

/// A point with coordinates in one quadratic field.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadVec {
    pub d: u64,
    pub entries: Vec<QuadExt>,
}

impl QuadVec {
    pub fn new(d: u64, entries: Vec<(Rat, Rat)>) -> Result<Self, KernelError> {
        if !is_squarefree(d) {
            return Err(KernelError::Invalid(format!("d = {d} is not squarefree > 1")));
        }
        Ok(QuadVec {
            d,
            entries: entries.into_iter().map(|(a, b)| QuadExt { d, a, b }).collect(),
        })
    }

    pub fn from_rational(v: &[Rat]) -> Self {
        // d is irrelevant when every irrational part vanishes.
        QuadVec { d: 2, entries: v.iter().map(|a| QuadExt::from_rat(2, a.clone())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(|e| e.is_rational())
    }

    pub fn rational_parts(&self) -> Vec<Rat> {
        self.entries.iter().map(|e| e.a.clone()).collect()
    }

    pub fn irrational_parts(&self) -> Vec<Rat> {
        self.entries.iter().map(|e| e.b.clone()).collect()
    }

    /// Max-norm distance to a rational point, as an exact quadratic number.
    pub fn max_norm_dist(&self, w: &[Rat]) -> QuadExt {
        assert_eq!(self.dim(), w.len());
        let mut best = QuadExt::from_rat(self.d, Rat::zero());
        for (e, wi) in self.entries.iter().zip(w) {
            let diff = (e - &QuadExt::from_rat(self.d, wi.clone())).abs();
            if diff > best {
                best = diff;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    fn q(d: u64, a: Rat, b: Rat) -> QuadExt {
        QuadExt::new(d, a, b).unwrap()
    }

    #[test]
    fn squarefree_filter() {
        assert!(is_squarefree(2));
        assert!(is_squarefree(19));
        assert!(!is_squarefree(4));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(1));
    }

    #[test]
    fn sign_of_mixed_terms() {
        // 3 - 2√2 > 0 since 9 > 8
        assert!(q(2, rat_i(3), rat_i(-2)).is_positive());
        // 1 - √2 < 0
        assert_eq!(q(2, rat_i(1), rat_i(-1)).sign(), Ordering::Less);
        // -7/5 + √2 > 0 since 2 > 49/25
        assert!(q(2, rat(-7, 5), rat_i(1)).is_positive());
    }

    #[test]
    fn floor_of_sqrt2_multiples() {
        // √2 = 1.414..., 10√2 = 14.14...
        assert_eq!(q(2, rat_i(0), rat_i(1)).floor(), Int::from(1));
        assert_eq!(q(2, rat_i(0), rat_i(10)).floor(), Int::from(14));
        assert_eq!(q(2, rat_i(0), rat_i(-1)).floor(), Int::from(-2));
        assert_eq!(q(5, rat(1, 2), rat(1, 2)).floor(), Int::from(1)); // golden ratio
    }

    #[test]
    fn field_arithmetic() {
        let x = q(2, rat_i(1), rat_i(1)); // 1+√2
        let y = x.recip().unwrap(); // √2-1
        assert_eq!(y, q(2, rat_i(-1), rat_i(1)));
        assert_eq!(x.clone() * y, q(2, rat_i(1), rat_i(0)));
    }
}
