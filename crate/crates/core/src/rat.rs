//! Exact rational scalars and vectors.
//!
//! Every coefficient in the kernel is a `Rat`: an arbitrary-precision
//! rational kept in lowest terms with a positive denominator (both
//! guaranteed by the backing `num_rational::BigRational`). No floating
//! point enters any computation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Write as _;

pub type Rat = BigRational;
pub type Int = BigInt;

/// A vector with exact rational entries.
pub type RatVec = Vec<Rat>;

/// A vector with integer entries (a lattice point).
pub type IntVec = Vec<Int>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_i(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn vec_i(v: &[i64]) -> RatVec {
    v.iter().map(|&x| rat_i(x)).collect()
}

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn zeros(n: usize) -> RatVec {
    vec![Rat::zero(); n]
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(t: &Rat, a: &[Rat]) -> RatVec {
    a.iter().map(|x| t * x).collect()
}

pub fn neg(a: &[Rat]) -> RatVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn to_rat_vec(v: &[Int]) -> RatVec {
    v.iter().map(|x| Rat::from(x.clone())).collect()
}

/// Rounds each entry down to an integer.
pub fn floor_vec(v: &[Rat]) -> IntVec {
    v.iter().map(|x| x.floor().to_integer()).collect()
}

/// True when every entry is an integer.
pub fn is_integral(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn to_int_vec(v: &[Rat]) -> Option<IntVec> {
    if is_integral(v) {
        Some(v.iter().map(|x| x.to_integer()).collect())
    } else {
        None
    }
}

/// Least common multiple of the denominators of `v`; always positive.
pub fn denominator_lcm(v: &[Rat]) -> Int {
    let mut l = Int::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    l
}

/// Scales a rational vector to a primitive integer vector pointing the
/// same way. Zero maps to zero.
pub fn primitive_integer(v: &[Rat]) -> IntVec {
    let l = denominator_lcm(v);
    let ints: IntVec = v.iter().map(|x| (x * Rat::from(l.clone())).to_integer()).collect();
    let mut g = Int::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Clears denominators of a linear functional, keeping orientation.
pub fn clear_denominators(v: &[Rat]) -> IntVec {
    let l = denominator_lcm(v);
    v.iter().map(|x| (x * Rat::from(l.clone())).to_integer()).collect()
}

pub fn max_norm(v: &[Rat]) -> Rat {
    v.iter().map(|x| x.abs()).fold(Rat::zero(), |a, b| if b > a { b } else { a })
}

/// Canonical "p" or "p/q" rendering used by every report and wire format.
pub fn format_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_vec(v: &[Rat]) -> String {
    let mut s = String::from("(");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", format_rat(x));
    }
    s.push(')');
    s
}

/// Parses the strict "p" / "p/q" syntax; decimal notation is rejected.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<Int, String> {
        if t.is_empty()
            || !t
                .chars()
                .enumerate()
                .all(|(i, c)| c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+')))
        {
            return Err(format!("malformed rational: {s:?} (expected \"p\" or \"p/q\")"));
        }
        t.parse::<Int>().map_err(|e| format!("malformed rational {s:?}: {e}"))
    };
    match s.split_once('/') {
        None => Ok(Rat::from(parse_int(s)?)),
        Some((n, d)) => {
            let num = parse_int(n)?;
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(format!("malformed rational {s:?}: zero denominator"));
            }
            Ok(Rat::new(num, den))
        }
    }
}
