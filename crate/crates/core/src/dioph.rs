//! Simultaneous rational approximation of a quadratic-field point
//! inside its rational affine hull: exact continued fractions,
//! approximation certificates with denominator divisibility, and the
//! certificate checker.

use crate::affine::{rational_affine_hull, AffineSubspaceQ};
use crate::error::KernelError;
use crate::quad::{QuadExt, QuadVec};
use crate::rat::{self, Int, Rat, RatVec};
use num_traits::{One, Signed, Zero};

/// An approximation certificate: `x = Σ r_i w_i` with `w_i` rational
/// points of the hull, `p_i ≡ 0 (mod M)`, `p_i·w_i` integral and
/// `‖x − w_i‖∞ < ε/p_i`.
#[derive(Clone, Debug)]
pub struct DioCertificate {
    pub x: QuadVec,
    pub subspace: AffineSubspaceQ,
    pub points: Vec<RatVec>,
    /// Weights in the field of `x`; rational weights have zero
    /// irrational part.
    pub weights: Vec<QuadExt>,
    pub denominators: Vec<u64>,
    pub eps: Rat,
    pub modulus: u64,
}

/// Per-invariant outcome of `check_certificate`.
#[derive(Clone, Debug)]
pub struct DioReport {
    pub pass: bool,
    pub failed: Vec<String>,
}

/// First `k` continued-fraction convergents of `α`, exact. For a
/// rational `α` the expansion terminates and fewer than `k` may be
/// returned, the last being `α` itself.
pub fn convergents(alpha: &QuadExt, k: usize) -> Result<Vec<Rat>, KernelError> {
    if k == 0 {
        return Err(KernelError::Precondition("need at least one convergent".into()));
    }
    let mut out = Vec::with_capacity(k);
    // h_{-1}/k_{-1} = 1/0, h_{-2}/k_{-2} = 0/1.
    let (mut h2, mut h1) = (Int::zero(), Int::one());
    let (mut k2, mut k1) = (Int::one(), Int::zero());
    let mut x = alpha.clone();
    while out.len() < k {
        let a = x.floor();
        let h = &a * &h1 + &h2;
        let kk = &a * &k1 + &k2;
        out.push(Rat::new(h.clone(), kk.clone()));
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, kk);
        let frac = x - QuadExt::from_rat(alpha.d, Rat::from(a));
        if frac.is_zero() {
            break;
        }
        x = frac.recip()?;
    }
    Ok(out)
}

/// The classical quality bound `|α − p/q| < 1/q²`, checked exactly.
pub fn convergent_quality(alpha: &QuadExt, c: &Rat) -> bool {
    let q = Rat::from(c.denom().clone());
    let diff = (alpha.clone() - QuadExt::from_rat(alpha.d, c.clone())).abs();
    (QuadExt::from_rat(alpha.d, (&q * &q).recip()) - diff).is_positive()
}

/// Builds a certificate for `x` with error bounds `ε/p_i` and all
/// `p_i` divisible by `M`. A rational `x` yields the trivial one-point
/// certificate; otherwise two consecutive convergents of `√d`
/// parametrize straddling points of the hull line.
pub fn approximate(x: &QuadVec, eps: &Rat, modulus: u64) -> Result<DioCertificate, KernelError> {
    if !eps.is_positive() {
        return Err(KernelError::Precondition("ε must be positive".into()));
    }
    if modulus == 0 {
        return Err(KernelError::Precondition("M must be positive".into()));
    }
    let subspace = rational_affine_hull(x);
    let d = x.d;
    if subspace.dim() == 0 {
        // Rational point: itself, with p = M·(denominator lcm).
        let w = subspace.base_point.clone();
        let l = rat::denominator_lcm(&w);
        let p_int = Int::from(modulus) * &l;
        let p = u64::try_from(&p_int)
            .map_err(|_| KernelError::Invalid("certificate denominator overflows u64".into()))?;
        return Ok(DioCertificate {
            x: x.clone(),
            subspace,
            points: vec![w],
            weights: vec![QuadExt::from_rat(d, Rat::one())],
            denominators: vec![p],
            eps: eps.clone(),
            modulus,
        });
    }
    // x = a + √d·b: the hull is the line t ↦ a + t·b, hit at t = √d.
    let alpha = QuadExt::sqrt_d(d)?;
    let l = {
        let la = rat::denominator_lcm(&subspace.base_point);
        let lb = rat::denominator_lcm(&subspace.direction_basis[0]);
        num_integer::Integer::lcm(&la, &lb)
    };
    // Walk consecutive convergent pairs until the exact ε/p_i bounds
    // hold; denominators grow geometrically, so this is quick.
    let mut prev: Option<Rat> = None;
    for c in convergents(&alpha, 64)? {
        if let Some(t1) = prev.clone() {
            let t2 = c.clone();
            let w1 = subspace.point_at(&[t1.clone()]);
            let w2 = subspace.point_at(&[t2.clone()]);
            let p1 = Int::from(modulus) * &l * t1.denom();
            let p2 = Int::from(modulus) * &l * t2.denom();
            let within = |w: &RatVec, p: &Int| {
                let bound = eps / Rat::from(p.clone());
                (QuadExt::from_rat(d, bound) - x.max_norm_dist(w)).is_positive()
            };
            if within(&w1, &p1) && within(&w2, &p2) {
                // Straddling weights: r₂ = (√d − t₁)/(t₂ − t₁).
                let span = QuadExt::from_rat(d, &t2 - &t1);
                let r2 = (alpha.clone() - QuadExt::from_rat(d, t1)) * span.recip()?;
                let r1 = QuadExt::from_rat(d, Rat::one()) - r2.clone();
                let to_u64 = |p: &Int| {
                    u64::try_from(p).map_err(|_| {
                        KernelError::Invalid("certificate denominator overflows u64".into())
                    })
                };
                return Ok(DioCertificate {
                    x: x.clone(),
                    subspace,
                    points: vec![w1, w2],
                    weights: vec![r1, r2],
                    denominators: vec![to_u64(&p1)?, to_u64(&p2)?],
                    eps: eps.clone(),
                    modulus,
                });
            }
        }
        prev = Some(c);
    }
    Err(KernelError::Invalid(
        "convergent search exhausted without meeting the error bound".into(),
    ))
}

/// Verifies every certificate invariant exactly and reports each
/// failure under a stable label.
pub fn check_certificate(cert: &DioCertificate) -> DioReport {
    let mut failed = Vec::new();
    let mut fail = |label: &str, msg: String| failed.push(format!("({label}) {msg}"));
    let d = cert.x.d;
    let m = cert.points.len();
    if m == 0 || cert.weights.len() != m || cert.denominators.len() != m {
        return DioReport {
            pass: false,
            failed: vec!["(shape) point/weight/denominator counts disagree".into()],
        };
    }
    // Weights: Σ r_i = 1, each in (0, 1) (the trivial one-point
    // certificate carries the single weight 1).
    let mut total = QuadExt::from_rat(d, Rat::zero());
    for r in &cert.weights {
        total = total + r.clone();
    }
    if !(total - QuadExt::from_rat(d, Rat::one())).is_zero() {
        fail("weights", "Σ r_i ≠ 1".into());
    }
    for (i, r) in cert.weights.iter().enumerate() {
        let ok = if m == 1 {
            (r.clone() - QuadExt::from_rat(d, Rat::one())).is_zero()
        } else {
            r.is_positive() && (QuadExt::from_rat(d, Rat::one()) - r.clone()).is_positive()
        };
        if !ok {
            fail("weights", format!("r_{i} is outside (0, 1)"));
        }
    }
    // Barycenter: x = Σ r_i w_i, coordinatewise in ℚ(√d).
    for j in 0..cert.x.entries.len() {
        let mut acc = QuadExt::from_rat(d, Rat::zero());
        for (r, w) in cert.weights.iter().zip(&cert.points) {
            acc = acc + r.clone() * QuadExt::from_rat(d, w[j].clone());
        }
        if !(acc - cert.x.entries[j].clone()).is_zero() {
            fail("barycenter", format!("Σ r_i w_i differs from x in coordinate {j}"));
            break;
        }
    }
    // Subspace membership.
    for (i, w) in cert.points.iter().enumerate() {
        if w.len() != cert.subspace.ambient_dim() || !cert.subspace.contains(w) {
            fail("subspace", format!("w_{i} is not in the subspace"));
        }
    }
    // Denominator law: M | p_i and p_i·w_i integral.
    for (i, (&p, w)) in cert.denominators.iter().zip(&cert.points).enumerate() {
        if p == 0 || cert.modulus == 0 || p % cert.modulus != 0 {
            fail("modulus", format!("p_{i} is not a positive multiple of M"));
            continue;
        }
        let scaled = rat::scale(&Rat::from(Int::from(p)), w);
        if !rat::is_integral(&scaled) {
            fail("integrality", format!("p_{i}·w_{i} is not integral"));
        }
    }
    // Error bounds: ‖x − w_i‖∞ < ε/p_i, exact in the field.
    for (i, (&p, w)) in cert.denominators.iter().zip(&cert.points).enumerate() {
        if p == 0 {
            continue;
        }
        let bound = &cert.eps / Rat::from(Int::from(p));
        if !(QuadExt::from_rat(d, bound) - cert.x.max_norm_dist(w)).is_positive() {
            fail("distance", format!("‖x − w_{i}‖ ≥ ε/p_{i}"));
        }
    }
    DioReport { pass: failed.is_empty(), failed }
}
