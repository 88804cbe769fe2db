//! Hilbert bases of pointed rational cones: the unique minimal
//! generating set of the monoid of lattice points.

use crate::cone::{self, Cone, DEFAULT_DIM_LIMIT};
use crate::error::KernelError;
use crate::polyhedron::HPoly;
use crate::rat::{self, Int, IntVec, Rat};
use num_traits::{One, Zero};

/// Minimal generating set of `c ∩ ℤ^n` for a pointed cone `c`, with the
/// default ambient dimension limit.
pub fn hilbert_basis(c: &Cone) -> Result<Vec<IntVec>, KernelError> {
    hilbert_basis_with_limit(c, DEFAULT_DIM_LIMIT)
}

pub fn hilbert_basis_with_limit(c: &Cone, limit: usize) -> Result<Vec<IntVec>, KernelError> {
    if c.ambient_dim > limit {
        return Err(KernelError::DimensionLimit(c.ambient_dim, limit));
    }
    if !c.is_pointed() {
        return Err(KernelError::NotPointed(rat::format_vec(&c.generators[0])));
    }
    if c.is_trivial() {
        return Ok(vec![]);
    }

    // Candidates: over a triangulation, the lattice points of each
    // fundamental parallelepiped { Σ t_i g_i : 0 <= t_i <= 1 }.
    let tri = cone::triangulate(c, &[])?;
    let mut candidates: Vec<IntVec> = Vec::new();
    for piece in &tri.pieces {
        let gens = piece.rays_int();
        candidates.extend(parallelepiped_points(c.ambient_dim, &gens)?);
    }
    candidates.sort();
    candidates.dedup();
    candidates.retain(|v| v.iter().any(|x| !x.is_zero()));

    // Keep the irreducible elements: x stays unless x - y lies in the
    // cone for some other nonzero candidate y.
    let mut basis = Vec::new();
    for x in &candidates {
        let reducible = candidates.iter().any(|y| {
            if y == x {
                return false;
            }
            let diff: Vec<Rat> =
                x.iter().zip(y).map(|(a, b)| Rat::from(a - b)).collect();
            c.contains(&diff).unwrap()
        });
        if !reducible {
            basis.push(x.clone());
        }
    }
    Ok(basis)
}

fn parallelepiped_points(dim: usize, gens: &[IntVec]) -> Result<Vec<IntVec>, KernelError> {
    // { x : x = Σ t_i g_i, 0 <= t_i <= 1 } as a polytope in x-space:
    // bounded, cut out by the piece's facets and the shifted facets.
    // Simpler and still exact: enumerate over the bounding box of the
    // 2^k vertex sums and keep x with coordinates t in [0,1].
    let k = gens.len();
    let mut p = HPoly::new(dim + k);
    // x - Σ t_i g_i = 0
    for c in 0..dim {
        let mut row = rat::zeros(dim + k);
        row[c] = Rat::one();
        for (i, g) in gens.iter().enumerate() {
            row[dim + i] = -Rat::from(g[c].clone());
        }
        p.add_eq(row, Rat::zero());
    }
    for i in 0..k {
        let mut lo = rat::zeros(dim + k);
        lo[dim + i] = Rat::one();
        p.add_ineq(lo.clone(), Rat::zero());
        let mut hi = rat::zeros(dim + k);
        hi[dim + i] = -Rat::one();
        p.add_ineq(hi, Rat::one());
    }
    // Enumerate integer x; t need not be integral, so project the
    // bounding box by hand: x ranges over the box spanned by vertex sums.
    let g = p.generators();
    if !g.rays.is_empty() || !g.lines.is_empty() {
        return Err(KernelError::Invalid("degenerate parallelepiped".into()));
    }
    let mut lo = vec![Int::zero(); dim];
    let mut hi = vec![Int::zero(); dim];
    for v in &g.vertices {
        for c in 0..dim {
            let f = v[c].floor().to_integer();
            let cl = v[c].ceil().to_integer();
            if f < lo[c] {
                lo[c] = f;
            }
            if cl > hi[c] {
                hi[c] = cl;
            }
        }
    }
    // Membership: solve for t (generators independent) and check 0<=t<=1.
    let mat: Vec<Vec<Rat>> =
        (0..dim).map(|c| gens.iter().map(|g| Rat::from(g[c].clone())).collect()).collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    if (0..dim).any(|c| lo[c] > hi[c]) {
        return Ok(out);
    }
    loop {
        let x: Vec<Rat> = cur.iter().map(|v| Rat::from(v.clone())).collect();
        if let Some(t) = crate::linalg::solve(&mat, &x) {
            if t.iter().all(|ti| *ti >= Rat::zero() && *ti <= Rat::one()) {
                out.push(cur.clone());
            }
        }
        let mut c = 0;
        loop {
            if c == dim {
                return Ok(out);
            }
            if cur[c] < hi[c] {
                cur[c] += Int::one();
                break;
            }
            cur[c] = lo[c].clone();
            c += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int_vec, vec_i, RatVec};

    fn cone_of(gens: &[&[i64]]) -> Cone {
        let g: Vec<RatVec> = gens.iter().map(|r| vec_i(r)).collect();
        Cone::from_generators(gens[0].len(), &g).unwrap()
    }

    /// Brute-force oracle: irreducible lattice points with coordinates
    /// bounded by `b`.
    pub(crate) fn oracle_irreducible(c: &Cone, b: i64) -> Vec<IntVec> {
        let dim = c.ambient_dim;
        let mut points: Vec<Vec<i64>> = Vec::new();
        let mut cur = vec![-b; dim];
        'outer: loop {
            let v: RatVec = cur.iter().map(|&x| rat::rat_i(x)).collect();
            if cur.iter().any(|&x| x != 0) && c.contains(&v).unwrap() {
                points.push(cur.clone());
            }
            let mut k = 0;
            loop {
                if k == dim {
                    break 'outer;
                }
                if cur[k] < b {
                    cur[k] += 1;
                    break;
                }
                cur[k] = -b;
                k += 1;
            }
        }
        let mut out = Vec::new();
        for x in &points {
            let reducible = points.iter().any(|y| {
                if y == x {
                    return false;
                }
                let diff: RatVec =
                    x.iter().zip(y).map(|(a, bb)| rat::rat_i(a - bb)).collect();
                c.contains(&diff).unwrap()
            });
            if !reducible {
                out.push(x.iter().map(|&v| Int::from(v)).collect());
            }
        }
        out.sort();
        out
    }

    #[test]
    fn free_monoid() {
        let c = cone_of(&[&[1, 0], &[0, 1]]);
        assert_eq!(hilbert_basis(&c).unwrap(), vec![int_vec(&[0, 1]), int_vec(&[1, 0])]);
    }

    #[test]
    fn sheared_cone() {
        let c = cone_of(&[&[1, 0], &[1, 2]]);
        let hb = hilbert_basis(&c).unwrap();
        assert_eq!(hb, vec![int_vec(&[1, 0]), int_vec(&[1, 1]), int_vec(&[1, 2])]);
        assert_eq!(hb, oracle_irreducible(&c, 4));
    }

    #[test]
    fn wide_cone() {
        let c = cone_of(&[&[0, 1], &[3, 1]]);
        let hb = hilbert_basis(&c).unwrap();
        assert_eq!(
            hb,
            vec![int_vec(&[0, 1]), int_vec(&[1, 1]), int_vec(&[2, 1]), int_vec(&[3, 1])]
        );
        assert_eq!(hb, oracle_irreducible(&c, 4));
    }

    #[test]
    fn rejects_nonpointed_and_overlarge() {
        let half = cone_of(&[&[1, 0], &[0, 1], &[0, -1]]);
        assert!(matches!(hilbert_basis(&half), Err(KernelError::NotPointed(_))));
        let c7 = Cone::from_generators(
            7,
            &[vec_i(&[1, 0, 0, 0, 0, 0, 0])],
        )
        .unwrap();
        assert!(matches!(hilbert_basis(&c7), Err(KernelError::DimensionLimit(7, 6))));
    }

    #[test]
    fn three_dimensional_non_simplicial() {
        let c = cone_of(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        let hb = hilbert_basis(&c).unwrap();
        assert_eq!(hb, oracle_irreducible(&c, 3));
    }
}
