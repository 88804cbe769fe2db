//! Exact polyhedral computations via the double description method.
//!
//! Everything here is over the rationals: halfspace representations,
//! generator representations, conversions in both directions, linear
//! optimization by vertex enumeration, lattice point enumeration, and
//! an exact check that a union of polyhedral cones covers another.

use crate::error::KernelError;
use crate::linalg;
use crate::rat::{self, IntVec, Rat, RatVec};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// Generator description of a homogeneous cone: extreme rays plus a
/// basis of the lineality space. Rays are primitive integer vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DdCone {
    pub dim: usize,
    pub rays: Vec<IntVec>,
    pub lines: Vec<IntVec>,
}

impl DdCone {
    pub fn is_trivial(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }
}

fn sign_of(x: &Rat) -> Ordering {
    if x.is_zero() {
        Ordering::Equal
    } else if x.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Double description: generators of `{x : f.x >= 0 for f in ineqs,
/// g.x = 0 for g in eqs}`.
pub fn dd_from_halfspaces(dim: usize, ineqs: &[RatVec], eqs: &[RatVec]) -> DdCone {
    // Start from the whole space.
    let mut lines: Vec<RatVec> = (0..dim)
        .map(|i| {
            let mut v = rat::zeros(dim);
            v[i] = Rat::one();
            v
        })
        .collect();
    let mut rays: Vec<RatVec> = Vec::new();
    // Zero sets are tracked against the list of processed inequalities.
    let mut processed: Vec<RatVec> = Vec::new();
    let mut zero_sets: Vec<Vec<usize>> = Vec::new();

    let mut constraints: Vec<(RatVec, bool)> = Vec::new();
    for e in eqs {
        constraints.push((e.clone(), true));
    }
    for f in ineqs {
        constraints.push((f.clone(), false));
    }

    for (f, is_eq) in constraints {
        if rat::is_zero_vec(&f) {
            continue;
        }
        // Break a line if one crosses the hyperplane.
        if let Some(k) = lines.iter().position(|l| !rat::dot(&f, l).is_zero()) {
            let l0 = lines.remove(k);
            let t0 = rat::dot(&f, &l0);
            let l0 = if t0.is_negative() { rat::neg(&l0) } else { l0 };
            let t0 = rat::dot(&f, &l0);
            for l in lines.iter_mut() {
                let t = rat::dot(&f, l);
                if !t.is_zero() {
                    *l = rat::sub(l, &rat::scale(&(t / &t0), &l0));
                }
            }
            for r in rays.iter_mut() {
                let t = rat::dot(&f, r);
                if !t.is_zero() {
                    *r = rat::sub(r, &rat::scale(&(t / &t0), &l0));
                }
            }
            if !is_eq {
                rays.push(l0);
                zero_sets.push(processed.iter().enumerate().map(|(i, _)| i).collect());
            }
            processed.push(f);
            // Existing rays now lie on the new hyperplane.
            let idx = processed.len() - 1;
            let last = zero_sets.len().wrapping_sub(1);
            for (zi, z) in zero_sets.iter_mut().enumerate() {
                if zi != last || is_eq {
                    z.push(idx);
                }
            }
            continue;
        }
        // All lines are inside the hyperplane; partition the rays.
        let vals: Vec<Rat> = rays.iter().map(|r| rat::dot(&f, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let lin_dim = dim - lines.len();
        let mut new_rays: Vec<RatVec> = Vec::new();
        let mut new_zero: Vec<Vec<usize>> = Vec::new();
        let keep_pos = !is_eq;
        for i in 0..rays.len() {
            let s = sign_of(&vals[i]);
            if s == Ordering::Equal || (s == Ordering::Greater && keep_pos) {
                let mut z = zero_sets[i].clone();
                if s == Ordering::Equal {
                    z.push(processed.len());
                }
                new_rays.push(rays[i].clone());
                new_zero.push(z);
            }
        }
        for &p in &pos {
            for &q in &neg {
                if !adjacent(&processed, &zero_sets[p], &zero_sets[q], lin_dim) {
                    continue;
                }
                // Positive combination landing on the hyperplane.
                let c = rat::add(
                    &rat::scale(&vals[p], &rays[q]),
                    &rat::scale(&(-vals[q].clone()), &rays[p]),
                );
                if rat::is_zero_vec(&c) {
                    continue;
                }
                let mut z: Vec<usize> = zero_sets[p]
                    .iter()
                    .filter(|i| zero_sets[q].contains(i))
                    .copied()
                    .collect();
                z.push(processed.len());
                new_rays.push(c);
                new_zero.push(z);
            }
        }
        rays = new_rays;
        zero_sets = new_zero;
        processed.push(f);
    }

    // Normalize and deduplicate.
    let mut int_rays: Vec<IntVec> = rays.iter().map(|r| rat::primitive_integer(r)).collect();
    int_rays.sort();
    int_rays.dedup();
    int_rays.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut int_lines: Vec<IntVec> = lines.iter().map(|l| rat::primitive_integer(l)).collect();
    int_lines.retain(|l| l.iter().any(|x| !x.is_zero()));
    DdCone { dim, rays: int_rays, lines: int_lines }
}

/// Algebraic adjacency: the constraints tight at both rays must have
/// rank exactly `lin_dim - 2`.
fn adjacent(processed: &[RatVec], za: &[usize], zb: &[usize], lin_dim: usize) -> bool {
    if lin_dim <= 2 {
        return true;
    }
    let common: Vec<RatVec> = za
        .iter()
        .filter(|i| zb.contains(i))
        .map(|&i| processed[i].clone())
        .collect();
    if common.len() < lin_dim - 2 {
        return false;
    }
    linalg::rank(&common) == lin_dim - 2
}

/// Facets of the cone generated by `rays` and `+/-lines`: the extreme
/// rays of the dual cone. Also returns the equations cutting out the
/// linear span (empty for full-dimensional cones).
pub fn cone_facets(dim: usize, rays: &[RatVec], lines: &[RatVec]) -> (Vec<IntVec>, Vec<IntVec>) {
    let ineqs: Vec<RatVec> = rays.to_vec();
    let eqs: Vec<RatVec> = lines.to_vec();
    let dual = dd_from_halfspaces(dim, &ineqs, &eqs);
    (dual.rays, dual.lines)
}

/// Inhomogeneous polyhedron `{x : a.x + b >= 0}` with optional equalities.
#[derive(Clone, Debug, Default)]
pub struct HPoly {
    pub dim: usize,
    /// (normal, offset): `normal . x + offset >= 0`
    pub ineqs: Vec<(RatVec, Rat)>,
    /// (normal, offset): `normal . x + offset = 0`
    pub eqs: Vec<(RatVec, Rat)>,
}

/// Generator description of an inhomogeneous polyhedron.
#[derive(Clone, Debug, Default)]
pub struct VPoly {
    pub vertices: Vec<RatVec>,
    pub rays: Vec<IntVec>,
    pub lines: Vec<IntVec>,
}

impl HPoly {
    pub fn new(dim: usize) -> Self {
        HPoly { dim, ineqs: Vec::new(), eqs: Vec::new() }
    }

    pub fn add_ineq(&mut self, normal: RatVec, offset: Rat) {
        self.ineqs.push((normal, offset));
    }

    pub fn add_eq(&mut self, normal: RatVec, offset: Rat) {
        self.eqs.push((normal, offset));
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.ineqs.iter().all(|(a, b)| !(rat::dot(a, x) + b).is_negative())
            && self.eqs.iter().all(|(a, b)| (rat::dot(a, x) + b).is_zero())
    }

    /// Generators via homogenization with a leading coordinate.
    pub fn generators(&self) -> VPoly {
        let hom = |a: &RatVec, b: &Rat| {
            let mut v = Vec::with_capacity(self.dim + 1);
            v.push(b.clone());
            v.extend_from_slice(a);
            v
        };
        let mut ineqs: Vec<RatVec> = self.ineqs.iter().map(|(a, b)| hom(a, b)).collect();
        // x0 >= 0
        let mut e0 = rat::zeros(self.dim + 1);
        e0[0] = Rat::one();
        ineqs.push(e0);
        let eqs: Vec<RatVec> = self.eqs.iter().map(|(a, b)| hom(a, b)).collect();
        let dd = dd_from_halfspaces(self.dim + 1, &ineqs, &eqs);
        let mut out = VPoly::default();
        for r in dd.rays {
            if r[0].is_zero() {
                out.rays.push(r[1..].to_vec());
            } else {
                let x0 = Rat::from(r[0].clone());
                out.vertices
                    .push(r[1..].iter().map(|x| Rat::from(x.clone()) / &x0).collect());
            }
        }
        for l in dd.lines {
            if l[0].is_zero() {
                out.lines.push(l[1..].to_vec());
            } else {
                // A line crossing x0 = 0 splits into a vertex direction and
                // cannot occur after the x0 >= 0 cut.
                unreachable!("line with nonzero homogenizing coordinate");
            }
        }
        out.vertices.sort();
        out.vertices.dedup();
        out
    }

    pub fn is_empty(&self) -> bool {
        let g = self.generators();
        g.vertices.is_empty()
    }

    /// A point of the polyhedron (average of vertices), if nonempty.
    pub fn sample_point(&self) -> Option<RatVec> {
        let g = self.generators();
        if g.vertices.is_empty() {
            return None;
        }
        let n = Rat::from(rat::Int::from(g.vertices.len() as i64));
        let mut acc = rat::zeros(self.dim);
        for v in &g.vertices {
            acc = rat::add(&acc, v);
        }
        Some(acc.iter().map(|x| x / &n).collect())
    }

    /// Exact minimum of `c . x`, with an argmin vertex.
    pub fn minimize(&self, c: &[Rat]) -> LpResult {
        let g = self.generators();
        if g.vertices.is_empty() {
            return LpResult::Infeasible;
        }
        for l in &g.lines {
            if !rat::dot(c, &rat::to_rat_vec(l)).is_zero() {
                return LpResult::Unbounded;
            }
        }
        for r in &g.rays {
            if rat::dot(c, &rat::to_rat_vec(r)).is_negative() {
                return LpResult::Unbounded;
            }
        }
        let mut best: Option<(Rat, RatVec)> = None;
        for v in &g.vertices {
            let val = rat::dot(c, v);
            match &best {
                Some((b, _)) if *b <= val => {}
                _ => best = Some((val, v.clone())),
            }
        }
        let (value, argmin) = best.unwrap();
        LpResult::Optimal { value, argmin }
    }

    pub fn maximize(&self, c: &[Rat]) -> LpResult {
        match self.minimize(&rat::neg(c)) {
            LpResult::Optimal { value, argmin } => LpResult::Optimal { value: -value, argmin },
            other => other,
        }
    }

    /// All lattice points; requires a bounded polyhedron.
    pub fn lattice_points(&self) -> Result<Vec<IntVec>, KernelError> {
        let g = self.generators();
        if !g.rays.is_empty() || !g.lines.is_empty() {
            return Err(KernelError::Invalid("lattice enumeration needs a bounded polytope".into()));
        }
        if g.vertices.is_empty() {
            return Ok(vec![]);
        }
        let mut lo = g.vertices[0].clone();
        let mut hi = g.vertices[0].clone();
        for v in &g.vertices {
            for i in 0..self.dim {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        let lo: Vec<i128> = lo
            .iter()
            .map(|x| {
                let f = x.ceil().to_integer();
                i128::try_from(&f).expect("desk-scale bound")
            })
            .collect();
        let hi: Vec<i128> = hi
            .iter()
            .map(|x| {
                let f = x.floor().to_integer();
                i128::try_from(&f).expect("desk-scale bound")
            })
            .collect();
        let mut out = Vec::new();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Ok(out);
        }
        // Equalities participate in the scan as opposite inequalities.
        let mut rows: Vec<(RatVec, Rat)> = self.ineqs.clone();
        for (a, b) in &self.eqs {
            rows.push((a.clone(), b.clone()));
            rows.push((rat::neg(a), -b.clone()));
        }
        let mut cur: Vec<i128> = vec![0; self.dim];
        self.lattice_scan(&rows, &lo, &hi, 0, &mut cur, &mut out);
        out.sort();
        Ok(out)
    }

    /// Depth-first enumeration fixing coordinates left to right. At
    /// each depth the admissible range of the next coordinate is
    /// tightened against every row, bounding the still-free
    /// coordinates by the box — exact once all coordinates are fixed.
    fn lattice_scan(
        &self,
        rows: &[(RatVec, Rat)],
        lo: &[i128],
        hi: &[i128],
        k: usize,
        cur: &mut Vec<i128>,
        out: &mut Vec<IntVec>,
    ) {
        if k == self.dim {
            let cand: RatVec = cur.iter().map(|&x| Rat::from(rat::Int::from(x))).collect();
            if self.contains(&cand) {
                out.push(cur.iter().map(|&x| rat::Int::from(x)).collect());
            }
            return;
        }
        let mut klo = lo[k];
        let mut khi = hi[k];
        for (a, b) in rows {
            // a_k·x_k + c ≥ 0 with c an upper bound of the row over
            // the fixed prefix and the free-box suffix.
            let mut c = b.clone();
            for j in 0..k {
                c += &a[j] * Rat::from(rat::Int::from(cur[j]));
            }
            for j in k + 1..self.dim {
                let vlo = &a[j] * Rat::from(rat::Int::from(lo[j]));
                let vhi = &a[j] * Rat::from(rat::Int::from(hi[j]));
                c += vlo.max(vhi);
            }
            let ak = &a[k];
            if ak.is_zero() {
                if c.is_negative() {
                    return;
                }
            } else {
                let q = -c / ak;
                if ak.is_positive() {
                    let bound = q.ceil().to_integer();
                    if let Ok(v) = i128::try_from(&bound) {
                        klo = klo.max(v);
                    }
                } else {
                    let bound = q.floor().to_integer();
                    if let Ok(v) = i128::try_from(&bound) {
                        khi = khi.min(v);
                    }
                }
            }
        }
        for v in klo..=khi {
            cur[k] = v;
            self.lattice_scan(rows, lo, hi, k + 1, cur, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, argmin: RatVec },
}

impl LpResult {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            LpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Facet description of the convex hull of finitely many points
/// (bounded polytopes only).
pub fn hull_facets(dim: usize, points: &[RatVec]) -> HPoly {
    let hom: Vec<RatVec> = points
        .iter()
        .map(|p| {
            let mut v = Vec::with_capacity(dim + 1);
            v.push(Rat::one());
            v.extend_from_slice(p);
            v
        })
        .collect();
    let (facets, span_eqs) = cone_facets(dim + 1, &hom, &[]);
    let mut out = HPoly::new(dim);
    for f in facets {
        let b = Rat::from(f[0].clone());
        let a: RatVec = f[1..].iter().map(|x| Rat::from(x.clone())).collect();
        if rat::is_zero_vec(&a) {
            continue; // the trivial x0 >= 0 facet
        }
        out.add_ineq(a, b);
    }
    for e in span_eqs {
        let b = Rat::from(e[0].clone());
        let a: RatVec = e[1..].iter().map(|x| Rat::from(x.clone())).collect();
        out.add_eq(a, b);
    }
    out
}

/// Homogeneous cone in halfspace form, used by the cover checker.
#[derive(Clone, Debug)]
pub struct ConeH {
    pub dim: usize,
    pub ineqs: Vec<RatVec>,
}

impl ConeH {
    pub fn generators(&self) -> DdCone {
        dd_from_halfspaces(self.dim, &self.ineqs, &[])
    }

    pub fn contains_gen(&self, g: &[Rat]) -> bool {
        self.ineqs.iter().all(|f| !rat::dot(f, g).is_negative())
    }

    fn contains_cone(&self, other: &DdCone) -> bool {
        other.rays.iter().all(|r| self.contains_gen(&rat::to_rat_vec(r)))
            && other.lines.iter().all(|l| {
                let v = rat::to_rat_vec(l);
                self.contains_gen(&v) && self.contains_gen(&rat::neg(&v))
            })
    }
}

/// Exact check that the cone cut out by `parent` is covered by the
/// union of the `pieces`. Returns a witness generator of an uncovered
/// region on failure.
pub fn cone_covered_by(parent: &ConeH, pieces: &[ConeH]) -> Result<(), RatVec> {
    fn rel_interior_point(g: &DdCone) -> RatVec {
        let mut acc = rat::zeros(g.dim);
        for r in &g.rays {
            acc = rat::add(&acc, &rat::to_rat_vec(r));
        }
        acc
    }

    fn dd_dim(g: &DdCone) -> usize {
        let mut m: Vec<RatVec> = g.rays.iter().map(|r| rat::to_rat_vec(r)).collect();
        m.extend(g.lines.iter().map(|l| rat::to_rat_vec(l)));
        linalg::rank(&m)
    }

    /// `region ∩ q` when the intersection has dimension `full_dim`.
    fn full_dim_meet(region: &ConeH, q: &ConeH, full_dim: usize) -> bool {
        let mut meet = region.clone();
        meet.ineqs.extend(q.ineqs.iter().cloned());
        let mg = meet.generators();
        !mg.is_trivial() && dd_dim(&mg) >= full_dim
    }

    // Once every chamber of the parent's dimension is covered, the
    // lower-dimensional chambers are covered too (the pieces are
    // closed), so those are pruned throughout.
    fn go(
        region: ConeH,
        pieces: &[ConeH],
        remaining: &[ConeH],
        full_dim: usize,
    ) -> Result<(), RatVec> {
        let gens = region.generators();
        if gens.is_trivial() || dd_dim(&gens) < full_dim {
            return Ok(());
        }
        if pieces.iter().any(|q| q.contains_cone(&gens)) {
            return Ok(());
        }
        let (q, rest) = match remaining.split_first() {
            Some(x) => x,
            None => {
                // A chamber outside every piece. Its relative interior
                // point can still lie inside a piece when the chamber
                // straddles facets we have not split on; refine then.
                // Only a piece meeting the chamber full-dimensionally
                // can make progress; if none contains w, some
                // neighbourhood of w is uncovered.
                let w = rel_interior_point(&gens);
                if let Some(q) = pieces
                    .iter()
                    .find(|q| q.contains_gen(&w) && full_dim_meet(&region, q, full_dim))
                {
                    let q = q.clone();
                    return go(region, pieces, std::slice::from_ref(&q), full_dim);
                }
                return Err(w);
            }
        };
        // A piece not meeting the region full-dimensionally cannot help
        // cover it; skip it instead of splitting on its facets.
        if !full_dim_meet(&region, q, full_dim) {
            return go(region, pieces, rest, full_dim);
        }
        // Split the region by the facets of q; the part inside q is
        // covered, the complements recurse.
        let mut prefix = region.clone();
        for f in &q.ineqs {
            let mut outside = prefix.clone();
            outside.ineqs.push(rat::neg(f));
            go(outside, pieces, rest, full_dim)?;
            prefix.ineqs.push(f.clone());
        }
        Ok(())
    }

    let full_dim = dd_dim(&parent.generators());
    go(parent.clone(), pieces, pieces, full_dim)
}
