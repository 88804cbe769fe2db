//! Finite rational cones: generator/facet double descriptions,
//! halfspace intersection, and simplicial triangulation.

use crate::error::KernelError;
use crate::linalg;
use crate::polyhedron::{self, ConeH};
use crate::rat::{self, IntVec, Rat, RatVec};
use num_traits::{Signed, Zero};

/// Ambient dimensions above this are rejected by the lattice-heavy
/// operations (Hilbert bases and everything built on them).
pub const DEFAULT_DIM_LIMIT: usize = 6;

/// A finite rational cone `{ Σ t_i g_i : t_i >= 0 }`, carrying both a
/// generator and a facet description. The two descriptions are
/// cross-checked against each other on construction.
#[derive(Clone, Debug)]
pub struct Cone {
    pub ambient_dim: usize,
    /// Extreme rays (primitive integer, sorted); for a non-pointed cone
    /// this also includes both orientations of a lineality basis.
    pub generators: Vec<RatVec>,
    facets: Vec<IntVec>,
    span_eqs: Vec<IntVec>,
    lines: Vec<IntVec>,
}

impl Cone {
    pub fn from_generators(ambient_dim: usize, gens: &[RatVec]) -> Result<Cone, KernelError> {
        for g in gens {
            if g.len() != ambient_dim {
                return Err(KernelError::DimensionMismatch { expected: ambient_dim, got: g.len() });
            }
        }
        let (facets, span_eqs) = polyhedron::cone_facets(ambient_dim, gens, &[]);
        let cone = Self::assemble(ambient_dim, facets, span_eqs)?;
        // Cross-check: the input generators satisfy the facet description,
        // and every computed ray is a nonnegative combination of the input.
        for g in gens {
            if !cone.contains_unchecked(g) {
                return Err(KernelError::Invalid(
                    "facet description rejects an input generator".into(),
                ));
            }
        }
        for r in &cone.generators {
            if !in_nonneg_span(gens, r) {
                return Err(KernelError::Invalid(
                    "computed extreme ray is not a combination of the input generators".into(),
                ));
            }
        }
        Ok(cone)
    }

    pub fn from_halfspaces(
        ambient_dim: usize,
        ineqs: &[RatVec],
        eqs: &[RatVec],
    ) -> Result<Cone, KernelError> {
        for f in ineqs.iter().chain(eqs) {
            if f.len() != ambient_dim {
                return Err(KernelError::DimensionMismatch { expected: ambient_dim, got: f.len() });
            }
        }
        let dd = polyhedron::dd_from_halfspaces(ambient_dim, ineqs, eqs);
        let mut gens: Vec<RatVec> = dd.rays.iter().map(|r| rat::to_rat_vec(r)).collect();
        for l in &dd.lines {
            let v = rat::to_rat_vec(l);
            gens.push(rat::neg(&v));
            gens.push(v);
        }
        Self::from_generators(ambient_dim, &gens)
    }

    fn assemble(
        ambient_dim: usize,
        facets: Vec<IntVec>,
        span_eqs: Vec<IntVec>,
    ) -> Result<Cone, KernelError> {
        let ineqs: Vec<RatVec> = facets.iter().map(|f| rat::to_rat_vec(f)).collect();
        let eqs: Vec<RatVec> = span_eqs.iter().map(|f| rat::to_rat_vec(f)).collect();
        let dd = polyhedron::dd_from_halfspaces(ambient_dim, &ineqs, &eqs);
        let mut generators: Vec<RatVec> = dd.rays.iter().map(|r| rat::to_rat_vec(r)).collect();
        for l in &dd.lines {
            let v = rat::to_rat_vec(l);
            generators.push(rat::neg(&v));
            generators.push(v);
        }
        Ok(Cone { ambient_dim, generators, facets, span_eqs, lines: dd.lines })
    }

    pub fn facets(&self) -> &[IntVec] {
        &self.facets
    }

    pub fn span_equations(&self) -> &[IntVec] {
        &self.span_eqs
    }

    /// Dimension of the linear span of the cone.
    pub fn dim(&self) -> usize {
        self.ambient_dim - self.span_eqs.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// Extreme rays as primitive integer vectors; requires pointedness.
    pub fn rays_int(&self) -> Vec<IntVec> {
        assert!(self.is_pointed(), "rays of a non-pointed cone");
        self.generators.iter().map(|g| rat::primitive_integer(g)).collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_pointed() && self.generators.len() == self.dim()
    }

    fn contains_unchecked(&self, v: &[Rat]) -> bool {
        self.facets.iter().all(|f| !rat::dot(&rat::to_rat_vec(f), v).is_negative())
            && self.span_eqs.iter().all(|e| rat::dot(&rat::to_rat_vec(e), v).is_zero())
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool, KernelError> {
        if v.len() != self.ambient_dim {
            return Err(KernelError::DimensionMismatch { expected: self.ambient_dim, got: v.len() });
        }
        Ok(self.contains_unchecked(v))
    }

    /// True when `v` lies in the cone but on none of its facets.
    pub fn contains_in_relative_interior(&self, v: &[Rat]) -> bool {
        self.facets.iter().all(|f| rat::dot(&rat::to_rat_vec(f), v).is_positive())
            && self.span_eqs.iter().all(|e| rat::dot(&rat::to_rat_vec(e), v).is_zero())
    }

    pub fn subset_of(&self, other: &Cone) -> bool {
        self.generators.iter().all(|g| other.contains_unchecked(g))
    }

    /// `{w in self : f(w) >= 0}` with a correct generator description.
    pub fn intersect_halfspace(&self, f: &[Rat]) -> Result<Cone, KernelError> {
        if f.len() != self.ambient_dim {
            return Err(KernelError::DimensionMismatch { expected: self.ambient_dim, got: f.len() });
        }
        let mut ineqs: Vec<RatVec> = self.facets.iter().map(|g| rat::to_rat_vec(g)).collect();
        ineqs.push(f.to_vec());
        let eqs: Vec<RatVec> = self.span_eqs.iter().map(|g| rat::to_rat_vec(g)).collect();
        Self::from_halfspaces(self.ambient_dim, &ineqs, &eqs)
    }

    /// Halfspace view used by the exact cover checker.
    pub fn as_coneh(&self) -> ConeH {
        let mut ineqs: Vec<RatVec> = self.facets.iter().map(|f| rat::to_rat_vec(f)).collect();
        for e in &self.span_eqs {
            let v = rat::to_rat_vec(e);
            ineqs.push(rat::neg(&v));
            ineqs.push(v);
        }
        ConeH { dim: self.ambient_dim, ineqs }
    }

    /// A rational point in the relative interior (sum of generators).
    pub fn relative_interior_point(&self) -> RatVec {
        let mut acc = rat::zeros(self.ambient_dim);
        for g in &self.generators {
            acc = rat::add(&acc, g);
        }
        acc
    }
}

fn in_nonneg_span(gens: &[RatVec], v: &[Rat]) -> bool {
    // Feasibility of { t >= 0 : Σ t_i g_i = v }, by double description.
    let dim = v.len();
    let mut p = polyhedron::HPoly::new(gens.len());
    for i in 0..gens.len() {
        let mut e = rat::zeros(gens.len());
        e[i] = Rat::from(rat::Int::from(1));
        p.add_ineq(e, Rat::zero());
    }
    for c in 0..dim {
        let row: RatVec = gens.iter().map(|g| g[c].clone()).collect();
        p.add_eq(row, -v[c].clone());
    }
    !p.is_empty()
}

/// A decomposition of a cone into finitely many subcones whose union is
/// the parent; the union is verified exactly on construction.
#[derive(Clone, Debug)]
pub struct ConeDecomposition {
    pub parent: Cone,
    pub pieces: Vec<Cone>,
}

impl ConeDecomposition {
    pub fn new(parent: Cone, pieces: Vec<Cone>) -> Result<Self, KernelError> {
        let d = ConeDecomposition { parent, pieces };
        d.verify()?;
        Ok(d)
    }

    pub fn verify(&self) -> Result<(), KernelError> {
        for p in &self.pieces {
            if !p.subset_of(&self.parent) {
                return Err(KernelError::Invalid("decomposition piece leaves the parent".into()));
            }
        }
        let hs: Vec<ConeH> = self.pieces.iter().map(|p| p.as_coneh()).collect();
        polyhedron::cone_covered_by(&self.parent.as_coneh(), &hs).map_err(|w| {
            KernelError::Invalid(format!(
                "decomposition does not cover the parent near {}",
                rat::format_vec(&w)
            ))
        })
    }
}

/// Triangulates a pointed cone into simplicial subcones. Every vector
/// in `required_rays` (which must lie in the cone) appears as a ray of
/// the output, so any function linear on the star of those rays is
/// linear on each piece.
pub fn triangulate(c: &Cone, required_rays: &[IntVec]) -> Result<ConeDecomposition, KernelError> {
    if !c.is_pointed() {
        return Err(KernelError::NotPointed(rat::format_vec(&rat::to_rat_vec(&c.lines[0]))));
    }
    for r in required_rays {
        if !c.contains(&rat::to_rat_vec(r))? {
            return Err(KernelError::Invalid(format!(
                "required ray {} is outside the cone",
                rat::format_vec(&rat::to_rat_vec(r))
            )));
        }
    }
    if c.is_trivial() {
        return ConeDecomposition::new(c.clone(), vec![c.clone()]);
    }
    let rays = c.rays_int();
    let mut pieces = pulling(&rays, c.ambient_dim);
    for w in required_rays {
        let w = rat::primitive_integer(&rat::to_rat_vec(w));
        if w.iter().all(|x| x.is_zero()) {
            continue;
        }
        pieces = stellar_insert(pieces, &w);
    }
    let cones: Vec<Cone> = pieces
        .iter()
        .map(|gens| {
            let g: Vec<RatVec> = gens.iter().map(|r| rat::to_rat_vec(r)).collect();
            Cone::from_generators(c.ambient_dim, &g)
        })
        .collect::<Result<_, _>>()?;
    for piece in &cones {
        debug_assert!(piece.is_simplicial());
    }
    ConeDecomposition::new(c.clone(), cones)
}

/// Pulling triangulation of the pointed cone spanned by `rays`
/// (extreme, primitive): pull from the first ray, recurse on the
/// facets not containing it.
fn pulling(rays: &[IntVec], ambient_dim: usize) -> Vec<Vec<IntVec>> {
    let gens: Vec<RatVec> = rays.iter().map(|r| rat::to_rat_vec(r)).collect();
    let mat: Vec<RatVec> = gens.clone();
    let dim = linalg::rank(&mat);
    if rays.len() == dim {
        return vec![rays.to_vec()];
    }
    let v = &rays[0];
    let (facets, _) = polyhedron::cone_facets(ambient_dim, &gens, &[]);
    let mut out = Vec::new();
    for f in &facets {
        if rat::dot_int(f, v).is_zero() {
            continue;
        }
        let face_rays: Vec<IntVec> =
            rays.iter().filter(|r| rat::dot_int(f, r).is_zero()).cloned().collect();
        if face_rays.is_empty() {
            continue;
        }
        for mut piece in pulling(&face_rays, ambient_dim) {
            piece.push(v.clone());
            piece.sort();
            out.push(piece);
        }
    }
    out
}

/// Stellar subdivision at `w`: every simplicial piece containing `w`
/// is replaced by the joins of `w` with the facets it does not lie on.
fn stellar_insert(pieces: Vec<Vec<IntVec>>, w: &IntVec) -> Vec<Vec<IntVec>> {
    let mut out = Vec::new();
    for gens in pieces {
        let cols: Vec<RatVec> = gens.iter().map(|g| rat::to_rat_vec(g)).collect();
        // Coordinates of w in the (independent) generators, if w lies
        // in their span.
        let dim = w.len();
        let mat: Vec<RatVec> = (0..dim).map(|c| cols.iter().map(|g| g[c].clone()).collect()).collect();
        let coords = linalg::solve(&mat, &rat::to_rat_vec(w));
        let inside = coords.as_ref().map_or(false, |cs| cs.iter().all(|x| !x.is_negative()));
        match (inside, coords) {
            (true, Some(cs)) => {
                let support: Vec<usize> =
                    (0..gens.len()).filter(|&i| cs[i].is_positive()).collect();
                if support.len() <= 1 {
                    // w is a ray of the piece already.
                    out.push(gens);
                    continue;
                }
                for &i in &support {
                    let mut piece = gens.clone();
                    piece[i] = w.clone();
                    piece.sort();
                    out.push(piece);
                }
            }
            _ => out.push(gens),
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int_vec, vec_i};

    fn cone2(gens: &[&[i64]]) -> Cone {
        let g: Vec<RatVec> = gens.iter().map(|r| vec_i(r)).collect();
        Cone::from_generators(gens[0].len(), &g).unwrap()
    }

    #[test]
    fn contains_examples() {
        let c = cone2(&[&[1, 0], &[1, 2]]);
        assert!(c.contains(&vec_i(&[2, 1])).unwrap());
        assert!(!c.contains(&vec_i(&[1, -1])).unwrap());
        assert!(c.contains(&vec_i(&[0, 0])).unwrap());
        assert!(c.contains(&vec_i(&[3, 5])).is_ok());
        assert!(c.contains(&vec_i(&[1, 2, 3])).is_err());
    }

    #[test]
    fn intersect_halfspace_examples() {
        let quad = cone2(&[&[1, 0], &[0, 1]]);
        // x - y >= 0 cuts the quadrant to <(1,0),(1,1)>.
        let cut = quad.intersect_halfspace(&vec_i(&[1, -1])).unwrap();
        let mut rays = cut.rays_int();
        rays.sort();
        assert_eq!(rays, vec![int_vec(&[1, 0]), int_vec(&[1, 1])]);
        // f >= 0 everywhere: unchanged.
        let same = quad.intersect_halfspace(&vec_i(&[1, 1])).unwrap();
        assert_eq!(same.rays_int().len(), 2);
        // f = -x: only the y-axis survives.
        let axis = quad.intersect_halfspace(&vec_i(&[-1, 0])).unwrap();
        assert_eq!(axis.rays_int(), vec![int_vec(&[0, 1])]);
    }

    #[test]
    fn pointedness() {
        assert!(cone2(&[&[1, 0], &[1, 2]]).is_pointed());
        let halfplane = cone2(&[&[1, 0], &[0, 1], &[0, -1]]);
        assert!(!halfplane.is_pointed());
        assert_eq!(halfplane.dim(), 2);
    }

    #[test]
    fn lower_dimensional_cone() {
        let ray = cone2(&[&[2, 4]]);
        assert_eq!(ray.dim(), 1);
        assert!(ray.contains(&vec_i(&[1, 2])).unwrap());
        assert!(!ray.contains(&vec_i(&[1, 3])).unwrap());
    }

    #[test]
    fn triangulate_simplicial_is_identity() {
        let c = cone2(&[&[1, 0], &[1, 2]]);
        let t = triangulate(&c, &[]).unwrap();
        assert_eq!(t.pieces.len(), 1);
        assert_eq!(t.pieces[0].rays_int(), c.rays_int());
    }

    #[test]
    fn triangulate_with_required_ray() {
        let c = cone2(&[&[1, 0], &[0, 1]]);
        let t = triangulate(&c, &[int_vec(&[1, 1])]).unwrap();
        assert_eq!(t.pieces.len(), 2);
        let mut rays: Vec<Vec<IntVec>> = t.pieces.iter().map(|p| p.rays_int()).collect();
        rays.sort();
        assert_eq!(rays[0], vec![int_vec(&[0, 1]), int_vec(&[1, 1])]);
        assert_eq!(rays[1], vec![int_vec(&[1, 0]), int_vec(&[1, 1])]);
    }

    #[test]
    fn triangulate_cone_over_square() {
        let c = cone2(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        let t = triangulate(&c, &[]).unwrap();
        assert_eq!(t.pieces.len(), 2);
        for p in &t.pieces {
            assert!(p.is_simplicial());
        }
        // The union invariant was verified exactly on construction.
    }

    #[test]
    fn triangulate_rejects_outside_required_ray() {
        let c = cone2(&[&[1, 0], &[0, 1]]);
        assert!(triangulate(&c, &[int_vec(&[-1, 1])]).is_err());
    }

    #[test]
    fn triangulate_rejects_nonpointed() {
        let halfplane = cone2(&[&[1, 0], &[0, 1], &[0, -1]]);
        assert!(matches!(triangulate(&halfplane, &[]), Err(KernelError::NotPointed(_))));
    }
}
