//! Rational piecewise-linear characteristic systems
//! `D(λ) = r(λ)(K + A + B(λ))` on a cone, and their coefficient-level
//! adjoint / klt / dlt classification.

use crate::cone::{Cone, ConeDecomposition};
use crate::divisor::{Divisor, Registry};
use crate::error::KernelError;
use crate::hilbert;
use crate::rat::{self, IntVec, Rat, RatVec};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A linear map from the grading lattice to divisor space, stored as
/// one linear functional per prime divisor in its support.
#[derive(Clone, Debug)]
pub struct DivLinMap {
    pub registry: Arc<Registry>,
    pub dim: usize,
    rows: BTreeMap<usize, RatVec>,
}

impl DivLinMap {
    pub fn zero(registry: &Arc<Registry>, dim: usize) -> DivLinMap {
        DivLinMap { registry: registry.clone(), dim, rows: BTreeMap::new() }
    }

    pub fn from_named(
        registry: &Arc<Registry>,
        dim: usize,
        rows: &[(&str, RatVec)],
    ) -> Result<DivLinMap, KernelError> {
        let mut m = DivLinMap::zero(registry, dim);
        for (name, row) in rows {
            if row.len() != dim {
                return Err(KernelError::DimensionMismatch { expected: dim, got: row.len() });
            }
            m.rows.insert(registry.id_of(name)?, row.clone());
        }
        Ok(m)
    }

    pub fn set_row(&mut self, id: usize, row: RatVec) {
        assert_eq!(row.len(), self.dim);
        if rat::is_zero_vec(&row) {
            self.rows.remove(&id);
        } else {
            self.rows.insert(id, row);
        }
    }

    pub fn row(&self, id: usize) -> RatVec {
        self.rows.get(&id).cloned().unwrap_or_else(|| rat::zeros(self.dim))
    }

    pub fn support(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    pub fn eval(&self, w: &[Rat]) -> Divisor {
        let mut d = Divisor::zero(&self.registry);
        for (&id, row) in &self.rows {
            d.set_coeff_id(id, rat::dot(row, w));
        }
        d
    }
}

/// One linearity region: `D(λ) = r(λ)(K + A) + rb(λ)` with `r` a linear
/// functional and `rb(λ) = r(λ)·B(λ)` a linear map. Storing `r·B`
/// instead of the degree-0 homogeneous `B` keeps every piece linear.
#[derive(Clone, Debug)]
pub struct Piece {
    pub r: RatVec,
    pub rb: DivLinMap,
}

impl Piece {
    pub fn r_at(&self, w: &[Rat]) -> Rat {
        rat::dot(&self.r, w)
    }
}

#[derive(Clone, Debug)]
pub struct CharacteristicSystem {
    pub registry: Arc<Registry>,
    pub decomposition: ConeDecomposition,
    pub pieces: Vec<Piece>,
    pub k: Divisor,
    /// The ample part, when one is declared.
    pub a: Option<Divisor>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeReport {
    pub superadditive_mob: bool,
    pub concave: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointClassification {
    pub is_divisorial: bool,
    pub is_adjoint: bool,
    pub is_big: bool,
    pub is_klt: bool,
    pub is_dlt: bool,
    pub strictly_dlt_with: Option<String>,
    pub delta_margin: Option<Rat>,
}

impl CharacteristicSystem {
    pub fn new(
        registry: Arc<Registry>,
        decomposition: ConeDecomposition,
        pieces: Vec<Piece>,
        k: Divisor,
        a: Option<Divisor>,
    ) -> Result<Self, KernelError> {
        if pieces.len() != decomposition.pieces.len() {
            return Err(KernelError::Invalid(format!(
                "{} linear pieces for {} cones",
                pieces.len(),
                decomposition.pieces.len()
            )));
        }
        let dim = decomposition.parent.ambient_dim;
        for p in &pieces {
            if p.r.len() != dim || p.rb.dim != dim {
                return Err(KernelError::DimensionMismatch { expected: dim, got: p.r.len() });
            }
        }
        let sys = CharacteristicSystem { registry, decomposition, pieces, k, a };
        sys.check_face_agreement()?;
        Ok(sys)
    }

    /// A globally linear system on a single cone.
    pub fn linear(
        registry: Arc<Registry>,
        cone: Cone,
        r: RatVec,
        rb: DivLinMap,
        k: Divisor,
        a: Option<Divisor>,
    ) -> Result<Self, KernelError> {
        let dec = ConeDecomposition::new(cone.clone(), vec![cone])?;
        Self::new(registry, dec, vec![Piece { r, rb }], k, a)
    }

    pub fn ambient_dim(&self) -> usize {
        self.decomposition.parent.ambient_dim
    }

    pub fn is_linear(&self) -> bool {
        self.pieces.len() == 1
    }

    fn check_face_agreement(&self) -> Result<(), KernelError> {
        let cones = &self.decomposition.pieces;
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let mut ineqs: Vec<RatVec> =
                    cones[i].facets().iter().map(|f| rat::to_rat_vec(f)).collect();
                ineqs.extend(cones[j].facets().iter().map(|f| rat::to_rat_vec(f)));
                let mut eqs: Vec<RatVec> =
                    cones[i].span_equations().iter().map(|f| rat::to_rat_vec(f)).collect();
                eqs.extend(cones[j].span_equations().iter().map(|f| rat::to_rat_vec(f)));
                let meet = Cone::from_halfspaces(self.ambient_dim(), &ineqs, &eqs)?;
                for g in &meet.generators {
                    let ri = self.pieces[i].r_at(g);
                    let rj = self.pieces[j].r_at(g);
                    if ri != rj || self.pieces[i].rb.eval(g) != self.pieces[j].rb.eval(g) {
                        return Err(KernelError::Invalid(format!(
                            "pieces {i} and {j} disagree on the shared face at {}",
                            rat::format_vec(g)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn piece_containing(&self, w: &[Rat]) -> Option<usize> {
        self.decomposition
            .pieces
            .iter()
            .position(|c| c.contains(w).unwrap_or(false))
    }

    fn d_linear(&self, piece: usize, w: &[Rat]) -> Divisor {
        let p = &self.pieces[piece];
        let mut ka = self.k.clone();
        if let Some(a) = &self.a {
            ka = ka.add(a);
        }
        ka.scale(&p.r_at(w)).add(&p.rb.eval(w))
    }

    /// `D(w)` for `w` in the cone.
    pub fn eval(&self, w: &[Rat]) -> Result<Divisor, KernelError> {
        if w.len() != self.ambient_dim() {
            return Err(KernelError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: w.len(),
            });
        }
        let piece = self
            .piece_containing(w)
            .ok_or_else(|| KernelError::Precondition(format!(
                "{} is outside the grading cone",
                rat::format_vec(w)
            )))?;
        Ok(self.d_linear(piece, w))
    }

    /// The boundary `B(w) = rb(w)/r(w)`; needs `r(w) != 0`.
    pub fn boundary_at(&self, w: &[Rat]) -> Result<Divisor, KernelError> {
        let piece = self.piece_containing(w).ok_or_else(|| {
            KernelError::Precondition(format!("{} is outside the grading cone", rat::format_vec(w)))
        })?;
        let p = &self.pieces[piece];
        let r = p.r_at(w);
        if r.is_zero() {
            return Err(KernelError::Precondition(format!(
                "r vanishes at {}",
                rat::format_vec(w)
            )));
        }
        Ok(p.rb.eval(w).scale(&r.recip()))
    }

    /// `r(w)` on the piece containing `w`.
    pub fn r_at(&self, w: &[Rat]) -> Result<Rat, KernelError> {
        let piece = self.piece_containing(w).ok_or_else(|| {
            KernelError::Precondition(format!("{} is outside the grading cone", rat::format_vec(w)))
        })?;
        Ok(self.pieces[piece].r_at(w))
    }

    /// Evaluation points used by the classification: the Hilbert basis
    /// of each piece when the dimension permits, its extreme rays
    /// otherwise. The boundary `B` on a piece takes values in the
    /// convex hull of its values at these points.
    fn classification_points(&self) -> Vec<(usize, Vec<RatVec>)> {
        let mut out = Vec::new();
        for (i, c) in self.decomposition.pieces.iter().enumerate() {
            let pts: Vec<RatVec> = match hilbert::hilbert_basis(c) {
                Ok(hb) => hb.iter().map(|v| rat::to_rat_vec(v)).collect(),
                Err(_) => c.generators.clone(),
            };
            out.push((i, pts));
        }
        out
    }

    /// Superadditivity (sampled) and concavity (exact) of the system.
    ///
    /// Concavity of a PL map on a cone is equivalent to the map being
    /// the coefficientwise minimum of its piece-linear extensions, so
    /// it is decided exactly by evaluating every piece's extension on
    /// every other piece's generators. Superadditivity is sampled on
    /// sums of Hilbert-basis elements, with at most `bound` summands in
    /// `x + y`; `mob` replaces the raw PL map when supplied.
    pub fn check_shape(
        &self,
        mob: Option<&dyn Fn(&IntVec) -> Divisor>,
        bound: usize,
    ) -> ShapeReport {
        let concave = self.is_concave();
        let value = |v: &IntVec| -> Divisor {
            match mob {
                Some(m) => m(v),
                None => self.eval(&rat::to_rat_vec(v)).expect("sample in cone"),
            }
        };
        let base: Vec<IntVec> = match hilbert::hilbert_basis(&self.decomposition.parent) {
            Ok(hb) => hb,
            Err(_) => self
                .decomposition
                .parent
                .generators
                .iter()
                .map(|g| rat::primitive_integer(g))
                .collect(),
        };
        // All sums of up to bound/2 basis elements.
        let half = (bound / 2).max(1);
        let mut sums: Vec<IntVec> = base.clone();
        let mut frontier = base.clone();
        for _ in 1..half {
            let mut next = Vec::new();
            for s in &frontier {
                for b in &base {
                    let t: IntVec = s.iter().zip(b).map(|(x, y)| x + y).collect();
                    next.push(t);
                }
            }
            next.sort();
            next.dedup();
            sums.extend(next.iter().cloned());
            frontier = next;
        }
        sums.sort();
        sums.dedup();
        let mut superadditive = true;
        'outer: for x in &sums {
            for y in &sums {
                let s: IntVec = x.iter().zip(y).map(|(a, b)| a + b).collect();
                let lhs = value(&s);
                let rhs = value(x).add(&value(y));
                if !rhs.le(&lhs) {
                    superadditive = false;
                    break 'outer;
                }
            }
        }
        ShapeReport { superadditive_mob: superadditive, concave }
    }

    fn is_concave(&self) -> bool {
        for j in 0..self.pieces.len() {
            for g in &self.decomposition.pieces[j].generators {
                let here = self.d_linear(j, g);
                for i in 0..self.pieces.len() {
                    if i == j {
                        continue;
                    }
                    if !here.le(&self.d_linear(i, g)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Coefficient-level classification at the Hilbert-basis points of
    /// each piece.
    pub fn classify(&self) -> AdjointClassification {
        let zero = Rat::zero();
        let one = Rat::one();
        let mut all_b: Vec<(usize, Rat)> = Vec::new();
        let mut r_positive = true;
        // b values per prime-divisor id, collected over all sample points.
        let mut per_point_boundaries: Vec<Divisor> = Vec::new();
        for (i, pts) in self.classification_points() {
            let p = &self.pieces[i];
            for g in &pts {
                let r = p.r_at(g);
                if !r.is_positive() {
                    r_positive = false;
                    continue;
                }
                let b = p.rb.eval(g).scale(&r.recip());
                for (id, c) in b.iter() {
                    all_b.push((id, c.clone()));
                }
                per_point_boundaries.push(b);
            }
        }
        let in_unit = |c: &Rat| *c >= zero && *c <= one;
        let dlt_coeffs = r_positive && all_b.iter().all(|(_, c)| in_unit(c));
        let is_klt = r_positive && all_b.iter().all(|(_, c)| *c >= zero && *c < one);
        let is_big = self.a.is_some() && r_positive && all_b.iter().all(|(_, c)| *c >= zero);
        let is_adjoint = self.a.is_some() && dlt_coeffs;
        // Strictly dlt: some prime appears with multiplicity exactly one
        // in the boundary at every sample point.
        let mut strictly_dlt_with = None;
        if dlt_coeffs && !per_point_boundaries.is_empty() {
            let ids: Vec<usize> = per_point_boundaries
                .iter()
                .flat_map(|b| b.support())
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            for id in ids {
                if per_point_boundaries.iter().all(|b| b.coeff_id(id) == one) {
                    strictly_dlt_with = Some(self.registry.name_of(id).to_string());
                    break;
                }
            }
        }
        let delta_margin = if is_klt {
            let mut delta = one.clone();
            for (_, c) in &all_b {
                let m = &one - c;
                if m < delta {
                    delta = m;
                }
            }
            Some(delta)
        } else {
            None
        };
        AdjointClassification {
            is_divisorial: true,
            is_adjoint,
            is_big,
            is_klt,
            is_dlt: dlt_coeffs,
            strictly_dlt_with,
            delta_margin,
        }
    }

    /// `δ = min over generators and boundary components of 1 − b_i`,
    /// capped at 1; errors unless the system is klt.
    pub fn delta_margin(&self) -> Result<Rat, KernelError> {
        let c = self.classify();
        c.delta_margin.ok_or_else(|| {
            KernelError::Precondition("delta margin needs a klt system".into())
        })
    }
}
