//! Lattice-graded section rings over the toric oracle: graded pieces as
//! monomial bases, Veronese subrings, cone inflation, pushing a linear
//! system onto its image cone, and brute-force generation checks.

use crate::charsys::{CharacteristicSystem, DivLinMap};
use crate::cone::Cone;
use crate::divisor::Divisor;
use crate::error::KernelError;
use crate::hilbert;
use crate::linalg::{self, Mat};
use crate::polyhedron::HPoly;
use crate::rat::{self, IntVec, Rat, RatVec};
use crate::toric::{SectionSpace, ToricVariety};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

/// A graded ring element in the monomial model: its degree in the
/// grading lattice and the lattice point of the section.
pub type Element = (IntVec, IntVec);

/// A finite set of homogeneous generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub elements: Vec<Element>,
}

impl GeneratorSet {
    pub fn new(mut elements: Vec<Element>) -> GeneratorSet {
        elements.sort();
        elements.dedup();
        GeneratorSet { elements }
    }

    pub fn degrees(&self) -> Vec<IntVec> {
        let mut out: Vec<IntVec> = self.elements.iter().map(|(l, _)| l.clone()).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// The section ring of a characteristic system, graded by the lattice
/// points of the system's cone (optionally cut to a finite-index
/// sublattice). The graded piece at `λ` is `sections(D(λ))`.
#[derive(Debug)]
pub struct GradedRing {
    pub system: CharacteristicSystem,
    pub variety: ToricVariety,
    /// Each entry is an inverse sublattice basis matrix; `λ` is a valid
    /// degree iff every `M·λ` is integral. Empty means the full lattice.
    sublattice: Vec<Mat>,
    cache: Mutex<BTreeMap<IntVec, SectionSpace>>,
}

impl Clone for GradedRing {
    fn clone(&self) -> Self {
        GradedRing {
            system: self.system.clone(),
            variety: self.variety.clone(),
            sublattice: self.sublattice.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

/// Result of a degreewise generation check.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationReport {
    pub generated_up_to: u32,
    /// First graded piece not spanned: degree and a missing monomial.
    pub first_failure: Option<Element>,
}

impl GenerationReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

impl GradedRing {
    pub fn new(system: CharacteristicSystem, variety: ToricVariety) -> Result<Self, KernelError> {
        if system.registry.names() != variety.registry.names() {
            return Err(KernelError::Invalid(
                "grading system and variety use different divisor registries".into(),
            ));
        }
        Ok(GradedRing { system, variety, sublattice: Vec::new(), cache: Mutex::new(BTreeMap::new()) })
    }

    pub fn grading_dim(&self) -> usize {
        self.system.ambient_dim()
    }

    /// Degree-lattice membership (cone and sublattice).
    pub fn is_degree(&self, l: &IntVec) -> bool {
        let lr = rat::to_rat_vec(l);
        if !self.system.decomposition.parent.contains(&lr).unwrap_or(false) {
            return false;
        }
        self.in_sublattice(l)
    }

    fn in_sublattice(&self, l: &IntVec) -> bool {
        let lr = rat::to_rat_vec(l);
        self.sublattice
            .iter()
            .all(|m| linalg::mat_vec(m, &lr).iter().all(|c| c.is_integer()))
    }

    /// The graded piece at `λ`: sections of `D(λ)`, cached.
    pub fn piece(&self, l: &IntVec) -> Result<SectionSpace, KernelError> {
        if !self.is_degree(l) {
            return Err(KernelError::Precondition(format!(
                "{} is not a degree of the grading monoid",
                rat::format_vec(&rat::to_rat_vec(l))
            )));
        }
        if let Some(s) = self.cache.lock().unwrap().get(l) {
            return Ok(s.clone());
        }
        let d = self.system.eval(&rat::to_rat_vec(l))?;
        let s = self.variety.sections(&d)?;
        self.cache.lock().unwrap().insert(l.clone(), s.clone());
        Ok(s)
    }

    /// Monomial multiplication: degrees and lattice points add; the
    /// product is asserted to lie in its graded piece.
    pub fn multiply(&self, s1: &Element, s2: &Element) -> Result<Element, KernelError> {
        for (l, m) in [s1, s2] {
            if !self.piece(l)?.monomials.contains(m) {
                return Err(KernelError::Precondition(format!(
                    "monomial {} is not a section in degree {}",
                    rat::format_vec(&rat::to_rat_vec(m)),
                    rat::format_vec(&rat::to_rat_vec(l))
                )));
            }
        }
        let l: IntVec = s1.0.iter().zip(&s2.0).map(|(a, b)| a + b).collect();
        let m: IntVec = s1.1.iter().zip(&s2.1).map(|(a, b)| a + b).collect();
        assert!(
            self.piece(&l)?.monomials.contains(&m),
            "product of sections left its graded piece"
        );
        Ok((l, m))
    }

    /// The Veronese subring graded by the intersection with the
    /// finite-index sublattice spanned by `basis`.
    pub fn veronese(&self, basis: &[IntVec]) -> Result<GradedRing, KernelError> {
        let r = self.grading_dim();
        if basis.len() != r || basis.iter().any(|b| b.len() != r) {
            return Err(KernelError::Invalid(
                "sublattice basis must be square in the grading dimension".into(),
            ));
        }
        // Columns are the basis vectors.
        let cols: Mat = (0..r)
            .map(|i| basis.iter().map(|b| Rat::from(b[i].clone())).collect())
            .collect();
        let inv = linalg::inverse(&cols)
            .ok_or_else(|| KernelError::Invalid("sublattice is not of finite index".into()))?;
        let mut out = self.clone();
        out.cache = Mutex::new(BTreeMap::new());
        out.sublattice.push(inv);
        Ok(out)
    }

    fn tau_positive(&self) -> Result<(), KernelError> {
        for g in &self.system.decomposition.parent.generators {
            let tau: Rat = g.iter().cloned().sum();
            if !tau.is_positive() {
                return Err(KernelError::Precondition(format!(
                    "total degree is not positive on the cone generator {}",
                    rat::format_vec(g)
                )));
            }
        }
        Ok(())
    }

    /// All degrees of total degree `t`, in sorted order.
    pub fn degrees_of_total(&self, t: u32) -> Result<Vec<IntVec>, KernelError> {
        let r = self.grading_dim();
        let parent = &self.system.decomposition.parent;
        let mut p = HPoly::new(r);
        for f in parent.facets() {
            p.add_ineq(rat::to_rat_vec(f), Rat::zero());
        }
        for e in parent.span_equations() {
            p.add_eq(rat::to_rat_vec(e), Rat::zero());
        }
        p.add_eq(vec![Rat::one(); r], -rat::rat_i(t as i64));
        let mut pts: Vec<IntVec> =
            p.lattice_points()?.into_iter().filter(|l| self.in_sublattice(l)).collect();
        pts.sort();
        Ok(pts)
    }
}

/// Degreewise multiplicative closure of `g`, compared against the full
/// graded pieces for every degree of total degree `≤ bound`. Requires
/// the total degree `τ(λ) = Σλ_j` to be positive on the grading cone.
pub fn verify_generation(
    ring: &GradedRing,
    g: &GeneratorSet,
    bound: u32,
) -> Result<GenerationReport, KernelError> {
    verify_generation_on(ring, g, bound, |_| true)
}

/// Like [`verify_generation`], but the closure (computed in the whole
/// ring) is only compared with the graded pieces at degrees selected by
/// `target` — used to check generation of a subring supported on a
/// submonoid of the ambient grading.
pub fn verify_generation_on(
    ring: &GradedRing,
    g: &GeneratorSet,
    bound: u32,
    target: impl Fn(&IntVec) -> bool + Sync,
) -> Result<GenerationReport, KernelError> {
    if bound == 0 {
        return Err(KernelError::Precondition("generation bound must be ≥ 1".into()));
    }
    ring.tau_positive()?;
    for (l, m) in &g.elements {
        if !ring.piece(l)?.monomials.contains(m) {
            return Err(KernelError::Invalid(format!(
                "generator {} in degree {} is not a section",
                rat::format_vec(&rat::to_rat_vec(m)),
                rat::format_vec(&rat::to_rat_vec(l))
            )));
        }
    }
    let mut by_degree: BTreeMap<IntVec, BTreeSet<IntVec>> = BTreeMap::new();
    for (l, m) in &g.elements {
        by_degree.entry(l.clone()).or_default().insert(m.clone());
    }
    // closure[λ] for all λ with τ(λ) < current level.
    let mut closure: BTreeMap<IntVec, BTreeSet<IntVec>> = BTreeMap::new();
    for t in 1..=bound {
        let degrees = ring.degrees_of_total(t)?;
        let level: Vec<(IntVec, BTreeSet<IntVec>, Option<IntVec>)> = degrees
            .par_iter()
            .map(|l| {
                let mut set: BTreeSet<IntVec> =
                    by_degree.get(l).cloned().unwrap_or_default();
                for (l1, s1) in &closure {
                    let l2: IntVec = l.iter().zip(l1).map(|(a, b)| a - b).collect();
                    if let Some(s2) = closure.get(&l2) {
                        for m1 in s1 {
                            for m2 in s2 {
                                set.insert(m1.iter().zip(m2).map(|(a, b)| a + b).collect());
                            }
                        }
                    }
                }
                let missing = if target(l) {
                    let full = ring.piece(l).expect("degree enumerated from the cone");
                    full.monomials.iter().find(|m| !set.contains(*m)).cloned()
                } else {
                    None
                };
                (l.clone(), set, missing)
            })
            .collect();
        for (l, set, missing) in level {
            if let Some(m) = missing {
                return Ok(GenerationReport {
                    generated_up_to: t - 1,
                    first_failure: Some((l, m)),
                });
            }
            closure.insert(l, set);
        }
    }
    Ok(GenerationReport { generated_up_to: bound, first_failure: None })
}

/// Degreewise multiplicative closure of `g` over all ring degrees of
/// total degree `≤ bound`, without comparing against the graded pieces.
pub fn multiplicative_closure(
    ring: &GradedRing,
    g: &GeneratorSet,
    bound: u32,
) -> Result<BTreeMap<IntVec, BTreeSet<IntVec>>, KernelError> {
    ring.tau_positive()?;
    let mut by_degree: BTreeMap<IntVec, BTreeSet<IntVec>> = BTreeMap::new();
    for (l, m) in &g.elements {
        by_degree.entry(l.clone()).or_default().insert(m.clone());
    }
    let mut closure: BTreeMap<IntVec, BTreeSet<IntVec>> = BTreeMap::new();
    for t in 1..=bound {
        for l in ring.degrees_of_total(t)? {
            let mut set: BTreeSet<IntVec> = by_degree.get(&l).cloned().unwrap_or_default();
            for (l1, s1) in &closure {
                let l2: IntVec = l.iter().zip(l1).map(|(a, b)| a - b).collect();
                if let Some(s2) = closure.get(&l2) {
                    for m1 in s1 {
                        for m2 in s2 {
                            set.insert(m1.iter().zip(m2).map(|(a, b)| a + b).collect());
                        }
                    }
                }
            }
            if !set.is_empty() {
                closure.insert(l, set);
            }
        }
    }
    Ok(closure)
}

/// A minimal-by-construction generator set found degreewise: at each
/// total-degree level, monomials not in the closure of what was already
/// collected become new generators. Serves as the brute-force oracle.
pub fn brute_force_generators(
    ring: &GradedRing,
    bound: u32,
) -> Result<GeneratorSet, KernelError> {
    ring.tau_positive()?;
    let mut gens: Vec<Element> = Vec::new();
    let mut closure: BTreeMap<IntVec, BTreeSet<IntVec>> = BTreeMap::new();
    for t in 1..=bound {
        for l in ring.degrees_of_total(t)? {
            let mut set: BTreeSet<IntVec> = BTreeSet::new();
            for (l1, s1) in &closure {
                let l2: IntVec = l.iter().zip(l1).map(|(a, b)| a - b).collect();
                if let Some(s2) = closure.get(&l2) {
                    for m1 in s1 {
                        for m2 in s2 {
                            set.insert(m1.iter().zip(m2).map(|(a, b)| a + b).collect());
                        }
                    }
                }
            }
            for m in ring.piece(&l)?.monomials {
                if set.insert(m.clone()) {
                    gens.push((l.clone(), m));
                }
            }
            closure.insert(l, set);
        }
    }
    Ok(GeneratorSet::new(gens))
}

/// Finite generator set for the part of a monomial algebra supported on
/// a subcone cut out of the parent cone by half-spaces. Each half-space
/// cut is realized combinatorially: the Hilbert basis of the exponent
/// semigroup `{n ≥ 0 : f(Σ nᵢ·deg(gᵢ)) ≥ 0}` indexes the products of
/// the current generators that become the new generators.
pub fn inflate(
    gens: &GeneratorSet,
    parent: &Cone,
    c: &Cone,
) -> Result<GeneratorSet, KernelError> {
    if !c.subset_of(parent) {
        return Err(KernelError::Precondition("cut cone is not inside the parent cone".into()));
    }
    let mut cuts: Vec<RatVec> = Vec::new();
    for f in c.facets() {
        cuts.push(rat::to_rat_vec(f));
    }
    for e in c.span_equations() {
        let er = rat::to_rat_vec(e);
        cuts.push(er.clone());
        cuts.push(rat::neg(&er));
    }
    // Drop cuts already valid on the whole parent cone.
    cuts.retain(|f| {
        !parent.generators.iter().all(|g| !rat::dot(f, g).is_negative())
    });
    let mut current = gens.elements.clone();
    for f in &cuts {
        let g = current.len();
        if g == 0 {
            break;
        }
        // Cone {n ∈ ℝ^g : n ≥ 0, Σ nᵢ f(λᵢ) ≥ 0} in exponent space.
        let weights: RatVec =
            current.iter().map(|(l, _)| rat::dot(f, &rat::to_rat_vec(l))).collect();
        let mut ineqs: Vec<RatVec> = Vec::new();
        for i in 0..g {
            let mut row = rat::zeros(g);
            row[i] = Rat::one();
            ineqs.push(row);
        }
        ineqs.push(weights);
        let cut_cone = Cone::from_halfspaces(g, &ineqs, &[])?;
        let hb = hilbert::hilbert_basis(&cut_cone)?;
        let mut next: Vec<Element> = Vec::new();
        for n in hb {
            let mut l = vec![num_bigint::BigInt::zero(); current[0].0.len()];
            let mut m = vec![num_bigint::BigInt::zero(); current[0].1.len()];
            for (i, (li, mi)) in current.iter().enumerate() {
                if n[i].is_zero() {
                    continue;
                }
                for (a, b) in l.iter_mut().zip(li) {
                    *a += &n[i] * b;
                }
                for (a, b) in m.iter_mut().zip(mi) {
                    *a += &n[i] * b;
                }
            }
            next.push((l, m));
        }
        next.sort();
        next.dedup();
        current = next;
    }
    Ok(GeneratorSet::new(current))
}

/// A globally linear system pushed onto its image cone in divisor
/// coefficient space.
#[derive(Clone, Debug)]
pub struct Injectivization {
    /// `(#prime divisors) × r` matrix of the degree-to-coefficients map.
    pub map_rows: Mat,
    /// Image cone in divisor coefficient space.
    pub image_cone: Cone,
    /// Set when the system is identically zero (degenerate image).
    pub degenerate: bool,
}

impl Injectivization {
    /// The induced surjection onto the image lattice.
    pub fn push(&self, l: &[Rat]) -> RatVec {
        linalg::mat_vec(&self.map_rows, l)
    }

    pub fn push_int(&self, l: &IntVec) -> Result<IntVec, KernelError> {
        let p = self.push(&rat::to_rat_vec(l));
        rat::to_int_vec(&p).ok_or_else(|| {
            KernelError::Invalid("system is not integral on the grading lattice".into())
        })
    }

    /// The pushed ring: graded tautologically by integral divisors in
    /// the image cone, with `D(μ) = μ`.
    pub fn pushed_ring(&self, variety: &ToricVariety) -> Result<GradedRing, KernelError> {
        if self.degenerate {
            return Err(KernelError::Precondition(
                "cannot push a degenerate (identically zero) system".into(),
            ));
        }
        let registry = variety.registry.clone();
        let n = registry.len();
        let mut rb = DivLinMap::zero(&registry, n);
        for id in 0..n {
            let mut row = rat::zeros(n);
            row[id] = Rat::one();
            rb.set_row(id, row);
        }
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            self.image_cone.clone(),
            rat::zeros(n),
            rb,
            Divisor::zero(&registry),
            None,
        )?;
        GradedRing::new(sys, variety.clone())
    }
}

/// Pushes a globally linear characteristic system onto its image in
/// divisor space: graded pieces of the source at `λ` and of the image
/// ring at `D(λ)` coincide.
pub fn injectivize(sys: &CharacteristicSystem) -> Result<Injectivization, KernelError> {
    if !sys.is_linear() {
        return Err(KernelError::Precondition(
            "system must be globally linear (triangulate first)".into(),
        ));
    }
    let r = sys.ambient_dim();
    let n = sys.registry.len();
    let piece = &sys.pieces[0];
    let mut ka = sys.k.clone();
    if let Some(a) = &sys.a {
        ka = ka.add(a);
    }
    let mut map_rows: Mat = vec![rat::zeros(r); n];
    for id in 0..n {
        let rbrow = piece.rb.row(id);
        let kac = ka.coeff_id(id);
        for j in 0..r {
            map_rows[id][j] = &piece.r[j] * &kac + &rbrow[j];
        }
    }
    let image_gens: Vec<RatVec> = sys
        .decomposition
        .parent
        .generators
        .iter()
        .map(|g| linalg::mat_vec(&map_rows, g))
        .collect();
    let nonzero: Vec<RatVec> =
        image_gens.into_iter().filter(|v| !rat::is_zero_vec(v)).collect();
    let degenerate = nonzero.is_empty();
    let image_cone = if degenerate {
        Cone::from_generators(n, &[])?
    } else {
        Cone::from_generators(n, &nonzero)?
    };
    Ok(Injectivization { map_rows, image_cone, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Cone;
    use crate::rat::{int_vec, vec_i};
    use crate::samples;

    /// `R(ℙ², H)`-style ring: degree `n` piece = sections of `n·D3`.
    fn p2_h_ring() -> GradedRing {
        let x = samples::p2();
        let registry = x.registry.clone();
        let cone = Cone::from_generators(1, &[vec_i(&[1])]).unwrap();
        let rb = DivLinMap::from_named(&registry, 1, &[("D3", vec_i(&[1]))]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            rat::zeros(1),
            rb,
            Divisor::zero(&registry),
            None,
        )
        .unwrap();
        GradedRing::new(sys, x).unwrap()
    }

    fn p2_h_generators(ring: &GradedRing) -> GeneratorSet {
        let s = ring.piece(&int_vec(&[1])).unwrap();
        GeneratorSet::new(s.monomials.into_iter().map(|m| (int_vec(&[1]), m)).collect())
    }

    #[test]
    fn p2_degree_one_generates() {
        let ring = p2_h_ring();
        let g = p2_h_generators(&ring);
        assert_eq!(g.elements.len(), 3);
        let report = verify_generation(&ring, &g, 6).unwrap();
        assert_eq!(report, GenerationReport { generated_up_to: 6, first_failure: None });
    }

    #[test]
    fn dropping_a_generator_fails_early_with_witness() {
        let ring = p2_h_ring();
        let mut g = p2_h_generators(&ring);
        let dropped = g.elements.pop().unwrap();
        let report = verify_generation(&ring, &g, 4).unwrap();
        let (l, m) = report.first_failure.expect("proper subalgebra must fail");
        assert_eq!(l, int_vec(&[1]));
        assert_eq!(m, dropped.1);
        assert_eq!(report.generated_up_to, 0);
    }

    #[test]
    fn multiply_checks_membership_and_degrees_add() {
        let ring = p2_h_ring();
        let a = (int_vec(&[1]), int_vec(&[1, 0]));
        let b = (int_vec(&[1]), int_vec(&[0, 1]));
        let (l, m) = ring.multiply(&a, &b).unwrap();
        assert_eq!(l, int_vec(&[2]));
        assert_eq!(m, int_vec(&[1, 1]));
        // Unit is neutral.
        let unit = (int_vec(&[0]), int_vec(&[0, 0]));
        assert_eq!(ring.multiply(&a, &unit).unwrap(), a);
        // A non-section is rejected.
        let bogus = (int_vec(&[1]), int_vec(&[5, 5]));
        assert!(ring.multiply(&a, &bogus).is_err());
    }

    #[test]
    fn mobile_parts_multiply_superadditively() {
        // Products of sections of the mobile parts are sections of the
        // mobile part of the sum.
        let x = samples::f1();
        let e = x.prime_divisor("D2").unwrap();
        let f = x.prime_divisor("D4").unwrap();
        let d1 = e.add(&f); // E + fiber
        let d2 = d1.clone();
        let (_, mob1) = x.fix_mob(&d1).unwrap();
        let (_, mob2) = x.fix_mob(&d2).unwrap();
        let (_, mob12) = x.fix_mob(&d1.add(&d2)).unwrap();
        let s12 = x.sections(&mob12).unwrap();
        for m1 in &x.sections(&mob1).unwrap().monomials {
            for m2 in &x.sections(&mob2).unwrap().monomials {
                let sum: IntVec = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                assert!(s12.monomials.contains(&sum));
            }
        }
    }

    #[test]
    fn veronese_identity_lattice_is_identity() {
        let ring = p2_h_ring();
        let v = ring.veronese(&[int_vec(&[1])]).unwrap();
        for t in 1..=4 {
            assert_eq!(ring.degrees_of_total(t).unwrap(), v.degrees_of_total(t).unwrap());
        }
    }

    #[test]
    fn even_veronese_of_p2_generated_in_doubled_degree() {
        let ring = p2_h_ring();
        let even = ring.veronese(&[int_vec(&[2])]).unwrap();
        assert!(even.is_degree(&int_vec(&[2])));
        assert!(!even.is_degree(&int_vec(&[3])));
        let g = brute_force_generators(&even, 6).unwrap();
        // All minimal generators sit in degree 2: doubled from degree 1.
        assert_eq!(g.degrees(), vec![int_vec(&[2])]);
        assert_eq!(g.elements.len(), 6);
        let report = verify_generation(&even, &g, 8).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn veronese_composition_matches_intersection() {
        let ring = p2_h_ring();
        let twice = ring.veronese(&[int_vec(&[2])]).unwrap().veronese(&[int_vec(&[3])]).unwrap();
        let six = ring.veronese(&[int_vec(&[6])]).unwrap();
        for t in 1..=12 {
            assert_eq!(twice.degrees_of_total(t).unwrap(), six.degrees_of_total(t).unwrap());
        }
    }

    #[test]
    fn index_two_sublattice_of_plane_grading() {
        // ℙ¹×ℙ¹ with bidegree grading; checkerboard sublattice
        // (a+b even), spanned by (1,1) and (1,-1).
        let x = samples::p1xp1();
        let registry = x.registry.clone();
        let cone =
            Cone::from_generators(2, &[vec_i(&[1, 0]), vec_i(&[0, 1])]).unwrap();
        let rb = DivLinMap::from_named(
            &registry,
            2,
            &[("D1", vec_i(&[1, 0])), ("D3", vec_i(&[0, 1]))],
        )
        .unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            rat::zeros(2),
            rb,
            Divisor::zero(&registry),
            None,
        )
        .unwrap();
        let ring = GradedRing::new(sys, x).unwrap();
        let sub = ring.veronese(&[int_vec(&[1, 1]), int_vec(&[1, -1])]).unwrap();
        assert!(sub.is_degree(&int_vec(&[1, 1])));
        assert!(sub.is_degree(&int_vec(&[2, 0])));
        assert!(!sub.is_degree(&int_vec(&[1, 0])));
        let g = brute_force_generators(&sub, 6).unwrap();
        let report = verify_generation(&sub, &g, 6).unwrap();
        assert!(report.passed());
        // Generators appear only in the two lowest sublattice levels.
        assert_eq!(
            g.degrees(),
            vec![int_vec(&[0, 2]), int_vec(&[1, 1]), int_vec(&[2, 0])]
        );
    }

    #[test]
    fn veronese_rejects_infinite_index() {
        let x = samples::p1xp1();
        let registry = x.registry.clone();
        let cone =
            Cone::from_generators(2, &[vec_i(&[1, 0]), vec_i(&[0, 1])]).unwrap();
        let rb = DivLinMap::from_named(&registry, 2, &[("D1", vec_i(&[1, 0]))]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            rat::zeros(2),
            rb,
            Divisor::zero(&registry),
            None,
        )
        .unwrap();
        let ring = GradedRing::new(sys, x).unwrap();
        assert!(ring.veronese(&[int_vec(&[1, 1]), int_vec(&[2, 2])]).is_err());
    }

    // --- inflate ---

    fn free_plane_algebra() -> (GeneratorSet, Cone) {
        let parent = Cone::from_generators(2, &[vec_i(&[1, 0]), vec_i(&[0, 1])]).unwrap();
        let gens = GeneratorSet::new(vec![
            (int_vec(&[1, 0]), int_vec(&[1, 0])),
            (int_vec(&[0, 1]), int_vec(&[0, 1])),
        ]);
        (gens, parent)
    }

    #[test]
    fn inflate_halfplane_cut_of_free_algebra() {
        let (gens, parent) = free_plane_algebra();
        // Cut to {u ≥ v}: generators x and xy.
        let c = Cone::from_halfspaces(
            2,
            &[vec_i(&[1, -1]), vec_i(&[0, 1])],
            &[],
        )
        .unwrap();
        let out = inflate(&gens, &parent, &c).unwrap();
        assert_eq!(out.degrees(), vec![int_vec(&[1, 0]), int_vec(&[1, 1])]);
    }

    #[test]
    fn inflate_with_whole_cone_returns_input() {
        let (gens, parent) = free_plane_algebra();
        let out = inflate(&gens, &parent, &parent).unwrap();
        assert_eq!(out, gens);
    }

    #[test]
    fn inflate_rejects_cone_outside_parent() {
        let (gens, parent) = free_plane_algebra();
        let bad = Cone::from_generators(2, &[vec_i(&[1, 0]), vec_i(&[1, -1])]).unwrap();
        assert!(inflate(&gens, &parent, &bad).is_err());
    }

    #[test]
    fn inflate_matches_weight_enumeration_oracle() {
        // Free algebra on x (degree 1) and y (degree −1); cut to the
        // nonnegative-degree part. The torus-invariant construction
        // enumerated by weight gives minimal generators x and xy.
        let parent = Cone::from_generators(1, &[vec_i(&[1]), vec_i(&[-1])]).unwrap();
        let gens = GeneratorSet::new(vec![
            (int_vec(&[1]), int_vec(&[1, 0])),
            (int_vec(&[-1]), int_vec(&[0, 1])),
        ]);
        let c = Cone::from_halfspaces(1, &[vec_i(&[1])], &[]).unwrap();
        let out = inflate(&gens, &parent, &c).unwrap();

        // Oracle: enumerate monomials x^a y^b with a+b ≤ 8 and weight
        // a−b ≥ 0; minimal generators are the ones that are not a
        // product of two smaller kept monomials.
        let mut kept: Vec<(i64, i64)> = Vec::new();
        for a in 0..=8i64 {
            for b in 0..=(8 - a) {
                if (a, b) != (0, 0) && a - b >= 0 {
                    kept.push((a, b));
                }
            }
        }
        let minimal: Vec<(i64, i64)> = kept
            .iter()
            .copied()
            .filter(|&(a, b)| {
                !kept.iter().any(|&(a1, b1)| {
                    kept.contains(&(a - a1, b - b1))
                })
            })
            .collect();
        let mut expect: Vec<IntVec> =
            minimal.iter().map(|&(a, b)| int_vec(&[a, b])).collect();
        expect.sort();
        let mut got: Vec<IntVec> = out.elements.iter().map(|(_, m)| m.clone()).collect();
        got.sort();
        assert_eq!(got, expect);
        assert_eq!(got, vec![int_vec(&[1, 0]), int_vec(&[1, 1])]);
    }

    #[test]
    fn inflate_output_generates_cut_ring() {
        // Cross-check on the ring side: the {u ≥ v} cut of the bigraded
        // ℙ¹×ℙ¹ ring is generated by the inflate output degrees.
        let x = samples::p1xp1();
        let registry = x.registry.clone();
        let parent =
            Cone::from_generators(2, &[vec_i(&[1, 0]), vec_i(&[0, 1])]).unwrap();
        let c = Cone::from_halfspaces(2, &[vec_i(&[1, -1]), vec_i(&[0, 1])], &[]).unwrap();
        let rb = DivLinMap::from_named(
            &registry,
            2,
            &[("D1", vec_i(&[1, 0])), ("D3", vec_i(&[0, 1]))],
        )
        .unwrap();
        let cut_sys = CharacteristicSystem::linear(
            registry.clone(),
            c.clone(),
            rat::zeros(2),
            rb,
            Divisor::zero(&registry),
            None,
        )
        .unwrap();
        let cut_ring = GradedRing::new(cut_sys, x).unwrap();
        // Generators of the full bigraded ring: sections in (1,0), (0,1).
        let d1 = cut_ring.variety.prime_divisor("D1").unwrap();
        let d3 = cut_ring.variety.prime_divisor("D3").unwrap();
        let mut gens = Vec::new();
        for (l, d) in [(int_vec(&[1, 0]), &d1), (int_vec(&[0, 1]), &d3)] {
            for m in cut_ring.variety.sections(d).unwrap().monomials {
                gens.push((l.clone(), m));
            }
        }
        let inflated = inflate(&GeneratorSet::new(gens), &parent, &c).unwrap();
        let report = verify_generation(&cut_ring, &inflated, 6).unwrap();
        assert!(report.passed(), "failure: {:?}", report.first_failure);
    }

    // --- injectivize ---

    #[test]
    fn injectivize_identity_like_for_injective_map() {
        let x = samples::p2();
        let registry = x.registry.clone();
        let cone =
            Cone::from_generators(2, &[vec_i(&[1, 0]), vec_i(&[0, 1])]).unwrap();
        let rb = DivLinMap::from_named(
            &registry,
            2,
            &[("D1", vec_i(&[1, 0])), ("D3", vec_i(&[0, 1]))],
        )
        .unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            rat::zeros(2),
            rb,
            Divisor::zero(&registry),
            None,
        )
        .unwrap();
        let inj = injectivize(&sys).unwrap();
        assert!(!inj.degenerate);
        assert_eq!(inj.image_cone.dim(), 2);
    }

    #[test]
    fn injectivize_collapses_equal_columns_to_a_ray() {
        // D(e₁) = D(e₂) = H on ℙ²: image is the ray spanned by H.
        let x = samples::p2();
        let registry = x.registry.clone();
        let cone =
            Cone::from_generators(2, &[vec_i(&[1, 0]), vec_i(&[0, 1])]).unwrap();
        let rb = DivLinMap::from_named(&registry, 2, &[("D3", vec_i(&[1, 1]))]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            rat::zeros(2),
            rb,
            Divisor::zero(&registry),
            None,
        )
        .unwrap();
        let source = GradedRing::new(sys.clone(), x.clone()).unwrap();
        let inj = injectivize(&sys).unwrap();
        assert_eq!(inj.image_cone.dim(), 1);
        let pushed = inj.pushed_ring(&x).unwrap();
        // Graded pieces correspond: R_λ = R̄_{D(λ)} for λ₁+λ₂ = n ≤ 5.
        for n in 0..=5i64 {
            for l1 in 0..=n {
                let l = int_vec(&[l1, n - l1]);
                let mu = inj.push_int(&l).unwrap();
                assert_eq!(
                    source.piece(&l).unwrap().monomials,
                    pushed.piece(&mu).unwrap().monomials
                );
            }
        }
    }

    #[test]
    fn injectivize_flags_zero_system() {
        let x = samples::p2();
        let registry = x.registry.clone();
        let cone = Cone::from_generators(1, &[vec_i(&[1])]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            rat::zeros(1),
            DivLinMap::zero(&registry, 1),
            Divisor::zero(&registry),
            None,
        )
        .unwrap();
        let inj = injectivize(&sys).unwrap();
        assert!(inj.degenerate);
        assert!(inj.pushed_ring(&x).is_err());
    }

    #[test]
    fn verify_generation_requires_positive_total_degree() {
        let x = samples::p2();
        let registry = x.registry.clone();
        let cone = Cone::from_generators(1, &[vec_i(&[-1])]).unwrap();
        let rb = DivLinMap::from_named(&registry, 1, &[("D3", vec_i(&[-1]))]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            rat::zeros(1),
            rb,
            Divisor::zero(&registry),
            None,
        )
        .unwrap();
        let ring = GradedRing::new(sys, x).unwrap();
        let g = GeneratorSet::new(vec![]);
        assert!(verify_generation(&ring, &g, 3).is_err());
    }
}
