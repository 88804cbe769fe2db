//! The finite-generation engine: chopping the cone over a boundary
//! parallelepiped into strictly dlt back-face pieces, the total-degree
//! bound, generator assembly from the boundary-facet subrings, the
//! parallelepiped cover of a klt system, and the end-to-end pipeline.

use crate::charsys::{CharacteristicSystem, DivLinMap};
use crate::cone::{Cone, ConeDecomposition};
use crate::divisor::Divisor;
use crate::error::KernelError;
use crate::graded::{
    self, multiplicative_closure, verify_generation_on, GeneratorSet, GradedRing,
    GenerationReport,
};
use crate::polyhedron::{self, ConeH, HPoly, LpResult};
use crate::rat::{self, Int, IntVec, Rat, RatVec};
use crate::toric::ToricVariety;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// One parallelepiped instance: the ring graded by
/// `𝒞 ∩ ℤ^r` where `𝒞 = ℝ₊(K + A + Π[bᵢ,1]Bᵢ)`, written in the
/// coordinates of the boundary prime divisors `Bᵢ`
/// (so `K + A = Σ κᵢ Bᵢ` exactly).
#[derive(Clone, Debug)]
pub struct ChopInstance {
    pub variety: ToricVariety,
    pub a: Divisor,
    /// Names of the boundary prime divisors `B₁..B_r`.
    pub boundary: Vec<String>,
    /// Registry ids of the boundary primes.
    pub ids: Vec<usize>,
    /// `K + A = Σ κᵢ Bᵢ`.
    pub kappa: RatVec,
    /// Parallelepiped base point, `0 ≤ bᵢ ≤ 1`.
    pub base: RatVec,
    /// `𝒞` in boundary coordinates.
    pub cone: Cone,
}

/// One back-face piece `𝒞_j = ℝ₊(K + A + ℬ_j)`.
#[derive(Clone, Debug)]
pub struct ChopPiece {
    pub j: usize,
    pub cone: Cone,
    /// Boundary prime with coefficient identically 1 on this piece.
    pub strictly_dlt_with: String,
}

/// The back-face decomposition; the exact cover is verified on
/// construction of the decomposition.
#[derive(Clone, Debug)]
pub struct ChopResult {
    pub decomposition: ConeDecomposition,
    pub pieces: Vec<ChopPiece>,
}

/// The least total degree `N` past which every piece degree can step
/// down by its face direction, plus the maximizing witness showing
/// `N − 1` would fail.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeBound {
    pub n: u32,
    pub witness: Option<IntVec>,
}

/// A finite-generation certificate for one parallelepiped instance.
#[derive(Clone, Debug)]
pub struct InstanceCertificate {
    pub boundary: Vec<String>,
    pub base: RatVec,
    pub degree_bound: u32,
    pub verified_up_to: u32,
    pub generators: GeneratorSet,
}

/// The end-to-end pipeline output: one certificate per cover instance.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub instances: Vec<InstanceCertificate>,
}

impl Certificate {
    pub fn generator_count(&self) -> usize {
        self.instances.iter().map(|i| i.generators.elements.len()).sum()
    }
}

fn box_vertices(lo: &[Rat], fixed: Option<usize>) -> Vec<RatVec> {
    // Vertices of Π[loᵢ, 1], optionally with coordinate `fixed` pinned
    // to 1 (a back face).
    let r = lo.len();
    let mut out = vec![RatVec::new()];
    for i in 0..r {
        let mut next = Vec::new();
        let choices: Vec<Rat> = if fixed == Some(i) || lo[i] == Rat::one() {
            vec![Rat::one()]
        } else {
            vec![lo[i].clone(), Rat::one()]
        };
        for v in out {
            for c in &choices {
                let mut w = v.clone();
                w.push(c.clone());
                next.push(w);
            }
        }
        out = next;
    }
    out
}

impl ChopInstance {
    pub fn new(
        variety: &ToricVariety,
        a: &Divisor,
        boundary: &[String],
        base: &[Rat],
    ) -> Result<ChopInstance, KernelError> {
        if !variety.is_ample(a) {
            return Err(KernelError::Precondition("the divisor A is not ample".into()));
        }
        if boundary.is_empty() {
            return Err(KernelError::Invalid("empty boundary".into()));
        }
        let mut seen = BTreeSet::new();
        let ids: Vec<usize> = boundary
            .iter()
            .map(|n| variety.ray_index(n))
            .collect::<Result<_, _>>()?;
        for id in &ids {
            if !seen.insert(*id) {
                return Err(KernelError::Invalid("repeated boundary prime".into()));
            }
        }
        if base.len() != boundary.len() {
            return Err(KernelError::DimensionMismatch {
                expected: boundary.len(),
                got: base.len(),
            });
        }
        for b in base {
            if b.is_negative() || *b > Rat::one() {
                return Err(KernelError::Precondition(format!(
                    "base coefficient {} is outside [0, 1]",
                    rat::format_rat(b)
                )));
            }
        }
        // K + A = Σ κᵢ Bᵢ exactly.
        let ka = variety.canonical_divisor().add(a);
        let mut kappa = rat::zeros(boundary.len());
        for (id, c) in ka.iter() {
            match ids.iter().position(|&i| i == id) {
                Some(pos) => kappa[pos] = c.clone(),
                None => {
                    return Err(KernelError::Precondition(format!(
                        "K + A has a component outside the boundary: {}",
                        variety.registry.name_of(id)
                    )))
                }
            }
        }
        // Crucial positivity 𝒞 ⊂ Σ ℝ₊Bᵢ: κ + t ≥ 0 on the whole box,
        // equivalently at the base vertex.
        for (i, (k, b)) in kappa.iter().zip(base).enumerate() {
            if (k + b).is_negative() {
                let witness: RatVec =
                    kappa.iter().zip(base).map(|(k, b)| k + b).collect();
                return Err(KernelError::Precondition(format!(
                    "positivity fails: (K + A + B(b)) has coefficient {} on {} \
                     (witness point {})",
                    rat::format_rat(&(k + b)),
                    boundary[i],
                    rat::format_vec(&witness)
                )));
            }
        }
        let gens: Vec<RatVec> = box_vertices(base, None)
            .iter()
            .map(|t| rat::add(&kappa, t))
            .collect();
        let cone = Cone::from_generators(boundary.len(), &gens)?;
        let inst = ChopInstance {
            variety: variety.clone(),
            a: a.clone(),
            boundary: boundary.to_vec(),
            ids,
            kappa,
            base: base.to_vec(),
            cone,
        };
        // |p(K + A + B(b))| ≠ ∅ for some p.
        let d0 = inst.divisor_of(&rat::add(&inst.kappa, &inst.base));
        if !variety.pseudo_effective(&d0) {
            return Err(KernelError::EmptySystem);
        }
        Ok(inst)
    }

    pub fn rank(&self) -> usize {
        self.boundary.len()
    }

    /// The divisor `Σ λᵢ Bᵢ`.
    pub fn divisor_of(&self, l: &[Rat]) -> Divisor {
        let mut d = Divisor::zero(&self.variety.registry);
        for (i, c) in l.iter().enumerate() {
            d.set_coeff_id(self.ids[i], c.clone());
        }
        d
    }

    pub fn in_monoid(&self, l: &IntVec) -> bool {
        self.cone.contains(&rat::to_rat_vec(l)).unwrap_or(false)
    }

    /// The ambient `ℕ^r`-graded ring `⊕ H⁰(Σ λᵢBᵢ)` containing the
    /// instance ring and the boundary vanishing sections.
    pub fn ambient_ring(&self) -> Result<GradedRing, KernelError> {
        let r = self.rank();
        let registry = self.variety.registry.clone();
        let unit: Vec<RatVec> = (0..r)
            .map(|i| {
                let mut e = rat::zeros(r);
                e[i] = Rat::one();
                e
            })
            .collect();
        let cone = Cone::from_generators(r, &unit)?;
        let mut rb = DivLinMap::zero(&registry, r);
        for (i, &id) in self.ids.iter().enumerate() {
            let mut row = rat::zeros(r);
            row[i] = Rat::one();
            rb.set_row(id, row);
        }
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            rat::zeros(r),
            rb,
            Divisor::zero(&registry),
            None,
        )?;
        GradedRing::new(sys, self.variety.clone())
    }

    fn degrees_at(&self, cone: &Cone, t: u32) -> Result<Vec<IntVec>, KernelError> {
        let r = self.rank();
        let mut p = HPoly::new(r);
        for f in cone.facets() {
            p.add_ineq(rat::to_rat_vec(f), Rat::zero());
        }
        for e in cone.span_equations() {
            p.add_eq(rat::to_rat_vec(e), Rat::zero());
        }
        p.add_eq(vec![Rat::one(); r], -rat::rat_i(t as i64));
        let mut pts = p.lattice_points()?;
        pts.sort();
        Ok(pts)
    }
}

/// The back-face decomposition `𝒞 = ∪_j 𝒞_j`,
/// `𝒞_j = ℝ₊(K + A + ℬ_j)` with `ℬ_j` the face `t_j = 1` of the
/// parallelepiped; the cover is verified exactly and each piece is
/// checked strictly dlt with boundary `B_j`.
pub fn chop_backfaces(inst: &ChopInstance) -> Result<ChopResult, KernelError> {
    let r = inst.rank();
    let registry = inst.variety.registry.clone();
    let ka = inst.variety.canonical_divisor().add(&inst.a);
    let mut cones = Vec::new();
    let mut pieces = Vec::new();
    for j in 0..r {
        let gens: Vec<RatVec> = box_vertices(&inst.base, Some(j))
            .iter()
            .map(|t| rat::add(&inst.kappa, t))
            .collect();
        let cone = Cone::from_generators(r, &gens)?;
        // r(λ) = λ_j / (κ_j + 1) on this piece (κ_j + 1 > 0 by the
        // positivity check and b_j ≤ 1).
        let denom = &inst.kappa[j] + Rat::one();
        let mut rvec = rat::zeros(r);
        rvec[j] = denom.recip();
        // rb(λ) = D(λ) − r(λ)(K + A).
        let mut rb = DivLinMap::zero(&registry, r);
        for (i, &id) in inst.ids.iter().enumerate() {
            let mut row = rat::zeros(r);
            row[i] = Rat::one();
            row[j] -= &inst.kappa[i] / &denom;
            rb.set_row(id, row);
        }
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone.clone(),
            rvec,
            rb,
            ka.sub(&inst.a),
            Some(inst.a.clone()),
        )?;
        let cls = sys.classify();
        if cls.strictly_dlt_with.as_deref() != Some(inst.boundary[j].as_str()) {
            return Err(KernelError::Invalid(format!(
                "back-face piece {j} is not strictly dlt with boundary {}",
                inst.boundary[j]
            )));
        }
        cones.push(cone.clone());
        pieces.push(ChopPiece { j, cone, strictly_dlt_with: inst.boundary[j].clone() });
    }
    let decomposition = ConeDecomposition::new(inst.cone.clone(), cones)?;
    Ok(ChopResult { decomposition, pieces })
}

/// Least `N` such that for every piece `(𝒞_j, e_j)` and every integer
/// point `m ∈ 𝒞_j` with `τ(m) > N`, `m − e_j` stays in the parent
/// cone. Computed by exact rational LP per (parent facet, piece), then
/// verified and minimized exhaustively on all lattice points with
/// `τ ≤ N + 3`.
pub fn degree_bound(
    parent: &Cone,
    pieces: &[(Cone, usize)],
) -> Result<DegreeBound, KernelError> {
    let r = parent.ambient_dim;
    let tau = vec![Rat::one(); r];
    let mut n0 = Int::zero();
    for (cj, j) in pieces {
        for f in parent.facets() {
            let fe = Rat::from(f[*j].clone());
            if !fe.is_positive() {
                // m − e_j cannot exit through this facet.
                continue;
            }
            let mut p = HPoly::new(r);
            for g in cj.facets() {
                p.add_ineq(rat::to_rat_vec(g), Rat::zero());
            }
            for e in cj.span_equations() {
                p.add_eq(rat::to_rat_vec(e), Rat::zero());
            }
            // Violation region: f·m ≤ f·e_j (continuous relaxation).
            p.add_ineq(rat::neg(&rat::to_rat_vec(f)), fe.clone());
            match p.maximize(&tau) {
                LpResult::Infeasible => {}
                LpResult::Unbounded => {
                    return Err(KernelError::Invalid(
                        "no finite total-degree bound: the violation region is unbounded"
                            .into(),
                    ))
                }
                LpResult::Optimal { value, .. } => {
                    let fl = value.floor().to_integer();
                    if fl > n0 {
                        n0 = fl;
                    }
                }
            }
        }
    }
    let n0: u32 = u32::try_from(&n0).map_err(|_| {
        KernelError::Invalid("total-degree bound out of range".into())
    })?;
    // Exhaustive verification and minimization up to τ = n0 + 3.
    let mut n = 0u32;
    let mut witness = None;
    for t in 1..=n0 + 3 {
        for (cj, j) in pieces {
            let mut p = HPoly::new(r);
            for g in cj.facets() {
                p.add_ineq(rat::to_rat_vec(g), Rat::zero());
            }
            for e in cj.span_equations() {
                p.add_eq(rat::to_rat_vec(e), Rat::zero());
            }
            p.add_eq(tau.clone(), -rat::rat_i(t as i64));
            for m in p.lattice_points()? {
                let mut down = rat::to_rat_vec(&m);
                down[*j] -= Rat::one();
                if !parent.contains(&down)? {
                    assert!(t <= n0, "violator above the LP bound");
                    if t > n || witness.is_none() {
                        n = t;
                        witness = Some(m.clone());
                    }
                }
            }
        }
    }
    Ok(DegreeBound { n, witness })
}

/// Generators of the boundary-facet subring of the piece `𝒞_j`: the
/// sections with multiplicity zero along `B_j`, which biject with the
/// sections of the restricted linear systems on `B_j`. Returned as
/// elements of the parent ring (their own canonical lifts).
pub fn facet_subring_generators(
    inst: &ChopInstance,
    piece: &ChopPiece,
    bound: u32,
) -> Result<GeneratorSet, KernelError> {
    let v = &inst.variety.rays[inst.ids[piece.j]];
    let mut gens: Vec<(IntVec, IntVec)> = Vec::new();
    let mut closure: std::collections::BTreeMap<IntVec, BTreeSet<IntVec>> =
        std::collections::BTreeMap::new();
    for t in 1..=bound {
        for l in inst.degrees_at(&piece.cone, t)? {
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
            let d = inst.divisor_of(&rat::to_rat_vec(&l));
            let lvl = Rat::from(l[piece.j].clone());
            for m in inst.variety.sections(&d)?.monomials {
                let mult = Rat::from(rat::dot_int(v, &m)) + &lvl;
                if !mult.is_zero() {
                    continue;
                }
                if set.insert(m.clone()) {
                    gens.push((l.clone(), m));
                }
            }
            if !set.is_empty() {
                closure.insert(l, set);
            }
        }
    }
    Ok(GeneratorSet::new(gens))
}

/// Assembles `G = G₀ ∪ (lifted boundary generators) ∪ {σ_j}`:
/// a monomial basis of every graded piece of total degree `≤ n`, the
/// supplied facet-subring generators, and for each boundary prime the
/// canonical section vanishing exactly on it.
pub fn assemble_generators(
    inst: &ChopInstance,
    chop: &ChopResult,
    restricted: &[GeneratorSet],
    n: u32,
) -> Result<GeneratorSet, KernelError> {
    if restricted.len() != chop.pieces.len() {
        return Err(KernelError::Invalid("one restricted generator set per piece".into()));
    }
    let mut out: Vec<(IntVec, IntVec)> = Vec::new();
    // G₀.
    for t in 1..=n {
        for l in inst.degrees_at(&inst.cone, t)? {
            let d = inst.divisor_of(&rat::to_rat_vec(&l));
            for m in inst.variety.sections(&d)?.monomials {
                out.push((l.clone(), m));
            }
        }
    }
    // Lifts: validate each supplied element is an actual section.
    for g in restricted {
        for (l, m) in &g.elements {
            let d = inst.divisor_of(&rat::to_rat_vec(l));
            if !inst.variety.sections(&d)?.monomials.contains(m) {
                return Err(KernelError::Invalid(format!(
                    "restricted generator admits no lift in degree {}",
                    rat::format_vec(&rat::to_rat_vec(l))
                )));
            }
            out.push((l.clone(), m.clone()));
        }
    }
    // σ_j: the monomial 0 in H⁰(X; B_j); its divisor is B_j exactly.
    for (j, name) in inst.boundary.iter().enumerate() {
        let bj = inst.variety.prime_divisor(name)?;
        let zero_m: IntVec = vec![Int::zero(); inst.variety.dim];
        debug_assert_eq!(
            inst.variety.multiplicity_vector(&bj, &zero_m),
            inst.variety.coeff_vec(&bj)
        );
        let mut deg = vec![Int::zero(); inst.rank()];
        deg[j] = Int::one();
        out.push((deg, zero_m));
    }
    Ok(GeneratorSet::new(out))
}

/// Checks that `G` generates the instance ring: the multiplicative
/// closure inside the ambient `ℕ^r`-graded ring must span every graded
/// piece with degree in the instance monoid, up to total degree
/// `bound`.
pub fn verify_assembly(
    inst: &ChopInstance,
    g: &GeneratorSet,
    bound: u32,
) -> Result<GenerationReport, KernelError> {
    let ambient = inst.ambient_ring()?;
    verify_generation_on(&ambient, g, bound, |l| inst.in_monoid(l))
}

/// Replays the degree-induction step behind the assembly: for every
/// monomial `x` in a graded piece of total degree in `(n, bound]`,
/// some back-face piece `𝒞_j` contains the degree, the degree minus
/// `e_j` stays in the monoid, and `x` either vanishes along `B_j`
/// (so it is divisible by `σ_j` with quotient of total degree one
/// less) or lies in the closure of that piece's lifted boundary
/// generators.
pub fn replay_induction(
    inst: &ChopInstance,
    chop: &ChopResult,
    restricted: &[GeneratorSet],
    n: u32,
    bound: u32,
) -> Result<(), KernelError> {
    let ambient = inst.ambient_ring()?;
    let closures: Vec<_> = restricted
        .iter()
        .map(|g| multiplicative_closure(&ambient, g, bound))
        .collect::<Result<_, _>>()?;
    for t in n + 1..=bound {
        for l in inst.degrees_at(&inst.cone, t)? {
            let lr = rat::to_rat_vec(&l);
            let d = inst.divisor_of(&lr);
            for x in inst.variety.sections(&d)?.monomials {
                let ok = chop.pieces.iter().enumerate().any(|(pi, piece)| {
                    if !piece.cone.contains(&lr).unwrap_or(false) {
                        return false;
                    }
                    let mut down = lr.clone();
                    down[piece.j] -= Rat::one();
                    if !inst.cone.contains(&down).unwrap_or(false) {
                        return false;
                    }
                    let v = &inst.variety.rays[inst.ids[piece.j]];
                    let mult =
                        Rat::from(rat::dot_int(v, &x)) + Rat::from(l[piece.j].clone());
                    if mult >= Rat::one() {
                        // x = σ_j · y with y the same monomial viewed in
                        // degree λ − e_j; τ(y) = τ(x) − 1.
                        let dd = inst.divisor_of(&down);
                        return inst
                            .variety
                            .sections(&dd)
                            .map(|s| s.monomials.contains(&x))
                            .unwrap_or(false);
                    }
                    closures[pi].get(&l).is_some_and(|s| s.contains(&x))
                });
                if !ok {
                    return Err(KernelError::Invalid(format!(
                        "induction step fails at degree {} for monomial {}",
                        rat::format_vec(&lr),
                        rat::format_vec(&rat::to_rat_vec(&x))
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Covers the cone of a linear klt characteristic system by finitely
/// many parallelepiped cones and returns the corresponding instances;
/// the cover is verified exactly, retrying on a finer barycentric grid
/// until it holds.
pub fn cover_by_parallelepipeds(
    sys: &CharacteristicSystem,
    variety: &ToricVariety,
) -> Result<Vec<ChopInstance>, KernelError> {
    if !sys.is_linear() {
        return Err(KernelError::Precondition(
            "cover requires a globally linear system".into(),
        ));
    }
    let a = sys
        .a
        .clone()
        .ok_or_else(|| KernelError::Precondition("cover requires a declared ample part".into()))?;
    let delta = sys.delta_margin()?;
    if !delta.is_positive() {
        return Err(KernelError::Precondition("the system is not klt (δ ≤ 0)".into()));
    }
    // Boundary coordinates: support of K + A and of the boundary map.
    let ka = sys.k.add(&a);
    let mut ids: Vec<usize> = ka.support();
    ids.extend(sys.pieces[0].rb.support());
    ids.sort();
    ids.dedup();
    let boundary: Vec<String> =
        ids.iter().map(|&i| sys.registry.name_of(i).to_string()).collect();
    let kappa: RatVec = ids.iter().map(|&i| ka.coeff_id(i)).collect();
    // Slice representatives: the cone generators, where r must be
    // positive; b is a weighted average of its generator values, so
    // validating 0 ≤ b < 1 there covers the whole slice.
    let gens = &sys.decomposition.parent.generators;
    let mut b_at_gens = Vec::new();
    for g in gens {
        let r = sys.r_at(g)?;
        if !r.is_positive() {
            return Err(KernelError::Precondition(format!(
                "r is not positive on the cone generator {}",
                rat::format_vec(g)
            )));
        }
        let b = sys.boundary_at(g)?;
        let bvec: RatVec = ids.iter().map(|&i| b.coeff_id(i)).collect();
        for (c, name) in bvec.iter().zip(&boundary) {
            if c.is_negative() || *c >= Rat::one() {
                return Err(KernelError::Precondition(format!(
                    "boundary coefficient {} on {} is outside [0, 1)",
                    rat::format_rat(c),
                    name
                )));
            }
        }
        b_at_gens.push(bvec);
    }
    // Image of the grading cone in boundary coordinates.
    let image_gens: Vec<RatVec> =
        b_at_gens.iter().map(|b| rat::add(&kappa, b)).collect();
    let image = Cone::from_generators(boundary.len(), &image_gens)?;
    // Barycentric grid density from the base-point spread and δ.
    let mut diam = Rat::zero();
    for i in 0..b_at_gens.len() {
        for jj in i + 1..b_at_gens.len() {
            let d = rat::max_norm(&rat::sub(&b_at_gens[i], &b_at_gens[jj]));
            if d > diam {
                diam = d;
            }
        }
    }
    let mut m: u32 = {
        let need = Rat::from(Int::from(2)) * &diam / &delta;
        let c = need.ceil().to_integer();
        u32::try_from(&c).unwrap_or(1).max(1)
    };
    for _attempt in 0..6 {
        let mut bases: Vec<RatVec> = Vec::new();
        for comp in compositions(gens.len(), m) {
            let mut w = rat::zeros(sys.ambient_dim());
            for (g, &c) in gens.iter().zip(&comp) {
                w = rat::add(&w, &rat::scale(&rat::rat_i(c as i64), g));
            }
            let b = sys.boundary_at(&w)?;
            let bvec: RatVec = ids.iter().map(|&i| b.coeff_id(i)).collect();
            if !bases.contains(&bvec) {
                bases.push(bvec);
            }
        }
        let instances: Vec<ChopInstance> = bases
            .iter()
            .map(|b| ChopInstance::new(variety, &a, &boundary, b))
            .collect::<Result<_, _>>()?;
        let hs: Vec<ConeH> = instances.iter().map(|i| i.cone.as_coneh()).collect();
        if polyhedron::cone_covered_by(&image.as_coneh(), &hs).is_ok() {
            return Ok(instances);
        }
        m *= 2;
    }
    Err(KernelError::Invalid(
        "parallelepiped cover did not close after refinement".into(),
    ))
}

/// All `k`-part compositions of `m` (orderings matter, parts ≥ 0).
fn compositions(k: usize, m: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![];
    }
    if k == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for first in 0..=m {
        for mut rest in compositions(k - 1, m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Extra total degrees verified past the degree bound in the pipeline.
pub const VERIFY_MARGIN: u32 = 10;

/// End-to-end driver: classify, per linearity piece push onto the
/// image, cover by parallelepipeds, chop, bound, assemble, verify, and
/// replay the induction. Errors carry the failing stage.
pub fn run_pipeline(
    sys: &CharacteristicSystem,
    variety: &ToricVariety,
) -> Result<Certificate, KernelError> {
    run_pipeline_with(sys, variety, VERIFY_MARGIN)
}

/// `run_pipeline` with a caller-chosen verification margin above the
/// computed degree bound.
pub fn run_pipeline_with(
    sys: &CharacteristicSystem,
    variety: &ToricVariety,
    margin: u32,
) -> Result<Certificate, KernelError> {
    let cls = sys.classify();
    if !cls.is_dlt {
        return Err(
            KernelError::Precondition("the system is not dlt".into()).at_stage("classify")
        );
    }
    let mut out = Vec::new();
    for (piece, cone) in sys.pieces.iter().zip(&sys.decomposition.pieces) {
        let sub = CharacteristicSystem::linear(
            sys.registry.clone(),
            cone.clone(),
            piece.r.clone(),
            piece.rb.clone(),
            sys.k.clone(),
            sys.a.clone(),
        )
        .map_err(|e| e.at_stage("triangulate"))?;
        let inj = graded::injectivize(&sub).map_err(|e| e.at_stage("injectivize"))?;
        if inj.degenerate {
            return Err(KernelError::Invalid("the system is identically zero".into())
                .at_stage("injectivize"));
        }
        let instances =
            cover_by_parallelepipeds(&sub, variety).map_err(|e| e.at_stage("cover"))?;
        for inst in instances {
            let chop = chop_backfaces(&inst).map_err(|e| e.at_stage("chop"))?;
            let db_pieces: Vec<(Cone, usize)> =
                chop.pieces.iter().map(|p| (p.cone.clone(), p.j)).collect();
            let db = degree_bound(&inst.cone, &db_pieces)
                .map_err(|e| e.at_stage("degree-bound"))?;
            let bound = db.n + margin;
            let restricted: Vec<GeneratorSet> = chop
                .pieces
                .iter()
                .map(|p| facet_subring_generators(&inst, p, bound))
                .collect::<Result<_, _>>()
                .map_err(|e| e.at_stage("restrict"))?;
            let g = assemble_generators(&inst, &chop, &restricted, db.n)
                .map_err(|e| e.at_stage("assemble"))?;
            let report =
                verify_assembly(&inst, &g, bound).map_err(|e| e.at_stage("verify"))?;
            if let Some((l, _)) = report.first_failure {
                return Err(KernelError::Invalid(format!(
                    "assembled generators miss degree {}",
                    rat::format_vec(&rat::to_rat_vec(&l))
                ))
                .at_stage("verify"));
            }
            replay_induction(&inst, &chop, &restricted, db.n, bound)
                .map_err(|e| e.at_stage("induction"))?;
            out.push(InstanceCertificate {
                boundary: inst.boundary.clone(),
                base: inst.base.clone(),
                degree_bound: db.n,
                verified_up_to: bound,
                generators: g,
            });
        }
    }
    Ok(Certificate { instances: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int_vec, rat, rat_i, vec_i};
    use crate::samples;

    /// ℙ¹ with boundary {D1, D2}, A = 2D1 + 2D2, so K + A = D1 + D2.
    fn p1_instance(base: &[Rat]) -> Result<ChopInstance, KernelError> {
        let x = samples::p1();
        let a = x
            .prime_divisor("D1")
            .unwrap()
            .scale(&rat_i(2))
            .add(&x.prime_divisor("D2").unwrap().scale(&rat_i(2)));
        ChopInstance::new(&x, &a, &["D1".to_string(), "D2".to_string()], base)
    }

    #[test]
    fn backfaces_cover_and_are_strictly_dlt() {
        let inst = p1_instance(&[rat_i(0), rat_i(0)]).unwrap();
        let chop = chop_backfaces(&inst).unwrap();
        assert_eq!(chop.pieces.len(), 2);
        assert_eq!(chop.pieces[0].strictly_dlt_with, "D1");
        assert_eq!(chop.pieces[1].strictly_dlt_with, "D2");
        // 𝒞 is the cone over (1,1) + [0,1]².
        assert!(inst.cone.contains(&vec![rat_i(1), rat_i(2)]).unwrap());
        assert!(!inst.cone.contains(&vec![rat_i(1), rat_i(3)]).unwrap());
    }

    #[test]
    fn degenerate_base_coordinate_still_covers() {
        let inst = p1_instance(&[rat_i(0), rat_i(1)]).unwrap();
        let chop = chop_backfaces(&inst).unwrap();
        assert_eq!(chop.pieces.len(), 2);
        // The ℬ₂ face degenerates to a segment; the cover still holds
        // (verified on construction of the decomposition).
        assert_eq!(chop.decomposition.pieces.len(), 2);
    }

    #[test]
    fn positivity_violation_reports_witness() {
        let x = samples::p1();
        // A = (1/2)(D1 + D2) is ample but K + A has negative
        // coefficients that the base point cannot absorb.
        let a = x
            .prime_divisor("D1")
            .unwrap()
            .scale(&rat(1, 2))
            .add(&x.prime_divisor("D2").unwrap().scale(&rat(1, 2)));
        let err = ChopInstance::new(
            &x,
            &a,
            &["D1".to_string(), "D2".to_string()],
            &[rat_i(0), rat_i(0)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("positivity"), "{err}");
    }

    #[test]
    fn degree_bound_simplicial_halves_of_quadrant() {
        let parent = Cone::from_generators(2, &[vec![rat_i(1), rat_i(0)], vec![rat_i(0), rat_i(1)]])
            .unwrap();
        let lower =
            Cone::from_generators(2, &[vec![rat_i(1), rat_i(0)], vec![rat_i(1), rat_i(1)]])
                .unwrap();
        let upper =
            Cone::from_generators(2, &[vec![rat_i(0), rat_i(1)], vec![rat_i(1), rat_i(1)]])
                .unwrap();
        let db = degree_bound(&parent, &[(lower, 0), (upper, 1)]).unwrap();
        assert_eq!(db, DegreeBound { n: 0, witness: None });
    }

    #[test]
    fn degree_bound_translated_cone_matches_exhaustive() {
        // Parent: cone over [1,2]²; pieces from the b = (0,0) chop.
        let inst = p1_instance(&[rat_i(0), rat_i(0)]).unwrap();
        let chop = chop_backfaces(&inst).unwrap();
        let pieces: Vec<(Cone, usize)> =
            chop.pieces.iter().map(|p| (p.cone.clone(), p.j)).collect();
        let db = degree_bound(&inst.cone, &pieces).unwrap();
        assert_eq!(db.n, 2);
        let w = db.witness.unwrap();
        assert_eq!(w, int_vec(&[1, 1]));
        // Minimality: the witness violates the condition at τ = 2.
        assert!(inst.in_monoid(&w));
        assert!(!inst.in_monoid(&int_vec(&[0, 1])) || !inst.in_monoid(&int_vec(&[1, 0])));
    }

    #[test]
    fn degree_bound_unbounded_region_rejected() {
        // Parent is a half-plane; stepping down e₂ can exit arbitrarily
        // far out, so no finite bound exists.
        let parent = Cone::from_halfspaces(2, &[vec_i(&[0, 1])], &[]).unwrap();
        let err = degree_bound(&parent, &[(parent.clone(), 1)]).unwrap_err();
        assert!(err.to_string().contains("unbounded"), "{err}");
    }

    #[test]
    fn facet_generators_match_restricted_system_dimensions() {
        // The facet monomials biject with the restricted system on the
        // boundary prime.
        let x = samples::f1();
        let a = x.canonical_divisor().scale(&rat_i(-1));
        let inst = ChopInstance::new(
            &x,
            &a,
            &["D3".to_string(), "D4".to_string()],
            &[rat_i(0), rat_i(0)],
        )
        .unwrap();
        let chop = chop_backfaces(&inst).unwrap();
        let piece = &chop.pieces[0];
        let v = &inst.variety.rays[inst.ids[piece.j]];
        for l in [int_vec(&[1, 1]), int_vec(&[2, 1]), int_vec(&[2, 2]), int_vec(&[3, 2])] {
            let d = inst.divisor_of(&rat::to_rat_vec(&l));
            let facet: Vec<_> = inst
                .variety
                .sections(&d)
                .unwrap()
                .monomials
                .into_iter()
                .filter(|m| {
                    (Rat::from(rat::dot_int(v, m)) + Rat::from(l[0].clone())).is_zero()
                })
                .collect();
            let br = inst.variety.boundary_restriction("D3").unwrap();
            let rs = br.restrict_system(&inst.variety, &d).unwrap();
            assert_eq!(facet.len(), rs.monomials.len(), "degree {l:?}");
        }
    }

    #[test]
    fn assembly_generates_and_induction_replays() {
        let inst = p1_instance(&[rat_i(0), rat_i(0)]).unwrap();
        let chop = chop_backfaces(&inst).unwrap();
        let pieces: Vec<(Cone, usize)> =
            chop.pieces.iter().map(|p| (p.cone.clone(), p.j)).collect();
        let db = degree_bound(&inst.cone, &pieces).unwrap();
        let bound = db.n + 6;
        let restricted: Vec<GeneratorSet> = chop
            .pieces
            .iter()
            .map(|p| facet_subring_generators(&inst, p, bound).unwrap())
            .collect();
        let g = assemble_generators(&inst, &chop, &restricted, db.n).unwrap();
        let report = verify_assembly(&inst, &g, bound).unwrap();
        assert!(report.passed(), "missing: {:?}", report.first_failure);
        replay_induction(&inst, &chop, &restricted, db.n, bound).unwrap();
    }

    #[test]
    fn dropping_sigma_breaks_generation() {
        let inst = p1_instance(&[rat_i(0), rat_i(0)]).unwrap();
        let chop = chop_backfaces(&inst).unwrap();
        let pieces: Vec<(Cone, usize)> =
            chop.pieces.iter().map(|p| (p.cone.clone(), p.j)).collect();
        let db = degree_bound(&inst.cone, &pieces).unwrap();
        let restricted: Vec<GeneratorSet> = chop
            .pieces
            .iter()
            .map(|p| facet_subring_generators(&inst, p, db.n + 6).unwrap())
            .collect();
        let g = assemble_generators(&inst, &chop, &restricted, db.n).unwrap();
        // Keep only degrees τ ≤ 2: the high pieces need the vanishing
        // sections and lifts to be reached.
        let crippled = GeneratorSet::new(
            g.elements
                .iter()
                .filter(|(l, _)| l.iter().map(|c| c.clone()).sum::<Int>() <= Int::from(1))
                .cloned()
                .collect(),
        );
        let report = verify_assembly(&inst, &crippled, db.n + 6).unwrap();
        assert!(!report.passed());
    }

    fn p1_linear_system() -> (CharacteristicSystem, ToricVariety) {
        // D(t) = t(K + A + B) with A = (3/2)D1 + D2 and B = (1/2)D1:
        // boundary coefficient 1/2, K + A = (1/2)D1.
        let x = samples::p1();
        let registry = x.registry.clone();
        let cone = Cone::from_generators(1, &[vec![rat_i(1)]]).unwrap();
        let a = x
            .prime_divisor("D1")
            .unwrap()
            .scale(&rat(3, 2))
            .add(&x.prime_divisor("D2").unwrap());
        let rb = DivLinMap::from_named(&registry, 1, &[("D1", vec![rat(1, 2)])]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry,
            cone,
            vec![rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a),
        )
        .unwrap();
        (sys, x)
    }

    #[test]
    fn single_ray_cover_is_one_instance() {
        let (sys, x) = p1_linear_system();
        let instances = cover_by_parallelepipeds(&sys, &x).unwrap();
        assert_eq!(instances.len(), 1);
        assert_eq!(instances[0].boundary, vec!["D1".to_string()]);
        assert_eq!(instances[0].base, vec![rat(1, 2)]);
    }

    #[test]
    fn cover_of_two_generator_cone_verifies_membership() {
        // Varying boundary b ∈ [1/3, 2/3] on D1 with δ = 1/3.
        let x = samples::p1();
        let registry = x.registry.clone();
        let cone = Cone::from_generators(2, &[vec_i(&[1, 0]), vec_i(&[0, 1])]).unwrap();
        let a = x
            .prime_divisor("D1")
            .unwrap()
            .scale(&rat_i(2))
            .add(&x.prime_divisor("D2").unwrap());
        // K + A = D1; rb interpolates b(e₁) = 2/3, b(e₂) = 1/3.
        let rb =
            DivLinMap::from_named(&registry, 2, &[("D1", vec![rat(2, 3), rat(1, 3)])])
                .unwrap();
        let sys = CharacteristicSystem::linear(
            registry,
            cone,
            vec![rat_i(1), rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a),
        )
        .unwrap();
        assert_eq!(sys.delta_margin().unwrap(), rat(1, 3));
        let instances = cover_by_parallelepipeds(&sys, &x).unwrap();
        assert!(!instances.is_empty());
        // Membership: every sampled slice divisor lies in some
        // parallelepiped cone.
        for p in 0..=10i64 {
            let w = vec![rat(p, 10), rat(10 - p, 10)];
            let b = sys.boundary_at(&w).unwrap().coeff("D1");
            let point = vec![rat_i(1) + b];
            assert!(
                instances.iter().any(|i| i.cone.contains(&point).unwrap()),
                "uncovered at {p}"
            );
        }
    }

    #[test]
    fn pipeline_p1_certificate_is_small() {
        let (sys, x) = p1_linear_system();
        let cert = run_pipeline(&sys, &x).unwrap();
        assert_eq!(cert.instances.len(), 1);
        assert!(cert.generator_count() <= 4, "got {}", cert.generator_count());
        assert_eq!(cert.instances[0].degree_bound, 0);
    }

    #[test]
    fn pipeline_f1_passes_with_margin() {
        // F₁ with A = −K (ample): D(t) = t(K + A + B), B = (1/2)(D3 + D4).
        let x = samples::f1();
        let registry = x.registry.clone();
        let cone = Cone::from_generators(1, &[vec![rat_i(1)]]).unwrap();
        let a = x.canonical_divisor().scale(&rat_i(-1));
        let rb = DivLinMap::from_named(
            &registry,
            1,
            &[("D3", vec![rat(1, 2)]), ("D4", vec![rat(1, 2)])],
        )
        .unwrap();
        let sys = CharacteristicSystem::linear(
            registry,
            cone,
            vec![rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a),
        )
        .unwrap();
        let cert = run_pipeline(&sys, &x).unwrap();
        assert_eq!(cert.instances.len(), 1);
        let inst = &cert.instances[0];
        assert_eq!(inst.verified_up_to, inst.degree_bound + VERIFY_MARGIN);
        assert!(!inst.generators.elements.is_empty());
    }

    #[test]
    fn pipeline_rejects_non_dlt() {
        let x = samples::p1();
        let registry = x.registry.clone();
        let cone = Cone::from_generators(1, &[vec![rat_i(1)]]).unwrap();
        let a = x
            .prime_divisor("D1")
            .unwrap()
            .scale(&rat(5, 2))
            .add(&x.prime_divisor("D2").unwrap());
        // Boundary coefficient 3/2 > 1: not a boundary.
        let rb = DivLinMap::from_named(&registry, 1, &[("D1", vec![rat(3, 2)])]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry,
            cone,
            vec![rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a),
        )
        .unwrap();
        let err = run_pipeline(&sys, &x).unwrap_err();
        assert!(err.to_string().contains("classify"), "{err}");
    }
}
