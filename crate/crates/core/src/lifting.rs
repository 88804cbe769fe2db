//! Executable lifting checks on toric instances: restricted boundary
//! data Ω/Φ/Θ, the basic and sharp lifting statements as exact
//! monomial-set comparisons, the stabilization-index search, convex
//! piecewise-linear extension of sampled divisor data, and the
//! approximation-certificate verifier for local affineness of Θ.

use crate::charsys::CharacteristicSystem;
use crate::cone::ConeDecomposition;
use crate::divisor::{Divisor, QuadDivisor};
use crate::error::KernelError;
use crate::linalg::{self, Mat};
use crate::quad::{QuadExt, QuadVec};
use crate::rat::{self, rat, IntVec, Rat, RatVec};
use crate::restriction::{BoundaryRestriction, RestrictedSystem};
use crate::toric::{ToricVariety, DEFAULT_LADDER_MAX};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// A fixed plt-shaped instance `(X, Δ = S + A + B)` with `A` ample and
/// `pΔ` integral.
#[derive(Clone, Debug)]
pub struct LiftingInstance {
    pub variety: ToricVariety,
    pub s: String,
    pub a: Divisor,
    pub b: Divisor,
    pub p: u32,
    /// The star of `S`, set up once so that every divisor on `S`
    /// produced from this instance lives in one registry.
    br: BoundaryRestriction,
}

impl LiftingInstance {
    pub fn new(
        variety: &ToricVariety,
        s: &str,
        a: &Divisor,
        b: &Divisor,
        p: u32,
    ) -> Result<LiftingInstance, KernelError> {
        let s_id = variety.ray_index(s)?;
        if !variety.is_ample(a) {
            return Err(KernelError::Precondition("A is not ample".into()));
        }
        if !a.coeff_id(s_id).is_zero() {
            return Err(KernelError::Precondition(
                "the ample part must not contain S (exact restriction)".into(),
            ));
        }
        if !b.coeff_id(s_id).is_zero() {
            return Err(KernelError::Precondition("B must not contain S".into()));
        }
        for (id, c) in b.iter() {
            if c.is_negative() || *c >= Rat::one() {
                return Err(KernelError::Precondition(format!(
                    "boundary coefficient {} on {} is outside [0, 1)",
                    rat::format_rat(c),
                    variety.registry.name_of(id)
                )));
            }
        }
        if p == 0 {
            return Err(KernelError::Precondition("p must be positive".into()));
        }
        let pd = a.add(b).scale(&rat::rat_i(p as i64));
        if !rat::is_integral(&variety.coeff_vec(&pd)) {
            return Err(KernelError::Precondition("pΔ is not integral".into()));
        }
        let br = variety.boundary_restriction(s)?;
        Ok(LiftingInstance {
            variety: variety.clone(),
            s: s.to_string(),
            a: a.clone(),
            b: b.clone(),
            p,
            br,
        })
    }

    /// `Δ = S + A + B`.
    pub fn delta(&self) -> Divisor {
        self.variety.prime_divisor(&self.s).unwrap().add(&self.a).add(&self.b)
    }

    /// `K_X + Δ`.
    pub fn kd(&self) -> Divisor {
        self.variety.canonical_divisor().add(&self.delta())
    }

    pub fn restriction(&self) -> &BoundaryRestriction {
        &self.br
    }

    /// `Ω = (A + B)|_S`, exact coefficientwise restriction (valid
    /// because neither `A` nor `B` contains `S`).
    pub fn omega(&self, br: &BoundaryRestriction) -> Divisor {
        restrict_no_s(&self.a.add(&self.b), br, &self.variety)
    }
}

/// Coefficientwise restriction to `S` of a divisor without an
/// `S`-component: only the primes adjacent to `S` survive.
fn restrict_no_s(d: &Divisor, br: &BoundaryRestriction, x: &ToricVariety) -> Divisor {
    debug_assert!(d.coeff_id(br.parent_ray).is_zero());
    let mut out = Divisor::zero(&br.variety.registry);
    for (si, &ri) in br.adjacent.iter().enumerate() {
        out.set_coeff_id(si, d.coeff_id(ri));
    }
    let _ = x;
    out
}

/// Fixed divisor of a restricted monomial set: the coefficientwise
/// minimum multiplicity over the system. `None` for the empty system.
fn fix_of(star: &ToricVariety, rs: &RestrictedSystem) -> Option<Divisor> {
    if rs.monomials.is_empty() {
        return None;
    }
    let mut fix = Divisor::zero(&star.registry);
    for (i, n) in star.rays.iter().enumerate() {
        let a = rs.divisor.coeff_id(i);
        let mult =
            rs.monomials.iter().map(|m| Rat::from(rat::dot_int(n, m)) + &a).min().unwrap();
        fix.set_coeff_id(i, mult);
    }
    Some(fix)
}

/// A linear system on the star variety as the set of its effective
/// members, written as multiplicity vectors (linear-equivalence
/// invariant, so systems of different but equivalent divisors compare
/// canonically). `shift` adds a fixed effective divisor to every
/// member.
fn member_set(
    star: &ToricVariety,
    d: &Divisor,
    monomials: &[IntVec],
    shift: Option<&Divisor>,
) -> BTreeSet<RatVec> {
    let sh = shift.map(|s| star.coeff_vec(s));
    monomials
        .iter()
        .map(|m| {
            let mut v = star.multiplicity_vector(d, m);
            if let Some(sh) = &sh {
                v = rat::add(&v, sh);
            }
            v
        })
        .collect()
}

fn sbl_clear_of(x: &ToricVariety, d: &Divisor, s: &str) -> Result<(), KernelError> {
    let sbl = x.stable_base_locus(d);
    if sbl.whole_x || sbl.components.iter().any(|c| c == s) {
        return Err(KernelError::InBaseLocus(s.to_string()));
    }
    Ok(())
}

/// The boundary data of a characteristic system at one point:
/// `Ω(w) = (Δ(w) − S)|_S`, the restricted asymptotic fixed part
/// `𝐅_S(w)` of `K + Δ(w)`, `Φ(w) = Ω(w) ∧ 𝐅_S(w)`, and
/// `Θ(w) = Ω(w) − Φ(w)`.
#[derive(Clone, Debug)]
pub struct ThetaData {
    pub w: RatVec,
    pub omega: Divisor,
    pub f_s: Divisor,
    pub phi: Divisor,
    pub theta: Divisor,
}

/// Evaluates Ω, 𝐅_S, Φ, Θ at a rational point of the grading cone.
/// The boundary at `w` must have `S`-coefficient exactly 1 and all
/// other coefficients in `[0, 1)`, and `S` must not lie in the stable
/// base locus of `D(w)`.
pub fn theta_phi_omega(
    inst: &LiftingInstance,
    sys: &CharacteristicSystem,
    w: &[Rat],
) -> Result<ThetaData, KernelError> {
    let x = &inst.variety;
    let s_id = x.ray_index(&inst.s)?;
    let b_w = sys.boundary_at(w)?;
    if b_w.coeff_id(s_id) != Rat::one() {
        return Err(KernelError::Precondition(format!(
            "the boundary at {} does not contain S with multiplicity one",
            rat::format_vec(w)
        )));
    }
    for (id, c) in b_w.iter() {
        if id != s_id && (c.is_negative() || *c >= Rat::one()) {
            return Err(KernelError::Precondition(format!(
                "boundary coefficient {} on {} is outside [0, 1)",
                rat::format_rat(c),
                x.registry.name_of(id)
            )));
        }
    }
    let d_w = sys.eval(w)?;
    sbl_clear_of(x, &d_w, &inst.s)?;
    // K + Δ(w); the adjoint normalization D(w)/r(w).
    let a = sys
        .a
        .clone()
        .ok_or_else(|| KernelError::Precondition("system has no declared ample part".into()))?;
    let kd = sys.k.add(&a).add(&b_w);
    let br = inst.restriction();
    let s_div = x.prime_divisor(&inst.s)?;
    let omega = restrict_no_s(&a.add(&b_w).sub(&s_div), br, x);
    let f_s = br.restricted_asymptotic_fixed(x, &kd, DEFAULT_LADDER_MAX)?;
    let phi = omega.wedge(&f_s);
    let theta = omega.sub(&phi);
    debug_assert!(theta.is_effective());
    debug_assert!(theta.le(&omega));
    debug_assert!(theta.add(&phi).sub(&omega).is_zero());
    Ok(ThetaData { w: w.to_vec(), omega, f_s, phi, theta })
}

/// Result of a lifting comparison: the two linear systems on `S` as
/// canonical member sets, and whether the claimed relation holds.
#[derive(Clone, Debug)]
pub struct LiftReport {
    pub holds: bool,
    pub lhs: Vec<RatVec>,
    pub rhs: Vec<RatVec>,
}

/// The basic lifting statement at level `p`: with
/// `F_p = (1/p)Fix|p(K+Δ)|_S`, `Φ_p = Ω ∧ F_p`, `Θ_p = Ω − Φ_p`,
/// compares `|p(K+Δ)|_S` with `|p(K_S + Θ_p)| + pΦ_p` as member sets.
/// Equality is the proved statement; a failed report indicates a
/// violated hypothesis, not a verifier assertion.
pub fn simple_lifting_check(inst: &LiftingInstance) -> Result<LiftReport, KernelError> {
    let x = &inst.variety;
    let kd = inst.kd();
    sbl_clear_of(x, &kd, &inst.s)?;
    let p = rat::rat_i(inst.p as i64);
    let br = inst.restriction();
    let rs = br.restrict_system(x, &kd.scale(&p))?;
    let Some(fix) = fix_of(&br.variety, &rs) else {
        return Err(KernelError::EmptySystem);
    };
    let f_p = fix.scale(&p.recip());
    let omega = inst.omega(br);
    let phi_p = omega.wedge(&f_p);
    let theta_p = omega.sub(&phi_p);
    let lhs = member_set(&br.variety, &rs.divisor, &rs.monomials, None);
    let d_s = br.variety.canonical_divisor().add(&theta_p).scale(&p);
    let secs = br.variety.sections(&d_s)?;
    let rhs = member_set(&br.variety, &d_s, &secs.monomials, Some(&phi_p.scale(&p)));
    Ok(LiftReport {
        holds: lhs == rhs,
        lhs: lhs.into_iter().collect(),
        rhs: rhs.into_iter().collect(),
    })
}

/// Admissibility mode for the sharp lifting check.
#[derive(Clone, Debug)]
pub enum LiftMode {
    /// `Ω ∧ 𝐅_S ≤ Φ ≤ Ω`.
    Sharp,
    /// `Ω ∧ (1 − ε/p)𝐅_S ≤ Φ ≤ Ω`, gated on `ε(K+Δ) + A` ample.
    Tinkering(Rat),
}

/// The sharp lifting statement: for admissible `Φ` and `Θ = Ω − Φ`,
/// checks the inclusion `|p(K_S+Θ)| + pΦ ⊆ |p(K+Δ)|_S`.
pub fn sharp_lifting_check(
    inst: &LiftingInstance,
    phi: &Divisor,
    mode: &LiftMode,
) -> Result<LiftReport, KernelError> {
    let x = &inst.variety;
    let kd = inst.kd();
    let p = rat::rat_i(inst.p as i64);
    // Hypothesis: S ⊄ 𝐁(K + Δ + A/p).
    sbl_clear_of(x, &kd.add(&inst.a.scale(&p.recip())), &inst.s)?;
    let br = inst.restriction();
    let omega = inst.omega(br);
    let f_s = br.restricted_asymptotic_fixed(x, &kd, DEFAULT_LADDER_MAX)?;
    let lower = match mode {
        LiftMode::Sharp => omega.wedge(&f_s),
        LiftMode::Tinkering(eps) => {
            if !eps.is_positive() {
                return Err(KernelError::Precondition("ε must be positive".into()));
            }
            if !x.is_ample(&kd.scale(eps).add(&inst.a)) {
                return Err(KernelError::Precondition(
                    "ε(K+Δ) + A is not ample".into(),
                ));
            }
            omega.wedge(&f_s.scale(&(Rat::one() - eps / &p)))
        }
    };
    if !lower.le(phi) || !phi.le(&omega) {
        return Err(KernelError::Precondition(
            "Φ is outside the admissible interval".into(),
        ));
    }
    if !rat::is_integral(&br.variety.coeff_vec(&phi.scale(&p))) {
        return Err(KernelError::Precondition("pΦ is not integral".into()));
    }
    let rs = br.restrict_system(x, &kd.scale(&p))?;
    let lhs = member_set(&br.variety, &rs.divisor, &rs.monomials, None);
    let theta = omega.sub(phi);
    let d_s = br.variety.canonical_divisor().add(&theta).scale(&p);
    let secs = br.variety.sections(&d_s)?;
    let rhs = member_set(&br.variety, &d_s, &secs.monomials, Some(&phi.scale(&p)));
    Ok(LiftReport {
        holds: rhs.is_subset(&lhs),
        lhs: lhs.into_iter().collect(),
        rhs: rhs.into_iter().collect(),
    })
}

/// Smallest `n ≤ n_max` with
/// `Φ(λ) = Ω(λ) ∧ (1/n)Fix|n(K+Δ(λ))|_S`, or `None` when no such `n`
/// exists within the bound. Systems are evaluated at the adjoint
/// normalization `K + Δ(λ) = D(λ)/r(λ)`.
pub fn stabilization_index(
    inst: &LiftingInstance,
    sys: &CharacteristicSystem,
    lambda: &IntVec,
    n_max: u32,
) -> Result<Option<u32>, KernelError> {
    let w = rat::to_rat_vec(lambda);
    let td = theta_phi_omega(inst, sys, &w)?;
    let a = sys.a.clone().expect("checked in theta_phi_omega");
    let kd = sys.k.add(&a).add(&sys.boundary_at(&w)?);
    let br = inst.restriction();
    for n in 1..=n_max {
        let nr = rat::rat_i(n as i64);
        let rs = br.restrict_system(&inst.variety, &kd.scale(&nr))?;
        let Some(fix) = fix_of(&br.variety, &rs) else { continue };
        let phi_n = td.omega.wedge(&fix.scale(&nr.recip()));
        if phi_n.sub(&td.phi).is_zero() {
            debug_assert!(td.theta.is_effective());
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// A degree-1-homogeneous convex PL interpolant of divisor-valued
/// samples, one exact linear map per decomposition piece, with the
/// boundary samples that disagree with the interior extension flagged.
#[derive(Clone, Debug)]
pub struct PlExtension {
    pub decomposition: ConeDecomposition,
    /// Prime-divisor ids carrying the values.
    pub ids: Vec<usize>,
    /// Per piece: one coefficient row per id.
    pub maps: Vec<Mat>,
    /// Sample points on the parent boundary where the convex interior
    /// extension disagrees with the sampled value.
    pub flagged: Vec<RatVec>,
    registry: std::sync::Arc<crate::divisor::Registry>,
}

impl PlExtension {
    /// The convex extension `max` over the piece maps, per coefficient.
    pub fn eval(&self, w: &[Rat]) -> Divisor {
        let mut out = Divisor::zero(&self.registry);
        for (k, &id) in self.ids.iter().enumerate() {
            let v = self
                .maps
                .iter()
                .map(|m| rat::dot(&m[k], w))
                .max()
                .expect("at least one piece");
            out.set_coeff_id(id, v);
        }
        out
    }
}

/// Fits an exact linear map per decomposition piece through the
/// samples lying in that piece, checks convexity (every piece map
/// underestimates every sample), and flags boundary samples exceeded
/// by the interior extension instead of averaging them away.
pub fn extend_convex(
    samples: &[(RatVec, Divisor)],
    decomposition: &ConeDecomposition,
) -> Result<PlExtension, KernelError> {
    if samples.is_empty() {
        return Err(KernelError::Precondition("no samples".into()));
    }
    let registry = samples[0].1.registry.clone();
    let mut ids: Vec<usize> = samples.iter().flat_map(|(_, d)| d.support()).collect();
    ids.sort();
    ids.dedup();
    // Interior samples drive the fit; samples on the parent boundary
    // only get compared against the interior extension afterwards
    // (the function need not be continuous up to the boundary).
    let parent_facets = decomposition.parent.facets().to_vec();
    let on_boundary = |p: &RatVec| {
        parent_facets.iter().any(|f| rat::dot(&rat::to_rat_vec(f), p).is_zero())
    };
    let mut maps = Vec::new();
    for (pi, piece) in decomposition.pieces.iter().enumerate() {
        let in_piece: Vec<&(RatVec, Divisor)> = samples
            .iter()
            .filter(|(p, _)| piece.contains(p).unwrap_or(false))
            .collect();
        let interior: Vec<&&(RatVec, Divisor)> =
            in_piece.iter().filter(|(p, _)| !on_boundary(p)).collect();
        let rows: Vec<&(RatVec, Divisor)> = if interior.is_empty() {
            in_piece.clone()
        } else {
            interior.into_iter().copied().collect()
        };
        if rows.is_empty() {
            return Err(KernelError::Precondition(format!(
                "piece {pi} contains no sample"
            )));
        }
        let a: Mat = rows.iter().map(|(p, _)| p.clone()).collect();
        let mut map = Vec::new();
        for &id in &ids {
            let b: RatVec = rows.iter().map(|(_, d)| d.coeff_id(id)).collect();
            let sol = linalg::solve(&a, &b).ok_or_else(|| {
                KernelError::Invalid(format!(
                    "samples in piece {pi} are not linear in coefficient {}",
                    registry.name_of(id)
                ))
            })?;
            map.push(sol);
        }
        maps.push(map);
    }
    // Convexity: every piece's linear extension must underestimate
    // every interior sample. Boundary samples disagreeing with the
    // convex interior extension are flagged, never averaged away.
    let mut flagged = Vec::new();
    for (p, d) in samples {
        if on_boundary(p) {
            let disagrees = ids.iter().enumerate().any(|(k, &id)| {
                let v = maps.iter().map(|m| rat::dot(&m[k], p)).max().unwrap();
                v != d.coeff_id(id)
            });
            if disagrees {
                flagged.push(p.clone());
            }
            continue;
        }
        for map in &maps {
            for (k, &id) in ids.iter().enumerate() {
                if rat::dot(&map[k], p) > d.coeff_id(id) {
                    return Err(KernelError::Invalid(format!(
                        "samples violate convexity at {}",
                        rat::format_vec(p)
                    )));
                }
            }
        }
    }
    Ok(PlExtension {
        decomposition: decomposition.clone(),
        ids,
        maps,
        flagged,
        registry,
    })
}

/// One approximant of an irrational slice point: a nearby rational
/// point, its integral boundary datum, its barycentric weight, and its
/// denominator.
#[derive(Clone, Debug)]
pub struct ApproxPoint {
    pub w: RatVec,
    pub theta: Divisor,
    pub mu: QuadExt,
    pub p: u32,
}

/// A certificate that Θ is affine near the (possibly quadratic
/// irrational) point `x`: approximants with weights summing to 1 and
/// the constants of the verification (ε, the coefficient margin δ, the
/// Lipschitz constant C on the certificate points).
#[derive(Clone, Debug)]
pub struct LiftCertificate {
    pub x: QuadVec,
    pub points: Vec<ApproxPoint>,
    pub eps: Rat,
    pub delta: Rat,
    pub c_lipschitz: Rat,
}

/// Verification report: failed items carry their feature or condition
/// identifier and, where applicable, the witness prime.
#[derive(Clone, Debug)]
pub struct CertReport {
    pub pass: bool,
    pub failed: Vec<String>,
}

fn quad_from(d: &Divisor, field: u64) -> QuadDivisor {
    QuadDivisor::from_divisor(d, field)
}

fn quad_support(q: &QuadDivisor) -> Vec<usize> {
    q.support()
}

/// Verifies an affineness certificate against the instance: exact
/// barycentric identities, distance bounds, the coefficient-margin and
/// ampleness features, the per-point fixed-part conditions, the key
/// inclusion of linear systems, and the concluding affineness of Θ on
/// the hull of the approximants.
pub fn verify_dio_certificate(
    cert: &LiftCertificate,
    inst: &LiftingInstance,
    sys: &CharacteristicSystem,
) -> Result<CertReport, KernelError> {
    let x_var = &inst.variety;
    let field = cert.x.d;
    let mut failed: Vec<String> = Vec::new();
    let mut fail = |id: &str, msg: String| failed.push(format!("({id}) {msg}"));
    if cert.points.is_empty() {
        return Err(KernelError::Precondition("certificate has no points".into()));
    }
    // Weights: Σμ = 1, each strictly inside (0, 1).
    let mut mu_sum = QuadExt::from_rat(field, Rat::zero());
    for pt in &cert.points {
        if !pt.mu.is_positive() || !(QuadExt::from_rat(field, Rat::one()) - pt.mu.clone()).is_positive()
        {
            fail("weights", format!("μ = {} is outside (0, 1)", pt.mu));
        }
        mu_sum = mu_sum + pt.mu.clone();
    }
    if mu_sum != QuadExt::from_rat(field, Rat::one()) {
        fail("weights", format!("Σμ = {mu_sum} ≠ 1"));
    }
    // Barycenter: x = Σ μ_i w_i exactly.
    let dim = cert.x.dim();
    for k in 0..dim {
        let mut acc = QuadExt::from_rat(field, Rat::zero());
        for pt in &cert.points {
            acc = acc + pt.mu.clone() * QuadExt::from_rat(field, pt.w[k].clone());
        }
        if acc != cert.x.entries[k] {
            fail("barycenter", format!("coordinate {k}: Σμ_i w_i = {acc}"));
            break;
        }
    }
    // Denominator law: p_i w_i and p_i Θ_i integral.
    let br = inst.restriction();
    for (i, pt) in cert.points.iter().enumerate() {
        let p = rat::rat_i(pt.p as i64);
        if !rat::is_integral(&rat::scale(&p, &pt.w)) {
            fail("denominator", format!("p_{i}·w_{i} is not integral"));
        }
        if !rat::is_integral(&br.variety.coeff_vec(&pt.theta.scale(&p))) {
            fail("denominator", format!("p_{i}·Θ_{i} is not integral"));
        }
    }
    // Recompute Θ at every certificate point.
    let data: Vec<ThetaData> = cert
        .points
        .iter()
        .map(|pt| theta_phi_omega(inst, sys, &pt.w))
        .collect::<Result<_, _>>()?;
    // Distances ‖x − w_i‖ < ε/p_i, exactly in the quadratic field.
    for (i, pt) in cert.points.iter().enumerate() {
        let bound = QuadExt::from_rat(field, &cert.eps / rat::rat_i(pt.p as i64));
        if !(bound - cert.x.max_norm_dist(&pt.w)).is_positive() {
            fail("2", format!("‖x − w_{i}‖ ≥ ε/p_{i}"));
        }
    }
    // Affine proxies at x: Θ(x) = Σ μ_i Θ(w_i), likewise Ω and 𝐅_S
    // (exact on the certificate hull once affineness is confirmed
    // below; every consumer of these values is a certificate check).
    let combine = |pick: fn(&ThetaData) -> &Divisor| -> QuadDivisor {
        let mut acc = QuadDivisor::zero(&br.variety.registry, field);
        for (pt, td) in cert.points.iter().zip(&data) {
            acc = acc.add(&quad_from(pick(td), field).scale(&pt.mu));
        }
        acc
    };
    let theta_x = combine(|t| &t.theta);
    let omega_x = combine(|t| &t.omega);
    let fs_x = combine(|t| &t.f_s);
    // Additional assumption: mult_P Ω(x) ≠ mult_P 𝐅_S(x) for every
    // relevant prime (the removal of this assumption is out of scope).
    let mut primes: Vec<usize> = quad_support(&omega_x);
    primes.extend(quad_support(&fs_x));
    primes.sort();
    primes.dedup();
    for &pid in &primes {
        if omega_x.coeff_id(pid) == fs_x.coeff_id(pid) {
            fail(
                "additional-assumption",
                format!("mult Ω(x) = mult 𝐅_S(x) on {}", br.variety.registry.name_of(pid)),
            );
        }
    }
    // Feature (c): ε below the margin, and the margin holds on the
    // fixed supports of the certificate points.
    if cert.eps >= cert.delta {
        fail("c", format!("ε = {} is not below δ = {}", cert.eps, cert.delta));
    }
    for (i, td) in data.iter().enumerate() {
        for pid in td.phi.support() {
            if td.phi.coeff_id(pid) <= cert.delta {
                fail(
                    "c",
                    format!(
                        "mult(Ω−Θ)(w_{i}) ≤ δ on {}",
                        br.variety.registry.name_of(pid)
                    ),
                );
            }
        }
    }
    // Condition (1): Θ(x) = Σ μ_i Θ_i.
    let mut theta_cert_x = QuadDivisor::zero(&br.variety.registry, field);
    for pt in &cert.points {
        theta_cert_x = theta_cert_x.add(&quad_from(&pt.theta, field).scale(&pt.mu));
    }
    if !theta_cert_x.sub(&theta_x).is_zero() {
        fail("1", "Σμ_iΘ_i differs from Θ(x)".into());
    }
    // Condition (2): ‖Θ(x) − Θ_i‖ < ε/p_i; Lipschitz bound on the
    // certificate points.
    for (i, pt) in cert.points.iter().enumerate() {
        let bound = QuadExt::from_rat(field, &cert.eps / rat::rat_i(pt.p as i64));
        let diff = theta_x.sub(&quad_from(&pt.theta, field));
        for pid in quad_support(&diff) {
            if !(bound.clone() - diff.coeff_id(pid).abs()).is_positive() {
                fail("2", format!("‖Θ(x) − Θ_{i}‖ ≥ ε/p_{i}"));
                break;
            }
        }
        let lip = QuadExt::from_rat(field, cert.c_lipschitz.clone())
            * cert.x.max_norm_dist(&pt.w);
        let dtheta = theta_x.sub(&quad_from(&data[i].theta, field));
        for pid in quad_support(&dtheta) {
            if (dtheta.coeff_id(pid).abs() - lip.clone()).is_positive() {
                fail("lipschitz", format!("‖Θ(w_{i}) − Θ(x)‖ > C‖w_{i} − x‖"));
                break;
            }
        }
    }
    // Condition (3): where mult_P Θ(x) = mult_P Ω(x), equality is
    // forced at every approximant: mult_P Θ_i = mult_P Ω(w_i).
    for &pid in &primes {
        if theta_x.coeff_id(pid) != omega_x.coeff_id(pid) {
            continue;
        }
        for (i, (pt, td)) in cert.points.iter().zip(&data).enumerate() {
            if pt.theta.coeff_id(pid) != td.omega.coeff_id(pid) {
                fail(
                    "3",
                    format!(
                        "mult Θ_{i} ≠ mult Ω(w_{i}) on {}",
                        br.variety.registry.name_of(pid)
                    ),
                );
            }
        }
    }
    // Features (d), (e), (f) and condition (4); key inclusion; Case-2
    // chain — all per approximant.
    let a = sys
        .a
        .clone()
        .ok_or_else(|| KernelError::Precondition("system has no declared ample part".into()))?;
    // Piece containing all certificate points, for evaluating the
    // boundary at the irrational x.
    let piece_idx = (0..sys.pieces.len())
        .find(|&k| {
            cert.points
                .iter()
                .all(|pt| sys.decomposition.pieces[k].contains(&pt.w).unwrap_or(false))
        })
        .ok_or_else(|| {
            KernelError::Precondition("certificate points span several linearity pieces".into())
        })?;
    let piece = &sys.pieces[piece_idx];
    // b(x)/r(x) in the quadratic field, on that piece.
    let r_x = {
        let mut acc = QuadExt::from_rat(field, Rat::zero());
        for (c, e) in piece.r.iter().zip(&cert.x.entries) {
            acc = acc + QuadExt::from_rat(field, c.clone()) * e.clone();
        }
        acc
    };
    let b_x = {
        let mut q = QuadDivisor::zero(&x_var.registry, field);
        let rinv = r_x.recip()?;
        for id in piece.rb.support() {
            let row = piece.rb.row(id);
            let mut acc = QuadExt::from_rat(field, Rat::zero());
            for (c, e) in row.iter().zip(&cert.x.entries) {
                acc = acc + QuadExt::from_rat(field, c.clone()) * e.clone();
            }
            q.set_coeff_id(id, acc * rinv.clone());
        }
        q
    };
    for (i, (pt, td)) in cert.points.iter().zip(&data).enumerate() {
        let p = rat::rat_i(pt.p as i64);
        let b_wi = sys.boundary_at(&pt.w)?;
        let kd_i = sys.k.add(&a).add(&b_wi);
        // (d): Δ(w_i) − Δ(x) + A/p_i ample.
        let d_diff = quad_from(&b_wi, field)
            .sub(&b_x)
            .add(&quad_from(&a.scale(&p.recip()), field));
        if !x_var.is_ample_quad(&d_diff) {
            fail("d", format!("Δ(w_{i}) − Δ(x) + A/p_{i} is not ample"));
        }
        // (e): (C+1)(ε/δ)(K + Δ(w_i)) + A ample.
        let t = (&cert.c_lipschitz + Rat::one()) * &cert.eps / &cert.delta;
        if !x_var.is_ample(&kd_i.scale(&t).add(&a)) {
            fail("e", format!("(C+1)(ε/δ)(K+Δ(w_{i})) + A is not ample"));
        }
        // (f): no component of Θ_i lies in 𝐅(K_S + Θ_i).
        let ks_theta = br.variety.canonical_divisor().add(&pt.theta);
        let f_star = br.variety.asymptotic_fixed(&ks_theta)?;
        for pid in pt.theta.support() {
            if !f_star.coeff_id(pid).is_zero() {
                fail(
                    "f",
                    format!(
                        "component {} of Θ_{i} is in 𝐅(K_S+Θ_{i})",
                        br.variety.registry.name_of(pid)
                    ),
                );
            }
        }
        // (4): 𝐅(K_S + Θ_i) = (1/p_i) Fix |p_i(K_S + Θ_i)|.
        let d_s = ks_theta.scale(&p);
        let secs = br.variety.sections(&d_s)?;
        let fix_pi = if secs.monomials.is_empty() {
            None
        } else {
            let rs = RestrictedSystem { monomials: secs.monomials.clone(), divisor: d_s.clone() };
            fix_of(&br.variety, &rs)
        };
        match fix_pi {
            Some(fix) => {
                if !fix.scale(&p.recip()).sub(&f_star).is_zero() {
                    fail("4", format!("𝐅(K_S+Θ_{i}) ≠ (1/p_{i})Fix|p_{i}(K_S+Θ_{i})|"));
                }
            }
            None => fail("4", format!("|p_{i}(K_S+Θ_{i})| is empty")),
        }
        // Key inclusion: |p_i(K+Δ(w_i))|_S ⊇ |p_i(K_S+Θ_i)| + p_i(Ω(w_i)−Θ_i).
        let phi_i = td.omega.sub(&pt.theta);
        if !phi_i.is_effective() {
            fail("key-inclusion", format!("Θ_{i} exceeds Ω(w_{i})"));
        } else {
            let rs = br.restrict_system(x_var, &kd_i.scale(&p))?;
            let lhs = member_set(&br.variety, &rs.divisor, &rs.monomials, None);
            let rhs = member_set(&br.variety, &d_s, &secs.monomials, Some(&phi_i.scale(&p)));
            if !rhs.is_subset(&lhs) {
                fail("key-inclusion", format!("fails at approximant {i}"));
            }
        }
        // Case-2 chain at primes with mult_P Θ(x) < mult_P Ω(x).
        let rs_full = br.restrict_system(x_var, &kd_i.scale(&p))?;
        let fix_i = fix_of(&br.variety, &rs_full).map(|f| f.scale(&p.recip()));
        for &pid in &primes {
            if theta_x.coeff_id(pid) == omega_x.coeff_id(pid) {
                continue;
            }
            let Some(fi) = &fix_i else { continue };
            let factor = Rat::one()
                - (&cert.c_lipschitz + Rat::one()) * &cert.eps / (&p * &cert.delta);
            if fi.coeff_id(pid) > &factor * td.f_s.coeff_id(pid) {
                fail(
                    "case2",
                    format!(
                        "mult F_{i} exceeds (1−(C+1)ε/(p_{i}δ))·mult 𝐅_S(w_{i}) on {}",
                        br.variety.registry.name_of(pid)
                    ),
                );
            }
            let dtheta = (td.theta.coeff_id(pid) - pt.theta.coeff_id(pid)).abs();
            if dtheta > (&cert.c_lipschitz + Rat::one()) * &cert.eps / &p {
                fail("case2", format!("‖Θ(w_{i}) − Θ_{i}‖ too large on a Case-2 prime"));
            }
            let lhs_c = td.omega.coeff_id(pid).min(fi.coeff_id(pid));
            if lhs_c > td.omega.coeff_id(pid) - pt.theta.coeff_id(pid) {
                fail(
                    "case2",
                    format!(
                        "mult(Ω∧F_{i}) exceeds mult(Ω−Θ_{i}) on {}",
                        br.variety.registry.name_of(pid)
                    ),
                );
            }
        }
        // Conclusion chain: Θ_i ≤ Θ(w_i).
        if !pt.theta.le(&td.theta) {
            fail("theta-bound", format!("Θ_{i} ≰ Θ(w_{i})"));
        }
    }
    // Affineness of Θ on the certificate hull: pairwise midpoints and
    // five deterministic interior points.
    let m = cert.points.len();
    for i in 0..m {
        for j in i + 1..m {
            let mid = rat::scale(
                &rat(1, 2),
                &rat::add(&cert.points[i].w, &cert.points[j].w),
            );
            let td_mid = theta_phi_omega(inst, sys, &mid)?;
            let expect = data[i]
                .theta
                .add(&data[j].theta)
                .scale(&rat(1, 2));
            if !td_mid.theta.sub(&expect).is_zero() {
                fail("affine", format!("Θ is not affine at the midpoint of w_{i}, w_{j}"));
            }
        }
    }
    if m >= 2 {
        for k in 1..=5i64 {
            // Deterministic interior weights t, 1−t (spread over the
            // segment between the first two approximants), combined
            // with the remaining points at equal small weight 0 — i.e.
            // points on the hull's first edge.
            let t = rat(k, 6);
            let w = rat::add(
                &rat::scale(&t, &cert.points[0].w),
                &rat::scale(&(Rat::one() - &t), &cert.points[1].w),
            );
            let td_k = theta_phi_omega(inst, sys, &w)?;
            let expect = data[0]
                .theta
                .scale(&t)
                .add(&data[1].theta.scale(&(Rat::one() - &t)));
            if !td_k.theta.sub(&expect).is_zero() {
                fail("affine", format!("Θ is not affine at interior point {k}/6"));
            }
        }
    }
    Ok(CertReport { pass: failed.is_empty(), failed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Cone;
    use crate::charsys::DivLinMap;
    use crate::rat::{int_vec, rat_i};
    use crate::samples;

    fn p2_instance(p: u32) -> LiftingInstance {
        // ℙ², S = line D3, Δ = S + (3/2)(D1+D2): K+Δ ~ H.
        let x = samples::p2();
        let a = x
            .prime_divisor("D1")
            .unwrap()
            .add(&x.prime_divisor("D2").unwrap())
            .scale(&rat(3, 2));
        let b = Divisor::zero(&x.registry);
        LiftingInstance::new(&x, "D3", &a, &b, p).unwrap()
    }

    /// F₁ system with `Δ(λ) = S + A + (1/2)E + c(λ)·f`, `S = D4` the
    /// +1-section, `A = D1+D2+D3`, `c(λ) = λ₂/(2(λ₁+λ₂))`; so
    /// `K + Δ(λ) = (1/2)E + c(λ)f` with `E = D2` fixed and `S` clear.
    fn f1_cert_system() -> (LiftingInstance, CharacteristicSystem) {
        let x = samples::f1();
        let registry = x.registry.clone();
        let a = Divisor::from_named(
            &registry,
            &[("D1", rat_i(1)), ("D2", rat_i(1)), ("D3", rat_i(1))],
        )
        .unwrap();
        assert!(x.is_ample(&a));
        let cone = Cone::from_generators(2, &[vec![rat_i(1), rat_i(0)], vec![rat_i(0), rat_i(1)]])
            .unwrap();
        let rb = DivLinMap::from_named(
            &registry,
            2,
            &[
                ("D4", vec![rat_i(1), rat_i(1)]),
                ("D2", vec![rat(1, 2), rat(1, 2)]),
                ("D1", vec![rat_i(0), rat(1, 2)]),
            ],
        )
        .unwrap();
        let sys = CharacteristicSystem::linear(
            registry,
            cone,
            vec![rat_i(1), rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a.clone()),
        )
        .unwrap();
        let b = Divisor::from_named(&x.registry, &[("D2", rat(1, 2))]).unwrap();
        let inst = LiftingInstance::new(&x, "D4", &a, &b, 6).unwrap();
        (inst, sys)
    }

    fn f1_certificate(inst: &LiftingInstance, c_lipschitz: Rat) -> LiftCertificate {
        // x = (√2/2, 1 − √2/2) on the slice, approximated by
        // w₁ = (2/3, 1/3) and w₂ = (5/7, 2/7); μ₂ = 21√2/2 − 14.
        let x = QuadVec::new(
            2,
            vec![(rat_i(0), rat(1, 2)), (rat_i(1), rat(-1, 2))],
        )
        .unwrap();
        let mu2 = QuadExt::new(2, rat_i(-14), rat(21, 2)).unwrap();
        let mu1 = QuadExt::from_rat(2, Rat::one()) - mu2.clone();
        let star_names = |c: Rat| {
            // Θ_i = Ω(w_i) = (1 + c)·P_{D1} + 1·P_{D3} on S ≅ ℙ¹.
            move |registry: &std::sync::Arc<crate::divisor::Registry>| {
                Divisor::from_named(
                    registry,
                    &[("D1", rat_i(1) + c.clone()), ("D3", rat_i(1))],
                )
                .unwrap()
            }
        };
        let reg = inst.restriction().variety.registry.clone();
        LiftCertificate {
            x,
            points: vec![
                ApproxPoint {
                    w: vec![rat(2, 3), rat(1, 3)],
                    theta: star_names(rat(1, 6))(&reg),
                    mu: mu1,
                    p: 6,
                },
                ApproxPoint {
                    w: vec![rat(5, 7), rat(2, 7)],
                    theta: star_names(rat(1, 7))(&reg),
                    mu: mu2,
                    p: 7,
                },
            ],
            eps: rat(1, 4),
            delta: rat(1, 2),
            c_lipschitz,
        }
    }

    #[test]
    fn theta_identity_with_free_restriction() {
        // ℙ² with 𝐅_S = 0: Φ = 0 and Θ = Ω.
        let x = samples::p2();
        let registry = x.registry.clone();
        let a = x.prime_divisor("D1").unwrap().scale(&rat_i(3));
        let cone = Cone::from_generators(1, &[vec![rat_i(1)]]).unwrap();
        let rb = DivLinMap::from_named(&registry, 1, &[("D3", vec![rat_i(1)])]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry,
            cone,
            vec![rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a.clone()),
        )
        .unwrap();
        let b = Divisor::zero(&x.registry);
        let inst = LiftingInstance::new(&x, "D3", &a, &b, 1).unwrap();
        let td = theta_phi_omega(&inst, &sys, &[rat_i(1)]).unwrap();
        assert!(td.phi.is_zero());
        assert!(td.theta.sub(&td.omega).is_zero());
        assert_eq!(td.omega.coeff("D1"), rat_i(3));
    }

    #[test]
    fn theta_with_rigid_fixed_part_is_positive() {
        // F₁: K + Δ(λ) = (1/4)f + (1/2)E with S a fiber meeting E.
        let x = samples::f1();
        let registry = x.registry.clone();
        let a = Divisor::from_named(
            &registry,
            &[("D2", rat_i(1)), ("D3", rat(5, 4)), ("D4", rat_i(1))],
        )
        .unwrap();
        assert!(x.is_ample(&a));
        let cone = Cone::from_generators(1, &[vec![rat_i(1)]]).unwrap();
        let rb = DivLinMap::from_named(
            &registry,
            1,
            &[("D1", vec![rat_i(1)]), ("D2", vec![rat(1, 2)])],
        )
        .unwrap();
        let sys = CharacteristicSystem::linear(
            registry,
            cone,
            vec![rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a.clone()),
        )
        .unwrap();
        let b = Divisor::from_named(&x.registry, &[("D2", rat(1, 2))]).unwrap();
        let inst = LiftingInstance::new(&x, "D1", &a, &b, 4).unwrap();
        let td = theta_phi_omega(&inst, &sys, &[rat_i(1)]).unwrap();
        // 𝐅_S = (1/4)·(E ∩ S): the rigid part (1/2)E minus the mobile
        // growth c = 1/4 of the fiber direction.
        assert_eq!(td.f_s.coeff("D2"), rat(1, 4));
        assert_eq!(td.phi.coeff("D2"), rat(1, 4));
        assert!(td.theta.le(&td.omega));
        assert!(td.theta.add(&td.phi).sub(&td.omega).is_zero());
    }

    #[test]
    fn simple_lifting_on_p2_line() {
        let inst = p2_instance(2);
        let report = simple_lifting_check(&inst).unwrap();
        assert!(report.holds, "lhs {:?} rhs {:?}", report.lhs, report.rhs);
        // |2(K+Δ)|_S is the full degree-2 system on the line.
        assert_eq!(report.lhs.len(), 3);
    }

    #[test]
    fn simple_lifting_rejects_base_locus_and_integrality() {
        // S in the stable base locus: F₁ with Δ = S + A, S = E, and
        // K + Δ ~ (1/2)E + (1/4)f, whose fixed part is (1/4)E.
        let x = samples::f1();
        let a = Divisor::from_named(
            &x.registry,
            &[("D1", rat_i(1)), ("D3", rat(3, 4)), ("D4", rat(3, 2))],
        )
        .unwrap();
        assert!(x.is_ample(&a));
        let b = Divisor::zero(&x.registry);
        let inst = LiftingInstance::new(&x, "D2", &a, &b, 4).unwrap();
        assert!(matches!(
            simple_lifting_check(&inst),
            Err(KernelError::InBaseLocus(_))
        ));
        // pΔ not integral is rejected at construction.
        let x = samples::p2();
        let a = x.prime_divisor("D1").unwrap().scale(&rat(3, 2));
        let b = Divisor::zero(&x.registry);
        assert!(LiftingInstance::new(&x, "D3", &a, &b, 3).is_err());
    }

    #[test]
    fn sharp_lifting_minimal_and_maximal_phi() {
        let x = samples::p2();
        let a = x
            .prime_divisor("D1")
            .unwrap()
            .scale(&rat(3, 2))
            .add(&x.prime_divisor("D2").unwrap().scale(&rat(3, 2)));
        let b = Divisor::from_named(&x.registry, &[("D1", rat(1, 2))]).unwrap();
        let inst = LiftingInstance::new(&x, "D3", &a, &b, 2).unwrap();
        let br = inst.restriction();
        let omega = inst.omega(br);
        let kd = inst.kd();
        let f_s = br.restricted_asymptotic_fixed(&x, &kd, 60).unwrap();
        // Minimal admissible Φ.
        let phi_min = omega.wedge(&f_s);
        let r1 = sharp_lifting_check(&inst, &phi_min, &LiftMode::Sharp).unwrap();
        assert!(r1.holds);
        // Maximal Φ = Ω.
        let r2 = sharp_lifting_check(&inst, &omega, &LiftMode::Sharp).unwrap();
        assert!(r2.holds);
        // Out of range.
        let over = omega.add(&br.variety.prime_divisor("D1").unwrap());
        assert!(sharp_lifting_check(&inst, &over, &LiftMode::Sharp).is_err());
    }

    #[test]
    fn tinkering_gate_checks_ampleness() {
        let inst = p2_instance(2);
        let br = inst.restriction();
        let omega = inst.omega(br);
        // ε = 1: K+Δ ~ H, so K+Δ+A is ample — gate passes.
        let r = sharp_lifting_check(&inst, &omega, &LiftMode::Tinkering(rat_i(1))).unwrap();
        assert!(r.holds);
        // ε ≤ 0 rejected.
        assert!(sharp_lifting_check(&inst, &omega, &LiftMode::Tinkering(rat_i(0))).is_err());
    }

    #[test]
    fn stabilization_at_one_and_four() {
        // Integral K+Δ = f stabilizes at n = 1.
        let x = samples::f1();
        let registry = x.registry.clone();
        let a = Divisor::from_named(
            &registry,
            &[("D2", rat_i(1)), ("D3", rat_i(2)), ("D4", rat_i(1))],
        )
        .unwrap();
        assert!(x.is_ample(&a));
        let cone = Cone::from_generators(1, &[vec![rat_i(1)]]).unwrap();
        let rb = DivLinMap::from_named(&registry, 1, &[("D1", vec![rat_i(1)])]).unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone.clone(),
            vec![rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a.clone()),
        )
        .unwrap();
        let b = Divisor::zero(&registry);
        let inst = LiftingInstance::new(&x, "D1", &a, &b, 1).unwrap();
        assert_eq!(stabilization_index(&inst, &sys, &int_vec(&[1]), 5).unwrap(), Some(1));

        // K + Δ = (1/4)f + (1/2)E needs n = 4 to see the fixed point
        // with its exact asymptotic multiplicity.
        let a = Divisor::from_named(
            &registry,
            &[("D2", rat_i(1)), ("D3", rat(5, 4)), ("D4", rat_i(1))],
        )
        .unwrap();
        let rb = DivLinMap::from_named(
            &registry,
            1,
            &[("D1", vec![rat_i(1)]), ("D2", vec![rat(1, 2)])],
        )
        .unwrap();
        let sys = CharacteristicSystem::linear(
            registry.clone(),
            cone,
            vec![rat_i(1)],
            rb,
            x.canonical_divisor(),
            Some(a.clone()),
        )
        .unwrap();
        let b = Divisor::from_named(&registry, &[("D2", rat(1, 2))]).unwrap();
        let inst = LiftingInstance::new(&x, "D1", &a, &b, 4).unwrap();
        assert_eq!(stabilization_index(&inst, &sys, &int_vec(&[1]), 6).unwrap(), Some(4));
        // Too small a search bound reports absence, never a value.
        assert_eq!(stabilization_index(&inst, &sys, &int_vec(&[1]), 3).unwrap(), None);
    }

    #[test]
    fn extend_convex_linear_data_and_homogeneity() {
        let x = samples::p2();
        let parent =
            Cone::from_generators(2, &[vec![rat_i(1), rat_i(0)], vec![rat_i(0), rat_i(1)]])
                .unwrap();
        let dec = ConeDecomposition::new(parent.clone(), vec![parent.clone()]).unwrap();
        let val = |p: &[Rat]| {
            Divisor::from_named(&x.registry, &[("D1", &p[0] + &p[1])]).unwrap()
        };
        let pts = [
            vec![rat_i(1), rat_i(0)],
            vec![rat_i(0), rat_i(1)],
            vec![rat_i(1), rat_i(1)],
            vec![rat_i(2), rat_i(3)],
            vec![rat_i(4), rat_i(6)],
        ];
        let samples: Vec<(RatVec, Divisor)> =
            pts.iter().map(|p| (p.clone(), val(p))).collect();
        let ext = extend_convex(&samples, &dec).unwrap();
        assert!(ext.flagged.is_empty());
        // Exact agreement and degree-1 homogeneity.
        for p in &pts {
            assert_eq!(ext.eval(p).coeff("D1"), &p[0] + &p[1]);
            let doubled = rat::scale(&rat_i(2), p);
            assert_eq!(ext.eval(&doubled).coeff("D1"), rat_i(2) * (&p[0] + &p[1]));
        }
    }

    #[test]
    fn extend_convex_rejects_convexity_violation_and_flags_boundary() {
        let x = samples::p2();
        let parent =
            Cone::from_generators(2, &[vec![rat_i(1), rat_i(0)], vec![rat_i(0), rat_i(1)]])
                .unwrap();
        let mid = vec![rat_i(1), rat_i(1)];
        let lower = Cone::from_generators(2, &[vec![rat_i(1), rat_i(0)], mid.clone()]).unwrap();
        let upper = Cone::from_generators(2, &[mid.clone(), vec![rat_i(0), rat_i(1)]]).unwrap();
        let dec = ConeDecomposition::new(parent, vec![lower, upper]).unwrap();
        let d = |v: Rat| Divisor::from_named(&x.registry, &[("D1", v)]).unwrap();
        // Concave (not convex) kink at the interior ray: interior
        // sample exceeded by the other piece's extension → error.
        let bad = vec![
            (vec![rat_i(1), rat_i(0)], d(rat_i(0))),
            (vec![rat_i(1), rat_i(1)], d(rat_i(2))),
            (vec![rat_i(0), rat_i(1)], d(rat_i(0))),
            (vec![rat_i(2), rat_i(1)], d(rat_i(2))),
            (vec![rat_i(1), rat_i(2)], d(rat_i(2))),
        ];
        let err = extend_convex(&bad, &dec).unwrap_err();
        assert!(err.to_string().contains("convexity"), "{err}");
        // A boundary jump is flagged, not fatal: convex interior data
        // with a depressed value at a parent boundary ray.
        let jump = vec![
            (vec![rat_i(1), rat_i(0)], d(rat_i(-1))),
            (vec![rat_i(1), rat_i(1)], d(rat_i(0))),
            (vec![rat_i(0), rat_i(1)], d(rat_i(1))),
            (vec![rat_i(2), rat_i(1)], d(rat_i(1))),
            (vec![rat_i(1), rat_i(2)], d(rat_i(1))),
        ];
        let ext = extend_convex(&jump, &dec).unwrap();
        assert_eq!(ext.flagged, vec![vec![rat_i(1), rat_i(0)]]);
    }

    #[test]
    fn certificate_roundtrip_passes() {
        let (inst, sys) = f1_cert_system();
        let cert = f1_certificate(&inst, rat_i(1));
        let report = verify_dio_certificate(&cert, &inst, &sys).unwrap();
        assert!(report.pass, "failed items: {:?}", report.failed);
    }

    #[test]
    fn certificate_detects_ampleness_defect() {
        // A large Lipschitz constant pushes (C+1)(ε/δ)(K+Δ)+A across
        // the ample cone boundary in the rigid direction.
        let (inst, sys) = f1_cert_system();
        let cert = f1_certificate(&inst, rat_i(9));
        let report = verify_dio_certificate(&cert, &inst, &sys).unwrap();
        assert!(!report.pass);
        assert!(report.failed.iter().all(|f| f.starts_with("(e)")), "{:?}", report.failed);
    }

    #[test]
    fn certificate_detects_forced_equality_defect() {
        // Perturbing Θ₁ below Ω(w₁) breaks the forced Case-1 equality.
        let (inst, sys) = f1_cert_system();
        let mut cert = f1_certificate(&inst, rat_i(1));
        let br = inst.restriction();
        cert.points[0].theta = cert.points[0]
            .theta
            .sub(&br.variety.prime_divisor("D1").unwrap().scale(&rat(1, 6)));
        let report = verify_dio_certificate(&cert, &inst, &sys).unwrap();
        assert!(!report.pass);
        assert!(report.failed.iter().any(|f| f.starts_with("(3)")), "{:?}", report.failed);
    }

    #[test]
    fn certificate_detects_weight_defect() {
        let (inst, sys) = f1_cert_system();
        let mut cert = f1_certificate(&inst, rat_i(1));
        cert.points[0].mu = cert.points[0].mu.clone() + QuadExt::from_rat(2, rat(1, 100));
        let report = verify_dio_certificate(&cert, &inst, &sys).unwrap();
        assert!(!report.pass);
        assert!(
            report.failed.iter().any(|f| f.starts_with("(weights)"))
                && report.failed.iter().any(|f| f.starts_with("(barycenter)")),
            "{:?}",
            report.failed
        );
    }
}
