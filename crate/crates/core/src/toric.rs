//! Smooth complete toric varieties as an exactly computable oracle:
//! section spaces, fixed and mobile parts, stable base loci, asymptotic
//! fixed parts, ampleness, restriction to an invariant divisor, and the
//! adjoint coefficient regions.

use crate::divisor::{Divisor, QuadDivisor, Registry};
use crate::error::KernelError;
use crate::linalg::{self, Mat};
use crate::polyhedron::{HPoly, LpResult};
use crate::quad::QuadExt;
use crate::rat::{self, Int, IntVec, Rat, RatVec};
use num_traits::{One, Signed};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A wall between two adjacent maximal cones.
#[derive(Clone, Debug)]
pub struct Wall {
    pub cones: (usize, usize),
    /// The ray of each cone not on the wall.
    pub opposite: (usize, usize),
    pub shared: Vec<usize>,
}

/// A smooth complete toric variety, given by its fan.
#[derive(Clone, Debug)]
pub struct ToricVariety {
    pub dim: usize,
    pub rays: Vec<IntVec>,
    pub max_cones: Vec<Vec<usize>>,
    pub registry: Arc<Registry>,
    pub walls: Vec<Wall>,
}

/// `H⁰(X, O(⌊D⌋))` as the lattice points of the divisor polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionSpace {
    pub divisor: Divisor,
    pub monomials: Vec<IntVec>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// Divisorial stable base locus report.
#[derive(Clone, Debug, PartialEq)]
pub struct SblReport {
    /// Ray names of the invariant divisorial components.
    pub components: Vec<String>,
    pub is_empty: bool,
    pub whole_x: bool,
    pub stabilized: bool,
    /// Non-divisorial strata are out of scope and never computed.
    pub deeper_strata_computed: bool,
}

pub const DEFAULT_LADDER_MAX: u32 = 12;

impl ToricVariety {
    /// Builds and fully validates the variety: distinct primitive rays,
    /// unimodular maximal cones (smoothness), and every wall shared by
    /// exactly two cones lying on opposite sides (completeness).
    pub fn new(
        dim: usize,
        rays: Vec<IntVec>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<ToricVariety, KernelError> {
        Self::with_names(dim, rays, max_cones, None)
    }

    pub fn with_names(
        dim: usize,
        rays: Vec<IntVec>,
        max_cones: Vec<Vec<usize>>,
        names: Option<Vec<String>>,
    ) -> Result<ToricVariety, KernelError> {
        if dim == 0 {
            return Err(KernelError::Invalid("dimension must be positive".into()));
        }
        for r in &rays {
            if r.len() != dim {
                return Err(KernelError::DimensionMismatch { expected: dim, got: r.len() });
            }
            if *r != rat::primitive_integer(&rat::to_rat_vec(r)) {
                return Err(KernelError::Invalid(format!(
                    "ray {} is not primitive",
                    rat::format_vec(&rat::to_rat_vec(r))
                )));
            }
        }
        for i in 0..rays.len() {
            for j in i + 1..rays.len() {
                if rays[i] == rays[j] {
                    return Err(KernelError::Invalid(format!("duplicate ray at indices {i},{j}")));
                }
            }
        }
        for c in &max_cones {
            if c.len() != dim {
                return Err(KernelError::NotSmooth(format!(
                    "maximal cone {c:?} does not have {dim} rays"
                )));
            }
            let m: Mat = c.iter().map(|&i| rat::to_rat_vec(&rays[i])).collect();
            let det = linalg::det(&m);
            if det.abs() != Rat::one() {
                return Err(KernelError::NotSmooth(format!(
                    "cone {c:?} has determinant {}",
                    rat::format_rat(&det)
                )));
            }
        }
        // Wall structure: each (dim-1)-face of a maximal cone must be
        // shared by exactly two cones sitting on opposite sides.
        let mut wall_map: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, c) in max_cones.iter().enumerate() {
            for drop in 0..c.len() {
                let mut key: Vec<usize> =
                    c.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &r)| r).collect();
                key.sort_unstable();
                wall_map.entry(key).or_default().push((ci, c[drop]));
            }
        }
        let mut walls = Vec::new();
        for (shared, owners) in &wall_map {
            if owners.len() != 2 {
                return Err(KernelError::NotComplete(format!(
                    "wall {shared:?} belongs to {} maximal cones",
                    owners.len()
                )));
            }
            let normal = if shared.is_empty() {
                vec![vec![Rat::one()]]
            } else {
                let m: Mat = shared.iter().map(|&i| rat::to_rat_vec(&rays[i])).collect();
                linalg::kernel_basis(&m)
            };
            if normal.len() != 1 {
                return Err(KernelError::NotComplete(format!("degenerate wall {shared:?}")));
            }
            let mut f = normal[0].clone();
            let (c0, v0) = owners[0];
            let (c1, v1) = owners[1];
            if rat::dot(&f, &rat::to_rat_vec(&rays[v0])).is_negative() {
                f = rat::neg(&f);
            }
            if !rat::dot(&f, &rat::to_rat_vec(&rays[v1])).is_negative() {
                return Err(KernelError::NotComplete(format!(
                    "cones {c0} and {c1} lie on the same side of wall {shared:?}"
                )));
            }
            walls.push(Wall { cones: (c0, c1), opposite: (v0, v1), shared: shared.clone() });
        }
        if max_cones.is_empty() {
            return Err(KernelError::NotComplete("fan has no maximal cones".into()));
        }
        let names = match names {
            Some(ns) => {
                if ns.len() != rays.len() {
                    return Err(KernelError::Invalid("one name per ray required".into()));
                }
                ns
            }
            None => (1..=rays.len()).map(|i| format!("D{i}")).collect(),
        };
        let registry = Registry::new(names)?;
        Ok(ToricVariety { dim, rays, max_cones, registry, walls })
    }

    pub fn ray_index(&self, name: &str) -> Result<usize, KernelError> {
        self.registry.id_of(name)
    }

    pub fn ray_name(&self, i: usize) -> &str {
        self.registry.name_of(i)
    }

    /// `K = −Σ_ρ D_ρ`.
    pub fn canonical_divisor(&self) -> Divisor {
        let mut k = Divisor::zero(&self.registry);
        for i in 0..self.rays.len() {
            k.set_coeff_id(i, -Rat::one());
        }
        k
    }

    pub fn prime_divisor(&self, name: &str) -> Result<Divisor, KernelError> {
        let id = self.ray_index(name)?;
        let mut d = Divisor::zero(&self.registry);
        d.set_coeff_id(id, Rat::one());
        Ok(d)
    }

    /// Ray coefficients of a divisor, indexed like `rays`.
    pub fn coeff_vec(&self, d: &Divisor) -> RatVec {
        (0..self.rays.len()).map(|i| d.coeff_id(i)).collect()
    }

    pub fn divisor_from_coeffs(&self, coeffs: &[Rat]) -> Divisor {
        let mut d = Divisor::zero(&self.registry);
        for (i, c) in coeffs.iter().enumerate() {
            d.set_coeff_id(i, c.clone());
        }
        d
    }

    /// `{ m : <m, v_ρ> + a_ρ >= 0 }` with the given coefficients.
    fn polytope_from_coeffs(&self, a: &[Rat]) -> HPoly {
        let mut p = HPoly::new(self.dim);
        for (i, v) in self.rays.iter().enumerate() {
            p.add_ineq(rat::to_rat_vec(v), a[i].clone());
        }
        p
    }

    pub fn polytope_real(&self, d: &Divisor) -> HPoly {
        self.polytope_from_coeffs(&self.coeff_vec(d))
    }

    pub fn polytope_floor(&self, d: &Divisor) -> HPoly {
        let a: RatVec =
            self.coeff_vec(d).iter().map(|c| Rat::from(c.floor().to_integer())).collect();
        self.polytope_from_coeffs(&a)
    }

    /// `H⁰(X, O(⌊d⌋))`, as the sorted lattice points of the polytope.
    pub fn sections(&self, d: &Divisor) -> Result<SectionSpace, KernelError> {
        let monomials = self.polytope_floor(d).lattice_points()?;
        Ok(SectionSpace { divisor: d.clone(), monomials })
    }

    /// Divisor multiplicity vector of the section `χ^m` of `d`:
    /// `(<m, v_ρ> + a_ρ)_ρ`. Canonical under translating `m`, so it is
    /// the right shape for comparing linear systems.
    pub fn multiplicity_vector(&self, d: &Divisor, m: &IntVec) -> RatVec {
        self.rays
            .iter()
            .enumerate()
            .map(|(i, v)| Rat::from(rat::dot_int(v, m)) + d.coeff_id(i))
            .collect()
    }

    /// `div(χ^m) = Σ <m, v_ρ> D_ρ`.
    pub fn principal_divisor(&self, m: &IntVec) -> Divisor {
        let mut d = Divisor::zero(&self.registry);
        for (i, v) in self.rays.iter().enumerate() {
            d.set_coeff_id(i, Rat::from(rat::dot_int(v, m)));
        }
        d
    }

    /// The `m` with `d1 = d2 + div(χ^m)`, when the difference is principal.
    pub fn linear_equivalence(&self, d1: &Divisor, d2: &Divisor) -> Option<IntVec> {
        let diff = rat::sub(&self.coeff_vec(d1), &self.coeff_vec(d2));
        let mat: Mat = self.rays.iter().map(|v| rat::to_rat_vec(v)).collect();
        let m = linalg::solve(&mat, &diff)?;
        rat::to_int_vec(&m)
    }

    /// Fixed and mobile part of `|d|`: the fixed multiplicity along
    /// `D_ρ` is the minimum of `<m, v_ρ> + a_ρ` over the monomials.
    pub fn fix_mob(&self, d: &Divisor) -> Result<(Divisor, Divisor), KernelError> {
        let s = self.sections(d)?;
        if s.is_empty() {
            return Err(KernelError::EmptySystem);
        }
        let mut fix = Divisor::zero(&self.registry);
        for (i, v) in self.rays.iter().enumerate() {
            let a = d.coeff_id(i);
            let mult = s
                .monomials
                .iter()
                .map(|m| Rat::from(rat::dot_int(v, m)) + &a)
                .min()
                .unwrap();
            fix.set_coeff_id(i, mult);
        }
        let mob = d.sub(&fix);
        Ok((fix, mob))
    }

    /// On a complete toric variety pseudo-effectivity is exactly the
    /// non-emptiness of the real divisor polytope.
    pub fn pseudo_effective(&self, d: &Divisor) -> bool {
        !self.polytope_real(d).is_empty()
    }

    pub fn stable_base_locus(&self, d: &Divisor) -> SblReport {
        self.stable_base_locus_with(d, DEFAULT_LADDER_MAX)
    }

    pub fn stable_base_locus_with(&self, d: &Divisor, n_max: u32) -> SblReport {
        let step = rat::denominator_lcm(&self.coeff_vec(d));
        let mut inter: Option<Vec<usize>> = None;
        let mut history: Vec<Vec<usize>> = Vec::new();
        let mut any_nonempty = false;
        for n in 1..=n_max {
            let p = Rat::from(&step * Int::from(n));
            let pd = d.scale(&p);
            let s = self.sections(&pd).expect("complete fan gives bounded polytopes");
            if s.is_empty() {
                continue;
            }
            any_nonempty = true;
            let mut comps = Vec::new();
            for (i, v) in self.rays.iter().enumerate() {
                let a = pd.coeff_id(i);
                let mult = s
                    .monomials
                    .iter()
                    .map(|m| Rat::from(rat::dot_int(v, m)) + &a)
                    .min()
                    .unwrap();
                if mult.is_positive() {
                    comps.push(i);
                }
            }
            let next = match &inter {
                None => comps,
                Some(cur) => cur.iter().filter(|i| comps.contains(i)).copied().collect(),
            };
            history.push(next.clone());
            inter = Some(next);
        }
        if !any_nonempty {
            return SblReport {
                components: vec![],
                is_empty: false,
                whole_x: true,
                stabilized: true,
                deeper_strata_computed: false,
            };
        }
        let comps = inter.unwrap();
        let h = history.len();
        let stabilized = h >= 3 && history[h - 1] == history[h - 2] && history[h - 2] == history[h - 3];
        SblReport {
            components: comps.iter().map(|&i| self.ray_name(i).to_string()).collect(),
            is_empty: comps.is_empty(),
            whole_x: false,
            stabilized,
            deeper_strata_computed: false,
        }
    }

    /// Asymptotic fixed part multiplicities by exact linear programming
    /// over the real divisor polytope.
    fn asymptotic_fixed_lp(&self, d: &Divisor) -> Result<Divisor, KernelError> {
        let p = self.polytope_real(d);
        let mut f = Divisor::zero(&self.registry);
        for (i, v) in self.rays.iter().enumerate() {
            match p.minimize(&rat::to_rat_vec(v)) {
                LpResult::Optimal { value, .. } => {
                    f.set_coeff_id(i, value + d.coeff_id(i));
                }
                LpResult::Infeasible => return Err(KernelError::NotPseudoEffective),
                LpResult::Unbounded => unreachable!("divisor polytopes are bounded"),
            }
        }
        Ok(f)
    }

    /// `𝐅(d) = inf (1/n) Fix(nd)`, computed by the LP formula and
    /// cross-validated against the stabilization ladder (with an
    /// ε-perturbation ladder as fallback on the boundary).
    pub fn asymptotic_fixed(&self, d: &Divisor) -> Result<Divisor, KernelError> {
        self.asymptotic_fixed_with(d, DEFAULT_LADDER_MAX)
    }

    pub fn asymptotic_fixed_with(&self, d: &Divisor, n_max: u32) -> Result<Divisor, KernelError> {
        if !self.pseudo_effective(d) {
            return Err(KernelError::NotPseudoEffective);
        }
        let lp = self.asymptotic_fixed_lp(d)?;
        // Ladder: (1/n) Fix(nd) over integral multiples.
        let step = rat::denominator_lcm(&self.coeff_vec(d));
        let mut streak = 0;
        for n in 1..=n_max {
            let p = Rat::from(&step * Int::from(n));
            let pd = d.scale(&p);
            let Ok((fix, _)) = self.fix_mob(&pd) else { continue };
            if fix.scale(&p.recip()) == lp {
                streak += 1;
                if streak >= 3 {
                    return Ok(lp);
                }
            } else {
                streak = 0;
            }
        }
        // Boundary fallback: 𝐅(d) = lim 𝐅(d + εA) with A = Σ D_ρ. The
        // perturbed value is linear in ε for small ε; extrapolate to 0
        // from two steps and confirm with a third.
        let ample: Divisor = {
            let mut a = Divisor::zero(&self.registry);
            for i in 0..self.rays.len() {
                a.set_coeff_id(i, Rat::one());
            }
            a
        };
        let value_at = |eps: &Rat| -> Result<RatVec, KernelError> {
            let de = d.add(&ample.scale(eps));
            Ok(self.coeff_vec(&self.asymptotic_fixed_lp(&de)?))
        };
        let mut eps = Rat::one();
        let half = rat::rat(1, 2);
        for _ in 0..8 {
            let e1 = eps.clone();
            let e2 = &eps * &half;
            let e3 = &e2 * &half;
            let (f1, f2, f3) = (value_at(&e1)?, value_at(&e2)?, value_at(&e3)?);
            let extrap = |fa: &RatVec, fb: &RatVec, ea: &Rat, eb: &Rat| -> RatVec {
                // Line through (ea, fa), (eb, fb) evaluated at 0.
                let den = ea - eb;
                fa.iter()
                    .zip(fb)
                    .map(|(x, y)| {
                        let slope = (x - y) / &den;
                        y - &slope * eb
                    })
                    .collect()
            };
            let g12 = extrap(&f1, &f2, &e1, &e2);
            let g23 = extrap(&f2, &f3, &e2, &e3);
            if g12 == g23 {
                if self.divisor_from_coeffs(&g12) == lp {
                    return Ok(lp);
                }
                return Err(KernelError::Invalid(
                    "asymptotic fixed part ladder disagrees with the LP value".into(),
                ));
            }
            eps = e3;
        }
        Err(KernelError::Invalid("asymptotic fixed part did not stabilize".into()))
    }

    /// The unique `m_σ` with `<m_σ, v_ρ> = −a_ρ` on each maximal cone.
    fn cone_support_point(&self, cone: usize, a: &[Rat]) -> RatVec {
        let idx = &self.max_cones[cone];
        let mat: Mat = idx.iter().map(|&i| rat::to_rat_vec(&self.rays[i])).collect();
        let rhs: RatVec = idx.iter().map(|&i| -a[i].clone()).collect();
        linalg::solve(&mat, &rhs).expect("unimodular cone system")
    }

    /// Strict convexity of the support function across every wall.
    pub fn is_ample(&self, d: &Divisor) -> bool {
        let a = self.coeff_vec(d);
        self.walls.iter().all(|w| {
            let m = self.cone_support_point(w.cones.0, &a);
            let v = &self.rays[w.opposite.1];
            (rat::dot(&m, &rat::to_rat_vec(v)) + &a[w.opposite.1]).is_positive()
        })
    }

    pub fn is_nef(&self, d: &Divisor) -> bool {
        let a = self.coeff_vec(d);
        self.walls.iter().all(|w| {
            let m = self.cone_support_point(w.cones.0, &a);
            let v = &self.rays[w.opposite.1];
            !(rat::dot(&m, &rat::to_rat_vec(v)) + &a[w.opposite.1]).is_negative()
        })
    }

    /// Ampleness for divisors with coefficients in one quadratic field:
    /// the linear solves split into rational solves for the rational
    /// and irrational parts, and each wall inequality is an exact sign
    /// test in ℚ(√d).
    pub fn is_ample_quad(&self, qd: &QuadDivisor) -> bool {
        let n = self.rays.len();
        let a_part: RatVec = (0..n).map(|i| qd.coeff_id(i).a).collect();
        let b_part: RatVec = (0..n).map(|i| qd.coeff_id(i).b).collect();
        self.walls.iter().all(|w| {
            let ma = self.cone_support_point(w.cones.0, &a_part);
            let mb = self.cone_support_point(w.cones.0, &b_part);
            let v = rat::to_rat_vec(&self.rays[w.opposite.1]);
            let q = QuadExt {
                d: qd.d,
                a: rat::dot(&ma, &v) + &a_part[w.opposite.1],
                b: rat::dot(&mb, &v) + &b_part[w.opposite.1],
            };
            q.is_positive()
        })
    }
}
