//! Restriction of linear systems to an invariant prime divisor `S`:
//! the star variety, exact monomial projection, and the restricted
//! asymptotic fixed part.

use crate::divisor::Divisor;
use crate::error::KernelError;
use crate::linalg::{self, Mat};
use crate::rat::{self, Int, IntVec, Rat, RatVec};
use crate::toric::{ToricVariety, DEFAULT_LADDER_MAX};
use num_traits::{Signed, Zero};

/// The star of a ray, set up once per `(X, S)` pair: `S` as a smooth
/// complete toric variety together with the exact lattice bookkeeping
/// needed to project monomials.
#[derive(Clone, Debug)]
pub struct BoundaryRestriction {
    /// Ray index of `S` in the parent.
    pub parent_ray: usize,
    /// The star variety; its prime divisors carry the parent ray names.
    pub variety: ToricVariety,
    /// Parent ray index for each ray of the star variety.
    pub adjacent: Vec<usize>,
    /// Rows of a unimodular `U` with `U·v_S = e₁`; rows 2.. are a basis
    /// of `v_S^⊥ ∩ M` used as coordinates on `S`.
    u: Vec<IntVec>,
    u_inv: Mat,
}

/// `|d|_S` together with the honestly restricted divisor.
#[derive(Clone, Debug)]
pub struct RestrictedSystem {
    /// Monomials of the image of `H⁰(X, d) → H⁰(S, d|_S)`, in the
    /// star coordinates.
    pub monomials: Vec<IntVec>,
    /// `d|_S` after the canonical principal shift that clears the
    /// coefficient along `S`.
    pub divisor: Divisor,
}

impl ToricVariety {
    pub fn boundary_restriction(&self, s: &str) -> Result<BoundaryRestriction, KernelError> {
        let parent_ray = self.ray_index(s)?;
        if self.dim < 2 {
            return Err(KernelError::Invalid("restriction needs dimension at least 2".into()));
        }
        let v = &self.rays[parent_ray];
        let u = linalg::unimodular_completion(v)?;
        let u_mat: Mat = u.iter().map(|r| rat::to_rat_vec(r)).collect();
        let u_inv = linalg::inverse(&u_mat).expect("unimodular matrix");
        // Quotient coordinates of a lattice point of N: tail of U·n.
        let quot = |n: &IntVec| -> IntVec {
            (1..self.dim).map(|i| rat::dot_int(&u[i], n)).collect()
        };
        let mut star_rays: Vec<IntVec> = Vec::new();
        let mut adjacent: Vec<usize> = Vec::new();
        let mut star_cones: Vec<Vec<usize>> = Vec::new();
        for c in &self.max_cones {
            if !c.contains(&parent_ray) {
                continue;
            }
            let mut cone = Vec::new();
            for &ri in c {
                if ri == parent_ray {
                    continue;
                }
                let p = quot(&self.rays[ri]);
                let idx = match star_rays.iter().position(|r| *r == p) {
                    Some(i) => {
                        if adjacent[i] != ri {
                            return Err(KernelError::Invalid(
                                "two parent rays project to the same star ray".into(),
                            ));
                        }
                        i
                    }
                    None => {
                        star_rays.push(p);
                        adjacent.push(ri);
                        star_rays.len() - 1
                    }
                };
                cone.push(idx);
            }
            star_cones.push(cone);
        }
        let names: Vec<String> =
            adjacent.iter().map(|&ri| self.ray_name(ri).to_string()).collect();
        let variety =
            ToricVariety::with_names(self.dim - 1, star_rays, star_cones, Some(names))?;
        Ok(BoundaryRestriction { parent_ray, variety, adjacent, u, u_inv })
    }
}

impl BoundaryRestriction {
    /// Star coordinates of a parent monomial on the `S`-facet, after
    /// the principal shift by `m* = −a₀·u₁`.
    fn project_monomial(&self, m: &IntVec, m_star: &IntVec) -> IntVec {
        let diff: RatVec =
            m.iter().zip(m_star).map(|(a, b)| Rat::from(a - b)).collect();
        // Coordinates in the row basis of U: a = diff · U⁻¹.
        let coords: RatVec = (0..self.u.len())
            .map(|j| {
                diff.iter()
                    .enumerate()
                    .map(|(i, x)| x * &self.u_inv[i][j])
                    .sum()
            })
            .collect();
        debug_assert!(coords[0].is_zero(), "monomial is off the facet");
        coords[1..]
            .iter()
            .map(|x| {
                debug_assert!(x.is_integer());
                x.to_integer()
            })
            .collect()
    }

    /// The image of `H⁰(X, ⌊d⌋)` on `S` and the restricted divisor.
    pub fn restrict_system(
        &self,
        x: &ToricVariety,
        d: &Divisor,
    ) -> Result<RestrictedSystem, KernelError> {
        let df = d.floor_divisor();
        let a0 = df.coeff_id(self.parent_ray);
        debug_assert!(a0.is_integer());
        let a0 = a0.to_integer();
        // m* has <m*, v_S> = −a0, clearing the S-coefficient.
        let m_star: IntVec = self.u[0].iter().map(|c| -&a0 * c).collect();
        let mut divisor = Divisor::zero(&self.variety.registry);
        for (si, &ri) in self.adjacent.iter().enumerate() {
            let c = df.coeff_id(ri) + Rat::from(rat::dot_int(&m_star, &x.rays[ri]));
            divisor.set_coeff_id(si, c);
        }
        let sections = x.sections(&df)?;
        let mut monomials: Vec<IntVec> = sections
            .monomials
            .iter()
            .filter(|m| {
                (Rat::from(rat::dot_int(&x.rays[self.parent_ray], m)) + Rat::from(a0.clone()))
                    .is_zero()
            })
            .map(|m| self.project_monomial(m, &m_star))
            .collect();
        monomials.sort();
        monomials.dedup();
        // Every projected monomial is a section of the restricted divisor.
        debug_assert!(monomials.iter().all(|mb| {
            self.variety
                .multiplicity_vector(&divisor, mb)
                .iter()
                .all(|t| !t.is_negative())
        }));
        Ok(RestrictedSystem { monomials, divisor })
    }

    fn fix_of_restricted(&self, sys: &RestrictedSystem) -> Option<Divisor> {
        if sys.monomials.is_empty() {
            return None;
        }
        let mut fix = Divisor::zero(&self.variety.registry);
        for (i, n) in self.variety.rays.iter().enumerate() {
            let a = sys.divisor.coeff_id(i);
            let mult = sys
                .monomials
                .iter()
                .map(|m| Rat::from(rat::dot_int(n, m)) + &a)
                .min()
                .unwrap();
            fix.set_coeff_id(i, mult);
        }
        Some(fix)
    }

    /// `𝐅_S(d) = inf (1/n) Fix |nd|_S` by the stabilization ladder.
    pub fn restricted_asymptotic_fixed(
        &self,
        x: &ToricVariety,
        d: &Divisor,
        n_max: u32,
    ) -> Result<Divisor, KernelError> {
        let step = rat::denominator_lcm(&x.coeff_vec(d));
        let mut last: Option<Divisor> = None;
        let mut streak = 0;
        for n in 1..=n_max {
            let p = Rat::from(&step * Int::from(n));
            let sys = self.restrict_system(x, &d.scale(&p))?;
            let Some(fix) = self.fix_of_restricted(&sys) else { continue };
            let val = fix.scale(&p.recip());
            match &last {
                Some(prev) if *prev == val => streak += 1,
                _ => streak = 0,
            }
            last = Some(val);
            if streak >= 2 {
                return Ok(last.unwrap());
            }
        }
        Err(KernelError::Invalid(
            "restricted asymptotic fixed part did not stabilize".into(),
        ))
    }
}

/// Restriction of `|d|` to the prime divisor `s`: the restricted
/// monomial set and the restricted asymptotic fixed part `𝐅_S(d)`.
pub fn restrict_sections(
    x: &ToricVariety,
    s: &str,
    d: &Divisor,
) -> Result<(RestrictedSystem, Divisor), KernelError> {
    let sbl = x.stable_base_locus(d);
    if sbl.whole_x || sbl.components.iter().any(|c| c == s) {
        return Err(KernelError::InBaseLocus(s.to_string()));
    }
    let br = x.boundary_restriction(s)?;
    let sys = br.restrict_system(x, d)?;
    let f_s = br.restricted_asymptotic_fixed(x, d, DEFAULT_LADDER_MAX)?;
    Ok((sys, f_s))
}
