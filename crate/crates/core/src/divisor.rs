//! Formal divisors: finite rational combinations of named prime
//! divisors, with names interned in a per-instance registry so that
//! divisors from different varieties cannot be mixed.

use crate::error::KernelError;
use crate::quad::QuadExt;
use crate::rat::{self, Rat};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

static NEXT_REGISTRY_ID: AtomicU64 = AtomicU64::new(0);

/// Interned prime-divisor names for one variety instance.
#[derive(Debug)]
pub struct Registry {
    uid: u64,
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Registry {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Arc<Registry>, KernelError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(KernelError::Invalid(format!("duplicate prime divisor name {n:?}")));
            }
        }
        Ok(Arc::new(Registry {
            uid: NEXT_REGISTRY_ID.fetch_add(1, Ordering::Relaxed),
            names,
            index,
        }))
    }

    pub fn id_of(&self, name: &str) -> Result<usize, KernelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| KernelError::Invalid(format!("unknown prime divisor {name:?}")))
    }

    pub fn name_of(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

fn same_registry(a: &Arc<Registry>, b: &Arc<Registry>) {
    assert_eq!(a.uid, b.uid, "divisors from different registries");
}

/// `Σ c_i E_i` with rational coefficients; zero coefficients are not stored.
#[derive(Clone, Debug)]
pub struct Divisor {
    pub registry: Arc<Registry>,
    coeffs: BTreeMap<usize, Rat>,
}

impl PartialEq for Divisor {
    fn eq(&self, other: &Self) -> bool {
        same_registry(&self.registry, &other.registry);
        self.coeffs == other.coeffs
    }
}

impl Divisor {
    pub fn zero(registry: &Arc<Registry>) -> Divisor {
        Divisor { registry: registry.clone(), coeffs: BTreeMap::new() }
    }

    pub fn from_named(
        registry: &Arc<Registry>,
        entries: &[(&str, Rat)],
    ) -> Result<Divisor, KernelError> {
        let mut d = Divisor::zero(registry);
        for (name, c) in entries {
            let id = registry.id_of(name)?;
            let cur = d.coeffs.entry(id).or_insert_with(Rat::zero);
            *cur = &*cur + c;
        }
        d.normalize();
        Ok(d)
    }

    fn normalize(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    pub fn coeff(&self, name: &str) -> Rat {
        match self.registry.id_of(name) {
            Ok(id) => self.coeffs.get(&id).cloned().unwrap_or_else(Rat::zero),
            Err(_) => Rat::zero(),
        }
    }

    pub fn coeff_id(&self, id: usize) -> Rat {
        self.coeffs.get(&id).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set_coeff_id(&mut self, id: usize, c: Rat) {
        if c.is_zero() {
            self.coeffs.remove(&id);
        } else {
            self.coeffs.insert(id, c);
        }
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|c| c.is_positive())
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        same_registry(&self.registry, &other.registry);
        let mut out = self.clone();
        for (&id, c) in &other.coeffs {
            let cur = out.coeffs.entry(id).or_insert_with(Rat::zero);
            *cur = &*cur + c;
        }
        out.normalize();
        out
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.scale(&-Rat::from(rat::Int::from(1))))
    }

    pub fn scale(&self, t: &Rat) -> Divisor {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = &*c * t;
        }
        out.normalize();
        out
    }

    /// Coefficientwise minimum over the union of supports.
    pub fn wedge(&self, other: &Divisor) -> Divisor {
        same_registry(&self.registry, &other.registry);
        let mut out = Divisor::zero(&self.registry);
        let ids: Vec<usize> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        for id in ids {
            let a = self.coeff_id(id);
            let b = other.coeff_id(id);
            out.set_coeff_id(id, if a <= b { a } else { b });
        }
        out
    }

    pub fn floor_divisor(&self) -> Divisor {
        let mut out = Divisor::zero(&self.registry);
        for (&id, c) in &self.coeffs {
            out.set_coeff_id(id, c.floor());
        }
        out
    }

    /// `self <= other` coefficientwise.
    pub fn le(&self, other: &Divisor) -> bool {
        same_registry(&self.registry, &other.registry);
        let ids: Vec<usize> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        ids.iter().all(|&id| self.coeff_id(id) <= other.coeff_id(id))
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (&id, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", rat::format_rat(c), self.registry.name_of(id))?;
        }
        Ok(())
    }
}

/// A divisor with coefficients in one quadratic field, used when
/// boundaries are evaluated at irrational points.
#[derive(Clone, Debug)]
pub struct QuadDivisor {
    pub registry: Arc<Registry>,
    pub d: u64,
    coeffs: BTreeMap<usize, QuadExt>,
}

impl QuadDivisor {
    pub fn zero(registry: &Arc<Registry>, d: u64) -> QuadDivisor {
        QuadDivisor { registry: registry.clone(), d, coeffs: BTreeMap::new() }
    }

    pub fn from_divisor(div: &Divisor, d: u64) -> QuadDivisor {
        let mut out = QuadDivisor::zero(&div.registry, d);
        for (id, c) in div.iter() {
            out.coeffs.insert(id, QuadExt::from_rat(d, c.clone()));
        }
        out
    }

    pub fn coeff_id(&self, id: usize) -> QuadExt {
        self.coeffs.get(&id).cloned().unwrap_or_else(|| QuadExt::from_rat(self.d, Rat::zero()))
    }

    pub fn set_coeff_id(&mut self, id: usize, c: QuadExt) {
        if c.is_zero() {
            self.coeffs.remove(&id);
        } else {
            self.coeffs.insert(id, c);
        }
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn add(&self, other: &QuadDivisor) -> QuadDivisor {
        same_registry(&self.registry, &other.registry);
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (&id, c) in &other.coeffs {
            let cur = out.coeff_id(id);
            out.set_coeff_id(id, cur + c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QuadDivisor) -> QuadDivisor {
        self.add(&other.scale(&QuadExt::from_rat(self.d, -Rat::from(rat::Int::from(1)))))
    }

    pub fn scale(&self, t: &QuadExt) -> QuadDivisor {
        let mut out = QuadDivisor::zero(&self.registry, self.d);
        for (&id, c) in &self.coeffs {
            out.set_coeff_id(id, c * t);
        }
        out
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|c| c.sign() != std::cmp::Ordering::Less)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact when every coefficient is rational.
    pub fn to_divisor(&self) -> Option<Divisor> {
        let mut out = Divisor::zero(&self.registry);
        for (&id, c) in &self.coeffs {
            out.set_coeff_id(id, c.rational_part()?);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    fn reg() -> Arc<Registry> {
        Registry::new(vec!["P", "Q"]).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let r = reg();
        let d1 = Divisor::from_named(&r, &[("P", rat_i(2)), ("Q", rat_i(3))]).unwrap();
        let d2 = Divisor::from_named(&r, &[("P", rat_i(1)), ("Q", rat_i(5))]).unwrap();
        let w = d1.wedge(&d2);
        assert_eq!(w, Divisor::from_named(&r, &[("P", rat_i(1)), ("Q", rat_i(3))]).unwrap());
        assert_eq!(d1.wedge(&d1), d1);
        let p = Divisor::from_named(&r, &[("P", rat_i(1))]).unwrap();
        let q = Divisor::from_named(&r, &[("Q", rat_i(1))]).unwrap();
        assert!(p.wedge(&q).is_zero());
    }

    #[test]
    fn wedge_laws() {
        let r = reg();
        let a = Divisor::from_named(&r, &[("P", rat(1, 2)), ("Q", rat_i(-1))]).unwrap();
        let b = Divisor::from_named(&r, &[("P", rat(2, 3))]).unwrap();
        let c = Divisor::from_named(&r, &[("Q", rat_i(4))]).unwrap();
        assert_eq!(a.wedge(&b), b.wedge(&a));
        assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
        assert!(a.wedge(&b).le(&a) && a.wedge(&b).le(&b));
    }

    #[test]
    fn floor_examples() {
        let r = reg();
        let d = Divisor::from_named(&r, &[("P", rat(3, 2)), ("Q", rat(-1, 2))]).unwrap();
        assert_eq!(
            d.floor_divisor(),
            Divisor::from_named(&r, &[("P", rat_i(1)), ("Q", rat_i(-1))]).unwrap()
        );
        let e = Divisor::from_named(&r, &[("P", rat(9, 10))]).unwrap();
        assert!(e.floor_divisor().is_zero());
        let int = Divisor::from_named(&r, &[("P", rat_i(4))]).unwrap();
        assert_eq!(int.floor_divisor(), int);
    }

    #[test]
    #[should_panic(expected = "different registries")]
    fn registries_do_not_mix() {
        let r1 = reg();
        let r2 = reg();
        let d1 = Divisor::from_named(&r1, &[("P", rat_i(1))]).unwrap();
        let d2 = Divisor::from_named(&r2, &[("P", rat_i(1))]).unwrap();
        let _ = d1.add(&d2);
    }

    #[test]
    fn quad_divisor_round_trip() {
        let r = reg();
        let d = Divisor::from_named(&r, &[("P", rat(1, 2))]).unwrap();
        let qd = QuadDivisor::from_divisor(&d, 2);
        assert_eq!(qd.to_divisor().unwrap(), d);
        let s = qd.scale(&QuadExt::sqrt_d(2).unwrap());
        assert!(s.to_divisor().is_none());
        assert!(s.is_effective());
    }
}
