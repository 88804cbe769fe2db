//! Rationally defined affine subspaces and the rational affine hull of
//! a point with coordinates in one quadratic field.

use crate::quad::QuadVec;
use crate::rat::{self, Rat, RatVec};
use num_traits::Zero;

/// `base_point + span(direction_basis)` with rational data.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspaceQ {
    pub base_point: RatVec,
    pub direction_basis: Vec<RatVec>,
}

impl AffineSubspaceQ {
    pub fn dim(&self) -> usize {
        self.direction_basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base_point.len()
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        // p - base must solve  B^T t = p - base.
        let diff = rat::sub(p, &self.base_point);
        if self.direction_basis.is_empty() {
            return rat::is_zero_vec(&diff);
        }
        let dim = self.base_point.len();
        let mat: Vec<RatVec> = (0..dim)
            .map(|c| self.direction_basis.iter().map(|b| b[c].clone()).collect())
            .collect();
        crate::linalg::solve(&mat, &diff).is_some()
    }

    /// The point `base + Σ t_i b_i`.
    pub fn point_at(&self, t: &[Rat]) -> RatVec {
        assert_eq!(t.len(), self.direction_basis.len());
        let mut p = self.base_point.clone();
        for (ti, b) in t.iter().zip(&self.direction_basis) {
            p = rat::add(&p, &rat::scale(ti, b));
        }
        p
    }
}

/// Smallest rationally defined affine subspace containing `x`.
///
/// Writing `x = a + b√d` coordinatewise, a rational equation
/// `c·y = c₀` holds at `x` exactly when `c·a = c₀` and `c·b = 0`, so
/// the hull is `a + span(b)`: the point `a` when `x` is rational, a
/// line otherwise.
pub fn rational_affine_hull(x: &QuadVec) -> AffineSubspaceQ {
    let a = x.rational_parts();
    let b = x.irrational_parts();
    if b.iter().all(|t| t.is_zero()) {
        AffineSubspaceQ { base_point: a, direction_basis: vec![] }
    } else {
        AffineSubspaceQ { base_point: a, direction_basis: vec![b] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    #[test]
    fn rational_point_is_its_own_hull() {
        let x = QuadVec::from_rational(&[rat(3, 7), rat(2, 7)]);
        let u = rational_affine_hull(&x);
        assert_eq!(u.dim(), 0);
        assert_eq!(u.base_point, vec![rat(3, 7), rat(2, 7)]);
    }

    #[test]
    fn sqrt2_point_on_the_line_x_plus_y_is_1() {
        // x = (√2/2, 1 − √2/2)
        let x = QuadVec::new(
            2,
            vec![(rat_i(0), rat(1, 2)), (rat_i(1), rat(-1, 2))],
        )
        .unwrap();
        let u = rational_affine_hull(&x);
        assert_eq!(u.dim(), 1);
        // The hull is {(t, 1−t)}.
        assert!(u.contains(&[rat_i(0), rat_i(1)]));
        assert!(u.contains(&[rat(1, 3), rat(2, 3)]));
        assert!(!u.contains(&[rat_i(0), rat_i(0)]));
    }

    #[test]
    fn proportional_sqrt2_coordinates() {
        // x = (√2/2, √2/3): the hull is the line x₂ = (2/3)x₁.
        let x = QuadVec::new(
            2,
            vec![(rat_i(0), rat(1, 2)), (rat_i(0), rat(1, 3))],
        )
        .unwrap();
        let u = rational_affine_hull(&x);
        assert_eq!(u.dim(), 1);
        assert!(u.contains(&[rat_i(3), rat_i(2)]));
        assert!(u.contains(&[rat_i(0), rat_i(0)]));
        assert!(!u.contains(&[rat_i(1), rat_i(1)]));
    }

    #[test]
    fn hull_is_idempotent_on_rational_points() {
        let x = QuadVec::new(
            2,
            vec![(rat_i(0), rat(1, 2)), (rat_i(1), rat(-1, 2))],
        )
        .unwrap();
        let u = rational_affine_hull(&x);
        for t in [rat_i(0), rat(1, 7), rat_i(-3)] {
            let p = u.point_at(&[t]);
            let hull_p = rational_affine_hull(&QuadVec::from_rational(&p));
            assert!(u.contains(&hull_p.base_point));
        }
    }
}
