//! Exact rational linear algebra: reduced row echelon form, solving,
//! kernels, and the integer (unimodular) transformations needed for
//! lattice quotients.

use crate::rat::{Int, Rat, RatVec};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix of rationals.
pub type Mat = Vec<RatVec>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(m: &Mat) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// One solution of `a x = b`, if the system is consistent.
pub fn solve(a: &Mat, b: &[Rat]) -> Option<RatVec> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Mat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None; // pivot in the augmented column: inconsistent
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Basis of the right kernel of `a`.
pub fn kernel_basis(a: &Mat) -> Vec<RatVec> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut w = a.clone();
    let pivots = rref(&mut w);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -w[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn det(a: &Mat) -> Rat {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n));
    let mut w = a.clone();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !w[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            w.swap(c, p);
            d = -d;
        }
        d = &d * &w[c][c];
        let inv = w[c][c].recip();
        for i in c + 1..n {
            if !w[i][c].is_zero() {
                let f = &w[i][c] * &inv;
                for j in c..n {
                    let t = &w[c][j] * &f;
                    w[i][j] = &w[i][j] - &t;
                }
            }
        }
    }
    d
}

/// Inverse of a square matrix, if it is nonsingular.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n));
    let mut aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    // Nonsingular iff the pivots are exactly the left-block columns.
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(a: &Mat, x: &[Rat]) -> RatVec {
    a.iter().map(|row| crate::rat::dot(row, x)).collect()
}

pub fn transpose(a: &Mat) -> Mat {
    if a.is_empty() {
        return vec![];
    }
    let cols = a[0].len();
    (0..cols).map(|c| a.iter().map(|r| r[c].clone()).collect()).collect()
}

/// Rows of a unimodular integer matrix `U` with `U v = e_1`, for a
/// primitive integer vector `v`. Row 1 pairs to 1 with `v`; rows 2..n
/// are a basis of the sublattice orthogonal to `v`.
pub fn unimodular_completion(v: &[Int]) -> Result<Vec<Vec<Int>>, crate::error::KernelError> {
    let n = v.len();
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g != Int::one() {
        return Err(crate::error::KernelError::Invalid(format!(
            "vector is not primitive (gcd {g})"
        )));
    }
    // Maintain u (n x n unimodular) and w = U v; reduce w to e_1 by
    // integer row operations.
    let mut u: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let mut w: Vec<Int> = v.to_vec();
    loop {
        // Pick the entry of smallest nonzero absolute value.
        let piv = (0..n)
            .filter(|&i| !w[i].is_zero())
            .min_by_key(|&i| w[i].abs())
            .expect("primitive vector is nonzero");
        let mut done = true;
        for i in 0..n {
            if i == piv || w[i].is_zero() {
                continue;
            }
            let q = w[i].div_floor(&w[piv]);
            if !q.is_zero() {
                w[i] = &w[i] - &q * &w[piv];
                let sub: Vec<Int> = u[piv].iter().map(|x| &q * x).collect();
                for (a, b) in u[i].iter_mut().zip(sub) {
                    *a -= b;
                }
            }
            if !w[i].is_zero() {
                done = false;
            }
        }
        if done {
            // Move the pivot into slot 0 with positive sign.
            if w[piv].is_negative() {
                w[piv] = -w[piv].clone();
                for x in u[piv].iter_mut() {
                    *x = -x.clone();
                }
            }
            u.swap(0, piv);
            w.swap(0, piv);
            debug_assert_eq!(w[0], Int::one());
            return Ok(u);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{dot_int, int_vec, rat_i, vec_i};

    #[test]
    fn solve_and_kernel() {
        let a = vec![vec_i(&[1, 2]), vec_i(&[2, 4])];
        let x = solve(&a, &vec_i(&[3, 6])).unwrap();
        assert_eq!(crate::rat::dot(&a[0], &x), rat_i(3));
        assert!(solve(&a, &vec_i(&[3, 5])).is_none());
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(crate::rat::dot(&a[0], &k[0]), rat_i(0));
    }

    #[test]
    fn det_sign_and_value() {
        assert_eq!(det(&vec![vec_i(&[1, 2]), vec_i(&[3, 4])]), rat_i(-2));
        assert_eq!(det(&vec![vec_i(&[2, 0]), vec_i(&[0, 3])]), rat_i(6));
    }

    #[test]
    fn completion_pairs_correctly() {
        for v in [int_vec(&[2, 3]), int_vec(&[-1, 1, 0]), int_vec(&[5, 7, 9])] {
            let u = unimodular_completion(&v).unwrap();
            for (i, row) in u.iter().enumerate() {
                let p = dot_int(row, &v);
                assert_eq!(p, Int::from(if i == 0 { 1 } else { 0 }));
            }
            // Unimodularity.
            let m: Mat = u
                .iter()
                .map(|r| r.iter().map(|x| Rat::from(x.clone())).collect())
                .collect();
            assert_eq!(det(&m).numer().abs(), Int::one());
        }
    }
}
