//! Small standard varieties used by tests, benchmarks, and the CLI's
//! bundled instances.

use crate::rat::int_vec;
use crate::toric::ToricVariety;

/// ℙ¹: rays ±1.
pub fn p1() -> ToricVariety {
    ToricVariety::new(1, vec![int_vec(&[1]), int_vec(&[-1])], vec![vec![0], vec![1]]).unwrap()
}

/// ℙ²: rays (1,0), (0,1), (−1,−1); `D3` is a line.
pub fn p2() -> ToricVariety {
    ToricVariety::new(
        2,
        vec![int_vec(&[1, 0]), int_vec(&[0, 1]), int_vec(&[-1, -1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
    )
    .unwrap()
}

/// The Hirzebruch surface F₁ (ℙ² blown up in a point): rays (1,0),
/// (0,1), (−1,1), (0,−1); `D2` is the −1-curve.
pub fn f1() -> ToricVariety {
    ToricVariety::new(
        2,
        vec![int_vec(&[1, 0]), int_vec(&[0, 1]), int_vec(&[-1, 1]), int_vec(&[0, -1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .unwrap()
}

/// ℙ¹×ℙ¹.
pub fn p1xp1() -> ToricVariety {
    ToricVariety::new(
        2,
        vec![int_vec(&[1, 0]), int_vec(&[0, 1]), int_vec(&[-1, 0]), int_vec(&[0, -1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .unwrap()
}
