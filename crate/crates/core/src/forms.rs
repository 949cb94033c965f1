//! Differential-form values on explicit tangent frames.

use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use crate::projective::{Bidegree, Point2, C};

/// A bundle-valued form evaluated on an ordered frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Density {
    pub value: C,
    /// Bundle weight in the point variable.
    pub z_bidegree: Bidegree,
    /// Bundle weight in the hyperplane variable.
    pub w_bidegree: Bidegree,
    pub degree: usize,
    /// The vectors the form was evaluated against, as complex components.
    pub frame: Vec<Vec<C>>,
}

/// The four coordinate 1-forms on C^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Covector {
    Dz(usize),
    Dzbar(usize),
}

impl Covector {
    pub fn apply(self, v: &Point2) -> C {
        match self {
            Covector::Dz(j) => v[j],
            Covector::Dzbar(j) => v[j].conj(),
        }
    }
}

/// `(α_1 ∧ ... ∧ α_k)(v_1, ..., v_k) = det[α_a(v_b)]`.
pub fn wedge(covectors: &[Covector], frame: &[Point2]) -> C {
    assert_eq!(covectors.len(), frame.len());
    let k = frame.len();
    let m = DMatrix::from_fn(k, k, |a, b| covectors[a].apply(&frame[b]));
    complex_det(&m)
}

/// Determinant of a generic complex matrix of covector values.
pub fn complex_det(m: &DMatrix<C>) -> C {
    match m.nrows() {
        0 => C::new(1.0, 0.0),
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => m.clone().determinant(),
    }
}

/// `dz1 ∧ dz2` on two vectors.
pub fn dz12(a: &Point2, b: &Point2) -> C {
    a[0] * b[1] - a[1] * b[0]
}

/// Real coordinates `(x1, y1, x2, y2)` of a complex vector.
pub fn to_real(v: &Point2) -> [f64; 4] {
    [v[0].re, v[0].im, v[1].re, v[1].im]
}

/// Real 4x4 determinant with the given vectors as columns.
pub fn real_det(cols: [&Point2; 4]) -> f64 {
    let c: Vec<[f64; 4]> = cols.iter().map(|v| to_real(v)).collect();
    Matrix4::from_fn(|i, j| c[j][i]).determinant()
}

pub fn norm2(v: &Point2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rv(rng: &mut ChaCha8Rng) -> Point2 {
        [random_complex(rng, 1.0), random_complex(rng, 1.0)]
    }

    #[test]
    fn wedge_is_alternating_and_multilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cov = [Covector::Dz(0), Covector::Dzbar(1), Covector::Dz(1)];
        let f = [rv(&mut rng), rv(&mut rng), rv(&mut rng)];
        let v = wedge(&cov, &f);
        let swapped = wedge(&cov, &[f[1], f[0], f[2]]);
        assert!((v + swapped).norm() < 1e-14);
        let scaled = wedge(&cov, &[[f[0][0] * 2.0, f[0][1] * 2.0], f[1], f[2]]);
        assert!((scaled - v * 2.0).norm() < 1e-14);
    }

    #[test]
    fn real_determinant_of_coordinate_frame() {
        let one = C::new(1.0, 0.0);
        let i = C::i();
        let zero = C::new(0.0, 0.0);
        let e = [[one, zero], [i, zero], [zero, one], [zero, i]];
        assert_eq!(real_det([&e[0], &e[1], &e[2], &e[3]]), 1.0);
        assert_eq!(real_det([&e[1], &e[0], &e[2], &e[3]]), -1.0);
        assert_eq!(dz12(&e[0], &e[2]), one);
    }
}
