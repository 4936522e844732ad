//! The curvature-like bracket `[K,K](X,Y)Z = K(X, K(Y,Z)) − K(Y, K(X,Z))`.

use nalgebra::{DMatrix, DVector};

use crate::metric_geometry::{apply4, CurvatureSymmetries};
use crate::tensor::{Tensor3, Tensor4};

/// `[K,K](X,Y)Z` evaluated directly on vectors.
pub fn kk_bracket(
    k: &Tensor3,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    k.apply(x, &k.apply(y, z)) - k.apply(y, &k.apply(x, z))
}

/// Components of `[K,K]` in the curvature layout: `t[(i, j, k, l)]` is the
/// i-component of `[K,K](∂k, ∂l)∂j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KKBracketAtPoint(pub Tensor4);

impl KKBracketAtPoint {
    pub fn of(k: &Tensor3) -> KKBracketAtPoint {
        KKBracketAtPoint(kk_tensor(k))
    }

    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        apply4(&self.0, x, y, z)
    }

    pub fn symmetries(&self, g: &DMatrix<f64>) -> CurvatureSymmetries {
        CurvatureSymmetries::of(&self.0, g)
    }
}

pub fn kk_tensor(k: &Tensor3) -> Tensor4 {
    let n = k.dim();
    Tensor4::from_fn(n, |i, j, kk, l| {
        (0..n)
            .map(|m| k[(i, kk, m)] * k[(m, l, j)] - k[(i, l, m)] * k[(m, kk, j)])
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::PointFrame;
    use crate::tensor::basis_vector;
    use crate::tensor_core::Point;
    use crate::zoo;

    fn origin_frame(e: zoo::ZooEntry) -> PointFrame {
        e.manifold.frame_at(&Point::from(&[0.0; 3][..])).unwrap()
    }

    #[test]
    fn zero_k_gives_zero() {
        let k = Tensor3::zeros(3);
        let e = basis_vector(3, 0);
        assert_eq!(kk_bracket(&k, &e, &e, &e).amax(), 0.0);
        assert_eq!(kk_tensor(&k).max_abs(), 0.0);
    }

    #[test]
    fn negative_example_bracket() {
        let f = origin_frame(zoo::example_r3_negative());
        let (dx, dy) = (basis_vector(3, 0), basis_vector(3, 1));
        let v = kk_bracket(&f.k, &dx, &dy, &dy);
        assert_eq!(v.as_slice(), &[-1.0, 0.0, 0.0]);
        let t = KKBracketAtPoint::of(&f.k);
        assert_eq!(t.apply(&dx, &dy, &dy), v);
        assert_eq!(t.symmetries(&f.g).max(), 0.0);
    }

    #[test]
    fn flat_example_bracket_vanishes() {
        let f = origin_frame(zoo::example_flat_acs(1).unwrap());
        let frame = f.coordinate_frame();
        for x in &frame {
            for y in &frame {
                for z in &frame {
                    assert_eq!(kk_bracket(&f.k, x, y, z).amax(), 0.0);
                }
            }
        }
        assert_eq!(kk_tensor(&f.k).max_abs(), 0.0);
    }

    #[test]
    fn tensor_matches_vector_path() {
        let f = origin_frame(zoo::example_r3_negative());
        let t = kk_tensor(&f.k);
        let x = DVector::from_vec(vec![0.3, -1.2, 0.7]);
        let y = DVector::from_vec(vec![1.1, 0.4, -0.5]);
        let z = DVector::from_vec(vec![-0.2, 0.9, 2.0]);
        let gap = (apply4(&t, &x, &y, &z) - kk_bracket(&f.k, &x, &y, &z)).amax();
        assert!(gap < 1e-15);
    }
}
