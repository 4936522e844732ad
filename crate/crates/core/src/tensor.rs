//! Dense component arrays and a small generic matrix inverse.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, DVector};

use crate::tensor_core::Real;

/// Rank-3 component array, `t[(i, j, k)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T = f64> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> Tensor3<T> {
    pub fn zeros(dim: usize) -> Self {
        Tensor3 {
            dim,
            data: vec![T::zero(); dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    data.push(f(i, j, k));
                }
            }
        }
        Tensor3 { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Tensor3<U> {
        Tensor3 {
            dim: self.dim,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Tensor3 {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Tensor3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Contracts the two lower slots with `x` and `y`: `t^i_jk x^j y^k`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |i, _| {
            let mut s = 0.0;
            for j in 0..d {
                if x[j] == 0.0 {
                    continue;
                }
                for k in 0..d {
                    s += self[(i, j, k)] * x[j] * y[k];
                }
            }
            s
        })
    }

    /// Largest `|t^i_jk − t^i_kj|`.
    pub fn lower_asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut m: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..j {
                    m = m.max((self[(i, j, k)] - self[(i, k, j)]).abs());
                }
            }
        }
        m
    }
}

impl<T> Index<(usize, usize, usize)> for Tensor3<T> {
    type Output = T;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &T {
        &self.data[(i * self.dim + j) * self.dim + k]
    }
}

impl<T> IndexMut<(usize, usize, usize)> for Tensor3<T> {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut T {
        &mut self.data[(i * self.dim + j) * self.dim + k]
    }
}

/// Rank-4 component array, `t[(i, j, k, l)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Tensor4 {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Tensor4 { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Tensor4 {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Index<(usize, usize, usize, usize)> for Tensor4 {
    type Output = f64;
    fn index(&self, (i, j, k, l): (usize, usize, usize, usize)) -> &f64 {
        &self.data[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }
}

impl IndexMut<(usize, usize, usize, usize)> for Tensor4 {
    fn index_mut(&mut self, (i, j, k, l): (usize, usize, usize, usize)) -> &mut f64 {
        &mut self.data[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }
}

/// Inverse and determinant of a row-major `n×n` matrix by Gauss–Jordan
/// elimination, pivoting on the primal value.
pub fn invert<T: Real>(m: &[T], n: usize) -> (Option<Vec<T>>, T) {
    let mut a = m.to_vec();
    let mut inv: Vec<T> = (0..n * n)
        .map(|idx| {
            if idx / n == idx % n {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .primal()
                    .abs()
                    .total_cmp(&a[s * n + col].primal().abs())
            })
            .unwrap_or(col);
        if a[pivot * n + col].primal() == 0.0 {
            return (None, T::zero());
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
                inv.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        for c in 0..n {
            a[col * n + c] = a[col * n + c] / p;
            inv[col * n + c] = inv[col * n + c] / p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f.primal() == 0.0 && f == T::zero() {
                continue;
            }
            for c in 0..n {
                a[r * n + c] = a[r * n + c] - f * a[col * n + c];
                inv[r * n + c] = inv[r * n + c] - f * inv[col * n + c];
            }
        }
    }
    (Some(inv), det)
}

/// `g(x, y)` for an evaluated metric.
pub fn inner(g: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x.transpose() * g * y)[(0, 0)]
}

pub fn norm(g: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    inner(g, x, x).max(0.0).sqrt()
}

pub fn basis_vector(dim: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 })
}
