//! Dense row-major matrices over a [`Scalar`].

use std::ops::{Index, IndexMut};

use crate::parallel::Exec;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize, ctx: T::Context) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero_in(ctx); rows * cols],
        }
    }

    pub fn identity(n: usize, ctx: T::Context) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one_in(ctx) } else { T::zero_in(ctx) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Leading `n x m` block.
    pub fn leading(&self, n: usize, m: usize) -> Self {
        Self::from_fn(n.min(self.rows), m.min(self.cols), |i, j| self[(i, j)].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.mul_with(rhs, Exec::Sequential)
    }

    /// Product with rows computed under the given execution strategy.
    pub fn mul_with(&self, rhs: &Self, exec: Exec) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let ctx = self.context_or(rhs);
        let rows = exec.map(self.rows, |i| {
            (0..rhs.cols)
                .map(|j| {
                    let mut acc = T::zero_in(ctx);
                    for k in 0..self.cols {
                        let a = &self[(i, k)];
                        if a.is_exact_zero() {
                            continue;
                        }
                        let b = &rhs[(k, j)];
                        if b.is_exact_zero() {
                            continue;
                        }
                        acc = acc + a.clone() * b.clone();
                    }
                    acc
                })
                .collect::<Vec<_>>()
        });
        Matrix::from_rows_sized(rows, self.rows, rhs.cols)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let ctx = self.context_or(self);
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero_in(ctx);
                for (k, x) in v.iter().enumerate() {
                    acc = acc + self[(i, k)].clone() * x.clone();
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    /// Largest absolute entry, or `None` for an empty matrix.
    pub fn max_abs(&self) -> Option<T> {
        self.data.iter().fold(None, |m, x| {
            let a = x.magnitude();
            match m {
                Some(m) if m >= a => Some(m),
                _ => Some(a),
            }
        })
    }

    fn context_or(&self, other: &Self) -> T::Context {
        self.data
            .first()
            .or(other.data.first())
            .map(Scalar::context)
            .expect("context of an empty matrix")
    }

    fn from_rows_sized(rows: Vec<Vec<T>>, r: usize, c: usize) -> Self {
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn product_and_transpose() {
        let a = Matrix::from_rows(vec![
            vec![ratio(1, 1), ratio(2, 1)],
            vec![ratio(0, 1), ratio(1, 2)],
        ]);
        let b = a.transpose();
        let p = a.mul(&b);
        assert_eq!(p[(0, 0)], ratio(5, 1));
        assert_eq!(p[(0, 1)], ratio(1, 1));
        assert_eq!(p[(1, 1)], ratio(1, 4));
        assert_eq!(a.mul_with(&b, Exec::Parallel), p);
        let id = Matrix::<Rational>::identity(2, ());
        assert_eq!(a.mul(&id), a);
    }
}
