//! Truncated moment matrix and its Gauss-Borel (LU) factorization `g = S^{-1} S̄`.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::combinatorics::{shift_target, Composition};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::{family_moment, moment_key, ProblemSetup};
use crate::parallel::Exec;
use crate::scalar::{Float, Scalar};

/// Memo of `∫ x^m w_{1,a} w_{2,b} dμ` keyed by `(a, b, m)`.
pub struct MomentTable<'a, T: Scalar> {
    setup: &'a ProblemSetup,
    ctx: T::Context,
    cache: Mutex<HashMap<(usize, usize, usize), T>>,
}

impl<'a, T: Scalar> MomentTable<'a, T> {
    pub fn new(setup: &'a ProblemSetup, ctx: T::Context) -> Self {
        MomentTable {
            setup,
            ctx,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn setup(&self) -> &'a ProblemSetup {
        self.setup
    }

    pub fn context(&self) -> T::Context {
        self.ctx
    }

    pub fn get(&self, a: usize, b: usize, m: usize) -> Result<T> {
        if let Some(v) = self.cache.lock().unwrap().get(&(a, b, m)) {
            return Ok(v.clone());
        }
        let v = family_moment::<T>(self.setup, a, b, m, self.ctx)?;
        self.cache.lock().unwrap().insert((a, b, m), v.clone());
        Ok(v)
    }

    /// Compute the given keys, in parallel if requested.
    pub fn prefetch(&self, keys: &[(usize, usize, usize)], exec: Exec) -> Result<()> {
        let missing: Vec<_> = {
            let cache = self.cache.lock().unwrap();
            let mut ks: Vec<_> = keys.iter().filter(|k| !cache.contains_key(k)).copied().collect();
            ks.sort_unstable();
            ks.dedup();
            ks
        };
        let values = exec.try_map(missing.len(), |k| {
            let (a, b, m) = missing[k];
            family_moment::<T>(self.setup, a, b, m, self.ctx)
        })?;
        let mut cache = self.cache.lock().unwrap();
        for (k, v) in missing.into_iter().zip(values) {
            cache.insert(k, v);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix<T> {
    pub g: Matrix<T>,
    pub comp1: Composition,
    pub comp2: Composition,
}

impl<T: Scalar> MomentMatrix<T> {
    pub fn size(&self) -> usize {
        self.g.rows()
    }
}

pub fn build_moment_matrix<T: Scalar>(
    setup: &ProblemSetup,
    size: usize,
    ctx: T::Context,
    exec: Exec,
) -> Result<MomentMatrix<T>> {
    let table = MomentTable::new(setup, ctx);
    build_moment_matrix_with(&table, size, exec)
}

pub fn build_moment_matrix_with<T: Scalar>(
    table: &MomentTable<'_, T>,
    size: usize,
    exec: Exec,
) -> Result<MomentMatrix<T>> {
    let setup = table.setup();
    if size == 0 {
        return Err(Error::InvalidSetup("truncation size must be positive".into()));
    }
    let keys: Vec<_> = (0..size)
        .flat_map(|i| (0..size).map(move |j| (i, j)))
        .map(|(i, j)| moment_key(setup, i, j))
        .collect();
    table.prefetch(&keys, exec)?;
    let mut entries = Vec::with_capacity(size);
    for i in 0..size {
        let mut row = Vec::with_capacity(size);
        for j in 0..size {
            let (a, b, m) = moment_key(setup, i, j);
            row.push(table.get(a, b, m)?);
        }
        entries.push(row);
    }
    Ok(MomentMatrix {
        g: Matrix::from_rows(entries),
        comp1: setup.comp1.clone(),
        comp2: setup.comp2.clone(),
    })
}

/// `max |(Υ1 g - g Υ2ᵀ)_ij|` over entries whose shift targets stay inside the truncation.
pub fn hankel_residual<T: Scalar>(g: &Matrix<T>, n1: &Composition, n2: &Composition) -> T {
    let n = g.rows();
    let mut worst = T::zero_in(g[(0, 0)].context());
    for i in 0..n {
        let ti = shift_target(n1, i);
        if ti >= n {
            continue;
        }
        for j in 0..n {
            let tj = shift_target(n2, j);
            if tj >= n {
                continue;
            }
            let d = g[(ti, j)].clone() - g[(i, tj)].clone();
            worst = crate::scalar::max_abs(worst, &d);
        }
    }
    worst
}

/// `S`, `S̄` and their inverses on an `N x N` truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationPair<T> {
    pub s: Matrix<T>,
    pub sbar: Matrix<T>,
    pub s_inv: Matrix<T>,
    pub sbar_inv: Matrix<T>,
}

impl<T: Scalar> FactorizationPair<T> {
    pub fn size(&self) -> usize {
        self.s.rows()
    }

    /// `max |S^{-1} S̄ - g|`.
    pub fn reconstruction_residual(&self, g: &Matrix<T>) -> T {
        self.s_inv
            .mul(&self.sbar)
            .sub(g)
            .max_abs()
            .expect("non-empty")
    }

    pub fn to_float(&self, precision: usize) -> FactorizationPair<Float> {
        let f = |m: &Matrix<T>| m.map(|x| x.to_float(precision));
        FactorizationPair {
            s: f(&self.s),
            sbar: f(&self.sbar),
            s_inv: f(&self.s_inv),
            sbar_inv: f(&self.sbar_inv),
        }
    }
}

/// Doolittle elimination without pivoting: `L U = g`, so `S = L^{-1}` and `S̄ = U`.
pub fn gauss_borel<T: Scalar>(g: &Matrix<T>, exec: Exec) -> Result<FactorizationPair<T>> {
    let n = g.rows();
    assert_eq!(n, g.cols(), "moment matrix must be square");
    let ctx = g[(0, 0)].context();
    let mut u = g.clone();
    let mut l = Matrix::identity(n, ctx);
    for k in 0..n {
        let pivot = u[(k, k)].clone();
        if pivot.below_pivot_floor() {
            return Err(Error::SingularMinor(k));
        }
        for i in k + 1..n {
            let f = u[(i, k)].clone() / pivot.clone();
            u[(i, k)] = T::zero_in(ctx);
            if f.is_exact_zero() {
                l[(i, k)] = f;
                continue;
            }
            for j in k + 1..n {
                let v = u[(i, j)].clone() - f.clone() * u[(k, j)].clone();
                u[(i, j)] = v;
            }
            l[(i, k)] = f;
        }
    }
    let s = triangular_inverse(&l, exec)?;
    let sbar_inv = triangular_inverse(&u, exec)?;
    Ok(FactorizationPair {
        s,
        sbar: u,
        s_inv: l,
        sbar_inv,
    })
}

/// Inverse of a lower or upper triangular matrix by substitution, one column at a time.
pub fn triangular_inverse<T: Scalar>(t: &Matrix<T>, exec: Exec) -> Result<Matrix<T>> {
    let n = t.rows();
    assert_eq!(n, t.cols(), "triangular matrix must be square");
    let lower = (0..n).all(|i| (i + 1..n).all(|j| t[(i, j)].is_exact_zero()));
    let upper = (0..n).all(|i| (0..i).all(|j| t[(i, j)].is_exact_zero()));
    if !lower && !upper {
        return Err(Error::Domain("matrix is not triangular".into()));
    }
    if let Some(k) = (0..n).find(|&k| t[(k, k)].is_exact_zero()) {
        return Err(Error::ZeroDiagonal(k));
    }
    if upper && !lower {
        let inv = triangular_inverse(&t.transpose(), exec)?;
        return Ok(inv.transpose());
    }
    let ctx = t[(0, 0)].context();
    // column j of the inverse solves T x = e_j by forward substitution
    let cols = exec.map(n, |j| {
        let mut x = vec![T::zero_in(ctx); n];
        x[j] = T::one_in(ctx) / t[(j, j)].clone();
        for i in j + 1..n {
            let mut acc = T::zero_in(ctx);
            for k in j..i {
                if !t[(i, k)].is_exact_zero() {
                    acc = acc + t[(i, k)].clone() * x[k].clone();
                }
            }
            x[i] = -acc / t[(i, i)].clone();
        }
        x
    });
    Ok(Matrix::from_fn(n, n, |i, j| cols[j][i].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Composition;
    use crate::measures::{MeasureSpec, Weight};
    use crate::scalar::{ratio, Rational};

    fn rm(rows: Vec<Vec<(i64, i64)>>) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|(a, b)| ratio(a, b)).collect())
                .collect(),
        )
    }

    fn hilbert() -> ProblemSetup {
        let c = Composition::new(vec![1]).unwrap();
        ProblemSetup::new(
            MeasureSpec::lebesgue(ratio(0, 1), ratio(1, 1)).unwrap(),
            vec![Weight::one()],
            vec![Weight::one()],
            c.clone(),
            c,
        )
        .unwrap()
    }

    #[test]
    fn hilbert_moment_matrix() {
        let g = build_moment_matrix::<Rational>(&hilbert(), 3, (), Exec::default()).unwrap();
        let want = rm(vec![
            vec![(1, 1), (1, 2), (1, 3)],
            vec![(1, 2), (1, 3), (1, 4)],
            vec![(1, 3), (1, 4), (1, 5)],
        ]);
        assert_eq!(g.g, want);
        assert_eq!(hankel_residual(&g.g, &g.comp1, &g.comp2), ratio(0, 1));
    }

    #[test]
    fn two_by_two_factorization() {
        let g = rm(vec![vec![(1, 1), (1, 2)], vec![(1, 2), (1, 3)]]);
        let fp = gauss_borel(&g, Exec::Sequential).unwrap();
        assert_eq!(fp.s, rm(vec![vec![(1, 1), (0, 1)], vec![(-1, 2), (1, 1)]]));
        assert_eq!(fp.sbar, rm(vec![vec![(1, 1), (1, 2)], vec![(0, 1), (1, 12)]]));
        assert_eq!(fp.s.mul(&g), fp.sbar);
    }

    #[test]
    fn identity_factorizes_trivially() {
        let id = Matrix::<Rational>::identity(4, ());
        let fp = gauss_borel(&id, Exec::Sequential).unwrap();
        assert_eq!(fp.s, id);
        assert_eq!(fp.sbar, id);
    }

    #[test]
    fn triangular_inverse_examples() {
        let l = rm(vec![vec![(1, 1), (0, 1)], vec![(-1, 2), (1, 1)]]);
        assert_eq!(
            triangular_inverse(&l, Exec::Sequential).unwrap(),
            rm(vec![vec![(1, 1), (0, 1)], vec![(1, 2), (1, 1)]])
        );
        let u = rm(vec![vec![(1, 1), (1, 2)], vec![(0, 1), (1, 12)]]);
        assert_eq!(
            triangular_inverse(&u, Exec::Parallel).unwrap(),
            rm(vec![vec![(1, 1), (-6, 1)], vec![(0, 1), (12, 1)]])
        );
        let id = Matrix::<Rational>::identity(3, ());
        assert_eq!(triangular_inverse(&id, Exec::Sequential).unwrap(), id);
        let z = rm(vec![vec![(1, 1), (0, 1)], vec![(3, 1), (0, 1)]]);
        assert_eq!(triangular_inverse(&z, Exec::Sequential), Err(Error::ZeroDiagonal(1)));
    }

    #[test]
    fn duplicate_string_rows_are_singular() {
        let setup = ProblemSetup::new(
            MeasureSpec::lebesgue(ratio(0, 1), ratio(1, 1)).unwrap(),
            vec![Weight::one(), Weight::Power(ratio(1, 1))],
            vec![Weight::one()],
            Composition::new(vec![1, 1]).unwrap(),
            Composition::new(vec![1]).unwrap(),
        )
        .unwrap();
        let g = build_moment_matrix::<Rational>(&setup, 6, (), Exec::default()).unwrap();
        assert_eq!(gauss_borel(&g.g, Exec::default()), Err(Error::SingularMinor(2)));
    }

    #[test]
    fn row_scaling_scales_sbar_only() {
        let g = build_moment_matrix::<Rational>(&hilbert(), 6, (), Exec::default()).unwrap().g;
        let c = ratio(7, 3);
        let scaled = g.map(|x| x.clone() * c.clone());
        let a = gauss_borel(&g, Exec::Sequential).unwrap();
        let b = gauss_borel(&scaled, Exec::Sequential).unwrap();
        assert_eq!(a.s, b.s);
        assert_eq!(a.sbar.map(|x| x.clone() * c.clone()), b.sbar);
    }
}
