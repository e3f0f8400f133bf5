//! The banded Jacobi operator `J = S Υ1 S^{-1} = S̄ Υ2ᵀ S̄^{-1}`.
//!
//! On an `N x N` truncation the `S` route gives exact rows `i < row_limit`
//! (all shift targets of rows `<= i` stay inside the window) and the `S̄`
//! route gives exact columns `j < col_limit`. The merged operator takes the
//! upper triangle from the first route and the strict lower triangle from the
//! second, which covers the band on the widest window.

use crate::combinatorics::{
    assoc_minus_signed, assoc_plus, cyclic_reduce, family, shift_exact_prefix, shift_matrix, Composition,
};
use crate::error::{Error, Result};
use crate::factorization::FactorizationPair;
use crate::matrix::Matrix;
use crate::parallel::Exec;
use crate::polynomials::LinearForms;
use crate::scalar::{max_abs, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    FromS,
    FromSbar,
    Merged,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiBand<T> {
    pub j: Matrix<T>,
    pub route: Route,
    /// Rows `i < row_limit` of the upper triangle are exact.
    pub row_limit: usize,
    /// Columns `j < col_limit` of the lower triangle are exact.
    pub col_limit: usize,
}

impl<T: Scalar> JacobiBand<T> {
    pub fn size(&self) -> usize {
        self.j.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> &T {
        &self.j[(i, j)]
    }

    /// Whether entry `(i, j)` equals the corresponding entry of the untruncated operator.
    pub fn is_exact(&self, i: usize, j: usize) -> bool {
        match self.route {
            Route::FromS => i < self.row_limit,
            Route::FromSbar => j < self.col_limit,
            Route::Merged => {
                if j >= i {
                    i < self.row_limit
                } else {
                    j < self.col_limit
                }
            }
        }
    }

    /// Row `l` is exact in every column and has no nonzero beyond the window.
    pub fn row_complete(&self, l: usize) -> bool {
        match self.route {
            Route::FromS => l < self.row_limit,
            Route::FromSbar => l < self.row_limit && l <= self.col_limit,
            Route::Merged => l < self.row_limit && l <= self.col_limit,
        }
    }

    /// Column `l` is exact in every row and has no nonzero beyond the window.
    pub fn col_complete(&self, l: usize) -> bool {
        l < self.row_limit.min(self.col_limit)
    }

    /// Largest `l` at which the block splitting `J^{[l, >=l]}`, `J^{[>=l, l]}` is exact.
    pub fn splitting_limit(&self) -> usize {
        self.row_limit.min(self.col_limit)
    }
}

fn limits(n1: &Composition, n2: &Composition, size: usize) -> (usize, usize) {
    (shift_exact_prefix(n1, size), shift_exact_prefix(n2, size))
}

/// `S Υ1 S^{-1}`.
pub fn jacobi_from_s<T: Scalar>(
    fp: &FactorizationPair<T>,
    n1: &Composition,
    n2: &Composition,
    exec: Exec,
) -> JacobiBand<T> {
    let n = fp.size();
    let ctx = fp.s[(0, 0)].context();
    let up = shift_matrix(n1, n).to_matrix::<T>(ctx);
    let j = fp.s.mul_with(&up, exec).mul_with(&fp.s_inv, exec);
    let (row_limit, col_limit) = limits(n1, n2, n);
    JacobiBand {
        j,
        route: Route::FromS,
        row_limit,
        col_limit,
    }
}

/// `S̄ Υ2ᵀ S̄^{-1}`.
pub fn jacobi_from_sbar<T: Scalar>(
    fp: &FactorizationPair<T>,
    n1: &Composition,
    n2: &Composition,
    exec: Exec,
) -> JacobiBand<T> {
    let n = fp.size();
    let ctx = fp.s[(0, 0)].context();
    let up = shift_matrix(n2, n).to_matrix::<T>(ctx).transpose();
    let j = fp.sbar.mul_with(&up, exec).mul_with(&fp.sbar_inv, exec);
    let (row_limit, col_limit) = limits(n1, n2, n);
    JacobiBand {
        j,
        route: Route::FromSbar,
        row_limit,
        col_limit,
    }
}

pub fn jacobi_merged<T: Scalar>(from_s: &JacobiBand<T>, from_sbar: &JacobiBand<T>) -> JacobiBand<T> {
    let n = from_s.size();
    let j = Matrix::from_fn(n, n, |i, k| {
        if k >= i {
            from_s.j[(i, k)].clone()
        } else {
            from_sbar.j[(i, k)].clone()
        }
    });
    JacobiBand {
        j,
        route: Route::Merged,
        row_limit: from_s.row_limit,
        col_limit: from_s.col_limit,
    }
}

/// Both routes and their merge.
pub fn jacobi_operator<T: Scalar>(
    fp: &FactorizationPair<T>,
    n1: &Composition,
    n2: &Composition,
    exec: Exec,
) -> (JacobiBand<T>, JacobiBand<T>, JacobiBand<T>) {
    let a = jacobi_from_s(fp, n1, n2, exec);
    let b = jacobi_from_sbar(fp, n1, n2, exec);
    let m = jacobi_merged(&a, &b);
    (a, b, m)
}

/// `max |J_S - J_S̄|` over the window where both routes are exact.
pub fn two_route_residual<T: Scalar>(a: &JacobiBand<T>, b: &JacobiBand<T>) -> Option<T> {
    let mut worst: Option<T> = None;
    for i in 0..a.row_limit {
        for j in 0..a.col_limit {
            let d = a.j[(i, j)].clone() - b.j[(i, j)].clone();
            worst = Some(match worst {
                None => d.magnitude(),
                Some(w) => max_abs(w, &d),
            });
        }
    }
    worst
}

/// Inclusive index ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandSupport {
    pub row: (usize, usize),
    pub col: (usize, usize),
}

/// Nonzero range of row `l` and column `l` of `J`, for `l >= max(|n1|, |n2|)`.
pub fn band_support(n1: &Composition, n2: &Composition, l: usize) -> Result<BandSupport> {
    let min = n1.total().max(n2.total());
    if l < min {
        return Err(Error::Domain(format!("band support needs l >= {min}, got {l}")));
    }
    let (p1, p2) = (n1.families(), n2.families());
    let minus = |n: &Composition, a: usize| {
        assoc_minus_signed(n, l as i64 - 1, a).expect("l >= |n| leaves every family behind")
    };
    let row_lo = minus(n2, cyclic_reduce(p2, family(n2, l - 1) as i64 - 1));
    let row_hi = assoc_plus(n1, l + 1, cyclic_reduce(p1, family(n1, l + 1) as i64 - 1));
    let col_lo = minus(n1, cyclic_reduce(p1, family(n1, l - 1) as i64 + 1));
    let col_hi = assoc_plus(n2, l + 1, cyclic_reduce(p2, family(n2, l + 1) as i64 - 1));
    Ok(BandSupport {
        row: (row_lo, row_hi),
        col: (col_lo, col_hi),
    })
}

/// Largest column that may be nonzero in row `l` (valid for every `l`).
pub fn row_reach(n1: &Composition, l: usize) -> usize {
    assoc_plus(n1, l + 1, cyclic_reduce(n1.families(), family(n1, l + 1) as i64 - 1))
}

/// Largest row that may be nonzero in column `l` (valid for every `l`).
pub fn col_reach(n2: &Composition, l: usize) -> usize {
    assoc_plus(n2, l + 1, cyclic_reduce(n2.families(), family(n2, l + 1) as i64 - 1))
}

/// Observed nonzero range of row `l` and of column `l`.
pub fn observed_support<T: Scalar>(band: &JacobiBand<T>, l: usize) -> BandSupport {
    let n = band.size();
    let nz_row: Vec<usize> = (0..n).filter(|&j| !band.j[(l, j)].is_exact_zero()).collect();
    let nz_col: Vec<usize> = (0..n).filter(|&i| !band.j[(i, l)].is_exact_zero()).collect();
    let span = |v: &[usize]| (*v.first().unwrap_or(&0), *v.last().unwrap_or(&0));
    BandSupport {
        row: span(&nz_row),
        col: span(&nz_col),
    }
}

/// `Σ^p_{a=r..r'}` with wrap-around: `r..=r'` if `r <= r'`, else `1..=r'` then `r..=p`.
pub fn cyclic_range(p: usize, r: usize, r_end: usize) -> Vec<usize> {
    if r <= r_end {
        (r..=r_end).collect()
    } else {
        (1..=r_end).chain(r..=p).collect()
    }
}

struct Factors<'a, T: Scalar> {
    fp: &'a FactorizationPair<T>,
    n1: &'a Composition,
    n2: &'a Composition,
}

impl<T: Scalar> Factors<'_, T> {
    fn ctx(&self) -> T::Context {
        self.fp.s[(0, 0)].context()
    }

    fn get(&self, m: &Matrix<T>, i: Option<usize>, j: Option<usize>) -> Result<T> {
        match (i, j) {
            (Some(i), Some(j)) => {
                let n = self.fp.size();
                if i >= n || j >= n {
                    return Err(Error::WindowTooSmall(format!(
                        "factor entry ({i}, {j}) needs a window larger than {n}"
                    )));
                }
                Ok(m[(i, j)].clone())
            }
            _ => Ok(T::zero_in(self.ctx())),
        }
    }

    fn minus1(&self, l: usize, a: usize) -> Option<usize> {
        assoc_minus_signed(self.n1, l as i64 - 1, a)
    }

    fn minus2(&self, l: usize, a: usize) -> Option<usize> {
        assoc_minus_signed(self.n2, l as i64 - 1, a)
    }

    // J_{l, l+k} for k >= 1 from S and S^{-1}
    fn upper(&self, l: usize, col: usize) -> Result<T> {
        let p = self.n1.families();
        let a1 = family(self.n1, l);
        let start = cyclic_reduce(p, family(self.n1, col - 1) as i64 + 1);
        let mut acc = T::zero_in(self.ctx());
        for a in cyclic_range(p, start, a1) {
            let tail = self.get(&self.fp.s_inv, Some(assoc_plus(self.n1, l + 1, a)), Some(col))?;
            let term = if a == a1 {
                tail
            } else {
                self.get(&self.fp.s, Some(l), self.minus1(l, a))? * tail
            };
            acc = acc + term;
        }
        Ok(acc)
    }

    // J_{l+k, l} for k >= 1 from S̄ and S̄^{-1}
    fn lower(&self, row: usize, l: usize) -> Result<T> {
        let p = self.n2.families();
        let a2 = family(self.n2, l);
        let start = cyclic_reduce(p, family(self.n2, row - 1) as i64 + 1);
        let mut acc = T::zero_in(self.ctx());
        for a in cyclic_range(p, start, a2) {
            let head = self.get(&self.fp.sbar, Some(row), Some(assoc_plus(self.n2, l + 1, a)))?;
            let tail = if a == a2 {
                self.get(&self.fp.sbar_inv, Some(l), Some(l))?
            } else {
                self.get(&self.fp.sbar_inv, self.minus2(l, a), Some(l))?
            };
            acc = acc + head * tail;
        }
        Ok(acc)
    }

    fn diagonal_from_s(&self, l: usize) -> Result<T> {
        let p = self.n1.families();
        let a1 = family(self.n1, l);
        let mut acc = self.get(&self.fp.s, Some(l), self.minus1(l, a1))?
            + self.get(&self.fp.s_inv, Some(assoc_plus(self.n1, l + 1, a1)), Some(l))?;
        for a in (1..=p).filter(|&a| a != a1) {
            acc = acc
                + self.get(&self.fp.s, Some(l), self.minus1(l, a))?
                    * self.get(&self.fp.s_inv, Some(assoc_plus(self.n1, l + 1, a)), Some(l))?;
        }
        Ok(acc)
    }

    fn diagonal_from_sbar(&self, l: usize) -> Result<T> {
        let p = self.n2.families();
        let a2 = family(self.n2, l);
        let mut acc = self.get(&self.fp.sbar, Some(l), Some(assoc_plus(self.n2, l + 1, a2)))?
            * self.get(&self.fp.sbar_inv, Some(l), Some(l))?
            + self.get(&self.fp.sbar, Some(l), Some(l))? * self.get(&self.fp.sbar_inv, self.minus2(l, a2), Some(l))?;
        for a in (1..=p).filter(|&a| a != a2) {
            acc = acc
                + self.get(&self.fp.sbar, Some(l), Some(assoc_plus(self.n2, l + 1, a)))?
                    * self.get(&self.fp.sbar_inv, self.minus2(l, a), Some(l))?;
        }
        Ok(acc)
    }
}

/// Entry `J_{row, col}` written through entries of `S`, `S^{-1}` (diagonal and upper
/// band) or `S̄`, `S̄^{-1}` (lower band).
///
/// Far-band entries are cyclic sums over families; the family of the row (upper)
/// or column (lower) contributes its self term, the others a product of a factor
/// entry with an inverse-factor entry. Absent associated indices contribute zero.
pub fn jacobi_entry_from_factors<T: Scalar>(
    fp: &FactorizationPair<T>,
    n1: &Composition,
    n2: &Composition,
    row: usize,
    col: usize,
) -> Result<T> {
    let f = Factors { fp, n1, n2 };
    if col > row {
        if col > row_reach(n1, row) {
            return Err(Error::OutsideBand { row, col });
        }
        f.upper(row, col)
    } else if col == row {
        f.diagonal_from_s(row)
    } else {
        if row > col_reach(n2, col) {
            return Err(Error::OutsideBand { row, col });
        }
        f.lower(row, col)
    }
}

/// The diagonal entry `J_{l,l}` through `S̄` and `S̄^{-1}`.
pub fn jacobi_diagonal_from_sbar<T: Scalar>(
    fp: &FactorizationPair<T>,
    n1: &Composition,
    n2: &Composition,
    l: usize,
) -> Result<T> {
    Factors { fp, n1, n2 }.diagonal_from_sbar(l)
}

/// `max |(J Q(x))_l - x Q^(l)(x)|` over complete rows and
/// `max |(Q̄(x)ᵀ J)_l - x Q̄^(l)(x)|` over complete columns.
pub fn eigenvalue_residual<T: Scalar>(band: &JacobiBand<T>, forms: &LinearForms<'_, T>, x: &T) -> Result<T> {
    let n = band.size();
    let q = forms.q_all(x)?;
    let qb = forms.qbar_all(x)?;
    let mut worst = T::zero_in(x.context());
    for l in (0..n).filter(|&l| band.row_complete(l)) {
        let mut acc = T::zero_in(x.context());
        for (j, v) in q.iter().enumerate() {
            let e = &band.j[(l, j)];
            if !e.is_exact_zero() {
                acc = acc + e.clone() * v.clone();
            }
        }
        worst = max_abs(worst, &(acc - x.clone() * q[l].clone()));
    }
    for l in (0..n).filter(|&l| band.col_complete(l)) {
        let mut acc = T::zero_in(x.context());
        for (i, v) in qb.iter().enumerate() {
            let e = &band.j[(i, l)];
            if !e.is_exact_zero() {
                acc = acc + v.clone() * e.clone();
            }
        }
        worst = max_abs(worst, &(acc - x.clone() * qb[l].clone()));
    }
    Ok(worst)
}
