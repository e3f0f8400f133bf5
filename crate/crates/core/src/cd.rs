//! Christoffel-Darboux kernel `K^[l](x, y) = Σ_{k<l} Q^(k)(y) Q̄^(k)(x)` and its
//! closed forms.

use crate::combinatorics::{assoc_minus_signed, assoc_plus, cyclic_reduce, family, multi_index, Composition, MultiIndex};
use crate::error::{Error, Result};
use crate::factorization::MomentTable;
use crate::jacobi::JacobiBand;
use crate::measures::Side;
use crate::parallel::Exec;
use crate::polynomials::{solve_mixed_direct, LinearForms, Normalization, Orientation, PolynomialFamily};
use crate::scalar::{max_abs, Scalar};

/// `Q(y)` and `Q̄(x)` on the whole window, shared by every scale.
#[derive(Clone, Debug)]
pub struct KernelPoint<T> {
    pub x: T,
    pub y: T,
    pub q_y: Vec<T>,
    pub qbar_x: Vec<T>,
}

impl<T: Scalar> KernelPoint<T> {
    pub fn new(forms: &LinearForms<'_, T>, x: &T, y: &T) -> Result<Self> {
        Ok(KernelPoint {
            x: x.clone(),
            y: y.clone(),
            q_y: forms.q_all(y)?,
            qbar_x: forms.qbar_all(x)?,
        })
    }
}

pub fn cd_kernel_direct<T: Scalar>(pt: &KernelPoint<T>, l: usize) -> Result<T> {
    if l > pt.q_y.len() {
        return Err(Error::WindowTooSmall(format!("kernel of order {l} on a window of {}", pt.q_y.len())));
    }
    let mut acc = T::zero_in(pt.x.context());
    for k in 0..l {
        acc = acc + pt.q_y[k].clone() * pt.qbar_x[k].clone();
    }
    Ok(acc)
}

/// Inclusive index rectangle: `q` ranges over `Q` indices, `qbar` over `Q̄` indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexRect {
    pub q: (usize, usize),
    pub qbar: (usize, usize),
}

impl IndexRect {
    pub fn contains(&self, q: usize, qbar: usize) -> bool {
        (self.q.0..=self.q.1).contains(&q) && (self.qbar.0..=self.qbar.1).contains(&qbar)
    }
}

/// Index sets of the two finite sums in the band form of the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigmaSets {
    pub l: usize,
    pub sigma1: IndexRect,
    pub sigma2: IndexRect,
}

pub fn sigma_sets(n1: &Composition, n2: &Composition, l: usize) -> Result<SigmaSets> {
    let min = n1.total().max(n2.total());
    if l < min {
        return Err(Error::Domain(format!("index sets need l >= {min}, got {l}")));
    }
    let (p1, p2) = (n1.families(), n2.families());
    let minus = |n: &Composition, a: usize| assoc_minus_signed(n, l as i64 - 1, a).expect("l >= |n|");
    let sigma1 = IndexRect {
        q: (l, assoc_plus(n1, l, cyclic_reduce(p1, family(n1, l) as i64 - 1))),
        qbar: (minus(n1, cyclic_reduce(p1, family(n1, l - 1) as i64 + 1)), l - 1),
    };
    let sigma2 = IndexRect {
        q: (minus(n2, cyclic_reduce(p2, family(n2, l - 1) as i64 + 1)), l - 1),
        qbar: (l, assoc_plus(n2, l, cyclic_reduce(p2, family(n2, l) as i64 - 1))),
    };
    Ok(SigmaSets { l, sigma1, sigma2 })
}

fn block_term<T: Scalar>(band: &JacobiBand<T>, pt: &KernelPoint<T>, qbar: usize, q: usize) -> T {
    let e = &band.j[(qbar, q)];
    if e.is_exact_zero() {
        T::zero_in(pt.x.context())
    } else {
        pt.qbar_x[qbar].clone() * e.clone() * pt.q_y[q].clone()
    }
}

fn check_split<T: Scalar>(band: &JacobiBand<T>, l: usize) -> Result<()> {
    if l == 0 || l > band.splitting_limit() {
        return Err(Error::WindowTooSmall(format!(
            "scale {l} outside 1..={} on a window of {}",
            band.splitting_limit(),
            band.size()
        )));
    }
    Ok(())
}

/// `[Q̄ᵀ]^{[l]} J^{[l,>=l]} Q^{[>=l]} - [Q̄ᵀ]^{[>=l]} J^{[>=l,l]} Q^{[l]}`, which equals `(y - x) K^[l]`.
pub fn block_splitting<T: Scalar>(band: &JacobiBand<T>, pt: &KernelPoint<T>, l: usize) -> Result<T> {
    check_split(band, l)?;
    let n = band.size();
    let mut acc = T::zero_in(pt.x.context());
    for j in 0..l {
        for i in l..n {
            acc = acc + block_term(band, pt, j, i);
        }
    }
    for j in l..n {
        for i in 0..l {
            acc = acc - block_term(band, pt, j, i);
        }
    }
    Ok(acc)
}

/// `K^[l](x, y)` from the two finite sums over the index sets.
pub fn cd_alternative_rhs<T: Scalar>(
    band: &JacobiBand<T>,
    pt: &KernelPoint<T>,
    n1: &Composition,
    n2: &Composition,
    l: usize,
) -> Result<T> {
    check_split(band, l)?;
    if pt.x == pt.y {
        return cd_kernel_direct(pt, l);
    }
    let sets = sigma_sets(n1, n2, l)?;
    let n = band.size();
    if sets.sigma1.q.1 >= n || sets.sigma2.qbar.1 >= n {
        return Err(Error::WindowTooSmall(format!("index sets at scale {l} leave a window of {n}")));
    }
    let mut acc = T::zero_in(pt.x.context());
    for i in sets.sigma1.q.0..=sets.sigma1.q.1 {
        for j in sets.sigma1.qbar.0..=sets.sigma1.qbar.1 {
            acc = acc + block_term(band, pt, j, i);
        }
    }
    for i in sets.sigma2.q.0..=sets.sigma2.q.1 {
        for j in sets.sigma2.qbar.0..=sets.sigma2.qbar.1 {
            acc = acc - block_term(band, pt, j, i);
        }
    }
    Ok(acc / (pt.y.clone() - pt.x.clone()))
}

/// Nonzero entries of `J^{[l,>=l]}` or `J^{[>=l,l]}` that fall outside the index sets.
pub fn sigma_escapes<T: Scalar>(band: &JacobiBand<T>, sets: &SigmaSets) -> Vec<(usize, usize)> {
    let l = sets.l;
    let n = band.size();
    let mut out = Vec::new();
    for j in 0..l.min(n) {
        for i in l..n {
            if !band.j[(j, i)].is_exact_zero() && !sets.sigma1.contains(i, j) {
                out.push((j, i));
            }
        }
    }
    for j in l..n {
        for i in 0..l.min(n) {
            if !band.j[(j, i)].is_exact_zero() && !sets.sigma2.contains(i, j) {
                out.push((j, i));
            }
        }
    }
    out
}

/// The mixed polynomials entering the classical form at one scale.
///
/// With `ν1 = ν(n1; l-1)`, `ν2 = ν(n2; l-1)`:
/// `(x - y) K = Σ_b D^{II}_b(x) F^{I}_b(y) - Σ_a D^{I}_a(x) F^{II}_a(y)`.
pub struct ClassicalCd<T> {
    pub l: usize,
    pub nu1: MultiIndex,
    pub nu2: MultiIndex,
    /// `(D^{II}_b, F^{I}_b)` for each family `b` of system 2.
    pub by_b: Vec<(PolynomialFamily<T>, PolynomialFamily<T>)>,
    /// `(D^{I}_a, F^{II}_a)` for each family `a` of system 1.
    pub by_a: Vec<(PolynomialFamily<T>, PolynomialFamily<T>)>,
}

pub fn classical_cd<T: Scalar>(table: &MomentTable<'_, T>, l: usize) -> Result<ClassicalCd<T>> {
    let setup = table.setup();
    let min = setup.comp1.total().max(setup.comp2.total());
    if l < min {
        return Err(Error::Domain(format!("classical kernel form needs l >= {min}, got {l}")));
    }
    let nu1 = multi_index(&setup.comp1, l as i64 - 1);
    let nu2 = multi_index(&setup.comp2, l as i64 - 1);
    let lowered = |nu: &MultiIndex, a: usize| {
        nu.minus_unit(a)
            .ok_or_else(|| Error::Domain(format!("family {a} has no degree to lower in {nu}")))
    };
    let mut by_b = Vec::new();
    for b in 1..=setup.comp2.families() {
        let d = solve_mixed_direct(table, &nu2.plus_unit(b), &nu1, Normalization::TypeII(b), Orientation::Duals)?;
        let f = solve_mixed_direct(table, &nu1, &lowered(&nu2, b)?, Normalization::TypeI(b), Orientation::Forms)?;
        by_b.push((d, f));
    }
    let mut by_a = Vec::new();
    for a in 1..=setup.comp1.families() {
        let d = solve_mixed_direct(table, &nu2, &lowered(&nu1, a)?, Normalization::TypeI(a), Orientation::Duals)?;
        let f = solve_mixed_direct(table, &nu1.plus_unit(a), &nu2, Normalization::TypeII(a), Orientation::Forms)?;
        by_a.push((d, f));
    }
    Ok(ClassicalCd { l, nu1, nu2, by_b, by_a })
}

impl<T: Scalar> ClassicalCd<T> {
    /// `K^[l](x, y)`; at `x = y` falls back to the direct sum.
    pub fn eval(&self, setup: &crate::measures::ProblemSetup, pt: &KernelPoint<T>) -> Result<T> {
        if pt.x == pt.y {
            return cd_kernel_direct(pt, self.l);
        }
        let mut acc = T::zero_in(pt.x.context());
        for (d, f) in &self.by_b {
            acc = acc + d.eval_form(setup, Side::Two, &pt.x)? * f.eval_form(setup, Side::One, &pt.y)?;
        }
        for (d, f) in &self.by_a {
            acc = acc - d.eval_form(setup, Side::Two, &pt.x)? * f.eval_form(setup, Side::One, &pt.y)?;
        }
        Ok(acc / (pt.x.clone() - pt.y.clone()))
    }
}

pub fn cd_classical_rhs<T: Scalar>(table: &MomentTable<'_, T>, pt: &KernelPoint<T>, l: usize) -> Result<T> {
    classical_cd(table, l)?.eval(table.setup(), pt)
}

/// The kernel at one scale and point by every route.
#[derive(Clone, Debug)]
pub struct KernelReport<T> {
    pub l: usize,
    pub direct: T,
    pub classical: T,
    pub alternative: T,
    /// `block_splitting / (y - x)`.
    pub splitting: T,
}

impl<T: Scalar> KernelReport<T> {
    /// Largest deviation of a closed form from the direct sum.
    pub fn max_residual(&self) -> T {
        let d = &self.direct;
        let r = (self.classical.clone() - d.clone()).magnitude();
        let r = max_abs(r, &(self.alternative.clone() - d.clone()));
        max_abs(r, &(self.splitting.clone() - d.clone()))
    }
}

pub fn kernel_report<T: Scalar>(
    classical: &ClassicalCd<T>,
    band: &JacobiBand<T>,
    setup: &crate::measures::ProblemSetup,
    pt: &KernelPoint<T>,
) -> Result<KernelReport<T>> {
    let l = classical.l;
    let direct = cd_kernel_direct(pt, l)?;
    let splitting = if pt.x == pt.y {
        direct.clone()
    } else {
        block_splitting(band, pt, l)? / (pt.y.clone() - pt.x.clone())
    };
    Ok(KernelReport {
        l,
        classical: classical.eval(setup, pt)?,
        alternative: cd_alternative_rhs(band, pt, &setup.comp1, &setup.comp2, l)?,
        splitting,
        direct,
    })
}

/// Reports for every scale and point pair. Classical forms are solved once per
/// scale; points are evaluated independently.
pub fn kernel_grid<T: Scalar>(
    table: &MomentTable<'_, T>,
    band: &JacobiBand<T>,
    forms: &LinearForms<'_, T>,
    scales: &[usize],
    pairs: &[(T, T)],
    exec: Exec,
) -> Result<Vec<KernelReport<T>>> {
    let setup = table.setup();
    let classical = exec.try_map(scales.len(), |k| classical_cd(table, scales[k]))?;
    let points = exec.try_map(pairs.len(), |k| KernelPoint::new(forms, &pairs[k].0, &pairs[k].1))?;
    exec.try_map(classical.len() * points.len(), |k| {
        kernel_report(&classical[k / points.len()], band, setup, &points[k % points.len()])
    })
}
