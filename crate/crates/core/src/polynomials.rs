//! Multiple orthogonal polynomials, linear forms, the direct orthogonality
//! solver and second-kind functions.

use crate::combinatorics::{assoc_plus, exponent, family, multi_index, MultiIndex};
use crate::error::{Error, Result};
use crate::factorization::{FactorizationPair, MomentTable};
use crate::matrix::Matrix;
use crate::measures::{eval_weight, integrate, ProblemSetup, Side};
use crate::parallel::Exec;
use crate::quadrature::QuadOptions;
use crate::scalar::{Float, Scalar};

/// Ascending monomial coefficients of a polynomial.
pub type Coeffs<T> = Vec<T>;

pub fn eval_poly<T: Scalar>(c: &[T], x: &T) -> T {
    let mut acc = T::zero_in(x.context());
    for v in c.iter().rev() {
        acc = acc * x.clone() + v.clone();
    }
    acc
}

/// One polynomial per weight family; `Σ_a A_a w_a` is the associated linear form.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialFamily<T> {
    pub coeffs: Vec<Coeffs<T>>,
}

impl<T: Scalar> PolynomialFamily<T> {
    /// Coefficients of family `a` (1-based).
    pub fn family(&self, a: usize) -> &[T] {
        &self.coeffs[a - 1]
    }

    pub fn eval_form(&self, setup: &ProblemSetup, side: Side, x: &T) -> Result<T> {
        let mut acc = T::zero_in(x.context());
        for (c, w) in self.coeffs.iter().zip(setup.weights(side)) {
            if c.is_empty() {
                continue;
            }
            acc = acc + eval_poly(c, x) * eval_weight(w, x)?;
        }
        Ok(acc)
    }
}

/// `A^(l)_a`: coefficients from row `l` of `S` on the family-`a` slots.
pub fn mop_coeffs<T: Scalar>(fp: &FactorizationPair<T>, setup: &ProblemSetup, l: usize, a: usize) -> Coeffs<T> {
    let n1 = &setup.comp1;
    let ctx = fp.s[(0, 0)].context();
    let len = multi_index(n1, l as i64).get(a);
    let mut c = vec![T::zero_in(ctx); len];
    for i in 0..=l {
        if family(n1, i) == a {
            let e = exponent(n1, i);
            c[e] = c[e].clone() + fp.s[(l, i)].clone();
        }
    }
    c
}

/// `Ā^(l)_b`: coefficients from column `l` of `S̄^{-1}` on the family-`b` slots.
pub fn dual_mop_coeffs<T: Scalar>(fp: &FactorizationPair<T>, setup: &ProblemSetup, l: usize, b: usize) -> Coeffs<T> {
    let n2 = &setup.comp2;
    let ctx = fp.s[(0, 0)].context();
    let len = multi_index(n2, l as i64).get(b);
    let mut c = vec![T::zero_in(ctx); len];
    for j in 0..=l {
        if family(n2, j) == b {
            let e = exponent(n2, j);
            c[e] = c[e].clone() + fp.sbar_inv[(j, l)].clone();
        }
    }
    c
}

pub fn mop_family<T: Scalar>(fp: &FactorizationPair<T>, setup: &ProblemSetup, l: usize) -> PolynomialFamily<T> {
    PolynomialFamily {
        coeffs: (1..=setup.comp1.families()).map(|a| mop_coeffs(fp, setup, l, a)).collect(),
    }
}

pub fn dual_mop_family<T: Scalar>(fp: &FactorizationPair<T>, setup: &ProblemSetup, l: usize) -> PolynomialFamily<T> {
    PolynomialFamily {
        coeffs: (1..=setup.comp2.families()).map(|b| dual_mop_coeffs(fp, setup, l, b)).collect(),
    }
}

/// Evaluates `Q = S ξ1` and `Q̄ = (S̄^{-1})ᵀ ξ2` on the truncation window.
pub struct LinearForms<'a, T: Scalar> {
    pub setup: &'a ProblemSetup,
    pub fp: &'a FactorizationPair<T>,
}

impl<'a, T: Scalar> LinearForms<'a, T> {
    pub fn new(setup: &'a ProblemSetup, fp: &'a FactorizationPair<T>) -> Self {
        LinearForms { setup, fp }
    }

    pub fn size(&self) -> usize {
        self.fp.size()
    }

    /// The weighted monomial string `ξ(x)` truncated to the window.
    pub fn xi(&self, side: Side, x: &T) -> Result<Vec<T>> {
        let n = self.setup.composition(side);
        let w: Vec<T> = self
            .setup
            .weights(side)
            .iter()
            .map(|w| eval_weight(w, x))
            .collect::<Result<_>>()?;
        let mut powers = vec![T::one_in(x.context())];
        Ok((0..self.size())
            .map(|l| {
                let e = exponent(n, l);
                while powers.len() <= e {
                    let next = powers.last().unwrap().clone() * x.clone();
                    powers.push(next);
                }
                w[family(n, l) - 1].clone() * powers[e].clone()
            })
            .collect())
    }

    /// All `Q^(l)(x)`, `l < N`.
    pub fn q_all(&self, x: &T) -> Result<Vec<T>> {
        let xi = self.xi(Side::One, x)?;
        Ok(self.fp.s.mul_vec(&xi))
    }

    /// All `Q̄^(l)(x)`, `l < N`.
    pub fn qbar_all(&self, x: &T) -> Result<Vec<T>> {
        let xi = self.xi(Side::Two, x)?;
        let n = self.size();
        let ctx = x.context();
        Ok((0..n)
            .map(|l| {
                let mut acc = T::zero_in(ctx);
                for (j, v) in xi.iter().enumerate().take(l + 1) {
                    acc = acc + self.fp.sbar_inv[(j, l)].clone() * v.clone();
                }
                acc
            })
            .collect())
    }

    pub fn eval_q(&self, l: usize, x: &T) -> Result<T> {
        let xi = self.xi(Side::One, x)?;
        let mut acc = T::zero_in(x.context());
        for (i, v) in xi.iter().enumerate().take(l + 1) {
            acc = acc + self.fp.s[(l, i)].clone() * v.clone();
        }
        Ok(acc)
    }

    pub fn eval_qbar(&self, l: usize, x: &T) -> Result<T> {
        let xi = self.xi(Side::Two, x)?;
        let mut acc = T::zero_in(x.context());
        for (j, v) in xi.iter().enumerate().take(l + 1) {
            acc = acc + self.fp.sbar_inv[(j, l)].clone() * v.clone();
        }
        Ok(acc)
    }
}

/// `∫ (Σ_a A_a w_{U,a}) x^k w_{C,b} dμ` where `U` is the polynomial side.
fn form_moment<T: Scalar>(table: &MomentTable<'_, T>, poly: &PolynomialFamily<T>, side: Side, b: usize, k: usize) -> Result<T> {
    let mut acc = T::zero_in(table.context());
    for (a, c) in poly.coeffs.iter().enumerate() {
        for (s, v) in c.iter().enumerate() {
            if v.is_exact_zero() {
                continue;
            }
            let m = match side {
                Side::One => table.get(a + 1, b, s + k)?,
                Side::Two => table.get(b, a + 1, s + k)?,
            };
            acc = acc + v.clone() * m;
        }
    }
    Ok(acc)
}

/// `∫ Q^(l) Q̄^(k) dμ`.
pub fn check_biorthogonality<T: Scalar>(
    table: &MomentTable<'_, T>,
    fp: &FactorizationPair<T>,
    l: usize,
    k: usize,
) -> Result<T> {
    let setup = table.setup();
    let a = mop_family(fp, setup, l);
    let b = dual_mop_family(fp, setup, k);
    let mut acc = T::zero_in(table.context());
    for (fa, ca) in a.coeffs.iter().enumerate() {
        for (fb, cb) in b.coeffs.iter().enumerate() {
            for (s, u) in ca.iter().enumerate() {
                if u.is_exact_zero() {
                    continue;
                }
                for (t, v) in cb.iter().enumerate() {
                    if v.is_exact_zero() {
                        continue;
                    }
                    acc = acc + u.clone() * v.clone() * table.get(fa + 1, fb + 1, s + t)?;
                }
            }
        }
    }
    Ok(acc)
}

/// The full matrix of [`check_biorthogonality`] values; should be the identity.
pub fn biorthogonality_matrix<T: Scalar>(
    table: &MomentTable<'_, T>,
    fp: &FactorizationPair<T>,
    exec: Exec,
) -> Result<Matrix<T>> {
    let n = fp.size();
    let entries = exec.try_map(n * n, |idx| check_biorthogonality(table, fp, idx / n, idx % n))?;
    Ok(Matrix::from_fn(n, n, |i, j| entries[i * n + j].clone()))
}

/// Largest violation of the orthogonality conditions of `Q^(l)` and `Q̄^(l)`.
pub fn check_orthogonality<T: Scalar>(table: &MomentTable<'_, T>, fp: &FactorizationPair<T>, l: usize) -> Result<T> {
    let setup = table.setup();
    let mut worst = T::zero_in(table.context());
    let forms = mop_family(fp, setup, l);
    let nu2 = multi_index(&setup.comp2, l as i64 - 1);
    for b in 1..=setup.comp2.families() {
        for k in 0..nu2.get(b) {
            let v = form_moment(table, &forms, Side::One, b, k)?;
            worst = crate::scalar::max_abs(worst, &v);
        }
    }
    let duals = dual_mop_family(fp, setup, l);
    let nu1 = multi_index(&setup.comp1, l as i64 - 1);
    for a in 1..=setup.comp1.families() {
        for k in 0..nu1.get(a) {
            let v = form_moment(table, &duals, Side::Two, a, k)?;
            worst = crate::scalar::max_abs(worst, &v);
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Coefficient of degree `ν_U[a] - 1` in family `a` equals one.
    TypeII(usize),
    /// The next orthogonality integral against condition family `b` equals one.
    TypeI(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Unknowns on system 1, conditions against system 2.
    Forms,
    /// Unknowns on system 2, conditions against system 1.
    Duals,
}

impl Orientation {
    pub fn unknown_side(self) -> Side {
        match self {
            Orientation::Forms => Side::One,
            Orientation::Duals => Side::Two,
        }
    }
}

/// Solve the mixed orthogonality system directly in the monomial basis.
///
/// Unknowns are the `|ν_U|` coefficients of the polynomials multiplying the
/// weights of the unknown side; the `|ν_C|` conditions are
/// `∫ (Σ_a A_a w_{U,a}) x^k w_{C,b} dμ = 0` for `k < ν_C[b]`.
pub fn solve_mixed_direct<T: Scalar>(
    table: &MomentTable<'_, T>,
    nu_u: &MultiIndex,
    nu_c: &MultiIndex,
    normalization: Normalization,
    orientation: Orientation,
) -> Result<PolynomialFamily<T>> {
    let setup = table.setup();
    let side = orientation.unknown_side();
    let (pu, pc) = match side {
        Side::One => (setup.comp1.families(), setup.comp2.families()),
        Side::Two => (setup.comp2.families(), setup.comp1.families()),
    };
    if nu_u.len() != pu || nu_c.len() != pc {
        return Err(Error::InvalidSetup("multi-index lengths do not match the weight systems".into()));
    }
    if nu_u.total() != nu_c.total() + 1 {
        return Err(Error::InvalidSetup(format!(
            "need |ν_U| = |ν_C| + 1, got {} and {}",
            nu_u.total(),
            nu_c.total()
        )));
    }
    let ctx = table.context();
    let m = |a: usize, b: usize, e: usize| match side {
        Side::One => table.get(a, b, e),
        Side::Two => table.get(b, a, e),
    };
    let unknowns: Vec<(usize, usize)> = (1..=pu)
        .flat_map(|a| (0..nu_u.get(a)).map(move |e| (a, e)))
        .collect();
    let mut rows = Vec::with_capacity(unknowns.len());
    for b in 1..=pc {
        for k in 0..nu_c.get(b) {
            rows.push(
                unknowns
                    .iter()
                    .map(|&(a, e)| m(a, b, e + k))
                    .collect::<Result<Vec<T>>>()?,
            );
        }
    }
    if rank(rows.clone()) < rows.len() {
        return Err(Error::SingularSystem(format!(
            "orthogonality conditions for ν_U = {nu_u}, ν_C = {nu_c} are dependent"
        )));
    }
    let norm_row = match normalization {
        Normalization::TypeII(a) => {
            if a == 0 || a > pu || nu_u.get(a) == 0 {
                return Err(Error::InvalidSetup(format!("type II normalization on empty family {a}")));
            }
            unknowns
                .iter()
                .map(|&(f, e)| {
                    if (f, e) == (a, nu_u.get(a) - 1) {
                        T::one_in(ctx)
                    } else {
                        T::zero_in(ctx)
                    }
                })
                .collect()
        }
        Normalization::TypeI(b) => {
            if b == 0 || b > pc {
                return Err(Error::InvalidSetup(format!("type I normalization on family {b}")));
            }
            unknowns
                .iter()
                .map(|&(a, e)| m(a, b, e + nu_c.get(b)))
                .collect::<Result<Vec<T>>>()?
        }
    };
    rows.push(norm_row);
    let mut rhs = vec![T::zero_in(ctx); rows.len()];
    *rhs.last_mut().unwrap() = T::one_in(ctx);
    let x = solve_linear(rows, rhs).ok_or_else(|| {
        Error::NormalizationImpossible(format!(
            "{normalization:?} vanishes on the solution space for ν_U = {nu_u}, ν_C = {nu_c}"
        ))
    })?;
    let mut coeffs: Vec<Coeffs<T>> = (1..=pu).map(|a| vec![T::zero_in(ctx); nu_u.get(a)]).collect();
    for (&(a, e), v) in unknowns.iter().zip(x) {
        coeffs[a - 1][e] = v;
    }
    Ok(PolynomialFamily { coeffs })
}

fn pick_pivot<T: Scalar>(rows: &[Vec<T>], col: usize, from: usize) -> Option<usize> {
    if T::EXACT {
        (from..rows.len()).find(|&r| !rows[r][col].is_exact_zero())
    } else {
        let best = (from..rows.len()).max_by(|&a, &b| {
            rows[a][col]
                .magnitude()
                .partial_cmp(&rows[b][col].magnitude())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        (!rows[best][col].below_pivot_floor()).then_some(best)
    }
}

fn rank<T: Scalar>(mut rows: Vec<Vec<T>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = pick_pivot(&rows, c, r) else { continue };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            let f = rows[i][c].clone() / rows[r][c].clone();
            if f.is_exact_zero() {
                continue;
            }
            for j in c..ncols {
                let v = rows[i][j].clone() - f.clone() * rows[r][j].clone();
                rows[i][j] = v;
            }
        }
        r += 1;
    }
    r
}

/// Gaussian elimination with row pivoting; `None` if singular.
fn solve_linear<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = a.len();
    for c in 0..n {
        let p = pick_pivot(&a, c, c)?;
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c].clone() / a[c][c].clone();
            if f.is_exact_zero() {
                continue;
            }
            for j in c..n {
                let v = a[i][j].clone() - f.clone() * a[c][j].clone();
                a[i][j] = v;
            }
            let v = b[i].clone() - f * b[c].clone();
            b[i] = v;
        }
    }
    let ctx = b[0].context();
    let mut x = vec![T::zero_in(ctx); n];
    for i in (0..n).rev() {
        let mut acc = b[i].clone();
        for j in i + 1..n {
            acc = acc - a[i][j].clone() * x[j].clone();
        }
        x[i] = acc / a[i][i].clone();
    }
    Some(x)
}

/// Truncated series value of a second-kind function with its tail bound.
#[derive(Clone, Debug)]
pub struct SecondKind<T> {
    pub value: T,
    pub tail_bound: f64,
    pub terms: usize,
}

fn check_outside<T: Scalar>(setup: &ProblemSetup, z: &T) -> Result<()> {
    if setup.measure.contains(z) {
        return Err(Error::PointInSupport(z.to_string()));
    }
    Ok(())
}

/// `C^(l)_b(z) = Σ_{j ≥ l, a2(j) = b} S̄_{l,j} z^{-e2(j)-1}` (side two), or the dual
/// `C̄^(l)_a(z) = Σ_{i ≥ l, a1(i) = a} (S^{-1})_{i,l} z^{-e1(i)-1}` (side one).
///
/// `side` names the weight system of the Cauchy kernel's weight: `Side::Two`
/// pairs `Q^(l)` with `w_{2,b}`, `Side::One` pairs `Q̄^(l)` with `w_{1,a}`.
pub fn second_kind_series<T: Scalar>(
    setup: &ProblemSetup,
    fp: &FactorizationPair<T>,
    l: usize,
    side: Side,
    fam: usize,
    z: &T,
    tolerance: f64,
) -> Result<SecondKind<T>> {
    check_outside(setup, z)?;
    let (value, terms) = second_kind_sum(setup, fp, l, side, fam, z);
    let tail_bound = series_tail_bound(setup, fp, l, side, fam, z.approx_f64())?;
    if !(tail_bound <= tolerance) {
        return Err(Error::TailBoundNotAchieved {
            bound: tail_bound,
            tolerance,
        });
    }
    Ok(SecondKind {
        value,
        tail_bound,
        terms,
    })
}

/// The truncated series alone: its value and the number of terms.
pub fn second_kind_sum<T: Scalar>(
    setup: &ProblemSetup,
    fp: &FactorizationPair<T>,
    l: usize,
    side: Side,
    fam: usize,
    z: &T,
) -> (T, usize) {
    let n = fp.size();
    let comp = setup.composition(side);
    let ctx = z.context();
    let zinv = T::one_in(ctx) / z.clone();
    let mut value = T::zero_in(ctx);
    let mut terms = 0;
    for j in l..n {
        if family(comp, j) != fam {
            continue;
        }
        let coeff = match side {
            Side::Two => fp.sbar[(l, j)].clone(),
            Side::One => fp.s_inv[(j, l)].clone(),
        };
        value = value + coeff * Scalar::pow_u32(&zinv, exponent(comp, j) as u32 + 1);
        terms += 1;
    }
    (value, terms)
}

/// Bound on the series terms dropped by the truncation:
/// `‖Q w‖₁ (R/|z|)^{m0} / (|z| - R)` with `R = max |x|` on the support and
/// `m0` the first exponent outside the window.
pub fn series_tail_bound<T: Scalar>(
    setup: &ProblemSetup,
    fp: &FactorizationPair<T>,
    l: usize,
    side: Side,
    fam: usize,
    z: f64,
) -> Result<f64> {
    let r = crate::scalar::Scalar::approx_f64(&setup.measure.radius());
    let az = z.abs();
    if az <= r {
        return Ok(f64::INFINITY);
    }
    let norm = weighted_form_l1_bound(setup, fp, l, side, fam)?;
    Ok(tail_bound_from_norm(setup, fp.size(), side, fam, norm, z))
}

/// `norm (R/|z|)^{m0} / (|z| - R)` for a precomputed `‖Q w‖₁` bound.
pub fn tail_bound_from_norm(setup: &ProblemSetup, size: usize, side: Side, fam: usize, norm: f64, z: f64) -> f64 {
    let r = crate::scalar::Scalar::approx_f64(&setup.measure.radius());
    let az = z.abs();
    if az <= r {
        return f64::INFINITY;
    }
    let comp = setup.composition(side);
    let m0 = exponent(comp, assoc_plus(comp, size, fam));
    norm * (r / az).powi(m0 as i32) / (az - r)
}

/// Upper bound on `‖Q w‖₁` over the support: `sqrt(μ(Δ) ∫ (Q w)^2 dμ)`, evaluated
/// loosely at 128 bits.
pub fn weighted_form_l1_bound<T: Scalar>(
    setup: &ProblemSetup,
    fp: &FactorizationPair<T>,
    l: usize,
    side: Side,
    fam: usize,
) -> Result<f64> {
    let p = 128;
    let ffp = fp.to_float(p);
    let forms = LinearForms::new(setup, &ffp);
    let w = &setup.weights(side)[fam - 1];
    let mut involved = setup.all_weights();
    involved.push(w);
    let (glo, ghi) = setup.grading(&involved);
    let opts = QuadOptions::new(p).with_tolerance(1e-8).with_grading(glo, ghi);
    let f = |x: &Float| {
        let q = match side {
            Side::Two => forms.eval_q(l, x)?,
            Side::One => forms.eval_qbar(l, x)?,
        };
        let v = q * eval_weight(w, x)?;
        Ok(v.clone() * v)
    };
    let sq = integrate(setup, &f, &opts)?.value.approx_f64();
    let mass = integrate(setup, &|_| Ok(Float::from_i64(1, p)), &opts)?.value.approx_f64();
    // slack for the loose quadrature
    Ok((mass * sq.max(0.0)).sqrt() * (1.0 + 1e-6))
}

/// `∫ Q^(l)(x) w_{2,b}(x) / (z - x) dμ` (side two) or `∫ Q̄^(l) w_{1,a} / (z - x) dμ`
/// (side one), by quadrature.
pub fn second_kind_integral(
    setup: &ProblemSetup,
    fp: &FactorizationPair<Float>,
    l: usize,
    side: Side,
    fam: usize,
    z: &Float,
) -> Result<crate::quadrature::QuadResult> {
    second_kind_integral_tol(setup, fp, l, side, fam, z, None)
}

/// As [`second_kind_integral`], with the quadrature tolerance set apart from
/// the working precision of `z`.
pub fn second_kind_integral_tol(
    setup: &ProblemSetup,
    fp: &FactorizationPair<Float>,
    l: usize,
    side: Side,
    fam: usize,
    z: &Float,
    tol: Option<f64>,
) -> Result<crate::quadrature::QuadResult> {
    check_outside(setup, z)?;
    let p = z.precision();
    let forms = LinearForms::new(setup, fp);
    let w = &setup.weights(side)[fam - 1];
    let mut involved = setup.all_weights();
    involved.push(w);
    let (glo, ghi) = setup.grading(&involved);
    let mut opts = QuadOptions::new(p).with_grading(glo, ghi);
    if let Some(t) = tol {
        opts = opts.with_tolerance(t);
    }
    let f = |x: &Float| {
        let q = match side {
            Side::Two => forms.eval_q(l, x)?,
            Side::One => forms.eval_qbar(l, x)?,
        };
        Ok(q * eval_weight(w, x)? / (z.clone() - x.clone()))
    };
    integrate(setup, &f, &opts)
}

/// Sanity value: `ln(z/(z-1))` is the Cauchy transform of the unit weight on `[0,1]`.
pub fn log_cauchy_unit(z: &Float) -> Result<Float> {
    let one = Float::from_i64(1, z.precision());
    (z.clone() / (z.clone() - one)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Composition;
    use crate::factorization::{build_moment_matrix_with, gauss_borel};
    use crate::measures::{MeasureSpec, Weight};
    use crate::scalar::{ratio, Rational};

    fn unit() -> MeasureSpec {
        MeasureSpec::lebesgue(ratio(0, 1), ratio(1, 1)).unwrap()
    }

    fn f1() -> ProblemSetup {
        let c = Composition::new(vec![1]).unwrap();
        ProblemSetup::new(unit(), vec![Weight::one()], vec![Weight::one()], c.clone(), c).unwrap()
    }

    fn f2() -> ProblemSetup {
        ProblemSetup::new(
            unit(),
            vec![Weight::one(), Weight::Power(ratio(1, 2))],
            vec![Weight::one()],
            Composition::new(vec![1, 1]).unwrap(),
            Composition::new(vec![1]).unwrap(),
        )
        .unwrap()
    }

    fn factor(setup: &ProblemSetup, n: usize) -> FactorizationPair<Rational> {
        let table = MomentTable::new(setup, ());
        let g = build_moment_matrix_with(&table, n, Exec::default()).unwrap();
        gauss_borel(&g.g, Exec::default()).unwrap()
    }

    #[test]
    fn hilbert_polynomials() {
        let s = f1();
        let fp = factor(&s, 6);
        assert_eq!(mop_coeffs(&fp, &s, 1, 1), vec![ratio(-1, 2), ratio(1, 1)]);
        assert_eq!(mop_coeffs(&fp, &s, 0, 1), vec![ratio(1, 1)]);
        assert_eq!(dual_mop_coeffs(&fp, &s, 1, 1), vec![ratio(-6, 1), ratio(12, 1)]);
        assert_eq!(dual_mop_coeffs(&fp, &s, 0, 1), vec![ratio(1, 1)]);
        let forms = LinearForms::new(&s, &fp);
        assert_eq!(forms.eval_q(1, &ratio(1, 2)).unwrap(), ratio(0, 1));
        assert_eq!(forms.eval_q(0, &ratio(5, 7)).unwrap(), ratio(1, 1));
        assert_eq!(forms.eval_qbar(1, &ratio(3, 4)).unwrap(), ratio(3, 1));
        let x = ratio(2, 7);
        assert_eq!(forms.q_all(&x).unwrap()[3], forms.eval_q(3, &x).unwrap());
        assert_eq!(forms.qbar_all(&x).unwrap()[4], forms.eval_qbar(4, &x).unwrap());
    }

    #[test]
    fn sqrt_family_polynomial() {
        let s = f2();
        let fp = factor(&s, 6);
        assert_eq!(mop_coeffs(&fp, &s, 1, 2), vec![ratio(1, 1)]);
    }

    #[test]
    fn biorthogonality_examples() {
        let s = f1();
        let fp = factor(&s, 4);
        let table = MomentTable::<Rational>::new(&s, ());
        assert_eq!(check_biorthogonality(&table, &fp, 1, 1).unwrap(), ratio(1, 1));
        assert_eq!(check_biorthogonality(&table, &fp, 1, 0).unwrap(), ratio(0, 1));
        assert_eq!(check_biorthogonality(&table, &fp, 0, 0).unwrap(), ratio(1, 1));
        assert_eq!(check_orthogonality(&table, &fp, 1).unwrap(), ratio(0, 1));
        assert_eq!(check_orthogonality(&table, &fp, 0).unwrap(), ratio(0, 1));
        let s2 = f2();
        let fp2 = factor(&s2, 6);
        let t2 = MomentTable::<Rational>::new(&s2, ());
        assert_eq!(check_orthogonality(&t2, &fp2, 2).unwrap(), ratio(0, 1));
    }

    #[test]
    fn direct_solver_examples() {
        let s = f1();
        let table = MomentTable::<Rational>::new(&s, ());
        let p = solve_mixed_direct(
            &table,
            &vec![2].into(),
            &vec![1].into(),
            Normalization::TypeII(1),
            Orientation::Forms,
        )
        .unwrap();
        assert_eq!(p.family(1), &[ratio(-1, 2), ratio(1, 1)]);
        let p = solve_mixed_direct(&table, &vec![1].into(), &vec![0].into(), Normalization::TypeII(1), Orientation::Forms)
            .unwrap();
        assert_eq!(p.family(1), &[ratio(1, 1)]);

        let s2 = f2();
        let fp2 = factor(&s2, 6);
        let t2 = MomentTable::<Rational>::new(&s2, ());
        let p = solve_mixed_direct(&t2, &vec![1, 1].into(), &vec![1].into(), Normalization::TypeII(2), Orientation::Forms)
            .unwrap();
        assert_eq!(p, mop_family(&fp2, &s2, 1));
    }

    #[test]
    fn direct_solver_rejects_bad_shapes() {
        let s = f1();
        let table = MomentTable::<Rational>::new(&s, ());
        let r = solve_mixed_direct(&table, &vec![3].into(), &vec![1].into(), Normalization::TypeII(1), Orientation::Forms);
        assert!(matches!(r, Err(Error::InvalidSetup(_))));
    }

    #[test]
    fn duplicate_weights_make_singular_systems() {
        let s = ProblemSetup::new(
            unit(),
            vec![Weight::one(), Weight::Power(ratio(1, 1))],
            vec![Weight::one()],
            Composition::new(vec![1, 1]).unwrap(),
            Composition::new(vec![1]).unwrap(),
        )
        .unwrap();
        let table = MomentTable::<Rational>::new(&s, ());
        // unknown columns 1, x | x, x^2: the only null vector is x - x, whose x^2 coefficient is 0
        let r = solve_mixed_direct(&table, &vec![2, 2].into(), &vec![3].into(), Normalization::TypeII(2), Orientation::Forms);
        assert!(matches!(r, Err(Error::NormalizationImpossible(_))));
    }

    #[test]
    fn second_kind_hilbert() {
        let s = f1();
        let fp = factor(&s, 20);
        let z = ratio(10, 1);
        let series = second_kind_series(&s, &fp, 0, Side::Two, 1, &z, 1e-12).unwrap();
        let want = (10f64 / 9.0).ln();
        assert!((series.value.approx_f64() - want).abs() < 1e-12);
        let ffp = fp.to_float(128);
        let zf = Float::from_i64(10, 128);
        let integral = second_kind_integral(&s, &ffp, 0, Side::Two, 1, &zf).unwrap();
        let exact = log_cauchy_unit(&zf).unwrap();
        assert!((integral.value - exact).magnitude() < Float::pow2(-90, 128));
        for l in [1, 5] {
            let ser = second_kind_series(&s, &fp, l, Side::Two, 1, &z, 1e-8).unwrap();
            let int = second_kind_integral(&s, &ffp, l, Side::Two, 1, &zf).unwrap();
            let d = (Float::from_rational(&ser.value, 128) - int.value).magnitude().approx_f64();
            assert!(d <= ser.tail_bound + 1e-25, "l={l}: {d} vs {}", ser.tail_bound);
        }
        assert!(matches!(
            second_kind_series(&s, &fp, 0, Side::Two, 1, &ratio(1, 2), 1.0),
            Err(Error::PointInSupport(_))
        ));
        assert!(matches!(
            second_kind_series(&s, &fp, 0, Side::Two, 1, &ratio(-1, 1), 1.0),
            Err(Error::TailBoundNotAchieved { .. })
        ));
        // leading term of the expansion at infinity is g00 / z
        let big = ratio(1_000_000, 1);
        let v = second_kind_series(&s, &fp, 0, Side::Two, 1, &big, 1.0).unwrap().value;
        assert!((v * big.clone() - ratio(1, 1)).approx_f64().abs() < 1e-5);
    }
}
