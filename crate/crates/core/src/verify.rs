//! One-shot pipeline (moments, factorization, Jacobi operator) and the residual
//! checks run against it.

use std::time::{Duration, Instant};

use crate::cd::{kernel_grid, sigma_escapes, sigma_sets};
use crate::error::{Error, Result};
use crate::factorization::{build_moment_matrix_with, gauss_borel, hankel_residual, FactorizationPair, MomentMatrix, MomentTable};
use crate::jacobi::{eigenvalue_residual, jacobi_entry_from_factors, jacobi_operator, JacobiBand};
use crate::measures::{ProblemSetup, Side};
use crate::parallel::Exec;
use crate::polynomials::{
    biorthogonality_matrix, second_kind_integral_tol, second_kind_sum, tail_bound_from_norm, weighted_form_l1_bound, LinearForms,
};
use crate::scalar::{max_abs, Float, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Hankel,
    Biorth,
    Eigen,
    CdClassical,
    CdAlternative,
    JFactors,
    SecondKind,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Hankel,
        Check::Biorth,
        Check::Eigen,
        Check::CdClassical,
        Check::CdAlternative,
        Check::JFactors,
        Check::SecondKind,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Hankel => "hankel",
            Check::Biorth => "biorth",
            Check::Eigen => "eigen",
            Check::CdClassical => "cd-classical",
            Check::CdAlternative => "cd-alternative",
            Check::JFactors => "j-factors",
            Check::SecondKind => "second-kind",
        }
    }

    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn needs_kernel_margin(self) -> bool {
        matches!(self, Check::CdClassical | Check::CdAlternative)
    }

    /// Default max-abs threshold on the float backend.
    pub fn float_threshold(self) -> f64 {
        match self {
            Check::Hankel => 1e-30,
            Check::Biorth => 1e-20,
            // ratio of the discrepancy to the admissible error
            Check::SecondKind => 1.0,
            _ => 1e-15,
        }
    }
}

/// Evaluation grid shared by the point-wise checks.
#[derive(Clone, Debug, Default)]
pub struct SampleGrid {
    pub points: Vec<Rational>,
    pub pairs: Vec<(Rational, Rational)>,
    pub scales: Vec<usize>,
    pub z: Vec<Rational>,
}

impl SampleGrid {
    /// Grid points, all distinct pairs, three scales over the splitting window and the
    /// second-kind points.
    pub fn default_for(setup: &ProblemSetup, splitting_limit: usize) -> Self {
        let lmin = setup.comp1.total().max(setup.comp2.total());
        SampleGrid {
            points: crate::fixtures::grid_points(setup),
            pairs: crate::fixtures::grid_pairs(setup),
            scales: crate::fixtures::grid_scales(lmin, splitting_limit.max(lmin)),
            z: crate::fixtures::second_kind_points(setup),
        }
    }
}

pub struct Pipeline<'a, T: Scalar> {
    pub setup: &'a ProblemSetup,
    pub table: MomentTable<'a, T>,
    pub g: MomentMatrix<T>,
    pub fp: FactorizationPair<T>,
    pub j_s: JacobiBand<T>,
    pub j_sbar: JacobiBand<T>,
    pub j: JacobiBand<T>,
    pub exec: Exec,
}

impl<'a, T: Scalar> Pipeline<'a, T> {
    pub fn build(setup: &'a ProblemSetup, size: usize, ctx: T::Context, exec: Exec) -> Result<Self> {
        let table = MomentTable::new(setup, ctx);
        let g = build_moment_matrix_with(&table, size, exec)?;
        let fp = gauss_borel(&g.g, exec)?;
        let (j_s, j_sbar, j) = jacobi_operator(&fp, &setup.comp1, &setup.comp2, exec);
        Ok(Pipeline {
            setup,
            table,
            g,
            fp,
            j_s,
            j_sbar,
            j,
            exec,
        })
    }

    pub fn size(&self) -> usize {
        self.fp.size()
    }

    pub fn forms(&self) -> LinearForms<'_, T> {
        LinearForms::new(self.setup, &self.fp)
    }

    fn ctx(&self) -> T::Context {
        self.table.context()
    }

    fn lift(&self, q: &Rational) -> T {
        T::from_rational(q, self.ctx())
    }
}

/// Residual of one check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub check: Check,
    /// Max-abs residual, exact for the rational backend.
    pub residual: String,
    pub residual_f64: f64,
    /// Structural violations (nonzero entries where none may be).
    pub violations: usize,
    pub elapsed: Duration,
}

impl CheckOutcome {
    /// Exact backends need an exactly zero residual (except the quadrature-based
    /// second-kind check); float backends compare against the threshold.
    pub fn passes(&self, exact: bool, threshold: f64) -> bool {
        if self.violations > 0 {
            return false;
        }
        if exact && self.check != Check::SecondKind {
            self.residual == "0"
        } else {
            self.residual_f64 <= threshold
        }
    }
}

fn outcome<T: Scalar>(check: Check, residual: T, violations: usize, start: Instant) -> CheckOutcome {
    CheckOutcome {
        check,
        residual_f64: residual.approx_f64(),
        residual: if T::EXACT {
            residual.to_exact_string()
        } else {
            format!("{:e}", residual.approx_f64())
        },
        violations,
        elapsed: start.elapsed(),
    }
}

fn fold_max<T: Scalar>(zero: T, values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(zero, |acc, v| max_abs(acc, &v))
}

pub fn check_hankel<T: Scalar>(p: &Pipeline<'_, T>) -> CheckOutcome {
    let start = Instant::now();
    outcome(Check::Hankel, hankel_residual(&p.g.g, &p.g.comp1, &p.g.comp2), 0, start)
}

/// `max |B - I|` over the full bi-orthogonality matrix.
pub fn check_biorth<T: Scalar>(p: &Pipeline<'_, T>) -> Result<CheckOutcome> {
    let start = Instant::now();
    let b = biorthogonality_matrix(&p.table, &p.fp, p.exec)?;
    let id = crate::matrix::Matrix::identity(p.size(), p.ctx());
    let r = b.sub(&id).max_abs().expect("non-empty");
    Ok(outcome(Check::Biorth, r, 0, start))
}

pub fn check_eigen<T: Scalar>(p: &Pipeline<'_, T>, grid: &SampleGrid) -> Result<CheckOutcome> {
    let start = Instant::now();
    let forms = p.forms();
    let rs = p
        .exec
        .try_map(grid.points.len(), |k| eigenvalue_residual(&p.j, &forms, &p.lift(&grid.points[k])))?;
    Ok(outcome(Check::Eigen, fold_max(T::zero_in(p.ctx()), rs), 0, start))
}

fn kernel_reports<T: Scalar>(p: &Pipeline<'_, T>, grid: &SampleGrid) -> Result<Vec<crate::cd::KernelReport<T>>> {
    let pairs: Vec<(T, T)> = grid.pairs.iter().map(|(x, y)| (p.lift(x), p.lift(y))).collect();
    kernel_grid(&p.table, &p.j, &p.forms(), &grid.scales, &pairs, p.exec)
}

fn check_scales<T: Scalar>(p: &Pipeline<'_, T>, grid: &SampleGrid) -> Result<()> {
    let lim = p.j.splitting_limit();
    if let Some(&l) = grid.scales.iter().find(|&&l| l > lim) {
        return Err(Error::WindowTooSmall(format!(
            "scale {l} exceeds the exact splitting window 1..={lim} at N = {}",
            p.size()
        )));
    }
    Ok(())
}

/// `max |classical - direct|` over scales and pairs.
pub fn check_cd_classical<T: Scalar>(p: &Pipeline<'_, T>, grid: &SampleGrid) -> Result<CheckOutcome> {
    let start = Instant::now();
    check_scales(p, grid)?;
    let reports = kernel_reports(p, grid)?;
    let r = fold_max(
        T::zero_in(p.ctx()),
        reports.into_iter().map(|r| r.classical - r.direct),
    );
    Ok(outcome(Check::CdClassical, r, 0, start))
}

/// `max |alternative - direct|` and `max |splitting - direct|`; nonzero entries
/// of the off-diagonal blocks outside the index sets count as violations.
pub fn check_cd_alternative<T: Scalar>(p: &Pipeline<'_, T>, grid: &SampleGrid) -> Result<CheckOutcome> {
    let start = Instant::now();
    check_scales(p, grid)?;
    let mut violations = 0;
    // on a float backend roundoff makes every entry nonzero; the residual covers it
    for &l in grid.scales.iter().filter(|_| T::EXACT) {
        let sets = sigma_sets(&p.setup.comp1, &p.setup.comp2, l)?;
        violations += sigma_escapes(&p.j, &sets).len();
    }
    let reports = kernel_reports(p, grid)?;
    let r = fold_max(
        T::zero_in(p.ctx()),
        reports.into_iter().flat_map(|r| {
            [r.alternative - r.direct.clone(), r.splitting - r.direct]
        }),
    );
    Ok(outcome(Check::CdAlternative, r, violations, start))
}

/// `max |J_{ij}(factors) - J_{ij}|` over exact entries; outside the band the
/// factor formula is zero, so those entries enter with their magnitude.
pub fn check_j_factors<T: Scalar>(p: &Pipeline<'_, T>) -> Result<CheckOutcome> {
    let start = Instant::now();
    let n = p.size();
    let rows = p.exec.try_map(n, |i| {
        let mut worst = T::zero_in(p.ctx());
        for j in 0..n {
            if !p.j.is_exact(i, j) {
                continue;
            }
            match jacobi_entry_from_factors(&p.fp, &p.setup.comp1, &p.setup.comp2, i, j) {
                Ok(v) => worst = max_abs(worst, &(v - p.j.j[(i, j)].clone())),
                Err(Error::OutsideBand { .. }) => worst = max_abs(worst, &p.j.j[(i, j)]),
                Err(Error::WindowTooSmall(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(worst)
    })?;
    Ok(outcome(Check::JFactors, fold_max(T::zero_in(p.ctx()), rows), 0, start))
}

/// Series against quadrature for every family on both sides at `l = 0` and the grid
/// scales; the residual is the largest ratio of the discrepancy to the admissible
/// error (tail bound plus quadrature tolerance).
pub fn check_second_kind<T: Scalar>(p: &Pipeline<'_, T>, grid: &SampleGrid, precision: usize) -> Result<CheckOutcome> {
    let start = Instant::now();
    // forms with large cancelling coefficients need headroom beyond the target
    let work = precision + 64;
    let ffp = p.fp.to_float(work);
    let quad_tol = 2f64.powi(-(precision as i32 - 28));
    let mut ls = vec![0];
    ls.extend(grid.scales.iter().copied().filter(|&l| l < p.size()));
    ls.dedup();
    let mut forms = Vec::new();
    for &l in &ls {
        for side in [Side::One, Side::Two] {
            for fam in 1..=p.setup.composition(side).families() {
                forms.push((l, side, fam));
            }
        }
    }
    let norms = p.exec.try_map(forms.len(), |k| {
        let (l, side, fam) = forms[k];
        weighted_form_l1_bound(p.setup, &p.fp, l, side, fam)
    })?;
    let jobs: Vec<(usize, &Rational)> = (0..forms.len()).flat_map(|k| grid.z.iter().map(move |z| (k, z))).collect();
    let ratios = p.exec.try_map(jobs.len(), |j| {
        let (k, z) = jobs[j];
        let (l, side, fam) = forms[k];
        let zt = p.lift(z);
        if p.setup.measure.contains(&zt) {
            return Err(Error::PointInSupport(z.to_string()));
        }
        let (series, _) = second_kind_sum(p.setup, &p.fp, l, side, fam, &zt);
        let tail = tail_bound_from_norm(p.setup, p.size(), side, fam, norms[k], z.approx_f64());
        let zf = Float::from_rational(z, work);
        let integral = second_kind_integral_tol(p.setup, &ffp, l, side, fam, &zf, Some(quad_tol))?;
        let diff = (series.to_float(work) - integral.value.clone()).magnitude().approx_f64();
        let scale = integral.value.magnitude().approx_f64().max(1.0);
        let allowed = tail + integral.error_estimate + 1e3 * quad_tol * scale;
        Ok::<f64, Error>(diff / allowed)
    })?;
    let worst = ratios.into_iter().fold(0.0f64, f64::max);
    Ok(CheckOutcome {
        check: Check::SecondKind,
        residual: format!("{worst:e}"),
        residual_f64: worst,
        violations: 0,
        elapsed: start.elapsed(),
    })
}

pub fn run_check<T: Scalar>(p: &Pipeline<'_, T>, check: Check, grid: &SampleGrid, precision: usize) -> Result<CheckOutcome> {
    match check {
        Check::Hankel => Ok(check_hankel(p)),
        Check::Biorth => check_biorth(p),
        Check::Eigen => check_eigen(p, grid),
        Check::CdClassical => check_cd_classical(p, grid),
        Check::CdAlternative => check_cd_alternative(p, grid),
        Check::JFactors => check_j_factors(p),
        Check::SecondKind => check_second_kind(p, grid, precision),
    }
}
